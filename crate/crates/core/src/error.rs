//! Crate wide error type.

use crate::scalar::Q;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// Operands belong to different algebras or have mismatched dimensions.
    #[error("operand mismatch: {0}")]
    Mismatch(String),

    /// Structure constants violate the Jacobi identity.
    /// Indices are 0-based basis positions, the residual is the cyclic sum
    /// `[e_i,[e_j,e_k]] + [e_j,[e_k,e_i]] + [e_k,[e_i,e_j]]`.
    #[error("Jacobi identity fails on basis triple ({i}, {j}, {k})")]
    Jacobi { i: usize, j: usize, k: usize, residual: Vec<Q> },

    /// The descending central series does not reach zero.
    #[error("algebra is not nilpotent: central series stalls at dimension {stalled_dim}")]
    NotNilpotent { stalled_dim: usize },

    /// A requested degree exceeds the supported ceiling.
    #[error("degree {requested} exceeds the supported ceiling {ceiling}")]
    DegreeCeiling { requested: usize, ceiling: usize },

    /// The algebra carries no matrix presentation.
    #[error("algebra '{0}' has no matrix presentation")]
    NoPresentation(String),

    /// A linear system that must be consistent is not.
    #[error("inconsistent linear system: {0}")]
    Inconsistent(String),

    /// Polynomials from different rings were combined.
    #[error("polynomial ring mismatch: {0}")]
    RingMismatch(String),

    /// A derivation is not locally nilpotent within the iteration budget.
    #[error("derivation is not locally nilpotent on '{var}' within {budget} iterations")]
    NotLocallyNilpotent { var: String, budget: usize },

    /// Text input could not be parsed.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// A precondition of an operation does not hold.
    #[error("precondition failed: {0}")]
    Precondition(String),

    /// Unknown catalog name.
    #[error("unknown catalog entry '{0}'")]
    UnknownEntry(String),
}

pub type Result<T> = std::result::Result<T, Error>;
