//! Exact-arithmetic tools for biquotient actions on simply connected
//! nilpotent complex Lie groups.
//!
//! A nilpotent Lie algebra is described by rational structure constants on a
//! labelled basis.  On top of that the crate provides the truncated
//! Baker-Campbell-Hausdorff group law, central series and Levi-Malcev data,
//! freeness certificates for two-sided actions `(v, h) . g = v g h^{-1}`,
//! induced derivation actions on quotients `G/H`, polynomial slice search,
//! non-properness witness search over polynomial rays, and the normal-form
//! reductions used to decide small cases.  Everything is computed over the
//! rationals; no floating point is used anywhere.

pub mod action;
pub mod algebra;
pub mod catalog;
pub mod decomp;
pub mod derivation;
pub mod error;
pub mod group;
pub mod liefile;
pub mod linalg;
pub mod poly;
pub mod reduction;
pub mod sample;
pub mod scalar;
pub mod slice;
pub mod subspace;
pub mod witness;

pub use error::Error;
pub use scalar::Q;

/// Crate version reported by the CLI `versions` field.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
