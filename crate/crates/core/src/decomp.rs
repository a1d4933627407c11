//! Complements adapted to the central series, and the product charts they
//! induce on the group.
//!
//! A subspace basis is adapted when its vectors of level `>= j` span the
//! intersection with every series term `g^(j)`.  Given subalgebras whose
//! level images are independent, the group factors uniquely as a product of
//! exponentials, one per part, computed level by level.

use num_traits::Zero;

use crate::algebra::{LieAlgebra, QuotientMap, Vector};
use crate::error::{Error, Result};
use crate::group::{star_many, star_many_poly};
use crate::linalg::Matrix;
use crate::poly::{solve_with_poly_rhs, Polynomial};
use crate::scalar::Q;
use crate::subspace::Subspace;

/// Basis of a subspace graded by central-series level.
#[derive(Debug, Clone)]
pub struct AdaptedBasis {
    pub vectors: Vec<Vector>,
    pub levels: Vec<usize>,
}

/// Basis of `s` in which the vectors lying in `g^(j)` span `s ∩ g^(j)` for
/// every `j`.  Each returned vector has the stated exact level.
pub fn adapted_basis(alg: &LieAlgebra, s: &Subspace) -> Result<AdaptedBasis> {
    s.check_algebra(alg.id())?;
    let series = alg.central_series();
    let mut vectors = Vec::new();
    let mut levels = Vec::new();
    for j in 0..alg.nilpotency_step() {
        let dom = s.intersect(&series[j]);
        let ker = s.intersect(&series[j + 1]);
        let qm = QuotientMap::new(dom, ker)?;
        for row in qm.rep_rows() {
            vectors.push(alg.vector(row)?);
            levels.push(j);
        }
    }
    debug_assert_eq!(vectors.len(), s.dim());
    Ok(AdaptedBasis { vectors, levels })
}

/// A choice of level pieces `c_j ⊆ g^(j)` that complement the given parts:
/// `g^(j) = (Σ parts ∩ g^(j)) ⊕ c_j ⊕ g^(j+1)` modulo the next term.
#[derive(Debug, Clone, PartialEq)]
pub struct SliceDecomposition {
    pub levels: Vec<Subspace>,
    pub slice: Subspace,
}

/// Outcome of splitting the level quotients along a pair of subalgebras.
#[derive(Debug, Clone)]
pub enum PairSplit {
    Split(SliceDecomposition),
    /// The level images of the two parts overlap at this level.
    Obstructed { level: usize },
}

/// A section of an orbit map, presented either as the exponential of a
/// linear complement or as the common zero set of chart polynomials.
#[derive(Debug, Clone, PartialEq)]
pub enum SliceDescription {
    /// `exp(s)` for a subspace `s` transverse to the orbits.
    Linear(Subspace),
    /// `{f_1 = ... = f_k = 0}` cut out of the chart named by `vars`.
    LevelSet {
        vars: Vec<String>,
        functions: Vec<Polynomial>,
    },
}

fn complement_within(alg: &LieAlgebra, inside: &Subspace, avoid: &Subspace) -> Subspace {
    // Extend `avoid` to all of `inside` by greedily taking reduced basis rows
    // of `inside` in order; the choice is canonical for canonical bases.
    let mut acc = avoid.clone();
    let mut rows = Vec::new();
    for r in inside.basis_rows() {
        let grown = acc.sum(&Subspace::from_rows(alg.id(), alg.dim(), vec![r.to_vec()]));
        if grown.dim() > acc.dim() {
            rows.push(r.to_vec());
            acc = grown;
        }
    }
    Subspace::from_rows(alg.id(), alg.dim(), rows)
}

/// Slice for a single subalgebra: pieces `c_j` with
/// `g^(j) = (h ∩ g^(j)) + c_j + g^(j+1)` and the sum direct modulo
/// `g^(j+1)`.  Always exists.
pub fn subgroup_slice(alg: &LieAlgebra, h: &Subspace) -> Result<SliceDecomposition> {
    h.check_algebra(alg.id())?;
    let series = alg.central_series();
    let mut levels = Vec::new();
    let mut slice = Subspace::zero(alg.id(), alg.dim());
    for j in 0..alg.nilpotency_step() {
        let avoid = h.intersect(&series[j]).sum(&series[j + 1]);
        let c = complement_within(alg, &series[j], &avoid);
        slice = slice.sum(&c);
        levels.push(c);
    }
    Ok(SliceDecomposition { levels, slice })
}

/// Slice adapted to both subalgebras at once, so that
/// `g^(j) = π_j(v) ⊕ c_j ⊕ π_j(h)` holds on every level quotient.  Fails
/// exactly when some level images of `v` and `h` meet nontrivially.
pub fn pair_slice(alg: &LieAlgebra, v: &Subspace, h: &Subspace) -> Result<PairSplit> {
    v.check_algebra(alg.id())?;
    h.check_algebra(alg.id())?;
    let series = alg.central_series();
    let mut levels = Vec::new();
    let mut slice = Subspace::zero(alg.id(), alg.dim());
    for j in 0..alg.nilpotency_step() {
        let next = &series[j + 1];
        let av = v.intersect(&series[j]).sum(next);
        let ah = h.intersect(&series[j]).sum(next);
        if av.intersect(&ah) != *next {
            return Ok(PairSplit::Obstructed { level: j });
        }
        let c = complement_within(alg, &series[j], &av.sum(&ah));
        slice = slice.sum(&c);
        levels.push(c);
    }
    Ok(PairSplit::Split(SliceDecomposition { levels, slice }))
}

/// Independent parts summing to `g`, together with a witness basis ordered
/// by part whose members inside each series term span it.
#[derive(Debug, Clone)]
pub struct LeviMalcevDecomposition {
    pub algebra: crate::algebra::AlgebraId,
    pub parts: Vec<Subspace>,
    pub witness_basis: Vec<Vector>,
}

impl LeviMalcevDecomposition {
    /// Factor `exp(w)` into one group element per part, in part order.
    pub fn factorize(&self, alg: &LieAlgebra, w: &Vector) -> Result<Vec<Vector>> {
        factorize(alg, w, &self.parts)
    }
}

/// True iff the members of `basis` lying in each series term span it; the
/// order of the vectors does not matter, only membership counts.
pub fn is_levi_malcev_basis(alg: &LieAlgebra, basis: &[Vector]) -> Result<bool> {
    for v in basis {
        alg.check_member(v)?;
    }
    let rows: Vec<Vec<Q>> = basis.iter().map(|v| v.coords.clone()).collect();
    let span = Subspace::from_rows(alg.id(), alg.dim(), rows);
    if basis.len() != alg.dim() || span.dim() != alg.dim() {
        return Err(Error::Precondition("not a basis of the algebra".into()));
    }
    for term in &alg.central_series()[1..] {
        let members: Vec<Vec<Q>> = basis
            .iter()
            .filter(|v| term.contains(v))
            .map(|v| v.coords.clone())
            .collect();
        let inside = Subspace::from_rows(alg.id(), alg.dim(), members);
        if inside.dim() != term.dim() {
            return Ok(false);
        }
    }
    Ok(true)
}

fn witness_from_parts(alg: &LieAlgebra, parts: &[Subspace]) -> Result<Vec<Vector>> {
    let mut out = Vec::new();
    for p in parts {
        out.extend(adapted_basis(alg, p)?.vectors);
    }
    Ok(out)
}

/// Outcome of the decomposition attempt for a pair of subalgebras.
#[derive(Debug, Clone)]
pub enum PairDecomposition {
    Exists(LeviMalcevDecomposition),
    /// Lowest level whose images of the two parts meet nontrivially.
    NotExists { level: usize },
}

/// Decompose `g = v ⊕ s ⊕ h` with a witness basis compatible with the
/// central series, or report the lowest obstructed level.
pub fn levi_malcev_decomposition(
    alg: &LieAlgebra,
    v: &Subspace,
    h: &Subspace,
) -> Result<PairDecomposition> {
    if v.intersect(h).dim() != 0 {
        return Err(Error::Precondition(
            "the parts meet away from zero, so no decomposition separates them".into(),
        ));
    }
    match pair_slice(alg, v, h)? {
        PairSplit::Obstructed { level } => Ok(PairDecomposition::NotExists { level }),
        PairSplit::Split(sd) => {
            let parts = vec![v.clone(), sd.slice, h.clone()];
            let witness_basis = witness_from_parts(alg, &parts)?;
            Ok(PairDecomposition::Exists(LeviMalcevDecomposition {
                algebra: alg.id(),
                parts,
                witness_basis,
            }))
        }
    }
}

/// Decomposition `g = s ⊕ h` for a single subalgebra; always exists.
pub fn h_slice(alg: &LieAlgebra, h: &Subspace) -> Result<LeviMalcevDecomposition> {
    let sd = subgroup_slice(alg, h)?;
    let parts = vec![sd.slice, h.clone()];
    let witness_basis = witness_from_parts(alg, &parts)?;
    Ok(LeviMalcevDecomposition { algebra: alg.id(), parts, witness_basis })
}

/// Precomputed data for factoring group elements through a fixed list of
/// parts: adapted bases, and per level the column matrix of the level's
/// basis vectors padded with a basis of the next series term.
pub struct ProductChart<'a> {
    alg: &'a LieAlgebra,
    pub parts: Vec<AdaptedBasis>,
    /// For each level: indices `(part, vector)` of the level's columns.
    level_slots: Vec<Vec<(usize, usize)>>,
    /// For each level: the solve matrix `[B_j | basis of g^(j+1)]`.
    level_mats: Vec<Matrix>,
}

impl<'a> ProductChart<'a> {
    /// The parts must jointly split every level quotient; otherwise the
    /// factorization would not be unique.
    pub fn new(alg: &'a LieAlgebra, parts: &[Subspace]) -> Result<ProductChart<'a>> {
        let series = alg.central_series();
        let adapted: Vec<AdaptedBasis> =
            parts.iter().map(|p| adapted_basis(alg, p)).collect::<Result<_>>()?;
        let mut level_slots = Vec::new();
        let mut level_mats = Vec::new();
        for j in 0..alg.nilpotency_step() {
            let mut slots = Vec::new();
            let mut cols: Vec<Vec<Q>> = Vec::new();
            for (t, part) in adapted.iter().enumerate() {
                for (k, lv) in part.levels.iter().enumerate() {
                    if *lv == j {
                        slots.push((t, k));
                        cols.push(part.vectors[k].coords.clone());
                    }
                }
            }
            let m_j = series[j].dim() - series[j + 1].dim();
            if slots.len() != m_j {
                return Err(Error::Precondition(format!(
                    "parts contribute {} directions at level {j} but the quotient has dimension {m_j}",
                    slots.len()
                )));
            }
            let ncols = cols.len();
            cols.extend(series[j + 1].basis_rows().map(<[Q]>::to_vec));
            let mat = Matrix::from_rows_or_empty(cols, alg.dim()).transpose();
            if mat.rank() != ncols + series[j + 1].dim() {
                return Err(Error::Precondition(format!(
                    "part directions at level {j} are dependent modulo the next series term"
                )));
            }
            level_slots.push(slots);
            level_mats.push(mat);
        }
        Ok(ProductChart { alg, parts: adapted, level_slots, level_mats })
    }

    fn assemble(&self, coeffs: &[Vec<Q>]) -> Vec<Vector> {
        self.parts
            .iter()
            .zip(coeffs)
            .map(|(part, cs)| {
                let mut acc = self.alg.zero_vector();
                for (v, c) in part.vectors.iter().zip(cs) {
                    acc = acc.add(&v.scale(c));
                }
                acc
            })
            .collect()
    }

    /// Solve `exp(a_1) ⋯ exp(a_r) = exp(w)` for arguments `a_t` in the
    /// parts.  Proceeds level by level: perturbing the arguments by level-`j`
    /// vectors moves the product additively modulo `g^(j+1)`.
    pub fn factorize(&self, w: &Vector) -> Result<Vec<Vector>> {
        self.alg.check_member(w)?;
        let mut coeffs: Vec<Vec<Q>> =
            self.parts.iter().map(|p| vec![Q::zero(); p.vectors.len()]).collect();
        for j in 0..self.alg.nilpotency_step() {
            let product = star_many(self.alg, &self.assemble(&coeffs))?;
            let residual: Vec<Q> =
                w.coords.iter().zip(&product.coords).map(|(a, b)| a - b).collect();
            let sol = self.level_mats[j].solve(&residual)?;
            for (slot, (t, k)) in self.level_slots[j].iter().enumerate() {
                coeffs[*t][*k] += &sol[slot];
            }
        }
        let args = self.assemble(&coeffs);
        let check = star_many(self.alg, &args)?;
        if check != *w {
            return Err(Error::Inconsistent("factorization did not close".into()));
        }
        Ok(args)
    }
}

impl<'a> ProductChart<'a> {
    fn assemble_poly(&self, coeffs: &[Vec<Polynomial>]) -> Vec<Vec<Polynomial>> {
        let nvars = coeffs
            .iter()
            .flat_map(|c| c.iter())
            .map(Polynomial::nvars)
            .next()
            .unwrap_or(0);
        self.parts
            .iter()
            .zip(coeffs)
            .map(|(part, cs)| {
                let mut acc = vec![Polynomial::zero(nvars); self.alg.dim()];
                for (v, c) in part.vectors.iter().zip(cs) {
                    for (a, coord) in acc.iter_mut().zip(&v.coords) {
                        if !coord.is_zero() {
                            *a = a.add(&c.scale(coord));
                        }
                    }
                }
                acc
            })
            .collect()
    }

    /// Factorization with polynomial coordinates: returns, per part, the
    /// coefficient polynomials on its adapted basis vectors.
    pub fn factorize_poly(&self, w: &[Polynomial]) -> Result<Vec<Vec<Polynomial>>> {
        if w.len() != self.alg.dim() {
            return Err(Error::Mismatch("coordinate vector of wrong length".into()));
        }
        let nvars = w.first().map_or(0, Polynomial::nvars);
        let mut coeffs: Vec<Vec<Polynomial>> = self
            .parts
            .iter()
            .map(|p| vec![Polynomial::zero(nvars); p.vectors.len()])
            .collect();
        for j in 0..self.alg.nilpotency_step() {
            let product = star_many_poly(self.alg, &self.assemble_poly(&coeffs))?;
            let residual: Vec<Polynomial> =
                w.iter().zip(&product).map(|(a, b)| a.sub(b)).collect();
            let sol = solve_with_poly_rhs(&self.level_mats[j], &residual)?;
            for (slot, (t, k)) in self.level_slots[j].iter().enumerate() {
                coeffs[*t][*k] = coeffs[*t][*k].add(&sol[slot]);
            }
        }
        let check = star_many_poly(self.alg, &self.assemble_poly(&coeffs))?;
        if check.as_slice() != w {
            return Err(Error::Inconsistent("polynomial factorization did not close".into()));
        }
        Ok(coeffs)
    }
}

/// One-shot factorization of `exp(w)` through `parts`.
pub fn factorize(alg: &LieAlgebra, w: &Vector, parts: &[Subspace]) -> Result<Vec<Vector>> {
    ProductChart::new(alg, parts)?.factorize(w)
}
