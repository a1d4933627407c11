//! Nilpotent Lie algebras over the rationals, given by structure constants.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicU64, Ordering};

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Q;
use crate::subspace::Subspace;

static NEXT_ID: AtomicU64 = AtomicU64::new(1);

/// Identity of a constructed algebra.  Vectors and subspaces carry it so that
/// operands from different algebras are rejected instead of silently mixed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AlgebraId(u64);

impl AlgebraId {
    fn fresh() -> Self {
        AlgebraId(NEXT_ID.fetch_add(1, Ordering::Relaxed))
    }
}

/// Element of a Lie algebra in basis coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vector {
    pub algebra: AlgebraId,
    pub coords: Vec<Q>,
}

impl Vector {
    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Q::is_zero)
    }

    pub fn add(&self, other: &Vector) -> Vector {
        assert_eq!(self.algebra, other.algebra, "vectors from different algebras");
        Vector {
            algebra: self.algebra,
            coords: self.coords.iter().zip(&other.coords).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Vector) -> Vector {
        assert_eq!(self.algebra, other.algebra, "vectors from different algebras");
        Vector {
            algebra: self.algebra,
            coords: self.coords.iter().zip(&other.coords).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn neg(&self) -> Vector {
        Vector { algebra: self.algebra, coords: self.coords.iter().map(|a| -a).collect() }
    }

    pub fn scale(&self, c: &Q) -> Vector {
        Vector { algebra: self.algebra, coords: self.coords.iter().map(|a| a * c).collect() }
    }
}

/// Result of re-running the Jacobi check on a constructed algebra.
#[derive(Debug, Clone, PartialEq)]
pub enum JacobiCheck {
    Ok,
    Violation { i: usize, j: usize, k: usize, residual: Vector },
}

/// Strictly upper triangular matrix presentation of the basis.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixPresentation {
    /// Side length of the square matrices.
    pub size: usize,
    /// One strictly upper triangular matrix per basis element.
    pub mats: Vec<Matrix>,
}

/// A nilpotent Lie algebra with rational structure constants.
///
/// Construction validates the Jacobi identity and nilpotency; an algebra that
/// exists is always valid.  The descending central series is computed once at
/// construction and cached.
#[derive(Debug, Clone)]
pub struct LieAlgebra {
    id: AlgebraId,
    pub name: String,
    pub labels: Vec<String>,
    dim: usize,
    /// Brackets of basis pairs `i < j`, dense coordinates; absent means zero.
    brackets: BTreeMap<(usize, usize), Vec<Q>>,
    series: Vec<Subspace>,
    pub presentation: Option<MatrixPresentation>,
    chart_names: Vec<Option<String>>,
}

impl PartialEq for LieAlgebra {
    fn eq(&self, other: &Self) -> bool {
        self.id == other.id
    }
}

impl LieAlgebra {
    /// Build an algebra from bracket data `[(i, j), coords]` with `i < j`.
    pub fn new(
        name: &str,
        labels: Vec<String>,
        bracket_data: Vec<((usize, usize), Vec<Q>)>,
    ) -> Result<LieAlgebra> {
        let dim = labels.len();
        let mut brackets = BTreeMap::new();
        for ((i, j), coords) in bracket_data {
            if i >= j || j >= dim {
                return Err(Error::Mismatch(format!(
                    "bracket indices ({i}, {j}) out of range for dimension {dim}"
                )));
            }
            if coords.len() != dim {
                return Err(Error::Mismatch(format!(
                    "bracket value for ({i}, {j}) has length {} instead of {dim}",
                    coords.len()
                )));
            }
            if coords.iter().any(|c| !c.is_zero()) {
                brackets.insert((i, j), coords);
            }
        }

        let id = AlgebraId::fresh();
        let mut alg = LieAlgebra {
            id,
            name: name.to_string(),
            labels,
            dim,
            brackets,
            series: Vec::new(),
            presentation: None,
            chart_names: vec![None; dim],
        };

        if let JacobiCheck::Violation { i, j, k, residual } = alg.run_jacobi() {
            return Err(Error::Jacobi { i, j, k, residual: residual.coords });
        }
        alg.series = alg.compute_series()?;
        Ok(alg)
    }

    /// Attach a strictly upper triangular matrix presentation.  The
    /// presentation must reproduce the structure constants exactly.
    pub fn with_presentation(mut self, pres: MatrixPresentation) -> Result<LieAlgebra> {
        if pres.mats.len() != self.dim {
            return Err(Error::Mismatch("presentation size differs from dimension".into()));
        }
        for m in &pres.mats {
            if m.rows != pres.size || m.cols != pres.size {
                return Err(Error::Mismatch("presentation matrices have wrong shape".into()));
            }
            for i in 0..m.rows {
                for j in 0..=i {
                    if !m[(i, j)].is_zero() {
                        return Err(Error::Mismatch(
                            "presentation matrices must be strictly upper triangular".into(),
                        ));
                    }
                }
            }
        }
        // Commutators of the presentation must match the structure constants.
        let flat: Vec<Vec<Q>> = pres
            .mats
            .iter()
            .map(|m| (0..pres.size * pres.size).map(|k| m[(k / pres.size, k % pres.size)].clone()).collect())
            .collect();
        let span = Matrix::from_rows(flat.clone());
        for i in 0..self.dim {
            for j in (i + 1)..self.dim {
                let comm = pres.mats[i].mul(&pres.mats[j]).add(&pres.mats[j].mul(&pres.mats[i]).scale(&-crate::scalar::q(1)));
                let target: Vec<Q> =
                    (0..pres.size * pres.size).map(|k| comm[(k / pres.size, k % pres.size)].clone()).collect();
                let coeffs = span.transpose().solve(&target).map_err(|_| {
                    Error::Mismatch(format!("presentation commutator [{i},{j}] leaves the span", ))
                })?;
                let expected = self.bracket_basis(i, j);
                if coeffs != expected {
                    return Err(Error::Mismatch(format!(
                        "presentation commutator [{i},{j}] disagrees with structure constants"
                    )));
                }
            }
        }
        self.presentation = Some(pres);
        Ok(self)
    }

    /// Override the chart coordinate names used for the listed basis
    /// indices when quotient charts are constructed.
    pub fn with_chart_names(mut self, names: Vec<(usize, String)>) -> Result<LieAlgebra> {
        for (i, n) in names {
            if i >= self.dim {
                return Err(Error::Mismatch(format!("chart name index {i} out of range")));
            }
            self.chart_names[i] = Some(n);
        }
        Ok(self)
    }

    /// Coordinate name for basis index `i`: the override when present,
    /// otherwise the lowercased basis label.
    pub fn chart_name(&self, i: usize) -> String {
        self.chart_names[i].clone().unwrap_or_else(|| self.labels[i].to_lowercase())
    }

    pub fn id(&self) -> AlgebraId {
        self.id
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn label_index(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn zero_vector(&self) -> Vector {
        Vector { algebra: self.id, coords: vec![Q::zero(); self.dim] }
    }

    pub fn basis_vector(&self, i: usize) -> Vector {
        let mut v = self.zero_vector();
        v.coords[i] = crate::scalar::q(1);
        v
    }

    pub fn vector(&self, coords: Vec<Q>) -> Result<Vector> {
        if coords.len() != self.dim {
            return Err(Error::Mismatch(format!(
                "vector length {} does not match dimension {}",
                coords.len(),
                self.dim
            )));
        }
        Ok(Vector { algebra: self.id, coords })
    }

    pub fn check_member(&self, v: &Vector) -> Result<()> {
        if v.algebra != self.id {
            return Err(Error::Mismatch("vector belongs to a different algebra".into()));
        }
        Ok(())
    }

    /// Bracket of two basis elements, as dense coordinates.
    pub fn bracket_basis(&self, i: usize, j: usize) -> Vec<Q> {
        use std::cmp::Ordering::*;
        match i.cmp(&j) {
            Equal => vec![Q::zero(); self.dim],
            Less => self
                .brackets
                .get(&(i, j))
                .cloned()
                .unwrap_or_else(|| vec![Q::zero(); self.dim]),
            Greater => self
                .brackets
                .get(&(j, i))
                .map(|c| c.iter().map(|x| -x).collect())
                .unwrap_or_else(|| vec![Q::zero(); self.dim]),
        }
    }

    /// Bracket on raw coordinates, bilinear expansion over the table.
    pub fn bracket_raw(&self, x: &[Q], y: &[Q]) -> Vec<Q> {
        let mut out = vec![Q::zero(); self.dim];
        for (&(i, j), val) in &self.brackets {
            // coefficient of [e_i, e_j] in [x, y] is x_i y_j - x_j y_i
            let c = &x[i] * &y[j] - &x[j] * &y[i];
            if c.is_zero() {
                continue;
            }
            for (o, v) in out.iter_mut().zip(val) {
                if !v.is_zero() {
                    *o += &c * v;
                }
            }
        }
        out
    }

    pub fn bracket(&self, x: &Vector, y: &Vector) -> Result<Vector> {
        self.check_member(x)?;
        self.check_member(y)?;
        Ok(Vector { algebra: self.id, coords: self.bracket_raw(&x.coords, &y.coords) })
    }

    /// Bracket on coordinates with polynomial entries.
    pub fn bracket_poly(
        &self,
        x: &[crate::poly::Polynomial],
        y: &[crate::poly::Polynomial],
    ) -> Vec<crate::poly::Polynomial> {
        use crate::poly::Polynomial;
        let nvars = x.first().map_or(0, Polynomial::nvars);
        let mut out = vec![Polynomial::zero(nvars); self.dim];
        for (&(i, j), val) in &self.brackets {
            let c = x[i].mul(&y[j]).sub(&x[j].mul(&y[i]));
            if c.is_zero() {
                continue;
            }
            for (o, v) in out.iter_mut().zip(val) {
                if !v.is_zero() {
                    *o = o.add(&c.scale(v));
                }
            }
        }
        out
    }

    fn run_jacobi(&self) -> JacobiCheck {
        for i in 0..self.dim {
            for j in (i + 1)..self.dim {
                for k in (j + 1)..self.dim {
                    let ei = self.basis_coords(i);
                    let ej = self.basis_coords(j);
                    let ek = self.basis_coords(k);
                    let mut sum = self.bracket_raw(&ei, &self.bracket_raw(&ej, &ek));
                    for (s, t) in sum.iter_mut().zip(self.bracket_raw(&ej, &self.bracket_raw(&ek, &ei))) {
                        *s += t;
                    }
                    for (s, t) in sum.iter_mut().zip(self.bracket_raw(&ek, &self.bracket_raw(&ei, &ej))) {
                        *s += t;
                    }
                    if sum.iter().any(|c| !c.is_zero()) {
                        return JacobiCheck::Violation {
                            i,
                            j,
                            k,
                            residual: Vector { algebra: self.id, coords: sum },
                        };
                    }
                }
            }
        }
        JacobiCheck::Ok
    }

    fn basis_coords(&self, i: usize) -> Vec<Q> {
        let mut v = vec![Q::zero(); self.dim];
        v[i] = crate::scalar::q(1);
        v
    }

    /// Re-run the Jacobi check.  Always `Ok` for a constructed algebra; kept
    /// as a callable operation for reports.
    pub fn jacobi_check(&self) -> JacobiCheck {
        self.run_jacobi()
    }

    fn compute_series(&self) -> Result<Vec<Subspace>> {
        let mut series = vec![Subspace::whole(self.id, self.dim)];
        loop {
            let current = series.last().unwrap();
            let mut gens: Vec<Vec<Q>> = Vec::new();
            for i in 0..self.dim {
                let ei = self.basis_coords(i);
                for b in current.basis_rows() {
                    gens.push(self.bracket_raw(&ei, b));
                }
            }
            let next = Subspace::from_rows(self.id, self.dim, gens);
            if next.dim() == current.dim() {
                return Err(Error::NotNilpotent { stalled_dim: next.dim() });
            }
            let done = next.dim() == 0;
            series.push(next);
            if done {
                return Ok(series);
            }
        }
    }

    /// Descending central series `g = g^(0) ⊇ g^(1) ⊇ … ⊇ {0}`.
    pub fn central_series(&self) -> &[Subspace] {
        &self.series
    }

    /// Least `l` with `g^(l) = 0`.
    pub fn nilpotency_step(&self) -> usize {
        self.series.len() - 1
    }

    /// Largest level `j` with `v ∈ g^(j)`; `None` for the zero vector
    /// (which lies in every term).
    pub fn level_of(&self, v: &Vector) -> Option<usize> {
        if v.is_zero() {
            return None;
        }
        let mut level = 0;
        for (j, s) in self.series.iter().enumerate().skip(1) {
            if s.contains(v) {
                level = j;
            } else {
                break;
            }
        }
        Some(level)
    }

    pub fn center(&self) -> Subspace {
        let mut rows = Vec::new();
        for i in 0..self.dim {
            let ei = self.basis_coords(i);
            // rows of ad(e_i)^T give the conditions [e_i, x] = 0 coordinatewise
            let mut cols: Vec<Vec<Q>> = vec![vec![Q::zero(); self.dim]; self.dim];
            for j in 0..self.dim {
                let ej = self.basis_coords(j);
                let br = self.bracket_raw(&ei, &ej);
                for (k, c) in br.into_iter().enumerate() {
                    cols[k][j] = c;
                }
            }
            rows.extend(cols);
        }
        let stacked = Matrix::from_rows(rows);
        let kernel = stacked.kernel();
        Subspace::from_rows(self.id, self.dim, kernel)
    }

    pub fn is_subalgebra(&self, s: &Subspace) -> Result<bool> {
        s.check_algebra(self.id)?;
        for a in s.basis_rows() {
            for b in s.basis_rows() {
                let br = self.bracket_raw(a, b);
                if !s.contains_coords(&br) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    pub fn is_ideal(&self, s: &Subspace) -> Result<bool> {
        s.check_algebra(self.id)?;
        for i in 0..self.dim {
            let ei = self.basis_coords(i);
            for b in s.basis_rows() {
                let br = self.bracket_raw(&ei, b);
                if !s.contains_coords(&br) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Smallest subalgebra containing `s`.
    pub fn subalgebra_closure(&self, s: &Subspace) -> Result<Subspace> {
        s.check_algebra(self.id)?;
        let mut cur = s.clone();
        loop {
            let mut gens: Vec<Vec<Q>> = cur.basis_rows().map(<[Q]>::to_vec).collect();
            for a in cur.basis_rows() {
                for b in cur.basis_rows() {
                    gens.push(self.bracket_raw(a, b));
                }
            }
            let next = Subspace::from_rows(self.id, self.dim, gens);
            if next.dim() == cur.dim() {
                return Ok(next);
            }
            cur = next;
        }
    }

    /// Smallest ideal containing `s`.
    pub fn ideal_closure(&self, s: &Subspace) -> Result<Subspace> {
        s.check_algebra(self.id)?;
        let mut cur = s.clone();
        loop {
            let mut gens: Vec<Vec<Q>> = cur.basis_rows().map(<[Q]>::to_vec).collect();
            for i in 0..self.dim {
                let ei = self.basis_coords(i);
                for b in cur.basis_rows() {
                    gens.push(self.bracket_raw(&ei, b));
                }
            }
            let next = Subspace::from_rows(self.id, self.dim, gens);
            if next.dim() == cur.dim() {
                return Ok(next);
            }
            cur = next;
        }
    }

    /// Quotient by an ideal.  The quotient basis consists of the standard
    /// basis vectors at the non-pivot coordinates of `n`, in index order.
    pub fn quotient_algebra(&self, n: &Subspace) -> Result<(LieAlgebra, Projection)> {
        n.check_algebra(self.id)?;
        if !self.is_ideal(n)? {
            return Err(Error::Precondition("quotient by a subspace that is not an ideal".into()));
        }
        let comp: Vec<usize> = (0..self.dim).filter(|i| !n.pivots().contains(i)).collect();
        let qdim = comp.len();

        // Projection: reduce modulo n, then read off the complement coordinates.
        let mut pmat = Matrix::zeros(qdim, self.dim);
        for (row, &c) in comp.iter().enumerate() {
            pmat[(row, c)] = crate::scalar::q(1);
            for (r, &p) in n.pivots().iter().enumerate() {
                pmat[(row, p)] = -n.basis_row(r)[c].clone();
            }
        }
        let mut section = Matrix::zeros(self.dim, qdim);
        for (col, &c) in comp.iter().enumerate() {
            section[(c, col)] = crate::scalar::q(1);
        }

        let labels: Vec<String> = comp.iter().map(|&c| self.labels[c].clone()).collect();
        let mut bracket_data = Vec::new();
        for a in 0..qdim {
            for b in (a + 1)..qdim {
                let br = self.bracket_basis(comp[a], comp[b]);
                let img = pmat.mul_vec(&br);
                bracket_data.push(((a, b), img));
            }
        }
        let quotient = LieAlgebra::new(&format!("{}/{}", self.name, n.name_hint()), labels, bracket_data)?;

        let proj = Projection {
            source: self.id,
            target: quotient.id,
            matrix: pmat,
            section,
        };
        // The projection must be a homomorphism of Lie algebras.
        for i in 0..self.dim {
            for j in (i + 1)..self.dim {
                let lhs = proj.matrix.mul_vec(&self.bracket_basis(i, j));
                let pi = proj.matrix.mul_vec(&self.basis_coords(i));
                let pj = proj.matrix.mul_vec(&self.basis_coords(j));
                let rhs = quotient.bracket_raw(&pi, &pj);
                if lhs != rhs {
                    return Err(Error::Inconsistent(
                        "quotient projection is not a Lie homomorphism".into(),
                    ));
                }
            }
        }
        Ok((quotient, proj))
    }

    /// The level map `π_j : g^(j) → g^(j)/g^(j+1)`.
    pub fn pi_j(&self, j: usize) -> Result<QuotientMap> {
        if j >= self.series.len() {
            return Err(Error::Mismatch(format!(
                "level {j} exceeds nilpotency step {}",
                self.nilpotency_step()
            )));
        }
        let domain = self.series[j].clone();
        let kernel = if j + 1 < self.series.len() {
            self.series[j + 1].clone()
        } else {
            Subspace::zero(self.id, self.dim)
        };
        QuotientMap::new(domain, kernel)
    }
}

/// Linear projection onto a quotient algebra, with its canonical section.
#[derive(Debug, Clone)]
pub struct Projection {
    pub source: AlgebraId,
    pub target: AlgebraId,
    pub matrix: Matrix,
    pub section: Matrix,
}

impl Projection {
    pub fn apply(&self, v: &Vector) -> Result<Vector> {
        if v.algebra != self.source {
            return Err(Error::Mismatch("projection applied to foreign vector".into()));
        }
        Ok(Vector { algebra: self.target, coords: self.matrix.mul_vec(&v.coords) })
    }

    pub fn apply_subspace(&self, s: &Subspace) -> Result<Subspace> {
        s.check_algebra(self.source)?;
        let rows: Vec<Vec<Q>> = s.basis_rows().map(|r| self.matrix.mul_vec(r)).collect();
        Ok(Subspace::from_rows(self.target, self.matrix.rows, rows))
    }

    pub fn lift(&self, v: &Vector) -> Result<Vector> {
        if v.algebra != self.target {
            return Err(Error::Mismatch("lift applied to foreign vector".into()));
        }
        Ok(Vector { algebra: self.source, coords: self.section.mul_vec(&v.coords) })
    }
}

/// Quotient of a subspace by a contained subspace, `dom → dom/ker`.
///
/// Canonical representatives are obtained by reducing modulo `ker`; the
/// reduced basis of `dom` then serves as the coordinate basis of the image.
#[derive(Debug, Clone)]
pub struct QuotientMap {
    pub domain: Subspace,
    pub kernel: Subspace,
    reps: Matrix,
}

impl QuotientMap {
    pub fn new(domain: Subspace, kernel: Subspace) -> Result<QuotientMap> {
        kernel.check_algebra(domain.algebra())?;
        if !domain.contains_subspace(&kernel) {
            return Err(Error::Mismatch("quotient kernel is not contained in the domain".into()));
        }
        let rows: Vec<Vec<Q>> = domain
            .basis_rows()
            .map(|r| kernel.reduce_coords(r))
            .filter(|r| r.iter().any(|c| !c.is_zero()))
            .collect();
        let (reps, _) = Matrix::from_rows_or_empty(rows, domain.ambient_dim()).rref();
        Ok(QuotientMap { domain, kernel, reps })
    }

    pub fn image_dim(&self) -> usize {
        self.reps.rows
    }

    /// Representative basis of the image, as ambient coordinate rows.
    pub fn rep_rows(&self) -> Vec<Vec<Q>> {
        self.reps.rows_vec()
    }

    /// Coordinates of `π(x)` in the representative basis.
    pub fn apply(&self, x: &Vector) -> Result<Vec<Q>> {
        self.domain.check_algebra(x.algebra)?;
        if !self.domain.contains(x) {
            return Err(Error::Mismatch("vector outside the domain of the level map".into()));
        }
        let reduced = self.kernel.reduce_coords(&x.coords);
        self.reps.transpose().solve(&reduced)
    }
}
