//! Linear subspaces of a Lie algebra with a canonical reduced basis.
//!
//! The basis is kept in reduced row echelon form with zero rows dropped, so
//! two subspaces are equal exactly when their representations are equal.

use num_traits::Zero;

use crate::algebra::{AlgebraId, Vector};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Q;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subspace {
    algebra: AlgebraId,
    ambient: usize,
    basis: Matrix,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn from_rows(algebra: AlgebraId, ambient: usize, rows: Vec<Vec<Q>>) -> Subspace {
        for r in &rows {
            assert_eq!(r.len(), ambient, "subspace generator of wrong length");
        }
        let (basis, pivots) = Matrix::from_rows_or_empty(rows, ambient).rref();
        Subspace { algebra, ambient, basis, pivots }
    }

    pub fn span(algebra: AlgebraId, ambient: usize, vectors: &[Vector]) -> Result<Subspace> {
        let mut rows = Vec::with_capacity(vectors.len());
        for v in vectors {
            if v.algebra != algebra {
                return Err(Error::Mismatch("span of vectors from a different algebra".into()));
            }
            rows.push(v.coords.clone());
        }
        Ok(Subspace::from_rows(algebra, ambient, rows))
    }

    pub fn zero(algebra: AlgebraId, ambient: usize) -> Subspace {
        Subspace::from_rows(algebra, ambient, Vec::new())
    }

    pub fn whole(algebra: AlgebraId, ambient: usize) -> Subspace {
        let rows = (0..ambient)
            .map(|i| {
                let mut r = vec![Q::zero(); ambient];
                r[i] = crate::scalar::q(1);
                r
            })
            .collect();
        Subspace::from_rows(algebra, ambient, rows)
    }

    pub fn algebra(&self) -> AlgebraId {
        self.algebra
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.rows
    }

    pub fn is_zero(&self) -> bool {
        self.basis.rows == 0
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn check_algebra(&self, id: AlgebraId) -> Result<()> {
        if self.algebra != id {
            return Err(Error::Mismatch("subspace belongs to a different algebra".into()));
        }
        Ok(())
    }

    pub fn basis_row(&self, i: usize) -> &[Q] {
        self.basis.row(i)
    }

    pub fn basis_rows(&self) -> impl Iterator<Item = &[Q]> {
        (0..self.basis.rows).map(|i| self.basis.row(i))
    }

    pub fn basis_vectors(&self) -> Vec<Vector> {
        self.basis_rows()
            .map(|r| Vector { algebra: self.algebra, coords: r.to_vec() })
            .collect()
    }

    /// Canonical representative of `x` modulo this subspace: eliminate every
    /// pivot coordinate using the reduced basis.
    pub fn reduce_coords(&self, x: &[Q]) -> Vec<Q> {
        assert_eq!(x.len(), self.ambient);
        let mut out = x.to_vec();
        for (r, &p) in self.pivots.iter().enumerate() {
            if out[p].is_zero() {
                continue;
            }
            let c = std::mem::replace(&mut out[p], Q::zero());
            for (o, b) in out.iter_mut().zip(self.basis.row(r)) {
                if !b.is_zero() {
                    *o -= &c * b;
                }
            }
            out[p] = Q::zero();
        }
        out
    }

    pub fn contains_coords(&self, x: &[Q]) -> bool {
        self.reduce_coords(x).iter().all(Q::is_zero)
    }

    pub fn contains(&self, v: &Vector) -> bool {
        v.algebra == self.algebra && self.contains_coords(&v.coords)
    }

    pub fn contains_subspace(&self, other: &Subspace) -> bool {
        other.algebra == self.algebra && other.basis_rows().all(|r| self.contains_coords(r))
    }

    /// Coordinates of `v` in the reduced basis; error if `v` lies outside.
    pub fn coords_in_basis(&self, v: &Vector) -> Result<Vec<Q>> {
        self.check_algebra(v.algebra)?;
        self.basis.transpose().solve(&v.coords)
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        assert_eq!(self.algebra, other.algebra, "sum of subspaces from different algebras");
        let mut rows: Vec<Vec<Q>> = self.basis_rows().map(<[Q]>::to_vec).collect();
        rows.extend(other.basis_rows().map(<[Q]>::to_vec));
        Subspace::from_rows(self.algebra, self.ambient, rows)
    }

    /// Intersection via block elimination: rows `[u | u]` for generators of
    /// `self` and `[v | 0]` for generators of `other`; after elimination the
    /// right halves of rows with zero left half span the intersection.
    pub fn intersect(&self, other: &Subspace) -> Subspace {
        assert_eq!(self.algebra, other.algebra, "intersection across algebras");
        let n = self.ambient;
        let mut rows: Vec<Vec<Q>> = Vec::new();
        for r in self.basis_rows() {
            let mut row = r.to_vec();
            row.extend_from_slice(r);
            rows.push(row);
        }
        for r in other.basis_rows() {
            let mut row = r.to_vec();
            row.extend(vec![Q::zero(); n]);
            rows.push(row);
        }
        let mut m = Matrix::from_rows_or_empty(rows, 2 * n);
        m.rref_in_place();
        let mut inter_rows = Vec::new();
        for i in 0..m.rows {
            let left_zero = (0..n).all(|j| m[(i, j)].is_zero());
            if left_zero {
                let right: Vec<Q> = (n..2 * n).map(|j| m[(i, j)].clone()).collect();
                if right.iter().any(|c| !c.is_zero()) {
                    inter_rows.push(right);
                }
            }
        }
        Subspace::from_rows(self.algebra, n, inter_rows)
    }

    /// Standard basis indices that extend this subspace's basis to the whole
    /// space: exactly the non-pivot coordinates, in index order.
    pub fn complement_indices(&self) -> Vec<usize> {
        (0..self.ambient).filter(|i| !self.pivots.contains(i)).collect()
    }

    /// Hint used when deriving a name for a quotient algebra.
    pub fn name_hint(&self) -> String {
        format!("span{}", self.dim())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::LieAlgebra;
    use crate::scalar::q;

    fn ambient4() -> LieAlgebra {
        LieAlgebra::new(
            "abelian4",
            (1..=4).map(|i| format!("E{i}")).collect(),
            vec![],
        )
        .unwrap()
    }

    #[test]
    fn canonical_representation_makes_equality_structural() {
        let a = ambient4();
        let u = Subspace::from_rows(a.id(), 4, vec![
            vec![q(1), q(1), q(0), q(0)],
            vec![q(0), q(2), q(0), q(0)],
        ]);
        let v = Subspace::from_rows(a.id(), 4, vec![
            vec![q(3), q(0), q(0), q(0)],
            vec![q(5), q(7), q(0), q(0)],
        ]);
        assert_eq!(u, v);
        assert_eq!(u.pivots(), &[0, 1]);
    }

    #[test]
    fn sum_and_intersection() {
        let a = ambient4();
        let u = Subspace::from_rows(a.id(), 4, vec![
            vec![q(1), q(0), q(0), q(0)],
            vec![q(0), q(1), q(1), q(0)],
        ]);
        let v = Subspace::from_rows(a.id(), 4, vec![
            vec![q(0), q(1), q(1), q(0)],
            vec![q(0), q(0), q(0), q(1)],
        ]);
        let s = u.sum(&v);
        let i = u.intersect(&v);
        assert_eq!(s.dim(), 3);
        assert_eq!(i.dim(), 1);
        assert!(i.contains_coords(&[q(0), q(1), q(1), q(0)]));
        // dim(U) + dim(V) = dim(U + V) + dim(U ∩ V)
        assert_eq!(u.dim() + v.dim(), s.dim() + i.dim());
    }

    #[test]
    fn reduce_gives_canonical_representative() {
        let a = ambient4();
        let u = Subspace::from_rows(a.id(), 4, vec![vec![q(1), q(2), q(0), q(0)]]);
        let r = u.reduce_coords(&[q(3), q(1), q(1), q(0)]);
        assert_eq!(r, vec![q(0), q(-5), q(1), q(0)]);
        assert!(u.contains_coords(&[q(2), q(4), q(0), q(0)]));
        assert!(!u.contains_coords(&[q(2), q(5), q(0), q(0)]));
    }

    #[test]
    fn complement_indices_skip_pivots() {
        let a = ambient4();
        let u = Subspace::from_rows(a.id(), 4, vec![
            vec![q(1), q(0), q(3), q(0)],
            vec![q(0), q(0), q(0), q(1)],
        ]);
        assert_eq!(u.complement_indices(), vec![1, 2]);
    }
}
