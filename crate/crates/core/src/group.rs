//! Group arithmetic in exponential coordinates.
//!
//! For a nilpotent algebra the product `exp(x) exp(y) = exp(x ★ y)` is a
//! finite bracket polynomial.  The coefficient tables are generated once by
//! expanding `log(e^x e^y)` in the free associative algebra truncated at the
//! working degree and projecting each homogeneous part onto bracket words.
//! Every generated table is re-expanded and compared against the associative
//! series before use, so a table that loads is correct by construction.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use num_traits::Zero;

use crate::algebra::{LieAlgebra, Vector};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::poly::Polynomial;
use crate::scalar::{factorial, q, Q};

/// Largest nilpotency step the product tables cover.
pub const DEGREE_CEILING: usize = 6;

/// Letters: 0 stands for the left operand, 1 for the right.
type Word = Vec<u8>;
/// Element of the truncated free associative algebra on two letters.
type FreeElt = BTreeMap<Word, Q>;

fn add_term(e: &mut FreeElt, w: Word, c: Q) {
    use std::collections::btree_map::Entry;
    if c.is_zero() {
        return;
    }
    match e.entry(w) {
        Entry::Occupied(mut o) => {
            *o.get_mut() += c;
            if o.get().is_zero() {
                o.remove();
            }
        }
        Entry::Vacant(v) => {
            v.insert(c);
        }
    }
}

fn mul_trunc(a: &FreeElt, b: &FreeElt, deg: usize) -> FreeElt {
    let mut out = FreeElt::new();
    for (wa, ca) in a {
        for (wb, cb) in b {
            if wa.len() + wb.len() > deg {
                continue;
            }
            let mut w = wa.clone();
            w.extend_from_slice(wb);
            add_term(&mut out, w, ca * cb);
        }
    }
    out
}

/// `log(e^x e^y)` truncated at `deg`, in the associative algebra.
fn bch_associative(deg: usize) -> FreeElt {
    let mut sum = FreeElt::new(); // e^x e^y - 1
    let x: FreeElt = [(vec![0u8], q(1))].into();
    let y: FreeElt = [(vec![1u8], q(1))].into();
    let mut xp: FreeElt = [(Word::new(), q(1))].into();
    for i in 0..=deg {
        let mut yp: FreeElt = [(Word::new(), q(1))].into();
        for j in 0..=deg - i {
            if i + j > 0 {
                let c = (factorial(i) * factorial(j)).recip();
                for (w, coeff) in mul_trunc(&xp, &yp, deg) {
                    add_term(&mut sum, w, coeff * &c);
                }
            }
            yp = mul_trunc(&yp, &y, deg);
        }
        xp = mul_trunc(&xp, &x, deg);
    }
    // log(1 + u) = u - u^2/2 + u^3/3 - ...
    let mut out = FreeElt::new();
    let mut power: FreeElt = [(Word::new(), q(1))].into();
    for k in 1..=deg {
        power = mul_trunc(&power, &sum, deg);
        let sign = if k % 2 == 1 { q(1) } else { q(-1) };
        for (w, c) in &power {
            add_term(&mut out, w.clone(), c * &sign / q(k as i64));
        }
    }
    out
}

/// Expand the right-normed bracket word `[w0, [w1, ... [w_{m-2}, w_{m-1}]]]`
/// in the associative algebra.
fn expand_bracket_word(w: &[u8]) -> FreeElt {
    if w.len() == 1 {
        return [(w.to_vec(), q(1))].into();
    }
    let inner = expand_bracket_word(&w[1..]);
    let letter: FreeElt = [(vec![w[0]], q(1))].into();
    let left = mul_trunc(&letter, &inner, w.len());
    let right = mul_trunc(&inner, &letter, w.len());
    let mut out = left;
    for (word, c) in right {
        add_term(&mut out, word, -c);
    }
    out
}

/// One homogeneous degree of the product series: right-normed bracket words
/// with rational coefficients.
type BchLayer = Vec<(Word, Q)>;

fn build_tables() -> Vec<BchLayer> {
    let assoc = bch_associative(DEGREE_CEILING);
    let mut layers: Vec<BTreeMap<Word, Q>> = vec![BTreeMap::new(); DEGREE_CEILING + 1];

    // Dynkin projection: on the degree-m Lie part, word -> bracket word / m.
    for (w, c) in &assoc {
        let m = w.len();
        let mut word = w.clone();
        let mut coeff = c / q(m as i64);
        // normalize the innermost pair: [a, a] = 0, [b, a] = -[a, b]
        if m >= 2 {
            if word[m - 1] == word[m - 2] {
                continue;
            }
            if word[m - 2] > word[m - 1] {
                word.swap(m - 2, m - 1);
                coeff = -coeff;
            }
        }
        let e = layers[m].entry(word).or_insert_with(Q::zero);
        *e += coeff;
    }
    let layers: Vec<BchLayer> = layers
        .into_iter()
        .map(|l| l.into_iter().filter(|(_, c)| !c.is_zero()).collect())
        .collect();

    // Soundness check: re-expanding the bracket words must reproduce the
    // associative series exactly.
    let mut expanded = FreeElt::new();
    for layer in &layers {
        for (w, c) in layer {
            for (word, coeff) in expand_bracket_word(w) {
                add_term(&mut expanded, word, coeff * c);
            }
        }
    }
    assert_eq!(expanded, assoc, "bracket projection does not match the associative series");
    layers
}

fn tables() -> &'static [BchLayer] {
    static TABLES: OnceLock<Vec<BchLayer>> = OnceLock::new();
    TABLES.get_or_init(build_tables)
}

/// Evaluate a right-normed bracket word at concrete coordinates.
fn eval_bracket_word(alg: &LieAlgebra, w: &[u8], x: &[Q], y: &[Q]) -> Vec<Q> {
    let pick = |l: u8| if l == 0 { x } else { y };
    let mut acc = pick(w[w.len() - 1]).to_vec();
    for &l in w[..w.len() - 1].iter().rev() {
        acc = alg.bracket_raw(pick(l), &acc);
    }
    acc
}

pub fn star_raw(alg: &LieAlgebra, x: &[Q], y: &[Q], degree: usize) -> Result<Vec<Q>> {
    if degree > DEGREE_CEILING {
        return Err(Error::DegreeCeiling { requested: degree, ceiling: DEGREE_CEILING });
    }
    let mut out: Vec<Q> = x.iter().zip(y).map(|(a, b)| a + b).collect();
    for layer in tables().iter().take(degree + 1).skip(2) {
        for (w, c) in layer {
            let v = eval_bracket_word(alg, w, x, y);
            for (o, t) in out.iter_mut().zip(v) {
                if !t.is_zero() {
                    *o += &t * c;
                }
            }
        }
    }
    Ok(out)
}

/// The group product in exponential coordinates, exact at the algebra's
/// nilpotency step.
pub fn star(alg: &LieAlgebra, x: &Vector, y: &Vector) -> Result<Vector> {
    alg.check_member(x)?;
    alg.check_member(y)?;
    let coords = star_raw(alg, &x.coords, &y.coords, alg.nilpotency_step())?;
    alg.vector(coords)
}

/// Product of several factors, left to right.
pub fn star_many(alg: &LieAlgebra, factors: &[Vector]) -> Result<Vector> {
    let mut acc = alg.zero_vector();
    for f in factors {
        acc = star(alg, &acc, f)?;
    }
    Ok(acc)
}

/// The group product on coordinates with polynomial entries.
pub fn star_poly(
    alg: &LieAlgebra,
    x: &[Polynomial],
    y: &[Polynomial],
) -> Result<Vec<Polynomial>> {
    let degree = alg.nilpotency_step();
    if degree > DEGREE_CEILING {
        return Err(Error::DegreeCeiling { requested: degree, ceiling: DEGREE_CEILING });
    }
    let mut out: Vec<Polynomial> = x.iter().zip(y).map(|(a, b)| a.add(b)).collect();
    for layer in tables().iter().take(degree + 1).skip(2) {
        for (w, c) in layer {
            let pick = |l: u8| if l == 0 { x } else { y };
            let mut acc = pick(w[w.len() - 1]).to_vec();
            for &l in w[..w.len() - 1].iter().rev() {
                acc = alg.bracket_poly(pick(l), &acc);
            }
            for (o, t) in out.iter_mut().zip(acc) {
                if !t.is_zero() {
                    *o = o.add(&t.scale(c));
                }
            }
        }
    }
    Ok(out)
}

/// Product of several polynomial-coordinate factors, left to right.
pub fn star_many_poly(alg: &LieAlgebra, factors: &[Vec<Polynomial>]) -> Result<Vec<Polynomial>> {
    let nvars = factors.first().and_then(|f| f.first()).map_or(0, Polynomial::nvars);
    let mut acc = vec![Polynomial::zero(nvars); alg.dim()];
    for f in factors {
        acc = star_poly(alg, &acc, f)?;
    }
    Ok(acc)
}

/// Inverse in exponential coordinates.
pub fn group_inverse(x: &Vector) -> Vector {
    x.neg()
}

/// Matrix of `ad(x)`, columns indexed by basis vectors.
pub fn ad_matrix(alg: &LieAlgebra, x: &Vector) -> Result<Matrix> {
    alg.check_member(x)?;
    let n = alg.dim();
    let mut m = Matrix::zeros(n, n);
    for j in 0..n {
        let col = alg.bracket_raw(&x.coords, &alg.basis_vector(j).coords);
        for (i, c) in col.into_iter().enumerate() {
            m[(i, j)] = c;
        }
    }
    Ok(m)
}

/// `Ad(exp x) = e^{ad x}` as a matrix; the series terminates because `ad x`
/// is nilpotent.
pub fn exp_ad(alg: &LieAlgebra, x: &Vector) -> Result<Matrix> {
    let ad = ad_matrix(alg, x)?;
    let n = alg.dim();
    let mut out = Matrix::identity(n);
    let mut power = Matrix::identity(n);
    let mut k = 0usize;
    loop {
        power = power.mul(&ad);
        k += 1;
        if power.is_zero() || k > n {
            break;
        }
        out = out.add(&power.scale(&factorial(k).recip()));
    }
    Ok(out)
}

/// Conjugation `exp(g) exp(x) exp(g)^{-1} = exp(Ad(exp g) x)`.
pub fn conjugate(alg: &LieAlgebra, g: &Vector, x: &Vector) -> Result<Vector> {
    let m = exp_ad(alg, g)?;
    alg.check_member(x)?;
    alg.vector(m.mul_vec(&x.coords))
}

/// Exponential of a strictly upper triangular matrix.
pub fn exp_strict_upper(m: &Matrix) -> Matrix {
    let n = m.rows;
    let mut out = Matrix::identity(n);
    let mut power = Matrix::identity(n);
    for k in 1..n {
        power = power.mul(m);
        if power.is_zero() {
            break;
        }
        out = out.add(&power.scale(&factorial(k).recip()));
    }
    out
}

/// Logarithm of an upper unitriangular matrix.
pub fn log_unitriangular(m: &Matrix) -> Matrix {
    let n = m.rows;
    let nil = m.add(&Matrix::identity(n).scale(&q(-1)));
    let mut out = Matrix::zeros(n, n);
    let mut power = Matrix::identity(n);
    for k in 1..n {
        power = power.mul(&nil);
        if power.is_zero() {
            break;
        }
        let sign = if k % 2 == 1 { q(1) } else { q(-1) };
        out = out.add(&power.scale(&(sign / q(k as i64))));
    }
    out
}

/// Independent check of `star` through a faithful matrix presentation:
/// multiply the exponentials as matrices and take the matrix logarithm.
pub fn star_via_presentation(alg: &LieAlgebra, x: &Vector, y: &Vector) -> Result<Vector> {
    alg.check_member(x)?;
    alg.check_member(y)?;
    let pres = alg
        .presentation
        .as_ref()
        .ok_or_else(|| Error::NoPresentation(alg.name.clone()))?;
    let lift = |v: &Vector| -> Matrix {
        let mut m = Matrix::zeros(pres.size, pres.size);
        for (i, c) in v.coords.iter().enumerate() {
            m = m.add(&pres.mats[i].scale(c));
        }
        m
    };
    let prod = exp_strict_upper(&lift(x)).mul(&exp_strict_upper(&lift(y)));
    let z = log_unitriangular(&prod);
    let target: Vec<Q> =
        (0..pres.size * pres.size).map(|k| z[(k / pres.size, k % pres.size)].clone()).collect();
    let flat: Vec<Vec<Q>> = pres
        .mats
        .iter()
        .map(|m| (0..pres.size * pres.size).map(|k| m[(k / pres.size, k % pres.size)].clone()).collect())
        .collect();
    let coords = Matrix::from_rows(flat).transpose().solve(&target).map_err(|_| {
        Error::Inconsistent("matrix logarithm leaves the span of the presentation".into())
    })?;
    alg.vector(coords)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::qr;

    fn heisenberg3() -> LieAlgebra {
        LieAlgebra::new(
            "heisenberg3",
            vec!["X".into(), "Y".into(), "Z".into()],
            vec![((0, 1), vec![q(0), q(0), q(1)])],
        )
        .unwrap()
    }

    #[test]
    fn low_degree_coefficients_match_the_classical_series() {
        let t = tables();
        assert_eq!(t[1], vec![(vec![0], q(1)), (vec![1], q(1))]);
        assert_eq!(t[2], vec![(vec![0, 1], qr(1, 2))]);
        // degree 3: [x,[x,y]]/12 + [y,[y,x]]/12 = [x,[x,y]]/12 - [y,[x,y]]/12
        assert_eq!(
            t[3],
            vec![(vec![0, 0, 1], qr(1, 12)), (vec![1, 0, 1], qr(-1, 12))]
        );
        // degree 4: -[x,[y,[x,y]]]/48 - [y,[x,[x,y]]]/48, which the Jacobi
        // identity collapses to the classical -[y,[x,[x,y]]]/24
        assert_eq!(
            t[4],
            vec![(vec![0, 1, 0, 1], qr(-1, 48)), (vec![1, 0, 0, 1], qr(-1, 48))]
        );
    }

    #[test]
    fn heisenberg_product_and_inverse() {
        let a = heisenberg3();
        let x = a.basis_vector(0);
        let y = a.basis_vector(1);
        let z = star(&a, &x, &y).unwrap();
        assert_eq!(z.coords, vec![q(1), q(1), qr(1, 2)]);
        let id = star(&a, &z, &group_inverse(&z)).unwrap();
        assert!(id.is_zero());
    }

    #[test]
    fn associativity_on_samples() {
        let a = heisenberg3();
        let u = a.vector(vec![q(1), q(-2), q(3)]).unwrap();
        let v = a.vector(vec![qr(1, 2), q(4), q(0)]).unwrap();
        let w = a.vector(vec![q(-3), qr(2, 3), q(7)]).unwrap();
        let lhs = star(&a, &star(&a, &u, &v).unwrap(), &w).unwrap();
        let rhs = star(&a, &u, &star(&a, &v, &w).unwrap()).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn truncation_is_stable_above_the_step() {
        let a = heisenberg3();
        let x = vec![q(3), qr(-1, 2), q(5)];
        let y = vec![qr(2, 7), q(1), q(-4)];
        let at_step = star_raw(&a, &x, &y, 2).unwrap();
        let above = star_raw(&a, &x, &y, 5).unwrap();
        assert_eq!(at_step, above);
    }

    #[test]
    fn degree_ceiling_is_reported() {
        let a = heisenberg3();
        let err = star_raw(&a, &[q(1), q(0), q(0)], &[q(0), q(1), q(0)], 7).unwrap_err();
        assert!(matches!(err, Error::DegreeCeiling { requested: 7, ceiling: 6 }));
    }

    #[test]
    fn exp_ad_is_group_homomorphism() {
        let a = heisenberg3();
        let x = a.vector(vec![q(1), q(2), q(0)]).unwrap();
        let y = a.vector(vec![q(-1), q(3), q(2)]).unwrap();
        let lhs = exp_ad(&a, &x).unwrap().mul(&exp_ad(&a, &y).unwrap());
        let rhs = exp_ad(&a, &star(&a, &x, &y).unwrap()).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn matrix_model_agrees_with_the_table_product() {
        let pres = MatrixPresentationFixture::heisenberg();
        let a = heisenberg3().with_presentation(pres).unwrap();
        let x = a.vector(vec![q(2), qr(1, 3), q(-1)]).unwrap();
        let y = a.vector(vec![q(-5), q(2), qr(3, 4)]).unwrap();
        let by_table = star(&a, &x, &y).unwrap();
        let by_matrices = star_via_presentation(&a, &x, &y).unwrap();
        assert_eq!(by_table, by_matrices);
    }

    struct MatrixPresentationFixture;

    impl MatrixPresentationFixture {
        fn heisenberg() -> crate::algebra::MatrixPresentation {
            let e = |i: usize, j: usize| {
                let mut m = Matrix::zeros(3, 3);
                m[(i, j)] = q(1);
                m
            };
            crate::algebra::MatrixPresentation { size: 3, mats: vec![e(0, 1), e(1, 2), e(0, 2)] }
        }
    }
}
