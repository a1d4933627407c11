//! Search for polynomial slice functions of commuting flows.
//!
//! For a family of commuting derivations δ_1, ..., δ_k a tuple of
//! polynomials with δ_i f_j = δ_ij satisfies f_j(Φ^i_t(y)) = f_j(y) + δ_ij t
//! along the flows, so the common zero set meets every orbit exactly once.
//! The search is a linear solve over a finite monomial window; the system is
//! sparse, so rows are kept as maps and reduced online.  Solutions are the
//! unique representatives supported on the pivot columns of the echelon.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::action::AffineAction;
use crate::decomp::SliceDescription;
use crate::derivation::Derivation;
use crate::error::{Error, Result};
use crate::poly::{Monomial, Polynomial};
use crate::scalar::Q;

/// Largest total degree tried by the escalating searches.
pub const SEARCH_CEILING: u64 = 6;

/// A chart function moved at unit rate by one flow of a family and fixed by
/// the others.
#[derive(Debug, Clone, PartialEq)]
pub struct SliceFunction {
    pub vars: Vec<String>,
    pub poly: Polynomial,
}

impl SliceFunction {
    pub fn to_display(&self) -> String {
        self.poly.to_string_with(&self.vars)
    }
}

/// All monomials of weighted degree at most `bound`, constants included,
/// sorted in the monomial order.
pub fn monomials_within(nvars: usize, weights: &[u64], bound: u64) -> Vec<Monomial> {
    assert_eq!(weights.len(), nvars);
    let mut out = Vec::new();
    let mut exps = vec![0u32; nvars];
    fn walk(i: usize, left: u64, exps: &mut Vec<u32>, weights: &[u64], out: &mut Vec<Monomial>) {
        if i == exps.len() {
            out.push(Monomial(exps.clone()));
            return;
        }
        let mut e = 0u32;
        loop {
            let cost = u64::from(e) * weights[i];
            if cost > left {
                break;
            }
            exps[i] = e;
            walk(i + 1, left - cost, exps, weights, out);
            e += 1;
        }
        exps[i] = 0;
    }
    walk(0, bound, &mut exps, weights, &mut out);
    out.sort();
    out
}

/// Row-reduced sparse system with one right hand side per sought function.
/// Rows are kept mutually reduced: entries off the pivot sit on free
/// columns, so the pivot-supported solution reads off the stored sides.
struct Echelon {
    rows: BTreeMap<usize, (BTreeMap<usize, Q>, Vec<Q>)>,
    infeasible: Vec<bool>,
}

fn sub_entry(row: &mut BTreeMap<usize, Q>, col: usize, val: Q) {
    if val.is_zero() {
        return;
    }
    let e = row.entry(col).or_insert_with(Q::zero);
    *e -= val;
    if e.is_zero() {
        row.remove(&col);
    }
}

impl Echelon {
    fn new(ntargets: usize) -> Self {
        Echelon { rows: BTreeMap::new(), infeasible: vec![false; ntargets] }
    }

    fn insert(&mut self, mut row: BTreeMap<usize, Q>, mut rhs: Vec<Q>) {
        // Reduce against every pivot present in the row.  Each reduction
        // only introduces free columns, so every pivot is hit at most once.
        while let Some(p) = row.keys().copied().find(|c| self.rows.contains_key(c)) {
            let factor = row.remove(&p).expect("entry present");
            let (cols, sides) = &self.rows[&p];
            let updates: Vec<(usize, Q)> = cols
                .iter()
                .filter(|(c, _)| **c != p)
                .map(|(c, v)| (*c, &factor * v))
                .collect();
            let side_updates: Vec<Q> = sides.iter().map(|s| &factor * s).collect();
            for (c, v) in updates {
                sub_entry(&mut row, c, v);
            }
            for (t, u) in rhs.iter_mut().zip(side_updates) {
                *t -= u;
            }
        }
        if row.is_empty() {
            for (flag, v) in self.infeasible.iter_mut().zip(&rhs) {
                if !v.is_zero() {
                    *flag = true;
                }
            }
            return;
        }
        let pivot = *row.keys().next().expect("nonempty row");
        let lead = row[&pivot].clone();
        for v in row.values_mut() {
            *v = &*v / &lead;
        }
        for v in rhs.iter_mut() {
            *v = &*v / &lead;
        }
        // Keep the older rows reduced against the new pivot.
        for (cols, sides) in self.rows.values_mut() {
            if let Some(f) = cols.remove(&pivot) {
                for (c, v) in &row {
                    if *c != pivot {
                        sub_entry(cols, *c, &f * v);
                    }
                }
                for (t, s) in sides.iter_mut().zip(&rhs) {
                    *t -= &f * s;
                }
            }
        }
        self.rows.insert(pivot, (row, rhs));
    }

    fn solution(&self, target: usize) -> Option<Vec<(usize, Q)>> {
        if self.infeasible[target] {
            return None;
        }
        Some(
            self.rows
                .iter()
                .map(|(&p, (_, sides))| (p, sides[target].clone()))
                .collect(),
        )
    }
}

fn check_family(ders: &[Derivation]) -> Result<()> {
    if ders.is_empty() {
        return Err(Error::Precondition("slice search needs at least one derivation".into()));
    }
    for d in &ders[1..] {
        if d.vars != ders[0].vars {
            return Err(Error::Precondition("slice search family must share one chart".into()));
        }
    }
    for (i, a) in ders.iter().enumerate() {
        for b in &ders[i + 1..] {
            if !a.commutator(b)?.is_zero() {
                return Err(Error::Precondition(
                    "slice search requires a commuting family".into(),
                ));
            }
        }
    }
    Ok(())
}

fn kronecker_search(
    ders: &[Derivation],
    weights: &[u64],
    bound: u64,
) -> Result<Option<Vec<SliceFunction>>> {
    check_family(ders)?;
    let nvars = ders[0].nvars();
    assert_eq!(weights.len(), nvars, "one weight per variable required");
    // constants solve nothing, so drop them from the window
    let mut candidates = monomials_within(nvars, weights, bound);
    candidates.retain(|m| m.degree() > 0);
    if candidates.is_empty() {
        return Ok(None);
    }
    let k = ders.len();
    let unit = Monomial::one(nvars);

    // Equations are indexed by (derivation, result monomial); transpose the
    // per-candidate images into sparse equation rows.
    let mut rows: BTreeMap<(usize, Monomial), BTreeMap<usize, Q>> = BTreeMap::new();
    for i in 0..k {
        rows.insert((i, unit.clone()), BTreeMap::new());
    }
    for (col, mono) in candidates.iter().enumerate() {
        let basis = Polynomial::from_terms(nvars, vec![(mono.clone(), Q::one())]);
        for (i, d) in ders.iter().enumerate() {
            for (m, c) in d.apply(&basis).terms() {
                rows.entry((i, m.clone())).or_default().insert(col, c.clone());
            }
        }
    }

    let mut ech = Echelon::new(k);
    for ((i, m), row) in rows {
        let mut rhs = vec![Q::zero(); k];
        if m == unit {
            rhs[i] = Q::one();
        }
        ech.insert(row, rhs);
    }

    let mut out = Vec::with_capacity(k);
    for j in 0..k {
        let Some(sol) = ech.solution(j) else {
            return Ok(None);
        };
        let terms = sol
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(p, c)| (candidates[p].clone(), c))
            .collect();
        out.push(Polynomial::from_terms(nvars, terms));
    }
    // The solve is exact, but the answers certify the slice, so recheck the
    // defining identities symbolically before handing them out.
    for (j, f) in out.iter().enumerate() {
        for (i, d) in ders.iter().enumerate() {
            let want = if i == j { Polynomial::one(nvars) } else { Polynomial::zero(nvars) };
            assert_eq!(d.apply(f), want, "slice candidate failed recheck");
        }
    }
    Ok(Some(
        out.into_iter()
            .map(|poly| SliceFunction { vars: ders[0].vars.clone(), poly })
            .collect(),
    ))
}

/// Search the total-degree window `<= bound` for functions with
/// `δ_i f_j = δ_ij`.  The family must commute; the result is unique for the
/// window once free coefficients are normalized to zero.
pub fn slice_family_search(
    ders: &[Derivation],
    bound: u64,
) -> Result<Option<Vec<SliceFunction>>> {
    let nvars = ders.first().map_or(0, |d| d.nvars());
    kronecker_search(ders, &vec![1; nvars], bound)
}

/// Single-flow search over the window of monomials of weighted degree at
/// most `bound`.
pub fn slice_function_search(
    d: &Derivation,
    weights: &[u64],
    bound: u64,
) -> Result<Option<SliceFunction>> {
    Ok(kronecker_search(std::slice::from_ref(d), weights, bound)?
        .map(|mut v| v.pop().expect("one function per derivation")))
}

/// Outcome of the escalating single-flow search.
#[derive(Debug, Clone, PartialEq)]
pub enum SliceSearch {
    Found(SliceFunction),
    /// No slice within the largest window tried.
    Exhausted { bound: u64 },
}

/// Search with the derivation's own weights when it is triangular (unit
/// weights otherwise), escalating the bound `extra` times beyond the
/// largest variable weight.
pub fn auto_slice_search(d: &Derivation, extra: u64) -> Result<SliceSearch> {
    let weights = d.weights().unwrap_or_else(|_| vec![1; d.nvars()]);
    let start = weights.iter().copied().max().unwrap_or(1);
    for bound in start..=start + extra {
        if let Some(f) = slice_function_search(d, &weights, bound)? {
            return Ok(SliceSearch::Found(f));
        }
    }
    Ok(SliceSearch::Exhausted { bound: start + extra })
}

/// Result of the slice construction for a degree one action.
#[derive(Debug, Clone, PartialEq)]
pub enum DegreeOneOutcome {
    Found(SliceDescription),
    /// No slice functions within the ceiling; never a properness statement.
    NoneFound { bound: u64 },
}

/// Build a polynomial slice for a commuting affine action of degree one in
/// its parameters.  The slice functions are found by the family search with
/// the degree growing until the ceiling; the slice is their common zero
/// set.  Actions of higher parameter degree are rejected as input errors.
pub fn degree_one_slice(act: &AffineAction) -> Result<DegreeOneOutcome> {
    if act.degree() != 1 {
        return Err(Error::Precondition("degree one action required".into()));
    }
    let gens = act.derivations()?;
    for bound in 1..=SEARCH_CEILING {
        if let Some(fs) = slice_family_search(&gens, bound)? {
            return Ok(DegreeOneOutcome::Found(SliceDescription::LevelSet {
                vars: act.coords.clone(),
                functions: fs.into_iter().map(|f| f.poly).collect(),
            }));
        }
    }
    Ok(DegreeOneOutcome::NoneFound { bound: SEARCH_CEILING })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::derivation::Derivation;

    fn chart(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    // -y1 d/dy3 + (1 - y1 y2) d/dz on (y1, y2, y3, z)
    fn twisted() -> Derivation {
        let n = 4;
        let v = |i| Polynomial::var(n, i);
        let comps = vec![
            Polynomial::zero(n),
            Polynomial::zero(n),
            v(0).neg(),
            Polynomial::one(n).sub(&v(0).mul(&v(1))),
        ];
        Derivation::new(chart(&["y1", "y2", "y3", "z"]), comps).unwrap()
    }

    #[test]
    fn twisted_flow_has_quadratic_slice() {
        let d = twisted();
        let weights = d.weights().unwrap();
        assert_eq!(weights, vec![1, 1, 2, 3]);
        let found = slice_function_search(&d, &weights, 3).unwrap().unwrap();
        let n = 4;
        let expected = Polynomial::var(n, 3)
            .sub(&Polynomial::var(n, 1).mul(&Polynomial::var(n, 2)));
        assert_eq!(found.poly, expected);
        assert_eq!(found.to_display(), "-y2*y3 + z");
        // the same function is the unique answer in the plain degree window
        let flat = slice_function_search(&d, &[1; 4], 2).unwrap().unwrap();
        assert_eq!(flat.poly, expected);
        // no linear slice exists for this flow
        assert!(slice_function_search(&d, &[1; 4], 1).unwrap().is_none());
    }

    #[test]
    fn constant_component_gives_linear_slice() {
        let n = 2;
        let comps = vec![Polynomial::zero(n), Polynomial::one(n)];
        let d = Derivation::new(chart(&["y", "z"]), comps).unwrap();
        let f = slice_function_search(&d, &[1; 2], 1).unwrap().unwrap();
        assert_eq!(f.poly, Polynomial::var(n, 1));
    }

    #[test]
    fn escalation_reports_exhaustion() {
        // δ = y d/dz has no polynomial slice: δf = 1 is impossible since
        // every image vanishes at y = 0.
        let n = 2;
        let comps = vec![Polynomial::zero(n), Polynomial::var(n, 0)];
        let d = Derivation::new(chart(&["y", "z"]), comps).unwrap();
        match auto_slice_search(&d, 3).unwrap() {
            SliceSearch::Exhausted { bound } => assert_eq!(bound, 5),
            SliceSearch::Found(f) => panic!("unexpected slice {}", f.to_display()),
        }
    }

    // ∂x + y ∂z and ∂y + x ∂z commute; their joint slice pair is (x, y).
    fn coupled_pair() -> Vec<Derivation> {
        let n = 3;
        let names = chart(&["x", "y", "z"]);
        let d1 = Derivation::new(
            names.clone(),
            vec![Polynomial::one(n), Polynomial::zero(n), Polynomial::var(n, 1)],
        )
        .unwrap();
        let d2 = Derivation::new(
            names,
            vec![Polynomial::zero(n), Polynomial::one(n), Polynomial::var(n, 0)],
        )
        .unwrap();
        vec![d1, d2]
    }

    #[test]
    fn family_search_solves_kronecker_conditions() {
        let ders = coupled_pair();
        let fs = slice_family_search(&ders, 1).unwrap().unwrap();
        assert_eq!(fs.len(), 2);
        assert_eq!(fs[0].poly, Polynomial::var(3, 0));
        assert_eq!(fs[1].poly, Polynomial::var(3, 1));
    }

    #[test]
    fn family_search_rejects_noncommuting_input() {
        let n = 2;
        let names = chart(&["x", "y"]);
        let d1 = Derivation::new(
            names.clone(),
            vec![Polynomial::one(n), Polynomial::zero(n)],
        )
        .unwrap();
        let d2 = Derivation::new(
            names,
            vec![Polynomial::zero(n), Polynomial::var(n, 0)],
        )
        .unwrap();
        // [d/dx, x d/dy] = d/dy
        assert!(matches!(
            slice_family_search(&[d1, d2], 2),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn family_search_reports_unreachable_unit() {
        let n = 3;
        let names = chart(&["x", "y", "z"]);
        // d/dx commutes with y d/dz, but no f has (y d/dz)(f) = 1
        let d1 = Derivation::new(
            names.clone(),
            vec![Polynomial::one(n), Polynomial::zero(n), Polynomial::zero(n)],
        )
        .unwrap();
        let d2 = Derivation::new(
            names,
            vec![Polynomial::zero(n), Polynomial::zero(n), Polynomial::var(n, 1)],
        )
        .unwrap();
        for bound in 1..=4 {
            assert!(slice_family_search(&[d1.clone(), d2.clone()], bound).unwrap().is_none());
        }
    }

    #[test]
    fn degree_one_slice_cuts_level_set() {
        // d/dx + y d/dz and d/dw: the coefficient of the twist is fixed by
        // both flows, so the joint action stays affine of degree one.
        let n = 4;
        let names = chart(&["x", "y", "z", "w"]);
        let d1 = Derivation::new(
            names.clone(),
            vec![
                Polynomial::one(n),
                Polynomial::zero(n),
                Polynomial::var(n, 1),
                Polynomial::zero(n),
            ],
        )
        .unwrap();
        let d2 = Derivation::new(
            names.clone(),
            vec![
                Polynomial::zero(n),
                Polynomial::zero(n),
                Polynomial::zero(n),
                Polynomial::one(n),
            ],
        )
        .unwrap();
        let act = AffineAction::from_derivations(
            vec!["t1".into(), "t2".into()],
            &[d1, d2],
        )
        .unwrap();
        assert_eq!(act.degree(), 1);
        match degree_one_slice(&act).unwrap() {
            DegreeOneOutcome::Found(SliceDescription::LevelSet { vars, functions }) => {
                assert_eq!(vars, names);
                assert_eq!(functions, vec![Polynomial::var(n, 0), Polynomial::var(n, 3)]);
            }
            other => panic!("expected a level set, got {other:?}"),
        }
    }

    #[test]
    fn degree_one_slice_rejects_higher_degree() {
        // the chained flow of y d/dz + z d/dw has a t^2 term
        let names = chart(&["y", "z", "w"]);
        let d = Derivation::new(
            names,
            vec![
                Polynomial::zero(3),
                Polynomial::var(3, 0),
                Polynomial::var(3, 1),
            ],
        )
        .unwrap();
        let act = AffineAction::from_derivations(vec!["t".into()], &[d]).unwrap();
        assert_eq!(act.degree(), 2);
        assert!(matches!(degree_one_slice(&act), Err(Error::Precondition(_))));
    }

    #[test]
    fn degree_one_slice_reports_failure_without_certifying() {
        let n = 2;
        let names = chart(&["y", "z"]);
        let d = Derivation::new(
            names,
            vec![Polynomial::zero(n), Polynomial::var(n, 0)],
        )
        .unwrap();
        let act = AffineAction::from_derivations(vec!["t".into()], &[d]).unwrap();
        assert_eq!(act.degree(), 1);
        match degree_one_slice(&act).unwrap() {
            DegreeOneOutcome::NoneFound { bound } => assert_eq!(bound, SEARCH_CEILING),
            DegreeOneOutcome::Found(_) => panic!("flow vanishing at y = 0 cannot have a slice"),
        }
    }
}
