//! Problem reductions applied before slice search: quotient away central
//! intersections, restrict to the subalgebra where the bottom-level shadows
//! of the two parts agree, peel off product directions normalizing one
//! part, compose slices through a normal subgroup, and the dispatcher for
//! one dimensional `v`.  Every step records enough data to transport a
//! slice of the reduced problem back to the original.

use num_traits::Zero;

use crate::action::{freeness_check, induced_action, Freeness, FreenessOptions, InducedAction};
use crate::algebra::{LieAlgebra, Projection, Vector};
use crate::decomp::{adapted_basis, factorize, SliceDescription};
use crate::error::{Error, Result};
use crate::group::{group_inverse, star_many};
use crate::linalg::Matrix;
use crate::poly::Monomial;
use crate::sample::{rng, sample_vec};
use crate::scalar::{q, Q};
use crate::slice::{
    auto_slice_search, slice_function_search, SliceFunction, SliceSearch, SEARCH_CEILING,
};
use crate::subspace::Subspace;

/// One applied reduction, with the data needed to walk a slice back up.
#[derive(Debug, Clone)]
pub enum ReductionStep {
    /// Quotient by the central intersections of the two parts.
    CenterQuotient { ideal: Subspace, projection: Projection },
    /// Restriction to a maximal subalgebra meeting the parts in their
    /// common-shadow cores; `complement` extends it back to the whole
    /// algebra, drawn from the parts themselves where possible.
    CommonShadow {
        n: Subspace,
        v0: Subspace,
        h0: Subspace,
        g1: Subspace,
        complement: Vec<Vector>,
        inclusion: Vec<Vector>,
    },
    /// A direction normalizing one part and complementing `g1`; the
    /// quotient splits off one affine factor.
    FamilyDirection { y0: Vector, g1: Subspace, inclusion: Vec<Vector> },
}

/// A pair problem after zero or more reductions.
#[derive(Debug, Clone)]
pub struct ReducedProblem {
    pub algebra: LieAlgebra,
    pub v: Subspace,
    pub h: Subspace,
    pub steps: Vec<ReductionStep>,
}

fn require_subalgebras(alg: &LieAlgebra, v: &Subspace, h: &Subspace) -> Result<()> {
    v.check_algebra(alg.id())?;
    h.check_algebra(alg.id())?;
    if !alg.is_subalgebra(v)? || !alg.is_subalgebra(h)? {
        return Err(Error::Precondition("both parts must be subalgebras".into()));
    }
    Ok(())
}

/// Quotient by `(v ∩ Z) + (h ∩ Z)` until both central intersections vanish.
/// The dimension drops in every round, so this ends after at most `dim g`
/// quotients.
pub fn reduce_by_center(alg: &LieAlgebra, v: &Subspace, h: &Subspace) -> Result<ReducedProblem> {
    require_subalgebras(alg, v, h)?;
    let mut cur = alg.clone();
    let mut v = v.clone();
    let mut h = h.clone();
    let mut steps = Vec::new();
    loop {
        let z = cur.center();
        let core = v.intersect(&z).sum(&h.intersect(&z));
        if core.is_zero() {
            return Ok(ReducedProblem { algebra: cur, v, h, steps });
        }
        let (quotient, projection) = cur.quotient_algebra(&core)?;
        v = projection.apply_subspace(&v)?;
        h = projection.apply_subspace(&h)?;
        steps.push(ReductionStep::CenterQuotient { ideal: core, projection });
        cur = quotient;
    }
}

/// Present the subalgebra spanned by `s` as an algebra of its own, with the
/// canonical basis rows of `s` as basis.  Returns the algebra together with
/// the inclusion basis in the coordinates of `alg`.
fn restrict_algebra(
    alg: &LieAlgebra,
    s: &Subspace,
    name: &str,
) -> Result<(LieAlgebra, Vec<Vector>)> {
    if !alg.is_subalgebra(s)? {
        return Err(Error::Precondition("restriction target is not a subalgebra".into()));
    }
    let basis = s.basis_vectors();
    let labels: Vec<String> = s.pivots().iter().map(|&p| alg.labels[p].clone()).collect();
    let m = basis.len();
    let mut bracket_data = Vec::new();
    for a in 0..m {
        for b in (a + 1)..m {
            let w = alg.bracket(&basis[a], &basis[b])?;
            bracket_data.push(((a, b), s.coords_in_basis(&w)?));
        }
    }
    let sub = LieAlgebra::new(name, labels, bracket_data)?;
    Ok((sub, basis))
}

fn subspace_into(sub: &LieAlgebra, g1: &Subspace, part: &Subspace) -> Result<Subspace> {
    let mut rows = Vec::new();
    for bv in part.basis_vectors() {
        rows.push(g1.coords_in_basis(&bv)?);
    }
    Ok(Subspace::from_rows(sub.id(), sub.dim(), rows))
}

/// Restrict to a maximal subalgebra `g1` that contains
/// `n = π₀⁻¹(π₀(v) ∩ π₀(h))` and meets the parts exactly in
/// `v0 = n ∩ v`, `h0 = n ∩ h`.  The extension is greedy over the standard
/// basis in index order, so the outcome is deterministic.
pub fn reduce_common_shadow(
    alg: &LieAlgebra,
    v: &Subspace,
    h: &Subspace,
) -> Result<ReducedProblem> {
    require_subalgebras(alg, v, h)?;
    let derived = alg.central_series()[1].clone();
    let n = v.sum(&derived).intersect(&h.sum(&derived));
    let v0 = n.intersect(v);
    let h0 = n.intersect(h);

    // n contains the derived algebra, hence so does every extension; any
    // such subspace is automatically an ideal
    let mut g1 = n.clone();
    for i in 0..alg.dim() {
        let unit = Subspace::from_rows(alg.id(), alg.dim(), vec![alg.basis_vector(i).coords]);
        let cand = g1.sum(&unit);
        if cand.intersect(v) == v0 && cand.intersect(h) == h0 {
            g1 = cand;
        }
    }

    // complement drawn from v, then h, then the standard basis
    let mut complement = Vec::new();
    let mut acc = g1.clone();
    let candidates = v
        .basis_vectors()
        .into_iter()
        .chain(h.basis_vectors())
        .chain((0..alg.dim()).map(|i| alg.basis_vector(i)));
    for cand in candidates {
        let grown = acc.sum(&Subspace::from_rows(alg.id(), alg.dim(), vec![cand.coords.clone()]));
        if grown.dim() > acc.dim() {
            complement.push(cand);
            acc = grown;
        }
    }

    if g1.dim() == alg.dim() {
        let step = ReductionStep::CommonShadow {
            n,
            v0: v0.clone(),
            h0: h0.clone(),
            g1,
            complement,
            inclusion: (0..alg.dim()).map(|i| alg.basis_vector(i)).collect(),
        };
        return Ok(ReducedProblem {
            algebra: alg.clone(),
            v: v0,
            h: h0,
            steps: vec![step],
        });
    }

    let (sub, inclusion) = restrict_algebra(alg, &g1, &format!("{}|g1", g1.name_hint()))?;
    let vr = subspace_into(&sub, &g1, &v0)?;
    let hr = subspace_into(&sub, &g1, &h0)?;
    let step = ReductionStep::CommonShadow { n, v0, h0, g1, complement, inclusion };
    Ok(ReducedProblem { algebra: sub, v: vr, h: hr, steps: vec![step] })
}

/// Center quotients followed by the common-shadow restriction.
pub fn full_reduction(alg: &LieAlgebra, v: &Subspace, h: &Subspace) -> Result<ReducedProblem> {
    let centered = reduce_by_center(alg, v, h)?;
    let shadowed = reduce_common_shadow(&centered.algebra, &centered.v, &centered.h)?;
    let mut steps = centered.steps;
    steps.extend(shadowed.steps);
    Ok(ReducedProblem { algebra: shadowed.algebra, v: shadowed.v, h: shadowed.h, steps })
}

/// Which of the two parts the split direction normalizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormalizedPart {
    V,
    H,
}

/// A product direction: `y0` normalizes one part and complements the
/// codimension one ideal `g1` containing both parts, so the double coset
/// space splits off one affine line.
#[derive(Debug, Clone)]
pub struct FamilySplit {
    pub y0: Vector,
    pub fixed: NormalizedPart,
    pub g1: Subspace,
    pub reduced: ReducedProblem,
}

fn normalizes(alg: &LieAlgebra, y: &Vector, s: &Subspace) -> Result<bool> {
    for b in s.basis_vectors() {
        if !s.contains(&alg.bracket(y, &b)?) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Search for a split direction over the standard basis and small integer
/// combinations of two basis vectors.  Absence is a valid outcome; the
/// search space is a chosen budget, not a completeness claim.
pub fn family_split(
    alg: &LieAlgebra,
    v: &Subspace,
    h: &Subspace,
) -> Result<Option<FamilySplit>> {
    require_subalgebras(alg, v, h)?;
    if alg.dim() == 0 {
        return Ok(None);
    }
    let base = v.sum(h).sum(&alg.central_series()[1]);
    let singles: Vec<Vector> = (0..alg.dim())
        .map(|i| alg.basis_vector(i))
        .filter(|e| !base.contains(e))
        .collect();
    let mut candidates = singles.clone();
    for i in 0..singles.len() {
        for j in (i + 1)..singles.len() {
            for c in [1i64, -1, 2, -2] {
                candidates.push(singles[i].add(&singles[j].scale(&q(c))));
            }
        }
    }

    for y0 in candidates {
        let fixed = if normalizes(alg, &y0, v)? {
            NormalizedPart::V
        } else if normalizes(alg, &y0, h)? {
            NormalizedPart::H
        } else {
            continue;
        };

        // grow a hyperplane through both parts and the derived algebra
        // that avoids y0; it contains g^(1), hence is an ideal
        let mut g1 = base.clone();
        loop {
            let before = g1.dim();
            for i in 0..alg.dim() {
                let unit =
                    Subspace::from_rows(alg.id(), alg.dim(), vec![alg.basis_vector(i).coords]);
                let cand = g1.sum(&unit);
                if cand.dim() > g1.dim() && !cand.contains(&y0) {
                    g1 = cand;
                }
            }
            if g1.dim() == before {
                break;
            }
        }
        if g1.dim() + 1 != alg.dim() {
            continue;
        }

        let (sub, inclusion) = restrict_algebra(alg, &g1, &format!("{}|split", g1.name_hint()))?;
        let vr = subspace_into(&sub, &g1, v)?;
        let hr = subspace_into(&sub, &g1, h)?;
        let step = ReductionStep::FamilyDirection {
            y0: y0.clone(),
            g1: g1.clone(),
            inclusion,
        };
        let reduced = ReducedProblem { algebra: sub, v: vr, h: hr, steps: vec![step] };
        return Ok(Some(FamilySplit { y0, fixed, g1, reduced }));
    }
    Ok(None)
}

const ROUNDTRIP_SAMPLES: usize = 200;

fn part_coords(vectors: &[Vector], w: &Vector, dim: usize) -> Result<Vec<Q>> {
    if vectors.is_empty() {
        return Ok(Vec::new());
    }
    let rows: Vec<Vec<Q>> = vectors.iter().map(|v| v.coords.clone()).collect();
    Matrix::from_rows_or_empty(rows, dim).transpose().solve(&w.coords)
}

/// Factor 200 seeded group elements through `V × S × H` and fail loudly on
/// the first element that does not decompose or recompose exactly.
fn verify_slice(
    alg: &LieAlgebra,
    v: &Subspace,
    h: &Subspace,
    s: &SliceDescription,
    seed: u64,
) -> Result<()> {
    let mut r = rng(seed);
    match s {
        SliceDescription::Linear(sp) => {
            sp.check_algebra(alg.id())?;
            let parts = [v.clone(), sp.clone(), h.clone()];
            for i in 0..ROUNDTRIP_SAMPLES {
                let w = alg.vector(sample_vec(&mut r, alg.dim()))?;
                let factors = factorize(alg, &w, &parts).map_err(|e| {
                    Error::Inconsistent(format!("sample {i} does not factor: {e}"))
                })?;
                if star_many(alg, &factors)? != w {
                    return Err(Error::Inconsistent(format!(
                        "sample {i} does not recompose to itself"
                    )));
                }
            }
            Ok(())
        }
        SliceDescription::LevelSet { vars, functions } => {
            if v.dim() != 1 {
                return Err(Error::Precondition(
                    "level set verification needs a one parameter flow".into(),
                ));
            }
            if functions.len() != 1 {
                return Err(Error::Precondition(
                    "level set verification needs exactly one cut function".into(),
                ));
            }
            let x0 = v.basis_vectors().remove(0);
            let ind = induced_action(alg, h, &x0)?;
            if ind.vars != *vars {
                return Err(Error::Precondition(
                    "the level set chart does not match the quotient chart".into(),
                ));
            }
            let delta = ind.derivation();
            let f = &functions[0];
            if !delta.apply(f).as_constant().map(|c| c == q(1)).unwrap_or(false) {
                return Err(Error::Inconsistent(
                    "the cut function is not moved at unit speed by the flow".into(),
                ));
            }
            let flow = delta.flow(crate::derivation::DEFAULT_BUDGET)?;

            let mut parts: Vec<Subspace> = ind.slice.levels.clone();
            parts.push(h.clone());
            let chart = crate::decomp::ProductChart::new(alg, &parts)?;
            let level_vectors: Vec<Vec<Vector>> = chart.parts[..chart.parts.len() - 1]
                .iter()
                .map(|p| p.vectors.clone())
                .collect();

            let rep = |y: &[Q]| -> Result<Vector> {
                let mut factors = Vec::new();
                let mut at = 0usize;
                for vecs in &level_vectors {
                    let mut part = alg.zero_vector();
                    for vec in vecs {
                        part = part.add(&vec.scale(&y[at]));
                        at += 1;
                    }
                    factors.push(part);
                }
                star_many(alg, &factors)
            };

            for i in 0..ROUNDTRIP_SAMPLES {
                let w = alg.vector(sample_vec(&mut r, alg.dim()))?;
                let factors = chart.factorize(&w)?;
                let mut y = Vec::new();
                for (t, vecs) in level_vectors.iter().enumerate() {
                    y.extend(part_coords(vecs, &factors[t], alg.dim())?);
                }
                let t = f.eval(&y);
                let mut flow_point = vec![-t.clone()];
                flow_point.extend(y.iter().cloned());
                let base: Vec<Q> = flow.images.iter().map(|p| p.eval(&flow_point)).collect();
                if !f.eval(&base).is_zero() {
                    return Err(Error::Inconsistent(format!(
                        "sample {i} does not land on the level set"
                    )));
                }
                let a = x0.scale(&t);
                let b = rep(&base)?;
                let c = star_many(alg, &[group_inverse(&b), group_inverse(&a), w.clone()])?;
                if !h.contains(&c) {
                    return Err(Error::Inconsistent(format!(
                        "sample {i} does not factor through the slice"
                    )));
                }
                if star_many(alg, &[a, b, c])? != w {
                    return Err(Error::Inconsistent(format!(
                        "sample {i} does not recompose to itself"
                    )));
                }
            }
            Ok(())
        }
    }
}

/// Combine a slice of the quotient action on `A/N` with a slice of the
/// restricted action into one description, then verify it by factoring 200
/// seeded group elements.  Supported shapes: trivial `N`, or both parts
/// inside `N` (where the quotient action is trivial and `upstairs` must be
/// the whole quotient).
pub fn compose_slices(
    alg: &LieAlgebra,
    n: &Subspace,
    v: &Subspace,
    h: &Subspace,
    upstairs: &SliceDescription,
    downstairs: &SliceDescription,
    seed: u64,
) -> Result<SliceDescription> {
    require_subalgebras(alg, v, h)?;
    n.check_algebra(alg.id())?;
    if !alg.is_ideal(n)? {
        return Err(Error::Precondition("composition needs a normal subgroup".into()));
    }
    if n.is_zero() {
        verify_slice(alg, v, h, upstairs, seed)?;
        return Ok(upstairs.clone());
    }
    if n.contains_subspace(v) && n.contains_subspace(h) {
        let updim = alg.dim() - n.dim();
        let full = match upstairs {
            SliceDescription::Linear(sp) => sp.dim() == updim,
            SliceDescription::LevelSet { functions, .. } => functions.is_empty(),
        };
        if !full {
            return Err(Error::Precondition(
                "a trivial quotient action admits only the whole quotient as slice".into(),
            ));
        }
        verify_slice(alg, v, h, downstairs, seed)?;
        return Ok(downstairs.clone());
    }
    Err(Error::Precondition(
        "composition supports a trivial normal subgroup or both parts inside it".into(),
    ))
}

/// Outcome of the one dimensional pipeline: a verified slice or an honest
/// account of why no implemented route applies.
#[derive(Debug, Clone)]
pub enum Dim1Outcome {
    Slice(SliceDescription),
    Unsupported { reason: String },
}

fn ad_image(alg: &LieAlgebra, x: &Vector, dom: &Subspace) -> Result<Subspace> {
    let mut rows = Vec::new();
    for b in dom.basis_vectors() {
        rows.push(alg.bracket(x, &b)?.coords);
    }
    Ok(Subspace::from_rows(alg.id(), alg.dim(), rows))
}

/// Split `q = x0 + z0` with `z0` in the last nonzero series term and `x0`
/// supported on the standard complement.
fn split_off_last_term(alg: &LieAlgebra, q_vec: &Vector, last: &Subspace) -> Result<(Vector, Vector)> {
    if last.dim() == 0 {
        return Ok((q_vec.clone(), alg.zero_vector()));
    }
    let mut rows: Vec<Vec<Q>> = last
        .complement_indices()
        .into_iter()
        .map(|i| alg.basis_vector(i).coords)
        .collect();
    let head = rows.len();
    rows.extend(last.basis_rows().map(|r| r.to_vec()));
    let sol = Matrix::from_rows(rows).transpose().solve(&q_vec.coords)?;
    let mut z0 = alg.zero_vector();
    for (k, row) in last.basis_rows().enumerate() {
        let part = alg.vector(row.to_vec())?.scale(&sol[head + k]);
        z0 = z0.add(&part);
    }
    Ok((q_vec.sub(&z0), z0))
}

fn is_commutative(alg: &LieAlgebra, s: &Subspace) -> Result<bool> {
    let basis = s.basis_vectors();
    for (i, a) in basis.iter().enumerate() {
        for b in &basis[i + 1..] {
            if !alg.bracket(a, b)?.is_zero() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// A commutative ideal containing `v`, if one of the two canonical
/// candidates works: the ideal closure of `v`, or `v + g^(1)`.
fn normal_commutative_cover(alg: &LieAlgebra, v: &Subspace) -> Result<Option<Subspace>> {
    let closure = alg.ideal_closure(v)?;
    if is_commutative(alg, &closure)? {
        return Ok(Some(closure));
    }
    let wide = v.sum(&alg.central_series()[1]);
    if is_commutative(alg, &wide)? {
        return Ok(Some(wide));
    }
    Ok(None)
}

/// Render a degree one cut function as the exponential of a subspace when
/// its chart kernel is a subalgebra; otherwise keep the level set form.
fn linear_or_levelset(
    alg: &LieAlgebra,
    ind: &InducedAction,
    f: &SliceFunction,
) -> Result<SliceDescription> {
    if f.poly.degree() == Some(1) {
        let mut basis: Vec<Vector> = Vec::new();
        for part in &ind.slice.levels {
            basis.extend(adapted_basis(alg, part)?.vectors);
        }
        let nv = ind.vars.len();
        debug_assert_eq!(basis.len(), nv);
        let coeffs: Vec<Q> = (0..nv)
            .map(|k| {
                let mut exps = vec![0u32; nv];
                exps[k] = 1;
                f.poly.coefficient(&Monomial(exps))
            })
            .collect();
        if let Some(k0) = coeffs.iter().position(|c| !c.is_zero()) {
            let mut rows = Vec::new();
            for (k, c) in coeffs.iter().enumerate() {
                if k != k0 {
                    let w = basis[k].sub(&basis[k0].scale(&(c / &coeffs[k0])));
                    rows.push(w.coords);
                }
            }
            let s0 = Subspace::from_rows(alg.id(), alg.dim(), rows);
            if alg.is_subalgebra(&s0)? {
                return Ok(SliceDescription::Linear(s0));
            }
        }
    }
    Ok(SliceDescription::LevelSet { vars: f.vars.clone(), functions: vec![f.poly.clone()] })
}

/// Slice dispatcher for `dim v = 1`.  Routes, in order: a linear cut when
/// `ad(X0)` lands in the last series term or `h` is a line; an escalating
/// weighted search when `v` sits in a commutative normal subgroup; for
/// three step algebras, quotient by the central ideal `ad(X0)(g^(1))` and
/// recurse.  Anything else is reported as unsupported rather than guessed.
pub fn dim1_pipeline(alg: &LieAlgebra, v: &Subspace, h: &Subspace) -> Result<Dim1Outcome> {
    require_subalgebras(alg, v, h)?;
    if v.dim() != 1 {
        return Err(Error::Precondition("the pipeline handles a one dimensional v".into()));
    }
    if !v.intersect(h).is_zero() {
        return Err(Error::Precondition("the parts must meet only at zero".into()));
    }
    let l = alg.nilpotency_step();
    let series = alg.central_series();
    let last = series[l.saturating_sub(1)].clone();
    if !h.intersect(&last).is_zero() {
        return Err(Error::Precondition(
            "h must avoid the last series term; reduce by the center first".into(),
        ));
    }
    if let Freeness::Refuted(_) = freeness_check(alg, v, h, &FreenessOptions::default())? {
        return Err(Error::Precondition(
            "the pair is not free, so no global slice exists".into(),
        ));
    }

    let q_vec = v.basis_vectors().remove(0);
    let (x0, z0) = split_off_last_term(alg, &q_vec, &last)?;

    // z0 is central, so ad(q) = ad(x0); r is the deepest series term
    // holding the whole image
    let whole = Subspace::whole(alg.id(), alg.dim());
    let image = ad_image(alg, &q_vec, &whole)?;
    let mut r = 0;
    for j in (0..=l).rev() {
        if series[j].contains_subspace(&image) {
            r = j;
            break;
        }
    }

    let ind = induced_action(alg, h, &q_vec)?;
    let delta = ind.derivation();

    if r + 1 >= l || h.dim() == 1 {
        if let Some(f) = slice_function_search(&delta, &vec![1; delta.nvars()], 1)? {
            return Ok(Dim1Outcome::Slice(linear_or_levelset(alg, &ind, &f)?));
        }
    }

    if normal_commutative_cover(alg, v)?.is_some() {
        match auto_slice_search(&delta, SEARCH_CEILING)? {
            SliceSearch::Found(f) => {
                return Ok(Dim1Outcome::Slice(SliceDescription::LevelSet {
                    vars: f.vars,
                    functions: vec![f.poly],
                }));
            }
            SliceSearch::Exhausted { .. } => {}
        }
    }

    if l == 3 {
        let s2 = ad_image(alg, &x0, &series[1])?;
        if !z0.is_zero() && s2.contains(&z0) {
            return Err(Error::Inconsistent(
                "Z0 lies in ad(X0)(g^(1)) although the isotropy screen passed".into(),
            ));
        }
        if !s2.is_zero() {
            let (quotient, proj) = alg.quotient_algebra(&s2)?;
            let vq = proj.apply_subspace(v)?;
            let hq = proj.apply_subspace(h)?;
            return dim1_pipeline(&quotient, &vq, &hq);
        }
    }

    Ok(Dim1Outcome::Unsupported {
        reason: format!(
            "no route applies: {l} steps, ad(X0)(g) reaches only g^({r}), dim h = {}, and v has no commutative normal cover",
            h.dim()
        ),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{entry, format_combination};

    fn heis3() -> LieAlgebra {
        LieAlgebra::new(
            "heis3",
            vec!["X".into(), "Y".into(), "Z".into()],
            vec![((0, 1), vec![q(0), q(0), q(1)])],
        )
        .unwrap()
    }

    fn line(alg: &LieAlgebra, coords: Vec<i64>) -> Subspace {
        let v = alg.vector(coords.into_iter().map(q).collect()).unwrap();
        Subspace::from_rows(alg.id(), alg.dim(), vec![v.coords])
    }

    #[test]
    fn center_reduction_trims_central_directions() {
        let a = heis3();
        let v = line(&a, vec![0, 0, 1]);
        let h = Subspace::zero(a.id(), 3);
        let rp = reduce_by_center(&a, &v, &h).unwrap();
        assert_eq!(rp.algebra.dim(), 2);
        assert!(rp.v.is_zero() && rp.h.is_zero());
        assert_eq!(rp.steps.len(), 1);

        let idle = reduce_by_center(&a, &h, &h).unwrap();
        assert!(idle.steps.is_empty());
        assert_eq!(idle.algebra.id(), a.id());
    }

    #[test]
    fn center_reduction_keeps_winkelmann() {
        let e = entry("winkelmann8").unwrap();
        let (v, h) = (e.v.as_ref().unwrap(), e.h.as_ref().unwrap());
        let rp = reduce_by_center(&e.algebra, v, h).unwrap();
        assert!(rp.steps.is_empty());
        assert_eq!(rp.algebra.id(), e.algebra.id());
        assert_eq!(rp.v, *v);
    }

    #[test]
    fn shadow_reduction_collapses_disjoint_shadows() {
        let e = entry("heis5").unwrap();
        let (v, h) = (e.v.as_ref().unwrap(), e.h.as_ref().unwrap());
        let rp = reduce_common_shadow(&e.algebra, v, h).unwrap();
        assert!(rp.v.is_zero() && rp.h.is_zero());
        assert_eq!(rp.algebra.dim(), 3);
        assert!(rp.algebra.nilpotency_step() <= 1);
        match &rp.steps[0] {
            ReductionStep::CommonShadow { g1, complement, .. } => {
                assert_eq!(g1.dim(), 3);
                assert_eq!(complement.len(), 2);
                assert!(v.contains(&complement[0]));
                assert!(h.contains(&complement[1]));
            }
            other => panic!("unexpected step {other:?}"),
        }
    }

    #[test]
    fn shadow_reduction_keeps_matching_shadows() {
        let e = entry("winkelmann8").unwrap();
        let (v, h) = (e.v.as_ref().unwrap(), e.h.as_ref().unwrap());
        let rp = reduce_common_shadow(&e.algebra, v, h).unwrap();
        assert_eq!(rp.algebra.id(), e.algebra.id());
        assert_eq!(rp.v, *v);
        assert_eq!(rp.h, *h);
        match &rp.steps[0] {
            ReductionStep::CommonShadow { n, g1, complement, .. } => {
                // both shadows agree, so n holds v and h and nothing splits off
                assert_eq!(n.dim(), 6);
                assert!(n.contains_subspace(v) && n.contains_subspace(h));
                assert_eq!(g1.dim(), 8);
                assert!(complement.is_empty());
            }
            other => panic!("unexpected step {other:?}"),
        }
    }

    #[test]
    fn family_split_finds_the_normalizing_direction() {
        let e = entry("upper4").unwrap();
        let (v, h) = (e.v.as_ref().unwrap(), e.h.as_ref().unwrap());
        let split = family_split(&e.algebra, v, h).unwrap().expect("split exists");
        let side = match split.fixed {
            NormalizedPart::V => "v",
            NormalizedPart::H => "h",
        };
        let rendered = format!(
            "Y0 = {} fixing {}",
            format_combination(&e.algebra, &split.y0.coords),
            side
        );
        assert_eq!(rendered, e.golden("family_split").unwrap());
        assert_eq!(split.g1.dim(), 5);
        assert_eq!(split.reduced.algebra.dim(), 5);
        assert_eq!(split.reduced.v.dim(), 1);
        assert_eq!(split.reduced.h.dim(), 2);

        // the reduced problem drops to two steps, where the linear route
        // of the one dimensional pipeline takes over
        assert_eq!(split.reduced.algebra.nilpotency_step(), 2);
        match dim1_pipeline(&split.reduced.algebra, &split.reduced.v, &split.reduced.h).unwrap() {
            Dim1Outcome::Slice(_) => {}
            Dim1Outcome::Unsupported { reason } => panic!("expected a slice: {reason}"),
        }
    }

    #[test]
    fn family_split_absent_for_winkelmann() {
        let e = entry("winkelmann8").unwrap();
        let (v, h) = (e.v.as_ref().unwrap(), e.h.as_ref().unwrap());
        assert!(family_split(&e.algebra, v, h).unwrap().is_none());
    }

    #[test]
    fn family_split_on_abelian_pairs() {
        let a = LieAlgebra::new(
            "abelian3",
            vec!["A".into(), "B".into(), "C".into()],
            vec![],
        )
        .unwrap();
        let v = line(&a, vec![1, 0, 0]);
        let h = line(&a, vec![0, 1, 0]);
        let split = family_split(&a, &v, &h).unwrap().expect("any complement works");
        assert_eq!(split.fixed, NormalizedPart::V);
        assert_eq!(split.y0.coords, vec![q(0), q(0), q(1)]);
        assert_eq!(split.reduced.algebra.dim(), 2);
    }

    #[test]
    fn dim1_linear_route_on_heisenberg5() {
        let e = entry("heis5").unwrap();
        let a = &e.algebra;
        let (v, h) = (e.v.as_ref().unwrap(), e.h.as_ref().unwrap());
        match dim1_pipeline(a, v, h).unwrap() {
            Dim1Outcome::Slice(SliceDescription::Linear(s0)) => {
                assert_eq!(s0.dim(), 3);
                for label in ["Y1", "Y2", "Z"] {
                    let i = a.label_index(label).unwrap();
                    assert!(s0.contains(&a.basis_vector(i)), "{label} missing");
                }
            }
            other => panic!("expected a linear slice, got {other:?}"),
        }
    }

    #[test]
    fn dim1_level_set_route_on_upper4() {
        let e = entry("upper4").unwrap();
        let (v, h) = (e.v.as_ref().unwrap(), e.h.as_ref().unwrap());
        match dim1_pipeline(&e.algebra, v, h).unwrap() {
            Dim1Outcome::Slice(SliceDescription::LevelSet { vars, functions }) => {
                assert_eq!(functions.len(), 1);
                assert_eq!(
                    functions[0].to_string_with(&vars),
                    e.golden("slice_function").unwrap()
                );
            }
            other => panic!("expected a level set, got {other:?}"),
        }
    }

    #[test]
    fn dim1_rejects_visibly_nonfree_pairs() {
        let a = heis3();
        let v = line(&a, vec![1, 0, 1]);
        let h = line(&a, vec![1, 0, 0]);
        assert!(matches!(dim1_pipeline(&a, &v, &h), Err(Error::Precondition(_))));
    }

    #[test]
    fn dim1_recurses_through_the_central_quotient() {
        // three steps, ad(X0)(g^(1)) = <U> misses Z0 = W, and no
        // commutative ideal covers v before the quotient
        let zero = vec![q(0); 7];
        let unit = |i: usize| {
            let mut c = zero.clone();
            c[i] = q(1);
            c
        };
        let a = LieAlgebra::new(
            "seven",
            ["X0", "X1", "Y", "Z1", "Z2", "U", "W"].map(String::from).to_vec(),
            vec![
                ((0, 2), unit(3)),
                ((1, 2), unit(4)),
                ((0, 3), unit(5)),
                ((1, 4), unit(6)),
            ],
        )
        .unwrap();
        assert_eq!(a.nilpotency_step(), 3);
        let v = line(&a, vec![1, 0, 0, 0, 0, 0, 1]);
        let h = Subspace::span(a.id(), 7, &[a.basis_vector(0), a.basis_vector(1)]).unwrap();
        match dim1_pipeline(&a, &v, &h).unwrap() {
            Dim1Outcome::Slice(SliceDescription::LevelSet { vars, functions }) => {
                assert!(!vars.iter().any(|s| s == "u"), "quotient did not happen: {vars:?}");
                assert_eq!(functions.len(), 1);
            }
            other => panic!("expected a level set after the quotient, got {other:?}"),
        }
    }

    #[test]
    fn compose_slices_trivial_normal_subgroup() {
        let a = LieAlgebra::new("plane", vec!["A".into(), "B".into()], vec![]).unwrap();
        let v = line(&a, vec![1, 0]);
        let h = line(&a, vec![0, 1]);
        let s = SliceDescription::Linear(Subspace::zero(a.id(), 2));
        let n = Subspace::zero(a.id(), 2);
        let out = compose_slices(&a, &n, &v, &h, &s, &s, 0).unwrap();
        assert_eq!(out, s);
    }

    #[test]
    fn compose_slices_through_the_normal_closure() {
        let e = entry("upper4").unwrap();
        let a = &e.algebra;
        let (v, h) = (e.v.as_ref().unwrap(), e.h.as_ref().unwrap());
        let n = e.normal.as_ref().unwrap();
        let closure = a.ideal_closure(v).unwrap();
        assert_eq!(closure, *n);

        let slice = match dim1_pipeline(a, v, h).unwrap() {
            Dim1Outcome::Slice(s) => s,
            other => panic!("expected a slice, got {other:?}"),
        };
        let (quotient, _) = a.quotient_algebra(n).unwrap();
        let upstairs =
            SliceDescription::Linear(Subspace::whole(quotient.id(), quotient.dim()));
        let out = compose_slices(a, n, v, h, &upstairs, &slice, 0).unwrap();
        assert_eq!(out, slice);
    }

    #[test]
    fn compose_slices_rejects_partial_overlap() {
        let e = entry("winkelmann8").unwrap();
        let (v, h) = (e.v.as_ref().unwrap(), e.h.as_ref().unwrap());
        let n = e.algebra.central_series()[1].clone();
        let s = SliceDescription::Linear(Subspace::zero(e.algebra.id(), 8));
        assert!(matches!(
            compose_slices(&e.algebra, &n, v, h, &s, &s, 0),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn reductions_preserve_freeness_verdicts() {
        let opts = FreenessOptions::default();
        for name in ["winkelmann8", "yoshino7", "upper4", "heis5"] {
            let e = entry(name).unwrap();
            let (v, h) = (e.v.as_ref().unwrap(), e.h.as_ref().unwrap());
            let before = freeness_check(&e.algebra, v, h, &opts).unwrap();
            let rp = full_reduction(&e.algebra, v, h).unwrap();
            let after = freeness_check(&rp.algebra, &rp.v, &rp.h, &opts).unwrap();
            match (&before, &after) {
                (Freeness::Refuted(_), Freeness::Refuted(_)) => {}
                (Freeness::Certified(_), Freeness::Certified(_)) => {}
                (Freeness::Unknown { .. }, Freeness::Certified(_))
                | (Freeness::Unknown { .. }, Freeness::Unknown { .. }) => {}
                other => panic!("{name}: verdict changed across reduction: {other:?}"),
            }
        }
    }
}
