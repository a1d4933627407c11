//! Two-sided translation actions: freeness certification and the induced
//! action on a quotient by a subgroup.
//!
//! For subalgebras `v` and `h` the pair `(exp ξ, exp η)` moves `g` to
//! `exp(ξ) g exp(η)^{-1}`.  The stabilizer of `g` is trivial exactly when
//! `Ad(g)(v)` meets `h` only in zero, so freeness of the whole action is a
//! rank condition on a matrix with polynomial entries, one column per
//! generator of either side.

use num_traits::{One, Zero};

use crate::algebra::{LieAlgebra, Vector};
use crate::decomp::{subgroup_slice, ProductChart, SliceDecomposition};
use crate::derivation::Derivation;
use crate::error::{Error, Result};
use crate::group::{ad_matrix, star_poly};
use crate::linalg::Matrix;
use crate::poly::{Monomial, PolyMatrix, Polynomial};
use crate::sample::{rng, sample_vec};
use crate::scalar::Q;
use crate::subspace::Subspace;

/// Knobs for the freeness decision procedure.  Defaults keep every step
/// deterministic for a fixed seed.
#[derive(Debug, Clone)]
pub struct FreenessOptions {
    pub seed: u64,
    /// Random points probed for rank drops before symbolic work.
    pub samples: usize,
    /// Largest multiplier degree tried for a unit-ideal certificate;
    /// `None` derives `2 · step` from the algebra.
    pub multiplier_degree: Option<usize>,
}

impl Default for FreenessOptions {
    fn default() -> Self {
        FreenessOptions { seed: 0, samples: 8, multiplier_degree: None }
    }
}

/// Proof object accompanying a `Certified` verdict.
#[derive(Debug, Clone, PartialEq)]
pub enum FreenessCertificate {
    /// One maximal minor is a nonzero constant.
    ConstantMinor { rows: Vec<usize>, value: Q },
    /// Multipliers with `Σ q_i · minor_i = 1`, so the minors have no common
    /// zero anywhere.
    UnitIdeal { multipliers: Vec<Polynomial> },
}

/// Proof object accompanying a `Refuted` verdict: a group element with a
/// nontrivial stabilizer.
#[derive(Debug, Clone, PartialEq)]
pub struct IsotropyWitness {
    /// Exponential coordinates of the witness group element.
    pub point: Vec<Q>,
    /// Nonzero coefficients on `[Ad(g) basis(v) | basis(h)]` summing to zero.
    pub combination: Vec<Q>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Freeness {
    Certified(FreenessCertificate),
    Refuted(IsotropyWitness),
    Unknown { reason: String },
}

/// The rank matrix `M(t) = [Ad(exp Σ t_i e_i) · basis(v) | basis(h)]`
/// together with its parameter names.
pub struct IsotropyProblem {
    pub matrix: PolyMatrix,
    pub vars: Vec<String>,
    pub v_dim: usize,
    pub h_dim: usize,
}

/// `Ad(exp Σ t_i e_i)` with entries polynomial in the `t_i`.
pub fn adjoint_poly(alg: &LieAlgebra) -> Result<PolyMatrix> {
    let n = alg.dim();
    let mut ad = PolyMatrix::zeros(n, n, n);
    for i in 0..n {
        let m = ad_matrix(alg, &alg.basis_vector(i))?;
        ad = ad.add(&PolyMatrix::from_rational(&m, n).scale_poly(&Polynomial::var(n, i)));
    }
    let mut out = PolyMatrix::identity(n, n);
    let mut power = PolyMatrix::identity(n, n);
    let mut k = 0usize;
    loop {
        power = power.mul(&ad);
        k += 1;
        if power.is_zero() || k > alg.nilpotency_step() {
            break;
        }
        out = out.add(&power.scale(&crate::scalar::factorial(k).recip()));
    }
    Ok(out)
}

pub fn isotropy_problem(alg: &LieAlgebra, v: &Subspace, h: &Subspace) -> Result<IsotropyProblem> {
    v.check_algebra(alg.id())?;
    h.check_algebra(alg.id())?;
    if !alg.is_subalgebra(v)? || !alg.is_subalgebra(h)? {
        return Err(Error::Precondition("both action factors must be subalgebras".into()));
    }
    let n = alg.dim();
    let adj = adjoint_poly(alg)?;
    let p = v.dim();
    let q = h.dim();
    let mut m = PolyMatrix::zeros(n, p + q, n);
    for (j, row) in v.basis_rows().enumerate() {
        let col = adj.mul_vec(
            &row.iter().map(|c| Polynomial::constant(n, c.clone())).collect::<Vec<_>>(),
        );
        for (i, e) in col.into_iter().enumerate() {
            m[(i, j)] = e;
        }
    }
    for (j, row) in h.basis_rows().enumerate() {
        for (i, c) in row.iter().enumerate() {
            m[(i, p + j)] = Polynomial::constant(n, c.clone());
        }
    }
    let vars = (1..=n).map(|i| format!("t{i}")).collect();
    Ok(IsotropyProblem { matrix: m, vars, v_dim: p, h_dim: q })
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn walk(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            walk(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    walk(0, n, k, &mut cur, &mut out);
    out
}

/// All maximal minors of the rank matrix, with their row sets.
pub fn maximal_minors(problem: &IsotropyProblem) -> Vec<(Vec<usize>, Polynomial)> {
    let k = problem.v_dim + problem.h_dim;
    let cols: Vec<usize> = (0..k).collect();
    combinations(problem.matrix.rows, k)
        .into_iter()
        .map(|rows| {
            let d = problem.matrix.submatrix(&rows, &cols).det();
            (rows, d)
        })
        .collect()
}

fn rank_drop_witness(problem: &IsotropyProblem, point: &[Q]) -> Option<IsotropyWitness> {
    let m = problem.matrix.eval(point);
    let kernel = m.kernel();
    kernel.into_iter().next().map(|combination| IsotropyWitness {
        point: point.to_vec(),
        combination,
    })
}

/// Substitute `value` for variable `var`, keeping the ring.
fn substitute_var(p: &Polynomial, var: usize, value: &Polynomial) -> Polynomial {
    let n = p.nvars();
    let images: Vec<Polynomial> = (0..n)
        .map(|i| if i == var { value.clone() } else { Polynomial::var(n, i) })
        .collect();
    p.compose(&images)
}

/// Try to solve `minors = 0` by repeatedly back-substituting variables that
/// occur affine-linearly with a constant coefficient, branching over the
/// factors of pure monomial equations.  Returns a common zero if found.
fn common_zero(
    minors: &[Polynomial],
    assignments: &mut Vec<(usize, Polynomial)>,
    depth: usize,
) -> Option<Vec<(usize, Polynomial)>> {
    let live: Vec<Polynomial> = {
        let mut seen = Vec::new();
        for m in minors {
            if !m.is_zero() && !seen.contains(m) {
                seen.push(m.clone());
            }
        }
        seen
    };
    if live.is_empty() {
        return Some(assignments.clone());
    }
    if depth == 0 {
        return None;
    }
    if live.iter().any(|m| m.as_constant().is_some_and(|c| !c.is_zero())) {
        return None;
    }
    let nvars = live[0].nvars();
    // affine-linear elimination: m = c·t_k + rest with constant c
    for m in &live {
        for k in 0..nvars {
            if m.degree_in(k) != Some(1) {
                continue;
            }
            let coeff = m.derivative(k);
            let Some(c) = coeff.as_constant() else { continue };
            if c.is_zero() {
                continue;
            }
            let tk = Polynomial::var(nvars, k);
            let rest = m.sub(&tk.scale(&c));
            let value = rest.scale(&(-c.recip()));
            let reduced: Vec<Polynomial> =
                live.iter().map(|p| substitute_var(p, k, &value)).collect();
            assignments.push((k, value));
            if let Some(sol) = common_zero(&reduced, assignments, depth - 1) {
                return Some(sol);
            }
            assignments.pop();
        }
    }
    // monomial branching: a single-term equation forces one factor to vanish
    for m in &live {
        if m.terms().count() != 1 {
            continue;
        }
        let (mono, _) = m.leading_term().unwrap();
        let mono = mono.clone();
        for k in 0..nvars {
            if mono.0[k] == 0 {
                continue;
            }
            let zero = Polynomial::zero(nvars);
            let reduced: Vec<Polynomial> =
                live.iter().map(|p| substitute_var(p, k, &zero)).collect();
            assignments.push((k, zero));
            if let Some(sol) = common_zero(&reduced, assignments, depth - 1) {
                return Some(sol);
            }
            assignments.pop();
        }
    }
    None
}

/// Resolve the chained assignments produced by `common_zero` into a concrete
/// rational point, filling unassigned variables from the sampler.
fn resolve_point(
    nvars: usize,
    assignments: &[(usize, Polynomial)],
    fill: &[Q],
) -> Vec<Q> {
    let mut values: Vec<Option<Q>> = vec![None; nvars];
    let mut free_iter = fill.iter();
    // assignments were made outermost first; evaluate innermost first
    for (var, _) in assignments {
        values[*var] = Some(Q::zero()); // placeholder marks the variable bound
    }
    for v in values.iter_mut() {
        if v.is_none() {
            *v = Some(free_iter.next().cloned().unwrap_or_else(Q::zero));
        }
    }
    let mut point: Vec<Q> = values.into_iter().map(Option::unwrap).collect();
    for (var, expr) in assignments.iter().rev() {
        point[*var] = expr.eval(&point);
    }
    point
}

/// Decide freeness of the two-sided action of `(exp v, exp h)`.
pub fn freeness_check(
    alg: &LieAlgebra,
    v: &Subspace,
    h: &Subspace,
    opts: &FreenessOptions,
) -> Result<Freeness> {
    let problem = isotropy_problem(alg, v, h)?;
    let n = alg.dim();
    let k = problem.v_dim + problem.h_dim;
    if k > n {
        // more generators than ambient dimensions: never free
        return Ok(Freeness::Refuted(
            rank_drop_witness(&problem, &vec![Q::zero(); n]).expect("rank must drop"),
        ));
    }

    // Probe a handful of points for a rank drop.
    let mut sampler = rng(opts.seed);
    let zero_point = vec![Q::zero(); n];
    if let Some(w) = rank_drop_witness(&problem, &zero_point) {
        return Ok(Freeness::Refuted(w));
    }
    for _ in 0..opts.samples {
        let point = sample_vec(&mut sampler, n);
        if let Some(w) = rank_drop_witness(&problem, &point) {
            return Ok(Freeness::Refuted(w));
        }
    }

    let minors = maximal_minors(&problem);
    for (rows, m) in &minors {
        if let Some(c) = m.as_constant() {
            if !c.is_zero() {
                return Ok(Freeness::Certified(FreenessCertificate::ConstantMinor {
                    rows: rows.clone(),
                    value: c,
                }));
            }
        }
    }

    // Structural refutation: a common zero of all minors.
    let minor_polys: Vec<Polynomial> = minors.iter().map(|(_, m)| m.clone()).collect();
    let mut assignments = Vec::new();
    if let Some(chain) = common_zero(&minor_polys, &mut assignments, 2 * n) {
        for attempt in 0..=opts.samples {
            let fill = if attempt == 0 {
                vec![Q::zero(); n]
            } else {
                sample_vec(&mut sampler, n)
            };
            let point = resolve_point(n, &chain, &fill);
            if let Some(w) = rank_drop_witness(&problem, &point) {
                return Ok(Freeness::Refuted(w));
            }
        }
    }

    // Unit-ideal certificate with escalating multiplier degree.
    let max_deg = opts.multiplier_degree.unwrap_or(2 * alg.nilpotency_step());
    for d in 0..=max_deg {
        if let Some(multipliers) = unit_ideal_certificate(&minor_polys, d) {
            return Ok(Freeness::Certified(FreenessCertificate::UnitIdeal { multipliers }));
        }
    }

    Ok(Freeness::Unknown {
        reason: format!(
            "no rank drop found and no unit-ideal certificate up to multiplier degree {max_deg}"
        ),
    })
}

/// Search for multipliers `q_i` of degree at most `d` with
/// `Σ q_i · minors_i = 1`.  Multiplier monomials only use variables that
/// occur in some minor.
fn unit_ideal_certificate(minors: &[Polynomial], d: usize) -> Option<Vec<Polynomial>> {
    let nonzero: Vec<(usize, &Polynomial)> =
        minors.iter().enumerate().filter(|(_, m)| !m.is_zero()).collect();
    if nonzero.is_empty() {
        return None;
    }
    let nvars = nonzero[0].1.nvars();
    let mut used = vec![false; nvars];
    for (_, m) in &nonzero {
        for (mono, _) in m.terms() {
            for (i, &e) in mono.0.iter().enumerate() {
                if e > 0 {
                    used[i] = true;
                }
            }
        }
    }
    let used_vars: Vec<usize> = (0..nvars).filter(|&i| used[i]).collect();
    let weights = vec![1u64; used_vars.len()];
    // multiplier monomials of total degree ≤ d over the used variables only
    let mut mult_monos: Vec<Monomial> = Vec::new();
    for lm in crate::slice::monomials_within(used_vars.len(), &weights, d as u64) {
        let mut exps = vec![0u32; nvars];
        for (pos, &v) in used_vars.iter().enumerate() {
            exps[v] = lm.0[pos];
        }
        mult_monos.push(Monomial(exps));
    }

    // columns: (minor, multiplier monomial); rows: product monomials
    let mut row_monos: Vec<Monomial> = Vec::new();
    let mut columns: Vec<Vec<(Monomial, Q)>> = Vec::new();
    for (_, m) in &nonzero {
        for mm in &mult_monos {
            let shifted = m.mul(&Polynomial::from_terms(nvars, vec![(mm.clone(), Q::one())]));
            let col: Vec<(Monomial, Q)> =
                shifted.terms().map(|(mo, c)| (mo.clone(), c.clone())).collect();
            for (mo, _) in &col {
                if !row_monos.contains(mo) {
                    row_monos.push(mo.clone());
                }
            }
            columns.push(col);
        }
    }
    row_monos.sort();
    let mut a = Matrix::zeros(row_monos.len(), columns.len());
    for (j, col) in columns.iter().enumerate() {
        for (mo, c) in col {
            let r = row_monos.binary_search(mo).expect("indexed");
            a[(r, j)] = c.clone();
        }
    }
    let mut b = vec![Q::zero(); row_monos.len()];
    let const_row = row_monos.binary_search(&Monomial::one(nvars)).ok()?;
    b[const_row] = Q::one();
    let sol = a.solve(&b).ok()?;

    let mut multipliers = vec![Polynomial::zero(nvars); minors.len()];
    let mut idx = 0usize;
    for (orig, _) in &nonzero {
        let mut p = Polynomial::zero(nvars);
        for mm in &mult_monos {
            let c = sol[idx].clone();
            idx += 1;
            if !c.is_zero() {
                p = p.add(&Polynomial::from_terms(nvars, vec![(mm.clone(), c)]));
            }
        }
        multipliers[*orig] = p;
    }
    // Exact recheck of the certificate.
    let mut acc = Polynomial::zero(nvars);
    for (q_i, m_i) in multipliers.iter().zip(minors) {
        acc = acc.add(&q_i.mul(m_i));
    }
    if acc == Polynomial::one(nvars) {
        Some(multipliers)
    } else {
        None
    }
}

/// The action of `exp(t · x0)` on the quotient chart `G/H` given by the
/// level pieces of a subgroup slice: the point with chart coordinates `y`
/// is `exp(B_0(y)) ⋯ exp(B_{l-1}(y)) · H`.
pub struct InducedAction {
    /// Chart variable names, level by level.
    pub vars: Vec<String>,
    /// Image coordinates in the ring `[t, vars…]` with `t` first.
    pub images: Vec<Polynomial>,
    /// Coefficients absorbed into `H`, in the same ring.
    pub h_part: Vec<Polynomial>,
    pub slice: SliceDecomposition,
}

impl InducedAction {
    /// Generator vector field `d/dt` at `t = 0`.
    pub fn derivation(&self) -> Derivation {
        let n = self.vars.len();
        let mut subs = vec![Polynomial::zero(n)];
        for i in 0..n {
            subs.push(Polynomial::var(n, i));
        }
        let comps = self
            .images
            .iter()
            .map(|img| img.derivative(0).compose(&subs))
            .collect();
        Derivation::new(self.vars.clone(), comps).expect("chart ring is consistent")
    }

    /// Degree of the motion in the group parameter.
    pub fn action_degree(&self) -> u32 {
        self.images.iter().filter_map(|p| p.degree_in(0)).max().unwrap_or(0)
    }
}

/// A polynomial action of a commutative unipotent group on affine space.
/// Coordinate images live in the ring `[params…, coords…]`, parameters
/// first, so evaluating at a group element and a point is one `eval` call.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineAction {
    pub params: Vec<String>,
    pub coords: Vec<String>,
    pub images: Vec<Polynomial>,
}

impl AffineAction {
    /// Compose the flows of pairwise commuting derivations, one parameter
    /// per generator.
    pub fn from_derivations(params: Vec<String>, gens: &[Derivation]) -> Result<AffineAction> {
        if gens.is_empty() || gens.len() != params.len() {
            return Err(Error::Precondition(
                "need one parameter name per generating derivation".into(),
            ));
        }
        for g in &gens[1..] {
            if g.vars != gens[0].vars {
                return Err(Error::RingMismatch("generators live on different charts".into()));
            }
        }
        for (i, a) in gens.iter().enumerate() {
            for b in &gens[i + 1..] {
                if !a.commutator(b)?.is_zero() {
                    return Err(Error::Precondition("generating derivations do not commute".into()));
                }
            }
        }

        let k = gens.len();
        let m = gens[0].nvars();
        let n = k + m;
        let mut cur: Vec<Polynomial> = (0..m).map(|j| Polynomial::var(n, k + j)).collect();
        for (i, g) in gens.iter().enumerate() {
            let flow = g.flow(crate::derivation::DEFAULT_BUDGET)?;
            let mut subs = Vec::with_capacity(m + 1);
            subs.push(Polynomial::var(n, i));
            subs.extend(cur.iter().cloned());
            cur = flow.images.iter().map(|p| p.compose(&subs)).collect();
        }
        Ok(AffineAction { params, coords: gens[0].vars.clone(), images: cur })
    }

    /// View a one-parameter induced action as an action descriptor; the
    /// image ring already has the parameter in front.
    pub fn from_induced(act: &InducedAction, param: &str) -> AffineAction {
        AffineAction {
            params: vec![param.to_string()],
            coords: act.vars.clone(),
            images: act.images.clone(),
        }
    }

    /// Largest total degree in the group parameters across all images.
    pub fn degree(&self) -> u32 {
        let k = self.params.len();
        self.images
            .iter()
            .flat_map(|p| p.terms())
            .map(|(m, _)| m.0[..k].iter().sum::<u32>())
            .max()
            .unwrap_or(0)
    }

    /// Move the point `x` by the group element `g`.
    pub fn apply(&self, g: &[Q], x: &[Q]) -> Vec<Q> {
        let mut point = g.to_vec();
        point.extend_from_slice(x);
        self.images.iter().map(|p| p.eval(&point)).collect()
    }

    /// One generator per parameter: the velocity field ∂/∂t_i at the
    /// identity.  Fails when the action does not fix every point at zero
    /// parameters.
    pub fn derivations(&self) -> Result<Vec<Derivation>> {
        let k = self.params.len();
        let m = self.coords.len();
        let mut at_zero = vec![Polynomial::zero(m); k];
        at_zero.extend((0..m).map(|j| Polynomial::var(m, j)));
        for (j, img) in self.images.iter().enumerate() {
            if img.compose(&at_zero) != Polynomial::var(m, j) {
                return Err(Error::Precondition(
                    "action is not the identity at zero parameters".into(),
                ));
            }
        }
        (0..k)
            .map(|i| {
                let comps = self
                    .images
                    .iter()
                    .map(|img| img.derivative(i).compose(&at_zero))
                    .collect();
                Derivation::new(self.coords.clone(), comps)
            })
            .collect()
    }
}

/// Chart variable name for an adapted slice vector: the coordinate name of
/// its single basis direction when it has one, a synthetic level name
/// otherwise.
fn chart_var_name(alg: &LieAlgebra, v: &Vector, level: usize, pos: usize) -> String {
    let support: Vec<usize> =
        (0..alg.dim()).filter(|&i| !v.coords[i].is_zero()).collect();
    if support.len() == 1 {
        alg.chart_name(support[0])
    } else {
        format!("s{level}_{pos}")
    }
}

pub fn induced_action(alg: &LieAlgebra, h: &Subspace, x0: &Vector) -> Result<InducedAction> {
    alg.check_member(x0)?;
    h.check_algebra(alg.id())?;
    if !alg.is_subalgebra(h)? {
        return Err(Error::Precondition("quotient requires a subalgebra".into()));
    }
    let slice = subgroup_slice(alg, h)?;
    let mut parts: Vec<Subspace> = slice.levels.clone();
    parts.push(h.clone());
    let chart = ProductChart::new(alg, &parts)?;

    // chart names and the y-ring: variables for every slice vector
    let mut vars = Vec::new();
    for (t, part) in chart.parts.iter().enumerate() {
        if t == chart.parts.len() - 1 {
            break; // h carries no chart variables
        }
        for (k, v) in part.vectors.iter().enumerate() {
            vars.push(chart_var_name(alg, v, part.levels[k], k));
        }
    }
    let ny = vars.len();
    {
        let mut sorted = vars.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != ny {
            return Err(Error::Precondition("chart variable names collide".into()));
        }
    }

    // point written in the full ring [t, y...]
    let nall = ny + 1;
    let mut y_index = 0usize;
    let mut factors: Vec<Vec<Polynomial>> = Vec::new();
    for (t, part) in chart.parts.iter().enumerate() {
        if t == chart.parts.len() - 1 {
            break;
        }
        let mut coords = vec![Polynomial::zero(nall); alg.dim()];
        for v in &part.vectors {
            let yv = Polynomial::var(nall, 1 + y_index);
            y_index += 1;
            for (c, coord) in coords.iter_mut().zip(&v.coords) {
                if !coord.is_zero() {
                    *c = c.add(&yv.scale(coord));
                }
            }
        }
        factors.push(coords);
    }
    let point = crate::group::star_many_poly(alg, &factors)?;

    // move by exp(t x0) and factor back through the chart
    let mover: Vec<Polynomial> = x0
        .coords
        .iter()
        .map(|c| Polynomial::var(nall, 0).scale(c))
        .collect();
    let moved = star_poly(alg, &mover, &point)?;
    let coeffs = chart.factorize_poly(&moved)?;

    let mut images = Vec::with_capacity(ny);
    for part in coeffs.iter().take(coeffs.len() - 1) {
        images.extend(part.iter().cloned());
    }
    let h_part = coeffs.last().cloned().unwrap_or_default();
    Ok(InducedAction { vars, images, h_part, slice })
}

/// Matched bases and normal subgroup data for a pair whose bottom-level
/// images agree in a three step algebra.
#[derive(Debug, Clone)]
pub struct ThreeStepNormalPair {
    /// Vectors `X_j + Z_j` spanning a complement of `v ∩ g^(1)` in `v`.
    pub v0: Vec<Vector>,
    /// The matching vectors `X_j` in `h`; `phi` maps `v0[j]` to `h0[j]`.
    pub h0: Vec<Vector>,
    /// Basis of `n ⊆ v ⊕ h` in concatenated coordinates, `v`-side first.
    pub n: Subspace,
    /// The `exp(n)`-action on `G` in the single-exponential chart.
    pub action: AffineAction,
}

impl ThreeStepNormalPair {
    /// Image of a vector of `span(v0)` under `X_j + Z_j ↦ X_j`.
    pub fn phi(&self, y: &Vector) -> Result<Vector> {
        let cols: Vec<Vec<Q>> = self.v0.iter().map(|w| w.coords.clone()).collect();
        let a = Matrix::from_rows(cols).transpose();
        let sol = a
            .solve(&y.coords)
            .map_err(|_| Error::Precondition("vector is outside the domain of phi".into()))?;
        let dim = y.coords.len();
        let mut out = vec![Q::zero(); dim];
        for (c, w) in sol.iter().zip(&self.h0) {
            for (o, x) in out.iter_mut().zip(&w.coords) {
                *o += c * x;
            }
        }
        Ok(Vector { algebra: y.algebra, coords: out })
    }
}

fn paired_rows(a: &Vector, b: &Vector) -> Vec<Q> {
    let mut row = a.coords.clone();
    row.extend_from_slice(&b.coords);
    row
}

/// For a three step algebra and a pair with equal bottom-level images,
/// build the matched bases `X_j + Z_j ∈ v`, `X_j ∈ h`, the ideal
/// `n = {(Y0 + Y1, phi(Y0) + Y)}` of `v ⊕ h`, and the action of `exp(n)`
/// on the group chart.  The construction fails loudly when `n` is not an
/// ideal, rather than returning unusable data.
pub fn three_step_normal_pair(
    alg: &LieAlgebra,
    v: &Subspace,
    h: &Subspace,
) -> Result<ThreeStepNormalPair> {
    v.check_algebra(alg.id())?;
    h.check_algebra(alg.id())?;
    if alg.nilpotency_step() != 3 {
        return Err(Error::Precondition("the algebra must have exactly three steps".into()));
    }
    if !alg.is_subalgebra(v)? || !alg.is_subalgebra(h)? {
        return Err(Error::Precondition("both parts must be subalgebras".into()));
    }
    let series = alg.central_series();
    let g1 = &series[1];
    let g2 = &series[2];
    if v.intersect(g2).dim() != 0 || h.intersect(g2).dim() != 0 {
        return Err(Error::Precondition(
            "parts must avoid the last series term; reduce by the center first".into(),
        ));
    }
    if v.sum(g1) != h.sum(g1) {
        return Err(Error::Precondition(
            "the parts must have the same bottom-level image".into(),
        ));
    }

    // X_j: representatives of h modulo h ∩ g^(1)
    let qm = crate::algebra::QuotientMap::new(h.clone(), h.intersect(g1))?;
    let mut h0 = Vec::new();
    let mut v0 = Vec::new();
    for row in qm.rep_rows() {
        let x = alg.vector(row)?;
        // solve X_j + Z_j ∈ v with Z_j ∈ g^(1)
        let mut cols: Vec<Vec<Q>> = v.basis_rows().map(|r| r.to_vec()).collect();
        let nv = cols.len();
        cols.extend(g1.basis_rows().map(|r| r.to_vec()));
        let a = Matrix::from_rows(cols).transpose();
        let sol = a.solve(&x.coords).map_err(|_| {
            Error::Inconsistent("bottom-level images agree but no lift exists".into())
        })?;
        let mut w = vec![Q::zero(); alg.dim()];
        for (c, row) in sol[..nv].iter().zip(v.basis_rows()) {
            for (o, x) in w.iter_mut().zip(row) {
                *o += c * x;
            }
        }
        v0.push(alg.vector(w)?);
        h0.push(x);
    }

    // n = span of (X_j + Z_j, X_j), (v ∩ g^(1), 0), and (0, h ∩ g^(1))
    let dim = alg.dim();
    let zero = alg.vector(vec![Q::zero(); dim])?;
    let mut rows = Vec::new();
    for (a, b) in v0.iter().zip(&h0) {
        rows.push(paired_rows(a, b));
    }
    for r in v.intersect(g1).basis_vectors() {
        rows.push(paired_rows(&r, &zero));
    }
    for r in h.intersect(g1).basis_vectors() {
        rows.push(paired_rows(&zero, &r));
    }
    let n = Subspace::from_rows(alg.id(), 2 * dim, rows);

    // ideal check: brackets with (v, 0) and (0, h) stay inside n
    let pairs: Vec<(Vector, Vector)> = n
        .basis_rows()
        .map(|r| {
            let a = alg.vector(r[..dim].to_vec()).expect("left block");
            let b = alg.vector(r[dim..].to_vec()).expect("right block");
            (a, b)
        })
        .collect();
    for (a, b) in &pairs {
        for x in v.basis_vectors() {
            let br = alg.bracket(a, &x)?;
            if !n.contains_coords(&paired_rows(&br, &zero)) {
                return Err(Error::Inconsistent("n is not an ideal of v + h".into()));
            }
        }
        for y in h.basis_vectors() {
            let br = alg.bracket(b, &y)?;
            if !n.contains_coords(&paired_rows(&zero, &br)) {
                return Err(Error::Inconsistent("n is not an ideal of v + h".into()));
            }
        }
    }

    // exp(n)-action on the chart: exp(Σ t_k a_k) g exp(Σ t_k b_k)^{-1}
    let npar = pairs.len();
    let nall = npar + dim;
    let lin = |vecs: &[&Vector], sign: bool| -> Vec<Polynomial> {
        (0..dim)
            .map(|i| {
                let mut p = Polynomial::zero(nall);
                for (k, w) in vecs.iter().enumerate() {
                    if !w.coords[i].is_zero() {
                        let c = if sign { -w.coords[i].clone() } else { w.coords[i].clone() };
                        p = p.add(&Polynomial::var(nall, k).scale(&c));
                    }
                }
                p
            })
            .collect()
    };
    let left: Vec<&Vector> = pairs.iter().map(|(a, _)| a).collect();
    let right: Vec<&Vector> = pairs.iter().map(|(_, b)| b).collect();
    let point: Vec<Polynomial> = (0..dim).map(|i| Polynomial::var(nall, npar + i)).collect();
    let images = crate::group::star_many_poly(
        alg,
        &[lin(&left, false), point, lin(&right, true)],
    )?;
    let action = AffineAction {
        params: (1..=npar).map(|k| format!("t{k}")).collect(),
        coords: (0..dim).map(|i| alg.chart_name(i)).collect(),
        images,
    };

    Ok(ThreeStepNormalPair { v0, h0, n, action })
}
