//! Non-properness witness search over exact Laurent rays.
//!
//! A witness is a curve t ↦ (g(t), x(t)) where g(t) escapes to infinity
//! while x(t) and g(t).x(t) stay bounded for large t.  With Laurent rays
//! boundedness is exact: every coefficient of a positive power of t must
//! vanish.  Collecting those coefficients turns the search into a
//! polynomial system in the unknown ray coefficients, solved by triangular
//! elimination with branching; a single square root is adjoined when a
//! quadratic step demands one, and every ray found is re-verified
//! symbolically before being reported.  NoneFound never certifies
//! properness, it only records an exhausted budget.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::action::AffineAction;
use crate::error::{Error, Result};
use crate::poly::Monomial;
use crate::scalar::{fmt_q, rational_sqrt, Q};

/// Scalar in ℚ or in a quadratic extension ℚ(ω); which one is fixed by the
/// ambient `Field`.
#[derive(Debug, Clone, PartialEq)]
pub struct Ext {
    pub re: Q,
    pub im: Q,
}

impl Ext {
    fn zero() -> Ext {
        Ext { re: Q::zero(), im: Q::zero() }
    }

    fn one() -> Ext {
        Ext { re: Q::one(), im: Q::zero() }
    }

    fn from_q(c: Q) -> Ext {
        Ext { re: c, im: Q::zero() }
    }

    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    /// Rendered with `w` for the adjoined root.
    pub fn to_display(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut parts = Vec::new();
        if !self.re.is_zero() {
            parts.push(fmt_q(&self.re));
        }
        if !self.im.is_zero() {
            let c = if self.im.is_one() {
                "w".to_string()
            } else if (-self.im.clone()).is_one() {
                "-w".to_string()
            } else {
                format!("{}*w", fmt_q(&self.im))
            };
            parts.push(c);
        }
        let mut out = parts[0].clone();
        for p in &parts[1..] {
            if let Some(rest) = p.strip_prefix('-') {
                out.push_str(" - ");
                out.push_str(rest);
            } else {
                out.push_str(" + ");
                out.push_str(p);
            }
        }
        out
    }
}

/// Arithmetic context; `sq` is the value of ω² once a root is adjoined.
#[derive(Debug, Clone)]
struct Field {
    sq: Option<Q>,
}

impl Field {
    fn base() -> Field {
        Field { sq: None }
    }

    fn extended(sq: Q) -> Field {
        Field { sq: Some(sq) }
    }

    fn add(&self, a: &Ext, b: &Ext) -> Ext {
        Ext { re: &a.re + &b.re, im: &a.im + &b.im }
    }

    fn neg(&self, a: &Ext) -> Ext {
        Ext { re: -a.re.clone(), im: -a.im.clone() }
    }

    fn mul(&self, a: &Ext, b: &Ext) -> Ext {
        let mut re = &a.re * &b.re;
        if let Some(sq) = &self.sq {
            re += &a.im * &b.im * sq;
        } else {
            debug_assert!(a.im.is_zero() && b.im.is_zero());
        }
        Ext { re, im: &a.re * &b.im + &a.im * &b.re }
    }

    fn inv(&self, a: &Ext) -> Ext {
        match &self.sq {
            None => Ext::from_q(Q::one() / &a.re),
            Some(sq) => {
                // 1/(x + yω) = (x − yω) / (x² − sq·y²); the norm is nonzero
                // because sq is not a rational square
                let norm = &a.re * &a.re - &a.im * &a.im * sq;
                Ext { re: &a.re / &norm, im: -(&a.im / &norm) }
            }
        }
    }
}

/// Polynomial in the unknown ray coefficients over the working field.
#[derive(Debug, Clone, PartialEq)]
struct EPoly {
    n: usize,
    terms: BTreeMap<Monomial, Ext>,
}

impl EPoly {
    fn zero(n: usize) -> EPoly {
        EPoly { n, terms: BTreeMap::new() }
    }

    fn constant(n: usize, c: Ext) -> EPoly {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::one(n), c);
        }
        EPoly { n, terms }
    }

    fn var(n: usize, i: usize) -> EPoly {
        let mut exps = vec![0u32; n];
        exps[i] = 1;
        let mut terms = BTreeMap::new();
        terms.insert(Monomial(exps), Ext::one());
        EPoly { n, terms }
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn as_constant(&self) -> Option<Ext> {
        if self.terms.is_empty() {
            return Some(Ext::zero());
        }
        if self.terms.len() == 1 {
            let (m, c) = self.terms.iter().next().expect("one term");
            if m.degree() == 0 {
                return Some(c.clone());
            }
        }
        None
    }

    fn add_term(&mut self, f: &Field, m: Monomial, c: Ext) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = f.add(e.get(), &c);
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    fn add(&self, f: &Field, other: &EPoly) -> EPoly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(f, m.clone(), c.clone());
        }
        out
    }

    fn scale(&self, f: &Field, s: &Ext) -> EPoly {
        if s.is_zero() {
            return EPoly::zero(self.n);
        }
        let mut out = EPoly::zero(self.n);
        for (m, c) in &self.terms {
            out.add_term(f, m.clone(), f.mul(c, s));
        }
        out
    }

    fn mul(&self, f: &Field, other: &EPoly) -> EPoly {
        let mut out = EPoly::zero(self.n);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let exps: Vec<u32> =
                    ma.0.iter().zip(&mb.0).map(|(a, b)| a + b).collect();
                out.add_term(f, Monomial(exps), f.mul(ca, cb));
            }
        }
        out
    }

    fn pow(&self, f: &Field, e: u32) -> EPoly {
        let mut out = EPoly::constant(self.n, Ext::one());
        for _ in 0..e {
            out = out.mul(f, self);
        }
        out
    }

    fn contains_var(&self, i: usize) -> bool {
        self.terms.keys().any(|m| m.0[i] > 0)
    }

    fn degree_in(&self, i: usize) -> u32 {
        self.terms.keys().map(|m| m.0[i]).max().unwrap_or(0)
    }

    fn vars_present(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for i in 0..self.n {
            if self.contains_var(i) {
                out.push(i);
            }
        }
        out
    }

    /// Replace variable `i` by `rep`.
    fn subst(&self, f: &Field, i: usize, rep: &EPoly) -> EPoly {
        let mut out = EPoly::zero(self.n);
        for (m, c) in &self.terms {
            let e = m.0[i];
            let mut rest = m.0.clone();
            rest[i] = 0;
            let mut term = EPoly::constant(self.n, c.clone());
            if e > 0 {
                term = term.mul(f, &rep.pow(f, e));
            }
            for (tm, tc) in term.terms {
                let exps: Vec<u32> = tm.0.iter().zip(&rest).map(|(a, b)| a + b).collect();
                out.add_term(f, Monomial(exps), tc);
            }
        }
        out
    }

    fn eval(&self, f: &Field, point: &[Ext]) -> Ext {
        let mut acc = Ext::zero();
        for (m, c) in &self.terms {
            let mut term = c.clone();
            for (i, &e) in m.0.iter().enumerate() {
                for _ in 0..e {
                    term = f.mul(&term, &point[i]);
                }
            }
            acc = f.add(&acc, &term);
        }
        acc
    }
}

/// Laurent polynomial in the ray parameter with `EPoly` coefficients.
type Laurent = BTreeMap<i64, EPoly>;

fn l_insert(f: &Field, l: &mut Laurent, e: i64, p: EPoly) {
    if p.is_zero() {
        return;
    }
    match l.entry(e) {
        std::collections::btree_map::Entry::Vacant(v) => {
            v.insert(p);
        }
        std::collections::btree_map::Entry::Occupied(mut o) => {
            let s = o.get().add(f, &p);
            if s.is_zero() {
                o.remove();
            } else {
                *o.get_mut() = s;
            }
        }
    }
}

fn l_mul(f: &Field, a: &Laurent, b: &Laurent) -> Laurent {
    let mut out = Laurent::new();
    for (ea, pa) in a {
        for (eb, pb) in b {
            l_insert(f, &mut out, ea + eb, pa.mul(f, pb));
        }
    }
    out
}

fn l_scale_q(f: &Field, a: &Laurent, c: &Q) -> Laurent {
    let s = Ext::from_q(c.clone());
    let mut out = Laurent::new();
    for (e, p) in a {
        l_insert(f, &mut out, *e, p.scale(f, &s));
    }
    out
}

/// A found ray: per parameter and per coordinate the list of
/// `(t-exponent, coefficient)` pairs, ascending in the exponent.
#[derive(Debug, Clone, PartialEq)]
pub struct Ray {
    /// ω² when the ray needs the quadratic extension.
    pub omega_square: Option<Q>,
    /// Index of the parameter of guaranteed positive degree.
    pub unbounded_param: usize,
    pub params: Vec<Vec<(i64, Ext)>>,
    pub coords: Vec<Vec<(i64, Ext)>>,
}

fn side_display(names: &[String], side: &[Vec<(i64, Ext)>]) -> String {
    let mut parts = Vec::new();
    for (name, ray) in names.iter().zip(side) {
        if ray.is_empty() {
            parts.push(format!("{name} = 0"));
            continue;
        }
        let mut terms = Vec::new();
        for (e, c) in ray {
            let coeff = c.to_display();
            let coeff = if coeff.contains(' ') { format!("({coeff})") } else { coeff };
            let t = match e {
                0 => coeff,
                1 if coeff == "1" => "t".to_string(),
                1 => format!("{coeff}*t"),
                _ if coeff == "1" => format!("t^{e}"),
                _ => format!("{coeff}*t^{e}"),
            };
            terms.push(t);
        }
        parts.push(format!("{name} = {}", terms.join(" + ")));
    }
    parts.join(", ")
}

impl Ray {
    pub fn to_display(&self, act: &AffineAction) -> String {
        let mut out = format!(
            "{}; {}",
            side_display(&act.params, &self.params),
            side_display(&act.coords, &self.coords),
        );
        if let Some(sq) = &self.omega_square {
            out.push_str(&format!(" [w^2 = {}]", fmt_q(sq)));
        }
        out
    }
}

/// Outcome of the search; `NoneFound` is a budget statement, not a
/// properness certificate.
#[derive(Debug, Clone, PartialEq)]
pub enum PropernessReport {
    WitnessFound(Ray),
    NoneFound { ansatz_degree: u32 },
}

/// Ansatz layout: which unknown feeds which ray coefficient.
struct Pattern {
    nvars: usize,
    /// (ray index: params first then coords, t-exponent) per unknown
    slots: Vec<(usize, i64)>,
    designated: usize,
    lead_degree: i64,
}

fn build_pattern(k: usize, m: usize, d: i64, designated: usize, lead: i64) -> Pattern {
    let mut slots = Vec::new();
    for i in 0..k {
        let top = if i == designated { lead - 1 } else { d };
        for e in 0..=top {
            slots.push((i, e));
        }
    }
    for j in 0..m {
        for e in -d..=0 {
            slots.push((k + j, e));
        }
    }
    Pattern { nvars: slots.len(), slots, designated, lead_degree: lead }
}

impl Pattern {
    fn rays(&self, f: &Field, k: usize, m: usize) -> Vec<Laurent> {
        let n = self.nvars;
        let mut rays = vec![Laurent::new(); k + m];
        for (idx, (ray, e)) in self.slots.iter().enumerate() {
            l_insert(f, &mut rays[*ray], *e, EPoly::var(n, idx));
        }
        l_insert(
            f,
            &mut rays[self.designated],
            self.lead_degree,
            EPoly::constant(n, Ext::one()),
        );
        rays
    }
}

/// Positive-degree coefficients of every image coordinate along the rays.
fn ray_equations(f: &Field, act: &AffineAction, rays: &[Laurent]) -> Vec<EPoly> {
    let nvars = rays
        .iter()
        .flat_map(|l| l.values())
        .map(|p| p.n)
        .next()
        .unwrap_or(0);
    let one: Laurent = {
        let mut l = Laurent::new();
        l.insert(0, EPoly::constant(nvars, Ext::one()));
        l
    };
    let mut pows: Vec<Vec<Laurent>> = rays.iter().map(|_| vec![one.clone()]).collect();
    let power = |caches: &mut Vec<Vec<Laurent>>, v: usize, e: u32| -> Laurent {
        while caches[v].len() <= e as usize {
            let next = l_mul(f, caches[v].last().expect("nonempty"), &rays[v]);
            caches[v].push(next);
        }
        caches[v][e as usize].clone()
    };
    let mut eqs = Vec::new();
    for img in &act.images {
        let mut total = Laurent::new();
        for (mono, c) in img.terms() {
            let mut term = one.clone();
            for (v, &e) in mono.0.iter().enumerate() {
                if e > 0 {
                    term = l_mul(f, &term, &power(&mut pows, v, e));
                }
            }
            for (e, p) in l_scale_q(f, &term, c) {
                l_insert(f, &mut total, e, p);
            }
        }
        for (e, p) in total {
            if e > 0 {
                eqs.push(p);
            }
        }
    }
    eqs
}

enum Elim {
    Solved(Vec<(usize, EPoly)>),
    Dead,
    NeedsRoot(Q),
}

fn subst_all(f: &Field, eqs: &mut Vec<EPoly>, var: usize, rep: &EPoly) {
    for e in eqs.iter_mut() {
        if e.contains_var(var) {
            *e = e.subst(f, var, rep);
        }
    }
}

/// Quadratic roots over the working field; `None` when the square root is
/// unavailable there.
fn quadratic_roots(f: &Field, a: &Ext, b: &Ext, c: &Ext) -> std::result::Result<Vec<Ext>, Option<Q>> {
    let four_ac = f.mul(&f.mul(&Ext::from_q(crate::scalar::q(4)), a), c);
    let disc = f.add(&f.mul(b, b), &f.neg(&four_ac));
    let half = f.inv(&f.mul(&Ext::from_q(crate::scalar::q(2)), a));
    if disc.is_zero() {
        return Ok(vec![f.mul(&f.neg(b), &half)]);
    }
    if !disc.im.is_zero() {
        return Err(None);
    }
    if let Some(r) = rational_sqrt(&disc.re) {
        let sq = Ext::from_q(r);
        return Ok(vec![
            f.mul(&f.add(&f.neg(b), &sq), &half),
            f.mul(&f.add(&f.neg(b), &f.neg(&sq)), &half),
        ]);
    }
    match &f.sq {
        None => Err(Some(disc.re.clone())),
        Some(sq) => {
            // maybe disc = s²·ω² for rational s
            if let Some(s) = rational_sqrt(&(&disc.re / sq)) {
                let root = Ext { re: Q::zero(), im: s };
                Ok(vec![
                    f.mul(&f.add(&f.neg(b), &root), &half),
                    f.mul(&f.add(&f.neg(b), &f.neg(&root)), &half),
                ])
            } else {
                Err(None)
            }
        }
    }
}

const BRANCH_DEPTH: usize = 12;
const SAMPLE_VALUES: [i64; 5] = [0, 1, -1, 2, -2];

fn eliminate(f: &Field, mut eqs: Vec<EPoly>, depth: usize, fuel: &mut i64) -> Elim {
    let mut bindings: Vec<(usize, EPoly)> = Vec::new();
    loop {
        *fuel -= 1;
        if *fuel < 0 {
            return Elim::Dead;
        }
        eqs.retain(|e| !e.is_zero());
        if eqs.iter().any(|e| e.as_constant().is_some_and(|c| !c.is_zero())) {
            return Elim::Dead;
        }
        if eqs.is_empty() {
            return Elim::Solved(bindings);
        }

        // 1. substitute from an equation linear in some unknown with a
        //    constant coefficient
        let mut linear: Option<(usize, Ext, EPoly)> = None;
        'lin: for eq in &eqs {
            for u in eq.vars_present() {
                if eq.degree_in(u) != 1 {
                    continue;
                }
                let mut coeff = EPoly::zero(eq.n);
                let mut rest = EPoly::zero(eq.n);
                for (m, c) in &eq.terms {
                    if m.0[u] == 1 {
                        let mut e = m.0.clone();
                        e[u] = 0;
                        coeff.add_term(f, Monomial(e), c.clone());
                    } else {
                        rest.add_term(f, m.clone(), c.clone());
                    }
                }
                if let Some(cc) = coeff.as_constant() {
                    if !cc.is_zero() {
                        linear = Some((u, cc, rest));
                        break 'lin;
                    }
                }
            }
        }
        if let Some((u, cc, rest)) = linear {
            let rep = rest.scale(f, &f.neg(&f.inv(&cc)));
            subst_all(f, &mut eqs, u, &rep);
            bindings.push((u, rep));
            continue;
        }

        if depth == 0 {
            return Elim::Dead;
        }

        // 2. a single-term equation forces one of its variables to zero
        let single = eqs
            .iter()
            .find(|e| e.terms.len() == 1)
            .map(|e| e.vars_present());
        if let Some(vars) = single {
            let mut root_request: Option<Q> = None;
            for u in vars {
                let mut sub = eqs.clone();
                let zero = EPoly::zero(sub[0].n);
                subst_all(f, &mut sub, u, &zero);
                match eliminate(f, sub, depth - 1, fuel) {
                    Elim::Solved(bs) => {
                        bindings.push((u, zero));
                        bindings.extend(bs);
                        return Elim::Solved(bindings);
                    }
                    Elim::NeedsRoot(d) => root_request = root_request.or(Some(d)),
                    Elim::Dead => {}
                }
            }
            return match root_request {
                Some(d) => Elim::NeedsRoot(d),
                None => Elim::Dead,
            };
        }

        // 3. a univariate quadratic pins its unknown to a root
        let mut quad: Option<(usize, Ext, Ext, Ext)> = None;
        for eq in &eqs {
            let vars = eq.vars_present();
            if vars.len() == 1 && eq.degree_in(vars[0]) == 2 {
                let u = vars[0];
                let mut abc = vec![Ext::zero(), Ext::zero(), Ext::zero()];
                for (m, c) in &eq.terms {
                    abc[m.0[u] as usize] = c.clone();
                }
                quad = Some((u, abc[2].clone(), abc[1].clone(), abc[0].clone()));
                break;
            }
        }
        if let Some((u, a, b, c)) = quad {
            match quadratic_roots(f, &a, &b, &c) {
                Ok(roots) => {
                    let mut root_request: Option<Q> = None;
                    for r in roots {
                        let rep = EPoly::constant(eqs[0].n, r);
                        let mut sub = eqs.clone();
                        subst_all(f, &mut sub, u, &rep);
                        match eliminate(f, sub, depth - 1, fuel) {
                            Elim::Solved(bs) => {
                                bindings.push((u, rep));
                                bindings.extend(bs);
                                return Elim::Solved(bindings);
                            }
                            Elim::NeedsRoot(d) => root_request = root_request.or(Some(d)),
                            Elim::Dead => {}
                        }
                    }
                    return match root_request {
                        Some(d) => Elim::NeedsRoot(d),
                        None => Elim::Dead,
                    };
                }
                Err(Some(disc)) => return Elim::NeedsRoot(disc),
                Err(None) => return Elim::Dead,
            }
        }

        // 4. stuck: probe small values for the lowest unknown present
        let u = eqs
            .iter()
            .flat_map(|e| e.vars_present())
            .min()
            .expect("nonempty equations have variables");
        let mut root_request: Option<Q> = None;
        for val in SAMPLE_VALUES {
            let rep = EPoly::constant(eqs[0].n, Ext::from_q(crate::scalar::q(val)));
            let mut sub = eqs.clone();
            subst_all(f, &mut sub, u, &rep);
            match eliminate(f, sub, depth - 1, fuel) {
                Elim::Solved(bs) => {
                    bindings.push((u, rep));
                    bindings.extend(bs);
                    return Elim::Solved(bindings);
                }
                Elim::NeedsRoot(d) => root_request = root_request.or(Some(d)),
                Elim::Dead => {}
            }
        }
        return match root_request {
            Some(d) => Elim::NeedsRoot(d),
            None => Elim::Dead,
        };
    }
}

/// Largest square factor pulled out: returns `x0` with `x = s²·x0` for some
/// rational `s`, keeping `x0` a squarefree integer.
fn squarefree_part(x: &Q) -> Q {
    use num_bigint::BigInt;
    // x = n/d = (n·d)/d², so the squarefree part of x equals that of n·d
    let mut n: BigInt = x.numer() * x.denom();
    let mut out = BigInt::from(1);
    if n < BigInt::from(0) {
        out = -out;
        n = -n;
    }
    let mut p = BigInt::from(2);
    while &p * &p <= n {
        let sq = &p * &p;
        let mut count = 0u32;
        while (&n % &p).is_zero() {
            n /= &p;
            count += 1;
        }
        if count % 2 == 1 {
            out *= &p;
        }
        let _ = sq;
        p += 1;
    }
    out *= n;
    Q::from(out)
}

fn assignment(f: &Field, nvars: usize, bindings: &[(usize, EPoly)]) -> Vec<Ext> {
    let mut point = vec![Ext::zero(); nvars];
    for (u, rep) in bindings.iter().rev() {
        point[*u] = rep.eval(f, &point);
    }
    point
}

fn concrete_rays(
    f: &Field,
    pat: &Pattern,
    point: &[Ext],
    k: usize,
    m: usize,
) -> Vec<Vec<(i64, Ext)>> {
    let mut rays: Vec<BTreeMap<i64, Ext>> = vec![BTreeMap::new(); k + m];
    for (idx, (ray, e)) in pat.slots.iter().enumerate() {
        if !point[idx].is_zero() {
            let entry = rays[*ray].entry(*e).or_insert_with(Ext::zero);
            *entry = f.add(entry, &point[idx]);
        }
    }
    let entry = rays[pat.designated].entry(pat.lead_degree).or_insert_with(Ext::zero);
    *entry = f.add(entry, &Ext::one());
    rays.into_iter().map(|m| m.into_iter().collect()).collect()
}

/// Re-verify a candidate: plug the concrete rays back into the action and
/// demand that no positive power of t survives anywhere.
fn verify_ray(f: &Field, act: &AffineAction, rays: &[Vec<(i64, Ext)>]) -> bool {
    let laurents: Vec<Laurent> = rays
        .iter()
        .map(|r| {
            let mut l = Laurent::new();
            for (e, c) in r {
                l_insert(f, &mut l, *e, EPoly::constant(0, c.clone()));
            }
            l
        })
        .collect();
    for r in &laurents[act.params.len()..] {
        if r.keys().any(|e| *e > 0) {
            return false;
        }
    }
    ray_equations(f, act, &laurents).is_empty()
}

/// Search for a ray witnessing non-properness, with every coordinate degree
/// bounded by `ansatz_degree`.  Patterns fix one parameter to escape with
/// leading coefficient one; the remaining coefficients are solved for
/// exactly.  A found ray is returned only after symbolic re-verification.
pub fn properness_witness_search(
    act: &AffineAction,
    ansatz_degree: u32,
) -> Result<PropernessReport> {
    let k = act.params.len();
    let m = act.coords.len();
    let d = i64::from(ansatz_degree);
    for lead in 1..=d {
        for designated in 0..k {
            let pat = build_pattern(k, m, d, designated, lead);
            let base = Field::base();
            let rays = pat.rays(&base, k, m);
            let eqs = ray_equations(&base, act, &rays);
            let mut fuel = 200_000i64;
            let outcome = match eliminate(&base, eqs, BRANCH_DEPTH, &mut fuel) {
                Elim::NeedsRoot(disc) => {
                    let sq = squarefree_part(&disc);
                    let f = Field::extended(sq);
                    let rays = pat.rays(&f, k, m);
                    let eqs = ray_equations(&f, act, &rays);
                    let mut fuel = 200_000i64;
                    match eliminate(&f, eqs, BRANCH_DEPTH, &mut fuel) {
                        Elim::Solved(bindings) => Some((f, bindings)),
                        _ => None,
                    }
                }
                Elim::Solved(bindings) => Some((base, bindings)),
                Elim::Dead => None,
            };
            let Some((field, bindings)) = outcome else {
                continue;
            };
            let point = assignment(&field, pat.nvars, &bindings);
            let rays = concrete_rays(&field, &pat, &point, k, m);
            if !verify_ray(&field, act, &rays) {
                return Err(Error::Inconsistent(
                    "witness candidate failed symbolic re-verification".into(),
                ));
            }
            return Ok(PropernessReport::WitnessFound(Ray {
                omega_square: field.sq.clone(),
                unbounded_param: designated,
                params: rays[..k].to_vec(),
                coords: rays[k..].to_vec(),
            }));
        }
    }
    Ok(PropernessReport::NoneFound { ansatz_degree })
}
