//! Polynomial vector fields on a coordinate chart and their flows.

use crate::error::{Error, Result};
use crate::poly::Polynomial;
use crate::scalar::{factorial, Q};

/// Iteration budget used when a caller does not supply one.
pub const DEFAULT_BUDGET: usize = 64;

/// A derivation `Σ p_i ∂/∂x_i` of the polynomial ring in the given
/// variables.
#[derive(Debug, Clone, PartialEq)]
pub struct Derivation {
    pub vars: Vec<String>,
    pub components: Vec<Polynomial>,
}

impl Derivation {
    pub fn new(vars: Vec<String>, components: Vec<Polynomial>) -> Result<Derivation> {
        if vars.len() != components.len() {
            return Err(Error::Mismatch("one component per variable required".into()));
        }
        if components.iter().any(|p| p.nvars() != vars.len()) {
            return Err(Error::RingMismatch(
                "derivation components must live in the chart ring".into(),
            ));
        }
        Ok(Derivation { vars, components })
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(Polynomial::is_zero)
    }

    pub fn apply(&self, p: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero(self.nvars());
        for (i, comp) in self.components.iter().enumerate() {
            if !comp.is_zero() {
                out = out.add(&comp.mul(&p.derivative(i)));
            }
        }
        out
    }

    /// Component `i` may only involve variables with smaller index.
    /// Triangularity guarantees local nilpotency.
    pub fn is_triangular(&self) -> bool {
        self.components.iter().enumerate().all(|(i, comp)| {
            (i..self.nvars()).all(|j| comp.degree_in(j).unwrap_or(0) == 0)
        })
    }

    /// Least `k` with `δ^k(x_i) = 0` for each variable.
    pub fn vanishing_orders(&self, budget: usize) -> Result<Vec<usize>> {
        let mut orders = Vec::with_capacity(self.nvars());
        for i in 0..self.nvars() {
            let mut p = Polynomial::var(self.nvars(), i);
            let mut k = 0usize;
            while !p.is_zero() {
                if k >= budget {
                    return Err(Error::NotLocallyNilpotent {
                        var: self.vars[i].clone(),
                        budget,
                    });
                }
                p = self.apply(&p);
                k += 1;
            }
            orders.push(k);
        }
        Ok(orders)
    }

    /// A locally nilpotent derivation kills every variable after finitely
    /// many steps; conversely that suffices, since iterates of a product are
    /// sums of products of iterates.
    pub fn is_locally_nilpotent(&self, budget: usize) -> Result<bool> {
        match self.vanishing_orders(budget) {
            Ok(_) => Ok(true),
            Err(Error::NotLocallyNilpotent { .. }) => Ok(false),
            Err(e) => Err(e),
        }
    }

    /// Largest vanishing order over all variables.
    pub fn depth(&self, budget: usize) -> Result<usize> {
        Ok(self.vanishing_orders(budget)?.into_iter().max().unwrap_or(0))
    }

    /// Weights `w_i ≥ 1` with the property that applying the derivation to a
    /// monomial lowers its weighted degree by at least one:
    /// `w_i = 1 + max over terms of component i of the term's weighted
    /// degree`.  Well defined only for triangular derivations, where one
    /// pass in variable order reaches the least fixpoint.
    pub fn weights(&self) -> Result<Vec<u64>> {
        if !self.is_triangular() {
            return Err(Error::Precondition(
                "weights are defined for triangular derivations".into(),
            ));
        }
        let mut w: Vec<u64> = vec![1; self.nvars()];
        for i in 0..self.nvars() {
            let mut best = 0u64;
            for (m, _) in self.components[i].terms() {
                let wd: u64 = m.0.iter().zip(&w).map(|(&e, &wi)| u64::from(e) * wi).sum();
                best = best.max(wd);
            }
            w[i] = 1 + best;
        }
        Ok(w)
    }

    /// Flow `exp(t δ)` as polynomial images: variable `i` maps to
    /// `Σ_k t^k δ^k(x_i) / k!` in the ring `[t, x_1, …, x_n]` with `t`
    /// in front.
    pub fn flow(&self, budget: usize) -> Result<Flow> {
        let n = self.nvars();
        let embed_map: Vec<usize> = (1..=n).collect();
        let t = Polynomial::var(n + 1, 0);
        let mut images = Vec::with_capacity(n);
        for i in 0..n {
            let mut p = Polynomial::var(n, i);
            let mut acc = Polynomial::zero(n + 1);
            let mut k = 0usize;
            while !p.is_zero() {
                if k >= budget {
                    return Err(Error::NotLocallyNilpotent {
                        var: self.vars[i].clone(),
                        budget,
                    });
                }
                let term = p.embed(&embed_map, n + 1).mul(&t.pow(k as u32)).scale(&factorial(k).recip());
                acc = acc.add(&term);
                p = self.apply(&p);
                k += 1;
            }
            images.push(acc);
        }
        let mut vars = vec!["t".to_string()];
        vars.extend(self.vars.iter().cloned());
        Ok(Flow { vars, images })
    }

    /// Commutator `[self, other] = self ∘ other - other ∘ self`, again a
    /// derivation.
    pub fn commutator(&self, other: &Derivation) -> Result<Derivation> {
        if self.vars != other.vars {
            return Err(Error::RingMismatch("derivations on different charts".into()));
        }
        let comps = (0..self.nvars())
            .map(|i| self.apply(&other.components[i]).sub(&other.apply(&self.components[i])))
            .collect();
        Derivation::new(self.vars.clone(), comps)
    }

    pub fn to_display(&self) -> String {
        let mut parts = Vec::new();
        for (i, comp) in self.components.iter().enumerate() {
            if comp.is_zero() {
                continue;
            }
            let rendered = comp.to_string_with(&self.vars);
            let coeff = if rendered == "1" {
                String::new()
            } else if comp.terms().count() == 1 {
                format!("{rendered}*")
            } else {
                format!("({rendered})*")
            };
            parts.push(format!("{coeff}d/d{}", self.vars[i]));
        }
        if parts.is_empty() {
            return "0".to_string();
        }
        parts.join(" + ")
    }
}

/// Polynomial flow of a derivation; variable 0 of each image is the time
/// parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct Flow {
    /// `t` followed by the chart variables.
    pub vars: Vec<String>,
    pub images: Vec<Polynomial>,
}

impl Flow {
    /// Substitute a concrete time, returning images in the chart ring.
    pub fn at_time(&self, t: &Q) -> Vec<Polynomial> {
        let n = self.vars.len() - 1;
        let mut subs = vec![Polynomial::constant(n, t.clone())];
        for i in 0..n {
            subs.push(Polynomial::var(n, i));
        }
        self.images.iter().map(|p| p.compose(&subs)).collect()
    }

    /// Degree of the flow in the time variable.
    pub fn time_degree(&self) -> u32 {
        self.images.iter().filter_map(|p| p.degree_in(0)).max().unwrap_or(0)
    }
}

/// Lower bounds on the filtration depth of every chart variable, assuming
/// the chart comes from a central-series splitting of some ambient algebra
/// and the moving generator sits at depth `d_x0`.
///
/// Depth `d` means the basis vector lies in level `d - 1` of the series but
/// not in level `d`, so `d(y) ≥ d(δ(y)) + d_x0` where a monomial weighs the
/// sum of the depths of its factors and a constant weighs zero.  The
/// derivation must be triangular; a forward pass is then a fixpoint.
pub fn depth_bounds(d: &Derivation, d_x0: usize) -> Result<Vec<(String, usize)>> {
    if !d.is_triangular() {
        return Err(Error::Precondition("depth bounds need a triangular derivation".into()));
    }
    let n = d.nvars();
    let mut depth = vec![1usize; n];
    for i in 0..n {
        let comp = &d.components[i];
        if comp.is_zero() {
            continue;
        }
        let weighted = comp
            .terms()
            .map(|(m, _)| {
                m.0.iter().zip(&depth).map(|(&e, &w)| e as usize * w).sum::<usize>()
            })
            .max()
            .unwrap_or(0);
        depth[i] = depth[i].max(weighted + d_x0);
    }
    Ok(d.vars.iter().cloned().zip(depth).collect())
}

/// Largest series level forced nonzero by `depth_bounds`: depth `d` puts a
/// vector in level `d - 1`.
pub fn forced_nonzero_level(bounds: &[(String, usize)]) -> usize {
    bounds.iter().map(|(_, d)| d - 1).max().unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{q, qr};

    fn chart(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    // y1 d/dy3 + y2 d/dy4 + (1 + y1) d/dz2 + z2 d/dz1 on (y1,y2,y3,y4,z2,z1)
    fn sample() -> Derivation {
        let n = 6;
        let v = |i| Polynomial::var(n, i);
        let comps = vec![
            Polynomial::zero(n),
            Polynomial::zero(n),
            v(0),
            v(1),
            Polynomial::one(n).add(&v(0)),
            v(4),
        ];
        Derivation::new(chart(&["y1", "y2", "y3", "y4", "z2", "z1"]), comps).unwrap()
    }

    #[test]
    fn leibniz_rule() {
        let d = sample();
        let n = 6;
        let p = Polynomial::var(n, 0).mul(&Polynomial::var(n, 4)).add(&Polynomial::var(n, 2));
        let q_ = Polynomial::var(n, 5).add(&Polynomial::one(n));
        let lhs = d.apply(&p.mul(&q_));
        let rhs = d.apply(&p).mul(&q_).add(&p.mul(&d.apply(&q_)));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn triangularity_and_weights() {
        let d = sample();
        assert!(d.is_triangular());
        assert_eq!(d.weights().unwrap(), vec![1, 1, 2, 2, 2, 3]);
        assert!(d.is_locally_nilpotent(DEFAULT_BUDGET).unwrap());
        assert_eq!(d.depth(DEFAULT_BUDGET).unwrap(), 3);
    }

    #[test]
    fn flow_solves_the_ode() {
        // z1' = z2, z2' = 1 + y1 gives z1(t) = z1 + t z2 + t^2 (1 + y1) / 2.
        let d = sample();
        let f = d.flow(DEFAULT_BUDGET).unwrap();
        let n = 7;
        let t = Polynomial::var(n, 0);
        let y1 = Polynomial::var(n, 1);
        let z2 = Polynomial::var(n, 5);
        let z1 = Polynomial::var(n, 6);
        let expected = z1
            .add(&t.mul(&z2))
            .add(&t.pow(2).scale(&qr(1, 2)).mul(&Polynomial::one(n).add(&y1)));
        assert_eq!(f.images[4], z2.add(&t.mul(&Polynomial::one(n).add(&y1))));
        assert_eq!(f.images[5], expected);
        assert_eq!(f.time_degree(), 2);
    }

    #[test]
    fn flow_is_a_one_parameter_group() {
        // Φ_s ∘ Φ_t = Φ_{s+t}, checked at sample times.
        let d = sample();
        let f = d.flow(DEFAULT_BUDGET).unwrap();
        let at = |t: i64| f.at_time(&q(t));
        let a = at(2);
        let b = at(3);
        let composed: Vec<Polynomial> = a.iter().map(|p| p.compose(&b)).collect();
        assert_eq!(composed, at(5));
    }

    #[test]
    fn non_nilpotent_component_is_reported() {
        let v = Polynomial::var(1, 0);
        let d = Derivation::new(chart(&["x"]), vec![v]).unwrap();
        assert!(!d.is_triangular());
        assert!(!d.is_locally_nilpotent(16).unwrap());
        let err = d.flow(16).unwrap_err();
        assert!(matches!(err, Error::NotLocallyNilpotent { budget: 16, .. }));
    }

    #[test]
    fn commutator_is_a_derivation() {
        let d = sample();
        let n = 6;
        let mut comps = vec![Polynomial::zero(n); n];
        comps[2] = Polynomial::var(n, 1);
        comps[5] = Polynomial::one(n);
        let e = Derivation::new(d.vars.clone(), comps).unwrap();
        let c = d.commutator(&e).unwrap();
        let p = Polynomial::var(n, 5).mul(&Polynomial::var(n, 2));
        let lhs = c.apply(&p);
        let rhs = d.apply(&e.apply(&p)).sub(&e.apply(&d.apply(&p)));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn display_form() {
        let d = sample();
        assert_eq!(
            d.to_display(),
            "y1*d/dy3 + y2*d/dy4 + (y1 + 1)*d/dz2 + z2*d/dz1"
        );
    }
}
