use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_traits::One;
use rayon::prelude::*;
use serde::Serialize;

use super::spectrahedron::{build_spectrahedron, min_order, Spectrahedron};
use super::MomentError;
use crate::model::ReactionNetwork;
use crate::opt::{solve_sdp, ConicProgram64, Residuals, Sense, SolveStatus, Tolerances};
use crate::polyalg::MultiIndex;
use crate::{Poly, Rational};

#[derive(Debug, Clone, PartialEq, Default)]
pub enum MomentScaling {
    /// `σ_i` from an upper bound on `⟨x_i⟩` at the smallest useful order.
    #[default]
    Auto,
    None,
    Fixed(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct MomentOptions {
    pub tol: Tolerances,
    pub scaling: MomentScaling,
    /// Relative widening applied to each reported bound to absorb the
    /// solver's residual dual infeasibility.
    pub slack: f64,
}

impl Default for MomentOptions {
    fn default() -> Self {
        Self { tol: Tolerances::default(), scaling: MomentScaling::Auto, slack: 1e-7 }
    }
}

/// What to bound.
#[derive(Debug, Clone, PartialEq)]
pub enum Target {
    /// `⟨x^α⟩`, posed as `⟨o x^α / o⟩`.
    Power(MultiIndex),
    /// `⟨f / o⟩` for a polynomial `f`.
    Rational { label: String, f: Poly },
}

impl Target {
    /// `⟨f⟩` for a polynomial `f`: a monic monomial becomes a power moment,
    /// anything else `⟨o f / o⟩`.
    pub fn from_polynomial(net: &ReactionNetwork, f: &Poly) -> Self {
        if f.num_terms() == 1 {
            if let Some((a, c)) = f.leading() {
                if c.is_one() {
                    return Target::Power(a.clone());
                }
            }
        }
        Target::Rational { label: f.to_string_with(net.species()), f: net.denominator() * f }
    }

    pub fn label(&self, species: &[String]) -> String {
        match self {
            Target::Power(a) if a.is_zero() => "1".into(),
            Target::Power(a) => Poly::monomial(a.clone(), Rational::one()).to_string_with(species),
            Target::Rational { label, .. } => label.clone(),
        }
    }
}

/// Bounds `l ≤ ⟨f/o⟩ ≤ u` from the two SDPs over `E^d`. A side whose solve
/// did not finish with an optimal certificate is reported as infinite.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentBound {
    pub target: String,
    pub d: u32,
    pub lower: f64,
    pub upper: f64,
    #[serde(serialize_with = "ser_status")]
    pub status_lo: SolveStatus,
    #[serde(serialize_with = "ser_status")]
    pub status_hi: SolveStatus,
    /// True when the bound refers to a rational moment `⟨f/o⟩` with `o ≠ 1`.
    pub rational_basis: bool,
    #[serde(serialize_with = "ser_residuals")]
    pub residuals_lo: Residuals,
    #[serde(serialize_with = "ser_residuals")]
    pub residuals_hi: Residuals,
}

fn ser_status<S: serde::Serializer>(s: &SolveStatus, ser: S) -> Result<S::Ok, S::Error> {
    ser.serialize_str(s.as_str())
}

fn ser_residuals<S: serde::Serializer>(r: &Residuals, ser: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeMap;
    let mut m = ser.serialize_map(Some(3))?;
    m.serialize_entry("primal_feas", &r.primal_feas)?;
    m.serialize_entry("dual_feas", &r.dual_feas)?;
    m.serialize_entry("gap", &r.gap)?;
    m.end()
}

impl MomentBound {
    pub fn gap(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn both_optimal(&self) -> bool {
        self.status_lo.is_optimal() && self.status_hi.is_optimal()
    }

    pub fn contains(&self, v: f64, tol: f64) -> bool {
        self.lower - tol <= v && v <= self.upper + tol
    }
}

/// Computes moment bounds for one network, caching `E^d` per order and the
/// scaling `σ`.
pub struct MomentBounder<'a> {
    net: &'a ReactionNetwork,
    opts: MomentOptions,
    sigma: Vec<f64>,
    cache: Mutex<HashMap<u32, Arc<Spectrahedron>>>,
}

impl<'a> MomentBounder<'a> {
    pub fn new(net: &'a ReactionNetwork, opts: MomentOptions) -> Result<Self, MomentError> {
        let n = net.n();
        let mut b = Self { net, opts, sigma: vec![1.0; n], cache: Mutex::new(HashMap::new()) };
        match b.opts.scaling.clone() {
            MomentScaling::None => {}
            MomentScaling::Fixed(s) => {
                if s.len() != n || s.iter().any(|&v| !(v > 0.0 && v.is_finite())) {
                    return Err(MomentError::BadScaling);
                }
                b.sigma = s;
            }
            MomentScaling::Auto => {
                let d0 = (net.d_o() + 1).max(net.d_a()).max(min_order(net));
                let mut sigma = vec![1.0; n];
                for (i, s) in sigma.iter_mut().enumerate() {
                    if let Ok(m) = b.bound_power(d0, &MultiIndex::unit(n, i)) {
                        if m.status_hi.is_optimal() && m.upper.is_finite() {
                            *s = m.upper.max(1.0);
                        }
                    }
                }
                b.sigma = sigma;
            }
        }
        Ok(b)
    }

    pub fn network(&self) -> &ReactionNetwork {
        self.net
    }

    pub fn sigma(&self) -> &[f64] {
        &self.sigma
    }

    pub fn options(&self) -> &MomentOptions {
        &self.opts
    }

    pub fn spectrahedron(&self, d: u32) -> Result<Arc<Spectrahedron>, MomentError> {
        if let Some(s) = self.cache.lock().expect("cache lock").get(&d) {
            return Ok(s.clone());
        }
        let s = Arc::new(build_spectrahedron(self.net, d)?);
        self.cache.lock().expect("cache lock").entry(d).or_insert_with(|| s.clone());
        Ok(s)
    }

    fn target_poly(&self, t: &Target, d: u32) -> Result<Poly, MomentError> {
        match t {
            Target::Power(a) => {
                if a.degree() + self.net.d_o() > d {
                    return Err(MomentError::TargetDegree { degree: a.degree() + self.net.d_o(), d });
                }
                Ok(self.net.denominator() * &Poly::monomial(a.clone(), Rational::one()))
            }
            Target::Rational { f, .. } => Ok(f.clone()),
        }
    }

    /// The SDP for one side of one target, as handed to the solver.
    pub fn conic(&self, d: u32, target: &Target, sense: Sense) -> Result<ConicProgram64, MomentError> {
        let s = self.spectrahedron(d)?;
        let f = self.target_poly(target, d)?;
        Ok(s.to_conic(&s.objective_coeffs(&f)?, sense, &self.sigma))
    }

    pub fn bound(&self, d: u32, target: &Target) -> Result<MomentBound, MomentError> {
        let s = self.spectrahedron(d)?;
        let f = self.target_poly(target, d)?;
        let coeffs = s.objective_coeffs(&f)?;
        let sides: Vec<(f64, SolveStatus, Residuals)> =
            [Sense::Minimize, Sense::Maximize].par_iter().map(|&sense| self.solve_side(&s, &coeffs, sense)).collect();
        let rational_basis = !self.net.denominator().is_constant() && !matches!(target, Target::Power(_));
        Ok(MomentBound {
            target: target.label(self.net.species()),
            d,
            lower: sides[0].0,
            upper: sides[1].0,
            status_lo: sides[0].1,
            status_hi: sides[1].1,
            rational_basis,
            residuals_lo: sides[0].2,
            residuals_hi: sides[1].2,
        })
    }

    pub fn bound_power(&self, d: u32, alpha: &MultiIndex) -> Result<MomentBound, MomentError> {
        self.bound(d, &Target::Power(alpha.clone()))
    }

    fn solve_side(&self, s: &Spectrahedron, coeffs: &[Rational], sense: Sense) -> (f64, SolveStatus, Residuals) {
        let cp = s.to_conic(coeffs, sense, &self.sigma);
        let r = solve_sdp(&cp, &self.opts.tol);
        let worst = match sense {
            Sense::Minimize => f64::NEG_INFINITY,
            Sense::Maximize => f64::INFINITY,
        };
        if !r.status.is_optimal() {
            return (worst, r.status, r.residuals);
        }
        let v = r.certified_value();
        let widen = self.opts.slack * v.abs().max(1.0);
        let v = match sense {
            Sense::Minimize => v - widen,
            Sense::Maximize => v + widen,
        };
        (v, r.status, r.residuals)
    }

    /// Bounds for every `(target, d)` pair, solved concurrently and returned
    /// in target-major order.
    pub fn hierarchy(&self, targets: &[Target], orders: &[u32]) -> Vec<Result<MomentBound, MomentError>> {
        // Build every E^d up front so workers only read the cache.
        for &d in orders {
            let _ = self.spectrahedron(d);
        }
        let tasks: Vec<(&Target, u32)> = targets.iter().flat_map(|t| orders.iter().map(move |&d| (t, d))).collect();
        tasks.par_iter().map(|(t, d)| self.bound(*d, t)).collect()
    }
}

/// One-shot `l^d_f ≤ ⟨f/o⟩ ≤ u^d_f`.
pub fn bound_moment(net: &ReactionNetwork, d: u32, f: &Poly, opts: &MomentOptions) -> Result<MomentBound, MomentError> {
    let label = f.to_string_with(net.species());
    MomentBounder::new(net, opts.clone())?.bound(d, &Target::Rational { label, f: f.clone() })
}

/// One-shot bounds on `⟨x^α⟩` through `f = o x^α`.
pub fn bound_power_moment(net: &ReactionNetwork, d: u32, alpha: &MultiIndex, opts: &MomentOptions) -> Result<MomentBound, MomentError> {
    MomentBounder::new(net, opts.clone())?.bound_power(d, alpha)
}

/// Flags `(target, d)` pairs where raising the order loosened a bound by
/// more than `tol`. Input is grouped by target with increasing `d`.
pub fn monotonicity_violations(bounds: &[MomentBound], tol: f64) -> Vec<String> {
    let mut out = Vec::new();
    for w in bounds.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        if a.target != b.target || b.d <= a.d {
            continue;
        }
        let scale = |v: f64| tol * v.abs().max(1.0);
        if a.lower.is_finite() && b.lower < a.lower - scale(a.lower) {
            out.push(format!("{}: lower bound decreased from {:e} (d={}) to {:e} (d={})", a.target, a.lower, a.d, b.lower, b.d));
        }
        if a.upper.is_finite() && b.upper > a.upper + scale(a.upper) {
            out.push(format!("{}: upper bound increased from {:e} (d={}) to {:e} (d={})", a.target, a.upper, a.d, b.upper, b.d));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{parse_network, parse_polynomial};

    #[test]
    fn targets_from_polynomials() {
        let net = parse_network("0 -> A @ 30/(1+B^3)\nA -> 0 @ mass_action(1)\n0 -> B @ 2\nB -> 0 @ mass_action(1)").unwrap();
        let p = parse_polynomial("A^2", net.species()).unwrap();
        assert_eq!(Target::from_polynomial(&net, &p), Target::Power(MultiIndex::new(vec![2, 0])));
        let p = parse_polynomial("A + B", net.species()).unwrap();
        match Target::from_polynomial(&net, &p) {
            Target::Rational { label, f } => {
                assert_eq!(label, p.to_string_with(net.species()));
                assert_eq!(f, net.denominator() * &p);
            }
            t => panic!("{t:?}"),
        }
    }
}
