//! One-species birth-death chains: the product-form stationary solution and
//! its closed-form truncation bounds.

mod hypergeom;

use std::fmt;
use std::sync::Arc;

use serde_json::{json, Value};

use crate::model::ReactionNetwork;

pub use hypergeom::{hypergeometric_2f2, schlogl_normalizer_2f2};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BirthDeathError {
    #[error("death rate vanishes at x = {state}")]
    ZeroDeathRate { state: u32 },
    #[error("rate is negative or not finite at x = {state}")]
    BadRate { state: u32 },
    #[error("network is not a one-species birth-death chain")]
    NotBirthDeath,
    #[error("no stationary distribution: the gamma series was not certified summable up to x = {reached}")]
    NotSummable { reached: u32 },
    #[error("truncation is empty (r = {r})")]
    EmptyTruncation { r: f64 },
    #[error("{0}")]
    Invalid(String),
}

type RateFn = Arc<dyn Fn(u32) -> f64 + Send + Sync>;

/// Birth rate `a₊(x)` and death rate `a₋(x)` of a chain on ℕ.
#[derive(Clone)]
pub struct BirthDeathModel {
    birth: RateFn,
    death: RateFn,
    label: String,
}

impl fmt::Debug for BirthDeathModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BirthDeathModel").field("label", &self.label).finish()
    }
}

impl BirthDeathModel {
    pub fn new(
        label: impl Into<String>,
        birth: impl Fn(u32) -> f64 + Send + Sync + 'static,
        death: impl Fn(u32) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self { birth: Arc::new(birth), death: Arc::new(death), label: label.into() }
    }

    /// `a₊ = Σ_{v_j = +1} a_j`, `a₋ = Σ_{v_j = −1} a_j`.
    pub fn from_network(net: &ReactionNetwork) -> Result<Self, BirthDeathError> {
        if !net.is_birth_death() {
            return Err(BirthDeathError::NotBirthDeath);
        }
        let up: Vec<usize> = (0..net.m()).filter(|&j| net.net_change(j)[0] == 1).collect();
        let down: Vec<usize> = (0..net.m()).filter(|&j| net.net_change(j)[0] == -1).collect();
        let (n1, n2) = (Arc::new(net.clone()), Arc::new(net.clone()));
        Ok(Self {
            birth: Arc::new(move |x| up.iter().map(|&j| n1.propensity_f64(j, &[x])).sum()),
            death: Arc::new(move |x| down.iter().map(|&j| n2.propensity_f64(j, &[x])).sum()),
            label: net.digest(),
        })
    }

    /// The M/M/∞ queue: `a₊ = λ`, `a₋(x) = μx`.
    pub fn mm_inf(lambda: f64, mu: f64) -> Self {
        Self::new(format!("mm_inf({lambda},{mu})"), move |_| lambda, move |x| mu * x as f64)
    }

    /// Schlögl's model with rates `k₁x(x−1) + k₃` and `k₂x(x−1)(x−2) + k₄x`.
    pub fn schlogl(k: [f64; 4]) -> Self {
        Self::new(
            format!("schlogl({},{},{},{})", k[0], k[1], k[2], k[3]),
            move |x| {
                let x = x as f64;
                k[0] * x * (x - 1.0) + k[2]
            },
            move |x| {
                let x = x as f64;
                k[1] * x * (x - 1.0) * (x - 2.0) + k[3] * x
            },
        )
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn birth(&self, x: u32) -> f64 {
        (self.birth)(x)
    }

    pub fn death(&self, x: u32) -> f64 {
        (self.death)(x)
    }

    /// `a₊(x) / a₋(x+1)`, the ratio `γ(x+1)/γ(x)`.
    fn ratio(&self, x: u32) -> Result<f64, BirthDeathError> {
        let b = self.birth(x);
        let d = self.death(x + 1);
        if !(b >= 0.0 && b.is_finite()) {
            return Err(BirthDeathError::BadRate { state: x });
        }
        if !(d.is_finite() && d >= 0.0) {
            return Err(BirthDeathError::BadRate { state: x + 1 });
        }
        if d == 0.0 {
            return Err(BirthDeathError::ZeroDeathRate { state: x + 1 });
        }
        Ok(b / d)
    }
}

/// `log γ(x)` for `x = 0..len` together with the probabilities normalized
/// over that range.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaProfile {
    pub log_gamma: Vec<f64>,
    pub normalized: Vec<f64>,
}

impl GammaProfile {
    /// `log Σ γ` over the profile's range.
    pub fn log_sum(&self) -> f64 {
        log_sum_exp(&self.log_gamma)
    }

    /// Index of the largest `γ`.
    pub fn mode(&self) -> usize {
        argmax(&self.log_gamma)
    }
}

fn argmax(v: &[f64]) -> usize {
    v.iter().enumerate().fold((0, f64::NEG_INFINITY), |(bi, bv), (i, &x)| if x > bv { (i, x) } else { (bi, bv) }).0
}

pub(crate) fn log_sum_exp(v: &[f64]) -> f64 {
    let mx = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if mx == f64::NEG_INFINITY {
        return mx;
    }
    mx + v.iter().map(|&x| (x - mx).exp()).sum::<f64>().ln()
}

fn normalize(log_gamma: &[f64]) -> Vec<f64> {
    let ls = log_sum_exp(log_gamma);
    log_gamma.iter().map(|&l| (l - ls).exp()).collect()
}

/// `γ(0) = 1`, `γ(x) = ∏_{z=1}^{x} a₊(z−1)/a₋(z)`, accumulated in log space.
/// A zero birth rate makes every later `γ` zero (`log γ = −∞`).
pub fn gamma_profile(m: &BirthDeathModel, len: usize) -> Result<GammaProfile, BirthDeathError> {
    let mut log_gamma = Vec::with_capacity(len);
    let mut lg = 0.0f64;
    for x in 0..len {
        if x > 0 {
            let q = m.ratio(x as u32 - 1)?;
            lg += q.ln();
        }
        log_gamma.push(lg);
    }
    let normalized = normalize(&log_gamma);
    Ok(GammaProfile { log_gamma, normalized })
}

/// The stationary distribution on `0..pi.len()`, with a certified bound on
/// the neglected tail mass.
#[derive(Debug, Clone, PartialEq)]
pub struct StationaryDistribution {
    pub pi: Vec<f64>,
    pub log_gamma: Vec<f64>,
    /// `log Σ_{x ≥ 0} γ(x)`, the tail majorant included.
    pub log_normalizer: f64,
    /// Upper bound on `Σ_{x ≥ len} π(x)`.
    pub tail: f64,
}

impl StationaryDistribution {
    pub fn get(&self, x: usize) -> f64 {
        self.pi.get(x).copied().unwrap_or(0.0)
    }

    pub fn mean(&self) -> f64 {
        self.moment(1)
    }

    pub fn moment(&self, k: i32) -> f64 {
        self.pi.iter().enumerate().map(|(x, p)| p * (x as f64).powi(k)).sum()
    }

    /// `Σ_{x ≥ from} π(x)` on the stored range plus the certified tail.
    pub fn mass_from(&self, from: usize) -> f64 {
        self.pi.iter().skip(from).sum::<f64>() + self.tail
    }
}

const MAX_STATES: u32 = 1 << 24;

/// `π(x) = γ(x)/Σγ`. The range is doubled until the ratio `ρ(x) = γ(x+1)/γ(x)`
/// is below one and non-increasing over a look-ahead window past the cut,
/// after which `Σ_{x > N} γ(x) ≤ γ(N) ρ(N)/(1 − ρ(N))` bounds the tail.
pub fn analytic_pi(m: &BirthDeathModel, tail_tol: f64) -> Result<StationaryDistribution, BirthDeathError> {
    let mut log_gamma = vec![0.0f64];
    let mut n: u32 = 64;
    loop {
        while (log_gamma.len() as u32) < n {
            let x = log_gamma.len() as u32 - 1;
            let q = m.ratio(x)?;
            log_gamma.push(log_gamma[x as usize] + q.ln());
        }
        let last = n - 1;
        let ls = log_sum_exp(&log_gamma);
        if log_gamma[last as usize] == f64::NEG_INFINITY {
            // Finite support: the chain cannot climb past the last state.
            let pi = normalize(&log_gamma);
            return Ok(StationaryDistribution { pi, log_gamma, log_normalizer: ls, tail: 0.0 });
        }
        if let Some(log_tail) = geometric_tail(m, last, log_gamma[last as usize])? {
            let total = log_sum_exp(&[ls, log_tail]);
            let tail = (log_tail - total).exp();
            if tail < tail_tol {
                let pi = log_gamma.iter().map(|&l| (l - total).exp()).collect();
                return Ok(StationaryDistribution { pi, log_gamma, log_normalizer: total, tail });
            }
        }
        if n >= MAX_STATES {
            return Err(BirthDeathError::NotSummable { reached: n });
        }
        n *= 2;
    }
}

/// `log(γ(N) ρ(N)/(1−ρ(N)))` if the ratio is below one and non-increasing
/// on `[N, 2N]`.
fn geometric_tail(m: &BirthDeathModel, last: u32, log_gamma_last: f64) -> Result<Option<f64>, BirthDeathError> {
    let rho = m.ratio(last)?;
    if rho == 0.0 {
        return Ok(Some(f64::NEG_INFINITY));
    }
    if rho >= 1.0 {
        return Ok(None);
    }
    let mut prev = rho;
    let stride = (last / 64).max(1);
    let mut x = last + stride;
    while x <= 2 * last {
        let q = m.ratio(x)?;
        if q > prev * (1.0 + 1e-12) {
            return Ok(None);
        }
        prev = q;
        x += stride;
    }
    Ok(Some(log_gamma_last + rho.ln() - (1.0 - rho).ln()))
}

/// `S_r = {x : x^α < r}` is `0..len` with the returned `len`.
pub fn power_truncation_len(alpha: u32, r: f64) -> usize {
    if r <= 0.0 {
        return 0;
    }
    let a = alpha.max(1) as i32;
    let mut n = r.powf(1.0 / a as f64).ceil().max(0.0) as u64;
    while n > 0 && ((n - 1) as f64).powi(a) >= r {
        n -= 1;
    }
    while (n as f64).powi(a) < r {
        n += 1;
    }
    n as usize
}

/// `u^r_x = γ(x)/Σ_{S_r} γ`, `l^r_x = (1 − ε_r) u^r_x` with `ε_r = c/r`.
#[derive(Debug, Clone, PartialEq)]
pub struct BirthDeathBounds {
    pub alpha: u32,
    pub c: f64,
    pub r: f64,
    pub eps_r: f64,
    pub log_gamma: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl BirthDeathBounds {
    /// `‖π − l^r‖`, which equals `ε_r` (capped at one).
    pub fn lower_error(&self) -> f64 {
        1.0 - self.lower.iter().sum::<f64>()
    }

    /// Bound on `‖π − u^r‖ = m_r`.
    pub fn upper_error_bound(&self) -> f64 {
        self.eps_r.min(1.0)
    }

    pub fn uninformative(&self) -> bool {
        self.eps_r >= 1.0
    }

    pub fn len(&self) -> usize {
        self.upper.len()
    }

    pub fn is_empty(&self) -> bool {
        self.upper.is_empty()
    }

    /// Columns `x, gamma, pi, lower, upper`; `pi` is left empty when no
    /// reference distribution is supplied.
    pub fn to_csv(&self, pi: Option<&StationaryDistribution>) -> String {
        let mut s = String::from("x,gamma,pi,lower,upper\n");
        for x in 0..self.len() {
            let p = pi.map(|d| format!("{:e}", d.get(x))).unwrap_or_default();
            s.push_str(&format!("{},{:e},{},{:e},{:e}\n", x, self.log_gamma[x].exp(), p, self.lower[x], self.upper[x]));
        }
        s
    }

    pub fn header_json(&self, model: &BirthDeathModel) -> Value {
        json!({
            "model": model.label(),
            "alpha": self.alpha,
            "c": self.c,
            "r": self.r,
            "eps_r": self.eps_r,
            "states": self.len(),
            "lower_error": self.lower_error(),
            "upper_error_bound": self.upper_error_bound(),
            "uninformative": self.uninformative(),
        })
    }
}

pub fn bd_bounds(m: &BirthDeathModel, alpha: u32, c: f64, r: f64) -> Result<BirthDeathBounds, BirthDeathError> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(BirthDeathError::Invalid(format!("tail constant must be positive, got {c}")));
    }
    let len = power_truncation_len(alpha, r);
    if len == 0 {
        return Err(BirthDeathError::EmptyTruncation { r });
    }
    let prof = gamma_profile(m, len)?;
    let eps_r = c / r;
    let keep = (1.0 - eps_r).max(0.0);
    let upper = prof.normalized.clone();
    let lower = upper.iter().map(|u| u * keep).collect();
    Ok(BirthDeathBounds { alpha, c, r, eps_r, log_gamma: prof.log_gamma, lower, upper })
}

/// Largest `|a₊(x)π(x) − a₋(x+1)π(x+1)|` over the stored range.
pub fn detailed_balance_residual(m: &BirthDeathModel, d: &StationaryDistribution) -> f64 {
    (0..d.pi.len().saturating_sub(1)).map(|x| (m.birth(x as u32) * d.pi[x] - m.death(x as u32 + 1) * d.pi[x + 1]).abs()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn poisson_profile() {
        let m = BirthDeathModel::mm_inf(4.0, 1.0);
        let p = gamma_profile(&m, 60).unwrap();
        assert_eq!(p.log_gamma[0], 0.0);
        let mut fact = 1.0f64;
        for x in 0..20usize {
            if x > 0 {
                fact *= x as f64;
            }
            let want = (-4.0f64).exp() * 4f64.powi(x as i32) / fact;
            assert!((p.normalized[x] - want).abs() < 1e-14, "x={x}");
        }
        let d = analytic_pi(&m, 1e-14).unwrap();
        assert!((d.pi[0] - (-4.0f64).exp()).abs() < 1e-15);
        assert!(d.tail < 1e-14);
        assert!((d.mean() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn pure_birth_is_rejected() {
        let m = BirthDeathModel::new("birth", |_| 1.0, |_| 0.0);
        assert_eq!(analytic_pi(&m, 1e-12).unwrap_err(), BirthDeathError::ZeroDeathRate { state: 1 });
        let grows = BirthDeathModel::new("grow", |x| 2.0 * (x + 1) as f64, |x| x as f64);
        assert!(matches!(analytic_pi(&grows, 1e-12), Err(BirthDeathError::NotSummable { .. })));
    }

    #[test]
    fn finite_support() {
        // Births stop at x = 3.
        let m = BirthDeathModel::new("cap", |x| if x < 3 { 1.0 } else { 0.0 }, |x| x as f64);
        let d = analytic_pi(&m, 1e-12).unwrap();
        assert_eq!(d.tail, 0.0);
        let z = 1.0 + 1.0 + 0.5 + 1.0 / 6.0;
        assert!((d.pi[3] - 1.0 / 6.0 / z).abs() < 1e-15);
        assert_eq!(d.get(4), 0.0);
    }

    #[test]
    fn truncation_lengths() {
        assert_eq!(power_truncation_len(1, 10.0), 10);
        assert_eq!(power_truncation_len(1, 10.5), 11);
        assert_eq!(power_truncation_len(2, 16.0), 4);
        assert_eq!(power_truncation_len(2, 17.0), 5);
        assert_eq!(power_truncation_len(3, 1.0), 1);
        assert_eq!(power_truncation_len(3, 0.5), 1);
        assert_eq!(power_truncation_len(1, 0.0), 0);
    }

    #[test]
    fn bounds_at_eps_one() {
        let m = BirthDeathModel::mm_inf(4.0, 1.0);
        let b = bd_bounds(&m, 1, 8.0, 8.0).unwrap();
        assert!(b.uninformative());
        assert!(b.lower.iter().all(|&l| l == 0.0));
        assert!((b.lower_error() - 1.0).abs() < 1e-15);
        assert!(matches!(bd_bounds(&m, 1, 4.0, 0.0), Err(BirthDeathError::EmptyTruncation { .. })));
    }

    #[test]
    fn schlogl_series_agree() {
        let k = [6.0, 1.0 / 3.0, 50.0, 3.0];
        let d = analytic_pi(&BirthDeathModel::schlogl(k), 1e-15).unwrap();
        let f = schlogl_normalizer_2f2(k).unwrap();
        assert!(((f - d.log_normalizer.exp()) / f).abs() < 1e-10);
    }
}
