use super::truncation::Truncation;
use super::weight::WeightSpec;
use super::StateBoundsError;
use crate::model::ReactionNetwork;
use crate::opt::LinearProgram;

/// Substitution applied to the decision variables before solving.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum VariableScaling {
    #[default]
    None,
    /// `π̃(x) = q(x) π(x)`.
    ExitRate,
    /// `π̃(x) = w(x) π(x)`.
    Weight,
}

impl VariableScaling {
    pub fn as_str(self) -> &'static str {
        match self {
            VariableScaling::None => "none",
            VariableScaling::ExitRate => "exit_rate",
            VariableScaling::Weight => "weight",
        }
    }
}

impl std::str::FromStr for VariableScaling {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "none" => Ok(Self::None),
            "exit_rate" | "by_exit_rate" => Ok(Self::ExitRate),
            "weight" | "by_weight" => Ok(Self::Weight),
            _ => Err(format!("unknown scaling `{s}` (none, exit_rate, weight)")),
        }
    }
}

/// The finite system: stationarity rows for every `x ∈ N_r`, the mass
/// window `1 − ε_r ≤ Σ π ≤ 1`, the tail row `Σ w π ≤ c`, and `π ≥ 0` on
/// `S_r` (zero elsewhere).
#[derive(Debug, Clone)]
pub struct TruncationPolytope {
    pub r: f64,
    pub c: f64,
    /// `c / r`.
    pub eps_r: f64,
    /// `max(0, 1 − ε_r)`.
    pub mass_lo: f64,
    /// Rows over the unscaled `π`, one per interior state.
    pub stationarity: Vec<Vec<(usize, f64)>>,
    pub weights: Vec<f64>,
    pub exit_rates: Vec<f64>,
    /// `π̃ = s ⊙ π`.
    pub col_scale: Vec<f64>,
    pub scaling: VariableScaling,
}

/// Maps solver variables back to probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct Unscale {
    pub factors: Vec<f64>,
}

impl Unscale {
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        v.iter().zip(&self.factors).map(|(a, s)| a / s).collect()
    }
}

/// Largest violation of each constraint group at a point `π` over `S_r`.
/// Stationarity residuals are relative to each row's largest coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PolytopeResiduals {
    pub stationarity: f64,
    pub mass: f64,
    pub tail: f64,
    pub negativity: f64,
}

impl PolytopeResiduals {
    pub fn max(&self) -> f64 {
        self.stationarity.max(self.mass).max(self.tail).max(self.negativity)
    }
}

pub fn build_polytope(net: &ReactionNetwork, trunc: &Truncation, w: &WeightSpec) -> Result<TruncationPolytope, StateBoundsError> {
    let c = w.c;
    if !(c > 0.0 && c.is_finite()) {
        return Err(StateBoundsError::BadTailConstant(c));
    }
    let exit_rates: Vec<f64> = trunc.states.iter().map(|x| net.exit_rate_f64(x)).collect();
    let mut stationarity = Vec::with_capacity(trunc.interior_count());
    for k in 0..trunc.len() {
        if !trunc.interior[k] {
            continue;
        }
        let mut row: Vec<(usize, f64)> = Vec::with_capacity(trunc.incoming[k].len() + 1);
        for &(src, j) in &trunc.incoming[k] {
            let y = &trunc.states[src];
            let a = net.propensity_f64(j, y);
            if a != 0.0 {
                row.push((src, a));
            }
        }
        let q = exit_rates[k];
        if q != 0.0 {
            row.push((k, -q));
        }
        if !row.is_empty() {
            stationarity.push(row);
        }
    }
    let weights: Vec<f64> = trunc.states.iter().map(|x| w.eval(x)).collect();
    let eps_r = c / trunc.r;
    Ok(TruncationPolytope {
        r: trunc.r,
        c,
        eps_r,
        mass_lo: (1.0 - eps_r).max(0.0),
        stationarity,
        col_scale: vec![1.0; weights.len()],
        weights,
        exit_rates,
        scaling: VariableScaling::None,
    })
}

/// Rescales the decision variables; a zero `q(x)` or `w(x)` leaves that
/// variable unscaled.
pub fn scale_decision_variables(tp: &TruncationPolytope, mode: VariableScaling) -> (TruncationPolytope, Unscale) {
    let guard = |v: f64| if v > 0.0 && v.is_finite() { v } else { 1.0 };
    let col_scale: Vec<f64> = match mode {
        VariableScaling::None => vec![1.0; tp.weights.len()],
        VariableScaling::ExitRate => tp.exit_rates.iter().map(|&q| guard(q)).collect(),
        VariableScaling::Weight => tp.weights.iter().map(|&w| guard(w)).collect(),
    };
    let mut out = tp.clone();
    out.col_scale = col_scale.clone();
    out.scaling = mode;
    (out, Unscale { factors: col_scale })
}

impl TruncationPolytope {
    pub fn num_vars(&self) -> usize {
        self.weights.len()
    }

    pub fn uninformative(&self) -> bool {
        self.eps_r >= 1.0
    }

    /// The constraint system in the scaled variables, with a zero objective.
    pub fn to_lp(&self) -> LinearProgram<f64> {
        let n = self.num_vars();
        let mut lp = LinearProgram::new();
        let vars = lp.add_nonneg_vars("p", n);
        debug_assert_eq!(vars.start, 0);
        for (k, s) in self.col_scale.iter().enumerate() {
            lp.upper[k] = *s;
        }
        for row in &self.stationarity {
            lp.add_eq(row.iter().map(|&(k, a)| (k, a / self.col_scale[k])).collect(), 0.0);
        }
        let mass: Vec<(usize, f64)> = (0..n).map(|k| (k, 1.0 / self.col_scale[k])).collect();
        lp.add_range(mass, self.mass_lo, 1.0);
        let tail: Vec<(usize, f64)> = (0..n).filter(|&k| self.weights[k] != 0.0).map(|k| (k, self.weights[k] / self.col_scale[k])).collect();
        if !tail.is_empty() {
            lp.add_le(tail, self.c);
        }
        lp
    }

    /// Objective coefficients over `π` translated to the scaled variables.
    pub fn objective(&self, f: &[(usize, f64)]) -> Vec<(usize, f64)> {
        f.iter().map(|&(k, v)| (k, v / self.col_scale[k])).collect()
    }

    pub fn unscale(&self, v: &[f64]) -> Vec<f64> {
        v.iter().zip(&self.col_scale).map(|(a, s)| a / s).collect()
    }

    /// Residuals of a point `π` given over `S_r`.
    pub fn check_point(&self, pi: &[f64]) -> PolytopeResiduals {
        let mut res = PolytopeResiduals::default();
        for row in &self.stationarity {
            let mx = row.iter().fold(0.0f64, |a, e| a.max(e.1.abs()));
            let v: f64 = row.iter().map(|&(k, a)| a * pi[k]).sum();
            if mx > 0.0 {
                res.stationarity = res.stationarity.max(v.abs() / mx);
            }
        }
        let mass: f64 = pi.iter().sum();
        res.mass = (self.mass_lo - mass).max(mass - 1.0).max(0.0);
        let tail: f64 = pi.iter().zip(&self.weights).map(|(p, w)| p * w).sum();
        res.tail = ((tail - self.c) / self.c).max(0.0);
        res.negativity = pi.iter().fold(0.0f64, |a, &p| a.max(-p));
        res
    }
}
