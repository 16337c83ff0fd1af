/// Solver tolerances. All values are relative to the (row-normalized) problem
/// data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Primal and dual feasibility.
    pub feas: f64,
    /// Relative duality gap (SDP).
    pub gap: f64,
    /// Reduced-cost optimality (simplex).
    pub opt: f64,
    /// Smallest admissible simplex pivot magnitude.
    pub pivot: f64,
    /// Iteration cap for the simplex (per objective) and the IPM.
    pub max_iter: usize,
    /// Largest PSD block dimension accepted by the dense IPM.
    pub dense_limit: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { feas: 1e-8, gap: 1e-7, opt: 1e-9, pivot: 1e-9, max_iter: 200_000, dense_limit: 40 }
    }
}

impl Tolerances {
    /// Reads `CMEBOUND_FEAS_TOL`, `CMEBOUND_GAP_TOL`, `CMEBOUND_OPT_TOL` and
    /// `CMEBOUND_MAX_ITER` from the environment on top of the defaults.
    pub fn from_env() -> Self {
        let mut tol = Self::default();
        let read = |k: &str| std::env::var(k).ok().and_then(|v| v.trim().parse::<f64>().ok());
        if let Some(v) = read("CMEBOUND_FEAS_TOL") {
            tol.feas = v;
        }
        if let Some(v) = read("CMEBOUND_GAP_TOL") {
            tol.gap = v;
        }
        if let Some(v) = read("CMEBOUND_OPT_TOL") {
            tol.opt = v;
        }
        if let Some(v) = read("CMEBOUND_MAX_ITER") {
            tol.max_iter = v as usize;
        }
        tol
    }
}
