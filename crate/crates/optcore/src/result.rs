use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
    NumericalFailure,
}

impl SolveStatus {
    pub fn is_optimal(self) -> bool {
        self == SolveStatus::Optimal
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SolveStatus::Optimal => "optimal",
            SolveStatus::Infeasible => "infeasible",
            SolveStatus::Unbounded => "unbounded",
            SolveStatus::IterationLimit => "iteration_limit",
            SolveStatus::NumericalFailure => "numerical_failure",
        }
    }
}

impl fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Feasibility and optimality residuals attached to every result.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Residuals {
    pub primal_feas: f64,
    pub dual_feas: f64,
    /// Relative duality gap for SDPs, largest reduced-cost violation for LPs.
    pub gap: f64,
}

#[derive(Debug, Clone)]
pub struct SolveResult<T> {
    pub status: SolveStatus,
    /// Objective at the returned primal point.
    pub value: T,
    /// Objective of the dual certificate. For a maximization this is an upper
    /// estimate of the optimum, for a minimization a lower one.
    pub dual_value: T,
    pub primal: Vec<T>,
    /// Multipliers: equalities first, then inequalities (LP) or equalities
    /// only (SDP). Empty when not computed.
    pub dual: Vec<T>,
    /// Dual PSD matrices per block (SDP only), dense row-major.
    pub dual_blocks: Vec<Vec<T>>,
    /// Improving ray (unbounded) or Farkas multipliers (infeasible).
    pub certificate: Option<Vec<T>>,
    pub residuals: Residuals,
    pub iterations: usize,
}

impl<T: crate::Real> SolveResult<T> {
    pub(crate) fn failed(status: SolveStatus, n: usize, iterations: usize) -> Self {
        Self {
            status,
            value: T::nan(),
            dual_value: T::nan(),
            primal: vec![T::nan(); n],
            dual: Vec::new(),
            dual_blocks: Vec::new(),
            certificate: None,
            residuals: Residuals::default(),
            iterations,
        }
    }

    /// The conservative optimal value: the dual objective when it is finite,
    /// the primal objective otherwise.
    pub fn certified_value(&self) -> T {
        if self.dual_value.is_finite() {
            self.dual_value
        } else {
            self.value
        }
    }
}
