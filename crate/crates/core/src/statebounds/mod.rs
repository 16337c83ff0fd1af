//! Truncation LPs: bounds on stationary averages, full distributions and
//! marginals over `{x : w(x) < r}` with total variation error certificates.

mod bounds;
mod polytope;
mod rays;
mod report;
mod truncation;
mod weight;

pub use bounds::{
    average_on, bound_average, bound_distribution, bound_marginal, distribution_on, ergodic_candidate, ergodic_candidate_on, marginal_on,
    partition_cells, uniqueness_test, AverageBounds, AverageTarget, DistributionBounds, ErgodicCandidate, LpMethod, LpOptions, LpOutcome,
    MarginalBounds, Partition, StateLp, UniquenessVerdict, DEFAULT_TOL_POS,
};
pub use polytope::{build_polytope, scale_decision_variables, PolytopeResiduals, TruncationPolytope, Unscale, VariableScaling};
pub use rays::{BoundaryRays, RaysUnavailable};
pub use report::{certificate, distribution_csv, distribution_header, marginal_csv, marginal_header};
pub use truncation::{build_truncation, Truncation, DEFAULT_STATE_CAP};
pub use weight::{coefficient_sign, LinearPower, WeightSpec};

use crate::model::{ModelError, State};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum StateBoundsError {
    #[error("tail constant must be positive and finite, got {0}")]
    BadTailConstant(f64),
    #[error("weight is not norm-like: {0}")]
    NotNormLike(String),
    #[error("truncation {{w < {r}}} is empty")]
    EmptyTruncation { r: f64 },
    #[error("truncation at r = {r} exceeds the state cap of {cap}")]
    StateCap { cap: usize, r: f64 },
    #[error("no stationary solution satisfies <w> <= c at r = {r}")]
    Infeasible { r: f64 },
    #[error("solver returned {status} ({what})")]
    Solver { status: String, what: String },
    #[error("state {0:?} is outside the truncation")]
    StateOutside(State),
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}
