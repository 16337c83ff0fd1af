//! Stationary moment bounds from semidefinite outer approximations of the
//! moment equations.

mod analytic;
mod bounds;
mod report;
mod spectrahedron;
mod stats;

pub use analytic::{analytic_schlogl_e3, rightmost_cubic_root, schlogl_coefficients, SchloglE3};
pub use bounds::{bound_moment, bound_power_moment, monotonicity_violations, MomentBound, MomentBounder, MomentOptions, MomentScaling, Target};
pub use report::{hierarchy_csv, hierarchy_json};
pub use spectrahedron::{build_spectrahedron, min_order, Spectrahedron};
pub use stats::{stats_from_intervals, stats_intervals, Interval, StatsIntervals};

use crate::polyalg::PolyError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MomentError {
    #[error("order d = {d} is too small; need at least {needed}")]
    OrderTooSmall { d: u32, needed: u32 },
    #[error("target of degree {degree} does not fit order {d}")]
    TargetDegree { degree: u32, d: u32 },
    #[error("unsupported parameter branch: {0}")]
    UnsupportedBranch(String),
    #[error("moment scaling must be positive and finite, one entry per species")]
    BadScaling,
    #[error(transparent)]
    Poly(#[from] PolyError),
}
