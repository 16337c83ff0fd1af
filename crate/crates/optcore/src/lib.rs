//! Solver-agnostic optimization core.
//!
//! Standard-form containers for linear programs ([`LinearProgram`]) and
//! linear-matrix-inequality programs ([`ConicProgram`]), an embedded
//! bounded-variable primal simplex ([`solve_lp`], [`SimplexSession`]), an
//! embedded dense primal-dual interior point SDP solver ([`solve_sdp`]),
//! exporters for the SDPA sparse and fixed MPS formats, and diagonal scaling.
//!
//! Everything numeric is generic over [`Real`] (`f32` or `f64`); the `*64`
//! aliases at the crate root are what the rest of the workspace uses.

pub mod conic;
pub mod ipm;
pub mod linalg;
pub mod lp;
pub mod mps;
pub mod result;
pub mod scaling;
pub mod sdpa;
pub mod simplex;
pub mod tolerance;

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;
use std::ops::{AddAssign, DivAssign, MulAssign, SubAssign};
use std::str::FromStr;

use num_traits::{Float, FromPrimitive, ToPrimitive};

pub use conic::{ConicProgram, PsdBlock, SymEntries};
pub use ipm::solve_sdp;
pub use lp::{LinearProgram, Sense};
pub use result::{Residuals, SolveResult, SolveStatus};
pub use scaling::{scale_conic, ConicScaling, ConicUnscale};
pub use simplex::{solve_lp, SimplexSession};
pub use tolerance::Tolerances;

/// Floating point scalar the solvers are written against.
pub trait Real:
    Float
    + FromPrimitive
    + ToPrimitive
    + Debug
    + Display
    + LowerExp
    + Default
    + Send
    + Sync
    + Sum
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + FromStr
    + 'static
{
    /// Lossy conversion from an `f64` constant.
    fn c(v: f64) -> Self {
        Self::from_f64(v).expect("f64 constant representable")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

pub type LinearProgram64 = LinearProgram<f64>;
pub type ConicProgram64 = ConicProgram<f64>;
pub type SolveResult64 = SolveResult<f64>;
pub type SimplexSession64 = SimplexSession<f64>;

#[derive(Debug, thiserror::Error)]
pub enum OptError {
    #[error("malformed program: {0}")]
    Malformed(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
