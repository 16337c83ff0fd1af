use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

/// Certified bounds on stationary moments and distributions of chemical
/// master equations.
///
/// Exit codes: 0 success, 2 configuration error, 3 solver failure,
/// 4 invalid model.
#[derive(Debug, Parser, Serialize)]
#[command(name = "cmebound", version, args_override_self = true)]
pub struct Cli {
    /// File of `key = value` lines; keys are long flag names of the
    /// subcommand. Command-line flags and tolerance environment variables
    /// take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, short, global = true, default_value = "out")]
    pub out: PathBuf,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub cmd: Command,
}

#[derive(Debug, Subcommand, Serialize)]
pub enum Command {
    /// Moment bounds from the SDP hierarchy over a range of orders.
    Moments(MomentsArgs),
    /// Per-state bounds on the stationary distribution with certificates.
    Dist(DistArgs),
    /// Bounds on a marginal distribution.
    Marginal(MarginalArgs),
    /// Gillespie simulation and occupation histograms.
    Simulate(SimulateArgs),
    /// Foster-Lyapunov drift diagnostics.
    Drift(DriftArgs),
    /// Writes the network, SDPA and MPS files without solving.
    Export(ExportArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Moments(_) => "moments",
            Command::Dist(_) => "dist",
            Command::Marginal(_) => "marginal",
            Command::Simulate(_) => "simulate",
            Command::Drift(_) => "drift",
            Command::Export(_) => "export",
        }
    }

    pub fn model(&self) -> &ModelArgs {
        match self {
            Command::Moments(a) => &a.model,
            Command::Dist(a) => &a.model,
            Command::Marginal(a) => &a.model,
            Command::Simulate(a) => &a.model,
            Command::Drift(a) => &a.model,
            Command::Export(a) => &a.model,
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ModelArgs {
    /// Network file in the reaction DSL.
    #[arg(long)]
    pub network: PathBuf,
    /// Parameter override `name=value`; repeatable.
    #[arg(long = "param", value_name = "NAME=VALUE")]
    pub params: Vec<String>,
    /// Parameter sweep `name=v1,v2,...`: one run per value under
    /// `<out>/sweep/`.
    #[arg(long)]
    pub sweep: Option<String>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct TolArgs {
    /// SDP feasibility tolerance.
    #[arg(long, env = "CMEBOUND_FEAS_TOL")]
    pub feas_tol: Option<f64>,
    /// SDP relative duality gap tolerance.
    #[arg(long, env = "CMEBOUND_GAP_TOL")]
    pub gap_tol: Option<f64>,
    /// Simplex reduced-cost tolerance.
    #[arg(long, env = "CMEBOUND_OPT_TOL")]
    pub opt_tol: Option<f64>,
    /// Iteration cap for either solver.
    #[arg(long, env = "CMEBOUND_MAX_ITER")]
    pub max_iter: Option<usize>,
    /// LP feasibility tolerance.
    #[arg(long, env = "CMEBOUND_LP_FEAS_TOL")]
    pub lp_feas_tol: Option<f64>,
    /// Conservative relative widening of SDP bounds.
    #[arg(long, env = "CMEBOUND_SDP_SLACK")]
    pub sdp_slack: Option<f64>,
    /// Lower bounds above this certify uniqueness.
    #[arg(long, env = "CMEBOUND_TOL_POS")]
    pub tol_pos: Option<f64>,
    /// Tolerance for monotonicity warnings in the moment hierarchy.
    #[arg(long, env = "CMEBOUND_MONO_TOL")]
    pub mono_tol: Option<f64>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct MomentsArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub tol: TolArgs,
    /// Comma separated polynomial targets, e.g. `X, X^2, X^3`. Default: the
    /// first moment of every species.
    #[arg(long)]
    pub targets: Option<String>,
    /// Orders: `4..10`, `4..10:2` or `4,6,8`.
    #[arg(long, short = 'd')]
    pub orders: String,
    /// Write one SDPA file per SDP to `exports/` and solve nothing.
    #[arg(long)]
    pub export_sdpa: bool,
    /// Moment scaling: `auto`, `none`, or comma separated values.
    #[arg(long, default_value = "auto")]
    pub scaling: String,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct BoundArgs {
    /// Weight `w`, a polynomial such as `(A + 2*B)^6`. Default: the sum of
    /// all species.
    #[arg(long)]
    pub w: Option<String>,
    /// Tail constant source: `user:VALUE` or `sdp:D[:F]` (the order-D SDP
    /// upper bound on `<F>`, F defaulting to w).
    #[arg(long)]
    pub c: String,
    /// Strictly increasing comma separated truncation levels; expressions
    /// such as `46^6` are allowed.
    #[arg(long, short = 'r')]
    pub r: String,
    /// LP engine: auto, rays or simplex.
    #[arg(long, default_value = "auto")]
    pub lp_method: String,
    /// Refuse truncations with more states than this.
    #[arg(long)]
    pub state_cap: Option<usize>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DistArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub tol: TolArgs,
    #[command(flatten)]
    pub bound: BoundArgs,
    /// Use the LP even for birth-death chains.
    #[arg(long)]
    pub lp: bool,
    /// Also write an optimal point of `max pi(x)` for this state, e.g. `3,0`.
    #[arg(long)]
    pub candidate: Option<String>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct MarginalArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub tol: TolArgs,
    #[command(flatten)]
    pub bound: BoundArgs,
    /// Species (name or 1-based index) whose marginal is bounded.
    #[arg(long)]
    pub axis: String,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Initial state, e.g. `0,0`. Default: the origin.
    #[arg(long)]
    pub x0: Option<String>,
    /// Simulated time horizon
    #[arg(long)]
    pub t_end: f64,
    /// Fraction of the run discarded before averaging.
    #[arg(long, default_value_t = cmebound::ssa::DEFAULT_BURN_IN)]
    pub burn_in: f64,
    /// Base seed; replica `i` uses stream `i` of this seed
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Events per trajectory before the run is abandoned
    #[arg(long, default_value_t = cmebound::ssa::DEFAULT_MAX_EVENTS)]
    pub max_events: u64,
    /// Independent trajectories, one PRNG stream each.
    #[arg(long, default_value_t = 1)]
    pub replicas: u64,
    /// Histogram over one species instead of full states.
    #[arg(long)]
    pub axis: Option<String>,
    /// Also write the binary jump log of stream 0.
    #[arg(long)]
    pub log: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DriftArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Lyapunov candidate `w`.
    #[arg(long)]
    pub w: String,
    /// Drift rate `K2`; an exact expression such as `3/2`.
    #[arg(long)]
    pub k2: String,
    /// Box `{0..=radius}^n` on which `K1` is maximized.
    #[arg(long)]
    pub radius: Option<u32>,
    /// Truncation level whose extent sets the default radius.
    #[arg(long, short = 'r')]
    pub r: Option<String>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ExportArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Orders of the moment SDPs to export.
    #[arg(long, short = 'd')]
    pub orders: Option<String>,
    /// Targets for the SDP export, as for `moments`.
    #[arg(long)]
    pub targets: Option<String>,
    /// Weight for the truncation LP export.
    #[arg(long)]
    pub w: Option<String>,
    /// Tail constant (a number) for the truncation LP export.
    #[arg(long)]
    pub c: Option<String>,
    /// Truncation levels for the LP export.
    #[arg(long, short = 'r')]
    pub r: Option<String>,
}
