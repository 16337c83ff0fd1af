use std::collections::BTreeMap;
use std::sync::Arc;

use rayon::prelude::*;

use super::polytope::{build_polytope, scale_decision_variables, TruncationPolytope, VariableScaling};
use super::rays::BoundaryRays;
use super::truncation::{build_truncation, Truncation, DEFAULT_STATE_CAP};
use super::weight::{coefficient_sign, WeightSpec};
use super::StateBoundsError;
use crate::model::{ReactionNetwork, State};
use crate::opt::{LinearProgram, Sense, SimplexSession, SolveStatus, Tolerances};
use crate::Poly;

/// How the truncation LPs are solved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LpMethod {
    /// Boundary rays when they apply, the simplex otherwise.
    #[default]
    Auto,
    Rays,
    Simplex,
}

impl LpMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            LpMethod::Auto => "auto",
            LpMethod::Rays => "rays",
            LpMethod::Simplex => "simplex",
        }
    }
}

impl std::str::FromStr for LpMethod {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "auto" => Ok(Self::Auto),
            "rays" => Ok(Self::Rays),
            "simplex" => Ok(Self::Simplex),
            _ => Err(format!("unknown LP method `{s}` (auto, rays, simplex)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpOptions {
    pub tol: Tolerances,
    pub method: LpMethod,
    /// Scaling tried first by the simplex.
    pub scaling: VariableScaling,
    pub state_cap: usize,
    /// Number of independent warm-start chains per objective sense. `None`
    /// uses the size of the worker pool.
    pub chains: Option<usize>,
}

impl Default for LpOptions {
    fn default() -> Self {
        Self {
            tol: Tolerances { feas: 1e-10, ..Tolerances::default() },
            method: LpMethod::Auto,
            scaling: VariableScaling::ExitRate,
            state_cap: DEFAULT_STATE_CAP,
            chains: None,
        }
    }
}

/// Outcome of one objective.
#[derive(Debug, Clone, PartialEq)]
pub struct LpOutcome {
    pub value: f64,
    pub status: SolveStatus,
    pub iterations: usize,
}

enum Engine {
    Rays(BoundaryRays),
    Simplex(SimplexSession<f64>),
}

/// Truncation, polytope and a solver state shared by every objective posed
/// over `P^r_{w,c}`: either the boundary rays or a phase-one simplex basis.
pub struct StateLp {
    pub truncation: Truncation,
    pub polytope: TruncationPolytope,
    engine: Engine,
    opts: LpOptions,
}

impl StateLp {
    pub fn new(net: &ReactionNetwork, w: &WeightSpec, r: f64, opts: &LpOptions) -> Result<Self, StateBoundsError> {
        let truncation = build_truncation(net, w, r, opts.state_cap)?;
        Self::from_truncation(net, truncation, w, opts)
    }

    pub fn from_truncation(net: &ReactionNetwork, truncation: Truncation, w: &WeightSpec, opts: &LpOptions) -> Result<Self, StateBoundsError> {
        let raw = build_polytope(net, &truncation, w)?;
        if opts.method != LpMethod::Simplex {
            match BoundaryRays::new(net, &truncation, &raw) {
                Ok(rays) => {
                    if !rays.is_feasible() {
                        return Err(StateBoundsError::Infeasible { r: truncation.r });
                    }
                    return Ok(Self { truncation, polytope: raw, engine: Engine::Rays(rays), opts: opts.clone() });
                }
                Err(why) if opts.method == LpMethod::Rays => {
                    return Err(StateBoundsError::Invalid(format!("boundary rays unavailable: {why:?}")));
                }
                Err(_) => {}
            }
        }
        Self::simplex(truncation, raw, opts)
    }

    /// Phase one is attempted with the requested scaling first and then
    /// with the others: a badly scaled basis can make the simplex report
    /// infeasibility for a feasible polytope, so infeasibility is only
    /// reported when every scaling agrees.
    fn simplex(truncation: Truncation, raw: TruncationPolytope, opts: &LpOptions) -> Result<Self, StateBoundsError> {
        let mut order = vec![opts.scaling];
        for s in [VariableScaling::ExitRate, VariableScaling::Weight, VariableScaling::None] {
            if !order.contains(&s) {
                order.push(s);
            }
        }
        let mut all_infeasible = true;
        let mut last = SolveStatus::Infeasible;
        for mode in order {
            let (polytope, _) = scale_decision_variables(&raw, mode);
            let session = SimplexSession::new(&polytope.to_lp(), &opts.tol);
            match session.feasibility() {
                SolveStatus::Optimal => {
                    return Ok(Self { truncation, polytope, engine: Engine::Simplex(session), opts: opts.clone() });
                }
                SolveStatus::Infeasible => {}
                s => {
                    all_infeasible = false;
                    last = s;
                }
            }
        }
        if all_infeasible {
            Err(StateBoundsError::Infeasible { r: truncation.r })
        } else {
            Err(StateBoundsError::Solver { status: last.as_str().into(), what: "phase one".into() })
        }
    }

    /// The LP in the solver variables, for export.
    pub fn lp(&self) -> LinearProgram<f64> {
        self.polytope.to_lp()
    }

    /// `"rays"` or `"simplex"`.
    pub fn method(&self) -> &'static str {
        match self.engine {
            Engine::Rays(_) => "rays",
            Engine::Simplex(_) => "simplex",
        }
    }

    pub fn scaling(&self) -> VariableScaling {
        self.polytope.scaling
    }

    pub fn rays(&self) -> Option<&BoundaryRays> {
        match &self.engine {
            Engine::Rays(r) => Some(r),
            Engine::Simplex(_) => None,
        }
    }

    pub fn len(&self) -> usize {
        self.truncation.len()
    }

    pub fn is_empty(&self) -> bool {
        self.truncation.is_empty()
    }

    fn chains(&self, tasks: usize) -> usize {
        self.opts.chains.unwrap_or_else(rayon::current_num_threads).clamp(1, tasks.max(1))
    }

    /// Solves every objective (given over `π`) with the given sense. For the
    /// simplex the list is cut into contiguous chains; each chain
    /// warm-starts from a private copy of the phase-one basis, so results
    /// depend only on the chain count, not on scheduling.
    pub fn solve_all(&self, objectives: &[Vec<(usize, f64)>], sense: Sense) -> Vec<LpOutcome> {
        match &self.engine {
            Engine::Rays(rays) => objectives
                .par_iter()
                .map(|f| {
                    let phi = rays.project(f);
                    let res = match sense {
                        Sense::Minimize => rays.minimize(&phi),
                        Sense::Maximize => rays.maximize(&phi),
                    };
                    match res {
                        Some((value, _)) => LpOutcome { value, status: SolveStatus::Optimal, iterations: 0 },
                        None => LpOutcome { value: f64::NAN, status: SolveStatus::Infeasible, iterations: 0 },
                    }
                })
                .collect(),
            Engine::Simplex(session) => {
                let chains = self.chains(objectives.len());
                let per = objectives.len().div_ceil(chains).max(1);
                objectives
                    .par_chunks(per)
                    .flat_map_iter(|chunk| {
                        let mut s = session.clone();
                        chunk
                            .iter()
                            .map(|f| {
                                let res = s.optimize(&self.polytope.objective(f), sense);
                                LpOutcome { value: res.value, status: res.status, iterations: res.iterations }
                            })
                            .collect::<Vec<_>>()
                    })
                    .collect()
            }
        }
    }

    /// Both senses for every objective: `(lower, upper)` outcome lists.
    pub fn solve_both(&self, objectives: &[Vec<(usize, f64)>]) -> (Vec<LpOutcome>, Vec<LpOutcome>) {
        rayon::join(|| self.solve_all(objectives, Sense::Minimize), || self.solve_all(objectives, Sense::Maximize))
    }

    /// An optimal point of one objective, returned over `S_r` as
    /// probabilities.
    pub fn optimal_point(&self, f: &[(usize, f64)], sense: Sense) -> Result<(f64, Vec<f64>), StateBoundsError> {
        match &self.engine {
            Engine::Rays(rays) => {
                let phi = rays.project(f);
                let res = match sense {
                    Sense::Minimize => rays.minimize(&phi),
                    Sense::Maximize => rays.maximize(&phi),
                };
                let (v, mu) = res.ok_or(StateBoundsError::Infeasible { r: self.truncation.r })?;
                Ok((v, rays.point(&mu)))
            }
            Engine::Simplex(session) => {
                let mut s = session.clone();
                let res = s.optimize(&self.polytope.objective(f), sense);
                if !res.status.is_optimal() {
                    return Err(StateBoundsError::Solver { status: res.status.as_str().into(), what: "optimal point".into() });
                }
                Ok((res.value, self.polytope.unscale(&res.primal)))
            }
        }
    }
}

/// `(l^r_f, u^r_f)` and the interval for the full average.
#[derive(Debug, Clone, PartialEq)]
pub struct AverageBounds {
    pub r: f64,
    pub c: f64,
    pub eps_r: f64,
    /// Bounds on `Σ_{x ∈ S_r} f(x) π(x)`.
    pub lower: f64,
    pub upper: f64,
    pub status_lo: SolveStatus,
    pub status_hi: SolveStatus,
    /// Bound on `sup_{x ∉ S_r} |f(x)|/w(x)` when one is available.
    pub tail_ratio: Option<f64>,
    /// `+1` when `f ≥ 0` off `S_r` (the lower bound needs no widening),
    /// `−1` when `f ≤ 0` there, `0` otherwise.
    pub tail_sign: i8,
    /// Bounds on `⟨f⟩` itself.
    pub extended: Option<(f64, f64)>,
}

/// A function to average: a polynomial (with automatic tail analysis) or
/// arbitrary values with an optional user bound on the tail ratio.
pub enum AverageTarget<'a> {
    Poly(&'a Poly),
    Values { f: &'a (dyn Fn(&[u32]) -> f64 + Sync), tail_ratio: Option<f64>, tail_sign: i8 },
}

pub fn bound_average(
    net: &ReactionNetwork,
    w: &WeightSpec,
    r: f64,
    target: AverageTarget<'_>,
    opts: &LpOptions,
) -> Result<AverageBounds, StateBoundsError> {
    let lp = StateLp::new(net, w, r, opts)?;
    average_on(&lp, w, target)
}

pub fn average_on(lp: &StateLp, w: &WeightSpec, target: AverageTarget<'_>) -> Result<AverageBounds, StateBoundsError> {
    let states = &lp.truncation.states;
    let (vals, tail_ratio, tail_sign): (Vec<f64>, Option<f64>, i8) = match &target {
        AverageTarget::Poly(p) => {
            let cp = crate::polyalg::CompiledPoly::new(*p, |q| num_traits::ToPrimitive::to_f64(q).unwrap_or(f64::NAN));
            (states.iter().map(|x| cp.eval(x)).collect(), w.tail_ratio_bound(p, lp.truncation.r), coefficient_sign(p))
        }
        AverageTarget::Values { f, tail_ratio, tail_sign } => (states.iter().map(|x| f(x)).collect(), *tail_ratio, *tail_sign),
    };
    let obj: Vec<(usize, f64)> = vals.iter().enumerate().filter(|(_, v)| **v != 0.0).map(|(k, v)| (k, *v)).collect();
    let (lo, hi) = lp.solve_both(&[obj]);
    let (lo, hi) = (&lo[0], &hi[0]);
    let c = lp.polytope.c;
    let lower = if lo.status.is_optimal() { lo.value } else { f64::NEG_INFINITY };
    let upper = if hi.status.is_optimal() { hi.value } else { f64::INFINITY };
    let extended = tail_ratio.map(|s| {
        let widen = c * s;
        let l = if tail_sign > 0 { lower } else { lower - widen };
        let u = if tail_sign < 0 { upper } else { upper + widen };
        (l, u)
    });
    Ok(AverageBounds {
        r: lp.truncation.r,
        c,
        eps_r: lp.polytope.eps_r,
        lower,
        upper,
        status_lo: lo.status,
        status_hi: hi.status,
        tail_ratio,
        tail_sign,
        extended,
    })
}

/// Per-state bounds `l^r(x) ≤ π(x) ≤ u^r(x)` over `S_r` with their total
/// variation error certificates.
#[derive(Debug, Clone, PartialEq)]
pub struct DistributionBounds {
    pub r: f64,
    pub c: f64,
    pub eps_r: f64,
    pub states: Vec<State>,
    pub interior_count: usize,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub status_lo: Vec<SolveStatus>,
    pub status_hi: Vec<SolveStatus>,
    /// `1 − l^r(S_r)`.
    pub eps_lower: f64,
    /// `max(u^r(S_r) − 1 + c/r, c/r)`.
    pub eps_upper: f64,
    pub iterations: usize,
}

impl DistributionBounds {
    pub fn uninformative(&self) -> bool {
        self.eps_r >= 1.0
    }

    pub fn failures(&self) -> usize {
        self.status_lo.iter().chain(&self.status_hi).filter(|s| !s.is_optimal()).count()
    }

    pub fn lower_mass(&self) -> f64 {
        self.lower.iter().sum()
    }

    pub fn upper_mass(&self) -> f64 {
        self.upper.iter().sum()
    }

    pub fn index_of(&self, x: &[u32]) -> Option<usize> {
        self.states.iter().position(|s| s.as_slice() == x)
    }
}

fn clamp_lower(o: &LpOutcome) -> f64 {
    if o.status.is_optimal() {
        o.value.clamp(0.0, 1.0)
    } else {
        0.0
    }
}

fn clamp_upper(o: &LpOutcome) -> f64 {
    if o.status.is_optimal() {
        o.value.clamp(0.0, 1.0)
    } else {
        1.0
    }
}

fn error_pair(lower_mass: f64, upper_mass: f64, eps_r: f64) -> (f64, f64) {
    let eps_l = (1.0 - lower_mass).clamp(0.0, 1.0);
    let eps_u = (upper_mass - 1.0 + eps_r).max(eps_r);
    (eps_l, eps_u)
}

pub fn bound_distribution(net: &ReactionNetwork, w: &WeightSpec, r: f64, opts: &LpOptions) -> Result<DistributionBounds, StateBoundsError> {
    let lp = StateLp::new(net, w, r, opts)?;
    Ok(distribution_on(&lp))
}

pub fn distribution_on(lp: &StateLp) -> DistributionBounds {
    let n = lp.len();
    let objectives: Vec<Vec<(usize, f64)>> = (0..n).map(|k| vec![(k, 1.0)]).collect();
    let (lo, hi) = lp.solve_both(&objectives);
    let lower: Vec<f64> = lo.iter().map(clamp_lower).collect();
    let upper: Vec<f64> = hi.iter().map(clamp_upper).collect();
    let eps_r = lp.polytope.eps_r;
    let (eps_lower, eps_upper) = error_pair(lower.iter().sum(), upper.iter().sum(), eps_r);
    DistributionBounds {
        r: lp.truncation.r,
        c: lp.polytope.c,
        eps_r,
        states: lp.truncation.states.clone(),
        interior_count: lp.truncation.interior_count(),
        status_lo: lo.iter().map(|o| o.status).collect(),
        status_hi: hi.iter().map(|o| o.status).collect(),
        iterations: lo.iter().chain(&hi).map(|o| o.iterations).sum(),
        lower,
        upper,
        eps_lower,
        eps_upper,
    }
}

/// How states are grouped into marginal cells.
#[derive(Clone)]
pub enum Partition {
    /// Fibers of one coordinate, labelled by its value.
    Axis(usize),
    /// Every state its own cell.
    Identity,
    /// User cells: `assign(x)` gives the cell index into `names`.
    Cells { names: Vec<String>, assign: Arc<dyn Fn(&[u32]) -> Option<usize> + Send + Sync> },
}

impl std::fmt::Debug for Partition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Partition::Axis(k) => write!(f, "Axis({k})"),
            Partition::Identity => write!(f, "Identity"),
            Partition::Cells { names, .. } => write!(f, "Cells({names:?})"),
        }
    }
}

/// Bounds on `π(A_i)` for the cells meeting `S_r`. `upper` bounds the
/// truncated mass only; `π(A_i) ≤ upper_i + c/r` always holds.
#[derive(Debug, Clone, PartialEq)]
pub struct MarginalBounds {
    pub r: f64,
    pub c: f64,
    pub eps_r: f64,
    pub cells: Vec<String>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub status_lo: Vec<SolveStatus>,
    pub status_hi: Vec<SolveStatus>,
    /// `1 − Σ_i l̂^r(i)`.
    pub eps_lower: f64,
    /// `max(Σ_i û^r(i) − 1 + c/r, c/r)`.
    pub eps_upper: f64,
}

impl MarginalBounds {
    pub fn upper_with_tail(&self, i: usize) -> f64 {
        (self.upper[i] + self.eps_r).min(1.0)
    }

    pub fn cell_index(&self, name: &str) -> Option<usize> {
        self.cells.iter().position(|c| c == name)
    }
}

/// Cell membership over `S_r`: `(labels, members per cell)`.
pub fn partition_cells(partition: &Partition, states: &[State]) -> Result<(Vec<String>, Vec<Vec<usize>>), StateBoundsError> {
    match partition {
        Partition::Axis(k) => {
            let n = states.first().map_or(0, |s| s.len());
            if *k >= n {
                return Err(StateBoundsError::Invalid(format!("axis {} out of range for {n} species", k + 1)));
            }
            let mut by: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
            for (i, s) in states.iter().enumerate() {
                by.entry(s[*k]).or_default().push(i);
            }
            Ok((by.keys().map(|v| v.to_string()).collect(), by.into_values().collect()))
        }
        Partition::Identity => Ok((
            states.iter().map(|s| s.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")).collect(),
            (0..states.len()).map(|i| vec![i]).collect(),
        )),
        Partition::Cells { names, assign } => {
            let mut members = vec![Vec::new(); names.len()];
            for (i, s) in states.iter().enumerate() {
                if let Some(c) = assign(s) {
                    members.get_mut(c).ok_or_else(|| StateBoundsError::Invalid(format!("cell index {c} out of range")))?.push(i);
                }
            }
            let keep: Vec<usize> = (0..names.len()).filter(|&c| !members[c].is_empty()).collect();
            Ok((keep.iter().map(|&c| names[c].clone()).collect(), keep.iter().map(|&c| members[c].clone()).collect()))
        }
    }
}

pub fn bound_marginal(
    net: &ReactionNetwork,
    w: &WeightSpec,
    r: f64,
    partition: &Partition,
    opts: &LpOptions,
) -> Result<MarginalBounds, StateBoundsError> {
    let lp = StateLp::new(net, w, r, opts)?;
    marginal_on(&lp, partition)
}

pub fn marginal_on(lp: &StateLp, partition: &Partition) -> Result<MarginalBounds, StateBoundsError> {
    let (cells, members) = partition_cells(partition, &lp.truncation.states)?;
    let objectives: Vec<Vec<(usize, f64)>> = members.iter().map(|m| m.iter().map(|&k| (k, 1.0)).collect()).collect();
    let (lo, hi) = lp.solve_both(&objectives);
    let lower: Vec<f64> = lo.iter().map(clamp_lower).collect();
    let upper: Vec<f64> = hi.iter().map(clamp_upper).collect();
    let eps_r = lp.polytope.eps_r;
    let (eps_lower, eps_upper) = error_pair(lower.iter().sum(), upper.iter().sum(), eps_r);
    Ok(MarginalBounds {
        r: lp.truncation.r,
        c: lp.polytope.c,
        eps_r,
        cells,
        status_lo: lo.iter().map(|o| o.status).collect(),
        status_hi: hi.iter().map(|o| o.status).collect(),
        lower,
        upper,
        eps_lower,
        eps_upper,
    })
}

/// Default positivity threshold for [`uniqueness_test`].
pub const DEFAULT_TOL_POS: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub enum UniquenessVerdict {
    /// Some `l^r(x)` is positive, so every stationary solution with
    /// `⟨w⟩ ≤ c` charges `x`: there is exactly one.
    UniqueCertified {
        state: State,
        lower: f64,
    },
    Inconclusive,
}

impl UniquenessVerdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            UniquenessVerdict::UniqueCertified { .. } => "unique_certified",
            UniquenessVerdict::Inconclusive => "inconclusive",
        }
    }
}

/// Certifies uniqueness from the largest positive lower bound. Never
/// reports non-uniqueness.
pub fn uniqueness_test(db: &DistributionBounds, tol_pos: f64) -> UniquenessVerdict {
    let best = db.lower.iter().zip(&db.status_lo).enumerate().filter(|(_, (_, s))| s.is_optimal()).max_by(|a, b| a.1 .0.total_cmp(b.1 .0));
    match best {
        Some((k, (&l, _))) if l > tol_pos => UniquenessVerdict::UniqueCertified { state: db.states[k].clone(), lower: l },
        _ => UniquenessVerdict::Inconclusive,
    }
}

/// An optimal point of `max π^r(x)` over `P^r_{w,c}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ErgodicCandidate {
    pub seed: State,
    pub states: Vec<State>,
    pub pi: Vec<f64>,
    pub mass: f64,
    /// States carrying more than the support threshold.
    pub support: Vec<State>,
}

pub fn ergodic_candidate(net: &ReactionNetwork, w: &WeightSpec, r: f64, x: &[u32], opts: &LpOptions) -> Result<ErgodicCandidate, StateBoundsError> {
    let lp = StateLp::new(net, w, r, opts)?;
    ergodic_candidate_on(&lp, x)
}

pub fn ergodic_candidate_on(lp: &StateLp, x: &[u32]) -> Result<ErgodicCandidate, StateBoundsError> {
    let k = lp.truncation.index_of(x).ok_or_else(|| StateBoundsError::StateOutside(x.to_vec()))?;
    let (_, pi) = lp.optimal_point(&[(k, 1.0)], Sense::Maximize)?;
    let pi: Vec<f64> = pi.into_iter().map(|p| p.max(0.0)).collect();
    let thresh = 100.0 * lp.opts.tol.feas;
    let support = lp.truncation.states.iter().zip(&pi).filter(|(_, &p)| p > thresh).map(|(s, _)| s.clone()).collect();
    Ok(ErgodicCandidate { seed: x.to_vec(), states: lp.truncation.states.clone(), mass: pi.iter().sum(), pi, support })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::birthdeath::{bd_bounds, BirthDeathModel};
    use crate::model::{parse_network, parse_polynomial};

    fn linear_w(net: &ReactionNetwork, text: &str, c: f64) -> WeightSpec {
        WeightSpec::polynomial(parse_polynomial(text, net.species()).unwrap(), c).unwrap()
    }

    fn with(method: LpMethod) -> LpOptions {
        LpOptions { method, ..LpOptions::default() }
    }

    #[test]
    fn birth_death_matches_closed_form() {
        let net = parse_network("0 -> X @ 4\nX -> 0 @ mass_action(1)").unwrap();
        let bd = BirthDeathModel::from_network(&net).unwrap();
        let w = linear_w(&net, "X", 4.0);
        let cf = bd_bounds(&bd, 1, 4.0, 30.0).unwrap();
        for method in [LpMethod::Rays, LpMethod::Simplex] {
            let db = bound_distribution(&net, &w, 30.0, &with(method)).unwrap();
            assert_eq!(db.states.len(), cf.lower.len());
            for k in 0..db.states.len() {
                assert!((db.lower[k] - cf.lower[k]).abs() < 1e-9, "{method:?} lower {k}");
                assert!((db.upper[k] - cf.upper[k]).abs() < 1e-9, "{method:?} upper {k}");
            }
        }
    }

    #[test]
    fn rays_agree_with_simplex_in_two_dimensions() {
        let net = parse_network("0 -> A @ 30/(1+B^3)\nA -> 0 @ mass_action(1)\n0 -> B @ 10/(1+A)\nB -> 0 @ mass_action(1)").unwrap();
        let w = linear_w(&net, "A + 2*B", 16.0);
        let rays = StateLp::new(&net, &w, 24.0, &with(LpMethod::Rays)).unwrap();
        let spx = StateLp::new(&net, &w, 24.0, &with(LpMethod::Simplex)).unwrap();
        assert_eq!((rays.method(), spx.method()), ("rays", "simplex"));
        let (a, b) = (distribution_on(&rays), distribution_on(&spx));
        assert_eq!(b.failures(), 0);
        for k in 0..a.states.len() {
            assert!((a.lower[k] - b.lower[k]).abs() < 1e-7, "lower {k}: {} vs {}", a.lower[k], b.lower[k]);
            assert!((a.upper[k] - b.upper[k]).abs() < 1e-7, "upper {k}: {} vs {}", a.upper[k], b.upper[k]);
        }
        let f = parse_polynomial("A", net.species()).unwrap();
        let ra = average_on(&rays, &w, AverageTarget::Poly(&f)).unwrap();
        let rb = average_on(&spx, &w, AverageTarget::Poly(&f)).unwrap();
        assert!((ra.lower - rb.lower).abs() < 1e-6 && (ra.upper - rb.upper).abs() < 1e-6);
        let (_, pt) = rays.optimal_point(&[(3, 1.0)], Sense::Maximize).unwrap();
        assert!(rays.polytope.check_point(&pt).max() < 1e-10);
    }

    #[test]
    fn closed_interior_falls_back_to_simplex() {
        // State 0 is absorbing, so a closed class sits inside the truncation.
        let net = parse_network("X -> 0 @ mass_action(1)").unwrap();
        let w = linear_w(&net, "X", 1.0);
        let lp = StateLp::new(&net, &w, 5.0, &LpOptions::default()).unwrap();
        assert_eq!(lp.method(), "simplex");
        let db = distribution_on(&lp);
        assert!((db.lower[0] - 0.8).abs() < 1e-9 && (db.upper[0] - 1.0).abs() < 1e-9);
        assert!(matches!(StateLp::new(&net, &w, 5.0, &with(LpMethod::Rays)), Err(StateBoundsError::Invalid(_))));
    }

    #[test]
    fn infeasible_tail_constant() {
        // The Poisson(4) mean cannot be pushed below 1.
        let net = parse_network("0 -> X @ 4\nX -> 0 @ mass_action(1)").unwrap();
        let w = linear_w(&net, "X", 0.5);
        for method in [LpMethod::Rays, LpMethod::Simplex] {
            assert!(matches!(StateLp::new(&net, &w, 40.0, &with(method)), Err(StateBoundsError::Infeasible { .. })), "{method:?}");
        }
    }

    #[test]
    fn average_brackets_the_mean() {
        let net = parse_network("0 -> X @ 4\nX -> 0 @ mass_action(1)").unwrap();
        let w = linear_w(&net, "X^2", 21.0);
        let f = parse_polynomial("X", net.species()).unwrap();
        let ab = bound_average(&net, &w, 40000.0, AverageTarget::Poly(&f), &LpOptions::default()).unwrap();
        let (l, u) = ab.extended.unwrap();
        assert!(l <= 4.0 && 4.0 <= u, "{l} {u}");
        assert!(u - l < 0.2, "{l} {u} {:?}", ab);
    }

    #[test]
    fn two_classes_are_inconclusive() {
        let net = parse_network("0 -> 2 A @ 1\n2 A -> 0 @ mass_action(1)\nB -> 0 @ mass_action(1)").unwrap();
        let w = linear_w(&net, "A + B", 3.0);
        let lp = StateLp::new(&net, &w, 300.0, &LpOptions::default()).unwrap();
        let db = distribution_on(&lp);
        assert!(db.lower.iter().all(|&l| l < 1e-12));
        assert!(db.upper_mass() >= 1.5);
        assert_eq!(uniqueness_test(&db, DEFAULT_TOL_POS), UniquenessVerdict::Inconclusive);
        for seed in [[0u32, 0], [1, 0]] {
            let cand = ergodic_candidate_on(&lp, &seed).unwrap();
            assert!(!cand.support.is_empty());
            assert!(cand.support.iter().all(|s| s[0] % 2 == seed[0] % 2 && s[1] == 0), "{:?}", cand.support);
        }
    }

    #[test]
    fn schlogl_is_unique() {
        let net =
            parse_network("2 X -> 3 X @ mass_action(6)\n3 X -> 2 X @ mass_action(1/3)\n0 -> X @ mass_action(50)\nX -> 0 @ mass_action(3)").unwrap();
        let w = linear_w(&net, "X", 18.0);
        let db = bound_distribution(&net, &w, 200.0, &LpOptions::default()).unwrap();
        assert!(matches!(uniqueness_test(&db, DEFAULT_TOL_POS), UniquenessVerdict::UniqueCertified { .. }));
        let mb = marginal_on(&StateLp::new(&net, &w, 200.0, &LpOptions::default()).unwrap(), &Partition::Axis(0)).unwrap();
        assert_eq!(mb.cells.len(), 200);
        assert!((mb.eps_lower - db.eps_lower).abs() < 1e-12);
    }
}
