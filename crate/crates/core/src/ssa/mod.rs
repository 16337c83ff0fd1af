//! Exact stochastic simulation (direct method) and time-average occupation
//! measures, used to cross-check the bounds.
//!
//! Random numbers come from ChaCha8 seeded with the 64-bit `seed`; replica
//! `i` of a batch runs on ChaCha stream `i`, so every trajectory is
//! reproducible on its own, whatever the thread count.

use std::collections::BTreeMap;
use std::io::{self, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use rayon::prelude::*;

use crate::model::{ModelError, ReactionNetwork, State};
use crate::statebounds::Partition;

pub const DEFAULT_BURN_IN: f64 = 0.2;
pub const DEFAULT_MAX_EVENTS: u64 = 100_000_000;

#[derive(Debug, Clone, PartialEq)]
pub enum Initial {
    Point(State),
    /// Finite distribution; weights need not be normalized.
    Finite(Vec<(State, f64)>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub initial: Initial,
    pub t_end: f64,
    /// Fraction of `[0, t_end]` discarded before averaging. The 20% default
    /// is a heuristic, not a mixing-time estimate.
    pub burn_in: f64,
    pub seed: u64,
    pub max_events: u64,
}

impl SimConfig {
    pub fn new(x0: State, t_end: f64, seed: u64) -> Self {
        Self { initial: Initial::Point(x0), t_end, burn_in: DEFAULT_BURN_IN, seed, max_events: DEFAULT_MAX_EVENTS }
    }

    pub fn with_burn_in(mut self, b: f64) -> Self {
        self.burn_in = b;
        self
    }

    pub fn with_max_events(mut self, m: u64) -> Self {
        self.max_events = m;
        self
    }

    pub fn validate(&self, net: &ReactionNetwork) -> Result<(), SsaError> {
        if !(self.t_end > 0.0) || !self.t_end.is_finite() {
            return Err(SsaError::Config(format!("t_end must be positive and finite, got {}", self.t_end)));
        }
        if !(0.0..1.0).contains(&self.burn_in) {
            return Err(SsaError::Config(format!("burn-in fraction must lie in [0, 1), got {}", self.burn_in)));
        }
        let states: Vec<&State> = match &self.initial {
            Initial::Point(x) => vec![x],
            Initial::Finite(v) => {
                if v.iter().any(|(_, p)| !(*p >= 0.0) || !p.is_finite()) || !(v.iter().map(|(_, p)| p).sum::<f64>() > 0.0) {
                    return Err(SsaError::Config("initial weights must be nonnegative with positive sum".into()));
                }
                v.iter().map(|(x, _)| x).collect()
            }
        };
        for x in states {
            if x.len() != net.n() {
                return Err(SsaError::Config(format!("initial state {x:?} has {} coordinates, network has {} species", x.len(), net.n())));
            }
            if !net.contains(x) {
                return Err(SsaError::Config(format!("initial state {x:?} violates the state constraint")));
            }
            net.check_state(x)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SsaError {
    #[error("{0}")]
    Config(String),
    #[error("event cap of {events} reached at t = {time}; the chain may be exploding")]
    EventCap { events: u64, time: f64 },
    #[error("post burn-in window has zero length")]
    EmptyWindow,
    #[error("non-finite exit rate {rate} at state {state:?}")]
    BadRate { state: State, rate: f64 },
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// A sampled path: `states[i]` holds on `[times[i], times[i+1])`, the last
/// one until `t_end`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<State>,
    pub t_end: f64,
    pub events: u64,
    /// The event cap stopped the run before `t_end`.
    pub capped: bool,
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn sample_initial(init: &Initial, rng: &mut ChaCha8Rng) -> State {
    match init {
        Initial::Point(x) => x.clone(),
        Initial::Finite(v) => {
            let total: f64 = v.iter().map(|(_, p)| p).sum();
            let mut u = rng.random::<f64>() * total;
            for (x, p) in v {
                if u < *p {
                    return x.clone();
                }
                u -= p;
            }
            v.iter().rev().find(|(_, p)| *p > 0.0).map(|(x, _)| x.clone()).unwrap_or_else(|| v[0].0.clone())
        }
    }
}

/// Runs one path on `stream`, calling `visit(t0, t1, x)` for every holding
/// interval clipped to `[0, t_end]`. Returns the event count and whether the
/// cap was hit.
pub fn run_path<F>(net: &ReactionNetwork, cfg: &SimConfig, stream: u64, mut visit: F) -> Result<(u64, bool), SsaError>
where
    F: FnMut(f64, f64, &[u32]),
{
    cfg.validate(net)?;
    let mut rng = rng_for(cfg.seed, stream);
    let mut x = sample_initial(&cfg.initial, &mut rng);
    let mut t = 0.0f64;
    let mut events = 0u64;
    let mut a = Vec::with_capacity(net.m());
    loop {
        net.propensities_f64(&x, &mut a);
        let q: f64 = a.iter().sum();
        if !q.is_finite() || q < 0.0 {
            return Err(SsaError::BadRate { state: x, rate: q });
        }
        if q == 0.0 {
            visit(t, cfg.t_end, &x);
            return Ok((events, false));
        }
        let tau: f64 = rng.sample::<f64, _>(Exp1) / q;
        let next = t + tau;
        if next >= cfg.t_end {
            visit(t, cfg.t_end, &x);
            return Ok((events, false));
        }
        if events >= cfg.max_events {
            visit(t, next, &x);
            return Ok((events, true));
        }
        visit(t, next, &x);
        // Cumulative propensity inversion.
        let u = rng.random::<f64>() * q;
        let mut acc = 0.0;
        let mut j = a.len() - 1;
        for (i, &ai) in a.iter().enumerate() {
            acc += ai;
            if u < acc {
                j = i;
                break;
            }
        }
        while a[j] == 0.0 {
            j -= 1;
        }
        x = net.apply(j, &x).ok_or_else(|| ModelError::LeavesStateSpace { reaction: j, state: x.clone() })?;
        t = next;
        events += 1;
    }
}

/// One full trajectory on stream 0. Hitting the event cap is not an error
/// here; it sets `capped` so the caller can report a possible explosion.
pub fn simulate(net: &ReactionNetwork, cfg: &SimConfig) -> Result<Trajectory, SsaError> {
    simulate_stream(net, cfg, 0)
}

pub fn simulate_stream(net: &ReactionNetwork, cfg: &SimConfig, stream: u64) -> Result<Trajectory, SsaError> {
    let mut times = Vec::new();
    let mut states = Vec::new();
    let (events, capped) = run_path(net, cfg, stream, |t0, _, x| {
        times.push(t0);
        states.push(x.to_vec());
    })?;
    Ok(Trajectory { times, states, t_end: cfg.t_end, events, capped })
}

/// Fixed little-endian records: `f64` jump time then `n` `u32` coordinates.
pub fn write_binary_log<W: Write>(traj: &Trajectory, mut out: W) -> io::Result<()> {
    for (t, x) in traj.times.iter().zip(&traj.states) {
        out.write_all(&t.to_le_bytes())?;
        for v in x {
            out.write_all(&v.to_le_bytes())?;
        }
    }
    out.flush()
}

pub fn read_binary_log(bytes: &[u8], n: usize) -> io::Result<Vec<(f64, State)>> {
    let rec = 8 + 4 * n;
    if bytes.len() % rec != 0 {
        return Err(io::Error::new(io::ErrorKind::InvalidData, "log length is not a whole number of records"));
    }
    Ok(bytes
        .chunks_exact(rec)
        .map(|r| {
            let t = f64::from_le_bytes(r[..8].try_into().unwrap());
            let x = r[8..].chunks_exact(4).map(|c| u32::from_le_bytes(c.try_into().unwrap())).collect();
            (t, x)
        })
        .collect())
}

/// Time spent in each cell over the averaging window. Keys are states for
/// the identity partition, `[value]` for an axis and `[cell]` for user cells.
#[derive(Debug, Clone, PartialEq)]
pub struct OccupationHistogram {
    pub time: BTreeMap<Vec<u32>, f64>,
    pub window: f64,
    pub events: u64,
    /// Time not assigned to any user cell.
    pub unassigned: f64,
}

impl OccupationHistogram {
    pub fn fraction(&self, key: &[u32]) -> f64 {
        self.time.get(key).map_or(0.0, |t| t / self.window)
    }

    pub fn fractions(&self) -> BTreeMap<Vec<u32>, f64> {
        self.time.iter().map(|(k, t)| (k.clone(), t / self.window)).collect()
    }

    /// Pools two runs. Associative and commutative up to rounding.
    pub fn merge(&mut self, other: &OccupationHistogram) {
        for (k, t) in &other.time {
            *self.time.entry(k.clone()).or_insert(0.0) += t;
        }
        self.window += other.window;
        self.events += other.events;
        self.unassigned += other.unassigned;
    }

    /// Collapses a state histogram onto one coordinate.
    pub fn marginal(&self, axis: usize) -> OccupationHistogram {
        let mut time = BTreeMap::new();
        for (k, t) in &self.time {
            *time.entry(vec![k[axis]]).or_insert(0.0) += t;
        }
        OccupationHistogram { time, window: self.window, events: self.events, unassigned: self.unassigned }
    }

    /// CSV `<key columns>,fraction`.
    pub fn to_csv(&self, key_names: &[String]) -> String {
        let mut s = format!("{},fraction\n", key_names.join(","));
        for (k, t) in &self.time {
            let key = k.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",");
            s.push_str(&format!("{key},{:e}\n", t / self.window));
        }
        s
    }
}

fn cell_key(partition: Option<&Partition>, x: &[u32]) -> Option<Vec<u32>> {
    match partition {
        None | Some(Partition::Identity) => Some(x.to_vec()),
        Some(Partition::Axis(k)) => Some(vec![x[*k]]),
        Some(Partition::Cells { assign, .. }) => assign(x).map(|c| vec![c as u32]),
    }
}

/// Occupation measure of stream `stream` over `[burn_in · t_end, t_end]`.
pub fn occupation_stream(
    net: &ReactionNetwork,
    cfg: &SimConfig,
    partition: Option<&Partition>,
    stream: u64,
) -> Result<OccupationHistogram, SsaError> {
    cfg.validate(net)?;
    if let Some(Partition::Axis(k)) = partition {
        if *k >= net.n() {
            return Err(SsaError::Config(format!("axis {} out of range for {} species", k + 1, net.n())));
        }
    }
    let start = cfg.burn_in * cfg.t_end;
    // A window below the resolution of t_end carries no information.
    if !(cfg.t_end - start > cfg.t_end * f64::EPSILON) {
        return Err(SsaError::EmptyWindow);
    }
    let mut time: BTreeMap<Vec<u32>, f64> = BTreeMap::new();
    let mut unassigned = 0.0;
    let (events, capped) = run_path(net, cfg, stream, |t0, t1, x| {
        let dt = t1 - t0.max(start);
        if dt > 0.0 {
            match cell_key(partition, x) {
                Some(k) => *time.entry(k).or_insert(0.0) += dt,
                None => unassigned += dt,
            }
        }
    })?;
    if capped {
        let reached = time.values().sum::<f64>() + unassigned + start;
        return Err(SsaError::EventCap { events, time: reached });
    }
    Ok(OccupationHistogram { time, window: cfg.t_end - start, events, unassigned })
}

pub fn occupation_histogram(net: &ReactionNetwork, cfg: &SimConfig, partition: Option<&Partition>) -> Result<OccupationHistogram, SsaError> {
    occupation_stream(net, cfg, partition, 0)
}

/// Independent replicas on streams `0..replicas`, run in parallel. The
/// result is in stream order and does not depend on scheduling.
pub fn replicate(net: &ReactionNetwork, cfg: &SimConfig, partition: Option<&Partition>, replicas: u64) -> Result<Vec<OccupationHistogram>, SsaError> {
    (0..replicas).into_par_iter().map(|s| occupation_stream(net, cfg, partition, s)).collect()
}

/// Pooled fractions with the standard error across replicas, per key.
pub fn mean_and_se(replicas: &[OccupationHistogram]) -> BTreeMap<Vec<u32>, (f64, f64)> {
    let mut keys: BTreeMap<Vec<u32>, ()> = BTreeMap::new();
    for h in replicas {
        for k in h.time.keys() {
            keys.insert(k.clone(), ());
        }
    }
    let n = replicas.len() as f64;
    keys.into_keys()
        .map(|k| {
            let v: Vec<f64> = replicas.iter().map(|h| h.fraction(&k)).collect();
            let m = v.iter().sum::<f64>() / n;
            let se = if n > 1.0 { (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0) / n).sqrt() } else { f64::INFINITY };
            (k, (m, se))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::parse_network;

    fn net(src: &str) -> ReactionNetwork {
        parse_network(src).unwrap()
    }

    #[test]
    fn absorbing_start_holds() {
        let n = net("species: A\nA -> 0 @ mass_action(1)");
        let tr = simulate(&n, &SimConfig::new(vec![0], 10.0, 1)).unwrap();
        assert_eq!(tr.states, vec![vec![0]]);
        assert_eq!(tr.events, 0);
        assert!(!tr.capped);
    }

    #[test]
    fn same_seed_same_path() {
        let n = net("0 -> A @ 3\nA -> 0 @ mass_action(1)");
        let cfg = SimConfig::new(vec![0], 50.0, 42);
        assert_eq!(simulate(&n, &cfg).unwrap(), simulate(&n, &cfg).unwrap());
        let other = simulate(&n, &SimConfig { seed: 43, ..cfg.clone() }).unwrap();
        assert_ne!(simulate(&n, &cfg).unwrap(), other);
        assert_ne!(simulate_stream(&n, &cfg, 1).unwrap(), simulate(&n, &cfg).unwrap());
    }

    #[test]
    fn path_is_a_jump_chain() {
        let n = net("0 -> A @ 3\nA -> 0 @ mass_action(1)");
        let tr = simulate(&n, &SimConfig::new(vec![2], 30.0, 7)).unwrap();
        assert_eq!(tr.times.len() as u64, tr.events + 1);
        for i in 1..tr.times.len() {
            assert!(tr.times[i] > tr.times[i - 1]);
            assert_eq!((tr.states[i][0] as i64 - tr.states[i - 1][0] as i64).abs(), 1);
        }
        assert!(*tr.times.last().unwrap() < 30.0);
    }

    #[test]
    fn holding_time_is_exponential() {
        // Constant exit rate 2 everywhere.
        let n = net("0 -> A @ 2");
        let tr = simulate(&n, &SimConfig::new(vec![0], 1e9, 3).with_max_events(20_000)).unwrap();
        assert!(tr.capped);
        let h: Vec<f64> = tr.times.windows(2).map(|w| w[1] - w[0]).collect();
        let m = h.iter().sum::<f64>() / h.len() as f64;
        let sd = (h.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (h.len() - 1) as f64).sqrt();
        let se = sd / (h.len() as f64).sqrt();
        assert!((m - 0.5).abs() < 3.0 * se, "mean {m}, se {se}");
    }

    #[test]
    fn two_state_chain_occupation() {
        // A on/off switch: rate 1 off -> on, rate 3 on -> off.
        let n = net("species: A\nconstraint: A <= 1\n0 -> A @ 1 - A\nA -> 0 @ 3*A");
        let cfg = SimConfig::new(vec![0], 20_000.0, 11).with_burn_in(0.01);
        let reps = replicate(&n, &cfg, None, 8).unwrap();
        let stats = mean_and_se(&reps);
        let (p0, se0) = stats[&vec![0]];
        let (p1, _) = stats[&vec![1]];
        assert!((p0 - 0.75).abs() < 3.0 * se0 + 1e-3, "{p0} ± {se0}");
        assert!((p0 + p1 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mm_infinity_mean() {
        let n = net("0 -> A @ 5\nA -> 0 @ mass_action(1)");
        let cfg = SimConfig::new(vec![0], 5_000.0, 5);
        let reps = replicate(&n, &cfg, None, 6).unwrap();
        let means: Vec<f64> = reps.iter().map(|h| h.fractions().iter().map(|(k, p)| k[0] as f64 * p).sum()).collect();
        let m = means.iter().sum::<f64>() / means.len() as f64;
        let sd = (means.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (means.len() - 1) as f64).sqrt();
        let se = sd / (means.len() as f64).sqrt();
        assert!((m - 5.0).abs() < 3.0 * se + 1e-2, "mean {m}, se {se}");
    }

    #[test]
    fn histogram_is_normalized_and_reproducible() {
        let n = net("0 -> A @ 2\nA -> 0 @ mass_action(1)\n0 -> B @ 1\nB -> 0 @ mass_action(1)");
        let cfg = SimConfig::new(vec![0, 0], 200.0, 9);
        let h = occupation_histogram(&n, &cfg, None).unwrap();
        assert!((h.fractions().values().sum::<f64>() - 1.0).abs() < 1e-12);
        assert_eq!(h, occupation_histogram(&n, &cfg, None).unwrap());
        let ax = occupation_histogram(&n, &cfg, Some(&Partition::Axis(1))).unwrap();
        assert_eq!(ax.time, h.marginal(1).time.iter().map(|(k, v)| (k.clone(), *v)).collect::<BTreeMap<_, _>>());
    }

    #[test]
    fn merge_is_order_independent() {
        let n = net("0 -> A @ 2\nA -> 0 @ mass_action(1)");
        let reps = replicate(&n, &SimConfig::new(vec![0], 100.0, 1), None, 3).unwrap();
        let mut ab = reps[0].clone();
        ab.merge(&reps[1]);
        ab.merge(&reps[2]);
        let mut cb = reps[2].clone();
        cb.merge(&reps[0]);
        cb.merge(&reps[1]);
        for (k, v) in ab.fractions() {
            assert!((v - cb.fraction(&k)).abs() < 1e-14);
        }
    }

    #[test]
    fn zero_window_and_bad_config() {
        let n = net("0 -> A @ 2");
        let cfg = SimConfig::new(vec![0], 1.0, 1).with_burn_in(1.0 - f64::EPSILON / 2.0);
        assert!(matches!(occupation_histogram(&n, &cfg, None), Err(SsaError::EmptyWindow)));
        assert!(matches!(simulate(&n, &SimConfig::new(vec![0], 0.0, 1)), Err(SsaError::Config(_))));
        assert!(matches!(simulate(&n, &SimConfig::new(vec![0], 1.0, 1).with_burn_in(1.0)), Err(SsaError::Config(_))));
        assert!(matches!(simulate(&n, &SimConfig::new(vec![0, 0], 1.0, 1)), Err(SsaError::Config(_))));
    }

    #[test]
    fn event_cap_is_an_error_for_averages() {
        let n = net("0 -> A @ 2");
        let cfg = SimConfig::new(vec![0], 1e6, 1).with_max_events(100);
        assert!(matches!(occupation_histogram(&n, &cfg, None), Err(SsaError::EventCap { events: 100, .. })));
    }

    #[test]
    fn finite_initial_distribution() {
        let n = net("species: A\nA -> 0 @ mass_action(1)");
        let cfg = SimConfig { initial: Initial::Finite(vec![(vec![0], 0.0), (vec![3], 1.0)]), ..SimConfig::new(vec![0], 1.0, 1) };
        for s in 0..5 {
            assert_eq!(simulate_stream(&n, &cfg, s).unwrap().states[0], vec![3]);
        }
    }

    #[test]
    fn binary_log_round_trip() {
        let n = net("0 -> A @ 2\nA -> 0 @ mass_action(1)\n0 -> B @ 1");
        let tr = simulate(&n, &SimConfig::new(vec![1, 0], 5.0, 2)).unwrap();
        let mut buf = Vec::new();
        write_binary_log(&tr, &mut buf).unwrap();
        assert_eq!(buf.len(), tr.times.len() * 16);
        let back = read_binary_log(&buf, 2).unwrap();
        assert_eq!(back.iter().map(|(t, _)| *t).collect::<Vec<_>>(), tr.times);
        assert_eq!(back.into_iter().map(|(_, x)| x).collect::<Vec<_>>(), tr.states);
    }
}
