//! The subcommands. Each writes its artifacts through [`Run`], which keeps
//! the list of outputs and warnings for the manifest.

use std::path::{Path, PathBuf};

use cmebound::birthdeath::{bd_bounds, BirthDeathModel};
use cmebound::lyapunov::drift_report;
use cmebound::model::{network_to_json, ReactionNetwork};
use cmebound::moments::{hierarchy_csv, hierarchy_json, monotonicity_violations, MomentBound, MomentBounder, MomentOptions, Target};
use cmebound::opt::mps::export_mps;
use cmebound::opt::sdpa::export_sdpa;
use cmebound::opt::{Sense, SolveStatus};
use cmebound::ssa::{self, Initial, OccupationHistogram, SimConfig};
use cmebound::statebounds::{
    build_polytope, build_truncation, certificate, distribution_csv, distribution_header, distribution_on, ergodic_candidate_on, marginal_csv,
    marginal_header, marginal_on, uniqueness_test, DistributionBounds, LpOptions, Partition, StateLp, WeightSpec, DEFAULT_TOL_POS,
};
use cmebound::{Error, Poly};
use num_traits::ToPrimitive;
use serde_json::{json, Value};

use crate::args::{BoundArgs, DistArgs, DriftArgs, ExportArgs, MarginalArgs, MomentsArgs, SimulateArgs, TolArgs};
use crate::parse::{self, CSource};

pub const DEFAULT_MONO_TOL: f64 = 1e-6;
pub const DEFAULT_DRIFT_RADIUS: u32 = 50;

/// Output directory bookkeeping for one run.
pub struct Run {
    pub dir: PathBuf,
    pub files: Vec<String>,
    pub warnings: Vec<String>,
    /// Derived values worth recording in the manifest (resolved `c`, ...).
    pub results: serde_json::Map<String, Value>,
}

impl Run {
    pub fn new(dir: &Path) -> Result<Self, Error> {
        std::fs::create_dir_all(dir)?;
        Ok(Self { dir: dir.to_path_buf(), files: Vec::new(), warnings: Vec::new(), results: serde_json::Map::new() })
    }

    pub fn path(&mut self, rel: &str) -> Result<PathBuf, Error> {
        let p = self.dir.join(rel);
        if let Some(parent) = p.parent() {
            std::fs::create_dir_all(parent)?;
        }
        self.files.push(rel.to_string());
        Ok(p)
    }

    pub fn write(&mut self, rel: &str, contents: impl AsRef<[u8]>) -> Result<(), Error> {
        let p = self.path(rel)?;
        std::fs::write(p, contents)?;
        Ok(())
    }

    pub fn write_json(&mut self, rel: &str, v: &Value) -> Result<(), Error> {
        self.write(rel, serde_json::to_string_pretty(v).expect("json") + "\n")
    }

    pub fn warn(&mut self, w: String) {
        eprintln!("warning: {w}");
        self.warnings.push(w);
    }
}

fn slug(s: &str) -> String {
    let out: String = s.chars().map(|c| if c.is_ascii_alphanumeric() { c } else { '_' }).collect();
    out.trim_matches('_').to_string()
}

fn r_tag(r: f64) -> String {
    format!("r{r}")
}

fn fmt(v: f64) -> String {
    format!("{v:e}")
}

pub fn moments(run: &mut Run, net: &ReactionNetwork, a: &MomentsArgs) -> Result<(), Error> {
    let orders = parse::orders(&a.orders)?;
    let targets = parse::targets(a.targets.as_deref(), net)?;
    let opts = parse::moment_options(&a.tol, &a.scaling)?;
    run.results
        .insert("sdp".into(), json!({ "feas_tol": opts.tol.feas, "gap_tol": opts.tol.gap, "max_iter": opts.tol.max_iter, "slack": opts.slack }));
    if a.export_sdpa {
        return export_sdps(run, net, &targets, &orders, &opts);
    }
    let bounder = MomentBounder::new(net, opts)?;
    // Invalid orders are configuration errors; find them before solving.
    for &d in &orders {
        bounder.spectrahedron(d)?;
    }
    let ts: Vec<Target> = targets.iter().map(|(_, t)| t.clone()).collect();
    let bounds: Vec<MomentBound> = bounder.hierarchy(&ts, &orders).into_iter().collect::<Result<_, _>>()?;
    let warnings = monotonicity_violations(&bounds, a.tol.mono_tol.unwrap_or(DEFAULT_MONO_TOL));
    for w in &warnings {
        run.warn(w.clone());
    }
    run.write("moments.csv", hierarchy_csv(&bounds))?;
    let mut j = hierarchy_json(&bounds, &warnings);
    j["sigma"] = json!(bounder.sigma());
    run.write_json("moments.json", &j)?;
    // An unbounded side is a valid, infinite bound; anything else is a failure.
    for b in bounds.iter().filter(|b| b.status_lo == SolveStatus::Unbounded || b.status_hi == SolveStatus::Unbounded) {
        run.warn(format!("bound on {} at d = {} is infinite (SDP unbounded)", b.target, b.d));
    }
    let failed: Vec<String> = bounds
        .iter()
        .filter(|b| [b.status_lo, b.status_hi].iter().any(|s| !s.is_optimal() && *s != SolveStatus::Unbounded))
        .map(|b| format!("{} at d = {}", b.target, b.d))
        .collect();
    if !failed.is_empty() {
        return Err(Error::Solver(format!("SDP solve failed for {}", failed.join(", "))));
    }
    Ok(())
}

fn export_sdps(run: &mut Run, net: &ReactionNetwork, targets: &[(String, Target)], orders: &[u32], opts: &MomentOptions) -> Result<(), Error> {
    // No scaling solves: exports must not depend on a solver run.
    let opts = MomentOptions {
        scaling: match &opts.scaling {
            cmebound::moments::MomentScaling::Auto => cmebound::moments::MomentScaling::None,
            s => s.clone(),
        },
        ..opts.clone()
    };
    let bounder = MomentBounder::new(net, opts)?;
    for (label, t) in targets {
        for &d in orders {
            for (sense, tag) in [(Sense::Minimize, "min"), (Sense::Maximize, "max")] {
                let cp = bounder.conic(d, t, sense)?;
                let p = run.path(&format!("exports/moment_{}_d{d}_{tag}.dat-s", slug(label)))?;
                export_sdpa(&cp, &p).map_err(|e| Error::Config(e.to_string()))?;
            }
        }
    }
    Ok(())
}

/// Resolves `c` and records where it came from.
fn resolve_c(run: &mut Run, net: &ReactionNetwork, b: &BoundArgs, tol: &TolArgs, w_text: &str) -> Result<f64, Error> {
    let (c, info) = match parse::c_source(&b.c)? {
        CSource::User(c) => (c, json!({ "source": "user", "c": c })),
        CSource::Sdp { d, f } => {
            let f = f.unwrap_or_else(|| w_text.to_string());
            let target = Target::from_polynomial(net, &parse::polynomial(&f, net)?);
            let bounder = MomentBounder::new(net, parse::moment_options(tol, "auto")?)?;
            let mb = bounder.bound(d, &target)?;
            if !mb.status_hi.is_optimal() || !(mb.upper > 0.0) || !mb.upper.is_finite() {
                return Err(Error::Solver(format!("SDP upper bound on <{f}> at d = {d} failed ({})", mb.status_hi)));
            }
            (mb.upper, json!({ "source": "sdp", "d": d, "f": f, "c": mb.upper, "lower": mb.lower }))
        }
    };
    run.results.insert("c".into(), info);
    Ok(c)
}

/// `Some(α)` when `w = x^α` on a one-species network.
fn power_of_x(net: &ReactionNetwork, w: &Poly) -> Option<u32> {
    if net.n() != 1 || w.num_terms() != 1 {
        return None;
    }
    let (a, c) = w.leading()?;
    (c.to_f64() == Some(1.0) && a.degree() > 0).then(|| a.degree())
}

fn record_lp(run: &mut Run, o: &LpOptions) {
    run.results.insert(
        "lp".into(),
        json!({ "method": o.method.as_str(), "feas_tol": o.tol.feas, "opt_tol": o.tol.opt, "max_iter": o.tol.max_iter, "state_cap": o.state_cap }),
    );
}

fn summary_row(db: &DistributionBounds, verdict: &str, method: &str) -> String {
    format!("{},{},{},{},{},{},{},{}\n", db.r, db.states.len(), fmt(db.eps_r), fmt(db.eps_lower), fmt(db.eps_upper), db.failures(), verdict, method)
}

pub fn dist(run: &mut Run, net: &ReactionNetwork, a: &DistArgs) -> Result<(), Error> {
    let rs = parse::r_list(&a.bound.r)?;
    let (w_text, w_poly) = parse::weight_poly(a.bound.w.as_deref(), net)?;
    let lp_opts = parse::lp_options(&a.tol, &a.bound)?;
    let tol_pos = a.tol.tol_pos.unwrap_or(DEFAULT_TOL_POS);
    record_lp(run, &lp_opts);
    let candidate = a.candidate.as_deref().map(|s| parse::state(s, net)).transpose()?;
    let c = resolve_c(run, net, &a.bound, &a.tol, &w_text)?;
    let w = parse::weight(&w_poly, c)?;
    let label = w.label(net.species());

    let bd = if a.lp || !net.is_birth_death() { None } else { power_of_x(net, &w_poly) };
    run.results.insert("route".into(), json!(if bd.is_some() { "birth_death" } else { "lp" }));

    let mut summary = String::from("r,states,eps_r,eps_lower,eps_upper,failed_solves,uniqueness,method\n");
    let mut certs = Vec::new();
    for &r in &rs {
        let tag = r_tag(r);
        let (db, method) = match bd {
            Some(alpha) => {
                let model = BirthDeathModel::from_network(net)?;
                let b = bd_bounds(&model, alpha, c, r)?;
                run.write(&format!("dist_{tag}.csv"), b.to_csv(None))?;
                (birth_death_as_lp_bounds(&b), "birth_death")
            }
            None => {
                let lp = StateLp::new(net, &w, r, &lp_opts)?;
                let db = distribution_on(&lp);
                run.write(&format!("dist_{tag}.csv"), distribution_csv(&db, net.species()))?;
                if let Some(x) = &candidate {
                    let ec = ergodic_candidate_on(&lp, x)?;
                    let mut s = format!("{},pi\n", net.species().join(","));
                    for (st, p) in ec.states.iter().zip(&ec.pi) {
                        s.push_str(&format!("{},{}\n", st.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(","), fmt(*p)));
                    }
                    run.write(&format!("candidate_{tag}.csv"), s)?;
                }
                (db, lp.method())
            }
        };
        if db.failures() > 0 {
            run.warn(format!("{} per-state solves failed at r = {r}", db.failures()));
        }
        if db.uninformative() {
            run.warn(format!("c/r >= 1 at r = {r}: the bounds are uninformative"));
        }
        let verdict = uniqueness_test(&db, tol_pos);
        let mut header = distribution_header(&db, &label);
        header["method"] = json!(method);
        run.write_json(&format!("dist_{tag}.json"), &header)?;
        summary.push_str(&summary_row(&db, verdict.as_str(), method));
        certs.push(certificate(&db, &label, &verdict));
    }
    run.write("dist_summary.csv", summary)?;
    run.write_json("certificate.json", &json!({ "certificates": certs }))?;
    Ok(())
}

/// The closed-form bounds in the LP result type, so both paths share the
/// certificate and summary code.
fn birth_death_as_lp_bounds(b: &cmebound::birthdeath::BirthDeathBounds) -> DistributionBounds {
    let n = b.len();
    let eps_r = b.eps_r;
    let upper_mass: f64 = b.upper.iter().sum();
    DistributionBounds {
        r: b.r,
        c: b.c,
        eps_r,
        states: (0..n as u32).map(|x| vec![x]).collect(),
        interior_count: n.saturating_sub(1),
        lower: b.lower.clone(),
        upper: b.upper.clone(),
        status_lo: vec![SolveStatus::Optimal; n],
        status_hi: vec![SolveStatus::Optimal; n],
        eps_lower: b.lower_error().clamp(0.0, 1.0),
        eps_upper: (upper_mass - 1.0 + eps_r).max(eps_r),
        iterations: 0,
    }
}

pub fn marginal(run: &mut Run, net: &ReactionNetwork, a: &MarginalArgs) -> Result<(), Error> {
    let rs = parse::r_list(&a.bound.r)?;
    let axis = parse::axis(&a.axis, net)?;
    let (w_text, w_poly) = parse::weight_poly(a.bound.w.as_deref(), net)?;
    let lp_opts = parse::lp_options(&a.tol, &a.bound)?;
    record_lp(run, &lp_opts);
    let c = resolve_c(run, net, &a.bound, &a.tol, &w_text)?;
    let w = parse::weight(&w_poly, c)?;
    let label = w.label(net.species());
    let partition = Partition::Axis(axis);
    let pname = format!("axis:{}", net.species()[axis]);
    let mut summary = String::from("r,cells,eps_r,eps_lower,eps_upper\n");
    for &r in &rs {
        let tag = r_tag(r);
        let lp = StateLp::new(net, &w, r, &lp_opts)?;
        let mb = marginal_on(&lp, &partition)?;
        let fails = mb.status_lo.iter().chain(&mb.status_hi).filter(|s| !s.is_optimal()).count();
        if fails > 0 {
            run.warn(format!("{fails} per-cell solves failed at r = {r}"));
        }
        run.write(&format!("marginal_{tag}.csv"), marginal_csv(&mb))?;
        let mut h = marginal_header(&mb, &label, &pname);
        h["method"] = json!(lp.method());
        run.write_json(&format!("marginal_{tag}.json"), &h)?;
        summary.push_str(&format!("{},{},{},{},{}\n", r, mb.cells.len(), fmt(mb.eps_r), fmt(mb.eps_lower), fmt(mb.eps_upper)));
    }
    run.write("marginal_summary.csv", summary)?;
    Ok(())
}

pub fn simulate(run: &mut Run, net: &ReactionNetwork, a: &SimulateArgs) -> Result<(), Error> {
    let x0 = match &a.x0 {
        Some(s) => parse::state(s, net)?,
        None => vec![0; net.n()],
    };
    if a.replicas == 0 {
        return Err(Error::Config("replicas must be at least 1".into()));
    }
    let cfg = SimConfig { initial: Initial::Point(x0), t_end: a.t_end, burn_in: a.burn_in, seed: a.seed, max_events: a.max_events };
    let axis = a.axis.as_deref().map(|s| parse::axis(s, net)).transpose()?;
    let partition = axis.map(Partition::Axis);
    let reps = ssa::replicate(net, &cfg, partition.as_ref(), a.replicas)?;
    let mut pooled = reps[0].clone();
    for h in &reps[1..] {
        pooled.merge(h);
    }
    let keys: Vec<String> = match axis {
        Some(i) => vec![net.species()[i].clone()],
        None => net.species().to_vec(),
    };
    run.write("histogram.csv", histogram_csv(&pooled, &reps, &keys))?;
    let per: Vec<Value> = reps.iter().enumerate().map(|(s, h)| json!({ "stream": s, "events": h.events, "window": h.window })).collect();
    run.write_json("simulation.json", &json!({ "seed": a.seed, "replicas": a.replicas, "burn_in": a.burn_in, "t_end": a.t_end, "runs": per }))?;
    if a.log {
        let tr = ssa::simulate(net, &cfg)?;
        let p = run.path("trajectory.bin")?;
        ssa::write_binary_log(&tr, std::io::BufWriter::new(std::fs::File::create(p)?))?;
    }
    Ok(())
}

fn histogram_csv(pooled: &OccupationHistogram, reps: &[OccupationHistogram], keys: &[String]) -> String {
    if reps.len() < 2 {
        return pooled.to_csv(keys);
    }
    let stats = ssa::mean_and_se(reps);
    let mut s = format!("{},fraction,se\n", keys.join(","));
    for (k, (m, se)) in stats {
        s.push_str(&format!("{},{},{}\n", k.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(","), fmt(m), fmt(se)));
    }
    s
}

pub fn drift(run: &mut Run, net: &ReactionNetwork, a: &DriftArgs) -> Result<(), Error> {
    let w = parse::polynomial(&a.w, net)?;
    let k2 = parse::rational(&a.k2)?;
    let radius = match (a.radius, &a.r) {
        (Some(rad), _) => rad,
        (None, Some(r)) => {
            let r = parse::number(r)?;
            let spec = WeightSpec::polynomial(w.clone(), 1.0)?;
            (0..net.n()).map(|i| spec.axis_extent(i, r)).fold(0.0, f64::max).ceil() as u32
        }
        (None, None) => DEFAULT_DRIFT_RADIUS,
    };
    let rep = drift_report(net, &w, &k2, radius);
    if let Some(n) = &rep.note {
        run.warn(n.clone());
    }
    run.results.insert("verdict".into(), json!(rep.verdict.as_str()));
    run.write_json("drift.json", &rep.to_json(net.species()))?;
    Ok(())
}

pub fn export(run: &mut Run, net: &ReactionNetwork, a: &ExportArgs) -> Result<(), Error> {
    run.write_json("exports/network.json", &network_to_json(net))?;
    run.write("exports/network.txt", net.to_dsl())?;
    if let Some(o) = &a.orders {
        let orders = parse::orders(o)?;
        let targets = parse::targets(a.targets.as_deref(), net)?;
        export_sdps(run, net, &targets, &orders, &MomentOptions { scaling: cmebound::moments::MomentScaling::None, ..MomentOptions::default() })?;
    }
    if let Some(r) = &a.r {
        let rs = parse::r_list(r)?;
        let c = parse::number(a.c.as_deref().ok_or_else(|| Error::Config("the LP export needs --c".into()))?)?;
        let (_, w_poly) = parse::weight_poly(a.w.as_deref(), net)?;
        let w = parse::weight(&w_poly, c)?;
        let opts = LpOptions::default();
        for r in rs {
            let trunc = build_truncation(net, &w, r, opts.state_cap)?;
            let tp = build_polytope(net, &trunc, &w)?;
            let name = format!("truncation_{}", r_tag(r));
            let p = run.path(&format!("exports/{name}.mps"))?;
            export_mps(&tp.to_lp(), &name, &p).map_err(|e| Error::Config(e.to_string()))?;
            let mut states = format!("var,{}\n", net.species().join(","));
            for (k, x) in trunc.states.iter().enumerate() {
                states.push_str(&format!("p{k},{}\n", x.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")));
            }
            run.write(&format!("exports/{name}_states.csv"), states)?;
        }
    }
    Ok(())
}
