//! End-to-end acceptance run: one PASS/FAIL line per criterion.

mod common;
#[path = "../../optcore/tests/suites/mod.rs"]
mod suites;

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use cmebound::birthdeath::bd_bounds;
use cmebound::moments::{analytic_schlogl_e3, MomentBounder, MomentOptions, Target};
use cmebound::opt::sdpa::{read_sdpa, write_sdpa};
use cmebound::opt::Sense;
use cmebound::polyalg::MultiIndex;
use cmebound::ssa::{mean_and_se, replicate, SimConfig};
use cmebound::statebounds::{
    bound_distribution, bound_marginal, ergodic_candidate, uniqueness_test, LpMethod, LpOptions, Partition, UniquenessVerdict, WeightSpec,
    DEFAULT_TOL_POS,
};
use cmebound::Rational;
use common::*;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn pow(k: u32) -> MultiIndex {
    MultiIndex::new(vec![k])
}

/// Rightmost root of `x³ − 4x² + 4x − 0.8` by bisection on `(2, 3)`.
fn bisection_r4() -> f64 {
    let f = |x: f64| ((x - 4.0) * x + 4.0) * x - 0.8;
    let (mut lo, mut hi) = (2.0f64, 3.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn criterion_1() -> Outcome {
    let net = model("schlogl_e3.txt");
    let e3 = analytic_schlogl_e3([1.0, 1.0, 0.8, 1.0]).map_err(|e| e.to_string())?;
    let oracle = bisection_r4();
    ensure((e3.r4 - oracle).abs() <= 1e-10, || format!("r4 {} vs bisection {oracle}", e3.r4))?;
    let b = MomentBounder::new(&net, MomentOptions::default()).map_err(|e| e.to_string())?;
    let m1 = b.bound_power(3, &pow(1)).map_err(|e| e.to_string())?;
    let m2 = b.bound_power(3, &pow(2)).map_err(|e| e.to_string())?;
    let (e1, e2) = ((m1.upper - e3.u1).abs(), (m2.upper - e3.u2).abs());
    ensure(e1 <= 1e-6 && e2 <= 1e-6, || format!("u1 {} vs {}, u2 {} vs {}", m1.upper, e3.u1, m2.upper, e3.u2))?;
    Ok(format!("u1 = {:.9} (err {e1:.1e}), u2 = {:.9} (err {e2:.1e}), r4 = {:.12}", m1.upper, m2.upper, e3.r4))
}

fn criterion_2() -> Outcome {
    let (net, _, pi) = birth_death("schlogl_unimodal.txt");
    let b = MomentBounder::new(&net, MomentOptions::default()).map_err(|e| e.to_string())?;
    let orders = [4u32, 6, 8, 10];
    let mut last_d10 = (0.0, 0.0);
    for k in 1..=3u32 {
        let exact = pi.moment(k as i32);
        let slack = 1e-6 * exact.abs().max(1.0);
        let mut prev_gap = f64::INFINITY;
        for &d in &orders {
            let m = b.bound_power(d, &pow(k)).map_err(|e| e.to_string())?;
            ensure(m.both_optimal(), || format!("alpha {k}, d = {d}: {} / {}", m.status_lo.as_str(), m.status_hi.as_str()))?;
            ensure(m.lower - slack <= exact && exact <= m.upper + slack, || {
                format!("alpha {k}, d = {d}: [{}, {}] misses {exact}", m.lower, m.upper)
            })?;
            ensure(m.gap() <= prev_gap + slack, || format!("alpha {k}: gap grows at d = {d}"))?;
            prev_gap = m.gap();
            if k == 1 && d == 10 {
                last_d10 = (m.lower, m.upper);
            }
        }
    }
    let mean = pi.mean();
    let width = last_d10.1 - last_d10.0;
    ensure(width < 0.25 * mean, || format!("d = 10 width {width} against mean {mean}"))?;

    // The large-order problem is exported, not solved.
    let cp = b.conic(25, &Target::Power(pow(1)), Sense::Maximize).map_err(|e| e.to_string())?;
    let mut buf = Vec::new();
    write_sdpa(&cp, &mut buf).map_err(|e| e.to_string())?;
    let back: cmebound::opt::ConicProgram64 = read_sdpa(&buf[..]).map_err(|e| e.to_string())?;
    ensure(back.num_vars == cp.num_vars && !back.blocks.is_empty(), || "d = 25 export does not read back".into())?;
    Ok(format!(
        "mean {mean:.6} in [{:.6}, {:.6}] at d = 10 (width {:.2}% of mean); d = 25 export: {} vars, {} blocks, {} bytes",
        last_d10.0,
        last_d10.1,
        100.0 * width / mean,
        cp.num_vars,
        cp.blocks.len(),
        buf.len()
    ))
}

fn criterion_3() -> Outcome {
    let mut worst = 0.0f64;
    let mut solves = 0usize;
    let cases = [("schlogl_unimodal.txt", 18.0), ("schlogl_bimodal.txt", 100.0), ("mm_inf.txt", 5.5)];
    for (name, c) in cases {
        let (net, bd, _) = birth_death(name);
        for (r, method) in [(40.0, LpMethod::Simplex), (40.0, LpMethod::Auto), (200.0, LpMethod::Auto), (1000.0, LpMethod::Auto)] {
            let opts = LpOptions { method, ..LpOptions::default() };
            let db = bound_distribution(&net, &x_weight(c), r, &opts).map_err(|e| format!("{name}, r = {r}: {e}"))?;
            let cf = bd_bounds(&bd, 1, c, r).map_err(|e| e.to_string())?;
            ensure(db.states.len() == cf.len(), || format!("{name}, r = {r}: {} vs {} states", db.states.len(), cf.len()))?;
            ensure(db.failures() == 0, || format!("{name}, r = {r}: {} failed solves", db.failures()))?;
            for (k, s) in db.states.iter().enumerate() {
                let x = s[0] as usize;
                let e = (db.lower[k] - cf.lower[x]).abs().max((db.upper[k] - cf.upper[x]).abs());
                worst = worst.max(e);
                ensure(e <= 1e-8, || format!("{name}, r = {r}, {}: x = {x} off by {e:e}", method.as_str()))?;
            }
            solves += 1;
        }
    }
    Ok(format!("{solves} truncations, largest per-state deviation {worst:.1e}"))
}

fn criterion_4() -> Outcome {
    let (net, _, pi) = birth_death("schlogl_unimodal.txt");
    let b = MomentBounder::new(&net, MomentOptions::default()).map_err(|e| e.to_string())?;
    let c = b.bound_power(10, &pow(1)).map_err(|e| e.to_string())?.upper;
    let w = x_weight(c);
    let mut best = 1.0f64;
    for r in [20.0, 30.0, 50.0, 100.0, 200.0, 400.0, 800.0, 1600.0, 2500.0] {
        let db = bound_distribution(&net, &w, r, &LpOptions::default()).map_err(|e| e.to_string())?;
        for (k, s) in db.states.iter().enumerate() {
            let p = pi.get(s[0] as usize);
            ensure(db.lower[k] <= p * (1.0 + 1e-10) && p <= db.upper[k] * (1.0 + 1e-10), || {
                format!("r = {r}, x = {}: {} <= {p} <= {} fails", s[0], db.lower[k], db.upper[k])
            })?;
        }
        let lsum: f64 = db.lower.iter().sum();
        ensure((db.eps_lower - (1.0 - lsum)).abs() <= 1e-12, || format!("r = {r}: eps_lower {} vs {}", db.eps_lower, 1.0 - lsum))?;
        let outside = pi.mass_from(db.states.len());
        ensure(outside <= c / r, || format!("r = {r}: tail {outside} above c/r"))?;
        best = best.min(db.eps_lower);
    }
    ensure(best < 0.01, || format!("smallest eps_lower {best}"))?;

    // Bimodal: no information until r passes the second mode.
    let (bnet, _, bpi) = birth_death("schlogl_bimodal.txt");
    let bb = MomentBounder::new(&bnet, MomentOptions::default()).map_err(|e| e.to_string())?;
    let bc = bb.bound_power(10, &pow(1)).map_err(|e| e.to_string())?.upper;
    let p = &bpi.pi;
    let mode2 = (1..p.len() - 1).filter(|&x| p[x] > 1e-12 && p[x] > p[x - 1] && p[x] >= p[x + 1]).max().ok_or("no mode")?;
    let mut trace = Vec::new();
    for r in [10.0, 25.0, 50.0, mode2 as f64, 150.0, 300.0, 1000.0, 5000.0] {
        let db = bound_distribution(&bnet, &x_weight(bc), r, &LpOptions::default()).map_err(|e| e.to_string())?;
        trace.push((r, db.eps_lower));
    }
    for &(r, e) in &trace {
        if r <= mode2 as f64 {
            ensure(e >= 0.9, || format!("bimodal eps_lower {e} at r = {r} below the second mode {mode2}"))?;
        }
    }
    let after: Vec<f64> = trace.iter().filter(|(r, _)| *r >= mode2 as f64).map(|t| t.1).collect();
    ensure(after.windows(2).all(|w| w[1] < w[0]) && *after.last().unwrap() < 0.1, || format!("bimodal trace {trace:?}"))?;
    Ok(format!(
        "c = {c:.5}, eps_lower reaches {best:.2e} at r = 2500; bimodal c = {bc:.3}, second mode {mode2}, eps_lower {:.3} there and {:.3} at r = 5000",
        trace[3].1,
        trace.last().unwrap().1
    ))
}

/// Marginal cells whose upper bound `û` is below this are lumped.
const RARE: f64 = 1e-3;

fn criterion_5() -> Outcome {
    let net = model("toggle.txt");
    let c = 5.0901e8;
    let one = Rational::from_integer(1.into());
    let w = WeightSpec::linear_power(vec![one.clone(), &one + &one], 6, c).map_err(|e| e.to_string())?;
    let opts = LpOptions::default();
    let r46 = 46f64.powi(6);
    let r76 = 76f64.powi(6);
    let d46 = bound_distribution(&net, &w, r46, &opts).map_err(|e| e.to_string())?;
    ensure((0.2..=0.5).contains(&d46.eps_lower), || format!("eps_lower at 46: {}", d46.eps_lower))?;
    let d76 = bound_distribution(&net, &w, r76, &opts).map_err(|e| e.to_string())?;
    ensure(d76.eps_lower <= 0.01 && d76.eps_upper <= 0.01, || format!("at 76: eps_lower {}, eps_upper {}", d76.eps_lower, d76.eps_upper))?;

    // Marginals against long simulations.
    let cfg = SimConfig::new(vec![0, 0], 20_000.0, 2024);
    let mut worst = f64::NEG_INFINITY;
    let mut cells = 0;
    for axis in 0..2 {
        let mb = bound_marginal(&net, &w, r76, &Partition::Axis(axis), &opts).map_err(|e| e.to_string())?;
        let reps = replicate(&net, &cfg, Some(&Partition::Axis(axis)), 16).map_err(|e| e.to_string())?;
        let emp: BTreeMap<Vec<u32>, (f64, f64)> = mean_and_se(&reps);
        // Cells below the visibility floor are too rarely visited for a
        // replica standard error; they are compared as one lumped cell.
        let mut lumped = (0.0, 0.0, vec![0.0; reps.len()]);
        let mut check = |what: String, l: f64, u: f64, m: f64, se: f64| {
            let (lo, hi) = (l - 3.0 * se, u + mb.eps_r + 3.0 * se);
            worst = worst.max(lo - m).max(m - hi);
            cells += 1;
            ensure(lo <= m && m <= hi, || format!("axis {axis}, {what}: {l} <= {m} (se {se}) <= {u} + c/r fails"))
        };
        for (i, name) in mb.cells.iter().enumerate() {
            let v: u32 = name.parse().map_err(|_| format!("cell {name}"))?;
            if mb.upper[i] < RARE {
                lumped.0 += mb.lower[i];
                lumped.1 += mb.upper[i];
                for (acc, h) in lumped.2.iter_mut().zip(&reps) {
                    *acc += h.fraction(&[v]);
                }
                continue;
            }
            let (m, se) = emp.get(&vec![v]).copied().unwrap_or((0.0, 0.0));
            check(format!("cell {v}"), mb.lower[i], mb.upper[i], m, se)?;
        }
        let n = reps.len() as f64;
        let m = lumped.2.iter().sum::<f64>() / n;
        let se = (lumped.2.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0) / n).sqrt();
        check("rare cells".into(), lumped.0, lumped.1, m, se)?;
    }
    Ok(format!(
        "|S| = {} / {}; eps_lower {:.3} at 46, eps_lower {:.2e} and eps_upper {:.2e} at 76; {cells} marginal cells bracketed, tightest margin {:.1e}",
        d46.states.len(),
        d76.states.len(),
        d46.eps_lower,
        d76.eps_lower,
        d76.eps_upper,
        -worst
    ))
}

fn criterion_6() -> Outcome {
    let net = model("schlogl_unimodal.txt");
    let db = bound_distribution(&net, &x_weight(18.0), 200.0, &LpOptions::default()).map_err(|e| e.to_string())?;
    let v = uniqueness_test(&db, DEFAULT_TOL_POS);
    let witness = match &v {
        UniquenessVerdict::UniqueCertified { state, lower } => format!("{state:?} with lower bound {lower:.3e}"),
        _ => return Err("unimodal Schlögl not certified unique".into()),
    };

    let two = model("two_class.txt");
    let one = Rational::from_integer(1.into());
    let w = WeightSpec::linear_power(vec![one.clone(), one], 1, 3.0).map_err(|e| e.to_string())?;
    let mut mass = 0.0;
    for r in [10.0, 20.0, 40.0, 80.0] {
        let db = bound_distribution(&two, &w, r, &LpOptions::default()).map_err(|e| e.to_string())?;
        ensure(uniqueness_test(&db, DEFAULT_TOL_POS) == UniquenessVerdict::Inconclusive, || format!("two classes certified at r = {r}"))?;
        let lmax = db.lower.iter().fold(0.0f64, |a, &l| a.max(l));
        ensure(lmax <= DEFAULT_TOL_POS, || format!("r = {r}: lower bound {lmax}"))?;
        mass = db.upper_mass();
    }
    ensure(mass >= 1.5, || format!("upper mass {mass} at r = 80"))?;
    for seed in [[2u32, 0], [1, 0]] {
        let cand = ergodic_candidate(&two, &w, 80.0, &seed, &LpOptions::default()).map_err(|e| e.to_string())?;
        ensure(!cand.support.is_empty() && cand.support.iter().all(|s| s[0] % 2 == seed[0] % 2), || {
            format!("candidate from {seed:?} has support {:?}", cand.support)
        })?;
    }
    Ok(format!("Schlögl unique via {witness}; two classes inconclusive for r up to 80, upper mass {mass:.3}, candidates keep parity"))
}

fn criterion_7() -> Outcome {
    let lp = suites::lp_suite(200, 20240611)?;
    let (gap, eig) = suites::sdp_suite(50, 31337)?;
    let diag = suites::diagonal_suite(30, 4242)?;
    Ok(format!("200 LPs within {lp:.1e}; 50 SDPs with gap <= {gap:.1e}, min eigenvalue {eig:.1e}; diagonal SDP vs LP within {diag:.1e}"))
}

fn criterion_8() -> Outcome {
    let mut n = 0;
    for name in ["schlogl_unimodal.txt", "schlogl_bimodal.txt", "schlogl_e3.txt", "mm_inf.txt", "toggle.txt", "two_class.txt"] {
        round_trip(&model(name))?;
        n += 1;
    }
    for name in ["schlogl_unimodal.txt", "mm_inf.txt"] {
        for d in [3, 5, 8] {
            exact_moments_feasible(name, d)?;
            n += 1;
        }
        for r in [20.0, 60.0, 150.0] {
            restriction_feasible(name, r)?;
            n += 1;
        }
    }
    for name in ["schlogl_unimodal.txt", "schlogl_bimodal.txt", "mm_inf.txt"] {
        for k in 1..=5 {
            adjoint_identity(name, k)?;
            n += 1;
        }
        detailed_balance(name)?;
        n += 1;
    }
    for (name, c) in [("schlogl_unimodal.txt", 17.97), ("mm_inf.txt", 5.0)] {
        closed_form_monotone(name, c, 30.0, 31.0)?;
        closed_form_monotone(name, c, 100.0, 400.0)?;
        n += 2;
    }
    lp_monotone("schlogl_unimodal.txt", 17.97, &[30.0, 60.0, 120.0])?;
    n += 1;
    for seed in [0, 1, u64::MAX] {
        seed_determinism("toggle.txt", vec![0, 0], seed)?;
        n += 1;
    }
    Ok(format!("{n} fixed-sample checks (randomized versions in the properties suite)"))
}

/// Written past the harness capture so the lines appear in every run.
fn report(line: String) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{line}");
}

#[test]
fn acceptance() {
    let criteria: [(fn() -> Outcome, Duration); 8] = [
        (criterion_1, Duration::from_secs(1)),
        (criterion_2, Duration::from_secs(120)),
        (criterion_3, Duration::from_secs(60)),
        (criterion_4, Duration::from_secs(300)),
        (criterion_5, Duration::from_secs(1800)),
        (criterion_6, Duration::from_secs(300)),
        (criterion_7, Duration::from_secs(120)),
        (criterion_8, Duration::from_secs(300)),
    ];
    let mut failed = Vec::new();
    for (i, (run, limit)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let out = run();
        let el = t.elapsed();
        let out = out.and_then(|s| if el <= *limit { Ok(s) } else { Err(format!("took {el:.2?}, limit {limit:?}")) });
        match out {
            Ok(s) => report(format!("criterion {}: PASS ({el:.2?}) {s}", i + 1)),
            Err(s) => {
                report(format!("criterion {}: FAIL ({el:.2?}) {s}", i + 1));
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
