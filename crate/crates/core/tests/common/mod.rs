//! Model loading and the property checks shared by the randomized suite and
//! the acceptance run. Every check returns a description of the first
//! violation it finds.

#![allow(dead_code)]

use std::path::PathBuf;

use cmebound::birthdeath::{analytic_pi, bd_bounds, detailed_balance_residual, BirthDeathModel, StationaryDistribution};
use cmebound::model::{network_from_json, network_to_json, parse_network, parse_template, ReactionNetwork};
use cmebound::moments::build_spectrahedron;
use cmebound::polyalg::{generator_polynomial, CompiledPoly, MultiIndex, Polynomial};
use cmebound::ssa::{occupation_histogram, SimConfig};
use cmebound::statebounds::{bound_distribution, build_polytope, build_truncation, LpOptions, WeightSpec, DEFAULT_STATE_CAP};
use cmebound::Rational;
use num_traits::ToPrimitive;

pub type Check = Result<(), String>;

pub fn model(name: &str) -> ReactionNetwork {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../models").join(name);
    parse_template(&std::fs::read_to_string(p).unwrap()).unwrap().instantiate(&[]).unwrap()
}

pub fn birth_death(name: &str) -> (ReactionNetwork, BirthDeathModel, StationaryDistribution) {
    let net = model(name);
    let bd = BirthDeathModel::from_network(&net).unwrap();
    let pi = analytic_pi(&bd, 1e-300).unwrap();
    (net, bd, pi)
}

pub fn x_weight(c: f64) -> WeightSpec {
    WeightSpec::detect(Polynomial::var(1, 0), c).unwrap()
}

/// Text and JSON serializations parse back to the same network.
pub fn round_trip(net: &ReactionNetwork) -> Check {
    let again = parse_network(&net.to_dsl()).map_err(|e| format!("reparse: {e}"))?;
    if network_to_json(&again) != network_to_json(net) {
        return Err(format!("text round trip changed the network:\n{}", net.to_dsl()));
    }
    let from_json = network_from_json(&network_to_json(net)).map_err(|e| format!("json: {e}"))?;
    if from_json.digest() != net.digest() {
        return Err("json round trip changed the digest".into());
    }
    Ok(())
}

/// `Σ_x g_α(x) π(x) = 0` for the analytic distribution, relative to `Σ |g_α π|`.
pub fn adjoint_identity(name: &str, k: u32) -> Check {
    let (net, _, pi) = birth_death(name);
    let g = CompiledPoly::new(&generator_polynomial(&net, &MultiIndex::new(vec![k])), |q: &Rational| q.to_f64().unwrap());
    let (mut sum, mut scale) = (0.0f64, 0.0f64);
    for (x, p) in pi.pi.iter().enumerate() {
        let v = g.eval(&[x as u32]) * p;
        sum += v;
        scale += v.abs();
    }
    if sum.abs() > 1e-10 * scale {
        return Err(format!("{name}, alpha {k}: sum {sum:e} against scale {scale:e}"));
    }
    Ok(())
}

/// The exact moment vector satisfies every constraint of the spectrahedron.
pub fn exact_moments_feasible(name: &str, d: u32) -> Check {
    let (net, _, pi) = birth_death(name);
    let s = build_spectrahedron(&net, d).map_err(|e| e.to_string())?;
    let y: Vec<f64> = s.basis.basis().iter().map(|b| pi.moment(b.get(0) as i32)).collect();
    let (eq, eig) = s.check_point(&y, &[pi.mean()]);
    if eq > 1e-9 || eig < -1e-8 {
        return Err(format!("{name}, d = {d}: equality violation {eq:e}, min eigenvalue {eig:e}"));
    }
    Ok(())
}

/// `π` restricted to `S_r` lies in the truncation polytope.
pub fn restriction_feasible(name: &str, r: f64) -> Check {
    let (net, _, pi) = birth_death(name);
    let w = x_weight(pi.mean() * (1.0 + 1e-12));
    let t = build_truncation(&net, &w, r, DEFAULT_STATE_CAP).map_err(|e| e.to_string())?;
    let tp = build_polytope(&net, &t, &w).map_err(|e| e.to_string())?;
    let restricted: Vec<f64> = t.states.iter().map(|s| pi.get(s[0] as usize)).collect();
    let res = tp.check_point(&restricted);
    if res.max() > 1e-10 {
        return Err(format!("{name}, r = {r}: {res:?}"));
    }
    Ok(())
}

/// Closed-form bounds at `r` and `r2 > r` are nested.
pub fn closed_form_monotone(name: &str, c: f64, r: f64, r2: f64) -> Check {
    let (_, bd, _) = birth_death(name);
    let a = bd_bounds(&bd, 1, c, r).map_err(|e| e.to_string())?;
    let b = bd_bounds(&bd, 1, c, r2).map_err(|e| e.to_string())?;
    for x in 0..a.len() {
        if a.lower[x] > b.lower[x] * (1.0 + 1e-12) + 1e-300 || b.upper[x] > a.upper[x] * (1.0 + 1e-12) + 1e-300 {
            return Err(format!("{name}, r = {r} -> {r2}: x = {x}"));
        }
    }
    Ok(())
}

/// LP bounds over an increasing sequence of truncations are nested.
pub fn lp_monotone(name: &str, c: f64, rs: &[f64]) -> Check {
    let net = model(name);
    let w = x_weight(c);
    let dbs = rs.iter().map(|&r| bound_distribution(&net, &w, r, &LpOptions::default())).collect::<Result<Vec<_>, _>>().map_err(|e| e.to_string())?;
    for pair in dbs.windows(2) {
        let (a, b) = (&pair[0], &pair[1]);
        for (k, s) in a.states.iter().enumerate() {
            let kb = b.index_of(s).ok_or("truncations not nested")?;
            if a.lower[k] > b.lower[kb] + 1e-9 || b.upper[kb] > a.upper[k] + 1e-9 {
                return Err(format!("{name}, r = {} -> {}: state {s:?}", a.r, b.r));
            }
        }
    }
    Ok(())
}

pub fn detailed_balance(name: &str) -> Check {
    let (_, bd, pi) = birth_death(name);
    let res = detailed_balance_residual(&bd, &pi);
    if res > 1e-12 {
        return Err(format!("{name}: residual {res:e}"));
    }
    Ok(())
}

/// Two runs with the same seed produce identical occupation times.
pub fn seed_determinism(name: &str, x0: Vec<u32>, seed: u64) -> Check {
    let net = model(name);
    let cfg = SimConfig::new(x0, 5.0, seed);
    let a = occupation_histogram(&net, &cfg, None).map_err(|e| e.to_string())?;
    let b = occupation_histogram(&net, &cfg, None).map_err(|e| e.to_string())?;
    if a.time != b.time || a.events != b.events {
        return Err(format!("{name}: seed {seed} not reproducible"));
    }
    Ok(())
}
