use serde_json::{json, Value};

use super::bounds::{DistributionBounds, MarginalBounds, UniquenessVerdict};

fn state_cols(n: usize, species: &[String]) -> String {
    (0..n).map(|i| species.get(i).cloned().unwrap_or_else(|| format!("x{}", i + 1))).collect::<Vec<_>>().join(",")
}

/// One row per state: coordinates, `lower`, `upper`, and both statuses.
pub fn distribution_csv(db: &DistributionBounds, species: &[String]) -> String {
    let n = db.states.first().map_or(species.len(), |s| s.len());
    let mut s = format!("{},lower,upper,status_lo,status_hi\n", state_cols(n, species));
    for k in 0..db.states.len() {
        let coords = db.states[k].iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",");
        s.push_str(&format!("{coords},{:e},{:e},{},{}\n", db.lower[k], db.upper[k], db.status_lo[k].as_str(), db.status_hi[k].as_str()));
    }
    s
}

pub fn distribution_header(db: &DistributionBounds, w_label: &str) -> Value {
    json!({
        "r": db.r,
        "w": w_label,
        "c": db.c,
        "eps_r": db.eps_r,
        "eps_lower": db.eps_lower,
        "eps_upper": db.eps_upper,
        "states": db.states.len(),
        "interior_states": db.interior_count,
        "failed_solves": db.failures(),
        "uninformative": db.uninformative(),
    })
}

pub fn marginal_csv(mb: &MarginalBounds) -> String {
    let mut s = String::from("cell,lower,upper,upper_with_tail,status_lo,status_hi\n");
    for i in 0..mb.cells.len() {
        s.push_str(&format!(
            "{},{:e},{:e},{:e},{},{}\n",
            mb.cells[i],
            mb.lower[i],
            mb.upper[i],
            mb.upper_with_tail(i),
            mb.status_lo[i].as_str(),
            mb.status_hi[i].as_str()
        ));
    }
    s
}

pub fn marginal_header(mb: &MarginalBounds, w_label: &str, partition: &str) -> Value {
    json!({
        "r": mb.r,
        "w": w_label,
        "c": mb.c,
        "eps_r": mb.eps_r,
        "partition": partition,
        "cells": mb.cells.len(),
        "eps_lower": mb.eps_lower,
        "eps_upper": mb.eps_upper,
        "uninformative": mb.eps_r >= 1.0,
    })
}

/// Plain-language error statements with the computed numbers.
pub fn certificate(db: &DistributionBounds, w_label: &str, verdict: &UniquenessVerdict) -> Value {
    let mut statements = vec![
        format!(
            "every stationary solution pi with <{w_label}> <= {c} gives mass at most {e:e} to the states with w >= {r}",
            c = db.c,
            e = db.eps_r.min(1.0),
            r = db.r
        ),
        format!("for every such pi: lower(x) <= pi(x) for all states and pi(x) <= upper(x) on the truncation ({} states)", db.states.len()),
        format!("total variation distance between the lower bounds and pi equals 1 - sum(lower) = {:e}", db.eps_lower),
        format!("total variation distance between the upper bounds and pi is at most max(sum(upper) - 1 + c/r, c/r) = {:e}", db.eps_upper),
    ];
    if db.failures() > 0 {
        statements.push(format!("{} per-state solves failed; their lower bounds were set to 0 and upper bounds to 1", db.failures()));
    }
    if db.uninformative() {
        statements.push("c/r >= 1: the mass window is empty of information and the lower bounds are trivial".into());
    }
    let uniqueness = match verdict {
        UniquenessVerdict::UniqueCertified { state, lower } => json!({
            "verdict": verdict.as_str(),
            "witness": state,
            "witness_lower": lower,
            "statement": "a state has a positive lower bound, so at most one stationary solution satisfies the moment bound",
        }),
        UniquenessVerdict::Inconclusive => json!({
            "verdict": verdict.as_str(),
            "statement": "no positive lower bound at this truncation; uniqueness is neither shown nor refuted",
        }),
    };
    json!({
        "r": db.r,
        "w": w_label,
        "c": db.c,
        "eps_r": db.eps_r,
        "eps_lower": db.eps_lower,
        "eps_upper": db.eps_upper,
        "uninformative": db.uninformative(),
        "statements": statements,
        "uniqueness": uniqueness,
    })
}
