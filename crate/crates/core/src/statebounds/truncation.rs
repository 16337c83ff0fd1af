use std::collections::HashMap;

use num_traits::Zero;

use super::weight::{rational_of_f64, WeightSpec};
use super::StateBoundsError;
use crate::model::{shift_state, ReactionNetwork, State};
use crate::polyalg::MultiIndex;

/// `S_r = {x : w(x) < r}` in graded-lex order and the interior
/// `N_r = {x ∈ S_r : every state feeding x lies in S_r}`.
#[derive(Debug, Clone)]
pub struct Truncation {
    pub r: f64,
    pub states: Vec<State>,
    /// `interior[k]` is true when `states[k] ∈ N_r`.
    pub interior: Vec<bool>,
    /// Incoming transitions `(source index, reaction)` for interior states.
    pub(crate) incoming: Vec<Vec<(usize, usize)>>,
    index: HashMap<State, usize>,
}

impl Truncation {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn index_of(&self, x: &[u32]) -> Option<usize> {
        self.index.get(x).copied()
    }

    pub fn interior_count(&self) -> usize {
        self.interior.iter().filter(|&&b| b).count()
    }

    pub fn contains(&self, x: &[u32]) -> bool {
        self.index.contains_key(x)
    }
}

/// Default cap on `|S_r|`.
pub const DEFAULT_STATE_CAP: usize = 250_000;

/// Enumerates `S_r` by depth-first search over coordinates, relying on `w`
/// being nondecreasing in each coordinate; every state is checked against
/// the modelling premises.
pub fn build_truncation(net: &ReactionNetwork, w: &WeightSpec, r: f64, cap: usize) -> Result<Truncation, StateBoundsError> {
    let n = net.n();
    if w.nvars() != n {
        return Err(StateBoundsError::Invalid(format!("weight has {} variables, network has {n} species", w.nvars())));
    }
    if !r.is_finite() {
        return Err(StateBoundsError::Invalid("truncation level must be finite".into()));
    }
    let r_exact = rational_of_f64(r);
    let mut states: Vec<State> = Vec::new();
    let mut x = vec![0u32; n];
    enumerate(net, w, r, &r_exact, &mut x, 0, &mut states, cap)?;
    if states.is_empty() {
        return Err(StateBoundsError::EmptyTruncation { r });
    }
    states.sort_by(|a, b| MultiIndex::new(a.clone()).cmp(&MultiIndex::new(b.clone())));
    let index: HashMap<State, usize> = states.iter().enumerate().map(|(k, s)| (s.clone(), k)).collect();
    let mut interior = Vec::with_capacity(states.len());
    let mut incoming = Vec::with_capacity(states.len());
    for s in &states {
        net.check_state(s)?;
        let mut inc = Vec::new();
        let mut inside = true;
        for j in 0..net.m() {
            let Some(y) = shift_state(s, net.net_change(j), -1) else { continue };
            if !net.contains(&y) || net.propensity_eval(j, &y)?.is_zero() {
                continue;
            }
            match index.get(&y) {
                Some(&k) => inc.push((k, j)),
                None => inside = false,
            }
        }
        interior.push(inside);
        incoming.push(if inside { inc } else { Vec::new() });
    }
    Ok(Truncation { r, states, interior, incoming, index })
}

#[allow(clippy::too_many_arguments)]
fn enumerate(
    net: &ReactionNetwork,
    w: &WeightSpec,
    r: f64,
    r_exact: &crate::Rational,
    x: &mut Vec<u32>,
    i: usize,
    out: &mut Vec<State>,
    cap: usize,
) -> Result<(), StateBoundsError> {
    let n = x.len();
    if i == n {
        if net.contains(x) {
            if out.len() >= cap {
                return Err(StateBoundsError::StateCap { cap, r });
            }
            out.push(x.clone());
        }
        return Ok(());
    }
    let limit = w.axis_extent(i, r).ceil() as u64 + 1;
    let mut k: u64 = 0;
    loop {
        x[i] = k as u32;
        for v in x.iter_mut().skip(i + 1) {
            *v = 0;
        }
        if !w.below(x, r, r_exact) {
            break;
        }
        if k > limit {
            return Err(StateBoundsError::NotNormLike(format!("sublevel set exceeds its bounding box along species {}", i + 1)));
        }
        enumerate(net, w, r, r_exact, x, i + 1, out, cap)?;
        k += 1;
    }
    x[i] = 0;
    Ok(())
}
