//! Exact solution of the truncation LP through the extreme rays of the
//! stationarity cone.
//!
//! Let `G = −A_NN` be the interior block of the stationarity rows. When every
//! interior state can leave `N_r` (so `G` is a nonsingular M-matrix), each
//! `π ≥ 0` with `A π = 0` is `π = Σ_b π(b) ρ_b` over the boundary states
//! `b ∈ S_r \ N_r`, where `ρ_b` is the flux response to a unit mass at `b`.
//! The rays are computed by state reduction, which only adds and divides
//! nonnegative numbers and keeps tiny entries accurate to full relative
//! precision. The polytope then becomes the set of `μ ≥ 0` with
//! `Σ μ ∈ [mass_lo, 1]` and `Σ τ_b μ_b ≤ c`, whose vertices have at most
//! two nonzero weights.

use std::collections::HashMap;

use super::polytope::TruncationPolytope;
use super::truncation::Truncation;
use crate::model::{shift_state, ReactionNetwork};

/// Largest `|S_r| · |B|` for which the rays are stored densely.
const MAX_RAY_ENTRIES: usize = 40_000_000;
/// Largest boundary handled by vertex enumeration.
const MAX_BOUNDARY: usize = 3000;
const RESCALE: f64 = 1e200;

#[derive(Debug, Clone)]
pub struct BoundaryRays {
    /// Truncation indices of the boundary states.
    pub boundary: Vec<usize>,
    n: usize,
    /// `rho[k * nb + b] = ρ_b(k)`, each ray normalized to unit mass.
    rho: Vec<f64>,
    /// `τ_b = Σ_k w(k) ρ_b(k)`.
    pub tail: Vec<f64>,
    mass_lo: f64,
    c: f64,
}

/// Why the ray decomposition does not apply.
#[derive(Debug, Clone, PartialEq)]
pub enum RaysUnavailable {
    /// Some interior states cannot leave `N_r`: a closed class lies inside.
    ClosedInterior,
    TooLarge,
    NoBoundary,
}

impl BoundaryRays {
    pub fn new(net: &ReactionNetwork, trunc: &Truncation, tp: &TruncationPolytope) -> Result<Self, RaysUnavailable> {
        let n = trunc.len();
        let boundary: Vec<usize> = (0..n).filter(|&k| !trunc.interior[k]).collect();
        let nb = boundary.len();
        if nb == 0 {
            return Err(RaysUnavailable::NoBoundary);
        }
        if nb > MAX_BOUNDARY || n.saturating_mul(nb) > MAX_RAY_ENTRIES {
            return Err(RaysUnavailable::TooLarge);
        }
        let interior: Vec<usize> = (0..n).filter(|&k| trunc.interior[k]).collect();
        let mut local = vec![usize::MAX; n];
        for (i, &k) in interior.iter().enumerate() {
            local[k] = i;
        }
        let mut bpos = vec![usize::MAX; n];
        for (b, &k) in boundary.iter().enumerate() {
            bpos[k] = b;
        }
        let ni = interior.len();

        // Rates between interior states, leaks out of N_r, and the flux
        // entering each interior state from each boundary state.
        let mut out: Vec<HashMap<usize, f64>> = vec![HashMap::new(); ni];
        let mut inn: Vec<Vec<usize>> = vec![Vec::new(); ni];
        let mut leak = vec![0.0f64; ni];
        let mut src = vec![0.0f64; ni * nb];
        for (k, x) in trunc.states.iter().enumerate() {
            for j in 0..net.m() {
                let a = net.propensity_f64(j, x);
                if !(a > 0.0) {
                    continue;
                }
                let dest = shift_state(x, net.net_change(j), 1).and_then(|y| trunc.index_of(&y));
                if dest == Some(k) {
                    continue;
                }
                let into = dest.map(|d| local[d]).filter(|&d| d != usize::MAX);
                match (local[k], into) {
                    (usize::MAX, Some(d)) => src[d * nb + bpos[k]] += a,
                    (usize::MAX, None) => {}
                    (i, Some(d)) => {
                        let e = out[i].entry(d).or_insert(0.0);
                        if *e == 0.0 {
                            inn[d].push(i);
                        }
                        *e += a;
                    }
                    (i, None) => leak[i] += a,
                }
            }
        }

        // State reduction in index order; each step records what the
        // back substitution needs.
        let mut alive = vec![true; ni];
        let mut q_at = vec![0.0f64; ni];
        let mut feeders: Vec<Vec<(usize, f64)>> = vec![Vec::new(); ni];
        for k in 0..ni {
            alive[k] = false;
            let q: f64 = out[k].values().sum::<f64>() + leak[k];
            if !(q > 0.0) || !q.is_finite() {
                return Err(RaysUnavailable::ClosedInterior);
            }
            q_at[k] = q;
            let outs: Vec<(usize, f64)> = out[k].iter().map(|(&j, &r)| (j, r)).filter(|&(j, _)| alive[j]).collect();
            let ins: Vec<(usize, f64)> =
                std::mem::take(&mut inn[k]).into_iter().filter(|&i| alive[i]).filter_map(|i| out[i].remove(&k).map(|r| (i, r))).collect();
            for &(i, rik) in &ins {
                let f = rik / q;
                leak[i] += f * leak[k];
                for &(j, rkj) in &outs {
                    if j == i {
                        continue;
                    }
                    let e = out[i].entry(j).or_insert(0.0);
                    if *e == 0.0 {
                        inn[j].push(i);
                    }
                    *e += f * rkj;
                }
            }
            if src[k * nb..(k + 1) * nb].iter().any(|&v| v != 0.0) {
                let sk: Vec<f64> = src[k * nb..(k + 1) * nb].to_vec();
                for &(j, rkj) in &outs {
                    let f = rkj / q;
                    for (d, s) in src[j * nb..(j + 1) * nb].iter_mut().zip(&sk) {
                        *d += f * s;
                    }
                }
            }
            feeders[k] = ins;
            out[k] = HashMap::new();
        }

        // Back substitution, all rays at once. `scale[b]` tracks the factor
        // applied to ray b to keep it in range.
        let mut vals = vec![0.0f64; ni * nb];
        let mut scale = vec![1.0f64; nb];
        for k in (0..ni).rev() {
            let q = q_at[k];
            let mut row: Vec<f64> = (0..nb).map(|b| src[k * nb + b] * scale[b]).collect();
            for &(i, r) in &feeders[k] {
                for (v, &p) in row.iter_mut().zip(&vals[i * nb..(i + 1) * nb]) {
                    *v += r * p;
                }
            }
            for v in row.iter_mut() {
                *v /= q;
            }
            vals[k * nb..(k + 1) * nb].copy_from_slice(&row);
            for b in 0..nb {
                if row[b] > RESCALE {
                    for kk in k..ni {
                        vals[kk * nb + b] /= RESCALE;
                    }
                    scale[b] /= RESCALE;
                }
            }
        }

        let mut rho = vec![0.0f64; n * nb];
        for b in 0..nb {
            rho[boundary[b] * nb + b] = scale[b];
        }
        for (i, &k) in interior.iter().enumerate() {
            rho[k * nb..(k + 1) * nb].copy_from_slice(&vals[i * nb..(i + 1) * nb]);
        }
        let mut mass = vec![0.0f64; nb];
        for k in 0..n {
            for b in 0..nb {
                mass[b] += rho[k * nb + b];
            }
        }
        for k in 0..n {
            for b in 0..nb {
                rho[k * nb + b] /= mass[b];
            }
        }
        let mut tail = vec![0.0f64; nb];
        for k in 0..n {
            let w = tp.weights[k];
            if w != 0.0 {
                for b in 0..nb {
                    tail[b] += w * rho[k * nb + b];
                }
            }
        }
        Ok(Self { boundary, n, rho, tail, mass_lo: tp.mass_lo, c: tp.c })
    }

    pub fn num_rays(&self) -> usize {
        self.boundary.len()
    }

    /// `ρ_b(k)`.
    pub fn ray_value(&self, k: usize, b: usize) -> f64 {
        self.rho[k * self.boundary.len() + b]
    }

    /// Objective values `φ_b = Σ_k f_k ρ_b(k)` of a sparse objective.
    pub fn project(&self, f: &[(usize, f64)]) -> Vec<f64> {
        let nb = self.boundary.len();
        let mut phi = vec![0.0f64; nb];
        for &(k, v) in f {
            for (p, &r) in phi.iter_mut().zip(&self.rho[k * nb..(k + 1) * nb]) {
                *p += v * r;
            }
        }
        phi
    }

    pub fn is_feasible(&self) -> bool {
        self.maximize(&vec![0.0; self.num_rays()]).is_some()
    }

    /// Maximizes `Σ φ_b μ_b`; `None` when the polytope is empty.
    pub fn maximize(&self, phi: &[f64]) -> Option<(f64, Vec<(usize, f64)>)> {
        let nb = phi.len();
        let (lo, c) = (self.mass_lo, self.c);
        let slack = 1e-12;
        let mut best: Option<(f64, Vec<(usize, f64)>)> = None;
        let mut offer = |v: f64, mu: Vec<(usize, f64)>| {
            if best.as_ref().map_or(true, |(bv, _)| v > *bv) {
                best = Some((v, mu));
            }
        };
        if lo <= 0.0 {
            offer(0.0, Vec::new());
        }
        let masses: &[f64] = if lo > 0.0 && lo < 1.0 { &[lo, 1.0] } else { &[1.0] };
        for b in 0..nb {
            let tb = self.tail[b];
            let top = if tb > 0.0 { (c / tb).min(1.0) } else { 1.0 };
            if top + slack < lo {
                continue;
            }
            let hi = top.max(lo);
            offer(phi[b] * hi, vec![(b, hi)]);
            if lo > 0.0 {
                offer(phi[b] * lo, vec![(b, lo)]);
            }
        }
        // Two rays with the tail row and one mass end tight.
        for &m in masses {
            let level = c / m;
            let below: Vec<usize> = (0..nb).filter(|&b| self.tail[b] < level).collect();
            let above: Vec<usize> = (0..nb).filter(|&b| self.tail[b] > level).collect();
            if below.is_empty() || above.is_empty() {
                continue;
            }
            for &a in &below {
                let ta = self.tail[a];
                for &b in &above {
                    let tb = self.tail[b];
                    let mb = (c - ta * m) / (tb - ta);
                    let ma = m - mb;
                    if ma < 0.0 || mb < 0.0 {
                        continue;
                    }
                    offer(phi[a] * ma + phi[b] * mb, vec![(a, ma), (b, mb)]);
                }
            }
        }
        best
    }

    pub fn minimize(&self, phi: &[f64]) -> Option<(f64, Vec<(usize, f64)>)> {
        let neg: Vec<f64> = phi.iter().map(|v| -v).collect();
        self.maximize(&neg).map(|(v, mu)| (-v, mu))
    }

    /// The point `Σ μ_b ρ_b` over `S_r`.
    pub fn point(&self, mu: &[(usize, f64)]) -> Vec<f64> {
        let nb = self.boundary.len();
        (0..self.n).map(|k| mu.iter().map(|&(b, m)| m * self.rho[k * nb + b]).sum()).collect()
    }
}
