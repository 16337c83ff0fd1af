use num_traits::{ToPrimitive, Zero};

use super::MomentError;
use crate::model::ReactionNetwork;
use crate::opt::{ConicProgram64, PsdBlock, Sense};
use crate::polyalg::{localizing_structure, moment_equation_over, LocalizingMatrixSymbolic, MomentVectorIndex, MultiIndex};
use crate::{Poly, Rational};

/// The outer approximation `E^d` of the stationary rational-moment vectors
/// `z_β = ⟨x^β / o⟩`, `|β| ≤ d`: the normalization `Σ o_β z_β = 1`, every
/// admissible moment equation, and the `n + 1` localizing matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrahedron {
    pub d: u32,
    pub basis: MomentVectorIndex,
    /// Coefficients of `o` over the basis.
    pub normalization: Vec<Rational>,
    /// `(α, g)` for every nonzero moment equation with `1 ≤ |α| ≤ d − d_a + 1`.
    pub equations: Vec<(MultiIndex, Vec<Rational>)>,
    pub blocks: Vec<LocalizingMatrixSymbolic>,
    pub network_digest: String,
}

/// Smallest admissible order: `d ≥ d_o` and `d ≥ d_a − 1`.
pub fn min_order(net: &ReactionNetwork) -> u32 {
    net.d_o().max(net.d_a().saturating_sub(1)).max(1)
}

pub fn build_spectrahedron(net: &ReactionNetwork, d: u32) -> Result<Spectrahedron, MomentError> {
    let needed = min_order(net);
    if d < needed {
        return Err(MomentError::OrderTooSmall { d, needed });
    }
    let n = net.n();
    let basis = MomentVectorIndex::new(n, d);
    let normalization = net.denominator().coefficients_over(basis.basis(), |b| basis.position(b)).expect("deg o ≤ d");
    let max_alpha = (d + 1).saturating_sub(net.d_a());
    let mut equations = Vec::new();
    for k in 1..=max_alpha {
        for alpha in MultiIndex::of_degree(n, k) {
            let g = moment_equation_over(net, &alpha, &basis)?;
            if g.iter().any(|c| !c.is_zero()) {
                equations.push((alpha, g));
            }
        }
    }
    Ok(Spectrahedron { d, basis, normalization, equations, blocks: localizing_structure(n, d), network_digest: net.digest() })
}

fn f64_of(q: &Rational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

impl Spectrahedron {
    pub fn num_vars(&self) -> usize {
        self.basis.len()
    }

    /// `∏ σ_i^{β_i}` per basis element.
    pub fn variable_scales(&self, sigma: &[f64]) -> Vec<f64> {
        self.basis.basis().iter().map(|b| b.as_slice().iter().zip(sigma).map(|(&e, &s)| s.powi(e as i32)).product()).collect()
    }

    /// Coefficients of a target polynomial over the basis.
    pub fn objective_coeffs(&self, f: &Poly) -> Result<Vec<Rational>, MomentError> {
        f.coefficients_over(self.basis.basis(), |b| self.basis.position(b)).map_err(|_| MomentError::TargetDegree { degree: f.degree(), d: self.d })
    }

    /// The SDP `min/max Σ f_β y_β` over `E^d` in the scaled variables
    /// `ŷ_β = y_β / σ^β`. Localizing blocks are congruence-scaled by
    /// `diag(σ^a)` (times `√σ_i` for `M^i`), which turns every block
    /// coefficient into 1.
    pub fn to_conic(&self, f: &[Rational], sense: Sense, sigma: &[f64]) -> ConicProgram64 {
        let scales = self.variable_scales(sigma);
        let nv = self.num_vars();
        let mut cp = ConicProgram64::new(nv);
        let row = |coeffs: &[Rational]| -> Vec<(usize, f64)> {
            let mut r: Vec<(usize, f64)> = coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(k, c)| (k, f64_of(c) * scales[k])).collect();
            let mx = r.iter().fold(0.0f64, |a, e| a.max(e.1.abs()));
            if mx > 0.0 {
                for e in &mut r {
                    e.1 /= mx;
                }
            }
            r
        };
        let norm = row(&self.normalization);
        let norm_scale =
            self.normalization.iter().enumerate().filter(|(_, c)| !c.is_zero()).fold(0.0f64, |a, (k, c)| a.max((f64_of(c) * scales[k]).abs()));
        cp.add_eq(norm, 1.0 / norm_scale);
        for (_, g) in &self.equations {
            cp.add_eq(row(g), 0.0);
        }
        for m in &self.blocks {
            let mut blk = PsdBlock::new(m.dim());
            for a in 0..m.dim() {
                for b in 0..=a {
                    let k = self.basis.position(&m.entry(a, b)).expect("entry degree ≤ d");
                    blk.add(Some(k), a, b, 1.0);
                }
            }
            cp.add_block(blk);
        }
        let c: Vec<f64> = f.iter().zip(&scales).map(|(q, s)| f64_of(q) * s).collect();
        cp.set_objective(c, sense);
        cp
    }

    /// Largest equality violation and smallest block eigenvalue of a moment
    /// vector `y`, both measured in the scaled coordinates.
    pub fn check_point(&self, y: &[f64], sigma: &[f64]) -> (f64, f64) {
        let cp = self.to_conic(&vec![Rational::zero(); self.num_vars()], Sense::Minimize, sigma);
        let scales = self.variable_scales(sigma);
        let yh: Vec<f64> = y.iter().zip(&scales).map(|(v, s)| v / s).collect();
        (cp.max_eq_violation(&yh), cp.min_block_eigenvalue(&yh))
    }
}
