//! Diagonal rescaling of conic programs.
//!
//! Variables are substituted `y_i = s_i ŷ_i` and every block is replaced by the
//! congruence `D⁻¹ F D⁻¹` with a positive diagonal `D`, which leaves the PSD
//! constraint unchanged. Equality rows are renormalized to unit max-norm and
//! the objective to unit max-coefficient; [`ConicUnscale`] undoes all of it.

use crate::conic::ConicProgram;
use crate::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct ConicScaling<T> {
    /// `s_i > 0` per variable.
    pub var_scale: Vec<T>,
    /// Diagonal of `D` per block.
    pub block_diag: Vec<Vec<T>>,
}

impl<T: Real> ConicScaling<T> {
    pub fn identity(cp: &ConicProgram<T>) -> Self {
        Self { var_scale: vec![T::one(); cp.num_vars], block_diag: cp.blocks.iter().map(|b| vec![T::one(); b.dim]).collect() }
    }

    /// Variable scaling only.
    pub fn variables(cp: &ConicProgram<T>, var_scale: Vec<T>) -> Self {
        Self { var_scale, ..Self::identity(cp) }
    }
}

/// Maps scaled solutions back to the original program.
#[derive(Debug, Clone, PartialEq)]
pub struct ConicUnscale<T> {
    pub var_scale: Vec<T>,
    /// Original objective = `objective_scale` × scaled objective.
    pub objective_scale: T,
}

impl<T: Real> ConicUnscale<T> {
    pub fn point(&self, y_hat: &[T]) -> Vec<T> {
        y_hat.iter().zip(&self.var_scale).map(|(&v, &s)| v * s).collect()
    }

    /// Inverse of [`Self::point`].
    pub fn scale_point(&self, y: &[T]) -> Vec<T> {
        y.iter().zip(&self.var_scale).map(|(&v, &s)| v / s).collect()
    }

    pub fn value(&self, v_hat: T) -> T {
        v_hat * self.objective_scale
    }
}

/// Applies `scaling` to `cp`. Scales must be positive and finite.
pub fn scale_conic<T: Real>(cp: &ConicProgram<T>, scaling: &ConicScaling<T>) -> (ConicProgram<T>, ConicUnscale<T>) {
    assert_eq!(scaling.var_scale.len(), cp.num_vars);
    assert_eq!(scaling.block_diag.len(), cp.blocks.len());
    assert!(scaling.var_scale.iter().all(|&s| s > T::zero() && s.is_finite()));
    let s = &scaling.var_scale;
    let mut out = cp.clone();
    for (blk, dg) in out.blocks.iter_mut().zip(&scaling.block_diag) {
        for e in blk.constant.iter_mut() {
            e.2 = e.2 / (dg[e.0] * dg[e.1]);
        }
        for (k, es) in blk.coeffs.iter_mut() {
            for e in es.iter_mut() {
                e.2 = e.2 * s[*k] / (dg[e.0] * dg[e.1]);
            }
        }
    }
    for (row, rhs) in out.eq_rows.iter_mut().zip(out.eq_rhs.iter_mut()) {
        for e in row.iter_mut() {
            e.1 *= s[e.0];
        }
        let mx = row.iter().fold(T::zero(), |a, e| a.max(e.1.abs()));
        if mx > T::zero() {
            for e in row.iter_mut() {
                e.1 /= mx;
            }
            *rhs /= mx;
        }
    }
    for (c, &si) in out.objective.iter_mut().zip(s) {
        *c *= si;
    }
    let kappa = out.objective.iter().fold(T::zero(), |a, &c| a.max(c.abs()));
    let kappa = if kappa > T::zero() { kappa } else { T::one() };
    for c in out.objective.iter_mut() {
        *c /= kappa;
    }
    (out, ConicUnscale { var_scale: s.clone(), objective_scale: kappa })
}

/// Ratio of the largest to the smallest nonzero block coefficient magnitude.
pub fn coefficient_spread<T: Real>(cp: &ConicProgram<T>) -> T {
    let mut lo = T::infinity();
    let mut hi = T::zero();
    for blk in &cp.blocks {
        for (_, es) in &blk.coeffs {
            for e in es {
                let a = e.2.abs();
                if a > T::zero() {
                    lo = lo.min(a);
                    hi = hi.max(a);
                }
            }
        }
    }
    if hi == T::zero() {
        T::one()
    } else {
        hi / lo
    }
}
