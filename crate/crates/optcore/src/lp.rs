use std::collections::HashMap;

use crate::{OptError, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sense {
    Minimize,
    Maximize,
}

impl Sense {
    /// `+1` for minimization, `-1` for maximization.
    pub fn sign<T: Real>(self) -> T {
        match self {
            Sense::Minimize => T::one(),
            Sense::Maximize => -T::one(),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Sense::Minimize => "min",
            Sense::Maximize => "max",
        }
    }
}

/// Sparse row: `(variable index, coefficient)` pairs.
pub type SparseRow<T> = Vec<(usize, T)>;

/// `min/max c·x  s.t.  A_eq x = b,  lo_i ≤ a_i·x ≤ hi_i,  l ≤ x ≤ u`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram<T> {
    pub names: Vec<String>,
    index: HashMap<String, usize>,
    pub lower: Vec<T>,
    pub upper: Vec<T>,
    pub objective: SparseRow<T>,
    pub sense: Sense,
    pub eq_rows: Vec<SparseRow<T>>,
    pub eq_rhs: Vec<T>,
    pub ineq_rows: Vec<SparseRow<T>>,
    pub ineq_lo: Vec<T>,
    pub ineq_hi: Vec<T>,
}

impl<T: Real> Default for LinearProgram<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: Real> LinearProgram<T> {
    pub fn new() -> Self {
        Self {
            names: Vec::new(),
            index: HashMap::new(),
            lower: Vec::new(),
            upper: Vec::new(),
            objective: Vec::new(),
            sense: Sense::Minimize,
            eq_rows: Vec::new(),
            eq_rhs: Vec::new(),
            ineq_rows: Vec::new(),
            ineq_lo: Vec::new(),
            ineq_hi: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.names.len()
    }

    pub fn num_rows(&self) -> usize {
        self.eq_rows.len() + self.ineq_rows.len()
    }

    /// Adds a variable with bounds `[lo, hi]` (either may be infinite).
    pub fn add_var(&mut self, name: impl Into<String>, lo: T, hi: T) -> usize {
        let name = name.into();
        let id = self.names.len();
        self.index.insert(name.clone(), id);
        self.names.push(name);
        self.lower.push(lo);
        self.upper.push(hi);
        id
    }

    /// Adds `n` variables in `[0, ∞)` named `{prefix}{k}`.
    pub fn add_nonneg_vars(&mut self, prefix: &str, n: usize) -> std::ops::Range<usize> {
        let start = self.num_vars();
        for k in 0..n {
            self.add_var(format!("{prefix}{k}"), T::zero(), T::infinity());
        }
        start..start + n
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn set_objective(&mut self, coeffs: SparseRow<T>, sense: Sense) {
        self.objective = coeffs;
        self.sense = sense;
    }

    pub fn add_eq(&mut self, row: SparseRow<T>, rhs: T) -> usize {
        self.eq_rows.push(row);
        self.eq_rhs.push(rhs);
        self.eq_rows.len() - 1
    }

    /// Adds `lo ≤ row·x ≤ hi`.
    pub fn add_range(&mut self, row: SparseRow<T>, lo: T, hi: T) -> usize {
        self.ineq_rows.push(row);
        self.ineq_lo.push(lo);
        self.ineq_hi.push(hi);
        self.ineq_rows.len() - 1
    }

    pub fn add_le(&mut self, row: SparseRow<T>, hi: T) -> usize {
        self.add_range(row, T::neg_infinity(), hi)
    }

    pub fn add_ge(&mut self, row: SparseRow<T>, lo: T) -> usize {
        self.add_range(row, lo, T::infinity())
    }

    pub fn objective_value(&self, x: &[T]) -> T {
        dot_sparse(&self.objective, x)
    }

    /// Largest violation of any constraint or bound at `x`.
    pub fn max_violation(&self, x: &[T]) -> T {
        let mut worst = T::zero();
        for (row, &b) in self.eq_rows.iter().zip(&self.eq_rhs) {
            worst = worst.max((dot_sparse(row, x) - b).abs());
        }
        for ((row, &lo), &hi) in self.ineq_rows.iter().zip(&self.ineq_lo).zip(&self.ineq_hi) {
            let v = dot_sparse(row, x);
            worst = worst.max(lo - v).max(v - hi);
        }
        for ((&v, &lo), &hi) in x.iter().zip(&self.lower).zip(&self.upper) {
            worst = worst.max(lo - v).max(v - hi);
        }
        worst
    }

    /// Checks indices and finiteness of coefficients.
    pub fn validate(&self) -> Result<(), OptError> {
        let n = self.num_vars();
        let check_row = |row: &SparseRow<T>, what: &str| -> Result<(), OptError> {
            for &(j, v) in row {
                if j >= n {
                    return Err(OptError::Malformed(format!("{what}: variable index {j} out of range")));
                }
                if !v.is_finite() {
                    return Err(OptError::Malformed(format!("{what}: non-finite coefficient")));
                }
            }
            Ok(())
        };
        check_row(&self.objective, "objective")?;
        for (i, r) in self.eq_rows.iter().enumerate() {
            check_row(r, &format!("equality {i}"))?;
            if !self.eq_rhs[i].is_finite() {
                return Err(OptError::Malformed(format!("equality {i}: non-finite rhs")));
            }
        }
        for (i, r) in self.ineq_rows.iter().enumerate() {
            check_row(r, &format!("inequality {i}"))?;
            if self.ineq_lo[i].is_nan() || self.ineq_hi[i].is_nan() || self.ineq_lo[i] > self.ineq_hi[i] {
                return Err(OptError::Malformed(format!("inequality {i}: bad range")));
            }
        }
        for j in 0..n {
            if self.lower[j].is_nan() || self.upper[j].is_nan() || self.lower[j] > self.upper[j] {
                return Err(OptError::Malformed(format!("variable {}: bad bounds", self.names[j])));
            }
        }
        Ok(())
    }
}

pub(crate) fn dot_sparse<T: Real>(row: &[(usize, T)], x: &[T]) -> T {
    row.iter().map(|&(j, v)| v * x[j]).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builder_and_violation() {
        let mut lp = LinearProgram::<f64>::new();
        let x = lp.add_var("x", 0.0, 1.0);
        let y = lp.add_var("y", 0.0, f64::INFINITY);
        lp.add_eq(vec![(x, 1.0), (y, 1.0)], 1.0);
        lp.add_le(vec![(y, 1.0)], 0.25);
        assert_eq!(lp.var_index("y"), Some(1));
        assert!(lp.validate().is_ok());
        assert_eq!(lp.max_violation(&[0.75, 0.25]), 0.0);
        assert!((lp.max_violation(&[0.5, 0.5]) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_index() {
        let mut lp = LinearProgram::<f64>::new();
        lp.add_var("x", 0.0, 1.0);
        lp.add_eq(vec![(3, 1.0)], 1.0);
        assert!(lp.validate().is_err());
    }
}
