use crate::linalg::Mat;
use crate::lp::Sense;
use crate::{OptError, Real};

/// Lower-triangle entries `(i, j, v)` with `i ≥ j` of a symmetric matrix.
pub type SymEntries<T> = Vec<(usize, usize, T)>;

/// One linear matrix inequality `F0 + Σ_k y_k F_k ⪰ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct PsdBlock<T> {
    pub dim: usize,
    pub constant: SymEntries<T>,
    /// `(variable, F_k)` for the variables that appear in this block.
    pub coeffs: Vec<(usize, SymEntries<T>)>,
}

impl<T: Real> PsdBlock<T> {
    pub fn new(dim: usize) -> Self {
        Self { dim, constant: Vec::new(), coeffs: Vec::new() }
    }

    /// Adds `v` to entry `(i, j)` of the matrix multiplying `var`
    /// (`None` for the constant term). Either triangle may be given.
    pub fn add(&mut self, var: Option<usize>, i: usize, j: usize, v: T) {
        let (i, j) = if i >= j { (i, j) } else { (j, i) };
        let target = match var {
            None => &mut self.constant,
            Some(k) => {
                let slot = match self.coeffs.iter().position(|(kk, _)| *kk == k) {
                    Some(p) => p,
                    None => {
                        self.coeffs.push((k, Vec::new()));
                        self.coeffs.len() - 1
                    }
                };
                &mut self.coeffs[slot].1
            }
        };
        match target.iter_mut().find(|(a, b, _)| *a == i && *b == j) {
            Some(e) => e.2 += v,
            None => target.push((i, j, v)),
        }
    }

    /// Sorts variables and entries and drops zeros.
    pub fn canonicalize(&mut self) {
        canonical_entries(&mut self.constant);
        for (_, e) in &mut self.coeffs {
            canonical_entries(e);
        }
        self.coeffs.retain(|(_, e)| !e.is_empty());
        self.coeffs.sort_by_key(|(k, _)| *k);
    }

    /// Dense value of the block at `y`.
    pub fn eval(&self, y: &[T]) -> Mat<T> {
        let mut m = Mat::zeros(self.dim, self.dim);
        fill_sym(&mut m, &self.constant, T::one());
        for (k, e) in &self.coeffs {
            if y[*k] != T::zero() {
                fill_sym(&mut m, e, y[*k]);
            }
        }
        m
    }
}

pub(crate) fn canonical_entries<T: Real>(e: &mut SymEntries<T>) {
    e.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
    let mut out: SymEntries<T> = Vec::with_capacity(e.len());
    for &(i, j, v) in e.iter() {
        match out.last_mut() {
            Some(l) if l.0 == i && l.1 == j => l.2 += v,
            _ => out.push((i, j, v)),
        }
    }
    out.retain(|t| t.2 != T::zero());
    *e = out;
}

/// Adds `s * E` (symmetric expansion of lower-triangle entries) to `m`.
pub(crate) fn fill_sym<T: Real>(m: &mut Mat<T>, e: &SymEntries<T>, s: T) {
    for &(i, j, v) in e {
        m[(i, j)] += s * v;
        if i != j {
            m[(j, i)] += s * v;
        }
    }
}

/// `min/max c·y  s.t.  A y = b,  F^(k)(y) ⪰ 0` over free `y`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConicProgram<T> {
    pub num_vars: usize,
    pub eq_rows: Vec<Vec<(usize, T)>>,
    pub eq_rhs: Vec<T>,
    pub blocks: Vec<PsdBlock<T>>,
    pub objective: Vec<T>,
    pub sense: Sense,
}

impl<T: Real> ConicProgram<T> {
    pub fn new(num_vars: usize) -> Self {
        Self { num_vars, eq_rows: Vec::new(), eq_rhs: Vec::new(), blocks: Vec::new(), objective: vec![T::zero(); num_vars], sense: Sense::Minimize }
    }

    pub fn add_eq(&mut self, row: Vec<(usize, T)>, rhs: T) {
        self.eq_rows.push(row);
        self.eq_rhs.push(rhs);
    }

    pub fn add_block(&mut self, block: PsdBlock<T>) {
        self.blocks.push(block);
    }

    pub fn set_objective(&mut self, c: Vec<T>, sense: Sense) {
        assert_eq!(c.len(), self.num_vars);
        self.objective = c;
        self.sense = sense;
    }

    pub fn objective_value(&self, y: &[T]) -> T {
        self.objective.iter().zip(y).map(|(&c, &v)| c * v).sum()
    }

    /// Smallest eigenvalue over all blocks at `y` (`+∞` without blocks).
    pub fn min_block_eigenvalue(&self, y: &[T]) -> T {
        self.blocks.iter().map(|b| crate::linalg::min_eigenvalue(&b.eval(y))).fold(T::infinity(), |a, v| a.min(v))
    }

    pub fn max_eq_violation(&self, y: &[T]) -> T {
        self.eq_rows.iter().zip(&self.eq_rhs).map(|(r, &b)| (crate::lp::dot_sparse(r, y) - b).abs()).fold(T::zero(), |a, v| a.max(v))
    }

    pub fn canonicalize(&mut self) {
        for b in &mut self.blocks {
            b.canonicalize();
        }
        for r in &mut self.eq_rows {
            r.sort_by_key(|&(j, _)| j);
        }
    }

    pub fn validate(&self) -> Result<(), OptError> {
        if self.objective.len() != self.num_vars {
            return Err(OptError::Malformed("objective length differs from variable count".into()));
        }
        for (i, r) in self.eq_rows.iter().enumerate() {
            for &(j, v) in r {
                if j >= self.num_vars || !v.is_finite() {
                    return Err(OptError::Malformed(format!("equality {i}: bad entry")));
                }
            }
        }
        for (bi, b) in self.blocks.iter().enumerate() {
            let check = |e: &SymEntries<T>| e.iter().all(|&(i, j, v)| i < b.dim && j <= i && v.is_finite());
            if !check(&b.constant) || b.coeffs.iter().any(|(k, e)| *k >= self.num_vars || !check(e)) {
                return Err(OptError::Malformed(format!("block {bi}: bad entry")));
            }
        }
        Ok(())
    }
}
