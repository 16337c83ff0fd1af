use std::collections::HashMap;

use super::monomial::MultiIndex;

/// Graded-lex basis of all `β` with `|β| ≤ d`; the coordinates of moment
/// vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentVectorIndex {
    pub nvars: usize,
    pub d: u32,
    basis: Vec<MultiIndex>,
    index: HashMap<MultiIndex, usize>,
}

impl MomentVectorIndex {
    pub fn new(nvars: usize, d: u32) -> Self {
        let basis = MultiIndex::up_to_degree(nvars, d);
        let index = basis.iter().cloned().enumerate().map(|(i, b)| (b, i)).collect();
        Self { nvars, d, basis, index }
    }

    /// `#_d = C(n + d, d)`.
    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn basis(&self) -> &[MultiIndex] {
        &self.basis
    }

    pub fn position(&self, beta: &MultiIndex) -> Option<usize> {
        self.index.get(beta).copied()
    }
}

/// Index pattern of a localizing matrix: entry `(a, b)` is the moment with
/// exponent `rows[a] + rows[b] (+ e_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalizingMatrixSymbolic {
    /// 0 for the moment matrix, `i ≥ 1` for the matrix localized by `x_i`.
    pub i: usize,
    pub d: u32,
    pub rows: Vec<MultiIndex>,
}

impl LocalizingMatrixSymbolic {
    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn entry(&self, a: usize, b: usize) -> MultiIndex {
        let s = self.rows[a].add(&self.rows[b]);
        if self.i == 0 {
            s
        } else {
            s.add(&MultiIndex::unit(s.nvars(), self.i - 1))
        }
    }
}

/// The `n + 1` localizing matrices of order `d`: `M^0` over `|α| ≤ ⌊d/2⌋`,
/// `M^i` over `|α| ≤ ⌊(d−1)/2⌋`.
pub fn localizing_structure(n: usize, d: u32) -> Vec<LocalizingMatrixSymbolic> {
    assert!(d >= 1, "order must be positive");
    let mut out = vec![LocalizingMatrixSymbolic { i: 0, d, rows: MultiIndex::up_to_degree(n, d / 2) }];
    let half = (d - 1) / 2;
    for i in 1..=n {
        out.push(LocalizingMatrixSymbolic { i, d, rows: MultiIndex::up_to_degree(n, half) });
    }
    out
}
