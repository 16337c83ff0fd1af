use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Exponent vector `α ∈ ℕⁿ`.
///
/// Ordered graded-lexicographically: by total degree first, then so that
/// higher powers of earlier variables come first (`1, x1, x2, x1², x1x2, x2²`).
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(exps: Vec<u32>) -> Self {
        Self(exps)
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![0; n])
    }

    /// The unit vector `e_i`.
    pub fn unit(n: usize, i: usize) -> Self {
        let mut e = vec![0; n];
        e[i] = 1;
        Self(e)
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    /// `|α|`.
    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn get(&self, i: usize) -> u32 {
        self.0[i]
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        debug_assert_eq!(self.nvars(), other.nvars());
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `self - other` if nonnegative componentwise.
    pub fn checked_sub(&self, other: &MultiIndex) -> Option<MultiIndex> {
        self.0.iter().zip(&other.0).map(|(a, b)| a.checked_sub(*b)).collect::<Option<Vec<_>>>().map(MultiIndex)
    }

    /// All `β` with `|β| = d` in graded-lex order.
    pub fn of_degree(n: usize, d: u32) -> Vec<MultiIndex> {
        fn rec(i: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
            let n = cur.len();
            if i + 1 == n {
                cur[i] = left;
                out.push(MultiIndex(cur.clone()));
                return;
            }
            for e in (0..=left).rev() {
                cur[i] = e;
                rec(i + 1, left - e, cur, out);
            }
            cur[i] = 0;
        }
        if n == 0 {
            return if d == 0 { vec![MultiIndex(Vec::new())] } else { Vec::new() };
        }
        let mut out = Vec::new();
        rec(0, d, &mut vec![0; n], &mut out);
        out
    }

    /// All `β` with `|β| ≤ d` in graded-lex order.
    pub fn up_to_degree(n: usize, d: u32) -> Vec<MultiIndex> {
        (0..=d).flat_map(|k| Self::of_degree(n, k)).collect()
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|e| e.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl From<Vec<u32>> for MultiIndex {
    fn from(v: Vec<u32>) -> Self {
        Self(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graded_lex_basis_order() {
        let b = MultiIndex::up_to_degree(2, 2);
        let exps: Vec<&[u32]> = b.iter().map(|m| m.as_slice()).collect();
        assert_eq!(exps, vec![&[0, 0][..], &[1, 0], &[0, 1], &[2, 0], &[1, 1], &[0, 2]]);
        let mut sorted = b.clone();
        sorted.sort();
        assert_eq!(sorted, b);
    }

    #[test]
    fn counts_are_binomial() {
        // C(n + d, d)
        assert_eq!(MultiIndex::up_to_degree(1, 7).len(), 8);
        assert_eq!(MultiIndex::up_to_degree(2, 5).len(), 21);
        assert_eq!(MultiIndex::up_to_degree(3, 4).len(), 35);
    }
}
