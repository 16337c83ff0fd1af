use std::fmt;

use num_traits::{Signed, Zero};

use crate::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CmpOp {
    Lt,
    Le,
    Eq,
    Ge,
    Gt,
}

impl CmpOp {
    pub fn as_str(self) -> &'static str {
        match self {
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Eq => "==",
            CmpOp::Ge => ">=",
            CmpOp::Gt => ">",
        }
    }
}

/// `Σ a_i x_i + b  op  0`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearCondition {
    pub coeffs: Vec<Rational>,
    pub constant: Rational,
    pub op: CmpOp,
}

impl LinearCondition {
    pub fn holds(&self, x: &[u32]) -> bool {
        let mut v = self.constant.clone();
        for (a, &xi) in self.coeffs.iter().zip(x) {
            if !a.is_zero() {
                v += a * Rational::from_integer(xi.into());
            }
        }
        match self.op {
            CmpOp::Lt => v.is_negative(),
            CmpOp::Le => !v.is_positive(),
            CmpOp::Eq => v.is_zero(),
            CmpOp::Ge => !v.is_negative(),
            CmpOp::Gt => v.is_positive(),
        }
    }
}

/// Restricts the state space to a conjunction of linear conditions and
/// parity conditions on coordinates.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct StateConstraint {
    pub linear: Vec<LinearCondition>,
    /// `(coordinate, remainder mod 2)`.
    pub parity: Vec<(usize, u32)>,
}

impl StateConstraint {
    pub fn contains(&self, x: &[u32]) -> bool {
        self.parity.iter().all(|&(i, p)| x[i] % 2 == p) && self.linear.iter().all(|c| c.holds(x))
    }

    pub fn is_empty(&self) -> bool {
        self.linear.is_empty() && self.parity.is_empty()
    }

    /// DSL rendering with the given variable names.
    pub fn to_string_with(&self, names: &[String]) -> String {
        let mut parts = Vec::new();
        for &(i, p) in &self.parity {
            parts.push(format!("{}({})", if p == 0 { "even" } else { "odd" }, names[i]));
        }
        for c in &self.linear {
            let mut lhs = String::new();
            for (i, a) in c.coeffs.iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                let sign = if a.is_negative() { "-" } else { "+" };
                if lhs.is_empty() {
                    if a.is_negative() {
                        lhs.push('-');
                    }
                } else {
                    lhs.push_str(&format!(" {sign} "));
                }
                let m = a.abs();
                if m == Rational::from_integer(1.into()) {
                    lhs.push_str(&names[i]);
                } else {
                    lhs.push_str(&format!("{m}*{}", names[i]));
                }
            }
            if lhs.is_empty() {
                lhs.push('0');
            }
            parts.push(format!("{lhs} {} {}", c.op.as_str(), -c.constant.clone()));
        }
        parts.join(", ")
    }
}

impl fmt::Display for StateConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.linear.first().map_or_else(|| self.parity.iter().map(|p| p.0 + 1).max().unwrap_or(0), |c| c.coeffs.len());
        let names: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
        f.write_str(&self.to_string_with(&names))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parity_and_linear() {
        let c = StateConstraint {
            linear: vec![LinearCondition {
                coeffs: vec![Rational::zero(), Rational::from_integer(1.into())],
                constant: Rational::zero(),
                op: CmpOp::Eq,
            }],
            parity: vec![(0, 0)],
        };
        assert!(c.contains(&[4, 0]));
        assert!(!c.contains(&[3, 0]));
        assert!(!c.contains(&[4, 1]));
        assert_eq!(c.to_string(), "even(x1), x2 == 0");
    }
}
