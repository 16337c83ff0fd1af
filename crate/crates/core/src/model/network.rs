use std::collections::HashMap;

use num_traits::{Signed, ToPrimitive};

use super::{ModelError, State, StateConstraint};
use crate::polyalg::{CompiledPoly, MultiIndex};
use crate::{Poly, RatFn, Rational};

#[derive(Debug, Clone, PartialEq)]
pub enum Propensity {
    /// `k ∏_i x_i (x_i − 1) ⋯ (x_i − v⁻_i + 1)`.
    MassAction(Rational),
    Rational(RatFn),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Reaction {
    pub v_minus: Vec<u32>,
    pub v_plus: Vec<u32>,
    pub propensity: Propensity,
}

impl Reaction {
    pub fn net_change(&self) -> Vec<i64> {
        self.v_plus.iter().zip(&self.v_minus).map(|(&p, &m)| i64::from(p) - i64::from(m)).collect()
    }

    /// The propensity as a rational function of `x`.
    pub fn rational_function(&self) -> RatFn {
        match &self.propensity {
            Propensity::Rational(f) => f.clone(),
            Propensity::MassAction(k) => RatFn::from_poly(falling_factorial(&self.v_minus).scale(k)),
        }
    }
}

/// `∏_i x_i (x_i − 1) ⋯ (x_i − v_i + 1)`.
pub(crate) fn falling_factorial(v: &[u32]) -> Poly {
    let n = v.len();
    let mut p = Poly::one(n);
    for (i, &e) in v.iter().enumerate() {
        for l in 0..e {
            let f = &Poly::var(n, i) - &Poly::constant(n, Rational::from_integer(l.into()));
            p = &p * &f;
        }
    }
    p
}

/// A reaction network whose propensities share the common denominator `o`:
/// `a_j(x) = s_j(x) / o(x)`.
///
/// Immutable after construction; `o`, the `s_j` and the degrees are derived
/// from the reactions and never supplied by the caller.
#[derive(Debug, Clone)]
pub struct ReactionNetwork {
    species: Vec<String>,
    reactions: Vec<Reaction>,
    changes: Vec<Vec<i64>>,
    numerators: Vec<Poly>,
    denominator: Poly,
    factors: Vec<(Poly, u32)>,
    d_a: u32,
    d_o: u32,
    constraint: Option<StateConstraint>,
    compiled_num: Vec<CompiledPoly>,
    compiled_den: CompiledPoly,
}

impl PartialEq for ReactionNetwork {
    fn eq(&self, other: &Self) -> bool {
        self.species == other.species
            && self.reactions == other.reactions
            && self.numerators == other.numerators
            && self.denominator == other.denominator
            && self.constraint == other.constraint
    }
}

fn to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

impl ReactionNetwork {
    pub fn new(species: Vec<String>, reactions: Vec<Reaction>, constraint: Option<StateConstraint>) -> Result<Self, ModelError> {
        let n = species.len();
        if n == 0 {
            return Err(ModelError::Invalid("no species".into()));
        }
        let mut changes = Vec::with_capacity(reactions.len());
        let mut rfs = Vec::with_capacity(reactions.len());
        for (j, r) in reactions.iter().enumerate() {
            if r.v_minus.len() != n || r.v_plus.len() != n {
                return Err(ModelError::Invalid(format!("reaction {}: stoichiometry length differs from species count", j + 1)));
            }
            let v = r.net_change();
            if v.iter().all(|&e| e == 0) {
                return Err(ModelError::ZeroNetChange { reaction: j, line: None });
            }
            if let Propensity::MassAction(k) = &r.propensity {
                if !k.is_positive() {
                    return Err(ModelError::NonPositiveRate { reaction: j, line: None });
                }
            }
            let f = r.rational_function();
            if f.nvars() != n {
                return Err(ModelError::Invalid(format!("reaction {}: propensity has wrong arity", j + 1)));
            }
            changes.push(v);
            rfs.push(f);
        }
        if let Some(c) = &constraint {
            let bad = c.linear.iter().any(|l| l.coeffs.len() != n) || c.parity.iter().any(|p| p.0 >= n);
            if bad {
                return Err(ModelError::Invalid("constraint arity differs from species count".into()));
            }
        }

        // o = ∏ f^M_f with M_f the largest multiplicity of f over reactions.
        let mut factors: Vec<(Poly, u32)> = Vec::new();
        for f in &rfs {
            for (g, m) in f.factors() {
                match factors.iter_mut().find(|(h, _)| h == g) {
                    Some(e) => e.1 = e.1.max(*m),
                    None => factors.push((g.clone(), *m)),
                }
            }
        }
        let mut denominator = Poly::one(n);
        for (g, m) in &factors {
            denominator = &denominator * &g.pow(*m);
        }
        let numerators: Vec<Poly> = rfs
            .iter()
            .map(|f| {
                let mut s = f.numerator().clone();
                for (g, m) in &factors {
                    let have = f.factors().iter().find(|(h, _)| h == g).map_or(0, |e| e.1);
                    s = &s * &g.pow(m - have);
                }
                s
            })
            .collect();
        let d_a = numerators.iter().map(Poly::degree).max().unwrap_or(0);
        let d_o = denominator.degree();
        let compiled_num = numerators.iter().map(|s| CompiledPoly::new(s, to_f64)).collect();
        let compiled_den = CompiledPoly::new(&denominator, to_f64);
        let constraint = constraint.filter(|c| !c.is_empty());
        Ok(Self { species, reactions, changes, numerators, denominator, factors, d_a, d_o, constraint, compiled_num, compiled_den })
    }

    /// Species count `n`.
    pub fn n(&self) -> usize {
        self.species.len()
    }

    /// Reaction count `m`.
    pub fn m(&self) -> usize {
        self.reactions.len()
    }

    pub fn species(&self) -> &[String] {
        &self.species
    }

    pub fn reactions(&self) -> &[Reaction] {
        &self.reactions
    }

    /// `s_j`.
    pub fn numerator(&self, j: usize) -> &Poly {
        &self.numerators[j]
    }

    pub fn numerators(&self) -> &[Poly] {
        &self.numerators
    }

    /// `o`.
    pub fn denominator(&self) -> &Poly {
        &self.denominator
    }

    /// Distinct factors of `o` with their multiplicities.
    pub fn denominator_factors(&self) -> &[(Poly, u32)] {
        &self.factors
    }

    /// `max_j deg s_j`.
    pub fn d_a(&self) -> u32 {
        self.d_a
    }

    /// `deg o`.
    pub fn d_o(&self) -> u32 {
        self.d_o
    }

    /// `v_j = v⁺_j − v⁻_j`.
    pub fn net_change(&self, j: usize) -> &[i64] {
        &self.changes[j]
    }

    pub fn constraint(&self) -> Option<&StateConstraint> {
        self.constraint.as_ref()
    }

    /// Membership in the state space: `ℕⁿ` intersected with the constraint.
    pub fn contains(&self, x: &[u32]) -> bool {
        self.constraint.as_ref().map_or(true, |c| c.contains(x))
    }

    /// `x + v_j` if it stays in `ℕⁿ` (ignores the constraint).
    pub fn apply(&self, j: usize, x: &[u32]) -> Option<State> {
        shift_state(x, &self.changes[j], 1)
    }

    fn denominator_at(&self, x: &[u32]) -> Result<Rational, ModelError> {
        let o = self.denominator.eval_state(x);
        if o.is_positive() {
            Ok(o)
        } else {
            Err(ModelError::NonPositiveDenominator { state: x.to_vec() })
        }
    }

    /// Exact `a_j(x) = s_j(x) / o(x)`.
    pub fn propensity_eval(&self, j: usize, x: &[u32]) -> Result<Rational, ModelError> {
        let o = self.denominator_at(x)?;
        let a = self.numerators[j].eval_state(x) / o;
        if a.is_negative() {
            return Err(ModelError::NegativePropensity { reaction: j, state: x.to_vec() });
        }
        Ok(a)
    }

    /// Floating point `a_j(x)` without validation, for hot loops over states
    /// that were already checked.
    pub fn propensity_f64(&self, j: usize, x: &[u32]) -> f64 {
        self.compiled_num[j].eval(x) / self.compiled_den.eval(x)
    }

    /// All `a_j(x)` in floating point.
    pub fn propensities_f64(&self, x: &[u32], out: &mut Vec<f64>) {
        let o = self.compiled_den.eval(x);
        out.clear();
        out.extend(self.compiled_num.iter().map(|s| s.eval(x) / o));
    }

    /// `q(x) = Σ_j a_j(x)` in floating point.
    pub fn exit_rate_f64(&self, x: &[u32]) -> f64 {
        let o = self.compiled_den.eval(x);
        self.compiled_num.iter().map(|s| s.eval(x)).sum::<f64>() / o
    }

    /// Checks the modelling premises at `x`: `o(x) > 0`, `a_j(x) ≥ 0`, and no
    /// reaction with positive propensity leaves the state space.
    pub fn check_state(&self, x: &[u32]) -> Result<(), ModelError> {
        self.denominator_at(x)?;
        for j in 0..self.m() {
            let s = self.numerators[j].eval_state(x);
            if s.is_negative() {
                return Err(ModelError::NegativePropensity { reaction: j, state: x.to_vec() });
            }
            if s.is_positive() {
                match self.apply(j, x) {
                    Some(y) if self.contains(&y) => {}
                    _ => return Err(ModelError::LeavesStateSpace { reaction: j, state: x.to_vec() }),
                }
            }
        }
        Ok(())
    }

    /// States `x − v_j` in the state space from which reaction `j` fires into
    /// `x`, deduplicated, graded-lex ordered.
    pub fn incoming_states(&self, x: &[u32]) -> Result<Vec<State>, ModelError> {
        let mut out: Vec<State> = Vec::new();
        for j in 0..self.m() {
            let Some(y) = shift_state(x, &self.changes[j], -1) else { continue };
            if !self.contains(&y) {
                continue;
            }
            if self.propensity_eval(j, &y)?.is_positive() && !out.contains(&y) {
                out.push(y);
            }
        }
        out.sort_by(|a, b| MultiIndex::new(a.clone()).cmp(&MultiIndex::new(b.clone())));
        Ok(out)
    }

    /// `(πQ)(x) = Σ_j a_j(x − v_j) p(x − v_j) − q(x) p(x)`, with `p` zero
    /// off its support.
    pub fn stationary_residual(&self, p: &HashMap<State, f64>, x: &[u32]) -> f64 {
        let px = p.get(x).copied().unwrap_or(0.0);
        let mut inflow = 0.0;
        for j in 0..self.m() {
            let Some(y) = shift_state(x, &self.changes[j], -1) else { continue };
            if let Some(&py) = p.get(&y) {
                if py != 0.0 {
                    inflow += self.propensity_f64(j, &y) * py;
                }
            }
        }
        inflow - self.exit_rate_f64(x) * px
    }

    /// Rendering in the network DSL; parses back to an equal network.
    pub fn to_dsl(&self) -> String {
        let mut s = format!("species: {}\n", self.species.join(", "));
        if let Some(c) = &self.constraint {
            s.push_str(&format!("constraint: {}\n", c.to_string_with(&self.species)));
        }
        for r in &self.reactions {
            let prop = match &r.propensity {
                Propensity::MassAction(k) => format!("mass_action({k})"),
                Propensity::Rational(f) => f.to_string_with(&self.species),
            };
            s.push_str(&format!("{} -> {} @ {}\n", self.side(&r.v_minus), self.side(&r.v_plus), prop));
        }
        s
    }

    fn side(&self, v: &[u32]) -> String {
        let terms: Vec<String> =
            v.iter().zip(&self.species).filter(|(&c, _)| c > 0).map(|(&c, name)| if c == 1 { name.clone() } else { format!("{c} {name}") }).collect();
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join(" + ")
        }
    }

    /// Stable 64-bit FNV-1a digest of the canonical JSON form.
    pub fn digest(&self) -> String {
        let text = super::network_to_json(self).to_string();
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for b in text.bytes() {
            h ^= u64::from(b);
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
        format!("{h:016x}")
    }

    /// True when every reaction changes a single species by ±1.
    pub fn is_birth_death(&self) -> bool {
        self.n() == 1 && self.changes.iter().all(|v| v[0].abs() == 1)
    }
}

/// `x + sign·v` if it stays in `ℕⁿ`.
pub(crate) fn shift_state(x: &[u32], v: &[i64], sign: i64) -> Option<State> {
    x.iter().zip(v).map(|(&xi, &vi)| u32::try_from(i64::from(xi) + sign * vi).ok()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::parse_network;

    fn q(v: i64) -> Rational {
        Rational::from_integer(v.into())
    }

    #[test]
    fn mass_action_is_falling_factorial() {
        let net = parse_network("2 S -> 3 S @ mass_action(1)").unwrap();
        let x = Poly::var(1, 0);
        assert_eq!(net.numerator(0), &(&x * &(&x - &Poly::one(1))));
        assert_eq!(net.denominator(), &Poly::one(1));
        assert_eq!(net.reactions()[0].v_minus, vec![2]);
        assert_eq!(net.reactions()[0].v_plus, vec![3]);
    }

    #[test]
    fn hill_propensity() {
        let net = parse_network("0 -> P1 @ 30/(1+(x2/1)^3)\nP1 -> 0 @ mass_action(1)\n0 -> P2 @ 10/(1+x1)\nP2 -> 0 @ mass_action(1)").unwrap();
        assert_eq!(net.propensity_eval(0, &[0, 1]).unwrap(), q(15));
        assert_eq!(net.d_o(), 4);
        // s_2 = x1 (1 + x1)(1 + x2³)
        assert_eq!(net.d_a(), 5);
    }

    #[test]
    fn schlogl_propensities() {
        let net =
            parse_network("2 X -> 3 X @ mass_action(6)\n3 X -> 2 X @ mass_action(1)\n0 -> X @ mass_action(50)\nX -> 0 @ mass_action(3)").unwrap();
        assert_eq!(net.propensity_eval(1, &[2]).unwrap(), q(0));
        assert_eq!(net.propensity_eval(0, &[5]).unwrap(), q(120));
        assert_eq!(net.incoming_states(&[3]).unwrap(), vec![vec![2], vec![4]]);
    }

    #[test]
    fn birth_death_boundary() {
        let net = parse_network("0 -> X @ mass_action(2)\nX -> 0 @ mass_action(1)").unwrap();
        assert_eq!(net.incoming_states(&[0]).unwrap(), vec![vec![1]]);
        assert!(net.is_birth_death());
    }

    #[test]
    fn toggle_incoming() {
        let net = parse_network("0 -> A @ 30/(1+B^3)\nA -> 0 @ mass_action(1)\n0 -> B @ 10/(1+A)\nB -> 0 @ mass_action(1)").unwrap();
        assert_eq!(net.incoming_states(&[1, 1]).unwrap(), vec![vec![1, 0], vec![0, 1], vec![2, 1], vec![1, 2]]);
    }

    #[test]
    fn residuals() {
        let net = parse_network("X -> 0 @ mass_action(1)").unwrap();
        let p: HashMap<State, f64> = [(vec![0], 1.0)].into_iter().collect();
        assert_eq!(net.stationary_residual(&p, &[0]), 0.0);

        let net =
            parse_network("2 X -> 3 X @ mass_action(6)\n3 X -> 2 X @ mass_action(1)\n0 -> X @ mass_action(50)\nX -> 0 @ mass_action(3)").unwrap();
        let p: HashMap<State, f64> = [(vec![1], 0.5), (vec![3], 0.5)].into_iter().collect();
        // Inflow from 1 (a_+ = 50) and 3 (a_- = 3·3 + 1·6) into 2 minus nothing out.
        assert_eq!(net.stationary_residual(&p, &[2]), 0.5 * 50.0 + 0.5 * 15.0);
    }

    #[test]
    fn premise_checks() {
        let net = parse_network("0 -> X @ 1 - X").unwrap();
        assert!(net.check_state(&[0]).is_ok());
        assert!(matches!(net.check_state(&[2]), Err(ModelError::NegativePropensity { .. })));
        let net = parse_network("0 -> X @ 1/(X - 3)").unwrap();
        assert!(matches!(net.propensity_eval(0, &[3]), Err(ModelError::NonPositiveDenominator { .. })));
        let net = parse_network("species: X\nconstraint: X <= 2\n0 -> X @ 1\nX -> 0 @ X").unwrap();
        assert!(net.check_state(&[1]).is_ok());
        assert!(matches!(net.check_state(&[2]), Err(ModelError::LeavesStateSpace { .. })));
    }
}
