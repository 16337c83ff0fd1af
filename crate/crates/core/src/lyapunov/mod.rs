//! Foster–Lyapunov drift diagnostics: `Qw` exactly, the best `K_1` on a box
//! for a given `K_2`, and the sign of the dominant term of `Qw + K_2 w` far
//! out along the coordinate axes and the diagonal.
//!
//! Nothing here proves drift globally. `VerifiedOnBox+LeadingNegative`
//! means the inequality `Qw ≤ K_1 − K_2 w` holds at every state of the box
//! and the leading behavior is negative along the tested rays.

use std::collections::BTreeMap;

use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::model::{ReactionNetwork, State};
use crate::polyalg::apply_generator_rational;
use crate::{Poly, RatFn, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DriftVerdict {
    VerifiedOnBoxLeadingNegative,
    BoxOnly,
    Failed,
}

impl DriftVerdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            DriftVerdict::VerifiedOnBoxLeadingNegative => "VerifiedOnBox+LeadingNegative",
            DriftVerdict::BoxOnly => "BoxOnly",
            DriftVerdict::Failed => "Failed",
        }
    }
}

/// Behavior of `h = Qw + K_2 w` at `x = t·e` as `t → ∞`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Leading {
    /// `h → −∞`.
    Negative,
    /// `h` tends to a finite limit.
    Bounded,
    /// `h → +∞`: no `K_1` exists.
    Positive,
    /// The ray leaves the state space.
    Outside,
}

impl Leading {
    pub fn as_str(&self) -> &'static str {
        match self {
            Leading::Negative => "negative",
            Leading::Bounded => "bounded",
            Leading::Positive => "positive",
            Leading::Outside => "outside",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DirectionCheck {
    /// 0/1 direction vector.
    pub direction: Vec<u32>,
    pub leading: Leading,
    /// Degree in `t` of the numerator and denominator of `h(t·e)`.
    pub degrees: (u32, u32),
}

#[derive(Debug, Clone)]
pub struct DriftReport {
    pub w: Poly,
    pub qw: RatFn,
    pub k2: Rational,
    /// `max (Qw + K_2 w)` over the box, exact.
    pub k1: Rational,
    pub argmax: State,
    pub radius: u32,
    pub box_states: usize,
    pub directions: Vec<DirectionCheck>,
    pub verdict: DriftVerdict,
    /// Why the verdict is not the best one, if it is not.
    pub note: Option<String>,
}

fn univariate(p: &Poly, dir: &[u32]) -> BTreeMap<u32, Rational> {
    let mut out: BTreeMap<u32, Rational> = BTreeMap::new();
    for (a, c) in p.terms() {
        let a = a.as_slice();
        if a.iter().zip(dir).any(|(&e, &d)| e > 0 && d == 0) {
            continue;
        }
        *out.entry(a.iter().sum()).or_insert_with(Rational::zero) += c;
    }
    out.retain(|_, c| !c.is_zero());
    out
}

fn top(p: &BTreeMap<u32, Rational>) -> Option<(u32, &Rational)> {
    p.iter().next_back().map(|(d, c)| (*d, c))
}

/// Whether `t·e` lies in the state space for all large `t`, judged from two
/// consecutive far points so parity conditions can pass on either.
fn ray_inside(net: &ReactionNetwork, dir: &[u32]) -> bool {
    let far = 1u32 << 20;
    [far, far + 1].iter().any(|&t| net.contains(&dir.iter().map(|&d| d * t).collect::<Vec<_>>()))
}

fn check_direction(net: &ReactionNetwork, num: &Poly, den: &Poly, dir: Vec<u32>) -> DirectionCheck {
    let n = univariate(num, &dir);
    let d = univariate(den, &dir);
    let degrees = (top(&n).map_or(0, |t| t.0), top(&d).map_or(0, |t| t.0));
    let leading = if !ray_inside(net, &dir) {
        Leading::Outside
    } else {
        match (top(&n), top(&d)) {
            (None, _) => Leading::Bounded,
            (Some((dn, cn)), Some((dd, cd))) if dn > dd => {
                if cn.is_positive() == cd.is_positive() {
                    Leading::Positive
                } else {
                    Leading::Negative
                }
            }
            _ => Leading::Bounded,
        }
    };
    DirectionCheck { direction: dir, leading, degrees }
}

fn box_states(net: &ReactionNetwork, radius: u32) -> Vec<State> {
    let n = net.n();
    let side = radius as usize + 1;
    let total = side.checked_pow(n as u32).unwrap_or(usize::MAX);
    (0..total)
        .map(|mut k| {
            let mut x = vec![0u32; n];
            for xi in x.iter_mut() {
                *xi = (k % side) as u32;
                k /= side;
            }
            x
        })
        .filter(|x| net.contains(x))
        .collect()
}

/// Drift diagnostics for `w` with rate `K_2` over `{0..=radius}ⁿ`.
pub fn drift_report(net: &ReactionNetwork, w: &Poly, k2: &Rational, radius: u32) -> DriftReport {
    let n = net.n();
    let qw = apply_generator_rational(net, w);
    let h = qw.add(&RatFn::from_poly(w.scale(k2)));
    let num = h.numerator().clone();
    let den = h.denominator();

    let mut dirs: Vec<Vec<u32>> = (0..n).map(|i| (0..n).map(|k| (k == i) as u32).collect()).collect();
    if n > 1 {
        dirs.push(vec![1; n]);
    }

    // Norm-like premise along the tested rays.
    let mut note = None;
    for dir in &dirs {
        if !ray_inside(net, dir) {
            continue;
        }
        let wu = univariate(w, dir);
        match top(&wu) {
            Some((deg, c)) if deg > 0 && c.is_positive() => {}
            _ => {
                note = Some(format!("w does not grow to +inf along direction {dir:?}"));
            }
        }
    }
    let directions: Vec<DirectionCheck> = dirs.into_iter().map(|d| check_direction(net, &num, &den, d)).collect();

    let states = box_states(net, radius);
    let best =
        states
            .par_iter()
            .map(|x| (num.eval_state(x) / den.eval_state(x), x))
            .reduce_with(|a, b| if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a });
    let (k1, argmax) = match best {
        Some((v, x)) => (v, x.clone()),
        None => (Rational::zero(), vec![0; n]),
    };

    let inside: Vec<&DirectionCheck> = directions.iter().filter(|d| d.leading != Leading::Outside).collect();
    let verdict = if note.is_some() || inside.iter().any(|d| d.leading == Leading::Positive) {
        DriftVerdict::Failed
    } else if !inside.is_empty() && inside.iter().all(|d| d.leading == Leading::Negative) {
        DriftVerdict::VerifiedOnBoxLeadingNegative
    } else {
        DriftVerdict::BoxOnly
    };
    if note.is_none() {
        if let Some(d) = inside.iter().find(|d| d.leading != Leading::Negative) {
            note = Some(format!("Qw + K2 w is {} along direction {:?}", d.leading.as_str(), d.direction));
        }
    }
    DriftReport { w: w.clone(), qw, k2: k2.clone(), k1, argmax, radius, box_states: states.len(), directions, verdict, note }
}

impl DriftReport {
    /// `K_1 / K_2`. Only a heuristic for the tail constant `c`: the drift
    /// inequality gives a finite `⟨w⟩`, not this bound on it.
    pub fn heuristic_c(&self) -> Option<f64> {
        if self.k2.is_positive() {
            (self.k1.clone() / self.k2.clone()).to_f64().filter(|v| *v > 0.0)
        } else {
            None
        }
    }

    pub fn to_json(&self, species: &[String]) -> Value {
        json!({
            "w": self.w.to_string_with(species),
            "Qw": self.qw.to_string_with(species),
            "K2": self.k2.to_f64(),
            "K2_exact": self.k2.to_string(),
            "K1": self.k1.to_f64(),
            "K1_exact": self.k1.to_string(),
            "K1_argmax": self.argmax,
            "box": { "radius": self.radius, "states": self.box_states },
            "directions": self.directions.iter().map(|d| json!({
                "direction": d.direction,
                "leading": d.leading.as_str(),
                "numerator_degree": d.degrees.0,
                "denominator_degree": d.degrees.1,
            })).collect::<Vec<_>>(),
            "verdict": self.verdict.as_str(),
            "note": self.note,
            "heuristic_c_uncertified": self.heuristic_c(),
        })
    }
}
