use num_traits::{One, Signed, ToPrimitive, Zero};

use super::StateBoundsError;
use crate::polyalg::{CompiledPoly, MultiIndex};
use crate::{Poly, Rational};

/// `w(x) = (a·x)^p` with every `a_i > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearPower {
    pub a: Vec<Rational>,
    pub p: u32,
}

/// A norm-like weight `w` together with a tail constant `c ≥ ⟨w⟩`.
///
/// `w` must have nonnegative coefficients and, for every species, a pure
/// power term `k x_i^e`: then `w` is nondecreasing in each coordinate and its
/// sublevel sets are boxed in by `x_i < (r/k)^{1/e}`.
#[derive(Debug, Clone)]
pub struct WeightSpec {
    pub w: Poly,
    pub linear: Option<LinearPower>,
    pub c: f64,
    compiled: CompiledPoly,
    /// Per species, the highest pure power `(e, k)` appearing in `w`.
    axis_terms: Vec<(u32, f64)>,
}

fn f64_of(q: &Rational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

impl WeightSpec {
    pub fn polynomial(w: Poly, c: f64) -> Result<Self, StateBoundsError> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(StateBoundsError::BadTailConstant(c));
        }
        let n = w.nvars();
        if w.terms().any(|(_, k)| k.is_negative()) {
            return Err(StateBoundsError::NotNormLike("weight has a negative coefficient".into()));
        }
        let mut axis_terms = Vec::with_capacity(n);
        for i in 0..n {
            let best = w.terms().filter(|(a, _)| a.get(i) > 0 && a.degree() == a.get(i)).map(|(a, k)| (a.get(i), f64_of(k))).max_by_key(|t| t.0);
            match best {
                Some(t) => axis_terms.push(t),
                None => {
                    return Err(StateBoundsError::NotNormLike(format!("weight has no pure power of species {}", i + 1)));
                }
            }
        }
        let compiled = CompiledPoly::new(&w, f64_of);
        Ok(Self { w, linear: None, c, compiled, axis_terms })
    }

    pub fn linear_power(a: Vec<Rational>, p: u32, c: f64) -> Result<Self, StateBoundsError> {
        if p == 0 || a.is_empty() || a.iter().any(|v| !v.is_positive()) {
            return Err(StateBoundsError::NotNormLike("(a·x)^p needs p ≥ 1 and every a_i > 0".into()));
        }
        let n = a.len();
        let lin = Poly::from_terms(n, a.iter().enumerate().map(|(i, v)| (MultiIndex::unit(n, i), v.clone())));
        let mut spec = Self::polynomial(lin.pow(p), c)?;
        spec.linear = Some(LinearPower { a, p });
        Ok(spec)
    }

    /// Like [`WeightSpec::polynomial`], but recognizes `w = (a·x)^p` with
    /// rational `a` and keeps that structure.
    pub fn detect(w: Poly, c: f64) -> Result<Self, StateBoundsError> {
        match linear_root(&w) {
            Some((a, p)) => Self::linear_power(a, p, c),
            None => Self::polynomial(w, c),
        }
    }

    pub fn nvars(&self) -> usize {
        self.w.nvars()
    }

    pub fn with_c(&self, c: f64) -> Result<Self, StateBoundsError> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(StateBoundsError::BadTailConstant(c));
        }
        let mut s = self.clone();
        s.c = c;
        Ok(s)
    }

    pub fn eval(&self, x: &[u32]) -> f64 {
        self.compiled.eval(x)
    }

    pub fn eval_exact(&self, x: &[u32]) -> Rational {
        self.w.eval_state(x)
    }

    /// `w(x) < r`, decided exactly when the floating point value is close
    /// to the threshold.
    pub fn below(&self, x: &[u32], r: f64, r_exact: &Rational) -> bool {
        let v = self.eval(x);
        if (v - r).abs() > 1e-9 * r.abs().max(1.0) {
            return v < r;
        }
        &self.eval_exact(x) < r_exact
    }

    /// Upper bound on `x_i` over `{w < r}`.
    pub fn axis_extent(&self, i: usize, r: f64) -> f64 {
        let (e, k) = self.axis_terms[i];
        (r / k).max(0.0).powf(1.0 / e as f64)
    }

    pub fn label(&self, species: &[String]) -> String {
        match &self.linear {
            Some(lp) => {
                let n = lp.a.len();
                let lin = Poly::from_terms(n, lp.a.iter().enumerate().map(|(i, v)| (MultiIndex::unit(n, i), v.clone())));
                format!("({})^{}", lin.to_string_with(species), lp.p)
            }
            None => self.w.to_string_with(species),
        }
    }

    /// An upper bound on `sup_{w(x) ≥ r} |f(x)| / w(x)`, or `None` when `f`
    /// may grow faster than `w`.
    ///
    /// For `(a·x)^p` with `s = a·x ≥ r^{1/p}`: `x^β ≤ s^{|β|}/a^β`, so the
    /// ratio is at most `Σ |f_β| s^{|β|−p} / a^β`, nonincreasing in `s` when
    /// `deg f ≤ p`. Otherwise `w ≥ κ n^{1−e} |x|₁^e` from the pure powers
    /// (lowest top degree `e`, smallest coefficient `κ`), `|f| ≤
    /// Σ |f_β| |x|₁^{|β|}`, and `|x|₁ ≥ t_r` where `W(t_r) = r` for the
    /// majorant `W(t) = Σ w_β t^{|β|}`.
    pub fn tail_ratio_bound(&self, f: &Poly, r: f64) -> Option<f64> {
        if f.is_zero() {
            return Some(0.0);
        }
        if let Some(lp) = &self.linear {
            if f.degree() > lp.p {
                return None;
            }
            let s = r.max(0.0).powf(1.0 / lp.p as f64);
            if s <= 0.0 {
                return None;
            }
            let a: Vec<f64> = lp.a.iter().map(f64_of).collect();
            let mut total = 0.0;
            for (beta, k) in f.terms() {
                let ab: f64 = beta.as_slice().iter().zip(&a).map(|(&e, &ai)| ai.powi(e as i32)).product();
                total += f64_of(k).abs() * s.powi(beta.degree() as i32 - lp.p as i32) / ab;
            }
            return Some(total);
        }
        let n = self.nvars() as f64;
        let e = self.axis_terms.iter().map(|t| t.0).min()?;
        let kappa = self.axis_terms.iter().map(|t| t.1).fold(f64::INFINITY, f64::min);
        if f.degree() > e || kappa <= 0.0 {
            return None;
        }
        let coeffs: Vec<(u32, f64)> = self.w.terms().map(|(b, k)| (b.degree(), f64_of(k))).collect();
        let big_w = |t: f64| coeffs.iter().map(|&(d, k)| k * t.powi(d as i32)).sum::<f64>();
        // Bisection for W(t) = r; W is nondecreasing on t ≥ 0.
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        while big_w(hi) < r {
            hi *= 2.0;
            if hi > 1e300 {
                return None;
            }
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if big_w(mid) < r {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let t = lo;
        if t <= 0.0 {
            return None;
        }
        let scale = n.powi(e as i32 - 1) / kappa;
        Some(f.terms().map(|(b, k)| f64_of(k).abs() * scale * t.powi(b.degree() as i32 - e as i32)).sum())
    }
}

/// `+1` if every coefficient of `f` is nonnegative (so `f ≥ 0` on `ℕⁿ`),
/// `−1` if every one is nonpositive, `0` otherwise.
pub fn coefficient_sign(f: &Poly) -> i8 {
    if f.terms().all(|(_, k)| !k.is_negative()) {
        1
    } else if f.terms().all(|(_, k)| !k.is_positive()) {
        -1
    } else {
        0
    }
}

pub(crate) fn rational_of_f64(r: f64) -> Rational {
    Rational::from_float(r).unwrap_or_else(Rational::one)
}

fn nth_root_exact(q: &Rational, p: u32) -> Option<Rational> {
    if !q.is_positive() {
        return None;
    }
    let (n, d) = (q.numer().nth_root(p), q.denom().nth_root(p));
    let r = Rational::new(n, d);
    (r.pow(p as i32) == *q).then_some(r)
}

/// `(a, p)` with `w = (a·x)^p` exactly, if `w` has that form. From the
/// terms `a_1^p x_1^p` and `p a_1^{p−1} a_j x_1^{p−1} x_j`.
fn linear_root(w: &Poly) -> Option<(Vec<Rational>, u32)> {
    let n = w.nvars();
    let p = w.degree();
    if n == 0 || p == 0 {
        return None;
    }
    let pure = |i: usize| MultiIndex::new((0..n).map(|k| if k == i { p } else { 0 }).collect());
    let a1 = nth_root_exact(&w.coeff(&pure(0)), p)?;
    let mut a = vec![a1.clone()];
    for j in 1..n {
        let aj = if p == 1 {
            w.coeff(&pure(j))
        } else {
            let mut e = vec![0u32; n];
            e[0] = p - 1;
            e[j] = 1;
            w.coeff(&MultiIndex::new(e)) / (Rational::from_integer(p.into()) * a1.pow(p as i32 - 1))
        };
        if aj.is_zero() {
            return None;
        }
        a.push(aj);
    }
    let lin = Poly::from_terms(n, a.iter().enumerate().map(|(i, v)| (MultiIndex::unit(n, i), v.clone())));
    (lin.pow(p) == *w).then_some((a, p))
}
