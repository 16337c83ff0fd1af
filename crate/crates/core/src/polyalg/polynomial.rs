use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{FromPrimitive, Num, Signed};

use super::monomial::MultiIndex;

/// Coefficient ring for [`Polynomial`]. Exact rationals in practice, `f64`
/// for evaluation-only copies.
pub trait Coefficient: Clone + fmt::Debug + PartialEq + Num + Neg<Output = Self> + FromPrimitive + Send + Sync + 'static {}

impl<T> Coefficient for T where T: Clone + fmt::Debug + PartialEq + Num + Neg<Output = Self> + FromPrimitive + Send + Sync + 'static {}

/// Sparse polynomial in `n` variables. Zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Polynomial<T> {
    nvars: usize,
    terms: BTreeMap<MultiIndex, T>,
}

impl<T: Coefficient> Polynomial<T> {
    pub fn zero(nvars: usize) -> Self {
        Self { nvars, terms: BTreeMap::new() }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, T::one())
    }

    pub fn constant(nvars: usize, c: T) -> Self {
        Self::monomial(MultiIndex::zeros(nvars), c)
    }

    pub fn monomial(alpha: MultiIndex, c: T) -> Self {
        let nvars = alpha.nvars();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(alpha, c);
        }
        Self { nvars, terms }
    }

    /// The coordinate function `x_i` (0-based).
    pub fn var(nvars: usize, i: usize) -> Self {
        Self::monomial(MultiIndex::unit(nvars, i), T::one())
    }

    /// Collects terms, summing repeated exponents.
    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (MultiIndex, T)>) -> Self {
        let mut p = Self::zero(nvars);
        for (a, c) in terms {
            assert_eq!(a.nvars(), nvars, "exponent length");
            p.add_term(a, c);
        }
        p
    }

    fn add_term(&mut self, alpha: MultiIndex, c: T) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&alpha) {
            Some(v) => {
                let s = v.clone() + c;
                if s.is_zero() {
                    self.terms.remove(&alpha);
                } else {
                    *v = s;
                }
            }
            None => {
                self.terms.insert(alpha, c);
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|a| a.is_zero())
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Largest `|α|` with a nonzero coefficient; 0 for the zero polynomial.
    pub fn degree(&self) -> u32 {
        self.terms.keys().next_back().map_or(0, |a| a.degree())
    }

    /// Terms in increasing graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&MultiIndex, &T)> + '_ {
        self.terms.iter()
    }

    pub fn coeff(&self, alpha: &MultiIndex) -> T {
        self.terms.get(alpha).cloned().unwrap_or_else(T::zero)
    }

    pub fn constant_term(&self) -> T {
        self.coeff(&MultiIndex::zeros(self.nvars))
    }

    /// The graded-lex largest term.
    pub fn leading(&self) -> Option<(&MultiIndex, &T)> {
        self.terms.iter().next_back()
    }

    pub fn scale(&self, c: &T) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        Self { nvars: self.nvars, terms: self.terms.iter().map(|(a, v)| (a.clone(), v.clone() * c.clone())).collect() }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::one(self.nvars);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                out = &out * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        out
    }

    /// Value at an arbitrary point.
    pub fn eval(&self, x: &[T]) -> T {
        assert_eq!(x.len(), self.nvars);
        let mut acc = T::zero();
        for (a, c) in &self.terms {
            let mut m = c.clone();
            for (xi, &e) in x.iter().zip(a.as_slice()) {
                for _ in 0..e {
                    m = m * xi.clone();
                }
            }
            acc = acc + m;
        }
        acc
    }

    /// Value at a lattice point.
    pub fn eval_state(&self, x: &[u32]) -> T {
        let xs: Vec<T> = x.iter().map(|&v| T::from_u32(v).expect("integer coefficient")).collect();
        self.eval(&xs)
    }

    /// `∏_i (x_i + v_i)^{α_i}` expanded.
    pub fn shifted_monomial(alpha: &MultiIndex, v: &[i64]) -> Self {
        let n = alpha.nvars();
        assert_eq!(v.len(), n);
        let mut out = Self::one(n);
        for i in 0..n {
            let e = alpha.get(i);
            if e == 0 {
                continue;
            }
            // Binomial expansion of (x_i + v_i)^e.
            let vi = T::from_i64(v[i]).expect("integer shift");
            let mut factor = Self::zero(n);
            let mut binom = T::one();
            let mut vpow = T::one();
            for k in 0..=e {
                // term C(e, k) v^k x^{e-k}
                let mut idx = vec![0; n];
                idx[i] = e - k;
                factor.add_term(MultiIndex::new(idx), binom.clone() * vpow.clone());
                binom = binom * T::from_u32(e - k).unwrap() / T::from_u32(k + 1).unwrap();
                vpow = vpow * vi.clone();
            }
            out = &out * &factor;
        }
        out
    }

    /// `p(x + v)`.
    pub fn shift(&self, v: &[i64]) -> Self {
        let mut out = Self::zero(self.nvars);
        for (a, c) in &self.terms {
            out = &out + &Self::shifted_monomial(a, v).scale(c);
        }
        out
    }

    pub fn map<U: Coefficient>(&self, f: impl Fn(&T) -> U) -> Polynomial<U> {
        Polynomial::from_terms(self.nvars, self.terms.iter().map(|(a, c)| (a.clone(), f(c))))
    }

    /// Coefficient vector over an ordered basis. Terms missing from the basis
    /// are reported as `Err` with the offending exponent.
    pub fn coefficients_over(&self, basis: &[MultiIndex], index: impl Fn(&MultiIndex) -> Option<usize>) -> Result<Vec<T>, MultiIndex> {
        let mut out = vec![T::zero(); basis.len()];
        for (a, c) in &self.terms {
            let k = index(a).ok_or_else(|| a.clone())?;
            out[k] = c.clone();
        }
        Ok(out)
    }

    /// Renders with the given variable names, highest term first. The output
    /// parses back through the network DSL.
    pub fn to_string_with(&self, names: &[String]) -> String
    where
        T: fmt::Display + Signed,
    {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut s = String::new();
        for (k, (a, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            if k == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            let mut factors: Vec<String> = Vec::new();
            for (i, &e) in a.as_slice().iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(names[i].clone()),
                    _ => factors.push(format!("{}^{e}", names[i])),
                }
            }
            if factors.is_empty() || !mag.is_one() {
                let ms = mag.to_string();
                if factors.is_empty() {
                    s.push_str(&ms);
                } else {
                    s.push_str(&format!("{ms}*"));
                }
            }
            s.push_str(&factors.join("*"));
        }
        s
    }
}

impl<T: Coefficient + fmt::Display + Signed> fmt::Display for Polynomial<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (1..=self.nvars).map(|i| format!("x{i}")).collect();
        f.write_str(&self.to_string_with(&names))
    }
}

impl<T: fmt::Debug> fmt::Debug for Polynomial<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.terms.iter()).finish()
    }
}

impl<T: Coefficient> Add for &Polynomial<T> {
    type Output = Polynomial<T>;
    fn add(self, rhs: &Polynomial<T>) -> Polynomial<T> {
        assert_eq!(self.nvars, rhs.nvars);
        let mut out = self.clone();
        for (a, c) in &rhs.terms {
            out.add_term(a.clone(), c.clone());
        }
        out
    }
}

impl<T: Coefficient> Sub for &Polynomial<T> {
    type Output = Polynomial<T>;
    fn sub(self, rhs: &Polynomial<T>) -> Polynomial<T> {
        assert_eq!(self.nvars, rhs.nvars);
        let mut out = self.clone();
        for (a, c) in &rhs.terms {
            out.add_term(a.clone(), -c.clone());
        }
        out
    }
}

impl<T: Coefficient> Mul for &Polynomial<T> {
    type Output = Polynomial<T>;
    fn mul(self, rhs: &Polynomial<T>) -> Polynomial<T> {
        assert_eq!(self.nvars, rhs.nvars);
        let mut out = Polynomial::zero(self.nvars);
        for (a, c) in &self.terms {
            for (b, d) in &rhs.terms {
                out.add_term(a.add(b), c.clone() * d.clone());
            }
        }
        out
    }
}

impl<T: Coefficient> Neg for &Polynomial<T> {
    type Output = Polynomial<T>;
    fn neg(self) -> Polynomial<T> {
        Polynomial { nvars: self.nvars, terms: self.terms.iter().map(|(a, c)| (a.clone(), -c.clone())).collect() }
    }
}

macro_rules! owned_ops {
    ($($tr:ident $m:ident),*) => {$(
        impl<T: Coefficient> $tr for Polynomial<T> {
            type Output = Polynomial<T>;
            fn $m(self, rhs: Polynomial<T>) -> Polynomial<T> {
                (&self).$m(&rhs)
            }
        }
    )*};
}
owned_ops!(Add add, Sub sub, Mul mul);

impl<T: Coefficient> Neg for Polynomial<T> {
    type Output = Polynomial<T>;
    fn neg(self) -> Polynomial<T> {
        -&self
    }
}

/// `f64` copy of a polynomial with precomputed exponent table, for the hot
/// loops of simulation and LP assembly.
#[derive(Debug, Clone)]
pub struct CompiledPoly {
    nvars: usize,
    max_exp: Vec<u32>,
    terms: Vec<(Vec<u32>, f64)>,
}

impl CompiledPoly {
    pub fn new<T: Coefficient>(p: &Polynomial<T>, to_f64: impl Fn(&T) -> f64) -> Self {
        let n = p.nvars();
        let mut max_exp = vec![0; n];
        let terms = p
            .terms()
            .map(|(a, c)| {
                for (m, &e) in max_exp.iter_mut().zip(a.as_slice()) {
                    *m = (*m).max(e);
                }
                (a.as_slice().to_vec(), to_f64(c))
            })
            .collect();
        Self { nvars: n, max_exp, terms }
    }

    pub fn eval(&self, x: &[u32]) -> f64 {
        debug_assert_eq!(x.len(), self.nvars);
        if self.terms.len() == 1 && self.terms[0].0.iter().all(|&e| e == 0) {
            return self.terms[0].1;
        }
        // Powers per coordinate, then one product per term.
        let mut pows: Vec<Vec<f64>> = Vec::with_capacity(self.nvars);
        for (i, &m) in self.max_exp.iter().enumerate() {
            let xi = x[i] as f64;
            let mut v = Vec::with_capacity(m as usize + 1);
            let mut acc = 1.0;
            for _ in 0..=m {
                v.push(acc);
                acc *= xi;
            }
            pows.push(v);
        }
        self.terms.iter().map(|(a, c)| a.iter().enumerate().fold(*c, |acc, (i, &e)| acc * pows[i][e as usize])).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_rational::BigRational;

    type P = Polynomial<BigRational>;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn binomial_shifts() {
        let p = P::shifted_monomial(&MultiIndex::new(vec![1]), &[1]);
        assert_eq!(p, &P::var(1, 0) + &P::one(1));
        let p = P::shifted_monomial(&MultiIndex::new(vec![2]), &[-1]);
        let x = P::var(1, 0);
        let expected = &(&(&x * &x) - &x.scale(&q(2, 1))) + &P::one(1);
        assert_eq!(p, expected);
    }

    #[test]
    fn zero_terms_are_dropped() {
        let x = P::var(2, 0);
        let d = &x - &x;
        assert!(d.is_zero());
        assert_eq!(d.num_terms(), 0);
        assert_eq!(d.degree(), 0);
    }

    #[test]
    fn rendering() {
        let x = P::var(2, 0);
        let y = P::var(2, 1);
        let p = &(&(&x * &y).scale(&q(-3, 2)) + &y.pow(3)) + &P::constant(2, q(1, 3));
        assert_eq!(p.to_string(), "x2^3 - 3/2*x1*x2 + 1/3");
    }

    #[test]
    fn compiled_matches_exact() {
        let x = P::var(2, 0);
        let y = P::var(2, 1);
        let p = &(&x.pow(3) * &y) - &y.scale(&q(7, 3));
        let c = CompiledPoly::new(&p, |v| num_traits::ToPrimitive::to_f64(v).unwrap());
        let exact: f64 = num_traits::ToPrimitive::to_f64(&p.eval_state(&[3, 5])).unwrap();
        assert!((c.eval(&[3, 5]) - exact).abs() < 1e-12);
    }
}
