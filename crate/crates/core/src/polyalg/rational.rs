use std::fmt;

use num_traits::Signed;

use super::polynomial::{Coefficient, Polynomial};

/// `num / ∏ f_k^{m_k}` with the denominator kept as a list of factors.
///
/// Factors are normalized so that their graded-lex leading coefficient is 1
/// and compared syntactically (as expanded polynomials); no factorization or
/// cancellation is attempted. Constant factors are folded into the numerator.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct RationalFunction<T> {
    num: Polynomial<T>,
    den: Vec<(Polynomial<T>, u32)>,
}

impl<T: Coefficient> RationalFunction<T> {
    pub fn from_poly(p: Polynomial<T>) -> Self {
        Self { num: p, den: Vec::new() }
    }

    pub fn constant(nvars: usize, c: T) -> Self {
        Self::from_poly(Polynomial::constant(nvars, c))
    }

    pub fn nvars(&self) -> usize {
        self.num.nvars()
    }

    pub fn numerator(&self) -> &Polynomial<T> {
        &self.num
    }

    pub fn factors(&self) -> &[(Polynomial<T>, u32)] {
        &self.den
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// Value when the expression is a constant.
    pub fn as_constant(&self) -> Option<T> {
        if self.den.is_empty() && self.num.is_constant() {
            Some(self.num.constant_term())
        } else {
            None
        }
    }

    /// The expanded denominator `∏ f_k^{m_k}`.
    pub fn denominator(&self) -> Polynomial<T> {
        let mut d = Polynomial::one(self.nvars());
        for (f, m) in &self.den {
            d = &d * &f.pow(*m);
        }
        d
    }

    /// Builds `num / ∏ f^m`, normalizing each factor.
    pub fn new(num: Polynomial<T>, factors: Vec<(Polynomial<T>, u32)>) -> Option<Self> {
        let mut out = Self::from_poly(num);
        for (f, m) in factors {
            for _ in 0..m {
                out = out.div_poly(&f)?;
            }
        }
        Some(out)
    }

    fn div_poly(mut self, g: &Polynomial<T>) -> Option<Self> {
        let (_, lc) = g.leading()?;
        let lc = lc.clone();
        let inv = T::one() / lc;
        self.num = self.num.scale(&inv);
        if g.is_constant() {
            return Some(self.normalized());
        }
        let monic = g.scale(&inv);
        match self.den.iter_mut().find(|(f, _)| *f == monic) {
            Some(e) => e.1 += 1,
            None => self.den.push((monic, 1)),
        }
        Some(self.normalized())
    }

    fn normalized(mut self) -> Self {
        if self.num.is_zero() {
            self.den.clear();
        }
        self
    }

    pub fn add(&self, other: &Self) -> Self {
        self.combine(other, false)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.combine(other, true)
    }

    fn combine(&self, other: &Self, negate: bool) -> Self {
        // Least common multiple of the factor lists.
        let mut lcm: Vec<(Polynomial<T>, u32)> = self.den.clone();
        for (f, m) in &other.den {
            match lcm.iter_mut().find(|(g, _)| g == f) {
                Some(e) => e.1 = e.1.max(*m),
                None => lcm.push((f.clone(), *m)),
            }
        }
        let cofactor = |den: &[(Polynomial<T>, u32)]| {
            let mut c = Polynomial::one(self.nvars());
            for (f, m) in &lcm {
                let have = den.iter().find(|(g, _)| g == f).map_or(0, |e| e.1);
                c = &c * &f.pow(m - have);
            }
            c
        };
        let a = &self.num * &cofactor(&self.den);
        let b = &other.num * &cofactor(&other.den);
        let num = if negate { &a - &b } else { &a + &b };
        Self { num, den: lcm }.normalized()
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut den = self.den.clone();
        for (f, m) in &other.den {
            match den.iter_mut().find(|(g, _)| g == f) {
                Some(e) => e.1 += m,
                None => den.push((f.clone(), *m)),
            }
        }
        Self { num: &self.num * &other.num, den }.normalized()
    }

    /// `self / other`; `None` on division by zero.
    pub fn div(&self, other: &Self) -> Option<Self> {
        if other.num.is_zero() {
            return None;
        }
        // Multiply by the reciprocal: other's factors move to the numerator.
        let mut out = Self { num: &self.num * &other.denominator(), den: self.den.clone() };
        out = out.div_poly(&other.num)?;
        Some(out)
    }

    pub fn neg(&self) -> Self {
        Self { num: -&self.num, den: self.den.clone() }
    }

    /// Integer power; negative exponents invert. `None` for `0^k`, `k < 0`.
    pub fn powi(&self, k: i64) -> Option<Self> {
        let mut out = Self::constant(self.nvars(), T::one());
        for _ in 0..k.unsigned_abs() {
            out = out.mul(self);
        }
        if k < 0 {
            Self::constant(self.nvars(), T::one()).div(&out)
        } else {
            Some(out)
        }
    }

    /// Evaluates numerator and denominator; `None` when the denominator
    /// vanishes.
    pub fn eval(&self, x: &[T]) -> Option<T> {
        let d = self.denominator().eval(x);
        if d.is_zero() {
            None
        } else {
            Some(self.num.eval(x) / d)
        }
    }

    /// Renders as `(num) / (f1) / (f2) ...`, parseable by the network DSL.
    pub fn to_string_with(&self, names: &[String]) -> String
    where
        T: fmt::Display + Signed,
    {
        let mut s = if self.den.is_empty() { self.num.to_string_with(names) } else { format!("({})", self.num.to_string_with(names)) };
        // Repeated division keeps multiplicities: `/ (f)^2` would parse as a
        // single expanded factor.
        for (f, m) in &self.den {
            let fs = f.to_string_with(names);
            for _ in 0..*m {
                s.push_str(&format!(" / ({fs})"));
            }
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_rational::BigRational;

    type P = Polynomial<BigRational>;
    type R = RationalFunction<BigRational>;

    fn int(v: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(v))
    }

    #[test]
    fn hill_denominator_is_one_factor() {
        // 30 / (1 + (x2/1)^3)
        let x2 = R::from_poly(P::var(2, 1));
        let hill = x2.div(&R::constant(2, int(1))).unwrap().powi(3).unwrap();
        let den = R::constant(2, int(1)).add(&hill);
        let a = R::constant(2, int(30)).div(&den).unwrap();
        assert_eq!(a.numerator(), &P::constant(2, int(30)));
        assert_eq!(a.factors().len(), 1);
        assert_eq!(a.factors()[0].0, &P::one(2) + &P::var(2, 1).pow(3));
    }

    #[test]
    fn sum_uses_least_common_multiple() {
        let f = R::from_poly(&P::one(1) + &P::var(1, 0));
        let inv = R::constant(1, int(1)).div(&f).unwrap();
        let s = inv.add(&inv);
        assert_eq!(s.factors().len(), 1);
        assert_eq!(s.factors()[0].1, 1);
        assert_eq!(s.numerator(), &P::constant(1, int(2)));
        let p = inv.mul(&inv);
        assert_eq!(p.factors()[0].1, 2);
    }

    #[test]
    fn leading_coefficient_is_normalized() {
        // 1 / (2x + 2) = (1/2) / (x + 1)
        let f = R::from_poly(&P::var(1, 0).scale(&int(2)) + &P::constant(1, int(2)));
        let r = R::constant(1, int(1)).div(&f).unwrap();
        assert_eq!(r.numerator().constant_term(), BigRational::new(1.into(), 2.into()));
        assert_eq!(r.factors()[0].0, &P::var(1, 0) + &P::one(1));
    }

    #[test]
    fn division_by_zero() {
        assert!(R::constant(1, int(1)).div(&R::constant(1, int(0))).is_none());
    }
}
