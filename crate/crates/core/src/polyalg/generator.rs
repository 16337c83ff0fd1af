use super::{MomentVectorIndex, MultiIndex, PolyError};
use crate::model::ReactionNetwork;
use crate::{Poly, RatFn, Rational};

/// `(x + v)^α` expanded.
pub fn shift_expand(alpha: &MultiIndex, v: &[i64]) -> Poly {
    Poly::shifted_monomial(alpha, v)
}

/// `g = o · Q x^α = Σ_j s_j(x) ((x + v_j)^α − x^α)`.
pub fn generator_polynomial(net: &ReactionNetwork, alpha: &MultiIndex) -> Poly {
    let n = net.n();
    let mono = Poly::monomial(alpha.clone(), Rational::from_integer(1.into()));
    let mut g = Poly::zero(n);
    for j in 0..net.m() {
        let diff = &shift_expand(alpha, net.net_change(j)) - &mono;
        g = &g + &(net.numerator(j) * &diff);
    }
    g
}

/// Coefficients of the `α`-moment equation `Σ_β g_β z_β = 0` over the basis
/// of order `d`. Requires `|α| ≤ d − d_a + 1` so that every term fits.
pub fn moment_equation_coeffs(net: &ReactionNetwork, alpha: &MultiIndex, d: u32) -> Result<Vec<Rational>, PolyError> {
    let idx = MomentVectorIndex::new(net.n(), d);
    moment_equation_over(net, alpha, &idx)
}

pub(crate) fn moment_equation_over(net: &ReactionNetwork, alpha: &MultiIndex, idx: &MomentVectorIndex) -> Result<Vec<Rational>, PolyError> {
    let d = idx.d;
    let needed = (alpha.degree() + net.d_a()).saturating_sub(1);
    if needed > d {
        return Err(PolyError::DegreeViolation { degree: alpha.degree(), needed, d });
    }
    let g = generator_polynomial(net, alpha);
    Ok(g.coefficients_over(idx.basis(), |b| idx.position(b)).expect("degree budget checked"))
}

/// `Qw = (Σ_j s_j(x) (w(x + v_j) − w(x))) / o(x)`, keeping the factors of `o`.
pub fn apply_generator_rational(net: &ReactionNetwork, w: &Poly) -> RatFn {
    let mut num = Poly::zero(net.n());
    for j in 0..net.m() {
        let diff = &w.shift(net.net_change(j)) - w;
        num = &num + &(net.numerator(j) * &diff);
    }
    RatFn::new(num, net.denominator_factors().to_vec()).expect("denominator factors are nonzero")
}
