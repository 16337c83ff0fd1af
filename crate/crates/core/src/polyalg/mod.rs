//! Exact sparse polynomial and rational-function algebra, the generator
//! applied to monomials, and the index structure of moment and localizing
//! matrices.

mod generator;
mod monomial;
mod polynomial;
mod rational;
mod structure;

pub(crate) use generator::moment_equation_over;
pub use generator::{apply_generator_rational, generator_polynomial, moment_equation_coeffs, shift_expand};
pub use monomial::MultiIndex;
pub use polynomial::{Coefficient, CompiledPoly, Polynomial};
pub use rational::RationalFunction;
pub use structure::{localizing_structure, LocalizingMatrixSymbolic, MomentVectorIndex};

use num_bigint::BigInt;

use crate::{Poly, Rational};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PolyError {
    #[error("moment equation of degree {degree} needs order at least {needed}, got {d}")]
    DegreeViolation { degree: u32, needed: u32, d: u32 },
}

/// `(α, numerator, denominator)` with integers in decimal.
pub type Triple = (Vec<u32>, String, String);

/// Canonical serialization: graded-lex sorted triples, coefficients in
/// lowest terms with positive denominators.
pub fn poly_to_triples(p: &Poly) -> Vec<Triple> {
    p.terms().map(|(a, c)| (a.as_slice().to_vec(), c.numer().to_string(), c.denom().to_string())).collect()
}

pub fn poly_from_triples(nvars: usize, t: &[Triple]) -> Result<Poly, String> {
    let mut terms = Vec::with_capacity(t.len());
    for (a, num, den) in t {
        if a.len() != nvars {
            return Err(format!("exponent {a:?} has wrong length"));
        }
        let num: BigInt = num.parse().map_err(|_| format!("bad numerator `{num}`"))?;
        let den: BigInt = den.parse().map_err(|_| format!("bad denominator `{den}`"))?;
        if den == BigInt::from(0) {
            return Err("zero denominator".into());
        }
        terms.push((MultiIndex::new(a.clone()), Rational::new(num, den)));
    }
    Ok(Poly::from_terms(nvars, terms))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triples_round_trip() {
        let x = Poly::var(2, 0);
        let y = Poly::var(2, 1);
        let p = &(&x * &y).scale(&Rational::new((-3).into(), 6.into())) + &y.pow(2);
        let t = poly_to_triples(&p);
        assert_eq!(t[0], (vec![1, 1], "-1".to_string(), "2".to_string()));
        assert_eq!(t[1], (vec![0, 2], "1".to_string(), "1".to_string()));
        assert_eq!(poly_from_triples(2, &t).unwrap(), p);
    }
}
