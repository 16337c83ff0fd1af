use num_complex::Complex64;

use super::BirthDeathError;

/// `₂F₂(a₁, a₂; b₁, b₂; z)` by direct partial sums. Terms are generated by
/// their ratio, then summed twice (forward, and from the smallest term
/// back); the two sums must agree to `1e−10`. Stops once the term ratio has
/// dropped below one half and the running term is below `1e−18` of the sum.
pub fn hypergeometric_2f2(a: [Complex64; 2], b: [Complex64; 2], z: f64) -> Result<Complex64, BirthDeathError> {
    let mut terms = vec![Complex64::new(1.0, 0.0)];
    let mut sum = terms[0];
    let mut k = 0usize;
    loop {
        let kf = k as f64;
        let den = (b[0] + kf) * (b[1] + kf) * (kf + 1.0);
        if den.norm() == 0.0 {
            return Err(BirthDeathError::Invalid("2F2 lower parameter is a non-positive integer".into()));
        }
        let ratio = (a[0] + kf) * (a[1] + kf) / den * z;
        let t = terms[k] * ratio;
        if !(t.re.is_finite() && t.im.is_finite()) {
            return Err(BirthDeathError::Invalid("2F2 series overflowed".into()));
        }
        terms.push(t);
        sum += t;
        k += 1;
        if t.norm() == 0.0 || (ratio.norm() < 0.5 && t.norm() < 1e-18 * sum.norm()) {
            break;
        }
        if k > 1_000_000 {
            return Err(BirthDeathError::Invalid("2F2 series did not converge".into()));
        }
    }
    let reverse: Complex64 = terms.iter().rev().sum();
    if (reverse - sum).norm() > 1e-10 * sum.norm() {
        return Err(BirthDeathError::Invalid("2F2 summation orders disagree".into()));
    }
    Ok(sum)
}

/// `1/π(0)` for Schlögl's model as `₂F₂(−(1+c₁)/2, (c₁−1)/2; −(1+c₂)/2,
/// (c₂−1)/2; k₁/k₂)` with `c₁ = √(1−4k₃/k₁)`, `c₂ = √(1−4k₄/k₂)` (complex
/// when the radicand is negative).
pub fn schlogl_normalizer_2f2(k: [f64; 4]) -> Result<f64, BirthDeathError> {
    let c1 = Complex64::new(1.0 - 4.0 * k[2] / k[0], 0.0).sqrt();
    let c2 = Complex64::new(1.0 - 4.0 * k[3] / k[1], 0.0).sqrt();
    let a = [-(c1 + 1.0) / 2.0, (c1 - 1.0) / 2.0];
    let b = [-(c2 + 1.0) / 2.0, (c2 - 1.0) / 2.0];
    let v = hypergeometric_2f2(a, b, k[0] / k[1])?;
    if v.im.abs() > 1e-9 * v.re.abs() {
        return Err(BirthDeathError::Invalid("2F2 value is not real".into()));
    }
    Ok(v.re)
}
