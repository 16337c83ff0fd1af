use super::MomentError;

/// Closed-form `E^3` bounds for the Schlögl model with rates `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchloglE3 {
    /// `b_1 = k_3`, `b_2 = k_1 + 2k_2 + k_4`, `b_3 = k_1 + 3k_2`, `b_4 = k_2`.
    pub b: [f64; 4],
    /// Rightmost root of `x (b_1 − b_2 x + b_3 x² − b_4 x³)`.
    pub r4: f64,
    pub u1: f64,
    pub u2: f64,
}

impl SchloglE3 {
    fn disc(&self, x: f64) -> f64 {
        let [b1, b2, b3, b4] = self.b;
        4.0 * b1 * b4 * x + (b3 * b3 - 4.0 * b2 * b4) * x * x
    }

    /// `r_2^+(x)`: the largest second moment compatible with mean `x`.
    pub fn r2_plus(&self, x: f64) -> f64 {
        let [_, _, b3, b4] = self.b;
        (b3 * x + self.disc(x).max(0.0).sqrt()) / (2.0 * b4)
    }

    /// `r_2^-(x)`.
    pub fn r2_minus(&self, x: f64) -> f64 {
        let [_, _, b3, b4] = self.b;
        (b3 * x - self.disc(x).max(0.0).sqrt()) / (2.0 * b4)
    }
}

pub fn schlogl_coefficients(k: [f64; 4]) -> [f64; 4] {
    [k[2], k[0] + 2.0 * k[1] + k[3], k[0] + 3.0 * k[1], k[1]]
}

/// Rightmost real root of `b_4 x³ − b_3 x² + b_2 x − b_1` (positive leading
/// coefficient), by bisection on a monotone bracket and a Newton polish.
pub fn rightmost_cubic_root(b: [f64; 4]) -> f64 {
    let [b1, b2, b3, b4] = b;
    let p = |x: f64| ((b4 * x - b3) * x + b2) * x - b1;
    let dp = |x: f64| (3.0 * b4 * x - 2.0 * b3) * x + b2;
    let cauchy = 1.0 + (b1.abs().max(b2.abs()).max(b3.abs())) / b4;
    // Critical points of p.
    let disc = 4.0 * b3 * b3 - 12.0 * b4 * b2;
    let (lo, hi) = if disc <= 0.0 {
        (-cauchy, cauchy)
    } else {
        let s = disc.sqrt();
        let c_min = (2.0 * b3 - s) / (6.0 * b4);
        let c_max = (2.0 * b3 + s) / (6.0 * b4);
        if p(c_max) <= 0.0 {
            (c_max, cauchy)
        } else {
            (-cauchy, c_min)
        }
    };
    let (mut lo, mut hi) = (lo, hi);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if p(mid) <= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi.abs().max(1.0) {
            break;
        }
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..3 {
        let d = dp(x);
        if d == 0.0 {
            break;
        }
        let next = x - p(x) / d;
        if (lo..=hi).contains(&next) {
            x = next;
        }
    }
    x
}

/// `(u^3_1, u^3_2) = (r_4, r_2^+(r_4))`, valid when `b_3 ≥ 2√(b_2 b_4)`.
pub fn analytic_schlogl_e3(k: [f64; 4]) -> Result<SchloglE3, MomentError> {
    if k.iter().any(|&v| !(v > 0.0) || !v.is_finite()) {
        return Err(MomentError::UnsupportedBranch("rates must be positive".into()));
    }
    let b = schlogl_coefficients(k);
    if b[2] < 2.0 * (b[1] * b[3]).sqrt() * (1.0 - 1e-15) {
        return Err(MomentError::UnsupportedBranch("b_3 < 2 sqrt(b_2 b_4)".into()));
    }
    let r4 = rightmost_cubic_root(b).max(0.0);
    let mut out = SchloglE3 { b, r4, u1: r4, u2: 0.0 };
    out.u2 = out.r2_plus(r4);
    Ok(out)
}
