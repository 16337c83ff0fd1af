use serde::Serialize;

use super::MomentBound;

/// Closed interval with possibly infinite ends.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lo <= v && v <= self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    fn mul(self, o: Self) -> Self {
        let c = [self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi].map(|v| if v.is_nan() { 0.0 } else { v });
        Self::new(down(c.iter().copied().fold(f64::INFINITY, f64::min)), up(c.iter().copied().fold(f64::NEG_INFINITY, f64::max)))
    }

    fn add(self, o: Self) -> Self {
        Self::new(down(self.lo + o.lo), up(self.hi + o.hi))
    }

    fn scale(self, k: f64) -> Self {
        if k >= 0.0 {
            Self::new(down(self.lo * k), up(self.hi * k))
        } else {
            Self::new(down(self.hi * k), up(self.lo * k))
        }
    }

    /// `self / o` for `o.lo > 0`; the whole line otherwise.
    fn div_positive(self, o: Self) -> Self {
        if !(o.lo > 0.0) {
            return Self::new(f64::NEG_INFINITY, f64::INFINITY);
        }
        let c = [self.lo / o.lo, self.lo / o.hi, self.hi / o.lo, self.hi / o.hi].map(|v| if v.is_nan() { 0.0 } else { v });
        Self::new(down(c.iter().copied().fold(f64::INFINITY, f64::min)), up(c.iter().copied().fold(f64::NEG_INFINITY, f64::max)))
    }
}

fn down(v: f64) -> f64 {
    if v.is_finite() {
        v - v.abs() * 4.0 * f64::EPSILON - f64::MIN_POSITIVE
    } else {
        v
    }
}

fn up(v: f64) -> f64 {
    if v.is_finite() {
        v + v.abs() * 4.0 * f64::EPSILON + f64::MIN_POSITIVE
    } else {
        v
    }
}

/// Enclosures of variance, coefficient of variation and skewness of one
/// species from interval bounds on its first three moments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StatsIntervals {
    pub variance: Interval,
    pub cv: Interval,
    pub skewness: Interval,
}

pub fn stats_intervals(m1: &MomentBound, m2: &MomentBound, m3: &MomentBound) -> StatsIntervals {
    stats_from_intervals(
        Interval::new(m1.lower.max(0.0), m1.upper),
        Interval::new(m2.lower.max(0.0), m2.upper),
        Interval::new(m3.lower.max(0.0), m3.upper),
    )
}

/// Interval propagation with outward rounding; moments of a nonnegative
/// variable are assumed.
pub fn stats_from_intervals(m1: Interval, m2: Interval, m3: Interval) -> StatsIntervals {
    let var = Interval::new(down(m2.lo - m1.hi * m1.hi).max(0.0), up(m2.hi - m1.lo * m1.lo));
    let sd = Interval::new(down(var.lo.sqrt()).max(0.0), up(var.hi.sqrt()));
    let cv = if m1.lo > 0.0 { sd.div_positive(m1) } else { Interval::new(sd.lo / m1.hi.max(f64::MIN_POSITIVE), f64::INFINITY) };
    let cv = Interval::new(cv.lo.max(0.0), cv.hi);
    // E[(x − μ)³] = m3 − 3 m1 m2 + 2 m1³, each term propagated separately.
    let m1_cubed = Interval::new(down(m1.lo.powi(3)), up(m1.hi.powi(3)));
    let third = m3.add(m1.mul(m2).scale(-3.0)).add(m1_cubed.scale(2.0));
    let denom = Interval::new(down(var.lo.powf(1.5)), up(var.hi.powf(1.5)));
    let skewness = third.div_positive(denom);
    StatsIntervals { variance: var, cv, skewness }
}
