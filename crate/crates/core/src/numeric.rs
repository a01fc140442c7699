//! Small numerical helpers shared by the norm, constant and quadrature code.

use std::f64::consts::LN_2;

/// Below this magnitude the divided differences switch to their Taylor series.
pub const SERIES_THRESHOLD: f64 = 1e-6;

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl std::iter::FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Compensated sum of an iterator of floats.
pub fn accurate_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    values.into_iter().collect::<CompensatedSum>().value()
}

/// `(2^x - 1) / x`, continuously extended by `ln 2` at `x = 0`.
pub fn two_pow_minus_one_over(x: f64) -> f64 {
    if x.abs() < SERIES_THRESHOLD {
        // ln2 (1 + x ln2 / 2 + (x ln2)^2 / 6)
        let y = x * LN_2;
        LN_2 * (1.0 + y / 2.0 + y * y / 6.0)
    } else {
        (x * LN_2).exp_m1() / x
    }
}

/// `(1 - 2^{-x}) / x`, continuously extended by `ln 2` at `x = 0`.
pub fn one_minus_two_pow_neg_over(x: f64) -> f64 {
    if x.abs() < SERIES_THRESHOLD {
        let y = x * LN_2;
        LN_2 * (1.0 - y / 2.0 + y * y / 6.0)
    } else {
        -(-x * LN_2).exp_m1() / x
    }
}

/// `ln((1 - e^{-y}) / y)`, valid for every real `y` without overflow.
fn ln_expm1_ratio(y: f64) -> f64 {
    if y.abs() < SERIES_THRESHOLD {
        -y / 2.0 + y * y / 24.0
    } else if y > 0.0 {
        (-(-y).exp_m1() / y).ln()
    } else {
        // g(y) = e^{-y} g(-y)
        -y + ln_expm1_ratio(-y)
    }
}

/// Natural log of `∫_lo^hi r^{s-1} dr` for `0 < lo < hi`.
pub fn ln_power_integral(s: f64, lo: f64, hi: f64) -> f64 {
    debug_assert!(0.0 < lo && lo < hi);
    let width = (hi / lo).ln();
    s * hi.ln() + ln_expm1_ratio(s * width) + width.ln()
}

/// `ln(Σ exp(x_i))` with `-∞` entries allowed; returns `-∞` for an empty or all-zero sum.
pub fn ln_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    if max == f64::INFINITY {
        return f64::INFINITY;
    }
    let s = accurate_sum(values.iter().map(|&v| (v - max).exp()));
    max + s.ln()
}

/// Relative difference `|a-b| / max(|a|,|b|)`, zero when both vanish.
pub fn rel_diff(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}
