//! Radial test functions `f(x) = F(|x|)`.
//!
//! Every profile is nonnegative. Sampled profiles live on a `log2`-radius
//! grid and interpolate linearly in `(log r, log F)`, which reproduces pure
//! power laws exactly between nodes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::parameters::ExponentSet;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RadialProfile {
    /// `c |x|^a`.
    PowerLaw {
        #[serde(rename = "a")]
        exponent: f64,
        #[serde(rename = "c", default = "one")]
        coefficient: f64,
    },
    /// `c |x|^a` for `|x| > R`, zero otherwise.
    TruncatedPowerLaw {
        #[serde(rename = "a")]
        exponent: f64,
        #[serde(rename = "c", default = "one")]
        coefficient: f64,
        #[serde(rename = "R")]
        inner_radius: f64,
    },
    /// Values at radii `2^{log2_radii[j]}`.
    Sampled {
        #[serde(rename = "grid")]
        log2_radii: Vec<f64>,
        values: Vec<f64>,
    },
    Sum {
        terms: Vec<RadialProfile>,
    },
    Scale {
        factor: f64,
        profile: Box<RadialProfile>,
    },
}

fn one() -> f64 {
    1.0
}

/// A single (possibly truncated) power term `c r^a 1_{r > R}`; `R = 0` means
/// no truncation and `c = 0` the zero function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerPiece {
    pub exponent: f64,
    pub coefficient: f64,
    pub inner_radius: f64,
}

impl RadialProfile {
    pub fn power_law(exponent: f64, coefficient: f64) -> Result<Self> {
        let p = RadialProfile::PowerLaw { exponent, coefficient };
        p.check()?;
        Ok(p)
    }

    pub fn truncated_power_law(exponent: f64, coefficient: f64, inner_radius: f64) -> Result<Self> {
        let p = RadialProfile::TruncatedPowerLaw { exponent, coefficient, inner_radius };
        p.check()?;
        Ok(p)
    }

    pub fn sampled(log2_radii: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        let p = RadialProfile::Sampled { log2_radii, values };
        p.check()?;
        Ok(p)
    }

    /// The constant function 1.
    pub fn one() -> Self {
        RadialProfile::PowerLaw { exponent: 0.0, coefficient: 1.0 }
    }

    pub fn zero() -> Self {
        RadialProfile::Scale { factor: 0.0, profile: Box::new(Self::one()) }
    }

    pub fn scaled(self, factor: f64) -> Result<Self> {
        let p = RadialProfile::Scale { factor, profile: Box::new(self) };
        p.check()?;
        Ok(p)
    }

    /// Samples `self` on the given `log2` grid.
    pub fn resample(&self, log2_radii: &[f64]) -> Result<Self> {
        let values = log2_radii.iter().map(|&u| self.eval(u.exp2())).collect::<Result<Vec<_>>>()?;
        Self::sampled(log2_radii.to_vec(), values)
    }

    pub fn check(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidProfile(m));
        match self {
            RadialProfile::PowerLaw { exponent, coefficient } => {
                if !exponent.is_finite() || !(*coefficient > 0.0 && coefficient.is_finite()) {
                    return bad(format!("power law needs finite a and c > 0 (a={exponent}, c={coefficient})"));
                }
            }
            RadialProfile::TruncatedPowerLaw { exponent, coefficient, inner_radius } => {
                if !exponent.is_finite() || !(*coefficient > 0.0 && coefficient.is_finite()) {
                    return bad(format!("power law needs finite a and c > 0 (a={exponent}, c={coefficient})"));
                }
                if !(*inner_radius > 0.0 && inner_radius.is_finite()) {
                    return bad(format!("inner radius {inner_radius} must be positive"));
                }
            }
            RadialProfile::Sampled { log2_radii, values } => {
                if log2_radii.is_empty() || log2_radii.len() != values.len() {
                    return bad(format!(
                        "sampled profile needs matching nonempty grid and values ({} vs {})",
                        log2_radii.len(),
                        values.len()
                    ));
                }
                if log2_radii.iter().any(|u| !u.is_finite()) {
                    return bad("grid contains non-finite entries".into());
                }
                if log2_radii.windows(2).any(|w| w[0] >= w[1]) {
                    return bad("grid must be strictly increasing".into());
                }
                if values.iter().any(|v| !(*v >= 0.0 && v.is_finite())) {
                    return bad("sampled values must be finite and nonnegative".into());
                }
            }
            RadialProfile::Sum { terms } => {
                if terms.is_empty() {
                    return bad("empty sum".into());
                }
                for t in terms {
                    t.check()?;
                }
            }
            RadialProfile::Scale { factor, profile } => {
                if !(*factor >= 0.0 && factor.is_finite()) {
                    return bad(format!("scale factor {factor} must be finite and nonnegative"));
                }
                profile.check()?;
            }
        }
        Ok(())
    }

    /// Pointwise value at radius `r > 0`.
    pub fn eval(&self, r: f64) -> Result<f64> {
        if !(r > 0.0) {
            return Err(Error::NonPositiveRadius(r));
        }
        Ok(self.value_at(r))
    }

    /// Unchecked evaluation; `r` must be positive.
    pub(crate) fn value_at(&self, r: f64) -> f64 {
        match self {
            RadialProfile::PowerLaw { exponent, coefficient } => coefficient * r.powf(*exponent),
            RadialProfile::TruncatedPowerLaw { exponent, coefficient, inner_radius } => {
                if r > *inner_radius {
                    coefficient * r.powf(*exponent)
                } else {
                    0.0
                }
            }
            RadialProfile::Sampled { log2_radii, values } => sampled_value(log2_radii, values, r.log2()),
            RadialProfile::Sum { terms } => terms.iter().map(|t| t.value_at(r)).sum(),
            RadialProfile::Scale { factor, profile } => {
                if *factor == 0.0 {
                    0.0
                } else {
                    factor * profile.value_at(r)
                }
            }
        }
    }

    /// `x ↦ f(c x)` for `c ≠ 0`.
    pub fn dilate(&self, c: f64) -> Result<Self> {
        if !(c != 0.0 && c.is_finite()) {
            return Err(Error::InvalidProfile(format!("dilation factor {c} must be finite and nonzero")));
        }
        let c = c.abs();
        Ok(match self {
            RadialProfile::PowerLaw { exponent, coefficient } => {
                RadialProfile::PowerLaw { exponent: *exponent, coefficient: coefficient * c.powf(*exponent) }
            }
            RadialProfile::TruncatedPowerLaw { exponent, coefficient, inner_radius } => RadialProfile::TruncatedPowerLaw {
                exponent: *exponent,
                coefficient: coefficient * c.powf(*exponent),
                inner_radius: inner_radius / c,
            },
            RadialProfile::Sampled { log2_radii, values } => {
                let shift = c.log2();
                RadialProfile::Sampled { log2_radii: log2_radii.iter().map(|u| u - shift).collect(), values: values.clone() }
            }
            RadialProfile::Sum { terms } => {
                RadialProfile::Sum { terms: terms.iter().map(|t| t.dilate(c)).collect::<Result<_>>()? }
            }
            RadialProfile::Scale { factor, profile } => {
                RadialProfile::Scale { factor: *factor, profile: Box::new(profile.dilate(c)?) }
            }
        })
    }

    /// The single power term this profile reduces to, if any.
    pub fn power_piece(&self) -> Option<PowerPiece> {
        match self {
            RadialProfile::PowerLaw { exponent, coefficient } => {
                Some(PowerPiece { exponent: *exponent, coefficient: *coefficient, inner_radius: 0.0 })
            }
            RadialProfile::TruncatedPowerLaw { exponent, coefficient, inner_radius } => {
                Some(PowerPiece { exponent: *exponent, coefficient: *coefficient, inner_radius: *inner_radius })
            }
            RadialProfile::Scale { factor, profile } => profile.power_piece().map(|mut piece| {
                piece.coefficient *= factor;
                piece
            }),
            RadialProfile::Sum { terms } if terms.len() == 1 => terms[0].power_piece(),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            RadialProfile::PowerLaw { .. } | RadialProfile::TruncatedPowerLaw { .. } => false,
            RadialProfile::Sampled { values, .. } => values.iter().all(|&v| v == 0.0),
            RadialProfile::Sum { terms } => terms.iter().all(RadialProfile::is_zero),
            RadialProfile::Scale { factor, profile } => *factor == 0.0 || profile.is_zero(),
        }
    }

    /// `log2` radii where the profile is not smooth (cutoffs and grid nodes).
    pub fn log2_breakpoints(&self) -> Vec<f64> {
        let mut out = Vec::new();
        self.collect_breakpoints(&mut out);
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }

    fn collect_breakpoints(&self, out: &mut Vec<f64>) {
        match self {
            RadialProfile::PowerLaw { .. } => {}
            RadialProfile::TruncatedPowerLaw { inner_radius, .. } => out.push(inner_radius.log2()),
            RadialProfile::Sampled { log2_radii, .. } => out.extend_from_slice(log2_radii),
            RadialProfile::Sum { terms } => terms.iter().for_each(|t| t.collect_breakpoints(out)),
            RadialProfile::Scale { profile, .. } => profile.collect_breakpoints(out),
        }
    }

    /// `log2` radii where the profile jumps (truncation radii).
    pub fn log2_jumps(&self) -> Vec<f64> {
        let mut out = Vec::new();
        self.collect_jumps(&mut out);
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }

    fn collect_jumps(&self, out: &mut Vec<f64>) {
        match self {
            RadialProfile::TruncatedPowerLaw { inner_radius, .. } => out.push(inner_radius.log2()),
            RadialProfile::Sum { terms } => terms.iter().for_each(|t| t.collect_jumps(out)),
            RadialProfile::Scale { profile, .. } => profile.collect_jumps(out),
            RadialProfile::PowerLaw { .. } | RadialProfile::Sampled { .. } => {}
        }
    }

    /// Power-law order of the profile as `r → 0`; `None` when it vanishes
    /// identically near the origin.
    pub fn origin_exponent(&self) -> Option<f64> {
        match self {
            RadialProfile::PowerLaw { exponent, .. } => Some(*exponent),
            RadialProfile::TruncatedPowerLaw { .. } => None,
            RadialProfile::Sampled { log2_radii, values } => {
                if values[0] == 0.0 {
                    None
                } else if values.len() > 1 && values[1] > 0.0 {
                    Some((values[1].log2() - values[0].log2()) / (log2_radii[1] - log2_radii[0]))
                } else {
                    Some(0.0)
                }
            }
            RadialProfile::Sum { terms } => {
                terms.iter().filter_map(RadialProfile::origin_exponent).min_by(f64::total_cmp)
            }
            RadialProfile::Scale { factor, profile } => {
                if *factor == 0.0 {
                    None
                } else {
                    profile.origin_exponent()
                }
            }
        }
    }
}

/// Log-log interpolation on a `log2` grid; pieces touching a zero value fall
/// back to linear interpolation of the values.
fn sampled_value(grid: &[f64], values: &[f64], u: f64) -> f64 {
    let n = grid.len();
    if n == 1 {
        return values[0];
    }
    if u <= grid[0] {
        return extend(grid[0], grid[1], values[0], values[1], u);
    }
    if u >= grid[n - 1] {
        return extend(grid[n - 1], grid[n - 2], values[n - 1], values[n - 2], u);
    }
    // first index with grid[j] > u
    let j = grid.partition_point(|&g| g <= u);
    let (u0, u1, v0, v1) = (grid[j - 1], grid[j], values[j - 1], values[j]);
    if u == u0 {
        return v0;
    }
    let w = (u - u0) / (u1 - u0);
    if v0 > 0.0 && v1 > 0.0 {
        let l0 = v0.log2();
        (l0 + w * (v1.log2() - l0)).exp2()
    } else {
        v0 + w * (v1 - v0)
    }
}

/// Extension past a boundary node `(u_edge, v_edge)` along the slope to its neighbour.
fn extend(u_edge: f64, u_next: f64, v_edge: f64, v_next: f64, u: f64) -> f64 {
    if u == u_edge || v_edge == 0.0 {
        return v_edge;
    }
    if v_next > 0.0 {
        let slope = (v_edge.log2() - v_next.log2()) / (u_edge - u_next);
        v_edge * (slope * (u - u_edge)).exp2()
    } else {
        v_edge
    }
}

/// `|x|^{-α_i - (d+γ_i)/q_i + λ_i}`, the extremal input for the Morrey-Herz
/// sharp bound.
pub fn extremal_morrey_herz(exponents: &ExponentSet, i: usize) -> Result<RadialProfile> {
    exponents.check()?;
    if i >= exponents.m {
        return Err(Error::InvalidExponents(format!("factor index {i} out of range (m = {})", exponents.m)));
    }
    let (alpha, lambda) = (exponents.alpha[i], exponents.lambda[i]);
    let mut violations = Vec::new();
    if !(lambda > 0.0) {
        violations.push(format!("λ_{i} = {lambda} must be positive"));
    }
    if !(lambda > alpha) {
        violations.push(format!("λ_i>α_i required (factor {i}: λ={lambda}, α={alpha})"));
    }
    if !violations.is_empty() {
        return Err(Error::Precondition(violations));
    }
    let d = exponents.d as f64;
    RadialProfile::power_law(-alpha - (d + exponents.gamma[i]) / exponents.q[i] + lambda, 1.0)
}

/// `|x|^{-α_i - (d+γ_i)/q_i - ε}` restricted to `|x| > 1`, the `ε`-family
/// approaching the sharp Herz constant.
pub fn extremal_herz(exponents: &ExponentSet, i: usize, epsilon: f64) -> Result<RadialProfile> {
    exponents.check()?;
    if i >= exponents.m {
        return Err(Error::InvalidExponents(format!("factor index {i} out of range (m = {})", exponents.m)));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::Precondition(vec![format!("ε = {epsilon} must lie in (0, 1)")]));
    }
    let d = exponents.d as f64;
    RadialProfile::truncated_power_law(-exponents.alpha[i] - (d + exponents.gamma[i]) / exponents.q[i] - epsilon, 1.0, 1.0)
}
