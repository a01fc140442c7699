//! The multilinear Hardy-Cesàro operator and its commutator on radial
//! profiles.
//!
//! For radial inputs the operator reduces to a function of `r = |x|`:
//!
//! ```text
//! U(f_1, …, f_m)(r) = ∫_{[0,1]^n} Π f_k(|s_k(t)| r) ψ(t) dt
//! ```
//!
//! and, with radial power symbols `b_k(x) = c_k |x|^{β_k}`, the commutator is
//!
//! ```text
//! U^b(f_1, …, f_m)(r) = ∫ Π f_k(|s_k(t)| r) Π c_k r^{β_k} (1 - |s_k(t)|^{β_k}) ψ(t) dt.
//! ```
//!
//! Pure power-law inputs produce pure power-law outputs whose coefficient is
//! a kernel integral; everything else is sampled on a `log2`-radius grid.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::norms::Window;
use crate::quadrature::{
    integrate_unit_cube_with, kernel_power_integral_with, AxisProfile, CubeOptions, Curve, Factor, IntegralResult,
    IntegralStatus, KernelSpec, Method, Singularity,
};
use crate::radial::RadialProfile;

/// Grid density used for sampled outputs.
pub const DEFAULT_NODES_PER_OCTAVE: usize = 128;

/// Octaves sampled past each end of a shell window.
pub const GRID_MARGIN: i32 = 4;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OperatorSpec {
    pub m: usize,
    pub n: usize,
    pub kernel: KernelSpec,
}

impl OperatorSpec {
    pub fn new(kernel: KernelSpec) -> Result<Self> {
        kernel.check()?;
        Ok(Self { m: kernel.m(), n: kernel.n, kernel })
    }

    /// The classical Hardy average with `m` factors.
    pub fn hardy(m: usize) -> Self {
        Self::new(KernelSpec::hardy(m)).expect("Hardy kernel is valid")
    }

    pub fn check(&self) -> Result<()> {
        self.kernel.check()?;
        if self.kernel.n != self.n || self.kernel.m() != self.m {
            return Err(Error::InvalidKernel(format!(
                "operator declares (m, n) = ({}, {}) but the kernel has ({}, {})",
                self.m,
                self.n,
                self.kernel.m(),
                self.kernel.n
            )));
        }
        Ok(())
    }

    fn check_inputs(&self, profiles: &[RadialProfile]) -> Result<()> {
        self.check()?;
        if profiles.len() != self.m {
            return Err(Error::InvalidProfile(format!("{} profiles for an operator with m = {}", profiles.len(), self.m)));
        }
        profiles.iter().try_for_each(RadialProfile::check)
    }
}

/// A radial Lipschitz symbol.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SymbolSpec {
    /// `b(x) = c |x|^β`, `0 < β < 1`; its Lipschitz seminorm is `|c|`.
    PowerSymbol { beta: f64, coefficient: f64 },
}

impl SymbolSpec {
    pub fn power(beta: f64, coefficient: f64) -> Result<Self> {
        let s = SymbolSpec::PowerSymbol { beta, coefficient };
        s.check()?;
        Ok(s)
    }

    /// The zero symbol of order `beta`.
    pub fn zero(beta: f64) -> Self {
        SymbolSpec::PowerSymbol { beta, coefficient: 0.0 }
    }

    pub fn check(&self) -> Result<()> {
        let SymbolSpec::PowerSymbol { beta, coefficient } = *self;
        if !(beta > 0.0 && beta < 1.0) {
            return Err(Error::InvalidProfile(format!("Lipschitz order β = {beta} must lie in (0, 1)")));
        }
        if !coefficient.is_finite() {
            return Err(Error::InvalidProfile("symbol coefficient must be finite".into()));
        }
        Ok(())
    }

    pub fn lipschitz_order(&self) -> f64 {
        let SymbolSpec::PowerSymbol { beta, .. } = *self;
        beta
    }

    pub fn lipschitz_constant(&self) -> f64 {
        let SymbolSpec::PowerSymbol { coefficient, .. } = *self;
        coefficient.abs()
    }

    pub fn coefficient(&self) -> f64 {
        let SymbolSpec::PowerSymbol { coefficient, .. } = *self;
        coefficient
    }

    /// `b(x)` at `|x| = r`.
    pub fn eval(&self, r: f64) -> f64 {
        let SymbolSpec::PowerSymbol { beta, coefficient } = *self;
        coefficient * r.powf(beta)
    }
}

/// `log2` radii from `lo` to `hi` with `per_octave` nodes per octave.
pub fn log2_grid(lo: f64, hi: f64, per_octave: usize) -> Vec<f64> {
    let steps = ((hi - lo) * per_octave as f64).round().max(0.0) as usize;
    (0..=steps).map(|j| lo + j as f64 / per_octave as f64).collect()
}

/// Grid covering the shells of `window` plus [`GRID_MARGIN`] octaves.
pub fn window_grid(window: Window, per_octave: usize) -> Vec<f64> {
    log2_grid((window.0 - 1 - GRID_MARGIN) as f64, (window.1 + GRID_MARGIN) as f64, per_octave)
}

/// Kernel actually integrated: min-power product kernels collapse to one
/// dimension.
fn working_kernel(kernel: &KernelSpec) -> KernelSpec {
    kernel.reduced().unwrap_or_else(|| kernel.clone())
}

/// Endpoint behaviour and jump points of `t ↦ Π f_k(|s_k(t)| r) ψ(t)`.
fn axes_for(kernel: &KernelSpec, profiles: &[RadialProfile], r: f64, rough: bool) -> Vec<AxisProfile> {
    // a profile vanishing near the origin switches the integrand off near t = 0
    let switched_off = profiles.iter().zip(&kernel.curves).any(|(f, c)| {
        f.origin_exponent().is_none() && !matches!(c, Curve::Callback { .. })
    });
    let exponents: Vec<f64> = profiles.iter().map(|f| f.origin_exponent().unwrap_or(0.0)).collect();
    let mut axes = kernel.axis_profiles(&exponents);
    if rough {
        for ax in &mut axes {
            ax.lower = ax.lower.rough();
        }
    }
    if switched_off {
        for ax in &mut axes {
            ax.lower = Singularity::Regular;
        }
    }
    if kernel.n == 1 {
        let mut points = Vec::new();
        for (f, curve) in profiles.iter().zip(&kernel.curves) {
            if let Curve::Power { b } = curve {
                // |s(t)| r = ρ  ⇔  t = (ρ / r)^{1/b}
                points.extend(f.log2_jumps().into_iter().map(|u| ((u - r.log2()) / b).exp2()));
            }
        }
        axes[0] = axes[0].clone().with_breakpoints(points);
    }
    axes
}

/// `U(f_1, …, f_m)(r)`.
pub fn apply_hardy_cesaro(spec: &OperatorSpec, profiles: &[RadialProfile], r: f64, tol: f64) -> Result<IntegralResult> {
    spec.check_inputs(profiles)?;
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::NonPositiveRadius(r));
    }
    if profiles.iter().any(RadialProfile::is_zero) {
        return Ok(IntegralResult::exact(0.0));
    }
    let kernel = working_kernel(&spec.kernel);
    let axes = axes_for(&kernel, profiles, r, false);
    let integrand = |t: &[f64], tc: &[f64]| {
        let mut v = kernel.psi_with(t, tc);
        for (k, f) in profiles.iter().enumerate() {
            if v == 0.0 {
                break;
            }
            v *= f.value_at(kernel.curve(k, t) * r);
        }
        v
    };
    integrate_unit_cube_with(integrand, kernel.n, &axes, CubeOptions::new(tol))
}

/// `(exponent, coefficient)` of each input when every input is a pure power law.
fn pure_powers(profiles: &[RadialProfile]) -> Option<Vec<(f64, f64)>> {
    profiles
        .iter()
        .map(|f| f.power_piece().filter(|p| p.inner_radius == 0.0).map(|p| (p.exponent, p.coefficient)))
        .collect()
}

fn require_converged(result: IntegralResult, radius: f64) -> Result<IntegralResult> {
    match result.status {
        IntegralStatus::Converged => Ok(result),
        IntegralStatus::Divergent => Err(Error::DivergentOutput { radius }),
        IntegralStatus::Inconclusive => {
            Err(Error::UnresolvedOutput { radius, reason: format!("quadrature inconclusive after {} evaluations", result.evaluations) })
        }
    }
}

fn power_output(exponent: f64, coefficient: f64) -> Result<RadialProfile> {
    if coefficient == 0.0 {
        Ok(RadialProfile::zero())
    } else {
        RadialProfile::power_law(exponent, coefficient)
    }
}

/// `U(f_1, …, f_m)` as a profile: an exact power law for pure power-law
/// inputs, otherwise sampled at the `log2` radii of `grid`.
pub fn apply_to_profile(spec: &OperatorSpec, profiles: &[RadialProfile], grid: &[f64], tol: f64) -> Result<RadialProfile> {
    spec.check_inputs(profiles)?;
    if profiles.iter().any(RadialProfile::is_zero) {
        return Ok(RadialProfile::zero());
    }
    if let Some(powers) = pure_powers(profiles) {
        let exponents: Vec<f64> = powers.iter().map(|p| p.0).collect();
        let k = kernel_power_integral_with(&spec.kernel, &exponents, &[], tol, Method::Auto)?;
        let k = require_converged(k, 1.0)?;
        let coefficient = powers.iter().map(|p| p.1).product::<f64>() * k.value;
        return power_output(exponents.iter().sum(), coefficient);
    }
    sample(grid, |r| apply_hardy_cesaro(spec, profiles, r, tol))
}

fn sample(grid: &[f64], eval: impl Fn(f64) -> Result<IntegralResult> + Sync) -> Result<RadialProfile> {
    if grid.is_empty() {
        return Err(Error::InvalidProfile("empty output grid".into()));
    }
    let values = grid
        .par_iter()
        .map(|&u| {
            let r = u.exp2();
            require_converged(eval(r)?, r).map(|res| res.value.abs())
        })
        .collect::<Result<Vec<f64>>>()?;
    RadialProfile::sampled(grid.to_vec(), values)
}

fn check_symbols(spec: &OperatorSpec, symbols: &[SymbolSpec]) -> Result<()> {
    if symbols.len() != spec.m {
        return Err(Error::InvalidProfile(format!("{} symbols for an operator with m = {}", symbols.len(), spec.m)));
    }
    symbols.iter().try_for_each(SymbolSpec::check)
}

/// `U^b(f_1, …, f_m)(r)` for radial power symbols.
pub fn apply_commutator(
    spec: &OperatorSpec,
    profiles: &[RadialProfile],
    symbols: &[SymbolSpec],
    r: f64,
    tol: f64,
) -> Result<IntegralResult> {
    spec.check_inputs(profiles)?;
    check_symbols(spec, symbols)?;
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::NonPositiveRadius(r));
    }
    let scale: f64 = symbols.iter().map(|b| b.eval(r)).product();
    if scale == 0.0 || profiles.iter().any(RadialProfile::is_zero) {
        return Ok(IntegralResult::exact(0.0));
    }
    let kernel = working_kernel(&spec.kernel);
    let betas: Vec<f64> = symbols.iter().map(SymbolSpec::lipschitz_order).collect();
    let mut axes = axes_for(&kernel, profiles, r, kernel.has_fractional_differences(&betas));
    let vanishing = (0..kernel.m()).filter(|&i| kernel.curve_hits_one(i)).count();
    axes[0].upper = axes[0].upper.combine(Singularity::algebraic(vanishing as f64));
    let integrand = |t: &[f64], tc: &[f64]| {
        let mut v = kernel.psi_with(t, tc);
        for (k, f) in profiles.iter().enumerate() {
            if v == 0.0 {
                break;
            }
            v *= f.value_at(kernel.curve(k, t) * r) * kernel.curve_difference(k, betas[k], t, tc);
        }
        v
    };
    let res = integrate_unit_cube_with(integrand, kernel.n, &axes, CubeOptions::new(tol))?;
    Ok(IntegralResult { value: scale * res.value, abs_error: scale.abs() * res.abs_error, ..res })
}

/// `|U^b(f_1, …, f_m)|` as a profile; exact for pure power-law inputs.
pub fn commutator_to_profile(
    spec: &OperatorSpec,
    profiles: &[RadialProfile],
    symbols: &[SymbolSpec],
    grid: &[f64],
    tol: f64,
) -> Result<RadialProfile> {
    spec.check_inputs(profiles)?;
    check_symbols(spec, symbols)?;
    let symbol_coefficient: f64 = symbols.iter().map(SymbolSpec::coefficient).product();
    if symbol_coefficient == 0.0 || profiles.iter().any(RadialProfile::is_zero) {
        return Ok(RadialProfile::zero());
    }
    if let Some(powers) = pure_powers(profiles) {
        let exponents: Vec<f64> = powers.iter().map(|p| p.0).collect();
        let betas: Vec<f64> = symbols.iter().map(SymbolSpec::lipschitz_order).collect();
        let j = kernel_power_integral_with(&spec.kernel, &exponents, &[Factor::CurveDifferences(betas.clone())], tol, Method::Auto)?;
        let j = require_converged(j, 1.0)?;
        let coefficient = (powers.iter().map(|p| p.1).product::<f64>() * symbol_coefficient * j.value).abs();
        return power_output(exponents.iter().sum::<f64>() + betas.iter().sum::<f64>(), coefficient);
    }
    sample(grid, |r| apply_commutator(spec, profiles, symbols, r, tol))
}
