//! Kernels `(ψ, s_1, …, s_m)` on `[0,1]^n` and the power integrals
//! `∫ Π|s_i(t)|^{e_i} ψ(t) dt` built from them.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{beta_closed_form, integrate_unit_cube_with, AxisProfile, CubeOptions, IntegralResult, Singularity};
use crate::error::{Error, Result};

type CallbackFn = dyn Fn(&[f64]) -> f64 + Send + Sync;

/// A user-supplied evaluator on `[0,1]^n`.
#[derive(Clone)]
pub struct Callback(pub Arc<CallbackFn>);

impl Callback {
    pub fn new(f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        Callback(Arc::new(f))
    }

    pub fn call(&self, t: &[f64]) -> f64 {
        (self.0)(t)
    }
}

impl fmt::Debug for Callback {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("Callback(..)")
    }
}

/// The weight function ψ.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Psi {
    /// `t^c (1-t)^e`, `n = 1`.
    PowerBeta { c: f64, e: f64 },
    /// `Π_j t_j^c (1-t_j)^e`.
    ProductPowerBeta { c: f64, e: f64 },
    /// Opaque evaluator behaving like `t_j^lower` and `(1-t_j)^upper` at the
    /// faces of the cube.
    #[serde(skip)]
    Callback { eval: Callback, lower: f64, upper: f64 },
    /// Density `n ψ_1(u) (∫_u^1 ψ_1)^{n-1}` of `u = min(t_1, …, t_n)` under
    /// the product weight `Π ψ_1(t_j)`, `ψ_1(t) = t^c (1-t)^e`; `n = 1` after
    /// reduction.
    #[serde(skip)]
    MinMarginal { c: f64, e: f64, n: usize },
}

/// One of the curves `s_i`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Curve {
    /// `t^b`, `n = 1`.
    Power { b: f64 },
    /// `Π_j t_j^b`.
    ProductPower { b: f64 },
    /// `min(t_1, …, t_n)^β`.
    MinPower { beta: f64 },
    /// Opaque evaluator with `|s(t)| ≳ min(t)^growth`.
    #[serde(skip)]
    Callback { eval: Callback, growth: f64 },
}

impl Curve {
    pub fn eval(&self, t: &[f64]) -> f64 {
        match self {
            Curve::Power { b } => t[0].powf(*b),
            Curve::ProductPower { b } => t.iter().map(|x| x.powf(*b)).product(),
            Curve::MinPower { beta } => t.iter().copied().fold(f64::INFINITY, f64::min).powf(*beta),
            Curve::Callback { eval, .. } => eval.call(t),
        }
    }

    /// Order `b` with `|s|^e ~ t^{be}` at the lower face, when known.
    fn lower_order(&self) -> Option<f64> {
        match self {
            Curve::Power { b } | Curve::ProductPower { b } => Some(*b),
            Curve::MinPower { beta } => Some(*beta),
            Curve::Callback { .. } => None,
        }
    }
}

/// Extra factors multiplying `Π|s_i|^{e_i} ψ`.
#[derive(Debug, Clone, PartialEq)]
pub enum Factor {
    /// `Π_i |1 - s_i(t)|^{β_i}`.
    OneMinusCurves(Vec<f64>),
    /// `Π_i (1 - |s_i(t)|^{β_i})`, the radial commutator weight.
    CurveDifferences(Vec<f64>),
    /// `Π_j (1 - t_j)`.
    OneMinusT,
    /// `log(2/t)`, `n = 1`.
    LogTwoOverT,
}

/// Evaluation route for [`kernel_power_integral_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Method {
    /// Closed form when available, quadrature otherwise.
    #[default]
    Auto,
    Numeric,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KernelSpec {
    pub n: usize,
    pub psi: Psi,
    pub curves: Vec<Curve>,
}

impl KernelSpec {
    /// Checks the descriptors, probing callbacks against their declared
    /// exponents.
    pub fn new(n: usize, psi: Psi, curves: Vec<Curve>) -> Result<Self> {
        let k = Self { n, psi, curves };
        k.check()?;
        Ok(k)
    }

    /// The Hardy kernel `ψ ≡ 1`, `s_i(t) = t` with `m` factors.
    pub fn hardy(m: usize) -> Self {
        Self::power_beta(0.0, 0.0, vec![1.0; m])
    }

    /// `ψ(t) = t^c (1-t)^e`, `s_i(t) = t^{b_i}`.
    pub fn power_beta(c: f64, e: f64, b: Vec<f64>) -> Self {
        Self { n: 1, psi: Psi::PowerBeta { c, e }, curves: b.into_iter().map(|b| Curve::Power { b }).collect() }
    }

    pub fn m(&self) -> usize {
        self.curves.len()
    }

    pub fn check(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidKernel(msg));
        if !(1..=3).contains(&self.n) {
            return bad(format!("cube dimension n = {} must be 1, 2 or 3", self.n));
        }
        if self.curves.is_empty() {
            return bad("at least one curve is required".into());
        }
        match &self.psi {
            Psi::PowerBeta { c, e } => {
                if self.n != 1 {
                    return bad("power_beta ψ needs n = 1; use product_power_beta".into());
                }
                if !c.is_finite() || !e.is_finite() {
                    return bad("ψ exponents must be finite".into());
                }
            }
            Psi::ProductPowerBeta { c, e } => {
                if !c.is_finite() || !e.is_finite() {
                    return bad("ψ exponents must be finite".into());
                }
            }
            Psi::Callback { eval, lower, upper } => {
                probe_exponent(|h| self.axis_point(h), |t| eval.call(t), *lower, "ψ lower")?;
                probe_exponent(|h| self.axis_point(1.0 - h), |t| eval.call(t), *upper, "ψ upper")?;
            }
            Psi::MinMarginal { c, e, n } => {
                if self.n != 1 || *n < 1 || !(*c > -1.0 && *e > -1.0) {
                    return bad("min-marginal ψ needs a reduced kernel with c, e > -1".into());
                }
            }
        }
        for (i, curve) in self.curves.iter().enumerate() {
            match curve {
                Curve::Power { b } => {
                    if self.n != 1 {
                        return bad(format!("curve {i}: power curve needs n = 1"));
                    }
                    if !(*b > 0.0 && b.is_finite()) {
                        return bad(format!("curve {i}: exponent b = {b} must be positive"));
                    }
                }
                Curve::ProductPower { b } | Curve::MinPower { beta: b } => {
                    if !(*b > 0.0 && b.is_finite()) {
                        return bad(format!("curve {i}: exponent {b} must be positive"));
                    }
                }
                Curve::Callback { eval, growth } => {
                    if !(*growth > 0.0 && growth.is_finite()) {
                        return bad(format!("curve {i}: growth exponent {growth} must be positive"));
                    }
                    for t in probe_points(self.n) {
                        let v = eval.call(&t);
                        if !(v.is_finite() && v != 0.0) {
                            return bad(format!("curve {i} vanishes or is not finite at {t:?}"));
                        }
                    }
                    let diag = |h: f64| vec![h; self.n];
                    probe_exponent(diag, |t| eval.call(t).abs(), *growth, &format!("curve {i} growth"))?;
                }
            }
        }
        Ok(())
    }

    fn axis_point(&self, h: f64) -> Vec<f64> {
        let mut t = vec![0.5; self.n];
        t[0] = h;
        t
    }

    pub fn psi(&self, t: &[f64]) -> f64 {
        let tc: Vec<f64> = t.iter().map(|x| 1.0 - x).collect();
        self.psi_with(t, &tc)
    }

    /// `ψ(t)` given the complements `tc = 1 - t`.
    pub fn psi_with(&self, t: &[f64], tc: &[f64]) -> f64 {
        match &self.psi {
            Psi::PowerBeta { c, e } => pow_beta(t[0], tc[0], *c, *e),
            Psi::ProductPowerBeta { c, e } => t.iter().zip(tc).map(|(&x, &xc)| pow_beta(x, xc, *c, *e)).product(),
            Psi::Callback { eval, .. } => eval.call(t),
            Psi::MinMarginal { c, e, n } => {
                let density = *n as f64 * pow_beta(t[0], tc[0], *c, *e);
                if *n == 1 {
                    return density;
                }
                // ∫_u^1 t^c (1-t)^e dt = B(c+1, e+1) I_{1-u}(e+1, c+1)
                let tail = beta_closed_form(*c, *e).value * statrs::function::beta::beta_reg(e + 1.0, c + 1.0, tc[0]);
                density * tail.powi(*n as i32 - 1)
            }
        }
    }

    /// One-dimensional kernel with the same integrals against functions of
    /// `min(t)`, for product weights paired with min-power curves.
    pub fn reduced(&self) -> Option<KernelSpec> {
        let Psi::ProductPowerBeta { c, e } = self.psi else { return None };
        if self.n == 1 || !(c > -1.0 && e > -1.0) {
            return None;
        }
        let curves = self
            .curves
            .iter()
            .map(|curve| match curve {
                Curve::MinPower { beta } => Some(Curve::Power { b: *beta }),
                _ => None,
            })
            .collect::<Option<Vec<_>>>()?;
        Some(KernelSpec { n: 1, psi: Psi::MinMarginal { c, e, n: self.n }, curves })
    }

    /// `ln |s_i(t)|`, accurate near the upper face for power curves.
    pub fn ln_curve(&self, i: usize, t: &[f64], tc: &[f64]) -> f64 {
        match self.curves[i] {
            Curve::Power { b } if t[0] > 0.5 => b * (-tc[0]).ln_1p(),
            _ => self.curve(i, t).ln(),
        }
    }

    /// `|1 - s_i(t)|`.
    pub fn one_minus_curve(&self, i: usize, t: &[f64], tc: &[f64]) -> f64 {
        match self.curves[i] {
            Curve::Power { .. } => (-self.ln_curve(i, t, tc).exp_m1()).abs(),
            _ => (1.0 - self.curves[i].eval(t)).abs(),
        }
    }

    /// `1 - |s_i(t)|^β`.
    pub fn curve_difference(&self, i: usize, beta: f64, t: &[f64], tc: &[f64]) -> f64 {
        -(beta * self.ln_curve(i, t, tc)).exp_m1()
    }

    /// Whether `|s_i| → 1` on the whole upper face, so that `1 - |s_i|^β`
    /// vanishes to first order there.
    pub(crate) fn curve_hits_one(&self, i: usize) -> bool {
        self.n == 1 && !matches!(self.curves[i], Curve::Callback { .. })
    }

    /// `|s_i(t)|`.
    pub fn curve(&self, i: usize, t: &[f64]) -> f64 {
        self.curves[i].eval(t).abs()
    }

    /// Endpoint behaviour of `Π|s_i|^{e_i} ψ` along each axis.
    pub fn axis_profiles(&self, exponents: &[f64]) -> Vec<AxisProfile> {
        let (psi_lo, psi_hi) = match &self.psi {
            Psi::PowerBeta { c, e } | Psi::ProductPowerBeta { c, e } => (*c, *e),
            Psi::Callback { lower, upper, .. } => (*lower, *upper),
            Psi::MinMarginal { c, e, n } => (*c, *e + (*n as f64 - 1.0) * (*e + 1.0)),
        };
        let mut lower = Singularity::algebraic(psi_lo);
        for (curve, &e) in self.curves.iter().zip(exponents) {
            if e == 0.0 {
                continue;
            }
            lower = lower.combine(match curve.lower_order() {
                Some(b) => Singularity::algebraic(b * e),
                None => Singularity::Unknown,
            });
        }
        let upper = Singularity::algebraic(psi_hi);
        vec![AxisProfile::new(lower, upper); self.n]
    }

    /// Whether some `1 - |s_i|^{β_i}` carries a non-integer power of `t` near the origin.
    pub(crate) fn has_fractional_differences(&self, beta: &[f64]) -> bool {
        self.curves.iter().zip(beta).any(|(c, &b)| match c.lower_order() {
            Some(order) => b != 0.0 && (order * b).fract() != 0.0,
            None => true,
        })
    }

    /// Closed-form exponent pair `(a, e)` with `Π|s_i|^{e_i} ψ = t^a (1-t)^e`.
    fn beta_exponents(&self, exponents: &[f64]) -> Option<(f64, f64)> {
        let Psi::PowerBeta { c, e } = self.psi else { return None };
        let mut a = c;
        for (curve, &ei) in self.curves.iter().zip(exponents) {
            match curve {
                Curve::Power { b } => a += b * ei,
                _ => return None,
            }
        }
        Some((a, e))
    }
}

fn pow_beta(x: f64, xc: f64, c: f64, e: f64) -> f64 {
    let lo = if c == 0.0 { 1.0 } else { x.powf(c) };
    let hi = if e == 0.0 { 1.0 } else { xc.powf(e) };
    lo * hi
}

fn probe_points(n: usize) -> Vec<Vec<f64>> {
    // a fixed low-discrepancy set
    (1..=16)
        .map(|k| (0..n).map(|j| ((k as f64) * [0.618_033_988_749_895, 0.754_877_666_246_693, 0.569_840_290_998_053][j]).fract()).collect())
        .collect()
}

/// Local order of `f` at `h → 0` along `point(h)`, compared with `declared`:
/// the doubling ratio must match `2^declared` within a factor of 2.
fn probe_exponent(point: impl Fn(f64) -> Vec<f64>, f: impl Fn(&[f64]) -> f64, declared: f64, what: &str) -> Result<()> {
    for h in [1e-4, 1e-6] {
        let (a, b) = (f(&point(2.0 * h)), f(&point(h)));
        let measured = (a.abs() / b.abs()).log2();
        if !(measured.is_finite() && (measured - declared).abs() <= 1.0) {
            return Err(Error::InvalidKernel(format!(
                "{what}: declared exponent {declared} but the evaluator behaves like order {measured} near the face"
            )));
        }
    }
    Ok(())
}

/// `∫_{[0,1]^n} Π|s_i(t)|^{e_i} ψ(t) dt`.
pub fn kernel_power_integral(kernel: &KernelSpec, exponents: &[f64], tol: f64) -> Result<IntegralResult> {
    kernel_power_integral_with(kernel, exponents, &[], tol, Method::Auto)
}

/// [`kernel_power_integral`] with extra factors and a choice of route.
pub fn kernel_power_integral_with(
    kernel: &KernelSpec,
    exponents: &[f64],
    factors: &[Factor],
    tol: f64,
    method: Method,
) -> Result<IntegralResult> {
    if exponents.len() != kernel.m() {
        return Err(Error::InvalidKernel(format!("{} exponents for {} curves", exponents.len(), kernel.m())));
    }
    if exponents.iter().any(|e| !e.is_finite()) {
        return Err(Error::InvalidKernel("exponents must be finite".into()));
    }
    for f in factors {
        match f {
            Factor::OneMinusCurves(beta) | Factor::CurveDifferences(beta) if beta.len() != kernel.m() => {
                return Err(Error::InvalidKernel(format!("{} Lipschitz orders for {} curves", beta.len(), kernel.m())));
            }
            Factor::LogTwoOverT if kernel.n != 1 => {
                return Err(Error::InvalidKernel("the log(2/t) factor needs n = 1".into()));
            }
            _ => {}
        }
    }

    if method == Method::Auto {
        if let Some(r) = closed_form(kernel, exponents, factors) {
            return Ok(r);
        }
    }
    let reduced;
    let kernel = if factors.contains(&Factor::OneMinusT) {
        kernel
    } else if let Some(k) = kernel.reduced() {
        reduced = k;
        &reduced
    } else {
        kernel
    };

    let mut axes = kernel.axis_profiles(exponents);
    for f in factors {
        match f {
            Factor::OneMinusT => {
                for ax in &mut axes {
                    ax.upper = ax.upper.combine(Singularity::Algebraic(1.0));
                }
            }
            Factor::OneMinusCurves(beta) => {
                let order: f64 = (0..kernel.m()).filter(|&i| kernel.curve_hits_one(i)).map(|i| beta[i]).sum();
                axes[0].upper = axes[0].upper.combine(Singularity::algebraic(order));
            }
            Factor::CurveDifferences(beta) => {
                let order = (0..kernel.m()).filter(|&i| kernel.curve_hits_one(i) && beta[i] != 0.0).count();
                axes[0].upper = axes[0].upper.combine(Singularity::algebraic(order as f64));
                if kernel.has_fractional_differences(beta) {
                    for ax in &mut axes {
                        ax.lower = ax.lower.rough();
                    }
                }
            }
            Factor::LogTwoOverT => {
                // a logarithm does not change integrability but spoils the pure-power rate
                if axes[0].lower == Singularity::Regular {
                    axes[0].lower = Singularity::Algebraic(1e-3);
                }
            }
        }
    }

    let integrand = |t: &[f64], tc: &[f64]| {
        let mut v = kernel.psi_with(t, tc);
        for (i, &e) in exponents.iter().enumerate() {
            if e != 0.0 {
                v *= kernel.curve(i, t).powf(e);
            }
        }
        for f in factors {
            match f {
                Factor::OneMinusT => v *= tc.iter().product::<f64>(),
                Factor::OneMinusCurves(beta) => {
                    for (i, &b) in beta.iter().enumerate() {
                        v *= kernel.one_minus_curve(i, t, tc).powf(b);
                    }
                }
                Factor::CurveDifferences(beta) => {
                    for (i, &b) in beta.iter().enumerate() {
                        v *= kernel.curve_difference(i, b, t, tc);
                    }
                }
                Factor::LogTwoOverT => v *= (2.0 / t[0]).ln(),
            }
        }
        v
    };
    integrate_unit_cube_with(integrand, kernel.n, &axes, CubeOptions::new(tol))
}

fn closed_form(kernel: &KernelSpec, exponents: &[f64], factors: &[Factor]) -> Option<IntegralResult> {
    if let Some(r) = separable_closed_form(kernel, exponents, factors) {
        return Some(r);
    }
    let (a, mut e) = kernel.beta_exponents(exponents)?;
    let mut differences: Option<&[f64]> = None;
    for f in factors {
        match f {
            Factor::OneMinusT => e += 1.0,
            Factor::OneMinusCurves(beta) => {
                // |1 - t^b| = (1 - t) only for b = 1
                if kernel.curves.iter().any(|c| !matches!(c, Curve::Power { b } if *b == 1.0)) {
                    return None;
                }
                e += beta.iter().sum::<f64>();
            }
            Factor::CurveDifferences(beta) => {
                if differences.is_some() {
                    return None;
                }
                differences = Some(beta);
            }
            Factor::LogTwoOverT => return None,
        }
    }
    let Some(beta) = differences else { return Some(beta_closed_form(a, e)) };

    // Π(1 - t^{b_i β_i}) = Σ_S (-1)^{|S|} t^{Σ_S b_i β_i}; usable when every
    // term converges on its own
    let shifts: Vec<f64> = kernel
        .curves
        .iter()
        .zip(beta)
        .map(|(c, &bt)| match c {
            Curve::Power { b } => b * bt,
            _ => unreachable!("beta_exponents admits power curves only"),
        })
        .collect();
    let m = shifts.len();
    let mut sum = crate::numeric::CompensatedSum::new();
    let mut abs_error = 0.0;
    let mut magnitude = 0.0;
    for mask in 0u32..(1 << m) {
        let shift: f64 = (0..m).filter(|i| mask & (1 << i) != 0).map(|i| shifts[i]).sum();
        let term = beta_closed_form(a + shift, e);
        if !term.is_converged() {
            return None;
        }
        let sign = if mask.count_ones() % 2 == 0 { 1.0 } else { -1.0 };
        sum.add(sign * term.value);
        abs_error += term.abs_error;
        magnitude += term.value;
    }
    let value = sum.value();
    Some(IntegralResult {
        value,
        abs_error: abs_error + 4.0 * f64::EPSILON * magnitude,
        status: super::IntegralStatus::Converged,
        evaluations: 0,
    })
}

/// Product weight with product curves: the integral factorizes into `n`
/// identical Beta integrals.
fn separable_closed_form(kernel: &KernelSpec, exponents: &[f64], factors: &[Factor]) -> Option<IntegralResult> {
    let Psi::ProductPowerBeta { c, e } = kernel.psi else { return None };
    if !factors.is_empty() {
        return None;
    }
    let mut a = c;
    for (curve, &ei) in kernel.curves.iter().zip(exponents) {
        match curve {
            Curve::ProductPower { b } => a += b * ei,
            _ => return None,
        }
    }
    let one = beta_closed_form(a, e);
    if !one.is_converged() {
        return Some(one);
    }
    let n = kernel.n as i32;
    Some(IntegralResult { value: one.value.powi(n), abs_error: n as f64 * one.abs_error * one.value.powi(n - 1), ..one })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::IntegralStatus;

    #[test]
    fn spec_power_integrals() {
        let k = KernelSpec::hardy(1);
        let r = kernel_power_integral(&k, &[-0.5], 1e-12).unwrap();
        assert!((r.value - 2.0).abs() < 1e-12);
        assert_eq!(kernel_power_integral(&k, &[-1.0], 1e-12).unwrap().status, IntegralStatus::Divergent);
        for method in [Method::Auto, Method::Numeric] {
            let r = kernel_power_integral_with(&k, &[-0.5], &[], 1e-10, method).unwrap();
            assert!((r.value - 2.0).abs() < 1e-9, "{method:?}");
            let r = kernel_power_integral_with(&k, &[-1.0], &[], 1e-10, method).unwrap();
            assert_eq!(r.status, IntegralStatus::Divergent);
        }
    }

    #[test]
    fn harmonic_weight_cancels_only_with_damping() {
        // ψ(t) = t/(1-t), s(t) = t, e = -1: the integrand is 1/(1-t)
        let k = KernelSpec::power_beta(1.0, -1.0, vec![1.0]);
        for method in [Method::Auto, Method::Numeric] {
            let undamped = kernel_power_integral_with(&k, &[-1.0], &[], 1e-8, method).unwrap();
            assert_eq!(undamped.status, IntegralStatus::Divergent);
            let damped = kernel_power_integral_with(&k, &[-1.0], &[Factor::OneMinusT], 1e-8, method).unwrap();
            assert_eq!(damped.status, IntegralStatus::Converged);
            assert!((damped.value - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn one_minus_curve_factor() {
        // ∫ t^{-1/2} (1-t)^{1/2} dt = B(1/2, 3/2) = π/2
        let k = KernelSpec::hardy(1);
        let f = [Factor::OneMinusCurves(vec![0.5])];
        for method in [Method::Auto, Method::Numeric] {
            let r = kernel_power_integral_with(&k, &[-0.5], &f, 1e-10, method).unwrap();
            assert!((r.value - std::f64::consts::FRAC_PI_2).abs() < 1e-9, "{method:?} {}", r.value);
        }
        // b ≠ 1: |1 - t²|^{1/2}, ∫_0^1 (1-t²)^{1/2} = π/4
        let k = KernelSpec::power_beta(0.0, 0.0, vec![2.0]);
        let r = kernel_power_integral_with(&k, &[0.0], &f, 1e-10, Method::Auto).unwrap();
        assert!((r.value - std::f64::consts::FRAC_PI_4).abs() < 1e-9, "{}", r.value);
    }

    #[test]
    fn curve_differences() {
        // ∫ (1 - √t) dt = 1/3 and ∫ (t^{-1/2} - 1) dt = 1
        let k = KernelSpec::hardy(1);
        let f = [Factor::CurveDifferences(vec![0.5])];
        for method in [Method::Auto, Method::Numeric] {
            let r = kernel_power_integral_with(&k, &[0.0], &f, 1e-12, method).unwrap();
            assert!((r.value - 1.0 / 3.0).abs() < 1e-11, "{method:?} {:?}", r);
            let f = [Factor::CurveDifferences(vec![1.0])];
            let r = kernel_power_integral_with(&k, &[-0.5], &[Factor::CurveDifferences(vec![0.5])], 1e-12, method).unwrap();
            assert!((r.value - 1.0).abs() < 1e-11, "{method:?}");
            // ψ = (1-t)^{-1}: each subset diverges but (1 - t)/(1 - t) = 1
            let k = KernelSpec::power_beta(0.0, -1.0, vec![1.0]);
            let r = kernel_power_integral_with(&k, &[0.0], &f, 1e-10, method).unwrap();
            assert_eq!(r.status, IntegralStatus::Converged, "{method:?}");
            assert!((r.value - 1.0).abs() < 1e-9, "{method:?} {}", r.value);
        }
        // two factors: ∫ (1 - t)(1 - t²) dt = 1 - 1/2 - 1/3 + 1/4
        let k = KernelSpec::power_beta(0.0, 0.0, vec![1.0, 2.0]);
        let r = kernel_power_integral_with(&k, &[0.0, 0.0], &[Factor::CurveDifferences(vec![1.0, 1.0])], 1e-12, Method::Auto).unwrap();
        assert!((r.value - 5.0 / 12.0).abs() < 1e-14);
    }

    #[test]
    fn log_factor_matches_digamma_oracle() {
        use statrs::function::gamma::digamma;
        // ∫ t^a log(2/t) dt = (ln 2 + 1/(a+1)) / (a+1)
        // general: B(a+1,e+1)(ln2 + ψ(a+e+2) - ψ(a+1))
        let k = KernelSpec::power_beta(0.0, 0.3, vec![1.0]);
        for a in [-0.5, 0.0, 1.5] {
            let r = kernel_power_integral_with(&k, &[a], &[Factor::LogTwoOverT], 1e-11, Method::Auto).unwrap();
            let b = beta_closed_form(a, 0.3).value;
            let oracle = b * (std::f64::consts::LN_2 + digamma(a + 0.3 + 2.0) - digamma(a + 1.0));
            assert!((r.value - oracle).abs() < 1e-9 * oracle, "a={a}: {} vs {oracle}", r.value);
        }
    }

    #[test]
    fn two_dimensional_kernels() {
        // ψ ≡ 1 on [0,1]², s(t) = min(t)^{1/2}, e = -1: ∫ min^{-1/2} = ∫_0^1 2(1-u) u^{-1/2} du = 8/3
        let k = KernelSpec::new(2, Psi::ProductPowerBeta { c: 0.0, e: 0.0 }, vec![Curve::MinPower { beta: 0.5 }]).unwrap();
        let r = kernel_power_integral(&k, &[-1.0], 1e-7).unwrap();
        assert_eq!(r.status, IntegralStatus::Converged);
        assert!((r.value - 8.0 / 3.0).abs() < 1e-6, "{}", r.value);
        // s(t) = t1 t2, e = -1/2: (∫ t^{-1/2})² = 4
        let k = KernelSpec::new(2, Psi::ProductPowerBeta { c: 0.0, e: 0.0 }, vec![Curve::ProductPower { b: 1.0 }]).unwrap();
        for method in [Method::Auto, Method::Numeric] {
            let r = kernel_power_integral_with(&k, &[-0.5], &[], 1e-8, method).unwrap();
            assert!((r.value - 4.0).abs() < 1e-7, "{method:?} {}", r.value);
            let r = kernel_power_integral_with(&k, &[-1.0], &[], 1e-8, method).unwrap();
            assert_eq!(r.status, IntegralStatus::Divergent);
        }
        // three-dimensional min-power with ψ(t) = t_1 t_2 t_3
        let k = KernelSpec::new(3, Psi::ProductPowerBeta { c: 1.0, e: 0.0 }, vec![Curve::MinPower { beta: 1.0 }]).unwrap();
        let reduced = kernel_power_integral(&k, &[-0.5], 1e-10).unwrap();
        // ∫ 3 u (u^{-1/2}) ((1-u²)/2)² du = (3/4) ∫ u^{1/2}(1-u²)² du = (3/4)(2/3 - 4/7 + 2/11)
        let exact = 0.75 * (2.0 / 3.0 - 4.0 / 7.0 + 2.0 / 11.0);
        assert!((reduced.value - exact).abs() < 1e-9, "{} vs {exact}", reduced.value);
    }

    #[test]
    fn callbacks_are_probed() {
        let good = Psi::Callback { eval: Callback::new(|t| t[0].sqrt()), lower: 0.5, upper: 0.0 };
        assert!(KernelSpec::new(1, good, vec![Curve::Power { b: 1.0 }]).is_ok());
        let lying = Psi::Callback { eval: Callback::new(|t| t[0] * t[0]), lower: -0.5, upper: 0.0 };
        assert!(KernelSpec::new(1, lying, vec![Curve::Power { b: 1.0 }]).is_err());
        let curve = Curve::Callback { eval: Callback::new(|t| t[0]), growth: 1.0 };
        let k = KernelSpec::new(1, Psi::PowerBeta { c: 0.0, e: 0.0 }, vec![curve]).unwrap();
        // callback curves fall back to numeric growth analysis
        let r = kernel_power_integral(&k, &[-0.5], 1e-8).unwrap();
        assert!((r.value - 2.0).abs() < 1e-7);
        let zero = Curve::Callback { eval: Callback::new(|_| 0.0), growth: 1.0 };
        assert!(KernelSpec::new(1, Psi::PowerBeta { c: 0.0, e: 0.0 }, vec![zero]).is_err());
    }

    #[test]
    fn rejects_malformed() {
        assert!(KernelSpec::new(2, Psi::PowerBeta { c: 0.0, e: 0.0 }, vec![Curve::MinPower { beta: 1.0 }]).is_err());
        assert!(KernelSpec::new(1, Psi::PowerBeta { c: 0.0, e: 0.0 }, vec![]).is_err());
        assert!(KernelSpec::new(1, Psi::PowerBeta { c: 0.0, e: 0.0 }, vec![Curve::Power { b: -1.0 }]).is_err());
        assert!(kernel_power_integral(&KernelSpec::hardy(2), &[1.0], 1e-8).is_err());
    }

    #[test]
    fn serde_round_trip() {
        let k = KernelSpec::power_beta(1.0, -1.0, vec![1.0, 2.0]);
        let s = serde_json::to_string(&k).unwrap();
        let back: KernelSpec = serde_json::from_str(&s).unwrap();
        assert_eq!(serde_json::to_string(&back).unwrap(), s);
    }
}
