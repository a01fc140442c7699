//! Kernel constants (weighted integrals of `Π|s_i|^{e_i} ψ`) and the
//! structural constants of the boundedness and sharpness estimates.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{one_minus_two_pow_neg_over, two_pow_minus_one_over};
use crate::parameters::{ExponentSet, TheoremMode};
use crate::quadrature::{kernel_power_integral_with, Factor, IntegralResult, KernelSpec, Method};
use crate::weights::WeightSet;

/// Which weighted kernel integral to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ConstantKind {
    /// Lebesgue-space norm: `e_i = -(d+γ_i)/p_i`.
    A,
    /// Morrey-Herz: `e_i = -α_i - (d+γ_i)/q_i + λ_i`.
    A1,
    /// Herz: `e_i = -(d+γ_i)/q_i - α_i`.
    A2,
    /// Single-weight Lebesgue norm: `e_i = -d/p_i`.
    Xiao,
    /// As [`ConstantKind::Xiao`] with an extra `log(2/t)`.
    XiaoLog,
    /// As [`ConstantKind::A1`] with an extra `Π|1 - s_i|^{β_i}`.
    CommutatorMH,
    /// `∫ t^{-X} (1-t) ψ` along `s_1`, `X = γ_1 - λ - d/q_1`.
    CommutatorCor,
    /// The same integral without the `(1-t)` damping.
    CommutatorCorUndamped,
}

impl ConstantKind {
    pub const ALL: [ConstantKind; 8] = [
        ConstantKind::A,
        ConstantKind::A1,
        ConstantKind::A2,
        ConstantKind::Xiao,
        ConstantKind::XiaoLog,
        ConstantKind::CommutatorMH,
        ConstantKind::CommutatorCor,
        ConstantKind::CommutatorCorUndamped,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ConstantKind::A => "A",
            ConstantKind::A1 => "A1",
            ConstantKind::A2 => "A2",
            ConstantKind::Xiao => "Xiao",
            ConstantKind::XiaoLog => "XiaoLog",
            ConstantKind::CommutatorMH => "CommutatorMH",
            ConstantKind::CommutatorCor => "CommutatorCor",
            ConstantKind::CommutatorCorUndamped => "CommutatorCorUndamped",
        }
    }

    /// The curve exponents `e_i` for this kind.
    pub fn exponents(self, x: &ExponentSet) -> Result<Vec<f64>> {
        x.check()?;
        let d = x.d as f64;
        let per_factor = |f: &dyn Fn(usize) -> f64| (0..x.m).map(f).collect::<Vec<f64>>();
        Ok(match self {
            ConstantKind::A => per_factor(&|i| -(d + x.gamma[i]) / x.p[i]),
            ConstantKind::A1 | ConstantKind::CommutatorMH => {
                per_factor(&|i| -x.alpha[i] - (d + x.gamma[i]) / x.q[i] + x.lambda[i])
            }
            ConstantKind::A2 => per_factor(&|i| -(d + x.gamma[i]) / x.q[i] - x.alpha[i]),
            ConstantKind::Xiao | ConstantKind::XiaoLog => per_factor(&|i| -d / x.p[i]),
            ConstantKind::CommutatorCor | ConstantKind::CommutatorCorUndamped => {
                if x.m != 1 {
                    return Err(Error::InvalidExponents(format!("{} is a single-factor constant (m = {})", self.name(), x.m)));
                }
                let lambda: f64 = x.lambda.iter().sum();
                vec![-(x.gamma[0] - lambda - d / x.q[0])]
            }
        })
    }

    fn factors(self, x: &ExponentSet) -> Result<Vec<Factor>> {
        Ok(match self {
            ConstantKind::XiaoLog => vec![Factor::LogTwoOverT],
            ConstantKind::CommutatorMH => {
                let beta = x
                    .beta
                    .clone()
                    .ok_or_else(|| Error::InvalidExponents("CommutatorMH needs the Lipschitz orders β_i".into()))?;
                vec![Factor::OneMinusCurves(beta)]
            }
            ConstantKind::CommutatorCor => vec![Factor::OneMinusT],
            _ => Vec::new(),
        })
    }
}

impl std::fmt::Display for ConstantKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for ConstantKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ConstantKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Config(format!("unknown constant kind `{s}`")))
    }
}

/// Evaluates the kernel constant of `kind`. A divergent integral is a valid
/// answer and comes back with status `Divergent`.
pub fn kernel_constant(kind: ConstantKind, exponents: &ExponentSet, kernel: &KernelSpec, tol: f64) -> Result<IntegralResult> {
    if kernel.m() != exponents.m {
        return Err(Error::InvalidKernel(format!("kernel has {} curves, exponent set has m = {}", kernel.m(), exponents.m)));
    }
    let e = kind.exponents(exponents)?;
    let factors = kind.factors(exponents)?;
    kernel_power_integral_with(kernel, &e, &factors, tol, Method::Auto)
}

/// Closed-form constants of the estimates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StructuralKind {
    /// Upper-bound factor of the Morrey-Herz estimate.
    CUpper,
    /// Lower-bound factor of the Morrey-Herz sharpness estimate.
    DLower,
    /// Lower-bound factor of the Herz sharpness estimate.
    ELower,
}

/// `(ω(S_d))^{1/q} / Π (ω_i(S_d))^{1/q_i}` in log form.
fn ln_mass_ratio(x: &ExponentSet, q: f64, weights: &WeightSet) -> Result<f64> {
    if weights.factors.len() != x.m {
        return Err(Error::InvalidWeight(format!("{} factor weights for m = {}", weights.factors.len(), x.m)));
    }
    let factors: f64 = weights.factors.iter().zip(&x.q).map(|(w, qi)| w.sphere_mass.ln() / qi).sum();
    Ok(weights.target.sphere_mass.ln() / q - factors)
}

/// `Π(2^{|α_k-λ_k|}+1)`, times `2^λ/(2^{λp}-1)^{1/p}` when `0 < p < 1`,
/// from the raw per-factor data and the aggregate `p`.
pub fn c_upper(alpha: &[f64], lambda: &[f64], p: f64) -> Result<f64> {
    if alpha.len() != lambda.len() || alpha.is_empty() {
        return Err(Error::InvalidExponents("α and λ need the same positive length".into()));
    }
    if !(p > 0.0) {
        return Err(Error::InvalidExponents(format!("p = {p} must be positive")));
    }
    let mut ln_c: f64 = alpha.iter().zip(lambda).map(|(a, l)| ((a - l).abs().exp2() + 1.0).ln()).sum();
    if p < 1.0 {
        let l: f64 = lambda.iter().sum();
        if !(l > 0.0) {
            return Err(Error::Precondition(vec!["0<p<1 requires λ>0".into()]));
        }
        ln_c += l * std::f64::consts::LN_2 - (l * p).exp_m1_base2().ln() / p;
    }
    Ok(ln_c.exp())
}

pub fn structural_constant(kind: StructuralKind, exponents: &ExponentSet, weights: &WeightSet) -> Result<f64> {
    let x = exponents;
    let agg = x.aggregates()?;
    let ln_value = match kind {
        StructuralKind::CUpper => {
            let violations = x.validate(TheoremMode::MorreyHerzUpper);
            if !violations.is_empty() {
                return Err(Error::Precondition(violations.iter().map(ToString::to_string).collect()));
            }
            c_upper(&x.alpha, &x.lambda, agg.p)?.ln()
        }
        StructuralKind::DLower => {
            let mut violations = Vec::new();
            for i in 0..x.m {
                if !(x.lambda[i] > 0.0 && x.lambda[i] > x.alpha[i]) {
                    violations.push(format!("λ_i>α_i and λ_i>0 required (factor {i}: λ={}, α={})", x.lambda[i], x.alpha[i]));
                }
            }
            if !(agg.lambda > agg.alpha) {
                violations.push(format!("λ>α required (λ={}, α={})", agg.lambda, agg.alpha));
            }
            if !violations.is_empty() {
                return Err(Error::Precondition(violations));
            }
            let (l, a, p, q) = (agg.lambda, agg.alpha, agg.p, agg.q);
            let mut v = -(l * p).exp_m1_base2().ln() / p + one_minus_two_pow_neg_over(q * (l - a)).ln() / q;
            for i in 0..x.m {
                let (li, ai, pi, qi) = (x.lambda[i], x.alpha[i], x.p[i], x.q[i]);
                v += (li * pi).exp_m1_base2().ln() / pi - one_minus_two_pow_neg_over(qi * (li - ai)).ln() / qi;
            }
            v + ln_mass_ratio(x, q, weights)?
        }
        StructuralKind::ELower => {
            let (a, p, q) = (agg.alpha, agg.p, agg.q);
            let m = x.m as f64;
            let mut v = (m * p).ln() / p + two_pow_minus_one_over(q * a).ln() / q;
            for i in 0..x.m {
                v -= x.p[i].ln() / x.p[i] + two_pow_minus_one_over(x.q[i] * x.alpha[i]).ln() / x.q[i];
            }
            v + ln_mass_ratio(x, q, weights)?
        }
    };
    let value = ln_value.exp();
    if !value.is_finite() {
        return Err(Error::NonFiniteNorm { what: format!("{kind:?}"), status: "overflow".into() });
    }
    Ok(value)
}

trait ExpM1Base2 {
    /// `2^x - 1` without cancellation for small `x`.
    fn exp_m1_base2(self) -> f64;
}

impl ExpM1Base2 for f64 {
    fn exp_m1_base2(self) -> f64 {
        (self * std::f64::consts::LN_2).exp_m1()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::IntegralStatus;

    fn lebesgue(x: &ExponentSet) -> WeightSet {
        let agg = x.aggregates().unwrap();
        WeightSet::lebesgue(x.m, x.d, &x.q, agg.q).unwrap()
    }

    #[test]
    fn kernel_constant_examples() {
        let hardy = KernelSpec::hardy(1);
        let x = ExponentSet::single(1, 0.0, 2.0, 2.0, 0.0, 0.0);
        let a1 = kernel_constant(ConstantKind::A1, &x, &hardy, 1e-12).unwrap();
        assert!((a1.value - 2.0).abs() < 1e-12);
        let xiao = kernel_constant(ConstantKind::Xiao, &x, &hardy, 1e-12).unwrap();
        assert!((xiao.value - 2.0).abs() < 1e-12);
        // Hardy's constant p/(p-1)
        for p in [1.25, 1.5, 3.0, 5.0] {
            let x = ExponentSet::single(1, 0.0, p, p, 0.0, 0.0);
            let v = kernel_constant(ConstantKind::Xiao, &x, &hardy, 1e-12).unwrap().value;
            assert!((v - p / (p - 1.0)).abs() < 1e-12 * v, "p={p}");
        }
    }

    #[test]
    fn damped_corollary_constant_survives_where_undamped_diverges() {
        // ψ(t) = t/(1-t), X = γ_1 - λ - d/q_1 = 1.5 - 0 - 1/2 = 1
        let kernel = KernelSpec::power_beta(1.0, -1.0, vec![1.0]);
        let x = ExponentSet::single(1, 0.0, 2.0, 2.0, 0.0, 1.5);
        let damped = kernel_constant(ConstantKind::CommutatorCor, &x, &kernel, 1e-10).unwrap();
        assert_eq!(damped.status, IntegralStatus::Converged);
        assert!((damped.value - 1.0).abs() < 1e-12);
        let undamped = kernel_constant(ConstantKind::CommutatorCorUndamped, &x, &kernel, 1e-10).unwrap();
        assert_eq!(undamped.status, IntegralStatus::Divergent);
    }

    #[test]
    fn damped_never_exceeds_undamped() {
        for (c, e, g) in [(0.0, 0.0, 0.3), (0.5, -0.5, 1.0), (2.0, 0.4, -0.2)] {
            let kernel = KernelSpec::power_beta(c, e, vec![1.0]);
            let x = ExponentSet::single(1, 0.0, 2.0, 2.0, 0.0, g);
            let damped = kernel_constant(ConstantKind::CommutatorCor, &x, &kernel, 1e-11).unwrap();
            let undamped = kernel_constant(ConstantKind::CommutatorCorUndamped, &x, &kernel, 1e-11).unwrap();
            assert!(damped.value <= undamped.value, "{damped:?} vs {undamped:?}");
        }
    }

    #[test]
    fn commutator_constant_matches_beta() {
        // e = -1/2, β = 1/2, s = t: ∫ t^{-1/2} (1-t)^{1/2} = π/2
        let mut x = ExponentSet::single(1, 0.0, 2.0, 2.0, 0.0, 0.0).with_commutator(vec![2.0], vec![0.5]);
        x.lambda = vec![0.0];
        let v = kernel_constant(ConstantKind::CommutatorMH, &x, &KernelSpec::hardy(1), 1e-12).unwrap();
        assert!((v.value - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
        let plain = ExponentSet::single(1, 0.0, 2.0, 2.0, 0.0, 0.0);
        assert!(kernel_constant(ConstantKind::CommutatorMH, &plain, &KernelSpec::hardy(1), 1e-12).is_err());
    }

    #[test]
    fn kernel_constants_shrink_as_exponents_grow() {
        let kernel = KernelSpec::power_beta(0.3, 0.2, vec![1.5, 0.5]);
        let mut last = f64::INFINITY;
        for alpha in [-0.4, -0.2, 0.0, 0.3, 0.9] {
            let x = ExponentSet::symmetric(2, 1, alpha, 2.0, 2.0, 0.5, 0.0);
            let v = kernel_constant(ConstantKind::A1, &x, &kernel, 1e-12).unwrap().value;
            // larger α_i means smaller e_i, hence a larger integral
            assert!(v >= last || last == f64::INFINITY, "α={alpha}");
            last = v;
        }
    }

    #[test]
    fn c_upper_examples() {
        let x = ExponentSet::single(1, 0.3, 2.0, 2.0, 0.3, 0.0);
        assert_eq!(structural_constant(StructuralKind::CUpper, &x, &lebesgue(&x)).unwrap(), 2.0);
        let c = c_upper(&[0.0], &[1.0], 0.5).unwrap();
        assert!((c - (18.0 + 12.0 * 2f64.sqrt())).abs() < 1e-12);
        assert!(c_upper(&[0.0], &[0.0], 0.5).is_err());
        // p = 1/2 from two p_i = 1 factors
        let x = ExponentSet::symmetric(2, 1, 0.0, 1.0, 2.0, 0.5, 0.0);
        let c = structural_constant(StructuralKind::CUpper, &x, &lebesgue(&x)).unwrap();
        assert!((c - 2.0 * (17.0 + 12.0 * 2f64.sqrt())).abs() < 1e-12);
        let x = ExponentSet::symmetric(2, 1, 0.0, 1.0, 2.0, 0.0, 0.0);
        assert!(structural_constant(StructuralKind::CUpper, &x, &lebesgue(&x)).is_err());
    }

    #[test]
    fn d_lower_examples() {
        for (a, p, q, l, g) in [(0.0, 1.0, 1.0, 1.0, 0.0), (-0.3, 2.5, 1.5, 0.4, 0.7), (0.2, 1.7, 3.0, 0.9, -0.5)] {
            let x = ExponentSet::single(2, a, p, q, l, g);
            let w = WeightSet::power_weights(&x).unwrap();
            let v = structural_constant(StructuralKind::DLower, &x, &w).unwrap();
            assert!((v - 1.0).abs() < 1e-13, "{v}");
        }
        let x = ExponentSet::single(1, 0.5, 1.0, 1.0, 0.5, 0.0);
        assert!(structural_constant(StructuralKind::DLower, &x, &lebesgue(&x)).is_err());
    }

    #[test]
    fn d_lower_two_factors_matches_direct_formula() {
        let x = ExponentSet::symmetric(2, 1, 0.0, 2.0, 2.0, 0.5, 0.0);
        let v = structural_constant(StructuralKind::DLower, &x, &lebesgue(&x)).unwrap();
        // p = q = 1, λ = 1, α = 0, ω = 1 so ω(S) = 2 = ω_i(S)
        let f = |lam: f64, p: f64| (2f64.powf(lam * p) - 1.0).powf(1.0 / p);
        let g = |x: f64, q: f64| ((1.0 - 2f64.powf(-x)) / x).powf(1.0 / q);
        let direct = f(0.5, 2.0).powi(2) / f(1.0, 1.0) * g(1.0, 1.0) / g(1.0, 2.0).powi(2) * 2.0 / (2f64.sqrt() * 2f64.sqrt());
        assert!((v - direct).abs() < 1e-14 * direct);
    }

    #[test]
    fn e_lower_examples() {
        let x = ExponentSet::symmetric(2, 1, 0.0, 2.0, 2.0, 0.0, 0.0);
        let v = structural_constant(StructuralKind::ELower, &x, &lebesgue(&x)).unwrap();
        assert!((v - 1.0).abs() < 1e-14);
        for a in [-0.7, 0.0, 0.4] {
            let x = ExponentSet::single(3, a, 1.5, 2.5, 0.0, 0.2);
            let v = structural_constant(StructuralKind::ELower, &x, &WeightSet::power_weights(&x).unwrap()).unwrap();
            assert!((v - 1.0).abs() < 1e-13, "α={a}: {v}");
        }
    }

    #[test]
    fn kind_names_round_trip() {
        for k in ConstantKind::ALL {
            assert_eq!(k.name().parse::<ConstantKind>().unwrap(), k);
        }
        assert!("B7".parse::<ConstantKind>().is_err());
    }
}
