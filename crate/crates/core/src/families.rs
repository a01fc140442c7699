//! Seeded random test families for the property checks.
//!
//! Each case is a parameter set satisfying the hypotheses of its check, a
//! kernel whose constant converges, and truncated power-law inputs
//! `c |x|^a 1_{|x|>R}` with finite norms.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::constants::{kernel_constant, ConstantKind};
use crate::operators::SymbolSpec;
use crate::parameters::{ExponentSet, TheoremMode};
use crate::quadrature::KernelSpec;
use crate::radial::RadialProfile;
use crate::weights::WeightSet;

/// Exponent regime of an upper-bound case.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// Aggregate `p ≥ 1`.
    Banach,
    /// `0 < p < 1` with `λ > 0`; needs two factors.
    Quasi,
}

#[derive(Debug, Clone)]
pub struct UpperCase {
    pub exponents: ExponentSet,
    pub kernel: KernelSpec,
    pub profiles: Vec<RadialProfile>,
    pub weights: WeightSet,
}

#[derive(Debug, Clone)]
pub struct CommutatorCase {
    pub exponents: ExponentSet,
    pub kernel: KernelSpec,
    pub symbols: Vec<SymbolSpec>,
    pub profiles: Vec<RadialProfile>,
    pub weights: WeightSet,
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `c |x|^a 1_{|x|>R}` with `a` strictly below the extremal exponent of factor `i`.
pub fn truncated_input(exponents: &ExponentSet, i: usize, rng: &mut impl Rng) -> RadialProfile {
    let x = exponents;
    let extremal = -x.alpha[i] - (x.d as f64 + x.gamma[i]) / x.q[i] + x.lambda[i];
    let a = extremal - rng.gen_range(0.05..0.6);
    let c = rng.gen_range(0.5..2.0);
    let radius = rng.gen_range(-3.0f64..3.0).exp2();
    RadialProfile::truncated_power_law(a, c, radius).expect("valid truncated power law")
}

fn random_kernel(m: usize, rng: &mut impl Rng) -> KernelSpec {
    let b = (0..m).map(|_| rng.gen_range(0.5..2.0)).collect();
    KernelSpec::power_beta(rng.gen_range(0.0..1.0), rng.gen_range(-0.5..1.0), b)
}

fn converges(kind: ConstantKind, x: &ExponentSet, kernel: &KernelSpec) -> bool {
    kernel_constant(kind, x, kernel, 1e-10).is_ok_and(|k| k.is_converged())
}

/// A Morrey-Herz upper-bound case with `m` factors in the given regime.
pub fn upper_case(m: usize, regime: Regime, rng: &mut impl Rng) -> UpperCase {
    assert!(m == 1 || m == 2, "families cover m = 1, 2");
    assert!(regime == Regime::Banach || m == 2, "0 < p < 1 needs two factors");
    loop {
        let d = rng.gen_range(1..=3usize);
        let (p_range, q_range) = match (m, regime) {
            (1, _) => (1.0..4.0, 1.0..4.0),
            (_, Regime::Banach) => (2.0..5.0, 2.0..5.0),
            (_, Regime::Quasi) => (1.0..1.9, 2.0..5.0),
        };
        let lambda_lo = if regime == Regime::Quasi { 0.1 } else { 0.0 };
        let draw = |rng: &mut dyn rand::RngCore, r: std::ops::Range<f64>| (0..m).map(|_| rng.gen_range(r.clone())).collect::<Vec<f64>>();
        let x = ExponentSet {
            m,
            n: 1,
            d,
            alpha: draw(rng, -0.5..0.5),
            p: draw(rng, p_range),
            q: draw(rng, q_range),
            lambda: draw(rng, lambda_lo..1.0),
            gamma: draw(rng, -0.5 * d as f64..1.0),
            r: None,
            beta: None,
        };
        if !x.validate(TheoremMode::MorreyHerzUpper).is_empty() {
            continue;
        }
        let kernel = random_kernel(m, rng);
        if !converges(ConstantKind::A1, &x, &kernel) {
            continue;
        }
        let profiles = (0..m).map(|i| truncated_input(&x, i, rng)).collect();
        let weights = WeightSet::power_weights(&x).expect("power weights");
        return UpperCase { exponents: x, kernel, profiles, weights };
    }
}

/// A single-factor commutator case with unweighted inputs (`γ_1 = 0`).
pub fn commutator_case(rng: &mut impl Rng) -> CommutatorCase {
    loop {
        let d = rng.gen_range(1..=2usize);
        let beta = rng.gen_range(0.2..0.8);
        let x = ExponentSet {
            m: 1,
            n: 1,
            d,
            alpha: vec![rng.gen_range(-0.5..1.0)],
            p: vec![rng.gen_range(1.0..4.0)],
            q: vec![rng.gen_range(2.0..4.0)],
            lambda: vec![rng.gen_range(0.1..1.0)],
            gamma: vec![0.0],
            r: Some(vec![rng.gen_range(2.0..6.0)]),
            beta: Some(vec![beta]),
        };
        if !x.validate(TheoremMode::Commutator).is_empty() {
            continue;
        }
        let kernel = random_kernel(1, rng);
        if !converges(ConstantKind::CommutatorMH, &x, &kernel) {
            continue;
        }
        let symbols = vec![SymbolSpec::power(beta, rng.gen_range(0.5..2.0)).expect("valid symbol")];
        let profiles = vec![truncated_input(&x, 0, rng)];
        let weights = WeightSet::power_weights(&x).expect("power weights");
        return CommutatorCase { exponents: x, kernel, symbols, profiles, weights };
    }
}
