//! Absolutely homogeneous weights `ω(tx) = |t|^γ ω(x)`.
//!
//! In the radial setting the angular part of a weight only ever enters
//! through its integral over the unit sphere, so a weight is stored as its
//! homogeneity degree plus that sphere mass.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Surface measure of the unit sphere in `R^d`, `2 π^{d/2} / Γ(d/2)`.
pub fn sphere_mass_unit(d: usize) -> f64 {
    assert!(d >= 1, "dimension must be positive");
    // S_1 = 2, S_2 = 2π, S_{d+2} = 2π S_d / d
    let (mut s, mut k) = if d % 2 == 1 { (2.0, 1) } else { (2.0 * PI, 2) };
    while k < d {
        s *= 2.0 * PI / k as f64;
        k += 2;
    }
    s
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HomogeneousWeight {
    /// Ambient dimension the weight lives in.
    pub dim: usize,
    /// Homogeneity degree γ.
    pub degree: f64,
    /// `ω(S_d) = ∫_{S_d} ω dσ`.
    pub sphere_mass: f64,
    /// `ω(S_d) / |S_d|`; for `ω(x) = c|x|^γ` this is `c`.
    pub radial_coefficient: f64,
}

impl HomogeneousWeight {
    /// The power weight `c |x|^γ` on `R^d`.
    pub fn power(dim: usize, degree: f64, coefficient: f64) -> Result<Self> {
        Self::check_degree(dim, degree)?;
        if !(coefficient > 0.0 && coefficient.is_finite()) {
            return Err(Error::InvalidWeight(format!("coefficient {coefficient} must be positive and finite")));
        }
        Ok(Self { dim, degree, sphere_mass: coefficient * sphere_mass_unit(dim), radial_coefficient: coefficient })
    }

    /// The unweighted case `ω ≡ 1`.
    pub fn lebesgue(dim: usize) -> Self {
        Self::power(dim, 0.0, 1.0).expect("unit weight is valid")
    }

    /// A weight with a general angular part, known only through its sphere mass.
    pub fn with_sphere_mass(dim: usize, degree: f64, sphere_mass: f64) -> Result<Self> {
        Self::check_degree(dim, degree)?;
        if !(sphere_mass > 0.0 && sphere_mass.is_finite()) {
            return Err(Error::InvalidWeight(format!("sphere mass {sphere_mass} must lie in (0, ∞)")));
        }
        Ok(Self { dim, degree, sphere_mass, radial_coefficient: sphere_mass / sphere_mass_unit(dim) })
    }

    fn check_degree(dim: usize, degree: f64) -> Result<()> {
        if dim == 0 {
            return Err(Error::InvalidWeight("dimension must be positive".into()));
        }
        if !(degree > -(dim as f64)) || !degree.is_finite() {
            return Err(Error::InvalidWeight(format!("degree {degree} must be finite and exceed -d = -{dim}")));
        }
        Ok(())
    }

    /// `∫_{C_k} ω dx` over the dyadic shell `2^{k-1} < |x| ≤ 2^k`.
    pub fn shell_mass(&self, k: i32) -> f64 {
        let s = self.dim as f64 + self.degree;
        // (2^{ks} - 2^{(k-1)s}) / s
        self.sphere_mass * 2f64.powf(k as f64 * s) * crate::numeric::one_minus_two_pow_neg_over(s)
    }
}

/// The multilinear target weight `ω = Π ω_i^{q/q_i}`.
///
/// The degree is exact for any angular parts. The sphere mass is exact only
/// when every factor has a constant angular part; otherwise pass the true
/// product mass through `sphere_mass_override`.
pub fn product_weight(
    weights: &[HomogeneousWeight],
    q_i: &[f64],
    q: f64,
    sphere_mass_override: Option<f64>,
) -> Result<HomogeneousWeight> {
    if weights.is_empty() {
        return Err(Error::InvalidWeight("product of an empty weight list".into()));
    }
    if weights.len() != q_i.len() {
        return Err(Error::InvalidWeight(format!("{} weights but {} exponents", weights.len(), q_i.len())));
    }
    let dim = weights[0].dim;
    if weights.iter().any(|w| w.dim != dim) {
        return Err(Error::InvalidWeight("factor weights live in different dimensions".into()));
    }
    if !(q > 0.0) {
        return Err(Error::InvalidWeight(format!("aggregate q = {q} must be positive")));
    }
    let degree = q * weights.iter().zip(q_i).map(|(w, qi)| w.degree / qi).sum::<f64>();
    let ln_coefficient: f64 = weights.iter().zip(q_i).map(|(w, qi)| (q / qi) * w.radial_coefficient.ln()).sum();
    let sphere_mass = match sphere_mass_override {
        Some(mass) => mass,
        None => ln_coefficient.exp() * sphere_mass_unit(dim),
    };
    if !(sphere_mass > 0.0 && sphere_mass.is_finite()) {
        return Err(Error::InvalidWeight(format!("product sphere mass {sphere_mass} is not positive")));
    }
    HomogeneousWeight::with_sphere_mass(dim, degree, sphere_mass)
}

/// Factor weights together with the target weight they induce.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightSet {
    pub factors: Vec<HomogeneousWeight>,
    pub target: HomogeneousWeight,
}

impl WeightSet {
    /// Target weight built by [`product_weight`] for the given exponents.
    pub fn new(factors: Vec<HomogeneousWeight>, q_i: &[f64], q: f64) -> Result<Self> {
        let target = product_weight(&factors, q_i, q, None)?;
        Ok(Self { factors, target })
    }

    /// Explicit target, for factors with non-constant angular parts.
    pub fn with_target(factors: Vec<HomogeneousWeight>, target: HomogeneousWeight) -> Self {
        Self { factors, target }
    }

    /// `m` copies of the Lebesgue weight on `R^d` and its target.
    pub fn lebesgue(m: usize, d: usize, q_i: &[f64], q: f64) -> Result<Self> {
        Self::new(vec![HomogeneousWeight::lebesgue(d); m], q_i, q)
    }

    /// Power weights `|x|^{γ_i}` matching an exponent set.
    pub fn power_weights(exponents: &crate::parameters::ExponentSet) -> Result<Self> {
        let agg = exponents.aggregates()?;
        let factors = exponents
            .gamma
            .iter()
            .map(|&g| HomogeneousWeight::power(exponents.d, g, 1.0))
            .collect::<Result<Vec<_>>>()?;
        Self::new(factors, &exponents.q, agg.q)
    }
}
