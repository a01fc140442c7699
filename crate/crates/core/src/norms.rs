//! Shell, Herz and Morrey-Herz norms of radial profiles.
//!
//! With `C_k = {2^{k-1} < |x| ≤ 2^k}` and `‖f χ_k‖_{q,ω}` the weighted `L^q`
//! norm on the shell,
//!
//! ```text
//! ‖f‖_{K^{α,p}_q(ω)}      = ( Σ_k 2^{kαp} ‖f χ_k‖^p )^{1/p}
//! ‖f‖_{MK^{α,λ}_{p,q}(ω)} = sup_{k0} 2^{-k0 λ} ( Σ_{k ≤ k0} 2^{kαp} ‖f χ_k‖^p )^{1/p}
//! ```
//!
//! Sums run over a finite window of shells. Terms past the window are
//! extrapolated from the geometric rate of the last eight terms at each end;
//! growth at either end is reported as an infinite norm rather than an error.
//! All arithmetic on terms is done on logarithms, so windows of `2^{±48}`
//! do not overflow.

use std::f64::consts::LN_2;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{ln_power_integral, ln_sum_exp, one_minus_two_pow_neg_over, two_pow_minus_one_over};
use crate::quadrature::gauss_interval;
use crate::radial::RadialProfile;
use crate::weights::HomogeneousWeight;

/// Shells `k_min ..= k_max` summed explicitly.
pub type Window = (i32, i32);

pub const DEFAULT_WINDOW: Window = (-48, 48);

/// Default relative tolerance on truncation error.
pub const DEFAULT_TOL: f64 = 1e-8;

/// Terms inspected at each end of the window.
const EDGE_TERMS: usize = 8;

/// Ratios this close to 1 are treated as 1.
const UNIT_RATIO: f64 = 1e-9;

/// Relative increments of the sup candidates at rounding level.
const FLAT: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NormStatus {
    Finite,
    Infinite,
    Inconclusive,
}

impl std::fmt::Display for NormStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            NormStatus::Finite => "Finite",
            NormStatus::Infinite => "Infinite",
            NormStatus::Inconclusive => "Inconclusive",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormResult {
    /// `+∞` when `status` is `Infinite`.
    pub value: f64,
    pub window: Window,
    /// Index `k0` attaining the reported supremum (Morrey-Herz only).
    pub sup_index: Option<i32>,
    /// Estimated truncation error of `value`.
    pub tail_bound: f64,
    pub status: NormStatus,
}

impl NormResult {
    fn infinite(window: Window, sup_index: Option<i32>) -> Self {
        Self { value: f64::INFINITY, window, sup_index, tail_bound: f64::INFINITY, status: NormStatus::Infinite }
    }

    pub fn is_finite(&self) -> bool {
        self.status == NormStatus::Finite
    }

    /// The value, or an error naming `what` unless the status is `Finite`.
    pub fn finite_value(&self, what: &str) -> Result<f64> {
        if self.is_finite() {
            Ok(self.value)
        } else {
            Err(Error::NonFiniteNorm { what: what.to_string(), status: self.status.to_string() })
        }
    }
}

/// `‖f χ_k‖_{q,ω} = (ω(S_d) ∫_{2^{k-1}}^{2^k} f(r)^q r^{γ+d-1} dr)^{1/q}`.
pub fn shell_norm(f: &RadialProfile, w: &HomogeneousWeight, q: f64, k: i32) -> Result<f64> {
    check_q(q)?;
    Ok((ln_shell_power(f, w, q, k) / q).exp())
}

fn check_q(q: f64) -> Result<()> {
    if !(q >= 1.0 && q.is_finite()) {
        return Err(Error::InvalidNorm(format!("q = {q} must be finite and at least 1")));
    }
    Ok(())
}

fn check_window(window: Window) -> Result<()> {
    if window.0 > window.1 {
        return Err(Error::InvalidNorm(format!("empty shell window [{}, {}]", window.0, window.1)));
    }
    Ok(())
}

/// `ln ‖f χ_k‖^q`; `-∞` for a shell carrying no mass.
pub(crate) fn ln_shell_power(f: &RadialProfile, w: &HomogeneousWeight, q: f64, k: i32) -> f64 {
    let s = w.dim as f64 + w.degree;
    w.sphere_mass.ln() + ln_radial_integral(f, q, s, (k - 1) as f64, k as f64)
}

/// `ln ∫_{2^{u0}}^{2^{u1}} f(r)^q r^{s-1} dr`.
fn ln_radial_integral(f: &RadialProfile, q: f64, s: f64, u0: f64, u1: f64) -> f64 {
    if let Some(piece) = f.power_piece() {
        if piece.coefficient == 0.0 {
            return f64::NEG_INFINITY;
        }
        let lo = if piece.inner_radius > 0.0 { u0.max(piece.inner_radius.log2()) } else { u0 };
        if lo >= u1 {
            return f64::NEG_INFINITY;
        }
        return q * piece.coefficient.ln() + ln_power_integral(q * piece.exponent + s, lo.exp2(), u1.exp2());
    }
    match f {
        RadialProfile::Scale { factor, profile } => {
            if *factor == 0.0 {
                f64::NEG_INFINITY
            } else {
                q * factor.ln() + ln_radial_integral(profile, q, s, u0, u1)
            }
        }
        RadialProfile::Sampled { log2_radii, values } => ln_sampled_integral(f, log2_radii, values, q, s, u0, u1),
        _ => {
            let cuts = pieces(&f.log2_breakpoints(), u0, u1);
            let logs: Vec<f64> = cuts.windows(2).map(|c| ln_smooth_integral(f, q, s, c[0], c[1])).collect();
            ln_sum_exp(&logs)
        }
    }
}

/// `[u0, interior breakpoints…, u1]`.
fn pieces(breakpoints: &[f64], u0: f64, u1: f64) -> Vec<f64> {
    let mut cuts = vec![u0];
    cuts.extend(breakpoints.iter().copied().filter(|&b| b > u0 && b < u1));
    cuts.push(u1);
    cuts
}

/// Sampled profiles are exact powers on every grid interval whose end
/// values are positive, and beyond the grid; only intervals touching a zero
/// value need quadrature.
fn ln_sampled_integral(f: &RadialProfile, grid: &[f64], values: &[f64], q: f64, s: f64, u0: f64, u1: f64) -> f64 {
    let cuts = pieces(grid, u0, u1);
    let logs: Vec<f64> = cuts
        .windows(2)
        .map(|c| {
            let (a, b) = (c[0], c[1]);
            let mid = 0.5 * (a + b);
            let inside = mid > grid[0] && mid < grid[grid.len() - 1];
            let linear = inside && {
                let j = grid.partition_point(|&g| g <= mid);
                values[j - 1] == 0.0 || values[j] == 0.0
            };
            if linear {
                return ln_smooth_integral(f, q, s, a, b);
            }
            let (fa, fb) = (f.value_at(a.exp2()), f.value_at(b.exp2()));
            if fa == 0.0 || fb == 0.0 {
                return f64::NEG_INFINITY;
            }
            let slope = (fb.log2() - fa.log2()) / (b - a);
            // f(r) = fa (r / 2^a)^slope
            q * (fa.ln() - slope * a * LN_2) + ln_power_integral(q * slope + s, a.exp2(), b.exp2())
        })
        .collect();
    ln_sum_exp(&logs)
}

/// Adaptive Gauss in `u = log2 r` for a piece on which `f` is smooth.
fn ln_smooth_integral(f: &RadialProfile, q: f64, s: f64, a: f64, b: f64) -> f64 {
    let ln_at = |u: f64| {
        let v = f.value_at(u.exp2());
        if v > 0.0 {
            q * v.ln() + s * u * LN_2
        } else {
            f64::NEG_INFINITY
        }
    };
    let reference = [a, 0.5 * (a + b), b].into_iter().map(ln_at).fold(f64::NEG_INFINITY, f64::max);
    if reference == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let g = |u: f64| (ln_at(u) - reference).exp() * LN_2;
    // absolute floor: the log2/exp2 round trip leaves relative noise near a zero of f
    let floor = 1e-15 * gauss_interval(g, a, b, 2).abs();
    let total = adaptive(&g, a, b, floor, 0);
    if total > 0.0 {
        reference + total.ln()
    } else {
        f64::NEG_INFINITY
    }
}

fn adaptive(g: &impl Fn(f64) -> f64, a: f64, b: f64, floor: f64, depth: u32) -> f64 {
    let whole = gauss_interval(g, a, b, 1);
    let halves = gauss_interval(g, a, b, 2);
    if (whole - halves).abs() <= (1e-14 * halves.abs()).max(floor) || depth >= 24 {
        return halves;
    }
    let m = 0.5 * (a + b);
    adaptive(g, a, m, floor, depth + 1) + adaptive(g, m, b, floor, depth + 1)
}

/// Log terms `ln(2^{kαp} ‖f χ_k‖^p)` over the window, computed in parallel
/// and returned in shell order.
fn ln_terms(f: &RadialProfile, w: &HomogeneousWeight, alpha: f64, p: f64, q: f64, window: Window) -> Vec<f64> {
    (window.0..=window.1)
        .into_par_iter()
        .map(|k| k as f64 * alpha * p * LN_2 + (p / q) * ln_shell_power(f, w, q, k))
        .collect()
}

/// Geometric extrapolation of a series past one end of the window.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Tail {
    /// `ln` of the estimated remainder (`-∞` for none) and `ln` of its
    /// uncertainty.
    Decaying { ln_sum: f64, ln_bound: f64 },
    Growing,
    Undetermined,
}

/// `edge` lists log terms ordered from the interior toward the edge.
fn tail(edge: &[f64]) -> Tail {
    let last = *edge.last().expect("nonempty edge");
    if last == f64::NEG_INFINITY {
        // no mass at the edge: the profile has bounded support on this side
        return Tail::Decaying { ln_sum: f64::NEG_INFINITY, ln_bound: f64::NEG_INFINITY };
    }
    if edge.len() < 2 || edge.iter().any(|x| !x.is_finite()) {
        return Tail::Undetermined;
    }
    let ln_ratios: Vec<f64> = edge.windows(2).map(|w| w[1] - w[0]).collect();
    if ln_ratios.iter().all(|&l| l >= -UNIT_RATIO) {
        return Tail::Growing;
    }
    if !ln_ratios.iter().all(|&l| l < -UNIT_RATIO) {
        return Tail::Undetermined;
    }
    // remainder T ρ/(1-ρ) = T / (ρ^{-1} - 1)
    let ln_rest = |l: f64| last - (-l).exp_m1().ln();
    let outer = *ln_ratios.last().unwrap();
    let (lo, hi) = ln_ratios.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &l| (lo.min(l), hi.max(l)));
    let ln_sum = ln_rest(outer);
    let spread = (ln_rest(hi).exp() - ln_rest(lo).exp()).abs();
    let ln_bound = spread.ln().max(ln_sum + (f64::EPSILON * edge.len() as f64).ln());
    Tail::Decaying { ln_sum, ln_bound }
}

/// `‖f‖_{K^{α,p}_q(ω)}` over `window`, with geometric tail extrapolation.
pub fn herz_norm(
    f: &RadialProfile,
    w: &HomogeneousWeight,
    alpha: f64,
    p: f64,
    q: f64,
    window: Window,
    tol: f64,
) -> Result<NormResult> {
    check_q(q)?;
    check_window(window)?;
    if !(p > 0.0 && p.is_finite()) {
        return Err(Error::InvalidNorm(format!("p = {p} must be positive and finite")));
    }
    if f.is_zero() {
        return Ok(NormResult { value: 0.0, window, sup_index: None, tail_bound: 0.0, status: NormStatus::Finite });
    }
    let terms = ln_terms(f, w, alpha, p, q, window);
    Ok(herz_from_terms(&terms, p, window, tol))
}

fn herz_from_terms(terms: &[f64], p: f64, window: Window, tol: f64) -> NormResult {
    let ln_window = ln_sum_exp(terms);
    if terms.len() < EDGE_TERMS + 1 {
        let value = (ln_window / p).exp();
        return NormResult { value, window, sup_index: None, tail_bound: f64::INFINITY, status: NormStatus::Inconclusive };
    }
    let lower: Vec<f64> = terms[..EDGE_TERMS].iter().rev().copied().collect();
    let upper = &terms[terms.len() - EDGE_TERMS..];
    let (lo, hi) = (tail(&lower), tail(upper));
    if matches!(lo, Tail::Growing) || matches!(hi, Tail::Growing) {
        return NormResult::infinite(window, None);
    }
    let (Tail::Decaying { ln_sum: lo_sum, ln_bound: lo_bound }, Tail::Decaying { ln_sum: hi_sum, ln_bound: hi_bound }) = (lo, hi)
    else {
        let value = (ln_window / p).exp();
        return NormResult { value, window, sup_index: None, tail_bound: f64::INFINITY, status: NormStatus::Inconclusive };
    };
    let ln_total = ln_sum_exp(&[ln_window, lo_sum, hi_sum]);
    let value = (ln_total / p).exp();
    // δ‖·‖/‖·‖ ≈ δS / (p S)
    let tail_bound = value * (ln_sum_exp(&[lo_bound, hi_bound]) - ln_total).exp() / p;
    let status = if value.is_finite() && tail_bound <= tol * value { NormStatus::Finite } else { NormStatus::Inconclusive };
    NormResult { value, window, sup_index: None, tail_bound, status }
}

/// `‖f‖_{MK^{α,λ}_{p,q}(ω)}` over `window`.
///
/// `λ = 0` is the Herz norm. Otherwise the supremum is taken over `k0` in
/// the window; the lower tail of the partial sums is extrapolated, and the
/// sequence of candidates is required to be settled at both edges.
#[allow(clippy::too_many_arguments)]
pub fn morrey_herz_norm(
    f: &RadialProfile,
    w: &HomogeneousWeight,
    alpha: f64,
    lambda: f64,
    p: f64,
    q: f64,
    window: Window,
    tol: f64,
) -> Result<NormResult> {
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidNorm(format!("λ = {lambda} must be finite and nonnegative")));
    }
    if lambda == 0.0 {
        let mut r = herz_norm(f, w, alpha, p, q, window, tol)?;
        r.sup_index = Some(window.1);
        return Ok(r);
    }
    check_q(q)?;
    check_window(window)?;
    if !(p > 0.0 && p.is_finite()) {
        return Err(Error::InvalidNorm(format!("p = {p} must be positive and finite")));
    }
    if f.is_zero() {
        return Ok(NormResult { value: 0.0, window, sup_index: None, tail_bound: 0.0, status: NormStatus::Finite });
    }
    let terms = ln_terms(f, w, alpha, p, q, window);
    if terms.len() < EDGE_TERMS + 1 {
        return Err(Error::InvalidNorm(format!("window needs at least {} shells", EDGE_TERMS + 1)));
    }

    let lower: Vec<f64> = terms[..EDGE_TERMS].iter().rev().copied().collect();
    let (lo_sum, lo_bound) = match tail(&lower) {
        Tail::Decaying { ln_sum, ln_bound } => (ln_sum, ln_bound),
        Tail::Growing => return Ok(NormResult::infinite(window, None)),
        Tail::Undetermined => {
            return Ok(NormResult {
                value: f64::NAN,
                window,
                sup_index: None,
                tail_bound: f64::INFINITY,
                status: NormStatus::Inconclusive,
            })
        }
    };

    // ln of 2^{-k0 λ} (partial sum)^{1/p}, partial sums left to right
    let mut candidates = Vec::with_capacity(terms.len());
    let mut partials = Vec::with_capacity(terms.len());
    let mut ln_partial = lo_sum;
    for (j, &t) in terms.iter().enumerate() {
        ln_partial = ln_sum_exp(&[ln_partial, t]);
        partials.push(ln_partial);
        let k0 = window.0 + j as i32;
        candidates.push(ln_partial / p - k0 as f64 * lambda * LN_2);
    }
    let (best, &ln_best) = candidates
        .iter()
        .enumerate()
        .filter(|(_, c)| c.is_finite())
        .fold((0usize, &f64::NEG_INFINITY), |acc, (j, c)| if *c > *acc.1 { (j, c) } else { acc });
    if ln_best == f64::NEG_INFINITY {
        return Ok(NormResult { value: 0.0, window, sup_index: None, tail_bound: 0.0, status: NormStatus::Finite });
    }
    let sup_index = Some(window.0 + best as i32);
    let value = ln_best.exp();

    let upper_edge: Vec<f64> = candidates[candidates.len() - EDGE_TERMS..].to_vec();
    let lower_edge: Vec<f64> = candidates[..EDGE_TERMS].iter().rev().copied().collect();
    let mut extra = 0.0;
    for edge in [&upper_edge, &lower_edge] {
        match settle(edge, ln_best, tol) {
            Edge::Settled(more) => extra += more,
            Edge::Growing => return Ok(NormResult::infinite(window, sup_index)),
            Edge::Unsettled => {
                return Ok(NormResult { value, window, sup_index, tail_bound: f64::INFINITY, status: NormStatus::Inconclusive })
            }
        }
    }
    let value = value + extra;
    // the lower tail enters every partial sum, with relative weight at most its share
    let tail_bound = extra + value * (lo_bound - partials[best]).exp().min(1.0) / p;
    let status = if value.is_finite() && tail_bound <= tol * value { NormStatus::Finite } else { NormStatus::Inconclusive };
    Ok(NormResult { value, window, sup_index, tail_bound, status })
}

enum Edge {
    /// The sequence cannot exceed the current supremum by more than this.
    Settled(f64),
    Growing,
    Unsettled,
}

/// Behaviour of the sup candidates past one edge; `edge` runs outward and
/// values are compared after scaling by the running supremum.
fn settle(edge: &[f64], ln_best: f64, tol: f64) -> Edge {
    let m: Vec<f64> = edge.iter().map(|&c| (c - ln_best).exp()).collect();
    let diffs: Vec<f64> = m.windows(2).map(|w| w[1] - w[0]).collect();
    let last = *diffs.last().unwrap();
    let edge_value = *m.last().unwrap();
    if last <= FLAT * edge_value {
        // flat or decreasing at the edge; the asymptotic regime is geometric
        // and does not turn around
        return Edge::Settled(0.0);
    }
    if diffs.iter().all(|&d| d > 0.0) {
        let ratios: Vec<f64> = diffs.windows(2).map(|w| w[1] / w[0]).collect();
        if ratios.iter().all(|&r| r >= 1.0 - UNIT_RATIO) {
            return Edge::Growing;
        }
        let worst = ratios.iter().copied().fold(0.0, f64::max);
        if worst < 1.0 {
            let remaining = last * worst / (1.0 - worst);
            if remaining <= tol * edge_value {
                return Edge::Settled(remaining * ln_best.exp());
            }
        }
    }
    Edge::Unsettled
}

/// Morrey-Herz norm of the extremal power law `|x|^a`,
/// `a = -α - (d+γ)/q + λ`:
///
/// `2^λ / (2^{λp} - 1)^{1/p} · ((1 - 2^{-q(λ-α)}) / (q(λ-α)))^{1/q} · ω(S_d)^{1/q}`.
pub fn power_norm_closed(a: f64, w: &HomogeneousWeight, alpha: f64, lambda: f64, p: f64, q: f64) -> Result<f64> {
    check_q(q)?;
    if !(lambda > 0.0) || !(lambda > alpha) {
        return Err(Error::InvalidNorm(format!("closed form needs λ > 0 and λ > α (λ = {lambda}, α = {alpha})")));
    }
    if !(p > 0.0 && p.is_finite()) {
        return Err(Error::InvalidNorm(format!("p = {p} must be positive and finite")));
    }
    let expected = -alpha - (w.dim as f64 + w.degree) / q + lambda;
    if (a - expected).abs() > 1e-9 * expected.abs().max(1.0) {
        return Err(Error::InvalidNorm(format!("exponent {a} is not the extremal exponent {expected}")));
    }
    let x = q * (lambda - alpha);
    let lp = lambda * p;
    // 2^λ / (2^{λp} - 1)^{1/p} = 2^λ (λp (2^{λp}-1)/(λp))^{-1/p}
    let ln_first = lambda * LN_2 - (lp * two_pow_minus_one_over(lp)).ln() / p;
    let ln_second = (one_minus_two_pow_neg_over(x).ln() + w.sphere_mass.ln()) / q;
    Ok((ln_first + ln_second).exp())
}

/// Shells in `window` where `‖f χ_k‖ > 2^{k(λ-α)} · norm` by more than the
/// relative slack `tol`.
#[allow(clippy::too_many_arguments)]
pub fn shell_bound_violations(
    f: &RadialProfile,
    w: &HomogeneousWeight,
    alpha: f64,
    lambda: f64,
    q: f64,
    window: Window,
    norm: f64,
    tol: f64,
) -> Result<Vec<i32>> {
    check_q(q)?;
    check_window(window)?;
    let ln_norm = norm.ln();
    Ok((window.0..=window.1)
        .filter(|&k| {
            let ln_shell = ln_shell_power(f, w, q, k) / q;
            ln_shell > k as f64 * (lambda - alpha) * LN_2 + ln_norm + tol.ln_1p()
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parameters::ExponentSet;
    use crate::radial::extremal_morrey_herz;

    fn lebesgue(d: usize) -> HomogeneousWeight {
        HomogeneousWeight::lebesgue(d)
    }

    #[test]
    fn shell_examples() {
        let w = lebesgue(1);
        assert!((shell_norm(&RadialProfile::one(), &w, 1.0, 0).unwrap() - 1.0).abs() < 1e-15);
        let inv = RadialProfile::power_law(-1.0, 1.0).unwrap();
        assert!((shell_norm(&inv, &w, 2.0, 1).unwrap() - 1.0).abs() < 1e-15);
        let cut = RadialProfile::truncated_power_law(-2.0, 1.0, 1.0).unwrap();
        assert_eq!(shell_norm(&cut, &w, 1.0, 0).unwrap(), 0.0);
        assert!(shell_norm(&inv, &w, 0.5, 0).is_err());
    }

    #[test]
    fn sampled_shells_match_power_law() {
        let w = HomogeneousWeight::power(2, 0.5, 1.0).unwrap();
        let f = RadialProfile::power_law(-0.7, 3.0).unwrap();
        let grid: Vec<f64> = (0..=40).map(|j| -10.0 + 0.37 * j as f64).collect();
        let s = f.resample(&grid).unwrap();
        for k in [-15, -3, 0, 2, 4, 9] {
            let (a, b) = (shell_norm(&f, &w, 2.5, k).unwrap(), shell_norm(&s, &w, 2.5, k).unwrap());
            assert!((a - b).abs() < 1e-12 * a, "k={k}: {a} vs {b}");
        }
    }

    #[test]
    fn smooth_sum_shell_matches_quadrature_oracle() {
        // f = r^{-1} + 1 on the unit shell, q = 2, d = 1: 2 ∫_{1/2}^1 (1/r + 1)^2 dr = 2 (1 + 2 ln 2 + 1/2)
        let f = RadialProfile::Sum { terms: vec![RadialProfile::power_law(-1.0, 1.0).unwrap(), RadialProfile::one()] };
        let v = shell_norm(&f, &lebesgue(1), 2.0, 0).unwrap();
        let exact = (2.0 * (1.5 + 2.0 * LN_2)).sqrt();
        assert!((v - exact).abs() < 1e-13, "{v} vs {exact}");
    }

    #[test]
    fn herz_examples() {
        let w = lebesgue(1);
        let cut = RadialProfile::truncated_power_law(-2.0, 1.0, 1.0).unwrap();
        let r = herz_norm(&cut, &w, 0.0, 1.0, 1.0, DEFAULT_WINDOW, 1e-10).unwrap();
        assert_eq!(r.status, NormStatus::Finite);
        assert!((r.value - 2.0).abs() < 1e-12);
        let r = herz_norm(&RadialProfile::one(), &w, 0.0, 1.0, 1.0, DEFAULT_WINDOW, 1e-10).unwrap();
        assert_eq!(r.status, NormStatus::Infinite);
        let r = herz_norm(&RadialProfile::zero(), &w, 0.0, 1.0, 1.0, DEFAULT_WINDOW, 1e-10).unwrap();
        assert_eq!((r.value, r.status), (0.0, NormStatus::Finite));
    }

    #[test]
    fn herz_tail_matches_geometric_sum() {
        // r^{-1.5} outside 1, q = 1, d = 1: terms 2·2^{-k/2}(√2 - 1) ... total 2∫_1^∞ r^{-1.5} = 4
        let f = RadialProfile::truncated_power_law(-1.5, 1.0, 1.0).unwrap();
        for window in [(-48, 48), (-10, 12), (-3, 20)] {
            let r = herz_norm(&f, &lebesgue(1), 0.0, 1.0, 1.0, window, 1e-10).unwrap();
            assert_eq!(r.status, NormStatus::Finite, "{window:?}");
            assert!((r.value - 4.0).abs() < 1e-11, "{window:?}: {}", r.value);
        }
    }

    #[test]
    fn morrey_herz_examples() {
        let w = lebesgue(1);
        let r = morrey_herz_norm(&RadialProfile::one(), &w, 0.0, 1.0, 1.0, 1.0, DEFAULT_WINDOW, 1e-10).unwrap();
        assert_eq!(r.status, NormStatus::Finite);
        assert!((r.value - 2.0).abs() < 1e-12, "{}", r.value);

        let e = ExponentSet::single(1, 0.0, 1.0, 1.0, 1.0, 0.0);
        let f = extremal_morrey_herz(&e, 0).unwrap();
        let r = morrey_herz_norm(&f, &w, 0.0, 1.0, 1.0, 1.0, DEFAULT_WINDOW, 1e-10).unwrap();
        assert!((r.value - 2.0).abs() < 1e-12);
        let closed = power_norm_closed(0.0, &w, 0.0, 1.0, 1.0, 1.0).unwrap();
        assert!((closed - 2.0).abs() < 1e-14);
    }

    #[test]
    fn zero_lambda_is_herz() {
        let f = RadialProfile::truncated_power_law(-1.2, 2.0, 0.3).unwrap();
        let w = lebesgue(2);
        let a = herz_norm(&f, &w, 0.1, 1.5, 2.0, DEFAULT_WINDOW, 1e-9).unwrap();
        let b = morrey_herz_norm(&f, &w, 0.1, 0.0, 1.5, 2.0, DEFAULT_WINDOW, 1e-9).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
    }

    #[test]
    fn closed_form_examples() {
        let w = lebesgue(1);
        let v = power_norm_closed(0.0, &w, 0.0, 1.0, 2.0, 1.0).unwrap();
        assert!((v - 2.0 / 3f64.sqrt()).abs() < 1e-14, "{v}");
        assert!(power_norm_closed(0.0, &w, 1.0, 1.0, 1.0, 1.0).is_err());
        assert!(power_norm_closed(0.5, &w, 0.0, 1.0, 1.0, 1.0).is_err());
        // q(λ-α) → 0⁺ approaches the ln 2 branch continuously
        let lam = 1e-9;
        let near = power_norm_closed(-1.0 + lam - 0.0, &w, 0.0, lam, 1.0, 1.0);
        assert!(near.is_ok());
    }

    #[test]
    fn morrey_herz_detects_growth_and_support() {
        let w = lebesgue(1);
        // r^1 with λ = 1/2, α = 0, q = 1: shells grow like 2^{2k}, faster than 2^{k λ}
        let f = RadialProfile::power_law(1.0, 1.0).unwrap();
        let r = morrey_herz_norm(&f, &w, 0.0, 0.5, 1.0, 1.0, DEFAULT_WINDOW, 1e-8).unwrap();
        assert_eq!(r.status, NormStatus::Infinite);
        // decaying truncated profile: interior supremum
        let g = RadialProfile::truncated_power_law(-2.0, 1.0, 1.0).unwrap();
        let r = morrey_herz_norm(&g, &w, 0.0, 0.5, 1.0, 1.0, DEFAULT_WINDOW, 1e-8).unwrap();
        assert_eq!(r.status, NormStatus::Finite);
        let brute = (1..=30)
            .map(|k0: i32| {
                let s: f64 = (1..=k0).map(|k| shell_norm(&g, &w, 1.0, k).unwrap()).sum();
                2f64.powf(-0.5 * k0 as f64) * s
            })
            .fold(0.0, f64::max);
        assert!((r.value - brute).abs() < 1e-13, "{} vs {brute}", r.value);
    }

    #[test]
    fn shell_bound_on_extremals() {
        let w = lebesgue(3);
        let e = ExponentSet::single(3, 0.3, 2.0, 2.0, 1.2, 0.0);
        let f = extremal_morrey_herz(&e, 0).unwrap();
        let r = morrey_herz_norm(&f, &w, 0.3, 1.2, 2.0, 2.0, DEFAULT_WINDOW, 1e-8).unwrap();
        assert!(r.is_finite());
        assert!(shell_bound_violations(&f, &w, 0.3, 1.2, 2.0, DEFAULT_WINDOW, r.value, 1e-12).unwrap().is_empty());
    }

    #[test]
    fn dilation_by_powers_of_two_shifts_shells() {
        // f(2^j x) has shells ‖f χ_{k+j}‖ · 2^{-j(d+γ)/q}
        let w = HomogeneousWeight::power(2, 0.5, 1.0).unwrap();
        let f = RadialProfile::truncated_power_law(-0.8, 1.5, 0.75).unwrap();
        let q = 1.5;
        for j in [-2, 3] {
            let g = f.dilate(2f64.powi(j)).unwrap();
            for k in [-1, 0, 4] {
                let lhs = shell_norm(&g, &w, q, k).unwrap();
                let rhs = shell_norm(&f, &w, q, k + j).unwrap() * 2f64.powf(-(j as f64) * 2.5 / q);
                assert!((lhs - rhs).abs() <= 1e-13 * rhs.max(1e-300), "j={j} k={k}: {lhs} vs {rhs}");
            }
        }
    }
}
