//! Integration over the unit cube `[0,1]^n` with algebraic endpoint
//! singularities.
//!
//! The integrator is a composite 12-point Gauss-Legendre rule on a tensor
//! mesh. Along each axis the mesh is graded geometrically (ratio 1/4) toward
//! every endpoint declared singular, and split at declared interior
//! breakpoints. Each refinement level doubles the number of geometric layers
//! and uniform cells; the result is accepted once two successive levels
//! agree to the requested relative tolerance.
//!
//! Divergence is decided structurally first: a declared endpoint exponent
//! `≤ -1` is a non-integrable singularity. Integrands with undeclared
//! behaviour fall back to detecting growth of the level-to-level
//! differences.

mod gauss;
mod kernel;

pub use gauss::{legendre_rule, POINTS};
pub use kernel::{kernel_power_integral, kernel_power_integral_with, Callback, Curve, Factor, KernelSpec, Method, Psi};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::CompensatedSum;

/// Default cap on integrand evaluations.
pub const DEFAULT_BUDGET: usize = 1 << 22;

/// Consecutive non-contracting refinements that signal divergence.
const GROWTH_STREAK: usize = 6;

/// A level difference at least this fraction of the previous one counts as
/// non-contracting.
const NON_CONTRACTING: f64 = 0.9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum IntegralStatus {
    Converged,
    Divergent,
    Inconclusive,
}

impl std::fmt::Display for IntegralStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            IntegralStatus::Converged => "Converged",
            IntegralStatus::Divergent => "Divergent",
            IntegralStatus::Inconclusive => "Inconclusive",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegralResult {
    pub value: f64,
    pub abs_error: f64,
    pub status: IntegralStatus,
    pub evaluations: usize,
}

impl IntegralResult {
    pub fn exact(value: f64) -> Self {
        Self { value, abs_error: 0.0, status: IntegralStatus::Converged, evaluations: 0 }
    }

    pub fn divergent(evaluations: usize) -> Self {
        Self { value: f64::INFINITY, abs_error: f64::INFINITY, status: IntegralStatus::Divergent, evaluations }
    }

    pub fn is_converged(&self) -> bool {
        self.status == IntegralStatus::Converged
    }
}

/// Behaviour of an integrand at one end of an axis.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Singularity {
    /// Smooth up to the endpoint.
    #[default]
    Regular,
    /// Behaves like `t^a` (distance to the endpoint to the power `a`) with
    /// a nonvanishing coefficient.
    Algebraic(f64),
    /// Possibly singular, order not known.
    Unknown,
}

impl Singularity {
    pub fn algebraic(a: f64) -> Self {
        if a == 0.0 {
            Singularity::Regular
        } else {
            Singularity::Algebraic(a)
        }
    }

    /// Product of two endpoint behaviours.
    pub fn combine(self, other: Singularity) -> Singularity {
        use Singularity::*;
        match (self, other) {
            (Unknown, _) | (_, Unknown) => Unknown,
            (Regular, x) | (x, Regular) => x,
            (Algebraic(a), Algebraic(b)) => Singularity::algebraic(a + b),
        }
    }

    /// Same leading order, but with non-integer corrections that need a
    /// graded mesh.
    pub fn rough(self) -> Singularity {
        match self {
            Singularity::Regular => Singularity::Algebraic(0.0),
            x => x,
        }
    }

    fn graded(self) -> bool {
        !matches!(self, Singularity::Regular)
    }

    fn non_integrable(self) -> bool {
        matches!(self, Singularity::Algebraic(a) if a <= -1.0)
    }
}

/// Per-axis description used to build the mesh.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AxisProfile {
    pub lower: Singularity,
    pub upper: Singularity,
    /// Interior points where the integrand is not smooth.
    pub breakpoints: Vec<f64>,
}

impl AxisProfile {
    pub fn new(lower: Singularity, upper: Singularity) -> Self {
        Self { lower, upper, breakpoints: Vec::new() }
    }

    pub fn regular() -> Self {
        Self::default()
    }

    pub fn with_breakpoints(mut self, points: impl IntoIterator<Item = f64>) -> Self {
        self.breakpoints.extend(points.into_iter().filter(|t| *t > 0.0 && *t < 1.0));
        self.breakpoints.sort_by(f64::total_cmp);
        self.breakpoints.dedup();
        self
    }

    /// Mesh nodes of refinement `level` on this axis, or `None` once the
    /// grading would underflow.
    fn nodes(&self, level: u32) -> Option<Vec<Node>> {
        if layers(level) > MAX_LAYERS {
            return None;
        }
        let mut cuts = Vec::with_capacity(self.breakpoints.len() + 2);
        cuts.push(0.0);
        cuts.extend(self.breakpoints.iter().copied());
        cuts.push(1.0);
        let mut out = Vec::new();
        for w in cuts.windows(2) {
            let (a, b) = (w[0], w[1]);
            let left = (a == 0.0).then_some(self.lower).filter(|s| s.graded());
            let right = (b == 1.0).then_some(self.upper).filter(|s| s.graded());
            match (left, right) {
                (None, None) => stretched_cells(a, b, 1usize << level, &mut out),
                (Some(s), None) => graded_cells(End::Lower, s, b, level, &mut out),
                (None, Some(s)) => graded_cells(End::Upper, s, 1.0 - a, level, &mut out),
                (Some(lo), Some(hi)) => {
                    graded_cells(End::Lower, lo, 0.5, level, &mut out);
                    graded_cells(End::Upper, hi, 0.5, level, &mut out);
                }
            }
        }
        Some(out)
    }
}

/// A quadrature node: coordinate `t`, its complement `1 - t` (kept exact
/// near the upper face) and weight.
#[derive(Debug, Clone, Copy)]
struct Node {
    t: f64,
    tc: f64,
    w: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum End {
    Lower,
    Upper,
}

const MAX_LAYERS: usize = 480;

fn layers(level: u32) -> usize {
    8 * (level as usize + 1)
}

fn uniform_cells(a: f64, b: f64, count: usize, out: &mut Vec<Node>) {
    let mut buf = Vec::with_capacity(POINTS);
    let h = (b - a) / count as f64;
    for i in 0..count {
        let lo = a + h * i as f64;
        let hi = if i + 1 == count { b } else { a + h * (i + 1) as f64 };
        buf.clear();
        gauss::push_cell(lo, hi, &mut buf);
        out.extend(buf.iter().map(|&(t, w)| Node { t, tc: 1.0 - t, w }));
    }
}

/// Uniform cells, except that a segment far from the origin relative to its
/// length is first cut geometrically so that integrands varying on the scale
/// of `a` stay resolved.
fn stretched_cells(a: f64, b: f64, count: usize, out: &mut Vec<Node>) {
    if a > 0.0 && b > 8.0 * a {
        let mut lo = a;
        while lo * 4.0 < b * 0.5 {
            uniform_cells(lo, lo * 4.0, count, out);
            lo *= 4.0;
        }
        uniform_cells(lo, b, count, out);
    } else {
        uniform_cells(a, b, count, out);
    }
}

/// Cells shrinking by 1/4 toward one end of the cube, covering distances
/// `(0, span]` from that end.
fn graded_cells(end: End, singularity: Singularity, span: f64, level: u32, out: &mut Vec<Node>) {
    let sub = if level >= 2 { 2 } else { 1 };
    let mut dist = Vec::new();
    let mut outer = span;
    for _ in 0..layers(level) {
        let inner = outer * 0.25;
        let h = (outer - inner) / sub as f64;
        for j in 0..sub {
            gauss::push_cell(inner + h * j as f64, inner + h * (j + 1) as f64, &mut dist);
        }
        outer = inner;
    }
    match singularity {
        // one-point Gauss-Jacobi rule, exact for δ^a and δ^{a+1}
        Singularity::Algebraic(a) => {
            let node = outer * (a + 1.0) / (a + 2.0);
            let weight = outer / (a + 1.0) * (outer / node).powf(a);
            dist.push((node, weight));
        }
        _ => gauss::push_cell(0.0, outer, &mut dist),
    }
    out.extend(dist.into_iter().map(|(delta, w)| match end {
        End::Lower => Node { t: delta, tc: 1.0 - delta, w },
        End::Upper => Node { t: 1.0 - delta, tc: delta, w },
    }));
}

/// Options for [`integrate_unit_cube_with`].
#[derive(Debug, Clone, Copy)]
pub struct CubeOptions {
    pub tol: f64,
    pub budget: usize,
}

impl CubeOptions {
    pub fn new(tol: f64) -> Self {
        Self { tol, budget: DEFAULT_BUDGET }
    }
}

/// Integrates `integrand` over `(0,1)^n` to relative tolerance `tol`.
///
/// `axes[j]` declares the endpoint behaviour and breakpoints of axis `j`.
pub fn integrate_unit_cube<F>(integrand: F, n: usize, tol: f64, axes: &[AxisProfile]) -> Result<IntegralResult>
where
    F: Fn(&[f64]) -> f64,
{
    integrate_unit_cube_with(|t: &[f64], _: &[f64]| integrand(t), n, axes, CubeOptions::new(tol))
}

/// Like [`integrate_unit_cube`], but the integrand also receives the
/// complements `1 - t_j`, computed without cancellation near the upper faces.
pub fn integrate_unit_cube_with<F>(integrand: F, n: usize, axes: &[AxisProfile], opts: CubeOptions) -> Result<IntegralResult>
where
    F: Fn(&[f64], &[f64]) -> f64,
{
    if !(1..=3).contains(&n) {
        return Err(Error::InvalidQuadrature(format!("dimension n = {n} must be 1, 2 or 3")));
    }
    if !(opts.tol >= 1e-14 && opts.tol <= 1e-2) {
        return Err(Error::InvalidQuadrature(format!("tolerance {} must lie in [1e-14, 1e-2]", opts.tol)));
    }
    if axes.len() != n {
        return Err(Error::InvalidQuadrature(format!("{} axis profiles for dimension {n}", axes.len())));
    }
    if axes.iter().any(|a| a.lower.non_integrable() || a.upper.non_integrable()) {
        return Ok(IntegralResult::divergent(0));
    }

    let mut evaluations = 0usize;
    let mut previous: Option<f64> = None;
    let mut last_diff = f64::NAN;
    let mut last_sign = 0.0;
    let mut streak = 0usize;
    let mut level = 0u32;
    let inconclusive = |value: f64, err: f64, evaluations: usize| IntegralResult {
        value,
        abs_error: if err.is_nan() { f64::INFINITY } else { err },
        status: IntegralStatus::Inconclusive,
        evaluations,
    };
    loop {
        let Some(meshes) = axes.iter().map(|a| a.nodes(level)).collect::<Option<Vec<_>>>() else {
            return Ok(inconclusive(previous.unwrap_or(f64::NAN), last_diff, evaluations));
        };
        let cost: usize = meshes.iter().map(Vec::len).product();
        if evaluations + cost > opts.budget {
            return Ok(inconclusive(previous.unwrap_or(f64::NAN), last_diff, evaluations));
        }
        let value = tensor_sum(&integrand, &meshes);
        evaluations += cost;

        if value.is_nan() {
            return Ok(inconclusive(value, f64::INFINITY, evaluations));
        }
        if value.is_infinite() {
            return Ok(IntegralResult::divergent(evaluations));
        }
        if let Some(prev) = previous {
            let diff = (value - prev).abs();
            if diff <= opts.tol * value.abs().max(1.0) {
                return Ok(IntegralResult { value, abs_error: diff, status: IntegralStatus::Converged, evaluations });
            }
            let sign = (value - prev).signum();
            if !last_diff.is_nan() && diff >= NON_CONTRACTING * last_diff && sign == last_sign {
                streak += 1;
                if streak >= GROWTH_STREAK {
                    return Ok(IntegralResult::divergent(evaluations));
                }
            } else {
                streak = 0;
            }
            last_diff = diff;
            last_sign = sign;
        }
        previous = Some(value);
        level += 1;
    }
}

fn tensor_sum<F: Fn(&[f64], &[f64]) -> f64>(f: &F, meshes: &[Vec<Node>]) -> f64 {
    let mut acc = CompensatedSum::new();
    match meshes.len() {
        1 => {
            for x in &meshes[0] {
                acc.add(x.w * f(&[x.t], &[x.tc]));
            }
        }
        2 => {
            for x in &meshes[0] {
                for y in &meshes[1] {
                    acc.add(x.w * y.w * f(&[x.t, y.t], &[x.tc, y.tc]));
                }
            }
        }
        _ => {
            for x in &meshes[0] {
                for y in &meshes[1] {
                    for z in &meshes[2] {
                        acc.add(x.w * y.w * z.w * f(&[x.t, y.t, z.t], &[x.tc, y.tc, z.tc]));
                    }
                }
            }
        }
    }
    acc.value()
}

/// Composite Gauss-Legendre over `[a, b]` with `cells` uniform cells.
pub fn gauss_interval<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, cells: usize) -> f64 {
    let mut nodes = Vec::with_capacity(cells * POINTS);
    uniform_cells(a, b, cells.max(1), &mut nodes);
    nodes.iter().map(|x| x.w * f(x.t)).collect::<CompensatedSum>().value()
}

/// `∫_0^1 t^a (1-t)^e dt = B(a+1, e+1)`, divergent unless `a, e > -1`.
pub fn beta_closed_form(a: f64, e: f64) -> IntegralResult {
    if !(a > -1.0 && e > -1.0) {
        return IntegralResult::divergent(0);
    }
    use statrs::function::gamma::{gamma, ln_gamma};
    let (x, y) = (a + 1.0, e + 1.0);
    let small_integer = |v: f64| v.fract() == 0.0 && v <= 64.0;
    let (value, log_scale) = if small_integer(x) || small_integer(y) {
        // B(u, n) = (n-1)! / (u (u+1) ⋯ (u+n-1))
        let (u, n) = if small_integer(y) { (x, y as usize) } else { (y, x as usize) };
        let value = (1..n).fold(1.0 / u, |acc, k| acc * k as f64 / (u + k as f64));
        (value, n as f64)
    } else if x + y < 150.0 {
        (gamma(x) / gamma(x + y) * gamma(y), 3.0)
    } else {
        let (gx, gy, gxy) = (ln_gamma(x), ln_gamma(y), ln_gamma(x + y));
        ((gx + gy - gxy).exp(), 1.0 + gx.abs() + gy.abs() + gxy.abs())
    };
    IntegralResult { value, abs_error: 4.0 * f64::EPSILON * value * log_scale, status: IntegralStatus::Converged, evaluations: 0 }
}
