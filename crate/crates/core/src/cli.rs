//! Config-driven batch runs writing CSV reports.
//!
//! A run is described by one JSON document:
//!
//! ```json
//! {
//!   "job": "constant",
//!   "constant": "Xiao",
//!   "exponents": { "m": 1, "n": 1, "d": 1, "alpha": [0.0], "p": [2.0], "q": [2.0], "lambda": [0.0], "gamma": [0.0] },
//!   "kernel": { "n": 1, "psi": { "kind": "power_beta", "c": 0.0, "e": 0.0 }, "curves": [{ "kind": "power", "b": 1.0 }] }
//! }
//! ```
//!
//! Exit status: 0 when every row passes (undecided numerics are reported as
//! data), 1 when a verification fails, 2 on a configuration error.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::Parser;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::constants::{kernel_constant, structural_constant, ConstantKind, StructuralKind};
use crate::error::{Error, Result};
use crate::families;
use crate::norms::{herz_norm, morrey_herz_norm, NormResult, Window};
use crate::operators::{apply_commutator, apply_hardy_cesaro, OperatorSpec, SymbolSpec};
use crate::parameters::ExponentSet;
use crate::quadrature::KernelSpec;
use crate::radial::RadialProfile;
use crate::verification::{
    herz_ratio, verify_commutator, verify_herz, verify_mh_sharpness, verify_mh_upper, NumericOptions, TheoremId,
    VerificationReport,
};
use crate::weights::{HomogeneousWeight, WeightSet};

/// Largest number of points a sweep may expand to.
pub const MAX_SWEEP_POINTS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JobKind {
    Constant,
    Norm,
    OperatorEval,
    Verify,
    Sweep,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormKind {
    #[default]
    MorreyHerz,
    Herz,
}

/// Numeric controls; every field is optional in the config.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NumericConfig {
    pub tol: f64,
    pub quad_tol: f64,
    pub norm_tol: f64,
    pub window: Window,
    pub nodes_per_octave: usize,
}

impl Default for NumericConfig {
    fn default() -> Self {
        let o = NumericOptions::default();
        Self { tol: 1e-6, quad_tol: o.quad_tol, norm_tol: o.norm_tol, window: o.window, nodes_per_octave: o.nodes_per_octave }
    }
}

impl NumericConfig {
    fn options(&self) -> NumericOptions {
        NumericOptions { quad_tol: self.quad_tol, norm_tol: self.norm_tol, window: self.window, nodes_per_octave: self.nodes_per_octave }
    }
}

/// Linear or geometric range of sweep values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RangeSpec {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    #[serde(default)]
    pub geometric: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    /// `epsilon`, or an exponent field (`alpha`, `p`, `q`, `lambda`, `gamma`,
    /// `r`, `beta`) optionally indexed as `p[0]`; unindexed names set every
    /// factor.
    pub parameter: String,
    /// The job repeated at each point: `constant`, `norm` or `verify`.
    pub job: JobKind,
    #[serde(default)]
    pub values: Option<Vec<f64>>,
    #[serde(default)]
    pub range: Option<RangeSpec>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub job: JobKind,
    pub exponents: ExponentSet,
    #[serde(default)]
    pub kernel: Option<KernelSpec>,
    #[serde(default)]
    pub profiles: Vec<RadialProfile>,
    #[serde(default)]
    pub symbols: Vec<SymbolSpec>,
    /// Factor weights; power weights `|x|^{γ_i}` when omitted.
    #[serde(default)]
    pub weights: Option<Vec<HomogeneousWeight>>,
    /// Target weight; the product weight when omitted.
    #[serde(default)]
    pub target_weight: Option<HomogeneousWeight>,
    #[serde(default)]
    pub constant: Option<ConstantKind>,
    #[serde(default)]
    pub structural: Option<StructuralKind>,
    #[serde(default)]
    pub norm: NormKind,
    #[serde(default)]
    pub theorem: Option<TheoremId>,
    /// Radii for `operator_eval`.
    #[serde(default)]
    pub radii: Vec<f64>,
    /// `ε` values for the Herz lower-bound sweep.
    #[serde(default)]
    pub epsilons: Vec<f64>,
    /// Number of seeded random cases for `T31_upper` / `T41_bound` when no
    /// profiles are given.
    #[serde(default)]
    pub family: Option<usize>,
    #[serde(default)]
    pub sweep: Option<SweepSpec>,
    #[serde(default)]
    pub numeric: NumericConfig,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

/// Command-line overrides.
#[derive(Debug, Clone, Default, Parser)]
#[command(name = "hcmh", about = "Hardy-Cesàro operator constants, norms and bound checks from a JSON config")]
pub struct Cli {
    /// Path of the JSON run configuration.
    #[arg(long)]
    pub config: PathBuf,
    /// CSV output path (overrides `output` in the config; stdout when neither is set).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Verification tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Symmetric shell window `[-w, w]`.
    #[arg(long)]
    pub window: Option<i32>,
    /// Seed for random families.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads (defaults to all cores).
    #[arg(long)]
    pub jobs: Option<usize>,
}

/// Rows of one CSV report.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Report {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    /// Any row recording a failed verification.
    pub failed: bool,
}

impl Report {
    fn new(header: &[&str]) -> Self {
        Self { header: header.iter().map(|s| s.to_string()).collect(), ..Self::default() }
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
        let io = Error::from;
        w.write_record(&self.header).map_err(io)?;
        for row in &self.rows {
            w.write_record(row).map_err(io)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Shortest round-trip decimal.
fn num(x: f64) -> String {
    format!("{x}")
}

fn opt<T: ToString>(x: Option<T>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

/// First 16 hex digits of the SHA-256 of the canonical JSON of `value`.
pub fn params_hash<T: Serialize>(value: &T) -> String {
    let json = serde_json::to_vec(value).expect("serializable parameters");
    Sha256::digest(&json).iter().take(8).map(|b| format!("{b:02x}")).collect()
}

#[derive(Serialize)]
struct HashInput<'a> {
    exponents: &'a ExponentSet,
    kernel: &'a Option<KernelSpec>,
    profiles: &'a [RadialProfile],
    symbols: &'a [SymbolSpec],
    extra: String,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(format!("line {}, column {}: {e}", e.line(), e.column())))?;
        cfg.check()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Structural checks that do not depend on numerics.
    pub fn check(&self) -> Result<()> {
        let cfg_err = |m: String| Err(Error::Config(m));
        self.exponents.check().map_err(|e| Error::Config(format!("exponents: {e}")))?;
        if let Some(k) = &self.kernel {
            k.check().map_err(|e| Error::Config(format!("kernel: {e}")))?;
        }
        for (i, f) in self.profiles.iter().enumerate() {
            f.check().map_err(|e| Error::Config(format!("profiles[{i}]: {e}")))?;
        }
        for (i, s) in self.symbols.iter().enumerate() {
            s.check().map_err(|e| Error::Config(format!("symbols[{i}]: {e}")))?;
        }
        let d = self.exponents.d;
        if let Some(w) = &self.weights {
            if w.len() != self.exponents.m {
                return cfg_err(format!("{} weights for m = {}", w.len(), self.exponents.m));
            }
        }
        for (i, w) in self.weights.iter().flatten().chain(&self.target_weight).enumerate() {
            if w.dim != d || !(w.sphere_mass > 0.0 && w.sphere_mass.is_finite()) || !(w.degree > -(d as f64)) {
                return cfg_err(format!("weight {i} must live in dimension {d} with positive mass and degree > -{d}"));
            }
        }
        let n = &self.numeric;
        if !(n.tol > 0.0 && n.quad_tol > 0.0 && n.norm_tol > 0.0) || n.window.0 > n.window.1 || n.nodes_per_octave == 0 {
            return cfg_err("numeric: tolerances must be positive, the window nonempty, nodes_per_octave positive".into());
        }
        let job = if self.job == JobKind::Sweep {
            let Some(sweep) = &self.sweep else { return cfg_err("sweep job needs a `sweep` block".into()) };
            if matches!(sweep.job, JobKind::Sweep | JobKind::OperatorEval) {
                return cfg_err("sweep.job must be constant, norm or verify".into());
            }
            sweep_values(sweep)?;
            sweep.job
        } else {
            self.job
        };
        match job {
            JobKind::Constant => {
                if self.constant.is_none() && self.structural.is_none() {
                    return cfg_err("constant job needs `constant` or `structural`".into());
                }
                if self.constant.is_some() && self.kernel.is_none() {
                    return cfg_err("kernel constant needs a `kernel` block".into());
                }
            }
            JobKind::Norm => {
                if self.profiles.is_empty() {
                    return cfg_err("norm job needs `profiles`".into());
                }
                if self.profiles.len() > self.exponents.m {
                    return cfg_err(format!("{} profiles for m = {}", self.profiles.len(), self.exponents.m));
                }
            }
            JobKind::OperatorEval => {
                if self.kernel.is_none() || self.profiles.len() != self.exponents.m || self.radii.is_empty() {
                    return cfg_err("operator_eval needs `kernel`, m `profiles` and nonempty `radii`".into());
                }
                if !self.symbols.is_empty() && self.symbols.len() != self.exponents.m {
                    return cfg_err("operator_eval with symbols needs one symbol per factor".into());
                }
            }
            JobKind::Verify => {
                let Some(theorem) = self.theorem else { return cfg_err("verify job needs `theorem`".into()) };
                if self.kernel.is_none() {
                    return cfg_err("verify job needs a `kernel` block".into());
                }
                let has_inputs = !self.profiles.is_empty() || self.family.is_some();
                match theorem {
                    TheoremId::T31_upper if !has_inputs => return cfg_err("T31_upper needs `profiles` or `family`".into()),
                    TheoremId::T41_bound if !has_inputs || (self.family.is_none() && self.symbols.is_empty()) => {
                        return cfg_err("T41_bound needs `profiles` and `symbols`, or `family`".into())
                    }
                    TheoremId::T32_upper | TheoremId::T32_lower
                        if self.epsilons.is_empty() && !matches!(&self.sweep, Some(s) if s.parameter == "epsilon") =>
                    {
                        return cfg_err("Herz checks need `epsilons`".into())
                    }
                    _ => {}
                }
            }
            JobKind::Sweep => unreachable!("nested sweeps are rejected above"),
        }
        Ok(())
    }

    fn weights_for(&self, x: &ExponentSet) -> Result<WeightSet> {
        let agg = x.aggregates()?;
        let factors = match &self.weights {
            Some(w) => w.clone(),
            None => WeightSet::power_weights(x)?.factors,
        };
        Ok(match self.target_weight {
            Some(t) => WeightSet::with_target(factors, t),
            None => WeightSet::new(factors, &x.q, agg.q)?,
        })
    }

    fn hash(&self, x: &ExponentSet, extra: String) -> String {
        params_hash(&HashInput { exponents: x, kernel: &self.kernel, profiles: &self.profiles, symbols: &self.symbols, extra })
    }
}

/// Errors that make a row undecidable rather than the config invalid.
fn is_numeric(e: &Error) -> bool {
    matches!(e, Error::NonFiniteNorm { .. } | Error::DivergentOutput { .. } | Error::UnresolvedOutput { .. })
}

const CONSTANT_HEADER: [&str; 5] = ["kind", "parameters_hash", "value", "status", "abs_error"];
const NORM_HEADER: [&str; 12] =
    ["function_id", "alpha", "lambda", "p", "q", "gamma", "value", "status", "k_min", "k_max", "sup_index", "tail_bound"];
const OPERATOR_HEADER: [&str; 6] = ["operator", "r", "value", "abs_error", "status", "evaluations"];
const VERIFY_HEADER: [&str; 7] = ["theorem_id", "params_hash", "lhs", "rhs", "ratio", "pass", "tol"];

fn header_for(job: JobKind) -> &'static [&'static str] {
    match job {
        JobKind::Constant => &CONSTANT_HEADER,
        JobKind::Norm => &NORM_HEADER,
        JobKind::OperatorEval => &OPERATOR_HEADER,
        JobKind::Verify | JobKind::Sweep => &VERIFY_HEADER,
    }
}

fn constant_rows(cfg: &RunConfig, x: &ExponentSet) -> Result<Vec<Vec<String>>> {
    let mut rows = Vec::new();
    if let Some(kind) = cfg.constant {
        let kernel = cfg.kernel.as_ref().expect("checked");
        let k = kernel_constant(kind, x, kernel, cfg.numeric.quad_tol)?;
        rows.push(vec![kind.to_string(), cfg.hash(x, kind.to_string()), num(k.value), k.status.to_string(), num(k.abs_error)]);
    }
    if let Some(kind) = cfg.structural {
        let v = structural_constant(kind, x, &cfg.weights_for(x)?)?;
        rows.push(vec![format!("{kind:?}"), cfg.hash(x, format!("{kind:?}")), num(v), "Exact".into(), "0".into()]);
    }
    Ok(rows)
}

fn norm_row(id: String, alpha: f64, lambda: f64, p: f64, q: f64, gamma: f64, n: &NormResult) -> Vec<String> {
    vec![
        id,
        num(alpha),
        num(lambda),
        num(p),
        num(q),
        num(gamma),
        num(n.value),
        n.status.to_string(),
        n.window.0.to_string(),
        n.window.1.to_string(),
        opt(n.sup_index),
        num(n.tail_bound),
    ]
}

fn norm_rows(cfg: &RunConfig, x: &ExponentSet) -> Result<Vec<Vec<String>>> {
    let w = cfg.weights_for(x)?;
    let nc = &cfg.numeric;
    cfg.profiles
        .iter()
        .enumerate()
        .map(|(i, f)| {
            let lambda = if cfg.norm == NormKind::Herz { 0.0 } else { x.lambda[i] };
            let n = match cfg.norm {
                NormKind::Herz => herz_norm(f, &w.factors[i], x.alpha[i], x.p[i], x.q[i], nc.window, nc.norm_tol)?,
                NormKind::MorreyHerz => {
                    morrey_herz_norm(f, &w.factors[i], x.alpha[i], lambda, x.p[i], x.q[i], nc.window, nc.norm_tol)?
                }
            };
            Ok(norm_row(format!("f{}", i + 1), x.alpha[i], lambda, x.p[i], x.q[i], w.factors[i].degree, &n))
        })
        .collect()
}

fn operator_rows(cfg: &RunConfig) -> Result<Vec<Vec<String>>> {
    let spec = OperatorSpec::new(cfg.kernel.clone().expect("checked"))?;
    let commutator = !cfg.symbols.is_empty();
    cfg.radii
        .par_iter()
        .map(|&r| {
            let res = if commutator {
                apply_commutator(&spec, &cfg.profiles, &cfg.symbols, r, cfg.numeric.quad_tol)?
            } else {
                apply_hardy_cesaro(&spec, &cfg.profiles, r, cfg.numeric.quad_tol)?
            };
            let name = if commutator { "commutator" } else { "hardy_cesaro" };
            Ok(vec![name.to_string(), num(r), num(res.value), num(res.abs_error), res.status.to_string(), res.evaluations.to_string()])
        })
        .collect()
}

fn report_row(r: &VerificationReport, hash: &str) -> Vec<String> {
    vec![r.theorem_id.to_string(), hash.to_string(), num(r.lhs), num(r.rhs), num(r.ratio), r.pass.to_string(), num(r.tolerance)]
}

fn undecided_row(theorem: TheoremId, hash: &str, tol: f64, e: &Error) -> Vec<String> {
    vec![theorem.to_string(), hash.to_string(), "NaN".into(), "NaN".into(), "NaN".into(), format!("inconclusive: {e}"), num(tol)]
}

/// Verification rows; the flag is set when a decided row fails.
fn verify_rows(cfg: &RunConfig, x: &ExponentSet, seed: u64) -> Result<(Vec<Vec<String>>, bool)> {
    let theorem = cfg.theorem.expect("checked");
    let kernel = cfg.kernel.as_ref().expect("checked");
    let tol = cfg.numeric.tol;
    let opts = cfg.numeric.options();
    let hash = cfg.hash(x, theorem.to_string());
    let mut rows = Vec::new();
    let mut failed = false;
    let mut push = |res: Result<VerificationReport>, hash: &str| -> Result<()> {
        match res {
            Ok(r) => {
                failed |= !r.pass;
                rows.push(report_row(&r, hash));
                Ok(())
            }
            Err(e) if is_numeric(&e) => {
                rows.push(undecided_row(theorem, hash, tol, &e));
                Ok(())
            }
            Err(e) => Err(e),
        }
    };
    match theorem {
        TheoremId::T31_sharp => push(verify_mh_sharpness(x, kernel, &cfg.weights_for(x)?, tol, &opts), &hash)?,
        TheoremId::T32_upper | TheoremId::T32_lower => {
            let h = verify_herz(x, kernel, &cfg.weights_for(x)?, &cfg.epsilons, tol, &opts);
            push(h.map(|h| if theorem == TheoremId::T32_upper { h.upper } else { h.lower }), &hash)?;
        }
        TheoremId::T31_upper | TheoremId::T41_bound => {
            if let Some(count) = cfg.family {
                let mut rng = families::rng(seed);
                let results: Vec<_> = (0..count)
                    .map(|j| {
                        if theorem == TheoremId::T31_upper {
                            let (m, regime) = FAMILY_MIX[j % FAMILY_MIX.len()];
                            let c = families::upper_case(m, regime, &mut rng);
                            let hash = params_hash(&(&c.exponents, &c.kernel, &c.profiles));
                            (hash, FamilyCase::Upper(c))
                        } else {
                            let c = families::commutator_case(&mut rng);
                            let hash = params_hash(&(&c.exponents, &c.kernel, &c.profiles, &c.symbols));
                            (hash, FamilyCase::Commutator(c))
                        }
                    })
                    .collect::<Vec<_>>()
                    .into_par_iter()
                    .map(|(hash, case)| (hash, case.run(tol, &opts)))
                    .collect();
                for (hash, res) in results {
                    push(res, &hash)?;
                }
            } else if theorem == TheoremId::T31_upper {
                push(verify_mh_upper(x, kernel, &cfg.profiles, &cfg.weights_for(x)?, tol, &opts), &hash)?;
            } else {
                push(verify_commutator(x, kernel, &cfg.symbols, &cfg.profiles, &cfg.weights_for(x)?, &opts), &hash)?;
            }
        }
    }
    Ok((rows, failed))
}

const FAMILY_MIX: [(usize, families::Regime); 3] =
    [(1, families::Regime::Banach), (2, families::Regime::Banach), (2, families::Regime::Quasi)];

enum FamilyCase {
    Upper(families::UpperCase),
    Commutator(families::CommutatorCase),
}

impl FamilyCase {
    fn run(&self, tol: f64, opts: &NumericOptions) -> Result<VerificationReport> {
        match self {
            FamilyCase::Upper(c) => verify_mh_upper(&c.exponents, &c.kernel, &c.profiles, &c.weights, tol, opts),
            FamilyCase::Commutator(c) => verify_commutator(&c.exponents, &c.kernel, &c.symbols, &c.profiles, &c.weights, opts),
        }
    }
}

/// Expands the values of a sweep.
pub fn sweep_values(sweep: &SweepSpec) -> Result<Vec<f64>> {
    let values = match (&sweep.values, &sweep.range) {
        (Some(v), None) => v.clone(),
        (None, Some(r)) => {
            if r.count == 0 || r.count > MAX_SWEEP_POINTS {
                return Err(Error::Config(format!("sweep range count {} must lie in 1..={MAX_SWEEP_POINTS}", r.count)));
            }
            if r.geometric && !(r.start > 0.0 && r.stop > 0.0) {
                return Err(Error::Config("geometric sweep range needs positive endpoints".into()));
            }
            (0..r.count)
                .map(|j| {
                    let w = if r.count == 1 { 0.0 } else { j as f64 / (r.count - 1) as f64 };
                    if r.geometric {
                        (r.start.ln() + w * (r.stop.ln() - r.start.ln())).exp()
                    } else {
                        r.start + w * (r.stop - r.start)
                    }
                })
                .collect()
        }
        _ => return Err(Error::Config("sweep needs exactly one of `values` and `range`".into())),
    };
    if values.is_empty() {
        return Err(Error::Config("sweep range is empty".into()));
    }
    if values.len() > MAX_SWEEP_POINTS {
        return Err(Error::Config(format!("sweep has {} points; the limit is {MAX_SWEEP_POINTS}", values.len())));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Config("sweep values must be finite".into()));
    }
    Ok(values)
}

/// `x` with `parameter` (e.g. `p`, `alpha[1]`) set to `value`.
fn with_parameter(x: &ExponentSet, parameter: &str, value: f64) -> Result<ExponentSet> {
    let (name, index) = match parameter.split_once('[') {
        Some((name, rest)) => {
            let idx = rest
                .strip_suffix(']')
                .and_then(|s| s.parse::<usize>().ok())
                .ok_or_else(|| Error::Config(format!("malformed sweep parameter `{parameter}`")))?;
            (name, Some(idx))
        }
        None => (parameter, None),
    };
    let mut y = x.clone();
    let field: &mut Vec<f64> = match name {
        "alpha" => &mut y.alpha,
        "p" => &mut y.p,
        "q" => &mut y.q,
        "lambda" => &mut y.lambda,
        "gamma" => &mut y.gamma,
        "r" => y.r.get_or_insert_with(|| vec![f64::INFINITY; x.m]),
        "beta" => y.beta.get_or_insert_with(|| vec![0.5; x.m]),
        _ => return Err(Error::Config(format!("unknown sweep parameter `{parameter}`"))),
    };
    match index {
        Some(i) if i < field.len() => field[i] = value,
        Some(i) => return Err(Error::Config(format!("sweep index {i} out of range for m = {}", x.m))),
        None => field.iter_mut().for_each(|v| *v = value),
    }
    y.check().map_err(|e| Error::Config(format!("sweep point {parameter} = {value}: {e}")))?;
    Ok(y)
}

fn sweep_rows(cfg: &RunConfig, seed: u64) -> Result<Report> {
    let sweep = cfg.sweep.as_ref().expect("checked");
    let values = sweep_values(sweep)?;
    let mut header = vec!["parameter".to_string(), "value".to_string()];
    header.extend(header_for(sweep.job).iter().map(|s| s.to_string()));

    let results: Vec<Result<(Vec<Vec<String>>, bool)>> = values
        .par_iter()
        .map(|&v| {
            if sweep.parameter == "epsilon" {
                return epsilon_row(cfg, v).map(|(row, failed)| (vec![row], failed));
            }
            let x = with_parameter(&cfg.exponents, &sweep.parameter, v)?;
            match sweep.job {
                JobKind::Constant => constant_rows(cfg, &x).map(|r| (r, false)),
                JobKind::Norm => norm_rows(cfg, &x).map(|r| (r, false)),
                JobKind::Verify => verify_rows(cfg, &x, seed),
                _ => unreachable!("checked"),
            }
        })
        .collect();
    let mut report = Report { header, ..Report::default() };
    for (v, res) in values.iter().zip(results) {
        let (rows, failed) = res?;
        report.failed |= failed;
        for row in rows {
            let mut full = vec![sweep.parameter.clone(), num(*v)];
            full.extend(row);
            report.rows.push(full);
        }
    }
    Ok(report)
}

/// Measured Herz-extremal ratio at one `ε`, compared with `E · A2`.
fn epsilon_row(cfg: &RunConfig, eps: f64) -> Result<(Vec<String>, bool)> {
    let x = &cfg.exponents;
    let kernel = cfg.kernel.as_ref().ok_or_else(|| Error::Config("epsilon sweep needs a kernel".into()))?;
    let weights = cfg.weights_for(x)?;
    let hash = cfg.hash(x, format!("epsilon={eps}"));
    let a2 = kernel_constant(ConstantKind::A2, x, kernel, cfg.numeric.quad_tol)?;
    let target = structural_constant(StructuralKind::ELower, x, &weights)? * a2.value;
    match herz_ratio(x, kernel, &weights, eps, &cfg.numeric.options(), &mut Vec::new()) {
        Ok(measured) => {
            let ratio = measured / target;
            Ok((vec!["T32_lower".into(), hash, num(measured), num(target), num(ratio), "true".into(), num(cfg.numeric.tol)], false))
        }
        Err(e) if is_numeric(&e) => Ok((undecided_row(TheoremId::T32_lower, &hash, cfg.numeric.tol, &e), false)),
        Err(e) => Err(e),
    }
}

/// Runs a parsed config and returns its report.
pub fn run_config(cfg: &RunConfig, seed: u64) -> Result<Report> {
    let x = &cfg.exponents;
    if cfg.job == JobKind::Sweep {
        return sweep_rows(cfg, seed);
    }
    let mut report = Report::new(header_for(cfg.job));
    match cfg.job {
        JobKind::Constant => report.rows = constant_rows(cfg, x)?,
        JobKind::Norm => report.rows = norm_rows(cfg, x)?,
        JobKind::OperatorEval => report.rows = operator_rows(cfg)?,
        JobKind::Verify => {
            let (rows, failed) = verify_rows(cfg, x, seed)?;
            report.rows = rows;
            report.failed = failed;
        }
        JobKind::Sweep => unreachable!(),
    }
    Ok(report)
}

/// Applies command-line overrides to a config.
pub fn apply_overrides(cfg: &mut RunConfig, cli: &Cli) -> Result<()> {
    if let Some(tol) = cli.tol {
        if !(tol > 0.0) {
            return Err(Error::Config(format!("--tol {tol} must be positive")));
        }
        cfg.numeric.tol = tol;
    }
    if let Some(w) = cli.window {
        if w < 0 {
            return Err(Error::Config(format!("--window {w} must be nonnegative")));
        }
        cfg.numeric.window = (-w, w);
    }
    if let Some(out) = &cli.out {
        cfg.output = Some(out.clone());
    }
    Ok(())
}

/// Full command-line entry point; returns the process exit code.
pub fn main_with(cli: Cli) -> i32 {
    if let Some(jobs) = cli.jobs {
        if jobs == 0 || rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global().is_err() {
            eprintln!("error: --jobs must be a positive thread count");
            return 2;
        }
    }
    let cfg = match RunConfig::load(&cli.config).and_then(|mut c| apply_overrides(&mut c, &cli).map(|_| c)) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{e}");
            return 2;
        }
    };
    let report = match run_config(&cfg, cli.seed) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let written = match &cfg.output {
        Some(path) => std::fs::File::create(path).map_err(Error::from).and_then(|f| report.write_csv(std::io::BufWriter::new(f))),
        None => report.write_csv(std::io::stdout().lock()),
    };
    if let Err(e) = written {
        eprintln!("error writing report: {e}");
        return 2;
    }
    i32::from(report.failed)
}
