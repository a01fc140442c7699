//! Acceptance criteria, run in order with one PASS/FAIL line each.
//!
//! Built without the libtest harness so the lines are always printed and the
//! timings are not skewed by other tests competing for cores.

use std::time::{Duration, Instant};

use rand::Rng;

use hcmh::cli::{run_config, Report, RunConfig};
use hcmh::constants::{kernel_constant, ConstantKind};
use hcmh::families::{self, Regime};
use hcmh::norms::{morrey_herz_norm, power_norm_closed, shell_bound_violations, NormStatus};
use hcmh::operators::{commutator_to_profile, OperatorSpec, SymbolSpec};
use hcmh::parameters::ExponentSet;
use hcmh::quadrature::{beta_closed_form, kernel_power_integral_with, IntegralStatus, KernelSpec, Method};
use hcmh::radial::{extremal_morrey_herz, RadialProfile};
use hcmh::verification::{verify_commutator, verify_herz, verify_mh_sharpness, verify_mh_upper, NumericOptions};
use hcmh::weights::{HomogeneousWeight, WeightSet};

struct Outcome {
    pass: bool,
    summary: String,
}

fn criterion(id: usize, name: &str, limit: Duration, run: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let out = run();
    let elapsed = start.elapsed();
    let in_time = elapsed <= limit;
    let pass = out.pass && in_time;
    println!(
        "[{}] criterion {id} {name}: {} ({:.2?} of {:?}{})",
        if pass { "PASS" } else { "FAIL" },
        out.summary,
        elapsed,
        limit,
        if in_time { "" } else { ", over time" }
    );
    pass
}

/// Profiles whose Morrey-Herz norm is finite must satisfy the shell bound.
fn shell_bound_holds(f: &RadialProfile, w: &HomogeneousWeight, alpha: f64, lambda: f64, p: f64, q: f64, window: (i32, i32)) -> Option<bool> {
    let n = morrey_herz_norm(f, w, alpha, lambda, p, q, window, 1e-8).ok()?;
    if n.status != NormStatus::Finite || n.value == 0.0 {
        return None;
    }
    Some(shell_bound_violations(f, w, alpha, lambda, q, window, n.value, 1e-9).ok()?.is_empty())
}

#[derive(Default)]
struct ShellTally {
    checked: usize,
    violated: usize,
}

impl ShellTally {
    fn record(&mut self, outcome: Option<bool>) {
        if let Some(ok) = outcome {
            self.checked += 1;
            self.violated += usize::from(!ok);
        }
    }
}

fn norm_oracle(tally: &mut ShellTally) -> Outcome {
    let mut rng = families::rng(1);
    let window = (-48, 48);
    let cases = 60;
    let mut worst: f64 = 0.0;
    for _ in 0..cases {
        let d = rng.gen_range(1..=3usize);
        let alpha = rng.gen_range(-1.0..1.0);
        let lambda = f64::max(0.0, alpha) + rng.gen_range(0.05..1.5);
        let x = ExponentSet::single(d, alpha, rng.gen_range(1.0..4.0), rng.gen_range(1.0..4.0), lambda, rng.gen_range(-0.9 * d as f64..2.0));
        let w = HomogeneousWeight::power(d, x.gamma[0], 1.0).unwrap();
        let f = extremal_morrey_herz(&x, 0).unwrap();
        let a = f.power_piece().unwrap().exponent;
        let numeric = morrey_herz_norm(&f, &w, alpha, lambda, x.p[0], x.q[0], window, 1e-10).unwrap();
        let closed = power_norm_closed(a, &w, alpha, lambda, x.p[0], x.q[0]).unwrap();
        worst = worst.max((numeric.value / closed - 1.0).abs());
        tally.record(shell_bound_holds(&f, &w, alpha, lambda, x.p[0], x.q[0], window));
    }
    Outcome { pass: worst <= 1e-6, summary: format!("{cases} cases, worst relative error {worst:.2e} (tol 1e-6)") }
}

fn sharpness() -> Outcome {
    let opts = NumericOptions::default();
    let canonical = ExponentSet::single(1, 0.0, 1.0, 1.0, 1.0, 0.0);
    let symmetric = ExponentSet::symmetric(2, 1, 0.0, 2.0, 2.0, 0.5, 0.0);
    let mut lines = Vec::new();
    let mut pass = true;
    for (label, x) in [("m=1", canonical), ("m=2", symmetric)] {
        let w = WeightSet::power_weights(&x).unwrap();
        match verify_mh_sharpness(&x, &KernelSpec::hardy(x.m), &w, 1e-4, &opts) {
            Ok(r) => {
                pass &= r.pass && (r.ratio - 1.0).abs() <= 1e-4;
                lines.push(format!("{label} |ratio-1| = {:.2e}", (r.ratio - 1.0).abs()));
            }
            Err(e) => {
                pass = false;
                lines.push(format!("{label} error: {e}"));
            }
        }
    }
    Outcome { pass, summary: lines.join(", ") }
}

fn hardy_limit() -> Outcome {
    let x = ExponentSet::single(1, 0.0, 2.0, 2.0, 0.0, 0.0);
    let kernel = KernelSpec::hardy(1);
    let a2 = kernel_constant(ConstantKind::A2, &x, &kernel, 1e-12).unwrap();
    let eps = [0.2, 0.1, 0.05, 0.02, 0.01];
    let w = WeightSet::power_weights(&x).unwrap();
    let h = match verify_herz(&x, &kernel, &w, &eps, 1e-6, &NumericOptions::herz_sweep()) {
        Ok(h) => h,
        Err(e) => return Outcome { pass: false, summary: format!("error: {e}") },
    };
    let ratios: Vec<f64> = h.sweep.iter().map(|&(_, r)| r).collect();
    let nondecreasing = ratios.windows(2).all(|p| p[1] >= p[0]);
    let last = *ratios.last().unwrap();
    let pass = (a2.value - 2.0).abs() <= 1e-10 && last >= 1.9 && nondecreasing && h.upper.pass;
    let shown: Vec<String> = ratios.iter().map(|r| format!("{r:.4}")).collect();
    Outcome { pass, summary: format!("A2 = {}, ratios [{}], upper bound {}", a2.value, shown.join(", "), h.upper.pass) }
}

fn counterexample() -> Outcome {
    // ψ(t) = t/(1-t) = t^1 (1-t)^{-1}; weight exponent 1.5 makes the damped exponent 1
    let kernel = KernelSpec::power_beta(1.0, -1.0, vec![1.0]);
    let x = ExponentSet::single(1, 0.0, 2.0, 2.0, 0.0, 1.5);
    let damped = kernel_constant(ConstantKind::CommutatorCor, &x, &kernel, 1e-12).unwrap();
    let undamped = kernel_constant(ConstantKind::CommutatorCorUndamped, &x, &kernel, 1e-12).unwrap();
    let pass = damped.status == IntegralStatus::Converged
        && (damped.value - 1.0).abs() <= 1e-6
        && undamped.status == IntegralStatus::Divergent;
    Outcome { pass, summary: format!("damped {} ({}), undamped {}", damped.value, damped.status, undamped.status) }
}

fn upper_suite(tally: &mut ShellTally) -> Outcome {
    let mut rng = families::rng(5);
    let opts = NumericOptions::default();
    let mix = [(1, Regime::Banach), (2, Regime::Banach), (2, Regime::Quasi)];
    let (mut worst, mut failures, mut quasi) = (0.0f64, Vec::new(), 0);
    for j in 0..100 {
        let (m, regime) = mix[j % mix.len()];
        quasi += usize::from(regime == Regime::Quasi);
        let c = families::upper_case(m, regime, &mut rng);
        match verify_mh_upper(&c.exponents, &c.kernel, &c.profiles, &c.weights, 1e-6, &opts) {
            Ok(r) if r.pass && r.ratio <= 1.0 + 1e-6 => worst = worst.max(r.ratio),
            Ok(r) => failures.push(format!("case {j}: ratio {}", r.ratio)),
            Err(e) => failures.push(format!("case {j}: {e}")),
        }
        let x = &c.exponents;
        for (i, f) in c.profiles.iter().enumerate() {
            tally.record(shell_bound_holds(f, &c.weights.factors[i], x.alpha[i], x.lambda[i], x.p[i], x.q[i], opts.window));
        }
    }
    Outcome {
        pass: failures.is_empty(),
        summary: format!("100 cases ({quasi} with p < 1), max ratio {worst:.4}, failures {failures:?}"),
    }
}

/// Sup ratio of the seed-11 commutator family, recorded when the suite was
/// first accepted.
const COMMUTATOR_BASELINE: f64 = 0.7248138095470047;

fn commutator_suite(tally: &mut ShellTally) -> Outcome {
    let spec = OperatorSpec::hardy(1);
    let b = [SymbolSpec::power(0.5, 1.0).unwrap()];
    let (coefficient, closed_ok) = match commutator_to_profile(&spec, &[RadialProfile::one()], &b, &[], 1e-12) {
        Ok(RadialProfile::PowerLaw { exponent, coefficient }) => {
            (coefficient, exponent == 0.5 && (coefficient - 1.0 / 3.0).abs() <= 1e-10)
        }
        _ => (f64::NAN, false),
    };

    let mut rng = families::rng(11);
    let base = NumericOptions::default();
    let doubled = NumericOptions { window: (2 * base.window.0, 2 * base.window.1), ..base };
    let (mut sup, mut sup_doubled, mut errors) = (0.0f64, 0.0f64, Vec::new());
    for j in 0..50 {
        let c = families::commutator_case(&mut rng);
        let run = |opts: &NumericOptions| verify_commutator(&c.exponents, &c.kernel, &c.symbols, &c.profiles, &c.weights, opts);
        match (run(&base), run(&doubled)) {
            (Ok(a), Ok(b)) if a.ratio.is_finite() && b.ratio.is_finite() => {
                sup = sup.max(a.ratio);
                sup_doubled = sup_doubled.max(b.ratio);
            }
            (a, b) => errors.push(format!("case {j}: {:?} / {:?}", a.map(|r| r.ratio), b.map(|r| r.ratio))),
        }
        let x = &c.exponents;
        tally.record(shell_bound_holds(&c.profiles[0], &c.weights.factors[0], x.alpha[0], x.lambda[0], x.p[0], x.q[0], base.window));
    }
    let stable = sup > 0.0 && sup.is_finite() && (sup_doubled / sup - 1.0).abs() <= 0.05;
    let drift = (sup / COMMUTATOR_BASELINE - 1.0).abs();
    Outcome {
        pass: closed_ok && stable && errors.is_empty() && drift <= 1e-6,
        summary: format!(
            "coefficient {} (1/3 to {:.1e}), sup ratio {sup} vs {sup_doubled} on the doubled window, baseline drift {drift:.1e}, errors {errors:?}",
            coefficient,
            (coefficient - 1.0 / 3.0).abs()
        ),
    }
}

const SWEEP_CONFIG: &str = r#"{
  "job": "sweep",
  "sweep": { "parameter": "epsilon", "job": "verify", "values": [0.2, 0.1, 0.05, 0.02, 0.01] },
  "theorem": "T32_lower",
  "exponents": { "m": 1, "n": 1, "d": 1, "alpha": [0.0], "p": [2.0], "q": [2.0], "lambda": [0.0], "gamma": [0.0] },
  "kernel": { "n": 1, "psi": { "kind": "power_beta", "c": 0.0, "e": 0.0 }, "curves": [{ "kind": "power", "b": 1.0 }] },
  "numeric": { "window": [-8, 120] }
}"#;

fn csv_bytes(report: &Report) -> Vec<u8> {
    let mut out = Vec::new();
    report.write_csv(&mut out).unwrap();
    out
}

fn consistency(tally: &ShellTally) -> Outcome {
    let mut rng = families::rng(17);
    let (mut worst, mut bad_status) = (0.0f64, 0);
    let cases = 200;
    for _ in 0..cases {
        let m = rng.gen_range(1..=3usize);
        let c = rng.gen_range(-0.8..2.0);
        let e = rng.gen_range(-0.8..2.0);
        let b: Vec<f64> = (0..m).map(|_| rng.gen_range(0.3..3.0)).collect();
        let exps: Vec<f64> = (0..m).map(|_| rng.gen_range(-0.2..1.5)).collect();
        let total: f64 = c + b.iter().zip(&exps).map(|(b, x)| b * x).sum::<f64>();
        if total <= -0.9 {
            continue;
        }
        let kernel = KernelSpec::power_beta(c, e, b);
        let numeric = kernel_power_integral_with(&kernel, &exps, &[], 1e-10, Method::Numeric).unwrap();
        let oracle = beta_closed_form(total, e);
        if numeric.status != IntegralStatus::Converged {
            bad_status += 1;
            continue;
        }
        worst = worst.max((numeric.value / oracle.value - 1.0).abs());
    }
    let quadrature_ok = worst <= 1e-8 && bad_status == 0;

    let cfg = RunConfig::from_json(SWEEP_CONFIG).unwrap();
    let first = csv_bytes(&run_config(&cfg, 0).unwrap());
    let second = csv_bytes(&run_config(&cfg, 0).unwrap());
    let reproducible = first == second && !first.is_empty();

    let shell_ok = tally.violated == 0 && tally.checked > 0;
    Outcome {
        pass: quadrature_ok && reproducible && shell_ok,
        summary: format!(
            "shell bound {} violations over {} profiles; quadrature vs Beta worst {worst:.2e} ({bad_status} unconverged); CSV reproducible {reproducible}",
            tally.violated, tally.checked
        ),
    }
}

fn main() {
    let mut shells = ShellTally::default();
    let results = [
        criterion(1, "extremal norm oracle", Duration::from_secs(30), || norm_oracle(&mut shells)),
        criterion(2, "sharpness equality", Duration::from_secs(10), sharpness),
        criterion(3, "Hardy limit", Duration::from_secs(20), hardy_limit),
        criterion(4, "damped counterexample", Duration::from_secs(5), counterexample),
        criterion(5, "upper-bound suite", Duration::from_secs(180), || upper_suite(&mut shells)),
        criterion(6, "commutator boundedness", Duration::from_secs(120), || commutator_suite(&mut shells)),
        criterion(7, "internal consistency", Duration::from_secs(60), || consistency(&shells)),
    ];
    let failed: Vec<usize> = results.iter().enumerate().filter(|(_, ok)| !**ok).map(|(i, _)| i + 1).collect();
    if failed.is_empty() {
        println!("acceptance: all {} criteria pass", results.len());
    } else {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}
