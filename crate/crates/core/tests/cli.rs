use std::path::Path;
use std::process::Command;

const HARDY: &str = r#""kernel": { "n": 1, "psi": { "kind": "power_beta", "c": 0.0, "e": 0.0 }, "curves": [{ "kind": "power", "b": 1.0 }] }"#;

fn exponents(p: f64, q: f64, lambda: f64) -> String {
    format!(r#""exponents": {{ "m": 1, "n": 1, "d": 1, "alpha": [0.0], "p": [{p:?}], "q": [{q:?}], "lambda": [{lambda:?}], "gamma": [0.0] }}"#)
}

fn run(dir: &Path, config: &str, extra: &[&str]) -> (i32, String) {
    let cfg = dir.join("run.json");
    let out = dir.join("out.csv");
    std::fs::write(&cfg, config).unwrap();
    let _ = std::fs::remove_file(&out);
    let status = Command::new(env!("CARGO_BIN_EXE_hcmh"))
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .args(extra)
        .status()
        .unwrap();
    (status.code().unwrap(), std::fs::read_to_string(&out).unwrap_or_default())
}

#[test]
fn xiao_constant_row() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = format!(r#"{{ "job": "constant", "constant": "Xiao", {}, {HARDY} }}"#, exponents(2.0, 2.0, 0.0));
    let (code, csv) = run(dir.path(), &cfg, &[]);
    assert_eq!(code, 0);
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("kind,parameters_hash,value,status,abs_error"));
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!((row[0], row[2], row[3]), ("Xiao", "2", "Converged"));
}

#[test]
fn canonical_sharpness_passes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = format!(r#"{{ "job": "verify", "theorem": "T31_sharp", {}, {HARDY} }}"#, exponents(1.0, 1.0, 1.0));
    let (code, csv) = run(dir.path(), &cfg, &["--tol", "1e-4"]);
    assert_eq!(code, 0, "{csv}");
    let row: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[0], "T31_sharp");
    assert_eq!(row[5], "true");
}

#[test]
fn failing_check_exits_one() {
    // measuring the output against a much heavier weight than the product
    // weight breaks the bound
    let dir = tempfile::tempdir().unwrap();
    let cfg = format!(
        r#"{{ "job": "verify", "theorem": "T31_upper",
             "profiles": [{{ "kind": "truncated_power_law", "a": -0.3, "c": 2.0, "R": 0.5 }}],
             "target_weight": {{ "dim": 1, "degree": 0.0, "sphere_mass": 2e6, "radial_coefficient": 1e6 }}, {}, {HARDY} }}"#,
        exponents(1.0, 1.0, 1.0)
    );
    let (code, csv) = run(dir.path(), &cfg, &[]);
    assert_eq!(code, 1, "{csv}");
    assert!(csv.lines().nth(1).unwrap().contains(",false,"));
}

#[test]
fn config_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad_q = format!(r#"{{ "job": "constant", "constant": "Xiao", {}, {HARDY} }}"#, exponents(2.0, 0.0, 0.0));
    assert_eq!(run(dir.path(), &bad_q, &[]).0, 2);
    let empty = format!(
        r#"{{ "job": "sweep", "sweep": {{ "parameter": "p", "job": "constant", "values": [] }}, "constant": "Xiao", {}, {HARDY} }}"#,
        exponents(2.0, 2.0, 0.0)
    );
    assert_eq!(run(dir.path(), &empty, &[]).0, 2);
    assert_eq!(run(dir.path(), "{ not json", &[]).0, 2);
    let missing = format!(r#"{{ "job": "norm", {} }}"#, exponents(2.0, 2.0, 0.0));
    assert_eq!(run(dir.path(), &missing, &[]).0, 2);
}

#[test]
fn epsilon_sweep_is_ordered_and_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = format!(
        r#"{{ "job": "sweep", "theorem": "T32_lower",
             "sweep": {{ "parameter": "epsilon", "job": "verify", "values": [0.2, 0.1, 0.05, 0.02, 0.01] }},
             "numeric": {{ "window": [-8, 120] }}, {}, {HARDY} }}"#,
        exponents(2.0, 2.0, 0.0)
    );
    let (code, first) = run(dir.path(), &cfg, &[]);
    assert_eq!(code, 0);
    let (_, second) = run(dir.path(), &cfg, &["--jobs", "1"]);
    assert_eq!(first, second);
    let ratios: Vec<f64> = first.lines().skip(1).map(|l| l.split(',').nth(4).unwrap().parse().unwrap()).collect();
    assert_eq!(ratios.len(), 5);
    assert!(ratios.windows(2).all(|w| w[1] >= w[0]), "{ratios:?}");
}

#[test]
fn operator_eval_and_norm_jobs() {
    let dir = tempfile::tempdir().unwrap();
    let profiles = r#""profiles": [{ "kind": "power_law", "a": -0.5, "c": 1.0 }]"#;
    let cfg = format!(r#"{{ "job": "operator_eval", "radii": [1.0, 4.0], {profiles}, {}, {HARDY} }}"#, exponents(2.0, 2.0, 0.0));
    let (code, csv) = run(dir.path(), &cfg, &[]);
    assert_eq!(code, 0);
    let values: Vec<f64> = csv.lines().skip(1).map(|l| l.split(',').nth(2).unwrap().parse().unwrap()).collect();
    assert!((values[0] - 2.0).abs() < 1e-10 && (values[1] - 1.0).abs() < 1e-10, "{values:?}");

    // the extremal exponent for λ = 3/4, q = 2, d = 1 is 1/4
    let extremal = r#""profiles": [{ "kind": "power_law", "a": 0.25 }]"#;
    let cfg = format!(r#"{{ "job": "norm", {extremal}, {}, {HARDY} }}"#, exponents(2.0, 2.0, 0.75));
    let (code, csv) = run(dir.path(), &cfg, &["--window", "40"]);
    assert_eq!(code, 0);
    let row: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
    assert_eq!((row[0], row[7], row[8], row[9]), ("f1", "Finite", "-40", "40"));
}
