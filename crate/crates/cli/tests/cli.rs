use std::path::PathBuf;
use std::process::{Command, Output};

fn lcmpsi(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lcmpsi")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Value of `column` in the first data row of CSV output.
fn cell(o: &Output, column: &str) -> String {
    let text = stdout(o);
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    row[header.iter().position(|h| *h == column).unwrap()].to_string()
}

fn num(o: &Output, column: &str) -> f64 {
    cell(o, column).parse().unwrap()
}

fn sets_file() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../sets/one_to_ten.txt")
}

#[test]
fn expect_two_elements() {
    let o = lcmpsi(&["expect", "--n", "2", "--delta", "0.5"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().next().unwrap(), "n,delta_or_k,expectation,second_moment,variance,method");
    assert!((num(&o, "expectation") - 0.346574).abs() < 1e-6);
    let g = lcmpsi(&["expect", "--n", "2", "--delta", "0.5", "--method", "grouped"]);
    assert_eq!(cell(&g, "method"), "grouped");
    assert_eq!(cell(&o, "expectation"), cell(&g, "expectation"));
}

#[test]
fn meank_four_two() {
    let o = lcmpsi(&["meank", "--n", "4", "--k", "2", "--second-moment"]);
    assert!(o.status.success());
    assert!((num(&o, "expectation") - 1.473503).abs() < 1e-6);
    assert!((num(&o, "second_moment") - 2.486032).abs() < 1e-6);
}

#[test]
fn psi_from_file() {
    let f = sets_file();
    let o = lcmpsi(&["psi", "--n", "10", "--input", f.to_str().unwrap(), "--exact-lcm"]);
    assert!(o.status.success());
    assert!((num(&o, "psi") - 7.832014).abs() < 1e-6);
    assert_eq!(cell(&o, "lcm"), "2520");
    assert_eq!(cell(&o, "size"), "10");
}

#[test]
fn json_carries_schema_version() {
    let o = lcmpsi(&["--json", "variance", "--n", "100", "--delta", "0.3"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["schema_version"], 1);
    for key in ["n", "delta_or_k", "expectation", "second_moment", "variance", "method"] {
        assert!(v.get(key).is_some(), "{key}");
    }
    assert_eq!(v["method"], "pairwise");
}

#[test]
fn nine_significant_digits() {
    let o = lcmpsi(&["sieve", "--limit", "1000000", "--stats"]);
    assert_eq!(stdout(&o), "limit,pi,psi\n1000000,78498,999586.597\n");
}

#[test]
fn sampling_is_deterministic_across_threads() {
    let dir = std::env::temp_dir();
    let a = dir.join(format!("lcmpsi-psis-a-{}", std::process::id()));
    let base = ["sample", "--model", "bernoulli", "--n", "5000", "--delta", "0.02", "--trials", "40", "--seed", "7"];
    let mut one = base.to_vec();
    one.extend(["--threads", "1", "--dump-psis", a.to_str().unwrap()]);
    let mut four = base.to_vec();
    four.extend(["--threads", "4"]);
    let (x, y) = (lcmpsi(&one), lcmpsi(&four));
    assert!(x.status.success());
    assert_eq!(stdout(&x), stdout(&y));
    let dumped = std::fs::read_to_string(&a).unwrap();
    assert_eq!(dumped.lines().count(), 40);
    let _ = std::fs::remove_file(a);

    let other =
        lcmpsi(&["sample", "--model", "bernoulli", "--n", "5000", "--delta", "0.02", "--trials", "40", "--seed", "8"]);
    assert_ne!(stdout(&x), stdout(&other));
}

#[test]
fn uniform_sample_sizes() {
    let o = lcmpsi(&["sample", "--model", "uniform-k", "--n", "1000", "--k", "25", "--trials", "10"]);
    assert!(o.status.success());
    assert_eq!(num(&o, "mean_size"), 25.0);
}

#[test]
fn oracle_and_extremal() {
    let o = lcmpsi(&["oracle", "--n", "10", "--k", "3", "--extremal"]);
    assert_eq!(cell(&o, "argmax"), "7 9 10");
    assert!((num(&o, "max_psi") - 630f64.ln()).abs() < 1e-8);
    let o = lcmpsi(&["oracle", "--n", "2", "--delta", "0.5"]);
    assert!((num(&o, "expectation") - 0.346574).abs() < 1e-6);
    assert_eq!(cell(&o, "method"), "oracle");

    let dir = std::env::temp_dir().join(format!("lcmpsi-set-{}", std::process::id()));
    let o = lcmpsi(&["extremal", "--n", "100", "--k", "10", "--kind", "primes", "--output", dir.to_str().unwrap()]);
    assert!(o.status.success());
    let elements: Vec<u64> = std::fs::read_to_string(&dir).unwrap().lines().map(|l| l.parse().unwrap()).collect();
    assert_eq!(elements, vec![53, 59, 61, 67, 71, 73, 79, 83, 89, 97]);
    let _ = std::fs::remove_file(dir);
}

#[test]
fn poly_rows_and_warning() {
    let o = lcmpsi(&["poly", "--coeffs", "1,0,1", "--n", "10"]);
    assert!((num(&o, "psi") - 10f64.ln()).abs() < 1e-8);
    assert_eq!(cell(&o, "set_size"), "4");
    let o = lcmpsi(&["poly", "--coeffs", "-1,0,1", "--n", "10", "--predictor", "quadratic"]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("warning"));
    let o = lcmpsi(&["poly", "--coeffs", "-1,0,1", "--n", "1000000", "--predict"]);
    assert_eq!(cell(&o, "predictor_name"), "reducible-x2m1");
    assert_eq!(num(&o, "predicted"), 1000.0);
}

#[test]
fn predict_row() {
    let o = lcmpsi(&["predict", "--n", "1000000", "--theta", "0.5", "--c", "1"]);
    assert!((num(&o, "predict_mean") - 6907.76).abs() < 0.01);
    assert_eq!(cell(&o, "k"), "1000");
}

#[test]
fn suite_subset_passes() {
    let o = lcmpsi(&["suite", "--only", "1,3,4"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().filter(|l| l.contains("PASS")).count(), 3);
}

#[test]
fn exit_codes() {
    assert_eq!(lcmpsi(&["expect", "--n", "2", "--delta", "1.5"]).status.code(), Some(2));
    assert_eq!(lcmpsi(&["bogus"]).status.code(), Some(2));
    assert_eq!(lcmpsi(&["meank", "--n", "4"]).status.code(), Some(2));
    let capped = lcmpsi(&["variance", "--n", "40000", "--delta", "0.1"]);
    assert_eq!(capped.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&capped.stderr).contains("--pairwise-cap"));
    assert!(lcmpsi(&["--pairwise-cap", "50000", "variance", "--n", "40000", "--delta", "0.001"]).status.success());
    let big = lcmpsi(&["--limit", "200000000", "sieve", "--stats"]);
    assert_eq!(big.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&big.stderr).contains("--limit-cap"));
    assert_eq!(lcmpsi(&["--limit", "10", "expect", "--n", "100", "--delta", "0.5"]).status.code(), Some(3));
    let lcm =
        lcmpsi(&["--lcm-digit-cap", "2", "psi", "--n", "10", "--input", sets_file().to_str().unwrap(), "--exact-lcm"]);
    assert_eq!(lcm.status.code(), Some(3));
}
