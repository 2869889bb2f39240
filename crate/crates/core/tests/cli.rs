use std::fs;
use std::path::Path;

use boussfrac::entropy::Verdict;
use boussfrac::io::{exit_code, run, RunReport, SolverConfig, EXIT_FAIL, EXIT_OK, EXIT_USAGE};
use proptest::prelude::*;

fn cli(dir: &Path, args: &[&str]) -> i32 {
    let out = dir.to_str().unwrap().to_string();
    let mut argv = vec!["boussfrac".to_string()];
    argv.extend(args.iter().map(|s| s.to_string()));
    argv.push("--out".into());
    argv.push(out);
    run(argv)
}

fn report(dir: &Path, stem: &str) -> RunReport {
    RunReport::from_json(&fs::read_to_string(dir.join(format!("{stem}.json"))).unwrap()).unwrap()
}

#[test]
fn kernel_subcommand() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(cli(d.path(), &["kernel", "--lambda", "2", "--eps", "0.1", "--t", "1"]), EXIT_OK);
    let r = report(d.path(), "kernel");
    assert!((r.info["l1_norm"] - 1.0).abs() <= 1e-6);
    assert_eq!(r.schema_version, 1);
    let csv = fs::read_to_string(d.path().join("kernel.csv")).unwrap();
    assert!(csv.starts_with("x,K,K_x\r\n"));
}

#[test]
fn simulate_zero_data() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(cli(d.path(), &["simulate", "--data", "zero", "--t-final", "0.5"]), EXIT_OK);
    let r = report(d.path(), "simulate");
    assert!(r.pass);
    let t = r.columns.iter().position(|c| c == "t").unwrap();
    for row in &r.rows {
        for (j, v) in row.iter().enumerate() {
            if j != t && r.columns[j] != "min_w" {
                assert_eq!(*v, 0.0, "{}", r.columns[j]);
            }
        }
    }
}

#[test]
fn verify_estimates_exit_zero() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(cli(d.path(), &["verify-estimates", "--trials", "100", "--seed", "7"]), EXIT_OK);
    assert!(report(d.path(), "verify-estimates").pass);
}

#[test]
fn usage_errors_exit_one() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(cli(d.path(), &["frobnicate"]), EXIT_USAGE);
    assert_eq!(cli(d.path(), &["simulate", "--no-such-flag"]), EXIT_USAGE);
    assert_eq!(cli(d.path(), &["simulate", "--lambda", "3"]), EXIT_USAGE);
    assert_eq!(cli(d.path(), &["simulate", "--set", "bogus=1"]), EXIT_USAGE);
    assert_eq!(run(["boussfrac", "--help"]), EXIT_OK);
}

#[test]
fn unwritable_output_exits_one() {
    let d = tempfile::tempdir().unwrap();
    let file = d.path().join("occupied");
    fs::write(&file, "x").unwrap();
    assert_eq!(cli(&file, &["kernel", "--lambda", "1", "--eps", "0.1"]), EXIT_USAGE);
}

#[test]
fn failing_verdict_exits_two() {
    // near-cavitation data at eps = 0 is under-resolved at n = 512; the
    // flux balance residual lands just above 1e-6
    let d = tempfile::tempdir().unwrap();
    let code = cli(
        d.path(),
        &["simulate", "--data", "near-cavitation", "--set", "monitors=flux-balance"],
    );
    assert_eq!(code, EXIT_FAIL);
    assert!(!report(d.path(), "simulate").pass);
}

#[test]
fn config_file_and_overrides() {
    let d = tempfile::tempdir().unwrap();
    let cfg = d.path().join("run.cfg");
    fs::write(&cfg, "# benchmark\nn = 128\nT = 0.2\neps = 0.1\n").unwrap();
    let code = cli(d.path(), &["simulate", "--config", cfg.to_str().unwrap(), "--set", "lambda=0.5"]);
    assert_eq!(code, EXIT_OK);
    let r = report(d.path(), "simulate");
    assert_eq!(r.config["n"], "128");
    assert_eq!(r.config["lambda"], "0.5");
}

#[test]
fn validation_names_field_and_range() {
    for (k, v) in [("n", "3"), ("eps", "-1"), ("lambda", "2.5"), ("mu", "nan"), ("T", "-2"), ("s", "x")] {
        let mut c = SolverConfig::default();
        let err = c.set(k, v).and_then(|_| c.validate()).unwrap_err().to_string();
        assert!(err.contains(k), "{k}: {err}");
    }
}

#[test]
fn reruns_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [a.path(), b.path()] {
        assert_eq!(cli(d, &["converge-eps", "--n", "256", "--t-final", "0.5"]), EXIT_OK);
    }
    let ca = fs::read(a.path().join("converge-eps.csv")).unwrap();
    let cb = fs::read(b.path().join("converge-eps.csv")).unwrap();
    assert_eq!(ca, cb);
}

#[test]
fn csv_only_format() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(cli(d.path(), &["kernel", "--lambda", "1.5", "--eps", "1", "--format", "csv"]), EXIT_OK);
    assert!(d.path().join("kernel.csv").exists());
    assert!(!d.path().join("kernel.json").exists());
}

fn verdict(pass: bool, i: usize) -> Verdict {
    let v = if pass { 0.0 } else { 2.0 };
    Verdict::check(&format!("m{i}"), v, 1.0, String::new())
}

proptest! {
    #[test]
    fn any_fail_gives_exit_two(flags in proptest::collection::vec(any::<bool>(), 0..12)) {
        let mut r = RunReport::new("simulate", &SolverConfig::default());
        r.verdicts = flags.iter().enumerate().map(|(i, &p)| verdict(p, i)).collect();
        let r = r.finish();
        let want = if flags.iter().all(|&p| p) { EXIT_OK } else { EXIT_FAIL };
        prop_assert_eq!(exit_code(&r), want);
    }
}
