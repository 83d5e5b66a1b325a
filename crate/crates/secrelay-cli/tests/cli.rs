//! End-to-end tests of the `secrelay` binary.

use std::fs;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_secrelay"))
}

fn write_config(dir: &tempfile::TempDir, body: &str) -> std::path::PathBuf {
    let path = dir.path().join("run.conf");
    fs::write(&path, body).unwrap();
    path
}

#[test]
fn help_lists_subcommands() {
    let out = bin().arg("--help").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for word in ["analyze", "simulate", "optimize", "--config", "--seed"] {
        assert!(text.contains(word), "missing {word} in help:\n{text}");
    }
}

#[test]
fn analyze_emits_pinned_csv_header() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(&dir, "n_mc = 5000\nq_values = 1,2\nseed = 7\n");
    let out = bin()
        .arg("analyze")
        .arg("--config")
        .arg(&cfg)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "variant,q,mu_analytic,alphas");
    assert_eq!(lines.count(), 2);
}

#[test]
fn simulate_writes_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        &dir,
        "n_mc = 5000\nn_slots = 10000\nq_values = 2\nvariants = proposed,hd-only\n",
    );
    let out_path = dir.path().join("rows.csv");
    let out = bin()
        .arg("simulate")
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(&out_path)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(out.stdout.is_empty());
    let text = fs::read_to_string(&out_path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "variant,q,mu_analytic,mu_empirical,gap,seed");
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("proposed,2,"));
    assert!(lines[2].starts_with("hd-only,2,"));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(&dir, "n_mc = 5000\nn_slots = 10000\nq_values = 1\n");
    let run = || {
        let out = bin()
            .arg("simulate")
            .arg("--config")
            .arg(&cfg)
            .output()
            .unwrap();
        assert!(out.status.success());
        out.stdout
    };
    assert_eq!(run(), run());
}

#[test]
fn seed_flag_overrides_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        &dir,
        "n_mc = 5000\nn_slots = 10000\nq_values = 1\nseed = 1\n",
    );
    let with_seed = |args: &[&str]| {
        let out = bin()
            .arg("simulate")
            .arg("--config")
            .arg(&cfg)
            .args(args)
            .output()
            .unwrap();
        assert!(out.status.success());
        out.stdout
    };
    let base = with_seed(&[]);
    assert_eq!(base, with_seed(&["--seed", "1"]));
    assert_ne!(base, with_seed(&["--seed", "2"]));
}

#[test]
fn unknown_config_key_fails_with_message() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(&dir, "n_mcc = 5000\n");
    let out = bin()
        .arg("analyze")
        .arg("--config")
        .arg(&cfg)
        .output()
        .unwrap();
    assert!(!out.status.success());
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("unknown key"), "stderr: {err}");
    assert!(err.contains("n_mcc"), "stderr: {err}");
}

#[test]
fn optimize_emits_json_policy() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(&dir, "n_mc = 5000\nq_values = 3\n");
    let out = bin()
        .arg("optimize")
        .arg("--config")
        .arg(&cfg)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["q"], 3);
    assert_eq!(v["alphas"].as_array().unwrap().len(), 4);
    assert_eq!(v["alphas"][0], 1.0);
    assert_eq!(v["alphas"][3], 0.0);
}

#[test]
fn strict_region_flag_changes_analysis() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(&dir, "n_mc = 20000\nq_values = 3\n");
    let run = |extra: &[&str]| {
        let out = bin()
            .arg("analyze")
            .arg("--config")
            .arg(&cfg)
            .args(extra)
            .output()
            .unwrap();
        assert!(out.status.success());
        String::from_utf8(out.stdout).unwrap()
    };
    let loose = run(&[]);
    let strict = run(&["--strict-region"]);
    let mu = |text: &str| -> f64 {
        text.lines()
            .nth(1)
            .unwrap()
            .split(',')
            .nth(2)
            .unwrap()
            .parse()
            .unwrap()
    };
    // Strictness removes RF-FD opportunities, so throughput cannot improve.
    assert!(mu(&strict) <= mu(&loose) + 1e-12, "{strict} vs {loose}");
}
