//! Black-box tests of the command-line binary: exit codes, report shape,
//! determinism, stdin handling and error messages.

use std::io::Write;
use std::process::{Command, Stdio};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_rdgof"))
}

fn write_temp(name: &str, contents: &str) -> std::path::PathBuf {
    let path = std::env::temp_dir().join(format!("rdgof-cli-{}-{name}", std::process::id()));
    std::fs::write(&path, contents).unwrap();
    path
}

#[test]
fn uniform_test_accepts_uniform_data() {
    let input = write_temp("uniform.txt", "0\n1\n2\n3\n4\n5\n0\n1\n2\n3\n4\n5\n# trailing comment\n");
    let out = bin()
        .args([
            "test", "uniform", "--l", "6", "--alpha", "1", "--input",
            input.to_str().unwrap(), "--reps", "200", "--seed", "5",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["statistic"], 0.0);
    assert_eq!(report["decision"], "accept");
    assert!(report["critical_value"].is_number());
    assert!(report["p_value"].is_number());
}

#[test]
fn lopsided_data_is_rejected_with_exit_1() {
    let input = write_temp("lopsided.txt", &"0\n".repeat(200));
    let out = bin()
        .args([
            "test", "uniform", "--l", "4", "--alpha", "1", "--input",
            input.to_str().unwrap(), "--reps", "300", "--seed", "5",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1), "{out:?}");
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["decision"], "reject");
}

#[test]
fn bad_line_reports_number_and_exit_2() {
    let input = write_temp("bad.txt", "0\n1\nbanana\n2\n");
    let out = bin()
        .args([
            "test", "uniform", "--l", "4", "--alpha", "0.5", "--input",
            input.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2), "{out:?}");
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 3"), "stderr: {err}");
}

#[test]
fn normal_alpha_one_is_a_usage_error() {
    let input = write_temp("normal.txt", "0.1\n-0.2\n");
    let out = bin()
        .args([
            "test", "normal", "--alpha", "1.0", "--input", input.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2), "{out:?}");
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("alpha must be < 1"), "stderr: {err}");
}

#[test]
fn circular_test_reads_stdin_and_degrees() {
    let mut child = bin()
        .args([
            "test", "circular", "--d0", "1.0", "--degrees", "--input", "-",
            "--reps", "200", "--seed", "7", "--sig", "0.05", "--grid-points", "512",
        ])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(b"10\n95\n181\n264\n350\n44\n132\n220\n308\n17\n")
        .unwrap();
    let out = child.wait_with_output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(report["critical_value"].is_number());
    assert!(report["p_value"].is_number());
    assert_eq!(report["statistic_kind"]["statistic"], "circular_rd");
}

#[test]
fn statistic_only_skips_calibration() {
    let input = write_temp("stat-only.txt", "0\n0\n1\n");
    let out = bin()
        .args([
            "test", "uniform", "--l", "2", "--alpha", "0.5", "--statistic-only",
            "--input", input.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(report.get("critical_value").is_none());
    assert!(report.get("p_value").is_none());
    assert!(report["statistic"].as_f64().unwrap() > 0.0);
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let input = write_temp("det.txt", "0.3\n-0.8\n1.4\n0.0\n-2.1\n");
    let run = || {
        bin()
            .args([
                "test", "normal", "--alpha", "0.8", "--input", input.to_str().unwrap(),
                "--reps", "300", "--seed", "99", "--grid-points", "512",
            ])
            .output()
            .unwrap()
    };
    let a = run();
    let b = run();
    assert_eq!(a.status.code(), b.status.code());
    assert!(!a.stdout.is_empty());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn rdgof_seed_env_is_the_fallback() {
    let input = write_temp("env-seed.txt", "0\n1\n0\n1\n1\n");
    let with_env = bin()
        .args([
            "test", "uniform", "--l", "2", "--alpha", "1", "--input",
            input.to_str().unwrap(), "--reps", "100",
        ])
        .env("RDGOF_SEED", "31")
        .output()
        .unwrap();
    let with_flag = bin()
        .args([
            "test", "uniform", "--l", "2", "--alpha", "1", "--input",
            input.to_str().unwrap(), "--reps", "100", "--seed", "31",
        ])
        .output()
        .unwrap();
    assert_eq!(with_env.stdout, with_flag.stdout);
    let report: serde_json::Value = serde_json::from_slice(&with_env.stdout).unwrap();
    assert_eq!(report["seed"], 31);
}

#[test]
fn rd_solve_matches_known_rate() {
    let out = bin()
        .args(["rd-solve", "--hamming", "2", "--d0", "0.25"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let rate = report["rate"].as_f64().unwrap();
    assert!((rate - 0.1308).abs() < 1e-3, "rate {rate}");

    let out = bin()
        .args(["rd-solve", "--hamming", "2", "--beta", "0"])
        .output()
        .unwrap();
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["rate"].as_f64().unwrap(), 0.0);
}

#[test]
fn rd_solve_bad_matrix_row_is_exit_2() {
    let input = write_temp("matrix.txt", "0 1\n1 0 3\n");
    let out = bin()
        .args([
            "rd-solve", "--matrix", input.to_str().unwrap(), "--beta", "1",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2), "{out:?}");
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 2"), "stderr: {err}");
}

#[test]
fn power_command_emits_estimate() {
    let out = bin()
        .args([
            "power", "--model", "circular", "--kappa", "2.0", "--alt", "vonmises:0:2.0",
            "--n", "40", "--reps", "200", "--seed", "3", "--grid-points", "256",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(report["power"].as_f64().unwrap() > 0.5);
    assert!(report["std_error"].is_number());
}

#[test]
fn diagnose_command_emits_moments() {
    let out = bin()
        .args([
            "diagnose", "--model", "uniform", "--l", "4", "--alpha", "0.8",
            "--n", "100", "--reps", "400", "--seed", "1",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    for field in ["skewness", "excess_kurtosis", "qq_correlation"] {
        assert!(report[field].is_number(), "missing {field}");
    }
}

#[test]
fn bad_alt_spec_is_exit_2() {
    let out = bin()
        .args([
            "power", "--model", "uniform", "--l", "2", "--alpha", "1",
            "--alt", "cauchy:0:1", "--n", "10", "--reps", "50",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2), "{out:?}");
}
