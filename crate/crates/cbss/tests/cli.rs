//! End-to-end command-line behavior: exit codes, file formats, config-file
//! precedence, determinism.

use std::path::PathBuf;
use std::process::Command;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_cbss")
}

fn temp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join("cbss-cli-it");
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn unknown_flag_exits_with_usage_code() {
    let out = Command::new(bin()).args(["estimate-tail", "--nope", "1"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bad_domain_value_exits_with_usage_code() {
    let out = Command::new(bin())
        .args(["estimate-tail", "--alpha", "2.5", "--x", "10", "--n", "10"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2), "stderr: {}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn estimate_tail_repeat_runs_are_byte_identical() {
    let a = temp("rep-a.csv");
    let b = temp("rep-b.csv");
    for out in [&a, &b] {
        let status = Command::new(bin())
            .args([
                "estimate-tail", "--alpha", "1", "--x", "100", "--n", "1000", "--seed", "7",
                "--out",
            ])
            .arg(out)
            .status()
            .unwrap();
        assert!(status.success());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn solve_bvp_csv_residuals_below_tolerance() {
    let out_path = temp("bvp.csv");
    let status = Command::new(bin())
        .args([
            "solve-bvp", "--alpha", "1", "--l", "1000", "--nodes", "200", "--tol", "1e-8",
            "--out",
        ])
        .arg(&out_path)
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(&out_path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "x,u,scaled_u,residual");
    let mut rows = 0;
    for line in lines {
        let residual: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
        assert!(residual.abs() < 1e-8, "row residual {residual}");
        rows += 1;
    }
    assert_eq!(rows, 200);
}

#[test]
fn config_file_supplies_defaults_and_flags_override() {
    let conf = temp("run.conf");
    std::fs::write(&conf, "alpha=1.0\nn=500\nseed=11\nx=30\n").unwrap();
    let out_a = temp("conf-a.csv");
    let status = Command::new(bin())
        .args(["estimate-tail", "--config"])
        .arg(&conf)
        .args(["--out"])
        .arg(&out_a)
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(&out_a).unwrap();
    assert!(text.lines().nth(1).unwrap().starts_with("1,30,500,"), "{text}");
    // flag overrides the config x
    let out_b = temp("conf-b.csv");
    let status = Command::new(bin())
        .args(["estimate-tail", "--config"])
        .arg(&conf)
        .args(["--x", "60", "--out"])
        .arg(&out_b)
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(&out_b).unwrap();
    assert!(text.lines().nth(1).unwrap().starts_with("1,60,500,"), "{text}");
}

#[test]
fn sample_stable_path_dump_with_jump_sidecar() {
    let out_path = temp("path.csv");
    let status = Command::new(bin())
        .args([
            "sample-stable", "--alpha", "1", "--t", "5", "--path", "--dt", "0.01", "--seed",
            "3", "--out",
        ])
        .arg(&out_path)
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(&out_path).unwrap();
    assert!(text.starts_with("time,value"));
    assert!(text.lines().count() > 100);
    let sidecar = out_path.with_extension("jumps.csv");
    let jumps = std::fs::read_to_string(sidecar).unwrap();
    assert!(jumps.starts_with("time,size"));
}

#[test]
fn simulate_cbss_emits_json_summary() {
    let out = Command::new(bin())
        .args(["simulate-cbss", "--alpha", "1", "--x", "5", "--seed", "1"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["crossed"].is_boolean());
    assert!(v["m_lower"].is_number());
    assert!(v["progeny_used"].is_u64());
}

#[test]
fn fk_check_ansatz_csv() {
    let out = Command::new(bin())
        .args([
            "fk-check", "--alpha", "1", "--x", "50", "--n", "2000", "--candidate",
            "ansatz:1.41421356", "--seed", "5",
        ])
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("x,fk_mean,fk_se,candidate_u,ratio"));
    let row = text.lines().nth(1).unwrap();
    let ratio: f64 = row.rsplit(',').next().unwrap().parse().unwrap();
    assert!((ratio - 1.0).abs() < 0.25, "ratio {ratio}");
}

#[test]
fn solver_non_convergence_exits_with_numeric_code() {
    let out = Command::new(bin())
        .args([
            "solve-bvp", "--alpha", "1", "--l", "1000", "--nodes", "160", "--max-iters", "1",
            "--tol", "1e-12",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3), "stderr: {}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn verify_quick_report_is_valid_json_with_anchored_checks() {
    let out_path = temp("verify.json");
    let out = Command::new(bin())
        .args(["verify", "--level", "quick", "--seed", "9", "--out"])
        .arg(&out_path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    let checks = report["checks"].as_array().unwrap();
    assert!(checks.len() >= 12, "expected at least 12 checks, got {}", checks.len());
    for c in checks {
        assert!(c["check_id"].is_string());
        assert!(c["claim"].is_string());
        assert!(!c["claim"].as_str().unwrap().is_empty());
        assert!(c["statistic"].is_number());
        assert!(c["threshold"].is_number());
    }
    assert_eq!(report["pass"], serde_json::Value::Bool(true));
}
