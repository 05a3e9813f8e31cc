use std::path::Path;
use std::process::{Command, Output};

use hrep::harness::{Status, VerificationReport};

fn hrep(args: &[&str], threads: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_hrep"));
    cmd.args(args).env_remove("HREP_THREADS");
    if let Some(t) = threads {
        cmd.env("HREP_THREADS", t);
    }
    cmd.output().expect("binary runs")
}

fn report(out: &Output) -> VerificationReport {
    VerificationReport::from_json(std::str::from_utf8(&out.stdout).unwrap()).unwrap()
}

#[test]
fn main_theorem_at_level_one_passes() {
    let out = hrep(&["verify", "main-theorem", "--g", "1", "--h", "1", "--T", "[[2]]"], None);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&out);
    assert!(r.passed());
    assert_eq!(r.summary.failed, 0);
    let m = r.check("main.multiplicity").unwrap();
    assert_eq!(m.status, Status::Pass);
    assert!(m.detail.as_deref().unwrap().starts_with("2 components"));
}

#[test]
fn gate_failure_skips_and_theta_still_passes() {
    let out = hrep(&["verify", "main-theorem", "--T", "[[3]]"], None);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert!(!r.checks.is_empty());
    assert!(r.checks.iter().all(|c| c.status == Status::Skipped && c.detail.as_deref().unwrap().contains("3/2")));

    let out = hrep(&["verify", "theta4", "--T", "[[3]]"], None);
    assert_eq!(out.status.code(), Some(0));
    assert!(report(&out).checks.iter().all(|c| c.status == Status::Pass));
}

#[test]
fn failing_check_exits_one() {
    let out = hrep(&["verify", "main-theorem", "--tol", "1e-30"], None);
    assert_eq!(out.status.code(), Some(1));
    let r = report(&out);
    assert_eq!(r.status, Status::Fail);
    assert_eq!(r.check("main.isometry").unwrap().status, Status::Fail);
}

#[test]
fn configuration_errors_exit_two() {
    for args in [
        &["verify", "nonsense"][..],
        &["verify", "main-theorem", "--h", "2", "--T", "[[2,1],[0,2]]"],
        &["verify", "theta4", "--T", "[[-2]]"],
        &["verify", "theta4", "--T", "[[2"],
        &["verify", "group", "--format", "yaml"],
        &["verify", "group", "--g", "0"],
        &["verify", "group", "--out", "/nonexistent/dir/report.json"],
        &["verify", "group", "--config", "/nonexistent/config.json"],
    ] {
        let out = hrep(args, None);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
    assert_eq!(hrep(&["verify", "group"], Some("zero")).status.code(), Some(2));
}

#[test]
fn reruns_are_byte_identical_across_threads() {
    let dir = tempfile::tempdir().unwrap();
    let mut files = Vec::new();
    for (i, threads) in [None, Some("1"), Some("3"), Some("1")].into_iter().enumerate() {
        let path = dir.path().join(format!("r{i}.json"));
        let out = hrep(
            &["verify", "all", "--g", "1", "--h", "1", "--seed", "7", "--quad", "16", "--out", path.to_str().unwrap()],
            threads,
        );
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        assert!(out.stdout.is_empty());
        files.push(std::fs::read(&path).unwrap());
    }
    assert!(files.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn json_is_canonical_and_round_trips() {
    let out = hrep(&["verify", "forms", "--seed", "3"], None);
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    let r = report(&out);
    assert_eq!(r.to_json(), text);
    let value: serde_json::Value = serde_json::from_str(&text).unwrap();
    let keys: Vec<&String> = value.as_object().unwrap().keys().collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
    assert_eq!(value["config"]["tol_residual"], "1.000000000000e-06");
    assert!(!text.contains("runtime"));
}

#[test]
fn text_has_one_line_per_check_with_anchor() {
    let out = hrep(&["verify", "schrodinger", "--format", "text"], None);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().filter(|l| l.contains("schrodinger.")).collect();
    assert_eq!(lines.len(), 3);
    assert!(lines.iter().all(|l| l.starts_with("PASS") && l.contains("  [") && l.contains("] residual=")));
}

#[test]
fn config_file_with_flag_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"suite": "main-theorem", "g": 1, "h": 1, "t": [[3]], "seed": 5}"#).unwrap();
    let out = hrep(&["verify", "--config", cfg.to_str().unwrap()], None);
    let r = report(&out);
    assert_eq!((r.config.seed, r.config.t.clone()), (5, vec![vec![3]]));
    assert_eq!(r.summary.skipped, r.checks.len());

    let out = hrep(&["verify", "group", "--config", cfg.to_str().unwrap(), "--seed", "9", "--g", "2"], None);
    let r = report(&out);
    assert_eq!((r.config.suite.name(), r.config.seed, r.config.g), ("group", 9, 2));
    assert!(Path::new(&cfg).exists());
}

#[test]
fn timings_are_opt_in() {
    let out = hrep(&["verify", "forms", "--timings"], None);
    let r = report(&out);
    assert!(r.checks.iter().all(|c| c.runtime.is_some()));
}
