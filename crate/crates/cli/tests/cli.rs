use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn mnnr(args: &[&str], root: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mnnr"))
        .args(args)
        .env("MNNR_OUTPUT_ROOT", root)
        .output()
        .expect("binary runs")
}

fn read(p: impl AsRef<Path>) -> String {
    fs::read_to_string(p).expect("readable output")
}

#[test]
fn negative_intensity_is_a_validation_error() {
    let tmp = tempfile::tempdir().unwrap();
    let out = mnnr(&["fractions", "--lambda", "-1", "--seed", "1"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("lambda"));
}

#[test]
fn monte_carlo_commands_need_a_seed() {
    let tmp = tempfile::tempdir().unwrap();
    let out = mnnr(&["fractions", "--reps", "1"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn zero_workers_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let out = mnnr(&["--workers", "0", "fractions", "--seed", "1"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn fractions_layout_and_stdout() {
    let tmp = tempfile::tempdir().unwrap();
    let out = mnnr(&["fractions", "--lambda", "0.25", "--side", "40", "--reps", "3", "--seed", "7"], tmp.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let est = v["estimate"].as_f64().unwrap();
    assert!((0.5..0.75).contains(&est), "{est}");
    assert_eq!(v["n_reps"], 3);
    assert_eq!(v["seed"], 7);

    let dir = tmp.path().join("fractions-seed7");
    let m: serde_json::Value = serde_json::from_str(&read(dir.join("manifest.json"))).unwrap();
    assert_eq!(m["command"], "fractions");
    assert_eq!(m["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(m["config"]["side"], 40.0);
    assert!(m["wall_time_s"].as_f64().unwrap() >= 0.0);
    for f in m["outputs"].as_array().unwrap() {
        let f = f.as_str().unwrap();
        assert!(f.starts_with("data/"));
        assert!(dir.join(f).is_file(), "{f}");
    }
}

#[test]
fn reruns_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let mut snapshots = Vec::new();
    for (k, workers) in ["1", "2"].iter().enumerate() {
        let dir = tmp.path().join(format!("run{k}"));
        let out = mnnr(
            &[
                "--workers", workers,
                "--run-dir", dir.to_str().unwrap(),
                "nn-cdf", "--side", "30", "--reps", "2", "--points", "11", "--seed", "3",
            ],
            tmp.path(),
        );
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        let mut files: Vec<_> = fs::read_dir(dir.join("data")).unwrap().map(|e| e.unwrap().path()).collect();
        files.sort();
        snapshots.push(files.iter().map(|p| (p.file_name().unwrap().to_owned(), fs::read(p).unwrap())).collect::<Vec<_>>());
    }
    assert_eq!(snapshots[0], snapshots[1]);
}

#[test]
fn flags_override_config_file() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("cfg.json");
    fs::write(&cfg, r#"{"lambda": 1.0, "side": 20, "reps": 2, "seed": 11}"#).unwrap();
    let out = mnnr(&["--config", cfg.to_str().unwrap(), "fractions", "--reps", "4"], tmp.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let m: serde_json::Value = serde_json::from_str(&read(tmp.path().join("fractions-seed11/manifest.json"))).unwrap();
    assert_eq!(m["config"]["lambda"], 1.0);
    assert_eq!(m["config"]["side"], 20.0);
    assert_eq!(m["config"]["reps"], 4);
}

#[test]
fn malformed_config_file_is_a_validation_error() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("cfg.json");
    fs::write(&cfg, r#"{"lambda": "dense"}"#).unwrap();
    let out = mnnr(&["--config", cfg.to_str().unwrap(), "fractions", "--seed", "1"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn truncated_series_is_a_numerical_failure() {
    let tmp = tempfile::tempdir().unwrap();
    let out = mnnr(
        &["laplace-window", "--n-max", "2", "--mc-per-term", "10", "--direct-reps", "10", "--seed", "1"],
        tmp.path(),
    );
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn analytic_coverage_csv_schema() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("cov");
    let out = mnnr(
        &[
            "--run-dir", dir.to_str().unwrap(),
            "coverage", "--association", "fixed", "--r0", "1", "--scheme", "nsc", "--beta", "4",
            "--curves", "superposition-analytic,baseline", "--t-min-db", "-10", "--t-max-db", "20", "--t-step-db", "10",
        ],
        tmp.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = read(dir.join("data/coverage_superposition_analytic.csv"));
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("T_linear,T_dB,coverage,stderr"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 4);
    for w in rows.windows(2) {
        assert!(w[1][2] <= w[0][2]);
    }
    assert!(dir.join("data/coverage_superposition_analytic.json").is_file());
}

#[test]
fn interference_csv_names_are_sanitised() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("int");
    let out = mnnr(
        &[
            "--run-dir", dir.to_str().unwrap(),
            "interference-mean", "--radii", "1,2", "--schemes", "off:q=0.5", "--reps", "20", "--window-radius", "10", "--seed", "2",
        ],
        tmp.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = read(dir.join("data/interference_off_q_0_5_mc.csv"));
    assert!(text.starts_with("R_km,mean_I1,mean_I2,stderr_I1,stderr_I2"));
    assert_eq!(text.lines().count(), 3);
}
