//! End-to-end checks of the binary: exit codes, config-file override,
//! artifact round-trips and byte-level determinism across runs and thread
//! counts.

use std::path::PathBuf;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_polarmax"))
}

fn workdir() -> PathBuf {
    let dir = std::env::temp_dir().join(format!("polarmax_cli_{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn invalid_kernel_exits_one_with_diagnostic() {
    let out = bin()
        .args(["solve", "--kernel", "nope:1", "--set", "circle", "--n", "2"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.lines().count() <= 2, "diagnostic not terse: {err}");
    assert!(err.contains("unrecognized kernel"));
}

#[test]
fn solve_outputs_are_deterministic_across_runs_and_threads() {
    let dir = workdir();
    let out = dir.join("det.json");
    let run = |path: &PathBuf, threads: &str| {
        let status = bin()
            .env("POLARMAX_THREADS", threads)
            .args([
                "solve",
                "--kernel",
                "riesz:2",
                "--set",
                "circle",
                "--n",
                "4",
                "--restarts",
                "3",
                "--iterations",
                "150",
                "--resolution",
                "512",
                "--seed",
                "9",
                "--out",
                path.to_str().unwrap(),
            ])
            .status()
            .unwrap();
        assert!(status.success());
    };
    run(&out, "1");
    let a = std::fs::read(&out).unwrap();
    run(&out, "4");
    let b = std::fs::read(&out).unwrap();
    assert_eq!(a, b, "outputs differ across thread counts");
}

#[test]
fn solve_then_census_roundtrip() {
    let dir = workdir();
    let out = dir.join("solve_census.json");
    assert!(bin()
        .args([
            "solve", "--kernel", "riesz:2", "--set", "circle", "--n", "8",
            "--restarts", "2", "--iterations", "150", "--resolution", "1024",
            "--seed", "3", "--out", out.to_str().unwrap(),
        ])
        .status()
        .unwrap()
        .success());
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.contains("\"tool_version\""));
    assert!(text.contains("\"config_hash\""));

    let census = bin()
        .args(["verify", "census", "--from", out.to_str().unwrap(), "--eps", "0.2"])
        .output()
        .unwrap();
    assert!(census.status.success());
    let stdout = String::from_utf8_lossy(&census.stdout);
    assert_eq!(stdout.trim(), "census 0");
}

#[test]
fn verify_replacement_from_csv() {
    let dir = workdir();
    let cloud = dir.join("cloud.csv");
    let mut rows = String::new();
    for k in 0..40 {
        let t = 2.0 * std::f64::consts::PI * k as f64 / 40.0;
        rows.push_str(&format!("{},{}\n", t.cos(), t.sin()));
    }
    std::fs::write(&cloud, rows).unwrap();
    let out = bin()
        .args([
            "verify",
            "replacement",
            "--cloud",
            cloud.to_str().unwrap(),
            "--x",
            "2,2",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("dominance_violations 0"), "{stdout}");
}

#[test]
fn config_file_overrides_flags() {
    let dir = workdir();
    let cfg = dir.join("cfg.json");
    let out_flags = dir.join("flags.json");
    let out_cfg = dir.join("from_cfg.json");
    std::fs::write(
        &cfg,
        serde_json::json!({
            "kernel": "riesz:1",
            "set": "circle",
            "n": 3,
            "mode": "unconstrained",
            "restarts": 2,
            "iterations": 120,
            "resolution": 512,
            "seed": 4,
            "out": out_cfg,
        })
        .to_string(),
    )
    .unwrap();
    assert!(bin()
        .args([
            "solve", "--kernel", "riesz:1", "--set", "circle", "--n", "3",
            "--restarts", "2", "--iterations", "120", "--resolution", "512",
            "--seed", "4", "--out", out_flags.to_str().unwrap(),
        ])
        .status()
        .unwrap()
        .success());
    // flags other than --config are ignored when a config file is given
    assert!(bin()
        .args([
            "solve", "--kernel", "riesz:99", "--set", "circle", "--n", "1",
            "--config", cfg.to_str().unwrap(),
        ])
        .status()
        .unwrap()
        .success());
    let a: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out_flags).unwrap()).unwrap();
    let b: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out_cfg).unwrap()).unwrap();
    assert_eq!(a["result"], b["result"]);
}

#[test]
fn thresholds_csv_layout() {
    let out = bin()
        .args(["thresholds", "--s", "1", "--n-range", "3:5"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# tool_version="));
    assert!(lines.next().unwrap().starts_with("# config_hash="));
    assert!(lines.next().unwrap().starts_with("# config="));
    assert_eq!(lines.next().unwrap(), "n,r_bar,r_limit_inv,r_limit");
    let data: Vec<&str> = lines.collect();
    assert_eq!(data.len(), 3);
    for line in data {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields.len(), 4);
        let r_inv: f64 = fields[2].parse().unwrap();
        let r_bar: f64 = fields[1].parse().unwrap();
        let r_lim: f64 = fields[3].parse().unwrap();
        assert!(r_inv < r_bar && r_bar < r_lim);
        assert!((r_inv * r_lim - 1.0).abs() < 1e-12);
    }
}

#[test]
fn cover_and_asymptotics_produce_artifacts() {
    let dir = workdir();
    let cover_out = dir.join("cover.json");
    assert!(bin()
        .args([
            "cover", "--set", "circle", "--n", "4", "--mode", "unconstrained",
            "--restarts", "2", "--iterations", "150", "--resolution", "1024",
            "--out", cover_out.to_str().unwrap(),
        ])
        .status()
        .unwrap()
        .success());
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&cover_out).unwrap()).unwrap();
    let eta = doc["result"]["eta"].as_f64().unwrap();
    assert!((eta - std::f64::consts::FRAC_PI_4.sin()).abs() < 1e-3);

    let asy_out = dir.join("run.csv");
    assert!(bin()
        .args([
            "asymptotics", "--set", "circle", "--s", "2", "--d", "1",
            "--ns", "8,16", "--iterations", "150", "--out", asy_out.to_str().unwrap(),
        ])
        .status()
        .unwrap()
        .success());
    let text = std::fs::read_to_string(&asy_out).unwrap();
    assert!(text.contains("n,value,tau,ratio"));
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 3);
}
