use std::path::{Path, PathBuf};
use std::process::Command;

fn wpi() -> Command {
    Command::new(env!("CARGO_BIN_EXE_wpi"))
}

fn default_config() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/default.json")
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = wpi().args(args).env("SOURCE_DATE_EPOCH", "0").output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn tsv_column(tsv: &str, col: &str) -> Vec<String> {
    let mut lines = tsv.lines();
    let header: Vec<&str> = lines.next().unwrap().split('\t').collect();
    let i = header.iter().position(|h| *h == col).unwrap();
    lines.map(|l| l.split('\t').nth(i).unwrap().to_string()).collect()
}

#[test]
fn compare_lists_descending_phi() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let (code, stdout, _) = run(&["compare", default_config().to_str().unwrap(), "--out", out, "--format", "tsv"]);
    assert_eq!(code, 0);
    let file = std::fs::read_to_string(dir.path().join("compare.tsv")).unwrap();
    assert_eq!(stdout, file);
    assert_eq!(tsv_column(&file, "substrate"), ["CPU", "GPU", "neuro"]);
    let phi: Vec<f64> = tsv_column(&file, "phi").iter().map(|v| v.parse().unwrap()).collect();
    assert!(phi[0] > phi[1] && phi[1] > phi[2]);
    assert_eq!(tsv_column(&file, "overhead_source"), ["default"; 3]);
    let bundle: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(bundle["comparison"]["ordering"], serde_json::json!(["neuro", "GPU", "CPU"]));
    assert_eq!(bundle["metadata"]["timestamp"], "1970-01-01T00:00:00Z");
}

#[test]
fn single_sample_simulation_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = default_config();
    let mut recorded = Vec::new();
    for name in ["a", "b"] {
        let out = dir.path().join(name);
        let (code, _, err) =
            run(&["simulate", cfg.to_str().unwrap(), "--samples", "1", "--record", "--out", out.to_str().unwrap()]);
        assert_eq!(code, 0, "{err}");
        recorded.push(std::fs::read(out.join("trajectories.tsv")).unwrap());
        let bundle: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
        for sim in bundle["simulations"].as_array().unwrap() {
            assert_eq!(sim["trajectories"], 1);
        }
    }
    assert_eq!(recorded[0], recorded[1]);
    // header plus one transition per model
    assert_eq!(String::from_utf8_lossy(&recorded[0]).lines().count(), 4);
}

#[test]
fn check_bounds_passes_on_shipped_chains() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _, err) = run(&[
        "check-bounds",
        default_config().to_str().unwrap(),
        "--delta",
        "0.05",
        "--samples",
        "20000",
        "--assert",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{err}");
    let tsv = std::fs::read_to_string(dir.path().join("bounds.tsv")).unwrap();
    let checks = tsv_column(&tsv, "check");
    let rates = tsv_column(&tsv, "holds_rate");
    let thresholds = tsv_column(&tsv, "threshold");
    let models = tsv_column(&tsv, "model");
    let mut seen = 0;
    for i in 0..checks.len() {
        if models[i] == "four-state" && checks[i] == "efficiency" {
            let (r, t): (f64, f64) = (rates[i].parse().unwrap(), thresholds[i].parse().unwrap());
            assert!(r >= t);
            seen += 1;
        }
    }
    assert_eq!(seen, 1);
}

#[test]
fn failed_assertion_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    // α = 10 asks for ten units of intelligence per dissipated bit
    let cfg = write(
        dir.path(),
        "greedy.json",
        r#"{"seed": 3, "sim": {"samples": 2000, "alpha": 10},
            "models": [{"name": "m", "states": ["0000", "0101", "0110", "1011"], "kernel": "algorithmic"}]}"#,
    );
    let out = dir.path().join("out");
    let args = ["check-bounds", cfg.as_str(), "--out", out.to_str().unwrap()];
    assert_eq!(run(&args).0, 0, "without --assert failures are only reported");
    let mut with_assert = args.to_vec();
    with_assert.push("--assert");
    let (code, _, err) = run(&with_assert);
    assert_eq!(code, 2);
    assert!(err.contains("m:efficiency"), "{err}");
}

#[test]
fn validation_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let out = out.to_str().unwrap();
    let bad_row = write(
        dir.path(),
        "row.json",
        r#"{"seed": 1, "models": [{"name": "m", "states": ["0", "1"], "kernel": [[0.5, 0.5], [0.6, 0.3]]}]}"#,
    );
    let (code, _, err) = run(&["simulate", &bad_row, "--out", out]);
    assert_eq!(code, 1);
    assert!(err.contains("/models/0/kernel/1"), "{err}");

    let no_seed = write(dir.path(), "seed.json", r#"{"models": []}"#);
    let (code, _, err) = run(&["score", &no_seed, "--out", out]);
    assert_eq!(code, 1);
    assert!(err.contains("/seed"), "{err}");

    let broken = write(dir.path(), "broken.json", "{\n  \"seed\": 1,\n}");
    let (code, _, err) = run(&["score", &broken, "--out", out]);
    assert_eq!(code, 1);
    assert!(err.contains("line 3"), "{err}");

    assert_eq!(run(&["score", &no_seed, "--no-such-flag"]).0, 1);
    assert_eq!(run(&["score", &no_seed, "--estimator", "gzip"]).0, 1);
    assert_eq!(run(&["score", "/nonexistent/config.json", "--out", out]).0, 1);
    assert_eq!(run(&["--help"]).0, 0);
    assert!(!Path::new(out).join("report.json").exists());
}

#[test]
fn compare_rejects_different_algorithms() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "mismatch.json",
        r#"{"seed": 1,
            "substrates": [{"name": "a", "temperature": 300, "overhead_mem": 2, "overhead_ctrl": 1, "yield": 1},
                           {"name": "b", "temperature": 300, "overhead_mem": 3, "overhead_ctrl": 1, "yield": 1}],
            "suites": [{"name": "s", "tasks": [{"id": "t", "weight": 1, "performance": 1}]}],
            "traces": [{"substrate": "a", "suite": "s", "irreversible_ops": 10, "duration": 1},
                       {"substrate": "b", "suite": "s", "irreversible_ops": 11, "duration": 1}]}"#,
    );
    let (code, _, err) = run(&["compare", &cfg, "--out", dir.path().join("o").to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(err.contains("comparison requires fixed algorithm"), "{err}");
}

#[test]
fn telemetry_energy_back_solves_overhead() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::create_dir(dir.path().join("data")).unwrap();
    // 1e-18 W for 1 s -> 1e-18 J over 10 ops at 300 K: F ≈ 34.83
    write(&dir.path().join("data"), "power.csv", "t_s,power_w\n0,1e-18\n0.5,1e-18\n1,1e-18\n");
    let cfg = write(
        dir.path(),
        "tele.json",
        r#"{"seed": 1,
            "substrates": [{"name": "a", "temperature": 300, "overhead_mem": 1, "overhead_ctrl": 1, "yield": 1}],
            "suites": [{"name": "s", "tasks": [{"id": "t", "weight": 1, "performance": 1}]}],
            "traces": [{"substrate": "a", "suite": "s", "irreversible_ops": 10, "telemetry": "data/power.csv"}]}"#,
    );
    let out = dir.path().join("o");
    let (code, stdout, err) = run(&["score", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    let bundle: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    let row = &bundle["wpi"][0];
    assert_eq!(row["overhead_source"], "back-solved");
    let f = row["energy"]["overhead_factor_used"].as_f64().unwrap();
    assert!((f - 34.83).abs() < 0.01, "{f}");
    assert_eq!(bundle["metadata"]["inputs"][0]["path"], "data/power.csv");

    write(&dir.path().join("data"), "power.csv", "t_s,power_w\n0,1\n1,-2\n0.5,1\n");
    let (code, _, err) = run(&["score", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(err.contains("line 3: negative power") && err.contains("line 4: timestamp"), "{err}");
}

#[test]
fn bundles_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = default_config();
    let mut bundles = Vec::new();
    for threads in ["1", "2", "5"] {
        let out = dir.path().join(threads);
        let (code, _, _) = run(&[
            "check-bounds",
            cfg.to_str().unwrap(),
            "--samples",
            "5000",
            "--threads",
            threads,
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(code, 0);
        bundles.push((std::fs::read(out.join("report.json")).unwrap(), std::fs::read(out.join("bounds.tsv")).unwrap()));
    }
    assert!(bundles.windows(2).all(|w| w[0] == w[1]));
}
