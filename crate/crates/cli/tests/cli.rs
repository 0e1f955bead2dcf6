use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use wavekit_cli::manifest::RunManifest;

fn wavekit(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wavekit"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env_remove(wavekit_cli::OUT_ENV)
        .output()
        .expect("binary runs")
}

fn results(args: &[&str], out: &Path) -> Value {
    let o = wavekit(args, out);
    assert!(o.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&o.stderr));
    let m = RunManifest::load(out).unwrap();
    assert!(m.mismatches(out).is_empty());
    m.results
}

fn f(v: &Value) -> f64 {
    v.as_f64().unwrap_or_else(|| panic!("not a number: {v}"))
}

#[test]
fn heaviside_front_speed() {
    let dir = tempfile::tempdir().unwrap();
    let r = results(&["simulate-pde", "--Di", "0.25", "--Dg", "0.05", "--lambda", "0.75", "--ic", "heaviside"], dir.path());
    assert!((f(&r["speed"]) - 0.864).abs() <= 0.01, "{r}");
    assert!(dir.path().join("front.csv").exists());
    assert!(dir.path().join("snapshots/u_0000.dat").exists());
}

#[test]
fn shallow_tanh_data_spread_faster_than_a_step() {
    // On [0, 100] a shallow front reaches the boundary before t = 50.
    let dir = tempfile::tempdir().unwrap();
    let step = results(&["simulate-pde", "--x1", "400", "--x-center", "100"], &dir.path().join("step"));
    let tanh = results(
        &["simulate-pde", "--x1", "400", "--x-center", "100", "--ic", "tanh", "--eta", "0.2"],
        &dir.path().join("tanh"),
    );
    assert!(f(&tanh["speed"]) > f(&step["speed"]) + 0.1, "{tanh} vs {step}");
}

#[test]
fn general_diffusivity_front_speed() {
    let dir = tempfile::tempdir().unwrap();
    let r = results(&["simulate-pde", "--D-kind", "general", "--roots", "0.1", "0.3"], dir.path());
    assert!((f(&r["speed"]) - 0.3).abs() <= 0.01, "{r}");
}

#[test]
fn phase_plane_regimes() {
    let dir = tempfile::tempdir().unwrap();
    for (c, regime) in [("0.866", "SmoothMonotone"), ("0.4", "OscillatoryTail"), ("0.2", "NoConnection")] {
        let out = dir.path().join(c);
        let r = results(&["phase-plane", "--c", c], &out);
        assert_eq!(r["regime"], regime, "c = {c}");
        if regime == "NoConnection" {
            assert!(r["diagnostic"].as_str().unwrap().contains("spiral"));
        } else {
            assert!(out.join("profile.dat").exists());
        }
    }
}

#[test]
fn spectrum_verdicts_and_weight_scan() {
    let dir = tempfile::tempdir().unwrap();
    // Without --c the run uses c* itself, where K+ vanishes.
    let r = results(&["spectrum"], &dir.path().join("a"));
    assert!((f(&r["c"]) - 0.75f64.sqrt()).abs() < 1e-15);
    assert_eq!(r["verdict"], "TransientlyStableWithWeight");
    assert!(f(&r["k_plus"]).abs() < 1e-12);
    // 0.866 is just below c* = 0.8660254, so K+ is a sliver above zero.
    let r = results(&["spectrum", "--c", "0.866"], &dir.path().join("a2"));
    assert!((f(&r["k_plus"]) - (0.75 - 0.866f64.powi(2))).abs() < 1e-12);
    let r = results(&["spectrum", "--c", "0.4"], &dir.path().join("b"));
    assert_eq!(r["verdict"], "AbsolutelyUnstable");
    assert!((f(&r["k_plus"]) - 0.59).abs() < 1e-12);
    let r = results(&["spectrum", "--c", "1.2", "--scan-nu", "0:3:0.01"], &dir.path().join("c"));
    assert!((f(&r["nu_scan_argmin"]) - 2.4).abs() < 1e-9);
    assert!(dir.path().join("c/nu_scan.dat").exists());
    assert!(dir.path().join("c/dispersion_plus.dat").exists());
}

#[test]
fn mean_field_uniform_start_follows_logistic_growth() {
    let dir = tempfile::tempdir().unwrap();
    let r = results(
        &["lattice", "--mode", "mean-field", "--start", "uniform", "--value", "0.1", "--x1", "10", "--t-end", "10"],
        dir.path(),
    );
    assert!(r["mean_field"]["final_mean_occupancy"].is_number());
    let text = std::fs::read_to_string(dir.path().join("mean_field/mean_occupancy.csv")).unwrap();
    let lambda: f64 = 0.75;
    for line in text.lines().skip(1) {
        let (t, m) = line.split_once(',').unwrap();
        let (t, m): (f64, f64) = (t.parse().unwrap(), m.parse().unwrap());
        let exact = 0.1 * (lambda * t).exp() / (1.0 - 0.1 + 0.1 * (lambda * t).exp());
        // The lattice growth is a discrete-time logistic map with step tau.
        assert!((m - exact).abs() < 5e-3, "t = {t}: {m} vs {exact}");
    }
}

#[test]
fn zero_rate_lattice_is_static() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(
        &cfg,
        r#"{"grid": {"x1": 5, "t_end": 1},
            "ic": {"position": 2},
            "lattice": {"mode": "stochastic", "runs": 4, "snapshot_time": 0.25,
                        "probabilities": {"p_m_i": 0, "p_m_g": 0, "p_p_i": 0, "p_p_g": 0,
                                          "p_d_i": 0, "p_d_g": 0, "delta": 0.1, "tau": 0.05}}}"#,
    )
    .unwrap();
    let out = dir.path().join("out");
    results(&["lattice", "--config", cfg.to_str().unwrap()], &out);
    let m = RunManifest::load(&out).unwrap();
    let sums: Vec<&str> = m
        .files
        .iter()
        .filter(|e| e.path.starts_with("stochastic/mean_"))
        .map(|e| e.sha256.as_str())
        .collect();
    assert_eq!(sums.len(), 5);
    assert!(sums.iter().all(|s| *s == sums[0]));
}

#[test]
fn speed_scan_converges() {
    let dir = tempfile::tempdir().unwrap();
    let r = results(&["speed-scan", "--etas", "1,2,4,8,16"], dir.path());
    assert!((f(&r["limit_speed"]) - 0.864).abs() <= 0.01, "{r}");
    assert_eq!(r["rows"].as_array().unwrap().len(), 5);
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["lattice", "--x1", "10", "--x-center", "3", "--t-end", "2", "--runs", "8", "--seed", "11"];
    let a = dir.path().join("a");
    results(&args, &a);
    // Re-run from the echoed config alone.
    let b = dir.path().join("b");
    let echoed = a.join("config.json");
    results(&["lattice", "--config", echoed.to_str().unwrap(), "--jobs", "2"], &b);
    let (ma, mb) = (RunManifest::load(&a).unwrap(), RunManifest::load(&b).unwrap());
    assert_eq!(ma.config_hash, mb.config_hash);
    let data = |m: &RunManifest| -> Vec<(String, String)> {
        m.files
            .iter()
            .filter(|e| e.path.ends_with(".csv") || e.path.ends_with(".dat"))
            .map(|e| (e.path.clone(), e.sha256.clone()))
            .collect()
    };
    assert!(!data(&ma).is_empty());
    assert_eq!(data(&ma), data(&mb));
}

#[test]
fn environment_variable_sets_the_output_directory() {
    let dir = tempfile::tempdir().unwrap();
    let env_dir = dir.path().join("from-env");
    let o = Command::new(env!("CARGO_BIN_EXE_wavekit"))
        .args(["spectrum", "--c", "1.0"])
        .current_dir(dir.path())
        .env(wavekit_cli::OUT_ENV, &env_dir)
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(env_dir.join("manifest.json").exists());
    assert!(!dir.path().join("wavekit-out").exists());
    let flag_dir = dir.path().join("from-flag");
    let o = Command::new(env!("CARGO_BIN_EXE_wavekit"))
        .args(["spectrum", "--c", "1.0", "--out"])
        .arg(&flag_dir)
        .env(wavekit_cli::OUT_ENV, &env_dir)
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(flag_dir.join("manifest.json").exists());
}

#[test]
fn tampered_outputs_fail_verification() {
    let dir = tempfile::tempdir().unwrap();
    results(&["spectrum", "--c", "1.0"], dir.path());
    std::fs::write(dir.path().join("dispersion_plus.dat"), "# k re im\n").unwrap();
    let m = RunManifest::load(dir.path()).unwrap();
    assert_eq!(m.mismatches(dir.path()), vec!["dispersion_plus.dat".to_owned()]);
}

#[test]
fn bad_input_exits_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let o = wavekit(&["simulate-pde", "--dx", "-1"], dir.path());
    assert!(!o.status.success());
    assert!(!o.stderr.is_empty());
    let o = wavekit(&["speed-scan", "--etas", ""], dir.path());
    assert!(!o.status.success());
}
