use std::path::PathBuf;
use std::process::Command;

use qtele::constants as k;
use qtele::{ExperimentConfig, RunReport};
use tempfile::tempdir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qtele"))
}

fn config_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

#[test]
fn shipped_default_matches_built_in_default() {
    let cfg = ExperimentConfig::load(&config_path("default.toml")).unwrap();
    assert_eq!(cfg, ExperimentConfig::default());
    assert_eq!(cfg.noise.visibility, k::VISIBILITY_BOUND);
    assert_eq!(cfg.noise.unitary_fidelity, k::UNITARY_FIDELITY_BOUND);
    assert_eq!(cfg.sources.mu_alice, k::MU_ALICE);
    assert_eq!(cfg.sources.mu_charlie, k::MU_CHARLIE);
    assert_eq!(cfg.topology.alice_charlie_km, k::ALICE_CHARLIE_KM);
    assert_eq!(cfg.topology.charlie_bob_km, k::CHARLIE_BOB_KM);
    assert_eq!(cfg.topology.bob_buffer_km, k::BUFFER_KM);
    assert_eq!(cfg.clock.jitter_rms_ps, k::JITTER_RMS_PS);
    assert_eq!(cfg.clock.coherence_time_ps, k::COHERENCE_TIME_PS);
}

#[test]
fn every_shipped_config_loads() {
    for name in ["default", "calibrated", "calibrated_without_ff", "short_buffers", "ideal"] {
        ExperimentConfig::load(&config_path(&format!("{name}.toml"))).unwrap();
    }
}

#[test]
fn efficiency_defaults_are_labeled_assumptions() {
    let text = std::fs::read_to_string(config_path("default.toml")).unwrap();
    let section = text.split("\n[efficiency]\n").nth(1).unwrap().split("\n[run]\n").next().unwrap();
    for line in section.lines().filter(|l| l.contains('=')) {
        assert!(line.contains("ASSUMPTION"), "unlabeled: {line}");
    }
}

#[test]
fn run_writes_a_round_tripping_report() {
    let dir = tempdir().unwrap();
    let out = dir.path().join("report.json");
    let status = bin()
        .args(["--config"])
        .arg(config_path("calibrated.toml"))
        .args(["--seed", "42", "--workers", "2", "--out"])
        .arg(&out)
        .arg("run")
        .output()
        .unwrap();
    assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
    let stdout = String::from_utf8(status.stdout).unwrap();
    assert!(stdout.contains("average state fidelity"));
    let text = std::fs::read_to_string(&out).unwrap();
    let report = RunReport::from_json(&text).unwrap();
    assert_eq!(report.seed, 42);
    assert_eq!(report.labels.len(), 4);
    assert_eq!(report.to_json(), text);
    for l in &report.labels {
        assert_eq!(l.attempted, l.successes + l.failures);
    }
}

#[test]
fn ideal_run_is_perfect() {
    let cfg = ExperimentConfig::load(&config_path("ideal.toml")).unwrap();
    let r = qtele::run_experiment(&cfg, 1).unwrap();
    assert!((r.average_state_fidelity - 1.0).abs() < 1e-12);
    assert!(r.hoeffding.p_exponent10 < -50);
    assert!(r.hoeffding.p_bound > 0.0);
}

#[test]
fn seed_override_changes_report() {
    let mut cfg = ExperimentConfig::load(&config_path("calibrated.toml")).unwrap();
    let a = qtele::run_experiment(&cfg, 1).unwrap();
    cfg.run.seed = 43;
    let b = qtele::run_experiment(&cfg, 1).unwrap();
    assert_ne!(a.to_json(), b.to_json());
}

#[test]
fn binary_output_is_identical_across_worker_counts() {
    let run = |w: &str| {
        let o = bin()
            .arg("--config")
            .arg(config_path("calibrated_without_ff.toml"))
            .args(["--workers", w, "run"])
            .output()
            .unwrap();
        assert!(o.status.success());
        o.stdout
    };
    assert_eq!(run("1"), run("3"));
}

#[test]
fn config_errors_exit_with_2() {
    let dir = tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    let text = std::fs::read_to_string(config_path("default.toml"))
        .unwrap()
        .replace("[noise]", "[noise]\nglow = 1.0");
    std::fs::write(&bad, text).unwrap();
    let o = bin().arg("--config").arg(&bad).arg("run").output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("glow"));

    let range = dir.path().join("range.toml");
    let text = std::fs::read_to_string(config_path("default.toml"))
        .unwrap()
        .replace("visibility = 0.917", "visibility = 1.5");
    std::fs::write(&range, text).unwrap();
    let o = bin().arg("--config").arg(&range).arg("timeline").output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("noise.visibility"));

    let o = bin().args(["--config", "/nonexistent.toml", "run"]).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn short_buffers_fail_strict_timing() {
    let short = config_path("short_buffers.toml");
    let o = bin().arg("--config").arg(&short).arg("timeline").output().unwrap();
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stdout).contains("false"));
    let o = bin()
        .arg("--config")
        .arg(&short)
        .args(["--strict-timing", "timeline"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3));
    let o = bin()
        .arg("--config")
        .arg(&short)
        .args(["--strict-timing", "run"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3));
    let o = bin()
        .arg("--config")
        .arg(config_path("default.toml"))
        .args(["--strict-timing", "timeline"])
        .output()
        .unwrap();
    assert!(o.status.success());
}

#[test]
fn hoeffding_subcommand() {
    let o = bin().args(["hoeffding", "--fidelity", "0.85", "--trials", "240"]).output().unwrap();
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stdout).contains("e-16"));
    let o = bin().args(["hoeffding", "--fidelity", "1.5", "--trials", "240"]).output().unwrap();
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn tomography_subcommands() {
    let dir = tempdir().unwrap();
    let counts = dir.path().join("counts.json");
    std::fs::write(
        &counts,
        r#"{"z":{"plus":500,"minus":500},"x":{"plus":1000,"minus":0},"y":{"plus":500,"minus":500}}"#,
    )
    .unwrap();
    let out = dir.path().join("state.json");
    let o = bin().arg("--out").arg(&out).arg("tomo-state").arg(&counts).output().unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert!((v["bloch"][0].as_f64().unwrap() - 1.0).abs() < 1e-9);

    // Ideal teleporter outputs σy·ψ for each probe.
    let mut states = serde_json::Map::new();
    for l in qtele::InputStateLabel::ALL {
        let rho = qtele::Pauli::Y.unitary().apply_density(&l.state().projector()).unwrap();
        states.insert(
            l.name().to_string(),
            serde_json::to_value(qtele::report::density_to_repr(&rho)).unwrap(),
        );
    }
    let path = dir.path().join("states.json");
    std::fs::write(&path, serde_json::Value::Object(states.clone()).to_string()).unwrap();
    let out = dir.path().join("chi.json");
    let o = bin().arg("--out").arg(&out).arg("tomo-process").arg(&path).output().unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert!((v["process_fidelity"].as_f64().unwrap() - 1.0).abs() < 1e-9);

    states.remove("R");
    std::fs::write(&path, serde_json::Value::Object(states).to_string()).unwrap();
    let o = bin().arg("tomo-process").arg(&path).output().unwrap();
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn budget_and_baseline_subcommands() {
    let o = bin().arg("rate-budget").output().unwrap();
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stdout).contains("four-fold rate (1/hour)"));
    let o = bin().args(["classical-baseline", "--samples", "20000"]).output().unwrap();
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stdout).contains("0.66"));
}
