use std::path::Path;
use std::process::{Command, Output};

use std::collections::BTreeMap;

use rmem_cli::config::{SweepSpec, SweepValues};
use rmem_cli::presets;
use rmem_cli::run::{self, AnalysisReport};
use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_rmem");
const TAU: f64 = 1e-6;

fn rmem(args: &[&str], cwd: &Path) -> Output {
    Command::new(BIN)
        .args(args)
        .current_dir(cwd)
        .env_remove("RMEM_OUTPUT_DIR")
        .output()
        .expect("binary runs")
}

fn write_preset(dir: &Path, name: &str) -> String {
    let out = rmem(&["preset", name], dir);
    assert!(out.status.success());
    let file = format!("{name}.json");
    std::fs::write(dir.join(&file), &out.stdout).unwrap();
    file
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn matched_gaussian_is_recalled_at_high_efficiency() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_preset(dir.path(), "gaussian");
    let out = rmem(&["simulate", &cfg, "--out", "o"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let s = json(&out);
    let eta = s["efficiency"].as_f64().unwrap();
    assert!((0.98..=1.0).contains(&eta), "{eta}");
    for key in [
        "reflected_fraction",
        "gamma",
        "kappa",
        "cooperativity",
        "delta",
        "dn_used",
        "impedance_residual",
        "normalization",
    ] {
        assert!(!s[key].is_null(), "missing {key}");
    }
    assert!(dir.path().join("o/gaussian.trajectory.csv").exists());
    let written: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("o/gaussian.summary.json")).unwrap()).unwrap();
    assert_eq!(written, s);
}

#[test]
fn rerun_is_byte_identical_and_header_carries_hash() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_preset(dir.path(), "gaussian");
    let a = rmem(&["simulate", &cfg, "--out", "a"], dir.path());
    let b = rmem(&["simulate", &cfg, "--out", "b"], dir.path());
    assert!(a.status.success() && b.status.success());
    let csv_a = std::fs::read(dir.path().join("a/gaussian.trajectory.csv")).unwrap();
    let csv_b = std::fs::read(dir.path().join("b/gaussian.trajectory.csv")).unwrap();
    assert_eq!(csv_a, csv_b);
    let text = String::from_utf8(csv_a).unwrap();
    let hash = json(&a)["config_sha256"].as_str().unwrap().to_string();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# rmem "));
    assert_eq!(lines.next().unwrap(), format!("# config_sha256 {hash}"));
    assert_eq!(lines.next().unwrap(), "t,e_in_re,e_in_im,e_re,e_im,e_out_re,e_out_im,spin_norm");
    let first: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(first.len(), 8);
    assert!(first.iter().all(|c| c.is_ascii()));
}

#[test]
fn no_control_field_means_no_retrieval() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_preset(dir.path(), "gaussian");
    let out = rmem(&["simulate", &cfg, "--set", "params.rabi_omega=0", "--out", "o"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let s = json(&out);
    assert!(s["efficiency"].as_f64().unwrap() < 1e-9);
    assert!((s["reflected_fraction"].as_f64().unwrap() - 1.0).abs() < 1e-3);
}

#[test]
fn output_directory_comes_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_preset(dir.path(), "gaussian");
    let out = Command::new(BIN)
        .args(["simulate", &cfg])
        .current_dir(dir.path())
        .env("RMEM_OUTPUT_DIR", dir.path().join("env"))
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(dir.path().join("env/gaussian.summary.json").exists());
}

#[test]
fn config_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_preset(dir.path(), "gaussian");
    let mut doc: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join(&cfg)).unwrap()).unwrap();
    doc["params"]["unknown_key"] = Value::from(1);
    std::fs::write(dir.path().join("bad.json"), doc.to_string()).unwrap();
    for args in [
        vec!["simulate", "bad.json"],
        vec!["simulate", "missing.json"],
        vec!["simulate", &cfg, "--set", "params.kapa=1"],
        vec!["simulate", &cfg, "--set", "params.detuning=0"],
    ] {
        let out = rmem(&args, dir.path());
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        let diag: Value = serde_json::from_slice(&out.stderr).unwrap();
        assert_eq!(diag["error"]["kind"], "config");
    }
}

#[test]
fn overloaded_oracle_is_a_numeric_failure() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_preset(dir.path(), "gaussian");
    let out = rmem(&["validate", &cfg, "--set", "oracle.atoms=8", "--out", "o"], dir.path());
    assert_eq!(out.status.code(), Some(3));
    let diag: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(diag["error"]["variant"], "weak_field");
}

#[test]
fn analysis_reports() {
    let dir = tempfile::tempdir().unwrap();
    let req = write_preset(dir.path(), "capacity");
    let out = rmem(&["analyze", &req], dir.path());
    assert!(out.status.success());
    let r = json(&out);
    assert!((r["dn_min"].as_f64().unwrap() - 1e-5).abs() < 1e-18);
    assert_eq!(r["pulses"].as_u64().unwrap(), 100);
    assert_eq!(r["channels"].as_array().unwrap().len(), 100);

    let req = write_preset(dir.path(), "crosstalk");
    let r = json(&rmem(&["analyze", &req], dir.path()));
    let approx = r["approx"].as_f64().unwrap();
    assert!((approx - 2.08e-4).abs() < 1e-6);
    assert!(r["relative_difference"].as_f64().unwrap() < 0.1);

    let mut doc: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join(&req)).unwrap()).unwrap();
    doc["spec"]["m"] = Value::from(0);
    std::fs::write(dir.path().join("same.json"), doc.to_string()).unwrap();
    let out = rmem(&["analyze", "same.json"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn presets_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    for name in presets::PRESETS {
        let out = rmem(&["preset", name], dir.path());
        assert!(out.status.success(), "{name}");
        let _: Value = serde_json::from_slice(&out.stdout).unwrap();
    }
    let out = rmem(&["preset", "nope"], dir.path());
    assert!(!out.status.success());
}

#[test]
fn kappa_sweep_peaks_at_matching() {
    let spec = presets::kappa_sweep(TAU).unwrap();
    let rows = run::sweep(&spec, 4).unwrap();
    assert_eq!(rows.len(), 17);
    assert!(rows.iter().enumerate().all(|(i, r)| r.index == i));
    let effs: Vec<f64> = rows.iter().map(|r| r.result.as_ref().unwrap().efficiency).collect();
    let best = effs
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .unwrap()
        .0;
    assert_eq!(best, 8, "{effs:?}");
}

#[test]
fn delta_sweep_improves_as_spacing_shrinks() {
    let spec = presets::delta_sweep(TAU).unwrap();
    let rows = run::sweep(&spec, 3).unwrap();
    let effs: Vec<f64> = rows.iter().map(|r| r.result.as_ref().unwrap().efficiency).collect();
    assert!(effs[0] < effs[1] && effs[1] < effs[2], "{effs:?}");
}

#[test]
fn sweep_rows_match_single_runs_and_failures_do_not_stop_it() {
    let base = presets::gaussian(0.5, TAU).unwrap();
    let mut spec = SweepSpec {
        values: SweepValues::List(vec![base.params.kappa, -1.0]),
        parameter: "params.kappa".into(),
        overrides: BTreeMap::new(),
        base,
    };
    let single = run::run(&spec.point(spec.base.params.kappa).unwrap()).unwrap();
    let rows = run::sweep(&spec, 2).unwrap();
    assert_eq!(rows[0].result.as_ref().unwrap(), &single.summary);
    assert!(rows[1].result.is_err());
    let csv = run::sweep_csv(&spec, &rows);
    assert!(csv.lines().nth(4).unwrap().contains(",failed,"));

    spec.values = SweepValues::List(vec![spec.base.params.kappa]);
    let one = run::sweep(&spec, 1).unwrap();
    assert_eq!(one[0].result.as_ref().unwrap().efficiency, single.summary.efficiency);
}

#[test]
fn capacity_request_via_library() {
    let AnalysisReport::Capacity(r) = run::analyze(&presets::capacity()).unwrap() else {
        panic!("wrong report kind");
    };
    assert_eq!(r.pulses, 100);
}
