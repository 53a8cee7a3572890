mod common;

use std::path::Path;
use std::process::Command;

use tarlev::io::{run_experiment, ExperimentConfig, Inputs, Pipeline, MANIFEST_NAME};
use tarlev::Error;

fn config(pipeline: Pipeline, out: &Path) -> ExperimentConfig {
    ExperimentConfig { pipeline: Some(pipeline), out: Some(out.to_path_buf()), seed: 7, ..Default::default() }
}

fn with_data(mut c: ExperimentConfig, dir: &Path) -> ExperimentConfig {
    let (target, threshold) = common::write_pair(dir, 700, 3);
    c.inputs = Some(Inputs { target, threshold });
    c
}

#[test]
fn nic_minimum_row_is_near_the_analytic_minimum() {
    let dir = tempfile::tempdir().unwrap();
    let m = run_experiment(&config(Pipeline::Nic, dir.path())).unwrap();
    assert_eq!(m.files.iter().map(|f| f.path.as_str()).collect::<Vec<_>>(), vec!["nic.csv", "leverage.json"]);
    let mut rdr = csv::Reader::from_path(dir.path().join("nic.csv")).unwrap();
    let rows: Vec<(f64, f64)> = rdr.deserialize::<(f64, f64, f64)>().map(|r| r.map(|(x, v, _)| (x, v)).unwrap()).collect();
    let best = rows.iter().min_by(|a, b| a.1.total_cmp(&b.1)).unwrap();
    assert!((best.0 - 0.0391).abs() <= 0.0005, "minimum at {}", best.0);
    let lev: serde_json::Value = serde_json::from_slice(&std::fs::read(dir.path().join("leverage.json")).unwrap()).unwrap();
    assert_eq!(lev["leverage_detected"], true);
}

#[test]
fn simulate_is_deterministic_given_the_seed() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = config(Pipeline::Simulate, &dir.path().join("a"));
    c.model = Some("m2".into());
    c.simulate.reps = 50;
    let a = run_experiment(&c).unwrap();
    c.out = Some(dir.path().join("b"));
    let b = run_experiment(&c).unwrap();
    assert_eq!(a.files, b.files);
    c.seed = 8;
    c.out = Some(dir.path().join("c"));
    let d = run_experiment(&c).unwrap();
    assert_ne!(a.files[0].sha256, d.files[0].sha256);
}

#[test]
fn moments_report_layout() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = config(Pipeline::Moments, dir.path());
    c.model = Some("bovespa-tar".into());
    run_experiment(&c).unwrap();
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(dir.path().join("moments.json")).unwrap()).unwrap();
    let mean = v["unconditional"]["mean"].as_f64().unwrap();
    assert!((mean - (-0.0005)).abs() < 0.00005);
    assert_eq!(v["regimes"].as_array().unwrap().len(), 2);
    assert!((v["past_data"]["mean_ar"][0].as_f64().unwrap() - (-0.0239)).abs() < 1e-12);
}

#[test]
fn data_pipelines_write_their_files_and_count_interpolations() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = with_data(config(Pipeline::FitTar, &dir.path().join("tar")), dir.path());
    c.fit_tar.max_k = 2;
    c.fit_tar.iters = 600;
    c.fit_tar.burn_in = 100;
    let m = run_experiment(&c).unwrap();
    let names: Vec<_> = m.files.iter().map(|f| f.path.clone()).collect();
    assert_eq!(
        names,
        ["nonlinearity.json", "identification.json", "posterior.csv", "posterior.json", "fitted_model.json"]
    );
    assert!(m.interpolated_points["target"] > 0 && m.interpolated_points["threshold"] > 0);
    assert!(dir.path().join("tar").join(MANIFEST_NAME).exists());

    // the fitted model feeds the other pipelines
    let fitted = dir.path().join("tar").join("fitted_model.json");
    for p in [Pipeline::Moments, Pipeline::Validate, Pipeline::Nic] {
        let mut c2 = with_data(config(p, &dir.path().join(p.name())), dir.path());
        c2.model = Some(fitted.display().to_string());
        run_experiment(&c2).unwrap_or_else(|e| panic!("{p}: {e}"));
    }
    let lines = std::fs::read_to_string(dir.path().join("tar").join("posterior.csv")).unwrap().lines().count();
    assert_eq!(lines, 1 + 500);
}

#[test]
fn bekk_and_compare_pipelines() {
    let dir = tempfile::tempdir().unwrap();
    let c = with_data(config(Pipeline::FitBekk, &dir.path().join("bekk")), dir.path());
    let m = run_experiment(&c).unwrap();
    let names: Vec<_> = m.files.iter().map(|f| f.path.clone()).collect();
    assert_eq!(names, ["bekk_fit.json", "bekk_params.json", "nis.csv", "nis_slice.csv"]);
    let nis = std::fs::read_to_string(dir.path().join("bekk").join("nis.csv")).unwrap();
    assert!(nis.starts_with("a1,a2,sigma11,sigma22,sigma12\n"));
    assert_eq!(nis.lines().count(), 1 + 41 * 41);

    let mut cmp = with_data(config(Pipeline::Compare, &dir.path().join("cmp")), dir.path());
    cmp.bekk_model = Some(dir.path().join("bekk").join("bekk_params.json").display().to_string());
    run_experiment(&cmp).unwrap();
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(dir.path().join("cmp").join("compare.json")).unwrap()).unwrap();
    assert!(v["tar"]["elasticity"]["alpha1"].is_number());
    assert!(v["mgarch"]["elasticity"]["alpha1"].is_number());
}

#[test]
fn compare_without_data_simulates_the_bekk_side() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = config(Pipeline::Compare, dir.path());
    c.compare.sim_len = 5000;
    run_experiment(&c).unwrap();
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(dir.path().join("compare.json")).unwrap()).unwrap();
    assert!((v["mgarch"]["variance"]["a1_sq"].as_f64().unwrap() - 0.2324f64.powi(2)).abs() < 1e-12);
}

#[test]
fn configuration_errors_stop_before_any_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("never");
    let mut c = config(Pipeline::Validate, &out);
    c.model = Some("m1".into());
    let e = run_experiment(&c).unwrap_err();
    assert!(matches!(e, Error::Config(_)));
    assert!(!out.exists());
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_tarlev"))
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let ok = bin().args(["moments", "--model", "m1", "--out"]).arg(dir.path().join("ok")).status().unwrap();
    assert_eq!(ok.code(), Some(0));

    let unknown = bin().arg("forecast").output().unwrap();
    assert_eq!(unknown.status.code(), Some(1));

    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, r#"{"pipeline": "forecast"}"#).unwrap();
    let bad = bin().arg("moments").arg("--config").arg(&cfg).output().unwrap();
    assert_eq!(bad.status.code(), Some(1));

    let model = dir.path().join("explosive.json");
    std::fs::write(&model, r#"{"l": 1, "regimes": [{"order": 1, "intercept": 0.0, "ar": [1.2], "h": 1.0}], "probabilities": [1.0]}"#)
        .unwrap();
    let numeric = bin().arg("moments").arg("--model").arg(&model).arg("--out").arg(dir.path().join("n")).output().unwrap();
    assert_eq!(numeric.status.code(), Some(2), "{}", String::from_utf8_lossy(&numeric.stderr));
}
