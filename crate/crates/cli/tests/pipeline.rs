use std::path::Path;
use std::process::Command;

use morpho_pipeline::{cmd_classify, cmd_features, cmd_synth, run_all, PipelineConfig, PipelineError, SynthConfig};

fn small(out: &Path) -> PipelineConfig {
    PipelineConfig {
        out: out.to_path_buf(),
        repeats: 2,
        synth: SynthConfig { subjects: 10, rings: 5, ..SynthConfig::default() },
        workers: Some(2),
        ..PipelineConfig::default()
    }
}

fn morpho(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_morpho")).args(args).output().unwrap()
}

#[test]
fn synth_writes_two_regions_per_subject() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("nested/cohort");
    let s = cmd_synth(&out, &SynthConfig { subjects: 4, rings: 3, ..SynthConfig::default() }).unwrap();
    assert_eq!(s.files, 8);
    let offs = std::fs::read_dir(&out).unwrap().filter(|e| e.as_ref().unwrap().path().extension().is_some_and(|x| x == "off")).count();
    assert_eq!(offs, 8);
    let text = std::fs::read_to_string(&s.manifest).unwrap();
    assert_eq!(text.lines().next(), Some("subject_id,region,path,label"));
    assert_eq!(text.lines().filter(|l| l.ends_with(",AD")).count(), 4);
}

#[test]
fn flat_hexagon_is_a_fixed_point() {
    let dir = tempfile::tempdir().unwrap();
    let mesh = morpho_core::synth::make_disk::<f64>(1);
    morpho_core::mesh::io::save_off(&mesh, &dir.path().join("flat.off")).unwrap();
    std::fs::write(dir.path().join("m.csv"), "subject_id,region,path,label\nflat,left,flat.off,CN\n").unwrap();
    let cfg = PipelineConfig { manifest: Some(dir.path().join("m.csv")), out: dir.path().join("o"), ..PipelineConfig::default() };
    let s = cmd_features(&cfg).unwrap();
    let d = &s.diagnostics[0];
    assert_eq!(d.status, "ok");
    assert!(d.residual.unwrap() < 1e-6);
    let fields = std::fs::read_to_string(dir.path().join("o/features/flat/left/fields.csv")).unwrap();
    let ad_center: f64 = fields.lines().nth(1).unwrap().split(',').nth(1).unwrap().parse().unwrap();
    assert!(ad_center.abs() < 1e-12);
}

#[test]
fn bad_mesh_is_isolated_and_rerun_is_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small(dir.path());
    let s = cmd_synth(&dir.path().join("cohort"), &cfg.synth).unwrap();
    // Three faces on one edge.
    std::fs::write(
        dir.path().join("cohort/sub-0002_left.off"),
        "OFF\n5 3 0\n0 0 0\n1 0 0\n0 1 0\n0 -1 0\n0 0 1\n3 0 1 2\n3 1 0 3\n3 0 1 4\n",
    )
    .unwrap();
    let cfg = PipelineConfig { manifest: Some(s.manifest.clone()), trace: true, ..cfg };
    let first = cmd_features(&cfg).unwrap();
    assert_eq!(first.exit_code(), 1);
    assert_eq!(first.failed_subjects(), vec!["sub-0002".to_string()]);
    assert_eq!(first.diagnostics.iter().filter(|d| d.status == "ok").count(), 19);
    let log = std::fs::read_to_string(dir.path().join("features/errors.log")).unwrap();
    assert!(log.starts_with("sub-0002 left:"));
    assert!(dir.path().join("features/sub-0001/left/trace.csv").is_file());
    assert!(dir.path().join("features/sub-0001/right/circles.csv").is_file());

    let read = |p: &str| std::fs::read(dir.path().join(p)).unwrap();
    let (fields, diag) = (read("features/sub-0003/right/fields.csv"), read("features/flow_diagnostics.csv"));
    cmd_features(&PipelineConfig { workers: Some(1), ..cfg.clone() }).unwrap();
    assert_eq!(fields, read("features/sub-0003/right/fields.csv"));
    assert_eq!(diag, read("features/flow_diagnostics.csv"));

    match cmd_classify(&cfg) {
        Err(PipelineError::MissingFeatures(ids)) => assert_eq!(ids, vec!["sub-0002".to_string()]),
        other => panic!("expected missing features, got {other:?}"),
    }
}

#[test]
fn single_scale_single_repeat_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = PipelineConfig { scales: vec![4], repeats: 1, ..small(dir.path()) };
    let a = run_all(&cfg).unwrap();
    assert_eq!(a.classify.report.scales.len(), 1);
    let table = std::fs::read_to_string(dir.path().join("report/summary.csv")).unwrap();
    assert_eq!(table.lines().count(), 1 + 3);
    let json = std::fs::read(&a.classify.report_path).unwrap();
    run_all(&cfg).unwrap();
    assert_eq!(json, std::fs::read(&a.classify.report_path).unwrap());
    for f in ["confusion_scale1_mlp.csv", "roc_scale1_knn.csv", "vectors_scale1.csv", "binning_scale1.json", "welch.csv"] {
        assert!(dir.path().join("report").join(f).is_file(), "{f}");
    }
    let vectors = std::fs::read_to_string(dir.path().join("report/vectors_scale1.csv")).unwrap();
    assert!(vectors.starts_with("subject_id,label,left_AD_entropy,left_CF_entropy,left_K_entropy,right_AD_entropy"));
}

#[test]
fn binary_exit_codes_and_config_override() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c");
    let o = morpho(&["synth", "--out", out.to_str().unwrap(), "--subjects", "4", "--rings", "2"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));

    let o = morpho(&["classify", "--manifest", "/nonexistent/manifest.csv"]);
    assert_eq!(o.status.code(), Some(2));
    let o = morpho(&["classify", "--manifest", out.join("manifest.csv").to_str().unwrap(), "--scales", "0"]);
    assert_eq!(o.status.code(), Some(2));
    let o = morpho(&["classify", "--manifest", out.join("manifest.csv").to_str().unwrap(), "--classifiers", "svm"]);
    assert_eq!(o.status.code(), Some(2));

    let config = dir.path().join("cfg.json");
    std::fs::write(&config, r#"{"repeats": 1, "scales": [4, 16], "classifiers": ["lr", "mlp"], "synth": {"subjects": 6, "rings": 3}}"#).unwrap();
    let run = dir.path().join("run");
    let o = morpho(&["run-all", "--config", config.to_str().unwrap(), "--out", run.to_str().unwrap(), "--classifiers", "lr", "--workers", "1"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let report: serde_json::Value = serde_json::from_slice(&std::fs::read(run.join("report/report.json")).unwrap()).unwrap();
    assert_eq!(report["scales"].as_array().unwrap().len(), 2);
    assert_eq!(report["scales"][0]["evaluation"]["classifiers"].as_array().unwrap().len(), 1);
    assert_eq!(report["subjects"], 6);
}
