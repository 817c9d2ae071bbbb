mod common;

use std::fs;

use common::*;
use ensemble_screen::config::load_config;
use ensemble_screen::dataio::load_csv;
use ensemble_screen::harness::{emit_report, load_manifest, run_experiment};

const SMALL_RUN: &str = r#"
fusion = ["avg", "maj"]
search = "forward"
energy = "accuracy"
out_dir = "out"

[data]
path = "cohort.csv"

[cv]
k = 5
seed = 0

[[pool]]
kind = "naive_bayes"

[[pool]]
kind = "decision_tree"
"#;

fn synth_into(dir: &std::path::Path, name: &str, extra: &[&str]) -> std::process::Output {
    let path = dir.join(name);
    let mut args = vec!["synth", "--out", path.to_str().unwrap()];
    args.extend_from_slice(extra);
    run_bin(&args)
}

#[test]
fn synth_writes_reference_histogram() {
    let dir = tempfile::tempdir().unwrap();
    let out = synth_into(dir.path(), "a.csv", &[]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let data = load_csv(&dir.path().join("a.csv")).unwrap();
    assert_eq!(data.len(), 1200);
    assert_eq!(data.grade_counts(), [540, 153, 247, 260]);

    synth_into(dir.path(), "b.csv", &[]);
    assert_eq!(fs::read(dir.path().join("a.csv")).unwrap(), fs::read(dir.path().join("b.csv")).unwrap());
}

#[test]
fn synth_rejects_bad_parameters() {
    let dir = tempfile::tempdir().unwrap();
    for (args, key) in [
        (&["--proportions", "0.5,0.5,0.5"][..], "--proportions"),
        (&["--proportions", "0.5,0.6,0.1,-0.2"][..], "--proportions"),
        (&["--separation", "-1"][..], "--separation"),
        (&["--n", "0"][..], "--n"),
    ] {
        let out = synth_into(dir.path(), "x.csv", args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(stderr(&out).contains(key), "{args:?}: {}", stderr(&out));
    }
    assert!(!dir.path().join("x.csv").exists());
}

#[test]
fn validate_reports_lines() {
    let dir = tempfile::tempdir().unwrap();
    synth_into(dir.path(), "ok.csv", &["--n", "40"]);
    let ok = dir.path().join("ok.csv");
    let out = run_bin(&["validate", "--data", ok.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).ends_with(": ok\n"));

    let text = fs::read_to_string(&ok).unwrap();
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    let mut fields: Vec<&str> = lines[3].split(',').collect();
    fields[0] = "1.5";
    lines[3] = fields.join(",");
    lines[6] = lines[6].rsplitn(3, ',').nth(2).unwrap().to_string();
    let bad = dir.path().join("bad.csv");
    fs::write(&bad, lines.join("\n") + "\n").unwrap();
    let out = run_bin(&["validate", "--data", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    let err = stderr(&out);
    assert!(err.contains("bad.csv:4:") && err.contains("chi0"), "{err}");
    assert!(err.contains("bad.csv:7:") && err.contains("2 invalid row(s)"), "{err}");

    let out = run_bin(&["validate", "--data", dir.path().join("missing.csv").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn run_writes_report_files() {
    let dir = tempfile::tempdir().unwrap();
    synth_into(dir.path(), "cohort.csv", &["--n", "300"]);
    let config = write_config(dir.path(), SMALL_RUN);
    let out = run_bin(&["run", "--config", config.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let files = snapshot(&dir.path().join("out"));
    for name in [
        "manifest.json",
        "nodr_vs_dr_forward_grid.txt",
        "nodr_vs_dr_forward_grid.csv",
        "nodr_vs_dr_comparison.csv",
        "nodr_vs_dr_rosters.txt",
        "roc/nodr_vs_dr_forward_accuracy_avg.roc",
    ] {
        assert!(files.contains_key(name), "missing {name}: {:?}", files.keys());
    }
}

#[test]
fn run_rejects_unknown_fusion_rule() {
    let dir = tempfile::tempdir().unwrap();
    synth_into(dir.path(), "cohort.csv", &["--n", "100"]);
    let config = write_config(dir.path(), &SMALL_RUN.replace(r#"["avg", "maj"]"#, r#""median""#));
    let out = run_bin(&["run", "--config", config.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("fusion"), "{}", stderr(&out));
}

#[test]
fn run_missing_data_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), SMALL_RUN);
    let out = run_bin(&["run", "--config", config.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
}

#[test]
fn run_rejects_zero_threads() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), SMALL_RUN);
    let out = run_bin(&["run", "--config", config.to_str().unwrap(), "--threads", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn override_changes_only_its_key() {
    let dir = tempfile::tempdir().unwrap();
    synth_into(dir.path(), "cohort.csv", &["--n", "200"]);
    let config = write_config(dir.path(), SMALL_RUN);
    let path = config.to_str().unwrap();
    run_bin(&["run", "--config", path]);
    let base = load_manifest(&dir.path().join("out/manifest.json")).unwrap();
    let out = run_bin(&["run", "--config", path, "--override", "cv.seed=7"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let moved = load_manifest(&dir.path().join("out/manifest.json")).unwrap();
    assert_eq!(moved.config.cv.seed, 7);
    let mut restored = moved.config.clone();
    restored.cv.seed = base.config.cv.seed;
    assert_eq!(serde_json::to_string(&restored).unwrap(), serde_json::to_string(&base.config).unwrap());
}

#[test]
fn binary_matches_library_run() {
    let dir = tempfile::tempdir().unwrap();
    synth_into(dir.path(), "cohort.csv", &["--n", "200"]);
    let config = write_config(dir.path(), SMALL_RUN);
    let out = run_bin(&["run", "--config", config.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));

    let parsed = load_config(&config, &[]).unwrap();
    let report = run_experiment(&parsed).unwrap();
    let lib_dir = dir.path().join("lib");
    emit_report(&report, &lib_dir).unwrap();
    assert_eq!(snapshot(&dir.path().join("out")), snapshot(&lib_dir));
}
