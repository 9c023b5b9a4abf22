//! End-to-end tests of the command-line surface: exit codes, file outputs,
//! and reproducibility across reruns and worker counts.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use mwsp_core::tudataset::write_tudataset;
use mwsp_core::{fixtures, GraphDataset};

fn mwsp() -> Command {
    Command::new(env!("CARGO_BIN_EXE_mwsp"))
}

fn run(args: &[&str]) -> Output {
    mwsp().args(args).output().expect("binary runs")
}

fn synth_dataset() -> GraphDataset {
    let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(1234);
    let ds = fixtures::random_dataset(&mut rng, 16, 8);
    GraphDataset::new("SYNTH", ds.graphs().to_vec(), ds.class_labels().to_vec()).unwrap()
}

fn write_synth(dir: &Path) -> PathBuf {
    let root = dir.join("SYNTH");
    write_tudataset(&synth_dataset(), &root).unwrap();
    dir.to_path_buf()
}

fn masked_json(path: &Path, drop: &[&str]) -> serde_json::Value {
    let text = std::fs::read_to_string(path).unwrap();
    let mut value: serde_json::Value = serde_json::from_str(&text).unwrap();
    if let Some(map) = value.as_object_mut() {
        for key in drop {
            map.remove(*key);
        }
    }
    value
}

#[test]
fn missing_dataset_exits_with_two() {
    let out = run(&["stats", "--data", "/nonexistent-root", "--name", "NOPE"]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("NOPE_graph_indicator.txt"), "{stderr}");
}

#[test]
fn unknown_variant_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let root = write_synth(dir.path());
    let out = run(&[
        "gram",
        "--data",
        root.to_str().unwrap(),
        "--name",
        "SYNTH",
        "--variant",
        "bogus",
        "--out",
        dir.path().join("g.csv").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn stats_prints_json_and_text() {
    let dir = tempfile::tempdir().unwrap();
    let root = write_synth(dir.path());
    let out = run(&["stats", "--data", root.to_str().unwrap(), "--name", "SYNTH"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("SYNTH"));
    let json_start = stdout.find('{').unwrap();
    let report: serde_json::Value = serde_json::from_str(&stdout[json_start..]).unwrap();
    assert_eq!(report["size"], 16);
}

#[test]
fn surrogate_labels_require_override_on_labeled_data() {
    let dir = tempfile::tempdir().unwrap();
    let root = write_synth(dir.path());
    let refused = run(&[
        "stats",
        "--data",
        root.to_str().unwrap(),
        "--name",
        "SYNTH",
        "--labels",
        "degree",
    ]);
    assert_eq!(refused.status.code(), Some(2));
    let allowed = run(&[
        "stats",
        "--data",
        root.to_str().unwrap(),
        "--name",
        "SYNTH",
        "--labels",
        "degree",
        "--override-labels",
    ]);
    assert_eq!(allowed.status.code(), Some(0));
}

#[test]
fn gram_outputs_are_reproducible_across_worker_counts() {
    let dir = tempfile::tempdir().unwrap();
    let root = write_synth(dir.path());
    let root = root.to_str().unwrap();
    let csv_a = dir.path().join("a.csv");
    let csv_b = dir.path().join("b.csv");
    for (out_path, jobs) in [(&csv_a, "1"), (&csv_b, "2")] {
        let out = run(&[
            "gram", "--data", root, "--name", "SYNTH", "--variant", "mwsp", "--d", "2",
            "--k", "1", "--lambda", "0.1", "--out", out_path.to_str().unwrap(),
            "--jobs", jobs,
        ]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let a = std::fs::read(&csv_a).unwrap();
    let b = std::fs::read(&csv_b).unwrap();
    assert_eq!(a, b, "gram CSV bytes differ across --jobs");
    assert_eq!(
        masked_json(&csv_a.with_extension("json"), &["wall_time_seconds"]),
        masked_json(&csv_b.with_extension("json"), &["wall_time_seconds"])
    );
}

#[test]
fn gram_memory_guard_refuses_with_a_suggestion() {
    let dir = tempfile::tempdir().unwrap();
    let root = write_synth(dir.path());
    let out = run(&[
        "gram",
        "--data",
        root.to_str().unwrap(),
        "--name",
        "SYNTH",
        "--k",
        "6",
        "--mem-limit-mb",
        "0",
        "--out",
        dir.path().join("g.csv").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("smaller k"), "{stderr}");
}

#[test]
fn cv_reports_are_reproducible_for_a_seed() {
    let dir = tempfile::tempdir().unwrap();
    let root = write_synth(dir.path());
    let root = root.to_str().unwrap();
    let out_a = dir.path().join("cv_a.json");
    let out_b = dir.path().join("cv_b.json");
    for (path, jobs) in [(&out_a, "2"), (&out_b, "1")] {
        let out = run(&[
            "cv", "--data", root, "--name", "SYNTH", "--variant", "mwsp", "--folds", "4",
            "--repeats", "2", "--seed", "9", "--d-grid", "1,2", "--k-grid", "0,1",
            "--lambda-grid", "0.1,1", "--c-grid", "1,10", "--out",
            path.to_str().unwrap(), "--jobs", jobs,
        ]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    }
    assert_eq!(
        masked_json(&out_a, &["timings"]),
        masked_json(&out_b, &["timings"])
    );
}

#[test]
fn cv_fixed_bypasses_selection() {
    let dir = tempfile::tempdir().unwrap();
    let root = write_synth(dir.path());
    let out_path = dir.path().join("cv.json");
    let out = run(&[
        "cv",
        "--data",
        root.to_str().unwrap(),
        "--name",
        "SYNTH",
        "--folds",
        "4",
        "--repeats",
        "1",
        "--fixed",
        "d=2,k=1,lambda=0.5,C=10",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = masked_json(&out_path, &[]);
    assert_eq!(report["chosen_params"][0][0]["d"], 2);
    assert_eq!(report["chosen_params"][0][0]["lambda"], 0.5);
}

#[test]
fn too_many_folds_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let root = write_synth(dir.path());
    let out = run(&[
        "cv",
        "--data",
        root.to_str().unwrap(),
        "--name",
        "SYNTH",
        "--folds",
        "200",
        "--out",
        dir.path().join("cv.json").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("folds"));
}

#[test]
fn oracle_command_passes_on_a_fresh_checkout() {
    let out = run(&["oracle", "--transport-samples", "40", "--tree-samples", "80"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("all oracle checks passed"));
    assert!(!stdout.contains("[FAIL]"));
}

#[test]
fn wsp_gram_equals_mwsp_at_k_zero_through_the_cli() {
    let dir = tempfile::tempdir().unwrap();
    let root = write_synth(dir.path());
    let root = root.to_str().unwrap();
    let wsp = dir.path().join("wsp.csv");
    let mwsp = dir.path().join("mwsp0.csv");
    for (variant, path) in [("wsp", &wsp), ("mwsp", &mwsp)] {
        let out = run(&[
            "gram", "--data", root, "--name", "SYNTH", "--variant", variant, "--d", "2",
            "--k", "0", "--lambda", "0.2", "--out", path.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
    }
    assert_eq!(std::fs::read(&wsp).unwrap(), std::fs::read(&mwsp).unwrap());
}
