//! End-to-end checks of the command-line surface: artifact contents, config
//! file merging, the exit-code contract, and format round trips.

use std::path::Path;
use std::process::Command;

fn origami() -> Command {
    Command::new(env!("CARGO_BIN_EXE_origami"))
}

fn write_loss(dir: &Path) -> String {
    let path = dir.join("loss.csv");
    // Outcomes 1 and 2 price identically for both actions.
    std::fs::write(
        &path,
        "north,south,east,west\n0.9,0.4,0.4,0.1\n0.2,0.5,0.5,0.8\n",
    )
    .unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn fold_writes_partition_tree_and_folded_loss() {
    let dir = tempfile::tempdir().unwrap();
    let loss = write_loss(dir.path());
    let out = dir.path().join("run");
    let output = origami()
        .args([
            "fold", "--loss", &loss, "--objective", "vertex", "--cells", "3", "--seed", "1",
            "--out",
            out.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(output.status.success());

    let partition: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("partition.json")).unwrap())
            .unwrap();
    assert_eq!(partition["schema"], 1);
    let cells = partition["cells"].as_array().unwrap();
    assert_eq!(cells.len(), 3);
    // The duplicate columns fold first, and the labels carry over.
    assert!(partition["labels"]
        .as_array()
        .unwrap()
        .iter()
        .any(|l| l == "south+east"));

    let tree: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("fold_tree.json")).unwrap())
            .unwrap();
    assert_eq!(tree["schema"], 1);
    assert_eq!(tree["leaf_count"], 4);
    assert_eq!(tree["merges"].as_array().unwrap().len(), 1);

    let folded = std::fs::read_to_string(out.join("folded_loss.csv")).unwrap();
    assert_eq!(folded.lines().count(), 3); // header + 2 actions

    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("manifest.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["command"], "fold");
    assert_eq!(manifest["config"]["seed"], 1);
    assert_eq!(manifest["config"]["objective"]["kind"], "vertex");
}

#[test]
fn manifest_records_flags_verbatim() {
    let dir = tempfile::tempdir().unwrap();
    let loss = write_loss(dir.path());
    let out = dir.path().join("run");
    origami()
        .args([
            "fold", "--loss", &loss, "--objective", "integral", "--mc-samples", "1000",
            "--seed", "7", "--cells", "2", "--out",
            out.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("manifest.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["config"]["objective"]["kind"], "integral");
    assert_eq!(manifest["config"]["objective"]["mc_samples"], 1000);
    assert_eq!(manifest["config"]["seed"], 7);
}

#[test]
fn gap_command_matches_the_library_exactly() {
    use origami::{cumulative_gap, sample_simplex, SetExtension};

    let dir = tempfile::tempdir().unwrap();
    let loss_path = dir.path().join("loss.csv");
    std::fs::write(&loss_path, "1,0,0\n0,0,1\n").unwrap();
    let out = dir.path().join("run");
    origami()
        .args([
            "fold",
            "--loss",
            loss_path.to_str().unwrap(),
            "--folds",
            "1",
            "--seed",
            "2",
            "--out",
            out.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    let output = origami()
        .args([
            "gap",
            "--loss",
            loss_path.to_str().unwrap(),
            "--tree",
            out.join("fold_tree.json").to_str().unwrap(),
            "--probe-samples",
            "10000",
            "--seed",
            "6",
        ])
        .output()
        .unwrap();
    assert!(output.status.success());
    let text = String::from_utf8(output.stdout).unwrap();
    let cli_mean: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("mean gap: "))
        .unwrap()
        .parse()
        .unwrap();

    let loss = origami::io::load_loss(&loss_path).unwrap();
    let tree =
        origami::io::read_tree_json(std::fs::File::open(out.join("fold_tree.json")).unwrap())
            .unwrap();
    let probe = sample_simplex(10_000, 3, 6).unwrap();
    let lib_mean = cumulative_gap(&tree, &loss.matrix, &probe, SetExtension::WorstCase).unwrap();
    assert_eq!(cli_mean, lib_mean);
}

#[test]
fn gap_on_duplicate_column_tree_is_zero() {
    let dir = tempfile::tempdir().unwrap();
    let loss = write_loss(dir.path());
    let out = dir.path().join("run");
    origami()
        .args([
            "fold", "--loss", &loss, "--folds", "1", "--seed", "2", "--out",
            out.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    let output = origami()
        .args([
            "gap",
            "--loss",
            &loss,
            "--tree",
            out.join("fold_tree.json").to_str().unwrap(),
            "--probe-samples",
            "2000",
            "--seed",
            "3",
        ])
        .output()
        .unwrap();
    assert!(output.status.success());
    let text = String::from_utf8(output.stdout).unwrap();
    let mean: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("mean gap: "))
        .unwrap()
        .parse()
        .unwrap();
    assert!(mean.abs() < 1e-12, "gap {mean} for a free fold");
}

#[test]
fn config_file_supplies_flags_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let loss = write_loss(dir.path());
    let out = dir.path().join("run");
    let config = dir.path().join("run.json");
    std::fs::write(
        &config,
        serde_json::json!({
            "loss": loss,
            "objective": "vertex",
            "cells": 2,
            "seed": 9,
            "out": out,
        })
        .to_string(),
    )
    .unwrap();
    // --cells 3 overrides the file's 2.
    let output = origami()
        .args(["fold", "--config", config.to_str().unwrap(), "--cells", "3"])
        .output()
        .unwrap();
    assert!(output.status.success());
    let partition: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("partition.json")).unwrap())
            .unwrap();
    assert_eq!(partition["cells"].as_array().unwrap().len(), 3);
}

#[test]
fn seed_falls_back_to_environment() {
    let dir = tempfile::tempdir().unwrap();
    let loss = write_loss(dir.path());
    let out_env = dir.path().join("env");
    let out_flag = dir.path().join("flag");
    origami()
        .env("ORIGAMI_SEED", "77")
        .args(["fold", "--loss", &loss, "--cells", "2", "--out", out_env.to_str().unwrap()])
        .output()
        .unwrap();
    origami()
        .args([
            "fold", "--loss", &loss, "--cells", "2", "--seed", "77", "--out",
            out_flag.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(
        std::fs::read(out_env.join("fold_tree.json")).unwrap(),
        std::fs::read(out_flag.join("fold_tree.json")).unwrap()
    );
}

#[test]
fn exit_codes_follow_the_contract() {
    let dir = tempfile::tempdir().unwrap();
    let loss = write_loss(dir.path());

    // 2: malformed input.
    let bad_csv = dir.path().join("bad.csv");
    std::fs::write(&bad_csv, "0.1,oops\n").unwrap();
    let output = origami()
        .args([
            "fold",
            "--loss",
            bad_csv.to_str().unwrap(),
            "--cells",
            "1",
            "--out",
            dir.path().join("x1").to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("line"), "diagnostics missing position: {stderr}");

    // 2: missing file.
    let output = origami()
        .args(["fold", "--loss", "nope.csv", "--cells", "1", "--out", "x"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));

    // 3: unsatisfiable stop rule.
    let output = origami()
        .args([
            "fold", "--loss", &loss, "--cells", "9", "--out",
            dir.path().join("x2").to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(3));

    // 3: contradictory stop flags.
    let output = origami()
        .args([
            "fold", "--loss", &loss, "--cells", "2", "--folds", "1", "--out",
            dir.path().join("x3").to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(3));

    // 3: unknown objective.
    let output = origami()
        .args([
            "fold", "--loss", &loss, "--objective", "psychic", "--cells", "2", "--out",
            dir.path().join("x4").to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(3));
}

#[test]
fn manifest_written_even_when_the_run_fails() {
    let dir = tempfile::tempdir().unwrap();
    let loss = write_loss(dir.path());
    let out = dir.path().join("failed");
    let output = origami()
        .args([
            "fold",
            "--loss",
            &loss,
            "--objective",
            "surrogate",
            "--surrogate-model",
            "missing-model.json",
            "--cells",
            "2",
            "--out",
            out.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(!output.status.success());
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("manifest.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["status"], "error");
}

#[test]
fn surrogate_train_eval_and_latency_cycle() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("model.json");
    let output = origami()
        .args([
            "surrogate", "train", "--actions", "2", "--outcomes", "3", "--examples", "200",
            "--mc-samples", "60", "--epochs", "8", "--seed", "5", "--out",
            model.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(
        output.status.success(),
        "{}",
        String::from_utf8_lossy(&output.stderr)
    );

    let report = dir.path().join("eval.json");
    let output = origami()
        .args([
            "surrogate", "eval", "--model", model.to_str().unwrap(), "--examples", "50",
            "--mc-samples", "60", "--seed", "6", "--out", report.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(output.status.success());
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(report["examples"], 50);
    assert!(report["argmin_accuracy"].as_f64().unwrap() >= 0.0);

    let latency = dir.path().join("latency.csv");
    let output = origami()
        .args([
            "surrogate", "bench", "--actions", "2", "--outcomes", "3", "--methods",
            "integral,vertex,surrogate", "--model", model.to_str().unwrap(), "--mc-samples",
            "200", "--repeats", "7", "--seed", "2", "--out", latency.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(output.status.success());
    let text = std::fs::read_to_string(&latency).unwrap();
    assert_eq!(text.lines().count(), 4); // header + 3 methods
}

#[test]
fn bench_oracle_reports_agreement() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("oracle");
    let output = origami()
        .args([
            "bench", "oracle", "--instances", "3", "--mc-samples", "20000", "--step", "0.02",
            "--seed", "1", "--out", out.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(output.status.success());
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("summary.json")).unwrap())
            .unwrap();
    assert_eq!(summary["instances"], 3);
    assert!(summary["worst_deviation_in_se"].as_f64().unwrap() < 4.0);
}

#[test]
fn inspect_emits_the_upper_triangle() {
    let dir = tempfile::tempdir().unwrap();
    let loss = write_loss(dir.path());
    let out = dir.path().join("matrix.csv");
    let output = origami()
        .args([
            "inspect", "--loss", &loss, "--objective", "vertex", "--out",
            out.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(output.status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows.len(), 4);
    // Sentinel cells are empty; the duplicate pair scores zero.
    assert!(rows[3].split(',').all(|c| c.is_empty()));
    assert_eq!(rows[1].split(',').nth(2).unwrap(), "0");
}
