//! Behavioral tests for the `lbnet` binary: output shapes, exit codes,
//! file side effects, and error reporting.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_lbnet"))
}

fn write_file(dir: &Path, name: &str, content: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, content).unwrap();
    path
}

fn stdout_lines(out: &Output) -> Vec<String> {
    String::from_utf8(out.stdout.clone())
        .unwrap()
        .lines()
        .map(str::to_string)
        .collect()
}

fn stderr_text(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

const TRIANGLE: &str = "a b\nb c\nc a\n";

#[test]
fn stats_reports_exact_values_for_a_triangle() {
    let dir = tempfile::tempdir().unwrap();
    let data = write_file(dir.path(), "tri.txt", TRIANGLE);
    let out = bin().arg("stats").arg(&data).output().unwrap();
    assert!(out.status.success(), "stderr: {}", stderr_text(&out));
    let lines = stdout_lines(&out);
    assert_eq!(
        lines[0],
        "dataset,nodes,edges,density,avg_clustering,avg_degree,avg_path"
    );
    assert_eq!(lines[1], "tri,3,3,1.0,1.0,2.0,1.0");
    assert_eq!(lines.len(), 2);
}

#[test]
fn stats_handles_multiple_datasets_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let tri = write_file(dir.path(), "tri.txt", TRIANGLE);
    let path4 = write_file(dir.path(), "path4.txt", "a b\nb c\nc d\n");
    let out = bin()
        .args(["stats", "--format", "json"])
        .arg(&tri)
        .arg(&path4)
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", stderr_text(&out));
    let rows: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0]["dataset"], "tri");
    assert_eq!(rows[1]["dataset"], "path4");
    assert_eq!(rows[1]["nodes"], 4);
    assert_eq!(rows[1]["edges"], 3);
    // Path on 4 nodes: distances 1,1,1,2,2,3 over six pairs.
    assert!((rows[1]["avg_path"].as_f64().unwrap() - 10.0 / 6.0).abs() < 1e-12);
}

#[test]
fn predict_ranks_nonadjacent_pairs_with_stable_ties() {
    let dir = tempfile::tempdir().unwrap();
    let data = write_file(dir.path(), "path4.txt", "x y\ny z\nz w\n");
    let out = bin()
        .arg("predict")
        .arg(&data)
        .args(["--predictor", "cn", "--top", "3"])
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", stderr_text(&out));
    // Non-adjacent pairs: (x,z) and (y,w) share one neighbor, (x,w) none.
    // The two ties are ordered by node id, first appearance order.
    let lines = stdout_lines(&out);
    assert_eq!(lines[0], "u,v,score");
    assert_eq!(lines[1], "x,z,1.0");
    assert_eq!(lines[2], "y,w,1.0");
    assert_eq!(lines[3], "x,w,0.0");
}

#[test]
fn predict_scores_listed_pairs_in_file_order() {
    let dir = tempfile::tempdir().unwrap();
    let data = write_file(dir.path(), "path4.txt", "x y\ny z\nz w\n");
    let pairs = write_file(dir.path(), "pairs.txt", "# header comment\nw x\nz x\n");
    let out = bin()
        .arg("predict")
        .arg(&data)
        .args(["--predictor", "pa"])
        .arg("--pairs")
        .arg(&pairs)
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", stderr_text(&out));
    let lines = stdout_lines(&out);
    // Degrees: x=1, y=2, z=2, w=1.
    assert_eq!(lines[1], "w,x,1.0");
    assert_eq!(lines[2], "z,x,2.0");
    assert_eq!(lines.len(), 3);
}

#[test]
fn predict_rejects_unknown_nodes_in_pairs_file() {
    let dir = tempfile::tempdir().unwrap();
    let data = write_file(dir.path(), "tri.txt", TRIANGLE);
    let pairs = write_file(dir.path(), "pairs.txt", "a nosuch\n");
    let out = bin()
        .arg("predict")
        .arg(&data)
        .args(["--predictor", "lb"])
        .arg("--pairs")
        .arg(&pairs)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let err = stderr_text(&out);
    assert!(err.contains("unknown node"), "stderr: {err}");
    assert!(err.contains("nosuch"), "stderr: {err}");
}

#[test]
fn predict_conflicting_pair_sources_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let data = write_file(dir.path(), "tri.txt", TRIANGLE);
    let pairs = write_file(dir.path(), "pairs.txt", "a b\n");
    let out = bin()
        .arg("predict")
        .arg(&data)
        .args(["--predictor", "lb", "--top", "3"])
        .arg("--pairs")
        .arg(&pairs)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

const RING12: &str = "\
n0 n1\nn1 n2\nn2 n3\nn3 n4\nn4 n5\nn5 n6\nn6 n7\nn7 n8\nn8 n9\nn9 n10\nn10 n11\nn11 n0\nn0 n6\nn3 n9\n";

#[test]
fn eval_writes_rows_manifest_and_leaves_input_untouched() {
    let dir = tempfile::tempdir().unwrap();
    let data = write_file(dir.path(), "ring.txt", RING12);
    let before = std::fs::read(&data).unwrap();
    let out_dir = dir.path().join("results");
    let out = bin()
        .arg("eval")
        .arg(&data)
        .args(["--modes", "missing", "--fractions", "0.5", "--trials", "3"])
        .args(["--method", "sampled", "--samples", "2000"])
        .args(["--name", "tiny net"])
        .arg("--out-dir")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", stderr_text(&out));
    assert_eq!(std::fs::read(&data).unwrap(), before);

    let csv_path = out_dir.join("tiny_net_eval.csv");
    let csv = std::fs::read(&csv_path).unwrap();
    assert_eq!(csv, out.stdout, "stdout rows and the CSV file must agree");
    let lines = stdout_lines(&out);
    assert_eq!(
        lines[0],
        "dataset,predictor,mode,fraction,trials,auc_mean,auc_std,method,comparisons"
    );
    let predictors: Vec<&str> = lines[1..]
        .iter()
        .map(|l| l.split(',').nth(1).unwrap())
        .collect();
    assert_eq!(predictors, ["lb", "pa", "cn", "aa", "ra"]);
    assert!(lines[1..].iter().all(|l| l.starts_with("tiny net,")));
    assert!(lines[1..].iter().all(|l| l.contains(",sampled,2000")));

    let manifest: serde_json::Value =
        serde_json::from_slice(&std::fs::read(out_dir.join("tiny_net_manifest.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["tool"], "lbnet");
    assert_eq!(manifest["base_seed"], 42);
    assert_eq!(manifest["config"]["trials"], 3);
    assert_eq!(manifest["failed_cells"].as_array().unwrap().len(), 0);
    let recorded = manifest["dataset"]["sha256"].as_str().unwrap();
    let recomputed = {
        use sha2::Digest;
        format!("{:x}", sha2::Sha256::digest(&before))
    };
    assert_eq!(recorded, recomputed);
}

#[test]
fn eval_json_stdout_keeps_csv_file() {
    let dir = tempfile::tempdir().unwrap();
    let data = write_file(dir.path(), "ring.txt", RING12);
    let out_dir = dir.path().join("results");
    let out = bin()
        .arg("eval")
        .arg(&data)
        .args(["--modes", "missing", "--fractions", "0.5", "--trials", "2"])
        .args(["--method", "sampled", "--samples", "1000", "--format", "json"])
        .arg("--out-dir")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", stderr_text(&out));
    let rows: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(rows.as_array().unwrap().len(), 5);
    let csv = std::fs::read_to_string(out_dir.join("ring_eval.csv")).unwrap();
    assert!(csv.starts_with("dataset,predictor,"));
}

#[test]
fn eval_runs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let data = write_file(dir.path(), "ring.txt", RING12);
    let run = |out_dir: &Path, threads: &str| {
        let out = bin()
            .args(["--threads", threads, "eval"])
            .arg(&data)
            .args(["--modes", "missing,spurious", "--fractions", "0.3", "--trials", "4"])
            .args(["--seed", "9", "--method", "sampled", "--samples", "1000"])
            .arg("--out-dir")
            .arg(out_dir)
            .output()
            .unwrap();
        assert!(out.status.success(), "stderr: {}", stderr_text(&out));
        std::fs::read(out_dir.join("ring_eval.csv")).unwrap()
    };
    let first = run(&dir.path().join("r1"), "1");
    let second = run(&dir.path().join("r2"), "2");
    assert_eq!(first, second);
}

#[test]
fn eval_reports_failed_cells_and_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    // Complete graph: spurious mode has no absent pairs to inject.
    let mut k6 = String::new();
    for u in 0..6 {
        for v in (u + 1)..6 {
            k6.push_str(&format!("v{u} v{v}\n"));
        }
    }
    let data = write_file(dir.path(), "k6.txt", &k6);
    let out_dir = dir.path().join("results");
    let out = bin()
        .arg("eval")
        .arg(&data)
        .args(["--modes", "spurious", "--predictors", "lb", "--fractions", "0.5"])
        .args(["--trials", "2"])
        .arg("--out-dir")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr_text(&out).contains("cell failed"));
    let manifest: serde_json::Value =
        serde_json::from_slice(&std::fs::read(out_dir.join("k6_manifest.json")).unwrap()).unwrap();
    let failed = manifest["failed_cells"].as_array().unwrap();
    assert_eq!(failed.len(), 1);
    assert_eq!(failed[0]["predictor"], "lb");
    let csv = std::fs::read_to_string(out_dir.join("k6_eval.csv")).unwrap();
    assert_eq!(csv.lines().count(), 0, "no header when every cell failed");
}

#[test]
fn eval_usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let data = write_file(dir.path(), "tri.txt", TRIANGLE);
    let config = write_file(dir.path(), "exp.toml", "dataset = \"tri.txt\"\n");

    let no_dataset = bin().arg("eval").output().unwrap();
    assert_eq!(no_dataset.status.code(), Some(2));

    let both = bin()
        .arg("eval")
        .arg(&data)
        .arg("--config")
        .arg(&config)
        .output()
        .unwrap();
    assert_eq!(both.status.code(), Some(2));

    let config_plus_flag = bin()
        .args(["eval", "--trials", "3", "--config"])
        .arg(&config)
        .output()
        .unwrap();
    assert_eq!(config_plus_flag.status.code(), Some(2));
}

#[test]
fn eval_config_resolves_dataset_relative_to_the_file() {
    let dir = tempfile::tempdir().unwrap();
    write_file(dir.path(), "ring.txt", RING12);
    let config = write_file(
        dir.path(),
        "exp.toml",
        "dataset = \"ring.txt\"\ntrials = 2\nfractions = [0.4]\nmodes = [\"missing\"]\npredictors = [\"cn\"]\nmethod = \"sampled\"\nsample_comparisons = 500\n",
    );
    let out_dir = dir.path().join("results");
    let out = bin()
        .args(["eval", "--config"])
        .arg(&config)
        .arg("--out-dir")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", stderr_text(&out));
    let lines = stdout_lines(&out);
    assert_eq!(lines.len(), 2);
    assert!(lines[1].starts_with("ring,cn,missing,0.4,2,"));
}

#[test]
fn eval_rejects_unknown_config_keys() {
    let dir = tempfile::tempdir().unwrap();
    write_file(dir.path(), "tri.txt", TRIANGLE);
    let config = write_file(
        dir.path(),
        "exp.toml",
        "dataset = \"tri.txt\"\nrepetitions = 3\n",
    );
    let out = bin().args(["eval", "--config"]).arg(&config).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let err = stderr_text(&out);
    assert!(err.contains("repetitions"), "stderr: {err}");
}

#[test]
fn correlate_counts_unreachable_pairs_and_writes_points() {
    let dir = tempfile::tempdir().unwrap();
    let data = write_file(
        dir.path(),
        "twotri.txt",
        "a b\nb c\nc a\nd e\ne f\nf d\n",
    );
    let points_path = dir.path().join("points.csv");
    let out = bin()
        .arg("correlate")
        .arg(&data)
        .args(["--x", "distance", "--y", "cn", "--pairs", "all"])
        .arg("--points")
        .arg(&points_path)
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", stderr_text(&out));
    let lines = stdout_lines(&out);
    assert_eq!(
        lines[0],
        "dataset,x,y,pairs,n_points,n_excluded,pearson,spearman"
    );
    // Six within-triangle pairs remain; nine cross-triangle pairs have no
    // path. Both columns are constant, so the coefficients are undefined.
    assert_eq!(lines[1], "twotri,distance,cn,all,6,9,,");

    let points = std::fs::read_to_string(&points_path).unwrap();
    let mut point_lines = points.lines();
    assert_eq!(point_lines.next(), Some("u,v,distance,cn"));
    assert_eq!(point_lines.count(), 6);
}

#[test]
fn correlate_rejects_distance_on_y() {
    let dir = tempfile::tempdir().unwrap();
    let data = write_file(dir.path(), "tri.txt", TRIANGLE);
    let out = bin()
        .arg("correlate")
        .arg(&data)
        .args(["--x", "lb", "--y", "distance"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr_text(&out).contains("--x"));
}

#[test]
fn correlate_rejects_malformed_pair_filter() {
    let dir = tempfile::tempdir().unwrap();
    let data = write_file(dir.path(), "tri.txt", TRIANGLE);
    let out = bin()
        .arg("correlate")
        .arg(&data)
        .args(["--x", "lb", "--y", "pa", "--pairs", "some"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr_text(&out).contains("pair filter"));
}
