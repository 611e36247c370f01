//! Acceptance checks for the whole toolchain, one test per criterion.
//!
//! Each test asserts its behavioral claim (with the tolerance pinned next
//! to the assertion), asserts its wall-clock budget where the criterion is
//! performance-sensitive, and prints a single PASS line with the headline
//! numbers when it succeeds. Run with `--nocapture` to see the lines.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use lbnet::analysis::{self, PairFilter};
use lbnet::evaluation::{
    self, auc, mix_seed, split_missing, AucMethod, AucResult, EvalSplit, ExperimentConfig,
    MethodUsed, TaskMode,
};
use lbnet::graph::{EdgeListOptions, Graph, NodeId};
use lbnet::predictors::{self, PredictorId};
use lbnet_testutil::gen;
use lbnet_testutil::naive::NaiveBlocks;
use lbnet_testutil::scorers::{ConstantScorer, HashScorer, OracleScorer};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const DATASET: &str = concat!(
    env!("CARGO_MANIFEST_DIR"),
    "/../../data/celegans_standin.txt"
);

fn load_dataset() -> Graph {
    let file = std::fs::File::open(DATASET).expect("bundled dataset present");
    Graph::parse_edge_list(std::io::BufReader::new(file), &EdgeListOptions::default())
        .expect("bundled dataset parses")
}

fn assert_budget(t0: Instant, budget: Duration, what: &str) -> Duration {
    let elapsed = t0.elapsed();
    assert!(
        elapsed < budget,
        "{what} took {elapsed:.1?}, budget is {budget:?}"
    );
    elapsed
}

#[test]
fn acceptance_01_block_scores_match_the_enumeration_oracle() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xACC1);
    let mut max_diff = 0.0f64;
    let mut pairs_checked = 0u64;
    for graph_index in 0..500u64 {
        let n = rng.gen_range(4..=30);
        let p = rng.gen_range(0.1..=0.6);
        let g = gen::gnp(n, p, mix_seed(0xACC1, graph_index));
        let oracle = NaiveBlocks::build(&g);
        for u in 0..n {
            for v in (u + 1)..n {
                let fast = predictors::lb_score(&g, u, v).unwrap();
                let slow = oracle.lb(&g, u, v);
                max_diff = max_diff.max((fast - slow).abs());
                pairs_checked += 1;
            }
        }
    }
    assert!(
        max_diff <= 1e-12,
        "fast block score drifted {max_diff:e} from the enumeration oracle"
    );
    let elapsed = assert_budget(t0, Duration::from_secs(60), "oracle comparison");
    println!(
        "acceptance 01 PASS: 500 random graphs, {pairs_checked} pairs, \
         max |fast - oracle| = {max_diff:.2e} ({elapsed:.1?})"
    );
}

#[test]
fn acceptance_02_bundled_dataset_statistics() {
    let t0 = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_lbnet"))
        .args(["stats", DATASET])
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "stats failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let stdout = String::from_utf8(out.stdout).unwrap();
    let row = stdout.lines().nth(1).expect("one data row");
    let fields: Vec<&str> = row.split(',').collect();
    let nodes: usize = fields[1].parse().unwrap();
    let edges: usize = fields[2].parse().unwrap();
    let density: f64 = fields[3].parse().unwrap();
    let clustering: f64 = fields[4].parse().unwrap();
    let avg_degree: f64 = fields[5].parse().unwrap();
    let avg_path: f64 = fields[6].parse().unwrap();

    assert_eq!(nodes, 297);
    assert_eq!(edges, 2148);
    let tol = 0.005;
    assert!((density - 0.049).abs() <= tol, "density {density}");
    assert!((clustering - 0.308).abs() <= tol, "clustering {clustering}");
    assert!((avg_degree - 14.465).abs() <= tol, "avg degree {avg_degree}");
    assert!((avg_path - 2.946).abs() <= tol, "avg path {avg_path}");
    let elapsed = assert_budget(t0, Duration::from_secs(10), "stats");
    println!(
        "acceptance 02 PASS: 297 nodes, 2148 edges, density {density:.4}, \
         clustering {clustering:.4}, degree {avg_degree:.3}, path {avg_path:.3}, \
         all within ±{tol} ({elapsed:.1?})"
    );
}

#[test]
fn acceptance_03_auc_calibration_on_reference_scorers() {
    let t0 = Instant::now();
    let g = gen::random_connected(300, 600, 5);

    let split = split_missing(&g, 0.1, 1234).unwrap();
    let constant = auc(&split, &ConstantScorer(0.7), AucMethod::Exact, 0, 0).unwrap();
    assert_eq!(constant.value, 0.5, "constant scorer must tie every pair");
    assert_eq!(constant.method, MethodUsed::Exact);

    let oracle = OracleScorer::new(split.probe.iter().copied());
    let perfect = auc(&split, &oracle, AucMethod::Exact, 0, 0).unwrap();
    assert_eq!(perfect.value, 1.0, "probe-aware scorer must win every pair");

    let trials = 100;
    let mean_random: f64 = (0..trials)
        .map(|trial| {
            let split = split_missing(&g, 0.1, mix_seed(98, trial)).unwrap();
            let scorer = HashScorer {
                seed: mix_seed(99, trial),
            };
            auc(&split, &scorer, AucMethod::Exact, 0, 0).unwrap().value
        })
        .sum::<f64>()
        / trials as f64;
    assert!(
        (0.48..=0.52).contains(&mean_random),
        "uninformed scorer mean {mean_random} outside [0.48, 0.52]"
    );
    let elapsed = assert_budget(t0, Duration::from_secs(60), "calibration");
    println!(
        "acceptance 03 PASS: constant 0.5 exactly, oracle 1.0 exactly, \
         uninformed mean {mean_random:.4} over {trials} trials ({elapsed:.1?})"
    );
}

#[test]
fn acceptance_04_hand_checked_auc_value() {
    // Four nodes, train edges (0,1) and (2,3), probe (0,2) and (1,3); the
    // remaining absent pairs (0,3) and (1,2) are the negatives. With scores
    // probe {3, 1} vs negatives {2, 0}, three of the four comparisons are
    // wins: 3>2, 3>0, 1>0, and 1<2 loses, so the AUC is exactly 3/4.
    let train = Graph::build(4, [(0, 1), (2, 3)]).unwrap();
    let split = EvalSplit {
        train,
        probe: vec![(0, 2), (1, 3)],
        mode: TaskMode::Missing,
        fraction: 0.5,
        seed: 0,
    };
    let scorer = |u: NodeId, v: NodeId| match (u.min(v), u.max(v)) {
        (0, 2) => 3.0,
        (1, 3) => 1.0,
        (0, 3) => 2.0,
        (1, 2) => 0.0,
        other => panic!("unexpected pair {other:?}"),
    };
    let out = auc(&split, &scorer, AucMethod::Exact, 0, 0).unwrap();
    assert_eq!(out.value, 0.75);
    assert_eq!(out.comparisons, 4);
    assert_eq!(out.method, MethodUsed::Exact);
    println!("acceptance 04 PASS: 2x2 hand example gives AUC 0.75 exactly");
}

fn cell(results: &[AucResult], predictor: PredictorId, fraction: f64) -> &AucResult {
    results
        .iter()
        .find(|r| r.predictor == predictor && r.fraction == fraction)
        .expect("cell present")
}

#[test]
fn acceptance_05_block_predictor_stays_ahead_as_links_disappear() {
    let t0 = Instant::now();
    let g = load_dataset();
    let mut cfg = ExperimentConfig::new(DATASET.into());
    cfg.predictors = vec![
        PredictorId::Lb,
        PredictorId::Cn,
        PredictorId::Aa,
        PredictorId::Ra,
    ];
    cfg.modes = vec![TaskMode::Missing];
    cfg.auc_method = AucMethod::Sampled;
    let trials = cfg.trials as f64;
    let report = evaluation::run_experiment_on(&g, &cfg).unwrap();
    let results: Vec<AucResult> = report
        .cells
        .into_iter()
        .map(|c| c.outcome.expect("no cell may fail"))
        .collect();

    for &fraction in &cfg.fractions {
        let lb = cell(&results, PredictorId::Lb, fraction);
        assert!(
            lb.mean > 0.5,
            "block predictor fell to chance at fraction {fraction}: {}",
            lb.mean
        );
    }

    let lb = cell(&results, PredictorId::Lb, 0.9);
    let mut gaps = Vec::new();
    for other in [PredictorId::Cn, PredictorId::Aa, PredictorId::Ra] {
        let rival = cell(&results, other, 0.9);
        let gap = lb.mean - rival.mean;
        let pooled_se =
            (lb.std_dev.powi(2) / trials + rival.std_dev.powi(2) / trials).sqrt();
        assert!(
            gap > 2.0 * pooled_se,
            "at fraction 0.9, lb ({:.4}) does not clear {} ({:.4}) by 2 pooled SE ({:.4})",
            lb.mean,
            other.name(),
            rival.mean,
            pooled_se
        );
        gaps.push(format!("{}+{:.3}", other.name(), gap));
    }
    let elapsed = assert_budget(t0, Duration::from_secs(900), "missing-link sweep");
    println!(
        "acceptance 05 PASS: lb above 0.5 at all 9 fractions; at 0.9 it leads \
         {} with 100 trials each ({elapsed:.1?})",
        gaps.join(", ")
    );
}

#[test]
fn acceptance_06_correlation_directions_on_the_bundled_dataset() {
    let t0 = Instant::now();
    let g = load_dataset();
    let filter = PairFilter::Sample {
        count: 20_000,
        seed: 11,
    };

    let degree_link = analysis::score_correlation(&g, PredictorId::Lb, PredictorId::Pa, filter)
        .unwrap()
        .report;
    let rho_pa = degree_link.spearman.expect("non-constant columns");
    assert!(
        rho_pa > 0.0,
        "block score should rise with the degree product, got {rho_pa}"
    );

    let distance_link = analysis::distance_correlation(&g, PredictorId::Lb, filter)
        .unwrap()
        .report;
    let rho_dist = distance_link.spearman.expect("non-constant columns");
    assert!(
        rho_dist < 0.0,
        "block score should fall with hop distance, got {rho_dist}"
    );
    let elapsed = assert_budget(t0, Duration::from_secs(600), "correlations");
    println!(
        "acceptance 06 PASS: spearman(lb, pa) = {rho_pa:.3} > 0, \
         spearman(distance, lb) = {rho_dist:.3} < 0 on {} sampled pairs ({elapsed:.1?})",
        degree_link.n_points
    );
}

#[test]
fn acceptance_07_one_sampled_cell_finishes_quickly() {
    let t0 = Instant::now();
    let g = load_dataset();
    let mut cfg = ExperimentConfig::new(DATASET.into());
    cfg.modes = vec![TaskMode::Missing];
    cfg.fractions = vec![0.1];
    cfg.auc_method = AucMethod::Sampled;
    let report = evaluation::run_experiment_on(&g, &cfg).unwrap();
    assert_eq!(report.cells.len(), 5);
    for cell in &report.cells {
        let result = cell.outcome.as_ref().expect("cell succeeded");
        assert_eq!(result.trials.len(), 100);
        assert_eq!(result.method, MethodUsed::Sampled);
    }
    let elapsed = assert_budget(t0, Duration::from_secs(120), "single cell");
    println!(
        "acceptance 07 PASS: five predictors, 100 sampled trials at fraction 0.1 \
         in {elapsed:.1?} (budget 120s)"
    );
}

#[test]
fn acceptance_08_identical_eval_runs_write_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let run = |sub: &str| {
        let out_dir = dir.path().join(sub);
        let out = Command::new(env!("CARGO_BIN_EXE_lbnet"))
            .args(["eval", DATASET])
            .args(["--modes", "missing,spurious", "--fractions", "0.3,0.7"])
            .args(["--trials", "5", "--method", "sampled", "--samples", "20000"])
            .arg("--out-dir")
            .arg(&out_dir)
            .output()
            .unwrap();
        assert!(
            out.status.success(),
            "eval failed: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        std::fs::read(out_dir.join("celegans_standin_eval.csv")).unwrap()
    };
    let first = run("first");
    let second = run("second");
    assert!(!first.is_empty());
    assert_eq!(first, second, "result files differ between identical runs");
    println!(
        "acceptance 08 PASS: two identical runs wrote byte-identical result \
         files ({} bytes)",
        first.len()
    );
}

#[test]
fn bundled_dataset_is_where_the_tests_expect_it() {
    assert!(
        Path::new(DATASET).exists(),
        "expected the bundled dataset at {DATASET}"
    );
}
