//! Missing-link and spurious-link evaluation with AUC scoring.
//!
//! Missing mode removes a fraction of edges into a probe set and asks a
//! predictor to rank those held-out pairs above pairs that were never edges.
//! Spurious mode injects never-edges into the graph and asks the predictor
//! to rank the genuine edges above the injected ones. Either way the AUC is
//! the probability that a positive outscores a negative, ties counting half,
//! computed exactly over all positive/negative combinations or estimated
//! from independent sampled comparisons.

use std::collections::HashSet;
use std::path::PathBuf;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::graph::{Delimiter, EdgeListOptions, Graph, GraphError, NodeId};
use crate::predictors::{self, PredictError, PredictorId, ScoreTable, DEFAULT_EAGER_CAP};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("fraction {0} must lie strictly between 0 and 1")]
    BadFraction(f64),
    #[error("probe would be empty: round({fraction} * {edges}) = 0")]
    EmptyProbe { fraction: f64, edges: usize },
    #[error("training graph would be empty: probe takes all {edges} edges")]
    EmptyTrain { edges: usize },
    #[error("not enough absent pairs: need {needed}, graph has {available}")]
    NotEnoughNonEdges { needed: u64, available: u64 },
    #[error("no positive/negative comparisons are possible")]
    NoComparisons,
    #[error("sample_comparisons must be positive for sampled AUC")]
    ZeroSamples,
    #[error("experiment config lists no {0}")]
    EmptyConfigList(&'static str),
    #[error("experiment config sets trials = 0")]
    ZeroTrials,
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Predict(#[from] PredictError),
}

/// Which direction the protocol probes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TaskMode {
    /// Remove real edges; they should outscore never-edges.
    Missing,
    /// Inject fake edges; real edges should outscore them.
    Spurious,
}

impl TaskMode {
    pub const ALL: [TaskMode; 2] = [TaskMode::Missing, TaskMode::Spurious];

    pub fn name(self) -> &'static str {
        match self {
            TaskMode::Missing => "missing",
            TaskMode::Spurious => "spurious",
        }
    }
}

impl std::fmt::Display for TaskMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for TaskMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "missing" => Ok(TaskMode::Missing),
            "spurious" => Ok(TaskMode::Spurious),
            other => Err(format!(
                "unknown mode {other:?} (expected missing or spurious)"
            )),
        }
    }
}

/// One train/probe division of a graph.
///
/// The training graph always keeps the full node set, so node ids stay
/// comparable across the split. In missing mode the probe holds removed real
/// edges; in spurious mode it holds the injected never-edges and `train`
/// contains them.
#[derive(Debug, Clone)]
pub struct EvalSplit {
    pub train: Graph,
    /// Normalized `(u, v)` with `u < v`, sorted ascending.
    pub probe: Vec<(NodeId, NodeId)>,
    pub mode: TaskMode,
    pub fraction: f64,
    pub seed: u64,
}

/// splitmix64 finalizer applied to `base XOR index`; used everywhere a
/// stream of per-trial seeds is derived from one base seed.
pub fn mix_seed(base: u64, index: u64) -> u64 {
    let mut z = (base ^ index).wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn check_fraction(fraction: f64) -> Result<(), EvalError> {
    if fraction.is_finite() && fraction > 0.0 && fraction < 1.0 {
        Ok(())
    } else {
        Err(EvalError::BadFraction(fraction))
    }
}

fn probe_size(fraction: f64, edges: usize) -> Result<usize, EvalError> {
    let count = (fraction * edges as f64).round() as usize;
    if count == 0 {
        return Err(EvalError::EmptyProbe { fraction, edges });
    }
    Ok(count)
}

fn rebuild(original: &Graph, edges: Vec<(NodeId, NodeId)>) -> Graph {
    let n = original.num_nodes();
    match original.labels() {
        Some(labels) => Graph::build_with_labels(n, edges, labels.to_vec()),
        None => Graph::build(n, edges),
    }
    .expect("edges come from a valid graph")
}

/// Removes `round(fraction * |E|)` uniformly chosen edges into the probe.
/// All nodes stay in the training graph even if their degree drops to zero.
pub fn split_missing(original: &Graph, fraction: f64, seed: u64) -> Result<EvalSplit, EvalError> {
    check_fraction(fraction)?;
    let m = original.num_edges();
    let count = probe_size(fraction, m)?;
    if count >= m {
        return Err(EvalError::EmptyTrain { edges: m });
    }
    let mut edges: Vec<(NodeId, NodeId)> = original.edges().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..count {
        let j = rng.gen_range(i..edges.len());
        edges.swap(i, j);
    }
    let mut probe: Vec<(NodeId, NodeId)> = edges[..count].to_vec();
    probe.sort_unstable();
    let train = rebuild(original, edges[count..].to_vec());
    Ok(EvalSplit {
        train,
        probe,
        mode: TaskMode::Missing,
        fraction,
        seed,
    })
}

/// Adds `round(fraction * |E|)` uniformly chosen never-edges to the graph,
/// recording them as the probe.
pub fn add_spurious(original: &Graph, fraction: f64, seed: u64) -> Result<EvalSplit, EvalError> {
    check_fraction(fraction)?;
    let n = original.num_nodes();
    let m = original.num_edges();
    let count = probe_size(fraction, m)?;
    let total_pairs = n as u64 * (n as u64 - 1) / 2;
    let available = total_pairs - m as u64;
    if count as u64 > available {
        return Err(EvalError::NotEnoughNonEdges {
            needed: count as u64,
            available,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut probe: Vec<(NodeId, NodeId)>;
    if available <= 2 * count as u64 {
        // Non-edges are scarce; enumerate them and shuffle instead of
        // rejection sampling.
        let mut pool: Vec<(NodeId, NodeId)> = Vec::with_capacity(available as usize);
        for u in 0..n {
            for v in (u + 1)..n {
                if !original.has_edge(u, v) {
                    pool.push((u, v));
                }
            }
        }
        for i in 0..count {
            let j = rng.gen_range(i..pool.len());
            pool.swap(i, j);
        }
        probe = pool[..count].to_vec();
    } else {
        let mut chosen: HashSet<(NodeId, NodeId)> = HashSet::with_capacity(count);
        probe = Vec::with_capacity(count);
        while probe.len() < count {
            let u = rng.gen_range(0..n);
            let v = rng.gen_range(0..n);
            if u == v {
                continue;
            }
            let pair = (u.min(v), u.max(v));
            if original.has_edge(pair.0, pair.1) || !chosen.insert(pair) {
                continue;
            }
            probe.push(pair);
        }
    }
    probe.sort_unstable();
    let train_edges: Vec<(NodeId, NodeId)> =
        original.edges().chain(probe.iter().copied()).collect();
    let train = rebuild(original, train_edges);
    Ok(EvalSplit {
        train,
        probe,
        mode: TaskMode::Spurious,
        fraction,
        seed,
    })
}

/// How the AUC is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AucMethod {
    /// Exact when the comparison count fits [`DEFAULT_EXACT_BUDGET`],
    /// sampled otherwise.
    Auto,
    Exact,
    Sampled,
}

/// The method actually used for one AUC computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodUsed {
    Exact,
    Sampled,
}

impl MethodUsed {
    pub fn name(self) -> &'static str {
        match self {
            MethodUsed::Exact => "exact",
            MethodUsed::Sampled => "sampled",
        }
    }
}

impl std::fmt::Display for MethodUsed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

pub const DEFAULT_SAMPLE_COMPARISONS: u64 = 100_000;
/// Largest positive-negative product evaluated exactly under
/// [`AucMethod::Auto`].
pub const DEFAULT_EXACT_BUDGET: u64 = 50_000_000;

/// Anything that can score an unordered pair of distinct, valid nodes.
pub trait PairScorer {
    fn pair_score(&self, u: NodeId, v: NodeId) -> f64;
}

impl PairScorer for ScoreTable<'_> {
    fn pair_score(&self, u: NodeId, v: NodeId) -> f64 {
        self.score(u, v)
            .expect("evaluation only requests valid distinct pairs")
    }
}

impl<F: Fn(NodeId, NodeId) -> f64> PairScorer for F {
    fn pair_score(&self, u: NodeId, v: NodeId) -> f64 {
        self(u, v)
    }
}

/// One AUC computation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AucOutcome {
    pub value: f64,
    pub comparisons: u64,
    pub method: MethodUsed,
}

/// Exact AUC of positives against negatives: wins plus half-ties over all
/// combinations, computed through average ranks. Ties are detected by exact
/// value equality.
fn exact_auc(pos: &[f64], neg: &[f64]) -> f64 {
    debug_assert!(!pos.is_empty() && !neg.is_empty());
    let mut all: Vec<(f64, bool)> = pos
        .iter()
        .map(|&x| (x, true))
        .chain(neg.iter().map(|&x| (x, false)))
        .collect();
    all.sort_unstable_by(|a, b| a.0.partial_cmp(&b.0).expect("scores must not be NaN"));
    let mut rank_sum_pos = 0.0;
    let mut next_rank = 1u64;
    let mut i = 0;
    while i < all.len() {
        let mut j = i + 1;
        while j < all.len() && all[j].0 == all[i].0 {
            j += 1;
        }
        let group = (j - i) as u64;
        let avg_rank = next_rank as f64 + (group as f64 - 1.0) / 2.0;
        let pos_in_group = all[i..j].iter().filter(|e| e.1).count();
        rank_sum_pos += avg_rank * pos_in_group as f64;
        next_rank += group;
        i = j;
    }
    let p = pos.len() as f64;
    let u_statistic = rank_sum_pos - p * (p + 1.0) / 2.0;
    u_statistic / (p * neg.len() as f64)
}

/// The positive and negative pair classes of a split.
struct Classes {
    positives: Vec<(NodeId, NodeId)>,
    negatives: NegativeClass,
}

enum NegativeClass {
    /// Explicit list (spurious probes, or enumerated non-edges).
    Listed(Vec<(NodeId, NodeId)>),
    /// Non-edges of the original graph, sampled by rejection.
    AbsentPairs { original: HashSet<(NodeId, NodeId)>, count: u64 },
}

impl NegativeClass {
    fn count(&self) -> u64 {
        match self {
            NegativeClass::Listed(v) => v.len() as u64,
            NegativeClass::AbsentPairs { count, .. } => *count,
        }
    }
}

fn classes(split: &EvalSplit, enumerate_negatives: bool) -> Result<Classes, EvalError> {
    let n = split.train.num_nodes();
    let total_pairs = n as u64 * (n as u64 - 1) / 2;
    match split.mode {
        TaskMode::Missing => {
            let mut original: HashSet<(NodeId, NodeId)> = split.train.edges().collect();
            original.extend(split.probe.iter().copied());
            let neg_count = total_pairs - original.len() as u64;
            if split.probe.is_empty() || neg_count == 0 {
                return Err(EvalError::NoComparisons);
            }
            // Rejection sampling stalls when non-edges are scarce, so fall
            // back to the explicit list in dense graphs.
            let negatives = if enumerate_negatives || neg_count * 4 < total_pairs {
                let mut list = Vec::with_capacity(neg_count as usize);
                for u in 0..n {
                    for v in (u + 1)..n {
                        if !original.contains(&(u, v)) {
                            list.push((u, v));
                        }
                    }
                }
                NegativeClass::Listed(list)
            } else {
                NegativeClass::AbsentPairs {
                    original,
                    count: neg_count,
                }
            };
            Ok(Classes {
                positives: split.probe.clone(),
                negatives,
            })
        }
        TaskMode::Spurious => {
            let probe_set: HashSet<(NodeId, NodeId)> = split.probe.iter().copied().collect();
            let real: Vec<(NodeId, NodeId)> = split
                .train
                .edges()
                .filter(|pair| !probe_set.contains(pair))
                .collect();
            if real.is_empty() || split.probe.is_empty() {
                return Err(EvalError::NoComparisons);
            }
            Ok(Classes {
                positives: real,
                negatives: NegativeClass::Listed(split.probe.clone()),
            })
        }
    }
}

/// AUC of a scorer on one split.
///
/// Positives are the pairs that should score high: the probe in missing
/// mode, the genuine edges in spurious mode. The scorer is expected to have
/// been built on `split.train`.
pub fn auc<S: PairScorer + ?Sized>(
    split: &EvalSplit,
    scorer: &S,
    method: AucMethod,
    sample_comparisons: u64,
    seed: u64,
) -> Result<AucOutcome, EvalError> {
    let probe_classes = classes(split, false)?;
    let n_pos = probe_classes.positives.len() as u64;
    let n_neg = probe_classes.negatives.count();
    let exact_comparisons = n_pos.saturating_mul(n_neg);
    let use_exact = match method {
        AucMethod::Exact => true,
        AucMethod::Sampled => false,
        AucMethod::Auto => exact_comparisons <= DEFAULT_EXACT_BUDGET,
    };

    if use_exact {
        let probe_classes = match probe_classes.negatives {
            NegativeClass::Listed(_) => probe_classes,
            NegativeClass::AbsentPairs { .. } => classes(split, true)?,
        };
        let NegativeClass::Listed(neg_pairs) = &probe_classes.negatives else {
            unreachable!("negatives were just enumerated");
        };
        let pos_scores: Vec<f64> = probe_classes
            .positives
            .iter()
            .map(|&(u, v)| scorer.pair_score(u, v))
            .collect();
        let neg_scores: Vec<f64> = neg_pairs
            .iter()
            .map(|&(u, v)| scorer.pair_score(u, v))
            .collect();
        Ok(AucOutcome {
            value: exact_auc(&pos_scores, &neg_scores),
            comparisons: exact_comparisons,
            method: MethodUsed::Exact,
        })
    } else {
        if sample_comparisons == 0 {
            return Err(EvalError::ZeroSamples);
        }
        let n = split.train.num_nodes();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let positives = &probe_classes.positives;
        let mut wins = 0u64;
        let mut ties = 0u64;
        for _ in 0..sample_comparisons {
            let (pu, pv) = positives[rng.gen_range(0..positives.len())];
            let (nu, nv) = match &probe_classes.negatives {
                NegativeClass::Listed(list) => list[rng.gen_range(0..list.len())],
                NegativeClass::AbsentPairs { original, .. } => loop {
                    let a = rng.gen_range(0..n);
                    let b = rng.gen_range(0..n);
                    if a == b {
                        continue;
                    }
                    let pair = (a.min(b), a.max(b));
                    if !original.contains(&pair) {
                        break pair;
                    }
                },
            };
            let sp = scorer.pair_score(pu, pv);
            let sn = scorer.pair_score(nu, nv);
            if sp > sn {
                wins += 1;
            } else if sp == sn {
                ties += 1;
            }
        }
        Ok(AucOutcome {
            value: (wins as f64 + 0.5 * ties as f64) / sample_comparisons as f64,
            comparisons: sample_comparisons,
            method: MethodUsed::Sampled,
        })
    }
}

/// Builds a score table for `predictor` on the training graph and runs
/// [`auc`]. Graphs above the eager cap fall back to on-demand scoring.
pub fn auc_predictor(
    split: &EvalSplit,
    predictor: PredictorId,
    method: AucMethod,
    sample_comparisons: u64,
    seed: u64,
) -> Result<AucOutcome, EvalError> {
    if split.train.num_nodes() <= DEFAULT_EAGER_CAP {
        let table = predictors::score_all_pairs(&split.train, predictor)?;
        auc(split, &table, method, sample_comparisons, seed)
    } else {
        let table = predictors::on_demand_table(&split.train, predictor);
        auc(split, &table, method, sample_comparisons, seed)
    }
}

/// Aggregated AUC of one predictor over the trials of one experiment cell.
#[derive(Debug, Clone, PartialEq)]
pub struct AucResult {
    pub predictor: PredictorId,
    pub mode: TaskMode,
    pub fraction: f64,
    /// Per-trial AUC values, in trial order.
    pub trials: Vec<f64>,
    pub mean: f64,
    /// Sample standard deviation; 0 for a single trial.
    pub std_dev: f64,
    pub comparisons_per_trial: u64,
    pub method: MethodUsed,
}

/// Full experiment description. `fractions` default to 0.1 through 0.9 and
/// `trials` to 100, mirroring the standard protocol.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub dataset: PathBuf,
    pub dataset_name: Option<String>,
    pub delimiter: Delimiter,
    pub predictors: Vec<PredictorId>,
    pub modes: Vec<TaskMode>,
    pub fractions: Vec<f64>,
    pub trials: usize,
    pub base_seed: u64,
    pub auc_method: AucMethod,
    pub sample_comparisons: u64,
}

impl ExperimentConfig {
    pub fn new(dataset: PathBuf) -> Self {
        ExperimentConfig {
            dataset,
            dataset_name: None,
            delimiter: Delimiter::Whitespace,
            predictors: PredictorId::ALL.to_vec(),
            modes: TaskMode::ALL.to_vec(),
            fractions: (1..=9).map(|i| i as f64 / 10.0).collect(),
            trials: 100,
            base_seed: 42,
            auc_method: AucMethod::Auto,
            sample_comparisons: DEFAULT_SAMPLE_COMPARISONS,
        }
    }

    /// Dataset display name: explicit override or the file stem.
    pub fn display_name(&self) -> String {
        self.dataset_name.clone().unwrap_or_else(|| {
            self.dataset
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| self.dataset.to_string_lossy().into_owned())
        })
    }
}

/// One grid cell of an experiment; failed cells carry the error text.
#[derive(Debug, Clone)]
pub struct CellOutcome {
    pub predictor: PredictorId,
    pub mode: TaskMode,
    pub fraction: f64,
    pub outcome: Result<AucResult, String>,
}

#[derive(Debug, Clone)]
pub struct ExperimentReport {
    pub dataset_name: String,
    pub cells: Vec<CellOutcome>,
}

/// Loads the configured dataset and runs the experiment grid.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport, EvalError> {
    let file = std::fs::File::open(&cfg.dataset).map_err(GraphError::from)?;
    let opts = EdgeListOptions {
        delimiter: cfg.delimiter,
        ..EdgeListOptions::default()
    };
    let graph = Graph::parse_edge_list(std::io::BufReader::new(file), &opts)?;
    run_experiment_on(&graph, cfg)
}

/// Runs the experiment grid on an already-loaded graph.
///
/// Every `(mode, fraction)` cell draws `trials` independent splits; the
/// per-trial seed is derived from `base_seed` and the trial index through
/// [`mix_seed`], so predictors see identical splits and sampled comparisons
/// within a trial. Trials run in parallel; results are keyed and ordered, so
/// output does not depend on worker count. Split or scoring errors mark the
/// affected cells as failed without aborting the rest of the grid.
pub fn run_experiment_on(
    g: &Graph,
    cfg: &ExperimentConfig,
) -> Result<ExperimentReport, EvalError> {
    if cfg.predictors.is_empty() {
        return Err(EvalError::EmptyConfigList("predictors"));
    }
    if cfg.modes.is_empty() {
        return Err(EvalError::EmptyConfigList("modes"));
    }
    if cfg.fractions.is_empty() {
        return Err(EvalError::EmptyConfigList("fractions"));
    }
    if cfg.trials == 0 {
        return Err(EvalError::ZeroTrials);
    }
    for &f in &cfg.fractions {
        check_fraction(f)?;
    }

    let mut keyed: Vec<((usize, usize, usize), CellOutcome)> = Vec::new();
    for (mode_idx, &mode) in cfg.modes.iter().enumerate() {
        for (frac_idx, &fraction) in cfg.fractions.iter().enumerate() {
            let trial_results: Vec<Result<Vec<AucOutcome>, String>> = (0..cfg.trials)
                .into_par_iter()
                .map(|trial| {
                    let trial_seed = mix_seed(cfg.base_seed, trial as u64);
                    let split = match mode {
                        TaskMode::Missing => split_missing(g, fraction, mix_seed(trial_seed, 1)),
                        TaskMode::Spurious => add_spurious(g, fraction, mix_seed(trial_seed, 1)),
                    }
                    .map_err(|e| e.to_string())?;
                    let auc_seed = mix_seed(trial_seed, 2);
                    cfg.predictors
                        .iter()
                        .map(|&p| {
                            auc_predictor(
                                &split,
                                p,
                                cfg.auc_method,
                                cfg.sample_comparisons,
                                auc_seed,
                            )
                            .map_err(|e| e.to_string())
                        })
                        .collect()
                })
                .collect();

            let failure = trial_results.iter().find_map(|r| r.as_ref().err().cloned());
            for (pred_idx, &predictor) in cfg.predictors.iter().enumerate() {
                let outcome = match &failure {
                    Some(err) => Err(err.clone()),
                    None => {
                        let trials: Vec<f64> = trial_results
                            .iter()
                            .map(|r| r.as_ref().expect("no failure")[pred_idx].value)
                            .collect();
                        let first = &trial_results[0].as_ref().expect("no failure")[pred_idx];
                        let (mean, std_dev) = mean_std(&trials);
                        Ok(AucResult {
                            predictor,
                            mode,
                            fraction,
                            trials,
                            mean,
                            std_dev,
                            comparisons_per_trial: first.comparisons,
                            method: first.method,
                        })
                    }
                };
                keyed.push((
                    (pred_idx, mode_idx, frac_idx),
                    CellOutcome {
                        predictor,
                        mode,
                        fraction,
                        outcome,
                    },
                ));
            }
        }
    }
    keyed.sort_by_key(|(key, _)| *key);
    Ok(ExperimentReport {
        dataset_name: cfg.display_name(),
        cells: keyed.into_iter().map(|(_, cell)| cell).collect(),
    })
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}
