//! `lbnet`: link prediction on undirected networks from the command line.
//!
//! Four subcommands cover the workflow end to end: `stats` summarizes a
//! dataset's topology, `predict` scores candidate node pairs, `eval` runs
//! the missing/spurious-link AUC experiment grid, and `correlate` relates
//! predictor scores to each other or to hop distance.

mod config;
mod manifest;
mod rows;

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::fs::File;
use std::io::{self, BufRead, BufReader};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};
use lbnet::analysis::{self, PairFilter};
use lbnet::evaluation::{self, AucMethod, ExperimentConfig};
use lbnet::graph::{Delimiter, EdgeListOptions, Graph, NodeId};
use lbnet::metrics::topology_stats;
use lbnet::predictors::{self, PredictorId, ScoreTable, DEFAULT_EAGER_CAP};
use serde_json::json;

use crate::manifest::{DatasetInfo, FailedCell, RunManifest};
use crate::rows::{write_rows, CorrelateRow, EvalRow, OutputFormat, PredictRow, StatsRow};

#[derive(Debug, Parser)]
#[command(
    name = "lbnet",
    version,
    about = "Link prediction on undirected networks: topology stats, pair scoring, \
             AUC evaluation, and score correlations"
)]
struct Cli {
    /// Worker threads for parallel sections (default: one per CPU).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum DelimiterArg {
    Whitespace,
    Comma,
}

impl DelimiterArg {
    fn to_core(self) -> Delimiter {
        match self {
            DelimiterArg::Whitespace => Delimiter::Whitespace,
            DelimiterArg::Comma => Delimiter::Comma,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum MethodArg {
    Auto,
    Exact,
    Sampled,
}

impl MethodArg {
    fn to_core(self) -> AucMethod {
        match self {
            MethodArg::Auto => AucMethod::Auto,
            MethodArg::Exact => AucMethod::Exact,
            MethodArg::Sampled => AucMethod::Sampled,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print topology statistics for one or more edge-list files.
    Stats {
        /// Edge-list files, one undirected edge per line.
        #[arg(required = true)]
        datasets: Vec<PathBuf>,

        /// Token separator in the edge-list files.
        #[arg(long, value_enum, default_value_t = DelimiterArg::Whitespace)]
        delimiter: DelimiterArg,

        /// Output format for the rows printed to stdout.
        #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
        format: OutputFormat,
    },

    /// Score node pairs with one predictor.
    ///
    /// With --pairs, scores exactly the listed pairs in file order. Without
    /// it, ranks all non-adjacent pairs and prints the --top highest scores
    /// (ties broken by node pair).
    Predict {
        /// Edge-list file naming the network.
        dataset: PathBuf,

        /// Predictor: lb, pa, cn, aa, or ra.
        #[arg(long)]
        predictor: String,

        /// File of node pairs to score, two labels per line.
        #[arg(long, conflicts_with = "top")]
        pairs: Option<PathBuf>,

        /// How many of the best-scoring non-adjacent pairs to print.
        #[arg(long)]
        top: Option<usize>,

        /// Token separator in the edge-list and pairs files.
        #[arg(long, value_enum, default_value_t = DelimiterArg::Whitespace)]
        delimiter: DelimiterArg,

        /// Output format for the rows printed to stdout.
        #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
        format: OutputFormat,
    },

    /// Run the AUC evaluation grid over predictors, task modes, and probe
    /// fractions.
    ///
    /// Writes <name>_eval.csv and <name>_manifest.json into --out-dir and
    /// prints the result rows to stdout. Cells that fail are reported on
    /// stderr, recorded in the manifest, and turn the exit status to 1
    /// without discarding the rest of the grid.
    Eval {
        /// Edge-list file naming the network (or use --config).
        #[arg(required_unless_present = "config")]
        dataset: Option<PathBuf>,

        /// TOML experiment file; replaces the dataset argument and the
        /// per-flag settings below.
        #[arg(
            long,
            conflicts_with_all = [
                "dataset", "predictors", "modes", "fractions", "trials",
                "seed", "method", "samples", "name", "delimiter",
            ]
        )]
        config: Option<PathBuf>,

        /// Comma-separated predictors (lb, pa, cn, aa, ra). Default: all.
        #[arg(long, value_delimiter = ',')]
        predictors: Option<Vec<String>>,

        /// Comma-separated task modes (missing, spurious). Default: both.
        #[arg(long, value_delimiter = ',')]
        modes: Option<Vec<String>>,

        /// Comma-separated probe fractions in (0, 1). Default: 0.1..0.9.
        #[arg(long, value_delimiter = ',')]
        fractions: Option<Vec<f64>>,

        /// Independent splits per cell. Default: 100.
        #[arg(long)]
        trials: Option<usize>,

        /// Base seed; every trial derives its own stream from it.
        #[arg(long)]
        seed: Option<u64>,

        /// AUC computation: exact, sampled, or auto (exact while the
        /// comparison count stays within budget).
        #[arg(long, value_enum)]
        method: Option<MethodArg>,

        /// Sampled comparisons per AUC when sampling is in effect.
        #[arg(long)]
        samples: Option<u64>,

        /// Dataset display name. Default: the file stem.
        #[arg(long)]
        name: Option<String>,

        /// Token separator in the edge-list file.
        #[arg(long, value_enum)]
        delimiter: Option<DelimiterArg>,

        /// Directory for the result CSV and the run manifest.
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,

        /// Output format for the rows printed to stdout.
        #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
        format: OutputFormat,
    },

    /// Correlate two pair rankings: predictor vs predictor, or hop distance
    /// vs predictor.
    Correlate {
        /// Edge-list file naming the network.
        dataset: PathBuf,

        /// X axis: a predictor (lb, pa, cn, aa, ra) or "distance".
        #[arg(long)]
        x: String,

        /// Y axis: a predictor (lb, pa, cn, aa, ra).
        #[arg(long)]
        y: String,

        /// Which pairs to analyze: all, nonadjacent, or sample:<count>.
        #[arg(long, default_value = "all")]
        pairs: String,

        /// Seed for the sample:<count> pair filter.
        #[arg(long, default_value_t = 42)]
        sample_seed: u64,

        /// Also write every analyzed pair with its (x, y) values to this
        /// CSV file.
        #[arg(long)]
        points: Option<PathBuf>,

        /// Token separator in the edge-list file.
        #[arg(long, value_enum, default_value_t = DelimiterArg::Whitespace)]
        delimiter: DelimiterArg,

        /// Output format for the summary row printed to stdout.
        #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
        format: OutputFormat,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring the thread pool")?;
    }
    match cli.command {
        Command::Stats {
            datasets,
            delimiter,
            format,
        } => cmd_stats(&datasets, delimiter.to_core(), format),
        Command::Predict {
            dataset,
            predictor,
            pairs,
            top,
            delimiter,
            format,
        } => cmd_predict(
            &dataset,
            &predictor,
            pairs.as_deref(),
            top,
            delimiter.to_core(),
            format,
        ),
        Command::Eval {
            dataset,
            config,
            predictors,
            modes,
            fractions,
            trials,
            seed,
            method,
            samples,
            name,
            delimiter,
            out_dir,
            format,
        } => {
            let cfg = match config {
                Some(path) => config::load(&path)?,
                None => {
                    let dataset = dataset.expect("clap requires dataset without --config");
                    let mut cfg = ExperimentConfig::new(dataset);
                    if let Some(p) = &predictors {
                        cfg.predictors = config::parse_predictors(p)?;
                    }
                    if let Some(m) = &modes {
                        cfg.modes = config::parse_modes(m)?;
                    }
                    if let Some(f) = fractions {
                        cfg.fractions = f;
                    }
                    if let Some(t) = trials {
                        cfg.trials = t;
                    }
                    if let Some(s) = seed {
                        cfg.base_seed = s;
                    }
                    if let Some(m) = method {
                        cfg.auc_method = m.to_core();
                    }
                    if let Some(k) = samples {
                        cfg.sample_comparisons = k;
                    }
                    if let Some(d) = delimiter {
                        cfg.delimiter = d.to_core();
                    }
                    cfg.dataset_name = name;
                    cfg
                }
            };
            cmd_eval(&cfg, &out_dir, format)
        }
        Command::Correlate {
            dataset,
            x,
            y,
            pairs,
            sample_seed,
            points,
            delimiter,
            format,
        } => cmd_correlate(
            &dataset,
            &x,
            &y,
            &pairs,
            sample_seed,
            points.as_deref(),
            delimiter.to_core(),
            format,
        ),
    }
}

fn load_graph(path: &Path, delimiter: Delimiter) -> anyhow::Result<Graph> {
    let file =
        File::open(path).with_context(|| format!("opening dataset {}", path.display()))?;
    let opts = EdgeListOptions {
        delimiter,
        ..EdgeListOptions::default()
    };
    Graph::parse_edge_list(BufReader::new(file), &opts)
        .with_context(|| format!("parsing dataset {}", path.display()))
}

fn file_stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.to_string_lossy().into_owned())
}

fn cmd_stats(
    datasets: &[PathBuf],
    delimiter: Delimiter,
    format: OutputFormat,
) -> anyhow::Result<ExitCode> {
    let mut out = Vec::with_capacity(datasets.len());
    for path in datasets {
        let g = load_graph(path, delimiter)?;
        let stats = topology_stats(&g)
            .with_context(|| format!("computing statistics for {}", path.display()))?;
        out.push(StatsRow {
            dataset: file_stem(path),
            nodes: stats.num_nodes,
            edges: stats.num_edges,
            density: stats.density,
            avg_clustering: stats.avg_clustering,
            avg_degree: stats.avg_degree,
            avg_path: stats.avg_shortest_path,
        });
    }
    write_rows(io::stdout().lock(), &out, format)?;
    Ok(ExitCode::SUCCESS)
}

fn parse_predictor(name: &str) -> anyhow::Result<PredictorId> {
    name.parse::<PredictorId>().map_err(anyhow::Error::msg)
}

fn make_table(g: &Graph, predictor: PredictorId) -> anyhow::Result<ScoreTable<'_>> {
    if g.num_nodes() <= DEFAULT_EAGER_CAP {
        Ok(predictors::score_all_pairs(g, predictor)?)
    } else {
        Ok(predictors::on_demand_table(g, predictor))
    }
}

/// Reads a pairs file: two node labels per line, extra tokens ignored,
/// blank lines and lines starting with `#` or `%` skipped.
fn read_pairs(path: &Path, g: &Graph, delimiter: Delimiter) -> anyhow::Result<Vec<(NodeId, NodeId)>> {
    let index = g.label_index();
    let file =
        File::open(path).with_context(|| format!("opening pairs file {}", path.display()))?;
    let mut pairs = Vec::new();
    for (lineno, line) in BufReader::new(file).lines().enumerate() {
        let lineno = lineno + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with(['#', '%']) {
            continue;
        }
        let tokens: Vec<&str> = match delimiter {
            Delimiter::Whitespace => trimmed.split_whitespace().collect(),
            Delimiter::Comma => trimmed
                .split(',')
                .map(str::trim)
                .filter(|t| !t.is_empty())
                .collect(),
        };
        if tokens.len() < 2 {
            bail!("pairs file line {lineno}: expected two node labels");
        }
        let resolve = |label: &str| {
            index.get(label).copied().ok_or_else(|| {
                anyhow::anyhow!("pairs file line {lineno}: unknown node {label:?}")
            })
        };
        let u = resolve(tokens[0])?;
        let v = resolve(tokens[1])?;
        if u == v {
            bail!("pairs file line {lineno}: pair joins node {:?} to itself", tokens[0]);
        }
        pairs.push((u, v));
    }
    if pairs.is_empty() {
        bail!("pairs file {} holds no pairs", path.display());
    }
    Ok(pairs)
}

/// A scored pair ordered by score, with lower node ids breaking ties, so the
/// maximum is the best pair to report first.
#[derive(Debug, PartialEq)]
struct Ranked {
    score: f64,
    pair: (NodeId, NodeId),
}

impl Eq for Ranked {}

impl Ord for Ranked {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.score
            .total_cmp(&other.score)
            .then_with(|| other.pair.cmp(&self.pair))
    }
}

impl PartialOrd for Ranked {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

fn top_nonadjacent(g: &Graph, table: &ScoreTable<'_>, k: usize) -> anyhow::Result<Vec<Ranked>> {
    let n = g.num_nodes();
    let mut heap: BinaryHeap<Reverse<Ranked>> = BinaryHeap::with_capacity(k + 1);
    for u in 0..n {
        for v in (u + 1)..n {
            if g.has_edge(u, v) {
                continue;
            }
            let entry = Ranked {
                score: table.score(u, v)?,
                pair: (u, v),
            };
            if heap.len() < k {
                heap.push(Reverse(entry));
            } else if let Some(worst) = heap.peek() {
                if entry > worst.0 {
                    heap.pop();
                    heap.push(Reverse(entry));
                }
            }
        }
    }
    let mut best: Vec<Ranked> = heap.into_iter().map(|r| r.0).collect();
    best.sort_by(|a, b| b.cmp(a));
    Ok(best)
}

fn cmd_predict(
    dataset: &Path,
    predictor: &str,
    pairs: Option<&Path>,
    top: Option<usize>,
    delimiter: Delimiter,
    format: OutputFormat,
) -> anyhow::Result<ExitCode> {
    let predictor = parse_predictor(predictor)?;
    let g = load_graph(dataset, delimiter)?;
    let table = make_table(&g, predictor)?;

    let scored: Vec<(NodeId, NodeId, f64)> = match pairs {
        Some(file) => read_pairs(file, &g, delimiter)?
            .into_iter()
            .map(|(u, v)| Ok((u, v, table.score(u, v)?)))
            .collect::<Result<_, lbnet::predictors::PredictError>>()?,
        None => top_nonadjacent(&g, &table, top.unwrap_or(20))?
            .into_iter()
            .map(|r| (r.pair.0, r.pair.1, r.score))
            .collect(),
    };

    let out: Vec<PredictRow> = scored
        .into_iter()
        .map(|(u, v, score)| PredictRow {
            u: g.label(u),
            v: g.label(v),
            score,
        })
        .collect();
    write_rows(io::stdout().lock(), &out, format)?;
    Ok(ExitCode::SUCCESS)
}

fn sanitize_name(name: &str) -> String {
    let cleaned: String = name
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.') {
                c
            } else {
                '_'
            }
        })
        .collect();
    if cleaned.is_empty() {
        "dataset".to_string()
    } else {
        cleaned
    }
}

fn method_label(method: AucMethod) -> &'static str {
    match method {
        AucMethod::Auto => "auto",
        AucMethod::Exact => "exact",
        AucMethod::Sampled => "sampled",
    }
}

fn delimiter_label(delimiter: Delimiter) -> &'static str {
    match delimiter {
        Delimiter::Whitespace => "whitespace",
        Delimiter::Comma => "comma",
    }
}

fn config_json(cfg: &ExperimentConfig) -> serde_json::Value {
    json!({
        "dataset": cfg.dataset.display().to_string(),
        "name": cfg.dataset_name,
        "delimiter": delimiter_label(cfg.delimiter),
        "predictors": cfg.predictors.iter().map(|p| p.name()).collect::<Vec<_>>(),
        "modes": cfg.modes.iter().map(|m| m.name()).collect::<Vec<_>>(),
        "fractions": cfg.fractions,
        "trials": cfg.trials,
        "seed": cfg.base_seed,
        "method": method_label(cfg.auc_method),
        "sample_comparisons": cfg.sample_comparisons,
    })
}

fn cmd_eval(
    cfg: &ExperimentConfig,
    out_dir: &Path,
    format: OutputFormat,
) -> anyhow::Result<ExitCode> {
    let started_at = chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true);
    let report = evaluation::run_experiment(cfg)
        .with_context(|| format!("evaluating {}", cfg.dataset.display()))?;
    let finished_at = chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true);

    let mut out = Vec::new();
    let mut failed = Vec::new();
    for cell in &report.cells {
        match &cell.outcome {
            Ok(result) => out.push(EvalRow {
                dataset: report.dataset_name.clone(),
                predictor: result.predictor.name().to_string(),
                mode: result.mode.name().to_string(),
                fraction: result.fraction,
                trials: result.trials.len(),
                auc_mean: result.mean,
                auc_std: result.std_dev,
                method: result.method.name().to_string(),
                comparisons: result.comparisons_per_trial,
            }),
            Err(err) => {
                eprintln!(
                    "cell failed: predictor={} mode={} fraction={}: {err}",
                    cell.predictor.name(),
                    cell.mode.name(),
                    cell.fraction
                );
                failed.push(FailedCell {
                    predictor: cell.predictor.name().to_string(),
                    mode: cell.mode.name().to_string(),
                    fraction: cell.fraction,
                    error: err.clone(),
                });
            }
        }
    }

    std::fs::create_dir_all(out_dir)
        .with_context(|| format!("creating output directory {}", out_dir.display()))?;
    let base = sanitize_name(&report.dataset_name);
    let csv_path = out_dir.join(format!("{base}_eval.csv"));
    let csv_file = File::create(&csv_path)
        .with_context(|| format!("creating {}", csv_path.display()))?;
    write_rows(csv_file, &out, OutputFormat::Csv)?;

    let manifest_path = out_dir.join(format!("{base}_manifest.json"));
    RunManifest {
        tool: "lbnet".to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        command: std::env::args().collect::<Vec<_>>().join(" "),
        config: config_json(cfg),
        dataset: DatasetInfo {
            path: cfg.dataset.display().to_string(),
            sha256: manifest::sha256_file(&cfg.dataset)?,
        },
        base_seed: cfg.base_seed,
        started_at,
        finished_at,
        outputs: vec![csv_path.display().to_string()],
        failed_cells: failed,
    }
    .write(&manifest_path)?;

    write_rows(io::stdout().lock(), &out, format)?;
    if report.cells.iter().any(|c| c.outcome.is_err()) {
        eprintln!(
            "{} of {} cells failed; see {}",
            report.cells.len() - out.len(),
            report.cells.len(),
            manifest_path.display()
        );
        Ok(ExitCode::FAILURE)
    } else {
        Ok(ExitCode::SUCCESS)
    }
}

fn parse_pair_filter(text: &str, sample_seed: u64) -> anyhow::Result<PairFilter> {
    let lower = text.to_ascii_lowercase();
    if lower == "all" {
        return Ok(PairFilter::All);
    }
    if lower == "nonadjacent" {
        return Ok(PairFilter::NonAdjacent);
    }
    if let Some(count) = lower.strip_prefix("sample:") {
        let count: usize = count
            .parse()
            .with_context(|| format!("bad sample count in pair filter {text:?}"))?;
        return Ok(PairFilter::Sample {
            count,
            seed: sample_seed,
        });
    }
    bail!("unknown pair filter {text:?} (expected all, nonadjacent, or sample:<count>)")
}

fn write_points(
    path: &Path,
    g: &Graph,
    output: &analysis::CorrelationOutput,
) -> anyhow::Result<()> {
    let file =
        File::create(path).with_context(|| format!("creating points file {}", path.display()))?;
    let mut w = csv::Writer::from_writer(file);
    w.write_record([
        "u",
        "v",
        output.report.x_label.as_str(),
        output.report.y_label.as_str(),
    ])?;
    for p in &output.points {
        w.write_record([
            g.label(p.u),
            g.label(p.v),
            p.x.to_string(),
            p.y.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_correlate(
    dataset: &Path,
    x: &str,
    y: &str,
    pairs: &str,
    sample_seed: u64,
    points: Option<&Path>,
    delimiter: Delimiter,
    format: OutputFormat,
) -> anyhow::Result<ExitCode> {
    if y.eq_ignore_ascii_case("distance") {
        bail!("hop distance is only supported on --x; put the predictor on --y");
    }
    let y_predictor = parse_predictor(y)?;
    let filter = parse_pair_filter(pairs, sample_seed)?;
    let g = load_graph(dataset, delimiter)?;

    let output = if x.eq_ignore_ascii_case("distance") {
        analysis::distance_correlation(&g, y_predictor, filter)?
    } else {
        analysis::score_correlation(&g, parse_predictor(x)?, y_predictor, filter)?
    };

    if let Some(path) = points {
        write_points(path, &g, &output)?;
    }

    let row = CorrelateRow {
        dataset: file_stem(dataset),
        x: output.report.x_label.clone(),
        y: output.report.y_label.clone(),
        pairs: pairs.to_ascii_lowercase(),
        n_points: output.report.n_points,
        n_excluded: output.report.n_excluded,
        pearson: output.report.pearson,
        spearman: output.report.spearman,
    };
    write_rows(io::stdout().lock(), &[row], format)?;
    Ok(ExitCode::SUCCESS)
}
