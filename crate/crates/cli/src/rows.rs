//! Output row types and the csv/json writers they share.

use std::io::Write;

use anyhow::Context;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Serialize)]
pub struct StatsRow {
    pub dataset: String,
    pub nodes: usize,
    pub edges: usize,
    pub density: f64,
    pub avg_clustering: f64,
    pub avg_degree: f64,
    pub avg_path: f64,
}

#[derive(Debug, Serialize)]
pub struct EvalRow {
    pub dataset: String,
    pub predictor: String,
    pub mode: String,
    pub fraction: f64,
    pub trials: usize,
    pub auc_mean: f64,
    pub auc_std: f64,
    pub method: String,
    pub comparisons: u64,
}

#[derive(Debug, Serialize)]
pub struct PredictRow {
    pub u: String,
    pub v: String,
    pub score: f64,
}

#[derive(Debug, Serialize)]
pub struct CorrelateRow {
    pub dataset: String,
    pub x: String,
    pub y: String,
    pub pairs: String,
    pub n_points: usize,
    pub n_excluded: usize,
    pub pearson: Option<f64>,
    pub spearman: Option<f64>,
}

/// Writes rows to `out` in the chosen format: CSV with a header line, or a
/// pretty-printed JSON array.
pub fn write_rows<T: Serialize, W: Write>(
    out: W,
    rows: &[T],
    format: OutputFormat,
) -> anyhow::Result<()> {
    match format {
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(out);
            for row in rows {
                w.serialize(row).context("writing csv row")?;
            }
            w.flush().context("flushing csv")?;
        }
        OutputFormat::Json => {
            let mut out = out;
            serde_json::to_writer_pretty(&mut out, rows).context("writing json")?;
            writeln!(out)?;
        }
    }
    Ok(())
}
