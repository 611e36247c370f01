//! TOML experiment configuration files.
//!
//! Every key except `dataset` is optional and falls back to the standard
//! protocol: all five predictors, both modes, fractions 0.1 through 0.9,
//! 100 trials, seed 42, automatic AUC method. The dataset path is resolved
//! relative to the config file's directory.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use lbnet::evaluation::{AucMethod, ExperimentConfig, TaskMode};
use lbnet::graph::Delimiter;
use lbnet::predictors::PredictorId;
use serde::Deserialize;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    dataset: PathBuf,
    name: Option<String>,
    delimiter: Option<String>,
    predictors: Option<Vec<String>>,
    modes: Option<Vec<String>>,
    fractions: Option<Vec<f64>>,
    trials: Option<usize>,
    seed: Option<u64>,
    method: Option<String>,
    sample_comparisons: Option<u64>,
}

pub fn parse_delimiter(s: &str) -> anyhow::Result<Delimiter> {
    match s.to_ascii_lowercase().as_str() {
        "whitespace" => Ok(Delimiter::Whitespace),
        "comma" => Ok(Delimiter::Comma),
        other => bail!("unknown delimiter {other:?} (expected whitespace or comma)"),
    }
}

pub fn parse_method(s: &str) -> anyhow::Result<AucMethod> {
    match s.to_ascii_lowercase().as_str() {
        "auto" => Ok(AucMethod::Auto),
        "exact" => Ok(AucMethod::Exact),
        "sampled" => Ok(AucMethod::Sampled),
        other => bail!("unknown auc method {other:?} (expected auto, exact, or sampled)"),
    }
}

pub fn parse_predictors(names: &[String]) -> anyhow::Result<Vec<PredictorId>> {
    names
        .iter()
        .map(|s| s.parse::<PredictorId>().map_err(anyhow::Error::msg))
        .collect()
}

pub fn parse_modes(names: &[String]) -> anyhow::Result<Vec<TaskMode>> {
    names
        .iter()
        .map(|s| s.parse::<TaskMode>().map_err(anyhow::Error::msg))
        .collect()
}

pub fn load(path: &Path) -> anyhow::Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading config {}", path.display()))?;
    let file: FileConfig =
        toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))?;

    let dataset = if file.dataset.is_absolute() {
        file.dataset
    } else {
        path.parent().unwrap_or(Path::new(".")).join(file.dataset)
    };
    let mut cfg = ExperimentConfig::new(dataset);
    cfg.dataset_name = file.name;
    if let Some(d) = file.delimiter.as_deref() {
        cfg.delimiter = parse_delimiter(d)?;
    }
    if let Some(p) = &file.predictors {
        cfg.predictors = parse_predictors(p)?;
    }
    if let Some(m) = &file.modes {
        cfg.modes = parse_modes(m)?;
    }
    if let Some(f) = file.fractions {
        cfg.fractions = f;
    }
    if let Some(t) = file.trials {
        cfg.trials = t;
    }
    if let Some(s) = file.seed {
        cfg.base_seed = s;
    }
    if let Some(m) = file.method.as_deref() {
        cfg.auc_method = parse_method(m)?;
    }
    if let Some(k) = file.sample_comparisons {
        cfg.sample_comparisons = k;
    }
    Ok(cfg)
}
