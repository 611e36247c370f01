//! Correlation analyses between predictor scores, and between scores and
//! hop distance.
//!
//! Each analysis selects a set of node pairs, computes an (x, y) value per
//! pair, and summarizes the relation with Pearson and Spearman coefficients.
//! The raw points are returned as well so callers can write scatter data.

use std::collections::HashSet;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{Graph, GraphError, NodeId};
use crate::predictors::{self, PredictError, PredictorId, ScoreTable, DEFAULT_EAGER_CAP};

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("graph has {0} nodes; correlation needs at least 2")]
    TooFewNodes(usize),
    #[error("pair selection produced no pairs")]
    EmptySample,
    #[error(transparent)]
    Predict(#[from] PredictError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Which node pairs enter an analysis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairFilter {
    /// Every unordered pair of distinct nodes.
    All,
    /// Pairs that are not edges; the candidates a predictor actually ranks.
    NonAdjacent,
    /// `count` distinct pairs drawn uniformly from all pairs. Falls back to
    /// every pair when `count` reaches the total pair count.
    Sample { count: usize, seed: u64 },
}

/// One analyzed pair with its (x, y) values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointRow {
    pub u: NodeId,
    pub v: NodeId,
    pub x: f64,
    pub y: f64,
}

/// Correlation summary. The coefficients are absent when they are undefined:
/// fewer than two points, or a constant column.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationReport {
    pub x_label: String,
    pub y_label: String,
    pub n_points: usize,
    /// Selected pairs dropped because no path connects them (distance
    /// analyses only).
    pub n_excluded: usize,
    pub pearson: Option<f64>,
    pub spearman: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct CorrelationOutput {
    pub report: CorrelationReport,
    pub points: Vec<PointRow>,
}

fn select_pairs(g: &Graph, filter: PairFilter) -> Result<Vec<(NodeId, NodeId)>, AnalysisError> {
    let n = g.num_nodes();
    if n < 2 {
        return Err(AnalysisError::TooFewNodes(n));
    }
    let total = n as u64 * (n as u64 - 1) / 2;
    let pairs: Vec<(NodeId, NodeId)> = match filter {
        PairFilter::All => (0..n)
            .flat_map(|u| ((u + 1)..n).map(move |v| (u, v)))
            .collect(),
        PairFilter::NonAdjacent => (0..n)
            .flat_map(|u| ((u + 1)..n).map(move |v| (u, v)))
            .filter(|&(u, v)| !g.has_edge(u, v))
            .collect(),
        PairFilter::Sample { count, seed } => {
            if count as u64 >= total {
                return select_pairs(g, PairFilter::All);
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut chosen: HashSet<(NodeId, NodeId)> = HashSet::with_capacity(count);
            while chosen.len() < count {
                let a = rng.gen_range(0..n);
                let b = rng.gen_range(0..n);
                if a != b {
                    chosen.insert((a.min(b), a.max(b)));
                }
            }
            let mut pairs: Vec<_> = chosen.into_iter().collect();
            pairs.sort_unstable();
            pairs
        }
    };
    if pairs.is_empty() {
        return Err(AnalysisError::EmptySample);
    }
    Ok(pairs)
}

fn build_table(g: &Graph, predictor: PredictorId) -> Result<ScoreTable<'_>, AnalysisError> {
    if g.num_nodes() <= DEFAULT_EAGER_CAP {
        Ok(predictors::score_all_pairs(g, predictor)?)
    } else {
        Ok(predictors::on_demand_table(g, predictor))
    }
}

/// Correlates the scores of two predictors over the selected pairs.
pub fn score_correlation(
    g: &Graph,
    x_predictor: PredictorId,
    y_predictor: PredictorId,
    filter: PairFilter,
) -> Result<CorrelationOutput, AnalysisError> {
    let pairs = select_pairs(g, filter)?;
    let x_table = build_table(g, x_predictor)?;
    let y_table = build_table(g, y_predictor)?;
    let points: Vec<PointRow> = pairs
        .into_iter()
        .map(|(u, v)| {
            Ok(PointRow {
                u,
                v,
                x: x_table.score(u, v)?,
                y: y_table.score(u, v)?,
            })
        })
        .collect::<Result<_, PredictError>>()?;
    Ok(summarize(
        x_predictor.name().to_string(),
        y_predictor.name().to_string(),
        points,
        0,
    ))
}

/// Correlates hop distance (x) with a predictor's score (y) over the
/// selected pairs. Pairs with no connecting path are dropped and tallied in
/// `n_excluded`.
pub fn distance_correlation(
    g: &Graph,
    predictor: PredictorId,
    filter: PairFilter,
) -> Result<CorrelationOutput, AnalysisError> {
    let pairs = select_pairs(g, filter)?;
    let table = build_table(g, predictor)?;
    let n = g.num_nodes();
    let mut dist = vec![u32::MAX; n];
    let mut current_source = usize::MAX;
    let mut points = Vec::with_capacity(pairs.len());
    let mut excluded = 0usize;
    // Pairs arrive sorted by source, so one BFS per distinct source covers
    // the whole list.
    for (u, v) in pairs {
        if u != current_source {
            dist.fill(u32::MAX);
            g.bfs_raw(u, &mut dist);
            current_source = u;
        }
        if dist[v] == u32::MAX {
            excluded += 1;
            continue;
        }
        points.push(PointRow {
            u,
            v,
            x: f64::from(dist[v]),
            y: table.score(u, v).map_err(AnalysisError::from)?,
        });
    }
    Ok(summarize(
        "distance".to_string(),
        predictor.name().to_string(),
        points,
        excluded,
    ))
}

fn summarize(
    x_label: String,
    y_label: String,
    points: Vec<PointRow>,
    n_excluded: usize,
) -> CorrelationOutput {
    let xs: Vec<f64> = points.iter().map(|p| p.x).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.y).collect();
    CorrelationOutput {
        report: CorrelationReport {
            x_label,
            y_label,
            n_points: points.len(),
            n_excluded,
            pearson: pearson(&xs, &ys),
            spearman: spearman(&xs, &ys),
        },
        points,
    }
}

/// Pearson correlation coefficient, or `None` when it is undefined (fewer
/// than two observations, or a zero-variance column).
pub fn pearson(xs: &[f64], ys: &[f64]) -> Option<f64> {
    assert_eq!(xs.len(), ys.len(), "columns must have equal length");
    let n = xs.len();
    if n < 2 {
        return None;
    }
    let mean_x = xs.iter().sum::<f64>() / n as f64;
    let mean_y = ys.iter().sum::<f64>() / n as f64;
    let mut cov = 0.0;
    let mut var_x = 0.0;
    let mut var_y = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        let dx = x - mean_x;
        let dy = y - mean_y;
        cov += dx * dy;
        var_x += dx * dx;
        var_y += dy * dy;
    }
    if var_x == 0.0 || var_y == 0.0 {
        return None;
    }
    Some(cov / (var_x.sqrt() * var_y.sqrt()))
}

/// Spearman rank correlation: Pearson applied to average ranks, so ties are
/// handled exactly. `None` under the same conditions as [`pearson`].
pub fn spearman(xs: &[f64], ys: &[f64]) -> Option<f64> {
    assert_eq!(xs.len(), ys.len(), "columns must have equal length");
    pearson(&average_ranks(xs), &average_ranks(ys))
}

/// Ranks starting at 1; tied values share the mean of their rank range.
fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_unstable_by(|&a, &b| {
        values[a]
            .partial_cmp(&values[b])
            .expect("values must not be NaN")
    });
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && values[order[j]] == values[order[i]] {
            j += 1;
        }
        // Positions i..j hold ranks i+1 ..= j; all get the average.
        let avg = (i + 1 + j) as f64 / 2.0;
        for &idx in &order[i..j] {
            ranks[idx] = avg;
        }
        i = j;
    }
    ranks
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: usize) -> Graph {
        Graph::build(n, (0..n - 1).map(|i| (i, i + 1))).unwrap()
    }

    fn star(leaves: usize) -> Graph {
        Graph::build(leaves + 1, (1..=leaves).map(|v| (0, v))).unwrap()
    }

    #[test]
    fn identical_predictors_correlate_perfectly() {
        let g = path(6);
        let out = score_correlation(&g, PredictorId::Lb, PredictorId::Lb, PairFilter::NonAdjacent)
            .unwrap();
        assert!((out.report.pearson.unwrap() - 1.0).abs() < 1e-12);
        assert!((out.report.spearman.unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(out.report.n_points, 10);
        assert_eq!(out.report.n_excluded, 0);
        assert_eq!(out.report.x_label, "lb");
    }

    #[test]
    fn constant_columns_leave_coefficients_absent() {
        // Every non-adjacent pair of a star is leaf-leaf: both endpoints
        // have degree 1 and share the hub, so PA and CN are constant.
        let g = star(5);
        let out =
            score_correlation(&g, PredictorId::Pa, PredictorId::Cn, PairFilter::NonAdjacent)
                .unwrap();
        assert_eq!(out.report.pearson, None);
        assert_eq!(out.report.spearman, None);
        assert_eq!(out.report.n_points, 10);
        for p in &out.points {
            assert_eq!((p.x, p.y), (1.0, 1.0));
        }
    }

    #[test]
    fn distance_tracks_shared_neighbors_inversely() {
        // On a path, pairs two hops apart share a neighbor and farther
        // pairs share none, so distance and CN anti-correlate.
        let g = path(6);
        let out =
            distance_correlation(&g, PredictorId::Cn, PairFilter::NonAdjacent).unwrap();
        assert!(out.report.spearman.unwrap() < 0.0);
        assert!(out.report.pearson.unwrap() < 0.0);
        for p in &out.points {
            assert!(p.x >= 2.0);
            let expected_cn = if p.x == 2.0 { 1.0 } else { 0.0 };
            assert_eq!(p.y, expected_cn);
        }
    }

    #[test]
    fn unreachable_pairs_are_excluded_and_counted() {
        // Two disjoint triangles: 9 cross pairs have no path.
        let g = Graph::build(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]).unwrap();
        let out = distance_correlation(&g, PredictorId::Lb, PairFilter::All).unwrap();
        assert_eq!(out.report.n_excluded, 9);
        assert_eq!(out.report.n_points, 6);
        // All surviving pairs sit at distance 1.
        assert_eq!(out.report.pearson, None);
        assert!(out.points.iter().all(|p| p.x == 1.0));
    }

    #[test]
    fn sampling_is_deterministic_and_sized() {
        let g = path(30);
        let filter = PairFilter::Sample { count: 40, seed: 9 };
        let a = score_correlation(&g, PredictorId::Ra, PredictorId::Aa, filter).unwrap();
        let b = score_correlation(&g, PredictorId::Ra, PredictorId::Aa, filter).unwrap();
        assert_eq!(a.report.n_points, 40);
        assert_eq!(a.points, b.points);
        let all = PairFilter::Sample {
            count: 10_000,
            seed: 9,
        };
        let c = score_correlation(&g, PredictorId::Ra, PredictorId::Aa, all).unwrap();
        assert_eq!(c.report.n_points, 30 * 29 / 2);
    }

    #[test]
    fn empty_selections_error() {
        let triangle = Graph::build(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        assert!(matches!(
            score_correlation(
                &triangle,
                PredictorId::Pa,
                PredictorId::Cn,
                PairFilter::NonAdjacent
            ),
            Err(AnalysisError::EmptySample)
        ));
        let lone = Graph::build(1, []).unwrap();
        assert!(matches!(
            score_correlation(&lone, PredictorId::Pa, PredictorId::Cn, PairFilter::All),
            Err(AnalysisError::TooFewNodes(1))
        ));
        let out = score_correlation(
            &triangle,
            PredictorId::Pa,
            PredictorId::Cn,
            PairFilter::Sample { count: 0, seed: 1 },
        );
        assert!(matches!(out, Err(AnalysisError::EmptySample)));
    }

    #[test]
    fn pearson_on_exact_linear_data() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        let up = [2.0, 4.0, 6.0, 8.0];
        let down = [8.0, 6.0, 4.0, 2.0];
        assert!((pearson(&xs, &up).unwrap() - 1.0).abs() < 1e-12);
        assert!((pearson(&xs, &down).unwrap() + 1.0).abs() < 1e-12);
        assert_eq!(pearson(&xs, &[5.0; 4]), None);
        assert_eq!(pearson(&[1.0], &[2.0]), None);
    }

    #[test]
    fn spearman_ignores_monotone_rescaling() {
        let xs = [0.3, -1.0, 2.5, 0.9, -0.2, 1.4];
        let ys: [f64; 6] = [1.0, 0.1, 5.0, 2.0, 0.4, 3.0];
        let cubed: Vec<f64> = ys.iter().map(|&y| y.powi(3)).collect();
        let direct = spearman(&xs, &ys).unwrap();
        let transformed = spearman(&xs, &cubed).unwrap();
        assert!((direct - transformed).abs() < 1e-12);
    }

    #[test]
    fn spearman_averages_tied_ranks() {
        // Ranks of [1, 2, 2, 3] are [1, 2.5, 2.5, 4].
        assert_eq!(average_ranks(&[1.0, 2.0, 2.0, 3.0]), vec![1.0, 2.5, 2.5, 4.0]);
        let xs = [1.0, 2.0, 2.0, 3.0];
        let ys = [1.0, 2.0, 3.0, 4.0];
        let got = spearman(&xs, &ys).unwrap();
        // Hand value: pearson([1,2.5,2.5,4], [1,2,3,4]).
        let expected = pearson(&[1.0, 2.5, 2.5, 4.0], &[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(got, expected);
    }
}
