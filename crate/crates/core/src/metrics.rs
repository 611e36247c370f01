//! Whole-graph topology statistics.

use rayon::prelude::*;
use thiserror::Error;

use crate::graph::{Graph, GraphError, NodeId};
use crate::setops::intersection_size;

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("graph has {0} nodes; topology statistics need at least 2")]
    TooFewNodes(usize),
    #[error("no connected node pairs; average path length is undefined")]
    NoReachablePairs,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Summary statistics of one graph.
#[derive(Debug, Clone, PartialEq)]
pub struct TopologyStats {
    pub num_nodes: usize,
    pub num_edges: usize,
    /// `2|E| / (|V| (|V|-1))`.
    pub density: f64,
    /// Mean local clustering coefficient over all nodes.
    pub avg_clustering: f64,
    /// `2|E| / |V|`.
    pub avg_degree: f64,
    /// Mean hop distance over distinct reachable unordered pairs.
    pub avg_shortest_path: f64,
}

/// Fraction of realized edges among the neighbors of `u`, in `[0, 1]`.
/// Nodes with degree below 2 score 0.
pub fn local_clustering(g: &Graph, u: NodeId) -> Result<f64, MetricsError> {
    let nbrs = g.try_neighbors(u)?;
    let k = nbrs.len();
    if k < 2 {
        return Ok(0.0);
    }
    // Each edge among neighbors is seen from both endpoints.
    let closed_walks: u64 = nbrs
        .iter()
        .map(|&v| intersection_size(g.neighbors(v), nbrs) as u64)
        .sum();
    Ok(closed_walks as f64 / (k as u64 * (k as u64 - 1)) as f64)
}

/// Computes all [`TopologyStats`] fields in one pass.
///
/// The average path length runs one BFS per node, parallelized over sources;
/// the distance and pair tallies are integers, so the result does not depend
/// on worker count. Unreachable pairs are excluded from the average.
pub fn topology_stats(g: &Graph) -> Result<TopologyStats, MetricsError> {
    let n = g.num_nodes();
    if n < 2 {
        return Err(MetricsError::TooFewNodes(n));
    }
    let m = g.num_edges();
    let density = 2.0 * m as f64 / (n as f64 * (n - 1) as f64);
    let avg_degree = 2.0 * m as f64 / n as f64;

    let clustering_sum: f64 = (0..n)
        .map(|u| local_clustering(g, u).expect("id in range"))
        .sum();
    let avg_clustering = clustering_sum / n as f64;

    let (dist_sum, pair_count) = (0..n)
        .into_par_iter()
        .map(|source| {
            let mut dist = vec![u32::MAX; n];
            g.bfs_raw(source, &mut dist);
            let mut sum = 0u64;
            let mut pairs = 0u64;
            for (v, &d) in dist.iter().enumerate() {
                if v != source && d != u32::MAX {
                    sum += d as u64;
                    pairs += 1;
                }
            }
            (sum, pairs)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    if pair_count == 0 {
        return Err(MetricsError::NoReachablePairs);
    }
    // Every unordered pair was counted once from each endpoint.
    let avg_shortest_path = dist_sum as f64 / pair_count as f64;

    Ok(TopologyStats {
        num_nodes: n,
        num_edges: m,
        density,
        avg_clustering,
        avg_degree,
        avg_shortest_path,
    })
}
