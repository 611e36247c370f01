//! Pairwise link-prediction scores.
//!
//! Five predictors share one interface. Four are classic neighborhood
//! indices: preferential attachment (PA), common neighbors (CN),
//! Adamic-Adar (AA), and resource allocation (RA). The fifth is the
//! parameter-free local blocking index (LB), built from degree blocks.
//!
//! The degree block of a node `u` is its closed neighborhood: `u` plus its
//! `k_u` neighbors. Within a block only the star edges around the center are
//! counted, which gives the intra-block link density `2 / (k_u + 1)`. For two
//! blocks, the inter-block density divides the number of edges with one
//! endpoint in each block by the capacity `(k_u + 1) * (k_v + 1)`. The LB
//! score of a candidate pair `(r, s)` sums inter-block densities over all
//! pairs of blocks centered at non-shared neighbors of `r` and `s`, plus the
//! intra-block densities of blocks centered at their common neighbors. This
//! definition applies uniformly whether or not `r` and `s` are adjacent.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use thiserror::Error;

use crate::graph::{Graph, NodeId};
use crate::setops::{difference, intersection, intersection_size};

#[derive(Debug, Error)]
pub enum PredictError {
    #[error("node id {0} out of range")]
    InvalidNode(NodeId),
    #[error("cannot score node {0} against itself")]
    SamePair(NodeId),
    #[error("graph has {0} nodes; scoring needs at least 2")]
    TooFewNodes(usize),
    #[error(
        "eager score table for {nodes} nodes would hold {pairs} pairs \
         (cap {cap}); use an on-demand table instead"
    )]
    TableTooLarge { nodes: usize, pairs: u64, cap: usize },
}

/// The five pairwise predictors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PredictorId {
    Lb,
    Pa,
    Cn,
    Aa,
    Ra,
}

impl PredictorId {
    pub const ALL: [PredictorId; 5] = [
        PredictorId::Lb,
        PredictorId::Pa,
        PredictorId::Cn,
        PredictorId::Aa,
        PredictorId::Ra,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PredictorId::Lb => "lb",
            PredictorId::Pa => "pa",
            PredictorId::Cn => "cn",
            PredictorId::Aa => "aa",
            PredictorId::Ra => "ra",
        }
    }
}

impl fmt::Display for PredictorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PredictorId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "lb" => Ok(PredictorId::Lb),
            "pa" => Ok(PredictorId::Pa),
            "cn" => Ok(PredictorId::Cn),
            "aa" => Ok(PredictorId::Aa),
            "ra" => Ok(PredictorId::Ra),
            other => Err(format!(
                "unknown predictor {other:?} (expected lb, pa, cn, aa, or ra)"
            )),
        }
    }
}

/// A node's degree block: the node itself plus all of its neighbors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeBlock {
    pub center: NodeId,
    /// Sorted; always contains `center`.
    pub members: Vec<NodeId>,
}

impl DegreeBlock {
    pub fn new(g: &Graph, u: NodeId) -> Result<Self, PredictError> {
        let members = g
            .closed_neighborhood(u)
            .map_err(|_| PredictError::InvalidNode(u))?;
        Ok(DegreeBlock { center: u, members })
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

fn check_node(g: &Graph, u: NodeId) -> Result<(), PredictError> {
    if u < g.num_nodes() {
        Ok(())
    } else {
        Err(PredictError::InvalidNode(u))
    }
}

/// Validates a pair and returns it with the smaller id first.
fn check_pair(g: &Graph, r: NodeId, s: NodeId) -> Result<(NodeId, NodeId), PredictError> {
    check_node(g, r)?;
    check_node(g, s)?;
    if r == s {
        return Err(PredictError::SamePair(r));
    }
    Ok((r.min(s), r.max(s)))
}

/// Link density inside the degree block of `u`: `2 / (k_u + 1)`.
pub fn block_density(g: &Graph, u: NodeId) -> Result<f64, PredictError> {
    check_node(g, u)?;
    Ok(2.0 / (g.degree(u) as f64 + 1.0))
}

/// Number of edges with one endpoint in the block of `u` and the other in
/// the block of `v`, each edge counted once. Edges inside the block overlap
/// qualify and are counted once as well.
pub fn inter_block_edges(g: &Graph, u: NodeId, v: NodeId) -> Result<u64, PredictError> {
    check_pair(g, u, v)?;
    let bu = g.closed_neighborhood(u).expect("id in range");
    let bv = g.closed_neighborhood(v).expect("id in range");
    Ok(inter_block_edges_between(g, &bu, &bv))
}

/// Core edge count between two materialized blocks (sorted member lists).
fn inter_block_edges_between(g: &Graph, bu: &[NodeId], bv: &[NodeId]) -> u64 {
    // Scanning from the `bu` side counts each qualifying edge once, except
    // edges with both endpoints in the overlap, which it counts twice.
    let cross: u64 = bu
        .iter()
        .map(|&a| intersection_size(g.neighbors(a), bv) as u64)
        .sum();
    let overlap = intersection(bu, bv);
    let inside: u64 = overlap
        .iter()
        .map(|&a| intersection_size(g.neighbors(a), &overlap) as u64)
        .sum::<u64>()
        / 2;
    cross - inside
}

/// Inter-block link density: qualifying edges over the block-size product
/// `(k_u + 1) * (k_v + 1)`.
pub fn inter_block_density(g: &Graph, u: NodeId, v: NodeId) -> Result<f64, PredictError> {
    check_pair(g, u, v)?;
    Ok(inter_block_density_unchecked(g, u, v))
}

fn inter_block_density_unchecked(g: &Graph, u: NodeId, v: NodeId) -> f64 {
    let bu = g.closed_neighborhood(u).expect("id in range");
    let bv = g.closed_neighborhood(v).expect("id in range");
    let count = inter_block_edges_between(g, &bu, &bv);
    let capacity = (bu.len() as u64) * (bv.len() as u64);
    count as f64 / capacity as f64
}

/// Local blocking score of the pair `(r, s)`.
pub fn lb_score(g: &Graph, r: NodeId, s: NodeId) -> Result<f64, PredictError> {
    let (r, s) = check_pair(g, r, s)?;
    Ok(lb_score_unchecked(g, r, s))
}

/// `r < s`, both valid. Summation order is fixed (ascending neighbor ids),
/// so equal pairs always produce bit-identical scores.
fn lb_score_unchecked(g: &Graph, r: NodeId, s: NodeId) -> f64 {
    let nr = g.neighbors(r);
    let ns = g.neighbors(s);
    let cn = intersection(nr, ns);
    let only_r = difference(nr, &cn);
    let only_s = difference(ns, &cn);
    let mut total = 0.0;
    for &u in &only_r {
        for &v in &only_s {
            total += inter_block_density_unchecked(g, u, v);
        }
    }
    for &z in &cn {
        total += 2.0 / (g.degree(z) as f64 + 1.0);
    }
    total
}

/// Preferential attachment: the degree product `k_r * k_s`.
pub fn pa_score(g: &Graph, r: NodeId, s: NodeId) -> Result<f64, PredictError> {
    let (r, s) = check_pair(g, r, s)?;
    Ok(g.degree(r) as f64 * g.degree(s) as f64)
}

/// Number of common neighbors.
pub fn cn_score(g: &Graph, r: NodeId, s: NodeId) -> Result<f64, PredictError> {
    let (r, s) = check_pair(g, r, s)?;
    Ok(intersection_size(g.neighbors(r), g.neighbors(s)) as f64)
}

/// Adamic-Adar: common neighbors weighted by `1 / ln k_z`. Natural log; any
/// other base rescales every score by the same factor and leaves rankings
/// unchanged.
pub fn aa_score(g: &Graph, r: NodeId, s: NodeId) -> Result<f64, PredictError> {
    let (r, s) = check_pair(g, r, s)?;
    let sum = intersection(g.neighbors(r), g.neighbors(s))
        .into_iter()
        .map(|z| {
            let k = g.degree(z);
            debug_assert!(k >= 2, "a common neighbor has at least two neighbors");
            1.0 / (k as f64).ln()
        })
        .sum();
    Ok(sum)
}

/// Resource allocation: common neighbors weighted by `1 / k_z`.
pub fn ra_score(g: &Graph, r: NodeId, s: NodeId) -> Result<f64, PredictError> {
    let (r, s) = check_pair(g, r, s)?;
    let sum = intersection(g.neighbors(r), g.neighbors(s))
        .into_iter()
        .map(|z| 1.0 / g.degree(z) as f64)
        .sum();
    Ok(sum)
}

/// Scores one pair with the given predictor.
pub fn score(g: &Graph, predictor: PredictorId, r: NodeId, s: NodeId) -> Result<f64, PredictError> {
    let (r, s) = check_pair(g, r, s)?;
    Ok(score_unchecked(g, predictor, r, s))
}

fn score_unchecked(g: &Graph, predictor: PredictorId, r: NodeId, s: NodeId) -> f64 {
    match predictor {
        PredictorId::Lb => lb_score_unchecked(g, r, s),
        PredictorId::Pa => g.degree(r) as f64 * g.degree(s) as f64,
        PredictorId::Cn => intersection_size(g.neighbors(r), g.neighbors(s)) as f64,
        PredictorId::Aa => intersection(g.neighbors(r), g.neighbors(s))
            .into_iter()
            .map(|z| 1.0 / (g.degree(z) as f64).ln())
            .sum(),
        PredictorId::Ra => intersection(g.neighbors(r), g.neighbors(s))
            .into_iter()
            .map(|z| 1.0 / g.degree(z) as f64)
            .sum(),
    }
}

/// Default node cap for eager all-pairs tables.
pub const DEFAULT_EAGER_CAP: usize = 5000;

/// Precomputed block densities for fast repeated LB scoring: the intra-block
/// density of every block plus the inter-block density of every block pair.
struct LbCache {
    n: usize,
    intra: Vec<f64>,
    inter: Vec<f64>,
}

fn tri_index(n: usize, u: NodeId, v: NodeId) -> usize {
    debug_assert!(u < v && v < n);
    u * (2 * n - u - 1) / 2 + (v - u - 1)
}

fn tri_len(n: usize) -> usize {
    n * (n - 1) / 2
}

impl LbCache {
    fn build(g: &Graph) -> Self {
        let n = g.num_nodes();
        let closed: Vec<Vec<NodeId>> = (0..n)
            .map(|u| g.closed_neighborhood(u).expect("id in range"))
            .collect();
        let intra: Vec<f64> = (0..n).map(|u| 2.0 / (g.degree(u) as f64 + 1.0)).collect();
        let closed = &closed;
        let inter: Vec<f64> = (0..n)
            .into_par_iter()
            .flat_map_iter(|u| {
                (u + 1..n).map(move |v| {
                    let bu = &closed[u];
                    let bv = &closed[v];
                    let count = inter_block_edges_between(g, bu, bv);
                    let capacity = (bu.len() as u64) * (bv.len() as u64);
                    count as f64 / capacity as f64
                })
            })
            .collect();
        debug_assert_eq!(inter.len(), tri_len(n));
        LbCache { n, intra, inter }
    }

    fn inter_density(&self, u: NodeId, v: NodeId) -> f64 {
        if u < v {
            self.inter[tri_index(self.n, u, v)]
        } else {
            self.inter[tri_index(self.n, v, u)]
        }
    }

    /// Same terms and summation order as [`lb_score_unchecked`].
    fn lb(&self, g: &Graph, r: NodeId, s: NodeId) -> f64 {
        let nr = g.neighbors(r);
        let ns = g.neighbors(s);
        let cn = intersection(nr, ns);
        let only_r = difference(nr, &cn);
        let only_s = difference(ns, &cn);
        let mut total = 0.0;
        for &u in &only_r {
            for &v in &only_s {
                total += self.inter_density(u, v);
            }
        }
        for &z in &cn {
            total += self.intra[z];
        }
        total
    }
}

/// Scores for every unordered node pair of one graph under one predictor.
///
/// Eager tables hold all `|V| (|V|-1) / 2` scores; on-demand tables compute
/// each request from scratch, trading time for memory on large graphs.
#[derive(Debug)]
pub struct ScoreTable<'g> {
    g: &'g Graph,
    predictor: PredictorId,
    dense: Option<Vec<f64>>,
}

impl<'g> ScoreTable<'g> {
    pub fn predictor(&self) -> PredictorId {
        self.predictor
    }

    pub fn graph(&self) -> &'g Graph {
        self.g
    }

    pub fn is_eager(&self) -> bool {
        self.dense.is_some()
    }

    /// Score of the unordered pair `(r, s)`.
    pub fn score(&self, r: NodeId, s: NodeId) -> Result<f64, PredictError> {
        let (r, s) = check_pair(self.g, r, s)?;
        match &self.dense {
            Some(values) => Ok(values[tri_index(self.g.num_nodes(), r, s)]),
            None => Ok(score_unchecked(self.g, self.predictor, r, s)),
        }
    }
}

/// Builds an eager all-pairs table, refusing graphs above
/// [`DEFAULT_EAGER_CAP`] nodes.
pub fn score_all_pairs<'g>(
    g: &'g Graph,
    predictor: PredictorId,
) -> Result<ScoreTable<'g>, PredictError> {
    score_all_pairs_with_cap(g, predictor, DEFAULT_EAGER_CAP)
}

/// Builds an eager all-pairs table with an explicit node cap.
pub fn score_all_pairs_with_cap<'g>(
    g: &'g Graph,
    predictor: PredictorId,
    cap: usize,
) -> Result<ScoreTable<'g>, PredictError> {
    let n = g.num_nodes();
    if n < 2 {
        return Err(PredictError::TooFewNodes(n));
    }
    if n > cap {
        return Err(PredictError::TableTooLarge {
            nodes: n,
            pairs: (n as u64) * (n as u64 - 1) / 2,
            cap,
        });
    }
    let dense = match predictor {
        PredictorId::Lb => {
            let cache = LbCache::build(g);
            let cache = &cache;
            (0..n)
                .into_par_iter()
                .flat_map_iter(|r| (r + 1..n).map(move |s| cache.lb(g, r, s)))
                .collect()
        }
        _ => (0..n)
            .into_par_iter()
            .flat_map_iter(|r| (r + 1..n).map(move |s| score_unchecked(g, predictor, r, s)))
            .collect(),
    };
    Ok(ScoreTable {
        g,
        predictor,
        dense: Some(dense),
    })
}

/// Builds a table that computes each score on request.
pub fn on_demand_table(g: &Graph, predictor: PredictorId) -> ScoreTable<'_> {
    ScoreTable {
        g,
        predictor,
        dense: None,
    }
}
