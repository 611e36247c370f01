//! Seeded random-graph generators.

use std::collections::HashSet;

use lbnet::graph::{Graph, NodeId};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Uniform random graph: each unordered pair becomes an edge with
/// probability `p`. May contain isolated nodes or no edges at all.
pub fn gnp(n: usize, p: f64, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Graph::build(n, edges).expect("generated pairs are valid")
}

/// Connected random graph: a random attachment tree plus up to `extra`
/// additional distinct edges.
pub fn random_connected(n: usize, extra: usize, seed: u64) -> Graph {
    assert!(n >= 2, "a connected graph needs at least two nodes");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edge_set: HashSet<(NodeId, NodeId)> = HashSet::new();
    for v in 1..n {
        let u = rng.gen_range(0..v);
        edge_set.insert((u, v));
    }
    let extra = extra.min(n * (n - 1) / 2 - edge_set.len());
    let mut added = 0;
    while added < extra {
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        if a == b {
            continue;
        }
        if edge_set.insert((a.min(b), a.max(b))) {
            added += 1;
        }
    }
    let mut edges: Vec<(NodeId, NodeId)> = edge_set.into_iter().collect();
    edges.sort_unstable();
    Graph::build(n, edges).expect("generated pairs are valid")
}

/// Fisher-Yates permutation of `0..n`.
pub fn random_perm(n: usize, seed: u64) -> Vec<NodeId> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut perm: Vec<NodeId> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.gen_range(0..=i);
        perm.swap(i, j);
    }
    perm
}

/// Relabels every node: old id `u` becomes `perm[u]`.
pub fn permuted(g: &Graph, perm: &[NodeId]) -> Graph {
    assert_eq!(perm.len(), g.num_nodes());
    let edges: Vec<(NodeId, NodeId)> = g.edges().map(|(u, v)| (perm[u], perm[v])).collect();
    Graph::build(g.num_nodes(), edges).expect("permuted edges stay valid")
}
