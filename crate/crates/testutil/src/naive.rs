//! Brute-force reference for the block-density score.
//!
//! Everything here is computed straight from the set definitions with hash
//! sets and explicit enumeration, sharing no scoring code with the library,
//! so it can serve as an independent oracle in equivalence tests.

use std::collections::HashSet;

use lbnet::graph::{Graph, NodeId};

/// All degree blocks of a graph with their internal and pairwise densities,
/// computed the slow way.
pub struct NaiveBlocks {
    blocks: Vec<HashSet<NodeId>>,
    intra: Vec<f64>,
    inter: Vec<Vec<f64>>,
}

impl NaiveBlocks {
    pub fn build(g: &Graph) -> Self {
        let n = g.num_nodes();
        let blocks: Vec<HashSet<NodeId>> = (0..n)
            .map(|u| {
                let mut block: HashSet<NodeId> = g.neighbors(u).iter().copied().collect();
                block.insert(u);
                block
            })
            .collect();

        // A block's own edges are the star around its center, so the
        // density is k / C(k+1, 2). Isolated centers have no pairs at all;
        // their density is never consulted because a shared neighbor has
        // degree at least two.
        let intra: Vec<f64> = (0..n)
            .map(|u| {
                let k = g.degree(u) as f64;
                k / (k * (k + 1.0) / 2.0)
            })
            .collect();

        // An edge lies between blocks x and y when one endpoint is in x and
        // the other in y; enumerate every graph edge against every block
        // pair and divide by the size product.
        let all_edges: Vec<(NodeId, NodeId)> = g.edges().collect();
        let mut inter = vec![vec![0.0; n]; n];
        for x in 0..n {
            for y in 0..n {
                let mut count = 0u64;
                for &(a, b) in &all_edges {
                    let forward = blocks[x].contains(&a) && blocks[y].contains(&b);
                    let backward = blocks[y].contains(&a) && blocks[x].contains(&b);
                    if forward || backward {
                        count += 1;
                    }
                }
                let capacity = (blocks[x].len() * blocks[y].len()) as f64;
                inter[x][y] = count as f64 / capacity;
            }
        }

        NaiveBlocks {
            blocks,
            intra,
            inter,
        }
    }

    pub fn block(&self, u: NodeId) -> &HashSet<NodeId> {
        &self.blocks[u]
    }

    pub fn intra_density(&self, u: NodeId) -> f64 {
        self.intra[u]
    }

    pub fn inter_density(&self, x: NodeId, y: NodeId) -> f64 {
        self.inter[x][y]
    }

    /// The reference score: exclusive-neighbor block pairs plus the shared
    /// neighbors' own block densities, both in ascending node order.
    pub fn lb(&self, g: &Graph, r: NodeId, s: NodeId) -> f64 {
        let nr: HashSet<NodeId> = g.neighbors(r).iter().copied().collect();
        let ns: HashSet<NodeId> = g.neighbors(s).iter().copied().collect();

        let mut shared: Vec<NodeId> = nr.intersection(&ns).copied().collect();
        shared.sort_unstable();
        let mut only_r: Vec<NodeId> = nr.difference(&ns).copied().collect();
        only_r.sort_unstable();
        let mut only_s: Vec<NodeId> = ns.difference(&nr).copied().collect();
        only_s.sort_unstable();

        let mut total = 0.0;
        for &u in &only_r {
            for &v in &only_s {
                total += self.inter[u][v];
            }
        }
        for &z in &shared {
            total += self.intra[z];
        }
        total
    }
}
