//! Pair scorers with known behavior, for AUC calibration tests.

use std::collections::HashSet;

use lbnet::evaluation::{mix_seed, PairScorer};
use lbnet::graph::NodeId;

/// Scores every pair the same; its AUC is exactly one half.
pub struct ConstantScorer(pub f64);

impl PairScorer for ConstantScorer {
    fn pair_score(&self, _u: NodeId, _v: NodeId) -> f64 {
        self.0
    }
}

/// Scores a fixed set of pairs 1 and everything else 0; against negatives
/// outside the set its AUC is exactly one.
pub struct OracleScorer {
    hits: HashSet<(NodeId, NodeId)>,
}

impl OracleScorer {
    pub fn new(pairs: impl IntoIterator<Item = (NodeId, NodeId)>) -> Self {
        OracleScorer {
            hits: pairs
                .into_iter()
                .map(|(u, v)| (u.min(v), u.max(v)))
                .collect(),
        }
    }
}

impl PairScorer for OracleScorer {
    fn pair_score(&self, u: NodeId, v: NodeId) -> f64 {
        if self.hits.contains(&(u.min(v), u.max(v))) {
            1.0
        } else {
            0.0
        }
    }
}

/// Deterministic pseudo-random scorer: every pair gets an independent-ish
/// value in `[0, 1)` that depends only on the seed and the unordered pair,
/// so the expected AUC is one half with no state between calls.
pub struct HashScorer {
    pub seed: u64,
}

impl PairScorer for HashScorer {
    fn pair_score(&self, u: NodeId, v: NodeId) -> f64 {
        let a = u.min(v) as u64;
        let b = u.max(v) as u64;
        let bits = mix_seed(mix_seed(self.seed, a), b);
        (bits >> 11) as f64 / (1u64 << 53) as f64
    }
}
