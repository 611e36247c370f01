//! Link prediction on undirected simple graphs.
//!
//! The crate ships a parameter-free local blocking (LB) index together with
//! four classic similarity baselines (PA, CN, AA, RA), the missing-link and
//! spurious-link AUC evaluation protocol, whole-graph topology statistics,
//! and score/distance correlation analyses.

pub mod analysis;
pub mod evaluation;
pub mod graph;
pub mod metrics;
pub mod predictors;
pub(crate) mod setops;
