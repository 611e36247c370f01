//! Test support for the lbnet workspace: seeded graph generators, a
//! brute-force reference implementation of the block-density scorer, and
//! simple scorers with known AUC behavior.

pub mod gen;
pub mod naive;
pub mod scorers;
