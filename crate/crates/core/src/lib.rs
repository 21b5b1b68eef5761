//! Toolkit for 3-uniform hypergraph tiling around the pattern `K4m` (the
//! 3-graph on four vertices with three edges).
//!
//! The crate bundles:
//!
//! - [`hypergraph`]: an immutable 3-graph with O(1) codegree queries, links,
//!   pattern-copy enumeration and partition statistics;
//! - [`constructions`]: the extremal families `H_{a,b}` and `H_l`, tournament
//!   triangle hypergraphs, and seeded random 3-graphs;
//! - [`solver`]: an exact backtracking oracle for pattern factors and maximum
//!   tilings, plus the tiny-order threshold enumeration;
//! - [`tiling`]: the weighted local search that grows disjoint `K4m` copies
//!   and edges through exchange moves;
//! - [`closeness`]: connector counting, `(i, eta)`-close neighborhoods, the
//!   closed-class partition and bridge statistics;
//! - [`absorption`]: absorbing-set machinery and the end-to-end factor
//!   pipeline;
//! - [`selftest`]: the acceptance checks shared by `cargo test` and the CLI.

pub mod absorption;
mod bitset;
pub mod closeness;
pub mod constructions;
pub mod hypergraph;
pub mod io;
pub mod matching;
pub mod pattern;
pub mod selftest;
pub mod solver;
pub mod tiling;

pub use hypergraph::{FourSet, Hypergraph3, HypergraphError, PartitionStats, Triple, MAX_VERTICES};
pub use pattern::Pattern4;
