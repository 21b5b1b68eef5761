//! Immutable 3-uniform hypergraph with O(1) codegree queries.
//!
//! Vertices are `0..n` with `n` capped at [`MAX_VERTICES`]; the neighborhood
//! of every vertex pair is a dense 128-bit mask, which makes codegree, link
//! and pattern-copy queries cheap enough to sit in the inner loops of the
//! solver and the local search.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bitset;
use crate::pattern::Pattern4;

/// Hard cap on the vertex count, fixed by the `u128` pair-neighborhood masks.
pub const MAX_VERTICES: usize = 128;

/// An unordered triple, stored sorted.
pub type Triple = [usize; 3];

/// An unordered 4-set, stored sorted.
pub type FourSet = [usize; 4];

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HypergraphError {
    #[error("vertex {vertex} out of range for n = {n}")]
    OutOfRange { vertex: usize, n: usize },
    #[error("triple {0:?} has a repeated vertex")]
    DegenerateTriple(Triple),
    #[error("duplicate edge {0:?}")]
    DuplicateEdge(Triple),
    #[error("vertex count {0} exceeds the supported maximum {MAX_VERTICES}")]
    TooManyVertices(usize),
    #[error("vertex {0} has no class label")]
    UnlabelledVertex(usize),
    #[error("class label {0} out of range (at most 3 classes)")]
    TooManyClasses(usize),
}

/// Sort a triple in place and return it.
pub fn normalize_triple(mut t: Triple) -> Triple {
    t.sort_unstable();
    t
}

/// Sort a 4-set in place and return it.
pub fn normalize_four_set(mut s: FourSet) -> FourSet {
    s.sort_unstable();
    s
}

/// Immutable 3-graph. Construct through [`Hypergraph3::from_edge_list`]; all
/// queries are pure, so values are safely shareable across threads.
#[derive(Clone, PartialEq, Eq)]
pub struct Hypergraph3 {
    n: usize,
    edges: Vec<Triple>,
    /// Triangular pair index -> mask of vertices completing the pair to an edge.
    pair_nbhd: Vec<u128>,
}

impl std::fmt::Debug for Hypergraph3 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Hypergraph3(n={}, m={})", self.n, self.edges.len())
    }
}

impl Hypergraph3 {
    /// Build from an explicit edge list. Triples may list vertices in any
    /// order; they are normalized to sorted form. Duplicates are rejected
    /// rather than merged so that generator bugs surface.
    pub fn from_edge_list(n: usize, triples: &[Triple]) -> Result<Self, HypergraphError> {
        if n > MAX_VERTICES {
            return Err(HypergraphError::TooManyVertices(n));
        }
        let mut edges: Vec<Triple> = Vec::with_capacity(triples.len());
        for &raw in triples {
            for &v in &raw {
                if v >= n {
                    return Err(HypergraphError::OutOfRange { vertex: v, n });
                }
            }
            let t = normalize_triple(raw);
            if t[0] == t[1] || t[1] == t[2] {
                return Err(HypergraphError::DegenerateTriple(raw));
            }
            edges.push(t);
        }
        edges.sort_unstable();
        if let Some(w) = edges.windows(2).find(|w| w[0] == w[1]) {
            return Err(HypergraphError::DuplicateEdge(w[0]));
        }
        let mut pair_nbhd = vec![0u128; n * n.saturating_sub(1) / 2];
        for &[a, b, c] in &edges {
            pair_nbhd[pair_index(n, a, b)] |= 1u128 << c;
            pair_nbhd[pair_index(n, a, c)] |= 1u128 << b;
            pair_nbhd[pair_index(n, b, c)] |= 1u128 << a;
        }
        Ok(Hypergraph3 { n, edges, pair_nbhd })
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges in lexicographic order.
    pub fn edges(&self) -> &[Triple] {
        &self.edges
    }

    pub fn has_edge(&self, u: usize, v: usize, w: usize) -> bool {
        debug_assert!(u != v && v != w && u != w);
        self.pair_nbhd[pair_index(self.n, u, v)] & (1u128 << w) != 0
    }

    /// `N(u,v)` as a bit mask.
    pub fn pair_neighborhood(&self, u: usize, v: usize) -> u128 {
        self.pair_nbhd[pair_index(self.n, u, v)]
    }

    pub fn pair_degree(&self, u: usize, v: usize) -> usize {
        self.pair_neighborhood(u, v).count_ones() as usize
    }

    /// Minimum codegree over all vertex pairs; 0 when fewer than 2 vertices.
    pub fn min_codegree(&self) -> usize {
        self.pair_nbhd
            .iter()
            .map(|m| m.count_ones() as usize)
            .min()
            .unwrap_or(0)
    }

    /// Number of the four triples inside a sorted 4-set that are edges.
    pub fn edges_in_four_set(&self, s: FourSet) -> usize {
        let [a, b, c, d] = s;
        usize::from(self.has_edge(a, b, c))
            + usize::from(self.has_edge(a, b, d))
            + usize::from(self.has_edge(a, c, d))
            + usize::from(self.has_edge(b, c, d))
    }

    /// Does the 4-set contain a copy of the pattern as a subgraph?
    ///
    /// Among four vertices, any two distinct triples share exactly two
    /// vertices, so containment reduces to a per-pattern edge-count predicate.
    pub fn spans(&self, s: FourSet, p: Pattern4) -> bool {
        let c = self.edges_in_four_set(s);
        match p {
            Pattern4::K4 => c == 4,
            Pattern4::K4m => c >= 3,
            Pattern4::K4m2e => c >= 2,
            Pattern4::K4m3e => c >= 1,
        }
    }

    /// Link mask of an arbitrary 3-set `t` (not required to be an edge):
    /// vertices `v` outside `t` such that `t + v` contains the `K4m` pattern,
    /// that is, at least 3 of the 4 triples of the 4-set are edges.
    pub fn link_mask(&self, t: Triple) -> Result<u128, HypergraphError> {
        let t = normalize_triple(t);
        if t[0] == t[1] || t[1] == t[2] {
            return Err(HypergraphError::DegenerateTriple(t));
        }
        if t[2] >= self.n {
            return Err(HypergraphError::OutOfRange { vertex: t[2], n: self.n });
        }
        let [a, b, c] = t;
        let nab = self.pair_neighborhood(a, b);
        let nac = self.pair_neighborhood(a, c);
        let nbc = self.pair_neighborhood(b, c);
        let mask = if self.has_edge(a, b, c) {
            // t is itself an edge: need 2 more of the 3 side triples.
            (nab & nac) | (nab & nbc) | (nac & nbc)
        } else {
            // t is not an edge: all 3 side triples must be present.
            nab & nac & nbc
        };
        Ok(mask & !bitset::mask_of(&t))
    }

    /// `L(t)` as a sorted vertex list.
    pub fn link(&self, t: Triple) -> Result<Vec<usize>, HypergraphError> {
        Ok(bitset::to_vec(self.link_mask(t)?))
    }

    /// All 4-sets containing the pattern, in lexicographic order.
    pub fn pattern_copies(&self, p: Pattern4) -> Vec<FourSet> {
        let mut out = Vec::new();
        for a in 0..self.n {
            for b in (a + 1)..self.n {
                for c in (b + 1)..self.n {
                    for d in (c + 1)..self.n {
                        let s = [a, b, c, d];
                        if self.spans(s, p) {
                            out.push(s);
                        }
                    }
                }
            }
        }
        out
    }

    /// Check `|L(e)| >= (3*delta_2 - n)/2` for every edge. The bound is
    /// half-integral, so the slack is reported doubled to stay exact.
    pub fn edge_extension_check(&self) -> EdgeExtensionReport {
        let delta2 = self.min_codegree();
        let bound_x2 = 3 * delta2 as i64 - self.n as i64;
        let mut worst: Option<(Triple, i64)> = None;
        for &e in &self.edges {
            let link_size = self.link_mask(e).expect("edges are valid triples").count_ones();
            let slack_x2 = 2 * link_size as i64 - bound_x2;
            if worst.map_or(true, |(_, s)| slack_x2 < s) {
                worst = Some((e, slack_x2));
            }
        }
        EdgeExtensionReport {
            holds: worst.map_or(true, |(_, s)| s >= 0),
            worst_edge: worst.map(|(e, _)| e),
            min_slack_x2: worst.map(|(_, s)| s),
        }
    }

    /// Exact per-type edge and `K4m` 4-set counts for a labelling into at
    /// most 3 classes. Every vertex must carry a label in `0..3`.
    pub fn partition_stats(&self, labels: &[Option<usize>]) -> Result<PartitionStats, HypergraphError> {
        assert_eq!(labels.len(), self.n, "one label slot per vertex");
        let mut resolved = Vec::with_capacity(self.n);
        for (v, l) in labels.iter().enumerate() {
            match l {
                None => return Err(HypergraphError::UnlabelledVertex(v)),
                Some(c) if *c >= 3 => return Err(HypergraphError::TooManyClasses(*c)),
                Some(c) => resolved.push(*c),
            }
        }
        let mut edge_counts: BTreeMap<String, u64> = BTreeMap::new();
        for &e in &self.edges {
            *edge_counts.entry(type_key(&e.map(|v| resolved[v]))).or_default() += 1;
        }
        let mut pattern_counts: BTreeMap<String, u64> = BTreeMap::new();
        for s in self.pattern_copies(Pattern4::K4m) {
            *pattern_counts.entry(type_key(&s.map(|v| resolved[v]))).or_default() += 1;
        }
        Ok(PartitionStats { labels: resolved, edge_counts, pattern_counts })
    }

    /// Subgraph induced by `vertices` (distinct, in range), relabelled to
    /// `0..k` in sorted order. Returns the graph and the new-to-old map.
    pub fn induced(&self, vertices: &[usize]) -> Result<(Hypergraph3, Vec<usize>), HypergraphError> {
        let mut map: Vec<usize> = vertices.to_vec();
        map.sort_unstable();
        if let Some(w) = map.windows(2).find(|w| w[0] == w[1]) {
            return Err(HypergraphError::DegenerateTriple([w[0], w[0], w[0]]));
        }
        if let Some(&v) = map.last() {
            if v >= self.n {
                return Err(HypergraphError::OutOfRange { vertex: v, n: self.n });
            }
        }
        let mut back = vec![usize::MAX; self.n];
        for (i, &v) in map.iter().enumerate() {
            back[v] = i;
        }
        let edges: Vec<Triple> = self
            .edges
            .iter()
            .filter(|e| e.iter().all(|&v| back[v] != usize::MAX))
            .map(|e| e.map(|v| back[v]))
            .collect();
        let h = Hypergraph3::from_edge_list(map.len(), &edges)?;
        Ok((h, map))
    }

    /// Rebuild the pair neighborhoods from scratch and compare; used to audit
    /// the incremental construction.
    pub fn consistency_check(&self) -> bool {
        match Hypergraph3::from_edge_list(self.n, &self.edges) {
            Ok(h) => h.pair_nbhd == self.pair_nbhd && 3 * self.edges.len() == self.pair_nbhd.iter().map(|m| m.count_ones() as usize).sum::<usize>(),
            Err(_) => false,
        }
    }
}

/// Outcome of the per-edge link lower-bound check.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct EdgeExtensionReport {
    pub holds: bool,
    pub worst_edge: Option<Triple>,
    /// `2*|L(e)| - (3*delta_2 - n)` for the worst edge; `None` when edgeless.
    pub min_slack_x2: Option<i64>,
}

impl EdgeExtensionReport {
    pub fn min_slack(&self) -> Option<f64> {
        self.min_slack_x2.map(|s| s as f64 / 2.0)
    }
}

/// Per-type counts for a labelled vertex partition. Types are multisets of
/// class letters (`A`, `B`, `C`), e.g. `"AAB"` or `"BBBB"`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct PartitionStats {
    pub labels: Vec<usize>,
    pub edge_counts: BTreeMap<String, u64>,
    /// Counts of 4-sets spanning `K4m`, by type.
    pub pattern_counts: BTreeMap<String, u64>,
}

impl PartitionStats {
    pub fn edge_total(&self) -> u64 {
        self.edge_counts.values().sum()
    }

    pub fn edge_count(&self, key: &str) -> u64 {
        self.edge_counts.get(key).copied().unwrap_or(0)
    }

    pub fn pattern_count(&self, key: &str) -> u64 {
        self.pattern_counts.get(key).copied().unwrap_or(0)
    }
}

fn type_key(labels: &[usize]) -> String {
    let mut ls = labels.to_vec();
    ls.sort_unstable();
    ls.iter().map(|&c| (b'A' + c as u8) as char).collect()
}

fn pair_index(n: usize, u: usize, v: usize) -> usize {
    debug_assert!(u != v && u < n && v < n);
    let (lo, hi) = if u < v { (u, v) } else { (v, u) };
    lo * (2 * n - lo - 1) / 2 + (hi - lo - 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k4m_on_4() -> Hypergraph3 {
        Hypergraph3::from_edge_list(4, &[[0, 1, 2], [0, 1, 3], [0, 2, 3]]).unwrap()
    }

    fn complete(n: usize) -> Hypergraph3 {
        crate::constructions::complete(n).unwrap()
    }

    #[test]
    fn from_edge_list_accepts_k4m() {
        let h = k4m_on_4();
        assert_eq!(h.edge_count(), 3);
        assert!(h.has_edge(2, 0, 1));
        assert!(!h.has_edge(1, 2, 3));
        assert!(h.consistency_check());
    }

    #[test]
    fn from_edge_list_rejects_duplicates() {
        let err = Hypergraph3::from_edge_list(4, &[[0, 1, 2], [2, 1, 0]]).unwrap_err();
        assert_eq!(err, HypergraphError::DuplicateEdge([0, 1, 2]));
    }

    #[test]
    fn from_edge_list_rejects_out_of_range() {
        let err = Hypergraph3::from_edge_list(5, &[[0, 1, 5]]).unwrap_err();
        assert_eq!(err, HypergraphError::OutOfRange { vertex: 5, n: 5 });
    }

    #[test]
    fn from_edge_list_rejects_degenerate() {
        let err = Hypergraph3::from_edge_list(5, &[[0, 1, 1]]).unwrap_err();
        assert!(matches!(err, HypergraphError::DegenerateTriple(_)));
    }

    #[test]
    fn min_codegree_complete() {
        assert_eq!(complete(6).min_codegree(), 4);
    }

    #[test]
    fn link_of_complete_triple_is_everything_else() {
        let h = complete(7);
        let l = h.link([0, 1, 2]).unwrap();
        assert_eq!(l, vec![3, 4, 5, 6]);
    }

    #[test]
    fn link_of_non_edge_requires_all_three_sides() {
        // 4-set {0,1,2,3} with exactly the three triples through vertex 3:
        // {0,1,2} is not an edge, its link must be {3}.
        let h = Hypergraph3::from_edge_list(5, &[[0, 1, 3], [0, 2, 3], [1, 2, 3]]).unwrap();
        assert_eq!(h.link([0, 1, 2]).unwrap(), vec![3]);
        // and for the edge {0,1,3}, vertex 2 completes two side triples.
        assert_eq!(h.link([0, 1, 3]).unwrap(), vec![2]);
    }

    #[test]
    fn pattern_copies_nested() {
        let h = complete(5);
        let k4 = h.pattern_copies(Pattern4::K4);
        assert_eq!(k4.len(), 5);
        let k4m = h.pattern_copies(Pattern4::K4m);
        for s in &k4 {
            assert!(k4m.contains(s));
        }
    }

    #[test]
    fn k4m2e_on_four_vertices_contains_no_k4m() {
        let h = Hypergraph3::from_edge_list(4, &[[0, 1, 2], [0, 1, 3]]).unwrap();
        assert!(h.pattern_copies(Pattern4::K4m).is_empty());
        assert_eq!(h.pattern_copies(Pattern4::K4m2e), vec![[0, 1, 2, 3]]);
    }

    #[test]
    fn edge_extension_on_complete_8_is_tight() {
        let h = complete(8);
        let report = h.edge_extension_check();
        assert!(report.holds);
        assert_eq!(report.min_slack_x2, Some(0));
        assert_eq!(report.min_slack(), Some(0.0));
    }

    #[test]
    fn partition_stats_single_class() {
        let h = complete(6);
        let labels = vec![Some(0); 6];
        let stats = h.partition_stats(&labels).unwrap();
        assert_eq!(stats.edge_count("AAA"), 20);
        assert_eq!(stats.edge_total(), h.edge_count() as u64);
        assert_eq!(stats.pattern_count("AAAA"), 15);
    }

    #[test]
    fn partition_stats_errors() {
        let h = complete(4);
        let mut labels = vec![Some(0); 4];
        labels[2] = None;
        assert_eq!(h.partition_stats(&labels).unwrap_err(), HypergraphError::UnlabelledVertex(2));
        let labels = vec![Some(0), Some(1), Some(2), Some(3)];
        assert_eq!(h.partition_stats(&labels).unwrap_err(), HypergraphError::TooManyClasses(3));
    }

    #[test]
    fn induced_subgraph_relabels() {
        let h = complete(6);
        let (sub, map) = h.induced(&[5, 1, 3, 0]).unwrap();
        assert_eq!(map, vec![0, 1, 3, 5]);
        assert_eq!(sub.vertex_count(), 4);
        assert_eq!(sub.edge_count(), 4);
    }

    #[test]
    fn pair_index_is_a_bijection() {
        let n = 9;
        let mut seen = vec![false; n * (n - 1) / 2];
        for u in 0..n {
            for v in (u + 1)..n {
                let i = pair_index(n, u, v);
                assert!(!seen[i]);
                seen[i] = true;
                assert_eq!(i, pair_index(n, v, u));
            }
        }
        assert!(seen.iter().all(|&b| b));
    }
}
