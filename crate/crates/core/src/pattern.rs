//! The four 3-graphs on four vertices, used as tiling patterns.

use serde::{Deserialize, Serialize};

/// A 3-graph on the vertex labels `0..4`, identified by how many of the four
/// possible triples are edges. `K4m` ("K4 minus an edge") is the pattern the
/// tiling, closeness and absorption modules are built around.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pattern4 {
    /// All four triples: the complete 3-graph on 4 vertices.
    K4,
    /// Three triples.
    K4m,
    /// Two triples (necessarily sharing two vertices).
    K4m2e,
    /// A single triple plus an isolated vertex.
    K4m3e,
}

impl Pattern4 {
    pub const ALL: [Pattern4; 4] = [Pattern4::K4, Pattern4::K4m, Pattern4::K4m2e, Pattern4::K4m3e];

    /// Number of edges in the pattern.
    pub fn edge_count(self) -> usize {
        match self {
            Pattern4::K4 => 4,
            Pattern4::K4m => 3,
            Pattern4::K4m2e => 2,
            Pattern4::K4m3e => 1,
        }
    }

    /// Canonical triple list over the labels `0..4`.
    pub fn triples(self) -> &'static [[usize; 3]] {
        const ALL4: [[usize; 3]; 4] = [[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]];
        &ALL4[..self.edge_count()]
    }

    /// CLI flag spelling (`k4`, `k4m`, `k4m2e`, `k4m3e`).
    pub fn flag(self) -> &'static str {
        match self {
            Pattern4::K4 => "k4",
            Pattern4::K4m => "k4m",
            Pattern4::K4m2e => "k4m2e",
            Pattern4::K4m3e => "k4m3e",
        }
    }

    pub fn from_flag(s: &str) -> Option<Pattern4> {
        Pattern4::ALL.into_iter().find(|p| p.flag() == s)
    }
}

impl std::fmt::Display for Pattern4 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.flag())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edge_counts_match_triples() {
        for p in Pattern4::ALL {
            assert_eq!(p.edge_count(), p.triples().len());
            for t in p.triples() {
                assert!(t[0] < t[1] && t[1] < t[2] && t[2] < 4);
            }
        }
    }

    #[test]
    fn flags_roundtrip() {
        for p in Pattern4::ALL {
            assert_eq!(Pattern4::from_flag(p.flag()), Some(p));
        }
        assert_eq!(Pattern4::from_flag("k5"), None);
    }
}
