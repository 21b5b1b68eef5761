//! Generators for the hypergraph families used as extremal witnesses and
//! structured fixtures.
//!
//! Vertex numbering is fixed so that isomorphism checks in tests are pure
//! relabellings:
//!
//! - [`h_ab`]: `A = 0..a`, `B = a..a+b`;
//! - [`h_l`]: `v_1..v_{n/2-1}` are `0..n/2-1`, `w_1..w_{n/2}` follow, and the
//!   apex `z` is the last vertex `n-1` (indices 1-based in the defining
//!   conditions, matching the construction's usual statement).

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::hypergraph::{Hypergraph3, HypergraphError, Triple, MAX_VERTICES};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConstructionError {
    #[error("construction needs at least 3 vertices (got {0})")]
    TooSmall(usize),
    #[error("H_l needs 4 | n and n = 1 (mod 3), got n = {0}")]
    BadModulus(usize),
    #[error("H_l needs 1 <= l <= n/2, got l = {l} for n = {n}")]
    BadL { n: usize, l: usize },
    #[error("n = {0} exceeds the supported maximum {MAX_VERTICES}")]
    TooLarge(usize),
    #[error("orientation missing for pair ({0}, {1})")]
    IncompleteOrientation(usize, usize),
    #[error("probability {0} outside [0, 1]")]
    BadProbability(f64),
    #[error("bad construction spec: {0}")]
    BadSpec(String),
    #[error(transparent)]
    Hypergraph(#[from] HypergraphError),
}

/// Complete 3-graph on `n` vertices.
pub fn complete(n: usize) -> Result<Hypergraph3, ConstructionError> {
    if n > MAX_VERTICES {
        return Err(ConstructionError::TooLarge(n));
    }
    let mut edges = Vec::new();
    for a in 0..n {
        for b in (a + 1)..n {
            for c in (b + 1)..n {
                edges.push([a, b, c]);
            }
        }
    }
    Ok(Hypergraph3::from_edge_list(n, &edges)?)
}

/// The two-class extremal graph: every edge has an odd number of vertices in
/// `B`, i.e. exactly the `AAB` and `BBB` triples. `A = 0..a`, `B = a..a+b`.
pub fn h_ab(a: usize, b: usize) -> Result<Hypergraph3, ConstructionError> {
    let n = a + b;
    if n < 3 {
        return Err(ConstructionError::TooSmall(n));
    }
    if n > MAX_VERTICES {
        return Err(ConstructionError::TooLarge(n));
    }
    let mut edges = Vec::new();
    for x in 0..a {
        for y in (x + 1)..a {
            for w in a..n {
                edges.push([x, y, w]);
            }
        }
    }
    for x in a..n {
        for y in (x + 1)..n {
            for w in (y + 1)..n {
                edges.push([x, y, w]);
            }
        }
    }
    Ok(Hypergraph3::from_edge_list(n, &edges)?)
}

/// The apex family on `n = |A| + |B| + 1` vertices with `|A| = n/2 - 1` and
/// `|B| = n/2`, for `4 | n`, `n = 1 (mod 3)` and `1 <= l <= n/2`:
///
/// - `E1`: triples inside `A + B` with an odd number of `B` vertices,
/// - `E2`: `{z, v_i, v_j}` and `{z, w_i, w_j}` with `i < min(j, l)`,
/// - `E3`: `{z, v_i, w_j}` with `l <= min(i, j)`.
pub fn h_l(n: usize, l: usize) -> Result<Hypergraph3, ConstructionError> {
    if n % 4 != 0 || n % 3 != 1 || n < 16 {
        return Err(ConstructionError::BadModulus(n));
    }
    if n > MAX_VERTICES {
        return Err(ConstructionError::TooLarge(n));
    }
    let half = n / 2;
    if l < 1 || l > half {
        return Err(ConstructionError::BadL { n, l });
    }
    let a = half - 1; // |A|
    let v = |i: usize| i - 1; // v_i, 1-based
    let w = |j: usize| a + (j - 1); // w_j, 1-based
    let z = n - 1;

    let mut edges = Vec::new();
    // E1: inside A + B, odd B-count (types AAB and BBB).
    for x in 0..a {
        for y in (x + 1)..a {
            for t in a..(n - 1) {
                edges.push([x, y, t]);
            }
        }
    }
    for x in a..(n - 1) {
        for y in (x + 1)..(n - 1) {
            for t in (y + 1)..(n - 1) {
                edges.push([x, y, t]);
            }
        }
    }
    // E2: apex with same-side pairs, lower index below l.
    for i in 1..=a {
        for j in (i + 1)..=a {
            if i < l.min(j) {
                edges.push([z, v(i), v(j)]);
            }
        }
    }
    for i in 1..=half {
        for j in (i + 1)..=half {
            if i < l.min(j) {
                edges.push([z, w(i), w(j)]);
            }
        }
    }
    // E3: apex with cross pairs, both indices at least l.
    for i in l..=a {
        for j in l..=half {
            edges.push([z, v(i), w(j)]);
        }
    }
    Ok(Hypergraph3::from_edge_list(n, &edges)?)
}

/// A tournament on `n` vertices: a winner for every unordered pair.
#[derive(Clone, Debug)]
pub struct Tournament {
    n: usize,
    /// `beats[u]` has bit `v` set when the arc runs `u -> v`.
    beats: Vec<u128>,
}

impl Tournament {
    /// Uniform random orientation; reproducible per seed.
    pub fn random(n: usize, seed: u64) -> Result<Tournament, ConstructionError> {
        if n > MAX_VERTICES {
            return Err(ConstructionError::TooLarge(n));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut beats = vec![0u128; n];
        for u in 0..n {
            for v in (u + 1)..n {
                if rng.random_bool(0.5) {
                    beats[u] |= 1u128 << v;
                } else {
                    beats[v] |= 1u128 << u;
                }
            }
        }
        Ok(Tournament { n, beats })
    }

    /// Build from explicit arcs `(winner, loser)`. Every pair must appear
    /// exactly once; a missing pair is an incomplete orientation and a
    /// repeated pair a duplicate.
    pub fn from_arcs(n: usize, arcs: &[(usize, usize)]) -> Result<Tournament, ConstructionError> {
        if n > MAX_VERTICES {
            return Err(ConstructionError::TooLarge(n));
        }
        let mut beats = vec![0u128; n];
        let mut seen = vec![false; n * n];
        for &(u, v) in arcs {
            if u >= n || v >= n || u == v {
                return Err(ConstructionError::BadSpec(format!("bad arc ({u}, {v})")));
            }
            let key = u.min(v) * n + u.max(v);
            if seen[key] {
                return Err(ConstructionError::BadSpec(format!("pair ({u}, {v}) oriented twice")));
            }
            seen[key] = true;
            beats[u] |= 1u128 << v;
        }
        for u in 0..n {
            for v in (u + 1)..n {
                if !seen[u * n + v] {
                    return Err(ConstructionError::IncompleteOrientation(u, v));
                }
            }
        }
        Ok(Tournament { n, beats })
    }

    pub fn beats(&self, u: usize, v: usize) -> bool {
        self.beats[u] & (1u128 << v) != 0
    }
}

/// Hypergraph of the cyclic triangles of a tournament: `{u,v,w}` is an edge
/// iff the three arcs form a directed 3-cycle.
pub fn tournament_triangles(t: &Tournament) -> Result<Hypergraph3, ConstructionError> {
    let n = t.n;
    let mut edges: Vec<Triple> = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            for w in (v + 1)..n {
                // Cyclic iff not transitive iff no vertex beats both others.
                let cyclic = !((t.beats(u, v) && t.beats(u, w))
                    || (t.beats(v, u) && t.beats(v, w))
                    || (t.beats(w, u) && t.beats(w, v)));
                if cyclic {
                    edges.push([u, v, w]);
                }
            }
        }
    }
    Ok(Hypergraph3::from_edge_list(n, &edges)?)
}

/// Each triple included independently with probability `p`; byte-stable
/// across platforms for a fixed seed.
pub fn random_3graph(n: usize, p: f64, seed: u64) -> Result<Hypergraph3, ConstructionError> {
    if !(0.0..=1.0).contains(&p) || p.is_nan() {
        return Err(ConstructionError::BadProbability(p));
    }
    if n > MAX_VERTICES {
        return Err(ConstructionError::TooLarge(n));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for a in 0..n {
        for b in (a + 1)..n {
            for c in (b + 1)..n {
                if rng.random_bool(p) {
                    edges.push([a, b, c]);
                }
            }
        }
    }
    Ok(Hypergraph3::from_edge_list(n, &edges)?)
}

/// Parsed form of the CLI generator grammar, e.g. `hab:a=4,b=4`,
/// `hl:n=16,l=3`, `tour:n=20,seed=7`, `rand:n=30,p=0.75,seed=1`,
/// `complete:n=8`.
#[derive(Clone, Debug, PartialEq)]
pub enum ConstructionSpec {
    Hab { a: usize, b: usize },
    Hl { n: usize, l: usize },
    Tournament { n: usize, seed: u64 },
    Random { n: usize, p: f64, seed: u64 },
    Complete { n: usize },
}

impl ConstructionSpec {
    pub fn parse(s: &str) -> Result<ConstructionSpec, ConstructionError> {
        let bad = |msg: &str| ConstructionError::BadSpec(format!("{msg} in {s:?}"));
        let (kind, rest) = s.split_once(':').ok_or_else(|| bad("missing ':'"))?;
        let mut fields = std::collections::BTreeMap::new();
        for part in rest.split(',') {
            let (k, v) = part.split_once('=').ok_or_else(|| bad("expected key=value"))?;
            if fields.insert(k.trim(), v.trim()).is_some() {
                return Err(bad("duplicate key"));
            }
        }
        let int = |key: &str| -> Result<usize, ConstructionError> {
            fields
                .get(key)
                .ok_or_else(|| bad(&format!("missing {key}")))?
                .parse()
                .map_err(|_| bad(&format!("bad integer for {key}")))
        };
        let spec = match kind {
            "hab" => ConstructionSpec::Hab { a: int("a")?, b: int("b")? },
            "hl" => ConstructionSpec::Hl { n: int("n")?, l: int("l")? },
            "tour" => ConstructionSpec::Tournament { n: int("n")?, seed: int("seed")? as u64 },
            "rand" => {
                let p: f64 = fields
                    .get("p")
                    .ok_or_else(|| bad("missing p"))?
                    .parse()
                    .map_err(|_| bad("bad float for p"))?;
                ConstructionSpec::Random { n: int("n")?, p, seed: int("seed")? as u64 }
            }
            "complete" => ConstructionSpec::Complete { n: int("n")? },
            other => return Err(bad(&format!("unknown kind {other:?}"))),
        };
        Ok(spec)
    }

    pub fn build(&self) -> Result<Hypergraph3, ConstructionError> {
        match *self {
            ConstructionSpec::Hab { a, b } => h_ab(a, b),
            ConstructionSpec::Hl { n, l } => h_l(n, l),
            ConstructionSpec::Tournament { n, seed } => {
                tournament_triangles(&Tournament::random(n, seed)?)
            }
            ConstructionSpec::Random { n, p, seed } => random_3graph(n, p, seed),
            ConstructionSpec::Complete { n } => complete(n),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pattern::Pattern4;

    #[test]
    fn h_ab_4_4_shape() {
        let h = h_ab(4, 4).unwrap();
        assert_eq!(h.vertex_count(), 8);
        assert_eq!(h.edge_count(), 28); // 24 AAB + 4 BBB
        assert_eq!(h.min_codegree(), 2);
    }

    #[test]
    fn h_ab_all_b_is_complete() {
        let h = h_ab(0, 4).unwrap();
        let k = complete(4).unwrap();
        assert_eq!(h.edges(), k.edges());
    }

    #[test]
    fn h_ab_codegree_formula() {
        for a in 3..=12usize {
            for b in 3..=12usize {
                let h = h_ab(a, b).unwrap();
                let expect = b.min(a - 1).min(b - 2);
                assert_eq!(h.min_codegree(), expect, "a={a} b={b}");
            }
        }
    }

    #[test]
    fn h_ab_has_no_aaa_or_abb_edges() {
        let (a, b) = (5, 6);
        let h = h_ab(a, b).unwrap();
        for e in h.edges() {
            let in_b = e.iter().filter(|&&v| v >= a).count();
            assert!(in_b == 1 || in_b == 3);
        }
        let _ = b;
    }

    #[test]
    fn h_ab_k4m_types() {
        // Every K4m 4-set in H_{a,b} is AAAB or BBBB.
        let a = 4;
        let h = h_ab(a, 4).unwrap();
        let labels: Vec<_> = (0..8).map(|v| Some(usize::from(v >= a))).collect();
        let stats = h.partition_stats(&labels).unwrap();
        assert_eq!(stats.pattern_count("AAAB"), 16);
        assert_eq!(stats.pattern_count("BBBB"), 1);
        assert_eq!(stats.pattern_counts.values().sum::<u64>(), 17);
        assert_eq!(stats.edge_count("AAB"), 24);
        assert_eq!(stats.edge_count("BBB"), 4);
    }

    #[test]
    fn h_ab_links_by_type() {
        let (a, b) = (5, 7);
        let h = h_ab(a, b).unwrap();
        // BBB edge: link is the rest of B.
        let e = [a, a + 1, a + 2];
        assert_eq!(h.link(e).unwrap(), ((a + 3)..(a + b)).collect::<Vec<_>>());
        // AAB edge: link is the rest of A.
        let e = [0, 1, a];
        assert_eq!(h.link(e).unwrap(), (2..a).collect::<Vec<_>>());
    }

    #[test]
    fn h_l_rejects_bad_parameters() {
        assert!(matches!(h_l(12, 1), Err(ConstructionError::BadModulus(12))));
        assert!(matches!(h_l(20, 1), Err(ConstructionError::BadModulus(20))));
        assert!(matches!(h_l(16, 0), Err(ConstructionError::BadL { .. })));
        assert!(matches!(h_l(16, 9), Err(ConstructionError::BadL { .. })));
    }

    #[test]
    fn h_l_apex_neighborhoods() {
        // N(z, v_i) = A - v_i for i < l, and {v_1..v_{l-1}, w_l..w_{n/2}} otherwise.
        let (n, l) = (16, 4);
        let h = h_l(n, l).unwrap();
        let a = n / 2 - 1;
        let z = n - 1;
        for i in 1..=a {
            let nb = crate::bitset::to_vec(h.pair_neighborhood(z, i - 1));
            if i < l {
                let expect: Vec<_> = (0..a).filter(|&v| v != i - 1).collect();
                assert_eq!(nb, expect, "i={i}");
            } else {
                let mut expect: Vec<_> = (0..(l - 1)).collect();
                expect.extend((l..=n / 2).map(|j| a + j - 1));
                assert_eq!(nb, expect, "i={i}");
            }
        }
    }

    #[test]
    fn h_l_restriction_is_h_half_minus_one() {
        // H_l restricted to A + B equals H_{n/2-1, n/2} under the identity.
        let n = 16;
        for l in [1, 4, 8] {
            let h = h_l(n, l).unwrap();
            let (restricted, _) = h.induced(&(0..n - 1).collect::<Vec<_>>()).unwrap();
            let reference = h_ab(n / 2 - 1, n / 2).unwrap();
            assert_eq!(restricted.edges(), reference.edges(), "l={l}");
        }
    }

    #[test]
    fn h_l_one_is_h_ab_8_8_relabelled() {
        // Documented relabelling: v_i keep their slots, z slides into A.
        let n = 16;
        let h = h_l(n, 1).unwrap();
        let a = n / 2 - 1;
        let z = n - 1;
        let relabel = |v: usize| -> usize {
            if v < a {
                v // v_1..v_7 -> A slots 0..7
            } else if v == z {
                a // z -> A slot 7
            } else {
                v + 1 // w_1..w_8 -> B slots 8..15
            }
        };
        let mut edges: Vec<_> = h.edges().iter().map(|e| crate::hypergraph::normalize_triple(e.map(relabel))).collect();
        edges.sort_unstable();
        let reference = h_ab(8, 8).unwrap();
        assert_eq!(edges, reference.edges());
    }

    #[test]
    fn h_l_min_codegree_is_half_minus_two() {
        for l in 1..=8 {
            assert_eq!(h_l(16, l).unwrap().min_codegree(), 6, "l={l}");
        }
    }

    #[test]
    fn tournament_three_cycle() {
        let t = Tournament::from_arcs(3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        let h = tournament_triangles(&t).unwrap();
        assert_eq!(h.edges(), &[[0, 1, 2]]);

        let t = Tournament::from_arcs(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        let h = tournament_triangles(&t).unwrap();
        assert_eq!(h.edge_count(), 0);
    }

    #[test]
    fn tournament_incomplete_orientation() {
        let err = Tournament::from_arcs(3, &[(0, 1)]).unwrap_err();
        assert!(matches!(err, ConstructionError::IncompleteOrientation(1, 2)));
    }

    #[test]
    fn tournament_triangle_graphs_are_k4m_free() {
        for n in [8usize, 16, 24] {
            for seed in 0..4u64 {
                let h = tournament_triangles(&Tournament::random(n, seed).unwrap()).unwrap();
                assert!(h.pattern_copies(Pattern4::K4m).is_empty(), "n={n} seed={seed}");
            }
        }
    }

    #[test]
    fn random_3graph_extremes() {
        let h = random_3graph(7, 1.0, 3).unwrap();
        assert_eq!(h.edge_count(), 35);
        let h = random_3graph(7, 0.0, 3).unwrap();
        assert_eq!(h.edge_count(), 0);
    }

    #[test]
    fn random_3graph_is_seed_deterministic() {
        let a = random_3graph(12, 0.4, 99).unwrap();
        let b = random_3graph(12, 0.4, 99).unwrap();
        assert_eq!(a.edges(), b.edges());
        let c = random_3graph(12, 0.4, 100).unwrap();
        assert_ne!(a.edges(), c.edges());
    }

    #[test]
    fn spec_grammar_roundtrip() {
        assert_eq!(
            ConstructionSpec::parse("hab:a=4,b=4").unwrap(),
            ConstructionSpec::Hab { a: 4, b: 4 }
        );
        assert_eq!(
            ConstructionSpec::parse("hl:n=16,l=3").unwrap(),
            ConstructionSpec::Hl { n: 16, l: 3 }
        );
        assert_eq!(
            ConstructionSpec::parse("tour:n=20,seed=7").unwrap(),
            ConstructionSpec::Tournament { n: 20, seed: 7 }
        );
        assert_eq!(
            ConstructionSpec::parse("rand:n=30,p=0.75,seed=1").unwrap(),
            ConstructionSpec::Random { n: 30, p: 0.75, seed: 1 }
        );
        assert_eq!(ConstructionSpec::parse("complete:n=8").unwrap(), ConstructionSpec::Complete { n: 8 });
        assert!(ConstructionSpec::parse("hab:a=4").is_err());
        assert!(ConstructionSpec::parse("wat:n=4").is_err());
    }
}
