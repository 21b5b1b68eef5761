//! Maximum bipartite matching by augmenting paths.
//!
//! The exchange moves of the local search only ever need matchings on sides
//! of size at most 8, where the Konig-Egervary counting steps promise a
//! 2-matching from 5 edges and a 3-matching from 9 edges on 4x4; the
//! exhaustive check over all 2^16 such graphs lives in the acceptance suite.

/// Maximum matching of the bipartite graph on `n_left x n_right` given by
/// `edges`; returns matched pairs `(left, right)` sorted by left index.
pub fn max_bipartite_matching(
    n_left: usize,
    n_right: usize,
    edges: &[(usize, usize)],
) -> Vec<(usize, usize)> {
    let mut adj = vec![Vec::new(); n_left];
    for &(l, r) in edges {
        debug_assert!(l < n_left && r < n_right);
        adj[l].push(r);
    }
    let mut match_of_right: Vec<Option<usize>> = vec![None; n_right];
    for l in 0..n_left {
        let mut seen = vec![false; n_right];
        augment(&adj, l, &mut seen, &mut match_of_right);
    }
    let mut pairs: Vec<(usize, usize)> = match_of_right
        .iter()
        .enumerate()
        .filter_map(|(r, l)| l.map(|l| (l, r)))
        .collect();
    pairs.sort_unstable();
    pairs
}

fn augment(adj: &[Vec<usize>], l: usize, seen: &mut [bool], match_of_right: &mut [Option<usize>]) -> bool {
    for &r in &adj[l] {
        if seen[r] {
            continue;
        }
        seen[r] = true;
        if match_of_right[r].is_none() || augment(adj, match_of_right[r].unwrap(), seen, match_of_right) {
            match_of_right[r] = Some(l);
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complete_4x4_matches_everything() {
        let edges: Vec<_> = (0..4).flat_map(|l| (0..4).map(move |r| (l, r))).collect();
        assert_eq!(max_bipartite_matching(4, 4, &edges).len(), 4);
    }

    #[test]
    fn star_matches_once() {
        let edges = [(0, 0), (1, 0), (2, 0), (3, 0)];
        assert_eq!(max_bipartite_matching(4, 1, &edges).len(), 1);
    }

    #[test]
    fn augmenting_path_is_found() {
        // 0-0, then 1 forces 0 to re-route.
        let edges = [(0, 0), (0, 1), (1, 0)];
        let m = max_bipartite_matching(2, 2, &edges);
        assert_eq!(m.len(), 2);
    }

    #[test]
    fn matched_pairs_are_real_edges() {
        let edges = [(0, 1), (1, 2), (2, 3), (3, 0), (1, 1)];
        let m = max_bipartite_matching(4, 4, &edges);
        assert_eq!(m.len(), 4);
        for pair in m {
            assert!(edges.contains(&pair));
        }
    }
}
