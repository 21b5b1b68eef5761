//! Acceptance checks, shared between the `acceptance` integration suite and
//! the CLI `selftest` subcommand. Each criterion is a self-contained runtime
//! check with pinned tolerances; `run_criterion` executes one by id (1..=11),
//! `run_all` the whole battery.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::absorption::{self, PipelineConfig};
use crate::bitset;
use crate::closeness::{self, ClosenessParams, ConnectorMode};
use crate::constructions::{complete, h_ab, h_l, random_3graph, tournament_triangles, Tournament};
use crate::hypergraph::{normalize_four_set, normalize_triple, Hypergraph3};
use crate::matching::max_bipartite_matching;
use crate::pattern::Pattern4;
use crate::solver::{self, FactorStatus, DEFAULT_BUDGET};
use crate::tiling;

pub const CRITERIA_COUNT: usize = 11;

/// Random-graph seeds pinned for the pipeline criterion; at least 8 of the
/// 10 must produce a complete verified factor in demo mode.
pub const PIPELINE_SEEDS: [u64; 10] = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10];

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CriterionOutcome {
    pub id: usize,
    pub name: String,
    pub passed: bool,
    pub details: String,
    pub millis: u128,
}

pub fn run_all() -> Vec<CriterionOutcome> {
    (1..=CRITERIA_COUNT).map(run_criterion).collect()
}

pub fn run_criterion(id: usize) -> CriterionOutcome {
    let (name, body): (&str, fn() -> (bool, String)) = match id {
        1 => ("threshold at n = 4", c1_threshold),
        2 => ("H_{a,b} lower-bound family", c2_hab_family),
        3 => ("H_l family", c3_hl_family),
        4 => ("edge extension bound", c4_edge_extension),
        5 => ("tournament construction", c5_tournaments),
        6 => ("local-search guarantee", c6_local_search),
        7 => ("matching lemma", c7_matching_lemma),
        8 => ("connector structure of H_{a,b}", c8_connectors),
        9 => ("one-step closeness surrogate", c9_close_neighborhoods),
        10 => ("absorption pipeline", c10_pipeline),
        11 => ("oracle cross-check", c11_oracle_crosscheck),
        other => panic!("criterion ids run 1..={CRITERIA_COUNT}, got {other}"),
    };
    let start = Instant::now();
    let (passed, details) = body();
    CriterionOutcome { id, name: name.to_string(), passed, details, millis: start.elapsed().as_millis() }
}

fn c1_threshold() -> (bool, String) {
    let start = Instant::now();
    match solver::brute_force_threshold(4, Pattern4::K4m) {
        Ok(1) => {
            let elapsed = start.elapsed();
            (elapsed.as_secs() < 1, format!("threshold = 1 over 16 graphs in {elapsed:?}"))
        }
        Ok(other) => (false, format!("threshold = {other}, expected 1")),
        Err(e) => (false, format!("error: {e}")),
    }
}

fn c2_hab_family() -> (bool, String) {
    let mut checked = 0;
    for a in 3..=12usize {
        for b in 3..=12usize {
            if (a + b) % 4 != 0 {
                continue;
            }
            let h = match h_ab(a, b) {
                Ok(h) => h,
                Err(e) => return (false, format!("h_ab({a},{b}): {e}")),
            };
            let expect = b.min(a - 1).min(b - 2);
            if h.min_codegree() != expect {
                return (false, format!("h_ab({a},{b}): delta2 = {} != {expect}", h.min_codegree()));
            }
            if a % 3 != 0 {
                match solver::find_factor(&h, Pattern4::K4m, DEFAULT_BUDGET) {
                    Ok(r) if r.status == FactorStatus::NoFactor => {}
                    Ok(r) => return (false, format!("h_ab({a},{b}): expected NoFactor, got {:?}", r.status)),
                    Err(e) => return (false, format!("h_ab({a},{b}): {e}")),
                }
            }
            checked += 1;
        }
    }
    // the n = 12 witness: delta2 = n/2 - 2 with no factor
    let h = h_ab(5, 7).expect("valid sizes");
    if h.min_codegree() != 4 {
        return (false, format!("h_ab(5,7): delta2 = {}", h.min_codegree()));
    }
    match solver::find_factor(&h, Pattern4::K4m, DEFAULT_BUDGET) {
        Ok(r) if r.status == FactorStatus::NoFactor => {}
        other => return (false, format!("h_ab(5,7): expected NoFactor, got {other:?}")),
    }
    (true, format!("{checked} (a,b) pairs checked; h_ab(5,7) has delta2 = 4 = n/2 - 2 and no factor"))
}

fn c3_hl_family() -> (bool, String) {
    for l in 1..=8usize {
        let h = match h_l(16, l) {
            Ok(h) => h,
            Err(e) => return (false, format!("h_l(16,{l}): {e}")),
        };
        if h.min_codegree() != 6 {
            return (false, format!("h_l(16,{l}): delta2 = {} != 6", h.min_codegree()));
        }
        match solver::find_factor(&h, Pattern4::K4m, DEFAULT_BUDGET) {
            Ok(r) if r.status == FactorStatus::NoFactor => {}
            other => return (false, format!("h_l(16,{l}): expected NoFactor, got {other:?}")),
        }
    }
    // edge isomorphism of H_1 with H_{8,8}: v_i fixed, z into the A side,
    // w_j shifted one slot up
    let h1 = h_l(16, 1).expect("valid parameters");
    let relabel = |v: usize| match v {
        15 => 7,
        v if v < 7 => v,
        v => v + 1,
    };
    let mut edges: Vec<_> = h1.edges().iter().map(|e| normalize_triple(e.map(relabel))).collect();
    edges.sort_unstable();
    let reference = h_ab(8, 8).expect("valid sizes");
    if edges != reference.edges() {
        return (false, "h_l(16,1) is not edge-isomorphic to h_ab(8,8) under the documented relabelling".into());
    }
    (true, "delta2 = 6 and NoFactor for l = 1..8; h_l(16,1) edge-isomorphic to h_ab(8,8)".into())
}

fn c4_edge_extension() -> (bool, String) {
    let mut fixtures: Vec<(String, Hypergraph3)> = Vec::new();
    for a in 3..=12usize {
        for b in 3..=12usize {
            if (a + b) % 4 == 0 {
                fixtures.push((format!("h_ab({a},{b})"), h_ab(a, b).expect("valid sizes")));
            }
        }
    }
    for l in 1..=8 {
        fixtures.push((format!("h_l(16,{l})"), h_l(16, l).expect("valid parameters")));
    }
    for n in 4..=20 {
        fixtures.push((format!("complete({n})"), complete(n).expect("in range")));
    }
    let ps = [0.3, 0.6, 0.9];
    let ns = [12, 18, 24, 30];
    for seed in 1..=50u64 {
        let n = ns[(seed as usize) % ns.len()];
        let p = ps[(seed as usize) % ps.len()];
        fixtures.push((format!("rand({n},{p},{seed})"), random_3graph(n, p, seed).expect("valid p")));
    }
    let total = fixtures.len();
    for (name, h) in fixtures {
        let report = h.edge_extension_check();
        if !report.holds {
            return (
                false,
                format!("{name}: edge {:?} violates the bound, slack = {:?}", report.worst_edge, report.min_slack()),
            );
        }
    }
    (true, format!("zero violations across {total} fixtures"))
}

fn c5_tournaments() -> (bool, String) {
    let sizes = [8usize, 12, 16, 20, 24];
    let mut total = 0;
    let mut mean_ratio_range = (f64::MAX, f64::MIN);
    let mut min_delta_ratio = f64::MAX;
    for &n in &sizes {
        for seed in 0..40u64 {
            let h = tournament_triangles(&Tournament::random(n, seed).expect("in range")).expect("valid");
            if !h.pattern_copies(Pattern4::K4m).is_empty() {
                return (false, format!("tournament n={n} seed={seed} contains a K4m copy"));
            }
            total += 1;
            if n == 24 {
                // codegree density: mean pair degree over n; the minimum is
                // not concentrated at this order and is reported only.
                let pairs = (n * (n - 1) / 2) as f64;
                let mean_ratio = 3.0 * h.edge_count() as f64 / pairs / n as f64;
                mean_ratio_range.0 = mean_ratio_range.0.min(mean_ratio);
                mean_ratio_range.1 = mean_ratio_range.1.max(mean_ratio);
                min_delta_ratio = min_delta_ratio.min(h.min_codegree() as f64 / n as f64);
                if !(0.15..=0.35).contains(&mean_ratio) {
                    return (false, format!("n=24 seed={seed}: codegree density {mean_ratio:.4} outside [0.15, 0.35]"));
                }
            }
        }
    }
    (
        true,
        format!(
            "{total} tournaments K4m-free; n=24 codegree density in [{:.4}, {:.4}] (min-codegree ratio as low as {:.4})",
            mean_ratio_range.0, mean_ratio_range.1, min_delta_ratio
        ),
    )
}

fn c6_local_search() -> (bool, String) {
    let mut fixtures: Vec<(String, Hypergraph3)> = Vec::new();
    for n in [21usize, 25, 33] {
        fixtures.push((format!("complete({n})"), complete(n).expect("in range")));
    }
    for seed in 1..=50u64 {
        fixtures.push((format!("rand(33,0.9,{seed})"), random_3graph(33, 0.9, seed).expect("valid p")));
    }
    let mut runs = 0;
    for (name, h) in &fixtures {
        let n = h.vertex_count();
        let delta2 = h.min_codegree();
        let l_cap = n.saturating_sub(13) / 4;
        for l in 0..=l_cap {
            if 3 * delta2 <= n + 2 * l - 2 && l > 0 {
                continue; // hypothesis fails for this l
            }
            let run = tiling::greedy_tile(h, l, 0);
            if let Some(stuck) = &run.stuck {
                return (
                    false,
                    format!("{name} l={l}: stuck at {} copies (hypothesis_met = {})", stuck.copies, stuck.hypothesis_met),
                );
            }
            if run.tiling.validate(h).is_err()
                || !solver::verify_tiling(h, Pattern4::K4m, run.tiling.copies())
            {
                return (false, format!("{name} l={l}: invalid tiling"));
            }
            if run.trace.len() > 5 * n / 4 + 1 {
                return (false, format!("{name} l={l}: {} moves exceeds 5n/4 + 1", run.trace.len()));
            }
            let mut replay = tiling::Tiling::default();
            let mut last = 0i64;
            for mv in &run.trace {
                if replay.apply(mv).is_err() {
                    return (false, format!("{name} l={l}: trace replay failed"));
                }
                let w = replay.weight() as i64;
                if w <= last {
                    return (false, format!("{name} l={l}: weight trace not strictly increasing"));
                }
                last = w;
            }
            runs += 1;
        }
    }
    (true, format!("{runs} runs reached their targets with strictly increasing weight traces"))
}

fn c7_matching_lemma() -> (bool, String) {
    let start = Instant::now();
    for graph in 0u32..(1 << 16) {
        let edges: Vec<(usize, usize)> =
            (0..16).filter(|b| graph & (1 << b) != 0).map(|b| (b / 4, b % 4)).collect();
        let m = max_bipartite_matching(4, 4, &edges).len();
        if edges.len() >= 9 && m < 3 {
            return (false, format!("graph {graph:#06x}: {} edges but matching {m} < 3", edges.len()));
        }
        if edges.len() >= 5 && m < 2 {
            return (false, format!("graph {graph:#06x}: {} edges but matching {m} < 2", edges.len()));
        }
    }
    (true, format!("all 65536 bipartite 4x4 graphs satisfy both matching bounds in {:?}", start.elapsed()))
}

fn c8_connectors() -> (bool, String) {
    let mut combos = 0;
    for a in 4..=8usize {
        for b in 4..=8usize {
            let h = h_ab(a, b).expect("valid sizes");
            let within_a = (binom(a - 2, 2) * b) as u64;
            let within_b = (binom(a, 3) + binom(b.saturating_sub(2), 3)) as u64;
            for x in 0..a {
                for y in (x + 1)..a {
                    let c = closeness::connectors_len1(&h, x, y);
                    if c != within_a {
                        return (false, format!("h_ab({a},{b}) A-pair ({x},{y}): {c} != {within_a}"));
                    }
                }
            }
            for x in a..(a + b) {
                for y in (x + 1)..(a + b) {
                    let c = closeness::connectors_len1(&h, x, y);
                    if c != within_b {
                        return (false, format!("h_ab({a},{b}) B-pair ({x},{y}): {c} != {within_b}"));
                    }
                }
            }
            for x in 0..a {
                for y in a..(a + b) {
                    let c = closeness::connectors_len1(&h, x, y);
                    if c != 0 {
                        return (false, format!("h_ab({a},{b}) cross pair ({x},{y}): {c} != 0"));
                    }
                }
            }
            let report = match closeness::closed_partition(&h, &ClosenessParams::default()) {
                Ok(r) => r,
                Err(e) => return (false, format!("h_ab({a},{b}) partition: {e}")),
            };
            let mut sides: Vec<Vec<usize>> = report.classes.iter().map(|c| c.members.clone()).collect();
            sides.sort();
            let expected = vec![(0..a).collect::<Vec<_>>(), (a..a + b).collect::<Vec<_>>()];
            if sides != expected {
                return (false, format!("h_ab({a},{b}) partition did not recover the sides: {sides:?}"));
            }
            combos += 1;
        }
    }
    (true, format!("{combos} (a,b) combinations: connector counts exact, partitions recover the sides"))
}

fn c9_close_neighborhoods() -> (bool, String) {
    let gamma = 0.1f64;
    let eta = gamma * gamma / 12.0;
    let mut fixtures: Vec<(String, Hypergraph3)> = Vec::new();
    for n in [24usize, 28, 32] {
        fixtures.push((format!("complete({n})"), complete(n).expect("in range")));
        for seed in 1..=3u64 {
            fixtures.push((format!("rand({n},0.9,{seed})"), random_3graph(n, 0.9, seed).expect("valid p")));
        }
    }
    let mut used = 0;
    let mut skipped = 0;
    for (name, h) in &fixtures {
        let n = h.vertex_count();
        if (h.min_codegree() as f64) < (0.5 + gamma) * n as f64 {
            skipped += 1;
            continue;
        }
        let need = (0.25 + gamma) * n as f64;
        for x in 0..n {
            let set = closeness::close_neighborhood(h, x, 1, eta, ConnectorMode::Exact)
                .expect("exact length-1 queries cannot fail");
            if (set.members.len() as f64) < need {
                return (false, format!("{name}: vertex {x} has only {} close vertices, needs {need:.1}", set.members.len()));
            }
        }
        used += 1;
    }
    (true, format!("{used} fixtures checked exactly ({skipped} below the codegree hypothesis were skipped)"))
}

fn c10_pipeline() -> (bool, String) {
    let start = Instant::now();
    let h = complete(48).expect("in range");
    let report = absorption::factor_via_absorption(&h, &PipelineConfig::demo(1));
    if !report.succeeded() {
        return (false, format!("complete(48) pipeline failed: {:?}", report.stages));
    }
    let factor = report.final_factor.as_ref().expect("succeeded");
    if !solver::verify_tiling(&h, Pattern4::K4m, factor) {
        return (false, "complete(48): emitted factor fails verification".into());
    }
    let mut successes = 0;
    let mut outcomes = Vec::new();
    for &seed in &PIPELINE_SEEDS {
        let h = random_3graph(48, 0.9, seed).expect("valid p");
        let report = absorption::factor_via_absorption(&h, &PipelineConfig::demo(seed));
        if let Some(factor) = &report.final_factor {
            if !solver::verify_tiling(&h, Pattern4::K4m, factor) {
                return (false, format!("seed {seed}: emitted factor fails verification"));
            }
        }
        if report.succeeded() {
            successes += 1;
        }
        outcomes.push((seed, report.succeeded()));
    }
    let ok = successes >= 8;
    (
        ok,
        format!(
            "complete(48) factored; {successes}/10 random seeds succeeded ({outcomes:?}) in {:?}",
            start.elapsed()
        ),
    )
}

fn c11_oracle_crosscheck() -> (bool, String) {
    let mut agreements = 0;
    for &n in &[12usize, 16] {
        for &p in &[0.4f64, 0.7] {
            for seed in 1..=25u64 {
                let h = random_3graph(n, p, seed).expect("valid p");
                let fast = match solver::find_factor(&h, Pattern4::K4m, DEFAULT_BUDGET) {
                    Ok(r) => r.status == FactorStatus::FactorFound,
                    Err(e) => return (false, format!("n={n} p={p} seed={seed}: {e}")),
                };
                let slow = naive_has_factor(&h, Pattern4::K4m);
                if fast != slow {
                    return (false, format!("n={n} p={p} seed={seed}: solver says {fast}, naive enumerator says {slow}"));
                }
                agreements += 1;
            }
        }
    }
    (true, format!("{agreements}/100 verdicts agree with the naive enumerator"))
}

/// Unpruned recursive factor decision: always covers the lowest uncovered
/// vertex, trying every completion. Deliberately shares nothing with the
/// solver's candidate machinery.
pub fn naive_has_factor(h: &Hypergraph3, p: Pattern4) -> bool {
    let n = h.vertex_count();
    if n % 4 != 0 {
        return false;
    }
    fn rec(h: &Hypergraph3, p: Pattern4, covered: u128) -> bool {
        let n = h.vertex_count();
        let v = match (0..n).find(|&v| covered & (1u128 << v) == 0) {
            None => return true,
            Some(v) => v,
        };
        let free: Vec<usize> = ((v + 1)..n).filter(|&u| covered & (1u128 << u) == 0).collect();
        for i in 0..free.len() {
            for j in (i + 1)..free.len() {
                for k in (j + 1)..free.len() {
                    let s = normalize_four_set([v, free[i], free[j], free[k]]);
                    if h.spans(s, p) && rec(h, p, covered | bitset::mask_of(&s)) {
                        return true;
                    }
                }
            }
        }
        false
    }
    rec(h, p, 0)
}

/// Structural invariants of the two-class construction, used as a negative
/// control: feeding a corrupted graph here must produce an error.
pub fn check_hab_invariants(h: &Hypergraph3, a: usize, b: usize) -> Result<(), String> {
    if h.vertex_count() != a + b {
        return Err(format!("vertex count {} != {}", h.vertex_count(), a + b));
    }
    for e in h.edges() {
        let in_b = e.iter().filter(|&&v| v >= a).count();
        if in_b % 2 == 0 {
            return Err(format!("edge {e:?} has an even number of B vertices"));
        }
    }
    if a >= 1 && b >= 3 {
        let expect = b.min(a - 1).min(b - 2);
        if h.min_codegree() != expect {
            return Err(format!("delta2 = {} != min(b, a-1, b-2) = {expect}", h.min_codegree()));
        }
    }
    for s in h.pattern_copies(Pattern4::K4m) {
        let in_a = s.iter().filter(|&&v| v < a).count();
        if in_a != 3 && in_a != 0 {
            return Err(format!("K4m copy {s:?} is neither AAAB nor BBBB"));
        }
    }
    Ok(())
}

fn binom(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut out = 1usize;
    for i in 0..k {
        out = out * (n - i) / (i + 1);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn naive_oracle_on_known_cases() {
        assert!(naive_has_factor(&h_ab(6, 6).unwrap(), Pattern4::K4m));
        assert!(!naive_has_factor(&h_ab(4, 4).unwrap(), Pattern4::K4m));
        assert!(!naive_has_factor(&complete(7).unwrap(), Pattern4::K4m));
        assert!(naive_has_factor(&complete(8).unwrap(), Pattern4::K4));
    }

    #[test]
    fn hab_invariants_accept_the_real_thing() {
        let h = h_ab(5, 7).unwrap();
        assert!(check_hab_invariants(&h, 5, 7).is_ok());
    }

    #[test]
    fn hab_invariants_catch_corruption() {
        // inject an AAA edge into h_ab(4,4)
        let h = h_ab(4, 4).unwrap();
        let mut edges = h.edges().to_vec();
        edges.push([0, 1, 2]);
        let corrupted = Hypergraph3::from_edge_list(8, &edges).unwrap();
        let err = check_hab_invariants(&corrupted, 4, 4).unwrap_err();
        assert!(err.contains("even number of B"), "{err}");
    }

    #[test]
    fn binom_small_values() {
        assert_eq!(binom(8, 3), 56);
        assert_eq!(binom(4, 0), 1);
        assert_eq!(binom(2, 4), 0);
    }
}
