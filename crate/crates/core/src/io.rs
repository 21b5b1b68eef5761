//! Text and JSON serialization of hypergraphs.
//!
//! Text format: first line `n m`, then `m` lines `u v w` (0-indexed,
//! whitespace-separated, any vertex order within a line). The emitter is
//! canonical: triples sorted within a line and lines in lexicographic order,
//! so `parse(emit(h)) == h`.
//!
//! JSON mirror: `{"n": ..., "edges": [[u, v, w], ...]}`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hypergraph::{Hypergraph3, HypergraphError, Triple};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("expected {expected} edge lines, found {found}")]
    EdgeCountMismatch { expected: usize, found: usize },
    #[error(transparent)]
    Hypergraph(#[from] HypergraphError),
    #[error("bad JSON: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Serialize, Deserialize)]
struct HypergraphJson {
    n: usize,
    edges: Vec<Triple>,
}

/// Parse the `n m` / triple-lines text format.
pub fn parse_text(input: &str) -> Result<Hypergraph3, FormatError> {
    let mut lines = input
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (line_no, header) = lines
        .next()
        .ok_or_else(|| FormatError::Malformed { line: 0, msg: "empty input".into() })?;
    let mut head = header.split_whitespace();
    let n: usize = parse_field(head.next(), line_no, "n")?;
    let m: usize = parse_field(head.next(), line_no, "m")?;
    if head.next().is_some() {
        return Err(FormatError::Malformed { line: line_no, msg: "trailing tokens after `n m`".into() });
    }
    let mut edges = Vec::with_capacity(m);
    for (line_no, line) in lines {
        let mut it = line.split_whitespace();
        let u = parse_field(it.next(), line_no, "u")?;
        let v = parse_field(it.next(), line_no, "v")?;
        let w = parse_field(it.next(), line_no, "w")?;
        if it.next().is_some() {
            return Err(FormatError::Malformed { line: line_no, msg: "more than 3 vertices on a line".into() });
        }
        edges.push([u, v, w]);
    }
    if edges.len() != m {
        return Err(FormatError::EdgeCountMismatch { expected: m, found: edges.len() });
    }
    Ok(Hypergraph3::from_edge_list(n, &edges)?)
}

/// Emit the canonical text form.
pub fn emit_text(h: &Hypergraph3) -> String {
    let mut out = format!("{} {}\n", h.vertex_count(), h.edge_count());
    for e in h.edges() {
        out.push_str(&format!("{} {} {}\n", e[0], e[1], e[2]));
    }
    out
}

pub fn parse_json(input: &str) -> Result<Hypergraph3, FormatError> {
    let raw: HypergraphJson = serde_json::from_str(input)?;
    Ok(Hypergraph3::from_edge_list(raw.n, &raw.edges)?)
}

pub fn emit_json(h: &Hypergraph3) -> String {
    serde_json::to_string(&HypergraphJson { n: h.vertex_count(), edges: h.edges().to_vec() })
        .expect("hypergraph JSON never fails to serialize")
}

fn parse_field(tok: Option<&str>, line: usize, what: &str) -> Result<usize, FormatError> {
    tok.ok_or_else(|| FormatError::Malformed { line, msg: format!("missing {what}") })?
        .parse()
        .map_err(|_| FormatError::Malformed { line, msg: format!("bad integer for {what}") })
}
