//! Text edge-list format: a header line `n m`, then `m` lines `u v`.
//!
//! Endpoints are normally 0-based integers below `n`. Files using any other
//! tokens are accepted too: labels are numbered in order of first appearance
//! and the mapping is kept so results can be reported in the original labels.

use std::collections::HashMap;
use std::io::{self, BufRead, Write};

use thiserror::Error;

use crate::graph::{Edge, Graph, GraphError, Vertex};
use crate::random::EdgePermutation;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("expected {expected} edge lines, found {found}")]
    EdgeCount { expected: usize, found: usize },
    #[error("{labels} distinct vertex labels for a graph on {n} vertices")]
    TooManyLabels { labels: usize, n: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// A parsed graph, with the original vertex labels when they were not `0..n`.
#[derive(Clone, Debug)]
pub struct LabeledGraph {
    pub graph: Graph,
    pub labels: Option<Vec<String>>,
}

impl LabeledGraph {
    pub fn label(&self, v: Vertex) -> String {
        match &self.labels {
            Some(l) => l[v as usize].clone(),
            None => v.to_string(),
        }
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> FormatError {
    FormatError::Parse { line, message: message.into() }
}

pub fn read_edge_list<R: BufRead>(reader: R) -> Result<LabeledGraph, FormatError> {
    let mut lines = reader.lines().enumerate().filter_map(|(i, l)| match l {
        Ok(s) if s.trim().is_empty() => None,
        other => Some((i + 1, other)),
    });
    let (hline, header) = lines.next().ok_or_else(|| parse_err(1, "missing header line `n m`"))?;
    let header = header?;
    let mut fields = header.split_whitespace();
    let mut number = |what: &str| -> Result<usize, FormatError> {
        fields
            .next()
            .ok_or_else(|| parse_err(hline, format!("missing {what}")))?
            .parse()
            .map_err(|_| parse_err(hline, format!("{what} is not a nonnegative integer")))
    };
    let n = number("vertex count")?;
    let m = number("edge count")?;

    let mut raw: Vec<(String, String)> = Vec::with_capacity(m);
    for (lno, line) in lines {
        let line = line?;
        let mut it = line.split_whitespace();
        match (it.next(), it.next(), it.next()) {
            (Some(a), Some(b), None) => raw.push((a.to_owned(), b.to_owned())),
            _ => return Err(parse_err(lno, "expected two endpoints")),
        }
    }
    if raw.len() != m {
        return Err(FormatError::EdgeCount { expected: m, found: raw.len() });
    }

    let numeric: Option<Vec<(Vertex, Vertex)>> =
        raw.iter().map(|(a, b)| Some((a.parse().ok()?, b.parse().ok()?))).collect();
    if let Some(pairs) = numeric {
        if pairs.iter().all(|&(a, b)| (a as usize) < n && (b as usize) < n) {
            return Ok(LabeledGraph { graph: Graph::new(n, pairs)?, labels: None });
        }
    }

    let mut index: HashMap<&str, Vertex> = HashMap::new();
    let mut labels: Vec<String> = Vec::new();
    let mut pairs = Vec::with_capacity(m);
    for (a, b) in &raw {
        let mut ends = [0 as Vertex; 2];
        for (slot, s) in ends.iter_mut().zip([a.as_str(), b.as_str()]) {
            *slot = *index.entry(s).or_insert_with(|| {
                labels.push(s.to_owned());
                (labels.len() - 1) as Vertex
            });
        }
        pairs.push((ends[0], ends[1]));
    }
    if labels.len() > n {
        return Err(FormatError::TooManyLabels { labels: labels.len(), n });
    }
    // vertices never mentioned by an edge keep their index as a label
    for v in labels.len()..n {
        labels.push(format!("#{v}"));
    }
    Ok(LabeledGraph { graph: Graph::new(n, pairs)?, labels: Some(labels) })
}

pub fn read_edge_list_file(path: &std::path::Path) -> Result<LabeledGraph, FormatError> {
    let file = std::fs::File::open(path)?;
    read_edge_list(io::BufReader::new(file))
}

pub fn write_edge_list<W: Write>(g: &Graph, mut out: W) -> io::Result<()> {
    writeln!(out, "{} {}", g.vertex_count(), g.edge_count())?;
    for Edge { u, v } in g.edges() {
        writeln!(out, "{u} {v}")?;
    }
    out.flush()
}

/// One pair per line, in process order.
pub fn write_permutation<W: Write>(perm: &EdgePermutation, mut out: W) -> io::Result<()> {
    for Edge { u, v } in perm.order() {
        writeln!(out, "{u} {v}")?;
    }
    out.flush()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_numeric() {
        let g = read_edge_list("4 3\n0 1\n1 2\n3 2\n".as_bytes()).unwrap();
        assert!(g.labels.is_none());
        assert_eq!(g.graph.edges(), &[Edge::new(0, 1), Edge::new(1, 2), Edge::new(2, 3)]);
    }

    #[test]
    fn round_trip() {
        let g = crate::random::sample_gnp(15, 0.3, crate::random::Seed(2)).unwrap();
        let mut buf = Vec::new();
        write_edge_list(&g, &mut buf).unwrap();
        assert_eq!(read_edge_list(buf.as_slice()).unwrap().graph, g);
    }

    #[test]
    fn arbitrary_labels() {
        let g = read_edge_list("4 2\nb a\nc b\n".as_bytes()).unwrap();
        assert_eq!(g.labels.as_deref().unwrap(), &["b", "a", "c", "#3"]);
        assert_eq!(g.graph.edge_count(), 2);
        assert_eq!(g.label(2), "c");
        // integers outside 0..n are labels too
        let g = read_edge_list("2 1\n10 20\n".as_bytes()).unwrap();
        assert_eq!(g.labels.unwrap(), vec!["10", "20"]);
    }

    #[test]
    fn rejects_malformed() {
        assert!(matches!(read_edge_list("".as_bytes()), Err(FormatError::Parse { .. })));
        assert!(matches!(read_edge_list("3 2\n0 1\n".as_bytes()), Err(FormatError::EdgeCount { .. })));
        assert!(matches!(read_edge_list("3 1\n0 1 2\n".as_bytes()), Err(FormatError::Parse { line: 2, .. })));
        assert!(matches!(read_edge_list("3 1\n1 1\n".as_bytes()), Err(FormatError::Graph(GraphError::SelfLoop(1)))));
        assert!(matches!(read_edge_list("2 2\n0 1\n1 0\n".as_bytes()), Err(FormatError::Graph(_))));
        assert!(matches!(read_edge_list("2 2\na b\nc d\n".as_bytes()), Err(FormatError::TooManyLabels { .. })));
        assert!(matches!(read_edge_list("x 1\n".as_bytes()), Err(FormatError::Parse { line: 1, .. })));
    }
}
