//! DIMACS-style plain graph files.
//!
//! ```text
//! c optional comments
//! p edge <n> <m>
//! e <u> <v>        (1-based ids)
//! ```

use std::fmt::Write as _;

use thiserror::Error;

use crate::graph::{Graph, GraphError};

#[derive(Debug, Error)]
pub enum DimacsError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("missing `p edge` header")]
    MissingHeader,
    #[error("header declares {declared} edges, file lists {found}")]
    EdgeCount { declared: usize, found: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

pub fn parse_dimacs(text: &str) -> Result<Graph, DimacsError> {
    let mut header: Option<(usize, usize)> = None;
    let mut edges = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let syntax = |message: &str| DimacsError::Syntax {
            line,
            message: message.to_string(),
        };
        let mut fields = raw.split_whitespace();
        match fields.next() {
            None | Some("c") => continue,
            Some("p") => {
                if header.is_some() {
                    return Err(syntax("duplicate header"));
                }
                if fields.next() != Some("edge") {
                    return Err(syntax("expected `p edge <n> <m>`"));
                }
                let n = parse_field(fields.next()).ok_or_else(|| syntax("bad vertex count"))?;
                let m = parse_field(fields.next()).ok_or_else(|| syntax("bad edge count"))?;
                header = Some((n, m));
            }
            Some("e") => {
                let (n, _) = header.ok_or(DimacsError::MissingHeader)?;
                let u = parse_field(fields.next()).ok_or_else(|| syntax("bad endpoint"))?;
                let v = parse_field(fields.next()).ok_or_else(|| syntax("bad endpoint"))?;
                if u == 0 || v == 0 || u > n || v > n {
                    return Err(syntax("endpoint outside 1..=n"));
                }
                edges.push((u - 1, v - 1));
            }
            Some(other) => return Err(syntax(&format!("unknown line type `{other}`"))),
        }
    }
    let (n, m) = header.ok_or(DimacsError::MissingHeader)?;
    if edges.len() != m {
        return Err(DimacsError::EdgeCount {
            declared: m,
            found: edges.len(),
        });
    }
    Ok(Graph::from_edges(n, edges)?)
}

fn parse_field(field: Option<&str>) -> Option<usize> {
    field?.parse().ok()
}

/// Writes edges with `u < v`, lexicographically sorted.
pub fn write_dimacs(g: &Graph, comments: &[&str]) -> String {
    let mut out = String::new();
    for c in comments {
        for line in c.lines() {
            let _ = writeln!(out, "c {line}");
        }
    }
    let _ = writeln!(out, "p edge {} {}", g.n(), g.m());
    for (u, v) in g.edges() {
        let _ = writeln!(out, "e {} {}", u + 1, v + 1);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let g = Graph::cycle(5);
        let text = write_dimacs(&g, &["five-cycle"]);
        assert!(text.starts_with("c five-cycle\np edge 5 5\ne 1 2\n"));
        assert_eq!(parse_dimacs(&text).unwrap(), g);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            parse_dimacs("e 1 2\n"),
            Err(DimacsError::MissingHeader)
        ));
        assert!(parse_dimacs("p edge 2 1\ne 1 3\n").is_err());
        assert!(matches!(
            parse_dimacs("p edge 3 2\ne 1 2\n"),
            Err(DimacsError::EdgeCount {
                declared: 2,
                found: 1
            })
        ));
        assert!(parse_dimacs("p edge 2 1\ne 1 1\n").is_err());
    }
}
