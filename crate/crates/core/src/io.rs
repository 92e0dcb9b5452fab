//! Plain-text graph files.
//!
//! ```text
//! n m
//! u v          (m lines, 0 <= u < v < n, ascending)
//! ```
//!
//! The weighted variant appends a third column `w` with `0 <= w <= 1`.
//! Writers always emit edges in canonical order, so parsing and re-writing
//! a file produced here reproduces it byte for byte.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::weighted::WeightedGraph;

pub fn write_graph(g: &Graph) -> String {
    let mut out = String::with_capacity(12 * (g.m() + 1));
    let _ = writeln!(out, "{} {}", g.n(), g.m());
    for &(u, v) in g.edges() {
        let _ = writeln!(out, "{u} {v}");
    }
    out
}

pub fn write_weighted(wg: &WeightedGraph<f64>) -> String {
    let g = wg.base();
    let mut out = String::with_capacity(24 * (g.m() + 1));
    let _ = writeln!(out, "{} {}", g.n(), g.m());
    for (&(u, v), w) in g.edges().iter().zip(wg.weights()) {
        let _ = writeln!(out, "{u} {v} {w}");
    }
    out
}

pub fn parse_graph(text: &str) -> Result<Graph> {
    let (n, rows) = parse_rows(text, false)?;
    Graph::from_edge_list(n, rows.into_iter().map(|(u, v, _)| (u, v)))
}

pub fn parse_weighted(text: &str) -> Result<WeightedGraph<f64>> {
    let (n, rows) = parse_rows(text, true)?;
    let g = Graph::from_edge_list(n, rows.iter().map(|&(u, v, _)| (u, v)))?;
    // rows are strictly ascending, hence already in edge-id order
    let w = rows.into_iter().map(|(_, _, w)| w).collect();
    WeightedGraph::new(g, w)
}

/// Accepts either format: a third column, when present on the first edge
/// line, switches to weighted parsing.
pub fn parse_any(text: &str) -> Result<WeightedGraph<f64>> {
    let weighted = text
        .lines()
        .nth(1)
        .map(|l| l.split_whitespace().count() == 3)
        .unwrap_or(false);
    if weighted {
        parse_weighted(text)
    } else {
        Ok(WeightedGraph::unit(parse_graph(text)?))
    }
}

type Rows = (usize, Vec<(usize, usize, f64)>);

fn parse_rows(text: &str, weighted: bool) -> Result<Rows> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        message: "missing header".into(),
    })?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 2 {
        return Err(parse_err(1, "header must be `n m`"));
    }
    let n = parse_usize(fields[0], 1)?;
    let m = parse_usize(fields[1], 1)?;

    let width = if weighted { 3 } else { 2 };
    let mut rows = Vec::with_capacity(m);
    let mut prev: Option<(usize, usize)> = None;
    for (idx, line) in lines {
        let lineno = idx + 1;
        if line.trim().is_empty() {
            if rows.len() == m {
                continue;
            }
            return Err(parse_err(lineno, "blank line inside edge list"));
        }
        if rows.len() == m {
            return Err(parse_err(lineno, format!("more than {m} edge lines")));
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != width {
            return Err(parse_err(lineno, format!("expected {width} fields")));
        }
        let u = parse_usize(fields[0], lineno)?;
        let v = parse_usize(fields[1], lineno)?;
        if u >= v {
            return Err(parse_err(lineno, "edge must satisfy u < v"));
        }
        if v >= n {
            return Err(parse_err(lineno, format!("vertex {v} out of range for n = {n}")));
        }
        if let Some(p) = prev {
            if (u, v) <= p {
                return Err(parse_err(lineno, "edges must be strictly ascending"));
            }
        }
        prev = Some((u, v));
        let w = if weighted {
            let w: f64 = fields[2]
                .parse()
                .map_err(|_| parse_err(lineno, format!("bad weight `{}`", fields[2])))?;
            if !(0.0..=1.0).contains(&w) {
                return Err(parse_err(lineno, "weight outside [0,1]"));
            }
            w
        } else {
            1.0
        };
        rows.push((u, v, w));
    }
    if rows.len() != m {
        return Err(parse_err(
            text.lines().count().max(1),
            format!("header declares {m} edges, found {}", rows.len()),
        ));
    }
    Ok((n, rows))
}

fn parse_usize(s: &str, line: usize) -> Result<usize> {
    s.parse()
        .map_err(|_| parse_err(line, format!("expected a non-negative integer, got `{s}`")))
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen;

    #[test]
    fn paley_round_trip_is_byte_identical() {
        let g = gen::paley(13).unwrap();
        let text = write_graph(&g);
        assert!(text.starts_with("13 39\n"));
        let again = write_graph(&parse_graph(&text).unwrap());
        assert_eq!(text, again);
    }

    #[test]
    fn weighted_round_trip() {
        let text = "3 3\n0 1 1\n0 2 0.25\n1 2 0.3333333333333333\n";
        let wg = parse_weighted(text).unwrap();
        assert_eq!(wg.weight(0, 2), Some(&0.25));
        assert_eq!(write_weighted(&wg), text);
        assert_eq!(parse_any(text).unwrap(), wg);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let cases = [
            ("3\n", 1),
            ("3 2\n0 1\n1 1\n", 3),
            ("3 2\n0 1\n1 5\n", 3),
            ("3 2\n0 2\n0 1\n", 3),
            ("3 1\n0 x\n", 2),
            ("3 2\n0 1\n", 2),
            ("3 1\n0 1\n1 2\n", 3),
        ];
        for (text, line) in cases {
            match parse_graph(text) {
                Err(Error::Parse { line: got, .. }) => assert_eq!(got, line, "{text:?}"),
                other => panic!("{text:?} gave {other:?}"),
            }
        }
        assert!(matches!(
            parse_weighted("2 1\n0 1 1.5\n"),
            Err(Error::Parse { line: 2, .. })
        ));
    }
}
