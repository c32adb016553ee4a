//! Edge-list text format.
//!
//! ```text
//! # comment
//! N M
//! i j w      (M lines, 0-based indices)
//! ```

use std::io::{BufRead, Write};

use super::{Graph, WeightSign};
use crate::error::{Error, Result};

/// Parse an edge list. Lines starting with `#` and blank lines are skipped.
pub fn load_graph<R: BufRead>(source: R, sign: WeightSign) -> Result<Graph> {
    let mut header: Option<(usize, usize)> = None;
    let mut edges = Vec::new();
    for (idx, line) in source.lines().enumerate() {
        let lineno = idx + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        match header {
            None => {
                if fields.len() != 2 {
                    return Err(parse_err(lineno, "expected header `N M`"));
                }
                let n = parse_usize(fields[0], lineno)?;
                let m = parse_usize(fields[1], lineno)?;
                header = Some((n, m));
            }
            Some((n, _)) => {
                if fields.len() != 3 {
                    return Err(parse_err(lineno, "expected edge `i j w`"));
                }
                let i = parse_usize(fields[0], lineno)?;
                let j = parse_usize(fields[1], lineno)?;
                let w: f64 = fields[2]
                    .parse()
                    .map_err(|_| parse_err(lineno, format!("bad weight `{}`", fields[2])))?;
                // Validate eagerly so errors carry the offending line.
                Graph::new(n.max(1), [(i, j, w)], sign).map_err(|e| parse_err(lineno, e.to_string()))?;
                edges.push((lineno, i, j, w));
            }
        }
    }
    let (n, m) = header.ok_or_else(|| parse_err(0, "missing header"))?;
    if edges.len() != m {
        return Err(parse_err(
            0,
            format!("header declares {m} edges, found {}", edges.len()),
        ));
    }
    let mut seen = std::collections::BTreeSet::new();
    for &(lineno, i, j, _) in &edges {
        if !seen.insert((i.min(j), i.max(j))) {
            return Err(parse_err(lineno, format!("duplicate edge ({i}, {j})")));
        }
    }
    Graph::new(n, edges.into_iter().map(|(_, i, j, w)| (i, j, w)), sign)
}

/// Write in the same format; weights use the shortest exact representation.
pub fn write_graph<W: Write>(g: &Graph, mut out: W) -> Result<()> {
    writeln!(out, "{} {}", g.node_count(), g.edge_count())?;
    for e in g.edges() {
        writeln!(out, "{} {} {:?}", e.i, e.j, e.w)?;
    }
    Ok(())
}

fn parse_usize(s: &str, line: usize) -> Result<usize> {
    s.parse()
        .map_err(|_| parse_err(line, format!("bad integer `{s}`")))
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}
