//! Graph construction, Laplacians, spectrum bounds and the dense eigenbasis.

mod basis;
mod io;
mod laplacian;
mod sparse;

pub use basis::{eigendecompose, gft, Direction, SpectralBasis, DEFAULT_ORACLE_CAP};
pub use io::{load_graph, write_graph};
pub use laplacian::{
    build_laplacian, estimate_lambda_max, estimate_lambda_max_default, scale_laplacian,
    Laplacian, LaplacianKind, LambdaMaxEstimate, LambdaMaxSource, ScaledLaplacian,
    DEFAULT_POWER_ITERS, DEFAULT_POWER_TOL, LAMBDA_MAX_MARGIN,
};
pub use sparse::SymSparse;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Whether edge weights must be positive or may carry a sign.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightSign {
    #[default]
    Unsigned,
    Signed,
}

/// An undirected edge, stored with `i < j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub i: usize,
    pub j: usize,
    pub w: f64,
}

/// Sparse weighted undirected simple graph.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
    sign: WeightSign,
}

impl Graph {
    /// Validates and canonicalizes `edges` (each pair is stored as `i < j`).
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize, f64)>, sign: WeightSign) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("graph needs at least one node".into()));
        }
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for (i, j, w) in edges {
            let e = check_edge(n, sign, i, j, w)?;
            if !seen.insert((e.i, e.j)) {
                return Err(Error::DuplicateEdge(e.i, e.j));
            }
            out.push(e);
        }
        Ok(Self { n, edges: out, sign })
    }

    pub fn empty(n: usize) -> Result<Self> {
        Self::new(n, [], WeightSign::Unsigned)
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn sign(&self) -> WeightSign {
        self.sign
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        let (a, b) = (i.min(j), i.max(j));
        self.edges.iter().any(|e| e.i == a && e.j == b)
    }

    /// A copy of this graph with one more edge, validated like any other.
    pub fn with_edge(&self, i: usize, j: usize, w: f64) -> Result<Self> {
        let e = check_edge(self.n, self.sign, i, j, w)?;
        if self.has_edge(e.i, e.j) {
            return Err(Error::DuplicateEdge(e.i, e.j));
        }
        let mut edges = self.edges.clone();
        edges.push(e);
        Ok(Self {
            n: self.n,
            edges,
            sign: self.sign,
        })
    }

    /// Neighbor lists, sorted by node index.
    pub fn adjacency_lists(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for e in &self.edges {
            adj[e.i].push(e.j);
            adj[e.j].push(e.i);
        }
        for a in &mut adj {
            a.sort_unstable();
        }
        adj
    }

    /// Connected component label per node, labels assigned in order of first
    /// appearance.
    pub fn component_labels(&self) -> Vec<usize> {
        let adj = self.adjacency_lists();
        let mut label = vec![usize::MAX; self.n];
        let mut next = 0;
        for s in 0..self.n {
            if label[s] != usize::MAX {
                continue;
            }
            let mut stack = vec![s];
            label[s] = next;
            while let Some(u) = stack.pop() {
                for &v in &adj[u] {
                    if label[v] == usize::MAX {
                        label[v] = next;
                        stack.push(v);
                    }
                }
            }
            next += 1;
        }
        label
    }

    pub fn component_count(&self) -> usize {
        self.component_labels().into_iter().max().map_or(0, |m| m + 1)
    }

    pub fn is_connected(&self) -> bool {
        self.component_count() == 1
    }
}

fn check_edge(n: usize, sign: WeightSign, i: usize, j: usize, w: f64) -> Result<Edge> {
    for idx in [i, j] {
        if idx >= n {
            return Err(Error::IndexOutOfRange { index: idx, n });
        }
    }
    if i == j {
        return Err(Error::SelfLoop(i));
    }
    let reason = if !w.is_finite() {
        Some("weight must be finite")
    } else {
        match sign {
            WeightSign::Unsigned if w <= 0.0 => Some("unsigned graphs require positive weights"),
            WeightSign::Signed if w == 0.0 => Some("signed graphs require nonzero weights"),
            _ => None,
        }
    };
    if let Some(reason) = reason {
        return Err(Error::InvalidWeight { i, j, weight: w, reason });
    }
    Ok(Edge {
        i: i.min(j),
        j: i.max(j),
        w,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonicalizes_and_rejects_duplicates() {
        let g = Graph::new(3, [(2, 0, 1.0)], WeightSign::Unsigned).unwrap();
        assert_eq!(g.edges()[0], Edge { i: 0, j: 2, w: 1.0 });
        let err = Graph::new(3, [(0, 1, 1.0), (1, 0, 2.0)], WeightSign::Unsigned).unwrap_err();
        assert!(matches!(err, Error::DuplicateEdge(0, 1)));
    }

    #[test]
    fn weight_rules_per_sign() {
        assert!(Graph::new(2, [(0, 1, -1.0)], WeightSign::Unsigned).is_err());
        assert!(Graph::new(2, [(0, 1, -1.0)], WeightSign::Signed).is_ok());
        assert!(Graph::new(2, [(0, 1, 0.0)], WeightSign::Signed).is_err());
    }

    #[test]
    fn components() {
        let g = Graph::new(5, [(0, 1, 1.0), (3, 4, 1.0)], WeightSign::Unsigned).unwrap();
        assert_eq!(g.component_labels(), vec![0, 0, 1, 2, 2]);
        assert_eq!(g.component_count(), 3);
        assert!(!g.is_connected());
    }

    #[test]
    fn with_edge_validates() {
        let g = Graph::new(3, [(0, 1, 1.0)], WeightSign::Unsigned).unwrap();
        assert!(g.with_edge(1, 0, 1.0).is_err());
        assert!(g.with_edge(1, 1, 1.0).is_err());
        assert_eq!(g.with_edge(1, 2, 1.0).unwrap().edge_count(), 2);
    }
}
