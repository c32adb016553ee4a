use serde::{Deserialize, Serialize};

use crate::error::{check_len, invalid, Result};
use crate::graph::{Edge, Graph, WeightSign};
use crate::rules::RuleBase;
use crate::signal::{BeliefVector, Domain};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TaskKind {
    /// Two planted blocks; labels mark block one.
    Community,
    /// Spikes on a smooth signal; labels mark spiked nodes.
    Contradiction,
    /// Rooted tree with hop clauses; labels mark derivable atoms.
    Chain,
}

/// A synthetic task with planted ground truth.
#[derive(Debug, Clone, PartialEq)]
pub struct TaskInstance {
    pub kind: TaskKind,
    pub graph: Graph,
    pub seed_beliefs: BeliefVector,
    pub labels: Vec<bool>,
    pub allowed_bands: Vec<usize>,
    /// Atom name per node.
    pub atom_map: Vec<String>,
    pub rulebase: Option<RuleBase>,
    /// Set when the planted signal carries no information (e.g. zero flip).
    pub degenerate: bool,
}

impl TaskInstance {
    pub fn node_count(&self) -> usize {
        self.graph.node_count()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.graph.node_count();
        check_len(n, self.seed_beliefs.len())?;
        check_len(n, self.labels.len())?;
        check_len(n, self.atom_map.len())?;
        self.seed_beliefs.expect_domain(Domain::Vertex)?;
        if self.seed_beliefs.as_slice().iter().all(|v| *v == 0.0) && !self.degenerate {
            return Err(invalid("seed beliefs have empty support"));
        }
        if let Some(rb) = &self.rulebase {
            if let Some(a) = self.atom_map.iter().find(|a| !rb.atoms().contains(*a)) {
                return Err(invalid(format!("atom `{a}` missing from the rulebase")));
            }
        }
        Ok(())
    }
}

/// Default atom name for node `i`.
pub fn node_atom(i: usize) -> String {
    format!("n{i}")
}

#[derive(Serialize, Deserialize)]
struct GraphRepr {
    n: usize,
    #[serde(default)]
    sign: WeightSign,
    edges: Vec<(usize, usize, f64)>,
}

/// Task file layout. Seed beliefs are stored as `(index, value)` pairs over
/// their non-zero support.
#[derive(Serialize, Deserialize)]
struct TaskRepr {
    kind: TaskKind,
    graph: GraphRepr,
    seed_beliefs: Vec<(usize, f64)>,
    labels: Vec<bool>,
    allowed_bands: Vec<usize>,
    atom_map: Vec<String>,
    #[serde(default)]
    rulebase: Option<RuleBase>,
    #[serde(default)]
    degenerate: bool,
}

impl Serialize for TaskInstance {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        TaskRepr {
            kind: self.kind,
            graph: GraphRepr {
                n: self.graph.node_count(),
                sign: self.graph.sign(),
                edges: self.graph.edges().iter().map(|&Edge { i, j, w }| (i, j, w)).collect(),
            },
            seed_beliefs: self
                .seed_beliefs
                .as_slice()
                .iter()
                .enumerate()
                .filter(|(_, v)| **v != 0.0)
                .map(|(i, v)| (i, *v))
                .collect(),
            labels: self.labels.clone(),
            allowed_bands: self.allowed_bands.clone(),
            atom_map: self.atom_map.clone(),
            rulebase: self.rulebase.clone(),
            degenerate: self.degenerate,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for TaskInstance {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = TaskRepr::deserialize(d)?;
        let graph = Graph::new(r.graph.n, r.graph.edges, r.graph.sign).map_err(D::Error::custom)?;
        let mut seed = vec![0.0; r.graph.n];
        for (i, v) in r.seed_beliefs {
            if i >= r.graph.n {
                return Err(D::Error::custom(format!("seed index {i} out of range")));
            }
            seed[i] = v;
        }
        let t = TaskInstance {
            kind: r.kind,
            graph,
            seed_beliefs: BeliefVector::vertex(seed).map_err(D::Error::custom)?,
            labels: r.labels,
            allowed_bands: r.allowed_bands,
            atom_map: r.atom_map,
            rulebase: r.rulebase,
            degenerate: r.degenerate,
        };
        t.validate().map_err(D::Error::custom)?;
        Ok(t)
    }
}
