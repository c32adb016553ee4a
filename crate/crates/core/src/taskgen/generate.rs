use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{node_atom, TaskInstance, TaskKind};
use crate::error::{invalid, Error, Result};
use crate::graph::{build_laplacian, eigendecompose, Graph, LaplacianKind, WeightSign, DEFAULT_ORACLE_CAP};
use crate::rules::{forward_chain, Clause, RuleBase};
use crate::signal::BeliefVector;

/// Connectivity retries before a generator gives up.
pub const MAX_RETRIES: usize = 10;
/// Low-frequency modes mixed into the contradiction base signal.
pub const SMOOTH_MODES: usize = 4;
/// Probability that a non-root chain edge carries no clause.
pub const CHAIN_BLOCK_P: f64 = 0.25;

const LOW: usize = 0;
const HIGH: usize = 2;

/// Samples pairs independently until the graph is connected.
fn sample_connected<F>(rng: &mut ChaCha8Rng, n: usize, p: F, what: &str) -> Result<Graph>
where
    F: Fn(usize, usize) -> f64,
{
    for _ in 0..=MAX_RETRIES {
        let mut edges = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                if rng.random::<f64>() < p(i, j) {
                    edges.push((i, j, 1.0));
                }
            }
        }
        let g = Graph::new(n, edges, WeightSign::Unsigned)?;
        if g.is_connected() {
            return Ok(g);
        }
    }
    Err(Error::Generation(format!(
        "{what}: no connected sample after {} retries",
        MAX_RETRIES
    )))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CommunityParams {
    pub n: usize,
    pub intra_p: f64,
    pub inter_p: f64,
    pub seed_fraction: f64,
    pub noise: f64,
}

impl Default for CommunityParams {
    fn default() -> Self {
        Self {
            n: 200,
            intra_p: 0.08,
            inter_p: 0.005,
            seed_fraction: 0.05,
            noise: 0.1,
        }
    }
}

/// Two-block stochastic block model; nodes `0..n/2` form block one.
///
/// A `seed_fraction` of each block is seeded with `+1` (block one) or `−1`
/// (block two) plus `N(0, noise²)`; all other nodes start at 0.
pub fn gen_community_task(p: &CommunityParams, seed: u64) -> Result<TaskInstance> {
    if p.n < 4 {
        return Err(invalid("community task needs n >= 4"));
    }
    if !(p.intra_p > p.inter_p) || !(p.inter_p >= 0.0) || !(p.intra_p <= 1.0) {
        return Err(invalid("community task needs 0 <= inter_p < intra_p <= 1"));
    }
    if !(p.seed_fraction > 0.0 && p.seed_fraction < 1.0) {
        return Err(invalid("seed_fraction must lie in (0, 1)"));
    }
    if !(p.noise >= 0.0) || !p.noise.is_finite() {
        return Err(invalid("noise must be finite and non-negative"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let half = p.n / 2;
    let block = |i: usize| i < half;
    let graph = sample_connected(&mut rng, p.n, |i, j| if block(i) == block(j) { p.intra_p } else { p.inter_p }, "community")?;
    let noise = Normal::new(0.0, p.noise).map_err(|e| invalid(e.to_string()))?;
    let mut x = vec![0.0; p.n];
    for (range, sign) in [(0..half, 1.0), (half..p.n, -1.0)] {
        let mut nodes: Vec<usize> = range.collect();
        let k = ((p.seed_fraction * nodes.len() as f64).round() as usize).clamp(1, nodes.len());
        nodes.shuffle(&mut rng);
        let mut chosen = nodes[..k].to_vec();
        chosen.sort_unstable();
        for i in chosen {
            x[i] = sign + noise.sample(&mut rng);
        }
    }
    Ok(TaskInstance {
        kind: TaskKind::Community,
        graph,
        seed_beliefs: BeliefVector::vertex(x)?,
        labels: (0..p.n).map(block).collect(),
        allowed_bands: vec![LOW],
        atom_map: (0..p.n).map(node_atom).collect(),
        rulebase: None,
        degenerate: false,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContradictionParams {
    pub n: usize,
    pub base_p: f64,
    pub planted: usize,
    pub flip_magnitude: f64,
}

impl Default for ContradictionParams {
    fn default() -> Self {
        Self {
            n: 200,
            base_p: 0.05,
            planted: 10,
            flip_magnitude: 3.0,
        }
    }
}

/// Erdős–Rényi graph carrying a smooth signal with sign-flipped spikes.
///
/// The base signal mixes eigenvectors `u_1..u_m` with Gaussian weights and is
/// rescaled to unit RMS; each planted node gets `s_i − flip · sgn(s_i)`.
pub fn gen_contradiction_task(p: &ContradictionParams, seed: u64) -> Result<TaskInstance> {
    if p.n < 2 || p.planted >= p.n {
        return Err(invalid("contradiction task needs n >= 2 and planted < n"));
    }
    if !(p.base_p > 0.0 && p.base_p <= 1.0) || !(p.flip_magnitude >= 0.0) || !p.flip_magnitude.is_finite() {
        return Err(invalid("contradiction task needs base_p in (0, 1] and finite flip_magnitude >= 0"));
    }
    if p.n > DEFAULT_ORACLE_CAP {
        return Err(Error::OracleUnavailable {
            n: p.n,
            cap: DEFAULT_ORACLE_CAP,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let graph = sample_connected(&mut rng, p.n, |_, _| p.base_p, "contradiction")?;
    let basis = eigendecompose(&build_laplacian(&graph, LaplacianKind::Combinatorial)?, DEFAULT_ORACLE_CAP)?;
    let modes = SMOOTH_MODES.min(p.n - 1);
    let mut s = vec![0.0; p.n];
    for m in 1..=modes {
        let c: f64 = StandardNormal.sample(&mut rng);
        for (si, u) in s.iter_mut().zip(basis.eigenvectors.column(m).iter()) {
            *si += c * u;
        }
    }
    let rms = (s.iter().map(|v| v * v).sum::<f64>() / p.n as f64).sqrt();
    if rms > 0.0 {
        s.iter_mut().for_each(|v| *v /= rms);
    }
    let mut nodes: Vec<usize> = (0..p.n).collect();
    nodes.shuffle(&mut rng);
    let mut labels = vec![false; p.n];
    for &i in &nodes[..p.planted] {
        labels[i] = true;
        let sign = if s[i] >= 0.0 { 1.0 } else { -1.0 };
        s[i] -= p.flip_magnitude * sign;
    }
    Ok(TaskInstance {
        kind: TaskKind::Contradiction,
        graph,
        seed_beliefs: BeliefVector::vertex(s)?,
        labels,
        allowed_bands: vec![HIGH],
        atom_map: (0..p.n).map(node_atom).collect(),
        rulebase: None,
        degenerate: p.flip_magnitude == 0.0 || p.planted == 0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainParams {
    pub depth: usize,
    pub branching: usize,
}

impl Default for ChainParams {
    fn default() -> Self {
        Self { depth: 6, branching: 2 }
    }
}

/// Rooted tree of the given depth; every node above the last level has
/// `1..=branching` children.
///
/// Each parent → child edge yields the clause `parent ⇒ child`, except that
/// edges leaving non-root nodes are dropped with probability
/// [`CHAIN_BLOCK_P`]. The root holds the only fact (belief 1.0); labels are
/// the closure of that fact.
pub fn gen_chain_task(p: &ChainParams, seed: u64) -> Result<TaskInstance> {
    if p.depth == 0 || p.branching == 0 {
        return Err(invalid("chain task needs depth >= 1 and branching >= 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    let mut clauses = Vec::new();
    let mut level = vec![0usize];
    let mut n = 1;
    for d in 0..p.depth {
        let mut next = Vec::new();
        for &parent in &level {
            for _ in 0..rng.random_range(1..=p.branching) {
                let child = n;
                n += 1;
                edges.push((parent, child, 1.0));
                let blocked = d >= 1 && rng.random::<f64>() < CHAIN_BLOCK_P;
                if !blocked {
                    clauses.push(Clause::new([node_atom(parent)], node_atom(child)));
                }
                next.push(child);
            }
        }
        level = next;
    }
    let graph = Graph::new(n, edges, WeightSign::Unsigned)?;
    let atom_map: Vec<String> = (0..n).map(node_atom).collect();
    let rb = RuleBase::new(atom_map.iter().cloned(), clauses)?;
    let closure = forward_chain(&rb, &std::iter::once(node_atom(0)).collect())?;
    let mut x = vec![0.0; n];
    x[0] = 1.0;
    Ok(TaskInstance {
        kind: TaskKind::Chain,
        graph,
        seed_beliefs: BeliefVector::vertex(x)?,
        labels: atom_map.iter().map(|a| closure.contains(a)).collect(),
        allowed_bands: vec![LOW],
        atom_map,
        rulebase: Some(rb),
        degenerate: false,
    })
}

/// Generator parameters for any task kind.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum TaskParams {
    Community(CommunityParams),
    Contradiction(ContradictionParams),
    Chain(ChainParams),
}

pub fn gen_task(p: &TaskParams, seed: u64) -> Result<TaskInstance> {
    match p {
        TaskParams::Community(c) => gen_community_task(c, seed),
        TaskParams::Contradiction(c) => gen_contradiction_task(c, seed),
        TaskParams::Chain(c) => gen_chain_task(c, seed),
    }
}
