//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use snsr_core::graph::{Graph, WeightSign};
use snsr_core::rules::{Clause, RuleBase};

/// `G(n, p)` with weights uniform in `[0.5, 1.5]`; may be disconnected.
pub fn random_graph(rng: &mut ChaCha8Rng, n: usize, p: f64) -> Graph {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.random::<f64>() < p {
                edges.push((i, j, rng.random_range(0.5..1.5)));
            }
        }
    }
    Graph::new(n, edges, WeightSign::Unsigned).unwrap()
}

pub fn gaussian(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

/// `D − A` assembled entry by entry from the edge list.
pub fn dense_laplacian(g: &Graph) -> DMatrix<f64> {
    let n = g.node_count();
    let mut l = DMatrix::zeros(n, n);
    for e in g.edges() {
        l[(e.i, e.j)] -= e.w;
        l[(e.j, e.i)] -= e.w;
        l[(e.i, e.i)] += e.w;
        l[(e.j, e.j)] += e.w;
    }
    l
}

/// `U h(Λ) Uᵀ x` straight from nalgebra's symmetric eigensolver.
pub fn oracle_filter(l: &DMatrix<f64>, h: impl Fn(f64) -> f64, x: &[f64]) -> Vec<f64> {
    let eig = SymmetricEigen::new(l.clone());
    let u = &eig.eigenvectors;
    let mut xh = u.tr_mul(&DVector::from_column_slice(x));
    for (c, l) in xh.iter_mut().zip(eig.eigenvalues.iter()) {
        *c *= h(*l);
    }
    (u * xh).iter().copied().collect()
}

pub fn oracle_eigenvalues(l: &DMatrix<f64>) -> Vec<f64> {
    let mut v: Vec<f64> = SymmetricEigen::new(l.clone()).eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

/// `Σ_k θ_k T_k(z)` from `T_k(cos t) = cos(k t)` on `[−1, 1]`, with the
/// hyperbolic form outside.
pub fn cheb_series(theta: &[f64], z: f64) -> f64 {
    theta
        .iter()
        .enumerate()
        .map(|(k, t)| {
            let k = k as f64;
            let tk = if z.abs() <= 1.0 {
                (k * z.acos()).cos()
            } else {
                let s = if z < 0.0 && (k as i64) % 2 == 1 { -1.0 } else { 1.0 };
                s * (k * z.abs().acosh()).cosh()
            };
            t * tk
        })
        .sum()
}

pub fn rel_err(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
    let den: f64 = b.iter().map(|y| y * y).sum::<f64>().sqrt();
    if den == 0.0 {
        num
    } else {
        num / den
    }
}

/// Minimal model by enumeration: the intersection of every atom subset
/// that contains the facts and is closed under the clauses.
pub fn brute_force_closure(rb: &RuleBase, facts: &BTreeSet<String>) -> BTreeSet<String> {
    let atoms: Vec<&String> = rb.atoms().iter().collect();
    assert!(atoms.len() <= 16, "enumeration oracle is exponential");
    let mut model: Option<BTreeSet<String>> = None;
    for mask in 0u32..(1 << atoms.len()) {
        let set: BTreeSet<String> = (0..atoms.len())
            .filter(|b| mask >> b & 1 == 1)
            .map(|b| atoms[b].clone())
            .collect();
        if !facts.is_subset(&set) {
            continue;
        }
        let closed = rb
            .clauses()
            .iter()
            .all(|c: &Clause| !c.body.is_subset(&set) || set.contains(&c.head));
        if closed {
            model = Some(match model {
                None => set,
                Some(m) => m.intersection(&set).cloned().collect(),
            });
        }
    }
    model.unwrap()
}

pub fn random_rulebase(rng: &mut ChaCha8Rng, max_atoms: usize, max_clauses: usize) -> (RuleBase, BTreeSet<String>) {
    let n = rng.random_range(1..=max_atoms);
    let name = |i: usize| format!("a{i}");
    let clauses = (0..rng.random_range(0..=max_clauses))
        .map(|_| {
            let body: Vec<String> = (0..rng.random_range(0..=3)).map(|_| name(rng.random_range(0..n))).collect();
            Clause::new(body, name(rng.random_range(0..n)))
        })
        .collect();
    let facts = (0..n).filter(|_| rng.random::<f64>() < 0.3).map(name).collect();
    (RuleBase::new((0..n).map(name), clauses).unwrap(), facts)
}

/// Central difference `(f(+h) − f(−h)) / 2h`.
pub fn central_diff(f: impl Fn(f64) -> f64, h: f64) -> f64 {
    (f(h) - f(-h)) / (2.0 * h)
}

/// `max |a − b| / max |b|`.
pub fn max_rel(a: &[f64], b: &[f64]) -> f64 {
    let num = a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    let den = b.iter().map(|y| y.abs()).fold(0.0, f64::max);
    if den == 0.0 {
        num
    } else {
        num / den
    }
}
