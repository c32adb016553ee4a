use std::collections::BTreeSet;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::{TaskInstance, TaskKind};
use crate::analysis::{band_energy, proof_band_agreement, spectral_perturb, BandPartition, BandReport};
use crate::error::{invalid, Result};
use crate::exec::map_ordered;
use crate::filter::{
    cheb_apply, default_quadrature_nodes, dense_filter_apply, fit_chebyshev, rational_apply, AnalyticResponse,
    ChebyshevFilter, DEFAULT_CG_TOL,
};
use crate::graph::{
    build_laplacian, eigendecompose, estimate_lambda_max_default, scale_laplacian, Laplacian, LaplacianKind,
    ScaledLaplacian, SpectralBasis, DEFAULT_ORACLE_CAP,
};
use crate::rules::{forward_chain, project_predicates, ProjectionMode, DEFAULT_RULE_ORDER};
use crate::signal::{BeliefVector, Domain};
use crate::training::{gating_features, mose_gate, pooled_filter, MoSEModel};

/// Something that maps an instance's seed beliefs to output beliefs.
#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    /// Coefficients applied to each instance's own rescaled Laplacian.
    Filter(ChebyshevFilter),
    /// Exact when an eigenbasis is available, otherwise a Chebyshev fit of
    /// `order` (default [`DEFAULT_RULE_ORDER`]).
    Response {
        response: AnalyticResponse,
        order: Option<usize>,
    },
    /// `(I + τL)⁻¹ x` by conjugate gradients.
    Rational { tau: f64 },
    Mose(MoSEModel),
    /// Emits the labels: `±1` on community tasks, `1/0` otherwise.
    Oracle,
    Zero,
}

/// Per-instance operators shared by every model application.
pub struct InstanceContext {
    pub laplacian: Laplacian,
    pub lt: ScaledLaplacian,
    pub basis: Option<SpectralBasis>,
    pub partition: Option<BandPartition>,
}

impl InstanceContext {
    pub fn new(task: &TaskInstance) -> Result<Self> {
        let laplacian = build_laplacian(&task.graph, LaplacianKind::Combinatorial)?;
        let lm = estimate_lambda_max_default(&laplacian).value;
        let lt = scale_laplacian(&laplacian, lm)?;
        let basis = if task.node_count() <= DEFAULT_ORACLE_CAP {
            Some(eigendecompose(&laplacian, DEFAULT_ORACLE_CAP)?)
        } else {
            None
        };
        let partition = match &basis {
            Some(b) if b.lambda_max() > 0.0 => Some(BandPartition::three_band(b.lambda_max())?),
            _ => None,
        };
        Ok(Self {
            laplacian,
            lt,
            basis,
            partition,
        })
    }
}

pub fn apply_model(model: &Model, ctx: &InstanceContext, task: &TaskInstance, x: &BeliefVector) -> Result<BeliefVector> {
    let lm = ctx.lt.lambda_max;
    match model {
        Model::Filter(f) => Ok(cheb_apply(&f.with_lambda_max(lm)?, &ctx.lt, x, false)?.0),
        Model::Response { response, order } => match (&ctx.basis, order) {
            (Some(b), None) => dense_filter_apply(b, response, x),
            _ => {
                let k = order.unwrap_or(DEFAULT_RULE_ORDER);
                let f = fit_chebyshev(response, k, lm, default_quadrature_nodes(k))?;
                Ok(cheb_apply(&f, &ctx.lt, x, false)?.0)
            }
        },
        Model::Rational { tau } => rational_apply(*tau, &ctx.laplacian, x, DEFAULT_CG_TOL, None),
        Model::Mose(m) => {
            let (Some(b), Some(p)) = (&ctx.basis, &ctx.partition) else {
                return Err(invalid("mixture gating needs an eigenbasis"));
            };
            let alpha = mose_gate(m, &gating_features(b, x, p)?)?;
            let f = pooled_filter(m, &alpha)?.with_lambda_max(lm)?;
            Ok(cheb_apply(&f, &ctx.lt, x, false)?.0)
        }
        Model::Oracle => {
            let neg = if task.kind == TaskKind::Community { -1.0 } else { 0.0 };
            BeliefVector::vertex(task.labels.iter().map(|&l| if l { 1.0 } else { neg }).collect())
        }
        Model::Zero => Ok(BeliefVector::zeros(task.node_count(), Domain::Vertex)),
    }
}

/// Band perturbation applied to seed beliefs before evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerturbationConfig {
    pub band: usize,
    pub magnitude: f64,
    /// Instance `i` uses `seed + i`.
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EvalConfig {
    /// Projection threshold; `None` uses the per-kind default.
    pub threshold: Option<f64>,
    /// Timed repetitions per instance.
    pub latency_runs: usize,
    pub perturbation: Option<PerturbationConfig>,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            threshold: None,
            latency_runs: 3,
            perturbation: None,
        }
    }
}

/// 0.0 for community signs, 0.5 for spike magnitudes and chain facts.
pub fn default_threshold(kind: TaskKind) -> f64 {
    match kind {
        TaskKind::Community => 0.0,
        TaskKind::Contradiction | TaskKind::Chain => 0.5,
    }
}

/// Exact AUC over all (positive, negative) pairs, ties counting one half.
/// `None` without both classes.
pub fn auc(scores: &[f64], labels: &[bool]) -> Option<f64> {
    let pos: Vec<f64> = scores.iter().zip(labels).filter(|(_, l)| **l).map(|(s, _)| *s).collect();
    let neg: Vec<f64> = scores.iter().zip(labels).filter(|(_, l)| !**l).map(|(s, _)| *s).collect();
    if pos.is_empty() || neg.is_empty() {
        return None;
    }
    let mut wins = 0.0;
    for p in &pos {
        for q in &neg {
            wins += if p > q {
                1.0
            } else if p == q {
                0.5
            } else {
                0.0
            };
        }
    }
    Some(wins / (pos.len() * neg.len()) as f64)
}

/// `2|P∩T| / (|P| + |T|)`; 1 when both sets are empty.
pub fn f1_score(predicted: &BTreeSet<String>, truth: &BTreeSet<String>) -> f64 {
    let denom = predicted.len() + truth.len();
    if denom == 0 {
        return 1.0;
    }
    2.0 * predicted.intersection(truth).count() as f64 / denom as f64
}

/// Atom closure of the predicates `y > threshold`.
pub fn chain_closure(task: &TaskInstance, y: &BeliefVector, threshold: f64) -> Result<BTreeSet<String>> {
    let rb = task
        .rulebase
        .as_ref()
        .ok_or_else(|| invalid("chain task without a rulebase"))?;
    let p = project_predicates(y, threshold, ProjectionMode::Hard)?;
    let facts = p.true_indices().into_iter().map(|i| task.atom_map[i].clone()).collect();
    forward_chain(rb, &facts)
}

/// Node accuracy of the projected output; F1 of the atom closure on chains.
pub fn score_instance(task: &TaskInstance, y: &BeliefVector, threshold: f64) -> Result<f64> {
    let n = task.node_count() as f64;
    let hits = |pred: &dyn Fn(f64) -> bool| {
        y.as_slice().iter().zip(&task.labels).filter(|(v, l)| pred(**v) == **l).count() as f64 / n
    };
    Ok(match task.kind {
        TaskKind::Community => hits(&|v| v > threshold),
        TaskKind::Contradiction => hits(&|v| v.abs() > threshold),
        TaskKind::Chain => {
            let predicted = chain_closure(task, y, threshold)?;
            let truth = task
                .atom_map
                .iter()
                .zip(&task.labels)
                .filter(|(_, l)| **l)
                .map(|(a, _)| a.clone())
                .collect();
            f1_score(&predicted, &truth)
        }
    })
}

fn instance_input(task: &TaskInstance, ctx: &InstanceContext, perturbation: Option<&PerturbationConfig>, index: usize) -> Result<BeliefVector> {
    match perturbation {
        None => Ok(task.seed_beliefs.clone()),
        Some(p) => {
            let (Some(b), Some(part)) = (&ctx.basis, &ctx.partition) else {
                return Err(invalid("spectral perturbation needs an eigenbasis"));
            };
            spectral_perturb(b, &task.seed_beliefs, p.band, p.magnitude, part, p.seed.wrapping_add(index as u64))
        }
    }
}

/// Mean accuracy, optionally after perturbing every instance's input.
pub fn mean_accuracy(
    model: &Model,
    tasks: &[TaskInstance],
    threshold: Option<f64>,
    perturbation: Option<&PerturbationConfig>,
) -> Result<f64> {
    if tasks.is_empty() {
        return Err(invalid("no task instances"));
    }
    let idx: Vec<usize> = (0..tasks.len()).collect();
    let scores = map_ordered(&idx, |&i| -> Result<f64> {
        let t = &tasks[i];
        let ctx = InstanceContext::new(t)?;
        let x = instance_input(t, &ctx, perturbation, i)?;
        let y = apply_model(model, &ctx, t, &x)?;
        score_instance(t, &y, threshold.unwrap_or_else(|| default_threshold(t.kind)))
    });
    let mut sum = 0.0;
    for s in scores {
        sum += s?;
    }
    Ok(sum / tasks.len() as f64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub instances: usize,
    pub accuracy: f64,
    /// Median over instances of the median timed run.
    pub latency_ms: f64,
    /// Output energy summed over instances, on bands of `λ / λ_max`.
    pub band_report: BandReport,
    /// Percentage points; 0 without a perturbation.
    pub robustness_drop: f64,
    /// 0 when every output is zero.
    pub proof_band_agreement: f64,
    /// Mean over contradiction instances with both classes.
    pub auc: Option<f64>,
}

struct InstanceResult {
    accuracy: f64,
    latency_ms: f64,
    band: Option<(BandReport, Vec<usize>)>,
    auc: Option<f64>,
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

pub fn evaluate(model: &Model, tasks: &[TaskInstance], config: &EvalConfig) -> Result<EvalReport> {
    if tasks.is_empty() {
        return Err(invalid("no task instances"));
    }
    let runs = config.latency_runs.max(1);
    let results = map_ordered(tasks, |t| -> Result<InstanceResult> {
        let ctx = InstanceContext::new(t)?;
        let mut times = Vec::with_capacity(runs);
        let mut y = None;
        for _ in 0..runs {
            let start = Instant::now();
            let out = apply_model(model, &ctx, t, &t.seed_beliefs)?;
            times.push(start.elapsed().as_secs_f64() * 1e3);
            y = Some(out);
        }
        let y = y.unwrap();
        let threshold = config.threshold.unwrap_or_else(|| default_threshold(t.kind));
        let band = match (&ctx.basis, &ctx.partition) {
            (Some(b), Some(p)) => Some((band_energy(b, &y, p)?, t.allowed_bands.clone())),
            _ => None,
        };
        let auc = match t.kind {
            TaskKind::Contradiction => {
                let s: Vec<f64> = y.as_slice().iter().map(|v| v.abs()).collect();
                auc(&s, &t.labels)
            }
            _ => None,
        };
        Ok(InstanceResult {
            accuracy: score_instance(t, &y, threshold)?,
            latency_ms: median(times),
            band,
            auc,
        })
    });
    let results = results.into_iter().collect::<Result<Vec<_>>>()?;

    let accuracy = results.iter().map(|r| r.accuracy).sum::<f64>() / results.len() as f64;
    let latency_ms = median(results.iter().map(|r| r.latency_ms).collect());
    let norm_partition = BandPartition::three_band(1.0)?;
    let mut energies = vec![0.0; norm_partition.band_count()];
    let mut bands = Vec::new();
    for r in &results {
        if let Some((rep, allowed)) = &r.band {
            for (e, v) in energies.iter_mut().zip(&rep.energies) {
                *e += v;
            }
            bands.push((rep.clone(), allowed.clone()));
        }
    }
    let agreement = if bands.iter().any(|(r, _)| !r.degenerate) {
        proof_band_agreement(&bands)?
    } else {
        0.0
    };
    let aucs: Vec<f64> = results.iter().filter_map(|r| r.auc).collect();
    let robustness_drop = match &config.perturbation {
        Some(p) => crate::analysis::robustness_drop(model, tasks, p, config.threshold)?,
        None => 0.0,
    };
    Ok(EvalReport {
        instances: tasks.len(),
        accuracy,
        latency_ms,
        band_report: BandReport::from_energies(norm_partition, energies),
        robustness_drop,
        proof_band_agreement: agreement,
        auc: (!aucs.is_empty()).then(|| aucs.iter().sum::<f64>() / aucs.len() as f64),
    })
}
