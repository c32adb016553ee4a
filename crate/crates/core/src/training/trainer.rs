//! Full-batch gradient descent over filter or mixture parameters, with an
//! optional projected step on each training graph's Laplacian.

use std::io::Write;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::grad::scaled_laplacian_adjoint;
use super::loss::proof_penalty_and_grad;
use super::mose::softmax;
use super::{
    curriculum_mask, gating_features, project_laplacian, rule_consistency_penalty, AllocationConfig, CurriculumSchedule,
    LossKind, MoSEModel, PenaltyWeights, RuleConsistencyTarget,
};
use crate::analysis::BandPartition;
use crate::error::{check_len, invalid, Error, Result};
use crate::exec::{map_ordered, Exec};
use crate::filter::{recurrence, sci17, ChebyshevFilter};
use crate::graph::{
    eigendecompose, estimate_lambda_max, scale_laplacian, Laplacian, ScaledLaplacian, SpectralBasis, DEFAULT_ORACLE_CAP,
    DEFAULT_POWER_ITERS, DEFAULT_POWER_TOL,
};
use crate::signal::{axpy, dot, BeliefVector, Domain};

/// Largest graph on which the Laplacian itself is learned.
pub const LAPLACIAN_LEARNING_CAP: usize = 128;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LaplacianLearning {
    pub learning_rate: f64,
    /// λ_max is re-estimated after this many Laplacian steps.
    pub reestimate_every: usize,
}

impl Default for LaplacianLearning {
    fn default() -> Self {
        Self {
            learning_rate: 0.01,
            reestimate_every: 10,
        }
    }
}

/// Training configuration; every field has a default in the JSON form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    pub seed: u64,
    /// Gradients longer than this are rescaled to it; `None` disables clipping.
    pub clip_norm: Option<f64>,
    /// `None` trains every coefficient from the start.
    pub curriculum: Option<CurriculumSchedule>,
    pub penalty_weights: PenaltyWeights,
    pub allocation: AllocationConfig,
    pub laplacian_learning: Option<LaplacianLearning>,
    /// Bands of the uniform partition used by proof penalties and gating.
    pub bands: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.05,
            epochs: 500,
            seed: 0,
            clip_norm: Some(10.0),
            curriculum: None,
            penalty_weights: PenaltyWeights::default(),
            allocation: AllocationConfig::default(),
            laplacian_learning: None,
            bands: 3,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate >= 0.0) || !self.learning_rate.is_finite() {
            return Err(invalid("learning_rate must be finite and non-negative"));
        }
        if let Some(c) = self.clip_norm {
            if !(c > 0.0) {
                return Err(invalid("clip_norm must be positive"));
            }
        }
        if self.bands == 0 {
            return Err(invalid("bands must be at least 1"));
        }
        if let Some(l) = &self.laplacian_learning {
            if !(l.learning_rate >= 0.0) || !l.learning_rate.is_finite() || l.reestimate_every == 0 {
                return Err(invalid("laplacian learning needs a finite rate >= 0 and reestimate_every >= 1"));
            }
        }
        self.penalty_weights.validate()?;
        self.allocation.validate()
    }
}

/// One supervised signal on a training graph.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingExample {
    pub x: BeliefVector,
    pub loss: LossKind,
    /// Bands the output may occupy; `None` skips the proof penalty.
    pub allowed_bands: Option<Vec<usize>>,
    /// Spectral profile the output should match; `None` skips the transfer term.
    pub transfer_reference: Option<BeliefVector>,
}

impl TrainingExample {
    pub fn regression(x: BeliefVector, target: BeliefVector) -> Self {
        Self {
            x,
            loss: LossKind::SquaredError { target },
            allowed_bands: None,
            transfer_reference: None,
        }
    }
}

/// A graph with the examples observed on it.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingGraph {
    pub laplacian: Laplacian,
    pub examples: Vec<TrainingExample>,
    pub rule_target: Option<RuleConsistencyTarget>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum TrainableModel {
    Filter(ChebyshevFilter),
    Mose(MoSEModel),
}

impl TrainableModel {
    pub fn max_order(&self) -> usize {
        match self {
            Self::Filter(f) => f.order(),
            Self::Mose(m) => m.max_order(),
        }
    }

    fn thetas(&self) -> Vec<&[f64]> {
        match self {
            Self::Filter(f) => vec![f.theta()],
            Self::Mose(m) => m.experts().iter().map(|e| e.theta()).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossRecord {
    pub epoch: usize,
    pub total: f64,
    pub data_term: f64,
    pub proof_penalty: f64,
    pub rule_consistency: f64,
    pub transfer: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct LossHistory {
    pub records: Vec<LossRecord>,
}

impl LossHistory {
    pub fn totals(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.total).collect()
    }

    /// Columns: `epoch, total, data_term, proof_penalty, rule_consistency, transfer`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["epoch", "total", "data_term", "proof_penalty", "rule_consistency", "transfer"])?;
        for r in &self.records {
            w.write_record([
                r.epoch.to_string(),
                sci17(r.total),
                sci17(r.data_term),
                sci17(r.proof_penalty),
                sci17(r.rule_consistency),
                sci17(r.transfer),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainOutput {
    pub model: TrainableModel,
    /// Final Laplacian per training graph (unchanged unless learned).
    pub laplacians: Vec<Laplacian>,
    pub history: LossHistory,
}

struct GraphState {
    laplacian: Laplacian,
    lambda_max: f64,
    lt: ScaledLaplacian,
    basis: Option<SpectralBasis>,
    partition: Option<BandPartition>,
    steps: usize,
}

impl GraphState {
    fn new(laplacian: Laplacian, with_basis: bool, bands: usize, seed: u64) -> Result<Self> {
        let lambda_max = estimate_lambda_max(&laplacian, DEFAULT_POWER_ITERS, DEFAULT_POWER_TOL, seed)?.value;
        let mut s = Self {
            lt: scale_laplacian(&laplacian, lambda_max)?,
            laplacian,
            lambda_max,
            basis: None,
            partition: None,
            steps: 0,
        };
        if with_basis {
            s.refresh_basis(bands)?;
        }
        Ok(s)
    }

    fn refresh_basis(&mut self, bands: usize) -> Result<()> {
        let basis = eigendecompose(&self.laplacian, DEFAULT_ORACLE_CAP)?;
        let top = basis.lambda_max().max(self.lambda_max);
        self.partition = Some(BandPartition::uniform(top, bands)?);
        self.basis = Some(basis);
        Ok(())
    }
}

/// Per-example loss terms and gradients.
struct ExampleGrad {
    data: f64,
    proof: f64,
    transfer: f64,
    /// One vector per expert (a single one for a plain filter).
    theta: Vec<Vec<f64>>,
    gate: Option<DMatrix<f64>>,
    laplacian: Option<DMatrix<f64>>,
}

struct Params<'a> {
    thetas: Vec<&'a [f64]>,
    gate: Option<&'a MoSEModel>,
}

fn example_pass(
    params: &Params<'_>,
    state: &GraphState,
    ex: &TrainingExample,
    weights: &PenaltyWeights,
    want_laplacian: bool,
) -> Result<ExampleGrad> {
    let n = ex.x.len();
    let x = ex.x.as_slice();
    let runs: Vec<_> = params
        .thetas
        .iter()
        .map(|th| recurrence(Exec::Parallel, th, &state.lt, x, true))
        .collect();
    let (alpha, features) = match params.gate {
        Some(m) => {
            let (basis, partition) = (state.basis.as_ref().unwrap(), state.partition.as_ref().unwrap());
            let f = gating_features(basis, &ex.x, partition)?;
            let w = m.gating_weights();
            let logits: Vec<f64> = (0..w.nrows()).map(|b| (0..f.len()).map(|j| w[(b, j)] * f[j]).sum()).collect();
            (softmax(&logits), Some(f))
        }
        None => (vec![1.0], None),
    };
    let mut y = vec![0.0; n];
    for ((yb, _), a) in runs.iter().zip(&alpha) {
        axpy(*a, yb, &mut y);
    }
    let (data, mut gy) = ex.loss.value_and_grad(&y);

    let mut proof = 0.0;
    if let (Some(allowed), Some(basis), Some(partition)) = (&ex.allowed_bands, &state.basis, &state.partition) {
        let yv = BeliefVector::new(y.clone(), Domain::Vertex)?;
        let (p, g) = proof_penalty_and_grad(&yv, basis, partition, allowed, weights.proof > 0.0)?;
        proof = p;
        if let Some(g) = g {
            axpy(weights.proof, &g, &mut gy);
        }
    }
    let mut transfer = 0.0;
    if let (Some(reference), Some(basis)) = (&ex.transfer_reference, &state.basis) {
        let yh = basis.forward(&y);
        let d: Vec<f64> = yh.iter().zip(reference.as_slice()).map(|(a, b)| a - b).collect();
        transfer = dot(&d, &d);
        if weights.transfer > 0.0 {
            let gd: Vec<f64> = d.iter().map(|v| 2.0 * v).collect();
            axpy(weights.transfer, &basis.inverse(&gd), &mut gy);
        }
    }

    let theta = runs
        .iter()
        .zip(&alpha)
        .map(|((_, tr), a)| {
            let tr = tr.as_ref().unwrap();
            tr.basis_vectors.iter().map(|b| a * dot(&gy, b)).collect()
        })
        .collect();
    let gate = match (params.gate, features) {
        (Some(m), Some(f)) => {
            let da: Vec<f64> = runs.iter().map(|(yb, _)| dot(&gy, yb)).collect();
            let mean: f64 = alpha.iter().zip(&da).map(|(a, d)| a * d).sum();
            let dz: Vec<f64> = alpha.iter().zip(&da).map(|(a, d)| a * (d - mean)).collect();
            Some(DMatrix::from_fn(m.expert_count(), f.len(), |b, j| dz[b] * f[j]))
        }
        _ => None,
    };
    let laplacian = want_laplacian.then(|| {
        let mut acc = DMatrix::zeros(n, n);
        for (((_, tr), a), th) in runs.iter().zip(&alpha).zip(&params.thetas) {
            let scaled: Vec<f64> = gy.iter().map(|v| a * v).collect();
            acc += scaled_laplacian_adjoint(&scaled, &tr.as_ref().unwrap().basis_vectors, th, &state.lt);
        }
        acc
    });
    Ok(ExampleGrad {
        data,
        proof,
        transfer,
        theta,
        gate,
        laplacian,
    })
}

fn clip(grads: &mut [&mut [f64]], limit: Option<f64>) {
    let Some(limit) = limit else { return };
    let norm = grads.iter().flat_map(|g| g.iter()).map(|v| v * v).sum::<f64>().sqrt();
    if norm > limit {
        let s = limit / norm;
        grads.iter_mut().for_each(|g| g.iter_mut().for_each(|v| *v *= s));
    }
}

/// Gradient descent on the mean objective
/// `data + w_p·proof + w_t·transfer` over examples plus `w_r` times the mean
/// rule-consistency term over graphs.
///
/// Each example is filtered with the model's coefficients applied to its own
/// graph's rescaled operator. Gradients are summed in example order, so runs
/// are bit-reproducible. The loss history records the objective before each
/// epoch's update.
pub fn train(model: TrainableModel, data: &[TrainingGraph], config: &TrainConfig) -> Result<TrainOutput> {
    config.validate()?;
    let total_examples: usize = data.iter().map(|g| g.examples.len()).sum();
    if total_examples == 0 {
        return Err(invalid("training needs at least one example"));
    }
    let order = model.max_order();
    let schedule = match &config.curriculum {
        Some(s) => {
            s.check_reaches(order)?;
            s.clone()
        }
        None => CurriculumSchedule::full(order),
    };
    let weights = config.penalty_weights;
    let is_mose = matches!(model, TrainableModel::Mose(_));
    if let TrainableModel::Mose(m) = &model {
        if m.feature_spec().bands != config.bands {
            return Err(invalid(format!(
                "mixture gate expects {} bands, config has {}",
                m.feature_spec().bands,
                config.bands
            )));
        }
    }
    let learn_l = config.laplacian_learning.clone();
    let any_spectral = data.iter().any(|g| {
        g.rule_target.is_some()
            || g.examples
                .iter()
                .any(|e| e.allowed_bands.is_some() || e.transfer_reference.is_some())
    });
    let with_basis = is_mose || learn_l.is_some() || any_spectral;

    let mut states = Vec::with_capacity(data.len());
    for g in data {
        let n = g.laplacian.dim();
        for e in &g.examples {
            check_len(n, e.x.len())?;
            e.x.expect_domain(Domain::Vertex)?;
            e.loss.validate(n)?;
            if let Some(r) = &e.transfer_reference {
                r.expect_domain(Domain::Spectral)?;
                check_len(n, r.len())?;
            }
        }
        if let Some(t) = &g.rule_target {
            check_len(n, t.target_spectrum.len())?;
        }
        if learn_l.is_some() && n > LAPLACIAN_LEARNING_CAP {
            return Err(Error::OracleUnavailable {
                n,
                cap: LAPLACIAN_LEARNING_CAP,
            });
        }
        states.push(GraphState::new(g.laplacian.clone(), with_basis, config.bands, config.seed)?);
    }

    let mut model = model;
    let mut history = LossHistory::default();
    let jobs: Vec<(usize, usize)> = data
        .iter()
        .enumerate()
        .flat_map(|(gi, g)| (0..g.examples.len()).map(move |ei| (gi, ei)))
        .collect();
    let scale = 1.0 / total_examples as f64;

    for epoch in 0..config.epochs {
        let thetas = model.thetas();
        let params = Params {
            thetas: thetas.clone(),
            gate: match &model {
                TrainableModel::Mose(m) => Some(m),
                TrainableModel::Filter(_) => None,
            },
        };
        let results = map_ordered(&jobs, |&(gi, ei)| {
            example_pass(&params, &states[gi], &data[gi].examples[ei], &weights, learn_l.is_some())
        });

        let mut data_term = 0.0;
        let mut proof = 0.0;
        let mut transfer = 0.0;
        let mut g_theta: Vec<Vec<f64>> = thetas.iter().map(|t| vec![0.0; t.len()]).collect();
        let mut g_gate: Option<DMatrix<f64>> = None;
        let mut g_lap: Vec<Option<DMatrix<f64>>> = vec![None; data.len()];
        for (r, &(gi, _)) in results.into_iter().zip(&jobs) {
            let r = r?;
            data_term += r.data;
            proof += r.proof;
            transfer += r.transfer;
            for (acc, g) in g_theta.iter_mut().zip(&r.theta) {
                axpy(scale, g, acc);
            }
            if let Some(g) = r.gate {
                g_gate = Some(match g_gate {
                    Some(acc) => acc + g * scale,
                    None => g * scale,
                });
            }
            if let Some(g) = r.laplacian {
                let s = scale * 2.0 / states[gi].lambda_max;
                g_lap[gi] = Some(match g_lap[gi].take() {
                    Some(acc) => acc + g * s,
                    None => g * s,
                });
            }
        }
        data_term *= scale;
        proof *= scale;
        transfer *= scale;

        let mut rule = 0.0;
        let mut rule_graphs = 0usize;
        for (gi, g) in data.iter().enumerate() {
            if let (Some(t), Some(basis)) = (&g.rule_target, &states[gi].basis) {
                rule += rule_consistency_penalty(basis, t)?;
                rule_graphs += 1;
                if let (Some(acc), true) = (g_lap[gi].as_mut(), weights.rule_consistency > 0.0) {
                    let d: Vec<f64> = basis
                        .eigenvalues
                        .iter()
                        .zip(&t.target_spectrum)
                        .map(|(l, p)| 2.0 * (l - p))
                        .collect();
                    let dn = data.iter().filter(|g| g.rule_target.is_some()).count() as f64;
                    *acc += basis.synthesize(&d) * (weights.rule_consistency / dn);
                }
            }
        }
        if rule_graphs > 0 {
            rule /= rule_graphs as f64;
        }
        let total = data_term + weights.proof * proof + weights.rule_consistency * rule + weights.transfer * transfer;
        if !total.is_finite() {
            return Err(Error::Diverged(epoch));
        }
        history.records.push(LossRecord {
            epoch,
            total,
            data_term,
            proof_penalty: proof,
            rule_consistency: rule,
            transfer,
        });

        let mask = curriculum_mask(&schedule, epoch, order);
        for g in g_theta.iter_mut() {
            for (v, &m) in g.iter_mut().zip(&mask) {
                if !m {
                    *v = 0.0;
                }
            }
        }
        {
            let mut parts: Vec<&mut [f64]> = g_theta.iter_mut().map(|g| g.as_mut_slice()).collect();
            if let Some(g) = g_gate.as_mut() {
                parts.push(g.as_mut_slice());
            }
            clip(&mut parts, config.clip_norm);
        }
        let lr = config.learning_rate;
        let step = |theta: &[f64], g: &[f64]| -> Vec<f64> { theta.iter().zip(g).map(|(t, d)| t - lr * d).collect() };
        model = match model {
            TrainableModel::Filter(f) => TrainableModel::Filter(f.with_theta(step(f.theta(), &g_theta[0]))?),
            TrainableModel::Mose(mut m) => {
                let experts = m
                    .experts()
                    .iter()
                    .zip(&g_theta)
                    .map(|(e, g)| e.with_theta(step(e.theta(), g)))
                    .collect::<Result<Vec<_>>>()?;
                let w = match &g_gate {
                    Some(g) => m.gating_weights() - g * lr,
                    None => m.gating_weights().clone(),
                };
                if w.iter().any(|v| !v.is_finite()) {
                    return Err(Error::Diverged(epoch));
                }
                m.set_parameters(experts, w);
                TrainableModel::Mose(m)
            }
        };

        if let Some(ll) = &learn_l {
            for (st, g) in states.iter_mut().zip(g_lap.iter_mut()) {
                let Some(g) = g.as_mut() else { continue };
                clip(&mut [g.as_mut_slice()], config.clip_norm);
                let candidate = st.laplacian.matrix.to_dense() - &*g * ll.learning_rate;
                st.laplacian = project_laplacian(&candidate).map_err(|_| Error::Diverged(epoch))?;
                st.steps += 1;
                if st.steps % ll.reestimate_every == 0 {
                    st.lambda_max =
                        estimate_lambda_max(&st.laplacian, DEFAULT_POWER_ITERS, DEFAULT_POWER_TOL, config.seed)?.value;
                }
                st.lt = scale_laplacian(&st.laplacian, st.lambda_max)?;
                st.refresh_basis(config.bands)?;
            }
        }
    }

    Ok(TrainOutput {
        model,
        laplacians: states.into_iter().map(|s| s.laplacian).collect(),
        history,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_laplacian, Graph, LaplacianKind, WeightSign};

    fn setup() -> TrainingGraph {
        let g = Graph::new(4, [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0)], WeightSign::Unsigned).unwrap();
        let l = build_laplacian(&g, LaplacianKind::Combinatorial).unwrap();
        let x = BeliefVector::vertex(vec![1.0, 0.0, 0.0, -1.0]).unwrap();
        let t = BeliefVector::vertex(vec![0.5, 0.2, -0.2, -0.5]).unwrap();
        TrainingGraph {
            laplacian: l,
            examples: vec![TrainingExample::regression(x, t)],
            rule_target: None,
        }
    }

    #[test]
    fn zero_rate_freezes() {
        let f = ChebyshevFilter::new(vec![0.3, 0.1, 0.0], 4.0).unwrap();
        let cfg = TrainConfig {
            learning_rate: 0.0,
            epochs: 5,
            ..Default::default()
        };
        let out = train(TrainableModel::Filter(f.clone()), &[setup()], &cfg).unwrap();
        assert_eq!(out.model, TrainableModel::Filter(f));
        let t = out.history.totals();
        assert!(t.iter().all(|v| *v == t[0]));
    }

    #[test]
    fn loss_decreases_and_repeats() {
        let f = ChebyshevFilter::new(vec![0.0; 4], 4.0).unwrap();
        let cfg = TrainConfig {
            epochs: 200,
            ..Default::default()
        };
        let a = train(TrainableModel::Filter(f.clone()), &[setup()], &cfg).unwrap();
        let b = train(TrainableModel::Filter(f), &[setup()], &cfg).unwrap();
        assert_eq!(a.history, b.history);
        let t = a.history.totals();
        assert!(t[t.len() - 1] < t[0] / 10.0);
    }

    #[test]
    fn curriculum_freezes_high_orders() {
        let f = ChebyshevFilter::new(vec![0.0; 5], 4.0).unwrap();
        let cfg = TrainConfig {
            epochs: 20,
            curriculum: Some(CurriculumSchedule::linear(1, 4, 100, 1).unwrap()),
            ..Default::default()
        };
        let out = train(TrainableModel::Filter(f), &[setup()], &cfg).unwrap();
        let TrainableModel::Filter(f) = out.model else { unreachable!() };
        assert_eq!(&f.theta()[2..], &[0.0, 0.0, 0.0]);
        assert!(f.theta()[1] != 0.0);
    }

    #[test]
    fn nan_reports_epoch() {
        let f = ChebyshevFilter::new(vec![1.0, 1.0], 4.0).unwrap();
        let mut g = setup();
        g.examples[0].loss = LossKind::SquaredError {
            target: BeliefVector::vertex(vec![1e300; 4]).unwrap(),
        };
        let cfg = TrainConfig {
            epochs: 3,
            ..Default::default()
        };
        assert!(matches!(train(TrainableModel::Filter(f), &[g], &cfg), Err(Error::Diverged(0))));
    }

    #[test]
    fn history_csv() {
        let h = LossHistory {
            records: vec![LossRecord {
                epoch: 0,
                total: 1.5,
                data_term: 1.5,
                proof_penalty: 0.0,
                rule_consistency: 0.0,
                transfer: 0.0,
            }],
        };
        let mut buf = Vec::new();
        h.write_csv(&mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert!(s.starts_with("epoch,total,data_term,proof_penalty,rule_consistency,transfer\n0,1.5000000000000000e0,"));
    }
}
