use serde::{Deserialize, Serialize};

use crate::analysis::BandPartition;
use crate::error::{check_len, invalid, Result};
use crate::graph::SpectralBasis;
use crate::rules::sigmoid;
use crate::signal::{BeliefVector, Domain};

/// Data term of the training objective, averaged over nodes.
#[derive(Debug, Clone, PartialEq)]
pub enum LossKind {
    /// `(1/N) Σ (y_i − t_i)²`.
    SquaredError { target: BeliefVector },
    /// Mean binary cross-entropy of `σ(temperature (y_i − threshold))`
    /// against the labels.
    CrossEntropy {
        labels: Vec<bool>,
        threshold: f64,
        temperature: f64,
    },
}

impl LossKind {
    pub fn validate(&self, n: usize) -> Result<()> {
        match self {
            Self::SquaredError { target } => {
                target.expect_domain(Domain::Vertex)?;
                check_len(n, target.len())
            }
            Self::CrossEntropy {
                labels,
                threshold,
                temperature,
            } => {
                check_len(n, labels.len())?;
                if !threshold.is_finite() || !(*temperature > 0.0) || !temperature.is_finite() {
                    return Err(invalid("cross-entropy needs a finite threshold and positive temperature"));
                }
                Ok(())
            }
        }
    }

    /// Loss value and `∂𝓛/∂y`.
    pub fn value_and_grad(&self, y: &[f64]) -> (f64, Vec<f64>) {
        let n = y.len() as f64;
        match self {
            Self::SquaredError { target } => {
                let r: Vec<f64> = y.iter().zip(target.as_slice()).map(|(a, b)| a - b).collect();
                let value = r.iter().map(|v| v * v).sum::<f64>() / n;
                (value, r.iter().map(|v| 2.0 * v / n).collect())
            }
            Self::CrossEntropy {
                labels,
                threshold,
                temperature,
            } => {
                let mut value = 0.0;
                let mut grad = Vec::with_capacity(y.len());
                for (&yi, &l) in y.iter().zip(labels) {
                    let z = temperature * (yi - threshold);
                    // −log σ(±z) = softplus(∓z), evaluated stably.
                    let signed = if l { -z } else { z };
                    value += signed.max(0.0) + (-signed.abs()).exp().ln_1p();
                    let target = if l { 1.0 } else { 0.0 };
                    grad.push(temperature * (sigmoid(z) - target) / n);
                }
                (value / n, grad)
            }
        }
    }
}

/// Weights on the auxiliary terms of the objective.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct PenaltyWeights {
    pub proof: f64,
    pub rule_consistency: f64,
    pub transfer: f64,
}

impl PenaltyWeights {
    pub fn validate(&self) -> Result<()> {
        for (name, w) in [("proof", self.proof), ("rule_consistency", self.rule_consistency), ("transfer", self.transfer)] {
            if !(w >= 0.0) || !w.is_finite() {
                return Err(invalid(format!("penalty weight `{name}` must be finite and non-negative, got {w}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LossSpec {
    pub kind: LossKind,
    pub penalty_weights: PenaltyWeights,
}

/// Target spectrum `Ψ_r` for the rule-consistency term.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RuleConsistencyTarget {
    pub target_spectrum: Vec<f64>,
}

impl RuleConsistencyTarget {
    pub fn new(target_spectrum: Vec<f64>) -> Result<Self> {
        if target_spectrum.iter().any(|v| !v.is_finite()) {
            return Err(invalid("target spectrum must be finite"));
        }
        Ok(Self { target_spectrum })
    }
}

/// `‖Uᵀ L U − Ψ‖_F² = ‖diag(λ) − Ψ‖²` for an exact eigenbasis.
pub fn rule_consistency_penalty(basis: &SpectralBasis, target: &RuleConsistencyTarget) -> Result<f64> {
    check_len(basis.dim(), target.target_spectrum.len())?;
    Ok(basis
        .eigenvalues
        .iter()
        .zip(&target.target_spectrum)
        .map(|(l, p)| (l - p) * (l - p))
        .sum())
}

/// Fraction of `ŷ`'s energy outside the allowed bands; 0 for `y = 0`.
pub fn proof_guided_penalty(
    y: &BeliefVector,
    basis: &SpectralBasis,
    partition: &BandPartition,
    allowed_bands: &[usize],
) -> Result<f64> {
    Ok(proof_penalty_and_grad(y, basis, partition, allowed_bands, false)?.0)
}

/// Penalty and, when requested, its vertex-domain gradient
/// `U (2 ŷ ⊙ (1_disallowed − P)) / E`.
pub(crate) fn proof_penalty_and_grad(
    y: &BeliefVector,
    basis: &SpectralBasis,
    partition: &BandPartition,
    allowed_bands: &[usize],
    want_grad: bool,
) -> Result<(f64, Option<Vec<f64>>)> {
    y.expect_domain(Domain::Vertex)?;
    check_len(basis.dim(), y.len())?;
    for &b in allowed_bands {
        partition.check_band(b)?;
    }
    let bands = partition.assign(&basis.eigenvalues)?;
    let yh = basis.forward(y.as_slice());
    let disallowed: Vec<bool> = bands.iter().map(|b| !allowed_bands.contains(b)).collect();
    let total: f64 = yh.iter().map(|c| c * c).sum();
    if total == 0.0 {
        return Ok((0.0, want_grad.then(|| vec![0.0; y.len()])));
    }
    let outside: f64 = yh.iter().zip(&disallowed).filter(|(_, &d)| d).map(|(c, _)| c * c).sum();
    let p = (outside / total).clamp(0.0, 1.0);
    let grad = want_grad.then(|| {
        let gh: Vec<f64> = yh
            .iter()
            .zip(&disallowed)
            .map(|(c, &d)| 2.0 * c * (if d { 1.0 } else { 0.0 } - p) / total)
            .collect();
        basis.inverse(&gh)
    });
    Ok((p, grad))
}
