use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::analysis::{band_energy, BandPartition};
use crate::error::{check_len, invalid, Error, Result};
use crate::filter::{cheb_apply, ChebyshevFilter};
use crate::graph::{ScaledLaplacian, SpectralBasis};
use crate::signal::{axpy, BeliefVector, Domain};

/// Instance features fed to the gate: `ln(1 + ‖x‖²)`, the per-band energy
/// fractions of `x`, and `ln N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureSpec {
    pub bands: usize,
}

impl Default for FeatureSpec {
    fn default() -> Self {
        Self { bands: 3 }
    }
}

impl FeatureSpec {
    pub fn len(&self) -> usize {
        self.bands + 2
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

pub fn gating_features(basis: &SpectralBasis, x: &BeliefVector, partition: &BandPartition) -> Result<Vec<f64>> {
    let r = band_energy(basis, x, partition)?;
    let mut f = Vec::with_capacity(partition.band_count() + 2);
    f.push(r.total().ln_1p());
    f.extend_from_slice(&r.fractions);
    f.push((x.len() as f64).ln());
    Ok(f)
}

/// Mixture of spectral experts `h* = Σ_b α_b(x) h^(b)` with a softmax gate
/// `α = softmax(W f)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MoSEModel {
    experts: Vec<ChebyshevFilter>,
    gating_weights: DMatrix<f64>,
    feature_spec: FeatureSpec,
}

impl MoSEModel {
    pub fn new(experts: Vec<ChebyshevFilter>, gating_weights: DMatrix<f64>, feature_spec: FeatureSpec) -> Result<Self> {
        if experts.is_empty() {
            return Err(invalid("a mixture needs at least one expert"));
        }
        if gating_weights.nrows() != experts.len() || gating_weights.ncols() != feature_spec.len() {
            return Err(invalid(format!(
                "gating weights must be {}x{}, got {}x{}",
                experts.len(),
                feature_spec.len(),
                gating_weights.nrows(),
                gating_weights.ncols()
            )));
        }
        if gating_weights.iter().any(|w| !w.is_finite()) {
            return Err(invalid("gating weights must be finite"));
        }
        Ok(Self {
            experts,
            gating_weights,
            feature_spec,
        })
    }

    /// Zero gate (uniform mixture).
    pub fn uniform(experts: Vec<ChebyshevFilter>, feature_spec: FeatureSpec) -> Result<Self> {
        let w = DMatrix::zeros(experts.len(), feature_spec.len());
        Self::new(experts, w, feature_spec)
    }

    pub fn experts(&self) -> &[ChebyshevFilter] {
        &self.experts
    }

    pub fn gating_weights(&self) -> &DMatrix<f64> {
        &self.gating_weights
    }

    pub fn feature_spec(&self) -> FeatureSpec {
        self.feature_spec
    }

    pub fn expert_count(&self) -> usize {
        self.experts.len()
    }

    pub fn max_order(&self) -> usize {
        self.experts.iter().map(|e| e.order()).max().unwrap_or(0)
    }

    pub(crate) fn set_parameters(&mut self, experts: Vec<ChebyshevFilter>, gating_weights: DMatrix<f64>) {
        self.experts = experts;
        self.gating_weights = gating_weights;
    }
}

pub(crate) fn softmax(logits: &[f64]) -> Vec<f64> {
    let m = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = logits.iter().map(|z| (z - m).exp()).collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|v| v / s).collect()
}

pub fn mose_gate(model: &MoSEModel, features: &[f64]) -> Result<Vec<f64>> {
    check_len(model.feature_spec.len(), features.len())?;
    if let Some(i) = features.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite(i));
    }
    let logits: Vec<f64> = (0..model.expert_count())
        .map(|b| (0..features.len()).map(|f| model.gating_weights[(b, f)] * features[f]).sum())
        .collect();
    Ok(softmax(&logits))
}

/// `Σ_b α_b θ^(b)`, zero-padded to the largest order.
pub fn pooled_filter(model: &MoSEModel, alpha: &[f64]) -> Result<ChebyshevFilter> {
    check_len(model.expert_count(), alpha.len())?;
    let mut theta = vec![0.0; model.max_order() + 1];
    for (e, a) in model.experts.iter().zip(alpha) {
        axpy(*a, e.theta(), &mut theta[..e.theta().len()]);
    }
    ChebyshevFilter::new(theta, model.experts[0].lambda_max())
}

/// `y = Σ_b α_b h^(b)(L̃) x`.
pub fn mose_apply(model: &MoSEModel, lt: &ScaledLaplacian, x: &BeliefVector, features: &[f64]) -> Result<BeliefVector> {
    for e in &model.experts {
        e.check_operator(lt)?;
    }
    let alpha = mose_gate(model, features)?;
    let mut y = vec![0.0; x.len()];
    for (e, a) in model.experts.iter().zip(&alpha) {
        let (yb, _) = cheb_apply(e, lt, x, false)?;
        axpy(*a, yb.as_slice(), &mut y);
    }
    Ok(BeliefVector::from_parts(y, Domain::Vertex))
}

#[derive(Serialize, Deserialize)]
struct ExpertRepr {
    lambda_max: f64,
    theta: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct MoseRepr {
    experts: Vec<ExpertRepr>,
    gating_weights: Vec<Vec<f64>>,
    feature_spec: FeatureSpec,
}

impl Serialize for MoSEModel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MoseRepr {
            experts: self
                .experts
                .iter()
                .map(|e| ExpertRepr {
                    lambda_max: e.lambda_max(),
                    theta: e.theta().to_vec(),
                })
                .collect(),
            gating_weights: self
                .gating_weights
                .row_iter()
                .map(|r| r.iter().copied().collect())
                .collect(),
            feature_spec: self.feature_spec,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for MoSEModel {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = MoseRepr::deserialize(d)?;
        let experts = r
            .experts
            .into_iter()
            .map(|e| ChebyshevFilter::new(e.theta, e.lambda_max))
            .collect::<Result<Vec<_>>>()
            .map_err(D::Error::custom)?;
        let cols = r.feature_spec.len();
        if r.gating_weights.iter().any(|row| row.len() != cols) {
            return Err(D::Error::custom(format!("gating rows must have {cols} entries")));
        }
        let flat: Vec<f64> = r.gating_weights.iter().flatten().copied().collect();
        let w = DMatrix::from_row_slice(r.gating_weights.len(), cols, &flat);
        Self::new(experts, w, r.feature_spec).map_err(D::Error::custom)
    }
}
