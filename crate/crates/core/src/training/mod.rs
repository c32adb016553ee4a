//! Gradients through the Chebyshev recurrence, Laplacian projection,
//! penalties, mixtures of spectral experts, curricula and the trainer.

mod curriculum;
mod grad;
mod loss;
mod mose;
mod project;
mod trainer;

pub use crate::analysis::BandPartition;
pub use curriculum::*;
pub use grad::{grad_scaled_laplacian, grad_theta};
pub use loss::{
    proof_guided_penalty, rule_consistency_penalty, LossKind, LossSpec, PenaltyWeights, RuleConsistencyTarget,
};
pub use mose::{gating_features, mose_apply, mose_gate, pooled_filter, FeatureSpec, MoSEModel};
pub use project::project_laplacian;
pub use trainer::*;
