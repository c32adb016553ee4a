use crate::error::Result;
use crate::taskgen::{mean_accuracy, Model, PerturbationConfig, TaskInstance};

/// Accuracy lost under a band perturbation of the inputs, in percentage
/// points. Clean and perturbed runs share thresholds and seeds.
pub fn robustness_drop(
    model: &Model,
    tasks: &[TaskInstance],
    perturbation: &PerturbationConfig,
    threshold: Option<f64>,
) -> Result<f64> {
    let clean = mean_accuracy(model, tasks, threshold, None)?;
    let perturbed = mean_accuracy(model, tasks, threshold, Some(perturbation))?;
    Ok(100.0 * (clean - perturbed))
}
