use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::signal::BeliefVector;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum ProjectionMode {
    /// `p_i = 1[y_i > threshold]`.
    Hard,
    /// `σ(temperature · (y_i − threshold))`, binarized at 0.5 (strictly).
    Soft { temperature: f64 },
}

/// Predicates read off a filtered belief vector.
///
/// In hard mode `soft` holds the 0/1 indicators and `temperature` is `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct PredicateVector {
    pub hard: Vec<bool>,
    pub soft: Vec<f64>,
    pub threshold: f64,
    pub temperature: Option<f64>,
}

impl PredicateVector {
    pub fn true_indices(&self) -> Vec<usize> {
        self.hard.iter().enumerate().filter(|(_, &h)| h).map(|(i, _)| i).collect()
    }
}

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

pub fn project_predicates(y: &BeliefVector, threshold: f64, mode: ProjectionMode) -> Result<PredicateVector> {
    if let Some(i) = y.as_slice().iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite(i));
    }
    if !threshold.is_finite() {
        return Err(invalid("threshold must be finite"));
    }
    match mode {
        ProjectionMode::Hard => {
            let hard: Vec<bool> = y.as_slice().iter().map(|&v| v > threshold).collect();
            let soft = hard.iter().map(|&h| if h { 1.0 } else { 0.0 }).collect();
            Ok(PredicateVector {
                hard,
                soft,
                threshold,
                temperature: None,
            })
        }
        ProjectionMode::Soft { temperature } => {
            if !(temperature > 0.0) {
                return Err(invalid(format!("temperature must be positive, got {temperature}")));
            }
            let soft: Vec<f64> = y
                .as_slice()
                .iter()
                .map(|&v| sigmoid(temperature * (v - threshold)))
                .collect();
            let hard = soft.iter().map(|&s| s > 0.5).collect();
            Ok(PredicateVector {
                hard,
                soft,
                threshold,
                temperature: Some(temperature),
            })
        }
    }
}
