use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Anything that assigns a gain to a Laplacian eigenvalue.
pub trait SpectralResponse: Sync {
    fn eval(&self, lambda: f64) -> f64;
}

impl<F: Fn(f64) -> f64 + Sync> SpectralResponse for F {
    fn eval(&self, lambda: f64) -> f64 {
        self(lambda)
    }
}

/// Closed-form spectral responses used as rule templates and fit targets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum AnalyticResponse {
    /// `1 / (1 + τλ)`.
    Diffusion { tau: f64 },
    /// `λ / (λ + β)`.
    Highpass { beta: f64 },
    /// `exp(-(λ - c)² / (2w²))`.
    GaussianBandpass { center: f64, width: f64 },
    Identity,
    /// `Σ_i c_i λ^i`.
    Polynomial { coeffs: Vec<f64> },
}

impl AnalyticResponse {
    pub fn validate(&self) -> Result<()> {
        let ok = match self {
            Self::Diffusion { tau } => *tau > 0.0 && tau.is_finite(),
            Self::Highpass { beta } => *beta > 0.0 && beta.is_finite(),
            Self::GaussianBandpass { center, width } => {
                *center >= 0.0 && center.is_finite() && *width > 0.0 && width.is_finite()
            }
            Self::Identity => true,
            Self::Polynomial { coeffs } => coeffs.iter().all(|c| c.is_finite()),
        };
        if ok {
            Ok(())
        } else {
            Err(invalid(format!("invalid response parameters: {self:?}")))
        }
    }

    /// Parse the compact CLI form: `identity`, `diffusion:TAU`, `highpass:BETA`,
    /// `bandpass:CENTER,WIDTH`, `poly:C0,C1,...`.
    pub fn parse_spec(spec: &str) -> Result<Self> {
        let (kind, rest) = spec.split_once(':').unwrap_or((spec, ""));
        let nums = || -> Result<Vec<f64>> {
            rest.split(',')
                .filter(|s| !s.trim().is_empty())
                .map(|s| {
                    s.trim()
                        .parse::<f64>()
                        .map_err(|_| invalid(format!("bad number `{s}` in response `{spec}`")))
                })
                .collect()
        };
        let one = |v: Vec<f64>| -> Result<f64> {
            match v.as_slice() {
                [x] => Ok(*x),
                _ => Err(invalid(format!("response `{spec}` takes one parameter"))),
            }
        };
        let r = match kind.trim() {
            "identity" => Self::Identity,
            "diffusion" => Self::Diffusion { tau: one(nums()?)? },
            "highpass" => Self::Highpass { beta: one(nums()?)? },
            "bandpass" => match nums()?.as_slice() {
                [c, w] => Self::GaussianBandpass { center: *c, width: *w },
                _ => return Err(invalid(format!("response `{spec}` takes CENTER,WIDTH"))),
            },
            "poly" | "polynomial" => Self::Polynomial { coeffs: nums()? },
            other => return Err(invalid(format!("unknown response kind `{other}`"))),
        };
        r.validate()?;
        Ok(r)
    }
}

impl SpectralResponse for AnalyticResponse {
    fn eval(&self, lambda: f64) -> f64 {
        match self {
            Self::Diffusion { tau } => 1.0 / (1.0 + tau * lambda),
            Self::Highpass { beta } => lambda / (lambda + beta),
            Self::GaussianBandpass { center, width } => {
                let d = lambda - center;
                (-d * d / (2.0 * width * width)).exp()
            }
            Self::Identity => 1.0,
            Self::Polynomial { coeffs } => coeffs.iter().rev().fold(0.0, |acc, c| acc * lambda + c),
        }
    }
}

/// Response evaluated at each eigenvalue.
pub fn response_values(r: &dyn SpectralResponse, eigenvalues: &[f64]) -> Vec<f64> {
    eigenvalues.iter().map(|&l| r.eval(l)).collect()
}

/// `response_eval`: the analytic response at `lambda ≥ 0`.
pub fn response_eval(r: &AnalyticResponse, lambda: f64) -> f64 {
    r.eval(lambda)
}
