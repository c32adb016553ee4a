use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::filter::{AnalyticResponse, ChebyshevFilter, SpectralResponse};
use crate::rules::grid_sup;

/// Multiplicative slack over the grid maximum.
pub const CERTIFICATE_SLACK: f64 = 1.05;
pub const DEFAULT_CERTIFICATE_GRID: usize = 1001;

#[derive(Debug, Clone, Copy)]
pub enum CertifiedResponse<'a> {
    Chebyshev(&'a ChebyshevFilter),
    Analytic(&'a AnalyticResponse),
}

impl<'a> From<&'a ChebyshevFilter> for CertifiedResponse<'a> {
    fn from(f: &'a ChebyshevFilter) -> Self {
        Self::Chebyshev(f)
    }
}

impl<'a> From<&'a AnalyticResponse> for CertifiedResponse<'a> {
    fn from(r: &'a AnalyticResponse) -> Self {
        Self::Analytic(r)
    }
}

/// Lipschitz bound `sup |h|` for operators with spectrum in `[0, λ_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RobustnessCertificate {
    pub bound: f64,
    pub grid_points: usize,
}

/// Exact `sup_{[0, λ_max]} |h|` where a closed form exists.
fn analytic_sup(r: &AnalyticResponse, lambda_max: f64) -> Option<f64> {
    match r {
        AnalyticResponse::Diffusion { .. } | AnalyticResponse::Identity => Some(1.0),
        AnalyticResponse::Highpass { beta } => Some(lambda_max / (lambda_max + beta)),
        AnalyticResponse::GaussianBandpass { center, .. } => Some(r.eval(center.clamp(0.0, lambda_max))),
        AnalyticResponse::Polynomial { .. } => None,
    }
}

pub fn robustness_certificate(f: CertifiedResponse<'_>, lambda_max: f64, grid: usize) -> Result<RobustnessCertificate> {
    if grid < 2 {
        return Err(invalid(format!("certificate grid needs at least 2 points, got {grid}")));
    }
    if !(lambda_max >= 0.0) || !lambda_max.is_finite() {
        return Err(invalid(format!("lambda_max must be finite and non-negative, got {lambda_max}")));
    }
    let sup = match f {
        CertifiedResponse::Chebyshev(c) => grid_sup(c, lambda_max, grid),
        CertifiedResponse::Analytic(r) => {
            analytic_sup(r, lambda_max).unwrap_or_else(|| grid_sup(r, lambda_max, grid))
        }
    };
    Ok(RobustnessCertificate {
        bound: CERTIFICATE_SLACK * sup,
        grid_points: grid,
    })
}
