use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Graph, SymSparse, WeightSign};
use crate::error::{invalid, Result};
use crate::exec::Exec;
use crate::signal::{dot, norm};

/// Power-method estimates are inflated by this factor so the rescaled
/// spectrum stays inside [-1, 1].
pub const LAMBDA_MAX_MARGIN: f64 = 1.01;
pub const DEFAULT_POWER_ITERS: usize = 500;
pub const DEFAULT_POWER_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LaplacianKind {
    /// `D - A`.
    #[default]
    Combinatorial,
    /// `I - D^{-1/2} A D^{-1/2}`; isolated nodes get a zero row.
    Normalized,
    /// `D̄ - A` with `d̄_i = Σ_j |A_ij|`.
    Signed,
}

/// A graph Laplacian with its (absolute) degree vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Laplacian {
    pub matrix: SymSparse,
    pub kind: LaplacianKind,
    pub degree: Vec<f64>,
}

impl Laplacian {
    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// Wrap a matrix that is already a combinatorial Laplacian; the degree is
    /// read off the diagonal.
    pub fn from_combinatorial(matrix: SymSparse) -> Self {
        let degree = matrix.diag().to_vec();
        Self {
            matrix,
            kind: LaplacianKind::Combinatorial,
            degree,
        }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.matrix.matvec(x)
    }
}

pub fn build_laplacian(g: &Graph, kind: LaplacianKind) -> Result<Laplacian> {
    if g.sign() == WeightSign::Signed && kind != LaplacianKind::Signed {
        return Err(invalid(format!(
            "signed graph requires the signed Laplacian, not {kind:?}"
        )));
    }
    let n = g.node_count();
    let mut degree = vec![0.0; n];
    for e in g.edges() {
        let w = match kind {
            LaplacianKind::Signed => e.w.abs(),
            _ => e.w,
        };
        degree[e.i] += w;
        degree[e.j] += w;
    }
    let matrix = match kind {
        LaplacianKind::Combinatorial | LaplacianKind::Signed => {
            let upper = g.edges().iter().map(|e| (e.i, e.j, -e.w)).collect();
            SymSparse::new(n, degree.clone(), upper)
        }
        LaplacianKind::Normalized => {
            let inv_sqrt: Vec<f64> = degree
                .iter()
                .map(|&d| if d > 0.0 { 1.0 / d.sqrt() } else { 0.0 })
                .collect();
            let diag = degree.iter().map(|&d| if d > 0.0 { 1.0 } else { 0.0 }).collect();
            let upper = g
                .edges()
                .iter()
                .map(|e| (e.i, e.j, -e.w * inv_sqrt[e.i] * inv_sqrt[e.j]))
                .collect();
            SymSparse::new(n, diag, upper)
        }
    };
    Ok(Laplacian {
        matrix,
        kind,
        degree,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LambdaMaxSource {
    PowerIteration,
    Gershgorin,
    /// Zero operator; value is the documented 1.0 fallback.
    Fallback,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LambdaMaxEstimate {
    pub value: f64,
    pub source: LambdaMaxSource,
    pub iterations: usize,
}

impl LambdaMaxEstimate {
    pub fn degenerate(&self) -> bool {
        self.source == LambdaMaxSource::Fallback
    }
}

/// Upper bound on the largest Laplacian eigenvalue.
///
/// Power iteration from the normalized all-ones vector perturbed by seeded
/// uniform noise; stops when successive Rayleigh quotients differ by less than
/// `tol`, then multiplies by [`LAMBDA_MAX_MARGIN`]. If the cap is hit first the
/// Gershgorin bound is returned instead. A zero operator yields 1.0 flagged as
/// degenerate.
pub fn estimate_lambda_max(l: &Laplacian, max_iters: usize, tol: f64, seed: u64) -> Result<LambdaMaxEstimate> {
    if max_iters == 0 || !(tol > 0.0) {
        return Err(invalid("estimate_lambda_max needs max_iters >= 1 and tol > 0"));
    }
    let n = l.dim();
    let fallback = LambdaMaxEstimate {
        value: 1.0,
        source: LambdaMaxSource::Fallback,
        iterations: 0,
    };
    if l.matrix.is_zero() {
        return Ok(fallback);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v: Vec<f64> = (0..n).map(|_| 1.0 + rng.random_range(-0.5..0.5)).collect();
    let nv = norm(&v);
    v.iter_mut().for_each(|x| *x /= nv);

    let mut w = vec![0.0; n];
    let mut prev = f64::NAN;
    for it in 1..=max_iters {
        l.matrix.matvec_into(Exec::default(), &v, &mut w);
        let rq = dot(&v, &w);
        let nw = norm(&w);
        if nw == 0.0 {
            return Ok(fallback);
        }
        if (rq - prev).abs() < tol {
            if rq <= 1e-12 {
                return Ok(fallback);
            }
            return Ok(LambdaMaxEstimate {
                value: rq * LAMBDA_MAX_MARGIN,
                source: LambdaMaxSource::PowerIteration,
                iterations: it,
            });
        }
        prev = rq;
        for (vi, wi) in v.iter_mut().zip(&w) {
            *vi = wi / nw;
        }
    }
    Ok(LambdaMaxEstimate {
        value: l.matrix.gershgorin_bound(),
        source: LambdaMaxSource::Gershgorin,
        iterations: max_iters,
    })
}

/// [`estimate_lambda_max`] with the default cap, tolerance and seed 0.
pub fn estimate_lambda_max_default(l: &Laplacian) -> LambdaMaxEstimate {
    estimate_lambda_max(l, DEFAULT_POWER_ITERS, DEFAULT_POWER_TOL, 0).expect("default parameters are valid")
}

/// `L̃ = (2 / λ_max) L − I`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledLaplacian {
    pub matrix: SymSparse,
    pub lambda_max: f64,
}

impl ScaledLaplacian {
    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }
}

pub fn scale_laplacian(l: &Laplacian, lambda_max: f64) -> Result<ScaledLaplacian> {
    if !(lambda_max > 0.0) || !lambda_max.is_finite() {
        return Err(invalid(format!("lambda_max must be positive, got {lambda_max}")));
    }
    Ok(ScaledLaplacian {
        matrix: l.matrix.affine(2.0 / lambda_max, -1.0),
        lambda_max,
    })
}
