//! Truncated Chebyshev series filters and their sparse evaluation.

use std::f64::consts::PI;

use super::response::SpectralResponse;
use crate::error::{check_len, invalid, Error, Result};
use crate::exec::Exec;
use crate::graph::ScaledLaplacian;
use crate::signal::{BeliefVector, Domain};

/// Number of uniform λ points used to report fit quality.
pub const FIT_GRID_POINTS: usize = 1000;

/// `h_θ(λ) = Σ_k θ_k T_k(2λ/λ_max − 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChebyshevFilter {
    theta: Vec<f64>,
    lambda_max: f64,
}

impl ChebyshevFilter {
    pub fn new(theta: Vec<f64>, lambda_max: f64) -> Result<Self> {
        if theta.is_empty() {
            return Err(invalid("a Chebyshev filter needs at least θ_0"));
        }
        if let Some(i) = theta.iter().position(|t| !t.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        if !(lambda_max > 0.0) || !lambda_max.is_finite() {
            return Err(invalid(format!("lambda_max must be positive, got {lambda_max}")));
        }
        Ok(Self { theta, lambda_max })
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn lambda_max(&self) -> f64 {
        self.lambda_max
    }

    /// Polynomial order `K`.
    pub fn order(&self) -> usize {
        self.theta.len() - 1
    }

    /// Same scaling, new coefficients.
    pub fn with_theta(&self, theta: Vec<f64>) -> Result<Self> {
        Self::new(theta, self.lambda_max)
    }

    /// Same coefficients on a different spectral scale.
    pub fn with_lambda_max(&self, lambda_max: f64) -> Result<Self> {
        Self::new(self.theta.clone(), lambda_max)
    }

    /// First `k + 1` coefficients (or all of them if the filter is shorter).
    pub fn truncated(&self, k: usize) -> Self {
        Self {
            theta: self.theta[..(k + 1).min(self.theta.len())].to_vec(),
            lambda_max: self.lambda_max,
        }
    }

    pub fn coefficient_l1(&self) -> f64 {
        self.theta.iter().map(|t| t.abs()).sum()
    }

    /// Series value at a point of the rescaled axis, by Clenshaw summation.
    pub fn eval_scaled(&self, z: f64) -> f64 {
        let mut b1 = 0.0;
        let mut b2 = 0.0;
        for &c in self.theta[1..].iter().rev() {
            let b0 = 2.0 * z * b1 - b2 + c;
            b2 = b1;
            b1 = b0;
        }
        self.theta[0] + z * b1 - b2
    }

    pub(crate) fn check_operator(&self, lt: &ScaledLaplacian) -> Result<()> {
        let rel = (self.lambda_max - lt.lambda_max).abs() / self.lambda_max.max(lt.lambda_max);
        if rel > 1e-9 {
            return Err(Error::LambdaMaxMismatch {
                filter: self.lambda_max,
                operator: lt.lambda_max,
            });
        }
        Ok(())
    }
}

impl SpectralResponse for ChebyshevFilter {
    fn eval(&self, lambda: f64) -> f64 {
        self.eval_scaled(2.0 * lambda / self.lambda_max - 1.0)
    }
}

/// `T_0(z), …, T_K(z)`.
pub fn chebyshev_values(z: f64, order: usize) -> Vec<f64> {
    let mut t = Vec::with_capacity(order + 1);
    t.push(1.0);
    if order >= 1 {
        t.push(z);
    }
    for k in 2..=order {
        let next = 2.0 * z * t[k - 1] - t[k - 2];
        t.push(next);
    }
    t
}

/// The vectors `b_k = T_k(L̃) x` kept from a forward pass.
#[derive(Debug, Clone, PartialEq)]
pub struct RecurrenceTrace {
    pub basis_vectors: Vec<Vec<f64>>,
}

impl RecurrenceTrace {
    pub fn order(&self) -> usize {
        self.basis_vectors.len() - 1
    }

    pub fn dim(&self) -> usize {
        self.basis_vectors[0].len()
    }
}

/// Evaluate `y = Σ_k θ_k T_k(L̃) x` with the three-term recurrence.
///
/// Without a trace only three length-N vectors are live.
pub fn cheb_apply(
    f: &ChebyshevFilter,
    lt: &ScaledLaplacian,
    x: &BeliefVector,
    keep_trace: bool,
) -> Result<(BeliefVector, Option<RecurrenceTrace>)> {
    cheb_apply_with(Exec::default(), f, lt, x, keep_trace)
}

pub fn cheb_apply_with(
    exec: Exec,
    f: &ChebyshevFilter,
    lt: &ScaledLaplacian,
    x: &BeliefVector,
    keep_trace: bool,
) -> Result<(BeliefVector, Option<RecurrenceTrace>)> {
    check_len(lt.dim(), x.len())?;
    x.expect_domain(Domain::Vertex)?;
    f.check_operator(lt)?;
    let (y, trace) = recurrence(exec, f.theta(), lt, x.as_slice(), keep_trace);
    Ok((BeliefVector::from_parts(y, Domain::Vertex), trace))
}

pub(crate) fn recurrence(
    exec: Exec,
    theta: &[f64],
    lt: &ScaledLaplacian,
    x: &[f64],
    keep_trace: bool,
) -> (Vec<f64>, Option<RecurrenceTrace>) {
    let n = x.len();
    let order = theta.len() - 1;
    let mut y: Vec<f64> = x.iter().map(|v| theta[0] * v).collect();
    let mut trace = keep_trace.then(|| vec![x.to_vec()]);
    if order == 0 {
        return (y, trace.map(|basis_vectors| RecurrenceTrace { basis_vectors }));
    }

    let mut prev = x.to_vec();
    let mut cur = vec![0.0; n];
    lt.matrix.matvec_into(exec, &prev, &mut cur);
    let mut next = vec![0.0; n];
    for (yi, ci) in y.iter_mut().zip(&cur) {
        *yi += theta[1] * ci;
    }
    if let Some(t) = trace.as_mut() {
        t.push(cur.clone());
    }
    for &th in &theta[2..] {
        lt.matrix.matvec_into(exec, &cur, &mut next);
        for ((nx, pv), yi) in next.iter_mut().zip(&prev).zip(y.iter_mut()) {
            *nx = 2.0 * *nx - pv;
            *yi += th * *nx;
        }
        if let Some(t) = trace.as_mut() {
            t.push(next.clone());
        }
        std::mem::swap(&mut prev, &mut cur);
        std::mem::swap(&mut cur, &mut next);
    }
    (y, trace.map(|basis_vectors| RecurrenceTrace { basis_vectors }))
}

/// Default quadrature size for a given order: `max(64, 4(K+1))`.
pub fn default_quadrature_nodes(order: usize) -> usize {
    64.max(4 * (order + 1))
}

/// Chebyshev–Gauss projection of `r` onto `T_0..T_K` over `[0, λ_max]`.
///
/// With nodes `z_j = cos(π(j + ½)/M)`,
/// `θ_k = (2 − δ_k0)/M · Σ_j r(λ(z_j)) T_k(z_j)` and `λ(z) = λ_max (z + 1)/2`.
pub fn fit_chebyshev(
    r: &dyn SpectralResponse,
    order: usize,
    lambda_max: f64,
    quadrature_nodes: usize,
) -> Result<ChebyshevFilter> {
    if quadrature_nodes < order + 1 {
        return Err(invalid(format!(
            "need at least K+1 = {} quadrature nodes, got {quadrature_nodes}",
            order + 1
        )));
    }
    if !(lambda_max > 0.0) {
        return Err(invalid(format!("lambda_max must be positive, got {lambda_max}")));
    }
    let m = quadrature_nodes;
    let mut theta = vec![0.0; order + 1];
    for j in 0..m {
        let angle = PI * (j as f64 + 0.5) / m as f64;
        let z = angle.cos();
        let val = r.eval(lambda_max * (z + 1.0) / 2.0);
        // T_k(cos a) = cos(k a) keeps each node value exact to rounding.
        for (k, t) in theta.iter_mut().enumerate() {
            *t += val * (k as f64 * angle).cos();
        }
    }
    for (k, t) in theta.iter_mut().enumerate() {
        *t *= if k == 0 { 1.0 } else { 2.0 } / m as f64;
    }
    ChebyshevFilter::new(theta, lambda_max)
}

/// Max |f(λ) − r(λ)| over `points` uniform λ in `[0, λ_max]`.
pub fn max_grid_error(f: &ChebyshevFilter, r: &dyn SpectralResponse, points: usize) -> f64 {
    let lm = f.lambda_max();
    (0..points)
        .map(|i| {
            let lambda = lm * i as f64 / (points - 1).max(1) as f64;
            (f.eval(lambda) - r.eval(lambda)).abs()
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filter::AnalyticResponse;
    use crate::graph::{build_laplacian, scale_laplacian, Graph, LaplacianKind, WeightSign};

    fn p2_scaled() -> ScaledLaplacian {
        let g = Graph::new(2, [(0, 1, 1.0)], WeightSign::Unsigned).unwrap();
        let l = build_laplacian(&g, LaplacianKind::Combinatorial).unwrap();
        scale_laplacian(&l, 2.0).unwrap()
    }

    #[test]
    fn t0_is_identity_t1_is_operator() {
        let lt = p2_scaled();
        let x = BeliefVector::vertex(vec![0.3, -1.2]).unwrap();
        let f0 = ChebyshevFilter::new(vec![1.0, 0.0, 0.0], 2.0).unwrap();
        assert_eq!(cheb_apply(&f0, &lt, &x, false).unwrap().0, x);
        let f1 = ChebyshevFilter::new(vec![0.0, 1.0, 0.0, 0.0], 2.0).unwrap();
        let (y, _) = cheb_apply(&f1, &lt, &x, false).unwrap();
        assert_eq!(y.as_slice(), &[1.2, -0.3]);
    }

    #[test]
    fn trace_follows_recurrence() {
        let lt = p2_scaled();
        let x = BeliefVector::vertex(vec![1.0, 0.25]).unwrap();
        let f = ChebyshevFilter::new(vec![0.5, -0.1, 0.2, 0.3], 2.0).unwrap();
        let (_, trace) = cheb_apply(&f, &lt, &x, true).unwrap();
        let b = trace.unwrap().basis_vectors;
        assert_eq!(b.len(), 4);
        assert_eq!(b[0], x.as_slice());
        assert_eq!(b[1], lt.matrix.matvec(&b[0]));
        for k in 1..3 {
            let lb = lt.matrix.matvec(&b[k]);
            for i in 0..2 {
                assert!((b[k + 1][i] - (2.0 * lb[i] - b[k - 1][i])).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn errors() {
        let lt = p2_scaled();
        let x = BeliefVector::vertex(vec![1.0, 0.0, 0.0]).unwrap();
        let f = ChebyshevFilter::new(vec![1.0], 2.0).unwrap();
        assert!(matches!(cheb_apply(&f, &lt, &x, false), Err(Error::DimensionMismatch { .. })));
        let x = BeliefVector::vertex(vec![1.0, 0.0]).unwrap();
        let g = ChebyshevFilter::new(vec![1.0], 2.5).unwrap();
        assert!(matches!(cheb_apply(&g, &lt, &x, false), Err(Error::LambdaMaxMismatch { .. })));
        assert!(ChebyshevFilter::new(vec![], 1.0).is_err());
        assert!(ChebyshevFilter::new(vec![f64::NAN], 1.0).is_err());
        assert!(ChebyshevFilter::new(vec![1.0], 0.0).is_err());
        let spectral = BeliefVector::spectral(vec![1.0, 0.0]).unwrap();
        assert!(cheb_apply(&f, &lt, &spectral, false).is_err());
    }

    #[test]
    fn fit_identity_and_t1() {
        for k in [0, 1, 5, 16] {
            let f = fit_chebyshev(&AnalyticResponse::Identity, k, 3.0, default_quadrature_nodes(k)).unwrap();
            assert!((f.theta()[0] - 1.0).abs() < 1e-12);
            assert!(f.theta()[1..].iter().all(|t| t.abs() < 1e-12));
        }
        // λ̃ = 2λ/λ_max − 1 written in powers of λ.
        let lm = 2.5;
        let t1 = AnalyticResponse::Polynomial { coeffs: vec![-1.0, 2.0 / lm] };
        let f = fit_chebyshev(&t1, 4, lm, 64).unwrap();
        assert!((f.theta()[1] - 1.0).abs() < 1e-12);
        for (k, t) in f.theta().iter().enumerate() {
            if k != 1 {
                assert!(t.abs() < 1e-12, "θ_{k} = {t}");
            }
        }
        assert!(fit_chebyshev(&t1, 4, lm, 4).is_err());
    }

    #[test]
    fn fit_diffusion_accuracy() {
        let r = AnalyticResponse::Diffusion { tau: 1.0 };
        let f = fit_chebyshev(&r, 16, 2.0, 64).unwrap();
        assert!(max_grid_error(&f, &r, FIT_GRID_POINTS) <= 1e-6);
    }

    #[test]
    fn clenshaw_matches_explicit_sum() {
        let f = ChebyshevFilter::new(vec![0.3, -0.7, 0.2, 1.1, -0.4], 4.0).unwrap();
        for z in [-1.0, -0.3, 0.0, 0.77, 1.0] {
            let t = chebyshev_values(z, 4);
            let direct: f64 = t.iter().zip(f.theta()).map(|(a, b)| a * b).sum();
            assert!((f.eval_scaled(z) - direct).abs() < 1e-14);
        }
    }
}
