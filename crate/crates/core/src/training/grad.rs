use nalgebra::DMatrix;

use crate::error::{check_len, invalid, Result};
use crate::filter::{ChebyshevFilter, RecurrenceTrace};
use crate::graph::ScaledLaplacian;
use crate::signal::{axpy, dot, BeliefVector, Domain};

/// `∂𝓛/∂θ_k = ⟨∂𝓛/∂y, b_k⟩`.
pub fn grad_theta(dldy: &BeliefVector, trace: &RecurrenceTrace) -> Result<Vec<f64>> {
    dldy.expect_domain(Domain::Vertex)?;
    check_trace(dldy, trace)?;
    Ok(trace.basis_vectors.iter().map(|b| dot(dldy.as_slice(), b)).collect())
}

fn check_trace(dldy: &BeliefVector, trace: &RecurrenceTrace) -> Result<()> {
    if trace.basis_vectors.is_empty() {
        return Err(invalid("empty recurrence trace"));
    }
    check_len(trace.dim(), dldy.len())
}

/// Reverse-mode gradient of `𝓛` with respect to the entries of `L̃`.
///
/// Adjoints `b̄_k` start at `θ_k ∂𝓛/∂y` and are pushed down the recurrence:
/// step `k ≥ 2` contributes `2 b̄_k b_{k−1}ᵀ` to the gradient, adds
/// `2 L̃ b̄_k` to `b̄_{k−1}` and subtracts `b̄_k` from `b̄_{k−2}`; step 1
/// contributes `b̄_1 b_0ᵀ`. The result is symmetrized, so entry `(i, j)` is
/// the derivative along `(E_ij + E_ji)/2`. `λ_max` is held fixed; the chain
/// to `L` is the scalar `2/λ_max`.
pub fn grad_scaled_laplacian(
    dldy: &BeliefVector,
    trace: &RecurrenceTrace,
    f: &ChebyshevFilter,
    lt: &ScaledLaplacian,
) -> Result<DMatrix<f64>> {
    dldy.expect_domain(Domain::Vertex)?;
    check_trace(dldy, trace)?;
    check_len(lt.dim(), dldy.len())?;
    let theta = f.theta();
    check_len(theta.len(), trace.basis_vectors.len())?;
    Ok(scaled_laplacian_adjoint(dldy.as_slice(), &trace.basis_vectors, theta, lt))
}

pub(crate) fn scaled_laplacian_adjoint(g: &[f64], b: &[Vec<f64>], theta: &[f64], lt: &ScaledLaplacian) -> DMatrix<f64> {
    let n = g.len();
    let order = theta.len() - 1;
    let mut m = DMatrix::zeros(n, n);
    if order == 0 {
        return m;
    }
    let mut adj: Vec<Vec<f64>> = theta.iter().map(|t| g.iter().map(|v| t * v).collect()).collect();
    for k in (2..=order).rev() {
        let bk = std::mem::take(&mut adj[k]);
        rank_one(&mut m, 2.0, &bk, &b[k - 1]);
        let pushed = lt.matrix.matvec(&bk);
        axpy(2.0, &pushed, &mut adj[k - 1]);
        axpy(-1.0, &bk, &mut adj[k - 2]);
    }
    rank_one(&mut m, 1.0, &adj[1], &b[0]);
    (&m + m.transpose()) * 0.5
}

/// `m += scale · u vᵀ`.
fn rank_one(m: &mut DMatrix<f64>, scale: f64, u: &[f64], v: &[f64]) {
    for (j, &vj) in v.iter().enumerate() {
        let s = scale * vj;
        if s != 0.0 {
            for (i, &ui) in u.iter().enumerate() {
                m[(i, j)] += ui * s;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filter::cheb_apply;
    use crate::graph::{build_laplacian, scale_laplacian, Graph, LaplacianKind, WeightSign};

    fn p3() -> ScaledLaplacian {
        let g = Graph::new(3, [(0, 1, 1.0), (1, 2, 2.0)], WeightSign::Unsigned).unwrap();
        scale_laplacian(&build_laplacian(&g, LaplacianKind::Combinatorial).unwrap(), 6.5).unwrap()
    }

    #[test]
    fn order_zero_has_no_laplacian_gradient() {
        let lt = p3();
        let f = ChebyshevFilter::new(vec![0.7], 6.5).unwrap();
        let x = BeliefVector::vertex(vec![1.0, -1.0, 2.0]).unwrap();
        let (_, tr) = cheb_apply(&f, &lt, &x, true).unwrap();
        let g = BeliefVector::vertex(vec![0.3, 0.2, -0.1]).unwrap();
        assert!(grad_scaled_laplacian(&g, &tr.unwrap(), &f, &lt).unwrap().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn order_one_is_sym_outer_product() {
        let lt = p3();
        let f = ChebyshevFilter::new(vec![0.0, 1.0], 6.5).unwrap();
        let x = [1.0, -1.0, 2.0];
        let (_, tr) = cheb_apply(&f, &lt, &BeliefVector::vertex(x.to_vec()).unwrap(), true).unwrap();
        let g = [0.3, 0.2, -0.1];
        let gm = grad_scaled_laplacian(&BeliefVector::vertex(g.to_vec()).unwrap(), &tr.unwrap(), &f, &lt).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert!((gm[(i, j)] - 0.5 * (g[i] * x[j] + g[j] * x[i])).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn zero_upstream_gradient() {
        let lt = p3();
        let f = ChebyshevFilter::new(vec![0.5, 0.1, -0.3], 6.5).unwrap();
        let (_, tr) = cheb_apply(&f, &lt, &BeliefVector::vertex(vec![1.0, 2.0, 3.0]).unwrap(), true).unwrap();
        assert_eq!(grad_theta(&BeliefVector::zeros(3, Domain::Vertex), tr.as_ref().unwrap()).unwrap(), vec![0.0; 3]);
    }

    #[test]
    fn theta_gradient_of_linear_functional() {
        // 𝓛 = ⟨c, y⟩ is linear in θ, so the gradient is exact: ⟨c, b_k⟩.
        let lt = p3();
        let x = BeliefVector::vertex(vec![1.0, 2.0, 3.0]).unwrap();
        let c = BeliefVector::vertex(vec![0.5, -1.0, 0.25]).unwrap();
        let f = ChebyshevFilter::new(vec![0.2, 0.4, -0.1, 0.3], 6.5).unwrap();
        let (_, tr) = cheb_apply(&f, &lt, &x, true).unwrap();
        let g = grad_theta(&c, &tr.unwrap()).unwrap();
        for k in 0..4 {
            let mut e = vec![0.0; 4];
            e[k] = 1.0;
            let (yk, _) = cheb_apply(&f.with_theta(e).unwrap(), &lt, &x, false).unwrap();
            assert!((g[k] - dot(c.as_slice(), yk.as_slice())).abs() < 1e-13);
        }
    }
}
