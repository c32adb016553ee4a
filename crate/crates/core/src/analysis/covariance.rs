use nalgebra::DMatrix;

use crate::error::{check_len, invalid, Result};
use crate::filter::chebyshev_values;
use crate::graph::SpectralBasis;
use crate::signal::{BeliefVector, Domain};

/// Output covariance `Σ_y = U diag(Var[h(λ_i)] x̂_i²) Uᵀ`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralCovariance {
    pub variances: Vec<f64>,
    pub diagonal_spectral: Vec<f64>,
    pub vertex_matrix: Option<DMatrix<f64>>,
}

impl SpectralCovariance {
    pub fn trace(&self) -> f64 {
        self.diagonal_spectral.iter().sum()
    }
}

pub fn spectral_covariance(
    basis: &SpectralBasis,
    variances: &[f64],
    x: &BeliefVector,
    materialize: bool,
) -> Result<SpectralCovariance> {
    check_len(basis.dim(), variances.len())?;
    check_len(basis.dim(), x.len())?;
    x.expect_domain(Domain::Vertex)?;
    if let Some((i, v)) = variances.iter().enumerate().find(|(_, v)| !(**v >= 0.0) || !v.is_finite()) {
        return Err(invalid(format!("variance {i} must be finite and non-negative, got {v}")));
    }
    let xh = basis.forward(x.as_slice());
    let diagonal_spectral: Vec<f64> = variances.iter().zip(&xh).map(|(v, c)| v * c * c).collect();
    let vertex_matrix = materialize.then(|| basis.synthesize(&diagonal_spectral));
    Ok(SpectralCovariance {
        variances: variances.to_vec(),
        diagonal_spectral,
        vertex_matrix,
    })
}

/// `Var[h(λ_i)] = Σ_k var(θ_k) T_k(λ̃_i)²` for independent coefficients.
pub fn response_variance(theta_var: &[f64], lambda_max: f64, eigenvalues: &[f64]) -> Result<Vec<f64>> {
    if theta_var.is_empty() || !(lambda_max > 0.0) {
        return Err(invalid("response variance needs coefficients and lambda_max > 0"));
    }
    if theta_var.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
        return Err(invalid("coefficient variances must be finite and non-negative"));
    }
    let order = theta_var.len() - 1;
    Ok(eigenvalues
        .iter()
        .map(|&l| {
            let t = chebyshev_values(2.0 * l / lambda_max - 1.0, order);
            theta_var.iter().zip(&t).map(|(v, tk)| v * tk * tk).sum()
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_laplacian, eigendecompose, Graph, LaplacianKind, WeightSign};

    fn basis() -> SpectralBasis {
        let g = Graph::new(4, [(0, 1, 1.0), (1, 2, 2.0), (2, 3, 1.0), (0, 3, 0.5)], WeightSign::Unsigned).unwrap();
        eigendecompose(&build_laplacian(&g, LaplacianKind::Combinatorial).unwrap(), 64).unwrap()
    }

    #[test]
    fn zero_variance() {
        let b = basis();
        let x = BeliefVector::vertex(vec![1.0, -2.0, 0.5, 3.0]).unwrap();
        let c = spectral_covariance(&b, &[0.0; 4], &x, true).unwrap();
        assert_eq!(c.trace(), 0.0);
        assert!(c.vertex_matrix.unwrap().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn single_mode() {
        let b = basis();
        let u0 = b.eigenvector(0);
        let x = BeliefVector::vertex(u0.clone()).unwrap();
        let c = spectral_covariance(&b, &[1.0, 0.0, 0.0, 0.0], &x, true).unwrap();
        let m = c.vertex_matrix.unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert!((m[(i, j)] - u0[i] * u0[j]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn negative_variance_rejected() {
        let b = basis();
        let x = BeliefVector::vertex(vec![1.0; 4]).unwrap();
        assert!(spectral_covariance(&b, &[1.0, -0.1, 0.0, 0.0], &x, false).is_err());
    }

    #[test]
    fn variance_propagation() {
        // T_0 = 1, T_1(z) = z; at λ = λ_max, z = 1.
        let v = response_variance(&[0.5, 2.0], 4.0, &[0.0, 2.0, 4.0]).unwrap();
        assert_eq!(v, vec![2.5, 0.5, 2.5]);
    }
}
