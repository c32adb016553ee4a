use std::cmp::Ordering;

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::Laplacian;
use crate::error::{check_len, Error, Result};
use crate::signal::{BeliefVector, Domain};

/// Largest graph for which the dense eigendecomposition is attempted.
pub const DEFAULT_ORACLE_CAP: usize = 2048;

/// Dense orthonormal eigenbasis `(U, Λ)` of a Laplacian.
///
/// Eigenvalues ascend. Each eigenvector's first entry with magnitude above
/// 1e-12 is positive; eigenvalues equal within `1e-9 (1 + |λ|_max)` are
/// ordered by descending lexicographic comparison of their sign-fixed
/// vectors, so the zero matrix yields `U = I`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralBasis {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: DMatrix<f64>,
}

impl SpectralBasis {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvector(&self, i: usize) -> Vec<f64> {
        self.eigenvectors.column(i).iter().copied().collect()
    }

    pub fn lambda_max(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }

    /// `Uᵀ x` on raw slices.
    pub fn forward(&self, x: &[f64]) -> Vec<f64> {
        let v = self.eigenvectors.tr_mul(&DVector::from_column_slice(x));
        v.iter().copied().collect()
    }

    /// `U x̂` on raw slices.
    pub fn inverse(&self, xh: &[f64]) -> Vec<f64> {
        let v = &self.eigenvectors * DVector::from_column_slice(xh);
        v.iter().copied().collect()
    }

    /// `U diag(h) Uᵀ x`.
    pub fn filter_with(&self, response: &[f64], x: &[f64]) -> Vec<f64> {
        let mut xh = self.forward(x);
        for (c, h) in xh.iter_mut().zip(response) {
            *c *= h;
        }
        self.inverse(&xh)
    }

    /// Dense `U diag(d) Uᵀ`.
    pub fn synthesize(&self, d: &[f64]) -> DMatrix<f64> {
        let scaled = DMatrix::from_fn(self.dim(), self.dim(), |i, j| self.eigenvectors[(i, j)] * d[j]);
        scaled * self.eigenvectors.transpose()
    }
}

pub fn eigendecompose(l: &Laplacian, cap: usize) -> Result<SpectralBasis> {
    let n = l.dim();
    if n > cap {
        return Err(Error::OracleUnavailable { n, cap });
    }
    let eig = SymmetricEigen::new(l.matrix.to_dense());
    let mut pairs: Vec<(f64, Vec<f64>)> = (0..n)
        .map(|k| {
            let mut v: Vec<f64> = eig.eigenvectors.column(k).iter().copied().collect();
            if let Some(first) = v.iter().find(|x| x.abs() > 1e-12) {
                if *first < 0.0 {
                    v.iter_mut().for_each(|x| *x = -*x);
                }
            }
            (eig.eigenvalues[k], v)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));

    let scale = 1.0 + pairs.iter().map(|p| p.0.abs()).fold(0.0, f64::max);
    let tie = 1e-9 * scale;
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && pairs[end].0 - pairs[end - 1].0 <= tie {
            end += 1;
        }
        pairs[start..end].sort_by(|a, b| lex_desc(&a.1, &b.1));
        start = end;
    }

    let eigenvalues = pairs.iter().map(|p| p.0).collect();
    let eigenvectors = DMatrix::from_fn(n, n, |i, j| pairs[j].1[i]);
    Ok(SpectralBasis {
        eigenvalues,
        eigenvectors,
    })
}

fn lex_desc(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match y.total_cmp(x) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    Ordering::Equal
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

/// Graph Fourier transform: forward `x̂ = Uᵀ x`, inverse `x = U x̂`.
pub fn gft(basis: &SpectralBasis, x: &BeliefVector, direction: Direction) -> Result<BeliefVector> {
    check_len(basis.dim(), x.len())?;
    let (from, to) = match direction {
        Direction::Forward => (Domain::Vertex, Domain::Spectral),
        Direction::Inverse => (Domain::Spectral, Domain::Vertex),
    };
    x.expect_domain(from)?;
    let out = match direction {
        Direction::Forward => basis.forward(x.as_slice()),
        Direction::Inverse => basis.inverse(x.as_slice()),
    };
    Ok(BeliefVector::from_parts(out, to))
}
