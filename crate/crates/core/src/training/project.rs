use nalgebra::DMatrix;

use crate::error::{invalid, Result};
use crate::graph::{Laplacian, SymSparse};

/// Nearest-structure combinatorial Laplacian for a learned candidate.
///
/// The candidate is symmetrized by averaging, positive off-diagonals are set
/// to zero and each diagonal entry becomes the negated off-diagonal row sum,
/// so the result satisfies `L 1 = 0`, off-diagonals `≤ 0` and `L ⪰ 0`.
/// Idempotent.
pub fn project_laplacian(candidate: &DMatrix<f64>) -> Result<Laplacian> {
    let n = candidate.nrows();
    if n == 0 || candidate.ncols() != n {
        return Err(invalid(format!(
            "candidate must be a non-empty square matrix, got {}x{}",
            n,
            candidate.ncols()
        )));
    }
    if let Some(v) = candidate.iter().find(|v| !v.is_finite()) {
        return Err(invalid(format!("candidate has non-finite entry {v}")));
    }
    let mut off = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let v = (0.5 * (candidate[(i, j)] + candidate[(j, i)])).min(0.0);
            off[(i, j)] = v;
            off[(j, i)] = v;
        }
    }
    let diag: Vec<f64> = (0..n)
        .map(|i| -(0..n).filter(|&j| j != i).map(|j| off[(i, j)]).sum::<f64>())
        .collect();
    let mut upper = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if off[(i, j)] != 0.0 {
                upper.push((i, j, off[(i, j)]));
            }
        }
    }
    Ok(Laplacian::from_combinatorial(SymSparse::new(n, diag, upper)))
}
