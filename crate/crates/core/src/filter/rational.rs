//! Exact diffusion filtering `(I + τL)⁻¹ x` by conjugate gradients.

use crate::error::{check_len, invalid, Error, Result};
use crate::graph::Laplacian;
use crate::signal::{axpy, dot, norm, BeliefVector, Domain};

pub const DEFAULT_CG_TOL: f64 = 1e-10;

/// Solve `(I + τL) y = x` to relative residual `tol`.
///
/// `max_iters = None` uses `10 N`.
pub fn rational_apply(
    tau: f64,
    l: &Laplacian,
    x: &BeliefVector,
    tol: f64,
    max_iters: Option<usize>,
) -> Result<BeliefVector> {
    if !(tau > 0.0) || !tau.is_finite() {
        return Err(invalid(format!("tau must be positive, got {tau}")));
    }
    if !(tol > 0.0) {
        return Err(invalid("tol must be positive"));
    }
    check_len(l.dim(), x.len())?;
    x.expect_domain(Domain::Vertex)?;
    let n = l.dim();
    let max_iters = max_iters.unwrap_or(10 * n).max(1);
    let b = x.as_slice();
    let apply = |v: &[f64]| -> Vec<f64> {
        let mut out = l.matrix.matvec(v);
        for (o, vi) in out.iter_mut().zip(v) {
            *o = vi + tau * *o;
        }
        out
    };

    let bnorm = norm(b);
    if bnorm == 0.0 {
        return Ok(BeliefVector::zeros(n, Domain::Vertex));
    }
    let mut y = vec![0.0; n];
    let mut r = b.to_vec();
    let mut p = r.clone();
    let mut rr = dot(&r, &r);
    for _ in 0..max_iters {
        if rr.sqrt() <= tol * bnorm {
            return Ok(BeliefVector::from_parts(y, Domain::Vertex));
        }
        let ap = apply(&p);
        let alpha = rr / dot(&p, &ap);
        axpy(alpha, &p, &mut y);
        axpy(-alpha, &ap, &mut r);
        let rr_new = dot(&r, &r);
        let beta = rr_new / rr;
        for (pi, ri) in p.iter_mut().zip(&r) {
            *pi = ri + beta * *pi;
        }
        rr = rr_new;
    }
    // The recursive residual can drift; confirm with the true one.
    let ay = apply(&y);
    let res = norm(&b.iter().zip(&ay).map(|(bi, ai)| bi - ai).collect::<Vec<_>>()) / bnorm;
    if res <= tol {
        Ok(BeliefVector::from_parts(y, Domain::Vertex))
    } else {
        Err(Error::NoConvergence {
            iters: max_iters,
            residual: res,
        })
    }
}
