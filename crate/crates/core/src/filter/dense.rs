use super::response::{response_values, SpectralResponse};
use crate::error::{check_len, Result};
use crate::graph::SpectralBasis;
use crate::signal::{BeliefVector, Domain};

/// Exact functional calculus `y = U h(Λ) Uᵀ x`.
pub fn dense_filter_apply(basis: &SpectralBasis, r: &dyn SpectralResponse, x: &BeliefVector) -> Result<BeliefVector> {
    check_len(basis.dim(), x.len())?;
    x.expect_domain(Domain::Vertex)?;
    let h = response_values(r, &basis.eigenvalues);
    Ok(BeliefVector::from_parts(basis.filter_with(&h, x.as_slice()), Domain::Vertex))
}
