use crate::error::{check_len, invalid, Result};
use crate::graph::SpectralBasis;
use crate::signal::{BeliefVector, Domain};

/// Points on the common normalized-frequency grid `λ / λ_max ∈ [0, 1]`.
pub const TRANSFER_GRID: usize = 64;

/// `‖x̂_src − x̂_tgt‖²` on equal-length spectral vectors.
pub fn cospectral_loss(x_src_hat: &BeliefVector, x_tgt_hat: &BeliefVector) -> Result<f64> {
    x_src_hat.expect_domain(Domain::Spectral)?;
    x_tgt_hat.expect_domain(Domain::Spectral)?;
    check_len(x_src_hat.len(), x_tgt_hat.len())?;
    Ok(x_src_hat
        .as_slice()
        .iter()
        .zip(x_tgt_hat.as_slice())
        .map(|(a, b)| (a - b) * (a - b))
        .sum())
}

/// Spectral coefficients moved onto `points` normalized-frequency bins.
///
/// Each coefficient's energy goes to the bin nearest `λ_i / λ_max`; a bin
/// holds the root of its accumulated energy, so total energy is preserved.
pub fn resample_spectrum(eigenvalues: &[f64], coeffs: &[f64], lambda_max: f64, points: usize) -> Result<BeliefVector> {
    check_len(eigenvalues.len(), coeffs.len())?;
    if points < 2 || !(lambda_max > 0.0) {
        return Err(invalid("resampling needs at least two points and lambda_max > 0"));
    }
    let last = (points - 1) as f64;
    let mut energy = vec![0.0; points];
    for (&l, &c) in eigenvalues.iter().zip(coeffs) {
        let k = ((l / lambda_max).clamp(0.0, 1.0) * last).round() as usize;
        energy[k] += c * c;
    }
    Ok(BeliefVector::from_parts(energy.into_iter().map(f64::sqrt).collect(), Domain::Spectral))
}

/// Transfer loss between signals on possibly different graphs.
///
/// Equal sizes compare coefficients directly; otherwise both spectra are
/// resampled onto [`TRANSFER_GRID`] bins first.
pub fn cospectral_loss_across(
    src: &SpectralBasis,
    x_src: &BeliefVector,
    tgt: &SpectralBasis,
    x_tgt: &BeliefVector,
) -> Result<f64> {
    x_src.expect_domain(Domain::Vertex)?;
    x_tgt.expect_domain(Domain::Vertex)?;
    check_len(src.dim(), x_src.len())?;
    check_len(tgt.dim(), x_tgt.len())?;
    let a = src.forward(x_src.as_slice());
    let b = tgt.forward(x_tgt.as_slice());
    if src.dim() == tgt.dim() {
        return cospectral_loss(&BeliefVector::from_parts(a, Domain::Spectral), &BeliefVector::from_parts(b, Domain::Spectral));
    }
    let ra = resample_spectrum(&src.eigenvalues, &a, src.lambda_max().max(f64::MIN_POSITIVE), TRANSFER_GRID)?;
    let rb = resample_spectrum(&tgt.eigenvalues, &b, tgt.lambda_max().max(f64::MIN_POSITIVE), TRANSFER_GRID)?;
    cospectral_loss(&ra, &rb)
}
