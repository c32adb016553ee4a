use std::collections::BTreeSet;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::BandPartition;
use crate::error::{check_len, invalid, Error, Result};
use crate::graph::SpectralBasis;
use crate::signal::{axpy, norm, BeliefVector, Domain};

fn band_members(basis: &SpectralBasis, partition: &BandPartition, band: usize) -> Result<Vec<usize>> {
    partition.check_band(band)?;
    let bands = partition.assign(&basis.eigenvalues)?;
    Ok((0..bands.len()).filter(|&i| bands[i] == band).collect())
}

/// Adds seeded Gaussian spectral noise of norm `magnitude` inside one band.
///
/// The perturbation is synthesized as `U δ` and added to `x`, so
/// coefficients outside the band move only by round-off.
pub fn spectral_perturb(
    basis: &SpectralBasis,
    x: &BeliefVector,
    band: usize,
    magnitude: f64,
    partition: &BandPartition,
    seed: u64,
) -> Result<BeliefVector> {
    check_len(basis.dim(), x.len())?;
    x.expect_domain(Domain::Vertex)?;
    if !(magnitude >= 0.0) || !magnitude.is_finite() {
        return Err(invalid(format!("magnitude must be finite and non-negative, got {magnitude}")));
    }
    let members = band_members(basis, partition, band)?;
    if members.is_empty() {
        return Err(Error::EmptyBand(band));
    }
    if magnitude == 0.0 {
        return Ok(x.clone());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut noise: Vec<f64> = members.iter().map(|_| StandardNormal.sample(&mut rng)).collect();
    let len = norm(&noise);
    if len == 0.0 {
        noise[0] = 1.0;
    } else {
        noise.iter_mut().for_each(|v| *v *= magnitude / len);
    }
    let mut delta = vec![0.0; basis.dim()];
    for (&i, v) in members.iter().zip(&noise) {
        delta[i] = *v;
    }
    let mut out = x.as_slice().to_vec();
    axpy(1.0, &basis.inverse(&delta), &mut out);
    Ok(BeliefVector::from_parts(out, Domain::Vertex))
}

/// Scales the spectral coefficients of each edited band by its gain.
pub fn spectral_edit(
    basis: &SpectralBasis,
    x: &BeliefVector,
    edits: &[(usize, f64)],
    partition: &BandPartition,
) -> Result<BeliefVector> {
    check_len(basis.dim(), x.len())?;
    x.expect_domain(Domain::Vertex)?;
    let mut seen = BTreeSet::new();
    for &(band, gain) in edits {
        partition.check_band(band)?;
        if !gain.is_finite() {
            return Err(invalid(format!("gain for band {band} must be finite")));
        }
        if !seen.insert(band) {
            return Err(invalid(format!("band {band} edited more than once")));
        }
    }
    let bands = partition.assign(&basis.eigenvalues)?;
    let mut gain = vec![1.0; partition.band_count()];
    for &(b, g) in edits {
        gain[b] = g;
    }
    let xh = basis.forward(x.as_slice());
    let delta: Vec<f64> = xh.iter().zip(&bands).map(|(c, &b)| (gain[b] - 1.0) * c).collect();
    let mut out = x.as_slice().to_vec();
    if delta.iter().any(|d| *d != 0.0) {
        axpy(1.0, &basis.inverse(&delta), &mut out);
    }
    Ok(BeliefVector::from_parts(out, Domain::Vertex))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::band_energy;
    use crate::graph::{build_laplacian, eigendecompose, Graph, LaplacianKind, WeightSign};

    fn cycle(n: usize) -> SpectralBasis {
        let g = Graph::new(n, (0..n).map(|i| (i, (i + 1) % n, 1.0)), WeightSign::Unsigned).unwrap();
        eigendecompose(&build_laplacian(&g, LaplacianKind::Combinatorial).unwrap(), 64).unwrap()
    }

    fn signal(n: usize) -> BeliefVector {
        BeliefVector::vertex((0..n).map(|i| ((i * 7 % 5) as f64 - 2.0) * 0.3 + 0.1).collect()).unwrap()
    }

    #[test]
    fn perturb_touches_one_band() {
        let b = cycle(9);
        let p = BandPartition::three_band(b.lambda_max()).unwrap();
        let x = signal(9);
        let y = spectral_perturb(&b, &x, 2, 0.7, &p, 11).unwrap();
        let diff: Vec<f64> = (0..9).map(|i| y[i] - x[i]).collect();
        assert!((norm(&diff) - 0.7).abs() < 1e-10);
        let before = band_energy(&b, &x, &p).unwrap();
        let after = band_energy(&b, &y, &p).unwrap();
        for k in 0..2 {
            assert!((before.energies[k] - after.energies[k]).abs() < 1e-12);
        }
        assert_eq!(spectral_perturb(&b, &x, 1, 0.0, &p, 11).unwrap(), x);
        assert_eq!(spectral_perturb(&b, &x, 2, 0.7, &p, 11).unwrap(), y);
    }

    #[test]
    fn empty_band_named() {
        let b = cycle(4);
        // Spectrum {0, 2, 2, 4}: nothing in [0.5, 1.0).
        let p = BandPartition::new(vec![0.0, 0.5, 1.0, b.lambda_max()]).unwrap();
        assert!(matches!(spectral_perturb(&b, &signal(4), 1, 1.0, &p, 0), Err(Error::EmptyBand(1))));
    }

    #[test]
    fn edits() {
        let b = cycle(8);
        let p = BandPartition::three_band(b.lambda_max()).unwrap();
        let x = signal(8);
        assert_eq!(spectral_edit(&b, &x, &[(0, 1.0), (2, 1.0)], &p).unwrap(), x);
        let c = BeliefVector::vertex(vec![1.5; 8]).unwrap();
        let z = spectral_edit(&b, &c, &[(0, 0.0)], &p).unwrap();
        assert!(z.as_slice().iter().all(|v| v.abs() < 1e-12));
        let y = spectral_edit(&b, &x, &[(1, 2.0)], &p).unwrap();
        let e0 = band_energy(&b, &x, &p).unwrap().energies;
        let e1 = band_energy(&b, &y, &p).unwrap().energies;
        assert!((e1[1] - 4.0 * e0[1]).abs() < 1e-10);
        assert!(spectral_edit(&b, &x, &[(1, 2.0), (1, 3.0)], &p).is_err());
        assert!(spectral_edit(&b, &x, &[(3, 2.0)], &p).is_err());
    }
}
