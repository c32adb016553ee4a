use serde::{Deserialize, Serialize};

use crate::error::{check_len, invalid, Error, Result};
use crate::graph::{Laplacian, SpectralBasis};
use crate::signal::{dot, BeliefVector, Domain};

/// Contiguous frequency bands over `[0, λ_max]`.
///
/// Bands are half-open `[lo, hi)` except the last, which is closed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct BandPartition {
    edges: Vec<f64>,
}

impl BandPartition {
    pub fn new(edges: Vec<f64>) -> Result<Self> {
        if edges.len() < 2 {
            return Err(Error::InvalidPartition("need at least two edges".into()));
        }
        if edges[0] != 0.0 {
            return Err(Error::InvalidPartition(format!("first edge must be 0, got {}", edges[0])));
        }
        if edges.iter().any(|e| !e.is_finite()) || edges.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidPartition(format!(
                "edges must be finite and strictly increasing: {edges:?}"
            )));
        }
        Ok(Self { edges })
    }

    /// Low / mid / high thirds of `[0, λ_max]`.
    pub fn three_band(lambda_max: f64) -> Result<Self> {
        Self::uniform(lambda_max, 3)
    }

    pub fn uniform(lambda_max: f64, bands: usize) -> Result<Self> {
        if !(lambda_max > 0.0) || bands == 0 {
            return Err(invalid("uniform partition needs lambda_max > 0 and at least one band"));
        }
        let mut edges: Vec<f64> = (0..=bands).map(|b| lambda_max * b as f64 / bands as f64).collect();
        edges[bands] = lambda_max;
        Self::new(edges)
    }

    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    pub fn band_count(&self) -> usize {
        self.edges.len() - 1
    }

    fn slack(&self) -> f64 {
        1e-9 * (1.0 + self.edges.last().unwrap().abs())
    }

    /// Band containing `lambda`, tolerating round-off just outside the ends.
    pub fn band_of(&self, lambda: f64) -> Option<usize> {
        let tol = self.slack();
        let last = self.band_count() - 1;
        if lambda < self.edges[0] - tol || lambda > self.edges[last + 1] + tol {
            return None;
        }
        for b in 0..last {
            if lambda < self.edges[b + 1] {
                return Some(b);
            }
        }
        Some(last)
    }

    /// Band index per eigenvalue; fails if any eigenvalue falls outside.
    pub fn assign(&self, eigenvalues: &[f64]) -> Result<Vec<usize>> {
        eigenvalues
            .iter()
            .map(|&l| {
                self.band_of(l).ok_or_else(|| {
                    Error::InvalidPartition(format!(
                        "eigenvalue {l} outside partition [{}, {}]",
                        self.edges[0],
                        self.edges[self.band_count()]
                    ))
                })
            })
            .collect()
    }

    pub(crate) fn check_band(&self, band: usize) -> Result<()> {
        if band < self.band_count() {
            Ok(())
        } else {
            Err(invalid(format!("band {band} out of range ({} bands)", self.band_count())))
        }
    }
}

impl TryFrom<Vec<f64>> for BandPartition {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<BandPartition> for Vec<f64> {
    fn from(p: BandPartition) -> Self {
        p.edges
    }
}

/// Parseval split of a signal's energy over a partition.
#[derive(Debug, Clone, PartialEq)]
pub struct BandReport {
    pub partition: BandPartition,
    pub energies: Vec<f64>,
    /// All zeros when the signal is zero (`degenerate`).
    pub fractions: Vec<f64>,
    pub degenerate: bool,
}

impl BandReport {
    pub fn total(&self) -> f64 {
        self.energies.iter().sum()
    }

    pub(crate) fn from_energies(partition: BandPartition, energies: Vec<f64>) -> Self {
        let total: f64 = energies.iter().sum();
        let degenerate = total <= 0.0;
        let fractions = if degenerate {
            vec![0.0; energies.len()]
        } else {
            energies.iter().map(|e| e / total).collect()
        };
        Self {
            partition,
            energies,
            fractions,
            degenerate,
        }
    }

    /// Fraction of energy inside `allowed`; `None` for a zero signal.
    pub fn allowed_fraction(&self, allowed: &[usize]) -> Option<f64> {
        if self.degenerate {
            return None;
        }
        let inside: f64 = allowed
            .iter()
            .filter(|&&b| b < self.energies.len())
            .map(|&b| self.energies[b])
            .sum();
        Some((inside / self.total()).clamp(0.0, 1.0))
    }
}

/// Band energies from spectral coefficients already computed.
pub fn band_energy_from_coefficients(eigenvalues: &[f64], coeffs: &[f64], partition: &BandPartition) -> Result<BandReport> {
    check_len(eigenvalues.len(), coeffs.len())?;
    let bands = partition.assign(eigenvalues)?;
    let mut energies = vec![0.0; partition.band_count()];
    for (b, c) in bands.into_iter().zip(coeffs) {
        energies[b] += c * c;
    }
    Ok(BandReport::from_energies(partition.clone(), energies))
}

/// Energy of `ŷ = Uᵀ y` per band.
pub fn band_energy(basis: &SpectralBasis, y: &BeliefVector, partition: &BandPartition) -> Result<BandReport> {
    check_len(basis.dim(), y.len())?;
    y.expect_domain(Domain::Vertex)?;
    band_energy_from_coefficients(&basis.eigenvalues, &basis.forward(y.as_slice()), partition)
}

/// Graph smoothness `yᵀ L y`.
pub fn dirichlet_energy(l: &Laplacian, y: &BeliefVector) -> Result<f64> {
    check_len(l.dim(), y.len())?;
    y.expect_domain(Domain::Vertex)?;
    Ok(dot(y.as_slice(), &l.apply(y.as_slice())).max(0.0))
}

/// Mean in-band energy fraction over non-degenerate instances.
pub fn proof_band_agreement(reports: &[(BandReport, Vec<usize>)]) -> Result<f64> {
    if reports.is_empty() {
        return Err(invalid("proof-band agreement needs at least one instance"));
    }
    let scores: Vec<f64> = reports
        .iter()
        .filter_map(|(r, allowed)| r.allowed_fraction(allowed))
        .collect();
    if scores.is_empty() {
        return Err(invalid("all instances have zero energy"));
    }
    Ok(scores.iter().sum::<f64>() / scores.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_laplacian, eigendecompose, Graph, LaplacianKind, WeightSign};

    fn path(n: usize) -> (Laplacian, SpectralBasis) {
        let g = Graph::new(n, (0..n - 1).map(|i| (i, i + 1, 1.0)), WeightSign::Unsigned).unwrap();
        let l = build_laplacian(&g, LaplacianKind::Combinatorial).unwrap();
        let b = eigendecompose(&l, 64).unwrap();
        (l, b)
    }

    #[test]
    fn partition_rules() {
        assert!(BandPartition::new(vec![0.0]).is_err());
        assert!(BandPartition::new(vec![0.1, 1.0]).is_err());
        assert!(BandPartition::new(vec![0.0, 1.0, 1.0]).is_err());
        let p = BandPartition::new(vec![0.0, 1.0, 2.0, 3.0]).unwrap();
        assert_eq!(p.band_of(0.0), Some(0));
        assert_eq!(p.band_of(-1e-14), Some(0));
        assert_eq!(p.band_of(1.0), Some(1));
        assert_eq!(p.band_of(2.999), Some(2));
        assert_eq!(p.band_of(3.0), Some(2));
        assert_eq!(p.band_of(3.5), None);
        assert!(p.assign(&[0.5, 4.0]).is_err());
    }

    #[test]
    fn smooth_mode_lands_in_first_band() {
        let (_, b) = path(6);
        let p = BandPartition::three_band(b.lambda_max()).unwrap();
        let u0 = BeliefVector::vertex(b.eigenvector(0)).unwrap();
        let r = band_energy(&b, &u0, &p).unwrap();
        assert!((r.energies[0] - 1.0).abs() < 1e-12);
        assert!(r.energies[1..].iter().all(|e| e.abs() < 1e-12));
        assert!(!r.degenerate);
    }

    #[test]
    fn zero_signal_degenerate() {
        let (_, b) = path(6);
        let p = BandPartition::three_band(b.lambda_max()).unwrap();
        let r = band_energy(&b, &BeliefVector::zeros(6, Domain::Vertex), &p).unwrap();
        assert!(r.degenerate);
        assert_eq!(r.fractions, vec![0.0; 3]);
        assert_eq!(r.allowed_fraction(&[0]), None);
    }

    #[test]
    fn dirichlet_examples() {
        let (l, _) = path(2);
        let y = BeliefVector::vertex(vec![1.0, -1.0]).unwrap();
        assert_eq!(dirichlet_energy(&l, &y).unwrap(), 4.0);
        let (l, _) = path(5);
        assert_eq!(dirichlet_energy(&l, &BeliefVector::vertex(vec![3.0; 5]).unwrap()).unwrap(), 0.0);
    }

    #[test]
    fn agreement_examples() {
        let (_, b) = path(4);
        let p = BandPartition::new(vec![0.0, 1.0, b.lambda_max()]).unwrap();
        // u_0 (λ = 0) sits in band 0; u_3 (λ ≈ 3.41) in band 1.
        let u0 = BeliefVector::vertex(b.eigenvector(0)).unwrap();
        let u3 = BeliefVector::vertex(b.eigenvector(3)).unwrap();
        let r0 = band_energy(&b, &u0, &p).unwrap();
        let r3 = band_energy(&b, &u3, &p).unwrap();
        assert!((proof_band_agreement(&[(r0.clone(), vec![0]), (r3.clone(), vec![1])]).unwrap() - 1.0).abs() < 1e-12);
        assert!(proof_band_agreement(&[(r0.clone(), vec![1]), (r3.clone(), vec![0])]).unwrap() < 1e-12);
        let half: Vec<f64> = (0..4).map(|i| (u0[i] + u3[i]) / 2f64.sqrt()).collect();
        let rh = band_energy(&b, &BeliefVector::vertex(half).unwrap(), &p).unwrap();
        assert!((proof_band_agreement(&[(rh, vec![0])]).unwrap() - 0.5).abs() < 1e-12);
        let z = band_energy(&b, &BeliefVector::zeros(4, Domain::Vertex), &p).unwrap();
        assert!(proof_band_agreement(&[(z, vec![0])]).is_err());
        assert!(proof_band_agreement(&[]).is_err());
    }
}
