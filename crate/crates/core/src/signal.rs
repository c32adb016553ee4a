//! Node signals ("beliefs") tagged with the domain they live in.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which side of the graph Fourier transform a vector lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    Vertex,
    Spectral,
}

/// A finite real vector over the nodes (vertex domain) or the eigenmodes
/// (spectral domain) of a graph.
#[derive(Debug, Clone, PartialEq)]
pub struct BeliefVector {
    values: Vec<f64>,
    domain: Domain,
}

impl BeliefVector {
    /// Vertex-domain vector; rejects NaN and infinities.
    pub fn vertex(values: Vec<f64>) -> Result<Self> {
        Self::new(values, Domain::Vertex)
    }

    /// Spectral-domain vector; rejects NaN and infinities.
    pub fn spectral(values: Vec<f64>) -> Result<Self> {
        Self::new(values, Domain::Spectral)
    }

    pub fn new(values: Vec<f64>, domain: Domain) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self { values, domain })
    }

    pub fn zeros(n: usize, domain: Domain) -> Self {
        Self {
            values: vec![0.0; n],
            domain,
        }
    }

    /// Internal constructor for values produced by finite arithmetic on
    /// finite inputs.
    pub(crate) fn from_parts(values: Vec<f64>, domain: Domain) -> Self {
        Self { values, domain }
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.values
    }

    pub fn norm_sq(&self) -> f64 {
        dot(&self.values, &self.values)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub(crate) fn expect_domain(&self, expected: Domain) -> Result<()> {
        if self.domain == expected {
            Ok(())
        } else {
            Err(Error::DomainMismatch {
                expected,
                got: self.domain,
            })
        }
    }
}

impl std::ops::Index<usize> for BeliefVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.values[i]
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}
