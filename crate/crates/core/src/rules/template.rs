use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::filter::{cheb_apply, default_quadrature_nodes, dense_filter_apply, fit_chebyshev, AnalyticResponse, SpectralResponse};
use crate::graph::{ScaledLaplacian, SpectralBasis};
use crate::signal::{axpy, BeliefVector, Domain};

/// Chebyshev order used when a rule is applied without an eigenbasis.
pub const DEFAULT_RULE_ORDER: usize = 16;

/// A named spectral response `φ_r` with non-negative weight `w_r`.
///
/// Serialized as `{"name", "kind", "params", "weight"}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuleTemplate {
    pub name: String,
    #[serde(flatten)]
    pub response: AnalyticResponse,
    pub weight: f64,
}

impl RuleTemplate {
    pub fn new(name: impl Into<String>, response: AnalyticResponse, weight: f64) -> Result<Self> {
        let t = Self {
            name: name.into(),
            response,
            weight,
        };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        if self.name.is_empty() {
            return Err(invalid("rule name must be non-empty"));
        }
        if !(self.weight >= 0.0) || !self.weight.is_finite() {
            return Err(invalid(format!("rule `{}` has invalid weight {}", self.name, self.weight)));
        }
        self.response.validate()
    }
}

/// A collection of templates with unique names.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<RuleTemplate>", into = "Vec<RuleTemplate>")]
pub struct RuleSet {
    templates: Vec<RuleTemplate>,
}

impl RuleSet {
    pub fn new(templates: Vec<RuleTemplate>) -> Result<Self> {
        let mut names = BTreeSet::new();
        for t in &templates {
            t.validate()?;
            if !names.insert(t.name.as_str()) {
                return Err(invalid(format!("duplicate rule name `{}`", t.name)));
            }
        }
        Ok(Self { templates })
    }

    pub fn templates(&self) -> &[RuleTemplate] {
        &self.templates
    }

    pub fn contains(&self, name: &str) -> bool {
        self.templates.iter().any(|t| t.name == name)
    }

    pub fn is_empty(&self) -> bool {
        self.templates.is_empty()
    }
}

impl TryFrom<Vec<RuleTemplate>> for RuleSet {
    type Error = crate::Error;

    fn try_from(v: Vec<RuleTemplate>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<RuleSet> for Vec<RuleTemplate> {
    fn from(rs: RuleSet) -> Self {
        rs.templates
    }
}

/// Where rule operators are evaluated.
#[derive(Debug, Clone, Copy)]
pub enum Carrier<'a> {
    /// Exact `U φ(Λ) Uᵀ`.
    Exact(&'a SpectralBasis),
    /// Chebyshev fit of order `order` applied by recurrence.
    Sparse { operator: &'a ScaledLaplacian, order: usize },
}

impl<'a> Carrier<'a> {
    pub fn sparse(operator: &'a ScaledLaplacian) -> Self {
        Self::Sparse {
            operator,
            order: DEFAULT_RULE_ORDER,
        }
    }
}

/// `φ_*(λ) = Σ_r w_r φ_r(λ)`.
#[derive(Debug, Clone)]
pub struct MixtureResponse {
    parts: Vec<(f64, AnalyticResponse)>,
}

impl SpectralResponse for MixtureResponse {
    fn eval(&self, lambda: f64) -> f64 {
        self.parts.iter().map(|(w, r)| w * r.eval(lambda)).sum()
    }
}

pub fn mixture_response(rs: &RuleSet) -> Result<MixtureResponse> {
    if rs.is_empty() {
        return Err(invalid("rule mixture needs at least one rule"));
    }
    Ok(MixtureResponse {
        parts: rs.templates.iter().map(|t| (t.weight, t.response.clone())).collect(),
    })
}

/// `Φ_r x` (unweighted).
pub fn apply_rule(t: &RuleTemplate, carrier: Carrier<'_>, x: &BeliefVector) -> Result<BeliefVector> {
    apply_response(&t.response, carrier, x)
}

fn apply_response(r: &AnalyticResponse, carrier: Carrier<'_>, x: &BeliefVector) -> Result<BeliefVector> {
    match carrier {
        Carrier::Exact(basis) => dense_filter_apply(basis, r, x),
        Carrier::Sparse { operator, order } => {
            let f = fit_chebyshev(r, order, operator.lambda_max, default_quadrature_nodes(order))?;
            Ok(cheb_apply(&f, operator, x, false)?.0)
        }
    }
}

/// `b' = Σ_r w_r Φ_r x`.
pub fn aggregate_rules(rs: &RuleSet, carrier: Carrier<'_>, x: &BeliefVector) -> Result<BeliefVector> {
    if rs.is_empty() {
        return Err(invalid("cannot aggregate an empty rule set"));
    }
    let mut out = vec![0.0; x.len()];
    for t in rs.templates() {
        let y = apply_rule(t, carrier, x)?;
        axpy(t.weight, y.as_slice(), &mut out);
    }
    Ok(BeliefVector::from_parts(out, Domain::Vertex))
}
