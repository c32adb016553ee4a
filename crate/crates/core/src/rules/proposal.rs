//! Screening of externally proposed edges and rule templates.
//!
//! Proposal files are JSON lines, one object per line:
//!
//! ```text
//! {"kind": "edge", "i": 0, "j": 3, "w": 1.0, "origin": "generator-a"}
//! {"kind": "rule", "template": {"name": "spread", "kind": "diffusion", "params": {"tau": 1.0}, "weight": 1.0}, "origin": "generator-a"}
//! ```

use std::io::BufRead;

use serde::{Deserialize, Serialize};

use super::RuleSet;
use super::RuleTemplate;
use crate::error::{Error, Result};
use crate::filter::SpectralResponse;
use crate::graph::{build_laplacian, eigendecompose, Graph, LaplacianKind, SpectralBasis, WeightSign};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ProposalKind {
    Edge { i: usize, j: usize, w: f64 },
    Rule { template: RuleTemplate },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Proposal {
    #[serde(flatten)]
    pub kind: ProposalKind,
    #[serde(default)]
    pub origin: String,
}

/// Acceptance limits for proposals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValidationBounds {
    /// Post-insertion λ_max may be at most this multiple of the original
    /// (originals below 1.0 count as 1.0).
    pub max_lambda_growth: f64,
    /// Bound on `sup |φ_r(λ)|` over the λ-grid.
    pub max_response: f64,
    pub grid_points: usize,
    pub laplacian: LaplacianKind,
}

impl Default for ValidationBounds {
    fn default() -> Self {
        Self {
            max_lambda_growth: 1.5,
            max_response: 1.0,
            grid_points: 1001,
            laplacian: LaplacianKind::Combinatorial,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum RejectReason {
    IndexOutOfRange { index: usize, n: usize },
    SelfLoop { node: usize },
    DuplicateEdge { i: usize, j: usize },
    InvalidWeight { weight: f64 },
    LambdaGrowth { before: f64, after: f64, limit: f64 },
    DuplicateName { name: String },
    NegativeWeight { weight: f64 },
    ResponseBound { sup: f64, limit: f64 },
}

impl RejectReason {
    pub fn code(&self) -> &'static str {
        match self {
            Self::IndexOutOfRange { .. } => "index_out_of_range",
            Self::SelfLoop { .. } => "self_loop",
            Self::DuplicateEdge { .. } => "duplicate_edge",
            Self::InvalidWeight { .. } => "invalid_weight",
            Self::LambdaGrowth { .. } => "lambda_growth",
            Self::DuplicateName { .. } => "duplicate_name",
            Self::NegativeWeight { .. } => "negative_weight",
            Self::ResponseBound { .. } => "response_bound",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "lowercase")]
pub enum Verdict {
    Accepted,
    Rejected(RejectReason),
}

pub fn read_proposals<R: BufRead>(src: R) -> Result<Vec<Proposal>> {
    let mut out = Vec::new();
    for (idx, line) in src.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let p: Proposal = serde_json::from_str(&line).map_err(|e| Error::Parse {
            line: idx + 1,
            message: e.to_string(),
        })?;
        out.push(p);
    }
    Ok(out)
}

/// Decide whether a proposal may be merged. Pure; malformed responses are
/// errors, policy violations are rejections.
pub fn validate_proposal(
    p: &Proposal,
    g: &Graph,
    rs: &RuleSet,
    basis: &SpectralBasis,
    bounds: &ValidationBounds,
) -> Result<Verdict> {
    let reject = |r| Ok(Verdict::Rejected(r));
    match &p.kind {
        ProposalKind::Edge { i, j, w } => {
            let (i, j, w) = (*i, *j, *w);
            let n = g.node_count();
            if let Some(&index) = [i, j].iter().find(|&&k| k >= n) {
                return reject(RejectReason::IndexOutOfRange { index, n });
            }
            if i == j {
                return reject(RejectReason::SelfLoop { node: i });
            }
            if g.has_edge(i, j) {
                return reject(RejectReason::DuplicateEdge { i: i.min(j), j: i.max(j) });
            }
            let weight_ok = w.is_finite()
                && match g.sign() {
                    WeightSign::Unsigned => w > 0.0,
                    WeightSign::Signed => w != 0.0,
                };
            if !weight_ok {
                return reject(RejectReason::InvalidWeight { weight: w });
            }
            let g2 = g.with_edge(i, j, w)?;
            let l2 = build_laplacian(&g2, bounds.laplacian)?;
            let after = eigendecompose(&l2, usize::MAX)?.lambda_max();
            let before = basis.lambda_max();
            let limit = bounds.max_lambda_growth * before.max(1.0);
            if after > limit {
                return reject(RejectReason::LambdaGrowth { before, after, limit });
            }
            Ok(Verdict::Accepted)
        }
        ProposalKind::Rule { template } => {
            template.response.validate()?;
            if template.name.is_empty() || !template.weight.is_finite() {
                return Err(Error::InvalidParameter(format!("malformed rule proposal {template:?}")));
            }
            if rs.contains(&template.name) {
                return reject(RejectReason::DuplicateName {
                    name: template.name.clone(),
                });
            }
            if template.weight < 0.0 {
                return reject(RejectReason::NegativeWeight { weight: template.weight });
            }
            let sup = grid_sup(&template.response, basis.lambda_max(), bounds.grid_points.max(2));
            if sup > bounds.max_response {
                return reject(RejectReason::ResponseBound {
                    sup,
                    limit: bounds.max_response,
                });
            }
            Ok(Verdict::Accepted)
        }
    }
}

pub(crate) fn grid_sup(r: &dyn SpectralResponse, lambda_max: f64, points: usize) -> f64 {
    (0..points)
        .map(|k| r.eval(lambda_max * k as f64 / (points - 1) as f64).abs())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filter::AnalyticResponse;

    fn setup() -> (Graph, RuleSet, SpectralBasis) {
        let g = Graph::new(4, [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0)], WeightSign::Unsigned).unwrap();
        let b = eigendecompose(&build_laplacian(&g, LaplacianKind::Combinatorial).unwrap(), 64).unwrap();
        let rs = RuleSet::new(vec![RuleTemplate::new("spread", AnalyticResponse::Diffusion { tau: 1.0 }, 1.0).unwrap()]).unwrap();
        (g, rs, b)
    }

    fn rule(name: &str, r: AnalyticResponse, w: f64) -> Proposal {
        Proposal {
            kind: ProposalKind::Rule {
                template: RuleTemplate {
                    name: name.into(),
                    response: r,
                    weight: w,
                },
            },
            origin: "test".into(),
        }
    }

    fn edge(i: usize, j: usize, w: f64) -> Proposal {
        Proposal {
            kind: ProposalKind::Edge { i, j, w },
            origin: String::new(),
        }
    }

    #[test]
    fn diffusion_rule_accepted() {
        let (g, rs, b) = setup();
        let bounds = ValidationBounds::default();
        let v = validate_proposal(&rule("d2", AnalyticResponse::Diffusion { tau: 1.0 }, 1.0), &g, &rs, &b, &bounds).unwrap();
        assert_eq!(v, Verdict::Accepted);
    }

    #[test]
    fn polynomial_over_bound_rejected() {
        let (g, rs, b) = setup();
        // 1.6 λ / (λ_max / 2) peaks at 3.2 when λ = λ_max.
        let lm = b.lambda_max();
        let p = rule("poly", AnalyticResponse::Polynomial { coeffs: vec![0.0, 3.2 / lm] }, 1.0);
        let bounds = ValidationBounds {
            max_response: 2.0,
            ..Default::default()
        };
        match validate_proposal(&p, &g, &rs, &b, &bounds).unwrap() {
            Verdict::Rejected(RejectReason::ResponseBound { sup, limit }) => {
                assert!((sup - 3.2).abs() < 1e-12);
                assert_eq!(limit, 2.0);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rule_rejections() {
        let (g, rs, b) = setup();
        let bounds = ValidationBounds::default();
        let v = validate_proposal(&rule("spread", AnalyticResponse::Identity, 1.0), &g, &rs, &b, &bounds).unwrap();
        assert!(matches!(v, Verdict::Rejected(RejectReason::DuplicateName { .. })));
        let v = validate_proposal(&rule("neg", AnalyticResponse::Identity, -0.5), &g, &rs, &b, &bounds).unwrap();
        assert!(matches!(v, Verdict::Rejected(RejectReason::NegativeWeight { .. })));
        assert!(validate_proposal(&rule("bad", AnalyticResponse::Diffusion { tau: -1.0 }, 1.0), &g, &rs, &b, &bounds).is_err());
    }

    #[test]
    fn edge_checks() {
        let (g, rs, b) = setup();
        let bounds = ValidationBounds::default();
        let check = |p: Proposal| validate_proposal(&p, &g, &rs, &b, &bounds).unwrap();
        assert_eq!(check(edge(2, 2, 1.0)), Verdict::Rejected(RejectReason::SelfLoop { node: 2 }));
        assert_eq!(check(edge(1, 0, 1.0)), Verdict::Rejected(RejectReason::DuplicateEdge { i: 0, j: 1 }));
        assert!(matches!(check(edge(0, 9, 1.0)), Verdict::Rejected(RejectReason::IndexOutOfRange { index: 9, n: 4 })));
        assert!(matches!(check(edge(0, 3, -1.0)), Verdict::Rejected(RejectReason::InvalidWeight { .. })));
        assert_eq!(check(edge(0, 3, 1.0)), Verdict::Accepted);
        assert!(matches!(check(edge(0, 2, 50.0)), Verdict::Rejected(RejectReason::LambdaGrowth { .. })));
    }

    #[test]
    fn json_lines() {
        let text = r#"{"kind":"edge","i":0,"j":3,"w":1.0,"origin":"gen"}

{"kind":"rule","template":{"name":"hp","kind":"highpass","params":{"beta":1.0},"weight":0.5},"origin":"gen"}
"#;
        let ps = read_proposals(text.as_bytes()).unwrap();
        assert_eq!(ps.len(), 2);
        assert_eq!(ps[0], Proposal { kind: ProposalKind::Edge { i: 0, j: 3, w: 1.0 }, origin: "gen".into() });
        assert!(matches!(&ps[1].kind, ProposalKind::Rule { template } if template.weight == 0.5));
        assert!(matches!(read_proposals("{\"kind\":\"nope\"}".as_bytes()), Err(Error::Parse { line: 1, .. })));
        let v = serde_json::to_string(&Verdict::Rejected(RejectReason::SelfLoop { node: 1 })).unwrap();
        assert_eq!(v, r#"{"verdict":"rejected","reason":"self_loop","node":1}"#);
    }
}
