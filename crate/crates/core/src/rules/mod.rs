//! Rules as spectral templates, predicate projection, Horn closure and
//! proposal screening.

mod horn;
mod predicate;
mod proposal;
mod template;

pub use horn::{forward_chain, Clause, RuleBase};
pub use predicate::{project_predicates, sigmoid, PredicateVector, ProjectionMode};
pub(crate) use proposal::grid_sup;
pub use proposal::{read_proposals, validate_proposal, Proposal, ProposalKind, RejectReason, ValidationBounds, Verdict};
pub use template::{
    aggregate_rules, apply_rule, mixture_response, Carrier, MixtureResponse, RuleSet, RuleTemplate, DEFAULT_RULE_ORDER,
};
