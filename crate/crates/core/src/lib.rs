//! Spectral neuro-symbolic reasoning over graph Laplacians.
//!
//! Beliefs on the nodes of a graph are filtered by frequency-selective
//! operators `h(L)` built from the Laplacian, either exactly through a dense
//! eigenbasis or with a truncated Chebyshev series evaluated by sparse
//! three-term recurrence in `O(K |E|)`. Rules are spectral templates whose
//! weighted mixture acts as one filter; filtered beliefs are thresholded into
//! predicates and closed under Horn clauses.
//!
//! | Module | Contents |
//! |--------|----------|
//! | [`graph`] | graphs, Laplacian variants, λ_max estimation, eigenbasis, GFT |
//! | [`filter`] | analytic responses, Chebyshev fit/apply, dense oracle, CG diffusion |
//! | [`rules`] | rule templates, predicate projection, forward chaining, proposal checks |
//! | [`training`] | gradients, Laplacian projection, mixtures of experts, curriculum, trainer |
//! | [`analysis`] | band energies, covariance, certificates, perturbations, transfer |
//! | [`taskgen`] | synthetic tasks with planted ground truth and the evaluator |

pub mod analysis;
pub mod error;
pub mod exec;
pub mod filter;
pub mod graph;
pub mod rules;
pub mod signal;
pub mod taskgen;
pub mod training;

pub use error::{Error, Result};
pub use signal::{BeliefVector, Domain};
