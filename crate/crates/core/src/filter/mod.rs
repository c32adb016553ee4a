//! Spectral responses, Chebyshev filters, exact dense filtering and the
//! rational (diffusion) solve.

mod chebyshev;
mod dense;
mod io;
mod rational;
mod response;

pub use chebyshev::{
    cheb_apply, cheb_apply_with, chebyshev_values, default_quadrature_nodes, fit_chebyshev, max_grid_error,
    ChebyshevFilter, RecurrenceTrace, FIT_GRID_POINTS,
};
pub(crate) use chebyshev::recurrence;
pub use dense::dense_filter_apply;
pub(crate) use io::sci17;
pub use io::{read_filter, write_filter};
pub use rational::{rational_apply, DEFAULT_CG_TOL};
pub use response::{response_eval, response_values, AnalyticResponse, SpectralResponse};
