//! Band attribution, uncertainty, certificates, interventions and transfer.

mod bands;
mod certificate;
mod covariance;
mod intervene;
mod report;
mod robustness;

mod transfer;

pub use bands::*;
pub use certificate::*;
pub use covariance::*;
pub use intervene::*;
pub use report::*;
pub use robustness::*;

pub use transfer::*;
