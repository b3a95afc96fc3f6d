//! Information-energy capacity and equilibrium regions of the K-user
//! Gaussian multiple access channel with an energy harvester.
//!
//! K transmitters share an additive Gaussian channel towards one receiver
//! while a separate harvester collects RF energy from the same waveforms.
//! Every quantity reduces to the per-user SNR tables; from there the crate
//! computes:
//!
//! * the centralized information-energy capacity region (membership tests,
//!   rate bounds, boundary samples) under a minimum energy demand,
//! * the eta-Nash-equilibrium regions when the transmitters tune their own
//!   power splits selfishly, for single-user decoding, successive
//!   interference cancellation and time sharing,
//! * power-split solvers on the energy manifold, a best-response oracle
//!   and round-robin dynamics,
//! * a seeded Monte Carlo simulator validating the empirical energy rate,
//!   its outage behavior and the induced input correlation,
//! * the single-user BSC information-energy capacity function.
//!
//! Rates are in bits per channel use (base-2 logs), energies in units of
//! the harvester noise power per channel use.

mod bisect;
mod hull;
mod manifold;
mod rates;

pub mod bsc;
pub mod equilibria;
pub mod error;
pub mod model;
pub mod regions;
pub mod simulation;

pub use error::{Error, Result};
pub use model::{ChannelConfig, ConfigDocument, PowerSplit, SnrTable, DEFAULT_TOL};
pub use regions::{GridSpec, RateTuple};
