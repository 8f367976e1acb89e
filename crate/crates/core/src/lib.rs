//! Gossip-driven diffusion of the willingness to adopt a secure OS over an
//! acquaintance network.
//!
//! - [`network`]: the network model, its file format and assumption checks.
//! - [`gossip`]: seeded Monte Carlo simulation of the meeting process.
//! - [`mean_field`]: expected dynamics (`Wbar = K + L`), stationary
//!   distribution, fundamental matrix and mean first passage times.
//! - [`spectral`]: performance function, deviation bounds, spectral gap,
//!   conductance and mixing classification.
//! - [`impact`]: per-user impact on the expected consensus and client ranking.
//! - [`report`]: the `validate` / `simulate` / `analyze` workflow.

pub mod error;
pub mod fixtures;
pub mod gossip;
pub mod impact;
pub mod mean_field;
pub mod network;
pub mod report;
pub mod spectral;

pub use error::{Error, Result};
pub use network::{parse_network, validate_network, AcquaintanceNetwork, Interaction};
