//! Driven spin qubits entangled through a chiral Damon-Eshbach magnon channel.
//!
//! * [`quantum_core`]: dense complex matrices, states, matrix exponential.
//! * [`cascade_dynamics`]: cascaded master equation and its steady states.
//! * [`entangle_protocol`]: protocol times, optimal drive and coherence benchmarks.
//! * [`magnonics_de`]: surface-magnon dispersion, mode fields and NV coupling.

pub mod cascade_dynamics;
pub mod entangle_protocol;
mod error;
pub mod magnonics_de;
pub mod quantum_core;

pub use error::{Error, Result};
