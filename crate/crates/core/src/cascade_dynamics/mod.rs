//! Master equation of driven qubits coupled through a chiral magnon channel.
//!
//! Builders produce the drive Hamiltonian, the non-Hermitian effective
//! Hamiltonian, the collective jump operator and the column-stacked
//! Liouvillian; solvers propagate states, extract steady states and evaluate
//! the closed-form spectrum of the two-qubit effective Hamiltonian.

mod builders;
mod config;
mod liouvillian;
mod spectrum;

pub use builders::{
    build_collective_jump, build_drive_hamiltonian, build_effective_hamiltonian, coupling_matrix,
};
pub use config::{ChainConfig, DirectionalConfig, Propagation};
pub use liouvillian::{
    assemble_liouvillian, build_directional_liouvillian, null_space_dimension, propagate,
    steady_state, LiouvillianOperator, StepPropagator,
};
pub use spectrum::{
    clustered_eigenvalues, effective_spectrum, spectrum_mismatch, EffectiveSpectrum,
};

use crate::error::Result;
use crate::quantum_core::{basis_index, PureState, C64};

/// Singlet `(|10> - |01>) / sqrt(2)`.
pub fn singlet() -> PureState {
    let mut amp = vec![C64::new(0.0, 0.0); 4];
    amp[basis_index(&[1, 0])] = C64::new(1.0, 0.0);
    amp[basis_index(&[0, 1])] = C64::new(-1.0, 0.0);
    PureState::normalize(amp).expect("non-zero")
}

/// Dark state `(i zeta |00> + (|10> - |01>)/sqrt(2)) / sqrt(zeta^2 + 1)`.
pub fn dark_state(zeta: f64) -> Result<PureState> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut amp = vec![C64::new(0.0, 0.0); 4];
    amp[basis_index(&[0, 0])] = C64::new(0.0, zeta);
    amp[basis_index(&[1, 0])] = C64::new(s, 0.0);
    amp[basis_index(&[0, 1])] = C64::new(-s, 0.0);
    PureState::normalize(amp)
}

/// Excited-state population `<s_i+ s_i->` of qubit `site`.
pub fn excited_population(
    rho: &crate::quantum_core::DensityMatrix,
    site: usize,
    n_qubits: usize,
) -> Result<f64> {
    let s = crate::quantum_core::embed_lowering(site, n_qubits)?;
    Ok(rho.expectation(&(&s.adjoint() * &s)).re)
}
