//! Driven-dissipative preparation of the singlet: protocol times, optimal
//! drive, coherence benchmarks and sensitivity sweeps.
//!
//! All times are in units of `1/J_q`; the right-moving rate is fixed to one.

mod search;
mod sweeps;

pub use search::{fidelity_at, peak_fidelity, threshold_crossing, Crossing, SearchOptions};
pub use sweeps::{
    benchmark_coherence, directional_map, optimize_zeta, phase_sensitivity, transient_overlap,
    zeta_sensitivity, BenchmarkOptions, BenchmarkResult, CoherenceKind, DirectionalCell,
    DirectionalMap, OptimizeOptions, OptimumZeta, PhasePoint, PhaseSensitivity, ZetaPoint,
    ZetaSensitivity,
};

use crate::cascade_dynamics::{assemble_liouvillian, singlet, ChainConfig};
use crate::error::{domain, Result};
use crate::quantum_core::{basis_index, DensityMatrix};

/// Outcome of a protocol-time search.
#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolOutcome {
    pub zeta: f64,
    pub f_threshold: f64,
    /// `J_q t_p`, or `f64::INFINITY` when the threshold is never reached.
    pub t_protocol: f64,
    pub converged: bool,
    /// `(J_q t, F(t))` on the search grid when requested.
    pub samples: Option<Vec<(f64, f64)>>,
}

/// Deviations from the ideal protocol configuration.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ProtocolOverrides {
    pub t1: Option<f64>,
    pub t_phi: Option<f64>,
    /// `k_q r_{2,1}`.
    pub phase: f64,
    pub delta: f64,
    pub search: SearchOptions,
}

/// `|<psi_-|psi_s>| = 1 / sqrt(zeta^2 + 1)`.
pub fn steady_overlap(zeta: f64) -> Result<f64> {
    if !(zeta >= 0.0) || !zeta.is_finite() {
        return domain(format!("zeta = {zeta} must be finite and non-negative"));
    }
    Ok(1.0 / (zeta * zeta + 1.0).sqrt())
}

/// Largest `zeta` whose steady state still reaches `F_T`: `sqrt(1/F_T^2 - 1)`.
pub fn zeta_threshold(f_t: f64) -> Result<f64> {
    check_threshold(f_t)?;
    Ok((1.0 / (f_t * f_t) - 1.0).sqrt())
}

pub(crate) fn check_threshold(f_t: f64) -> Result<()> {
    if !(f_t > 0.0 && f_t < 1.0) {
        return domain(format!("fidelity threshold {f_t} must lie in (0, 1)"));
    }
    Ok(())
}

pub(crate) fn check_zeta(zeta: f64) -> Result<()> {
    if !(zeta > 0.0) || !zeta.is_finite() {
        return domain(format!("zeta = {zeta} must be positive and finite"));
    }
    Ok(())
}

/// Both qubits in the ground state.
pub fn ground_state() -> DensityMatrix {
    DensityMatrix::basis_projector(4, basis_index(&[0, 0])).expect("valid index")
}

/// Protocol configuration in units of `1/J_q` with the overrides applied.
pub fn protocol_config(zeta: f64, overrides: &ProtocolOverrides) -> ChainConfig {
    ChainConfig {
        delta_q: overrides.delta,
        ..ChainConfig::from_zeta(zeta)
            .with_phase_difference(overrides.phase)
            .with_t1(overrides.t1)
            .with_t_phi(overrides.t_phi)
    }
}

/// Smallest `J_q t` at which the singlet fidelity from `|00>` reaches `F_T`.
pub fn protocol_time(
    zeta: f64,
    f_t: f64,
    overrides: &ProtocolOverrides,
) -> Result<ProtocolOutcome> {
    check_zeta(zeta)?;
    check_threshold(f_t)?;
    let not_converged = |samples| ProtocolOutcome {
        zeta,
        f_threshold: f_t,
        t_protocol: f64::INFINITY,
        converged: false,
        samples,
    };
    if zeta >= zeta_threshold(f_t)? {
        return Ok(not_converged(None));
    }
    let liou = assemble_liouvillian(&protocol_config(zeta, overrides))?;
    let crossing = threshold_crossing(&liou, &ground_state(), &singlet(), f_t, &overrides.search)?;
    Ok(match crossing.time {
        Some(t) => ProtocolOutcome {
            zeta,
            f_threshold: f_t,
            t_protocol: t,
            converged: true,
            samples: crossing.samples,
        },
        None => not_converged(crossing.samples),
    })
}
