//! Damon-Eshbach surface magnons of an in-plane magnetized film and their
//! coupling to NV centres above the top surface. SI units throughout;
//! frequencies are angular (rad/s).

mod coupling;
mod dispersion;
mod film;
mod mode;

pub use coupling::{
    coupling_constant, dissipative_rate, CouplingSummary, SpinModel, OPERATING_ZETA,
};
pub use dispersion::{
    dispersion_omega, group_velocity, nv_frequencies, polder_susceptibility, resonant_wavenumber,
    SusceptibilityPair, K_SEARCH_MAX,
};
pub use film::{MaterialFilm, HBAR, MU0};
pub use mode::{
    boundary_residuals, field_fluctuation, mode_amplitudes, normalization_norm_sq, FieldSample,
    Polarization, SurfaceMode,
};
