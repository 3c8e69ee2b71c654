use crate::error::{domain, Error, Result};

use super::film::MaterialFilm;

/// Upper end of the resonance search (1/m).
pub const K_SEARCH_MAX: f64 = 1e10;

/// Polder tensor components.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SusceptibilityPair {
    pub chi_d: f64,
    pub chi_a: f64,
}

/// `chi_d = omega_M omega_H' / (omega_H'^2 - omega^2)`,
/// `chi_a = omega omega_M / (omega_H'^2 - omega^2)`.
pub fn polder_susceptibility(
    film: &MaterialFilm,
    omega: f64,
    k: f64,
) -> Result<SusceptibilityPair> {
    let wm = film.omega_m();
    let wh = film.omega_h_prime(k);
    let den = wh * wh - omega * omega;
    if !(den.abs() >= 1e-6 * wm * wm) {
        return Err(Error::Singularity(format!(
            "omega = {omega:e} rad/s is within tolerance of the pole omega_H' = {wh:e} rad/s"
        )));
    }
    Ok(SusceptibilityPair {
        chi_d: wm * wh / den,
        chi_a: omega * wm / den,
    })
}

/// Surface-mode frequency, `omega^2 = omega_H'(omega_H' + omega_M) + omega_M^2 (1 - e^{-2|k|d}) / 4`.
pub fn dispersion_omega(film: &MaterialFilm, k: f64) -> f64 {
    let wm = film.omega_m();
    let wh = film.omega_h_prime(k);
    let surface = 0.25 * wm * wm * (-(-2.0 * k.abs() * film.d).exp_m1());
    (wh * (wh + wm) + surface).sqrt()
}

/// `d omega / d k`, analytic for `k != 0`.
pub fn group_velocity(film: &MaterialFilm, k: f64) -> Result<f64> {
    if k == 0.0 || !k.is_finite() {
        return domain(format!("group velocity is undefined at k = {k}"));
    }
    let wm = film.omega_m();
    let wh = film.omega_h_prime(k);
    let exchange = (2.0 * wh + wm) * 2.0 * wm * film.d_ex * k;
    let surface = 0.5 * wm * wm * film.d * k.signum() * (-2.0 * k.abs() * film.d).exp();
    Ok((exchange + surface) / (2.0 * dispersion_omega(film, k)))
}

/// NV transition frequencies `omega_- = D0 - omega_H`, `omega_+ = D0 + omega_H`.
pub fn nv_frequencies(film: &MaterialFilm) -> Result<(f64, f64)> {
    let wh = film.omega_h();
    if wh >= film.d0 {
        return Err(Error::LevelCrossing {
            omega_h: wh,
            d0: film.d0,
        });
    }
    Ok((film.d0 - wh, film.d0 + wh))
}

/// Positive wave number with `omega(k) = omega_target`; `-k` is the mirror
/// solution.
pub fn resonant_wavenumber(film: &MaterialFilm, omega_target: f64) -> Result<f64> {
    let out_of_band = Error::OutOfBand {
        omega: omega_target,
        k_max: K_SEARCH_MAX,
    };
    if !(omega_target > dispersion_omega(film, 0.0)) {
        return Err(out_of_band);
    }
    let mut lo = 0.0;
    let mut hi = 1.0 / film.d;
    while dispersion_omega(film, hi) < omega_target {
        lo = hi;
        hi *= 2.0;
        if hi > K_SEARCH_MAX {
            return Err(out_of_band);
        }
    }
    while hi - lo > 1e-10 * hi {
        let mid = 0.5 * (lo + hi);
        if dispersion_omega(film, mid) < omega_target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
