use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

use crate::error::Result;

use super::dispersion::{group_velocity, nv_frequencies, resonant_wavenumber};
use super::film::{MaterialFilm, MU0};
use super::mode::{field_fluctuation, mode_amplitudes, Polarization};

/// Drive parameter used to fix the Rabi frequency in the drive ratio.
pub const OPERATING_ZETA: f64 = 0.27;

/// Suppression ratio below which the `|0> <-> |+>` transition is dropped.
const TRUNCATION_RATIO: f64 = 0.05;

/// Spin model of the emitter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SpinModel {
    /// NV triplet: `g_{k,alpha}` enters directly.
    #[default]
    SpinOne,
    /// Two-level emitter: the coupling carries an extra `1/sqrt(2)`.
    SpinHalf,
}

/// `g_{k,alpha} = gamma_s mu0 dH_k(r0) . e_alpha` at the NV position (rad/s).
pub fn coupling_constant(
    film: &MaterialFilm,
    k: f64,
    alpha: Polarization,
    spin: SpinModel,
) -> Result<f64> {
    let mode = mode_amplitudes(film, k)?;
    let field = field_fluctuation(&mode, film.nv_height(), 0.0)?;
    let g = film.gamma_s * MU0 * field.amplitude.norm() * field.polarization.dot(alpha);
    Ok(match spin {
        SpinModel::SpinOne => g,
        SpinModel::SpinHalf => FRAC_1_SQRT_2 * g,
    })
}

/// Scalars of the NV/film setup.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingSummary {
    /// NV transition frequencies (rad/s).
    pub omega_minus: f64,
    pub omega_plus: f64,
    /// Resonant wave numbers (1/m).
    pub k_minus: f64,
    pub k_plus: f64,
    /// `g_{k_-,+}` (rad/s).
    pub g_minus_branch: f64,
    /// `g_{-k_+,-}` (rad/s).
    pub g_plus_branch: f64,
    pub suppression_ratio: f64,
    /// Group velocity at `k_-` (m/s).
    pub v_group: f64,
    /// `L_y |g|^2 / |v|`, read as a plain rate (1/s).
    pub j_q: f64,
    /// `j_q / (2 pi)`, the value if `j_q` were an angular frequency.
    pub j_q_per_two_pi: f64,
    /// `v tau_m` (m).
    pub l_m: f64,
    /// `J_q / (v / l_m)`.
    pub markov_ratio: f64,
    /// `tau_m / tau_{delta,Omega}` at `zeta = 0.27`, `delta = 0`.
    pub drive_ratio: f64,
    /// `2 pi / k_-` (m).
    pub min_distance: f64,
    pub plus_channel_dropped: bool,
    pub warnings: Vec<String>,
}

/// Assembles the dissipative rate and related scales for the `|0> <-> |->`
/// transition.
pub fn dissipative_rate(film: &MaterialFilm, spin: SpinModel) -> Result<CouplingSummary> {
    film.validate()?;
    let (omega_minus, omega_plus) = nv_frequencies(film)?;
    let k_minus = resonant_wavenumber(film, omega_minus)?;
    let k_plus = resonant_wavenumber(film, omega_plus)?;
    let g_minus_branch = coupling_constant(film, k_minus, Polarization::Plus, spin)?;
    let g_plus_branch = coupling_constant(film, -k_plus, Polarization::Minus, spin)?;
    let suppression_ratio = g_plus_branch / g_minus_branch;

    let v_group = group_velocity(film, k_minus)?;
    let j_q = film.l_y * g_minus_branch * g_minus_branch / v_group.abs();
    let l_m = v_group * film.tau_m;
    let omega_rabi = j_q / (2.0 * SQRT_2 * OPERATING_ZETA);
    let tau_drive = 2.0 / (4.0 * omega_rabi * omega_rabi).sqrt();

    let plus_channel_dropped = suppression_ratio < TRUNCATION_RATIO;
    let mut warnings = Vec::new();
    if !plus_channel_dropped {
        warnings.push(format!(
            "g ratio {suppression_ratio:.3e} is not small; the |0> <-> |+> transition is not negligible"
        ));
    }
    Ok(CouplingSummary {
        omega_minus,
        omega_plus,
        k_minus,
        k_plus,
        g_minus_branch,
        g_plus_branch,
        suppression_ratio,
        v_group,
        j_q,
        j_q_per_two_pi: j_q / (2.0 * PI),
        l_m,
        markov_ratio: j_q / (v_group / l_m),
        drive_ratio: film.tau_m / tau_drive,
        min_distance: 2.0 * PI / k_minus,
        plus_channel_dropped,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chirality_zero_is_exact() {
        let film = MaterialFilm::table_one();
        for k in [1e5, 4.8e6, 3e7] {
            let on = coupling_constant(&film, k, Polarization::Plus, SpinModel::SpinOne).unwrap();
            assert!(on > 0.0);
            assert_eq!(
                coupling_constant(&film, k, Polarization::Minus, SpinModel::SpinOne).unwrap(),
                0.0
            );
            assert_eq!(
                coupling_constant(&film, -k, Polarization::Plus, SpinModel::SpinOne).unwrap(),
                0.0
            );
        }
    }

    #[test]
    fn spin_half_carries_inverse_sqrt_two() {
        let film = MaterialFilm::table_one();
        let g1 = coupling_constant(&film, 4.8e6, Polarization::Plus, SpinModel::SpinOne).unwrap();
        let g2 = coupling_constant(&film, 4.8e6, Polarization::Plus, SpinModel::SpinHalf).unwrap();
        assert!((g2 * SQRT_2 - g1).abs() < 1e-12 * g1);
    }

    #[test]
    fn rate_is_length_independent() {
        let film = MaterialFilm::table_one();
        let a = dissipative_rate(&film, SpinModel::SpinOne).unwrap().j_q;
        let b = dissipative_rate(
            &MaterialFilm {
                l_y: 2.0 * film.l_y,
                ..film
            },
            SpinModel::SpinOne,
        )
        .unwrap()
        .j_q;
        assert!((a - b).abs() < 1e-10 * a);
        let c = dissipative_rate(
            &MaterialFilm {
                l_z: 2.0 * film.l_z,
                l_y: 4.0 * film.l_y,
                ..film
            },
            SpinModel::SpinOne,
        )
        .unwrap()
        .j_q;
        assert!((a / c - 2.0).abs() < 1e-10);
    }

    #[test]
    fn summary_is_consistent() {
        let s = dissipative_rate(&MaterialFilm::table_one(), SpinModel::SpinOne).unwrap();
        assert!(s.k_plus > s.k_minus && s.k_minus > 0.0);
        assert!(s.j_q > 0.0 && s.v_group > 0.0);
        assert!(s.plus_channel_dropped && s.warnings.is_empty());
        assert!((s.markov_ratio - s.j_q * 1e-6).abs() < 1e-12 * s.markov_ratio);
    }
}
