use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::quantum_core::{basis_index, linalg, ComplexMatrix, PureState, C64};

use super::builders::{build_drive_hamiltonian, build_effective_hamiltonian};
use super::config::ChainConfig;

const I: C64 = C64::new(0.0, 1.0);

/// Closed-form eigensystem of `H_Q + H_eff` for two resonantly driven qubits
/// whose phase difference is a multiple of 2 pi.
#[derive(Debug, Clone)]
pub struct EffectiveSpectrum {
    /// `R = J_q / (2 Omega)`.
    pub r_param: f64,
    /// `nu = sqrt((4 - R)(4 + R)) / 2`, imaginary for `R > 4`.
    pub nu: C64,
    /// `omega_0, omega_1, omega_+, omega_-` in the rate units of the config.
    pub eigenvalues: [C64; 4],
    /// Normalized eigenvectors in the same order.
    pub eigenstates: [PureState; 4],
    /// Numeric eigenvalues the closed form was checked against.
    pub numeric_eigenvalues: Vec<C64>,
    pub is_exceptional_point: bool,
}

impl EffectiveSpectrum {
    pub fn omega_plus(&self) -> C64 {
        self.eigenvalues[2]
    }

    pub fn omega_minus(&self) -> C64 {
        self.eigenvalues[3]
    }

    /// `|<psi_-|psi_+>|` of the normalized coalescing pair.
    pub fn plus_minus_overlap(&self) -> f64 {
        self.eigenstates[3].inner(&self.eigenstates[2]).norm()
    }
}

fn ket(c00: C64, c01: C64, c10: C64, c11: C64) -> Result<PureState> {
    let mut amp = vec![C64::new(0.0, 0.0); 4];
    amp[basis_index(&[0, 0])] = c00;
    amp[basis_index(&[0, 1])] = c01;
    amp[basis_index(&[1, 0])] = c10;
    amp[basis_index(&[1, 1])] = c11;
    PureState::normalize(amp)
}

/// Eigenvalues of a dense matrix with near-coincident clusters replaced by
/// their mean. A defective eigenvalue splits by O(sqrt(eps)) under rounding,
/// while the cluster mean stays accurate to O(eps).
pub fn clustered_eigenvalues(m: &ComplexMatrix) -> Result<Vec<C64>> {
    let values = linalg::eigenvalues(m)?;
    let scale = values
        .iter()
        .map(|z| z.norm())
        .fold(m.max_abs(), f64::max)
        .max(1.0);
    let radius = 1e-6 * scale;
    let n = values.len();
    let mut group: Vec<usize> = (0..n).collect();
    for i in 0..n {
        for j in 0..i {
            if (values[i] - values[j]).norm() < radius {
                let (gi, gj) = (group[i], group[j]);
                for g in group.iter_mut() {
                    if *g == gi {
                        *g = gj;
                    }
                }
            }
        }
    }
    Ok((0..n)
        .map(|i| {
            let members: Vec<C64> = (0..n)
                .filter(|&k| group[k] == group[i])
                .map(|k| values[k])
                .collect();
            members.iter().sum::<C64>() / members.len() as f64
        })
        .collect())
}

/// Largest distance in a greedy nearest-neighbour pairing of two spectra.
pub fn spectrum_mismatch(closed: &[C64], numeric: &[C64]) -> f64 {
    let mut used = vec![false; numeric.len()];
    let mut worst = 0.0_f64;
    for z in closed {
        let best = numeric
            .iter()
            .enumerate()
            .filter(|(k, _)| !used[*k])
            .min_by(|a, b| (a.1 - z).norm().total_cmp(&(b.1 - z).norm()));
        match best {
            Some((k, w)) => {
                used[k] = true;
                worst = worst.max((w - z).norm());
            }
            None => return f64::INFINITY,
        }
    }
    worst
}

/// Evaluates the closed-form eigensystem and cross-checks it against a
/// dense eigensolver.
pub fn effective_spectrum(cfg: &ChainConfig) -> Result<EffectiveSpectrum> {
    cfg.validate()?;
    let unsupported = |msg: String| Err(Error::UnsupportedConfiguration(msg));
    if cfg.n_qubits != 2 {
        return unsupported(format!(
            "closed-form spectrum needs two qubits, got {}",
            cfg.n_qubits
        ));
    }
    if cfg.delta_q != 0.0 {
        return unsupported(format!(
            "closed-form spectrum needs a resonant drive, got delta = {}",
            cfg.delta_q
        ));
    }
    if !(cfg.omega_rabi > 0.0) {
        return unsupported("closed-form spectrum needs a non-zero drive".into());
    }
    let dphi = (cfg.phases[1] - cfg.phases[0]).rem_euclid(TAU);
    if dphi.min(TAU - dphi) > 1e-9 {
        return unsupported(format!("phase difference {dphi} is not a multiple of 2 pi"));
    }

    let omega = cfg.omega_rabi;
    let r = cfg.j_q / (2.0 * omega);
    let nu = C64::new((4.0 - r) * (4.0 + r), 0.0).sqrt() / 2.0;
    let c = |x: f64| C64::new(x, 0.0);

    let omega_0 = c(0.0);
    let omega_1 = -I * cfg.j_q / 2.0;
    let omega_pm = |sign: f64| (-1.5 * I * r + sign * nu) * omega;

    let psi_0 = ket(I * r, c(-1.0), c(1.0), c(0.0))?;
    let psi_1 = ket(c(1.0), -I * r, c(0.0), c(-1.0))?;
    let psi_pm = |sign: f64| {
        ket(
            c(2.0) + sign * I * nu * r - c(0.5 * r * r),
            0.5 * I * r * (r * r - 1.0) + sign * nu * (r * r + 1.0),
            1.5 * I * r + sign * nu,
            c(2.0 + r * r),
        )
    };

    let eigenvalues = [omega_0, omega_1, omega_pm(1.0), omega_pm(-1.0)];
    let eigenstates = [psi_0, psi_1, psi_pm(1.0)?, psi_pm(-1.0)?];

    let h = &build_drive_hamiltonian(cfg)? + &build_effective_hamiltonian(cfg)?;
    let numeric = clustered_eigenvalues(&h)?;
    let scale = omega.max(cfg.j_q).max(1.0);
    let mismatch = spectrum_mismatch(&eigenvalues, &numeric);
    if mismatch > 1e-9 * scale {
        return Err(Error::NumericalInstability(format!(
            "closed-form spectrum deviates from the numeric one by {mismatch:e}"
        )));
    }

    Ok(EffectiveSpectrum {
        r_param: r,
        nu,
        eigenvalues,
        eigenstates,
        numeric_eigenvalues: numeric,
        is_exceptional_point: (r - 4.0).abs() < 1e-9,
    })
}
