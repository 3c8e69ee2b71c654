use std::f64::consts::PI;

use crate::error::{domain, Result};

/// Vacuum permeability (T m / A).
pub const MU0: f64 = 4.0e-7 * PI;
/// Reduced Planck constant (J s).
pub const HBAR: f64 = 1.054_571_817e-34;

/// Magnetic film and NV geometry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaterialFilm {
    /// NV zero-field splitting (rad/s).
    pub d0: f64,
    /// Gyromagnetic ratio (1/(T s)).
    pub gamma_s: f64,
    /// Film thickness (m).
    pub d: f64,
    /// Film length along the propagation axis (m).
    pub l_y: f64,
    /// Film width along the field (m).
    pub l_z: f64,
    /// Exchange stiffness (m^2).
    pub d_ex: f64,
    /// Saturation magnetization (A/m).
    pub m_s: f64,
    /// NV height above the top surface (m).
    pub d_nv: f64,
    /// External field `mu0 H0` (T).
    pub mu0_h0: f64,
    /// Magnon lifetime (s).
    pub tau_m: f64,
}

impl MaterialFilm {
    /// YIG film with NV centres at `d_NV = d/2` and a 1 us magnon lifetime.
    pub fn table_one() -> Self {
        let d = 200e-9;
        Self {
            d0: 2.0 * PI * 2.877e9,
            gamma_s: 1.76e11,
            d,
            l_y: 10e-6,
            l_z: 1e-6,
            d_ex: 3.086e-16,
            m_s: 1.39e5,
            d_nv: d / 2.0,
            mu0_h0: 1e-2,
            tau_m: 1e-6,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("d0", self.d0),
            ("gamma_s", self.gamma_s),
            ("d", self.d),
            ("l_y", self.l_y),
            ("l_z", self.l_z),
            ("d_ex", self.d_ex),
            ("m_s", self.m_s),
            ("d_nv", self.d_nv),
            ("mu0_h0", self.mu0_h0),
            ("tau_m", self.tau_m),
        ];
        for (name, value) in fields {
            if !(value > 0.0 && value.is_finite()) {
                return domain(format!("{name} = {value} must be positive and finite"));
            }
        }
        if !(self.l_y > self.l_z && self.l_z > self.d) {
            return domain(format!(
                "film dimensions must satisfy l_y > l_z > d, got {:e} / {:e} / {:e}",
                self.l_y, self.l_z, self.d
            ));
        }
        Ok(())
    }

    /// `omega_H = gamma_s mu0 H0`.
    pub fn omega_h(&self) -> f64 {
        self.gamma_s * self.mu0_h0
    }

    /// `omega_M = gamma_s mu0 M_s`.
    pub fn omega_m(&self) -> f64 {
        self.gamma_s * MU0 * self.m_s
    }

    /// `omega_H' = omega_H + omega_M D_ex k^2`.
    pub fn omega_h_prime(&self, k: f64) -> f64 {
        self.omega_h() + self.omega_m() * self.d_ex * k * k
    }

    /// NV position above the film centre, `d/2 + d_NV`.
    pub fn nv_height(&self) -> f64 {
        0.5 * self.d + self.d_nv
    }
}
