use std::f64::consts::SQRT_2;

use crate::error::{domain, Result};

/// Driven qubit chain coupled through a unidirectional magnon channel.
///
/// All rates share one inverse-time unit; `t1` and `t_phi` use the matching
/// time unit. `phases[i]` holds `k_q * r_i`, listed in order of position
/// along the unidirectional axis.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainConfig {
    pub n_qubits: usize,
    /// Detuning `omega_q - omega_d`.
    pub delta_q: f64,
    /// Rabi frequency of the classical drive.
    pub omega_rabi: f64,
    /// Magnon-mediated dissipative rate.
    pub j_q: f64,
    pub phases: Vec<f64>,
    /// Intrinsic lifetime; `None` disables qubit decay.
    pub t1: Option<f64>,
    /// Intrinsic dephasing time; `None` disables pure dephasing.
    pub t_phi: Option<f64>,
}

impl ChainConfig {
    /// Two resonantly driven qubits at phase difference zero.
    pub fn pair(j_q: f64, omega_rabi: f64) -> Self {
        Self {
            n_qubits: 2,
            delta_q: 0.0,
            omega_rabi,
            j_q,
            phases: vec![0.0, 0.0],
            t1: None,
            t_phi: None,
        }
    }

    /// Two-qubit protocol configuration in units of `1/J_q`:
    /// `J_q = 1` and `Omega = 1 / (2 sqrt(2) zeta)`.
    pub fn from_zeta(zeta: f64) -> Self {
        Self::pair(1.0, 1.0 / (2.0 * SQRT_2 * zeta))
    }

    /// `zeta = J_q / (2 sqrt(2) Omega)`.
    pub fn zeta(&self) -> f64 {
        self.j_q / (2.0 * SQRT_2 * self.omega_rabi)
    }

    pub fn with_phase_difference(mut self, phase: f64) -> Self {
        self.phases = vec![0.0, phase];
        self
    }

    pub fn with_t1(mut self, t1: Option<f64>) -> Self {
        self.t1 = t1;
        self
    }

    pub fn with_t_phi(mut self, t_phi: Option<f64>) -> Self {
        self.t_phi = t_phi;
        self
    }

    pub fn hilbert_dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_qubits == 0 {
            return domain("chain needs at least one qubit");
        }
        if self.n_qubits > 10 {
            return domain(format!(
                "{} qubits exceed the dense-matrix limit of 10",
                self.n_qubits
            ));
        }
        if self.phases.len() != self.n_qubits {
            return domain(format!(
                "{} phases given for {} qubits",
                self.phases.len(),
                self.n_qubits
            ));
        }
        if !self.delta_q.is_finite() || self.phases.iter().any(|p| !p.is_finite()) {
            return domain("detuning and phases must be finite");
        }
        if !(self.j_q >= 0.0 && self.j_q.is_finite()) {
            return domain(format!(
                "j_q = {} must be a finite non-negative rate",
                self.j_q
            ));
        }
        if !(self.omega_rabi >= 0.0 && self.omega_rabi.is_finite()) {
            return domain(format!(
                "omega_rabi = {} must be finite and non-negative",
                self.omega_rabi
            ));
        }
        for (name, t) in [("t1", self.t1), ("t_phi", self.t_phi)] {
            if let Some(t) = t {
                if !(t > 0.0) {
                    return domain(format!("{name} = {t} must be positive"));
                }
            }
        }
        Ok(())
    }
}

/// Two-qubit coupling through a right-moving and a left-moving magnon mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectionalConfig {
    pub j_r: f64,
    pub j_l: f64,
    /// `k_{q,R} r_{2,1}`.
    pub phase_r: f64,
    /// Phase carried by the left-moving hopping term `e^{i phase_l} s1+ s2-`.
    pub phase_l: f64,
}

impl DirectionalConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.j_r >= 0.0 && self.j_l >= 0.0) || !self.j_r.is_finite() || !self.j_l.is_finite() {
            return domain("directional rates must be finite and non-negative");
        }
        if !self.phase_r.is_finite() || !self.phase_l.is_finite() {
            return domain("directional phases must be finite");
        }
        Ok(())
    }
}

/// Sign of the magnon group velocity at the resonant wave number.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Propagation {
    /// `v > 0`: excitations flow towards larger positions.
    Right,
    /// `v < 0`: excitations flow towards smaller positions.
    Left,
}

impl Propagation {
    pub fn from_sign(sign: i32) -> Result<Self> {
        match sign {
            1 => Ok(Self::Right),
            -1 => Ok(Self::Left),
            s => domain(format!("group-velocity sign must be +1 or -1, got {s}")),
        }
    }
}
