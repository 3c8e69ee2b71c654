use crate::error::Result;
use crate::quantum_core::{embed_lowering, ComplexMatrix, C64};

use super::config::{ChainConfig, Propagation};

const I: C64 = C64::new(0.0, 1.0);

pub(crate) fn lowering_ops(n: usize) -> Result<Vec<ComplexMatrix>> {
    (0..n).map(|site| embed_lowering(site, n)).collect()
}

/// `H_Q / hbar = sum_i delta n_i + Omega (s_i+ + s_i-)`.
pub fn build_drive_hamiltonian(cfg: &ChainConfig) -> Result<ComplexMatrix> {
    cfg.validate()?;
    let dim = cfg.hilbert_dim();
    let mut h = ComplexMatrix::zeros(dim, dim);
    for s in lowering_ops(cfg.n_qubits)? {
        let sp = s.adjoint();
        h += &(&sp * &s).scale_real(cfg.delta_q);
        h += &(&sp + &s).scale_real(cfg.omega_rabi);
    }
    Ok(h)
}

/// Born-Markov coupling matrix between qubits. The diagonal is `J_q / 2`; the
/// downstream triangle carries `J_q e^{i (phi_i - phi_j)}`, the upstream one
/// vanishes.
pub fn coupling_matrix(cfg: &ChainConfig, propagation: Propagation) -> Result<ComplexMatrix> {
    cfg.validate()?;
    let n = cfg.n_qubits;
    Ok(ComplexMatrix::from_fn(n, n, |i, j| {
        let downstream = match propagation {
            Propagation::Right => i > j,
            Propagation::Left => i < j,
        };
        if i == j {
            C64::new(cfg.j_q / 2.0, 0.0)
        } else if downstream {
            C64::from_polar(cfg.j_q, cfg.phases[i] - cfg.phases[j])
        } else {
            C64::new(0.0, 0.0)
        }
    }))
}

/// `-i sum_{i,j} J_{i,j} s_i+ s_j-`.
pub(crate) fn hamiltonian_from_coupling(
    coupling: &ComplexMatrix,
    lowering: &[ComplexMatrix],
) -> ComplexMatrix {
    let dim = lowering[0].rows();
    let mut h = ComplexMatrix::zeros(dim, dim);
    for (i, si) in lowering.iter().enumerate() {
        let sp = si.adjoint();
        for (j, sj) in lowering.iter().enumerate() {
            let c = coupling.get(i, j);
            if c != C64::new(0.0, 0.0) {
                h += &(&sp * sj).scale(-I * c);
            }
        }
    }
    h
}

pub(crate) fn jump_from_phases(
    j_q: f64,
    phases: &[f64],
    lowering: &[ComplexMatrix],
) -> ComplexMatrix {
    let dim = lowering[0].rows();
    let mut l = ComplexMatrix::zeros(dim, dim);
    for (s, &phase) in lowering.iter().zip(phases) {
        l += &s.scale(C64::from_polar(j_q.sqrt(), -phase));
    }
    l
}

/// Non-Hermitian `(H_loc + H_uni) / hbar` for right-moving magnons.
pub fn build_effective_hamiltonian(cfg: &ChainConfig) -> Result<ComplexMatrix> {
    let coupling = coupling_matrix(cfg, Propagation::Right)?;
    Ok(hamiltonian_from_coupling(
        &coupling,
        &lowering_ops(cfg.n_qubits)?,
    ))
}

/// Collective jump operator `sum_i sqrt(J_q) e^{-i phi_i} s_i-`.
pub fn build_collective_jump(cfg: &ChainConfig) -> Result<ComplexMatrix> {
    cfg.validate()?;
    Ok(jump_from_phases(
        cfg.j_q,
        &cfg.phases,
        &lowering_ops(cfg.n_qubits)?,
    ))
}
