use crate::error::{domain, Error, Result};
use crate::quantum_core::{
    devectorize_matrix, linalg, matrix_exponential, sandwich, vectorize, vectorize_matrix,
    ComplexMatrix, DensityMatrix, C64, TOLERANCES,
};

use super::builders::{
    build_drive_hamiltonian, coupling_matrix, hamiltonian_from_coupling, jump_from_phases,
    lowering_ops,
};
use super::config::{ChainConfig, DirectionalConfig, Propagation};

const I: C64 = C64::new(0.0, 1.0);

/// Generator of the density-matrix dynamics acting on column-stacked vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct LiouvillianOperator {
    hilbert_dim: usize,
    matrix: ComplexMatrix,
}

impl LiouvillianOperator {
    pub fn from_matrix(hilbert_dim: usize, matrix: ComplexMatrix) -> Result<Self> {
        let d2 = hilbert_dim * hilbert_dim;
        if matrix.rows() != d2 || matrix.cols() != d2 {
            return domain(format!(
                "Liouvillian for dimension {hilbert_dim} must be {d2}x{d2}"
            ));
        }
        Ok(Self {
            hilbert_dim,
            matrix,
        })
    }

    /// Dimension of the vectorized space, `D^2`.
    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn hilbert_dim(&self) -> usize {
        self.hilbert_dim
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// `L[rho]` as a plain matrix.
    pub fn apply(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        if rho.rows() != self.hilbert_dim || !rho.is_square() {
            return domain("operand dimension does not match the Liouvillian");
        }
        devectorize_matrix(&self.matrix.mul_vec(&vectorize_matrix(rho)))
    }

    /// Largest entry of `vec(I)^dagger L`; zero for a trace-preserving generator.
    pub fn trace_preservation_error(&self) -> f64 {
        let d = self.hilbert_dim;
        (0..self.dim())
            .map(|col| {
                (0..d)
                    .map(|k| self.matrix.get(k + d * k, col))
                    .sum::<C64>()
                    .norm()
            })
            .fold(0.0, f64::max)
    }
}

/// Accumulates superoperator terms for a fixed Hilbert dimension.
struct Assembler {
    id: ComplexMatrix,
    acc: ComplexMatrix,
}

impl Assembler {
    fn new(dim: usize) -> Self {
        Self {
            id: ComplexMatrix::identity(dim),
            acc: ComplexMatrix::zeros(dim * dim, dim * dim),
        }
    }

    /// `-i [H, rho]`.
    fn commutator(&mut self, h: &ComplexMatrix) {
        let term = &sandwich(h, &self.id) - &sandwich(&self.id, h);
        self.acc += &term.scale(-I);
    }

    /// `-i (H rho - rho H^dagger) + L rho L^dagger`.
    fn cascaded_block(&mut self, h_eff: &ComplexMatrix, jump: &ComplexMatrix) {
        let coherent = &sandwich(h_eff, &self.id) - &sandwich(&self.id, &h_eff.adjoint());
        self.acc += &coherent.scale(-I);
        self.acc += &sandwich(jump, &jump.adjoint());
    }

    /// `rate * D[A]`.
    fn dissipator(&mut self, a: &ComplexMatrix, rate: f64) {
        let ad = a.adjoint();
        let ada = &ad * a;
        let mut term = sandwich(a, &ad);
        term += &sandwich(&ada, &self.id).scale_real(-0.5);
        term += &sandwich(&self.id, &ada).scale_real(-0.5);
        self.acc += &term.scale_real(rate);
    }

    fn intrinsic(&mut self, cfg: &ChainConfig, lowering: &[ComplexMatrix]) {
        for s in lowering {
            if let Some(t1) = cfg.t1 {
                self.dissipator(s, 1.0 / t1);
            }
            if let Some(t_phi) = cfg.t_phi {
                self.dissipator(&(&s.adjoint() * s), 1.0 / t_phi);
            }
        }
    }

    fn finish(self, dim: usize) -> LiouvillianOperator {
        LiouvillianOperator {
            hilbert_dim: dim,
            matrix: self.acc,
        }
    }
}

/// Master-equation generator for right-moving magnons plus optional
/// intrinsic decay (`1/T1 D[s-]`) and dephasing (`1/T_phi D[s+ s-]`).
pub fn assemble_liouvillian(cfg: &ChainConfig) -> Result<LiouvillianOperator> {
    cfg.validate()?;
    let dim = cfg.hilbert_dim();
    let lowering = lowering_ops(cfg.n_qubits)?;
    let mut asm = Assembler::new(dim);
    asm.commutator(&build_drive_hamiltonian(cfg)?);
    let h_eff = hamiltonian_from_coupling(&coupling_matrix(cfg, Propagation::Right)?, &lowering);
    asm.cascaded_block(&h_eff, &jump_from_phases(cfg.j_q, &cfg.phases, &lowering));
    asm.intrinsic(cfg, &lowering);
    Ok(asm.finish(dim))
}

/// Two-qubit generator with one right-moving and one left-moving channel.
/// The drive, detuning and intrinsic decoherence come from `cfg`; its `j_q`
/// and `phases` are replaced by the rates and phases of `dir`.
pub fn build_directional_liouvillian(
    cfg: &ChainConfig,
    dir: &DirectionalConfig,
) -> Result<LiouvillianOperator> {
    if cfg.n_qubits != 2 {
        return Err(Error::UnsupportedConfiguration(format!(
            "directional coupling is defined for two qubits, got {}",
            cfg.n_qubits
        )));
    }
    cfg.validate()?;
    dir.validate()?;
    let dim = cfg.hilbert_dim();
    let lowering = lowering_ops(2)?;
    let mut asm = Assembler::new(dim);
    asm.commutator(&build_drive_hamiltonian(cfg)?);

    let right = ChainConfig {
        j_q: dir.j_r,
        phases: vec![0.0, dir.phase_r],
        ..cfg.clone()
    };
    let h_r = hamiltonian_from_coupling(&coupling_matrix(&right, Propagation::Right)?, &lowering);
    asm.cascaded_block(&h_r, &jump_from_phases(dir.j_r, &right.phases, &lowering));

    if dir.j_l != 0.0 {
        // Position phases (0, -phase_l) put e^{i phase_l} on s1+ s2- and keep
        // the jump operator consistent with the hopping term.
        let left = ChainConfig {
            j_q: dir.j_l,
            phases: vec![0.0, -dir.phase_l],
            ..cfg.clone()
        };
        let h_l = hamiltonian_from_coupling(&coupling_matrix(&left, Propagation::Left)?, &lowering);
        asm.cascaded_block(&h_l, &jump_from_phases(dir.j_l, &left.phases, &lowering));
    }

    asm.intrinsic(cfg, &lowering);
    Ok(asm.finish(dim))
}

/// Hermitizes a propagated matrix and repairs small trace drift.
pub(crate) fn finalize_state(m: ComplexMatrix) -> Result<DensityMatrix> {
    let herm = (&m + &m.adjoint()).scale_real(0.5);
    let trace = herm.trace().re;
    let drift = (trace - 1.0).abs();
    if !(drift <= TOLERANCES.trace_failure) {
        return Err(Error::NumericalInstability(format!(
            "trace drifted to {trace}"
        )));
    }
    if drift > TOLERANCES.trace_repair {
        return Ok(DensityMatrix::from_trusted(herm.scale_real(1.0 / trace)));
    }
    Ok(DensityMatrix::from_trusted(herm))
}

/// `rho(t) = exp(L t) rho0`.
pub fn propagate(
    liou: &LiouvillianOperator,
    rho0: &DensityMatrix,
    t: f64,
) -> Result<DensityMatrix> {
    if !(t >= 0.0) || !t.is_finite() {
        return domain(format!(
            "propagation time {t} must be finite and non-negative"
        ));
    }
    if rho0.dim() != liou.hilbert_dim {
        return domain("initial state dimension does not match the Liouvillian");
    }
    if t == 0.0 {
        return Ok(rho0.clone());
    }
    let step = matrix_exponential(&liou.matrix.scale_real(t))?;
    finalize_state(devectorize_matrix(&step.mul_vec(&vectorize(rho0)))?)
}

/// Number of singular values of `L` below the null-space threshold.
pub fn null_space_dimension(liou: &LiouvillianOperator) -> usize {
    let s = linalg::singular_values(&liou.matrix);
    let scale = s.first().copied().unwrap_or(0.0).max(f64::MIN_POSITIVE);
    s.iter()
        .filter(|&&x| x <= TOLERANCES.null_space * scale)
        .count()
}

/// Unique stationary state, from the linear system with one population
/// equation replaced by the trace condition.
pub fn steady_state(liou: &LiouvillianOperator) -> Result<DensityMatrix> {
    let nullity = null_space_dimension(liou);
    if nullity != 1 {
        return Err(Error::DegenerateSteadyState { dimension: nullity });
    }
    let d = liou.hilbert_dim;
    let n = liou.dim();
    let mut bordered = liou.matrix.clone();
    for col in 0..n {
        bordered.set(0, col, C64::new(0.0, 0.0));
    }
    for k in 0..d {
        bordered.set(0, k + d * k, C64::new(1.0, 0.0));
    }
    let mut rhs = vec![C64::new(0.0, 0.0); n];
    rhs[0] = C64::new(1.0, 0.0);
    let v = linalg::solve(&bordered, &rhs)?;

    let residual = liou
        .matrix
        .mul_vec(&v)
        .iter()
        .map(|z| z.norm_sqr())
        .sum::<f64>()
        .sqrt();
    let scale = liou.matrix.norm_one().max(1.0);
    if residual > 1e-10 * scale {
        return Err(Error::NumericalInstability(format!(
            "steady-state residual {residual:e}"
        )));
    }
    finalize_state(devectorize_matrix(&v)?)
}

/// Cached `exp(L h)` for repeated uniform steps on vectorized states.
#[derive(Debug, Clone)]
pub struct StepPropagator {
    step: f64,
    matrix: ComplexMatrix,
}

impl StepPropagator {
    pub fn new(liou: &LiouvillianOperator, step: f64) -> Result<Self> {
        if !(step > 0.0) || !step.is_finite() {
            return domain(format!("step {step} must be positive and finite"));
        }
        Ok(Self {
            step,
            matrix: matrix_exponential(&liou.matrix.scale_real(step))?,
        })
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    /// Advances a column-stacked state by one step in place.
    pub fn advance(&self, v: &mut Vec<C64>) {
        let mut out = vec![C64::new(0.0, 0.0); v.len()];
        self.matrix.mul_vec_into(v, &mut out);
        *v = out;
    }

    /// Writes the advanced state into `out`.
    pub fn advance_into(&self, v: &[C64], out: &mut [C64]) {
        self.matrix.mul_vec_into(v, out);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cascade_dynamics::{dark_state, singlet, ChainConfig};
    use crate::quantum_core::{basis_index, PureState};

    fn excited_pair() -> DensityMatrix {
        DensityMatrix::basis_projector(4, basis_index(&[1, 1])).unwrap()
    }

    #[test]
    fn generators_preserve_trace() {
        let cfg = ChainConfig::pair(1.3, 0.7)
            .with_phase_difference(0.4)
            .with_t1(Some(5.0))
            .with_t_phi(Some(3.0));
        assert!(
            assemble_liouvillian(&cfg)
                .unwrap()
                .trace_preservation_error()
                < 1e-13
        );
        let dir = DirectionalConfig {
            j_r: 1.0,
            j_l: 0.3,
            phase_r: 0.2,
            phase_l: 1.1,
        };
        assert!(
            build_directional_liouvillian(&cfg, &dir)
                .unwrap()
                .trace_preservation_error()
                < 1e-13
        );
    }

    #[test]
    fn single_qubit_decays_at_rate_j() {
        let cfg = ChainConfig {
            n_qubits: 1,
            delta_q: 0.0,
            omega_rabi: 0.0,
            j_q: 1.0,
            phases: vec![0.0],
            t1: None,
            t_phi: None,
        };
        let liou = assemble_liouvillian(&cfg).unwrap();
        let rho = propagate(&liou, &DensityMatrix::basis_projector(2, 1).unwrap(), 1.0).unwrap();
        assert!((rho.matrix().get(1, 1).re - (-1.0f64).exp()).abs() < 1e-10);
    }

    #[test]
    fn upstream_qubit_ignores_downstream() {
        // Only qubit 2 excited: qubit 1 must stay in |0>.
        let liou = assemble_liouvillian(&ChainConfig::pair(1.0, 0.0)).unwrap();
        let rho0 = DensityMatrix::basis_projector(4, basis_index(&[0, 1])).unwrap();
        let rho = propagate(&liou, &rho0, 2.0).unwrap();
        assert!(
            rho.matrix()
                .get(basis_index(&[1, 0]), basis_index(&[1, 0]))
                .norm()
                < 1e-14
        );
        assert!(
            (rho.matrix()
                .get(basis_index(&[0, 1]), basis_index(&[0, 1]))
                .re
                - (-2.0f64).exp())
            .abs()
                < 1e-10
        );
    }

    #[test]
    fn dark_state_is_stationary() {
        let zeta = 0.27;
        let cfg = ChainConfig::from_zeta(zeta);
        let liou = assemble_liouvillian(&cfg).unwrap();
        let rho = dark_state(zeta).unwrap().projector();
        assert!(liou.apply(rho.matrix()).unwrap().max_abs() < 1e-14);
        let ss = steady_state(&liou).unwrap();
        assert!((ss.overlap(&dark_state(zeta).unwrap()).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn undriven_pair_relaxes_to_ground() {
        let liou = assemble_liouvillian(&ChainConfig::pair(1.0, 0.0).with_t1(Some(10.0))).unwrap();
        let ss = steady_state(&liou).unwrap();
        assert!((ss.matrix().get(0, 0).re - 1.0).abs() < 1e-10);
    }

    #[test]
    fn bidirectional_balanced_coupling_is_degenerate() {
        let cfg = ChainConfig::pair(1.0, 0.6);
        let dir = DirectionalConfig {
            j_r: 1.0,
            j_l: 1.0,
            phase_r: 0.0,
            phase_l: 0.0,
        };
        let liou = build_directional_liouvillian(&cfg, &dir).unwrap();
        // The singlet is then decoupled from both channels.
        assert!(
            liou.apply(singlet().projector().matrix())
                .unwrap()
                .max_abs()
                < 1e-14
        );
        assert!(
            matches!(steady_state(&liou), Err(Error::DegenerateSteadyState { dimension: d }) if d >= 2)
        );
    }

    #[test]
    fn directional_without_left_channel_reduces_to_chain() {
        let cfg = ChainConfig::pair(0.8, 0.5).with_t_phi(Some(40.0));
        let dir = DirectionalConfig {
            j_r: 0.8,
            j_l: 0.0,
            phase_r: 0.7,
            phase_l: 2.0,
        };
        let a = build_directional_liouvillian(&cfg, &dir).unwrap();
        let b = assemble_liouvillian(&cfg.clone().with_phase_difference(0.7)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn directional_rejects_three_qubits() {
        let cfg = ChainConfig {
            n_qubits: 3,
            phases: vec![0.0; 3],
            ..ChainConfig::pair(1.0, 1.0)
        };
        let dir = DirectionalConfig {
            j_r: 1.0,
            j_l: 0.0,
            phase_r: 0.0,
            phase_l: 0.0,
        };
        assert!(matches!(
            build_directional_liouvillian(&cfg, &dir),
            Err(Error::UnsupportedConfiguration(_))
        ));
    }

    #[test]
    fn step_propagator_matches_direct_propagation() {
        let liou = assemble_liouvillian(&ChainConfig::from_zeta(0.3)).unwrap();
        let sp = StepPropagator::new(&liou, 0.25).unwrap();
        let mut v = vectorize(&excited_pair());
        for _ in 0..8 {
            sp.advance(&mut v);
        }
        let direct = propagate(&liou, &excited_pair(), 2.0).unwrap();
        assert!(
            devectorize_matrix(&v)
                .unwrap()
                .max_abs_diff(direct.matrix())
                < 1e-12
        );
    }

    #[test]
    fn zero_time_returns_initial_state() {
        let liou = assemble_liouvillian(&ChainConfig::pair(1.0, 1.0)).unwrap();
        let psi = PureState::basis(4, 3).unwrap();
        let rho0 = psi.projector();
        assert_eq!(propagate(&liou, &rho0, 0.0).unwrap(), rho0);
        assert!(propagate(&liou, &rho0, -1.0).is_err());
    }
}
