//! Independent reference implementations used by the integration tests.
#![allow(dead_code)]

use magnon_entangle::cascade_dynamics::ChainConfig;
use magnon_entangle::quantum_core::{embed_lowering, ComplexMatrix, DensityMatrix, C64};
use rand::Rng;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Truncated Taylor series of `exp(m)` with scaling and squaring by hand.
pub fn taylor_expm(m: &ComplexMatrix) -> ComplexMatrix {
    let n = m.rows();
    let norm = m.norm_one();
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let a = m.scale_real(0.5f64.powi(squarings as i32));
    let mut term = ComplexMatrix::identity(n);
    let mut sum = ComplexMatrix::identity(n);
    for k in 1..40 {
        term = term.matmul(&a).scale_real(1.0 / k as f64);
        sum += &term;
    }
    for _ in 0..squarings {
        sum = sum.matmul(&sum);
    }
    sum
}

/// Right-hand side of the master equation in plain operator form, built
/// straight from the chain parameters.
pub struct MasterEquation {
    h: ComplexMatrix,
    h_dag: ComplexMatrix,
    jumps: Vec<ComplexMatrix>,
}

impl MasterEquation {
    pub fn new(cfg: &ChainConfig) -> Self {
        let n = cfg.n_qubits;
        let dim = 1 << n;
        let s: Vec<ComplexMatrix> = (0..n).map(|i| embed_lowering(i, n).unwrap()).collect();
        let mut h = ComplexMatrix::zeros(dim, dim);
        for si in &s {
            let sp = si.adjoint();
            h += &(&sp * si).scale_real(cfg.delta_q);
            h += &(&sp + si).scale_real(cfg.omega_rabi);
            h += &(&sp * si).scale(c(0.0, -cfg.j_q / 2.0));
        }
        for i in 0..n {
            for j in 0..i {
                let hop = C64::from_polar(cfg.j_q, cfg.phases[i] - cfg.phases[j]);
                h += &(&s[i].adjoint() * &s[j]).scale(c(0.0, -1.0) * hop);
            }
        }
        let mut collective = ComplexMatrix::zeros(dim, dim);
        for (si, phi) in s.iter().zip(&cfg.phases) {
            collective += &si.scale(C64::from_polar(cfg.j_q.sqrt(), -phi));
        }
        let mut jumps = vec![collective];
        for si in &s {
            if let Some(t1) = cfg.t1 {
                jumps.push(si.scale_real((1.0 / t1).sqrt()));
            }
            if let Some(tp) = cfg.t_phi {
                jumps.push((&si.adjoint() * si).scale_real((1.0 / tp).sqrt()));
            }
        }
        // Jump terms enter H through the anti-commutator; the collective one
        // is already contained in the cascaded H.
        for l in jumps.iter().skip(1) {
            h += &(&l.adjoint() * l).scale(c(0.0, -0.5));
        }
        let h_dag = h.adjoint();
        Self { h, h_dag, jumps }
    }

    pub fn rhs(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let mut out = (&(&self.h * rho) - &(rho * &self.h_dag)).scale(c(0.0, -1.0));
        for l in &self.jumps {
            out += &(&(l * rho) * &l.adjoint());
        }
        out
    }

    /// Classical fourth-order Runge-Kutta with fixed step.
    pub fn rk4(&self, rho0: &ComplexMatrix, t: f64, steps: usize) -> ComplexMatrix {
        let h = t / steps as f64;
        let mut rho = rho0.clone();
        for _ in 0..steps {
            let k1 = self.rhs(&rho);
            let k2 = self.rhs(&(&rho + &k1.scale_real(h / 2.0)));
            let k3 = self.rhs(&(&rho + &k2.scale_real(h / 2.0)));
            let k4 = self.rhs(&(&rho + &k3.scale_real(h)));
            let mut incr = k1;
            incr += &k2.scale_real(2.0);
            incr += &k3.scale_real(2.0);
            incr += &k4;
            rho += &incr.scale_real(h / 6.0);
        }
        rho
    }
}

/// Random density matrix `G G^dagger / Tr` with Gaussian-like entries.
pub fn random_density(rng: &mut impl Rng, dim: usize) -> DensityMatrix {
    let g = ComplexMatrix::from_fn(dim, dim, |_, _| {
        c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    let m = &g * &g.adjoint();
    let tr = m.trace().re;
    DensityMatrix::new(m.scale_real(1.0 / tr)).unwrap()
}

/// Random Hermitian matrix with entries in the unit box.
pub fn random_hermitian(rng: &mut impl Rng, dim: usize) -> ComplexMatrix {
    let g = ComplexMatrix::from_fn(dim, dim, |_, _| {
        c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    (&g + &g.adjoint()).scale_real(0.5)
}

/// Random two-qubit chain configuration with optional intrinsic terms.
pub fn random_chain(rng: &mut impl Rng, with_decoherence: bool) -> ChainConfig {
    let mut cfg = ChainConfig::pair(rng.gen_range(0.1..2.0), rng.gen_range(0.0..3.0));
    cfg.delta_q = rng.gen_range(-1.0..1.0);
    cfg.phases = vec![
        0.0,
        rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI),
    ];
    if with_decoherence {
        cfg.t1 = Some(rng.gen_range(1.0..100.0));
        cfg.t_phi = Some(rng.gen_range(1.0..100.0));
    }
    cfg
}
