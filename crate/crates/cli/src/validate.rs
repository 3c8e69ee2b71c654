//! Randomized invariant suites run by the `validate` subcommand.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use magnon_entangle::cascade_dynamics::{
    assemble_liouvillian, dark_state, effective_spectrum, excited_population, propagate,
    spectrum_mismatch, steady_state, ChainConfig,
};
use magnon_entangle::entangle_protocol::{protocol_time, zeta_threshold, ProtocolOverrides};
use magnon_entangle::magnonics_de::{
    boundary_residuals, coupling_constant, dispersion_omega, dissipative_rate, group_velocity,
    mode_amplitudes, MaterialFilm, Polarization, SpinModel,
};
use magnon_entangle::quantum_core::{
    basis_index, devectorize, fidelity_pure, matrix_exponential, vectorize, ComplexMatrix,
    DensityMatrix, C64,
};
use magnon_entangle::Result;

use crate::config::RunConfig;
use crate::error::CliError;
use crate::table::ResultTable;

const SEED: u64 = 0x5eed;

struct Check {
    suite: &'static str,
    name: &'static str,
    tolerance: f64,
    /// Worst observed deviation per case; a case passes when it is within
    /// `tolerance`.
    deviations: Vec<f64>,
}

fn random_hermitian(rng: &mut ChaCha8Rng, dim: usize) -> ComplexMatrix {
    let g = ComplexMatrix::from_fn(dim, dim, |_, _| {
        C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    (&g + &g.adjoint()).scale_real(0.5)
}

fn random_density(rng: &mut ChaCha8Rng, dim: usize) -> Result<DensityMatrix> {
    let g = ComplexMatrix::from_fn(dim, dim, |_, _| {
        C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    let m = &g * &g.adjoint();
    let tr = m.trace().re;
    DensityMatrix::new(m.scale_real(1.0 / tr))
}

fn random_chain(rng: &mut ChaCha8Rng, with_decoherence: bool) -> ChainConfig {
    let mut cfg = ChainConfig::pair(rng.gen_range(0.1..2.0), rng.gen_range(0.0..3.0))
        .with_phase_difference(rng.gen_range(-PI..PI));
    cfg.delta_q = rng.gen_range(-1.0..1.0);
    if with_decoherence {
        cfg.t1 = Some(rng.gen_range(1.0..100.0));
        cfg.t_phi = Some(rng.gen_range(1.0..100.0));
    }
    cfg
}

fn collect(n: usize, mut case: impl FnMut(usize) -> Result<f64>) -> Result<Vec<f64>> {
    (0..n).map(&mut case).collect()
}

fn quantum_core_checks(rng: &mut ChaCha8Rng, n: usize) -> Result<Vec<Check>> {
    let unitary = collect(n, |_| {
        let h = random_hermitian(rng, 4);
        let u = matrix_exponential(&h.scale(C64::new(0.0, -rng.gen_range(0.1..5.0))))?;
        Ok((&u * &u.adjoint()).max_abs_diff(&ComplexMatrix::identity(4)))
    })?;
    let round_trip = collect(n, |_| {
        let rho = random_density(rng, 4)?;
        Ok(devectorize(&vectorize(&rho))?
            .matrix()
            .max_abs_diff(rho.matrix()))
    })?;
    Ok(vec![
        Check {
            suite: "quantum_core",
            name: "exp(-iHt) is unitary",
            tolerance: 1e-12,
            deviations: unitary,
        },
        Check {
            suite: "quantum_core",
            name: "vectorize round trip",
            tolerance: 0.0,
            deviations: round_trip,
        },
    ])
}

fn cascade_checks(rng: &mut ChaCha8Rng, n: usize) -> Result<Vec<Check>> {
    let trace = collect(n, |i| {
        Ok(assemble_liouvillian(&random_chain(rng, i % 2 == 0))?.trace_preservation_error())
    })?;
    let mut min_eig = Vec::new();
    let mut trace_drift = Vec::new();
    for i in 0..n {
        let liou = assemble_liouvillian(&random_chain(rng, i % 2 == 0))?;
        let rho0 = random_density(rng, 4)?;
        let t = 10f64.powf(rng.gen_range(-1.0..3.0));
        let rho = propagate(&liou, &rho0, t)?;
        trace_drift.push((rho.matrix().trace().re - 1.0).abs());
        min_eig.push((-rho.min_eigenvalue()).max(0.0));
    }
    let dark = collect(n, |_| {
        let zeta = rng.gen_range(0.05..2.0);
        let liou = assemble_liouvillian(&ChainConfig::from_zeta(zeta))?;
        let psi = dark_state(zeta)?;
        let f = fidelity_pure(&steady_state(&liou)?, &psi)?;
        Ok((1.0 - f).max(liou.apply(psi.projector().matrix())?.max_abs()))
    })?;
    let upstream = collect(n, |_| {
        let liou = assemble_liouvillian(&ChainConfig::pair(rng.gen_range(0.1..5.0), 0.0))?;
        let rho0 = DensityMatrix::basis_projector(4, basis_index(&[0, 1]))?;
        excited_population(&propagate(&liou, &rho0, rng.gen_range(0.0..50.0))?, 0, 2).map(f64::abs)
    })?;
    let spectrum = collect(n, |_| {
        let r = rng.gen_range(0.2..10.0);
        let sp = effective_spectrum(&ChainConfig::pair(1.0, 0.5 / r))?;
        Ok(spectrum_mismatch(&sp.eigenvalues, &sp.numeric_eigenvalues))
    })?;
    Ok(vec![
        Check {
            suite: "cascade_dynamics",
            name: "Liouvillian preserves trace",
            tolerance: 1e-12,
            deviations: trace,
        },
        Check {
            suite: "cascade_dynamics",
            name: "propagated trace stays 1",
            tolerance: 1e-9,
            deviations: trace_drift,
        },
        Check {
            suite: "cascade_dynamics",
            name: "propagated state stays positive",
            tolerance: 1e-8,
            deviations: min_eig,
        },
        Check {
            suite: "cascade_dynamics",
            name: "dark state is the steady state",
            tolerance: 1e-8,
            deviations: dark,
        },
        Check {
            suite: "cascade_dynamics",
            name: "upstream qubit stays unexcited",
            tolerance: 1e-12,
            deviations: upstream,
        },
        Check {
            suite: "cascade_dynamics",
            name: "closed-form spectrum",
            tolerance: 1e-9,
            deviations: spectrum,
        },
    ])
}

fn protocol_checks(rng: &mut ChaCha8Rng, n: usize) -> Result<Vec<Check>> {
    let threshold = collect(n, |_| {
        let f_t = rng.gen_range(0.5..0.999);
        Ok((zeta_threshold(f_t)? - (1.0 / (f_t * f_t) - 1.0).sqrt()).abs())
    })?;
    let convergence = collect(n, |i| {
        let f_t = rng.gen_range(0.9..0.99);
        let zeta_t = zeta_threshold(f_t)?;
        let below = i % 2 == 0;
        let zeta = if below {
            zeta_t * rng.gen_range(0.3..0.9)
        } else {
            zeta_t * rng.gen_range(1.0..3.0)
        };
        let out = protocol_time(zeta, f_t, &ProtocolOverrides::default())?;
        Ok(if out.converged == below { 0.0 } else { 1.0 })
    })?;
    Ok(vec![
        Check {
            suite: "entangle_protocol",
            name: "zeta_T closed form",
            tolerance: 1e-12,
            deviations: threshold,
        },
        Check {
            suite: "entangle_protocol",
            name: "converges iff zeta < zeta_T",
            tolerance: 0.0,
            deviations: convergence,
        },
    ])
}

fn magnonics_checks(rng: &mut ChaCha8Rng, n: usize) -> Result<Vec<Check>> {
    let film = MaterialFilm::table_one();
    let random_k = |rng: &mut ChaCha8Rng| {
        let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        sign * rng.gen_range(0.05..20.0) / film.d
    };
    let boundary = collect(n, |_| {
        Ok(boundary_residuals(&mode_amplitudes(&film, random_k(rng))?)
            .into_iter()
            .fold(0.0, f64::max))
    })?;
    let chirality = collect(n, |_| {
        let k = rng.gen_range(0.05..20.0) / film.d;
        coupling_constant(&film, k, Polarization::Minus, SpinModel::SpinOne).map(f64::abs)
    })?;
    let parity = collect(n, |_| {
        let k = random_k(rng);
        Ok((dispersion_omega(&film, k) - dispersion_omega(&film, -k)).abs())
    })?;
    let velocity = collect(n, |_| {
        let k = random_k(rng);
        let h = 1e-6 * k.abs();
        let fd = (dispersion_omega(&film, k + h) - dispersion_omega(&film, k - h)) / (2.0 * h);
        let v = group_velocity(&film, k)?;
        Ok((v - fd).abs() / v.abs())
    })?;
    let base = dissipative_rate(&film, SpinModel::SpinOne)?.j_q;
    let width = collect(n, |_| {
        let scaled = MaterialFilm {
            l_y: film.l_y * rng.gen_range(0.5..4.0),
            ..film
        };
        Ok((dissipative_rate(&scaled, SpinModel::SpinOne)?.j_q - base).abs() / base)
    })?;
    Ok(vec![
        Check {
            suite: "magnonics_de",
            name: "boundary conditions",
            tolerance: 1e-9,
            deviations: boundary,
        },
        Check {
            suite: "magnonics_de",
            name: "g_(k;-) vanishes for k > 0",
            tolerance: 0.0,
            deviations: chirality,
        },
        Check {
            suite: "magnonics_de",
            name: "dispersion is even",
            tolerance: 0.0,
            deviations: parity,
        },
        Check {
            suite: "magnonics_de",
            name: "group velocity vs finite differences",
            tolerance: 1e-6,
            deviations: velocity,
        },
        Check {
            suite: "magnonics_de",
            name: "J_q independent of L_y",
            tolerance: 1e-10,
            deviations: width,
        },
    ])
}

pub fn run_suites(cfg: &RunConfig) -> std::result::Result<ResultTable, CliError> {
    let n = cfg.usize("cases");
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut checks = quantum_core_checks(&mut rng, n)?;
    checks.extend(cascade_checks(&mut rng, n)?);
    checks.extend(protocol_checks(&mut rng, n)?);
    checks.extend(magnonics_checks(&mut rng, n)?);

    let mut table = ResultTable::new(&[
        ("suite", "label"),
        ("invariant", "label"),
        ("cases", "count"),
        ("passed", "count"),
        ("worst_deviation", "same as tolerance"),
        ("tolerance", "per invariant"),
    ]);
    let mut failed = 0usize;
    for c in &checks {
        let passed = c.deviations.iter().filter(|d| **d <= c.tolerance).count();
        failed += c.deviations.len() - passed;
        let worst = c.deviations.iter().copied().fold(0.0, f64::max);
        table.push(vec![
            c.suite.into(),
            c.name.into(),
            (c.deviations.len() as f64).into(),
            (passed as f64).into(),
            worst.into(),
            c.tolerance.into(),
        ]);
    }
    table.scalar("failed", failed as f64, "count");
    Ok(table)
}
