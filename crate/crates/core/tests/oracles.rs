mod common;

use common::{c, random_chain, random_density, random_hermitian, taylor_expm, MasterEquation};
use magnon_entangle::cascade_dynamics::{
    assemble_liouvillian, dark_state, effective_spectrum, excited_population, propagate,
    steady_state, ChainConfig,
};
use magnon_entangle::entangle_protocol::{ground_state, transient_overlap};
use magnon_entangle::magnonics_de::{
    dispersion_omega, group_velocity, polder_susceptibility, resonant_wavenumber, MaterialFilm, MU0,
};
use magnon_entangle::quantum_core::{
    basis_index, fidelity_pure, matrix_exponential, ComplexMatrix, DensityMatrix,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn pade_exponential_matches_taylor_series() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for scale in [0.01, 0.3, 2.0, 15.0, 120.0] {
        let h = random_hermitian(&mut rng, 4);
        let g = random_hermitian(&mut rng, 4);
        // Generic non-normal, non-Hermitian argument.
        let m = (&h.scale(c(0.0, -1.0)) + &g.scale_real(0.3)).scale_real(scale / 4.0);
        let p = matrix_exponential(&m).unwrap();
        let t = taylor_expm(&m);
        let rel = p.max_abs_diff(&t) / t.max_abs().max(1.0);
        assert!(rel < 1e-10, "scale {scale}: relative deviation {rel:e}");
    }
}

#[test]
fn liouvillian_exponential_matches_taylor_series() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..5 {
        let liou = assemble_liouvillian(&random_chain(&mut rng, true)).unwrap();
        let m = liou.matrix().scale_real(3.0);
        let rel = matrix_exponential(&m)
            .unwrap()
            .max_abs_diff(&taylor_expm(&m));
        assert!(rel < 1e-10, "deviation {rel:e}");
    }
}

#[test]
fn propagation_matches_runge_kutta() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for with_dec in [false, true] {
        for _ in 0..4 {
            let cfg = random_chain(&mut rng, with_dec);
            let rho0 = random_density(&mut rng, 4);
            let t = 2.5;
            let exact = propagate(&assemble_liouvillian(&cfg).unwrap(), &rho0, t).unwrap();
            let oracle = MasterEquation::new(&cfg).rk4(rho0.matrix(), t, 5000);
            let dev = exact.matrix().max_abs_diff(&oracle);
            assert!(dev < 1e-9, "{cfg:?}: deviation {dev:e}");
        }
    }
}

#[test]
fn three_qubit_cascade_matches_runge_kutta() {
    let cfg = ChainConfig {
        n_qubits: 3,
        delta_q: 0.2,
        omega_rabi: 0.7,
        j_q: 1.0,
        phases: vec![0.0, 0.4, 1.3],
        t1: Some(20.0),
        t_phi: None,
    };
    let rho0 = DensityMatrix::basis_projector(8, 0).unwrap();
    let exact = propagate(&assemble_liouvillian(&cfg).unwrap(), &rho0, 1.5).unwrap();
    let oracle = MasterEquation::new(&cfg).rk4(rho0.matrix(), 1.5, 4000);
    assert!(exact.matrix().max_abs_diff(&oracle) < 1e-9);
}

#[test]
fn excitation_transfer_matches_runge_kutta() {
    // Undriven: |10> feeds the downstream qubit.
    let cfg = ChainConfig::pair(1.0, 0.0);
    let liou = assemble_liouvillian(&cfg).unwrap();
    let rho0 = DensityMatrix::basis_projector(4, basis_index(&[1, 0])).unwrap();
    let eq = MasterEquation::new(&cfg);
    for t in [0.5, 1.0, 2.0, 4.0] {
        let exact = excited_population(&propagate(&liou, &rho0, t).unwrap(), 1, 2).unwrap();
        let oracle = DensityMatrix::new(eq.rk4(rho0.matrix(), t, 8000)).unwrap();
        let reference = excited_population(&oracle, 1, 2).unwrap();
        assert!(
            (exact - reference).abs() < 1e-8,
            "t = {t}: {exact} vs {reference}"
        );
    }
}

#[test]
fn steady_state_matches_long_time_limit() {
    let mut rng = ChaCha8Rng::seed_from_u64(19);
    for _ in 0..5 {
        let cfg = random_chain(&mut rng, true);
        let liou = assemble_liouvillian(&cfg).unwrap();
        let ss = steady_state(&liou).unwrap();
        let late = propagate(&liou, &random_density(&mut rng, 4), 2000.0).unwrap();
        assert!(ss.matrix().max_abs_diff(late.matrix()) < 1e-9);
    }
}

#[test]
fn dark_state_fidelity_from_steady_state() {
    for zeta in [0.1, 0.27, 0.8, 1.7] {
        let liou = assemble_liouvillian(&ChainConfig::from_zeta(zeta)).unwrap();
        let f = fidelity_pure(&steady_state(&liou).unwrap(), &dark_state(zeta).unwrap()).unwrap();
        assert!((f - 1.0).abs() < 1e-8);
    }
}

#[test]
fn transient_overlap_reaches_steady_state() {
    let zeta = 0.27;
    let curve = transient_overlap(zeta, &[0.0, 2000.0]).unwrap();
    assert!((curve[0].1 - zeta / (zeta * zeta + 1.0f64).sqrt()).abs() < 1e-12);
    // Oracle: direct overlap of the numerically solved steady state.
    let ss = steady_state(&assemble_liouvillian(&ChainConfig::from_zeta(zeta)).unwrap()).unwrap();
    let oracle = fidelity_pure(&ss, &dark_state(zeta).unwrap()).unwrap();
    assert!((curve[1].1 - oracle).abs() < 1e-6);
    assert!(ground_state().matrix().trace().re == 1.0);
}

#[test]
fn spectrum_against_characteristic_polynomial_oracle() {
    // det(H - w) of the 4x4 effective Hamiltonian evaluated by cofactor
    // expansion vanishes at each closed-form eigenvalue.
    fn det4(m: &ComplexMatrix) -> magnon_entangle::quantum_core::C64 {
        let n = 4;
        let mut total = c(0.0, 0.0);
        let perms = permutations(n);
        for p in perms {
            let sign = if inversions(&p).is_multiple_of(2) {
                1.0
            } else {
                -1.0
            };
            let mut prod = c(sign, 0.0);
            for (i, &j) in p.iter().enumerate() {
                prod *= m.get(i, j);
            }
            total += prod;
        }
        total
    }
    fn permutations(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in permutations(n - 1) {
            for pos in 0..=p.len() {
                let mut q = p.clone();
                q.insert(pos, n - 1);
                out.push(q);
            }
        }
        out
    }
    fn inversions(p: &[usize]) -> usize {
        (0..p.len())
            .flat_map(|i| (i + 1..p.len()).map(move |j| (i, j)))
            .filter(|&(i, j)| p[i] > p[j])
            .count()
    }

    for r in [0.5, 1.0, 2.0, 4.0, 8.0] {
        let cfg = ChainConfig::pair(2.0 * r, 1.0);
        let eq_h = {
            let x = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
            let sm = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
            let id = ComplexMatrix::identity(2);
            let k = magnon_entangle::quantum_core::kron;
            let (s1, s2) = (k(&sm, &id), k(&id, &sm));
            let mut h = &k(&x, &id) + &k(&id, &x);
            h += &(&s1.adjoint() * &s1).scale(c(0.0, -r));
            h += &(&s2.adjoint() * &s2).scale(c(0.0, -r));
            h += &(&s2.adjoint() * &s1).scale(c(0.0, -2.0 * r));
            h
        };
        let sp = effective_spectrum(&cfg).unwrap();
        let scale = 1.0 + r.powi(4);
        for w in sp.eigenvalues {
            let shifted = &eq_h - &ComplexMatrix::identity(4).scale(w);
            assert!(det4(&shifted).norm() < 1e-10 * scale, "R = {r}, w = {w}");
        }
    }
}

#[test]
fn susceptibilities_match_direct_formulas() {
    let film = MaterialFilm::table_one();
    let (wh0, wm) = (film.gamma_s * film.mu0_h0, film.gamma_s * MU0 * film.m_s);
    for (omega, k) in [(1.63e10, 4.79e6), (9e9, 1e6), (2e10, -3e7)] {
        let whp = wh0 + wm * film.d_ex * k * k;
        let den = whp * whp - omega * omega;
        let chi = polder_susceptibility(&film, omega, k).unwrap();
        assert!((chi.chi_d - wm * whp / den).abs() < 1e-12 * chi.chi_d.abs());
        assert!((chi.chi_a - omega * wm / den).abs() < 1e-12 * chi.chi_a.abs());
        assert!((chi.chi_a / chi.chi_d - omega / whp).abs() < 1e-12);
    }
}

#[test]
fn group_velocity_matches_finite_differences() {
    let film = MaterialFilm::table_one();
    let mut k: f64 = 1e4;
    while k < 1e9 {
        for kk in [k, -k] {
            let h = 1e-6 * kk.abs();
            let fd =
                (dispersion_omega(&film, kk + h) - dispersion_omega(&film, kk - h)) / (2.0 * h);
            let v = group_velocity(&film, kk).unwrap();
            assert!((v - fd).abs() < 1e-6 * v.abs(), "k = {kk}: {v} vs {fd}");
        }
        k *= 1.7;
    }
}

#[test]
fn resonance_matches_hand_evaluation() {
    let film = MaterialFilm::table_one();
    let omega_minus = film.d0 - film.gamma_s * film.mu0_h0;
    let k = resonant_wavenumber(&film, omega_minus).unwrap();
    // Independent evaluation of the closed-form dispersion.
    let (wh, wm) = (film.gamma_s * film.mu0_h0, film.gamma_s * MU0 * film.m_s);
    let whp = wh + wm * film.d_ex * k * k;
    let w = (whp * (whp + wm) + wm * wm / 4.0 * (1.0 - (-2.0 * k * film.d).exp())).sqrt();
    assert!((w - omega_minus).abs() < 1e-9 * omega_minus);
}
