//! One runner per subcommand. Dimensionless experiments fix `J_q = 1`.

use rayon::prelude::*;

use magnon_entangle::cascade_dynamics::{
    assemble_liouvillian, effective_spectrum, excited_population, propagate, ChainConfig,
};
use magnon_entangle::entangle_protocol::{
    benchmark_coherence, directional_map, optimize_zeta, phase_sensitivity, protocol_time,
    steady_overlap, transient_overlap, zeta_sensitivity, zeta_threshold, BenchmarkOptions,
    CoherenceKind, OptimizeOptions, ProtocolOverrides,
};
use magnon_entangle::magnonics_de::{
    coupling_constant, dispersion_omega, dissipative_rate, field_fluctuation, group_velocity,
    mode_amplitudes, MaterialFilm, Polarization, SpinModel,
};
use magnon_entangle::quantum_core::{basis_index, DensityMatrix};

use crate::config::{Experiment, RunConfig};
use crate::error::CliError;
use crate::table::{Cell, Column, ResultTable};

const TIME: &str = "1/J_q";
const DIMLESS: &str = "dimensionless";
const FLAG: &str = "boolean";

type Outcome = Result<ResultTable, CliError>;

pub fn run_experiment(cfg: &RunConfig) -> Outcome {
    let mut table = match cfg.experiment {
        Experiment::Dynamics => dynamics(cfg),
        Experiment::ProtocolCurve => protocol_curve(cfg),
        Experiment::Benchmark => benchmark(cfg),
        Experiment::Directional => directional(cfg),
        Experiment::NvYig => nv_yig(cfg),
        Experiment::Transient => transient(cfg),
        Experiment::ZetaVar => zeta_var(cfg),
        Experiment::DistanceVar => distance_var(cfg),
        Experiment::Spectrum => spectrum(cfg),
        Experiment::Validate => crate::validate::run_suites(cfg),
    }?;
    table.echo(cfg);
    Ok(table)
}

/// `n` points on `[a, b]`; a single point sits at `a`.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    (0..n)
        .map(|i| {
            if i + 1 == n {
                b
            } else {
                a + (b - a) * i as f64 / (n - 1) as f64
            }
        })
        .collect()
}

/// Log-spaced points with both end points reproduced exactly.
pub fn logspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    let mut g: Vec<f64> = linspace(a.ln(), b.ln(), n)
        .into_iter()
        .map(f64::exp)
        .collect();
    g[0] = a;
    if n > 1 {
        g[n - 1] = b;
    }
    g
}

fn ordered(lo_key: &str, lo: f64, hi_key: &str, hi: f64) -> Result<(), CliError> {
    if lo > hi {
        return Err(CliError::config(format!(
            "{lo_key} = {lo} exceeds {hi_key} = {hi}"
        )));
    }
    Ok(())
}

fn dynamics(cfg: &RunConfig) -> Outcome {
    let mut chain = ChainConfig::pair(1.0, 1.0 / cfg.f64("j_over_omega"))
        .with_phase_difference(cfg.f64("phase"))
        .with_t1(cfg.opt_f64("t1"))
        .with_t_phi(cfg.opt_f64("t_phi"));
    chain.delta_q = cfg.f64("delta");
    let liou = assemble_liouvillian(&chain)?;
    let from_10 = DensityMatrix::basis_projector(4, basis_index(&[1, 0]))?;
    let from_01 = DensityMatrix::basis_projector(4, basis_index(&[0, 1]))?;
    let times = linspace(0.0, cfg.f64("t_max"), cfg.usize("points"));
    let rows: Vec<Vec<Cell>> = times
        .par_iter()
        .map(|&t| {
            let a = propagate(&liou, &from_10, t)?;
            let b = propagate(&liou, &from_01, t)?;
            Ok(vec![
                t.into(),
                excited_population(&a, 0, 2)?.into(),
                excited_population(&a, 1, 2)?.into(),
                excited_population(&b, 0, 2)?.into(),
                excited_population(&b, 1, 2)?.into(),
            ])
        })
        .collect::<Result<_, magnon_entangle::Error>>()?;
    let mut table = ResultTable::new(&[
        ("t", TIME),
        ("p1_from_10", DIMLESS),
        ("p2_from_10", DIMLESS),
        ("p1_from_01", DIMLESS),
        ("p2_from_01", DIMLESS),
    ]);
    rows.into_iter().for_each(|r| table.push(r));
    table.scalar("omega_rabi", chain.omega_rabi, "J_q");
    Ok(table)
}

fn overrides(cfg: &RunConfig) -> ProtocolOverrides {
    ProtocolOverrides {
        t1: cfg.opt_f64("t1"),
        t_phi: cfg.opt_f64("t_phi"),
        ..ProtocolOverrides::default()
    }
}

fn protocol_curve(cfg: &RunConfig) -> Outcome {
    let f_t = cfg.f64("f_threshold");
    let zeta_t = zeta_threshold(f_t)?;
    let lo = cfg.f64("zeta_min");
    let hi = cfg.opt_f64("zeta_max").unwrap_or(zeta_t * (1.0 - 1e-3));
    ordered("zeta_min", lo, "zeta_max", hi)?;
    let ov = overrides(cfg);
    let grid = logspace(lo, hi, cfg.usize("points"));
    let outcomes = grid
        .par_iter()
        .map(|&z| protocol_time(z, f_t, &ov))
        .collect::<Result<Vec<_>, _>>()?;
    let mut table = ResultTable::new(&[("zeta", DIMLESS), ("t_p", TIME), ("converged", FLAG)]);
    for o in &outcomes {
        table.push(vec![
            o.zeta.into(),
            Cell::from(o.converged.then_some(o.t_protocol)),
            o.converged.into(),
        ]);
    }
    let best = outcomes
        .iter()
        .filter(|o| o.converged)
        .min_by(|a, b| a.t_protocol.total_cmp(&b.t_protocol));
    table.scalar("zeta_threshold", zeta_t, DIMLESS);
    table.scalar(
        "grid_zeta_at_min",
        best.map_or(f64::NAN, |o| o.zeta),
        DIMLESS,
    );
    table.scalar(
        "grid_t_p_min",
        best.map_or(f64::NAN, |o| o.t_protocol),
        TIME,
    );
    let opt = optimize_zeta(f_t, &OptimizeOptions::default(), &ov)?;
    table.scalar("zeta_opt", opt.zeta_min, DIMLESS);
    table.scalar("t_p_opt", opt.t_p_min, TIME);
    Ok(table)
}

fn benchmark(cfg: &RunConfig) -> Outcome {
    let opts = BenchmarkOptions::default();
    let mut table = ResultTable::new(&[
        ("f_threshold", DIMLESS),
        ("t1_required", TIME),
        ("zeta_at_t1", DIMLESS),
        ("t_phi_required", TIME),
        ("zeta_at_t_phi", DIMLESS),
    ]);
    for &f_t in cfg.list("f_thresholds") {
        let t1 = benchmark_coherence(CoherenceKind::T1, f_t, &opts)?;
        let tphi = benchmark_coherence(CoherenceKind::Tphi, f_t, &opts)?;
        table.push(vec![
            f_t.into(),
            t1.min_time.into(),
            t1.zeta_at_min.into(),
            tphi.min_time.into(),
            tphi.zeta_at_min.into(),
        ]);
    }
    Ok(table)
}

fn directional(cfg: &RunConfig) -> Outcome {
    let (jl_lo, jl_hi) = (cfg.f64("jl_min"), cfg.f64("jl_max"));
    ordered("jl_min", jl_lo, "jl_max", jl_hi)?;
    let jl = logspace(jl_lo, jl_hi, cfg.usize("jl_points"));
    let phases = linspace(0.0, cfg.f64("phase_max"), cfg.usize("phase_points"));
    let map = directional_map(cfg.f64("f_threshold"), &jl, &phases, None)?;
    let mut table = ResultTable::new(&[
        ("jl_ratio", DIMLESS),
        ("phase_l", "rad"),
        ("t_p_ratio", DIMLESS),
        ("converged", FLAG),
    ]);
    for c in &map.cells {
        table.push(vec![
            c.jl_ratio.into(),
            c.phase.into(),
            c.ratio.into(),
            c.ratio.is_some().into(),
        ]);
    }
    table.scalar("zeta", map.zeta, DIMLESS);
    table.scalar("t_p_reference", map.t_p, TIME);
    table.scalar("cap", map.cap, "t_p_reference");
    Ok(table)
}

pub fn film_from(cfg: &RunConfig) -> MaterialFilm {
    MaterialFilm {
        d0: cfg.f64("d0"),
        gamma_s: cfg.f64("gamma_s"),
        d: cfg.f64("d"),
        l_y: cfg.f64("l_y"),
        l_z: cfg.f64("l_z"),
        d_ex: cfg.f64("d_ex"),
        m_s: cfg.f64("m_s"),
        d_nv: cfg.f64("d_nv"),
        mu0_h0: cfg.f64("mu0_h0"),
        tau_m: cfg.f64("tau_m"),
    }
}

fn nv_yig(cfg: &RunConfig) -> Outcome {
    let film = film_from(cfg);
    let spin = match cfg.text("spin") {
        "half" => SpinModel::SpinHalf,
        _ => SpinModel::SpinOne,
    };
    let s = dissipative_rate(&film, spin)?;
    let f_t = cfg.f64("f_threshold");
    let bench = benchmark_coherence(CoherenceKind::Tphi, f_t, &BenchmarkOptions::default())?;

    let k_max = cfg.f64("k_max_d") / film.d;
    let ks = linspace(-k_max, k_max, cfg.usize("k_points"));
    let rows: Vec<Vec<Cell>> = ks
        .par_iter()
        .map(|&k| {
            let omega = dispersion_omega(&film, k);
            if k == 0.0 {
                return Ok(vec![
                    k.into(),
                    omega.into(),
                    Cell::Empty,
                    Cell::Empty,
                    Cell::Empty,
                    Cell::Empty,
                ]);
            }
            let mode = mode_amplitudes(&film, k)?;
            let field = field_fluctuation(&mode, film.nv_height(), 0.0)?;
            Ok(vec![
                k.into(),
                omega.into(),
                group_velocity(&film, k)?.into(),
                coupling_constant(&film, k, Polarization::Plus, spin)?.into(),
                coupling_constant(&film, k, Polarization::Minus, spin)?.into(),
                field.amplitude.norm().into(),
            ])
        })
        .collect::<Result<_, magnon_entangle::Error>>()?;
    let mut table = ResultTable::new(&[
        ("k", "1/m"),
        ("omega", "rad/s"),
        ("v_group", "m/s"),
        ("g_plus", "rad/s"),
        ("g_minus", "rad/s"),
        ("field_at_nv", "A/m"),
    ]);
    rows.into_iter().for_each(|r| table.push(r));

    let field_at = |k: f64| -> Result<f64, CliError> {
        let mode = mode_amplitudes(&film, k)?;
        Ok(field_fluctuation(&mode, film.nv_height(), 0.0)?
            .amplitude
            .norm())
    };
    table.scalar("omega_minus", s.omega_minus, "rad/s");
    table.scalar("omega_plus", s.omega_plus, "rad/s");
    table.scalar("k_minus", s.k_minus, "1/m");
    table.scalar("k_plus", s.k_plus, "1/m");
    table.scalar("g_minus_branch", s.g_minus_branch, "rad/s");
    table.scalar("g_plus_branch", s.g_plus_branch, "rad/s");
    table.scalar("suppression_ratio", s.suppression_ratio, DIMLESS);
    table.scalar("v_group", s.v_group, "m/s");
    table.scalar("j_q", s.j_q, "1/s");
    table.scalar("j_q_per_two_pi", s.j_q_per_two_pi, "1/s");
    table.scalar("min_distance", s.min_distance, "m");
    table.scalar("l_m", s.l_m, "m");
    table.scalar("markov_ratio", s.markov_ratio, DIMLESS);
    table.scalar("drive_ratio", s.drive_ratio, DIMLESS);
    table.scalar("field_at_nv_k_minus", field_at(s.k_minus)?, "A/m");
    table.scalar("field_at_nv_neg_k_minus", field_at(-s.k_minus)?, "A/m");
    table.scalar("t_phi_required_dimensionless", bench.min_time, TIME);
    table.scalar("t_phi_required", bench.min_time / s.j_q, "s");
    table.scalar(
        "plus_channel_dropped",
        if s.plus_channel_dropped { 1.0 } else { 0.0 },
        FLAG,
    );
    table.notes.extend(s.warnings.iter().cloned());
    Ok(table)
}

fn transient(cfg: &RunConfig) -> Outcome {
    let zetas = cfg.list("zetas");
    let times = linspace(0.0, cfg.f64("t_max"), cfg.usize("points"));
    let curves = zetas
        .iter()
        .map(|&z| transient_overlap(z, &times))
        .collect::<Result<Vec<_>, _>>()?;
    let mut columns = vec![Column {
        name: "t".into(),
        unit: TIME.into(),
    }];
    columns.extend((1..=zetas.len()).map(|i| Column {
        name: format!("overlap_{i}"),
        unit: DIMLESS.into(),
    }));
    let mut table = ResultTable::with_columns(columns);
    for (i, &t) in times.iter().enumerate() {
        let mut row = vec![Cell::from(t)];
        row.extend(curves.iter().map(|c| Cell::from(c[i].1)));
        table.push(row);
    }
    for (i, &z) in zetas.iter().enumerate() {
        table.scalar(&format!("zeta_{}", i + 1), z, DIMLESS);
        table.scalar(
            &format!("steady_overlap_{}", i + 1),
            steady_overlap(z)?,
            DIMLESS,
        );
    }
    Ok(table)
}

fn zeta_var(cfg: &RunConfig) -> Outcome {
    let (lo, hi) = (cfg.f64("err_min"), cfg.f64("err_max"));
    ordered("err_min", lo, "err_max", hi)?;
    let errs = linspace(lo, hi, cfg.usize("points"));
    let mut table = ResultTable::new(&[
        ("f_threshold", DIMLESS),
        ("rel_error", DIMLESS),
        ("zeta", DIMLESS),
        ("t_p_ratio", DIMLESS),
        ("converged", FLAG),
    ]);
    for (i, &f_t) in cfg.list("f_thresholds").iter().enumerate() {
        let sens = zeta_sensitivity(f_t, &errs, None)?;
        for p in &sens.points {
            table.push(vec![
                f_t.into(),
                p.rel_error.into(),
                p.zeta.into(),
                p.ratio.into(),
                p.ratio.is_some().into(),
            ]);
        }
        table.scalar(&format!("zeta_opt_{}", i + 1), sens.zeta_min, DIMLESS);
        table.scalar(&format!("t_p_opt_{}", i + 1), sens.t_p_min, TIME);
        table.scalar(&format!("margin_{}", i + 1), sens.margin, DIMLESS);
    }
    Ok(table)
}

fn distance_var(cfg: &RunConfig) -> Outcome {
    let phases = linspace(0.0, cfg.f64("phase_max"), cfg.usize("points"));
    let sens = phase_sensitivity(cfg.f64("zeta"), cfg.f64("f_threshold"), &phases)?;
    let mut table = ResultTable::new(&[
        ("phase", "rad"),
        ("fidelity_at_t_p", DIMLESS),
        ("t_p_ratio", DIMLESS),
        ("converged", FLAG),
    ]);
    for p in &sens.points {
        table.push(vec![
            p.phase.into(),
            p.fidelity_at_tp.into(),
            p.ratio.into(),
            p.ratio.is_some().into(),
        ]);
    }
    table.scalar("t_p_reference", sens.t_p, TIME);
    Ok(table)
}

fn spectrum(cfg: &RunConfig) -> Outcome {
    let (lo, hi) = (cfg.f64("r_min"), cfg.f64("r_max"));
    ordered("r_min", lo, "r_max", hi)?;
    let rs = linspace(lo, hi, cfg.usize("points"));
    let rows: Vec<Vec<Cell>> = rs
        .par_iter()
        .map(|&r| {
            let sp = effective_spectrum(&ChainConfig::pair(1.0, 0.5 / r))?;
            let mut row = vec![Cell::from(r)];
            for w in sp.eigenvalues {
                row.push(w.re.into());
                row.push(w.im.into());
            }
            row.push(sp.plus_minus_overlap().into());
            row.push(sp.is_exceptional_point.into());
            Ok(row)
        })
        .collect::<Result<_, magnon_entangle::Error>>()?;
    let mut table = ResultTable::new(&[
        ("r", DIMLESS),
        ("re_omega_0", "J_q"),
        ("im_omega_0", "J_q"),
        ("re_omega_1", "J_q"),
        ("im_omega_1", "J_q"),
        ("re_omega_plus", "J_q"),
        ("im_omega_plus", "J_q"),
        ("re_omega_minus", "J_q"),
        ("im_omega_minus", "J_q"),
        ("overlap_plus_minus", DIMLESS),
        ("exceptional_point", FLAG),
    ]);
    rows.into_iter().for_each(|r| table.push(r));
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{resolve, Value};

    fn cfg(exp: Experiment, o: &[(&str, Value)]) -> RunConfig {
        let o: Vec<(String, Value)> = o.iter().map(|(k, v)| (k.to_string(), v.clone())).collect();
        resolve(exp, None, &o, None, None).unwrap()
    }

    #[test]
    fn grids_hit_their_end_points() {
        assert_eq!(linspace(0.0, 1.0, 5), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(linspace(2.0, 3.0, 1), vec![2.0]);
        let g = logspace(1e-5, 1.0, 11);
        assert!(g[0] == 1e-5 && g[10] == 1.0);
    }

    #[test]
    fn dynamics_shows_one_way_transfer() {
        let t = run_experiment(&cfg(
            Experiment::Dynamics,
            &[("points", Value::Number(21.0))],
        ))
        .unwrap();
        let p2 = t.column("p2_from_10").unwrap();
        let peak = t
            .rows
            .iter()
            .map(|r| match r[p2] {
                Cell::Number(x) => x,
                _ => 0.0,
            })
            .fold(0.0, f64::max);
        assert!(
            peak > 0.1,
            "downstream qubit picks up the excitation: {peak}"
        );
        assert_eq!(t.rows.len(), 21);
    }

    #[test]
    fn spectrum_flags_the_exceptional_point() {
        let t = run_experiment(&cfg(Experiment::Spectrum, &[])).unwrap();
        let ep = t.column("exceptional_point").unwrap();
        let hits = t.rows.iter().filter(|r| r[ep] == Cell::Flag(true)).count();
        assert_eq!(hits, 1);
    }

    #[test]
    fn reversed_ranges_are_config_errors() {
        let c = cfg(Experiment::Spectrum, &[("r_min", Value::Number(9.0))]);
        assert_eq!(run_experiment(&c).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn distance_var_marks_non_converged_cells() {
        let c = cfg(Experiment::DistanceVar, &[("points", Value::Number(3.0))]);
        let t = run_experiment(&c).unwrap();
        let conv = t.column("converged").unwrap();
        assert_eq!(t.rows[0][conv], Cell::Flag(true));
        assert_eq!(t.rows[2][conv], Cell::Flag(false));
        assert_eq!(t.rows[2][t.column("t_p_ratio").unwrap()], Cell::Empty);
    }
}
