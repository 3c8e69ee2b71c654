use rayon::prelude::*;

use crate::cascade_dynamics::{
    assemble_liouvillian, build_directional_liouvillian, dark_state, singlet, ChainConfig,
    DirectionalConfig,
};
use crate::error::{domain, Result};

use super::search::{fidelity_at, peak_fidelity, threshold_crossing, SearchOptions};
use super::{
    check_threshold, check_zeta, ground_state, protocol_config, protocol_time, zeta_threshold,
    ProtocolOverrides,
};

const GOLDEN: f64 = 0.618_033_988_749_894_9;

/// Grid and refinement settings for searches over `zeta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizeOptions {
    /// Log-spaced grid points in `(zeta_floor, zeta_T)`.
    pub grid_points: usize,
    pub zeta_floor: f64,
    /// Relative bracket width at which golden-section refinement stops.
    pub refine_tol: f64,
}

impl Default for OptimizeOptions {
    fn default() -> Self {
        Self {
            grid_points: 40,
            zeta_floor: 0.02,
            refine_tol: 1e-3,
        }
    }
}

impl OptimizeOptions {
    /// Grid below `zeta_t`, excluding `zeta_t` itself.
    fn grid(&self, zeta_t: f64) -> Result<Vec<f64>> {
        if self.grid_points < 3 || !(self.zeta_floor > 0.0) || !(self.refine_tol > 0.0) {
            return domain(
                "zeta grid needs at least three points, a positive floor and a positive tolerance",
            );
        }
        let lo = self.zeta_floor.min(0.1 * zeta_t);
        let n = self.grid_points;
        Ok((0..n)
            .map(|i| lo * (zeta_t / lo).powf(i as f64 / n as f64))
            .collect())
    }
}

/// Minimizes `f` over `[a, b]` by golden-section search, returning the best
/// evaluated point among `seed` and all probes.
fn golden_min(
    mut f: impl FnMut(f64) -> Result<f64>,
    mut a: f64,
    mut b: f64,
    tol: f64,
    seed: (f64, f64),
) -> Result<(f64, f64)> {
    let mut best = seed;
    let mut c = b - GOLDEN * (b - a);
    let mut d = a + GOLDEN * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    for (x, y) in [(c, fc), (d, fd)] {
        if y < best.1 {
            best = (x, y);
        }
    }
    while (b - a) > tol * b {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - GOLDEN * (b - a);
            fc = f(c)?;
            if fc < best.1 {
                best = (c, fc);
            }
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + GOLDEN * (b - a);
            fd = f(d)?;
            if fd < best.1 {
                best = (d, fd);
            }
        }
    }
    Ok(best)
}

/// Neighbouring grid bracket around index `i`.
fn bracket(grid: &[f64], i: usize, upper: f64) -> (f64, f64) {
    let a = if i == 0 { 0.5 * grid[0] } else { grid[i - 1] };
    let b = if i + 1 < grid.len() {
        grid[i + 1]
    } else {
        upper
    };
    (a, b)
}

/// Optimal drive for one threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimumZeta {
    pub f_threshold: f64,
    pub zeta_min: f64,
    pub t_p_min: f64,
    /// `(zeta, J_q t_p)` on the coarse grid; `None` where not converged.
    pub curve: Vec<(f64, Option<f64>)>,
}

/// Minimizes the protocol time over `zeta in (0, zeta_T)`.
pub fn optimize_zeta(
    f_t: f64,
    opts: &OptimizeOptions,
    overrides: &ProtocolOverrides,
) -> Result<OptimumZeta> {
    let zeta_t = zeta_threshold(f_t)?;
    let grid = opts.grid(zeta_t)?;
    let times: Vec<f64> = grid
        .par_iter()
        .map(|&z| protocol_time(z, f_t, overrides).map(|o| o.t_protocol))
        .collect::<Result<_>>()?;
    let curve: Vec<(f64, Option<f64>)> = grid
        .iter()
        .zip(&times)
        .map(|(&z, &t)| (z, t.is_finite().then_some(t)))
        .collect();
    let (i, &t_best) = times
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty grid");
    if !t_best.is_finite() {
        return Ok(OptimumZeta {
            f_threshold: f_t,
            zeta_min: f64::NAN,
            t_p_min: f64::INFINITY,
            curve,
        });
    }
    let (a, b) = bracket(&grid, i, zeta_t);
    let objective = |z: f64| protocol_time(z, f_t, overrides).map(|o| o.t_protocol);
    let (zeta_min, t_p_min) = golden_min(objective, a, b, opts.refine_tol, (grid[i], t_best))?;
    Ok(OptimumZeta {
        f_threshold: f_t,
        zeta_min,
        t_p_min,
        curve,
    })
}

/// Intrinsic decoherence channel being benchmarked.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoherenceKind {
    /// Qubit lifetime, `1/T1 D[s-]`.
    T1,
    /// Pure dephasing, `1/T_phi D[s+ s-]`.
    Tphi,
}

impl CoherenceKind {
    fn overrides(self, time: f64) -> ProtocolOverrides {
        match self {
            Self::T1 => ProtocolOverrides {
                t1: Some(time),
                ..Default::default()
            },
            Self::Tphi => ProtocolOverrides {
                t_phi: Some(time),
                ..Default::default()
            },
        }
    }
}

/// Minimal coherence time for which the protocol can still succeed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchmarkResult {
    pub kind: CoherenceKind,
    pub f_threshold: f64,
    /// In units of `1/J_q`.
    pub min_time: f64,
    pub zeta_at_min: f64,
}

/// Settings for [`benchmark_coherence`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchmarkOptions {
    pub zeta: OptimizeOptions,
    /// Relative resolution of the bisection on the coherence time.
    pub resolution: f64,
    /// Horizon of each fidelity scan.
    pub t_max: f64,
    /// Largest coherence time tried before giving up.
    pub time_ceiling: f64,
}

impl Default for BenchmarkOptions {
    fn default() -> Self {
        Self {
            zeta: OptimizeOptions::default(),
            resolution: 1e-2,
            t_max: 1e5,
            time_ceiling: 1e8,
        }
    }
}

/// Whether some `zeta` lets `F(t)` reach `f_t` for coherence time `time`;
/// returns the successful `zeta`.
fn succeeds(
    kind: CoherenceKind,
    f_t: f64,
    time: f64,
    opts: &BenchmarkOptions,
) -> Result<Option<f64>> {
    let zeta_t = zeta_threshold(f_t)?;
    let grid = opts.zeta.grid(zeta_t)?;
    let ov = kind.overrides(time);
    let search = SearchOptions {
        t_max: opts.t_max,
        ..SearchOptions::default()
    };
    let hits: Vec<bool> = grid
        .par_iter()
        .map(|&z| {
            let liou = assemble_liouvillian(&protocol_config(z, &ov))?;
            Ok(
                threshold_crossing(&liou, &ground_state(), &singlet(), f_t, &search)?
                    .time
                    .is_some(),
            )
        })
        .collect::<Result<_>>()?;
    if let Some(i) = hits.iter().position(|&h| h) {
        return Ok(Some(grid[i]));
    }
    // No grid point succeeds: maximize the peak fidelity around the best one.
    let peak = |z: f64| -> Result<f64> {
        let liou = assemble_liouvillian(&protocol_config(z, &ov))?;
        peak_fidelity(&liou, &ground_state(), &singlet(), opts.t_max, 1e-10)
    };
    let peaks: Vec<f64> = grid.par_iter().map(|&z| peak(z)).collect::<Result<_>>()?;
    let (i, &p_best) = peaks
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty grid");
    let (a, b) = bracket(&grid, i, zeta_t);
    let (z, neg_peak) = golden_min(
        |z| peak(z).map(|p| -p),
        a,
        b,
        opts.zeta.refine_tol,
        (grid[i], -p_best),
    )?;
    Ok((-neg_peak >= f_t).then_some(z))
}

/// Bisects on `log T` for the smallest coherence time at which some drive
/// still reaches `F_T`.
pub fn benchmark_coherence(
    kind: CoherenceKind,
    f_t: f64,
    opts: &BenchmarkOptions,
) -> Result<BenchmarkResult> {
    check_threshold(f_t)?;
    if !(opts.resolution > 0.0) {
        return domain("benchmark resolution must be positive");
    }
    let mut hi = 100.0;
    let mut zeta_hi = loop {
        if let Some(z) = succeeds(kind, f_t, hi, opts)? {
            break z;
        }
        hi *= 4.0;
        if hi > opts.time_ceiling {
            return domain(format!(
                "no coherence time below {:e} reaches F_T = {f_t}",
                opts.time_ceiling
            ));
        }
    };
    let mut lo = hi / 4.0;
    while let Some(z) = succeeds(kind, f_t, lo, opts)? {
        hi = lo;
        zeta_hi = z;
        lo /= 4.0;
        if lo < 1e-6 {
            return domain("benchmark did not find a failing coherence time");
        }
    }
    while hi / lo > 1.0 + opts.resolution {
        let mid = (lo * hi).sqrt();
        match succeeds(kind, f_t, mid, opts)? {
            Some(z) => {
                hi = mid;
                zeta_hi = z;
            }
            None => lo = mid,
        }
    }
    Ok(BenchmarkResult {
        kind,
        f_threshold: f_t,
        min_time: hi,
        zeta_at_min: zeta_hi,
    })
}

/// One cell of the bidirectional-coupling map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectionalCell {
    /// `J_{q,L} / J_{q,R}`.
    pub jl_ratio: f64,
    /// `k_{q,L} r_{2,1}`.
    pub phase: f64,
    /// `t_{p,di} / t_p`; `None` when not converged within the cap.
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DirectionalMap {
    pub f_threshold: f64,
    pub zeta: f64,
    pub t_p: f64,
    pub cap: f64,
    /// Row-major over `(jl_ratio, phase)`.
    pub cells: Vec<DirectionalCell>,
}

/// Convergence cap on `t_{p,di} / t_p`.
pub const DIRECTIONAL_CAP: f64 = 1000.0;

/// Protocol time with an additional left-moving channel, relative to the
/// unidirectional reference `(zeta, t_p)`.
pub fn directional_map(
    f_t: f64,
    jl_grid: &[f64],
    phase_grid: &[f64],
    reference: Option<(f64, f64)>,
) -> Result<DirectionalMap> {
    check_threshold(f_t)?;
    let (zeta, t_p) = match reference {
        Some(r) => r,
        None => {
            let opt = optimize_zeta(
                f_t,
                &OptimizeOptions::default(),
                &ProtocolOverrides::default(),
            )?;
            (opt.zeta_min, opt.t_p_min)
        }
    };
    check_zeta(zeta)?;
    if !(t_p > 0.0 && t_p.is_finite()) {
        return domain(format!(
            "reference protocol time {t_p} must be positive and finite"
        ));
    }
    let cfg = ChainConfig::from_zeta(zeta);
    let search = SearchOptions {
        t_max: DIRECTIONAL_CAP * t_p,
        ..SearchOptions::default()
    };
    let points: Vec<(f64, f64)> = jl_grid
        .iter()
        .flat_map(|&j| phase_grid.iter().map(move |&p| (j, p)))
        .collect();
    let cells = points
        .par_iter()
        .map(|&(jl_ratio, phase)| {
            let dir = DirectionalConfig {
                j_r: 1.0,
                j_l: jl_ratio,
                phase_r: 0.0,
                phase_l: phase,
            };
            let liou = build_directional_liouvillian(&cfg, &dir)?;
            let crossing = threshold_crossing(&liou, &ground_state(), &singlet(), f_t, &search)?;
            Ok(DirectionalCell {
                jl_ratio,
                phase,
                ratio: crossing.time.map(|t| t / t_p),
            })
        })
        .collect::<Result<_>>()?;
    Ok(DirectionalMap {
        f_threshold: f_t,
        zeta,
        t_p,
        cap: DIRECTIONAL_CAP,
        cells,
    })
}

/// `(J_q t, sqrt(<psi_s|rho(t)|psi_s>))` from `|00>`.
pub fn transient_overlap(zeta: f64, t_grid: &[f64]) -> Result<Vec<(f64, f64)>> {
    check_zeta(zeta)?;
    let liou = assemble_liouvillian(&ChainConfig::from_zeta(zeta))?;
    let target = dark_state(zeta)?;
    let rho0 = ground_state();
    t_grid
        .par_iter()
        .map(|&t| Ok((t, fidelity_at(&liou, &rho0, &target, t)?)))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZetaPoint {
    /// `(zeta - zeta_min) / zeta_min`.
    pub rel_error: f64,
    pub zeta: f64,
    /// `t_p(zeta) / t_p_min`; `None` when not converged.
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZetaSensitivity {
    pub f_threshold: f64,
    pub zeta_min: f64,
    pub t_p_min: f64,
    /// `(zeta_T - zeta_min) / zeta_min`.
    pub margin: f64,
    pub points: Vec<ZetaPoint>,
}

/// Protocol time under relative errors of the drive around its optimum.
pub fn zeta_sensitivity(
    f_t: f64,
    err_grid: &[f64],
    optimum: Option<&OptimumZeta>,
) -> Result<ZetaSensitivity> {
    let owned;
    let opt = match optimum {
        Some(o) => o,
        None => {
            owned = optimize_zeta(
                f_t,
                &OptimizeOptions::default(),
                &ProtocolOverrides::default(),
            )?;
            &owned
        }
    };
    check_zeta(opt.zeta_min)?;
    let zeta_t = zeta_threshold(f_t)?;
    let points = err_grid
        .par_iter()
        .map(|&e| {
            let zeta = opt.zeta_min * (1.0 + e);
            let ratio = if e == 0.0 {
                Some(1.0)
            } else if zeta > 0.0 {
                let out = protocol_time(zeta, f_t, &ProtocolOverrides::default())?;
                out.converged.then(|| out.t_protocol / opt.t_p_min)
            } else {
                None
            };
            Ok(ZetaPoint {
                rel_error: e,
                zeta,
                ratio,
            })
        })
        .collect::<Result<_>>()?;
    Ok(ZetaSensitivity {
        f_threshold: f_t,
        zeta_min: opt.zeta_min,
        t_p_min: opt.t_p_min,
        margin: (zeta_t - opt.zeta_min) / opt.zeta_min,
        points,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasePoint {
    /// `k_q r_{2,1}`.
    pub phase: f64,
    /// `F(t_p)` with the reference protocol time.
    pub fidelity_at_tp: f64,
    /// `t_{p,phi} / t_p`; `None` when not converged.
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSensitivity {
    pub zeta: f64,
    pub f_threshold: f64,
    pub t_p: f64,
    pub points: Vec<PhasePoint>,
}

/// Fidelity at the reference protocol time and the protocol time itself as
/// the qubit separation phase `k_q r_{2,1}` departs from zero.
pub fn phase_sensitivity(zeta: f64, f_t: f64, phase_grid: &[f64]) -> Result<PhaseSensitivity> {
    let reference = protocol_time(zeta, f_t, &ProtocolOverrides::default())?;
    if !reference.converged {
        return domain(format!(
            "no reference protocol time for zeta = {zeta}, F_T = {f_t}"
        ));
    }
    let t_p = reference.t_protocol;
    let points = phase_grid
        .par_iter()
        .map(|&phase| {
            let ov = ProtocolOverrides {
                phase,
                ..Default::default()
            };
            let liou = assemble_liouvillian(&protocol_config(zeta, &ov))?;
            let fidelity_at_tp = fidelity_at(&liou, &ground_state(), &singlet(), t_p)?;
            let out = protocol_time(zeta, f_t, &ov)?;
            Ok(PhasePoint {
                phase,
                fidelity_at_tp,
                ratio: out.converged.then(|| out.t_protocol / t_p),
            })
        })
        .collect::<Result<_>>()?;
    Ok(PhaseSensitivity {
        zeta,
        f_threshold: f_t,
        t_p,
        points,
    })
}
