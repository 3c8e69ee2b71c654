use std::f64::consts::FRAC_PI_4;

use crate::cascade_dynamics::{
    null_space_dimension, steady_state, LiouvillianOperator, StepPropagator,
};
use crate::error::{domain, Result};
use crate::quantum_core::{
    linalg, matrix_exponential, vectorize, vectorize_matrix, DensityMatrix, PureState, C64,
};

/// Controls for the threshold-crossing search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchOptions {
    /// Non-convergence horizon in units of the Liouvillian's inverse rate.
    pub t_max: f64,
    /// Relative bisection resolution on the crossing time.
    pub resolution: f64,
    /// Growth factor of the coarse geometric grid.
    pub growth: f64,
    /// First grid point.
    pub t_first: f64,
    pub record_samples: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            t_max: 1e5,
            resolution: 1e-4,
            growth: 1.2,
            t_first: 1e-3,
            record_samples: false,
        }
    }
}

impl SearchOptions {
    fn validate(&self) -> Result<()> {
        if !(self.t_max > 0.0 && self.t_max.is_finite()) {
            return domain(format!(
                "t_max = {} must be positive and finite",
                self.t_max
            ));
        }
        if !(self.resolution > 0.0 && self.resolution < 1.0) {
            return domain(format!(
                "resolution = {} must lie in (0, 1)",
                self.resolution
            ));
        }
        if !(self.growth > 1.0 && self.growth.is_finite()) {
            return domain(format!("growth = {} must exceed 1", self.growth));
        }
        if !(self.t_first > 0.0 && self.t_first < self.t_max) {
            return domain(format!("t_first = {} must lie in (0, t_max)", self.t_first));
        }
        Ok(())
    }
}

/// Result of scanning `F(t) = sqrt(<psi|rho(t)|psi>)` for its first passage
/// above a threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct Crossing {
    /// Smallest time with `F >= F_T` to within the resolution, if any.
    pub time: Option<f64>,
    /// Largest fidelity seen on the grid.
    pub peak_fidelity: f64,
    /// Time at which the scan stopped.
    pub t_end: f64,
    /// Fidelity of the unique steady state, when there is one.
    pub steady_fidelity: Option<f64>,
    /// `(t, F(t))` on the scan grid.
    pub samples: Option<Vec<(f64, f64)>>,
}

/// Linear functional `v -> <psi|rho|psi>` on column-stacked states.
struct Overlap {
    weights: Vec<C64>,
}

impl Overlap {
    fn new(psi: &PureState) -> Self {
        Self {
            weights: vectorize_matrix(psi.projector().matrix())
                .iter()
                .map(|z| z.conj())
                .collect(),
        }
    }

    fn fidelity(&self, v: &[C64]) -> f64 {
        let f2: f64 = self.weights.iter().zip(v).map(|(w, x)| (w * x).re).sum();
        f2.clamp(0.0, 1.0).sqrt()
    }
}

/// Modes damped below `e^{-DECAY_DEPTH}` no longer need to be resolved.
const DECAY_DEPTH: f64 = 40.0;

/// Time grid that samples every Liouvillian mode still alive at time `t` at
/// least eight times per period, growing geometrically otherwise. Steps of
/// `h0 * 2^m` reuse cached propagators.
struct Stepper {
    /// `(|lambda|, Re lambda)` of the generator's eigenvalues.
    modes: Vec<(f64, f64)>,
    h0: f64,
    cache: Vec<StepPropagator>,
    liou: LiouvillianOperator,
    scratch: Vec<C64>,
}

impl Stepper {
    fn new(liou: &LiouvillianOperator, t_max: f64) -> Result<Self> {
        let modes: Vec<(f64, f64)> = linalg::eigenvalues(liou.matrix())?
            .iter()
            .map(|z| (z.norm(), z.re))
            .collect();
        let radius = modes.iter().map(|m| m.0).fold(0.0, f64::max);
        let h0 = if radius > 0.0 {
            (FRAC_PI_4 / radius).min(t_max)
        } else {
            t_max / 1000.0
        };
        let cache = vec![StepPropagator::new(liou, h0)?];
        Ok(Self {
            modes,
            h0,
            cache,
            liou: liou.clone(),
            scratch: Vec::new(),
        })
    }

    /// Largest step that still resolves the modes alive at `t`.
    fn resolving_step(&self, t: f64) -> f64 {
        let fastest = self
            .modes
            .iter()
            .filter(|(_, re)| *re * t > -DECAY_DEPTH)
            .map(|m| m.0)
            .fold(0.0, f64::max);
        if fastest > 0.0 {
            FRAC_PI_4 / fastest
        } else {
            f64::INFINITY
        }
    }

    /// Advances `v` from `t` and returns the step taken.
    fn advance(&mut self, v: &mut Vec<C64>, t: f64, opts: &SearchOptions) -> Result<f64> {
        let geometric = if t == 0.0 {
            opts.t_first
        } else {
            (opts.growth - 1.0) * t
        };
        let target = geometric.min(self.resolving_step(t)).min(opts.t_max - t);
        if target < self.h0 {
            StepPropagator::new(&self.liou, target)?.advance(v);
            return Ok(target);
        }
        let m = ((target / self.h0).log2().floor() as usize).min(60);
        while self.cache.len() <= m {
            let h = self.h0 * (1u64 << self.cache.len()) as f64;
            self.cache.push(StepPropagator::new(&self.liou, h)?);
        }
        let step = &self.cache[m];
        self.scratch.resize(v.len(), C64::new(0.0, 0.0));
        step.advance_into(v, &mut self.scratch);
        std::mem::swap(v, &mut self.scratch);
        Ok(step.step())
    }
}

/// Rigorous stopping rule: CPTP evolution contracts the trace distance to
/// the steady state, and `|<psi|X|psi>| <= ||X||_1 <= sqrt(D) ||X||_F`.
struct SteadyBound {
    v_ss: Vec<C64>,
    sqrt_dim: f64,
    f2_ss: f64,
}

impl SteadyBound {
    fn new(liou: &LiouvillianOperator, overlap: &Overlap) -> Option<Self> {
        if null_space_dimension(liou) != 1 {
            return None;
        }
        let ss = steady_state(liou).ok()?;
        let v_ss = vectorize(&ss);
        let f2_ss = overlap.fidelity(&v_ss).powi(2);
        Some(Self {
            v_ss,
            sqrt_dim: (liou.hilbert_dim() as f64).sqrt(),
            f2_ss,
        })
    }

    /// Upper bound on `F^2` at all later times.
    fn future_ceiling(&self, v: &[C64]) -> f64 {
        let dist = self
            .v_ss
            .iter()
            .zip(v)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        self.f2_ss + self.sqrt_dim * dist
    }
}

/// Scans `F(t)` from `rho0` on a geometric grid capped by the resolving step
/// and bisects the first bracketed passage above `f_t`.
pub fn threshold_crossing(
    liou: &LiouvillianOperator,
    rho0: &DensityMatrix,
    target: &PureState,
    f_t: f64,
    opts: &SearchOptions,
) -> Result<Crossing> {
    opts.validate()?;
    if rho0.dim() != liou.hilbert_dim() || target.dim() != liou.hilbert_dim() {
        return domain("state dimensions do not match the Liouvillian");
    }
    if !(f_t > 0.0 && f_t <= 1.0) {
        return domain(format!("threshold {f_t} must lie in (0, 1]"));
    }
    let overlap = Overlap::new(target);
    let bound = SteadyBound::new(liou, &overlap);
    let steady_fidelity = bound.as_ref().map(|b| b.f2_ss.sqrt());
    let f2_t = f_t * f_t;

    let mut samples = opts.record_samples.then(Vec::new);
    let mut v = vectorize(rho0);
    let mut t = 0.0;
    let mut f = overlap.fidelity(&v);
    let mut peak = f;
    if let Some(s) = samples.as_mut() {
        s.push((t, f));
    }
    if f >= f_t {
        return Ok(Crossing {
            time: Some(0.0),
            peak_fidelity: f,
            t_end: 0.0,
            steady_fidelity,
            samples,
        });
    }

    let mut stepper = Stepper::new(liou, opts.t_max)?;
    let mut v_prev = v.clone();
    loop {
        v_prev.copy_from_slice(&v);
        let t_prev = t;
        t += stepper.advance(&mut v, t, opts)?;
        f = overlap.fidelity(&v);
        peak = peak.max(f);
        if let Some(s) = samples.as_mut() {
            s.push((t, f));
        }
        if f >= f_t {
            let time = bisect(liou, &overlap, v_prev, t_prev, t, f_t, opts.resolution)?;
            return Ok(Crossing {
                time: Some(time),
                peak_fidelity: peak,
                t_end: t,
                steady_fidelity,
                samples,
            });
        }
        let hopeless = bound.as_ref().is_some_and(|b| b.future_ceiling(&v) < f2_t);
        if hopeless || t >= opts.t_max {
            return Ok(Crossing {
                time: None,
                peak_fidelity: peak,
                t_end: t,
                steady_fidelity,
                samples,
            });
        }
    }
}

/// Narrows `[lo, hi]` with `F(lo) < f_t <= F(hi)` until `hi - lo <= resolution * hi`.
fn bisect(
    liou: &LiouvillianOperator,
    overlap: &Overlap,
    v_lo: Vec<C64>,
    mut lo: f64,
    mut hi: f64,
    f_t: f64,
    resolution: f64,
) -> Result<f64> {
    let mut v_lo = v_lo;
    while hi - lo > resolution * hi {
        let mid = 0.5 * (lo + hi);
        let step = matrix_exponential(&liou.matrix().scale_real(mid - lo))?;
        let v_mid = step.mul_vec(&v_lo);
        if overlap.fidelity(&v_mid) >= f_t {
            hi = mid;
        } else {
            lo = mid;
            v_lo = v_mid;
        }
    }
    Ok(hi)
}

/// Largest `F(t)` over `t in [0, t_max]`. The scan stops once the
/// steady-state bound leaves less than `tol` room above the running peak in
/// `F^2`.
pub fn peak_fidelity(
    liou: &LiouvillianOperator,
    rho0: &DensityMatrix,
    target: &PureState,
    t_max: f64,
    tol: f64,
) -> Result<f64> {
    let overlap = Overlap::new(target);
    let bound = SteadyBound::new(liou, &overlap);
    let opts = SearchOptions {
        t_max,
        ..SearchOptions::default()
    };
    opts.validate()?;
    let mut stepper = Stepper::new(liou, t_max)?;
    let mut v = vectorize(rho0);
    let mut peak = overlap.fidelity(&v);
    let mut t = 0.0;
    while t < t_max {
        t += stepper.advance(&mut v, t, &opts)?;
        peak = peak.max(overlap.fidelity(&v));
        if bound
            .as_ref()
            .is_some_and(|b| b.future_ceiling(&v) <= peak * peak + tol)
        {
            break;
        }
    }
    Ok(peak)
}

/// `F(t)` by direct exponentiation of the generator.
pub fn fidelity_at(
    liou: &LiouvillianOperator,
    rho0: &DensityMatrix,
    target: &PureState,
    t: f64,
) -> Result<f64> {
    let overlap = Overlap::new(target);
    if t == 0.0 {
        return Ok(overlap.fidelity(&vectorize(rho0)));
    }
    if !(t > 0.0 && t.is_finite()) {
        return domain(format!("time {t} must be finite and non-negative"));
    }
    let step = matrix_exponential(&liou.matrix().scale_real(t))?;
    Ok(overlap.fidelity(&step.mul_vec(&vectorize(rho0))))
}
