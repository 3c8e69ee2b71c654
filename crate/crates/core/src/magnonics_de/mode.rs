use crate::error::{domain, Error, Result};
use crate::quantum_core::C64;

use super::dispersion::{
    dispersion_omega, group_velocity, polder_susceptibility, SusceptibilityPair,
};
use super::film::{MaterialFilm, HBAR};

const I: C64 = C64::new(0.0, 1.0);

/// Circular polarization `e_{+-} = (e_x +- i e_y) / sqrt(2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Polarization {
    Plus,
    Minus,
}

impl Polarization {
    /// Bilinear product without conjugation: `e_+ . e_- = 1`, `e_+- . e_+- = 0`.
    pub fn dot(self, other: Polarization) -> f64 {
        if self == other {
            0.0
        } else {
            1.0
        }
    }

    /// Top-surface field polarization of a mode travelling along `sign(k)`.
    pub fn of_wavenumber(k: f64) -> Polarization {
        if k > 0.0 {
            Polarization::Minus
        } else {
            Polarization::Plus
        }
    }
}

/// Surface mode with potential `(A sin(i k x) + B cos(i k x)) e^{iky}` inside
/// the film and `C e^{-|k| x} e^{iky}` above it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceMode {
    pub k: f64,
    pub omega: f64,
    pub v_group: f64,
    pub chi: SusceptibilityPair,
    pub coeff_a: C64,
    pub coeff_b: C64,
    pub coeff_c: C64,
    pub polarization: Polarization,
    /// Film thickness the mode was solved for.
    pub thickness: f64,
}

/// `p = |k| - chi_a k` and `q = (1 + chi_d) k` through their sum and
/// difference. For `k < 0`, `q - p = -|k| (2 + chi_d + chi_a)` vanishes like
/// `e^{-2|k|d}` on shell, so it is taken from the dispersion identity
/// `(omega_H' + omega_M/2)^2 - omega^2 = omega_M^2 e^{-2|k|d} / 4`.
struct Shape {
    sum: f64,
    diff: f64,
}

impl Shape {
    fn new(film: &MaterialFilm, k: f64, omega: f64) -> Self {
        let kappa = k.abs();
        let wm = film.omega_m();
        let wh = film.omega_h_prime(k);
        // chi_d + chi_a and chi_d - chi_a.
        let chi_plus = wm / (wh - omega);
        let chi_minus = wm / (wh + omega);
        let (sum, diff) = if k > 0.0 {
            (kappa * (2.0 + chi_minus), kappa * chi_plus)
        } else {
            let gap = 0.5 * wm * wm * (-2.0 * kappa * film.d).exp() / (wh + 0.5 * wm + omega);
            (-kappa * chi_minus, -kappa * gap / (wh - omega))
        };
        Self { sum, diff }
    }

    /// `p sinh(2x) + q cosh(2x)` written as exponentials.
    fn c_numerator(&self, x: f64) -> f64 {
        0.5 * (self.sum * (2.0 * x).exp() + self.diff * (-2.0 * x).exp())
    }

    /// `p cosh(x) + q sinh(x)`.
    fn c_denominator(&self, x: f64) -> f64 {
        0.5 * (self.sum * x.exp() - self.diff * (-x).exp())
    }

    /// `(tanh(x) p + q) / (p + q tanh(x))`.
    fn beta(&self, x: f64) -> f64 {
        let (up, down) = (x.exp(), (-x).exp());
        (self.sum * up + self.diff * down) / (self.sum * up - self.diff * down)
    }
}

/// Mode coefficients at wave number `k`, normalized to one magnon.
pub fn mode_amplitudes(film: &MaterialFilm, k: f64) -> Result<SurfaceMode> {
    film.validate()?;
    if k == 0.0 || !k.is_finite() {
        return domain(format!("surface mode needs a finite non-zero k, got {k}"));
    }
    let d = film.d;
    let omega = dispersion_omega(film, k);
    let chi = polder_susceptibility(film, omega, k)?;
    let (xd, xa) = (chi.chi_d, chi.chi_a);
    let s = k.signum();
    let t = (0.5 * k * d).tanh();
    let shape = Shape::new(film, k, omega);

    let g = xd * xd + xd - xa * xa;
    let a1 = (xa - g * s) * t + xa * s - xd;
    let a2 = (xa * s - xd) * t - g * s + xa;
    let radicand =
        film.gamma_s * HBAR * film.m_s / (2.0 * film.l_y * film.l_z * k * a1 * a2 * (k * d).sinh());
    if !radicand.is_finite() || radicand == 0.0 {
        return Err(Error::DegenerateMode { k });
    }
    // The printed radicand is negative for Damon-Eshbach modes; only |A|
    // enters observables, so A is kept real.
    let a = -s * radicand.abs().sqrt() * (s * (xa + (1.0 + xd) * t) + 1.0);
    let coeff_a = C64::new(a, 0.0);

    let x = 0.5 * k * d;
    let coeff_b = I * coeff_a * shape.beta(x);
    let coeff_c =
        I * coeff_a * (shape.c_numerator(x) / shape.c_denominator(x)) * (0.5 * k.abs() * d).exp();
    if ![coeff_a, coeff_b, coeff_c]
        .iter()
        .all(|z| z.re.is_finite() && z.im.is_finite())
    {
        return Err(Error::DegenerateMode { k });
    }
    Ok(SurfaceMode {
        k,
        omega,
        v_group: group_velocity(film, k)?,
        chi,
        coeff_a,
        coeff_b,
        coeff_c,
        polarization: Polarization::of_wavenumber(k),
        thickness: d,
    })
}

/// `|A|^2` straight from the normalization integral with `B = i beta A`.
pub fn normalization_norm_sq(film: &MaterialFilm, mode: &SurfaceMode) -> f64 {
    let (k, d) = (mode.k, film.d);
    let (xd, xa) = (mode.chi.chi_d, mode.chi.chi_a);
    let beta = (mode.coeff_b / (I * mode.coeff_a)).re;
    let s = film.l_y * film.l_z;
    (film.gamma_s * HBAR * film.m_s
        / (2.0 * s * k * (beta * xd + xa) * (xd + beta * xa) * (k * d).sinh()))
    .abs()
}

/// Relative residuals of the four interface conditions, with `D` taken from
/// the first one.
pub fn boundary_residuals(mode: &SurfaceMode) -> [f64; 4] {
    let (k, d) = (mode.k, mode.thickness);
    let (a, b, c) = (mode.coeff_a, mode.coeff_b, mode.coeff_c);
    let (xd, xa) = (mode.chi.chi_d, mode.chi.chi_a);
    let (sh, ch) = ((0.5 * k * d).sinh(), (0.5 * k * d).cosh());
    let decay = (-0.5 * k.abs() * d).exp();
    let dd = (-I * a * sh + b * ch) / decay;

    let inner = I * a * k * (1.0 + xd) + b * k * xa;
    let outer = b * k * (1.0 + xd) + I * a * k * xa;
    let rows: [[C64; 3]; 4] = [
        [-I * a * sh, b * ch, -dd * decay],
        [I * a * sh, b * ch, -c * decay],
        [inner * ch, -outer * sh, -dd * k.abs() * decay],
        [inner * ch, outer * sh, c * k.abs() * decay],
    ];
    rows.map(|terms| {
        let sum: C64 = terms.iter().sum();
        let scale = terms.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if scale == 0.0 {
            0.0
        } else {
            sum.norm() / scale
        }
    })
}

/// Field fluctuation above the film at `(x, y)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldSample {
    /// `sqrt(2) C k e^{-x|k| + iky}` (A/m).
    pub amplitude: C64,
    pub polarization: Polarization,
}

pub fn field_fluctuation(mode: &SurfaceMode, x: f64, y: f64) -> Result<FieldSample> {
    let half = 0.5 * mode.thickness;
    if !(x > half) {
        return Err(Error::OutOfRegion {
            x,
            half_thickness: half,
        });
    }
    let k = mode.k;
    let amplitude =
        std::f64::consts::SQRT_2 * mode.coeff_c * k * C64::from_polar((-x * k.abs()).exp(), k * y);
    Ok(FieldSample {
        amplitude,
        polarization: mode.polarization,
    })
}
