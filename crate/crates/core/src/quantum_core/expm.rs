//! Matrix exponential by scaling and squaring with diagonal Padé approximants
//! (Higham, "The scaling and squaring method for the matrix exponential
//! revisited", SIAM J. Matrix Anal. Appl. 26, 2005).

use num_complex::Complex64 as C64;

use super::matrix::ComplexMatrix;
use crate::error::{domain, Error, Result};

const PADE_3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const PADE_5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const PADE_7: [f64; 8] = [
    17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0,
];
const PADE_9: [f64; 10] = [
    17643225600.0,
    8821612800.0,
    2075673600.0,
    302702400.0,
    30270240.0,
    2162160.0,
    110880.0,
    3960.0,
    90.0,
    1.0,
];
const PADE_13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

// Largest 1-norms for which each approximant reaches unit roundoff.
const THETA_3: f64 = 1.495585217958292e-2;
const THETA_5: f64 = 2.53939833006323e-1;
const THETA_7: f64 = 9.504178996162932e-1;
const THETA_9: f64 = 2.097847961257068e0;
const THETA_13: f64 = 5.371920351148152e0;

/// Computes `exp(m)` for a square complex matrix.
pub fn matrix_exponential(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !m.is_square() {
        return domain(format!(
            "matrix exponential of a non-square {}x{} matrix",
            m.rows(),
            m.cols()
        ));
    }
    let n = m.rows();
    if n == 0 {
        return Ok(ComplexMatrix::zeros(0, 0));
    }
    let norm = m.norm_one();
    if !norm.is_finite() {
        return domain("matrix exponential of a non-finite matrix");
    }

    for (theta, coeffs) in [
        (THETA_3, &PADE_3[..]),
        (THETA_5, &PADE_5[..]),
        (THETA_7, &PADE_7[..]),
        (THETA_9, &PADE_9[..]),
    ] {
        if norm <= theta {
            return pade_low(m, coeffs);
        }
    }

    let squarings = if norm > THETA_13 {
        (norm / THETA_13).log2().ceil() as i32
    } else {
        0
    };
    let scaled = m.scale_real(0.5_f64.powi(squarings));
    let mut result = pade_13(&scaled)?;
    for _ in 0..squarings {
        result = &result * &result;
    }
    Ok(result)
}

fn scaled_identity(n: usize, c: f64) -> ComplexMatrix {
    ComplexMatrix::identity(n).scale_real(c)
}

fn axpy(acc: &mut ComplexMatrix, c: f64, x: &ComplexMatrix) {
    *acc += &x.scale_real(c);
}

/// Padé approximants of degree 3, 5, 7, 9 from even powers of `m`.
fn pade_low(m: &ComplexMatrix, b: &[f64]) -> Result<ComplexMatrix> {
    let n = m.rows();
    let a2 = m * m;
    let mut u = scaled_identity(n, b[1]);
    let mut v = scaled_identity(n, b[0]);
    let mut power = ComplexMatrix::identity(n);
    for k in 1..b.len() / 2 {
        power = &power * &a2;
        axpy(&mut u, b[2 * k + 1], &power);
        axpy(&mut v, b[2 * k], &power);
    }
    let u = m * &u;
    solve_pade(&u, &v)
}

fn pade_13(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let b = &PADE_13;
    let n = m.rows();
    let a2 = m * m;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;

    let mut inner_u = a6.scale_real(b[13]);
    axpy(&mut inner_u, b[11], &a4);
    axpy(&mut inner_u, b[9], &a2);
    let mut u = &a6 * &inner_u;
    axpy(&mut u, b[7], &a6);
    axpy(&mut u, b[5], &a4);
    axpy(&mut u, b[3], &a2);
    u += &scaled_identity(n, b[1]);
    let u = m * &u;

    let mut inner_v = a6.scale_real(b[12]);
    axpy(&mut inner_v, b[10], &a4);
    axpy(&mut inner_v, b[8], &a2);
    let mut v = &a6 * &inner_v;
    axpy(&mut v, b[6], &a6);
    axpy(&mut v, b[4], &a4);
    axpy(&mut v, b[2], &a2);
    v += &scaled_identity(n, b[0]);

    solve_pade(&u, &v)
}

/// Solves (V - U) X = (V + U).
fn solve_pade(u: &ComplexMatrix, v: &ComplexMatrix) -> Result<ComplexMatrix> {
    let p = (v + u).to_nalgebra();
    let q = (v - u).to_nalgebra();
    let x = q
        .lu()
        .solve(&p)
        .ok_or_else(|| Error::NumericalInstability("singular Padé denominator".into()))?;
    let out = ComplexMatrix::from_nalgebra(&x);
    if out
        .as_slice()
        .iter()
        .any(|z: &C64| !z.re.is_finite() || !z.im.is_finite())
    {
        return Err(Error::NumericalInstability(
            "matrix exponential overflowed".into(),
        ));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exp_of_zero_is_identity() {
        let e = matrix_exponential(&ComplexMatrix::zeros(3, 3)).unwrap();
        assert!(e.max_abs_diff(&ComplexMatrix::identity(3)) < 1e-15);
    }

    #[test]
    fn exp_of_diagonal() {
        let (a, b) = (C64::new(0.3, -1.2), C64::new(-7.5, 4.0));
        let e = matrix_exponential(&ComplexMatrix::diagonal(&[a, b])).unwrap();
        assert!((e.get(0, 0) - a.exp()).norm() <= 1e-14 * a.exp().norm());
        assert!((e.get(1, 1) - b.exp()).norm() <= 1e-14 * b.exp().norm());
        assert_eq!(e.get(0, 1), C64::new(0.0, 0.0));
    }

    #[test]
    fn rejects_non_square() {
        assert!(matches!(
            matrix_exponential(&ComplexMatrix::zeros(2, 3)),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn nilpotent_block_is_exact() {
        // exp([[0, t], [0, 0]]) = [[1, t], [0, 1]] for every Padé branch.
        for t in [1e-3, 0.2, 0.9, 2.0, 40.0] {
            let m = ComplexMatrix::from_real(2, 2, &[0.0, t, 0.0, 0.0]).unwrap();
            let e = matrix_exponential(&m).unwrap();
            let expected = ComplexMatrix::from_real(2, 2, &[1.0, t, 0.0, 1.0]).unwrap();
            assert!(e.max_abs_diff(&expected) <= 1e-13 * t.max(1.0), "t = {t}");
        }
    }
}
