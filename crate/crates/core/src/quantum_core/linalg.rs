//! Thin bridge to nalgebra for the decompositions the kernels need.

use nalgebra::DVector;
use num_complex::Complex64 as C64;

use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};

/// Ascending eigenvalues of a Hermitian matrix (only the lower triangle is read).
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Vec<f64> {
    let mut values: Vec<f64> = m
        .to_nalgebra()
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .collect();
    values.sort_by(f64::total_cmp);
    values
}

/// Eigenvalues of a general square complex matrix via the complex Schur form.
pub fn eigenvalues(m: &ComplexMatrix) -> Result<Vec<C64>> {
    m.to_nalgebra()
        .schur()
        .eigenvalues()
        .map(|v| v.iter().copied().collect())
        .ok_or_else(|| Error::NumericalInstability("Schur decomposition did not converge".into()))
}

/// Singular values in descending order.
pub fn singular_values(m: &ComplexMatrix) -> Vec<f64> {
    let mut s: Vec<f64> = m.to_nalgebra().singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Solves `m x = rhs` by LU with partial pivoting.
pub fn solve(m: &ComplexMatrix, rhs: &[C64]) -> Result<Vec<C64>> {
    let b = DVector::from_column_slice(rhs);
    m.to_nalgebra()
        .lu()
        .solve(&b)
        .map(|x| x.iter().copied().collect())
        .ok_or_else(|| Error::NumericalInstability("singular linear system".into()))
}
