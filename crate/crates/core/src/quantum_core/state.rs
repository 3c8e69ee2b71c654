use num_complex::Complex64 as C64;

use super::linalg;
use super::matrix::ComplexMatrix;
use super::tolerances::TOLERANCES;
use crate::error::{domain, Error, Result};

/// Normalized state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: Vec<C64>,
}

impl PureState {
    /// Normalizes `amplitudes` to unit Euclidean norm.
    pub fn normalize(amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return domain("state amplitudes must be finite");
        }
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return domain("cannot normalize the zero vector");
        }
        Ok(Self {
            amplitudes: amplitudes.into_iter().map(|z| z / norm).collect(),
        })
    }

    /// Computational basis state `|index>` in a space of dimension `dim`.
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return domain(format!("basis index {index} outside dimension {dim}"));
        }
        let mut amplitudes = vec![C64::new(0.0, 0.0); dim];
        amplitudes[index] = C64::new(1.0, 0.0);
        Ok(Self { amplitudes })
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &PureState) -> C64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Multiplies every amplitude by `e^{i phase}`.
    pub fn with_global_phase(&self, phase: f64) -> Self {
        let f = C64::from_polar(1.0, phase);
        Self {
            amplitudes: self.amplitudes.iter().map(|z| z * f).collect(),
        }
    }

    pub fn projector(&self) -> DensityMatrix {
        let m = ComplexMatrix::from_fn(self.dim(), self.dim(), |i, j| {
            self.amplitudes[i] * self.amplitudes[j].conj()
        });
        DensityMatrix { matrix: m }
    }
}

/// Hermitian, unit-trace, positive semidefinite matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity against the shared
    /// tolerances.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return domain("density matrix must be square");
        }
        let herm = matrix.hermiticity_error();
        if herm > TOLERANCES.hermiticity {
            return domain(format!(
                "density matrix is not Hermitian (deviation {herm:e})"
            ));
        }
        let trace = matrix.trace();
        if (trace - C64::new(1.0, 0.0)).norm() > TOLERANCES.trace {
            return domain(format!("density matrix trace is {trace}"));
        }
        let rho = Self { matrix };
        let min = rho.min_eigenvalue();
        if min < TOLERANCES.positivity {
            return domain(format!("density matrix has eigenvalue {min:e}"));
        }
        Ok(rho)
    }

    /// Wraps a matrix whose Hermiticity and trace the caller has already
    /// enforced.
    pub(crate) fn from_trusted(matrix: ComplexMatrix) -> Self {
        Self { matrix }
    }

    /// `|index><index|`.
    pub fn basis_projector(dim: usize, index: usize) -> Result<Self> {
        Ok(PureState::basis(dim, index)?.projector())
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::hermitian_eigenvalues(&self.matrix)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().first().copied().unwrap_or(0.0)
    }

    /// `Tr(op rho)`.
    pub fn expectation(&self, op: &ComplexMatrix) -> C64 {
        (op * &self.matrix).trace()
    }

    /// `<psi|rho|psi>`.
    pub fn overlap(&self, psi: &PureState) -> Result<f64> {
        if psi.dim() != self.dim() {
            return domain(format!(
                "state dimension {} does not match density matrix {}",
                psi.dim(),
                self.dim()
            ));
        }
        let a = psi.amplitudes();
        let mut acc = C64::new(0.0, 0.0);
        for (i, ai) in a.iter().enumerate() {
            for (j, aj) in a.iter().enumerate() {
                acc += ai.conj() * self.matrix.get(i, j) * aj;
            }
        }
        Ok(acc.re)
    }
}

/// `sqrt(<psi|rho|psi>)`, clamped to [0, 1].
pub fn fidelity_pure(rho: &DensityMatrix, psi: &PureState) -> Result<f64> {
    let f2 = rho.overlap(psi)?;
    Ok(f2.clamp(0.0, 1.0).sqrt())
}

/// Column-stacked vector of a square matrix: entry (i, j) lands at `i + D*j`.
pub fn vectorize_matrix(m: &ComplexMatrix) -> Vec<C64> {
    let d = m.rows();
    let mut v = Vec::with_capacity(d * m.cols());
    for j in 0..m.cols() {
        for i in 0..d {
            v.push(m.get(i, j));
        }
    }
    v
}

pub fn vectorize(rho: &DensityMatrix) -> Vec<C64> {
    vectorize_matrix(rho.matrix())
}

/// Inverse of [`vectorize_matrix`].
pub fn devectorize_matrix(v: &[C64]) -> Result<ComplexMatrix> {
    let d = (v.len() as f64).sqrt().round() as usize;
    if d * d != v.len() {
        return domain(format!("vector length {} is not a perfect square", v.len()));
    }
    Ok(ComplexMatrix::from_fn(d, d, |i, j| v[i + d * j]))
}

/// Inverse of [`vectorize`]; the result is validated as a density matrix.
pub fn devectorize(v: &[C64]) -> Result<DensityMatrix> {
    DensityMatrix::new(devectorize_matrix(v)?)
}

/// Superoperator of `rho -> a rho b` in the column-stacking convention.
pub fn sandwich(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    super::kron(&b.transpose(), a)
}

/// Lowering operator `|0><1|` on `site` of an `n_qubits` register, qubit 0
/// being the leftmost tensor factor.
pub fn embed_lowering(site: usize, n_qubits: usize) -> Result<ComplexMatrix> {
    if site >= n_qubits {
        return Err(Error::Domain(format!(
            "site {site} outside a {n_qubits}-qubit register"
        )));
    }
    let lowering = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0])?;
    let id = ComplexMatrix::identity(2);
    let mut op = ComplexMatrix::identity(1);
    for q in 0..n_qubits {
        op = super::kron(&op, if q == site { &lowering } else { &id });
    }
    Ok(op)
}

/// Index of the basis ket `|b_0 b_1 ...>` (qubit 0 is the most significant bit).
pub fn basis_index(bits: &[u8]) -> usize {
    bits.iter()
        .fold(0, |acc, &b| (acc << 1) | usize::from(b != 0))
}
