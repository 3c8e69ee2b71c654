//! Dense complex linear algebra for small qubit registers: operators,
//! states, column-stacked superoperators and the matrix exponential.

mod expm;
pub mod linalg;
mod matrix;
mod state;
mod tolerances;

pub use expm::matrix_exponential;
pub use matrix::{kron, ComplexMatrix};
pub use state::{
    basis_index, devectorize, devectorize_matrix, embed_lowering, fidelity_pure, sandwich,
    vectorize, vectorize_matrix, DensityMatrix, PureState,
};
pub use tolerances::{Tolerances, TOLERANCES};

pub use num_complex::Complex64 as C64;
