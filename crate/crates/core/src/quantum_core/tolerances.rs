/// Numerical tolerances shared by every module.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Max entrywise |rho - rho^dagger| accepted for a density matrix.
    pub hermiticity: f64,
    /// Max |Tr rho - 1| accepted for a density matrix.
    pub trace: f64,
    /// Smallest eigenvalue accepted for a density matrix.
    pub positivity: f64,
    /// Relative accuracy target of the matrix exponential.
    pub expm: f64,
    /// Trace drift silently repaired after propagation.
    pub trace_repair: f64,
    /// Trace drift above which propagation is rejected.
    pub trace_failure: f64,
    /// Relative singular-value threshold used to count null vectors.
    pub null_space: f64,
    /// Clamp window for fidelities that stray outside [0, 1].
    pub fidelity_clamp: f64,
    /// Norm tolerance for normalized pure states.
    pub normalization: f64,
}

pub const TOLERANCES: Tolerances = Tolerances {
    hermiticity: 1e-12,
    trace: 1e-10,
    positivity: -1e-9,
    expm: 1e-10,
    trace_repair: 1e-12,
    trace_failure: 1e-8,
    null_space: 1e-8,
    fidelity_clamp: 1e-12,
    normalization: 1e-12,
};
