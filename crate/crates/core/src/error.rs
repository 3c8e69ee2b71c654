use thiserror::Error;

/// Errors raised by the numerical kernels.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("unsupported configuration: {0}")]
    UnsupportedConfiguration(String),

    #[error("numerical instability: {0}")]
    NumericalInstability(String),

    #[error("steady state is not unique: null space has dimension {dimension}")]
    DegenerateSteadyState { dimension: usize },

    #[error("singular susceptibility: {0}")]
    Singularity(String),

    #[error("no resonant wave number below {k_max:e} 1/m for target frequency {omega:e} rad/s")]
    OutOfBand { omega: f64, k_max: f64 },

    #[error("Zeeman splitting {omega_h:e} rad/s reaches the zero-field splitting {d0:e} rad/s")]
    LevelCrossing { omega_h: f64, d0: f64 },

    #[error("degenerate surface mode at k = {k:e} 1/m")]
    DegenerateMode { k: f64 },

    #[error(
        "evaluation point x = {x:e} m lies inside the film (x must exceed {half_thickness:e} m)"
    )]
    OutOfRegion { x: f64, half_thickness: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
