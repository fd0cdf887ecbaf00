use thiserror::Error;

/// Errors raised by model evaluation, curve analysis and the constructors.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("parameter error: {0}")]
    Parameter(String),

    #[error("degenerate curve: {0}")]
    DegenerateCurve(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("stencil needs {needed} samples but only {available} are available")]
    Stencil { needed: usize, available: usize },

    #[error("curve is not Legendre: max |eta(T)| = {residual:e}")]
    NonLegendre { residual: f64 },

    #[error("frame synthesis failed: {0}")]
    FrameSynthesis(String),

    #[error("singular spectrum: {0}")]
    SingularSpectrum(String),
}

pub type Result<T> = std::result::Result<T, Error>;
