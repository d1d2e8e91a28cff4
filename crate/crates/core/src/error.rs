use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HornError {
    #[error("trace {trace:e} exceeds tolerance {tol:e} for a traceless spectrum")]
    Trace { trace: f64, tol: f64 },

    #[error("weight label {index} would become negative")]
    Dominance { index: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("sums differ: {left} vs {right}")]
    SumMismatch { left: f64, right: f64 },

    #[error("eigenvalue computation failed: {0}")]
    Eigen(String),

    #[error("Fourier cutoff too small: tail estimate {tail:e} exceeds target {target:e}")]
    CutoffTooSmall { tail: f64, target: f64 },

    #[error("spectrum has repeated entries")]
    DegenerateSpectrum,

    #[error("cubic z^3 + p z + q has no real root triple (p={p}, q={q})")]
    NoRealTriple { p: f64, q: f64 },

    #[error("trigonometric reduction failed: {0}")]
    ReductionFailure(String),

    #[error("no quasi-polynomial of period <= {max_period} fits the counts")]
    PeriodUndetermined { max_period: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, HornError>;

pub(crate) fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(HornError::DimensionMismatch { expected, found })
    }
}
