use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("state is not normalized (norm defect {defect:e})")]
    NotNormalized { defect: f64 },
    #[error("matrix is not unitary (defect {defect:e})")]
    NotUnitary { defect: f64 },
    #[error("matrix is not hermitian (defect {defect:e})")]
    NotHermitian { defect: f64 },
    #[error("basis is not orthonormal (defect {defect:e})")]
    NotOrthonormal { defect: f64 },
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("integration needs {required} steps, limit is {limit}")]
    StepLimit { required: u64, limit: u64 },
    #[error("frequency grid is empty")]
    EmptyGrid,
    #[error("frequency grid is not strictly increasing at index {index}")]
    UnsortedGrid { index: usize },
    #[error("central fringe is not bracketed by the grid")]
    FringeNotBracketed,
    #[error("fringe contrast {contrast:e} is below the measurable threshold")]
    NoFringe { contrast: f64 },
    #[error("relative uncertainty has a pole here (denominator {denominator:e})")]
    Pole { denominator: f64 },
    #[error("residual does not change sign on [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },
    #[error("quadrature window {window} does not match the recurrence period {period}")]
    WindowMismatch { window: f64, period: f64 },
    #[error("clock dynamics do not recur after the stated period (defect {defect:e})")]
    NotPeriodic { defect: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn finite(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be finite",
        })
    }
}

pub(crate) fn positive(name: &'static str, value: f64) -> Result<f64> {
    if finite(name, value)? > 0.0 {
        Ok(value)
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be > 0",
        })
    }
}

pub(crate) fn non_negative(name: &'static str, value: f64) -> Result<f64> {
    if finite(name, value)? >= 0.0 {
        Ok(value)
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be >= 0",
        })
    }
}
