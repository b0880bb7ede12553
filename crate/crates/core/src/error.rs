use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("argument {value} outside the domain of {function}")]
    Domain { function: &'static str, value: f64 },

    #[error("momentum cutoff not met: achieved ratio {achieved:e}, requested {requested:e}")]
    CutoffNotMet { achieved: f64, requested: f64 },

    #[error("under-resolved grid at t = {t}: norm {norm} deviates from 1 by more than {tolerance:e}")]
    UnderResolved { t: f64, norm: f64, tolerance: f64 },

    #[error("separation (dt = {dt}, dx = {dx}) is not space-like")]
    NotSpaceLike { dt: f64, dx: f64 },

    #[error("kernel quadrature did not converge: {0}")]
    Convergence(String),

    #[error("spatial grid [{x_min}, {x_max}] does not cover the light cone [{left}, {right}] plus margin {margin}")]
    Coverage {
        x_min: f64,
        x_max: f64,
        left: f64,
        right: f64,
        margin: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
