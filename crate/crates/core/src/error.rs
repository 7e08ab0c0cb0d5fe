use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("function `{func}` is undefined at {point}")]
    OutOfDomain { func: String, point: f64 },
    #[error("nodes {0} and {1} coincide but the formula needs distinct nodes")]
    CoincidentNodes(f64, f64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("matrix function is not positive definite at t = {t}")]
    NotPositiveDefinite { t: f64 },
    #[error("quadrature did not reach tolerance {tol:e} (last change {change:e})")]
    Quadrature { tol: f64, change: f64 },
    #[error("grid too coarse: spectral tail {tail:e} relative to the peak")]
    GridTooCoarse { tail: f64 },
    #[error("truncation bound {bound:e} exceeds tolerance {tol:e}")]
    Uncertified { bound: f64, tol: f64 },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
