use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QalgError {
    #[error("pole: {0}")]
    Pole(String),
    #[error("integrand does not decay along the contour: {0}")]
    NonDecaying(String),
    #[error("quadrature did not converge: {what} (est_error {est:e}, tol {tol:e})")]
    NonConvergence { what: String, est: f64, tol: f64 },
    #[error("zero period")]
    ZeroPeriod,
    #[error("degenerate q: pi*eta*hbar is a multiple of pi")]
    DegenerateQ,
    #[error("point {0} is outside the required strip")]
    StripViolation(String),
    #[error("singular matrix: {0}")]
    Singular(String),
    #[error("resummation diverges: sup|phi_hat| = {0}")]
    Divergence(f64),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("invalid parameters: {0}")]
    Params(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, QalgError>;
