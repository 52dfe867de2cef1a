use thiserror::Error;

/// Errors surfaced by symbol construction and the numerical operations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid symbol: {0}")]
    InvalidSymbol(String),
    #[error("one-sided limit required at breakpoint x = {0}")]
    SideRequired(f64),
    #[error("interval is not admissible: {0}")]
    AdmissibilityViolated(String),
    #[error("channel count balance violated: n+/s+ = {n_plus}/{s_plus}, n-/s- = {n_minus}/{s_minus}")]
    BalanceViolation {
        n_plus: usize,
        s_plus: usize,
        n_minus: usize,
        s_minus: usize,
    },
    #[error("counting boundary {0} carries nonzero spectral mass (flat-piece value)")]
    BoundaryMassNonzero(f64),
    #[error("argument {value} outside domain {domain}")]
    DomainError { value: f64, domain: &'static str },
    #[error("quadrature failed to converge (depth {depth}, estimate {estimate:e})")]
    QuadratureNonConvergence { depth: usize, estimate: f64 },
    #[error("breakpoint x = {0} is not a jump discontinuity")]
    NotAJump(f64),
    #[error("channel frames span {got} channels, multiplicity predicts {expected}")]
    FrameDeficient { got: usize, expected: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
