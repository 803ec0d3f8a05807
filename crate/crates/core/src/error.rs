use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("chart mismatch: {0} vs {1}")]
    ChartMismatch(String, String),
    #[error("unknown coordinate `{0}`")]
    UnknownCoordinate(String),
    #[error("expected {expected} values, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("degree mismatch: {0} vs {1}")]
    DegreeMismatch(usize, usize),
    #[error("invalid chart: {0}")]
    InvalidChart(String),
    #[error("{0}")]
    Usage(String),
    #[error("unsupported coordinate change: {0}")]
    UnsupportedChange(String),
    #[error("not Hamiltonian: {0}")]
    NotHamiltonian(String),
    #[error("not a Poisson form: {0}")]
    NotPoisson(String),
    #[error("invalid connection data: {0}")]
    InvalidConnection(String),
    #[error("invalid metric: {0}")]
    InvalidMetric(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn usage<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Usage(msg.into()))
}
