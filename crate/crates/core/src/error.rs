use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("0 raised to an exponent with nonpositive floor")]
    ZeroToNonpositivePower,
    #[error("log-Gamma evaluated at nonpositive integer {0}")]
    PoleAtNonpositiveInteger(f64),
    #[error("Gamma factor hit a pole in {0}")]
    PoleInProduct(&'static str),
    #[error("indeterminate or divergent Gamma ratio in {0}")]
    IndeterminateRatio(&'static str),
    #[error("coincident points in {0}")]
    CoincidentPoints(&'static str),
    #[error("evaluation at a non-removable singularity")]
    SingularPoint,
    #[error("integrand returned a non-finite value at a regular point")]
    NonFiniteSample,
    #[error("sample count {n} not divisible by chunk count {chunks}")]
    BadChunking { n: u64, chunks: u64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
