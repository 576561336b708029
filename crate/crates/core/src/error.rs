use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime >= 5")]
    NotPrime(u64),
    #[error("precision {0} is too small (need N >= 2)")]
    PrecisionTooSmall(u32),
    #[error("p^N = {p}^{n} does not fit the 62-bit residue kernel")]
    PrecisionTooLarge { p: u64, n: u32 },
    #[error("elements belong to different contexts")]
    ContextMismatch,
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("valuation {val} is below the requested position {t}")]
    ValuationBelow { val: i64, t: i64 },
    #[error("{j} is not coprime to {p}")]
    NotCoprime { j: i64, p: u64 },
    #[error("index {index} out of range {lo}..={hi}")]
    IndexOutOfRange { index: i64, lo: i64, hi: i64 },
    #[error("invalid homomorphism: {0}")]
    InvalidGamma(String),
    #[error("homomorphism is not surjective onto p^(2i+1) (minimal image valuation {min_val}, expected {expected})")]
    NotSurjective { min_val: i64, expected: i64 },
    #[error("bound violation: {0}")]
    BoundViolation(String),
    #[error("homomorphism is not of the form c*theta_a with c a unit")]
    NotOneParameter,
    #[error("lie ring quotient is not well defined: {0}")]
    NotWellDefined(String),
    #[error("unknown verification suite `{0}`")]
    UnknownSuite(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn exhausted(msg: impl Into<String>) -> Self {
        Error::PrecisionExhausted(msg.into())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
