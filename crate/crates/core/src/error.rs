use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("window mismatch: W = {0} vs W = {1}")]
    WindowMismatch(u32, u32),

    #[error("divergent factor 1/(1 - L^{l} q^{q})")]
    Divergent { l: i64, q: String },

    #[error("series is not invertible: {0}")]
    NotInvertible(String),

    #[error("L-exponent shift {0} is not an integer")]
    FractionalShift(String),

    #[error("coefficient of L^-{n} q^{d} lies outside the window (W = {window}, q_max = {q_max})")]
    OutOfWindow {
        n: u32,
        d: String,
        window: u32,
        q_max: String,
    },

    #[error("decomposition has no parts")]
    EmptyDecomposition,

    #[error("rank {r} and degree {a} are not coprime")]
    NotCoprime { r: u32, a: i64 },

    #[error("window too shallow: {0}")]
    WindowExhausted(String),

    #[error("excluded decomposition: {0}")]
    ExcludedCase(String),

    #[error("q-exponent {0} is not an integer")]
    NonIntegralExponent(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
