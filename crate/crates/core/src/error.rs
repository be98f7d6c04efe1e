use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("code parameter k must be at least 1")]
    ZeroK,

    #[error("parameter out of supported range: {0}")]
    Unsupported(String),

    #[error("length {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("local test requires x_0 = 0")]
    NonZeroFirstBit,

    #[error("promise violated: input is not a Hadamard codeword")]
    PromiseViolation,

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("parameter mismatch: {0}")]
    ParamMismatch(String),

    #[error("value {value} out of range [0, {bound})")]
    OutOfRange { value: u64, bound: u64 },

    #[error("malformed proof: {0}")]
    MalformedProof(String),

    #[error("budget exceeded: {what} needs {needed}, budget is {budget}")]
    BudgetExceeded {
        what: &'static str,
        needed: String,
        budget: String,
    },
}
