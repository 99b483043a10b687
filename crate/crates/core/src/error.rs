use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid field modulus {0}: q must be a prime with q = 1 (mod 4) and q >= 5")]
    InvalidModulus(u64),

    #[error("polynomials live over different fields (q = {0} and q = {1})")]
    FieldMismatch(u32, u32),

    #[error("division by the zero polynomial")]
    DivisionByZero,

    #[error("the zero polynomial is not allowed here")]
    ZeroPolynomial,

    #[error("polynomial {0} is not monic")]
    NotMonic(String),

    #[error("polynomial {0} is not irreducible")]
    NotIrreducible(String),

    #[error("polynomial {0} is not square-free")]
    NotSquarefree(String),

    #[error("polynomial {poly} is not in H_{degree} (monic, square-free, odd degree)")]
    NotInFamily { poly: String, degree: usize },

    #[error("cannot parse {input:?}: {reason}")]
    Parse { input: String, reason: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("zeta_q has a pole at s = {0}")]
    Pole(String),

    #[error("Euler product diverges: {0}")]
    Divergent(String),

    #[error("Euler truncation did not reach tolerance {tol:e} within {cap} prime degrees")]
    TruncationUnreachable { tol: f64, cap: usize },

    #[error("integer overflow while computing {0}")]
    Overflow(&'static str),

    #[error("root finding failed for {poly}: {reason}")]
    RootFinding { poly: String, reason: String },

    #[error("exhaustive enumeration of {count} polynomials exceeds the budget of {budget}; use sampled mode")]
    BudgetExceeded { count: u128, budget: u128 },

    #[error("functional failed on D = {poly}: {source}")]
    Functional { poly: String, source: Box<Error> },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn parse_err(input: &str, reason: impl Into<String>) -> Error {
    Error::Parse {
        input: input.to_string(),
        reason: reason.into(),
    }
}
