use alloc::string::String;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("polynomials belong to different contexts")]
    ContextMismatch,
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("unbound symbol `{0}` in numeric evaluation")]
    UnboundSymbol(String),
    #[error("duplicate symbol `{0}`")]
    DuplicateSymbol(String),
    #[error("shift constant must be nonzero; resonant terms use the antiderivative")]
    ZeroShift,
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("non-polynomial expression: {0}")]
    NonPolynomial(String),
    #[error("invalid specification: {0}")]
    InvalidSpec(String),
    #[error("window too small: need W >= {needed}, have {have}")]
    WindowTooSmall { needed: i64, have: i64 },
    #[error("U is not even (U(z) != U(-z))")]
    NotEven,
    #[error("conjugate pairing violated: {0}")]
    PairingViolated(String),
    #[error("{0}")]
    Unsupported(String),
}

pub type Result<T> = core::result::Result<T, Error>;
