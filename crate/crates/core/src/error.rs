use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("base {0} is not supported (need 2 <= |base| <= 36)")]
    InvalidBase(i64),
    #[error("{value} cannot be written in base {base}")]
    Unrepresentable { value: i64, base: i64 },
    #[error("digit {digit} is out of range for base {base}")]
    DigitOutOfRange { digit: i64, base: i64 },
    #[error("arithmetic overflow")]
    Overflow,
    #[error("cannot pad a word of length {have} to length {want}")]
    PadTooShort { have: usize, want: usize },
    #[error("track signatures differ: {0}")]
    SignatureMismatch(String),
    #[error("expected {expected} values, got {got}")]
    Arity { expected: usize, got: usize },
    #[error("parse error at {line}:{col}: {msg}")]
    Parse {
        line: usize,
        col: usize,
        msg: String,
    },
    #[error("unknown name `{0}`")]
    Unbound(String),
    #[error("variable `{0}` is used with conflicting numeration systems")]
    MixedSystems(String),
    #[error("formula has free variables: {0}")]
    FreeVariables(String),
    #[error("intermediate automaton exceeds {0} states")]
    SizeLimit(usize),
    #[error("malformed morphism: {0}")]
    Morphism(String),
    #[error("malformed automaton file: {0}")]
    Format(String),
    #[error("inference failed: {0}")]
    Inference(String),
    #[error("{0}")]
    Invalid(String),
}

impl Error {
    pub(crate) fn parse(line: usize, col: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            col,
            msg: msg.into(),
        }
    }
}
