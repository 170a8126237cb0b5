use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("sort mismatch: {0}")]
    SortMismatch(String),
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("arity mismatch for `{name}`: expected {expected}, got {got}")]
    ArityMismatch {
        name: String,
        expected: usize,
        got: usize,
    },
    #[error("invalid position `{0}`")]
    InvalidPosition(String),
    #[error("nonlinear pattern: variable `{0}` occurs more than once")]
    NonlinearPattern(String),
    #[error("ill-formed: {0}")]
    IllFormed(String),
    #[error("unsatisfiable input")]
    UnsatisfiableInput,
    #[error("not pattern-general: {0}")]
    NotPatternGeneral(String),
    #[error("rule is not left-linear")]
    NotLeftLinear,
    #[error("rule is not left-value-free")]
    NotLeftValueFree,
    #[error("not a redex: {0}")]
    NotARedex(String),
    #[error("unsupported theory: {0}")]
    UnsupportedTheory(String),
    #[error("solver error: {0}")]
    Solver(String),
    #[error("solver answered unknown")]
    SolverUnknown,
    #[error("solver timeout")]
    SolverTimeout,
    #[error("arithmetic overflow")]
    Overflow,
    #[error("budget exhausted: {0}")]
    BudgetExhausted(String),
    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("unknown theorem id `{0}`")]
    UnknownTheorem(String),
}

pub type Result<T> = std::result::Result<T, Error>;
