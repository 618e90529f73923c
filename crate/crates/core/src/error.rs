use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("line {line}: variable `{name}` declared twice")]
    DuplicateVariable { name: String, line: usize },
    #[error("line {line}, column {column}: undeclared variable `{name}`")]
    UndeclaredVariable {
        name: String,
        line: usize,
        column: usize,
    },
    #[error("network declares no variables")]
    EmptyNetwork,
    #[error("network has {n} variables, cap is {cap}")]
    TooManyVariables { n: usize, cap: usize },
    #[error("function of `{name}` mentions {size} variables; support too large (limit 20)")]
    SupportTooLarge { name: String, size: usize },
    #[error("state space of 2^{width} states exceeds the cap of 2^{cap_bits}")]
    StateCapExceeded { width: usize, cap_bits: usize },
    #[error("invalid state string `{0}`")]
    InvalidState(String),
    #[error("state `{state}` has width {got}, expected {expected}")]
    StateWidth {
        state: String,
        got: usize,
        expected: usize,
    },
    #[error("layout is not contained in the source layout")]
    LayoutMismatch,
    #[error("variable set is not closed under regulators")]
    NotParentClosed,
    #[error("empty universe: inconsistent parent basin")]
    EmptyUniverse,
    #[error("empty target set")]
    EmptyTargetSet,
    #[error("need at least two attractors")]
    TooFewAttractors,
    #[error("pair ({0},{1}) uncontrollable")]
    Uncontrollable(usize, usize),
    #[error("state `{0}` does not belong to any attractor")]
    UnknownAttractor(String),
    #[error("{0}")]
    Invalid(String),
}
