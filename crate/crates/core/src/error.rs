use thiserror::Error;

/// Line-numbered failure while reading the instance text format.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}: malformed header, expected `p csp <n> <d>`")]
    MalformedHeader { line: usize },
    #[error("line {line}: nogood line before the `p csp` header")]
    MissingHeader { line: usize },
    #[error("line {line}: duplicate `p csp` header")]
    DuplicateHeader { line: usize },
    #[error("line {line}: malformed nogood line: {reason}")]
    MalformedNogood { line: usize, reason: String },
    #[error("line {line}: variable {var} out of range 1..={n}")]
    VariableOutOfRange { line: usize, var: u64, n: usize },
    #[error("line {line}: value {value} out of range 0..{d}")]
    ValueOutOfRange { line: usize, value: u64, d: u32 },
    #[error("line {line}: variable {var} repeated within one nogood")]
    RepeatedVariable { line: usize, var: u32 },
    #[error("line {line}: unrecognized line")]
    UnknownLine { line: usize },
    #[error("input is empty or has no `p csp` header")]
    NoHeader,
    #[error("input is not valid UTF-8")]
    Encoding,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("variable {0} is already assigned")]
    VariableAssigned(u32),
    #[error("variable {var} out of range 1..={n}")]
    VariableOutOfRange { var: u32, n: usize },
    #[error("partial assignment is not total ({assigned} of {n} assigned)")]
    NotTotal { assigned: usize, n: usize },
    #[error("invalid generator parameters: {0}")]
    InvalidParameters(String),
    #[error("search space d^n exceeds the oracle cap {cap}")]
    CapExceeded { cap: u64 },
    #[error("point is not a member of the set")]
    NotInSet,
    #[error("point set must be nonempty")]
    EmptySet,
    #[error("assignment is not a solution of the instance")]
    NotASolution,
    #[error("repeat count exceeds u64::MAX; pass an explicit max_repeats")]
    RepeatOverflow,
    #[error("root bracketing failed for d={d}, k={k}: {reason}")]
    SandwichViolation { d: u32, k: u32, reason: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
