use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not a prime (only prime fields are supported)")]
    NotPrime(u64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("Walecki coloring needs an even order, got {0}")]
    OddOrder(usize),
    #[error("index {index} out of range for dimension {alpha}")]
    IndexOutOfRange { index: usize, alpha: usize },
    #[error("budget exceeded: {what} went past {limit}")]
    BudgetExceeded { what: String, limit: usize },
    #[error("atom {atom} admits two distinct (tau+, k) labels")]
    LabelAmbiguity { atom: usize },
    #[error("{0} is not an atom of the generated algebra")]
    NotAnAtom(String),
    #[error("atoms are not closed under {op}: image of atom {atom} is not a union of atoms")]
    NotClosed { op: String, atom: usize },
    #[error("unsupported case: {0}")]
    UnsupportedCase(String),
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("variable x[{0}] has no value")]
    UnboundVariable(usize),
    #[error("check mode not applicable: {0}")]
    ModeInapplicable(String),
    #[error("operation {0} is not part of this algebra's signature")]
    OperationUnavailable(String),
    #[error("hypothesis `{which}` failed, witness {witness}")]
    HypothesisFailed { which: String, witness: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
