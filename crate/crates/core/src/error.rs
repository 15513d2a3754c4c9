use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("qubit count {got} outside 1..={cap}")]
    QubitCount { got: usize, cap: usize },
    #[error("qubit {index} out of range for a {n}-qubit register")]
    QubitIndex { index: usize, n: usize },
    #[error("qubit {0} appears twice in one operation")]
    RepeatedQubit(usize),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("matrix is not unitary (deviation {0:.3e})")]
    NotUnitary(f64),
    #[error("operator is not Hermitian")]
    NotHermitian,
    #[error("branch has probability {0:.3e}")]
    ForbiddenBranch(f64),
    #[error("state has zero norm")]
    ZeroNorm,
    #[error("self-loop on vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),
    #[error("vertex {v} out of range for {n} vertices")]
    Vertex { v: usize, n: usize },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("merge set {0} is not connected")]
    DisconnectedMergeSet(usize),
    #[error("invalid partition: {0}")]
    Partition(String),
    #[error("invalid pattern: {0}")]
    Pattern(String),
    #[error("measurement dependencies form a cycle through qubit {0}")]
    Cycle(usize),
    #[error("wiring is not a bijection: {0}")]
    Wiring(String),
    #[error("invalid cut: {0}")]
    Cut(String),
    #[error("{what} is {got}, cap is {cap}")]
    Cap {
        what: &'static str,
        got: usize,
        cap: usize,
    },
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
