use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("set must be nonempty")]
    EmptySet,
    #[error(
        "set elements must be strictly increasing with gaps of at most one (at index {index})"
    )]
    GapTooLarge { index: usize },
    #[error("invalid parity interval [{lo}, {hi}]: need lo <= hi and even span")]
    BadParityInterval { lo: i64, hi: i64 },
    #[error("vertex set must be nonempty")]
    EmptyVertexSet,
    #[error("dimension mismatch: expected {expected} coordinates, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("value {value} at vertex {vertex} lies outside [{min}, {max}]")]
    OutOfRange {
        vertex: usize,
        value: i64,
        min: i64,
        max: i64,
    },
    #[error("point is not in B: coordinate {vertex} = {value}")]
    NotInProfile { vertex: usize, value: i64 },
    #[error("point is not in the jump system")]
    NotInJumpSystem,
    #[error("edge {edge} has endpoint {endpoint} outside 0..{n}")]
    BadEndpoint {
        edge: usize,
        endpoint: usize,
        n: usize,
    },
    #[error("edge {edge} weight {weight} does not fit in 32 bits")]
    WeightOverflow { edge: usize, weight: i64 },
    #[error("edge id {edge} out of range (graph has {m} edges)")]
    BadEdgeId { edge: usize, m: usize },
    #[error("initial factor violates B at vertex {vertex} (degree {degree})")]
    InfeasibleStart { vertex: usize, degree: i64 },
    #[error("enumeration budget exceeded: need {needed}, budget {budget}")]
    BudgetExceeded { needed: u128, budget: u64 },
    #[error("invalid 2-step decomposition: {0}")]
    BadDecomposition(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("arithmetic overflow")]
    Overflow,
}
