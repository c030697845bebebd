use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("graph must have at least one vertex")]
    NoVertices,

    #[error("graph is disconnected")]
    Disconnected,

    #[error("index {index} out of range (bound {bound})")]
    IndexOutOfRange { index: usize, bound: usize },

    #[error("size mismatch: expected {expected}, found {found}")]
    SizeMismatch { expected: usize, found: usize },

    #[error("firing subset must be proper and nonempty")]
    EmptyOrFullSubset,

    #[error("function is not a member of the linear system")]
    NotMember,

    #[error("degenerate cone: {0}")]
    DegenerateCone(String),

    #[error("degree {degree} exceeds configured bound {bound}")]
    DegreeOverflow { degree: u32, bound: u32 },

    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("invalid piecewise linear function: {0}")]
    InvalidPl(String),

    #[error("refinement factor {factor} does not make {what} integral")]
    NonIntegralRefinement { factor: u64, what: String },

    #[error("invalid metric graph: {0}")]
    InvalidMetricGraph(String),

    #[error("subgraph is empty")]
    EmptySubgraph,

    #[error("subgraph must be proper")]
    NotProper,

    #[error("hypothesis failed: {0}")]
    HypothesisFailure(String),

    #[error("verification failed: {0}")]
    VerificationFailed(String),

    #[error("integer overflow in {0}")]
    Overflow(&'static str),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
