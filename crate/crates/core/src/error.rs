use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("edge #{}: self-loop at vertex {vertex}", index + 1)]
    SelfLoop { index: usize, vertex: usize },
    #[error("edge #{}: duplicates edge #{}", index + 1, first + 1)]
    DuplicateEdge { index: usize, first: usize },
    #[error("edge #{}: endpoint {vertex} out of range for {n} vertices", index + 1)]
    EndpointOutOfRange {
        index: usize,
        vertex: usize,
        n: usize,
    },
}

impl GraphError {
    /// Position of the offending edge in the input list.
    pub fn index(&self) -> usize {
        match *self {
            GraphError::SelfLoop { index, .. }
            | GraphError::DuplicateEdge { index, .. }
            | GraphError::EndpointOutOfRange { index, .. } => index,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParamsError {
    #[error("maximum degree must be at least 2, got {0}")]
    DegreeTooSmall(u64),
    #[error("radius must be at least 2, got {0}")]
    RadiusTooSmall(u32),
    #[error("palette arithmetic overflows 128-bit integers (delta={delta}, r={r})")]
    Overflow { delta: u64, r: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ColouringError {
    #[error("no colour in [1, {modulus}] is free modulo {modulus} at vertex {vertex}")]
    GreedyInfeasible { vertex: usize, modulus: i128 },
    #[error("colouring has {got} vertex colours for {expected} vertices")]
    VertexCountMismatch { expected: usize, got: usize },
    #[error("colouring has {got} edge colours for {expected} edges")]
    EdgeCountMismatch { expected: usize, got: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgorithmError {
    #[error(transparent)]
    Params(#[from] ParamsError),
    #[error(transparent)]
    Colouring(#[from] ColouringError),
    #[error("resampling budget must be at least one round")]
    ZeroRounds,
    #[error("radius must be at least 1")]
    ZeroRadius,
    #[error("invariant breached after processing vertex {vertex}: {detail}")]
    InvariantBreach { vertex: usize, detail: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: {error}")]
    Graph { line: usize, error: GraphError },
    #[error("missing problem line `p <n> <m>`")]
    MissingHeader,
    #[error("header declares {declared} edges but {found} were listed")]
    EdgeCountMismatch { declared: usize, found: usize },
    #[error("incomplete colouring: {0}")]
    Incomplete(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenerateError {
    #[error("invalid generator parameters: {0}")]
    InvalidParameters(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}
