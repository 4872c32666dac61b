use thiserror::Error;

use crate::graph::NodeId;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("a scenario needs at least one observable")]
    EmptyScenario,

    #[error("node {0} is not part of the graph")]
    ForeignNode(NodeId),

    #[error("no edge between {0} and {1}")]
    MissingEdge(NodeId, NodeId),

    #[error("coefficient vector has length {got}, graph has {expected} edges")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("inequalities live on different graphs")]
    GraphMismatch,

    #[error("operation needs a {expected} graph")]
    WrongGraphKind { expected: &'static str },

    #[error("enumeration over {nodes} free observables exceeds the cap of {cap}")]
    EnumerationCap { nodes: usize, cap: usize },

    #[error("graph has {0} non-X nodes; at most 63 are supported")]
    TooManyNodes(usize),

    #[error("coefficient does not fit the fixed-width fast path")]
    Overflow,

    #[error("target scenario ({target_a}, {target_b}) is smaller than ({n_a}, {n_b})")]
    ShrinkingTarget { n_a: usize, n_b: usize, target_a: usize, target_b: usize },

    #[error("illegal permutation: {0}")]
    IllegalPermutation(String),

    #[error("canonical search budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("item {index}: {inner}")]
    Item { index: usize, inner: Box<Error> },

    #[error("edge {0}{1} has zero coefficient, nothing to eliminate")]
    ZeroCoefficient(NodeId, NodeId),

    #[error("triangle orientation does not cancel the target term")]
    WrongOrientation,

    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("unknown catalog entry `{0}`")]
    UnknownCatalogEntry(String),

    #[error("point set is not full-dimensional: affine hull has dimension {affine_dim} in R^{ambient}")]
    Degenerate { affine_dim: usize, ambient: usize },

    #[error("n = {0} is outside the supported range")]
    UnsupportedSize(usize),

    #[error("n = 7 hull enumeration is long-running; enable it explicitly")]
    LongRunning,

    #[error("no facet list available for n = {0}")]
    MissingFacets(usize),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("format `{0}` is not available for this inequality")]
    FormatMismatch(&'static str),
}

impl Error {
    pub(crate) fn at(self, index: usize) -> Self {
        Error::Item { index, inner: Box::new(self) }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
