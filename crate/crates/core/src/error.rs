use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GraphError {
    #[error("edge {edge} has non-positive length {length}")]
    NonPositiveLength { edge: usize, length: f64 },
    #[error("graph is disconnected ({components} components)")]
    DisconnectedGraph { components: usize },
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error("duplicate node `{0}`")]
    DuplicateNode(String),
    #[error("graph has no nodes")]
    EmptyGraph,
    #[error("step must be positive and finite, got {0}")]
    NonPositiveStep(f64),
    #[error("invalid graph point: {0}")]
    InvalidPoint(&'static str),
    #[error("point cloud is empty")]
    EmptyPointCloud,
    #[error("point {index} has dimension {found}, expected {expected}")]
    DimensionMismatch { index: usize, expected: usize, found: usize },
    #[error("point {index} has a non-finite coordinate")]
    NonFiniteCoordinate { index: usize },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DistanceError {
    #[error("basepoint set is empty")]
    EmptyBasepointSet,
    #[error("delta must be finite and non-negative, got {0}")]
    InvalidDelta(f64),
    #[error("refinement needs a positive target or at least one round")]
    InvalidRefinement,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DiagramError {
    #[error("diagram point ({birth}, {death}) violates birth >= death >= 0")]
    InvalidPoint { birth: f64, death: f64 },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}
