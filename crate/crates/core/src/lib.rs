//! Persistence-distortion distance between finite metric graphs.
//!
//! Every basepoint of a metric graph induces a geodesic distance function;
//! the 0-dimensional super-level-set persistence diagram of that function
//! summarizes the graph as seen from the basepoint. Two graphs are compared
//! by the Hausdorff distance, under the bottleneck distance, between their
//! sets of basepoint diagrams.
//!
//! * [`metric_graph`]: graphs, geodesics, subdivision, subsampling, Rips graphs.
//! * [`persistence`]: the diagram of one geodesic distance function.
//! * [`bottleneck`]: exact bottleneck distance between two diagrams.
//! * [`distortion`]: diagram sets, Hausdorff distances and the discrete,
//!   refined and subsampled graph distances.

pub mod bottleneck;
pub mod distortion;
pub mod error;
pub mod metric_graph;
pub mod persistence;

pub use bottleneck::{bottleneck_distance, Matching};
pub use distortion::{
    approx_pd_distance, diagram_set, directed_hausdorff, discrete_pd_distance,
    subsampled_pd_distance, DiagramSet, DistanceInterval, Mode,
};
pub use error::{DistanceError, GraphError};
pub use metric_graph::{rips_skeleton, sparse_subsample, GraphPoint, MetricGraph, PointCloud};
pub use persistence::{diagram, DiagramPoint, PersistenceDiagram};
