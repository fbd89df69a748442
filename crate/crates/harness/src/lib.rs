//! File formats, experiment drivers and report types behind the `pdist`
//! command-line tool.

pub mod error;
pub mod experiments;
pub mod io;
pub mod report;
pub mod synthetic;

pub use error::HarnessError;
pub use experiments::{compare, matrix, noise_sweep, CompareOptions, SweepOptions};
pub use io::{load_any_graph, load_embedded_graph, load_graph, load_mesh_skeleton, EmbeddedGraph};
pub use report::{CompareReport, MatrixReport, SweepRow};
