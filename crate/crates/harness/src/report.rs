//! Serializable reports. JSON reports carry `"schema": 1`; CSV output uses a
//! header row, `,` separators and `.` decimals.

use std::fmt::Write as _;

use pdist_core::distortion::{DistanceInterval, Mode, Round};
use serde::{Deserialize, Serialize};

pub const SCHEMA: u32 = 1;
pub const TOOL: &str = concat!("pdist ", env!("CARGO_PKG_VERSION"));

/// Parameters that, with the inputs, reproduce a run bit for bit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunParams {
    pub mode: Mode,
    pub eps: Option<f64>,
    pub max_rounds: Option<usize>,
    pub delta: Option<f64>,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareReport {
    pub schema: u32,
    pub tool: String,
    pub graphs: [String; 2],
    pub params: RunParams,
    pub lower: f64,
    pub upper: f64,
    pub value: f64,
    pub forward: f64,
    pub backward: f64,
    /// Graph holding the far basepoint, then the far basepoint and its
    /// nearest basepoint in the other graph.
    pub witness: (String, String, String),
    pub basepoints: (usize, usize),
    pub step: f64,
    pub rounds: Vec<Round>,
    pub converged: bool,
    /// Wall-clock seconds, only when timing was requested (timings would
    /// otherwise break run-to-run identical output).
    pub seconds: Option<f64>,
}

impl CompareReport {
    pub fn new(graphs: [String; 2], params: RunParams, d: &DistanceInterval, seconds: Option<f64>) -> Self {
        let far_graph = if d.witness_from_second { &graphs[1] } else { &graphs[0] };
        CompareReport {
            schema: SCHEMA,
            tool: TOOL.to_string(),
            witness: (far_graph.clone(), d.witness_labels.0.clone(), d.witness_labels.1.clone()),
            graphs,
            params,
            lower: d.lower,
            upper: d.upper,
            value: d.value,
            forward: d.forward,
            backward: d.backward,
            basepoints: d.basepoints,
            step: d.step,
            rounds: d.rounds.clone(),
            converged: d.converged,
            seconds,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("graph1,graph2,mode,lower,upper,value,forward,backward,converged\n");
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            self.graphs[0],
            self.graphs[1],
            mode_name(self.params.mode),
            self.lower,
            self.upper,
            self.value,
            self.forward,
            self.backward,
            self.converged
        );
        out
    }
}

pub fn mode_name(mode: Mode) -> &'static str {
    match mode {
        Mode::Discrete => "discrete",
        Mode::Refined => "refined",
        Mode::Subsampled => "subsampled",
    }
}

/// Pairwise distances between named graphs. `values` holds upper bounds
/// (the discrete value in discrete mode), `lower` the matching lower bounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixReport {
    pub schema: u32,
    pub tool: String,
    pub ids: Vec<String>,
    pub params: RunParams,
    pub values: Vec<Vec<f64>>,
    pub lower: Vec<Vec<f64>>,
    pub converged: bool,
}

impl MatrixReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("graph");
        for id in &self.ids {
            out.push(',');
            out.push_str(id);
        }
        out.push('\n');
        for (id, row) in self.ids.iter().zip(&self.values) {
            out.push_str(id);
            for v in row {
                let _ = write!(out, ",{}", v);
            }
            out.push('\n');
        }
        out
    }
}

/// Distances for one noise level across independent draws.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub eps: f64,
    pub spacing: f64,
    pub radius: f64,
    pub draws: usize,
    pub missing: usize,
    pub min: f64,
    pub mean: f64,
    pub max: f64,
    pub values: Vec<f64>,
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("eps,spacing,radius,draws,missing,min,mean,max\n");
    for r in rows {
        let _ = writeln!(out, "{},{},{},{},{},{},{},{}", r.eps, r.spacing, r.radius, r.draws, r.missing, r.min, r.mean, r.max);
    }
    out
}
