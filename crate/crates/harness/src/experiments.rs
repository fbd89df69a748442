//! Experiment drivers: single comparisons, pairwise matrices and the noise
//! sweep. Every driver is deterministic in its seed and independent of the
//! rayon thread count.

use std::time::Instant;

use pdist_core::distortion::Mode;
use pdist_core::{
    approx_pd_distance, discrete_pd_distance, rips_skeleton, sparse_subsample, subsampled_pd_distance,
    DistanceInterval, GraphError, MetricGraph, PointCloud,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::HarnessError;
use crate::io::EmbeddedGraph;
use crate::report::{MatrixReport, RunParams, SweepRow, SCHEMA, TOOL};

/// Subsample sizes aimed for when `delta` is chosen automatically.
pub const TARGET_BASEPOINTS: (usize, usize) = (150, 300);

#[derive(Debug, Clone, PartialEq)]
pub struct CompareOptions {
    pub mode: Mode,
    /// Target interval width for refined mode.
    pub eps: f64,
    pub max_rounds: usize,
    /// Subsample radius; `None` tunes it with [`auto_delta`].
    pub delta: Option<f64>,
    pub seed: u64,
}

impl Default for CompareOptions {
    fn default() -> Self {
        CompareOptions { mode: Mode::Discrete, eps: 0.1, max_rounds: 8, delta: None, seed: 0 }
    }
}

impl CompareOptions {
    /// Parameters as recorded in reports, resolving `delta` to the value used.
    pub fn params(&self, delta: Option<f64>) -> RunParams {
        let refined = self.mode == Mode::Refined;
        RunParams {
            mode: self.mode,
            eps: refined.then_some(self.eps),
            max_rounds: refined.then_some(self.max_rounds),
            delta,
            seed: self.seed,
        }
    }
}

pub fn compare(g1: &MetricGraph, g2: &MetricGraph, opts: &CompareOptions) -> Result<DistanceInterval, HarnessError> {
    Ok(match opts.mode {
        Mode::Discrete => discrete_pd_distance(g1, g2),
        Mode::Refined => approx_pd_distance(g1, g2, opts.eps, opts.max_rounds)?,
        Mode::Subsampled => {
            let delta = match opts.delta {
                Some(d) => d,
                None => auto_delta(g1, opts.seed).max(auto_delta(g2, opts.seed)),
            };
            subsampled_pd_distance(g1, g2, delta, opts.seed)?
        }
    })
}

/// Like [`compare`], also returning wall-clock seconds.
pub fn compare_timed(
    g1: &MetricGraph,
    g2: &MetricGraph,
    opts: &CompareOptions,
) -> Result<(DistanceInterval, f64), HarnessError> {
    let start = Instant::now();
    let d = compare(g1, g2, opts)?;
    Ok((d, start.elapsed().as_secs_f64()))
}

/// Smallest tried `delta` whose subsample has at most 300 nodes, preferring
/// one with at least 150. Graphs with at most 300 nodes get `delta = 0`.
pub fn auto_delta(g: &MetricGraph, seed: u64) -> f64 {
    let (lo_target, hi_target) = TARGET_BASEPOINTS;
    if g.node_count() <= hi_target {
        return 0.0;
    }
    let nodes: Vec<usize> = (0..g.node_count()).collect();
    let size = |d: f64| sparse_subsample(g, &nodes, d, seed).len();
    let mut hi = g.min_edge_length();
    while size(hi) > hi_target {
        hi *= 2.0;
    }
    // size(hi) <= 300 and size(hi / 2) > 300 (or hi is the first guess)
    let mut lo = hi / 2.0;
    for _ in 0..12 {
        if size(hi) >= lo_target {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if size(mid) > hi_target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

/// All pairwise comparisons of `graphs`, each unordered pair computed once.
/// Diagonal entries compare a graph with itself.
pub fn matrix(
    ids: Vec<String>,
    graphs: &[MetricGraph],
    opts: &CompareOptions,
) -> Result<MatrixReport, HarnessError> {
    let n = graphs.len();
    if n < 2 || ids.len() != n {
        return Err(HarnessError::Input(format!("matrix needs at least 2 graphs, got {n}")));
    }
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
    let results = pairs
        .par_iter()
        .map(|&(i, j)| compare(&graphs[i], &graphs[j], opts))
        .collect::<Result<Vec<_>, _>>()?;
    let mut values = vec![vec![0.0; n]; n];
    let mut lower = vec![vec![0.0; n]; n];
    let mut converged = true;
    let mut delta: Option<f64> = None;
    for (&(i, j), d) in pairs.iter().zip(&results) {
        values[i][j] = d.upper;
        values[j][i] = d.upper;
        lower[i][j] = d.lower;
        lower[j][i] = d.lower;
        converged &= d.converged;
        if let Some(dd) = d.delta {
            delta = Some(delta.map_or(dd, |m: f64| m.max(dd)));
        }
    }
    let delta = if opts.mode == Mode::Subsampled { opts.delta.or(delta) } else { None };
    Ok(MatrixReport {
        schema: SCHEMA,
        tool: TOOL.to_string(),
        ids,
        params: opts.params(delta),
        values,
        lower,
        converged,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOptions {
    pub eps: Vec<f64>,
    pub samples: usize,
    pub seed: u64,
    /// Sample spacing along edges for every level; `None` uses
    /// [`default_spacing`] per level.
    pub spacing: Option<f64>,
    /// Subsample radius; `None` tunes it per draw with [`auto_delta`].
    pub delta: Option<f64>,
}

/// Sample spacing for noise level `eps`: `min(l_min / 4, eps / 8)`.
///
/// The Rips radius `3 eps / 2` then spans about a dozen consecutive samples;
/// much sparser sampling leaves gaps along edges that force long detours in
/// the reconstruction.
pub fn default_spacing(g: &MetricGraph, eps: f64) -> f64 {
    let quarter = g.min_edge_length() / 4.0;
    if eps > 0.0 {
        quarter.min(eps / 8.0)
    } else {
        quarter
    }
}

/// Points placed along every edge at spacing at most `spacing`: the nodes of
/// `subdivide(spacing)` with linearly interpolated coordinates. Returns the
/// subdivided graph too, whose nodes are the sample points in order.
pub fn sample_along_edges(hidden: &EmbeddedGraph, spacing: f64) -> Result<(MetricGraph, Vec<[f64; 2]>), HarnessError> {
    let coords = hidden
        .coords
        .as_ref()
        .ok_or_else(|| HarnessError::Input("graph has no node coordinates".into()))?;
    let g = &hidden.graph;
    let fine = g.subdivide(spacing)?;
    let mut out = coords.clone();
    out.resize(fine.node_count(), [0.0; 2]);
    // subdivision nodes are appended edge by edge, in order along each edge
    let mut next = g.node_count();
    for e in g.edges() {
        let pieces = (e.length / spacing).ceil().max(1.0) as usize;
        let (a, b) = (coords[e.u], coords[e.v]);
        for k in 1..pieces {
            let t = k as f64 / pieces as f64;
            out[next] = [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])];
            next += 1;
        }
    }
    debug_assert_eq!(next, fine.node_count());
    Ok((fine, out))
}

/// Rips radius for noise level `eps`: `3 eps / 2`, or just over the sample
/// spacing when there is no noise.
pub fn rips_radius(eps: f64, spacing: f64) -> f64 {
    if eps > 0.0 {
        1.5 * eps
    } else {
        spacing * (1.0 + 1e-9)
    }
}

const RETRIES: usize = 5;

/// Perturbed Rips reconstruction for one draw, escalating the radius by 10%
/// up to five times while the skeleton is disconnected.
fn reconstruct<R: Rng>(rng: &mut R, samples: &[[f64; 2]], eps: f64, radius: f64) -> Option<MetricGraph> {
    let points = samples
        .iter()
        .map(|p| p.iter().map(|&c| if eps > 0.0 { c + rng.gen_range(-eps..=eps) } else { c }).collect())
        .collect();
    let cloud = PointCloud::new(points).ok()?;
    let mut r = radius;
    for _ in 0..=RETRIES {
        match rips_skeleton(&cloud, r) {
            Ok(g) => return Some(g),
            Err(GraphError::DisconnectedGraph { .. }) => r *= 1.1,
            Err(_) => return None,
        }
    }
    None
}

/// For each noise level, compares the sampled reference with `samples`
/// independent perturbed Rips reconstructions (subsampled mode). Draw `i` at
/// level `k` uses its own ChaCha8 stream `(k << 32) | i` of `seed`.
pub fn noise_sweep(hidden: &EmbeddedGraph, opts: &SweepOptions) -> Result<Vec<SweepRow>, HarnessError> {
    if opts.eps.iter().any(|e| !(e.is_finite() && *e >= 0.0)) {
        return Err(HarnessError::Input("noise levels must be finite and non-negative".into()));
    }
    if opts.samples == 0 {
        return Err(HarnessError::Input("need at least one sample per noise level".into()));
    }
    let mut rows = Vec::with_capacity(opts.eps.len());
    for (k, &eps) in opts.eps.iter().enumerate() {
        let spacing = opts.spacing.unwrap_or_else(|| default_spacing(&hidden.graph, eps));
        if !(spacing > 0.0 && spacing.is_finite()) {
            return Err(HarnessError::Input(format!("invalid sample spacing {spacing}")));
        }
        let (reference, samples) = sample_along_edges(hidden, spacing)?;
        let ref_delta = opts.delta.unwrap_or_else(|| auto_delta(&reference, opts.seed));
        let radius = rips_radius(eps, spacing);
        let values: Vec<Option<f64>> = (0..opts.samples)
            .into_par_iter()
            .map(|i| -> Result<Option<f64>, HarnessError> {
                let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
                rng.set_stream(((k as u64) << 32) | i as u64);
                let Some(noisy) = reconstruct(&mut rng, &samples, eps, radius) else {
                    return Ok(None);
                };
                let delta = opts.delta.unwrap_or_else(|| ref_delta.max(auto_delta(&noisy, opts.seed)));
                let d = subsampled_pd_distance(&reference, &noisy, delta, opts.seed)?;
                Ok(Some(d.value))
            })
            .collect::<Result<_, _>>()?;
        let got: Vec<f64> = values.iter().flatten().copied().collect();
        let (min, mean, max) = if got.is_empty() {
            (f64::NAN, f64::NAN, f64::NAN)
        } else {
            (
                got.iter().copied().fold(f64::INFINITY, f64::min),
                got.iter().sum::<f64>() / got.len() as f64,
                got.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            )
        };
        rows.push(SweepRow {
            eps,
            spacing,
            radius,
            draws: got.len(),
            missing: opts.samples - got.len(),
            min,
            mean,
            max,
            values: got,
        });
    }
    Ok(rows)
}
