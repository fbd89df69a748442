//! Persistence-distortion distances between metric graphs.
//!
//! A graph is mapped to the set of diagrams of its basepoints; two graphs are
//! compared by the Hausdorff distance between those sets under the bottleneck
//! distance. Restricting basepoints to nodes gives the discrete distance,
//! which is within half the longest edge length of the continuous one.
//! Subdividing edges tightens that enclosure.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bottleneck::{bottleneck_below, bottleneck_value, lower_bound, within};
use crate::error::DistanceError;
use crate::metric_graph::{sparse_subsample, GraphPoint, MetricGraph};
use crate::persistence::{diagram, PersistenceDiagram};

/// Diagrams of a graph at a list of basepoints, in basepoint order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagramSet {
    pub diagrams: Vec<PersistenceDiagram>,
    pub basepoints: Vec<GraphPoint>,
}

impl DiagramSet {
    pub fn len(&self) -> usize {
        self.diagrams.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diagrams.is_empty()
    }
}

pub fn diagram_set(g: &MetricGraph, basepoints: &[GraphPoint]) -> Result<DiagramSet, DistanceError> {
    if basepoints.is_empty() {
        return Err(DistanceError::EmptyBasepointSet);
    }
    for &p in basepoints {
        g.validate_point(p)?;
    }
    let diagrams = basepoints.par_iter().map(|&p| diagram(g, p)).collect();
    Ok(DiagramSet { diagrams, basepoints: basepoints.to_vec() })
}

fn node_basepoints(g: &MetricGraph) -> Vec<GraphPoint> {
    (0..g.node_count()).map(GraphPoint::Node).collect()
}

/// `max_i min_j d_B(S1[i], S2[j])` with the maximizing `from` index and its
/// nearest `to` index.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DirectedHausdorff {
    pub value: f64,
    pub from: usize,
    pub to: usize,
}

/// Exact directed Hausdorff distance from `s1` to `s2` under the bottleneck
/// distance.
///
/// Rows that have some diagram within the running maximum are settled by a
/// single feasibility test; only rows that raise the maximum are minimized
/// exactly. Candidates are visited in order of a cheap lower bound.
pub fn directed_hausdorff(s1: &DiagramSet, s2: &DiagramSet) -> DirectedHausdorff {
    assert!(!s1.is_empty() && !s2.is_empty(), "Hausdorff distance of an empty set");
    let mut best = DirectedHausdorff { value: f64::NEG_INFINITY, from: 0, to: 0 };
    let mut order: Vec<(f64, usize)> = Vec::with_capacity(s2.len());
    for (i, a) in s1.diagrams.iter().enumerate() {
        order.clear();
        order.extend(s2.diagrams.iter().enumerate().map(|(j, b)| (lower_bound(a, b), j)));
        order.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));

        if best.value >= 0.0 {
            let settled = order
                .iter()
                .take_while(|(lb, _)| *lb <= best.value)
                .any(|&(_, j)| within(a, &s2.diagrams[j], best.value));
            if settled {
                continue;
            }
        }
        // the row minimum exceeds the running maximum (or this is the first row)
        let mut row = (f64::INFINITY, 0);
        for &(lb, j) in &order {
            if lb >= row.0 {
                break;
            }
            let b = &s2.diagrams[j];
            let d = if row.0.is_finite() {
                match bottleneck_below(a, b, row.0) {
                    Some(d) => d,
                    None => continue,
                }
            } else {
                bottleneck_value(a, b)
            };
            if d < row.0 || (d == row.0 && j < row.1) {
                row = (d, j);
            }
        }
        best = DirectedHausdorff { value: row.0, from: i, to: row.1 };
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Discrete,
    Refined,
    Subsampled,
}

/// One refinement round: the step used and the interval it certified.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Round {
    pub step: f64,
    pub max_edge: f64,
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
}

/// Result of a graph comparison.
///
/// `value` is the Hausdorff distance actually computed (over node basepoints
/// of possibly subdivided or subsampled graphs); `[lower, upper]` encloses
/// the continuous distance, except in discrete mode where both equal `value`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceInterval {
    pub mode: Mode,
    pub lower: f64,
    pub upper: f64,
    pub value: f64,
    /// Subdivision step of the last round (refined mode), otherwise the
    /// longest input edge.
    pub step: f64,
    pub forward: f64,
    pub backward: f64,
    /// Basepoints realizing the larger directed distance: the far point and
    /// its nearest counterpart in the other graph.
    pub witness: (GraphPoint, GraphPoint),
    /// Node labels of the witness pair, in the graphs actually compared.
    pub witness_labels: (String, String),
    /// Whether the witness basepoint lies in the second graph.
    pub witness_from_second: bool,
    pub rounds: Vec<Round>,
    pub delta: Option<f64>,
    pub basepoints: (usize, usize),
    /// False when refinement stopped on the round budget before reaching
    /// the target width.
    pub converged: bool,
}

impl DistanceInterval {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lower <= x && x <= self.upper
    }
}

struct Hausdorff {
    value: f64,
    forward: DirectedHausdorff,
    backward: DirectedHausdorff,
}

fn hausdorff(s1: &DiagramSet, s2: &DiagramSet) -> Hausdorff {
    let (forward, backward) = rayon::join(|| directed_hausdorff(s1, s2), || directed_hausdorff(s2, s1));
    Hausdorff { value: forward.value.max(backward.value), forward, backward }
}

fn interval_from(
    mode: Mode,
    h: &Hausdorff,
    (g1, s1): (&MetricGraph, &DiagramSet),
    (g2, s2): (&MetricGraph, &DiagramSet),
    lower: f64,
    upper: f64,
    step: f64,
) -> DistanceInterval {
    let second = h.backward.value > h.forward.value;
    let witness = if second {
        (s2.basepoints[h.backward.from], s1.basepoints[h.backward.to])
    } else {
        (s1.basepoints[h.forward.from], s2.basepoints[h.forward.to])
    };
    let (ga, gb) = if second { (g2, g1) } else { (g1, g2) };
    let witness_labels = (point_label(ga, witness.0), point_label(gb, witness.1));
    DistanceInterval {
        mode,
        lower,
        upper,
        value: h.value,
        step,
        forward: h.forward.value,
        backward: h.backward.value,
        witness,
        witness_labels,
        witness_from_second: second,
        rounds: Vec::new(),
        delta: None,
        basepoints: (s1.len(), s2.len()),
        converged: true,
    }
}

fn point_label(g: &MetricGraph, p: GraphPoint) -> String {
    match p {
        GraphPoint::Node(v) => g.label(v).to_string(),
        GraphPoint::Interior { edge, offset } => format!("{}@{}", edge, offset),
    }
}

fn max_edge(g1: &MetricGraph, g2: &MetricGraph) -> f64 {
    g1.max_edge_length().max(g2.max_edge_length())
}

/// Hausdorff distance between the node-basepoint diagram sets.
pub fn discrete_pd_distance(g1: &MetricGraph, g2: &MetricGraph) -> DistanceInterval {
    let s1 = diagram_set(g1, &node_basepoints(g1)).expect("graphs have nodes");
    let s2 = diagram_set(g2, &node_basepoints(g2)).expect("graphs have nodes");
    let h = hausdorff(&s1, &s2);
    interval_from(Mode::Discrete, &h, (g1, &s1), (g2, &s2), h.value, h.value, max_edge(g1, g2))
}

/// Bound on the floating-point error of a distance computed from diagrams of
/// graphs with `nodes` nodes in total and total edge length `length`: every
/// diagram coordinate is a shortest-path sum of at most `nodes` terms.
fn rounding_allowance(nodes: usize, length: f64) -> f64 {
    8.0 * (nodes as f64 + 4.0) * f64::EPSILON * length
}

/// Node count of `g.subdivide(h)`, without building it.
fn subdivided_nodes(g: &MetricGraph, h: f64) -> usize {
    g.node_count() + g.edges().iter().map(|e| ((e.length / h).ceil() as usize).max(1) - 1).sum::<usize>()
}

/// Lower bound on `min over all points q of g` of `d_B(d, D(q))`, from the
/// node diagrams `s` of `g` (`s[v]` at node `v`).
///
/// Diagrams are 1-Lipschitz in the basepoint, so a point at distance `t`
/// from `u` along an edge `(u, v, e)` is at least
/// `max(A_u - t, A_v - (e - t))` away, whose minimum over `t` is
/// `max((A_u + A_v - e) / 2, A_u - e, A_v - e)`. Distances above `cap` are
/// replaced by `cap`, which keeps the bound valid.
fn continuous_row_bound(d: &PersistenceDiagram, g: &MetricGraph, s: &DiagramSet, cap: f64) -> f64 {
    let a: Vec<f64> = s.diagrams.iter().map(|q| bottleneck_below(d, q, cap).unwrap_or(cap)).collect();
    let mut best = a.iter().copied().fold(f64::INFINITY, f64::min);
    for e in g.edges() {
        let (x, y) = (a[e.u], a[e.v]);
        best = best.min(((x + y - e.length) / 2.0).max(x - e.length).max(y - e.length));
    }
    best.max(0.0)
}

/// Encloses the continuous distance by discrete distances on successively
/// subdivided copies of both graphs.
///
/// Round `k` (1-based) subdivides with step `h = l / 2^k`, `l` the longest
/// input edge. Every point of a graph whose longest edge is `e` lies within
/// `e / 2` of a node and diagrams are 1-Lipschitz in the basepoint, so the
/// continuous distance lies in `[value - e/2, value + e/2]`. The lower end is
/// raised by the exact per-edge bound of the witness rows (see
/// [`continuous_row_bound`]), and both ends are widened by a bound on the
/// rounding error; the step is shortened by twice that bound so the width
/// stays within `h`. The reported interval is the intersection over all
/// rounds. Stops once its width is at most `target_eps` or after
/// `max_rounds` rounds (then `converged = false`).
pub fn approx_pd_distance(
    g1: &MetricGraph,
    g2: &MetricGraph,
    target_eps: f64,
    max_rounds: usize,
) -> Result<DistanceInterval, DistanceError> {
    if max_rounds == 0 || target_eps.is_nan() {
        return Err(DistanceError::InvalidRefinement);
    }
    let l = max_edge(g1, g2);
    let total = g1.total_length() + g2.total_length();
    let mut rounds = Vec::new();
    let mut lower = 0.0f64;
    let mut upper = f64::INFINITY;
    let mut last = None;
    for k in 1..=max_rounds {
        let step = l / 2f64.powi(k as i32);
        // shortening the step adds at most one piece per edge, at most
        // doubling the node count
        let tau = rounding_allowance(2 * (subdivided_nodes(g1, step) + subdivided_nodes(g2, step)), total);
        let fine = step - 2.0 * tau;
        let (r1, r2) = if fine > 0.0 { (g1.subdivide(fine)?, g2.subdivide(fine)?) } else { (g1.clone(), g2.clone()) };
        let e = max_edge(&r1, &r2);
        let s1 = diagram_set(&r1, &node_basepoints(&r1))?;
        let s2 = diagram_set(&r2, &node_basepoints(&r2))?;
        let h = hausdorff(&s1, &s2);
        let cap = h.value + e;
        let sharp = continuous_row_bound(&s1.diagrams[h.forward.from], &r2, &s2, cap)
            .max(continuous_row_bound(&s2.diagrams[h.backward.from], &r1, &s1, cap));
        let lo = ((h.value - e / 2.0).max(sharp) - tau).max(0.0);
        let hi = h.value + e / 2.0 + tau;
        lower = lower.max(lo);
        upper = upper.min(hi);
        rounds.push(Round { step, max_edge: e, value: h.value, lower: lo, upper: hi });
        last = Some(interval_from(Mode::Refined, &h, (&r1, &s1), (&r2, &s2), lower, upper, step));
        if upper - lower <= target_eps {
            break;
        }
    }
    let mut out = last.expect("at least one round");
    out.converged = upper - lower <= target_eps;
    out.rounds = rounds;
    Ok(out)
}

/// Hausdorff distance over delta-sparse node subsamples of both graphs.
///
/// Each subsample is delta-covering, so each directed distance moves by at
/// most `delta` against the full node sets; the returned enclosure of the
/// continuous distance widens the node-level `l / 2` margin by the coarser
/// `12 * delta` allowance on both sides.
pub fn subsampled_pd_distance(
    g1: &MetricGraph,
    g2: &MetricGraph,
    delta: f64,
    seed: u64,
) -> Result<DistanceInterval, DistanceError> {
    if !(delta >= 0.0 && delta.is_finite()) {
        return Err(DistanceError::InvalidDelta(delta));
    }
    let pick = |g: &MetricGraph| -> Vec<GraphPoint> {
        let all: Vec<usize> = (0..g.node_count()).collect();
        sparse_subsample(g, &all, delta, seed).into_iter().map(GraphPoint::Node).collect()
    };
    let s1 = diagram_set(g1, &pick(g1))?;
    let s2 = diagram_set(g2, &pick(g2))?;
    let h = hausdorff(&s1, &s2);
    let l = max_edge(g1, g2);
    let tau = rounding_allowance(g1.node_count() + g2.node_count(), g1.total_length() + g2.total_length());
    let slack = 12.0 * delta + l / 2.0 + tau;
    let mut out = interval_from(
        Mode::Subsampled,
        &h,
        (g1, &s1),
        (g2, &s2),
        (h.value - slack).max(0.0),
        h.value + slack,
        l,
    );
    out.delta = Some(delta);
    Ok(out)
}
