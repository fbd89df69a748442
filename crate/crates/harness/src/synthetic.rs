//! Small generated graphs: planar grids with coordinates for the noise
//! experiment, and loop/double-loop/star families for the model matrix.

use pdist_core::MetricGraph;
use rand::Rng;

use crate::io::EmbeddedGraph;

/// `side x side` grid with unit-free spacing `step`, nodes labelled `r,c`.
pub fn grid(side: usize, step: f64) -> EmbeddedGraph {
    let id = |r: usize, c: usize| r * side + c;
    let mut edges = Vec::new();
    for r in 0..side {
        for c in 0..side {
            if c + 1 < side {
                edges.push((id(r, c), id(r, c + 1), step));
            }
            if r + 1 < side {
                edges.push((id(r, c), id(r + 1, c), step));
            }
        }
    }
    let labels = (0..side * side).map(|v| format!("{},{}", v / side, v % side)).collect();
    let coords = (0..side * side)
        .map(|v| [(v % side) as f64 * step, (v / side) as f64 * step])
        .collect();
    EmbeddedGraph {
        graph: MetricGraph::from_indexed(labels, edges).expect("grid is connected"),
        coords: Some(coords),
    }
}

fn jittered<R: Rng>(rng: &mut R, length: f64, jitter: f64) -> f64 {
    length * (1.0 + rng.gen_range(-jitter..=jitter))
}

/// Loop of `segments` edges of nominal length `segment`.
pub fn cycle<R: Rng>(rng: &mut R, segments: usize, segment: f64, jitter: f64) -> MetricGraph {
    let edges = (0..segments)
        .map(|i| (i, (i + 1) % segments, jittered(rng, segment, jitter)))
        .collect();
    MetricGraph::from_edges(segments, edges).expect("cycle is connected")
}

/// Two loops of `segments` edges each, sharing node 0.
pub fn figure_eight<R: Rng>(rng: &mut R, segments: usize, segment: f64, jitter: f64) -> MetricGraph {
    let mut edges = Vec::new();
    let mut next = 1;
    for _ in 0..2 {
        let mut prev = 0;
        for _ in 0..segments - 1 {
            edges.push((prev, next, jittered(rng, segment, jitter)));
            prev = next;
            next += 1;
        }
        edges.push((prev, 0, jittered(rng, segment, jitter)));
    }
    MetricGraph::from_edges(next, edges).expect("figure eight is connected")
}

/// `legs` paths of `segments` edges each, joined at node 0.
pub fn star<R: Rng>(rng: &mut R, legs: usize, segments: usize, segment: f64, jitter: f64) -> MetricGraph {
    let mut edges = Vec::new();
    let mut next = 1;
    for _ in 0..legs {
        let mut prev = 0;
        for _ in 0..segments {
            edges.push((prev, next, jittered(rng, segment, jitter)));
            prev = next;
            next += 1;
        }
    }
    MetricGraph::from_edges(next, edges).expect("star is connected")
}
