//! Metric graphs: finite graphs with positive edge lengths, viewed as the
//! continuous metric space of all points on all edges.
//!
//! Nodes are addressed by dense indices `0..node_count()`; each node also
//! carries the string label it was built with. Edge ids are assigned in input
//! order and every iteration order in this crate derives from them.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap, HashSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::GraphError;

/// An undirected edge `u -- v` with a positive length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub length: f64,
}

impl Edge {
    /// The endpoint opposite to `node`. For a self-loop this is `node` itself.
    pub fn other(&self, node: usize) -> usize {
        if self.u == node {
            self.v
        } else {
            self.u
        }
    }
}

/// A connected, undirected multigraph with positive edge lengths.
///
/// Parallel edges and self-loops are kept as distinct edges.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricGraph {
    labels: Vec<String>,
    edges: Vec<Edge>,
    adjacency: Vec<Vec<usize>>,
}

/// A location on a metric graph: either a node, or a point strictly inside an
/// edge at arclength `offset` from the edge's `u` endpoint.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GraphPoint {
    Node(usize),
    Interior { edge: usize, offset: f64 },
}

impl MetricGraph {
    /// Builds a graph from labelled nodes and `(u, v, length)` triples that
    /// refer to those labels.
    pub fn build<N, E, S>(nodes: N, edges: E) -> Result<Self, GraphError>
    where
        N: IntoIterator,
        N::Item: Into<String>,
        E: IntoIterator<Item = (S, S, f64)>,
        S: AsRef<str>,
    {
        let labels: Vec<String> = nodes.into_iter().map(Into::into).collect();
        let mut index = HashMap::with_capacity(labels.len());
        for (i, label) in labels.iter().enumerate() {
            if index.insert(label.clone(), i).is_some() {
                return Err(GraphError::DuplicateNode(label.clone()));
            }
        }
        let mut indexed = Vec::new();
        for (u, v, length) in edges {
            let lookup = |s: &str| {
                index
                    .get(s)
                    .copied()
                    .ok_or_else(|| GraphError::UnknownNode(s.to_string()))
            };
            indexed.push((lookup(u.as_ref())?, lookup(v.as_ref())?, length));
        }
        Self::from_indexed(labels, indexed)
    }

    /// Builds a graph whose edges refer to nodes by index into `labels`.
    pub fn from_indexed(
        labels: Vec<String>,
        edges: Vec<(usize, usize, f64)>,
    ) -> Result<Self, GraphError> {
        if labels.is_empty() {
            return Err(GraphError::EmptyGraph);
        }
        let n = labels.len();
        let mut adjacency = vec![Vec::new(); n];
        let mut out = Vec::with_capacity(edges.len());
        for (id, (u, v, length)) in edges.into_iter().enumerate() {
            for w in [u, v] {
                if w >= n {
                    return Err(GraphError::UnknownNode(w.to_string()));
                }
            }
            if !(length > 0.0 && length.is_finite()) {
                return Err(GraphError::NonPositiveLength { edge: id, length });
            }
            adjacency[u].push(id);
            if v != u {
                adjacency[v].push(id);
            } else {
                // a self-loop contributes two incidences
                adjacency[u].push(id);
            }
            out.push(Edge { u, v, length });
        }
        let graph = MetricGraph {
            labels,
            edges: out,
            adjacency,
        };
        let components = graph.component_count();
        if components > 1 {
            return Err(GraphError::DisconnectedGraph { components });
        }
        Ok(graph)
    }

    /// Builds a graph on nodes labelled `"0"`, `"1"`, ...
    pub fn from_edges(node_count: usize, edges: Vec<(usize, usize, f64)>) -> Result<Self, GraphError> {
        Self::from_indexed((0..node_count).map(|i| i.to_string()).collect(), edges)
    }

    fn component_count(&self) -> usize {
        let n = self.labels.len();
        let mut seen = vec![false; n];
        let mut components = 0;
        let mut stack = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            components += 1;
            seen[start] = true;
            stack.push(start);
            while let Some(w) = stack.pop() {
                for &e in &self.adjacency[w] {
                    let x = self.edges[e].other(w);
                    if !seen[x] {
                        seen[x] = true;
                        stack.push(x);
                    }
                }
            }
        }
        components
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: usize) -> &Edge {
        &self.edges[id]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, node: usize) -> &str {
        &self.labels[node]
    }

    pub fn node_index(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Edge ids incident to `node`; a self-loop appears twice.
    pub fn incident(&self, node: usize) -> &[usize] {
        &self.adjacency[node]
    }

    /// Number of edge incidences at `node` (self-loops count twice).
    pub fn degree(&self, node: usize) -> usize {
        self.adjacency[node].len()
    }

    pub fn max_edge_length(&self) -> f64 {
        self.edges.iter().map(|e| e.length).fold(0.0, f64::max)
    }

    pub fn min_edge_length(&self) -> f64 {
        self.edges
            .iter()
            .map(|e| e.length)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn total_length(&self) -> f64 {
        self.edges.iter().map(|e| e.length).sum()
    }

    /// Normalizes a position on `edge` at arclength `offset` from its `u`
    /// endpoint. Offsets at either end collapse to the endpoint node.
    pub fn point_on_edge(&self, edge: usize, offset: f64) -> Result<GraphPoint, GraphError> {
        let e = self
            .edges
            .get(edge)
            .ok_or(GraphError::InvalidPoint("edge id out of range"))?;
        if !(0.0..=e.length).contains(&offset) {
            return Err(GraphError::InvalidPoint("offset outside edge"));
        }
        Ok(if offset == 0.0 {
            GraphPoint::Node(e.u)
        } else if offset == e.length {
            GraphPoint::Node(e.v)
        } else {
            GraphPoint::Interior { edge, offset }
        })
    }

    pub fn validate_point(&self, p: GraphPoint) -> Result<(), GraphError> {
        match p {
            GraphPoint::Node(v) if v < self.node_count() => Ok(()),
            GraphPoint::Node(_) => Err(GraphError::InvalidPoint("node id out of range")),
            GraphPoint::Interior { edge, offset } => {
                let e = self
                    .edges
                    .get(edge)
                    .ok_or(GraphError::InvalidPoint("edge id out of range"))?;
                if offset > 0.0 && offset < e.length {
                    Ok(())
                } else {
                    Err(GraphError::InvalidPoint("interior offset must lie strictly inside the edge"))
                }
            }
        }
    }

    /// Splits the edge carrying `p` at `p`, returning the new graph and the
    /// node index of `p` in it. Node points return a clone unchanged.
    ///
    /// The split edge keeps its id for the `u`-side half; the `v`-side half is
    /// appended last, and the new node is appended after all existing nodes.
    pub fn split_at(&self, p: GraphPoint) -> (MetricGraph, usize) {
        match p {
            GraphPoint::Node(v) => (self.clone(), v),
            GraphPoint::Interior { edge, offset } => {
                let mut g = self.clone();
                let mid = g.labels.len();
                let mut label = format!("~{}@{}", edge, offset);
                while g.labels.contains(&label) {
                    label.push('\'');
                }
                g.labels.push(label);
                g.adjacency.push(Vec::new());
                let Edge { u, v, length } = g.edges[edge];
                // u-side keeps the id; rewire the v endpoint to mid
                g.edges[edge] = Edge { u, v: mid, length: offset };
                let slot = g.adjacency[v]
                    .iter()
                    .rposition(|&x| x == edge)
                    .expect("edge incident to its endpoint");
                g.adjacency[v].remove(slot);
                g.adjacency[mid].push(edge);
                let new_id = g.edges.len();
                g.edges.push(Edge { u: mid, v, length: length - offset });
                g.adjacency[mid].push(new_id);
                g.adjacency[v].push(new_id);
                (g, mid)
            }
        }
    }

    /// Exact shortest-path distances from `base` to every node.
    pub fn geodesic_from(&self, base: GraphPoint) -> Vec<f64> {
        let (g, source) = self.split_at(base);
        let mut dist = g.dijkstra(source, f64::INFINITY);
        dist.truncate(self.node_count());
        dist
    }

    /// Geodesic distance between two arbitrary points of the graph.
    pub fn eval_geodesic(&self, base: GraphPoint, x: GraphPoint) -> f64 {
        let dist = self.geodesic_from(base);
        self.distance_via(&dist, base, x)
    }

    /// Evaluates `d(base, x)` given the node distances from `base`.
    pub(crate) fn distance_via(&self, dist: &[f64], base: GraphPoint, x: GraphPoint) -> f64 {
        match x {
            GraphPoint::Node(v) => dist[v],
            GraphPoint::Interior { edge, offset } => {
                let e = self.edges[edge];
                let mut d = (dist[e.u] + offset).min(dist[e.v] + e.length - offset);
                if let GraphPoint::Interior { edge: be, offset: bo } = base {
                    if be == edge {
                        d = d.min((offset - bo).abs());
                    }
                }
                d
            }
        }
    }

    /// Dijkstra from a node, stopping once the frontier exceeds `radius`.
    /// Unreached nodes keep distance `+inf`.
    pub(crate) fn dijkstra(&self, source: usize, radius: f64) -> Vec<f64> {
        let n = self.node_count();
        let mut dist = vec![f64::INFINITY; n];
        let mut done = vec![false; n];
        let mut heap = BinaryHeap::new();
        dist[source] = 0.0;
        heap.push(Frontier { dist: 0.0, node: source });
        while let Some(Frontier { dist: d, node }) = heap.pop() {
            if done[node] {
                continue;
            }
            if d > radius {
                break;
            }
            done[node] = true;
            for &e in &self.adjacency[node] {
                let edge = &self.edges[e];
                let next = edge.other(node);
                let nd = d + edge.length;
                if nd < dist[next] {
                    dist[next] = nd;
                    heap.push(Frontier { dist: nd, node: next });
                }
            }
        }
        if radius.is_finite() {
            for (d, ok) in dist.iter_mut().zip(&done) {
                if !ok {
                    *d = f64::INFINITY;
                }
            }
        }
        dist
    }

    /// All-pairs node distances, one Dijkstra per node.
    pub fn all_pairs(&self) -> Vec<Vec<f64>> {
        (0..self.node_count())
            .map(|v| self.dijkstra(v, f64::INFINITY))
            .collect()
    }

    /// Splits every edge of length `l` into `ceil(l / h)` equal pieces.
    ///
    /// Original nodes keep their indices and labels; inserted nodes follow in
    /// edge order.
    pub fn subdivide(&self, h: f64) -> Result<MetricGraph, GraphError> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(GraphError::NonPositiveStep(h));
        }
        let mut labels = self.labels.clone();
        let mut taken: HashSet<String> = labels.iter().cloned().collect();
        let mut edges = Vec::with_capacity(self.edges.len());
        for (id, e) in self.edges.iter().enumerate() {
            let pieces = ((e.length / h).ceil() as usize).max(1);
            if pieces == 1 {
                edges.push((e.u, e.v, e.length));
                continue;
            }
            let piece = e.length / pieces as f64;
            let mut prev = e.u;
            for k in 1..pieces {
                let mut label = format!("{}~{}", id, k);
                while taken.contains(&label) {
                    label.push('\'');
                }
                taken.insert(label.clone());
                let node = labels.len();
                labels.push(label);
                edges.push((prev, node, piece));
                prev = node;
            }
            edges.push((prev, e.v, piece));
        }
        MetricGraph::from_indexed(labels, edges)
    }

    /// Returns a copy with node labels replaced by `f(old_label)`.
    pub fn relabeled<F: FnMut(&str) -> String>(&self, mut f: F) -> Result<MetricGraph, GraphError> {
        let labels: Vec<String> = self.labels.iter().map(|l| f(l)).collect();
        let unique: HashSet<&String> = labels.iter().collect();
        if unique.len() != labels.len() {
            return Err(GraphError::DuplicateNode("relabel is not injective".into()));
        }
        Ok(MetricGraph {
            labels,
            edges: self.edges.clone(),
            adjacency: self.adjacency.clone(),
        })
    }

    /// Returns an isomorphic copy whose node indices are permuted:
    /// old node `i` becomes new node `perm[i]`. Edge order is preserved.
    pub fn permuted(&self, perm: &[usize]) -> Result<MetricGraph, GraphError> {
        let n = self.node_count();
        let mut labels = vec![String::new(); n];
        for (old, &new) in perm.iter().enumerate() {
            labels[new] = self.labels[old].clone();
        }
        let edges = self
            .edges
            .iter()
            .map(|e| (perm[e.u], perm[e.v], e.length))
            .collect();
        MetricGraph::from_indexed(labels, edges)
    }
}

#[derive(Debug, Clone, Copy)]
struct Frontier {
    dist: f64,
    node: usize,
}

impl PartialEq for Frontier {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Frontier {}

impl PartialOrd for Frontier {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Frontier {
    // min-heap on distance, ties by node id
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.node.cmp(&self.node))
    }
}

/// Greedy delta-sparse subsample of `candidates`.
///
/// Candidates are visited in a seeded random order; a node is kept iff its
/// distance to every node kept so far exceeds `delta`. The result is sorted
/// by node index.
pub fn sparse_subsample(
    graph: &MetricGraph,
    candidates: &[usize],
    delta: f64,
    seed: u64,
) -> Vec<usize> {
    let mut order = candidates.to_vec();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut to_kept = vec![f64::INFINITY; graph.node_count()];
    let mut kept = Vec::new();
    for v in order {
        if to_kept[v] > delta {
            kept.push(v);
            let near = graph.dijkstra(v, delta);
            for (best, d) in to_kept.iter_mut().zip(near) {
                if d < *best {
                    *best = d;
                }
            }
        }
    }
    kept.sort_unstable();
    kept.dedup();
    kept
}

/// A nonempty set of points in a common Euclidean space.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    points: Vec<Vec<f64>>,
    dim: usize,
}

impl PointCloud {
    pub fn new(points: Vec<Vec<f64>>) -> Result<Self, GraphError> {
        let dim = points.first().map(Vec::len).ok_or(GraphError::EmptyPointCloud)?;
        for (i, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(GraphError::DimensionMismatch { index: i, expected: dim, found: p.len() });
            }
            if p.iter().any(|c| !c.is_finite()) {
                return Err(GraphError::NonFiniteCoordinate { index: i });
            }
        }
        Ok(PointCloud { points, dim })
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

pub fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// 1-skeleton of the Rips complex at radius `r`: an edge joins every pair of
/// points at Euclidean distance `<= r`, with that distance as its length.
/// Coincident points are never joined, since edge lengths must be positive.
pub fn rips_skeleton(cloud: &PointCloud, r: f64) -> Result<MetricGraph, GraphError> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(GraphError::NonPositiveStep(r));
    }
    let pts = cloud.points();
    let mut edges = Vec::new();
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            let d = euclidean(&pts[i], &pts[j]);
            if d <= r && d > 0.0 {
                edges.push((i, j, d));
            }
        }
    }
    let labels = (0..pts.len()).map(|i| format!("p{}", i)).collect();
    MetricGraph::from_indexed(labels, edges)
}
