//! Test-only oracles and generators.
//!
//! Nothing here calls into the algorithms of `pdist-core`; the oracles only
//! read a graph's edge list, so they stay independent of the code they check.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use pdist_core::persistence::{DiagramPoint, PersistenceDiagram};
use pdist_core::{GraphPoint, MetricGraph};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Lengths drawn from {0.5, 1.0, ..., 4.0}.
pub fn half_step_length<R: Rng>(rng: &mut R) -> f64 {
    rng.gen_range(1..=8) as f64 * 0.5
}

/// Random connected multigraph: a random spanning tree plus extra edges
/// (which may be parallel edges or self-loops), `n` nodes, `m >= n - 1` edges.
pub fn random_graph_with<R: Rng>(
    rng: &mut R,
    n: usize,
    m: usize,
    mut length: impl FnMut(&mut R) -> f64,
    allow_loops: bool,
) -> MetricGraph {
    assert!(n >= 1 && m + 1 >= n);
    let mut edges = Vec::with_capacity(m);
    for v in 1..n {
        let u = rng.gen_range(0..v);
        let l = length(rng);
        edges.push((u, v, l));
    }
    while edges.len() < m {
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        if u == v && !allow_loops {
            continue;
        }
        let l = length(rng);
        edges.push((u, v, l));
    }
    // shuffle edge order so the tree edges are not always first
    for i in (1..edges.len()).rev() {
        let j = rng.gen_range(0..=i);
        edges.swap(i, j);
    }
    MetricGraph::from_edges(n, edges).expect("spanning tree keeps it connected")
}

/// Graph with `n <= max_n` nodes, `m <= max_m` edges and half-step lengths.
pub fn random_graph<R: Rng>(rng: &mut R, max_n: usize, max_m: usize) -> MetricGraph {
    let n = rng.gen_range(2..=max_n);
    let m = rng.gen_range(n - 1..=max_m.max(n - 1));
    random_graph_with(rng, n, m, half_step_length, true)
}

pub fn random_unit_graph<R: Rng>(rng: &mut R, max_n: usize, max_m: usize) -> MetricGraph {
    let n = rng.gen_range(2..=max_n);
    let m = rng.gen_range(n - 1..=max_m.max(n - 1));
    random_graph_with(rng, n, m, |_| 1.0, false)
}

/// A random point of the graph: a node, or a uniformly chosen edge and offset.
pub fn random_point<R: Rng>(rng: &mut R, g: &MetricGraph) -> GraphPoint {
    if rng.gen_bool(0.3) {
        return GraphPoint::Node(rng.gen_range(0..g.node_count()));
    }
    let e = rng.gen_range(0..g.edge_count());
    let l = g.edge(e).length;
    // dyadic offsets keep arithmetic exact
    let steps = (l * 64.0) as u32;
    let k = rng.gen_range(1..steps);
    g.point_on_edge(e, k as f64 / 64.0).unwrap()
}

/// Diagram of up to `max_points` points on a quarter grid, so ties are common.
pub fn random_diagram<R: Rng>(rng: &mut R, max_points: usize) -> PersistenceDiagram {
    let k = rng.gen_range(0..=max_points);
    let pts = (0..k)
        .map(|_| {
            if rng.gen_bool(0.5) {
                let d = rng.gen_range(0..24) as f64 * 0.25;
                let b = d + rng.gen_range(0..16) as f64 * 0.25;
                DiagramPoint::new(b, d)
            } else {
                let d = rng.gen_range(0.0..6.0);
                DiagramPoint::new(d + rng.gen_range(0.0..4.0), d)
            }
        })
        .collect();
    PersistenceDiagram::new(pts).unwrap()
}

/// Floyd-Warshall over nodes.
pub fn all_pairs_oracle(g: &MetricGraph) -> Vec<Vec<f64>> {
    let n = g.node_count();
    let mut d = vec![vec![f64::INFINITY; n]; n];
    for (v, row) in d.iter_mut().enumerate() {
        row[v] = 0.0;
    }
    for e in g.edges() {
        d[e.u][e.v] = d[e.u][e.v].min(e.length);
        d[e.v][e.u] = d[e.v][e.u].min(e.length);
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i][k] + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    d
}

/// Every edge cut into pieces of length at most `resolution`, with the
/// basepoint inserted as a grid vertex.
struct Dense {
    adjacency: Vec<Vec<(usize, f64)>>,
    base: usize,
}

fn densify(g: &MetricGraph, base: GraphPoint, resolution: f64) -> Dense {
    let n = g.node_count();
    let mut adjacency: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    let mut base_vertex = match base {
        GraphPoint::Node(v) => Some(v),
        GraphPoint::Interior { .. } => None,
    };
    let add = |adjacency: &mut Vec<Vec<(usize, f64)>>, a: usize, b: usize, l: f64| {
        adjacency[a].push((b, l));
        adjacency[b].push((a, l));
    };
    for (id, e) in g.edges().iter().enumerate() {
        // breakpoints along the edge, measured from u
        let mut cuts = vec![0.0, e.length];
        if let GraphPoint::Interior { edge, offset } = base {
            if edge == id {
                cuts.insert(1, offset);
            }
        }
        let mut prev = e.u;
        for w in cuts.windows(2) {
            let (from, to) = (w[0], w[1]);
            let span = to - from;
            let pieces = (span / resolution).ceil().max(1.0) as usize;
            let piece = span / pieces as f64;
            for k in 1..=pieces {
                let at_end = k == pieces;
                let next = if at_end && to == e.length {
                    e.v
                } else {
                    adjacency.push(Vec::new());
                    adjacency.len() - 1
                };
                add(&mut adjacency, prev, next, piece);
                if at_end && to != e.length {
                    base_vertex = Some(next);
                }
                prev = next;
            }
        }
    }
    Dense { adjacency, base: base_vertex.expect("base placed") }
}

fn dijkstra(adjacency: &[Vec<(usize, f64)>], source: usize) -> Vec<f64> {
    #[derive(PartialEq)]
    struct Key(f64);
    impl Eq for Key {}
    impl PartialOrd for Key {
        fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
            Some(self.cmp(other))
        }
    }
    impl Ord for Key {
        fn cmp(&self, other: &Self) -> std::cmp::Ordering {
            self.0.total_cmp(&other.0)
        }
    }
    let mut dist = vec![f64::INFINITY; adjacency.len()];
    let mut heap = BinaryHeap::new();
    dist[source] = 0.0;
    heap.push(Reverse((Key(0.0), source)));
    while let Some(Reverse((Key(d), v))) = heap.pop() {
        if d > dist[v] {
            continue;
        }
        for &(w, l) in &adjacency[v] {
            if d + l < dist[w] {
                dist[w] = d + l;
                heap.push(Reverse((Key(d + l), w)));
            }
        }
    }
    dist
}

/// Super-level-set diagram of the geodesic function on the dense graph:
/// vertices in decreasing value, union-find, elder rule, pairs of zero
/// persistence dropped, essential class reported as `(max, 0)`.
pub fn dense_diagram_oracle(g: &MetricGraph, base: GraphPoint, resolution: f64) -> PersistenceDiagram {
    let dense = densify(g, base, resolution);
    let f = dijkstra(&dense.adjacency, dense.base);
    let n = f.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| f[b].total_cmp(&f[a]).then(a.cmp(&b)));
    let mut seen = vec![false; n];
    let mut parent: Vec<usize> = (0..n).collect();
    let mut birth = vec![0.0; n];
    fn root(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut pts = Vec::new();
    for &v in &order {
        seen[v] = true;
        let mut comps: Vec<usize> = Vec::new();
        for &(w, _) in &dense.adjacency[v] {
            if seen[w] && w != v {
                let r = root(&mut parent, w);
                if !comps.contains(&r) {
                    comps.push(r);
                }
            }
        }
        if comps.is_empty() {
            birth[v] = f[v];
            continue;
        }
        let elder = *comps
            .iter()
            .max_by(|&&a, &&b| birth[a].total_cmp(&birth[b]))
            .unwrap();
        for &c in &comps {
            if c != elder {
                if birth[c] > f[v] {
                    pts.push(DiagramPoint::new(birth[c], f[v]));
                }
                parent[c] = elder;
            }
        }
        parent[v] = elder;
    }
    pts.push(DiagramPoint::new(f[order[0]], 0.0));
    PersistenceDiagram::new(pts).unwrap()
}

/// Bottleneck distance by enumerating every partial matching; unmatched
/// points pay their L-infinity distance to the diagonal.
pub fn brute_force_bottleneck(a: &PersistenceDiagram, b: &PersistenceDiagram) -> f64 {
    fn linf(p: &DiagramPoint, q: &DiagramPoint) -> f64 {
        (p.birth - q.birth).abs().max((p.death - q.death).abs())
    }
    fn to_diag(p: &DiagramPoint) -> f64 {
        (p.birth - p.death) / 2.0
    }
    fn go(i: usize, a: &[DiagramPoint], b: &[DiagramPoint], used: &mut Vec<bool>, acc: f64, best: &mut f64) {
        if acc >= *best {
            return;
        }
        if i == a.len() {
            let rest = b
                .iter()
                .zip(used.iter())
                .filter(|(_, &u)| !u)
                .map(|(q, _)| to_diag(q))
                .fold(acc, f64::max);
            if rest < *best {
                *best = rest;
            }
            return;
        }
        go(i + 1, a, b, used, acc.max(to_diag(&a[i])), best);
        for j in 0..b.len() {
            if !used[j] {
                used[j] = true;
                go(i + 1, a, b, used, acc.max(linf(&a[i], &b[j])), best);
                used[j] = false;
            }
        }
    }
    let mut best = f64::INFINITY;
    go(0, a.points(), b.points(), &mut vec![false; b.len()], 0.0, &mut best);
    best
}
