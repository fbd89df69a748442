//! 0-dimensional persistence of geodesic distance functions.
//!
//! For a basepoint `p`, `f(x) = d(p, x)` is piecewise linear on every edge
//! with at most one interior maximum. Splitting each edge at that maximum
//! leaves `f` monotone on every piece, so the connectivity of the
//! super-level sets `{f >= a}` is that of the induced subgraph on vertices
//! with `f >= a`. The sweep below processes those vertices in decreasing `f`
//! with a union-find and the elder rule.

use std::borrow::Cow;
use std::cmp::Ordering;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::DiagramError;
use crate::metric_graph::{GraphPoint, MetricGraph};

/// A point `(birth, death)` of a super-level-set diagram, `birth >= death`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagramPoint {
    pub birth: f64,
    pub death: f64,
}

impl DiagramPoint {
    pub fn new(birth: f64, death: f64) -> Self {
        DiagramPoint { birth, death }
    }

    pub fn persistence(&self) -> f64 {
        self.birth - self.death
    }
}

fn descending(a: &DiagramPoint, b: &DiagramPoint) -> Ordering {
    b.birth
        .total_cmp(&a.birth)
        .then_with(|| b.death.total_cmp(&a.death))
}

/// Multiset of diagram points, kept sorted by (birth desc, death desc).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PersistenceDiagram {
    points: Vec<DiagramPoint>,
    basepoint: Option<GraphPoint>,
}

impl PersistenceDiagram {
    pub fn new(points: Vec<DiagramPoint>) -> Result<Self, DiagramError> {
        for p in &points {
            if !(p.death >= 0.0 && p.birth >= p.death && p.birth.is_finite()) {
                return Err(DiagramError::InvalidPoint { birth: p.birth, death: p.death });
            }
        }
        Ok(Self::from_sorted(points, None))
    }

    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<Self, DiagramError> {
        Self::new(pairs.iter().map(|&(b, d)| DiagramPoint::new(b, d)).collect())
    }

    pub fn empty() -> Self {
        PersistenceDiagram { points: Vec::new(), basepoint: None }
    }

    fn from_sorted(mut points: Vec<DiagramPoint>, basepoint: Option<GraphPoint>) -> Self {
        points.sort_by(descending);
        PersistenceDiagram { points, basepoint }
    }

    pub fn points(&self) -> &[DiagramPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// The basepoint this diagram was computed from, if any.
    pub fn basepoint(&self) -> Option<GraphPoint> {
        self.basepoint
    }

    /// Largest birth value, i.e. the global maximum of the function.
    pub fn max_birth(&self) -> f64 {
        self.points.first().map_or(0.0, |p| p.birth)
    }

    /// `birth,death` lines under a header row, in the stored order.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("birth,death\n");
        for p in &self.points {
            let _ = writeln!(out, "{},{}", p.birth, p.death);
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self, DiagramError> {
        let mut points = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || (i == 0 && line == "birth,death") {
                continue;
            }
            let parse_err = |message: &str| DiagramError::Parse { line: i + 1, message: message.into() };
            let (b, d) = line.split_once(',').ok_or_else(|| parse_err("expected `birth,death`"))?;
            let birth = b.trim().parse().map_err(|_| parse_err("bad birth value"))?;
            let death = d.trim().parse().map_err(|_| parse_err("bad death value"))?;
            points.push(DiagramPoint { birth, death });
        }
        Self::new(points)
    }
}

/// Maxima and saddle candidates of one geodesic distance function.
#[derive(Debug, Clone, PartialEq)]
pub struct CriticalSet {
    /// Local maxima with their function values, interior maxima first in
    /// edge order, then node maxima in node order.
    pub maxima: Vec<(GraphPoint, f64)>,
    /// Nodes where components may merge: degree >= 3, plus the basepoint
    /// when it has degree >= 2.
    pub saddle_candidates: Vec<(GraphPoint, f64)>,
}

/// A vertex where two or more super-level components merged.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Merge {
    pub point: GraphPoint,
    pub value: f64,
    /// Number of distinct components joined at this vertex.
    pub components: usize,
}

/// Full result of one sweep.
#[derive(Debug, Clone)]
pub struct Sweep {
    pub diagram: PersistenceDiagram,
    pub critical: CriticalSet,
    pub merges: Vec<Merge>,
}

/// Where an augmented vertex sits, in the coordinates of the split graph.
#[derive(Debug, Clone, Copy)]
enum Site {
    Node(usize),
    EdgeMax { edge: usize, offset: f64 },
}

/// The graph split at the basepoint and at every interior maximum.
struct Augmented<'g> {
    graph: Cow<'g, MetricGraph>,
    /// Node count of the unsplit graph.
    original_nodes: usize,
    base: GraphPoint,
    base_node: usize,
    sites: Vec<Site>,
    values: Vec<f64>,
    start: Vec<usize>,
    adjacent: Vec<usize>,
}

impl<'g> Augmented<'g> {
    fn new(g: &'g MetricGraph, base: GraphPoint) -> Self {
        let (graph, base_node) = match base {
            GraphPoint::Node(v) => (Cow::Borrowed(g), v),
            GraphPoint::Interior { .. } => {
                let (split, v) = g.split_at(base);
                (Cow::Owned(split), v)
            }
        };
        let dist = graph.dijkstra(base_node, f64::INFINITY);
        let n = graph.node_count();
        let mut sites: Vec<Site> = (0..n).map(Site::Node).collect();
        let mut values = dist.clone();
        // augmented edges, then compressed adjacency
        let mut links = Vec::with_capacity(2 * graph.edge_count());
        for (id, e) in graph.edges().iter().enumerate() {
            let (d1, d2) = (dist[e.u], dist[e.v]);
            if (d1 - d2).abs() < e.length {
                let m = sites.len();
                sites.push(Site::EdgeMax { edge: id, offset: (d2 - d1 + e.length) / 2.0 });
                values.push((d1 + d2 + e.length) / 2.0);
                links.push((e.u, m));
                links.push((e.v, m));
            } else {
                links.push((e.u, e.v));
            }
        }
        let mut start = vec![0usize; sites.len() + 1];
        for &(a, b) in &links {
            start[a + 1] += 1;
            start[b + 1] += 1;
        }
        for i in 0..sites.len() {
            start[i + 1] += start[i];
        }
        let mut fill = start.clone();
        let mut adjacent = vec![0usize; start[sites.len()]];
        for &(a, b) in &links {
            adjacent[fill[a]] = b;
            fill[a] += 1;
            adjacent[fill[b]] = a;
            fill[b] += 1;
        }
        Augmented {
            original_nodes: g.node_count(),
            graph,
            base,
            base_node,
            sites,
            values,
            start,
            adjacent,
        }
    }

    /// Maps an augmented vertex back to a point of the unsplit graph.
    fn point(&self, vertex: usize) -> GraphPoint {
        match self.sites[vertex] {
            Site::Node(v) if v == self.base_node => self.base,
            Site::Node(v) => GraphPoint::Node(v),
            Site::EdgeMax { edge, offset } => match self.base {
                // the split edge keeps the u-side half; the v-side half is last
                GraphPoint::Interior { edge: split, .. } if edge == split => {
                    GraphPoint::Interior { edge: split, offset }
                }
                GraphPoint::Interior { edge: split, offset: at } if edge == self.graph.edge_count() - 1 => {
                    GraphPoint::Interior { edge: split, offset: at + offset }
                }
                _ => GraphPoint::Interior { edge, offset },
            },
        }
    }

    fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacent[self.start[v]..self.start[v + 1]]
    }

    fn degree_in_original(&self, node: usize) -> usize {
        self.graph.degree(node)
    }

    fn sweep_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.values.len()).collect();
        order.sort_unstable_by(|&a, &b| self.values[b].total_cmp(&self.values[a]).then(a.cmp(&b)));
        order
    }
}

struct Components {
    parent: Vec<usize>,
    // birth vertex of the component rooted here
    birth: Vec<usize>,
}

impl Components {
    fn new(n: usize) -> Self {
        Components { parent: (0..n).collect(), birth: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }
}

/// Runs the super-level-set sweep of `d(base, .)`.
pub fn analyze(g: &MetricGraph, base: GraphPoint) -> Sweep {
    sweep(g, base, true)
}

fn sweep(g: &MetricGraph, base: GraphPoint, full: bool) -> Sweep {
    let aug = Augmented::new(g, base);
    let order = aug.sweep_order();
    let mut rank = vec![usize::MAX; order.len()];
    for (r, &v) in order.iter().enumerate() {
        rank[v] = r;
    }
    let f = &aug.values;
    let mut uf = Components::new(order.len());
    let mut points = Vec::new();
    let mut births = Vec::new();
    let mut merges = Vec::new();
    let mut roots: Vec<usize> = Vec::new();

    for &v in &order {
        roots.clear();
        for &u in aug.neighbors(v) {
            if rank[u] < rank[v] {
                let r = uf.find(u);
                if !roots.contains(&r) {
                    roots.push(r);
                }
            }
        }
        if roots.is_empty() {
            births.push(v);
            continue;
        }
        // elder first: larger birth value, then earlier sweep position
        roots.sort_by_key(|&r| rank[uf.birth[r]]);
        let elder = roots[0];
        for &young in &roots[1..] {
            let born = f[uf.birth[young]];
            if born > f[v] {
                points.push(DiagramPoint::new(born, f[v]));
            }
            uf.parent[young] = elder;
        }
        uf.parent[v] = elder;
        if full && roots.len() > 1 {
            merges.push(Merge { point: aug.point(v), value: f[v], components: roots.len() });
        }
    }
    // connected input: the component of the first vertex survives to f = 0
    if let Some(&top) = order.first() {
        points.push(DiagramPoint::new(f[top], 0.0));
    }
    let diagram = PersistenceDiagram::from_sorted(points, Some(base));
    if !full {
        let critical = CriticalSet { maxima: Vec::new(), saddle_candidates: Vec::new() };
        return Sweep { diagram, critical, merges };
    }

    let mut maxima: Vec<(GraphPoint, f64)> = births
        .iter()
        .filter(|&&v| matches!(aug.sites[v], Site::EdgeMax { .. }))
        .map(|&v| (aug.point(v), f[v]))
        .collect();
    let mut node_maxima: Vec<(usize, GraphPoint, f64)> = births
        .iter()
        .filter(|&&v| matches!(aug.sites[v], Site::Node(_)))
        .map(|&v| (v, aug.point(v), f[v]))
        .collect();
    node_maxima.sort_by_key(|m| m.0);
    maxima.sort_by(|a, b| interior_key(&a.0).total_cmp(&interior_key(&b.0)));
    maxima.extend(node_maxima.into_iter().map(|(_, p, val)| (p, val)));

    let saddle_candidates = (0..aug.graph.node_count())
        .filter(|&v| {
            let d = aug.degree_in_original(v);
            if v == aug.base_node {
                d >= 2
            } else {
                d >= 3 && v < aug.original_nodes
            }
        })
        .map(|v| (aug.point(v), f[v]))
        .collect();

    Sweep {
        diagram,
        critical: CriticalSet { maxima, saddle_candidates },
        merges,
    }
}

fn interior_key(p: &GraphPoint) -> f64 {
    match *p {
        GraphPoint::Interior { edge, .. } => edge as f64,
        GraphPoint::Node(v) => v as f64,
    }
}

/// The 0-dimensional super-level-set diagram of `d(base, .)`.
///
/// Zero-persistence pairs are omitted; the component born at the global
/// maximum is reported as `(max, 0)`.
pub fn diagram(g: &MetricGraph, base: GraphPoint) -> PersistenceDiagram {
    sweep(g, base, false).diagram
}

pub fn critical_points(g: &MetricGraph, base: GraphPoint) -> CriticalSet {
    analyze(g, base).critical
}

#[cfg(test)]
mod tests {
    use super::*;

    fn star() -> MetricGraph {
        MetricGraph::build(
            ["c", "A", "B", "C"],
            [("c", "A", 3.0), ("c", "B", 2.0), ("c", "C", 1.0)],
        )
        .unwrap()
    }

    fn cycle(n: usize, total: f64) -> MetricGraph {
        let l = total / n as f64;
        MetricGraph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n, l)).collect()).unwrap()
    }

    fn pairs(d: &PersistenceDiagram) -> Vec<(f64, f64)> {
        d.points().iter().map(|p| (p.birth, p.death)).collect()
    }

    #[test]
    fn single_edge() {
        let g = MetricGraph::build(["a", "b"], [("a", "b", 2.5)]).unwrap();
        let s = analyze(&g, GraphPoint::Node(0));
        assert_eq!(pairs(&s.diagram), vec![(2.5, 0.0)]);
        assert_eq!(s.critical.maxima, vec![(GraphPoint::Node(1), 2.5)]);
    }

    #[test]
    fn cycle_has_one_antipodal_maximum() {
        let g = cycle(5, 10.0);
        let s = analyze(&g, GraphPoint::Node(0));
        assert_eq!(pairs(&s.diagram), vec![(5.0, 0.0)]);
        assert_eq!(s.critical.maxima.len(), 1);
        let (p, val) = s.critical.maxima[0];
        assert_eq!(val, 5.0);
        assert_eq!(g.eval_geodesic(GraphPoint::Node(0), p), 5.0);
        // interior base as well
        let b = g.point_on_edge(3, 0.7).unwrap();
        assert_eq!(pairs(&diagram(&g, b)), vec![(5.0, 0.0)]);
    }

    #[test]
    fn star_from_leaf() {
        let g = star();
        let s = analyze(&g, GraphPoint::Node(1));
        assert_eq!(pairs(&s.diagram), vec![(5.0, 0.0), (4.0, 3.0)]);
        assert_eq!(
            s.critical.maxima,
            vec![(GraphPoint::Node(2), 5.0), (GraphPoint::Node(3), 4.0)]
        );
        assert_eq!(s.critical.saddle_candidates, vec![(GraphPoint::Node(0), 3.0)]);
        assert_eq!(s.merges.len(), 1);
        assert_eq!(s.merges[0].point, GraphPoint::Node(0));
    }

    #[test]
    fn interior_maximum_on_split_edge_maps_back() {
        // base on the long edge; the far side of that edge carries a maximum
        let g = MetricGraph::from_edges(2, vec![(0, 1, 10.0), (0, 1, 1.0)]).unwrap();
        let base = g.point_on_edge(0, 2.0).unwrap();
        let s = analyze(&g, base);
        let dist = g.geodesic_from(base);
        assert_eq!(dist, vec![2.0, 3.0]);
        for &(p, val) in &s.critical.maxima {
            assert!(matches!(p, GraphPoint::Interior { edge: 0, .. }));
            assert!((g.eval_geodesic(base, p) - val).abs() < 1e-12);
        }
        assert_eq!(s.critical.maxima, vec![(GraphPoint::Interior { edge: 0, offset: 7.5 }, 5.5)]);
    }

    #[test]
    fn essential_point_only_for_single_node() {
        let g = MetricGraph::from_edges(1, vec![]).unwrap();
        assert_eq!(pairs(&diagram(&g, GraphPoint::Node(0))), vec![(0.0, 0.0)]);
    }

    #[test]
    fn csv_round_trip() {
        let d = PersistenceDiagram::from_pairs(&[(4.0, 3.0), (5.0, 0.0), (4.0, 3.5)]).unwrap();
        let text = d.to_csv();
        assert_eq!(text, "birth,death\n5,0\n4,3.5\n4,3\n");
        assert_eq!(PersistenceDiagram::from_csv(&text).unwrap(), d);
        assert!(PersistenceDiagram::from_csv("1,2\n").is_err());
        assert!(matches!(
            PersistenceDiagram::from_csv("birth,death\n1;2\n"),
            Err(DiagramError::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn rejects_invalid_points() {
        assert!(PersistenceDiagram::from_pairs(&[(1.0, 2.0)]).is_err());
        assert!(PersistenceDiagram::from_pairs(&[(1.0, -0.5)]).is_err());
    }
}
