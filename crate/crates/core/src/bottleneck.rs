//! Bottleneck distance between persistence diagrams.
//!
//! Each diagram is augmented with the diagonal projections of the other
//! diagram's points, which turns the partial matching with diagonal into a
//! perfect bipartite matching between sets of equal size. The distance is the
//! smallest candidate pair cost at which a perfect matching exists, found by
//! binary search over the sorted candidate costs with Hopcroft-Karp as the
//! feasibility test.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::persistence::{DiagramPoint, PersistenceDiagram};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Origin {
    Real,
    Diagonal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TaggedPoint {
    pub birth: f64,
    pub death: f64,
    pub origin: Origin,
}

impl TaggedPoint {
    pub fn real(p: DiagramPoint) -> Self {
        TaggedPoint { birth: p.birth, death: p.death, origin: Origin::Real }
    }

    /// The L-infinity closest diagonal point to `p`.
    pub fn projection(p: DiagramPoint) -> Self {
        let mid = (p.birth + p.death) / 2.0;
        TaggedPoint { birth: mid, death: mid, origin: Origin::Diagonal }
    }
}

/// One side of the augmented matching problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AugmentedPointSet {
    pub points: Vec<TaggedPoint>,
}

impl AugmentedPointSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// A perfect matching between augmented sets, as (left, right) index pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matching {
    pub pairs: Vec<(usize, usize)>,
    pub cost: f64,
}

/// `left = D1 + proj(D2)`, `right = D2 + proj(D1)`, real points first.
pub fn augment(d1: &PersistenceDiagram, d2: &PersistenceDiagram) -> (AugmentedPointSet, AugmentedPointSet) {
    let side = |own: &PersistenceDiagram, other: &PersistenceDiagram| AugmentedPointSet {
        points: own
            .points()
            .iter()
            .map(|&p| TaggedPoint::real(p))
            .chain(other.points().iter().map(|&p| TaggedPoint::projection(p)))
            .collect(),
    };
    (side(d1, d2), side(d2, d1))
}

/// L-infinity distance, except that two diagonal points are free to match.
pub fn pair_metric(a: &TaggedPoint, b: &TaggedPoint) -> f64 {
    if a.origin == Origin::Diagonal && b.origin == Origin::Diagonal {
        0.0
    } else {
        linf(a.birth, a.death, b.birth, b.death)
    }
}

fn linf(b1: f64, d1: f64, b2: f64, d2: f64) -> f64 {
    (b1 - b2).abs().max((d1 - d2).abs())
}

/// Distance from a diagram point to its diagonal projection.
fn diagonal_cost(p: &DiagramPoint) -> f64 {
    pair_metric(&TaggedPoint::real(*p), &TaggedPoint::projection(*p))
}

/// Maximum bipartite matching (Hopcroft-Karp). `adj[l]` lists the right
/// vertices adjacent to left vertex `l`. Returns the matching size and the
/// partner of each left vertex.
pub(crate) fn hopcroft_karp(n_right: usize, adj: &[Vec<usize>]) -> (usize, Vec<Option<usize>>) {
    let n_left = adj.len();
    let mut mate_left: Vec<Option<usize>> = vec![None; n_left];
    let mut mate_right: Vec<Option<usize>> = vec![None; n_right];
    let mut layer = vec![u32::MAX; n_left];
    let mut size = 0;
    let mut queue = VecDeque::new();
    loop {
        // BFS from free left vertices
        queue.clear();
        for l in 0..n_left {
            if mate_left[l].is_none() {
                layer[l] = 0;
                queue.push_back(l);
            } else {
                layer[l] = u32::MAX;
            }
        }
        let mut reachable_free = false;
        while let Some(l) = queue.pop_front() {
            for &r in &adj[l] {
                match mate_right[r] {
                    None => reachable_free = true,
                    Some(next) if layer[next] == u32::MAX => {
                        layer[next] = layer[l] + 1;
                        queue.push_back(next);
                    }
                    Some(_) => {}
                }
            }
        }
        if !reachable_free {
            break;
        }
        let mut cursor = vec![0usize; n_left];
        for l in 0..n_left {
            if mate_left[l].is_none()
                && augment_path(l, adj, &mut mate_left, &mut mate_right, &mut layer, &mut cursor)
            {
                size += 1;
            }
        }
    }
    (size, mate_left)
}

fn augment_path(
    start: usize,
    adj: &[Vec<usize>],
    mate_left: &mut [Option<usize>],
    mate_right: &mut [Option<usize>],
    layer: &mut [u32],
    cursor: &mut [usize],
) -> bool {
    // iterative DFS along the BFS layers
    let mut stack = vec![start];
    while let Some(&l) = stack.last() {
        if cursor[l] >= adj[l].len() {
            layer[l] = u32::MAX;
            stack.pop();
            continue;
        }
        let r = adj[l][cursor[l]];
        match mate_right[r] {
            None => {
                // flip the path
                let mut right = r;
                while let Some(left) = stack.pop() {
                    let prev = mate_left[left];
                    mate_left[left] = Some(right);
                    mate_right[right] = Some(left);
                    match prev {
                        Some(p) => right = p,
                        None => break,
                    }
                }
                return true;
            }
            Some(next) if layer[next] == layer[l] + 1 => stack.push(next),
            Some(_) => cursor[l] += 1,
        }
        if stack.last() != Some(&l) {
            continue;
        }
    }
    false
}

fn threshold_adjacency(left: &AugmentedPointSet, right: &AugmentedPointSet, threshold: f64) -> Vec<Vec<usize>> {
    left.points
        .iter()
        .map(|a| {
            right
                .points
                .iter()
                .enumerate()
                .filter(|(_, b)| pair_metric(a, b) <= threshold)
                .map(|(j, _)| j)
                .collect()
        })
        .collect()
}

fn perfect_matching(left: &AugmentedPointSet, right: &AugmentedPointSet, threshold: f64) -> Option<Vec<(usize, usize)>> {
    if left.len() != right.len() {
        return None;
    }
    let adj = threshold_adjacency(left, right, threshold);
    let (size, mate) = hopcroft_karp(right.len(), &adj);
    (size == left.len()).then(|| {
        mate.into_iter()
            .enumerate()
            .map(|(l, r)| (l, r.expect("perfect")))
            .collect()
    })
}

/// Whether a perfect matching exists using only pairs with cost `<= threshold`.
pub fn feasible(left: &AugmentedPointSet, right: &AugmentedPointSet, threshold: f64) -> bool {
    perfect_matching(left, right, threshold).is_some()
}

/// Threshold search over the real points of two diagrams. Pair costs are
/// computed on demand; both point lists are sorted by birth, descending.
struct Search<'a> {
    a: &'a [DiagramPoint],
    b: &'a [DiagramPoint],
    diag_a: Vec<f64>,
    diag_b: Vec<f64>,
}

/// Indices of `pts` (sorted by birth, descending) born within `t` of `birth`.
fn birth_window(pts: &[DiagramPoint], birth: f64, t: f64) -> std::ops::Range<usize> {
    let start = pts.partition_point(|q| q.birth > birth + t);
    let end = pts.partition_point(|q| q.birth >= birth - t);
    start..end.max(start)
}

impl<'a> Search<'a> {
    fn new(d1: &'a PersistenceDiagram, d2: &'a PersistenceDiagram) -> Self {
        let (a, b) = (d1.points(), d2.points());
        Search {
            a,
            b,
            diag_a: a.iter().map(diagonal_cost).collect(),
            diag_b: b.iter().map(diagonal_cost).collect(),
        }
    }

    /// Costs in `[lo, hi]` that can be the bottleneck distance: 0, diagonal
    /// costs, and pair costs below the diagonal cost of one endpoint. (A
    /// pair costing at least both diagonal costs can be dropped from any
    /// matching, so it never realizes the optimum alone.)
    fn candidates(&self, lo: f64, hi: f64) -> Vec<f64> {
        let mut c: Vec<f64> = std::iter::once(0.0).chain(self.diag_a.iter().copied()).chain(self.diag_b.iter().copied()).collect();
        for (p, &dp, qs) in self
            .a
            .iter()
            .zip(&self.diag_a)
            .map(|(p, d)| (p, d, self.b))
            .chain(self.b.iter().zip(&self.diag_b).map(|(p, d)| (p, d, self.a)))
        {
            if dp <= lo {
                continue;
            }
            for q in &qs[birth_window(qs, p.birth, dp)] {
                let cost = linf(p.birth, p.death, q.birth, q.death);
                if cost < dp && cost >= lo && cost <= hi {
                    c.push(cost);
                }
            }
        }
        c.retain(|&x| x >= lo && x <= hi);
        c.sort_by(f64::total_cmp);
        c.dedup();
        c
    }

    /// A perfect augmented matching at `t` exists iff the real-real graph at
    /// `t` has a matching covering every point farther than `t` from the
    /// diagonal. By the Mendelsohn-Dulmage theorem that holds iff each side's
    /// far points can be covered separately.
    fn feasible(&self, t: f64) -> bool {
        self.covers(self.a, &self.diag_a, self.b, t) && self.covers(self.b, &self.diag_b, self.a, t)
    }

    fn covers(&self, from: &[DiagramPoint], diag: &[f64], to: &[DiagramPoint], t: f64) -> bool {
        let mut adj = Vec::new();
        for (p, &d) in from.iter().zip(diag) {
            if d <= t {
                continue;
            }
            let w = birth_window(to, p.birth, t);
            let row: Vec<usize> = (w.start..w.end)
                .filter(|&j| linf(p.birth, p.death, to[j].birth, to[j].death) <= t)
                .collect();
            if row.is_empty() {
                return false;
            }
            adj.push(row);
        }
        adj.len() <= to.len() && hopcroft_karp(to.len(), &adj).0 == adj.len()
    }

    /// Smallest feasible candidate no larger than `cap`, if any.
    fn search(&self, lower: f64, cap: f64) -> Option<f64> {
        let cands = self.candidates(lower, cap);
        let hi = cands.len();
        if hi == 0 || !self.feasible(cands[hi - 1]) {
            return None;
        }
        // cands[hi - 1] is feasible; find the first feasible index
        let (mut lo, mut hi) = (0, hi - 1);
        while lo < hi {
            let mid = (lo + hi) / 2;
            if self.feasible(cands[mid]) {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        Some(cands[lo])
    }
}

/// Cheap lower bound on the bottleneck distance from the highest points.
pub fn lower_bound(d1: &PersistenceDiagram, d2: &PersistenceDiagram) -> f64 {
    let (m1, m2) = (d1.max_birth(), d2.max_birth());
    let (hi, lo) = if m1 >= m2 { (d1, m2) } else { (d2, m1) };
    // the highest point of `hi` either goes to the diagonal or to a point
    // born no later than `lo`
    match hi.points().first() {
        Some(p) => diagonal_cost(p).min(p.birth - lo),
        None => 0.0,
    }
}

/// Exact bottleneck distance, without constructing a witness.
pub fn bottleneck_value(d1: &PersistenceDiagram, d2: &PersistenceDiagram) -> f64 {
    Search::new(d1, d2)
        .search(lower_bound(d1, d2), f64::INFINITY)
        .expect("the largest candidate is always feasible")
}

/// Whether the bottleneck distance is at most `threshold`.
pub fn within(d1: &PersistenceDiagram, d2: &PersistenceDiagram, threshold: f64) -> bool {
    lower_bound(d1, d2) <= threshold && Search::new(d1, d2).feasible(threshold)
}

/// Exact bottleneck distance if it is at most `cap`.
pub fn bottleneck_below(d1: &PersistenceDiagram, d2: &PersistenceDiagram, cap: f64) -> Option<f64> {
    let lower = lower_bound(d1, d2);
    if lower > cap {
        return None;
    }
    Search::new(d1, d2).search(lower, cap)
}

/// Exact bottleneck distance and one optimal perfect matching between the
/// augmented point sets (see [`augment`]).
pub fn bottleneck_distance(d1: &PersistenceDiagram, d2: &PersistenceDiagram) -> (f64, Matching) {
    let value = bottleneck_value(d1, d2);
    let (left, right) = augment(d1, d2);
    let pairs = perfect_matching(&left, &right, value).expect("optimal threshold admits a perfect matching");
    let cost = pairs
        .iter()
        .map(|&(i, j)| pair_metric(&left.points[i], &right.points[j]))
        .fold(0.0, f64::max);
    (value, Matching { pairs, cost })
}
