//! Acceptance suite. Runs every criterion at its stated tolerance and time
//! limit, prints one PASS/FAIL line each, and exits non-zero on any failure.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use pdist_core::bottleneck::{bottleneck_distance, bottleneck_value};
use pdist_core::distortion::Mode;
use pdist_core::persistence::{analyze, diagram};
use pdist_core::{approx_pd_distance, discrete_pd_distance, GraphPoint, MetricGraph};
use pdist_harness::experiments::{matrix, noise_sweep, CompareOptions, SweepOptions};
use pdist_harness::synthetic;
use pdist_testkit::{
    brute_force_bottleneck, dense_diagram_oracle, random_diagram, random_graph, random_point, random_unit_graph, rng,
};
use rand::seq::SliceRandom;
use rand::Rng;

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn diagram_oracle() -> Outcome {
    let mut r = rng(101);
    let mut worst = 0.0f64;
    for i in 0..200 {
        let g = random_graph(&mut r, 8, 12);
        let base = GraphPoint::Node(r.gen_range(0..g.node_count()));
        let d = bottleneck_value(&diagram(&g, base), &dense_diagram_oracle(&g, base, 1e-3));
        worst = worst.max(d);
        if d > 2e-3 {
            return Err(format!("graph {i}: bottleneck to dense oracle {d:.3e} > 2e-3"));
        }
    }
    Ok(format!("200 graphs, max bottleneck to dense oracle {worst:.2e}"))
}

fn bottleneck_exactness() -> Outcome {
    let mut r = rng(102);
    let mut worst = 0.0f64;
    for i in 0..200 {
        let (a, b) = (random_diagram(&mut r, 5), random_diagram(&mut r, 5));
        let (d, m) = bottleneck_distance(&a, &b);
        let err = (d - brute_force_bottleneck(&a, &b)).abs();
        worst = worst.max(err);
        if err > 1e-12 || m.cost != d {
            return Err(format!("pair {i}: error {err:.3e}, witness cost {} vs {d}", m.cost));
        }
    }
    Ok(format!("200 pairs, max error {worst:.1e}"))
}

/// Maxima per edge, counting the two halves of the basepoint's edge
/// separately (a node maximum belongs to every incident edge).
fn maxima_per_piece(g: &MetricGraph, base: GraphPoint, maxima: &[(GraphPoint, f64)]) -> Vec<usize> {
    // pieces: one per edge, plus the far half of the base edge at the end
    let mut count = vec![0usize; g.edge_count() + 1];
    let split = match base {
        GraphPoint::Interior { edge, offset } => Some((edge, offset)),
        GraphPoint::Node(_) => None,
    };
    for &(p, _) in maxima {
        match p {
            GraphPoint::Interior { edge, offset } => match split {
                Some((se, so)) if se == edge && offset > so => count[g.edge_count()] += 1,
                _ => count[edge] += 1,
            },
            GraphPoint::Node(v) => {
                let mut seen = Vec::new();
                for &e in g.incident(v) {
                    if seen.contains(&e) {
                        continue;
                    }
                    seen.push(e);
                    match split {
                        Some((se, _)) if se == e => {
                            let edge = g.edge(e);
                            if edge.u == v {
                                count[e] += 1;
                            }
                            if edge.v == v {
                                count[g.edge_count()] += 1;
                            }
                        }
                        _ => count[e] += 1,
                    }
                }
            }
        }
    }
    count
}

fn critical_structure() -> Outcome {
    let mut r = rng(103);
    let mut merges = 0;
    for i in 0..100 {
        let g = random_graph(&mut r, 10, 16);
        let base = random_point(&mut r, &g);
        let sweep = analyze(&g, base);
        let counts = maxima_per_piece(&g, base, &sweep.critical.maxima);
        if let Some(e) = counts.iter().position(|&c| c > 1) {
            return Err(format!("graph {i}, base {base:?}: {} maxima on edge piece {e}", counts[e]));
        }
        for m in &sweep.merges {
            merges += 1;
            let ok = m.point == base || matches!(m.point, GraphPoint::Node(v) if g.degree(v) >= 3);
            if !ok {
                return Err(format!("graph {i}: merge at {:?}, not a node of degree >= 3 or the basepoint", m.point));
            }
        }
    }
    Ok(format!("100 graphs, {merges} merges all at branch nodes or the basepoint"))
}

fn two_pieces() -> Outcome {
    let mut r = rng(104);
    let mut worst = 0.0f64;
    for i in 0..100 {
        let g = random_graph(&mut r, 8, 12);
        let x = GraphPoint::Node(r.gen_range(0..g.node_count()));
        let e = r.gen_range(0..g.edge_count());
        let l = g.edge(e).length;
        let n = 513;
        let s: Vec<f64> = (0..n).map(|k| l * k as f64 / (n - 1) as f64).collect();
        let v: Vec<f64> = s.iter().map(|&t| g.eval_geodesic(g.point_on_edge(e, t).unwrap(), x)).collect();
        // slope +1 from the left end, slope -1 from the right end, lower envelope
        let (up, down) = (v[0], v[n - 1] + l);
        let res = s.iter().zip(&v).map(|(&t, &y)| (y - (up + t).min(down - t)).abs()).fold(0.0, f64::max);
        worst = worst.max(res);
        if res > 1e-9 {
            return Err(format!("trial {i}: residual {res:.3e}"));
        }
    }
    Ok(format!("100 trials, max residual {worst:.1e}"))
}

fn lipschitz() -> Outcome {
    let mut r = rng(105);
    let mut worst = f64::NEG_INFINITY;
    for i in 0..200 {
        let g = random_graph(&mut r, 8, 12);
        let p = random_point(&mut r, &g);
        let q = random_point(&mut r, &g);
        let db = bottleneck_value(&diagram(&g, p), &diagram(&g, q));
        let dg = g.eval_geodesic(p, q);
        worst = worst.max(db - dg);
        if db > dg + 1e-9 {
            return Err(format!("pair {i}: d_B {db} > d_G {dg}"));
        }
    }
    Ok(format!("200 pairs, max d_B - d_G = {worst:.3}"))
}

fn sandwich() -> Outcome {
    let mut r = rng(106);
    let mut widest = 0.0f64;
    for i in 0..20 {
        let g1 = random_graph(&mut r, 16, 40);
        let g2 = random_graph(&mut r, 16, 40);
        let l = g1.max_edge_length().max(g2.max_edge_length());
        let d = approx_pd_distance(&g1, &g2, 0.0, 4).map_err(|e| e.to_string())?;
        if d.rounds.len() != 4 {
            return Err(format!("pair {i}: {} rounds", d.rounds.len()));
        }
        for (a, x) in d.rounds.iter().enumerate() {
            for y in &d.rounds[a + 1..] {
                if x.lower.max(y.lower) > x.upper.min(y.upper) {
                    return Err(format!("pair {i}: rounds {x:?} and {y:?} are disjoint"));
                }
            }
        }
        let last = d.rounds.last().unwrap();
        let width = last.upper - last.lower;
        widest = widest.max(width / l);
        if width > l / 16.0 || d.width() > l / 16.0 {
            return Err(format!("pair {i}: final width {width} > l/16 = {}", l / 16.0));
        }
    }
    Ok(format!("20 pairs, rounds pairwise intersect, max final width {widest:.4} l"))
}

fn factor_two() -> Outcome {
    let mut r = rng(107);
    let mut tightest = f64::INFINITY;
    for i in 0..10 {
        let g1 = random_unit_graph(&mut r, 10, 16);
        let g2 = random_unit_graph(&mut r, 10, 16);
        let discrete = discrete_pd_distance(&g1, &g2).value;
        let lower = approx_pd_distance(&g1, &g2, 0.0, 4).map_err(|e| e.to_string())?.lower;
        tightest = tightest.min(2.0 * lower + 1e-9 - discrete);
        if discrete > 2.0 * lower + 1e-9 {
            return Err(format!("pair {i}: discrete {discrete} > 2 x refined lower {lower}"));
        }
    }
    Ok(format!("10 unit-edge pairs, min slack 2*lower + 1e-9 - discrete = {tightest:.2e}"))
}

fn rediscretization() -> Outcome {
    let mut r = rng(108);
    for i in 0..20 {
        let g = random_graph(&mut r, 8, 12);
        let mut perm: Vec<usize> = (0..g.node_count()).collect();
        perm.shuffle(&mut r);
        let copy = g.relabeled(|l| format!("copy-{l}")).unwrap().permuted(&perm).unwrap();
        let d = discrete_pd_distance(&g, &copy).value;
        if d != 0.0 {
            return Err(format!("graph {i}: relabeled copy at distance {d}"));
        }
        let h = g.max_edge_length() / r.gen_range(1.5..4.0);
        let fine = g.subdivide(h).unwrap();
        let a = approx_pd_distance(&g, &fine, 0.0, 4).map_err(|e| e.to_string())?;
        if let Some(k) = a.rounds.iter().position(|x| !(x.lower <= 0.0 && 0.0 <= x.upper)) {
            return Err(format!("graph {i}: round {k} {:?} excludes 0", a.rounds[k]));
        }
        if !a.contains(0.0) {
            return Err(format!("graph {i}: final interval [{}, {}] excludes 0", a.lower, a.upper));
        }
    }
    Ok("20 graphs: relabeled copies at 0, subdivided copies contain 0 in every round".into())
}

fn pseudometric() -> Outcome {
    let mut r = rng(109);
    let mut worst = f64::NEG_INFINITY;
    for i in 0..50 {
        let gs: Vec<MetricGraph> = (0..3).map(|_| random_graph(&mut r, 7, 10)).collect();
        let d = |a: usize, b: usize| discrete_pd_distance(&gs[a], &gs[b]).value;
        for (a, b) in [(0, 1), (1, 2), (0, 2)] {
            if d(a, b) != d(b, a) {
                return Err(format!("triple {i}: asymmetric ({a},{b})"));
            }
        }
        if d(0, 0) != 0.0 {
            return Err(format!("triple {i}: d(G, G) = {}", d(0, 0)));
        }
        for (a, b, c) in [(0, 1, 2), (1, 0, 2), (0, 2, 1)] {
            let excess = d(a, c) - d(a, b) - d(b, c);
            worst = worst.max(excess);
            if excess > 1e-9 {
                return Err(format!("triple {i}: triangle inequality off by {excess}"));
            }
        }
    }
    Ok(format!("50 triples, symmetric, max triangle excess {worst:.3}"))
}

fn noise_trend() -> Outcome {
    let grid = synthetic::grid(4, 1.0);
    let opts = SweepOptions { eps: vec![0.05, 0.10, 0.15, 0.20], samples: 5, seed: 1, spacing: None, delta: None };
    let rows = noise_sweep(&grid, &opts).map_err(|e| e.to_string())?;
    let means: Vec<f64> = rows.iter().map(|r| r.mean).collect();
    let missing: usize = rows.iter().map(|r| r.missing).sum();
    let detail = format!(
        "means {}, missing draws {missing}",
        means.iter().map(|m| format!("{m:.3}")).collect::<Vec<_>>().join(" ")
    );
    let monotone = means.windows(2).all(|w| w[0] <= w[1]);
    check(monotone && means[3] >= 2.0 * means[0], detail)
}

fn model_classes() -> Outcome {
    let mut r = rng(111);
    let (jitter, seg) = (0.1, 0.5);
    let mut graphs = Vec::new();
    for _ in 0..3 {
        graphs.push(synthetic::cycle(&mut r, 24, seg, jitter));
    }
    for _ in 0..3 {
        graphs.push(synthetic::figure_eight(&mut r, 12, seg, jitter));
    }
    for _ in 0..3 {
        graphs.push(synthetic::star(&mut r, 3, 8, seg, jitter));
    }
    let ids = (0..9).map(|i| format!("m{i}")).collect();
    let opts = CompareOptions { mode: Mode::Refined, eps: 0.05, max_rounds: 3, ..Default::default() };
    let m = matrix(ids, &graphs, &opts).map_err(|e| e.to_string())?;
    let (mut within, mut across) = (Vec::new(), Vec::new());
    for i in 0..9 {
        for j in i + 1..9 {
            if i / 3 == j / 3 {
                within.push(m.values[i][j]);
            } else {
                across.push(m.values[i][j]);
            }
        }
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let diagonal_ok = (0..9).all(|i| m.values[i][i] <= graphs[i].max_edge_length() / 2.0);
    let symmetric = (0..9).all(|i| (0..9).all(|j| m.values[i][j] == m.values[j][i]));
    let (w, a) = (mean(&within), mean(&across));
    check(
        w < a && diagonal_ok && symmetric,
        format!("within-class mean {w:.3}, cross-class mean {a:.3}, diagonal within l/2: {diagonal_ok}"),
    )
}

type Criterion = (&'static str, Option<u64>, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("diagram matches dense-subdivision oracle", Some(60), diagram_oracle),
        ("bottleneck distance is exact", Some(30), bottleneck_exactness),
        ("one maximum per edge, merges at nodes", Some(30), critical_structure),
        ("distance along an edge has two pieces", Some(30), two_pieces),
        ("diagrams are 1-Lipschitz in the basepoint", Some(60), lipschitz),
        ("refinement rounds nest and shrink", Some(300), sandwich),
        ("discrete value within factor 2 on unit edges", None, factor_two),
        ("relabeling and subdivision give 0", None, rediscretization),
        ("pseudometric axioms", None, pseudometric),
        ("noise sweep grows with noise", Some(180), noise_trend),
        ("synthetic classes separate", Some(120), model_classes),
    ];
    let mut failed = 0;
    for (k, (name, limit, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let took = start.elapsed();
        let outcome = match outcome {
            Ok(d) if limit.is_some_and(|l| took > Duration::from_secs(l)) => Err(format!("{d}; over the {} s limit", limit.unwrap())),
            o => o,
        };
        let (tag, detail) = match &outcome {
            Ok(d) => ("PASS", d),
            Err(d) => ("FAIL", d),
        };
        println!("{tag} [{:>2}] {name}: {detail} ({:.1} s)", k + 1, took.as_secs_f64());
        failed += outcome.is_err() as usize;
    }
    println!("{} of {} acceptance criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
