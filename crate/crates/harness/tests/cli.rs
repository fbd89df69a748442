use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use pdist_core::MetricGraph;
use pdist_harness::io::write_edge_list;
use pdist_harness::report::{CompareReport, MatrixReport};
use pdist_testkit::{random_graph, rng};
use tempfile::TempDir;

fn pdist(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pdist")).args(args).output().expect("binary runs")
}

fn cycle(n: usize) -> MetricGraph {
    MetricGraph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n, 1.0)).collect()).unwrap()
}

fn write(dir: &Path, name: &str, g: &MetricGraph) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, write_edge_list(g, None)).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn report(out: &Output) -> CompareReport {
    serde_json::from_slice(&out.stdout).expect("json report")
}

#[test]
fn compare_identical_files_is_zero() {
    let dir = TempDir::new().unwrap();
    let a = write(dir.path(), "a.edges", &random_graph(&mut rng(1), 8, 12));
    let out = pdist(&["compare", s(&a), s(&a), "--mode", "discrete"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&out);
    assert_eq!((r.value, r.lower, r.upper), (0.0, 0.0, 0.0));
    assert_eq!(r.schema, 1);
    assert_eq!(r.graphs, ["a".to_string(), "a".to_string()]);
    assert_eq!(r.seconds, None);
}

#[test]
fn refined_cycles_bracket_one() {
    // single-point diagrams (5, 0) and (6, 0): the distance is exactly 1
    let dir = TempDir::new().unwrap();
    let a = write(dir.path(), "c10.edges", &cycle(10));
    let b = write(dir.path(), "c12.edges", &cycle(12));
    let out = pdist(&["compare", s(&a), s(&b), "--mode", "refined", "--eps", "0.1"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&out);
    assert!(0.9 <= r.lower && r.lower <= 1.0 && 1.0 <= r.upper && r.upper <= 1.1, "{r:?}");
    assert!(r.upper - r.lower <= 0.1);
    assert!(r.converged);
    assert_eq!(r.params.eps, Some(0.1));
}

#[test]
fn subsampled_runs_are_identical() {
    let dir = TempDir::new().unwrap();
    let mut r = rng(2);
    let a = write(dir.path(), "a.edges", &random_graph(&mut r, 10, 16));
    let b = write(dir.path(), "b.edges", &random_graph(&mut r, 10, 16));
    let args = ["compare", s(&a), s(&b), "--mode", "subsampled", "--delta", "0.5", "--seed", "7"];
    let (x, y) = (pdist(&args), pdist(&args));
    assert!(x.status.success());
    assert!(!x.stdout.is_empty());
    assert_eq!(x.stdout, y.stdout);
    let rep = report(&x);
    assert_eq!((rep.params.seed, rep.params.delta), (7, Some(0.5)));
    assert!(rep.lower <= rep.value && rep.value <= rep.upper);
}

#[test]
fn timing_is_opt_in() {
    let dir = TempDir::new().unwrap();
    let a = write(dir.path(), "a.edges", &cycle(5));
    let r = report(&pdist(&["compare", s(&a), s(&a), "--timing"]));
    assert!(r.seconds.unwrap() >= 0.0);
}

#[test]
fn csv_output() {
    let dir = TempDir::new().unwrap();
    let a = write(dir.path(), "c10.edges", &cycle(10));
    let b = write(dir.path(), "c12.edges", &cycle(12));
    let out_path = dir.path().join("r.csv");
    let out = pdist(&["compare", s(&a), s(&b), "--format", "csv", "--out", s(&out_path)]);
    assert!(out.status.success());
    let text = fs::read_to_string(out_path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "graph1,graph2,mode,lower,upper,value,forward,backward,converged");
    assert_eq!(lines[1], "c10,c12,discrete,1,1,1,1,1,true");
}

#[test]
fn budget_exhaustion_still_reports() {
    let dir = TempDir::new().unwrap();
    let a = write(dir.path(), "c10.edges", &cycle(10));
    let b = write(dir.path(), "c12.edges", &cycle(12));
    let out = pdist(&["compare", s(&a), s(&b), "--mode", "refined", "--eps", "0.001", "--max-rounds", "2"]);
    assert_eq!(out.status.code(), Some(3));
    let r = report(&out);
    assert!(!r.converged);
    assert_eq!(r.rounds.len(), 2);
    assert!(r.lower <= 1.0 && 1.0 <= r.upper);
}

#[test]
fn input_errors_exit_2() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.edges");
    fs::write(&bad, "a b 1\nb c 0\n").unwrap();
    let out = pdist(&["compare", s(&bad), s(&bad)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));

    let split = dir.path().join("split.edges");
    fs::write(&split, "a b 1\nc d 1\n").unwrap();
    assert_eq!(pdist(&["compare", s(&split), s(&split)]).status.code(), Some(2));

    let missing = dir.path().join("nope.edges");
    assert_eq!(pdist(&["compare", s(&missing), s(&missing)]).status.code(), Some(2));
}

#[test]
fn matrix_of_cycles() {
    let dir = TempDir::new().unwrap();
    for n in [10, 12, 20] {
        write(dir.path(), &format!("c{n:02}.edges"), &cycle(n));
    }
    let json = dir.path().join("m.json");
    let out = pdist(&["matrix", s(dir.path()), "--out", s(&json)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let m: MatrixReport = serde_json::from_str(&fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(m.ids, ["c10", "c12", "c20"]);
    // |L/2 - L'/2| unless sending both points to the diagonal is cheaper
    let expect = [[0.0, 1.0, 5.0], [1.0, 0.0, 4.0], [5.0, 4.0, 0.0]];
    assert_eq!(m.values, expect);

    let out = pdist(&["matrix", s(dir.path()), "--format", "csv"]);
    let csv = String::from_utf8(out.stdout).unwrap();
    assert_eq!(csv, "graph,c10,c12,c20\nc10,0,1,5\nc12,1,0,4\nc20,5,4,0\n");
}

#[test]
fn matrix_of_identical_files_is_zero() {
    let dir = TempDir::new().unwrap();
    let g = random_graph(&mut rng(3), 8, 12);
    write(dir.path(), "x.edges", &g);
    write(dir.path(), "y.edges", &g);
    let out = pdist(&["matrix", s(dir.path())]);
    let m: MatrixReport = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(m.values, vec![vec![0.0; 2]; 2]);
}

#[test]
fn matrix_of_empty_directory_exits_2() {
    let dir = TempDir::new().unwrap();
    assert_eq!(pdist(&["matrix", s(dir.path())]).status.code(), Some(2));
    write(dir.path(), "only.edges", &cycle(4));
    assert_eq!(pdist(&["matrix", s(dir.path())]).status.code(), Some(2));
}

#[test]
fn rips_writes_an_edge_list() {
    let dir = TempDir::new().unwrap();
    let pts = dir.path().join("p.txt");
    fs::write(&pts, "0 0\n1 0\n1 1\n5 5\n5 6\n3 3\n").unwrap();
    let out_path = dir.path().join("r.edges");
    let out = pdist(&["rips", s(&pts), "--radius", "3", "--out", s(&out_path)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let g = pdist_harness::load_embedded_graph(&out_path).unwrap();
    assert_eq!(g.graph.node_count(), 6);
    assert_eq!(g.coords.unwrap()[3], [5.0, 5.0]);

    // disconnected at a small radius
    assert_eq!(pdist(&["rips", s(&pts), "--radius", "1.5"]).status.code(), Some(2));
}

#[test]
fn noise_sweep_is_deterministic_and_exact_without_noise() {
    let dir = TempDir::new().unwrap();
    let grid = pdist_harness::synthetic::grid(3, 1.0);
    let path = dir.path().join("grid.edges");
    fs::write(&path, write_edge_list(&grid.graph, grid.coords.as_deref())).unwrap();
    let args = ["noise-sweep", s(&path), "--eps-list", "0,0.2", "--samples", "2", "--seed", "5"];
    let (x, y) = (pdist(&args), pdist(&args));
    assert!(x.status.success(), "{}", String::from_utf8_lossy(&x.stderr));
    assert_eq!(x.stdout, y.stdout);
    let text = String::from_utf8(x.stdout).unwrap();
    let rows: Vec<Vec<f64>> = text.lines().skip(1).map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 2);
    // eps = 0: samples on the graph, the reconstruction is the sampled graph
    let (spacing, draws, max) = (rows[0][1], rows[0][3], rows[0][7]);
    assert_eq!(draws, 2.0);
    assert!(max <= spacing / 2.0, "{text}");
    assert!(rows[1][6] > 0.0);

    let bare = dir.path().join("bare.edges");
    fs::write(&bare, "a b 1\n").unwrap();
    assert_eq!(pdist(&["noise-sweep", s(&bare), "--eps-list", "0.1"]).status.code(), Some(2));
}
