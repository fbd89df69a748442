//! Text formats: edge lists (optionally with planar node coordinates),
//! OFF/OBJ surface meshes reduced to their 1-skeleton, and point clouds.
//!
//! Edge list: UTF-8, `#` starts a comment, each data line is `u v length`.
//! A line `node: id x y` attaches coordinates to a node.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use pdist_core::metric_graph::euclidean;
use pdist_core::{GraphError, MetricGraph, PointCloud};

use crate::error::HarnessError;

/// A graph together with optional per-node planar coordinates (indexed like
/// the graph's nodes).
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddedGraph {
    pub graph: MetricGraph,
    pub coords: Option<Vec<[f64; 2]>>,
}

fn read(path: &Path) -> Result<String, HarnessError> {
    fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))
}

fn strip_comment(line: &str) -> &str {
    line.split_once('#').map_or(line, |(data, _)| data).trim()
}

fn number(token: &str, line: usize, what: &str) -> Result<f64, HarnessError> {
    token
        .parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| HarnessError::parse(line, format!("invalid {what} `{token}`")))
}

pub fn parse_edge_list(text: &str) -> Result<EmbeddedGraph, HarnessError> {
    let mut labels: Vec<String> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut intern = |name: &str, labels: &mut Vec<String>| -> usize {
        *index.entry(name.to_string()).or_insert_with(|| {
            labels.push(name.to_string());
            labels.len() - 1
        })
    };
    let mut edges = Vec::new();
    let mut edge_lines = Vec::new();
    let mut coords: HashMap<usize, [f64; 2]> = HashMap::new();

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let data = strip_comment(raw);
        if data.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = data.split_whitespace().collect();
        if tokens[0] == "node:" {
            if tokens.len() != 4 {
                return Err(HarnessError::parse(line, "expected `node: id x y`"));
            }
            let id = intern(tokens[1], &mut labels);
            let xy = [number(tokens[2], line, "x")?, number(tokens[3], line, "y")?];
            if coords.insert(id, xy).is_some() {
                return Err(HarnessError::parse(line, format!("duplicate coordinates for `{}`", tokens[1])));
            }
            continue;
        }
        if tokens.len() != 3 {
            return Err(HarnessError::parse(line, "expected `u v length`"));
        }
        let length = number(tokens[2], line, "length")?;
        let u = intern(tokens[0], &mut labels);
        let v = intern(tokens[1], &mut labels);
        edges.push((u, v, length));
        edge_lines.push(line);
    }
    if labels.is_empty() {
        return Err(HarnessError::Input("edge list has no nodes".into()));
    }
    let n = labels.len();
    let graph = MetricGraph::from_indexed(labels, edges).map_err(|e| match e {
        GraphError::NonPositiveLength { edge, .. } => HarnessError::GraphAt { line: edge_lines[edge], source: e },
        other => HarnessError::Graph(other),
    })?;
    let coords = if coords.is_empty() {
        None
    } else {
        let mut out = Vec::with_capacity(n);
        for v in 0..n {
            out.push(*coords.get(&v).ok_or_else(|| {
                HarnessError::Input(format!("node `{}` has no coordinates", graph.label(v)))
            })?);
        }
        Some(out)
    };
    Ok(EmbeddedGraph { graph, coords })
}

pub fn load_embedded_graph(path: &Path) -> Result<EmbeddedGraph, HarnessError> {
    parse_edge_list(&read(path)?)
}

pub fn load_graph(path: &Path) -> Result<MetricGraph, HarnessError> {
    Ok(load_embedded_graph(path)?.graph)
}

/// Serializes in edge-list format; lengths use the shortest round-trip
/// decimal representation.
pub fn write_edge_list(graph: &MetricGraph, coords: Option<&[[f64; 2]]>) -> String {
    let mut out = String::new();
    if let Some(coords) = coords {
        for (v, xy) in coords.iter().enumerate() {
            let _ = writeln!(out, "node: {} {} {}", graph.label(v), xy[0], xy[1]);
        }
    }
    for e in graph.edges() {
        let _ = writeln!(out, "{} {} {}", graph.label(e.u), graph.label(e.v), e.length);
    }
    out
}

/// Loads any supported graph file: `.off` and `.obj` as mesh skeletons,
/// everything else as an edge list.
pub fn load_any_graph(path: &Path) -> Result<MetricGraph, HarnessError> {
    match extension(path).as_deref() {
        Some("off") | Some("obj") => load_mesh_skeleton(path),
        _ => load_graph(path),
    }
}

fn extension(path: &Path) -> Option<String> {
    path.extension().map(|e| e.to_string_lossy().to_ascii_lowercase())
}

pub fn load_mesh_skeleton(path: &Path) -> Result<MetricGraph, HarnessError> {
    let text = read(path)?;
    let (vertices, faces) = match extension(path).as_deref() {
        Some("obj") => parse_obj(&text)?,
        Some("off") => parse_off(&text)?,
        _ if text.trim_start().starts_with("OFF") => parse_off(&text)?,
        _ => parse_obj(&text)?,
    };
    mesh_skeleton(&vertices, &faces)
}

/// Face boundary edges of a polygon mesh, deduplicated, with Euclidean
/// lengths. Faces are (line number, vertex indices).
pub fn mesh_skeleton(vertices: &[Vec<f64>], faces: &[(usize, Vec<usize>)]) -> Result<MetricGraph, HarnessError> {
    let mut unique = BTreeSet::new();
    for (line, face) in faces {
        if face.len() < 3 {
            return Err(HarnessError::parse(*line, "face needs at least 3 vertices"));
        }
        let distinct: BTreeSet<usize> = face.iter().copied().collect();
        if distinct.len() != face.len() {
            return Err(HarnessError::parse(*line, "degenerate face repeats a vertex"));
        }
        for (k, &a) in face.iter().enumerate() {
            if a >= vertices.len() {
                return Err(HarnessError::parse(*line, format!("vertex index {a} out of range")));
            }
            let b = face[(k + 1) % face.len()];
            unique.insert((a.min(b), a.max(b)));
        }
    }
    let edges = unique
        .into_iter()
        .map(|(a, b)| (a, b, euclidean(&vertices[a], &vertices[b])))
        .collect();
    let labels = (0..vertices.len()).map(|i| format!("v{i}")).collect();
    Ok(MetricGraph::from_indexed(labels, edges)?)
}

type Mesh = (Vec<Vec<f64>>, Vec<(usize, Vec<usize>)>);

fn parse_off(text: &str) -> Result<Mesh, HarnessError> {
    // (line number, tokens) of every non-empty, non-comment line
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, strip_comment(l)))
        .filter(|(_, l)| !l.is_empty());
    let (first_line, header) = lines.next().ok_or_else(|| HarnessError::parse(1, "empty OFF file"))?;
    let mut head: Vec<&str> = header.split_whitespace().collect();
    if head.first().is_some_and(|t| t.ends_with("OFF")) {
        head.remove(0);
    } else {
        return Err(HarnessError::parse(first_line, "missing OFF header"));
    }
    let (count_line, counts) = if head.is_empty() {
        let (i, l) = lines.next().ok_or_else(|| HarnessError::parse(first_line, "missing counts"))?;
        (i, l.split_whitespace().collect::<Vec<_>>())
    } else {
        (first_line, head)
    };
    let count = |k: usize| -> Result<usize, HarnessError> {
        counts
            .get(k)
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| HarnessError::parse(count_line, "expected vertex and face counts"))
    };
    let (nv, nf) = (count(0)?, count(1)?);
    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (i, l) = lines.next().ok_or_else(|| HarnessError::parse(count_line, "too few vertex lines"))?;
        let coords = l
            .split_whitespace()
            .take(3)
            .map(|t| number(t, i, "coordinate"))
            .collect::<Result<Vec<_>, _>>()?;
        if coords.len() != 3 {
            return Err(HarnessError::parse(i, "vertex needs 3 coordinates"));
        }
        vertices.push(coords);
    }
    let mut faces = Vec::with_capacity(nf);
    for _ in 0..nf {
        let (i, l) = lines.next().ok_or_else(|| HarnessError::parse(count_line, "too few face lines"))?;
        let tokens: Vec<&str> = l.split_whitespace().collect();
        let k: usize = tokens
            .first()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| HarnessError::parse(i, "expected face vertex count"))?;
        if tokens.len() < k + 1 {
            return Err(HarnessError::parse(i, "face has fewer indices than declared"));
        }
        let idx = tokens[1..=k]
            .iter()
            .map(|t| t.parse::<usize>().map_err(|_| HarnessError::parse(i, format!("bad vertex index `{t}`"))))
            .collect::<Result<Vec<_>, _>>()?;
        faces.push((i, idx));
    }
    Ok((vertices, faces))
}

fn parse_obj(text: &str) -> Result<Mesh, HarnessError> {
    let mut vertices = Vec::new();
    let mut faces = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let data = strip_comment(raw);
        let mut tokens = data.split_whitespace();
        match tokens.next() {
            Some("v") => {
                let coords = tokens
                    .take(3)
                    .map(|t| number(t, line, "coordinate"))
                    .collect::<Result<Vec<_>, _>>()?;
                if coords.len() != 3 {
                    return Err(HarnessError::parse(line, "vertex needs 3 coordinates"));
                }
                vertices.push(coords);
            }
            Some("f") => {
                let mut idx = Vec::new();
                for t in tokens {
                    let head = t.split('/').next().unwrap_or("");
                    let k: i64 = head
                        .parse()
                        .map_err(|_| HarnessError::parse(line, format!("bad vertex index `{t}`")))?;
                    // 1-based, negative indices count back from the latest vertex
                    let resolved = match k {
                        k if k > 0 => k - 1,
                        k if k < 0 => vertices.len() as i64 + k,
                        _ => -1,
                    };
                    if resolved < 0 {
                        return Err(HarnessError::parse(line, format!("vertex index `{t}` out of range")));
                    }
                    idx.push(resolved as usize);
                }
                faces.push((line, idx));
            }
            _ => {}
        }
    }
    Ok((vertices, faces))
}

/// One point per line, whitespace-separated decimals.
pub fn parse_points(text: &str) -> Result<PointCloud, HarnessError> {
    let mut points = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let data = strip_comment(raw);
        if data.is_empty() {
            continue;
        }
        let p = data
            .split_whitespace()
            .map(|t| number(t, i + 1, "coordinate"))
            .collect::<Result<Vec<_>, _>>()?;
        if let Some(first) = points.first() {
            let first: &Vec<f64> = first;
            if first.len() != p.len() {
                return Err(HarnessError::parse(i + 1, format!("expected {} coordinates", first.len())));
            }
        }
        points.push(p);
    }
    Ok(PointCloud::new(points)?)
}

pub fn load_points(path: &Path) -> Result<PointCloud, HarnessError> {
    parse_points(&read(path)?)
}

pub fn write_points(cloud: &PointCloud) -> String {
    let mut out = String::new();
    for p in cloud.points() {
        let row: Vec<String> = p.iter().map(|c| c.to_string()).collect();
        let _ = writeln!(out, "{}", row.join(" "));
    }
    out
}
