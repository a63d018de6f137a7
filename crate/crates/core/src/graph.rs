//! Simple undirected graphs with a canonical edge ordering.
//!
//! Every edge is stored as a pair `(u, v)` with `u < v`, and the edge list is
//! sorted lexicographically. The position of an edge in that list is its
//! coordinate in edge space: weight vectors, incidence columns and line-graph
//! vertices all use the same index.

use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::spectral::{WeightError, WeightVector};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GraphError {
    #[error("graph must have at least one vertex")]
    NoVertices,
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),
    #[error("edge ({u}, {v}) references a vertex outside [0, {n})")]
    VertexOutOfRange { u: usize, v: usize, n: usize },
    #[error("{family} requires n >= {min}, got {n}")]
    TooFewVertices { family: &'static str, min: usize, n: usize },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: mixed weighted and unweighted edge lines")]
    MixedColumns { line: usize },
    #[error("missing vertex-count header line")]
    MissingHeader,
    #[error(transparent)]
    Weights(#[from] WeightError),
}

/// An immutable simple undirected graph on vertices `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    degree: Vec<usize>,
    index: HashMap<(usize, usize), usize>,
}

/// Connectivity and degree structure of a graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphClassification {
    pub connected: bool,
    pub regular_degree: Option<usize>,
    pub max_degree: usize,
}

impl Graph {
    /// Builds a graph from unordered vertex pairs. Each pair is normalized to
    /// `(min, max)` before sorting.
    pub fn new(n: usize, pairs: &[(usize, usize)]) -> Result<Self, GraphError> {
        if n == 0 {
            return Err(GraphError::NoVertices);
        }
        let mut edges = Vec::with_capacity(pairs.len());
        for &(a, b) in pairs {
            if a >= n || b >= n {
                return Err(GraphError::VertexOutOfRange { u: a, v: b, n });
            }
            if a == b {
                return Err(GraphError::SelfLoop(a));
            }
            edges.push((a.min(b), a.max(b)));
        }
        edges.sort_unstable();
        if let Some(w) = edges.windows(2).find(|w| w[0] == w[1]) {
            return Err(GraphError::DuplicateEdge(w[0].0, w[0].1));
        }
        let mut degree = vec![0; n];
        let mut index = HashMap::with_capacity(edges.len());
        for (i, &(u, v)) in edges.iter().enumerate() {
            degree[u] += 1;
            degree[v] += 1;
            index.insert((u, v), i);
        }
        Ok(Self { n, edges, degree, index })
    }

    /// Builds a graph together with weights given per input pair, returning
    /// the weights permuted into canonical edge order.
    pub fn with_weights(
        n: usize,
        weighted: &[(usize, usize, f64)],
    ) -> Result<(Self, WeightVector), GraphError> {
        let pairs: Vec<_> = weighted.iter().map(|&(u, v, _)| (u, v)).collect();
        let g = Self::new(n, &pairs)?;
        let mut values = vec![0.0; g.edge_count()];
        for &(u, v, w) in weighted {
            values[g.edge_index(u, v).expect("edge was just inserted")] = w;
        }
        let w = WeightVector::new(&g, values)?;
        Ok((g, w))
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degree
    }

    pub fn degree(&self, v: usize) -> usize {
        self.degree[v]
    }

    pub fn max_degree(&self) -> usize {
        self.degree.iter().copied().max().unwrap_or(0)
    }

    /// Index of the edge joining `u` and `v`, in either orientation.
    pub fn edge_index(&self, u: usize, v: usize) -> Option<usize> {
        self.index.get(&(u.min(v), u.max(v))).copied()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edge_index(u, v).is_some()
    }

    /// Incident edge indices per vertex, in ascending edge order.
    pub fn incident_edges(&self) -> Vec<Vec<usize>> {
        let mut inc: Vec<Vec<usize>> = self.degree.iter().map(|&d| Vec::with_capacity(d)).collect();
        for (i, &(u, v)) in self.edges.iter().enumerate() {
            inc[u].push(i);
            inc[v].push(i);
        }
        inc
    }

    pub fn neighbors(&self) -> Vec<Vec<usize>> {
        let mut adj: Vec<Vec<usize>> = self.degree.iter().map(|&d| Vec::with_capacity(d)).collect();
        for &(u, v) in &self.edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        adj
    }

    pub fn is_connected(&self) -> bool {
        let adj = self.neighbors();
        let mut seen = vec![false; self.n];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        let mut reached = 1;
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    reached += 1;
                    queue.push_back(v);
                }
            }
        }
        reached == self.n
    }

    pub fn classify(&self) -> GraphClassification {
        let first = self.degree[0];
        let regular_degree = self.degree.iter().all(|&d| d == first).then_some(first);
        GraphClassification {
            connected: self.is_connected(),
            regular_degree,
            max_degree: self.max_degree(),
        }
    }
}

/// The complete graph `K_n`.
pub fn complete_graph(n: usize) -> Result<Graph, GraphError> {
    if n == 0 {
        return Err(GraphError::TooFewVertices { family: "complete graph", min: 1, n });
    }
    let pairs: Vec<_> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    Graph::new(n, &pairs)
}

/// The cycle `C_n`.
pub fn cycle_graph(n: usize) -> Result<Graph, GraphError> {
    if n < 3 {
        return Err(GraphError::TooFewVertices { family: "cycle", min: 3, n });
    }
    let pairs: Vec<_> = (0..n).map(|u| (u, (u + 1) % n)).collect();
    Graph::new(n, &pairs)
}

/// The path `P_n`.
pub fn path_graph(n: usize) -> Result<Graph, GraphError> {
    if n == 0 {
        return Err(GraphError::TooFewVertices { family: "path", min: 1, n });
    }
    let pairs: Vec<_> = (1..n).map(|u| (u - 1, u)).collect();
    Graph::new(n, &pairs)
}

/// The star on `n` vertices with center `0`.
pub fn star_graph(n: usize) -> Result<Graph, GraphError> {
    if n < 2 {
        return Err(GraphError::TooFewVertices { family: "star", min: 2, n });
    }
    let pairs: Vec<_> = (1..n).map(|v| (0, v)).collect();
    Graph::new(n, &pairs)
}

/// Parses the edge-list text format.
///
/// The first nonblank, non-comment line holds the vertex count. Every later
/// line is `u v` or `u v w`; all edge lines must agree on whether a weight is
/// present. Lines whose first non-whitespace character is `#` are skipped.
pub fn read_edge_list(text: &str) -> Result<(Graph, Option<WeightVector>), GraphError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (header_line, header) = lines.next().ok_or(GraphError::MissingHeader)?;
    let n: usize = header.parse().map_err(|_| GraphError::Parse {
        line: header_line,
        message: format!("expected vertex count, found {header:?}"),
    })?;

    let mut weighted: Option<bool> = None;
    let mut triples = Vec::new();
    for (line, content) in lines {
        let cols: Vec<&str> = content.split_whitespace().collect();
        let has_weight = match cols.len() {
            2 => false,
            3 => true,
            k => {
                return Err(GraphError::Parse {
                    line,
                    message: format!("expected 2 or 3 columns, found {k}"),
                })
            }
        };
        match weighted {
            None => weighted = Some(has_weight),
            Some(w) if w != has_weight => return Err(GraphError::MixedColumns { line }),
            _ => {}
        }
        let id = |s: &str| {
            s.parse::<usize>().map_err(|_| GraphError::Parse {
                line,
                message: format!("invalid vertex id {s:?}"),
            })
        };
        let (u, v) = (id(cols[0])?, id(cols[1])?);
        if u >= n || v >= n {
            return Err(GraphError::Parse {
                line,
                message: GraphError::VertexOutOfRange { u, v, n }.to_string(),
            });
        }
        let w = if has_weight {
            let w: f64 = cols[2].parse().map_err(|_| GraphError::Parse {
                line,
                message: format!("invalid weight {:?}", cols[2]),
            })?;
            if !w.is_finite() {
                return Err(GraphError::Parse { line, message: "weight is not finite".into() });
            }
            w
        } else {
            1.0
        };
        triples.push((u, v, w));
    }

    let (g, w) = Graph::with_weights(n, &triples)?;
    Ok((g, weighted.unwrap_or(false).then_some(w)))
}

/// Serializes a graph (and optionally its weights) in canonical edge order.
/// Weights are written with the shortest representation that parses back to
/// the same `f64`.
pub fn write_edge_list(g: &Graph, weights: Option<&WeightVector>) -> String {
    let mut out = format!("{}\n", g.vertex_count());
    for (i, &(u, v)) in g.edges().iter().enumerate() {
        match weights {
            Some(w) => writeln!(out, "{u} {v} {:?}", w.values()[i]),
            None => writeln!(out, "{u} {v}"),
        }
        .unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle_and_path() {
        let k3 = Graph::new(3, &[(0, 1), (0, 2), (1, 2)]).unwrap();
        assert_eq!(k3.edge_count(), 3);
        assert_eq!(k3.degrees(), &[2, 2, 2]);

        let p3 = Graph::new(3, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(p3.edge_count(), 2);
        assert_eq!(p3.degrees(), &[1, 2, 1]);
    }

    #[test]
    fn rejects_bad_pairs() {
        assert_eq!(Graph::new(2, &[(0, 0)]), Err(GraphError::SelfLoop(0)));
        assert_eq!(Graph::new(3, &[(0, 1), (1, 0)]), Err(GraphError::DuplicateEdge(0, 1)));
        assert!(matches!(
            Graph::new(2, &[(0, 2)]),
            Err(GraphError::VertexOutOfRange { u: 0, v: 2, n: 2 })
        ));
        assert_eq!(Graph::new(0, &[]), Err(GraphError::NoVertices));
    }

    #[test]
    fn edges_are_canonical() {
        let g = Graph::new(4, &[(3, 2), (1, 0), (2, 0)]).unwrap();
        assert_eq!(g.edges(), &[(0, 1), (0, 2), (2, 3)]);
        assert_eq!(g.edge_index(3, 2), Some(2));
        assert_eq!(g.edge_index(1, 3), None);
    }

    #[test]
    fn classification() {
        let k3 = complete_graph(3).unwrap().classify();
        assert_eq!(
            k3,
            GraphClassification { connected: true, regular_degree: Some(2), max_degree: 2 }
        );
        let p3 = path_graph(3).unwrap().classify();
        assert!(p3.connected);
        assert_eq!(p3.regular_degree, None);
        assert_eq!(p3.max_degree, 2);
        let two = Graph::new(4, &[(0, 1), (2, 3)]).unwrap();
        assert!(!two.classify().connected);
    }

    #[test]
    fn families() {
        let k4 = complete_graph(4).unwrap();
        assert_eq!(k4.edge_count(), 6);
        assert!(k4.degrees().iter().all(|&d| d == 3));
        let c5 = cycle_graph(5).unwrap();
        assert_eq!(c5.edge_count(), 5);
        assert!(c5.degrees().iter().all(|&d| d == 2));
        assert!(cycle_graph(2).is_err());
        assert_eq!(complete_graph(9).unwrap().classify().regular_degree, Some(8));
        assert_eq!(cycle_graph(9).unwrap().classify().regular_degree, Some(2));
        assert_eq!(star_graph(5).unwrap().max_degree(), 4);
    }

    #[test]
    fn parse_weighted() {
        let (g, w) = read_edge_list("3\n0 1 1.0\n0 2 -0.5\n1 2 -0.5\n").unwrap();
        assert_eq!(g, complete_graph(3).unwrap());
        assert_eq!(w.unwrap().values(), &[1.0, -0.5, -0.5]);
    }

    #[test]
    fn parse_unweighted_and_comments() {
        let (g, w) = read_edge_list("# header\n\n2\n  # edge\n0 1\n").unwrap();
        assert_eq!(g.edge_count(), 1);
        assert!(w.is_none());
    }

    #[test]
    fn parse_reorders_weights() {
        let (g, w) = read_edge_list("3\n1 2 3.0\n1 0 2.0\n").unwrap();
        assert_eq!(g.edges(), &[(0, 1), (1, 2)]);
        assert_eq!(w.unwrap().values(), &[2.0, 3.0]);
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(read_edge_list("2\n0 2 1.0\n"), Err(GraphError::Parse { line: 2, .. })));
        assert!(matches!(
            read_edge_list("3\n0 1 1.0\n1 2\n"),
            Err(GraphError::MixedColumns { line: 3 })
        ));
        assert!(matches!(read_edge_list("3\n0 x\n"), Err(GraphError::Parse { line: 2, .. })));
        assert!(matches!(read_edge_list("3\n0 1 2 3\n"), Err(GraphError::Parse { line: 2, .. })));
        assert!(matches!(read_edge_list("three\n"), Err(GraphError::Parse { line: 1, .. })));
        assert_eq!(read_edge_list("# nothing\n"), Err(GraphError::MissingHeader));
        assert_eq!(read_edge_list("2\n0 0\n"), Err(GraphError::SelfLoop(0)));
    }

    #[test]
    fn write_format() {
        let (g, w) = read_edge_list("3\n0 1 1.0\n0 2 -0.5\n1 2 0.1\n").unwrap();
        assert_eq!(write_edge_list(&g, w.as_ref()), "3\n0 1 1.0\n0 2 -0.5\n1 2 0.1\n");
        assert_eq!(write_edge_list(&g, None), "3\n0 1\n0 2\n1 2\n");
    }
}
