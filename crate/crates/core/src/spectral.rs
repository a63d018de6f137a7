//! Matrices built from a graph and its edge weights.
//!
//! All edge-space objects (weight vectors, incidence columns, line-graph
//! vertices) follow the graph's canonical edge order.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, GraphError};
use crate::linalg::{SymmetricMatrix, SymmetricOperator};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WeightError {
    #[error("weight vector has length {got}, graph has {expected} edges")]
    Length { expected: usize, got: usize },
    #[error("weight {index} is not finite")]
    NonFinite { index: usize },
    #[error("weight vector is empty")]
    Empty,
}

/// Edge weights aligned with a graph's edge order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct WeightVector(Vec<f64>);

impl WeightVector {
    pub fn new(g: &Graph, values: Vec<f64>) -> Result<Self, WeightError> {
        if values.len() != g.edge_count() {
            return Err(WeightError::Length { expected: g.edge_count(), got: values.len() });
        }
        Self::from_values(values)
    }

    /// A weight vector not yet tied to a graph.
    pub fn from_values(values: Vec<f64>) -> Result<Self, WeightError> {
        if let Some(index) = values.iter().position(|w| !w.is_finite()) {
            return Err(WeightError::NonFinite { index });
        }
        Ok(Self(values))
    }

    /// The all-ones vector on `g`'s edges.
    pub fn ones(g: &Graph) -> Self {
        Self(vec![1.0; g.edge_count()])
    }

    pub fn constant(len: usize, c: f64) -> Self {
        Self(vec![c; len])
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    fn check_len(&self, g: &Graph) -> Result<(), WeightError> {
        if self.0.len() == g.edge_count() {
            Ok(())
        } else {
            Err(WeightError::Length { expected: g.edge_count(), got: self.0.len() })
        }
    }
}

impl std::ops::Add for &WeightVector {
    type Output = WeightVector;

    fn add(self, rhs: &WeightVector) -> WeightVector {
        assert_eq!(self.len(), rhs.len(), "length mismatch");
        WeightVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

/// `w = mean_q * 1 + fluctuation` with the fluctuation orthogonal to `1`.
#[derive(Debug, Clone, PartialEq)]
pub struct FluctuationDecomposition {
    pub mean_q: f64,
    pub fluctuation: WeightVector,
}

pub fn decompose(w: &WeightVector) -> Result<FluctuationDecomposition, WeightError> {
    if w.is_empty() {
        return Err(WeightError::Empty);
    }
    let q = w.0.iter().sum::<f64>() / w.len() as f64;
    let fluctuation = WeightVector(w.0.iter().map(|x| x - q).collect());
    Ok(FluctuationDecomposition { mean_q: q, fluctuation })
}

/// Signed Laplacian: `-w_ij` off the diagonal on edges, and each diagonal
/// entry set to the negated sum of its row's off-diagonal entries.
pub fn laplacian(g: &Graph, w: &WeightVector) -> Result<SymmetricMatrix, WeightError> {
    w.check_len(g)?;
    let n = g.vertex_count();
    let mut l = SymmetricMatrix::zeros(n);
    for (&(u, v), &wt) in g.edges().iter().zip(w.values()) {
        l.set(u, v, -wt);
    }
    for i in 0..n {
        let off: f64 = (0..n).filter(|&j| j != i).map(|j| l.get(i, j)).sum();
        l.set(i, i, -off);
    }
    Ok(l)
}

/// Laplacian with every edge weight equal to one.
pub fn equal_weight_laplacian(g: &Graph) -> SymmetricMatrix {
    laplacian(g, &WeightVector::ones(g)).expect("lengths agree")
}

/// Dense integer matrix, used where identities must hold exactly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: i64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "inner dimensions differ");
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    out.data[i * rhs.cols + j] += a * rhs.get(k, j);
                }
            }
        }
        out
    }

    pub fn row_sums(&self) -> Vec<i64> {
        self.data.chunks(self.cols.max(1)).map(|r| r.iter().sum()).collect()
    }

    pub fn col_sums(&self) -> Vec<i64> {
        (0..self.cols).map(|j| (0..self.rows).map(|i| self.get(i, j)).sum()).collect()
    }

    /// Converts a square, symmetric integer matrix.
    pub fn to_symmetric(&self) -> SymmetricMatrix {
        assert_eq!(self.rows, self.cols, "not square");
        SymmetricMatrix::from_upper(self.rows, |i, j| {
            debug_assert_eq!(self.get(i, j), self.get(j, i));
            self.get(i, j) as f64
        })
    }
}

impl std::ops::Sub for &IntMatrix {
    type Output = IntMatrix;

    fn sub(self, rhs: &IntMatrix) -> IntMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch");
        IntMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

/// Unoriented `N x E` incidence matrix.
pub fn incidence_matrix(g: &Graph) -> IntMatrix {
    let mut c = IntMatrix::zeros(g.vertex_count(), g.edge_count());
    for (e, &(u, v)) in g.edges().iter().enumerate() {
        c.set(u, e, 1);
        c.set(v, e, 1);
    }
    c
}

pub fn degree_matrix(g: &Graph) -> IntMatrix {
    let mut d = IntMatrix::zeros(g.vertex_count(), g.vertex_count());
    for (v, &deg) in g.degrees().iter().enumerate() {
        d.set(v, v, deg as i64);
    }
    d
}

pub fn adjacency_matrix(g: &Graph) -> IntMatrix {
    let n = g.vertex_count();
    let mut a = IntMatrix::zeros(n, n);
    for &(u, v) in g.edges() {
        a.set(u, v, 1);
        a.set(v, u, 1);
    }
    a
}

/// Pairs of edge indices sharing an endpoint, each listed once with the
/// smaller index first, sorted.
fn line_graph_pairs(g: &Graph) -> Vec<(usize, usize)> {
    let mut pairs = Vec::new();
    for inc in g.incident_edges() {
        for (a, &e) in inc.iter().enumerate() {
            for &f in &inc[a + 1..] {
                pairs.push((e, f));
            }
        }
    }
    // two distinct edges of a simple graph share at most one endpoint
    pairs.sort_unstable();
    pairs
}

/// The line graph: vertex `i` is edge `i` of `g`. Fails with
/// [`GraphError::NoVertices`] when `g` has no edges.
pub fn line_graph(g: &Graph) -> Result<Graph, GraphError> {
    Graph::new(g.edge_count(), &line_graph_pairs(g))
}

/// Integer adjacency of the line graph.
pub fn line_graph_adjacency_int(g: &Graph) -> IntMatrix {
    let e = g.edge_count();
    let mut a = IntMatrix::zeros(e, e);
    for (i, j) in line_graph_pairs(g) {
        a.set(i, j, 1);
        a.set(j, i, 1);
    }
    a
}

pub fn line_graph_adjacency(g: &Graph) -> SymmetricMatrix {
    line_graph_adjacency_int(g).to_symmetric()
}

/// `4I + A^LG`, the matrix of the Hilbert–Schmidt quadratic form in edge space.
pub fn hs_form_matrix(g: &Graph) -> SymmetricMatrix {
    let mut m = line_graph_adjacency(g);
    m.add_diagonal(4.0);
    m
}

/// `C C^T = D + A`, the signless Laplacian.
pub fn signless_laplacian(g: &Graph) -> SymmetricMatrix {
    let n = g.vertex_count();
    let mut m = SymmetricMatrix::zeros(n);
    for &(u, v) in g.edges() {
        m.set(u, v, 1.0);
    }
    for (v, &d) in g.degrees().iter().enumerate() {
        m.set(v, v, d as f64);
    }
    m
}

/// `2 sum_e w_e^2 + sum_i (sum_{j ~ i} w_ij)^2`, which equals the squared
/// Frobenius norm of `laplacian(g, w)`.
pub fn hs_quadratic_form(g: &Graph, w: &WeightVector) -> Result<f64, WeightError> {
    w.check_len(g)?;
    let mut row = vec![0.0; g.vertex_count()];
    for (&(u, v), &x) in g.edges().iter().zip(w.values()) {
        row[u] += x;
        row[v] += x;
    }
    let edge_part: f64 = w.values().iter().map(|x| x * x).sum();
    Ok(2.0 * edge_part + row.iter().map(|s| s * s).sum::<f64>())
}

/// `4I + A^LG` applied through the incidence structure as `C^T C + 2I`,
/// without forming the `E x E` matrix.
pub struct EdgeFormOperator<'a> {
    graph: &'a Graph,
}

impl<'a> EdgeFormOperator<'a> {
    pub fn new(graph: &'a Graph) -> Self {
        Self { graph }
    }
}

impl SymmetricOperator for EdgeFormOperator<'_> {
    fn dim(&self) -> usize {
        self.graph.edge_count()
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        let mut vertex = vec![0.0; self.graph.vertex_count()];
        for (&(u, v), &xe) in self.graph.edges().iter().zip(x) {
            vertex[u] += xe;
            vertex[v] += xe;
        }
        for ((o, &(u, v)), &xe) in out.iter_mut().zip(self.graph.edges()).zip(x) {
            *o = vertex[u] + vertex[v] + 2.0 * xe;
        }
    }
}
