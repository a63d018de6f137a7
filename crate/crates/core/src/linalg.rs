//! Dense symmetric linear algebra.
//!
//! Two eigensolvers live here. [`eigendecompose`] is a cyclic Jacobi solver
//! that returns the full spectrum with an orthonormal eigenbasis and serves as
//! the reference oracle. [`symmetric_eigenvalues`] reduces to tridiagonal form
//! with Householder reflections and runs implicit QL; it returns eigenvalues
//! only and is the one to reach for when the dimension is in the hundreds.
//!
//! Subspace restriction uses a single Householder reflector `H` that maps the
//! excluded direction onto the first coordinate axis. The trailing
//! `(n-1) x (n-1)` block of `H M H` is `M` compressed onto the orthogonal
//! complement, expressed in the orthonormal basis formed by the trailing
//! columns of `H`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Relative tolerance for reconstruction and orthonormality of eigenpairs.
pub const TAU_EIG: f64 = 1e-10;
/// Tolerance for orthogonality assertions against a deflated direction.
pub const TAU_PROJ: f64 = 1e-12;

const JACOBI_OFF_TOL: f64 = 1e-14;
const JACOBI_MAX_SWEEPS: usize = 100;
const QL_MAX_ITER: usize = 60;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("matrix contains a non-finite entry at ({0}, {1})")]
    NonFinite(usize, usize),
    #[error("matrix is not symmetric at ({0}, {1})")]
    NotSymmetric(usize, usize),
    #[error("matrix rows have inconsistent length")]
    Ragged,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("excluded direction is the zero vector")]
    ZeroDirection,
    #[error("orthogonal complement of a 1-dimensional space is trivial")]
    TrivialComplement,
    #[error("Jacobi iteration did not converge in {sweeps} sweeps (off-diagonal norm {residual:e})")]
    JacobiNoConvergence { sweeps: usize, residual: f64 },
    #[error("QL iteration did not converge for eigenvalue {index}")]
    QlNoConvergence { index: usize },
}

/// A dense symmetric matrix stored row-major. Symmetry is exact: every
/// mutation writes both `(i, j)` and `(j, i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymmetricMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![0.0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    /// Builds from explicit rows; rejects ragged, asymmetric, or non-finite
    /// input.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, LinalgError> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(LinalgError::Ragged);
        }
        for i in 0..n {
            for j in 0..n {
                if !rows[i][j].is_finite() {
                    return Err(LinalgError::NonFinite(i, j));
                }
                if rows[i][j] != rows[j][i] {
                    return Err(LinalgError::NotSymmetric(i, j));
                }
            }
        }
        Ok(Self { n, data: rows.concat() })
    }

    /// Builds from a function evaluated on the upper triangle `i <= j`.
    pub fn from_upper(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in i..n {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
        self.data[j * self.n + i] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.n.max(1)).map(<[f64]>::to_vec).collect()
    }

    pub fn add_diagonal(&mut self, shift: f64) {
        for i in 0..self.n {
            self.data[i * self.n + i] += shift;
        }
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// Maximum absolute row sum.
    pub fn inf_norm(&self) -> f64 {
        (0..self.n)
            .map(|i| self.row(i).iter().map(|x| x.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n).map(|i| dot(self.row(i), x)).collect()
    }

    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        dot(x, &self.mul_vec(x))
    }

    fn check_finite(&self) -> Result<(), LinalgError> {
        match self.data.iter().position(|x| !x.is_finite()) {
            Some(k) => Err(LinalgError::NonFinite(k / self.n, k % self.n)),
            None => Ok(()),
        }
    }
}

impl std::ops::Add for &SymmetricMatrix {
    type Output = SymmetricMatrix;

    fn add(self, rhs: &SymmetricMatrix) -> SymmetricMatrix {
        assert_eq!(self.n, rhs.n, "dimension mismatch");
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect();
        SymmetricMatrix { n: self.n, data }
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Full eigendecomposition sorted by ascending eigenvalue.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumSummary {
    /// Eigenvalues in ascending signed order.
    pub eigenvalues: Vec<f64>,
    /// `eigenvectors[k]` is the unit eigenvector for `eigenvalues[k]`.
    pub eigenvectors: Vec<Vec<f64>>,
    /// Indices into `eigenvalues` sorted by nondecreasing absolute value,
    /// ties broken by ascending signed value.
    pub abs_order: Vec<usize>,
}

impl SpectrumSummary {
    fn from_pairs(mut pairs: Vec<(f64, Vec<f64>)>) -> Self {
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let (eigenvalues, eigenvectors): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
        let abs_order = abs_order(&eigenvalues);
        Self { eigenvalues, eigenvectors, abs_order }
    }

    pub fn abs_ordered(&self) -> Vec<f64> {
        self.abs_order.iter().map(|&k| self.eigenvalues[k]).collect()
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max(&self) -> f64 {
        *self.eigenvalues.last().expect("empty spectrum")
    }

    /// `sum_k lambda_k v_k v_k^T`.
    pub fn reconstruct(&self) -> SymmetricMatrix {
        let n = self.eigenvalues.len();
        SymmetricMatrix::from_upper(n, |i, j| {
            self.eigenvalues
                .iter()
                .zip(&self.eigenvectors)
                .map(|(l, v)| l * v[i] * v[j])
                .sum()
        })
    }

    /// Largest entry of `|V^T V - I|`.
    pub fn orthonormality_defect(&self) -> f64 {
        let v = &self.eigenvectors;
        let mut worst: f64 = 0.0;
        for a in 0..v.len() {
            for b in a..v.len() {
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((dot(&v[a], &v[b]) - target).abs());
            }
        }
        worst
    }
}

/// Permutation sorting `values` by `|x|`, ties by signed value.
pub fn abs_order(values: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| {
        values[a].abs().total_cmp(&values[b].abs()).then(values[a].total_cmp(&values[b]))
    });
    idx
}

/// Cyclic Jacobi eigendecomposition.
///
/// Sweeps over all `(p, q)` pairs until the off-diagonal Frobenius mass drops
/// to `1e-14` of the input's Frobenius norm, with a cap of 100 sweeps.
pub fn eigendecompose(m: &SymmetricMatrix) -> Result<SpectrumSummary, LinalgError> {
    m.check_finite()?;
    let n = m.n;
    let mut a = m.data.clone();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let target = JACOBI_OFF_TOL * m.frobenius_norm();
    let off_norm = |a: &[f64]| {
        let mut s = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                s += a[p * n + q] * a[p * n + q];
            }
        }
        (2.0 * s).sqrt()
    };

    let mut sweeps = 0;
    loop {
        let off = off_norm(&a);
        if off <= target {
            break;
        }
        if sweeps == JACOBI_MAX_SWEEPS || !off.is_finite() {
            return Err(LinalgError::JacobiNoConvergence { sweeps, residual: off });
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    if k == p || k == q {
                        continue;
                    }
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    let np = c * akp - s * akq;
                    let nq = s * akp + c * akq;
                    a[k * n + p] = np;
                    a[p * n + k] = np;
                    a[k * n + q] = nq;
                    a[q * n + k] = nq;
                }
                a[p * n + p] = app - t * apq;
                a[q * n + q] = aqq + t * apq;
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }

    let pairs = (0..n)
        .map(|k| (a[k * n + k], (0..n).map(|i| v[i * n + k]).collect()))
        .collect();
    Ok(SpectrumSummary::from_pairs(pairs))
}

/// Eigenvalues in ascending order via Householder tridiagonalization and
/// implicit QL with Wilkinson-style shifts.
pub fn symmetric_eigenvalues(m: &SymmetricMatrix) -> Result<Vec<f64>, LinalgError> {
    m.check_finite()?;
    let (mut d, mut e) = tridiagonalize(m);
    tridiagonal_ql(&mut d, &mut e)?;
    d.sort_by(f64::total_cmp);
    Ok(d)
}

/// Returns the diagonal `d` and the off-diagonal `e` (with `e[k]` coupling
/// `k` and `k + 1`, and `e[n-1] = 0`).
fn tridiagonalize(m: &SymmetricMatrix) -> (Vec<f64>, Vec<f64>) {
    let n = m.n;
    let mut a = m.data.clone();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    let mut u = vec![0.0; n];
    let mut p = vec![0.0; n];
    for k in 0..n.saturating_sub(2) {
        let lo = k + 1;
        let xnorm = (lo..n).map(|i| a[i * n + k] * a[i * n + k]).sum::<f64>().sqrt();
        d[k] = a[k * n + k];
        if xnorm == 0.0 {
            e[k] = 0.0;
            continue;
        }
        let x0 = a[lo * n + k];
        let alpha = if x0 >= 0.0 { -xnorm } else { xnorm };
        for i in lo..n {
            u[i] = a[i * n + k];
        }
        u[lo] -= alpha;
        let unorm2: f64 = (lo..n).map(|i| u[i] * u[i]).sum();
        e[k] = alpha;
        if unorm2 == 0.0 {
            continue;
        }
        let beta = 2.0 / unorm2;
        // p = beta * A u on the trailing block
        for i in lo..n {
            p[i] = beta * (lo..n).map(|j| a[i * n + j] * u[j]).sum::<f64>();
        }
        let kk = 0.5 * beta * (lo..n).map(|i| u[i] * p[i]).sum::<f64>();
        for i in lo..n {
            p[i] -= kk * u[i];
        }
        for i in lo..n {
            for j in lo..n {
                a[i * n + j] -= u[i] * p[j] + p[i] * u[j];
            }
        }
    }
    if n >= 2 {
        d[n - 2] = a[(n - 2) * n + (n - 2)];
        e[n - 2] = a[(n - 1) * n + (n - 2)];
    }
    if n >= 1 {
        d[n - 1] = a[(n - 1) * n + (n - 1)];
        e[n - 1] = 0.0;
    }
    (d, e)
}

fn tridiagonal_ql(d: &mut [f64], e: &mut [f64]) -> Result<(), LinalgError> {
    let n = d.len();
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > QL_MAX_ITER {
                return Err(LinalgError::QlNoConvergence { index: l });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut underflow = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// Householder compression of a symmetric matrix onto the orthogonal
/// complement of one direction.
#[derive(Debug, Clone)]
pub struct Restriction {
    reflector: Vec<f64>,
    beta: f64,
    /// `(n-1) x (n-1)` compressed matrix.
    pub matrix: SymmetricMatrix,
}

/// Reflector `u` and `beta = 2 / |u|^2` with `(I - beta u u^T) e` parallel to
/// the first axis.
fn householder_for(e: &[f64]) -> Result<(Vec<f64>, f64), LinalgError> {
    let en = norm(e);
    if en == 0.0 {
        return Err(LinalgError::ZeroDirection);
    }
    let mut u = e.to_vec();
    u[0] += if e[0] >= 0.0 { en } else { -en };
    Ok((u.clone(), 2.0 / dot(&u, &u)))
}

impl Restriction {
    pub fn new(m: &SymmetricMatrix, excluded: &[f64]) -> Result<Self, LinalgError> {
        let n = m.dim();
        if excluded.len() != n {
            return Err(LinalgError::DimensionMismatch { expected: n, got: excluded.len() });
        }
        if n < 2 {
            return Err(LinalgError::TrivialComplement);
        }
        m.check_finite()?;
        let (u, beta) = householder_for(excluded)?;
        let mut p: Vec<f64> = m.mul_vec(&u).into_iter().map(|x| beta * x).collect();
        let kk = 0.5 * beta * dot(&u, &p);
        for (pi, ui) in p.iter_mut().zip(&u) {
            *pi -= kk * ui;
        }
        let matrix = SymmetricMatrix::from_upper(n - 1, |i, j| {
            let (i, j) = (i + 1, j + 1);
            m.get(i, j) - u[i] * p[j] - p[i] * u[j]
        });
        Ok(Self { reflector: u, beta, matrix })
    }

    /// Maps coordinates in the complement basis back to the ambient space.
    pub fn lift(&self, y: &[f64]) -> Vec<f64> {
        let u = &self.reflector;
        let mut x = Vec::with_capacity(u.len());
        x.push(0.0);
        x.extend_from_slice(y);
        let s = self.beta * dot(u, &x);
        for (xi, ui) in x.iter_mut().zip(u) {
            *xi -= s * ui;
        }
        x
    }
}

/// Orthonormal basis of `{x : <x, 1> = 0}` in `R^n`: the trailing `n - 1`
/// columns of the Householder reflector that maps the all-ones vector onto
/// the first axis.
pub fn deflate_all_ones_basis(n: usize) -> Result<Vec<Vec<f64>>, LinalgError> {
    if n < 2 {
        return Err(LinalgError::TrivialComplement);
    }
    let (u, beta) = householder_for(&vec![1.0; n])?;
    Ok((1..n)
        .map(|col| (0..n).map(|i| f64::from(i == col) - beta * u[i] * u[col]).collect())
        .collect())
}

/// Result of maximizing a Rayleigh quotient over a subspace.
#[derive(Debug, Clone, PartialEq)]
pub struct RayleighMax {
    pub value: f64,
    pub argmax: Vec<f64>,
}

/// `max_{x ⊥ excluded} <x, m x> / |x|^2` with a unit maximizer.
pub fn max_rayleigh_orthogonal_to(
    m: &SymmetricMatrix,
    excluded: &[f64],
) -> Result<RayleighMax, LinalgError> {
    let r = Restriction::new(m, excluded)?;
    let spec = eigendecompose(&r.matrix)?;
    let top = spec.eigenvalues.len() - 1;
    Ok(RayleighMax { value: spec.eigenvalues[top], argmax: r.lift(&spec.eigenvectors[top]) })
}

/// Like [`max_rayleigh_orthogonal_to`] but returns only the value, computed
/// with the tridiagonal solver.
pub fn max_rayleigh_value_orthogonal_to(
    m: &SymmetricMatrix,
    excluded: &[f64],
) -> Result<f64, LinalgError> {
    let r = Restriction::new(m, excluded)?;
    Ok(*symmetric_eigenvalues(&r.matrix)?.last().expect("nonempty"))
}

/// A symmetric linear map given by its action on vectors.
pub trait SymmetricOperator {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[f64], out: &mut [f64]);
}

impl SymmetricOperator for SymmetricMatrix {
    fn dim(&self) -> usize {
        self.n
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            *o = dot(self.row(i), x);
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerIterationConfig {
    pub rel_tol: f64,
    /// Iteration cap per start; `None` means `100 * dim`.
    pub max_iter: Option<usize>,
    /// Added to the operator so the algebraically largest eigenvalue on the
    /// subspace dominates in magnitude.
    pub shift: f64,
    pub seed: u64,
}

impl Default for PowerIterationConfig {
    fn default() -> Self {
        Self { rel_tol: 1e-10, max_iter: None, shift: 0.0, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PowerIterationResult {
    pub value: f64,
    pub vector: Vec<f64>,
    pub iterations: usize,
    /// `|(M - value) x|` for the returned unit vector.
    pub residual: f64,
    pub converged: bool,
}

/// Largest eigenvalue of `op` on the complement of `excluded` by power
/// iteration, re-projecting every step. Converged when the eigen-residual
/// falls below `rel_tol * |value|`; on stagnation restarts once from a new
/// seed and keeps the better of the two runs.
pub fn power_max_orthogonal_to(
    op: &impl SymmetricOperator,
    excluded: &[f64],
    config: PowerIterationConfig,
) -> Result<PowerIterationResult, LinalgError> {
    let n = op.dim();
    if excluded.len() != n {
        return Err(LinalgError::DimensionMismatch { expected: n, got: excluded.len() });
    }
    if n < 2 {
        return Err(LinalgError::TrivialComplement);
    }
    let en = norm(excluded);
    if en == 0.0 {
        return Err(LinalgError::ZeroDirection);
    }
    let unit: Vec<f64> = excluded.iter().map(|x| x / en).collect();
    let first = power_run(op, &unit, config, config.seed);
    if first.converged {
        return Ok(first);
    }
    let second = power_run(op, &unit, config, config.seed ^ 0x9E37_79B9_7F4A_7C15);
    Ok(if second.value > first.value { second } else { first })
}

fn project_out(x: &mut [f64], unit: &[f64]) {
    let c = dot(x, unit);
    for (xi, ui) in x.iter_mut().zip(unit) {
        *xi -= c * ui;
    }
}

fn normalize(x: &mut [f64]) -> f64 {
    let nx = norm(x);
    if nx > 0.0 {
        x.iter_mut().for_each(|v| *v /= nx);
    }
    nx
}

fn power_run(
    op: &impl SymmetricOperator,
    unit: &[f64],
    config: PowerIterationConfig,
    seed: u64,
) -> PowerIterationResult {
    let n = op.dim();
    let cap = config.max_iter.unwrap_or(100 * n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x: Vec<f64> = (0..n).map(|_| rng.random::<f64>() - 0.5).collect();
    project_out(&mut x, unit);
    normalize(&mut x);
    let mut y = vec![0.0; n];
    let mut value = f64::NAN;
    let mut residual = f64::INFINITY;
    for it in 1..=cap {
        op.apply(&x, &mut y);
        project_out(&mut y, unit);
        value = dot(&x, &y);
        residual = y.iter().zip(&x).map(|(a, b)| (a - value * b).powi(2)).sum::<f64>().sqrt();
        if residual <= config.rel_tol * value.abs() {
            return PowerIterationResult { value, vector: x, iterations: it, residual, converged: true };
        }
        for (yi, xi) in y.iter_mut().zip(&x) {
            *yi += config.shift * xi;
        }
        project_out(&mut y, unit);
        if normalize(&mut y) == 0.0 {
            break;
        }
        std::mem::swap(&mut x, &mut y);
    }
    PowerIterationResult { value, vector: x, iterations: cap, residual, converged: false }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn random_symmetric(n: usize, seed: u64) -> SymmetricMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        SymmetricMatrix::from_upper(n, |_, _| rng.random::<f64>() * 2.0 - 1.0)
    }

    #[test]
    fn two_by_two() {
        let m = SymmetricMatrix::from_rows(&[vec![4.0, 1.0], vec![1.0, 4.0]]).unwrap();
        let s = eigendecompose(&m).unwrap();
        assert_abs_diff_eq!(s.eigenvalues[0], 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(s.eigenvalues[1], 5.0, epsilon = 1e-14);
        let v = &s.eigenvectors[0];
        assert_abs_diff_eq!(v[0] + v[1], 0.0, epsilon = 1e-14);
    }

    #[test]
    fn identity_spectrum() {
        let s = eigendecompose(&SymmetricMatrix::identity(3)).unwrap();
        assert_eq!(s.eigenvalues, vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn signed_triangle_laplacian() {
        let m = SymmetricMatrix::from_rows(&[
            vec![0.5, -1.0, 0.5],
            vec![-1.0, 0.5, 0.5],
            vec![0.5, 0.5, -1.0],
        ])
        .unwrap();
        let s = eigendecompose(&m).unwrap();
        for (got, want) in s.eigenvalues.iter().zip([-1.5, 0.0, 1.5]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-13);
        }
        // abs order: 0, then the tie between -1.5 and 1.5 goes to -1.5
        assert_eq!(s.abs_ordered(), vec![s.eigenvalues[1], s.eigenvalues[0], s.eigenvalues[2]]);
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(
            SymmetricMatrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 1.0]]),
            Err(LinalgError::NotSymmetric(0, 1))
        );
        assert_eq!(SymmetricMatrix::from_rows(&[vec![1.0, 2.0]]), Err(LinalgError::Ragged));
        let mut m = SymmetricMatrix::identity(2);
        m.set(0, 1, f64::NAN);
        assert_eq!(eigendecompose(&m), Err(LinalgError::NonFinite(0, 1)));
        assert_eq!(symmetric_eigenvalues(&m), Err(LinalgError::NonFinite(0, 1)));
    }

    #[test]
    fn jacobi_reconstructs_random_matrices() {
        for (n, seed) in [(1, 1), (2, 2), (7, 3), (20, 4), (50, 5)] {
            let m = random_symmetric(n, seed);
            let s = eigendecompose(&m).unwrap();
            let mut diff = s.reconstruct();
            for i in 0..n {
                for j in i..n {
                    diff.set(i, j, diff.get(i, j) - m.get(i, j));
                }
            }
            assert!(diff.frobenius_norm() <= TAU_EIG * m.frobenius_norm());
            assert!(s.orthonormality_defect() <= TAU_EIG);
            let sq: f64 = s.eigenvalues.iter().map(|l| l * l).sum();
            assert_abs_diff_eq!(sq, m.frobenius_norm().powi(2), epsilon = TAU_EIG * sq.max(1.0));
        }
    }

    #[test]
    fn tridiagonal_solver_matches_jacobi() {
        for (n, seed) in [(1, 10), (2, 11), (3, 12), (15, 13), (60, 14)] {
            let m = random_symmetric(n, seed);
            let a = eigendecompose(&m).unwrap().eigenvalues;
            let b = symmetric_eigenvalues(&m).unwrap();
            for (x, y) in a.iter().zip(&b) {
                assert_abs_diff_eq!(x, y, epsilon = 1e-11);
            }
        }
    }

    #[test]
    fn tridiagonal_solver_on_degenerate_spectrum() {
        let mut m = SymmetricMatrix::from_upper(6, |_, _| 1.0);
        m.add_diagonal(-1.0);
        let b = symmetric_eigenvalues(&m).unwrap();
        for x in &b[..5] {
            assert_abs_diff_eq!(*x, -1.0, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(b[5], 5.0, epsilon = 1e-12);
    }

    #[test]
    fn deflation_basis() {
        let b2 = deflate_all_ones_basis(2).unwrap();
        assert_eq!(b2.len(), 1);
        assert_abs_diff_eq!(b2[0][0] + b2[0][1], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(norm(&b2[0]), 1.0, epsilon = 1e-15);
        for n in [3, 4, 17] {
            let b = deflate_all_ones_basis(n).unwrap();
            assert_eq!(b.len(), n - 1);
            for (i, x) in b.iter().enumerate() {
                assert!(x.iter().sum::<f64>().abs() <= TAU_PROJ);
                for (j, y) in b.iter().enumerate() {
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((dot(x, y) - want).abs() <= TAU_PROJ);
                }
            }
        }
        assert_eq!(deflate_all_ones_basis(1), Err(LinalgError::TrivialComplement));
    }

    #[test]
    fn restriction_matches_explicit_basis() {
        let m = random_symmetric(6, 21);
        let r = Restriction::new(&m, &[1.0; 6]).unwrap();
        let basis = deflate_all_ones_basis(6).unwrap();
        for i in 0..5 {
            for j in 0..5 {
                let want = dot(&basis[i], &m.mul_vec(&basis[j]));
                assert_abs_diff_eq!(r.matrix.get(i, j), want, epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn rayleigh_on_path_line_graph() {
        let m = SymmetricMatrix::from_rows(&[vec![4.0, 1.0], vec![1.0, 4.0]]).unwrap();
        let r = max_rayleigh_orthogonal_to(&m, &[1.0, 1.0]).unwrap();
        assert_abs_diff_eq!(r.value, 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(r.argmax[0] + r.argmax[1], 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(norm(&r.argmax), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn rayleigh_identity_is_constant() {
        for n in [2, 5] {
            let r = max_rayleigh_orthogonal_to(&SymmetricMatrix::identity(n), &vec![0.3; n]).unwrap();
            assert_abs_diff_eq!(r.value, 1.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn rayleigh_on_triangle_line_graph() {
        let m = SymmetricMatrix::from_upper(3, |i, j| if i == j { 4.0 } else { 1.0 });
        let r = max_rayleigh_orthogonal_to(&m, &[1.0; 3]).unwrap();
        assert_abs_diff_eq!(r.value, 3.0, epsilon = 1e-14);
        assert!(r.argmax.iter().sum::<f64>().abs() <= TAU_PROJ);
    }

    #[test]
    fn rayleigh_errors() {
        let m = SymmetricMatrix::identity(3);
        assert_eq!(
            max_rayleigh_orthogonal_to(&m, &[1.0, 1.0]),
            Err(LinalgError::DimensionMismatch { expected: 3, got: 2 })
        );
        assert_eq!(max_rayleigh_orthogonal_to(&m, &[0.0; 3]), Err(LinalgError::ZeroDirection));
        assert_eq!(
            max_rayleigh_orthogonal_to(&SymmetricMatrix::identity(1), &[1.0]),
            Err(LinalgError::TrivialComplement)
        );
    }

    #[test]
    fn rayleigh_residual_and_bracket() {
        let m = random_symmetric(12, 31);
        let e: Vec<f64> = (0..12).map(|i| 1.0 + i as f64 * 0.1).collect();
        let r = max_rayleigh_orthogonal_to(&m, &e).unwrap();
        assert!(dot(&r.argmax, &e).abs() <= TAU_PROJ * norm(&e));
        // m x - value x must be parallel to e
        let mx = m.mul_vec(&r.argmax);
        let mut resid: Vec<f64> = mx.iter().zip(&r.argmax).map(|(a, b)| a - r.value * b).collect();
        let en = norm(&e);
        let unit: Vec<f64> = e.iter().map(|x| x / en).collect();
        project_out(&mut resid, &unit);
        assert!(norm(&resid) <= 1e-10);
        let full = eigendecompose(&m).unwrap().eigenvalues;
        assert!(r.value <= full[11] + TAU_EIG);
        assert!(r.value >= full[10] - TAU_EIG);
        let v = max_rayleigh_value_orthogonal_to(&m, &e).unwrap();
        assert_abs_diff_eq!(v, r.value, epsilon = 1e-11);
    }

    #[test]
    fn rayleigh_with_top_eigenvector_excluded_gives_second() {
        // Perron vector of a constant-row-sum matrix is the all-ones vector
        let m = SymmetricMatrix::from_upper(5, |i, j| if (j + 5 - i) % 5 == 1 || (i + 5 - j) % 5 == 1 { 1.0 } else { 0.0 });
        let full = eigendecompose(&m).unwrap().eigenvalues;
        let r = max_rayleigh_orthogonal_to(&m, &[1.0; 5]).unwrap();
        assert_abs_diff_eq!(r.value, full[3], epsilon = TAU_EIG);
    }

    #[test]
    fn power_iteration_matches_dense() {
        let mut m = random_symmetric(40, 41);
        m.add_diagonal(3.0);
        let e = vec![1.0; 40];
        let dense = max_rayleigh_orthogonal_to(&m, &e).unwrap().value;
        let cfg = PowerIterationConfig { shift: m.inf_norm(), seed: 5, max_iter: Some(200_000), ..Default::default() };
        let p = power_max_orthogonal_to(&m, &e, cfg).unwrap();
        assert!(p.converged, "residual {}", p.residual);
        assert_abs_diff_eq!(p.value, dense, epsilon = 1e-8 * dense.abs());
        assert!(dot(&p.vector, &e).abs() <= 1e-10);
    }
}
