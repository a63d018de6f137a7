//! Moment-based eigenvalue bounds for signed Laplacians.
//!
//! For a connected graph on `N >= 3` vertices with edge weights `w`, write
//! `Q` for the mean weight, `P` for the mean squared weight, and `mu` for the
//! largest value of `<x, (4I + A^LG) x> / |x|^2` over edge vectors orthogonal
//! to the all-ones vector. Every eigenvalue of `L(w)` on the complement of the
//! all-ones vertex vector lies in
//!
//! ```text
//! [Q λ₂ − R, Q λ_N + R],   R = sqrt(E (P − Q²) μ (N − 2) / (N − 1)),
//! ```
//!
//! where `λ₂` and `λ_N` are the second-smallest and largest eigenvalues of the
//! unit-weight Laplacian. The lower end yields a positivity test that only
//! needs `P` and `Q`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, GraphClassification};
use crate::linalg::{
    abs_order, eigendecompose, max_rayleigh_value_orthogonal_to, symmetric_eigenvalues,
    LinalgError, Restriction, SymmetricMatrix, TAU_EIG,
};
use crate::spectral::{self, WeightError, WeightVector};

/// Absolute tolerance on the certificate inequalities.
pub const POSITIVITY_TOL: f64 = 1e-12;
/// Above this edge count the projected quotient is evaluated in vertex space.
pub const DENSE_EDGE_LIMIT: usize = 800;
/// Above this vertex count the oracle uses the tridiagonal solver instead of
/// Jacobi.
pub const JACOBI_ORACLE_LIMIT: usize = 256;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BoundsError {
    #[error("the eigenvalue sandwich needs at least 3 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("mean-zero edge space is trivial (E = {0})")]
    TrivialEdgeSpace(usize),
    #[error("closed-form mu requires a regular graph")]
    NotRegular,
    #[error("negative variance {0:e} beyond round-off")]
    NegativeVariance(f64),
    #[error("regular-graph duality check failed: closed form {closed}, projected {projected}")]
    DualityMismatch { closed: f64, projected: f64 },
    #[error(transparent)]
    Weights(#[from] WeightError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Edge-weight mean `q`, second moment `p`, and `variance = p - q^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgeMoments {
    pub q: f64,
    pub p: f64,
    pub variance: f64,
    pub edge_count: usize,
}

pub fn moments(w: &WeightVector) -> Result<EdgeMoments, BoundsError> {
    if w.is_empty() {
        return Err(WeightError::Empty.into());
    }
    let e = w.len() as f64;
    let q = w.values().iter().sum::<f64>() / e;
    let p = w.values().iter().map(|x| x * x).sum::<f64>() / e;
    let raw = p - q * q;
    let variance = if raw < 0.0 {
        if raw < -1e-12 * p.max(1.0) {
            return Err(BoundsError::NegativeVariance(raw));
        }
        0.0
    } else {
        raw
    };
    Ok(EdgeMoments { q, p, variance, edge_count: w.len() })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MuMethod {
    RegularClosedForm,
    ProjectedRayleigh,
    DmaxUpperBound,
}

/// How [`compute_mu_with`] should evaluate `mu`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MuRequest {
    /// Closed form on regular graphs (cross-checked), projected otherwise.
    #[default]
    Auto,
    Projected,
    Closed,
    Dmax,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MuEstimate {
    pub value: f64,
    pub method: MuMethod,
    /// `4 + λ_{E-1}(A^LG)`, signed ascending order.
    pub bracket_low: f64,
    /// `4 + λ_E(A^LG)`, signed ascending order.
    pub bracket_high: f64,
    /// `2 d_max + 2`.
    pub dmax_bound: f64,
    /// The same bracket read under ascending absolute-value order. Reported
    /// for comparison only.
    pub abs_order_bracket: [f64; 2],
    /// Projected-quotient value computed alongside the closed form.
    pub cross_check: Option<f64>,
}

impl MuEstimate {
    /// Whether `bracket_low <= value <= bracket_high <= dmax_bound` holds
    /// within `tol`.
    pub fn bracket_holds(&self, tol: f64) -> bool {
        self.bracket_low <= self.value + tol
            && self.value <= self.bracket_high + tol
            && self.bracket_high <= self.dmax_bound + tol
    }
}

/// Spectrum of the line-graph adjacency in ascending order, obtained from the
/// vertex-space matrix `C C^T`: `C^T C` shares its nonzero eigenvalues and
/// `A^LG = C^T C - 2I`.
pub fn line_graph_spectrum(g: &Graph) -> Result<Vec<f64>, BoundsError> {
    let e = g.edge_count();
    let n = g.vertex_count();
    let vertex = symmetric_eigenvalues(&spectral::signless_laplacian(g))?;
    // C C^T is positive semidefinite; clamp round-off below zero
    let vertex: Vec<f64> = vertex.into_iter().map(|x| x.max(0.0)).collect();
    let mut gram: Vec<f64> = if e >= n {
        std::iter::repeat_n(0.0, e - n).chain(vertex).collect()
    } else {
        vertex[n - e..].to_vec()
    };
    gram.iter_mut().for_each(|x| *x -= 2.0);
    Ok(gram)
}

/// `max_{x ⊥ 1_E} <x, (4I + A^LG) x> / |x|^2`.
///
/// Up to [`DENSE_EDGE_LIMIT`] edges this compresses the `E x E` matrix onto
/// the complement of `1_E`. Beyond that it uses the exact vertex-space form
/// `2 + λ_max(C C^T - d d^T / E)` where `d` is the degree vector.
pub fn projected_mu(g: &Graph) -> Result<f64, BoundsError> {
    let e = g.edge_count();
    if e < 2 {
        return Err(BoundsError::TrivialEdgeSpace(e));
    }
    if e <= DENSE_EDGE_LIMIT {
        Ok(max_rayleigh_value_orthogonal_to(&spectral::hs_form_matrix(g), &vec![1.0; e])?)
    } else {
        projected_mu_vertex_space(g)
    }
}

/// `2 + λ_max(C C^T - d d^T / E)`. `C^T C` compressed to `1_E^⊥` is
/// `(C P)^T (C P)` with `P` the projector, and `(C P)(C P)^T = C C^T - d d^T / E`.
pub fn projected_mu_vertex_space(g: &Graph) -> Result<f64, BoundsError> {
    let e = g.edge_count();
    if e < 2 {
        return Err(BoundsError::TrivialEdgeSpace(e));
    }
    let mut m = spectral::signless_laplacian(g);
    let d = g.degrees();
    for i in 0..m.dim() {
        for j in i..m.dim() {
            m.set(i, j, m.get(i, j) - (d[i] * d[j]) as f64 / e as f64);
        }
    }
    Ok(2.0 + symmetric_eigenvalues(&m)?.last().copied().unwrap_or(0.0))
}

/// Eigenvalues of `m` on the complement of the all-ones vector.
fn restricted_eigenvalues(m: &SymmetricMatrix, oracle: bool) -> Result<Vec<f64>, BoundsError> {
    let r = Restriction::new(m, &vec![1.0; m.dim()])?;
    Ok(if oracle && r.matrix.dim() <= JACOBI_ORACLE_LIMIT {
        eigendecompose(&r.matrix)?.eigenvalues
    } else {
        symmetric_eigenvalues(&r.matrix)?
    })
}

/// `λ₂` and `λ_N` of the unit-weight Laplacian, read from its restriction to
/// the complement of `1_N` so the kernel vector cannot be mistaken for `λ₂`.
pub fn equal_weight_extremes(g: &Graph) -> Result<(f64, f64), BoundsError> {
    if g.vertex_count() < 2 {
        return Err(BoundsError::TooFewVertices(g.vertex_count()));
    }
    let ev = restricted_eigenvalues(&spectral::equal_weight_laplacian(g), false)?;
    Ok((ev[0], ev[ev.len() - 1]))
}

pub fn compute_mu(g: &Graph) -> Result<MuEstimate, BoundsError> {
    compute_mu_with(g, MuRequest::Auto)
}

pub fn compute_mu_with(g: &Graph, request: MuRequest) -> Result<MuEstimate, BoundsError> {
    let lambda2 = match (request, g.classify().regular_degree) {
        (MuRequest::Auto | MuRequest::Closed, Some(_)) if g.vertex_count() >= 2 => {
            Some(equal_weight_extremes(g)?.0)
        }
        _ => None,
    };
    mu_from_parts(g, &g.classify(), lambda2, request)
}

fn mu_from_parts(
    g: &Graph,
    class: &GraphClassification,
    lambda2: Option<f64>,
    request: MuRequest,
) -> Result<MuEstimate, BoundsError> {
    let e = g.edge_count();
    if e < 2 {
        return Err(BoundsError::TrivialEdgeSpace(e));
    }
    let spectrum = line_graph_spectrum(g)?;
    let bracket_low = 4.0 + spectrum[e - 2];
    let bracket_high = 4.0 + spectrum[e - 1];
    let by_abs = abs_order(&spectrum);
    let abs_order_bracket = [4.0 + spectrum[by_abs[e - 2]], 4.0 + spectrum[by_abs[e - 1]]];
    let dmax_bound = 2.0 * class.max_degree as f64 + 2.0;

    let closed = |lambda2: Option<f64>| {
        let d = class.regular_degree.ok_or(BoundsError::NotRegular)?;
        let l2 = match lambda2 {
            Some(l2) => l2,
            None => equal_weight_extremes(g)?.0,
        };
        Ok::<_, BoundsError>(2.0 * d as f64 + 2.0 - l2)
    };

    let (value, method, cross_check) = match request {
        MuRequest::Dmax => (dmax_bound, MuMethod::DmaxUpperBound, None),
        MuRequest::Projected => (projected_mu(g)?, MuMethod::ProjectedRayleigh, None),
        MuRequest::Closed | MuRequest::Auto if class.regular_degree.is_some() => {
            let c = closed(lambda2)?;
            let projected = projected_mu(g)?;
            if (c - projected).abs() > TAU_EIG * c.abs().max(1.0) {
                return Err(BoundsError::DualityMismatch { closed: c, projected });
            }
            (c, MuMethod::RegularClosedForm, Some(projected))
        }
        MuRequest::Closed => return Err(BoundsError::NotRegular),
        MuRequest::Auto => (projected_mu(g)?, MuMethod::ProjectedRayleigh, None),
    };
    Ok(MuEstimate {
        value,
        method,
        bracket_low,
        bracket_high,
        dmax_bound,
        abs_order_bracket,
        cross_check,
    })
}

/// Graph-level quantities shared by every weighting of one graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphSpectra {
    pub n: usize,
    pub e: usize,
    pub classification: GraphClassification,
    pub lambda2_g: f64,
    pub lambda_n_g: f64,
    pub mu: MuEstimate,
}

impl GraphSpectra {
    pub fn compute(g: &Graph) -> Result<Self, BoundsError> {
        Self::compute_with(g, MuRequest::Auto)
    }

    pub fn compute_with(g: &Graph, request: MuRequest) -> Result<Self, BoundsError> {
        let n = g.vertex_count();
        if n < 3 {
            return Err(BoundsError::TooFewVertices(n));
        }
        let classification = g.classify();
        let (lambda2_g, lambda_n_g) = equal_weight_extremes(g)?;
        let mu = mu_from_parts(g, &classification, Some(lambda2_g), request)?;
        Ok(Self { n, e: g.edge_count(), classification, lambda2_g, lambda_n_g, mu })
    }

    /// `(λ₂)^2 / μ`.
    pub fn improvement_ratio(&self) -> f64 {
        self.lambda2_g * self.lambda2_g / self.mu.value
    }

    /// The half-width `R` for the given moments.
    pub fn radius(&self, m: &EdgeMoments) -> f64 {
        let n = self.n as f64;
        (self.e as f64 * m.variance * self.mu.value * (n - 2.0) / (n - 1.0)).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Margins {
    /// `(λ₂)^2/μ · Q^2/E − (P − Q^2)`.
    pub paper: f64,
    /// `Q^2/E − (P − Q^2)`.
    pub naive: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundsCertificate {
    pub lower: f64,
    pub upper: f64,
    pub lambda2_g: f64,
    pub lambda_n_g: f64,
    pub n: usize,
    pub mu: MuEstimate,
    pub moments: EdgeMoments,
    /// Positive definiteness on `1_N^⊥` certified from the moments and the
    /// graph spectrum.
    pub positivity_paper: bool,
    /// The variance is small enough that every weight shares the sign of a
    /// positive mean.
    pub positivity_naive: bool,
    pub margins: Margins,
    pub improvement_ratio: f64,
    /// `false` marks the certificate as non-authoritative.
    pub connected: bool,
    /// Eigenvalues of `L(w)` on `1_N^⊥`, ascending.
    pub oracle: Option<Vec<f64>>,
}

impl BoundsCertificate {
    /// `1e-8 (1 + |lower| + |upper|)`.
    pub fn tolerance(&self) -> f64 {
        1e-8 * (1.0 + self.lower.abs() + self.upper.abs())
    }

    /// Number of oracle eigenvalues outside the interval (0 without oracle).
    pub fn sandwich_violations(&self) -> usize {
        let tol = self.tolerance();
        self.oracle.as_ref().map_or(0, |ev| {
            ev.iter().filter(|&&x| x < self.lower - tol || x > self.upper + tol).count()
        })
    }

    pub fn to_document(&self) -> CertificateDocument {
        CertificateDocument {
            n: self.n,
            e: self.moments.edge_count,
            q: self.moments.q,
            p: self.moments.p,
            variance: self.moments.variance,
            lambda2_g: self.lambda2_g,
            lambda_n_g: self.lambda_n_g,
            mu: self.mu.value,
            mu_method: self.mu.method,
            lower: self.lower,
            upper: self.upper,
            positivity_paper: self.positivity_paper,
            positivity_naive: self.positivity_naive,
            improvement_ratio: self.improvement_ratio,
            connected: self.connected,
            oracle_eigenvalues: self.oracle.clone(),
            margins: self.margins,
        }
    }
}

/// The serialized certificate. Field names are a stable interface.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateDocument {
    pub n: usize,
    pub e: usize,
    pub q: f64,
    pub p: f64,
    pub variance: f64,
    pub lambda2_g: f64,
    #[serde(rename = "lambdaN_g")]
    pub lambda_n_g: f64,
    pub mu: f64,
    pub mu_method: MuMethod,
    pub lower: f64,
    pub upper: f64,
    pub positivity_paper: bool,
    pub positivity_naive: bool,
    pub improvement_ratio: f64,
    pub connected: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub oracle_eigenvalues: Option<Vec<f64>>,
    pub margins: Margins,
}

/// Certificate for one weighting of a graph whose spectra are already known.
pub fn certify(
    spectra: &GraphSpectra,
    g: &Graph,
    w: &WeightVector,
    with_oracle: bool,
) -> Result<BoundsCertificate, BoundsError> {
    let m = moments(w)?;
    if m.edge_count != spectra.e {
        return Err(WeightError::Length { expected: spectra.e, got: m.edge_count }.into());
    }
    let r = spectra.radius(&m);
    let ratio = spectra.improvement_ratio();
    let e = m.edge_count as f64;
    let q2_over_e = m.q * m.q / e;
    let margins = Margins { paper: ratio * q2_over_e - m.variance, naive: q2_over_e - m.variance };
    let connected = spectra.classification.connected;
    let oracle = if with_oracle {
        Some(restricted_eigenvalues(&spectral::laplacian(g, w)?, true)?)
    } else {
        None
    };
    // Q L(1) has extremes Q λ₂ and Q λ_N on 1^⊥, in that order only for Q >= 0.
    let (a, b) = (m.q * spectra.lambda2_g, m.q * spectra.lambda_n_g);
    Ok(BoundsCertificate {
        lower: a.min(b) - r,
        upper: a.max(b) + r,
        lambda2_g: spectra.lambda2_g,
        lambda_n_g: spectra.lambda_n_g,
        n: spectra.n,
        mu: spectra.mu.clone(),
        moments: m,
        positivity_paper: connected && m.q > 0.0 && margins.paper > POSITIVITY_TOL,
        positivity_naive: m.q > 0.0 && margins.naive > POSITIVITY_TOL,
        margins,
        improvement_ratio: ratio,
        connected,
        oracle,
    })
}

/// Computes the graph spectra and the certificate in one call.
pub fn theorem_bounds(
    g: &Graph,
    w: &WeightVector,
    with_oracle: bool,
) -> Result<BoundsCertificate, BoundsError> {
    let spectra = GraphSpectra::compute(g)?;
    certify(&spectra, g, w, with_oracle)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lower: f64,
    pub upper: f64,
}

impl Interval {
    pub fn half_width(&self) -> f64 {
        0.5 * (self.upper - self.lower)
    }

    pub fn contains(&self, other: &Interval) -> bool {
        self.lower <= other.lower && other.upper <= self.upper
    }
}

/// `N (Q ± sqrt((N − 2)/2) sqrt(P − Q²))`: the sandwich specialized to `K_N`.
pub fn complete_graph_bounds(n: usize, m: &EdgeMoments) -> Result<Interval, BoundsError> {
    if n < 3 {
        return Err(BoundsError::TooFewVertices(n));
    }
    let nf = n as f64;
    let r = ((nf - 2.0) / 2.0).sqrt() * m.variance.sqrt();
    Ok(Interval { lower: nf * (m.q - r), upper: nf * (m.q + r) })
}

/// `N (Q ± sqrt(N − 1) sqrt(P − Q²))`, the cruder complete-graph estimate
/// obtained from the Hilbert–Schmidt norm alone.
pub fn rough_bounds(n: usize, m: &EdgeMoments) -> Result<Interval, BoundsError> {
    if n < 3 {
        return Err(BoundsError::TooFewVertices(n));
    }
    let nf = n as f64;
    let r = (nf - 1.0).sqrt() * m.variance.sqrt();
    Ok(Interval { lower: nf * (m.q - r), upper: nf * (m.q + r) })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ImprovementRatio {
    pub value: f64,
    /// `false` when the graph is disconnected; the value is then 0.
    pub connected: bool,
}

pub fn improvement_ratio(g: &Graph) -> Result<ImprovementRatio, BoundsError> {
    let spectra = GraphSpectra::compute(g)?;
    if !spectra.classification.connected {
        return Ok(ImprovementRatio { value: 0.0, connected: false });
    }
    Ok(ImprovementRatio { value: spectra.improvement_ratio(), connected: true })
}

/// Largest absolute eigenvalue a trace-zero symmetric matrix with a known
/// kernel vector can have for a given Frobenius norm.
pub fn trace_zero_extreme(n: usize, frobenius_norm: f64) -> f64 {
    let nf = n as f64;
    ((nf - 2.0) / (nf - 1.0)).sqrt() * frobenius_norm
}
