//! Seeded random graphs, weight models, and Monte Carlo experiments.
//!
//! Every generator and experiment is a pure function of its parameters and a
//! `u64` seed. Per-trial seeds are derived from the master seed with
//! [`trial_seed`], so trials can run in parallel and each one can be replayed
//! on its own.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StudentT};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bounds::{self, BoundsError, CertificateDocument, GraphSpectra};
use crate::graph::{self, Graph, GraphError};
use crate::linalg::{self, deflate_all_ones_basis, Restriction};
use crate::spectral::{self, WeightVector};

/// Restart cap for the random regular sampler.
pub const REGULAR_RESTART_CAP: usize = 1000;
/// Slack added below the `d - 2 sqrt(d - 1)` floor in the regular-graph check.
pub const REGULAR_FLOOR_SLACK: f64 = 0.25;
/// Commonly quoted `λ_N` of the unit-weight cycle Laplacian; the
/// computed value is 4 for even `n`.
pub const CYCLE_STATED_LAMBDA_MAX: f64 = 2.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EnsembleError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("n * d = {n} * {d} is odd; no {d}-regular graph exists")]
    OddDegreeSum { n: usize, d: usize },
    #[error("no simple {d}-regular graph on {n} vertices after {restarts} restarts")]
    RestartCapExceeded { n: usize, d: usize, restarts: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Bounds(#[from] BoundsError),
}

fn invalid(msg: impl Into<String>) -> EnsembleError {
    EnsembleError::InvalidParams(msg.into())
}

/// SplitMix64 finalizer applied to `master + (index + 1) * golden`.
pub fn trial_seed(master: u64, index: u64) -> u64 {
    let mut z = master.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "regime", rename_all = "snake_case")]
pub enum ErRegime {
    /// `p = p0 ln(n) / n` with `p0 > 1`.
    Critical { p0: f64 },
    /// Fixed `p` in `[0, 1]`.
    Supercritical { p: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErParams {
    pub n: usize,
    #[serde(flatten)]
    pub regime: ErRegime,
}

impl ErParams {
    pub fn critical(n: usize, p0: f64) -> Self {
        Self { n, regime: ErRegime::Critical { p0 } }
    }

    pub fn supercritical(n: usize, p: f64) -> Self {
        Self { n, regime: ErRegime::Supercritical { p } }
    }

    pub fn derived_p(&self) -> f64 {
        match self.regime {
            ErRegime::Critical { p0 } => p0 * (self.n as f64).ln() / self.n as f64,
            ErRegime::Supercritical { p } => p,
        }
    }

    pub fn validate(&self) -> Result<(), EnsembleError> {
        if self.n == 0 {
            return Err(invalid("n must be positive"));
        }
        match self.regime {
            ErRegime::Critical { p0 } if p0.is_nan() || p0 <= 1.0 => {
                return Err(invalid(format!("critical regime needs p0 > 1, got {p0}")))
            }
            ErRegime::Supercritical { p } if !(0.0..=1.0).contains(&p) => {
                return Err(invalid(format!("edge probability must lie in [0, 1], got {p}")))
            }
            _ => {}
        }
        let p = self.derived_p();
        if !(0.0..=1.0).contains(&p) {
            return Err(invalid(format!("derived edge probability {p} outside [0, 1]")));
        }
        Ok(())
    }
}

/// Erdős–Rényi `G(n, p)`: each pair present independently.
pub fn gen_er(params: &ErParams, seed: u64) -> Result<Graph, EnsembleError> {
    params.validate()?;
    let (n, p) = (params.n, params.derived_p());
    let mut rng = rng_for(seed);
    let mut pairs = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.random::<f64>() < p {
                pairs.push((u, v));
            }
        }
    }
    Ok(Graph::new(n, &pairs)?)
}

/// Random simple `d`-regular graph from the pairing model.
///
/// Each attempt shuffles the `n d` half-edge stubs and pairs them off,
/// keeping the pairs that create neither a loop nor a repeated edge; the
/// leftover stubs are reshuffled and paired again while some admissible pair
/// remains. An attempt that strands stubs is discarded and the sampler
/// restarts, up to [`REGULAR_RESTART_CAP`] times.
pub fn gen_regular(n: usize, d: usize, seed: u64) -> Result<Graph, EnsembleError> {
    if (n * d) % 2 == 1 {
        return Err(EnsembleError::OddDegreeSum { n, d });
    }
    if d < 3 || d >= n {
        return Err(invalid(format!("need 3 <= d < n, got d = {d}, n = {n}")));
    }
    let mut rng = rng_for(seed);
    for _ in 0..REGULAR_RESTART_CAP {
        if let Some(pairs) = try_pairing(n, d, &mut rng) {
            return Ok(Graph::new(n, &pairs)?);
        }
    }
    Err(EnsembleError::RestartCapExceeded { n, d, restarts: REGULAR_RESTART_CAP })
}

fn try_pairing(n: usize, d: usize, rng: &mut ChaCha8Rng) -> Option<Vec<(usize, usize)>> {
    let mut edges = std::collections::HashSet::with_capacity(n * d / 2);
    let mut stubs: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat_n(v, d)).collect();
    while !stubs.is_empty() {
        stubs.shuffle(rng);
        let mut leftover = Vec::new();
        for pair in stubs.chunks_exact(2) {
            let (u, v) = (pair[0].min(pair[1]), pair[0].max(pair[1]));
            if u != v && edges.insert((u, v)) {
                continue;
            }
            leftover.extend_from_slice(pair);
        }
        if leftover.len() == stubs.len() && !admissible_pair_exists(&leftover, &edges) {
            return None;
        }
        stubs = leftover;
    }
    let mut pairs: Vec<_> = edges.into_iter().collect();
    pairs.sort_unstable();
    Some(pairs)
}

fn admissible_pair_exists(
    stubs: &[usize],
    edges: &std::collections::HashSet<(usize, usize)>,
) -> bool {
    stubs.iter().enumerate().any(|(i, &a)| {
        stubs[i + 1..].iter().any(|&b| a != b && !edges.contains(&(a.min(b), a.max(b))))
    })
}

/// Edge-weight distributions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum WeightModel {
    Constant { c: f64 },
    Gaussian { mean: f64, sd: f64 },
    Uniform { lo: f64, hi: f64 },
    /// `+magnitude` with probability `p_plus`, else `-magnitude`.
    SignedBernoulli { p_plus: f64, magnitude: f64 },
    /// `mean + scale * T` with `T` Student-t on `dof` degrees of freedom.
    StudentT { mean: f64, scale: f64, dof: f64 },
}

impl WeightModel {
    pub fn validate(&self) -> Result<(), EnsembleError> {
        let ok = match *self {
            Self::Constant { c } => c.is_finite(),
            Self::Gaussian { mean, sd } => mean.is_finite() && sd.is_finite() && sd >= 0.0,
            Self::Uniform { lo, hi } => lo.is_finite() && hi.is_finite() && lo < hi,
            Self::SignedBernoulli { p_plus, magnitude } => {
                (0.0..=1.0).contains(&p_plus) && magnitude.is_finite()
            }
            Self::StudentT { mean, scale, dof } => {
                mean.is_finite() && scale.is_finite() && scale >= 0.0 && dof > 0.0
            }
        };
        if ok {
            Ok(())
        } else {
            Err(invalid(format!("invalid weight model {self}")))
        }
    }
}

impl fmt::Display for WeightModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Constant { c } => write!(f, "constant:{c}"),
            Self::Gaussian { mean, sd } => write!(f, "gaussian:{mean},{sd}"),
            Self::Uniform { lo, hi } => write!(f, "uniform:{lo},{hi}"),
            Self::SignedBernoulli { p_plus, magnitude } => {
                write!(f, "bernoulli:{p_plus},{magnitude}")
            }
            Self::StudentT { mean, scale, dof } => write!(f, "student:{mean},{scale},{dof}"),
        }
    }
}

/// Parses `name:arg,arg,...`, the same form [`Display`](fmt::Display)
/// produces.
impl FromStr for WeightModel {
    type Err = EnsembleError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (name, args) = s.split_once(':').unwrap_or((s, ""));
        let args: Vec<f64> = if args.is_empty() {
            Vec::new()
        } else {
            args.split(',')
                .map(|a| a.trim().parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|_| invalid(format!("bad numbers in weight model {s:?}")))?
        };
        let model = match (name, args.as_slice()) {
            ("constant", [c]) => Self::Constant { c: *c },
            ("gaussian", [mean, sd]) => Self::Gaussian { mean: *mean, sd: *sd },
            ("uniform", [lo, hi]) => Self::Uniform { lo: *lo, hi: *hi },
            ("bernoulli", [p_plus, magnitude]) => {
                Self::SignedBernoulli { p_plus: *p_plus, magnitude: *magnitude }
            }
            ("student", [mean, scale, dof]) => Self::StudentT { mean: *mean, scale: *scale, dof: *dof },
            _ => return Err(invalid(format!("unknown weight model {s:?}"))),
        };
        model.validate()?;
        Ok(model)
    }
}

pub fn gen_weights(e: usize, model: &WeightModel, seed: u64) -> Result<WeightVector, EnsembleError> {
    if e == 0 {
        return Err(invalid("weight vector needs at least one edge"));
    }
    model.validate()?;
    let mut rng = rng_for(seed);
    let values: Vec<f64> = match *model {
        WeightModel::Constant { c } => vec![c; e],
        WeightModel::Gaussian { mean, sd } => {
            let dist = Normal::new(mean, sd).map_err(|err| invalid(err.to_string()))?;
            (0..e).map(|_| dist.sample(&mut rng)).collect()
        }
        WeightModel::Uniform { lo, hi } => (0..e).map(|_| rng.random_range(lo..hi)).collect(),
        WeightModel::SignedBernoulli { p_plus, magnitude } => (0..e)
            .map(|_| if rng.random::<f64>() < p_plus { magnitude } else { -magnitude })
            .collect(),
        WeightModel::StudentT { mean, scale, dof } => {
            let dist = StudentT::new(dof).map_err(|err| invalid(err.to_string()))?;
            (0..e).map(|_| mean + scale * dist.sample(&mut rng)).collect()
        }
    };
    WeightVector::from_values(values).map_err(|err| invalid(err.to_string()))
}

/// The constant `a` in `(0, 1)` solving `p0 - 1 = a p0 (1 - ln a)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AConstant {
    pub p0: f64,
    pub a: f64,
    pub residual: f64,
}

/// Bisection on `f(a) = a (1 - ln a) - (p0 - 1) / p0`, which increases on
/// `(0, 1)` from `-(p0 - 1)/p0` to `1/p0`.
pub fn solve_a(p0: f64) -> Result<AConstant, EnsembleError> {
    if !p0.is_finite() || p0 <= 1.0 {
        return Err(invalid(format!("a(p0) needs p0 > 1, got {p0}")));
    }
    let target = (p0 - 1.0) / p0;
    let f = |a: f64| a * (1.0 - a.ln()) - target;
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let a = if lo == 0.0 { hi } else { 0.5 * (lo + hi) };
    let residual = (p0 - 1.0 - a * p0 * (1.0 - a.ln())).abs();
    Ok(AConstant { p0, a, residual })
}

/// Union-bound exponent for the maximum-degree tail of critical G(n, p).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DegreeTail {
    pub p0: f64,
    pub c: f64,
    /// `2 - p0 - c p0 ln c + c p0`.
    pub beta: f64,
    pub beta_negative: bool,
}

impl DegreeTail {
    /// `c p0 ln n`.
    pub fn k_threshold(&self, n: usize) -> f64 {
        self.c * self.p0 * (n as f64).ln()
    }
}

pub fn degree_tail_params(p0: f64, c: f64) -> DegreeTail {
    let beta = 2.0 - p0 - c * p0 * c.ln() + c * p0;
    DegreeTail { p0, c, beta, beta_negative: beta < 0.0 }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegreeTailReport {
    pub n: usize,
    pub trials: usize,
    pub threshold: f64,
    pub fraction_within: f64,
    pub worst_max_degree: usize,
    pub tail: DegreeTail,
}

pub fn run_degree_tail_experiment(
    n: usize,
    p0: f64,
    c: f64,
    trials: usize,
    seed: u64,
) -> Result<DegreeTailReport, EnsembleError> {
    let params = ErParams::critical(n, p0);
    params.validate()?;
    if trials == 0 {
        return Err(invalid("trials must be positive"));
    }
    let tail = degree_tail_params(p0, c);
    let threshold = tail.k_threshold(n);
    let maxima: Vec<usize> = (0..trials as u64)
        .into_par_iter()
        .map(|t| gen_er(&params, trial_seed(seed, t)).map(|g| g.max_degree()))
        .collect::<Result<_, _>>()?;
    let within = maxima.iter().filter(|&&m| m as f64 <= threshold).count();
    Ok(DegreeTailReport {
        n,
        trials,
        threshold,
        fraction_within: within as f64 / trials as f64,
        worst_max_degree: maxima.into_iter().max().unwrap_or(0),
        tail,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LadderRow {
    pub n: usize,
    pub p: f64,
    pub median_abs_dev: f64,
    pub trials_used: usize,
    pub disconnected: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationReport {
    pub regime: ErRegime,
    /// `a(p0)` in the critical regime, `1` in the supercritical one.
    pub target: f64,
    pub rows: Vec<LadderRow>,
}

impl ConcentrationReport {
    pub fn strictly_decreasing(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].median_abs_dev < w[0].median_abs_dev)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,p,median_abs_dev,trials_used,disconnected\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{:?},{:?},{},{}\n",
                r.n, r.p, r.median_abs_dev, r.trials_used, r.disconnected
            ));
        }
        out
    }
}

pub fn median(values: &mut [f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    values.sort_by(f64::total_cmp);
    let m = values.len() / 2;
    if values.len() % 2 == 1 {
        values[m]
    } else {
        0.5 * (values[m - 1] + values[m])
    }
}

/// Median of `|λ₂ / (n p) − target|` over connected samples, for each `n` in
/// the ladder.
pub fn run_lambda2_concentration(
    regime: ErRegime,
    ladder: &[usize],
    trials: usize,
    seed: u64,
) -> Result<ConcentrationReport, EnsembleError> {
    if trials < 30 {
        return Err(invalid(format!("concentration needs at least 30 trials, got {trials}")));
    }
    let target = match regime {
        ErRegime::Critical { p0 } => solve_a(p0)?.a,
        ErRegime::Supercritical { .. } => 1.0,
    };
    let mut rows = Vec::with_capacity(ladder.len());
    for (rung, &n) in ladder.iter().enumerate() {
        let params = ErParams { n, regime };
        params.validate()?;
        let p = params.derived_p();
        let rung_seed = trial_seed(seed, rung as u64);
        let samples: Vec<Option<f64>> = (0..trials as u64)
            .into_par_iter()
            .map(|t| {
                let g = gen_er(&params, trial_seed(rung_seed, t))?;
                if !g.is_connected() {
                    return Ok(None);
                }
                let (l2, _) = bounds::equal_weight_extremes(&g)?;
                Ok(Some((l2 / (n as f64 * p) - target).abs()))
            })
            .collect::<Result<_, EnsembleError>>()?;
        let mut devs: Vec<f64> = samples.iter().flatten().copied().collect();
        rows.push(LadderRow {
            n,
            p,
            median_abs_dev: median(&mut devs),
            trials_used: devs.len(),
            disconnected: trials - devs.len(),
        });
    }
    Ok(ConcentrationReport { regime, target, rows })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TightnessReport {
    pub n: usize,
    pub q: f64,
    pub p_target: f64,
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub best_lower_eigenvalue: f64,
    pub best_upper_eigenvalue: f64,
    /// `(achieved − lower_bound) / R`.
    pub best_gap_lower: f64,
    /// `(upper_bound − achieved) / R`.
    pub best_gap_upper: f64,
    pub best_weights: WeightVector,
    pub iterations_used: usize,
}

const TIGHTNESS_RESTARTS: usize = 20;
const TIGHTNESS_STEP0: f64 = 0.5;
const TIGHTNESS_STEP_FLOOR: f64 = 1e-10;

struct SphereSearch<'a> {
    graph: &'a Graph,
    basis: Vec<Vec<f64>>,
    q: f64,
    radius: f64,
}

impl SphereSearch<'_> {
    fn weights(&self, coeffs: &[f64]) -> WeightVector {
        let cn = linalg::norm(coeffs);
        let mut w = vec![self.q; self.graph.edge_count()];
        for (c, b) in coeffs.iter().zip(&self.basis) {
            let s = self.radius * c / cn;
            for (wi, bi) in w.iter_mut().zip(b) {
                *wi += s * bi;
            }
        }
        WeightVector::from_values(w).expect("finite weights")
    }

    /// Extreme eigenvalue of `L(w)` on `1^⊥` (min when `lower`, else max).
    fn extreme(&self, coeffs: &[f64], lower: bool) -> f64 {
        let l = spectral::laplacian(self.graph, &self.weights(coeffs)).expect("aligned");
        let r = Restriction::new(&l, &vec![1.0; l.dim()]).expect("n >= 3");
        let ev = linalg::eigendecompose(&r.matrix).expect("small dense solve").eigenvalues;
        if lower {
            ev[0]
        } else {
            ev[ev.len() - 1]
        }
    }

    /// Multistart coordinate search. Returns (best objective in the natural
    /// sign, best coefficients, passes used). Each pass tries `±step` on every
    /// coordinate; the step halves after a pass without improvement.
    fn run(&self, lower: bool, budget: usize, rng: &mut ChaCha8Rng) -> (f64, Vec<f64>, usize) {
        let dim = self.basis.len();
        let sign = if lower { 1.0 } else { -1.0 };
        let normal = Normal::new(0.0, 1.0).expect("unit normal");
        let mut best: Option<(f64, Vec<f64>)> = None;
        let mut used = 0;
        for _ in 0..TIGHTNESS_RESTARTS {
            if used >= budget {
                break;
            }
            let mut c: Vec<f64> = (0..dim).map(|_| normal.sample(rng)).collect();
            let mut f = sign * self.extreme(&c, lower);
            used += 1;
            let mut step = TIGHTNESS_STEP0;
            while step >= TIGHTNESS_STEP_FLOOR && used < budget {
                used += 1;
                let mut improved = false;
                for k in 0..dim {
                    for dir in [1.0, -1.0] {
                        let mut trial = c.clone();
                        trial[k] += dir * step * linalg::norm(&c);
                        let ft = sign * self.extreme(&trial, lower);
                        if ft < f {
                            f = ft;
                            let tn = linalg::norm(&trial);
                            c = trial.into_iter().map(|x| x / tn).collect();
                            improved = true;
                            break;
                        }
                    }
                }
                if !improved {
                    step *= 0.5;
                }
            }
            if best.as_ref().is_none_or(|(bf, _)| f < *bf) {
                best = Some((f, c));
            }
        }
        let (f, c) = best.expect("at least one restart");
        (sign * f, c, used)
    }
}

/// Searches mean-zero weight fluctuations of fixed norm on `K_n` for the
/// extreme eigenvalues of `L(w)` and reports how close they come to the
/// moment bounds. `iterations` caps the number of search passes per side.
pub fn tightness_search(
    n: usize,
    q: f64,
    p_target: f64,
    iterations: usize,
    seed: u64,
) -> Result<TightnessReport, EnsembleError> {
    if n < 3 {
        return Err(invalid(format!("tightness search needs n >= 3, got {n}")));
    }
    let variance = p_target - q * q;
    if !q.is_finite() || !p_target.is_finite() || variance < -1e-12 * p_target.abs().max(1.0) {
        return Err(invalid(format!("moments need P >= Q^2, got Q = {q}, P = {p_target}")));
    }
    if iterations == 0 {
        return Err(invalid("iterations must be positive"));
    }
    let variance = variance.max(0.0);
    let g = graph::complete_graph(n)?;
    let e = g.edge_count();
    let spectra = GraphSpectra::compute(&g)?;
    let m = bounds::EdgeMoments { q, p: p_target, variance, edge_count: e };
    let r = spectra.radius(&m);
    let lower_bound = q * spectra.lambda2_g - r;
    let upper_bound = q * spectra.lambda_n_g + r;
    let search = SphereSearch {
        graph: &g,
        basis: deflate_all_ones_basis(e).map_err(BoundsError::from)?,
        q,
        radius: (e as f64 * variance).sqrt(),
    };
    let mut rng = rng_for(seed);
    let (lo, lo_c, used_lo) = search.run(true, iterations, &mut rng);
    let (hi, _, used_hi) = search.run(false, iterations, &mut rng);
    let (gap_lo, gap_hi) = if r > 0.0 {
        ((lo - lower_bound) / r, (upper_bound - hi) / r)
    } else {
        (0.0, 0.0)
    };
    Ok(TightnessReport {
        n,
        q,
        p_target,
        lower_bound,
        upper_bound,
        best_lower_eigenvalue: lo,
        best_upper_eigenvalue: hi,
        best_gap_lower: gap_lo,
        best_gap_upper: gap_hi,
        best_weights: search.weights(&lo_c),
        iterations_used: used_lo.max(used_hi),
    })
}

/// Graph families for [`run_family_experiment`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    Complete { n: usize },
    Cycle { n: usize },
    ErCritical { n: usize, p0: f64 },
    ErSupercritical { n: usize, p: f64 },
    RandomRegular { n: usize, d: usize },
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Complete { .. } => "complete",
            Self::Cycle { .. } => "cycle",
            Self::ErCritical { .. } => "er_critical",
            Self::ErSupercritical { .. } => "er_supercritical",
            Self::RandomRegular { .. } => "random_regular",
        }
    }

    /// Whether every trial sees the same graph.
    pub fn is_deterministic(&self) -> bool {
        matches!(self, Self::Complete { .. } | Self::Cycle { .. })
    }

    pub fn generate(&self, seed: u64) -> Result<Graph, EnsembleError> {
        match *self {
            Self::Complete { n } => Ok(graph::complete_graph(n)?),
            Self::Cycle { n } => Ok(graph::cycle_graph(n)?),
            Self::ErCritical { n, p0 } => gen_er(&ErParams::critical(n, p0), seed),
            Self::ErSupercritical { n, p } => gen_er(&ErParams::supercritical(n, p), seed),
            Self::RandomRegular { n, d } => gen_regular(n, d, seed),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphStats {
    pub n: usize,
    pub e: usize,
    pub max_degree: usize,
    pub connected: bool,
    pub regular_degree: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralStats {
    pub lambda2_g: f64,
    #[serde(rename = "lambdaN_g")]
    pub lambda_n_g: f64,
    pub mu: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub seed: u64,
    pub graph_stats: GraphStats,
    pub spectral: Option<SpectralStats>,
    pub certificate: Option<CertificateDocument>,
    pub weight_model: String,
    pub sandwich_violations: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioStats {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
}

/// Computed versus stated top eigenvalue of the unit-weight cycle Laplacian.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CycleLambdaMaxNote {
    pub computed: f64,
    pub stated: f64,
    pub diverges: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSummary {
    pub family: Family,
    pub weight_model: WeightModel,
    pub trials: usize,
    pub seed: u64,
    pub certified_trials: usize,
    pub sandwich_violations: usize,
    pub disconnected: usize,
    pub errors: usize,
    pub improvement_ratio: Option<RatioStats>,
    pub positivity_paper_count: usize,
    pub positivity_naive_count: usize,
    /// False positives of either certificate against the oracle.
    pub certificate_false_positives: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub a_p0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub cycle_lambda_max: Option<CycleLambdaMaxNote>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub records: Vec<TrialRecord>,
    pub summary: ExperimentSummary,
}

impl ExperimentReport {
    /// One JSON object per line, in trial order.
    pub fn to_jsonl(&self) -> String {
        self.records
            .iter()
            .map(|r| serde_json::to_string(r).expect("records serialize") + "\n")
            .collect()
    }
}

fn false_positive(cert: &bounds::BoundsCertificate, w: &WeightVector) -> bool {
    let oracle_min = cert.oracle.as_ref().and_then(|o| o.first().copied());
    let spectral_fp = cert.positivity_paper && oracle_min.is_some_and(|m| m <= 0.0);
    let naive_fp = cert.positivity_naive && w.values().iter().any(|&x| x <= 0.0);
    spectral_fp || naive_fp
}

fn run_trial(
    family: &Family,
    model: &WeightModel,
    trial: usize,
    seed: u64,
    shared: Option<&(Graph, GraphSpectra)>,
) -> (TrialRecord, bool) {
    let owned;
    let (g, spectra) = match shared {
        Some((g, s)) => (g, Ok(s)),
        None => {
            owned = family.generate(trial_seed(seed, 0)).map(|g| {
                let s = GraphSpectra::compute(&g);
                (g, s)
            });
            match &owned {
                Ok((g, s)) => (g, s.as_ref().map_err(|e| e.clone())),
                Err(err) => {
                    let record = TrialRecord {
                        trial,
                        seed,
                        graph_stats: GraphStats { n: 0, e: 0, max_degree: 0, connected: false, regular_degree: None },
                        spectral: None,
                        certificate: None,
                        weight_model: model.to_string(),
                        sandwich_violations: 0,
                        error: Some(err.to_string()),
                    };
                    return (record, false);
                }
            }
        }
    };
    let class = g.classify();
    let graph_stats = GraphStats {
        n: g.vertex_count(),
        e: g.edge_count(),
        max_degree: class.max_degree,
        connected: class.connected,
        regular_degree: class.regular_degree,
    };
    let mut record = TrialRecord {
        trial,
        seed,
        graph_stats,
        spectral: None,
        certificate: None,
        weight_model: model.to_string(),
        sandwich_violations: 0,
        error: None,
    };
    let spectra = match spectra {
        Ok(s) => s,
        Err(err) => {
            record.error = Some(err.to_string());
            return (record, false);
        }
    };
    record.spectral = Some(SpectralStats {
        lambda2_g: spectra.lambda2_g,
        lambda_n_g: spectra.lambda_n_g,
        mu: spectra.mu.value,
    });
    let outcome = gen_weights(g.edge_count(), model, trial_seed(seed, 1))
        .and_then(|w| Ok((bounds::certify(spectra, g, &w, true)?, w)));
    match outcome {
        Ok((cert, w)) => {
            record.sandwich_violations = cert.sandwich_violations();
            let fp = false_positive(&cert, &w);
            record.certificate = Some(cert.to_document());
            (record, fp)
        }
        Err(err) => {
            record.error = Some(err.to_string());
            (record, false)
        }
    }
}

/// Generates a graph and weights per trial and certifies each pair against
/// the dense oracle.
pub fn run_family_experiment(
    family: Family,
    model: WeightModel,
    trials: usize,
    seed: u64,
) -> Result<ExperimentReport, EnsembleError> {
    model.validate()?;
    if trials == 0 {
        return Err(invalid("trials must be positive"));
    }
    match family {
        Family::ErCritical { n, p0 } => ErParams::critical(n, p0).validate()?,
        Family::ErSupercritical { n, p } => ErParams::supercritical(n, p).validate()?,
        Family::RandomRegular { n, d } => {
            if (n * d) % 2 == 1 {
                return Err(EnsembleError::OddDegreeSum { n, d });
            }
            if d < 3 || d >= n {
                return Err(invalid(format!("need 3 <= d < n, got d = {d}, n = {n}")));
            }
        }
        Family::Complete { n } | Family::Cycle { n } if n < 3 => {
            return Err(invalid(format!("{} needs n >= 3", family.name())))
        }
        _ => {}
    }
    let shared = if family.is_deterministic() {
        let g = family.generate(0)?;
        let s = GraphSpectra::compute(&g)?;
        Some((g, s))
    } else {
        None
    };
    let results: Vec<(TrialRecord, bool)> = (0..trials)
        .into_par_iter()
        .map(|t| run_trial(&family, &model, t, trial_seed(seed, t as u64), shared.as_ref()))
        .collect();

    let ratios: Vec<f64> = results
        .iter()
        .filter_map(|(r, _)| r.certificate.as_ref())
        .map(|c| c.improvement_ratio)
        .collect();
    let improvement_ratio = (!ratios.is_empty()).then(|| RatioStats {
        min: ratios.iter().copied().fold(f64::INFINITY, f64::min),
        max: ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        mean: ratios.iter().sum::<f64>() / ratios.len() as f64,
    });
    let certs = || results.iter().filter_map(|(r, _)| r.certificate.as_ref());
    let cycle_lambda_max = match (&family, &shared) {
        (Family::Cycle { .. }, Some((_, s))) => Some(CycleLambdaMaxNote {
            computed: s.lambda_n_g,
            stated: CYCLE_STATED_LAMBDA_MAX,
            diverges: (s.lambda_n_g - CYCLE_STATED_LAMBDA_MAX).abs() > 1e-9,
        }),
        _ => None,
    };
    let a_p0 = match family {
        Family::ErCritical { p0, .. } => Some(solve_a(p0)?.a),
        _ => None,
    };
    let summary = ExperimentSummary {
        family,
        weight_model: model,
        trials,
        seed,
        certified_trials: certs().count(),
        sandwich_violations: results.iter().map(|(r, _)| r.sandwich_violations).sum(),
        disconnected: results.iter().filter(|(r, _)| !r.graph_stats.connected).count(),
        errors: results.iter().filter(|(r, _)| r.error.is_some()).count(),
        improvement_ratio,
        positivity_paper_count: certs().filter(|c| c.positivity_paper).count(),
        positivity_naive_count: certs().filter(|c| c.positivity_naive).count(),
        certificate_false_positives: results.iter().filter(|(_, fp)| *fp).count(),
        a_p0,
        cycle_lambda_max,
    };
    Ok(ExperimentReport { records: results.into_iter().map(|(r, _)| r).collect(), summary })
}

/// Fraction of `d`-regular samples whose `λ₂` clears
/// `d − 2 sqrt(d − 1) − REGULAR_FLOOR_SLACK`, with the per-trial improvement ratios.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegularFloorReport {
    pub n: usize,
    pub d: usize,
    pub floor: f64,
    pub fraction_above: f64,
    pub improvement_ratios: Vec<f64>,
}

pub fn run_regular_floor(n: usize, d: usize, trials: usize, seed: u64) -> Result<RegularFloorReport, EnsembleError> {
    if trials == 0 {
        return Err(invalid("trials must be positive"));
    }
    let floor = d as f64 - 2.0 * ((d - 1) as f64).sqrt() - REGULAR_FLOOR_SLACK;
    let rows: Vec<(f64, f64)> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let g = gen_regular(n, d, trial_seed(seed, t))?;
            let s = GraphSpectra::compute(&g)?;
            Ok((s.lambda2_g, s.improvement_ratio()))
        })
        .collect::<Result<_, EnsembleError>>()?;
    let above = rows.iter().filter(|(l2, _)| *l2 >= floor).count();
    Ok(RegularFloorReport {
        n,
        d,
        floor,
        fraction_above: above as f64 / trials as f64,
        improvement_ratios: rows.into_iter().map(|(_, r)| r).collect(),
    })
}
