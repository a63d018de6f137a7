//! Invariant suites over a seeded fuzz corpus of small graphs.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{self, GraphSpectra, MuMethod};
use crate::ensembles::{self, gen_weights, trial_seed, ErParams, WeightModel};
use crate::graph::{self, Graph};
use crate::linalg;
use crate::spectral::{self, IntMatrix, WeightVector};

pub const CORPUS_MIN_N: usize = 3;
pub const CORPUS_MAX_N: usize = 40;
/// Graphs in the identity and duality suites.
pub const DEFAULT_CORPUS_SIZE: usize = 200;
/// Graphs in the sandwich suite; each carries [`WEIGHTS_PER_MODEL`] draws
/// from every model in [`fuzz_weight_models`].
pub const SANDWICH_CORPUS_SIZE: usize = 250;
pub const WEIGHTS_PER_MODEL: usize = 5;
/// Relative tolerance for floating identities.
pub const IDENTITY_TOL: f64 = 1e-10;
pub const DUALITY_TOL: f64 = 1e-8;
pub const BRACKET_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct CorpusGraph {
    pub label: String,
    pub graph: Graph,
}

/// Seeded mix of complete graphs, cycles, paths, stars, G(n, p) samples and
/// random 3- or 4-regular graphs with `3 <= n <= 40` and at least two edges.
pub fn standard_corpus(seed: u64, count: usize) -> Vec<CorpusGraph> {
    (0..count)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(seed, i as u64));
            loop {
                if let Some(entry) = corpus_entry(i % 6, &mut rng) {
                    if entry.graph.edge_count() >= 2 {
                        return entry;
                    }
                }
            }
        })
        .collect()
}

fn corpus_entry(kind: usize, rng: &mut ChaCha8Rng) -> Option<CorpusGraph> {
    let n = rng.random_range(CORPUS_MIN_N..=CORPUS_MAX_N);
    let (label, graph) = match kind {
        0 => {
            let n = rng.random_range(3..=20);
            (format!("K{n}"), graph::complete_graph(n).ok()?)
        }
        1 => (format!("C{n}"), graph::cycle_graph(n).ok()?),
        2 => (format!("P{n}"), graph::path_graph(n).ok()?),
        3 => (format!("S{n}"), graph::star_graph(n).ok()?),
        4 => {
            let p = rng.random_range(0.1..0.6);
            let g = ensembles::gen_er(&ErParams::supercritical(n, p), rng.random()).ok()?;
            (format!("ER({n},{p:.3})"), g)
        }
        _ => {
            let d = if rng.random::<bool>() { 3 } else { 4 };
            let n = n.max(d + 1);
            let n = if n * d % 2 == 1 { n + 1 } else { n };
            let g = ensembles::gen_regular(n.min(CORPUS_MAX_N), d, rng.random()).ok()?;
            (format!("R({},{d})", g.vertex_count()), g)
        }
    };
    Some(CorpusGraph { label, graph })
}

/// Signed, heavy-tailed, near-constant and two-valued weight laws.
pub fn fuzz_weight_models() -> [WeightModel; 4] {
    [
        WeightModel::Gaussian { mean: 0.3, sd: 1.0 },
        WeightModel::StudentT { mean: 1.0, scale: 0.5, dof: 2.5 },
        WeightModel::Gaussian { mean: 1.0, sd: 1e-3 },
        WeightModel::SignedBernoulli { p_plus: 0.8, magnitude: 1.0 },
    ]
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropertyCount {
    pub name: String,
    pub checked: usize,
    pub failed: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub properties: Vec<PropertyCount>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.properties.iter().all(|p| p.failed == 0 && p.checked > 0)
    }

    pub fn property(&self, name: &str) -> Option<&PropertyCount> {
        self.properties.iter().find(|p| p.name == name)
    }

    fn merge(suite: &str, seed: u64, parts: Vec<SuiteReport>) -> Self {
        Self {
            suite: suite.to_owned(),
            seed,
            properties: parts.into_iter().flat_map(|r| r.properties).collect(),
        }
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "suite {} (seed {})", self.suite, self.seed)?;
        for p in &self.properties {
            let verdict = if p.failed == 0 && p.checked > 0 { "pass" } else { "FAIL" };
            writeln!(f, "  {verdict} {:<28} checked {:>6}  failed {}", p.name, p.checked, p.failed)?;
        }
        write!(f, "{}", if self.passed() { "all properties pass" } else { "some properties FAILED" })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Identities,
    Sandwich,
    Duality,
    All,
}

impl std::str::FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "identities" => Ok(Self::Identities),
            "sandwich" => Ok(Self::Sandwich),
            "duality" => Ok(Self::Duality),
            "all" => Ok(Self::All),
            other => Err(format!("unknown suite {other:?}")),
        }
    }
}

pub fn run_suite(suite: Suite, seed: u64) -> SuiteReport {
    match suite {
        Suite::Identities => identities_suite(seed, DEFAULT_CORPUS_SIZE),
        Suite::Duality => duality_suite(seed, DEFAULT_CORPUS_SIZE),
        Suite::Sandwich => sandwich_suite(seed, SANDWICH_CORPUS_SIZE),
        Suite::All => SuiteReport::merge(
            "all",
            seed,
            vec![
                identities_suite(seed, DEFAULT_CORPUS_SIZE),
                duality_suite(seed, DEFAULT_CORPUS_SIZE),
                sandwich_suite(seed, SANDWICH_CORPUS_SIZE),
            ],
        ),
    }
}

#[derive(Default, Clone, Copy)]
struct Tally {
    checked: usize,
    failed: usize,
}

impl Tally {
    fn record(&mut self, ok: bool) {
        self.checked += 1;
        self.failed += usize::from(!ok);
    }

    fn add(self, other: Tally) -> Tally {
        Tally { checked: self.checked + other.checked, failed: self.failed + other.failed }
    }
}

fn collect<const K: usize>(
    suite: &str,
    seed: u64,
    names: [&str; K],
    tallies: Vec<[Tally; K]>,
) -> SuiteReport {
    let total = tallies.into_iter().fold([Tally::default(); K], |mut acc, t| {
        for (a, b) in acc.iter_mut().zip(t) {
            *a = a.add(b);
        }
        acc
    });
    SuiteReport {
        suite: suite.to_owned(),
        seed,
        properties: names
            .iter()
            .zip(total)
            .map(|(n, t)| PropertyCount { name: (*n).to_owned(), checked: t.checked, failed: t.failed })
            .collect(),
    }
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

fn fuzz_weights(g: &Graph, seed: u64) -> WeightVector {
    let models = fuzz_weight_models();
    let m = &models[(seed % models.len() as u64) as usize];
    gen_weights(g.edge_count(), m, seed).expect("valid corpus weight model")
}

/// Integer incidence identities, the Frobenius form of the line-graph
/// quadratic form, and zero Laplacian row sums.
pub fn identities_suite(seed: u64, corpus_size: usize) -> SuiteReport {
    let corpus = standard_corpus(seed, corpus_size);
    let tallies = corpus
        .par_iter()
        .enumerate()
        .map(|(i, c)| {
            let g = &c.graph;
            let mut t = [Tally::default(); 5];
            let inc = spectral::incidence_matrix(g);
            let ctc = inc.transpose().matmul(&inc);
            let mut two = IntMatrix::zeros(g.edge_count(), g.edge_count());
            for k in 0..g.edge_count() {
                two.set(k, k, 2);
            }
            t[0].record(spectral::line_graph_adjacency_int(g) == &ctc - &two);
            let cct = inc.matmul(&inc.transpose());
            t[1].record(spectral::adjacency_matrix(g) == &cct - &spectral::degree_matrix(g));

            let w = fuzz_weights(g, trial_seed(seed, i as u64));
            let fluct = spectral::decompose(&w).expect("nonempty").fluctuation;
            let hs = spectral::hs_quadratic_form(g, &fluct).expect("aligned");
            let l = spectral::laplacian(g, &fluct).expect("aligned");
            let fro2 = l.frobenius_norm().powi(2);
            t[2].record(rel_close(hs, fro2, IDENTITY_TOL));
            let dense = spectral::hs_form_matrix(g).quadratic_form(fluct.values());
            t[3].record(rel_close(hs, dense, IDENTITY_TOL));
            let lw = spectral::laplacian(g, &w).expect("aligned");
            let zero_rows = (0..lw.dim()).all(|i| {
                let off: f64 = (0..lw.dim()).filter(|&j| j != i).map(|j| lw.get(i, j)).sum();
                off + lw.get(i, i) == 0.0
            });
            t[4].record(zero_rows);
            t
        })
        .collect();
    collect(
        "identities",
        seed,
        [
            "line_graph_adjacency",
            "vertex_adjacency",
            "hs_form_frobenius",
            "hs_form_dense",
            "laplacian_row_sums",
        ],
        tallies,
    )
}

/// Regular-graph closed form for the line-graph constant against the
/// projected quotient, its bracket on every graph, and the vertex-space
/// spectrum against a direct line-graph eigensolve.
pub fn duality_suite(seed: u64, corpus_size: usize) -> SuiteReport {
    let mut graphs: Vec<Graph> = standard_corpus(seed, corpus_size).into_iter().map(|c| c.graph).collect();
    graphs.extend((3..=40).filter_map(|n| graph::cycle_graph(n).ok()));
    graphs.extend((3..=12).filter_map(|n| graph::complete_graph(n).ok()));
    let tallies = graphs
        .par_iter()
        .map(|g| {
            let mut t = [Tally::default(); 3];
            match bounds::compute_mu(g) {
                Ok(mu) => {
                    if mu.method == MuMethod::RegularClosedForm {
                        let ok = mu.cross_check.is_some_and(|p| (p - mu.value).abs() <= DUALITY_TOL);
                        t[0].record(ok);
                    }
                    t[1].record(mu.bracket_holds(BRACKET_TOL));
                }
                Err(_) => {
                    t[1].record(false);
                    if g.classify().regular_degree.is_some() {
                        t[0].record(false);
                    }
                }
            }
            if g.edge_count() <= 200 {
                let via_vertices = bounds::line_graph_spectrum(g);
                let direct = linalg::symmetric_eigenvalues(&spectral::line_graph_adjacency(g));
                let ok = match (via_vertices, direct) {
                    (Ok(a), Ok(b)) => {
                        a.len() == b.len() && a.iter().zip(&b).all(|(x, y)| (x - y).abs() <= DUALITY_TOL)
                    }
                    _ => false,
                };
                t[2].record(ok);
            }
            t
        })
        .collect();
    collect("duality", seed, ["regular_mu_duality", "mu_bracket", "line_graph_spectrum"], tallies)
}

/// Sandwich soundness and certificate false positives against the dense
/// oracle, over every weight model for every corpus graph.
pub fn sandwich_suite(seed: u64, corpus_size: usize) -> SuiteReport {
    let corpus = standard_corpus(seed, corpus_size);
    let models = fuzz_weight_models();
    let tallies = corpus
        .par_iter()
        .enumerate()
        .map(|(i, c)| {
            let g = &c.graph;
            let mut t = [Tally::default(); 3];
            let spectra = match GraphSpectra::compute(g) {
                Ok(s) => s,
                Err(_) => {
                    t[0].record(false);
                    return t;
                }
            };
            let gseed = trial_seed(seed ^ 0x5A4D_5A4D, i as u64);
            for (k, model) in models.iter().enumerate() {
                for j in 0..WEIGHTS_PER_MODEL {
                    let wseed = trial_seed(gseed, (k * WEIGHTS_PER_MODEL + j) as u64);
                    let w = gen_weights(g.edge_count(), model, wseed).expect("valid model");
                    let cert = match bounds::certify(&spectra, g, &w, true) {
                        Ok(c) => c,
                        Err(_) => {
                            t[0].record(false);
                            continue;
                        }
                    };
                    t[0].record(cert.sandwich_violations() == 0);
                    let oracle_min = cert.oracle.as_ref().and_then(|o| o.first().copied()).unwrap_or(f64::NAN);
                    // NaN compares false, so a missing oracle counts as a failure.
                    t[1].record(!cert.positivity_paper || oracle_min > 0.0);
                    t[2].record(!cert.positivity_naive || w.values().iter().all(|&x| x > 0.0));
                }
            }
            t
        })
        .collect();
    collect("sandwich", seed, ["sandwich", "certificate_paper", "certificate_naive"], tallies)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_is_deterministic_and_in_range() {
        let a = standard_corpus(3, 60);
        let b = standard_corpus(3, 60);
        assert_eq!(a, b);
        for c in &a {
            let n = c.graph.vertex_count();
            assert!((CORPUS_MIN_N..=CORPUS_MAX_N).contains(&n), "{} has {n} vertices", c.label);
            assert!(c.graph.edge_count() >= 2);
        }
        let kinds: std::collections::HashSet<char> = a.iter().map(|c| c.label.chars().next().unwrap()).collect();
        assert_eq!(kinds.len(), 6);
    }

    #[test]
    fn small_suites_pass() {
        for report in [identities_suite(1, 24), duality_suite(1, 24), sandwich_suite(1, 12)] {
            assert!(report.passed(), "{report}");
        }
    }

    #[test]
    fn suite_names_parse() {
        assert_eq!("all".parse::<Suite>(), Ok(Suite::All));
        assert!("bogus".parse::<Suite>().is_err());
    }

    #[test]
    fn report_requires_checks() {
        let r = SuiteReport {
            suite: "x".into(),
            seed: 0,
            properties: vec![PropertyCount { name: "p".into(), checked: 0, failed: 0 }],
        };
        assert!(!r.passed());
    }
}
