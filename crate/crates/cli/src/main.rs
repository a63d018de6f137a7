mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use output::{num, to_value, Csv, Format, Report};
use siglap::bounds::{self, MuRequest};
use siglap::ensembles::{self, ErRegime, Family, WeightModel};
use siglap::graph::{self, Graph};
use siglap::linalg::{self, Restriction};
use siglap::spectral::{self, WeightVector};
use siglap::verify::{self, Suite};

/// Seed used by every randomized subcommand when `--seed` is omitted.
const DEFAULT_SEED: u64 = 0;

#[derive(Parser, Debug)]
#[command(name = "siglap", version, about = "Moment bounds for signed graph Laplacians")]
struct Cli {
    /// Output format; json is the stable interface
    #[arg(long, value_enum, global = true, default_value = "json")]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Eigenvalue bounds for a weighted edge list (unit weights if none given)
    Bounds {
        input: PathBuf,
        #[arg(long)]
        oracle: bool,
    },
    /// Positivity certificate; exit 0 if certified, 1 if not, 2 on bad input
    Certify {
        input: PathBuf,
        #[arg(long)]
        oracle: bool,
    },
    /// The line-graph constant mu with its bracket
    Mu {
        input: PathBuf,
        #[arg(long, value_enum, default_value = "auto")]
        method: MuMethodArg,
    },
    /// Equal-weight Laplacian spectrum, plus the weighted one on 1^perp
    Spectrum { input: PathBuf },
    /// Sample a graph (and optionally weights) and write it as an edge list
    Generate {
        #[command(flatten)]
        family: FamilyArgs,
        /// Weight model such as gaussian:1,0.3
        #[arg(long)]
        weights: Option<WeightModel>,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte Carlo experiments
    Experiment {
        #[arg(long, value_enum, default_value = "family")]
        kind: ExperimentKind,
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long, default_value = "gaussian:1,0.3")]
        weights: WeightModel,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// lambda2 kind: comma-separated vertex counts
        #[arg(long, value_delimiter = ',')]
        ladder: Vec<usize>,
        /// degree-tail kind: threshold multiplier
        #[arg(long, default_value_t = 4.0)]
        c: f64,
        /// Records (JSON lines) or the CSV ladder go here; stdout keeps the summary
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Search K_n weightings with given moments for the extreme eigenvalues
    Tightness {
        #[arg(long, default_value_t = 5)]
        n: usize,
        #[arg(long, default_value_t = 1.0)]
        q: f64,
        /// Target second moment P
        #[arg(long = "p-moment", default_value_t = 1.2)]
        p_moment: f64,
        #[arg(long, default_value_t = 2000)]
        iterations: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Run the invariant suites on the standard fuzz corpus
    Verify {
        #[arg(long, value_enum, default_value = "all")]
        suite: SuiteArg,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MuMethodArg {
    Auto,
    Projected,
    Closed,
    Dmax,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ExperimentKind {
    Family,
    Lambda2,
    DegreeTail,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SuiteArg {
    Identities,
    Sandwich,
    Duality,
    All,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
#[value(rename_all = "snake_case")]
enum FamilyName {
    Complete,
    Cycle,
    ErCritical,
    ErSupercritical,
    RandomRegular,
}

#[derive(Args, Debug)]
struct FamilyArgs {
    #[arg(long, value_enum)]
    family: Option<FamilyName>,
    #[arg(long)]
    n: Option<usize>,
    /// Critical G(n,p) scale: p = p0 ln(n)/n
    #[arg(long)]
    p0: Option<f64>,
    /// Edge probability for supercritical G(n,p)
    #[arg(long)]
    p: Option<f64>,
    /// Degree for random regular graphs
    #[arg(long)]
    d: Option<usize>,
}

struct Failure {
    code: u8,
    message: String,
}

fn input_error(message: impl ToString) -> Failure {
    Failure { code: 2, message: message.to_string() }
}

type Outcome = Result<(Report, u8), Failure>;

fn require<T>(v: Option<T>, flag: &str) -> Result<T, Failure> {
    v.ok_or_else(|| input_error(format!("missing --{flag}")))
}

impl FamilyArgs {
    fn resolve(&self) -> Result<Family, Failure> {
        let n = require(self.n, "n")?;
        Ok(match require(self.family, "family")? {
            FamilyName::Complete => Family::Complete { n },
            FamilyName::Cycle => Family::Cycle { n },
            FamilyName::ErCritical => Family::ErCritical { n, p0: require(self.p0, "p0")? },
            FamilyName::ErSupercritical => Family::ErSupercritical { n, p: require(self.p, "p")? },
            FamilyName::RandomRegular => Family::RandomRegular { n, d: require(self.d, "d")? },
        })
    }

    fn regime(&self) -> Result<ErRegime, Failure> {
        match (self.p0, self.p) {
            (Some(p0), None) => Ok(ErRegime::Critical { p0 }),
            (None, Some(p)) => Ok(ErRegime::Supercritical { p }),
            _ => Err(input_error("give exactly one of --p0 (critical) or --p (supercritical)")),
        }
    }
}

fn load(path: &Path) -> Result<(Graph, Option<WeightVector>), Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| input_error(format!("{}: {e}", path.display())))?;
    graph::read_edge_list(&text).map_err(|e| input_error(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    std::fs::write(path, contents).map_err(|e| input_error(format!("{}: {e}", path.display())))
}

fn certificate_report(command: &'static str, input: &Path, oracle: bool, need_weights: bool) -> Outcome {
    let (g, weights) = load(input)?;
    let unit = weights.is_none();
    if unit && need_weights {
        return Err(input_error(format!("{}: certify needs a weighted edge list", input.display())));
    }
    let w = weights.unwrap_or_else(|| WeightVector::ones(&g));
    let cert = bounds::theorem_bounds(&g, &w, oracle).map_err(input_error)?;
    let violations = cert.sandwich_violations();
    if violations > 0 {
        return Err(Failure { code: 2, message: format!("{violations} oracle eigenvalues fall outside the bounds") });
    }
    let doc = cert.to_document();
    let mut text = format!(
        "n {}  e {}  Q {}  P {}  variance {}\nlambda2 {}  lambdaN {}  mu {} ({:?})\nbounds [{}, {}]\npositivity: spectral {}  naive {}  (improvement ratio {})\n",
        doc.n, doc.e, doc.q, doc.p, doc.variance, doc.lambda2_g, doc.lambda_n_g, doc.mu, doc.mu_method,
        doc.lower, doc.upper, doc.positivity_paper, doc.positivity_naive, doc.improvement_ratio
    );
    if !doc.connected {
        text.push_str("warning: graph is disconnected; the bounds are not authoritative\n");
    }
    if let Some(ev) = &doc.oracle_eigenvalues {
        text.push_str(&format!("oracle eigenvalues {ev:?}\n"));
    }
    let mut csv = Csv::new(&["n", "e", "q", "p", "variance", "lambda2_g", "lambdaN_g", "mu", "lower", "upper", "positivity_paper", "positivity_naive", "improvement_ratio", "connected"]);
    csv.row(vec![
        doc.n.to_string(), doc.e.to_string(), num(doc.q), num(doc.p), num(doc.variance), num(doc.lambda2_g),
        num(doc.lambda_n_g), num(doc.mu), num(doc.lower), num(doc.upper), doc.positivity_paper.to_string(),
        doc.positivity_naive.to_string(), num(doc.improvement_ratio), doc.connected.to_string(),
    ]);
    let code = if command == "certify" && !doc.positivity_paper { 1 } else { 0 };
    let params = json!({ "input": input.display().to_string(), "oracle": oracle, "unit_weights": unit });
    Ok((Report { command, seed: None, params, result: to_value(&doc), text, csv }, code))
}

fn cmd_mu(input: &Path, method: MuMethodArg) -> Outcome {
    let (g, _) = load(input)?;
    let request = match method {
        MuMethodArg::Auto => MuRequest::Auto,
        MuMethodArg::Projected => MuRequest::Projected,
        MuMethodArg::Closed => MuRequest::Closed,
        MuMethodArg::Dmax => MuRequest::Dmax,
    };
    let mu = bounds::compute_mu_with(&g, request).map_err(input_error)?;
    let text = format!(
        "mu {} ({:?})\nbracket 4+lambda_(E-1) = {} <= mu <= 4+lambda_E = {} <= 2dmax+2 = {}\n",
        mu.value, mu.method, mu.bracket_low, mu.bracket_high, mu.dmax_bound
    );
    let mut csv = Csv::new(&["mu", "method", "bracket_low", "bracket_high", "dmax_bound"]);
    csv.row(vec![num(mu.value), to_value(&mu.method).as_str().unwrap_or("").to_owned(), num(mu.bracket_low), num(mu.bracket_high), num(mu.dmax_bound)]);
    let params = json!({ "input": input.display().to_string(), "method": format!("{method:?}").to_lowercase() });
    let result = json!({ "mu": to_value(&mu), "graph": to_value(&g.classify()), "e": g.edge_count() });
    Ok((Report { command: "mu", seed: None, params, result, text, csv }, 0))
}

fn cmd_spectrum(input: &Path) -> Outcome {
    let (g, weights) = load(input)?;
    let ev = linalg::symmetric_eigenvalues(&spectral::equal_weight_laplacian(&g)).map_err(input_error)?;
    let weighted = match &weights {
        Some(w) if g.vertex_count() >= 2 => {
            let l = spectral::laplacian(&g, w).map_err(input_error)?;
            let r = Restriction::new(&l, &vec![1.0; g.vertex_count()]).map_err(input_error)?;
            Some(linalg::eigendecompose(&r.matrix).map_err(input_error)?.eigenvalues)
        }
        _ => None,
    };
    let mut text = format!("equal-weight Laplacian eigenvalues {ev:?}\n");
    if let Some(wv) = &weighted {
        text.push_str(&format!("weighted Laplacian on 1^perp {wv:?}\n"));
    }
    let mut csv = Csv::new(&["index", "equal_weight", "weighted_restricted"]);
    for (i, x) in ev.iter().enumerate() {
        // the restricted spectrum has one fewer entry and lines up with indices 1..N
        let wcell = weighted.as_ref().and_then(|w| i.checked_sub(1).and_then(|k| w.get(k))).map_or(String::new(), |&y| num(y));
        csv.row(vec![i.to_string(), num(*x), wcell]);
    }
    let params = json!({ "input": input.display().to_string() });
    let result = json!({ "laplacian_eigenvalues": ev, "weighted_restricted_eigenvalues": weighted });
    Ok((Report { command: "spectrum", seed: None, params, result, text, csv }, 0))
}

fn cmd_generate(family: &FamilyArgs, model: Option<WeightModel>, seed: u64, out: Option<&Path>) -> Outcome {
    let fam = family.resolve()?;
    let g = fam.generate(ensembles::trial_seed(seed, 0)).map_err(input_error)?;
    let w = match model {
        Some(m) => Some(ensembles::gen_weights(g.edge_count(), &m, ensembles::trial_seed(seed, 1)).map_err(input_error)?),
        None => None,
    };
    let edge_list = graph::write_edge_list(&g, w.as_ref());
    if let Some(path) = out {
        write_file(path, &edge_list)?;
    }
    let class = g.classify();
    let mut csv = Csv::new(&["u", "v", "weight"]);
    for (k, &(u, v)) in g.edges().iter().enumerate() {
        csv.row(vec![u.to_string(), v.to_string(), w.as_ref().map_or(String::new(), |w| num(w.values()[k]))]);
    }
    let text = if out.is_some() {
        format!("wrote {} vertices, {} edges\n", g.vertex_count(), g.edge_count())
    } else {
        edge_list.clone()
    };
    let params = json!({
        "family": to_value(&fam),
        "weights": model.map(|m| m.to_string()),
        "out": out.map(|p| p.display().to_string()),
    });
    let result = json!({
        "n": g.vertex_count(),
        "e": g.edge_count(),
        "graph": to_value(&class),
        "edge_list": edge_list,
    });
    Ok((Report { command: "generate", seed: Some(seed), params, result, text, csv }, 0))
}

#[allow(clippy::too_many_arguments)]
fn cmd_experiment(
    kind: ExperimentKind,
    family: &FamilyArgs,
    model: WeightModel,
    trials: Option<usize>,
    seed: u64,
    ladder: &[usize],
    c: f64,
    out: Option<&Path>,
) -> Outcome {
    let out_name = out.map(|p| p.display().to_string());
    match kind {
        ExperimentKind::Family => {
            let fam = family.resolve()?;
            let trials = trials.unwrap_or(100);
            let report = ensembles::run_family_experiment(fam, model, trials, seed).map_err(input_error)?;
            if let Some(path) = out {
                write_file(path, &report.to_jsonl())?;
            }
            let s = &report.summary;
            let mut text = format!(
                "{} trials of {}, weights {}\nsandwich_violations {}\ncertified trials {}  disconnected {}  errors {}\npositivity: spectral {}  naive {}  false positives {}\n",
                s.trials, fam.name(), s.weight_model, s.sandwich_violations, s.certified_trials, s.disconnected,
                s.errors, s.positivity_paper_count, s.positivity_naive_count, s.certificate_false_positives
            );
            if let Some(r) = &s.improvement_ratio {
                text.push_str(&format!("improvement ratio min {}  max {}  mean {}\n", r.min, r.max, r.mean));
            }
            if let Some(a) = s.a_p0 {
                text.push_str(&format!("a(p0) {a}\n"));
            }
            if let Some(note) = &s.cycle_lambda_max {
                text.push_str(&format!("cycle lambda_N computed {} vs stated {} (diverges: {})\n", note.computed, note.stated, note.diverges));
            }
            let mut csv = Csv::new(&["trial", "seed", "n", "e", "max_degree", "connected", "lambda2_g", "lambdaN_g", "mu", "lower", "upper", "positivity_paper", "positivity_naive", "sandwich_violations"]);
            for r in &report.records {
                let (l2, ln, mu) = r.spectral.as_ref().map_or((String::new(), String::new(), String::new()), |s| (num(s.lambda2_g), num(s.lambda_n_g), num(s.mu)));
                let (lo, hi, pp, pn) = r.certificate.as_ref().map_or(Default::default(), |c| {
                    (num(c.lower), num(c.upper), c.positivity_paper.to_string(), c.positivity_naive.to_string())
                });
                csv.row(vec![
                    r.trial.to_string(), r.seed.to_string(), r.graph_stats.n.to_string(), r.graph_stats.e.to_string(),
                    r.graph_stats.max_degree.to_string(), r.graph_stats.connected.to_string(), l2, ln, mu, lo, hi, pp, pn,
                    r.sandwich_violations.to_string(),
                ]);
            }
            let mut result = json!({ "summary": to_value(&report.summary) });
            if out.is_none() {
                result["records"] = to_value(&report.records);
            }
            let params = json!({ "kind": "family", "family": to_value(&fam), "weights": model.to_string(), "trials": trials, "out": out_name });
            Ok((Report { command: "experiment", seed: Some(seed), params, result, text, csv }, 0))
        }
        ExperimentKind::Lambda2 => {
            let regime = family.regime()?;
            let trials = trials.unwrap_or(50);
            let ladder = if ladder.is_empty() { vec![200, 400, 800] } else { ladder.to_vec() };
            let report = ensembles::run_lambda2_concentration(regime, &ladder, trials, seed).map_err(input_error)?;
            let csv_text = report.to_csv();
            if let Some(path) = out {
                write_file(path, &csv_text)?;
            }
            let mut text = format!("target {}\n{}", report.target, csv_text);
            text.push_str(&format!("strictly decreasing: {}\n", report.strictly_decreasing()));
            let mut csv = Csv::new(&["n", "p", "median_abs_dev", "trials_used", "disconnected"]);
            for r in &report.rows {
                csv.row(vec![r.n.to_string(), num(r.p), num(r.median_abs_dev), r.trials_used.to_string(), r.disconnected.to_string()]);
            }
            let params = json!({ "kind": "lambda2", "regime": to_value(&regime), "ladder": ladder, "trials": trials, "out": out_name });
            let mut result = to_value(&report);
            result["strictly_decreasing"] = json!(report.strictly_decreasing());
            Ok((Report { command: "experiment", seed: Some(seed), params, result, text, csv }, 0))
        }
        ExperimentKind::DegreeTail => {
            let n = require(family.n, "n")?;
            let p0 = require(family.p0, "p0")?;
            let trials = trials.unwrap_or(500);
            let r = ensembles::run_degree_tail_experiment(n, p0, c, trials, seed).map_err(input_error)?;
            let text = format!(
                "fraction with max degree <= {:.4}: {}\nworst max degree {}\nbeta {} (negative: {})\n",
                r.threshold, r.fraction_within, r.worst_max_degree, r.tail.beta, r.tail.beta_negative
            );
            let mut csv = Csv::new(&["n", "p0", "c", "trials", "threshold", "fraction_within", "worst_max_degree", "beta"]);
            csv.row(vec![n.to_string(), num(p0), num(c), trials.to_string(), num(r.threshold), num(r.fraction_within), r.worst_max_degree.to_string(), num(r.tail.beta)]);
            if let Some(path) = out {
                write_file(path, &csv.render())?;
            }
            let params = json!({ "kind": "degree_tail", "n": n, "p0": p0, "c": c, "trials": trials, "out": out_name });
            Ok((Report { command: "experiment", seed: Some(seed), params, result: to_value(&r), text, csv }, 0))
        }
    }
}

fn cmd_tightness(n: usize, q: f64, p: f64, iterations: usize, seed: u64) -> Outcome {
    let r = ensembles::tightness_search(n, q, p, iterations, seed).map_err(input_error)?;
    let text = format!(
        "K{n}, Q {q}, P {p}\nbounds [{}, {}]\nachieved [{}, {}]\nnormalized gaps lower {:e}  upper {:e}  ({} passes)\n",
        r.lower_bound, r.upper_bound, r.best_lower_eigenvalue, r.best_upper_eigenvalue, r.best_gap_lower, r.best_gap_upper, r.iterations_used
    );
    let mut csv = Csv::new(&["n", "q", "p", "lower_bound", "upper_bound", "best_lower", "best_upper", "gap_lower", "gap_upper", "iterations_used"]);
    csv.row(vec![
        n.to_string(), num(q), num(p), num(r.lower_bound), num(r.upper_bound), num(r.best_lower_eigenvalue),
        num(r.best_upper_eigenvalue), num(r.best_gap_lower), num(r.best_gap_upper), r.iterations_used.to_string(),
    ]);
    let params = json!({ "n": n, "q": q, "p": p, "iterations": iterations });
    Ok((Report { command: "tightness", seed: Some(seed), params, result: to_value(&r), text, csv }, 0))
}

fn cmd_verify(suite: SuiteArg, seed: u64) -> Outcome {
    let s = match suite {
        SuiteArg::Identities => Suite::Identities,
        SuiteArg::Sandwich => Suite::Sandwich,
        SuiteArg::Duality => Suite::Duality,
        SuiteArg::All => Suite::All,
    };
    let report = verify::run_suite(s, seed);
    let mut csv = Csv::new(&["property", "checked", "failed"]);
    for p in &report.properties {
        csv.row(vec![p.name.clone(), p.checked.to_string(), p.failed.to_string()]);
    }
    let mut result = to_value(&report);
    result["passed"] = json!(report.passed());
    let code = if report.passed() { 0 } else { 1 };
    let params = json!({ "suite": to_value(&s) });
    Ok((Report { command: "verify", seed: Some(seed), params, result, text: report.to_string(), csv }, code))
}

fn dispatch(command: &Command) -> Outcome {
    match command {
        Command::Bounds { input, oracle } => certificate_report("bounds", input, *oracle, false),
        Command::Certify { input, oracle } => certificate_report("certify", input, *oracle, true),
        Command::Mu { input, method } => cmd_mu(input, *method),
        Command::Spectrum { input } => cmd_spectrum(input),
        Command::Generate { family, weights, seed, out } => cmd_generate(family, *weights, *seed, out.as_deref()),
        Command::Experiment { kind, family, weights, trials, seed, ladder, c, out } => {
            cmd_experiment(*kind, family, *weights, *trials, *seed, ladder, *c, out.as_deref())
        }
        Command::Tightness { n, q, p_moment, iterations, seed } => cmd_tightness(*n, *q, *p_moment, *iterations, *seed),
        Command::Verify { suite, seed } => cmd_verify(*suite, *seed),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli.command) {
        Ok((report, code)) => {
            print!("{}", report.render(cli.format));
            ExitCode::from(code)
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
