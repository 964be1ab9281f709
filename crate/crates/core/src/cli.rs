//! Command-line front end. `run` parses arguments, executes one job and returns
//! the process exit code: 0 success, 1 failed check, 2 usage or IO error.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use crate::classify::{classify_interaction_set, classify_two_qudit};
use crate::error::{Error, Result};
use crate::gadgets::{run_gadget, sweep_representative, GadgetParams, GADGET_NAMES};
use crate::interactions::{max_d_cut, Graph, InteractionSetFile};
use crate::io::read_matrix;
use crate::operator::set_dense_limit;
use crate::simcert::{certify_simulation, OffsetMode};
use crate::suite::{run_selected, SuiteOptions, CRITERIA};
use crate::sw::sweep::{format_table, parse_sweep};
use crate::sw::convergence_sweep;

#[derive(Debug, Parser)]
#[command(name = "gadgetforge", version, about = "Qudit gadgets, Schrieffer-Wolff effective Hamiltonians and interaction classification")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalOpts {
    /// Largest dimension handled with dense matrices.
    #[arg(long, global = true, default_value_t = crate::operator::DEFAULT_DENSE_LIMIT)]
    pub dense_limit: usize,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify an interaction set file.
    Classify {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Build and verify a named gadget.
    Gadget {
        #[command(subcommand)]
        action: GadgetAction,
    },
    /// Exact Schrieffer-Wolff convergence sweep.
    Sweep {
        /// Representative gadget of this order (1..=4).
        #[arg(long, conflicts_with = "gadget")]
        order: Option<usize>,
        #[arg(long)]
        gadget: Option<String>,
        #[command(flatten)]
        params: GadgetArgs,
        #[arg(long, default_value = "1e2:1e10:9")]
        delta_sweep: String,
    },
    /// Measure (eta, eps) for H_sim simulating H_target through an isometry.
    Simcheck {
        #[arg(long)]
        hsim: PathBuf,
        #[arg(long)]
        htarget: PathBuf,
        #[arg(long)]
        isometry: PathBuf,
        /// Energy cutoff of the low-energy space.
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        modulo_identity: bool,
    },
    /// Quantum Max-d-Cut ground energy against the classical optimum.
    Maxdcut {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, default_value_t = 2)]
        d: usize,
    },
    /// Run the numbered reproduction criteria.
    PaperSuite {
        /// Comma-separated criterion numbers; all when omitted.
        #[arg(long, value_delimiter = ',')]
        only: Vec<usize>,
        #[arg(long, default_value = "1e2:1e10:9")]
        delta_sweep: String,
    },
}

#[derive(Debug, Subcommand)]
pub enum GadgetAction {
    /// List gadget names.
    List,
    /// Build one gadget and check its closed forms.
    Run {
        name: String,
        #[command(flatten)]
        params: GadgetArgs,
        /// Also run an exact-SW sweep, `lo:hi:n`.
        #[arg(long)]
        delta_sweep: Option<String>,
    },
}

#[derive(Debug, Args, Clone)]
pub struct GadgetArgs {
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub theta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub mu: Option<f64>,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
}

impl GadgetArgs {
    fn params(&self, seed: u64) -> GadgetParams {
        GadgetParams { d: self.d, theta: self.theta, alpha: self.alpha, beta: self.beta, mu: self.mu, seed, tol: self.tol }
    }
}

/// Outcome of a job: the JSON report, text lines for the terminal, and failed checks.
struct Outcome {
    report: Value,
    text: Vec<String>,
    failures: Vec<String>,
}

fn to_value<T: Serialize>(v: &T) -> Result<Value> {
    Ok(serde_json::to_value(v)?)
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let s = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    Ok(serde_json::from_str(&s)?)
}

fn classify(input: &Path, tol: f64) -> Result<Outcome> {
    let file: InteractionSetFile = read_json(input)?;
    let set = file.resolve()?;
    let verdict = if set.len() == 1 && set[0].arity() == 2 {
        classify_two_qudit(set[0].matrix(), file.d, tol)?
    } else {
        classify_interaction_set(&set, tol)?
    };
    let mut text = vec![format!("{} ({})", verdict.class.label(), verdict.rule)];
    if verdict.borderline {
        text.push("warning: a singular value lies near the rank threshold".into());
    }
    Ok(Outcome { report: verdict.to_json(), text, failures: Vec::new() })
}

fn gadget_run(name: &str, args: &GadgetArgs, seed: u64, sweep: Option<&str>) -> Result<Outcome> {
    let (instance, report) = run_gadget(name, &args.params(seed))?;
    let mut text: Vec<String> = report
        .residuals
        .iter()
        .map(|r| format!("{} {:<70} {:.3e} (tol {:.0e})", if r.passed { "ok  " } else { "FAIL" }, r.name, r.value, r.tolerance))
        .collect();
    text.extend(report.notes.iter().map(|n| format!("note: {n}")));
    let failures = report.failures().iter().map(|r| format!("{name}: {}", r.name)).collect();
    let mut value = json!({ "report": to_value(&report)? });
    if let Some(spec) = sweep {
        let g = instance.ok_or_else(|| Error::Unsupported(format!("gadget '{name}' has no perturbative instance to sweep")))?;
        let s = convergence_sweep(&g, &parse_sweep(spec)?)?;
        text.push(format_table(&s));
        value["sweep"] = to_value(&s)?;
    }
    Ok(Outcome { report: value, text, failures })
}

fn sweep(order: Option<usize>, gadget: Option<&str>, args: &GadgetArgs, seed: u64, spec: &str) -> Result<Outcome> {
    let g = match (order, gadget) {
        (Some(k), _) => sweep_representative(k)?,
        (None, Some(name)) => run_gadget(name, &args.params(seed))?
            .0
            .ok_or_else(|| Error::Unsupported(format!("gadget '{name}' has no perturbative instance to sweep")))?,
        (None, None) => return Err(Error::Parse("sweep needs --order or --gadget".into())),
    };
    let s = convergence_sweep(&g, &parse_sweep(spec)?)?;
    let failures = if s.monotone { Vec::new() } else { vec![format!("{}: eps not monotone in delta", s.gadget)] };
    Ok(Outcome { report: to_value(&s)?, text: vec![format_table(&s)], failures })
}

fn simcheck(hsim: &Path, htarget: &Path, isometry: &Path, delta: f64, modulo: bool) -> Result<Outcome> {
    // The logical target need not be a d^n operator, so all three use the general matrix reader.
    let h_prime = read_matrix(hsim)?;
    let h = read_matrix(htarget)?;
    let v = read_matrix(isometry)?;
    let mode = if modulo { OffsetMode::ModuloIdentity } else { OffsetMode::Exact };
    let r = certify_simulation(&h_prime, &h, &v, delta, mode)?;
    let text = match (r.eta, r.eps) {
        (Some(eta), Some(eps)) => vec![format!("delta {delta}: eta {eta:.3e}, eps {eps:.3e}")],
        _ => vec![format!("low-energy rank {} does not match the encoding rank {}", r.low_space_dim, r.encoded_dim)],
    };
    let failures = if r.rank_match { Vec::new() } else { vec!["simcheck: rank mismatch".to_string()] };
    Ok(Outcome { report: to_value(&r)?, text, failures })
}

fn maxdcut(graph: &Path, d: usize) -> Result<Outcome> {
    let g: Graph = read_json(graph)?;
    let r = max_d_cut(&g, d)?;
    let text = vec![format!(
        "quantum ground energy {:.12}, classical minimum penalty {}, max cut weight {}",
        r.quantum_ground_energy, r.classical_min_penalty, r.max_cut_weight
    )];
    Ok(Outcome { report: to_value(&r)?, text, failures: Vec::new() })
}

fn suite(only: &[usize], seed: u64, spec: &str) -> Result<Outcome> {
    let ids: Vec<usize> = if only.is_empty() { (1..=CRITERIA).collect() } else { only.to_vec() };
    if let Some(bad) = ids.iter().find(|&&i| !(1..=CRITERIA).contains(&i)) {
        return Err(Error::Parse(format!("no criterion {bad}")));
    }
    let opts = SuiteOptions { seed, deltas: parse_sweep(spec)? };
    let report = run_selected(&ids, &opts);
    let mut text = report.lines();
    text.push(format!("{} passed, {} failed", report.passed, report.failed));
    let failures = report.criteria.iter().filter(|c| !c.passed).map(|c| format!("criterion {}: {}", c.id, c.title)).collect();
    let mut value = to_value(&report)?;
    value["metadata"] = json!({ "seconds": report.timings() });
    Ok(Outcome { report: value, text, failures })
}

fn configure_threads() {
    if let Some(n) = std::env::var("GADGETFORGE_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        // Fails only if a global pool already exists, in which case the cap is moot.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

fn execute(cli: &Cli) -> Result<Outcome> {
    let seed = cli.global.seed;
    match &cli.command {
        Command::Classify { input, tol } => classify(input, *tol),
        Command::Gadget { action: GadgetAction::List } => Ok(Outcome {
            report: json!(GADGET_NAMES),
            text: GADGET_NAMES.iter().map(|s| s.to_string()).collect(),
            failures: Vec::new(),
        }),
        Command::Gadget { action: GadgetAction::Run { name, params, delta_sweep } } => {
            gadget_run(name, params, seed, delta_sweep.as_deref())
        }
        Command::Sweep { order, gadget, params, delta_sweep } => sweep(*order, gadget.as_deref(), params, seed, delta_sweep),
        Command::Simcheck { hsim, htarget, isometry, delta, modulo_identity } => {
            simcheck(hsim, htarget, isometry, *delta, *modulo_identity)
        }
        Command::Maxdcut { graph, d } => maxdcut(graph, *d),
        Command::PaperSuite { only, delta_sweep } => suite(only, seed, delta_sweep),
    }
}

// A closed stdout (e.g. piped into `head`) is not an error worth panicking over.
fn emit(line: &str) {
    use std::io::Write;
    let _ = writeln!(std::io::stdout(), "{line}");
}

/// Runs the CLI on `argv` (including the program name) and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    configure_threads();
    set_dense_limit(cli.global.dense_limit);
    let outcome = match execute(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let json = match serde_json::to_string_pretty(&outcome.report) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    match &cli.global.out {
        Some(path) => {
            if let Err(e) = fs::write(path, json + "\n") {
                eprintln!("error: {}: {e}", path.display());
                return 2;
            }
            for line in &outcome.text {
                emit(line);
            }
        }
        None => emit(&json),
    }
    for f in &outcome.failures {
        eprintln!("check failed: {f}");
    }
    if outcome.failures.is_empty() {
        0
    } else {
        1
    }
}
