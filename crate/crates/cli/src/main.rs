mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use anyhow::{Context, Result};
use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use fermitheta::algebra::{enumerate_set, OperatorKind};
use fermitheta::graph::{commutation_graph, ternary_tree_paulis};
use fermitheta::index::{estimate_index, IndexMethod, SeesawOptions};
use fermitheta::lab::{
    self, classical_overlap_experiment, exp_moment_check, free_energy_experiment, glassiness_contrast,
    gradcheck_log_z, mgf_check, mgf_single_term, single_term_free_energy, tail_experiment,
    variance_identity_experiment, ExperimentReport, ModelSpec, StateSpec, TailConfig, TailQuantity,
};
use fermitheta::models::{ansatz_bounds_report, sample_classical_pspin, Ensemble, ModelKind};
use fermitheta::scheme::{verify_scheme_spectrum, HahnTable};
use fermitheta::theta::{reproduce_table, table_to_csv, theta_johnson_lp, theta_sdp_with, SdpMethod, SdpOptions};
use fermitheta::linalg::RandomStream;

/// Exit status when a bound check fails.
const EXIT_VERDICT: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_CAPACITY: u8 = 3;
/// I/O, serialization or internal consistency failures.
const EXIT_INTERNAL: u8 = 4;

#[derive(Parser, Debug)]
#[command(name = "fermitheta", version, about = "Commutation indices, Lovász theta and disorder experiments")]
struct Cli {
    /// key=value file supplying defaults for any long flag.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Worker threads for sample-level parallelism.
    #[arg(long, global = true, env = "FERMITHETA_THREADS")]
    threads: Option<usize>,
    /// Progress and timing on stderr.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Lovász theta of commutation graphs.
    Theta(ThetaArgs),
    /// Commutation index bounds and see-saw estimate.
    Index(IndexArgs),
    /// Dual Hahn eigenvalue table of the Johnson scheme J(m, r).
    Hahn(HahnArgs),
    /// Commutation graph of an enumerated operator set.
    Graph(GraphArgs),
    /// Pairwise anticommuting weight-k Pauli strings.
    Ternary(TernaryArgs),
    /// Draw one disorder sample and summarize its spectrum.
    Model(ModelArgs),
    /// Circuit, MPS and network-size thresholds.
    Bounds(BoundsArgs),
    /// Disorder Monte Carlo experiments.
    Lab(LabArgs),
    /// Theta table for all even n up to --max-n.
    Table(TableArgs),
}

fn lib_parser<T: FromStr<Err = fermitheta::Error>>(s: &str) -> std::result::Result<T, String> {
    s.parse().map_err(|e: fermitheta::Error| e.to_string())
}

#[derive(Args, Debug)]
#[command(args_conflicts_with_subcommands = true)]
struct ThetaArgs {
    /// Print the theta table as CSV instead of a single value.
    #[arg(long)]
    table: bool,
    #[command(flatten)]
    range: TableArgs,
    #[command(subcommand)]
    command: Option<ThetaCmd>,
}

#[derive(Subcommand, Debug)]
enum ThetaCmd {
    /// Exact value on G(Sⁿ_q) from the Johnson-scheme LP.
    Johnson {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        q: usize,
        /// Print the exact rational rather than a decimal.
        #[arg(long)]
        exact_output: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Numeric SDP on the commutation graph of an enumerated set.
    Sdp {
        #[arg(long, value_parser = lib_parser::<OperatorKind>)]
        set: OperatorKind,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        loc: usize,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[arg(long, value_enum, default_value_t = Solver::Admm)]
        solver: Solver,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Solver {
    Admm,
    Fw,
}

#[derive(Args, Debug)]
struct TableArgs {
    #[arg(long, default_value_t = 40)]
    max_n: usize,
    /// Comma-separated even localities.
    #[arg(long = "qs", value_delimiter = ',', default_values_t = [2, 4, 6, 8, 10])]
    qs: Vec<usize>,
    #[arg(long = "table-out")]
    table_out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Method {
    Upper,
    Lower,
    Seesaw,
    All,
}

#[derive(Args, Debug)]
struct IndexArgs {
    #[arg(long, value_parser = lib_parser::<OperatorKind>)]
    set: OperatorKind,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    loc: usize,
    #[arg(long, value_enum, default_value_t = Method::All)]
    method: Method,
    #[arg(long, default_value_t = 8)]
    restarts: usize,
    #[arg(long, default_value_t = 200)]
    iters: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct HahnArgs {
    #[arg(long)]
    m: usize,
    #[arg(long)]
    r: usize,
    /// Also diagonalize every class matrix and emit the comparison report.
    #[arg(long)]
    verify: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum GraphFormat {
    Json,
    Csv,
}

#[derive(Args, Debug)]
struct GraphArgs {
    #[arg(long, value_parser = lib_parser::<OperatorKind>)]
    set: OperatorKind,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    loc: usize,
    #[arg(long, value_enum, default_value_t = GraphFormat::Json)]
    format: GraphFormat,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct TernaryArgs {
    #[arg(long)]
    k: usize,
}

#[derive(Args, Debug)]
struct ModelArgs {
    #[arg(value_parser = lib_parser::<ModelKind>)]
    kind: ModelKind,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    loc: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Write all eigenvalues (or classical energies) here.
    #[arg(long)]
    spectrum: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct BoundsArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    q: usize,
    #[arg(long)]
    t: f64,
    /// Gate-set size M.
    #[arg(long)]
    gateset: f64,
    #[arg(long)]
    delta: f64,
    #[arg(long, default_value_t = 1.0)]
    c1: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct LabArgs {
    #[arg(value_enum)]
    experiment: Experiment,
    #[arg(long, value_parser = lib_parser::<ModelKind>, default_value = "syk")]
    model: ModelKind,
    #[arg(long, default_value_t = 8)]
    n: usize,
    #[arg(long, default_value_t = 4)]
    loc: usize,
    /// Comma-separated inverse temperatures; single-β experiments use the first.
    #[arg(long, value_delimiter = ',', default_values_t = [1.0])]
    beta: Vec<f64>,
    #[arg(long, default_value_t = 1.0)]
    tau: f64,
    #[arg(long, default_value_t = 200)]
    samples: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Tail quantity; all five when omitted.
    #[arg(long, value_parser = lib_parser::<TailQuantity>)]
    quantity: Option<TailQuantity>,
    /// Fixed state: stabilized, random or basis:<index>.
    #[arg(long, value_parser = lib_parser::<StateSpec>, default_value = "random")]
    state: StateSpec,
    /// Comma-separated t values for tail and MGF experiments.
    #[arg(long, value_delimiter = ',')]
    t_grid: Option<Vec<f64>>,
    /// System sizes for the glassiness contrast.
    #[arg(long, value_delimiter = ',', default_values_t = [8, 12, 16])]
    n_list: Vec<usize>,
    /// Use the q = n analytic case (free-energy, mgf).
    #[arg(long)]
    single_term: bool,
    /// Gradient-check pass threshold on the relative error.
    #[arg(long, default_value_t = 1e-5)]
    tol: f64,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Per-sample records as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Experiment {
    FreeEnergy,
    Gradcheck,
    Variance,
    Tails,
    Mgf,
    Expmoment,
    Overlap,
    Contrast,
}

/// Successful run: whether every verdict held.
enum Outcome {
    Done,
    VerdictFailed,
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(p) => lab::write_atomic(p, text.as_bytes()).with_context(|| format!("writing {}", p.display())),
        None => {
            println!("{}", text.trim_end());
            Ok(())
        }
    }
}

fn emit_json<T: Serialize>(v: &T, out: Option<&Path>) -> Result<()> {
    emit(&serde_json::to_string_pretty(v)?, out)
}

fn run_theta(args: ThetaArgs) -> Result<Outcome> {
    match args.command {
        None => {
            if !args.table {
                anyhow::bail!(fermitheta::Error::Input("theta needs a subcommand (johnson, sdp) or --table".into()));
            }
            run_table(args.range)
        }
        Some(ThetaCmd::Johnson { n, q, exact_output, out }) => {
            let res = theta_johnson_lp(n, q)?;
            let exact = res.exact.clone().expect("LP path is exact");
            if exact_output || exact.is_integer() {
                println!("{exact}");
            } else {
                println!("{}", fermitheta::theta::round_half_up_2dp(&exact));
            }
            if let Some(p) = out {
                emit(&res.to_json()?, Some(&p))?;
            }
            Ok(Outcome::Done)
        }
        Some(ThetaCmd::Sdp { set, n, loc, tol, solver, out }) => {
            let g = commutation_graph(&enumerate_set(set, n, loc)?)?;
            let method = match solver {
                Solver::Admm => SdpMethod::Admm,
                Solver::Fw => SdpMethod::PenaltyFrankWolfe,
            };
            let res = theta_sdp_with(&g, &SdpOptions { tol, method, ..SdpOptions::default() })?;
            emit(&res.to_json()?, out.as_deref())?;
            Ok(Outcome::Done)
        }
    }
}

fn run_table(args: TableArgs) -> Result<Outcome> {
    if args.max_n > 40 {
        anyhow::bail!(fermitheta::Error::Input(format!("max n {} exceeds 40", args.max_n)));
    }
    let rows = reproduce_table(args.max_n, &args.qs)?;
    emit(&table_to_csv(&rows), args.table_out.as_deref())?;
    Ok(Outcome::Done)
}

fn run_index(a: IndexArgs) -> Result<Outcome> {
    let set = enumerate_set(a.set, a.n, a.loc)?;
    let method = match a.method {
        Method::Upper => IndexMethod::Upper,
        Method::Lower => IndexMethod::Lower,
        Method::Seesaw => IndexMethod::Seesaw,
        Method::All => IndexMethod::All,
    };
    let est = estimate_index(&set, method, &SeesawOptions { restarts: a.restarts, iters: a.iters, seed: a.seed })?;
    emit_json(&est, a.out.as_deref())?;
    Ok(Outcome::Done)
}

fn run_hahn(a: HahnArgs) -> Result<Outcome> {
    if a.verify {
        let rep = verify_scheme_spectrum(a.m, a.r)?;
        emit(&rep.to_json()?, a.out.as_deref())?;
        return Ok(if rep.all_matched { Outcome::Done } else { Outcome::VerdictFailed });
    }
    emit(&HahnTable::new(a.m, a.r)?.to_csv(), a.out.as_deref())?;
    Ok(Outcome::Done)
}

fn run_graph(a: GraphArgs) -> Result<Outcome> {
    let set = enumerate_set(a.set, a.n, a.loc)?;
    let labels = (0..set.len()).map(|i| set.label(i)).collect();
    let g = commutation_graph(&set)?.with_labels(labels)?;
    let text = match a.format {
        GraphFormat::Json => g.to_json()?,
        GraphFormat::Csv => g.to_edge_csv(),
    };
    emit(&text, a.out.as_deref())?;
    Ok(Outcome::Done)
}

fn run_ternary(a: TernaryArgs) -> Result<Outcome> {
    let set = ternary_tree_paulis(a.k)?;
    for i in 0..set.len() {
        println!("{}", set.label(i));
    }
    Ok(Outcome::Done)
}

fn run_model(a: ModelArgs) -> Result<Outcome> {
    let stream = RandomStream::new(a.seed, 0);
    let (summary, levels) = match a.kind {
        ModelKind::Classical => {
            let inst = sample_classical_pspin(a.n, a.loc, stream)?;
            let mut e = inst.energies.clone();
            e.sort_by(f64::total_cmp);
            let summary = json!({
                "kind": a.kind, "n": a.n, "locality": a.loc, "seed": a.seed,
                "m": inst.sample.g.len(), "configurations": e.len(),
                "ground_energy": e[0], "max_energy": e[e.len() - 1],
            });
            (summary, e)
        }
        kind => {
            let ens = Ensemble::new(kind, a.n, a.loc)?;
            let inst = ens.sample(stream)?;
            let ev = inst.eigenvalues()?.to_vec();
            let summary = json!({
                "kind": kind, "n": a.n, "locality": a.loc, "seed": a.seed,
                "m": ens.m(), "dim": inst.dim,
                "lambda_min": ev[0], "lambda_max": ev[ev.len() - 1],
                "normalized_trace_h2": inst.normalized_trace_h2(),
            });
            (summary, ev)
        }
    };
    emit_json(&summary, None)?;
    if let Some(p) = a.spectrum {
        emit_json(&json!({"kind": a.kind, "n": a.n, "locality": a.loc, "seed": a.seed, "levels": levels}), Some(&p))?;
    }
    Ok(Outcome::Done)
}

fn run_bounds(a: BoundsArgs) -> Result<Outcome> {
    let rep = ansatz_bounds_report(a.n, a.q, a.t, a.gateset, a.delta, a.c1)?;
    emit_json(&rep, a.out.as_deref())?;
    Ok(Outcome::Done)
}

fn model_spec(a: &LabArgs) -> ModelSpec {
    ModelSpec { kind: a.model, n: a.n, locality: a.loc }
}

fn run_lab(a: LabArgs, run_config: Value, verbose: bool) -> Result<Outcome> {
    let spec = model_spec(&a);
    let beta = a.beta[0];
    let mut reports: Vec<ExperimentReport> = Vec::new();
    match a.experiment {
        Experiment::FreeEnergy if a.single_term => reports.push(single_term_free_energy(a.n, &a.beta, a.samples, a.seed)?),
        Experiment::FreeEnergy => reports.push(free_energy_experiment(spec, &a.beta, a.samples, a.seed)?),
        Experiment::Gradcheck => {
            let g = gradcheck_log_z(a.n, a.loc, beta, a.seed)?;
            let passed = g.max_rel_error <= a.tol;
            let mut v = serde_json::to_value(&g)?;
            v["passed"] = json!(passed);
            v["tolerance"] = json!(a.tol);
            v["run_config"] = run_config;
            emit_json(&v, a.out.as_deref())?;
            return Ok(if passed { Outcome::Done } else { Outcome::VerdictFailed });
        }
        Experiment::Variance => reports.push(variance_identity_experiment(a.state, spec, a.samples, a.seed)?),
        Experiment::Tails => {
            let quantities = match a.quantity {
                Some(q) => vec![q],
                None => TailQuantity::ALL.to_vec(),
            };
            for q in quantities {
                let mut cfg = TailConfig::new(q, spec, a.samples, a.seed);
                cfg.beta = beta;
                cfg.tau = a.tau;
                cfg.state = a.state;
                cfg.t_grid = a.t_grid.clone();
                if verbose {
                    eprintln!("tails: {}", q.name());
                }
                reports.push(tail_experiment(&cfg)?);
            }
        }
        Experiment::Mgf => {
            let grid = a.t_grid.clone().unwrap_or_else(|| vec![0.25, 0.5, 1.0]);
            if a.single_term {
                reports.push(mgf_single_term(a.n, a.samples, &grid, a.seed)?);
            } else {
                reports.push(mgf_check(spec, a.samples, &grid, a.seed)?);
            }
        }
        Experiment::Expmoment => reports.push(exp_moment_check(spec, &a.beta, a.samples, a.seed)?),
        Experiment::Overlap => reports.push(classical_overlap_experiment(a.n, a.loc, &a.beta, a.samples, a.seed)?),
        Experiment::Contrast => reports.push(glassiness_contrast(&a.n_list, beta, a.samples, a.seed)?),
    }
    for r in &mut reports {
        r.params.insert("run_config".into(), run_config.clone());
        if verbose {
            eprintln!("{}: {} verdicts in {} ms", r.experiment, r.verdicts.len(), r.duration_ms);
        }
        for v in r.verdicts.iter().filter(|v| !v.passed) {
            eprintln!("verdict failed: {} ({}) {}", v.name, v.bound, v.note);
        }
    }
    let passed = reports.iter().all(ExperimentReport::passed);
    if let Some(p) = &a.csv {
        let text: String = reports.iter().map(|r| r.records_csv()).collect::<fermitheta::Result<Vec<_>>>()?.join("\n");
        emit(&text, Some(p))?;
    }
    match reports.as_slice() {
        [one] => emit(&one.to_json()?, a.out.as_deref())?,
        many => emit_json(&many, a.out.as_deref())?,
    }
    Ok(if passed { Outcome::Done } else { Outcome::VerdictFailed })
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.chain().find_map(|e| e.downcast_ref::<fermitheta::Error>()) {
        Some(fermitheta::Error::Input(_)) => EXIT_USAGE,
        Some(fermitheta::Error::Capacity(_)) => EXIT_CAPACITY,
        _ => EXIT_INTERNAL,
    }
}

fn run(cli: Cli, run_config: Value) -> Result<Outcome> {
    let verbose = cli.verbose > 0;
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .context("configuring the worker pool")?;
    }
    match cli.command {
        Cmd::Theta(a) => run_theta(a),
        Cmd::Index(a) => run_index(a),
        Cmd::Hahn(a) => run_hahn(a),
        Cmd::Graph(a) => run_graph(a),
        Cmd::Ternary(a) => run_ternary(a),
        Cmd::Model(a) => run_model(a),
        Cmd::Bounds(a) => run_bounds(a),
        Cmd::Lab(a) => run_lab(a, run_config, verbose),
        Cmd::Table(a) => run_table(a),
    }
}

fn main() -> ExitCode {
    let mut argv: Vec<String> = std::env::args().collect();
    let config_file = config::config_path(&argv);
    if let Some(path) = &config_file {
        match config::read(Path::new(path)) {
            Ok(entries) => argv = config::merge(&Cli::command(), argv, &entries),
            Err(e) => {
                eprintln!("error: {e:#}");
                return ExitCode::from(EXIT_USAGE);
            }
        }
    }
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    let run_config = json!({
        "argv": argv.get(1..).unwrap_or_default(),
        "config_file": config_file,
        "threads": cli.threads.unwrap_or_else(rayon::current_num_threads),
        "verbosity": cli.verbose,
    });
    match run(cli, run_config) {
        Ok(Outcome::Done) => ExitCode::SUCCESS,
        Ok(Outcome::VerdictFailed) => ExitCode::from(EXIT_VERDICT),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
