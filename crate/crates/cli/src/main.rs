//! `cqsd`: command-line driver for the subdiffusion solver.
//!
//! Subcommands map one-to-one onto the library's entry points: `weights`
//! (quadrature tables), `verify` (randomized inequality suites), `converge`
//! (manufactured-solution study), `order` (extrapolated orders on the
//! localized-source problem), `bench` (naive-versus-compressed timings) and
//! `solve` (a single run). Settings come from flags, then an optional TOML
//! file (`--config`), then defaults; every command validates the resolved
//! configuration fully before it starts computing. Artifacts carry fixed
//! names inside `--out-dir`, and all of them except the timing data are
//! byte-identical across reruns of the same configuration and seed.
//!
//! Exit codes: 0 on success, 1 for an invalid configuration, 2 for a failed
//! numerical check.

mod commands;
mod config;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

use config::{
    parse_levels, pick, require, FileConfig, FormArg, HistoryArg, KindArg, MethodArg, ProblemArg,
};

/// Failure of a run, split by exit code.
#[derive(Debug)]
pub enum CliError {
    /// The requested configuration cannot be run (exit code 1).
    Validation(String),
    /// The configuration ran, but a numerical check failed (exit code 2).
    Numerical(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Numerical(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Validation(m) | CliError::Numerical(m) => m,
        }
    }
}

const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Parser)]
#[command(
    name = "cqsd",
    version,
    about = "Convolution-quadrature time stepping for 1-d quasilinear subdiffusion"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// TOML configuration file; explicit flags override its values.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Directory artifacts are written into (created if missing).
    #[arg(long, global = true, value_name = "DIR")]
    out_dir: Option<PathBuf>,

    /// Seed for randomized verification fixtures.
    #[arg(long, global = true, value_name = "SEED")]
    seed: Option<u64>,

    /// Bound on the worker threads used by the parallel studies.
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a quadrature weight table (writes weights.csv).
    Weights(WeightsArgs),
    /// Run the randomized inequality suites backing the energy estimates.
    Verify(VerifyArgs),
    /// Convergence study against the manufactured solution (writes errors.csv).
    Converge(ConvergeArgs),
    /// Extrapolated-order study on the localized-source problem (writes orders.csv).
    Order(OrderArgs),
    /// Time the naive against the compressed history evaluator (writes bench.csv).
    Bench(BenchArgs),
    /// Run the solver once (writes trajectory.jsonl).
    Solve(SolveArgs),
}

#[derive(Debug, Args)]
struct WeightsArgs {
    /// Quadrature rule.
    #[arg(long, value_enum)]
    method: Option<MethodArg>,
    /// Fractional order in (0, 1]; 1 is the classical limit.
    #[arg(long)]
    alpha: Option<f64>,
    /// Derivative or integral weights.
    #[arg(long, value_enum)]
    kind: Option<KindArg>,
    /// Step size the table is scaled by.
    #[arg(long)]
    h: Option<f64>,
    /// Largest lag index; the table holds rows j = 0..n.
    #[arg(long)]
    n: Option<usize>,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Random fixtures per suite; 0 passes vacuously.
    #[arg(long)]
    samples: Option<usize>,
    /// Gate the run on this rule's derivative table (with --alpha).
    #[arg(long, value_enum)]
    method: Option<MethodArg>,
    /// Fractional order of the forced table (with --method).
    #[arg(long)]
    alpha: Option<f64>,
}

#[derive(Debug, Args)]
struct ConvergeArgs {
    /// Fractional orders, comma separated.
    #[arg(long, value_delimiter = ',')]
    alphas: Option<Vec<f64>>,
    /// Step-count exponents: an inclusive range "5..9" or a list "5,7,9";
    /// level e runs 2^e steps.
    #[arg(long)]
    levels: Option<String>,
    /// Interior degrees of freedom of the fixed spatial mesh.
    #[arg(long)]
    dof: Option<usize>,
    /// Final time.
    #[arg(long)]
    t_final: Option<f64>,
    /// Quadrature rules, comma separated.
    #[arg(long, value_enum, value_delimiter = ',')]
    methods: Option<Vec<MethodArg>>,
}

#[derive(Debug, Args)]
struct OrderArgs {
    /// Fractional orders, comma separated.
    #[arg(long, value_delimiter = ',')]
    alphas: Option<Vec<f64>>,
    /// Quadrature rules, comma separated.
    #[arg(long, value_enum, value_delimiter = ',')]
    methods: Option<Vec<MethodArg>>,
    /// Coarsest step-count exponent; the study runs 2^level, 2x and 4x steps.
    #[arg(long)]
    base_level: Option<u32>,
    /// Interior degrees of freedom of the spatial mesh.
    #[arg(long)]
    dof: Option<usize>,
    /// Center of the localized source.
    #[arg(long)]
    x0: Option<f64>,
    /// Width parameter of the localized source.
    #[arg(long)]
    delta: Option<f64>,
    /// Final time.
    #[arg(long)]
    t_final: Option<f64>,
}

#[derive(Debug, Args)]
struct BenchArgs {
    /// Fractional orders, comma separated; one bench row each.
    #[arg(long, value_delimiter = ',')]
    alphas: Option<Vec<f64>>,
    /// Time steps per run.
    #[arg(long)]
    n: Option<usize>,
    /// Interior degrees of freedom of the spatial mesh.
    #[arg(long)]
    dof: Option<usize>,
    /// Independent repetitions the ratios are averaged over.
    #[arg(long)]
    reps: Option<usize>,
    /// Accuracy target of the compressed history evaluator.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Exact-window length of the compressed history evaluator.
    #[arg(long)]
    n0: Option<usize>,
}

#[derive(Debug, Args)]
struct SolveArgs {
    /// Built-in problem.
    #[arg(long, value_enum)]
    problem: Option<ProblemArg>,
    /// Fractional order in (0, 1]; 1 is the classical limit.
    #[arg(long)]
    alpha: Option<f64>,
    /// Quadrature rule.
    #[arg(long, value_enum)]
    method: Option<MethodArg>,
    /// Time steps.
    #[arg(long)]
    steps: Option<usize>,
    /// Interior degrees of freedom of the spatial mesh.
    #[arg(long)]
    dof: Option<usize>,
    /// Final time.
    #[arg(long)]
    t_final: Option<f64>,
    /// Center of the localized source (porous problem only).
    #[arg(long)]
    x0: Option<f64>,
    /// Width parameter of the localized source (porous problem only).
    #[arg(long)]
    delta: Option<f64>,
    /// History evaluator.
    #[arg(long, value_enum)]
    history: Option<HistoryArg>,
    /// Accuracy target of the compressed evaluator (with --history fast).
    #[arg(long)]
    epsilon: Option<f64>,
    /// Exact-window length of the compressed evaluator (with --history fast).
    #[arg(long)]
    n0: Option<usize>,
    /// Scheme form; velocity is only defined for bdf1 with alpha < 1.
    #[arg(long, value_enum)]
    form: Option<FormArg>,
    /// Run second-order tables with alpha > 5/8 although the sign pattern
    /// behind the energy estimates fails there.
    #[arg(long)]
    allow_nonadmissible: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are successes; anything else is a
            // configuration problem and must exit 1, not clap's usage code.
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    let file = match &cli.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let seed = pick(cli.seed, file.seed, DEFAULT_SEED);
    let out_dir = pick(
        cli.out_dir.clone(),
        file.out_dir.clone(),
        PathBuf::from("."),
    );
    if let Some(threads) = cli.threads.or(file.threads) {
        if threads == 0 {
            return Err(CliError::Validation("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::Validation(format!("cannot size the thread pool: {e}")))?;
    }
    std::fs::create_dir_all(&out_dir).map_err(|e| {
        CliError::Validation(format!("cannot create out-dir {}: {e}", out_dir.display()))
    })?;

    match cli.command {
        Command::Weights(args) => {
            let spec = commands::WeightsSpec {
                method: require(args.method, file.weights.method, "--method")?.into(),
                alpha: require(args.alpha, file.weights.alpha, "--alpha")?,
                kind: pick(args.kind, file.weights.kind, KindArg::Derivative).into(),
                h: pick(args.h, file.weights.h, 1.0),
                n: pick(args.n, file.weights.n, 64),
            };
            commands::weights(&spec, &out_dir)
        }
        Command::Verify(args) => {
            let method = args.method.or(file.verify.method);
            let alpha = args.alpha.or(file.verify.alpha);
            let forced = match (method, alpha) {
                (Some(m), Some(a)) => Some((m.into(), a)),
                (None, None) => None,
                _ => {
                    return Err(CliError::Validation(
                        "forcing a table needs both --method and --alpha".into(),
                    ))
                }
            };
            let spec = commands::VerifySpec {
                samples: pick(args.samples, file.verify.samples, 1000),
                forced,
                seed,
            };
            commands::verify(&spec)
        }
        Command::Converge(args) => {
            let levels = match args.levels.or(file.converge.levels) {
                Some(text) => parse_levels(&text)?,
                None => (5..=9).collect(),
            };
            let spec = commands::ConvergeSpec {
                alphas: pick(args.alphas, file.converge.alphas, vec![0.3, 0.5, 0.7]),
                levels,
                dof: pick(args.dof, file.converge.dof, 99),
                t_final: pick(args.t_final, file.converge.t_final, 1.0),
                methods: methods_or_both(args.methods, file.converge.methods),
            };
            commands::converge(&spec, &out_dir)
        }
        Command::Order(args) => {
            let spec = commands::OrderSpec {
                alphas: pick(
                    args.alphas,
                    file.order.alphas,
                    (1..=9).map(|i| i as f64 / 10.0).collect(),
                ),
                methods: methods_or_both(args.methods, file.order.methods),
                base_level: pick(args.base_level, file.order.base_level, 8),
                dof: pick(args.dof, file.order.dof, 40),
                x0: pick(args.x0, file.order.x0, 0.5),
                delta: pick(args.delta, file.order.delta, 1e-3),
                t_final: pick(args.t_final, file.order.t_final, 1.0),
            };
            commands::order(&spec, &out_dir)
        }
        Command::Bench(args) => {
            let spec = commands::BenchSpec {
                alphas: pick(args.alphas, file.bench.alphas, vec![0.5]),
                steps: pick(args.n, file.bench.n, 512),
                dof: pick(args.dof, file.bench.dof, 15),
                reps: pick(args.reps, file.bench.reps, 24),
                epsilon: pick(args.epsilon, file.bench.epsilon, 1e-6),
                n0: pick(args.n0, file.bench.n0, 5),
            };
            commands::bench(&spec, &out_dir)
        }
        Command::Solve(args) => {
            let history = pick(args.history, file.solve.history, HistoryArg::Naive);
            let epsilon = pick(args.epsilon, file.solve.epsilon, 1e-6);
            let n0 = pick(args.n0, file.solve.n0, 5);
            let spec = commands::SolveSpec {
                problem: pick(args.problem, file.solve.problem, ProblemArg::Porous),
                alpha: pick(args.alpha, file.solve.alpha, 0.5),
                method: pick(args.method, file.solve.method, MethodArg::Bdf1).into(),
                steps: pick(args.steps, file.solve.steps, 256),
                dof: pick(args.dof, file.solve.dof, 40),
                t_final: pick(args.t_final, file.solve.t_final, 1.0),
                x0: pick(args.x0, file.solve.x0, 0.5),
                delta: pick(args.delta, file.solve.delta, 1e-3),
                history: history.mode(epsilon, n0),
                form: pick(args.form, file.solve.form, FormArg::Auto).into(),
                allow_nonadmissible: args.allow_nonadmissible
                    || file.solve.allow_nonadmissible.unwrap_or(false),
            };
            commands::solve(&spec, &out_dir)
        }
    }
}

fn methods_or_both(
    flag: Option<Vec<MethodArg>>,
    file: Option<Vec<MethodArg>>,
) -> Vec<cq_subdiff::QuadratureMethod> {
    pick(flag, file, vec![MethodArg::Bdf1, MethodArg::Bdf2])
        .into_iter()
        .map(Into::into)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn the_clap_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn flags_parse_into_the_expected_options() {
        let cli = Cli::try_parse_from([
            "cqsd", "converge", "--alphas", "0.3,0.5", "--levels", "5..9", "--seed", "7",
        ])
        .unwrap();
        assert_eq!(cli.seed, Some(7));
        match cli.command {
            Command::Converge(args) => {
                assert_eq!(args.alphas, Some(vec![0.3, 0.5]));
                assert_eq!(args.levels.as_deref(), Some("5..9"));
            }
            other => panic!("parsed into {other:?}"),
        }
    }

    #[test]
    fn weights_without_a_method_is_rejected_by_dispatch() {
        let cli = Cli::try_parse_from(["cqsd", "weights", "--alpha", "0.5"]).unwrap();
        let err = dispatch(cli).unwrap_err();
        assert!(matches!(err, CliError::Validation(_)));
        assert!(err.message().contains("--method"));
    }
}
