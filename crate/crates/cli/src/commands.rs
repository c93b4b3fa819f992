//! The six subcommands, each working on a fully resolved configuration.
//!
//! Every command validates its inputs completely before computing anything,
//! writes at most one artifact with a fixed name into the output directory,
//! and prints a human-readable summary table to stdout. Artifacts other
//! than timing data are deterministic: the same configuration and seed
//! reproduce them byte for byte.

use cq_subdiff::cq::suites::{
    coercivity_suite, convolution_inverse_suite, integrated_bound_suite, SuiteOutcome,
};
use cq_subdiff::experiments::{
    aitken_study, convergence_study, manufactured_problem, porous_problem, timing_comparison,
    AitkenConfig, ErrorReport, StudyConfig, TimingConfig, TimingSummary,
};
use cq_subdiff::fem1d::l2_error;
use cq_subdiff::io::{
    write_bench_csv, write_errors_csv, write_orders_csv, write_trajectory_jsonl, write_weight_csv,
};
use cq_subdiff::stepper::{HistoryMode, RunOptions, SchemeForm, StoreMode, TimeGrid};
use cq_subdiff::{
    check_admissible, generate_weights, l1_weights, run, FracOrder, QuadratureMethod, WeightKind,
    WeightTable,
};
use std::path::Path;

use crate::CliError;

/// Generator behind every randomized fixture, recorded in the output.
const GENERATOR: &str = "chacha8";

/// Lag horizon of the admissibility gate applied to a forced table.
const VERIFY_TABLE_LEN: usize = 1024;

/// One randomized check suite: takes a seed and a sample count.
type SuiteFn = fn(u64, usize) -> cq_subdiff::Result<SuiteOutcome>;

fn validation(e: cq_subdiff::Error) -> CliError {
    CliError::Validation(e.to_string())
}

/// Library errors raised while marching or checking, after the
/// configuration itself was accepted.
fn numerical(e: cq_subdiff::Error) -> CliError {
    match e {
        cq_subdiff::Error::SingularSystem { .. }
        | cq_subdiff::Error::NoConvergence(_)
        | cq_subdiff::Error::InvalidFixture { .. }
        | cq_subdiff::Error::NonPositiveDiffusivity { .. } => CliError::Numerical(e.to_string()),
        other => CliError::Validation(other.to_string()),
    }
}

fn frac_order(alpha: f64) -> Result<FracOrder, CliError> {
    FracOrder::new(alpha).map_err(validation)
}

// ---------------------------------------------------------------- weights

#[derive(Debug, Clone)]
pub struct WeightsSpec {
    pub method: QuadratureMethod,
    pub alpha: f64,
    pub kind: WeightKind,
    pub h: f64,
    pub n: usize,
}

fn build_table(
    method: QuadratureMethod,
    order: FracOrder,
    kind: WeightKind,
    h: f64,
    n: usize,
) -> Result<WeightTable, CliError> {
    match (method, kind) {
        (QuadratureMethod::L1, WeightKind::Integral) => Err(CliError::Validation(
            "the l1 rule only provides derivative weights; use --kind derivative".into(),
        )),
        (QuadratureMethod::L1, WeightKind::Derivative) => {
            l1_weights(order, h, n).map_err(validation)
        }
        (m, k) => generate_weights(m, order, k, h, n).map_err(validation),
    }
}

pub fn weights(spec: &WeightsSpec, out_dir: &Path) -> Result<(), CliError> {
    let order = frac_order(spec.alpha)?;
    let table = build_table(spec.method, order, spec.kind, spec.h, spec.n)?;
    let path = out_dir.join("weights.csv");
    write_weight_csv(&path, &table).map_err(validation)?;
    println!(
        "wrote {}: method={} alpha={} h={} rows j=0..{}",
        path.display(),
        spec.method,
        spec.alpha,
        spec.h,
        spec.n
    );
    if spec.kind == WeightKind::Derivative {
        let adm = check_admissible(&table);
        if adm.admissible {
            println!("sign pattern: admissible over the generated range");
        } else {
            println!(
                "sign pattern: NOT admissible, first violation at j={}",
                adm.first_violation.unwrap_or(0)
            );
        }
    }
    Ok(())
}

// ----------------------------------------------------------------- verify

#[derive(Debug, Clone)]
pub struct VerifySpec {
    pub samples: usize,
    /// Gate the run on this specific derivative table before sampling.
    pub forced: Option<(QuadratureMethod, f64)>,
    pub seed: u64,
}

pub fn verify(spec: &VerifySpec) -> Result<(), CliError> {
    if let Some((method, alpha)) = spec.forced {
        let order = frac_order(alpha)?;
        let table = build_table(method, order, WeightKind::Derivative, 1.0, VERIFY_TABLE_LEN)?;
        let adm = check_admissible(&table);
        if let Some(j) = adm.first_violation {
            return Err(CliError::Validation(format!(
                "{method} weights at alpha={alpha} are not admissible (first sign violation \
                 at j={j}); the discrete energy inequalities assume the sign pattern, so this \
                 table is refused"
            )));
        }
        println!(
            "forced table {method} alpha={alpha}: sign pattern holds for j<={VERIFY_TABLE_LEN}"
        );
    }
    if spec.samples == 0 {
        println!("warning: --samples 0 requested, all suites pass vacuously");
    }
    let suites: [(&str, SuiteFn); 3] = [
        ("coercivity", coercivity_suite),
        ("integrated-bound", integrated_bound_suite),
        ("convolution-inverse", convolution_inverse_suite),
    ];
    let mut failed: Vec<String> = Vec::new();
    for (i, (label, suite)) in suites.iter().enumerate() {
        let seed = spec.seed.wrapping_add(i as u64);
        let outcome = suite(seed, spec.samples).map_err(numerical)?;
        debug_assert_eq!(outcome.name, *label);
        let verdict = if outcome.passed() { "PASS" } else { "FAIL" };
        println!(
            "suite={} generator={GENERATOR} seed={seed} samples={} failures={} {verdict}",
            outcome.name, outcome.samples, outcome.failures
        );
        if !outcome.passed() {
            let detail = outcome.first_failure.unwrap_or_default();
            failed.push(format!("{}: {detail}", outcome.name));
        }
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Numerical(format!(
            "{} of 3 suites failed: {}",
            failed.len(),
            failed.join("; ")
        )))
    }
}

// --------------------------------------------------------------- converge

#[derive(Debug, Clone)]
pub struct ConvergeSpec {
    pub alphas: Vec<f64>,
    /// Step-count exponents; the study runs `2^level` steps per level.
    pub levels: Vec<u32>,
    pub dof: usize,
    pub t_final: f64,
    pub methods: Vec<QuadratureMethod>,
}

pub fn converge(spec: &ConvergeSpec, out_dir: &Path) -> Result<(), CliError> {
    let config = StudyConfig {
        alphas: spec.alphas.clone(),
        levels: spec.levels.iter().map(|&e| 1usize << e).collect(),
        t_final: spec.t_final,
        dof: spec.dof,
        methods: spec.methods.clone(),
    };
    let report = convergence_study(&config).map_err(numerical)?;
    let path = out_dir.join("errors.csv");
    write_errors_csv(&path, &report).map_err(validation)?;
    print_converge_table(&config, &report);
    println!("wrote {}", path.display());
    Ok(())
}

/// Pairwise observed order between consecutive refinement levels.
fn pairwise_rate(err_coarse: f64, err_fine: f64, n_coarse: usize, n_fine: usize) -> f64 {
    (err_coarse / err_fine).ln() / (n_fine as f64 / n_coarse as f64).ln()
}

fn print_converge_table(config: &StudyConfig, report: &ErrorReport) {
    println!(
        "manufactured problem, T={}, interior dof={}",
        config.t_final, config.dof
    );
    println!(
        "{:<6} {:>5} {:>8} {:>13} {:>6} {:>13} {:>6}",
        "method", "alpha", "N", "err(t1)", "rate", "err(T)", "rate"
    );
    for &method in &config.methods {
        for &alpha in &config.alphas {
            let series = report.series(method, alpha);
            for (i, cell) in series.iter().enumerate() {
                let rates = if i == 0 {
                    ("-".to_string(), "-".to_string())
                } else {
                    let prev = series[i - 1];
                    (
                        format!(
                            "{:.2}",
                            pairwise_rate(
                                prev.error_at_t1,
                                cell.error_at_t1,
                                prev.steps,
                                cell.steps
                            )
                        ),
                        format!(
                            "{:.2}",
                            pairwise_rate(
                                prev.error_at_final,
                                cell.error_at_final,
                                prev.steps,
                                cell.steps
                            )
                        ),
                    )
                };
                println!(
                    "{:<6} {:>5} {:>8} {:>13.4e} {:>6} {:>13.4e} {:>6}",
                    method.to_string(),
                    alpha,
                    cell.steps,
                    cell.error_at_t1,
                    rates.0,
                    cell.error_at_final,
                    rates.1
                );
            }
            let fitted = report.fitted_orders(method, alpha, config.t_final);
            let fmt = |o: Option<f64>| o.map_or("-".to_string(), |p| format!("{p:.2}"));
            println!(
                "{:<6} {:>5} {:>8} fitted orders: t1={} T={}",
                method.to_string(),
                alpha,
                "",
                fmt(fitted.at_t1),
                fmt(fitted.at_final)
            );
        }
    }
}

// ------------------------------------------------------------------ order

#[derive(Debug, Clone)]
pub struct OrderSpec {
    pub alphas: Vec<f64>,
    pub methods: Vec<QuadratureMethod>,
    /// Coarsest level; the study runs `2^level`, doubled and quadrupled.
    pub base_level: u32,
    pub dof: usize,
    pub x0: f64,
    pub delta: f64,
    pub t_final: f64,
}

pub fn order(spec: &OrderSpec, out_dir: &Path) -> Result<(), CliError> {
    let config = AitkenConfig {
        alphas: spec.alphas.clone(),
        methods: spec.methods.clone(),
        base_steps: 1usize << spec.base_level,
        t_final: spec.t_final,
        dof: spec.dof,
        x0: spec.x0,
        delta: spec.delta,
    };
    let report = aitken_study(&config).map_err(numerical)?;
    let path = out_dir.join("orders.csv");
    write_orders_csv(&path, &report, &config.methods, &config.alphas).map_err(validation)?;
    println!(
        "estimated temporal orders, localized-source problem (N={}, 2N, 4N; T={}, dof={})",
        config.base_steps, config.t_final, config.dof
    );
    print!("{:<6}", "method");
    for &alpha in &config.alphas {
        print!(" {alpha:>6}");
    }
    println!();
    for &method in &config.methods {
        print!("{:<6}", method.to_string());
        for &alpha in &config.alphas {
            match report.order(method, alpha) {
                Some(p) => print!(" {p:>6.2}"),
                None => print!(" {:>6}", "-"),
            }
        }
        println!();
    }
    println!("wrote {}", path.display());
    Ok(())
}

// ------------------------------------------------------------------ bench

#[derive(Debug, Clone)]
pub struct BenchSpec {
    pub alphas: Vec<f64>,
    pub steps: usize,
    pub dof: usize,
    pub reps: usize,
    pub epsilon: f64,
    pub n0: usize,
}

pub fn bench(spec: &BenchSpec, out_dir: &Path) -> Result<(), CliError> {
    let configs: Vec<TimingConfig> = spec
        .alphas
        .iter()
        .map(|&alpha| TimingConfig {
            alpha,
            steps: spec.steps,
            dof: spec.dof,
            reps: spec.reps,
            epsilon: spec.epsilon,
            n0: spec.n0,
            ..TimingConfig::default()
        })
        .collect();
    for config in &configs {
        // Surface parameter problems for every alpha before the first
        // (potentially slow) measurement starts.
        frac_order(config.alpha)?;
    }
    let mut rows: Vec<TimingSummary> = Vec::with_capacity(configs.len());
    println!(
        "{:>5} {:>8} {:>12} {:>12} {:>12} {:>16} {:>5}",
        "alpha", "N", "naive ms", "fast ms", "l1 ms", "whole ratio", "aux"
    );
    for config in &configs {
        let row = timing_comparison(config).map_err(numerical)?;
        println!(
            "{:>5} {:>8} {:>12.2} {:>12.2} {:>12.2} {:>9.2} +- {:<4.2} {:>5}",
            config.alpha,
            row.steps,
            row.naive_whole_ns_mean / 1e6,
            row.fast_whole_ns_mean / 1e6,
            row.l1_whole_ns_mean / 1e6,
            row.whole_ratio_mean,
            row.whole_ratio_sd,
            row.aux_state_count
        );
        rows.push(row);
    }
    let path = out_dir.join("bench.csv");
    write_bench_csv(&path, &rows).map_err(validation)?;
    println!("wrote {} (timings vary between reruns)", path.display());
    Ok(())
}

// ------------------------------------------------------------------ solve

#[derive(Debug, Clone)]
pub struct SolveSpec {
    pub problem: crate::config::ProblemArg,
    pub alpha: f64,
    pub method: QuadratureMethod,
    pub steps: usize,
    pub dof: usize,
    pub t_final: f64,
    pub x0: f64,
    pub delta: f64,
    pub history: HistoryMode,
    pub form: SchemeForm,
    pub allow_nonadmissible: bool,
}

pub fn solve(spec: &SolveSpec, out_dir: &Path) -> Result<(), CliError> {
    let order = frac_order(spec.alpha)?;
    let problem = match spec.problem {
        crate::config::ProblemArg::Manufactured => manufactured_problem(order),
        crate::config::ProblemArg::Porous => {
            porous_problem(order, spec.x0, spec.delta).map_err(validation)?
        }
    };
    let mesh = problem.mesh(spec.dof).map_err(validation)?;
    let grid = TimeGrid::new(spec.t_final, spec.steps).map_err(validation)?;
    let opts = RunOptions {
        method: spec.method,
        history: spec.history,
        store: StoreMode::All,
        form: spec.form,
        allow_nonadmissible: spec.allow_nonadmissible,
    };
    let traj = run(&problem, &mesh, grid, &opts).map_err(|e| match e {
        cq_subdiff::Error::NotAdmissible { first_violation } => CliError::Validation(format!(
            "{} weights at alpha={} are not admissible (first sign violation at \
             j={first_violation}); pass --allow-nonadmissible to run anyway",
            spec.method, spec.alpha
        )),
        other => numerical(other),
    })?;
    let path = out_dir.join("trajectory.jsonl");
    write_trajectory_jsonl(&path, &traj).map_err(validation)?;
    let wall_ms: f64 = (1..=spec.steps)
        .map(|n| traj.step_wall_ns(n) as f64)
        .sum::<f64>()
        / 1e6;
    let problem_name = match spec.problem {
        crate::config::ProblemArg::Manufactured => "manufactured",
        crate::config::ProblemArg::Porous => "porous",
    };
    println!(
        "solved {problem_name} problem: method={} alpha={} N={} dof={} T={}",
        spec.method, spec.alpha, spec.steps, spec.dof, spec.t_final
    );
    println!(
        "final L2 norm={:.6e} max L2 norm={:.6e} aux states={} wall={:.1} ms",
        traj.l2_norms().last().copied().unwrap_or(0.0),
        traj.max_l2_norm(),
        traj.aux_state_count(),
        wall_ms
    );
    if problem.exact(0.5, spec.t_final).is_some() {
        // The problem has a closed-form solution, so report the error too.
        let err = l2_error(&mesh, traj.final_state(), &|x| {
            problem.exact(x, spec.t_final).unwrap_or(0.0)
        });
        println!("L2 error against the exact solution at T: {err:.6e}");
    }
    println!("wrote {} ({} records)", path.display(), spec.steps + 1);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairwise_rate_recovers_the_exponent() {
        // err = C N^{-p} with p = 1.5 between N = 64 and N = 256.
        let (c, p) = (3.0, 1.5);
        let err = |n: f64| c * n.powf(-p);
        let rate = pairwise_rate(err(64.0), err(256.0), 64, 256);
        assert!((rate - p).abs() < 1e-12, "rate {rate}");
    }

    #[test]
    fn l1_integral_tables_are_refused() {
        let order = FracOrder::new(0.5).unwrap();
        let err = build_table(QuadratureMethod::L1, order, WeightKind::Integral, 0.1, 4);
        assert!(matches!(err, Err(CliError::Validation(_))));
        assert!(build_table(QuadratureMethod::L1, order, WeightKind::Derivative, 0.1, 4).is_ok());
    }
}
