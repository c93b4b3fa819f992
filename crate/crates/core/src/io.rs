//! Plain-text artifact writers.
//!
//! Every writer renders to a `String` first (deterministically: fixed
//! column order, floats in `{:.16e}` scientific notation or via
//! serde_json's shortest round-trip form) and then writes the file in one
//! shot, so identical inputs produce byte-identical artifacts. Timing
//! fields are the only values expected to differ between reruns.

use crate::cq::{check_admissible, WeightKind, WeightTable};
use crate::error::Result;
use crate::experiments::{AitkenReport, ErrorReport, TimingSummary};
use crate::fem1d::{FemCoefVec, Mesh1D};
use crate::stepper::Trajectory;
use crate::QuadratureMethod;
use serde::Serialize;
use std::fmt::Write as _;
use std::path::Path;

/// CSV rendering of a weight table, with the sign-pattern verdict in the
/// header comments.
pub fn weight_csv(table: &WeightTable) -> String {
    let mut out = String::new();
    let kind = match table.kind() {
        WeightKind::Derivative => "derivative",
        WeightKind::Integral => "integral",
    };
    let _ = writeln!(
        out,
        "# weights: method={} kind={} alpha={:.16e} h={:.16e} count={}",
        table.method(),
        kind,
        table.alpha().value(),
        table.h(),
        table.len()
    );
    match table.kind() {
        WeightKind::Derivative => {
            let adm = check_admissible(table);
            if adm.admissible {
                let _ = writeln!(out, "# admissible: yes");
            } else {
                let _ = writeln!(
                    out,
                    "# admissible: no (first sign violation at j={})",
                    adm.first_violation.unwrap_or(0)
                );
            }
        }
        WeightKind::Integral => {
            let _ = writeln!(out, "# admissible: n/a (integral weights)");
        }
    }
    out.push_str("j,w\n");
    for (j, &w) in table.weights().iter().enumerate() {
        let _ = writeln!(out, "{j},{w:.16e}");
    }
    out
}

pub fn write_weight_csv(path: &Path, table: &WeightTable) -> Result<()> {
    std::fs::write(path, weight_csv(table))?;
    Ok(())
}

/// CSV rendering of a coefficient vector on its mesh, boundary nodes
/// included (their values are identically zero under the Dirichlet
/// condition).
pub fn coef_csv(mesh: &Mesh1D, u: &FemCoefVec) -> String {
    assert_eq!(u.len(), mesh.interior(), "vector does not match the mesh");
    let mut out = String::from("x,value\n");
    let _ = writeln!(out, "{:.16e},{:.16e}", mesh.node(0), 0.0);
    for i in 0..u.len() {
        let _ = writeln!(out, "{:.16e},{:.16e}", mesh.interior_node(i), u[i]);
    }
    let _ = writeln!(out, "{:.16e},{:.16e}", mesh.node(mesh.elements()), 0.0);
    out
}

pub fn write_coef_csv(path: &Path, mesh: &Mesh1D, u: &FemCoefVec) -> Result<()> {
    std::fs::write(path, coef_csv(mesh, u))?;
    Ok(())
}

#[derive(Serialize)]
struct TrajectoryRecord {
    n: usize,
    t: f64,
    l2norm: f64,
    wall_ns: u64,
}

/// JSON-lines rendering of a trajectory: one record per time node with
/// the step index, the time, the L2 norm, and the wall time of the step
/// that produced it (0 for the initial node).
pub fn trajectory_jsonl(traj: &Trajectory) -> String {
    let grid = traj.grid();
    let mut out = String::new();
    for (n, &l2norm) in traj.l2_norms().iter().enumerate() {
        let record = TrajectoryRecord {
            n,
            t: grid.t(n),
            l2norm,
            wall_ns: if n == 0 { 0 } else { traj.step_wall_ns(n) },
        };
        let line = serde_json::to_string(&record).expect("plain struct serializes");
        out.push_str(&line);
        out.push('\n');
    }
    out
}

pub fn write_trajectory_jsonl(path: &Path, traj: &Trajectory) -> Result<()> {
    std::fs::write(path, trajectory_jsonl(traj))?;
    Ok(())
}

/// CSV rendering of convergence-study cells in report order.
pub fn errors_csv(report: &ErrorReport) -> String {
    let mut out = String::from("method,alpha,steps,error_at_t1,error_at_final\n");
    for c in &report.cells {
        let _ = writeln!(
            out,
            "{},{:.16e},{},{:.16e},{:.16e}",
            c.method, c.alpha, c.steps, c.error_at_t1, c.error_at_final
        );
    }
    out
}

pub fn write_errors_csv(path: &Path, report: &ErrorReport) -> Result<()> {
    std::fs::write(path, errors_csv(report))?;
    Ok(())
}

/// CSV matrix of estimated orders: one row per method, one column per
/// fractional order. Missing estimates render as empty cells.
pub fn orders_csv(report: &AitkenReport, methods: &[QuadratureMethod], alphas: &[f64]) -> String {
    let mut out = String::from("method");
    for a in alphas {
        let _ = write!(out, ",alpha={a}");
    }
    out.push('\n');
    for &method in methods {
        let _ = write!(out, "{method}");
        for &alpha in alphas {
            match report.order(method, alpha) {
                Some(p) => {
                    let _ = write!(out, ",{p:.4}");
                }
                None => out.push(','),
            }
        }
        out.push('\n');
    }
    out
}

pub fn write_orders_csv(
    path: &Path,
    report: &AitkenReport,
    methods: &[QuadratureMethod],
    alphas: &[f64],
) -> Result<()> {
    std::fs::write(path, orders_csv(report, methods, alphas))?;
    Ok(())
}

/// CSV rendering of timing summaries, one row per configuration.
pub fn bench_csv(rows: &[TimingSummary]) -> String {
    let mut out = String::from(
        "steps,reps,naive_whole_ns_mean,fast_whole_ns_mean,l1_whole_ns_mean,\
         whole_ratio_mean,whole_ratio_sd,history_ratio_mean,history_ratio_sd,\
         aux_state_count,naive_history_ops,fast_history_ops\n",
    );
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{:.1},{:.1},{:.1},{:.4},{:.4},{:.4},{:.4},{},{},{}",
            r.steps,
            r.reps,
            r.naive_whole_ns_mean,
            r.fast_whole_ns_mean,
            r.l1_whole_ns_mean,
            r.whole_ratio_mean,
            r.whole_ratio_sd,
            r.history_ratio_mean,
            r.history_ratio_sd,
            r.aux_state_count,
            r.naive_history_ops,
            r.fast_history_ops
        );
    }
    out
}

pub fn write_bench_csv(path: &Path, rows: &[TimingSummary]) -> Result<()> {
    std::fs::write(path, bench_csv(rows))?;
    Ok(())
}
