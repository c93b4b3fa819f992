//! Reference problems and reproducible studies built on the stepper.
//!
//! Two fixtures drive everything: a manufactured quasilinear problem with
//! the known solution `u = t^a x (1 - x)` (so errors are measurable), and
//! a "porous" problem with a narrow Gaussian source, no closed-form
//! solution, whose temporal order is estimated by Aitken extrapolation
//! from three nested step sizes. A timing harness compares the naive and
//! compressed history evaluators on identical runs.

use crate::cq::{FracOrder, QuadratureMethod};
use crate::error::{Error, Result};
use crate::fem1d::{l2_error, l2_norm, FemCoefVec, Mesh1D, ProblemSpec};
use crate::stepper::{run, HistoryMode, RunOptions, SchemeForm, StoreMode, TimeGrid, Trajectory};
use rayon::prelude::*;
use statrs::function::gamma::gamma;

/// Center of the default porous-medium source.
pub const POROUS_X0_DEFAULT: f64 = 0.5;
/// Width parameter of the default porous-medium source.
pub const POROUS_DELTA_DEFAULT: f64 = 1e-3;
/// Interior degrees of freedom used by the porous studies.
pub const POROUS_DOF_DEFAULT: usize = 40;

/// Quasilinear problem with exact solution `u(x, t) = t^a x (1 - x)` on
/// (0, 1): diffusivity `D(u) = e^{-u}` and the matching source
///
/// ```text
///   f(x, t, u) = e^{-u} t^a (2 + t^a (1 - 2x)^2) + Gamma(1 + a) x (1 - x).
/// ```
pub fn manufactured_problem(alpha: FracOrder) -> ProblemSpec {
    let a = alpha.value();
    let gamma_1a = gamma(1.0 + a);
    ProblemSpec::new(
        (0.0, 1.0),
        alpha,
        |_x, _t, u: f64| (-u).exp(),
        move |x: f64, t: f64, u: f64| {
            let ta = if t == 0.0 { 0.0 } else { t.powf(a) };
            let s = 1.0 - 2.0 * x;
            (-u).exp() * ta * (2.0 + ta * s * s) + gamma_1a * x * (1.0 - x)
        },
    )
    .expect("unit interval fixture is always valid")
    .with_exact(move |x: f64, t: f64| {
        let ta = if t == 0.0 { 0.0 } else { t.powf(a) };
        ta * x * (1.0 - x)
    })
}

/// Quasilinear problem with `D(u) = e^{-u}` and a stationary Gaussian
/// source of unit mass centered at `x0`:
///
/// ```text
///   f(x) = (4 pi delta)^{-1/2} exp(-(x - x0)^2 / (4 delta)).
/// ```
///
/// No closed-form solution; used for order estimation by extrapolation
/// and for timing runs.
pub fn porous_problem(alpha: FracOrder, x0: f64, delta: f64) -> Result<ProblemSpec> {
    if !(delta.is_finite() && delta > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "source width must be positive and finite, got {delta}"
        )));
    }
    if !(x0.is_finite() && x0 > 0.0 && x0 < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "source center must lie inside (0, 1), got {x0}"
        )));
    }
    let amp = 1.0 / (4.0 * std::f64::consts::PI * delta).sqrt();
    ProblemSpec::new(
        (0.0, 1.0),
        alpha,
        |_x, _t, u: f64| (-u).exp(),
        move |x: f64, _t, _u| {
            let d = x - x0;
            amp * (-d * d / (4.0 * delta)).exp()
        },
    )
}

/// Parameters of a convergence study on the manufactured problem.
#[derive(Debug, Clone)]
pub struct StudyConfig {
    pub alphas: Vec<f64>,
    /// Step counts, strictly increasing.
    pub levels: Vec<usize>,
    pub t_final: f64,
    /// Interior degrees of freedom of the fixed spatial mesh.
    pub dof: usize,
    pub methods: Vec<QuadratureMethod>,
}

impl StudyConfig {
    fn validate(&self) -> Result<()> {
        if self.alphas.is_empty() || self.levels.is_empty() || self.methods.is_empty() {
            return Err(Error::InvalidParameter(
                "study needs at least one order, level, and method".into(),
            ));
        }
        if self.alphas.iter().any(|&a| !(a > 0.0 && a < 1.0)) {
            return Err(Error::InvalidParameter(
                "study orders must lie in (0, 1)".into(),
            ));
        }
        if self.levels.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter(
                "levels must be strictly increasing".into(),
            ));
        }
        if self.dof == 0 {
            return Err(Error::InvalidParameter("study needs dof >= 1".into()));
        }
        if !(self.t_final.is_finite() && self.t_final > 0.0) {
            return Err(Error::InvalidParameter(
                "study needs a positive final time".into(),
            ));
        }
        Ok(())
    }
}

/// Errors of one run against the exact solution, measured in L2(0, 1) at
/// the first step and at the final time.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceCell {
    pub method: QuadratureMethod,
    pub alpha: f64,
    pub steps: usize,
    pub error_at_t1: f64,
    pub error_at_final: f64,
}

/// Least-squares orders fitted to a refinement series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FittedOrders {
    pub at_t1: Option<f64>,
    pub at_final: Option<f64>,
}

/// All cells of a convergence study, one per (method, order, level).
#[derive(Debug, Clone)]
pub struct ErrorReport {
    pub cells: Vec<ConvergenceCell>,
}

impl ErrorReport {
    /// Cells of one (method, order) series, sorted by step count.
    pub fn series(&self, method: QuadratureMethod, alpha: f64) -> Vec<&ConvergenceCell> {
        let mut s: Vec<&ConvergenceCell> = self
            .cells
            .iter()
            .filter(|c| c.method == method && c.alpha == alpha)
            .collect();
        s.sort_by_key(|c| c.steps);
        s
    }

    /// Orders fitted over the three finest levels of a series.
    pub fn fitted_orders(
        &self,
        method: QuadratureMethod,
        alpha: f64,
        t_final: f64,
    ) -> FittedOrders {
        let series = self.series(method, alpha);
        let finest = &series[series.len().saturating_sub(3)..];
        let pick = |err: &dyn Fn(&ConvergenceCell) -> f64| -> Option<f64> {
            let pts: Vec<(f64, f64)> = finest
                .iter()
                .map(|c| (t_final / c.steps as f64, err(c)))
                .collect();
            fit_slope(&pts)
        };
        FittedOrders {
            at_t1: pick(&|c| c.error_at_t1),
            at_final: pick(&|c| c.error_at_final),
        }
    }
}

/// Least-squares slope of `log err` against `log h`. Points whose error
/// is below 1e-15 of the largest one are discarded as roundoff-bound;
/// returns None when fewer than two usable points remain.
pub fn fit_slope(points: &[(f64, f64)]) -> Option<f64> {
    let scale = points.iter().fold(0.0f64, |s, &(_, e)| s.max(e));
    let usable: Vec<(f64, f64)> = points
        .iter()
        .filter(|&&(h, e)| h > 0.0 && e > 1e-15 * scale)
        .map(|&(h, e)| (h.ln(), e.ln()))
        .collect();
    if usable.len() < 2 {
        return None;
    }
    let n = usable.len() as f64;
    let sx: f64 = usable.iter().map(|p| p.0).sum();
    let sy: f64 = usable.iter().map(|p| p.1).sum();
    let sxx: f64 = usable.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = usable.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    if denom == 0.0 {
        return None;
    }
    Some((n * sxy - sx * sy) / denom)
}

/// Runs the manufactured problem over every (method, order, level) cell
/// and measures L2 errors at t_1 and t_final. Cells are independent and
/// evaluated in parallel; the report order is deterministic.
pub fn convergence_study(config: &StudyConfig) -> Result<ErrorReport> {
    config.validate()?;
    let mut jobs = Vec::new();
    for &method in &config.methods {
        for &alpha in &config.alphas {
            for &steps in &config.levels {
                jobs.push((method, alpha, steps));
            }
        }
    }
    let cells: Result<Vec<ConvergenceCell>> = jobs
        .par_iter()
        .map(|&(method, alpha, steps)| {
            let order = FracOrder::new(alpha)?;
            let spec = manufactured_problem(order);
            let mesh = spec.mesh(config.dof)?;
            let grid = TimeGrid::new(config.t_final, steps)?;
            let opts = RunOptions {
                method,
                allow_nonadmissible: true,
                ..RunOptions::default()
            };
            let traj = run(&spec, &mesh, grid, &opts)?;
            let h = grid.h();
            let first = traj.state(1).expect("states are stored");
            let error_at_t1 = l2_error(&mesh, first, &|x| spec.exact(x, h).unwrap());
            let error_at_final = l2_error(&mesh, traj.final_state(), &|x| {
                spec.exact(x, config.t_final).unwrap()
            });
            Ok(ConvergenceCell {
                method,
                alpha,
                steps,
                error_at_t1,
                error_at_final,
            })
        })
        .collect();
    Ok(ErrorReport { cells: cells? })
}

/// Aitken order estimate `log2(||u_h - u_{h/2}|| / ||u_{h/2} - u_{h/4}||)`
/// from final states of three nested-step runs on one mesh. Returns None
/// when either difference is too close to roundoff to be informative.
pub fn aitken_order(
    coarse: &FemCoefVec,
    mid: &FemCoefVec,
    fine: &FemCoefVec,
    mesh: &Mesh1D,
) -> Option<f64> {
    let diff = |a: &FemCoefVec, b: &FemCoefVec| {
        l2_norm(
            mesh,
            &FemCoefVec::new(
                a.values()
                    .iter()
                    .zip(b.values())
                    .map(|(&x, &y)| x - y)
                    .collect(),
            ),
        )
    };
    let scale = l2_norm(mesh, coarse)
        .max(l2_norm(mesh, mid))
        .max(l2_norm(mesh, fine));
    let floor = 10.0 * f64::EPSILON * scale.max(f64::MIN_POSITIVE);
    let d1 = diff(coarse, mid);
    let d2 = diff(mid, fine);
    if d1 <= floor || d2 <= floor {
        return None;
    }
    Some((d1 / d2).log2())
}

/// Parameters of an Aitken order study on the porous problem.
#[derive(Debug, Clone)]
pub struct AitkenConfig {
    pub alphas: Vec<f64>,
    pub methods: Vec<QuadratureMethod>,
    /// Coarsest step count; the study also runs 2x and 4x.
    pub base_steps: usize,
    pub t_final: f64,
    pub dof: usize,
    pub x0: f64,
    pub delta: f64,
}

impl Default for AitkenConfig {
    fn default() -> Self {
        AitkenConfig {
            alphas: (1..=9).map(|i| i as f64 / 10.0).collect(),
            methods: vec![QuadratureMethod::Bdf1, QuadratureMethod::Bdf2],
            base_steps: 256,
            t_final: 1.0,
            dof: POROUS_DOF_DEFAULT,
            x0: POROUS_X0_DEFAULT,
            delta: POROUS_DELTA_DEFAULT,
        }
    }
}

/// One estimated order.
#[derive(Debug, Clone, PartialEq)]
pub struct AitkenRow {
    pub method: QuadratureMethod,
    pub alpha: f64,
    pub order: Option<f64>,
}

/// Estimated orders for every (method, order) pair of the study.
#[derive(Debug, Clone)]
pub struct AitkenReport {
    pub rows: Vec<AitkenRow>,
}

impl AitkenReport {
    pub fn order(&self, method: QuadratureMethod, alpha: f64) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| r.method == method && r.alpha == alpha)
            .and_then(|r| r.order)
    }
}

/// Runs the porous problem at base, 2x, and 4x steps per (method, order)
/// pair and estimates the temporal order by Aitken extrapolation.
/// Non-admissible combinations are run anyway: the estimate itself shows
/// whether the scheme still converges there.
pub fn aitken_study(config: &AitkenConfig) -> Result<AitkenReport> {
    if config.base_steps == 0 {
        return Err(Error::InvalidParameter(
            "order study needs at least one step".into(),
        ));
    }
    let mut jobs = Vec::new();
    for &method in &config.methods {
        for &alpha in &config.alphas {
            jobs.push((method, alpha));
        }
    }
    let rows: Result<Vec<AitkenRow>> = jobs
        .par_iter()
        .map(|&(method, alpha)| {
            let order = FracOrder::new(alpha)?;
            let spec = porous_problem(order, config.x0, config.delta)?;
            let mesh = spec.mesh(config.dof)?;
            let opts = RunOptions {
                method,
                store: StoreMode::FinalOnly,
                allow_nonadmissible: true,
                ..RunOptions::default()
            };
            let mut finals = Vec::with_capacity(3);
            for level in 0..3 {
                let grid = TimeGrid::new(config.t_final, config.base_steps << level)?;
                finals.push(run(&spec, &mesh, grid, &opts)?.final_state().clone());
            }
            Ok(AitkenRow {
                method,
                alpha,
                order: aitken_order(&finals[0], &finals[1], &finals[2], &mesh),
            })
        })
        .collect();
    Ok(AitkenReport { rows: rows? })
}

/// Parameters of a naive-versus-compressed timing comparison on the
/// porous problem.
#[derive(Debug, Clone)]
pub struct TimingConfig {
    pub alpha: f64,
    pub steps: usize,
    pub dof: usize,
    pub t_final: f64,
    /// Independent repetitions; ratios are aggregated over them.
    pub reps: usize,
    pub epsilon: f64,
    pub n0: usize,
    pub x0: f64,
    pub delta: f64,
}

impl Default for TimingConfig {
    fn default() -> Self {
        TimingConfig {
            alpha: 0.5,
            steps: 512,
            dof: 15,
            t_final: 1.0,
            reps: 24,
            epsilon: 1e-6,
            n0: 5,
            x0: POROUS_X0_DEFAULT,
            delta: POROUS_DELTA_DEFAULT,
        }
    }
}

/// Aggregated timings of matched runs: the naive-history velocity form,
/// the compressed-history velocity form, and the L1 rule in direct form.
/// Ratios are naive over fast, computed per repetition and then averaged;
/// the first step of each run is excluded as warm-up.
#[derive(Debug, Clone, PartialEq)]
pub struct TimingSummary {
    pub steps: usize,
    pub reps: usize,
    pub naive_whole_ns_mean: f64,
    pub fast_whole_ns_mean: f64,
    pub l1_whole_ns_mean: f64,
    pub whole_ratio_mean: f64,
    pub whole_ratio_sd: f64,
    pub history_ratio_mean: f64,
    pub history_ratio_sd: f64,
    pub aux_state_count: usize,
    pub naive_history_ops: u64,
    pub fast_history_ops: u64,
}

fn mean_sd(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Times matched naive, compressed, and L1 runs of the porous problem.
/// The produced trajectories are deterministic; only the clock readings
/// vary between repetitions.
pub fn timing_comparison(config: &TimingConfig) -> Result<TimingSummary> {
    if config.reps == 0 {
        return Err(Error::InvalidParameter(
            "timing needs at least one repetition".into(),
        ));
    }
    let order = FracOrder::new(config.alpha)?;
    let spec = porous_problem(order, config.x0, config.delta)?;
    let mesh = spec.mesh(config.dof)?;
    let grid = TimeGrid::new(config.t_final, config.steps)?;
    let naive_opts = RunOptions {
        store: StoreMode::FinalOnly,
        form: SchemeForm::Velocity,
        ..RunOptions::default()
    };
    let fast_opts = RunOptions {
        history: HistoryMode::Fast {
            epsilon: config.epsilon,
            n0: config.n0,
        },
        ..naive_opts
    };
    let l1_opts = RunOptions {
        method: QuadratureMethod::L1,
        store: StoreMode::FinalOnly,
        form: SchemeForm::Direct,
        ..RunOptions::default()
    };

    let mut naive_whole = Vec::with_capacity(config.reps);
    let mut fast_whole = Vec::with_capacity(config.reps);
    let mut l1_whole = Vec::with_capacity(config.reps);
    let mut whole_ratios = Vec::with_capacity(config.reps);
    let mut history_ratios = Vec::with_capacity(config.reps);
    let mut aux = 0usize;
    let mut naive_ops = 0u64;
    let mut fast_ops = 0u64;
    for _ in 0..config.reps {
        let naive: Trajectory = run(&spec, &mesh, grid, &naive_opts)?;
        let fast: Trajectory = run(&spec, &mesh, grid, &fast_opts)?;
        let l1: Trajectory = run(&spec, &mesh, grid, &l1_opts)?;
        let nw = naive.total_wall_ns(true) as f64;
        let fw = fast.total_wall_ns(true) as f64;
        let nh = naive.total_history_ns(true) as f64;
        let fh = fast.total_history_ns(true) as f64;
        naive_whole.push(nw);
        fast_whole.push(fw);
        l1_whole.push(l1.total_wall_ns(true) as f64);
        whole_ratios.push(nw / fw.max(1.0));
        history_ratios.push(nh / fh.max(1.0));
        aux = fast.aux_state_count();
        naive_ops = naive.history_ops();
        fast_ops = fast.history_ops();
    }
    let (whole_ratio_mean, whole_ratio_sd) = mean_sd(&whole_ratios);
    let (history_ratio_mean, history_ratio_sd) = mean_sd(&history_ratios);
    Ok(TimingSummary {
        steps: config.steps,
        reps: config.reps,
        naive_whole_ns_mean: mean_sd(&naive_whole).0,
        fast_whole_ns_mean: mean_sd(&fast_whole).0,
        l1_whole_ns_mean: mean_sd(&l1_whole).0,
        whole_ratio_mean,
        whole_ratio_sd,
        history_ratio_mean,
        history_ratio_sd,
        aux_state_count: aux,
        naive_history_ops: naive_ops,
        fast_history_ops: fast_ops,
    })
}
