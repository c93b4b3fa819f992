//! Time stepping for the semi-discrete subdiffusion system.
//!
//! With P1 mass matrix B and stiffness A(t, w) assembled at the frozen
//! state w, the semi-implicit scheme advances y^0 = 0 by solving, per
//! step, the linear system of the direct form
//!
//! ```text
//!   (w_0 B + A(t_n, y^{n-1})) y^n
//!       = F(t_n, y^{n-1}) - B sum_{j=1}^{n-1} w_{n-j} y^j,
//! ```
//!
//! where w_j are the generated weights of the fractional derivative
//! (first-order, second-order, or L1 rule). For the first-order rule the
//! same trajectory is produced by the velocity form, driven by the
//! weights w~_j of the fractional integral of order 1 - alpha:
//!
//! ```text
//!   ((w~_0/h) B + A(t_n, y^{n-1})) y^n
//!       = (w~_0/h) B y^{n-1} + F(t_n, y^{n-1}) - B H^n,
//!   H^n = sum_{j=1}^{n-1} w~_{n-j} v_j,   v_j = (y^j - y^{j-1})/h.
//! ```
//!
//! The velocity history H^n is evaluated either naively (O(n) per step)
//! or by the compressed sum-of-exponentials evaluator in [`fast`], which
//! keeps O(log n log 1/eps) auxiliary vectors and, combined with
//! [`StoreMode::FinalOnly`], runs in logarithmic memory.

mod fast;

pub use fast::{FastHistory, FAST_EPSILON_MAX, FAST_EPSILON_MIN, FAST_N0_MAX};

use crate::cq::{
    check_admissible, generate_weights, l1_weights, FracOrder, QuadratureMethod, WeightKind,
    WeightTable,
};
use crate::error::{Error, Result};
use crate::fem1d::{
    assemble_load, assemble_mass, assemble_stiffness, l2_norm, solve_tridiag, FemCoefVec, Mesh1D,
    ProblemSpec, TriDiag,
};
use std::time::Instant;

/// Uniform partition of [0, t_final] into `steps` intervals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    t_final: f64,
    steps: usize,
}

impl TimeGrid {
    pub fn new(t_final: f64, steps: usize) -> Result<Self> {
        if !(t_final.is_finite() && t_final > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "final time must be positive and finite, got {t_final}"
            )));
        }
        if steps == 0 {
            return Err(Error::InvalidParameter(
                "a run needs at least one time step".into(),
            ));
        }
        Ok(TimeGrid { t_final, steps })
    }

    pub fn t_final(&self) -> f64 {
        self.t_final
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Step size h = t_final / steps.
    pub fn h(&self) -> f64 {
        self.t_final / self.steps as f64
    }

    /// Node t_n = n h, for n = 0..=steps.
    pub fn t(&self, n: usize) -> f64 {
        assert!(n <= self.steps, "time index {n} out of range");
        n as f64 * self.h()
    }
}

/// How the velocity-form history sum is evaluated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HistoryMode {
    /// Exact lagged sum, O(n) vector operations at step n.
    Naive,
    /// Compressed sum-of-exponentials tail with an exact window of the
    /// `n0` most recent lags, accurate to `epsilon` (relative to the
    /// leading integral weight).
    Fast { epsilon: f64, n0: usize },
}

/// Which states the returned trajectory retains.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StoreMode {
    All,
    /// Keep only the final state. Together with the compressed history
    /// this bounds live memory by the window size instead of the step
    /// count; the naive evaluators still keep their full internal lag
    /// storage regardless.
    FinalOnly,
}

/// Algebraic form of the per-step linear system.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemeForm {
    /// Velocity form for the first-order rule with fractional order,
    /// direct form otherwise.
    Auto,
    Direct,
    /// Only defined for the first-order rule with fractional order.
    Velocity,
}

/// Knobs for [`run`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOptions {
    pub method: QuadratureMethod,
    pub history: HistoryMode,
    pub store: StoreMode,
    pub form: SchemeForm,
    /// Proceed even when the weight table fails the sign-pattern check
    /// backing the discrete energy estimates (second-order rule with
    /// alpha > 5/8). The computed trajectory is then outside the regime
    /// covered by the stability theory but often still converges.
    pub allow_nonadmissible: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            method: QuadratureMethod::Bdf1,
            history: HistoryMode::Naive,
            store: StoreMode::All,
            form: SchemeForm::Auto,
            allow_nonadmissible: false,
        }
    }
}

impl RunOptions {
    pub fn new(method: QuadratureMethod) -> Self {
        RunOptions {
            method,
            ..RunOptions::default()
        }
    }
}

/// Result of a time-stepping run: states (per [`StoreMode`]), norms, and
/// per-step phase timings.
#[derive(Debug, Clone)]
pub struct Trajectory {
    grid: TimeGrid,
    states: Option<Vec<FemCoefVec>>,
    final_state: FemCoefVec,
    l2_norms: Vec<f64>,
    step_assembly_ns: Vec<u64>,
    step_history_ns: Vec<u64>,
    step_solve_ns: Vec<u64>,
    history_ops: u64,
    aux_state_count: usize,
    cfl_violation: Option<usize>,
}

impl Trajectory {
    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    /// All states y^0..y^N when the run stored them.
    pub fn states(&self) -> Option<&[FemCoefVec]> {
        self.states.as_deref()
    }

    /// State at step n, if retained.
    pub fn state(&self, n: usize) -> Option<&FemCoefVec> {
        match &self.states {
            Some(s) => s.get(n),
            None if n == self.grid.steps() => Some(&self.final_state),
            None => None,
        }
    }

    pub fn final_state(&self) -> &FemCoefVec {
        &self.final_state
    }

    /// L2(0,1)-norms of y^0..y^N (always recorded).
    pub fn l2_norms(&self) -> &[f64] {
        &self.l2_norms
    }

    pub fn l2_norm_at(&self, n: usize) -> f64 {
        self.l2_norms[n]
    }

    pub fn max_l2_norm(&self) -> f64 {
        self.l2_norms.iter().fold(0.0f64, |a, &b| a.max(b))
    }

    /// Wall time of step n (1-based) across all phases, in nanoseconds.
    pub fn step_wall_ns(&self, n: usize) -> u64 {
        self.step_assembly_ns[n - 1] + self.step_history_ns[n - 1] + self.step_solve_ns[n - 1]
    }

    pub fn total_wall_ns(&self, skip_warmup: bool) -> u64 {
        total(&self.step_assembly_ns, skip_warmup)
            + total(&self.step_history_ns, skip_warmup)
            + total(&self.step_solve_ns, skip_warmup)
    }

    pub fn total_assembly_ns(&self, skip_warmup: bool) -> u64 {
        total(&self.step_assembly_ns, skip_warmup)
    }

    /// Time spent evaluating the lagged history sums.
    pub fn total_history_ns(&self, skip_warmup: bool) -> u64 {
        total(&self.step_history_ns, skip_warmup)
    }

    pub fn total_solve_ns(&self, skip_warmup: bool) -> u64 {
        total(&self.step_solve_ns, skip_warmup)
    }

    /// Vector operations spent on history sums over the whole run.
    pub fn history_ops(&self) -> u64 {
        self.history_ops
    }

    /// Auxiliary tail vectors carried by the compressed evaluator (0 for
    /// naive history).
    pub fn aux_state_count(&self) -> usize {
        self.aux_state_count
    }

    /// First step index n at which the step-size ratio h/k exceeded
    /// t_n^{1 - alpha/2}, the heuristic threshold below which the frozen
    /// coefficient lags the diffusion too much near t = 0. Diagnostic
    /// only; the run is not aborted.
    pub fn cfl_violation(&self) -> Option<usize> {
        self.cfl_violation
    }
}

fn total(v: &[u64], skip_warmup: bool) -> u64 {
    let s = if skip_warmup && v.len() > 1 {
        &v[1..]
    } else {
        v
    };
    s.iter().sum()
}

struct Phases {
    assembly_ns: u64,
    history_ns: u64,
    solve_ns: u64,
}

fn ns_between(a: Instant, b: Instant) -> u64 {
    b.duration_since(a).as_nanos() as u64
}

/// Per-step bookkeeping shared by both scheme forms.
struct Recorder<'m> {
    mesh: &'m Mesh1D,
    grid: TimeGrid,
    ratio: f64,
    exponent: f64,
    l2_norms: Vec<f64>,
    assembly_ns: Vec<u64>,
    history_ns: Vec<u64>,
    solve_ns: Vec<u64>,
    cfl: Option<usize>,
}

impl<'m> Recorder<'m> {
    fn new(mesh: &'m Mesh1D, grid: TimeGrid, alpha: f64) -> Self {
        let n = grid.steps();
        let mut l2_norms = Vec::with_capacity(n + 1);
        l2_norms.push(0.0);
        Recorder {
            mesh,
            grid,
            ratio: grid.h() / mesh.k(),
            exponent: 1.0 - 0.5 * alpha,
            l2_norms,
            assembly_ns: Vec::with_capacity(n),
            history_ns: Vec::with_capacity(n),
            solve_ns: Vec::with_capacity(n),
            cfl: None,
        }
    }

    fn push_step(&mut self, n: usize, y: &FemCoefVec, phases: Phases) {
        self.l2_norms.push(l2_norm(self.mesh, y));
        self.assembly_ns.push(phases.assembly_ns);
        self.history_ns.push(phases.history_ns);
        self.solve_ns.push(phases.solve_ns);
        if self.cfl.is_none() && self.ratio > self.grid.t(n).powf(self.exponent) {
            self.cfl = Some(n);
        }
    }

    fn finish(
        self,
        states: Option<Vec<FemCoefVec>>,
        final_state: FemCoefVec,
        history_ops: u64,
        aux_state_count: usize,
    ) -> Trajectory {
        Trajectory {
            grid: self.grid,
            states,
            final_state,
            l2_norms: self.l2_norms,
            step_assembly_ns: self.assembly_ns,
            step_history_ns: self.history_ns,
            step_solve_ns: self.solve_ns,
            history_ops,
            aux_state_count,
            cfl_violation: self.cfl,
        }
    }
}

/// Runs the scheme over the whole grid and returns the trajectory.
pub fn run(
    spec: &ProblemSpec,
    mesh: &Mesh1D,
    grid: TimeGrid,
    opts: &RunOptions,
) -> Result<Trajectory> {
    let (da, db) = spec.domain();
    if mesh.a() != da || mesh.b() != db {
        return Err(Error::InvalidParameter(
            "mesh does not cover the problem domain".into(),
        ));
    }
    let use_velocity = resolve_form(opts, spec.alpha())?;
    if matches!(opts.history, HistoryMode::Fast { .. }) && !use_velocity {
        return Err(Error::InvalidParameter(
            "compressed history requires the velocity form of the first-order rule".into(),
        ));
    }

    let deriv = match opts.method {
        QuadratureMethod::L1 => l1_weights(spec.alpha(), grid.h(), grid.steps())?,
        m => generate_weights(
            m,
            spec.alpha(),
            WeightKind::Derivative,
            grid.h(),
            grid.steps(),
        )?,
    };
    // The sign pattern backs the fractional energy estimates; at the
    // integer limit alpha = 1 the scheme is classical and the trailing
    // zero weights would trip the strict check for no reason.
    if spec.alpha().is_fractional() {
        let adm = check_admissible(&deriv);
        if !adm.admissible && !opts.allow_nonadmissible {
            return Err(Error::NotAdmissible {
                first_violation: adm.first_violation.unwrap_or(0),
            });
        }
    }

    let mass = assemble_mass(mesh);
    if use_velocity {
        run_velocity(spec, mesh, grid, opts, &mass)
    } else {
        run_direct(spec, mesh, grid, opts, &deriv, &mass)
    }
}

fn resolve_form(opts: &RunOptions, alpha: FracOrder) -> Result<bool> {
    match (opts.form, opts.method) {
        (SchemeForm::Direct, _) => Ok(false),
        (SchemeForm::Velocity, QuadratureMethod::Bdf1) => {
            if alpha.is_fractional() {
                Ok(true)
            } else {
                Err(Error::InvalidParameter(
                    "velocity form requires a fractional order in (0, 1)".into(),
                ))
            }
        }
        (SchemeForm::Velocity, _) => Err(Error::InvalidParameter(
            "velocity form is only defined for the first-order rule".into(),
        )),
        (SchemeForm::Auto, QuadratureMethod::Bdf1) if alpha.is_fractional() => Ok(true),
        (SchemeForm::Auto, _) => Ok(false),
    }
}

fn run_direct(
    spec: &ProblemSpec,
    mesh: &Mesh1D,
    grid: TimeGrid,
    opts: &RunOptions,
    deriv: &WeightTable,
    mass: &TriDiag,
) -> Result<Trajectory> {
    let m = mesh.interior();
    let n_steps = grid.steps();
    // The direct form is its own history; all states stay live internally.
    let mut states: Vec<FemCoefVec> = Vec::with_capacity(n_steps + 1);
    states.push(FemCoefVec::zeros(m));
    let mut rec = Recorder::new(mesh, grid, spec.alpha().value());
    let mut history_ops = 0u64;
    for n in 1..=n_steps {
        let (y, phases) =
            direct_step_core(spec, mesh, grid.t(n), mass, deriv.weights(), &states, n)?;
        history_ops += (n - 1) as u64;
        rec.push_step(n, &y, phases);
        states.push(y);
    }
    let final_state = states.last().expect("states contain y^0").clone();
    let kept = match opts.store {
        StoreMode::All => Some(states),
        StoreMode::FinalOnly => None,
    };
    Ok(rec.finish(kept, final_state, history_ops, 0))
}

fn direct_step_core(
    spec: &ProblemSpec,
    mesh: &Mesh1D,
    t: f64,
    mass: &TriDiag,
    w: &[f64],
    states: &[FemCoefVec],
    n: usize,
) -> Result<(FemCoefVec, Phases)> {
    let m = mesh.interior();
    let y_prev = &states[n - 1];
    let t0 = Instant::now();
    let a = assemble_stiffness(mesh, spec, t, y_prev)?;
    let load = assemble_load(mesh, spec, t, y_prev);
    let t1 = Instant::now();
    let mut hist = vec![0.0; m];
    for (j, yj) in states.iter().enumerate().take(n).skip(1) {
        let wj = w[n - j];
        for (hi, &yi) in hist.iter_mut().zip(yj.values()) {
            *hi += wj * yi;
        }
    }
    let t2 = Instant::now();
    let bh = mass.matvec(&hist);
    let mut rhs = Vec::with_capacity(m);
    for i in 0..m {
        rhs.push(load[i] - bh[i]);
    }
    let lhs = TriDiag::linear_comb(w[0], mass, 1.0, &a);
    let y = solve_tridiag(&lhs, &FemCoefVec::new(rhs))?;
    let t3 = Instant::now();
    Ok((
        y,
        Phases {
            assembly_ns: ns_between(t0, t1),
            history_ns: ns_between(t1, t2),
            solve_ns: ns_between(t2, t3),
        },
    ))
}

enum VelocityBackend {
    Naive(Vec<FemCoefVec>),
    Fast(FastHistory),
}

fn run_velocity(
    spec: &ProblemSpec,
    mesh: &Mesh1D,
    grid: TimeGrid,
    opts: &RunOptions,
    mass: &TriDiag,
) -> Result<Trajectory> {
    let m = mesh.interior();
    let n_steps = grid.steps();
    let h = grid.h();
    let beta = FracOrder::new(1.0 - spec.alpha().value())?;
    let int_table = generate_weights(
        QuadratureMethod::Bdf1,
        beta,
        WeightKind::Integral,
        h,
        n_steps,
    )?;
    let w0h = int_table.w0() / h;

    let mut backend = match opts.history {
        HistoryMode::Naive => {
            let mut vels = Vec::with_capacity(n_steps + 1);
            vels.push(FemCoefVec::zeros(m));
            VelocityBackend::Naive(vels)
        }
        HistoryMode::Fast { epsilon, n0 } => {
            VelocityBackend::Fast(FastHistory::new(&int_table, m, n_steps, epsilon, n0)?)
        }
    };

    let keep_states = matches!(opts.store, StoreMode::All);
    let mut states: Vec<FemCoefVec> = Vec::new();
    if keep_states {
        states.reserve(n_steps + 1);
        states.push(FemCoefVec::zeros(m));
    }
    let mut y_prev = FemCoefVec::zeros(m);
    let mut rec = Recorder::new(mesh, grid, spec.alpha().value());
    let mut naive_ops = 0u64;

    for n in 1..=n_steps {
        let t = grid.t(n);
        let th = Instant::now();
        let hist = match &mut backend {
            VelocityBackend::Naive(vels) => {
                let w = int_table.weights();
                let mut hv = vec![0.0; m];
                for (j, vj) in vels.iter().enumerate().take(n).skip(1) {
                    let wj = w[n - j];
                    for (hi, &vi) in hv.iter_mut().zip(vj.values()) {
                        *hi += wj * vi;
                    }
                }
                naive_ops += (n - 1) as u64;
                hv
            }
            VelocityBackend::Fast(fh) => fh.history(),
        };
        let history_ns = ns_between(th, Instant::now());
        let (y, assembly_ns, solve_ns) =
            velocity_step_core(spec, mesh, t, mass, w0h, &y_prev, &hist)?;
        let mut v = Vec::with_capacity(m);
        for i in 0..m {
            v.push((y[i] - y_prev[i]) / h);
        }
        match &mut backend {
            VelocityBackend::Naive(vels) => vels.push(FemCoefVec::new(v)),
            VelocityBackend::Fast(fh) => fh.push_velocity(&v),
        }
        rec.push_step(
            n,
            &y,
            Phases {
                assembly_ns,
                history_ns,
                solve_ns,
            },
        );
        if keep_states {
            states.push(y.clone());
        }
        y_prev = y;
    }
    let (history_ops, aux) = match backend {
        VelocityBackend::Naive(_) => (naive_ops, 0),
        VelocityBackend::Fast(fh) => (fh.ops(), fh.state_count()),
    };
    let kept = if keep_states { Some(states) } else { None };
    Ok(rec.finish(kept, y_prev, history_ops, aux))
}

fn velocity_step_core(
    spec: &ProblemSpec,
    mesh: &Mesh1D,
    t: f64,
    mass: &TriDiag,
    w0h: f64,
    y_prev: &FemCoefVec,
    hist: &[f64],
) -> Result<(FemCoefVec, u64, u64)> {
    let m = mesh.interior();
    let t0 = Instant::now();
    let a = assemble_stiffness(mesh, spec, t, y_prev)?;
    let load = assemble_load(mesh, spec, t, y_prev);
    let t1 = Instant::now();
    let by = mass.matvec(y_prev.values());
    let bh = mass.matvec(hist);
    let mut rhs = Vec::with_capacity(m);
    for i in 0..m {
        rhs.push(w0h * by[i] - bh[i] + load[i]);
    }
    let lhs = TriDiag::linear_comb(w0h, mass, 1.0, &a);
    let y = solve_tridiag(&lhs, &FemCoefVec::new(rhs))?;
    let t2 = Instant::now();
    Ok((y, ns_between(t0, t1), ns_between(t1, t2)))
}

/// One step of the direct form: given y^0..y^{n-1} in `history`, returns
/// y^n. `weights` must be a derivative-kind table on the grid's step size
/// with at least n entries.
pub fn step_direct(
    spec: &ProblemSpec,
    mesh: &Mesh1D,
    grid: &TimeGrid,
    weights: &WeightTable,
    history: &[FemCoefVec],
    n: usize,
) -> Result<FemCoefVec> {
    if weights.kind() != WeightKind::Derivative {
        return Err(Error::InvalidParameter(
            "direct stepping uses derivative-kind weights".into(),
        ));
    }
    check_step_args(mesh, grid, weights.h(), weights.len(), history, n)?;
    let mass = assemble_mass(mesh);
    direct_step_core(spec, mesh, grid.t(n), &mass, weights.weights(), history, n).map(|(y, _)| y)
}

/// One step of the velocity form: given y^{n-1} and the velocities
/// v_0..v_{n-1}, returns y^n. `int_weights` must be the first-order
/// fractional-integral table of order 1 - alpha on the grid's step size.
pub fn step_velocity(
    spec: &ProblemSpec,
    mesh: &Mesh1D,
    grid: &TimeGrid,
    int_weights: &WeightTable,
    y_prev: &FemCoefVec,
    velocities: &[FemCoefVec],
    n: usize,
) -> Result<FemCoefVec> {
    check_step_args(
        mesh,
        grid,
        int_weights.h(),
        int_weights.len(),
        velocities,
        n,
    )?;
    if y_prev.len() != mesh.interior() {
        return Err(Error::InvalidParameter(
            "previous state does not match the mesh".into(),
        ));
    }
    let hist = history_naive(int_weights, velocities, n)?;
    let mass = assemble_mass(mesh);
    let w0h = int_weights.w0() / grid.h();
    velocity_step_core(spec, mesh, grid.t(n), &mass, w0h, y_prev, &hist).map(|(y, _, _)| y)
}

fn check_step_args(
    mesh: &Mesh1D,
    grid: &TimeGrid,
    table_h: f64,
    table_len: usize,
    lagged: &[FemCoefVec],
    n: usize,
) -> Result<()> {
    if n == 0 || n > grid.steps() {
        return Err(Error::IndexOutOfRange(format!(
            "step index {n} outside 1..={}",
            grid.steps()
        )));
    }
    let h = grid.h();
    if (table_h - h).abs() > 1e-12 * h {
        return Err(Error::InvalidParameter(format!(
            "weight table step size {table_h} does not match the grid step {h}"
        )));
    }
    if table_len < n {
        return Err(Error::InvalidParameter(format!(
            "weight table has {table_len} entries, step {n} needs {n}"
        )));
    }
    if lagged.len() < n {
        return Err(Error::InvalidParameter(format!(
            "need {n} lagged vectors, got {}",
            lagged.len()
        )));
    }
    if lagged.iter().any(|v| v.len() != mesh.interior()) {
        return Err(Error::InvalidParameter(
            "lagged vector does not match the mesh".into(),
        ));
    }
    Ok(())
}

/// Exact velocity-form history sum `H^n = sum_{j=1}^{n-1} w~_{n-j} v_j`.
/// `velocities[j]` holds v_j (v_0 is only read for its dimension).
pub fn history_naive(
    int_weights: &WeightTable,
    velocities: &[FemCoefVec],
    n: usize,
) -> Result<Vec<f64>> {
    if int_weights.kind() != WeightKind::Integral {
        return Err(Error::InvalidParameter(
            "history sums use fractional-integral weights".into(),
        ));
    }
    if n == 0 || n > int_weights.len() {
        return Err(Error::IndexOutOfRange(format!(
            "history index {n} outside 1..={}",
            int_weights.len()
        )));
    }
    if velocities.len() < n {
        return Err(Error::InvalidParameter(format!(
            "need velocities v_0..v_{}, got {}",
            n - 1,
            velocities.len()
        )));
    }
    let m = velocities[0].len();
    if velocities.iter().take(n).any(|v| v.len() != m) {
        return Err(Error::InvalidParameter(
            "velocity dimensions are inconsistent".into(),
        ));
    }
    let w = int_weights.weights();
    let mut hv = vec![0.0; m];
    for (j, vj) in velocities.iter().enumerate().take(n).skip(1) {
        let wj = w[n - j];
        for (hi, &vi) in hv.iter_mut().zip(vj.values()) {
            *hi += wj * vi;
        }
    }
    Ok(hv)
}

/// Compressed history sum: replays v_1..v_{n-1} through a fresh
/// [`FastHistory`] and returns its approximation of H^n.
pub fn history_fast(
    int_weights: &WeightTable,
    velocities: &[FemCoefVec],
    n: usize,
    epsilon: f64,
    n0: usize,
) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::IndexOutOfRange("history index 0".into()));
    }
    if velocities.len() < n {
        return Err(Error::InvalidParameter(format!(
            "need velocities v_0..v_{}, got {}",
            n - 1,
            velocities.len()
        )));
    }
    let m = velocities[0].len();
    let mut fh = FastHistory::new(int_weights, m, n, epsilon, n0)?;
    for vj in velocities.iter().take(n).skip(1) {
        if vj.len() != m {
            return Err(Error::InvalidParameter(
                "velocity dimensions are inconsistent".into(),
            ));
        }
        let _ = fh.history();
        fh.push_velocity(vj.values());
    }
    Ok(fh.history())
}
