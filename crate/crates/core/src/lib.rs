//! Convolution-quadrature time stepping for quasilinear subdiffusion in one
//! space dimension.
//!
//! The crate discretizes
//!
//! ```text
//!   d^a u / dt^a  =  d/dx ( D(x, t, u) du/dx ) + f(x, t, u),   0 < a < 1,
//! ```
//!
//! with a fractional (Caputo) time derivative, homogeneous Dirichlet boundary
//! conditions and vanishing initial data. Time is discretized by convolution
//! quadrature generated by the backward Euler or BDF2 symbols (plus an L1
//! baseline), space by piecewise-linear finite elements on a uniform mesh,
//! and the nonlinearity is lagged one step so every step solves one
//! tridiagonal linear system.
//!
//! Modules:
//! * [`cq`] - quadrature weights, admissibility checks, discrete fractional
//!   operators and the inequality verifiers used by the test harness.
//! * [`fem1d`] - mesh, mass/stiffness/load assembly, tridiagonal solver and
//!   L2 norms/errors.
//! * [`stepper`] - the time-marching loop in direct and velocity form, with a
//!   naive history evaluator and a compressed sum-of-exponentials evaluator.
//! * [`experiments`] - manufactured and localized-source problems plus
//!   convergence-order and timing studies.
//! * [`io`] - CSV/JSON-lines writers for tables, states and study reports.

pub mod cq;
pub mod error;
pub mod experiments;
pub mod fem1d;
pub mod io;
pub mod stepper;

pub use cq::{
    check_admissible, generate_weights, l1_weights, mittag_leffler, Admissibility, FracOrder,
    QuadratureMethod, SequenceL2, WeightKind, WeightTable,
};
pub use error::{Error, Result};
pub use fem1d::{FemCoefVec, Mesh1D, ProblemSpec, TriDiag};
pub use stepper::{
    history_fast, history_naive, run, step_direct, step_velocity, FastHistory, HistoryMode,
    RunOptions, SchemeForm, StoreMode, TimeGrid, Trajectory,
};

#[cfg(test)]
mod testutil;
