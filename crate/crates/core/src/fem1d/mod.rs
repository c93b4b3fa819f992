//! Piecewise-linear finite elements on a uniform 1-D mesh with homogeneous
//! Dirichlet boundary conditions.
//!
//! The mesh covers an interval (a, b) with M interior nodes and element size
//! k = (b - a)/(M + 1). Functions are expanded in the nodal tent basis
//! `Phi_j`, so a coefficient vector y represents
//!
//! ```text
//!   u_h(x) = sum_j y_j Phi_j(x),      u_h(a) = u_h(b) = 0.
//! ```
//!
//! Mass and stiffness matrices are tridiagonal; the stiffness coefficient
//! may depend on space, time, and the previous solution value, matching the
//! semi-implicit treatment of quasilinear problems where the coefficient is
//! frozen at the prior time level.

mod assembly;
mod norms;
mod solve;

pub use assembly::{assemble_load, assemble_mass, assemble_stiffness};
pub use norms::{eval_at, interpolate, l2_error, l2_norm};
pub use solve::solve_tridiag;

use crate::cq::FracOrder;
use crate::error::{Error, Result};
use std::sync::Arc;

/// Uniform mesh on (a, b) with `interior` unknown-carrying nodes.
///
/// Nodes are `x_j = a + j k` for `j = 0..=interior+1`; the two boundary
/// nodes carry no unknowns.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mesh1D {
    a: f64,
    b: f64,
    interior: usize,
}

impl Mesh1D {
    pub fn new(a: f64, b: f64, interior: usize) -> Result<Self> {
        if !a.is_finite() || !b.is_finite() || b <= a {
            return Err(Error::InvalidParameter(format!(
                "mesh interval ({a}, {b}) must be a finite nonempty interval"
            )));
        }
        if interior == 0 {
            return Err(Error::InvalidParameter(
                "mesh needs at least one interior node".into(),
            ));
        }
        Ok(Mesh1D { a, b, interior })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// Number of interior (unknown) nodes.
    pub fn interior(&self) -> usize {
        self.interior
    }

    /// Element size.
    pub fn k(&self) -> f64 {
        (self.b - self.a) / (self.interior + 1) as f64
    }

    /// Number of elements, `interior + 1`.
    pub fn elements(&self) -> usize {
        self.interior + 1
    }

    /// Global node coordinate, `j = 0..=interior+1`.
    pub fn node(&self, j: usize) -> f64 {
        debug_assert!(j <= self.interior + 1);
        self.a + j as f64 * self.k()
    }

    /// Coordinate of the i-th interior node, `i = 0..interior`.
    pub fn interior_node(&self, i: usize) -> f64 {
        self.node(i + 1)
    }
}

/// Nodal coefficients of a mesh function at the interior nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct FemCoefVec {
    values: Vec<f64>,
}

impl FemCoefVec {
    pub fn new(values: Vec<f64>) -> Self {
        FemCoefVec { values }
    }

    pub fn zeros(m: usize) -> Self {
        FemCoefVec {
            values: vec![0.0; m],
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.values
    }

    /// Nodal value extended by the homogeneous boundary condition: index
    /// positions `-1` and `len` (passed as global node offsets) read as 0.
    /// `i` is a signed interior index.
    pub(crate) fn value_or_boundary(&self, i: isize) -> f64 {
        if i < 0 || i as usize >= self.values.len() {
            0.0
        } else {
            self.values[i as usize]
        }
    }
}

impl std::ops::Index<usize> for FemCoefVec {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.values[i]
    }
}

impl AsRef<[f64]> for FemCoefVec {
    fn as_ref(&self) -> &[f64] {
        &self.values
    }
}

/// Tridiagonal matrix stored as three bands. Mass and stiffness matrices
/// are symmetric (`lower == upper`), but the solver does not assume it.
#[derive(Debug, Clone, PartialEq)]
pub struct TriDiag {
    lower: Vec<f64>,
    diag: Vec<f64>,
    upper: Vec<f64>,
}

impl TriDiag {
    pub fn new(lower: Vec<f64>, diag: Vec<f64>, upper: Vec<f64>) -> Self {
        assert!(
            !diag.is_empty() && lower.len() + 1 == diag.len() && upper.len() + 1 == diag.len(),
            "band lengths must be (n-1, n, n-1)"
        );
        TriDiag { lower, diag, upper }
    }

    pub fn zeros(n: usize) -> Self {
        assert!(n >= 1);
        TriDiag {
            lower: vec![0.0; n - 1],
            diag: vec![0.0; n],
            upper: vec![0.0; n - 1],
        }
    }

    pub fn n(&self) -> usize {
        self.diag.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn is_symmetric(&self) -> bool {
        self.lower == self.upper
    }

    /// `y = A x`.
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.n();
        assert_eq!(x.len(), n, "dimension mismatch in matvec");
        let mut y = vec![0.0; n];
        for i in 0..n {
            let mut s = self.diag[i] * x[i];
            if i > 0 {
                s += self.lower[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                s += self.upper[i] * x[i + 1];
            }
            y[i] = s;
        }
        y
    }

    /// `ca * a + cb * b`, entrywise over the bands.
    pub fn linear_comb(ca: f64, a: &TriDiag, cb: f64, b: &TriDiag) -> TriDiag {
        assert_eq!(a.n(), b.n(), "dimension mismatch in linear_comb");
        let comb = |u: &[f64], v: &[f64]| -> Vec<f64> {
            u.iter().zip(v).map(|(x, y)| ca * x + cb * y).collect()
        };
        TriDiag {
            lower: comb(&a.lower, &b.lower),
            diag: comb(&a.diag, &b.diag),
            upper: comb(&a.upper, &b.upper),
        }
    }

    /// Maximum absolute row sum.
    pub fn inf_norm(&self) -> f64 {
        let n = self.n();
        (0..n)
            .map(|i| {
                let mut s = self.diag[i].abs();
                if i > 0 {
                    s += self.lower[i - 1].abs();
                }
                if i + 1 < n {
                    s += self.upper[i].abs();
                }
                s
            })
            .fold(0.0, f64::max)
    }
}

type CoefFn = Arc<dyn Fn(f64, f64, f64) -> f64 + Send + Sync>;
type ExactFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// Continuous problem data: domain, fractional order, diffusivity
/// `D(x, t, u)`, source `f(x, t, u)`, and an optional exact solution
/// `u(x, t)` for error studies.
#[derive(Clone)]
pub struct ProblemSpec {
    domain: (f64, f64),
    alpha: FracOrder,
    diffusivity: CoefFn,
    source: CoefFn,
    exact: Option<ExactFn>,
}

impl ProblemSpec {
    pub fn new(
        domain: (f64, f64),
        alpha: FracOrder,
        diffusivity: impl Fn(f64, f64, f64) -> f64 + Send + Sync + 'static,
        source: impl Fn(f64, f64, f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        if !domain.0.is_finite() || !domain.1.is_finite() || domain.1 <= domain.0 {
            return Err(Error::InvalidParameter(format!(
                "domain ({}, {}) must be a finite nonempty interval",
                domain.0, domain.1
            )));
        }
        Ok(ProblemSpec {
            domain,
            alpha,
            diffusivity: Arc::new(diffusivity),
            source: Arc::new(source),
            exact: None,
        })
    }

    pub fn with_exact(mut self, exact: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        self.exact = Some(Arc::new(exact));
        self
    }

    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    pub fn alpha(&self) -> FracOrder {
        self.alpha
    }

    pub fn diffusivity(&self, x: f64, t: f64, u: f64) -> f64 {
        (self.diffusivity)(x, t, u)
    }

    pub fn source(&self, x: f64, t: f64, u: f64) -> f64 {
        (self.source)(x, t, u)
    }

    pub fn exact(&self, x: f64, t: f64) -> Option<f64> {
        self.exact.as_ref().map(|g| g(x, t))
    }

    pub fn has_exact(&self) -> bool {
        self.exact.is_some()
    }

    /// Mesh over this problem's domain with `m` interior nodes.
    pub fn mesh(&self, m: usize) -> Result<Mesh1D> {
        Mesh1D::new(self.domain.0, self.domain.1, m)
    }
}

impl std::fmt::Debug for ProblemSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ProblemSpec")
            .field("domain", &self.domain)
            .field("alpha", &self.alpha.value())
            .field("has_exact", &self.exact.is_some())
            .finish()
    }
}
