//! Convolution-quadrature kernel: weight generation, admissibility and
//! consistency checks, discrete fractional operators, and the discrete
//! energy/Gronwall inequality verifiers.
//!
//! A fractional order `a` in (0,1) and a generating symbol `d(z)` (backward
//! Euler: `d(z) = 1 - z`; BDF2: `d(z) = 3/2 - 2z + z^2/2`) define quadrature
//! weights through the expansion
//!
//! ```text
//!   (d(z)/h)^{ a}  =  sum_j w_j z^j     (derivative weights)
//!   (d(z)/h)^{-a}  =  sum_j b_j z^j     (integral weights)
//! ```
//!
//! so that `sum_{j<=n} w_{n-j} y^j` approximates the Caputo derivative of a
//! function vanishing at t = 0, and the `b_j` approximate the fractional
//! integral. The two families are convolution inverses of each other.

mod checks;
mod mittag_leffler;
pub mod suites;
mod weights;

pub use checks::{verify_coercivity, verify_integrated_bound, CoercivityCheck};
pub use mittag_leffler::{mittag_leffler, ML_MAX_ABS_ARGUMENT};
pub use weights::{
    apply_discrete_operator, bdf2_weight_closed_form, check_admissible, generate_weights,
    l1_weights, partial_sums_defect, Admissibility,
};

use crate::error::{Error, Result};

/// Fractional order confined to (0, 1]. The value 1 is admitted only as the
/// integer-order limit used by sanity tests; the solvers require (0, 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FracOrder(f64);

impl FracOrder {
    pub fn new(alpha: f64) -> Result<Self> {
        if alpha.is_finite() && alpha > 0.0 && alpha <= 1.0 {
            Ok(FracOrder(alpha))
        } else {
            Err(Error::InvalidParameter(format!(
                "fractional order must lie in (0, 1], got {alpha}"
            )))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// True for genuinely fractional orders (excludes the limit value 1).
    pub fn is_fractional(self) -> bool {
        self.0 < 1.0
    }
}

/// Time discretization family for the fractional derivative.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QuadratureMethod {
    /// Backward Euler generating symbol, first order.
    Bdf1,
    /// Two-step BDF symbol, second order.
    Bdf2,
    /// Piecewise-linear interpolation of the Caputo integral; not a
    /// convolution quadrature, kept as a baseline for comparisons.
    L1,
}

impl QuadratureMethod {
    /// Coefficients of the generating symbol `d(z)` in ascending powers,
    /// `None` for L1 which has no generating symbol.
    pub fn symbol_coeffs(self) -> Option<&'static [f64]> {
        match self {
            QuadratureMethod::Bdf1 => Some(&[1.0, -1.0]),
            QuadratureMethod::Bdf2 => Some(&[1.5, -2.0, 0.5]),
            QuadratureMethod::L1 => None,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            QuadratureMethod::Bdf1 => "bdf1",
            QuadratureMethod::Bdf2 => "bdf2",
            QuadratureMethod::L1 => "l1",
        }
    }
}

impl std::fmt::Display for QuadratureMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// Whether a table discretizes the fractional derivative (symbol power `+a`)
/// or the fractional integral (symbol power `-a`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightKind {
    Derivative,
    Integral,
}

/// A finite run of quadrature weights `w_0 .. w_N` together with the
/// parameters that generated it.
#[derive(Debug, Clone)]
pub struct WeightTable {
    method: QuadratureMethod,
    kind: WeightKind,
    alpha: FracOrder,
    h: f64,
    weights: Vec<f64>,
}

impl WeightTable {
    pub(crate) fn new(
        method: QuadratureMethod,
        kind: WeightKind,
        alpha: FracOrder,
        h: f64,
        weights: Vec<f64>,
    ) -> Self {
        WeightTable {
            method,
            kind,
            alpha,
            h,
            weights,
        }
    }

    pub fn method(&self) -> QuadratureMethod {
        self.method
    }

    pub fn kind(&self) -> WeightKind {
        self.kind
    }

    pub fn alpha(&self) -> FracOrder {
        self.alpha
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    /// Number of stored weights (`N + 1` for indices `0..=N`).
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn get(&self, j: usize) -> Option<f64> {
        self.weights.get(j).copied()
    }

    pub fn w0(&self) -> f64 {
        self.weights[0]
    }
}

/// A finite sequence of same-dimensional real vectors, indexed from 0; the
/// abstract stand-in for trajectories in the inequality verifiers.
#[derive(Debug, Clone)]
pub struct SequenceL2 {
    values: Vec<Vec<f64>>,
    dim: usize,
}

impl SequenceL2 {
    pub fn new(values: Vec<Vec<f64>>) -> Result<Self> {
        let dim = match values.first() {
            Some(v) => v.len(),
            None => {
                return Err(Error::InvalidParameter(
                    "sequence must contain at least one entry".into(),
                ))
            }
        };
        if values.iter().any(|v| v.len() != dim) {
            return Err(Error::InvalidParameter(
                "all sequence entries must share one dimension".into(),
            ));
        }
        Ok(SequenceL2 { values, dim })
    }

    /// Builds a scalar sequence (dimension 1).
    pub fn from_scalars(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&v| vec![v]).collect())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, n: usize) -> Option<&[f64]> {
        self.values.get(n).map(|v| v.as_slice())
    }

    /// Euclidean norm of the n-th entry.
    pub fn norm(&self, n: usize) -> f64 {
        self.values[n].iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// True when the initial entry is the zero vector, the standing
    /// assumption (vanishing initial data) of the energy arguments.
    pub fn starts_at_zero(&self) -> bool {
        self.values[0].iter().all(|&v| v == 0.0)
    }
}
