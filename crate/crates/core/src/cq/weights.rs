//! Weight generation and elementary consistency operations.
//!
//! Backward Euler weights are binomial-series coefficients of `(1 - z)^{+-a}`
//! scaled by `h^{-+a}`. BDF2 weights come from the factorization
//! `d(z) = 3/2 - 2z + z^2/2 = (3/2)(1 - z)(1 - z/3)`, expanded as the Cauchy
//! product of the two binomial series; the second factor's coefficients decay
//! like `3^-j`, which keeps the product numerically benign and lets the inner
//! sum stop once its terms drop below roundoff. A closed form for individual
//! BDF2 weights (terminating hypergeometric sum) provides an independent
//! cross-check route.

use super::{FracOrder, QuadratureMethod, SequenceL2, WeightKind, WeightTable};
use crate::error::{Error, Result};
use statrs::function::gamma::gamma;

/// Coefficients of the binomial series `(1 - z)^p = sum_j c_j z^j`:
/// `c_0 = 1`, `c_j = c_{j-1} (j - 1 - p) / j`.
fn binomial_series(p: f64, n: usize) -> Vec<f64> {
    let mut c = Vec::with_capacity(n + 1);
    c.push(1.0);
    for j in 1..=n {
        let jf = j as f64;
        let next = c[j - 1] * ((jf - 1.0 - p) / jf);
        c.push(next);
    }
    c
}

/// Coefficients of `(3/2)^p (1 - z)^p (1 - z/3)^p` by Cauchy product. Terms
/// of the second series below `TAIL_CUTOFF` contribute less than roundoff to
/// any product coefficient and are dropped.
fn bdf2_series(p: f64, n: usize) -> Vec<f64> {
    const TAIL_CUTOFF: f64 = 1e-40;
    let a = binomial_series(p, n);
    let mut g = Vec::new();
    let mut pow3 = 1.0;
    for (j, &aj) in a.iter().enumerate() {
        let gj = aj * pow3;
        if j > 0 && gj.abs() < TAIL_CUTOFF {
            break;
        }
        g.push(gj);
        pow3 /= 3.0;
    }
    let prefactor = 1.5f64.powf(p);
    (0..=n)
        .map(|m| {
            let mut s = 0.0;
            for (j, &gj) in g.iter().enumerate().take(m + 1) {
                s += gj * a[m - j];
            }
            prefactor * s
        })
        .collect()
}

/// Generates the first `n + 1` quadrature weights of the requested kind.
///
/// The `h`-dependence is applied as one common factor `h^{-+a}` on the unit
/// (`h = 1`) coefficients, so tables at different step sizes agree bit for
/// bit after rescaling.
pub fn generate_weights(
    method: QuadratureMethod,
    alpha: FracOrder,
    kind: WeightKind,
    h: f64,
    n: usize,
) -> Result<WeightTable> {
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "step size must be positive and finite, got {h}"
        )));
    }
    let p = match kind {
        WeightKind::Derivative => alpha.value(),
        WeightKind::Integral => -alpha.value(),
    };
    let unit = match method {
        QuadratureMethod::Bdf1 => binomial_series(p, n),
        QuadratureMethod::Bdf2 => bdf2_series(p, n),
        QuadratureMethod::L1 => {
            return Err(Error::InvalidParameter(
                "the L1 rule has no generating symbol; use l1_weights".into(),
            ))
        }
    };
    let scale = h.powf(-p);
    let weights = unit.into_iter().map(|c| scale * c).collect();
    Ok(WeightTable::new(method, kind, alpha, h, weights))
}

/// Single BDF2 derivative weight from the closed form
///
/// ```text
///   w_j = (-1)^j 2^{-a} 3^{a-j} C(a, j) F(-j, -a; 1 - j + a; 3) h^{-a},
/// ```
///
/// where `F` is the terminating Gauss hypergeometric sum, evaluated left to
/// right with per-term ratio updates (no transformation formulas). All terms
/// with k >= 1 share one sign, so the summation does not cancel
/// catastrophically even though individual terms grow like `3^k`.
pub fn bdf2_weight_closed_form(alpha: FracOrder, j: usize, h: f64) -> Result<f64> {
    let a = alpha.value();
    if !alpha.is_fractional() {
        return Err(Error::InvalidParameter(
            "closed-form weight requires a fractional order in (0, 1)".into(),
        ));
    }
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "step size must be positive and finite, got {h}"
        )));
    }
    let jf = j as f64;
    // Terminating 2F1 at argument 3: t_{k+1}/t_k = 3 (k-j)(k-a) / ((k+1)(1-j+a+k)).
    // The denominator factor 1-j+a+k never vanishes for fractional a.
    let mut sum = 1.0;
    let mut term = 1.0;
    for k in 0..j {
        let kf = k as f64;
        term *= 3.0 * (kf - jf) * (kf - a) / ((kf + 1.0) * (1.0 - jf + a + kf));
        sum += term;
    }
    let mut binom = 1.0;
    for i in 1..=j {
        binom *= (a - i as f64 + 1.0) / i as f64;
    }
    let sign = if j.is_multiple_of(2) { 1.0 } else { -1.0 };
    Ok(sign * 2f64.powf(-a) * 3f64.powf(a - jf) * binom * sum * h.powf(-a))
}

/// L1 coefficients packed in the convolution layout used by the steppers.
///
/// The L1 rule for the Caputo derivative of a function with `y^0 = 0` reads
/// `h^{-a}/Gamma(2-a) * sum_j d_j (y^{n-j} - y^{n-j-1})` with
/// `d_j = (j+1)^{1-a} - j^{1-a}`. Regrouping per value gives the stationary
/// weights `w_0 = c`, `w_j = c (d_j - d_{j-1})` (the n-dependent coefficient
/// of `y^0` is irrelevant because `y^0 = 0`), so the same convolution code
/// drives all three rules.
pub fn l1_weights(alpha: FracOrder, h: f64, n: usize) -> Result<WeightTable> {
    let a = alpha.value();
    if !alpha.is_fractional() {
        return Err(Error::InvalidParameter(
            "the L1 rule requires a fractional order in (0, 1)".into(),
        ));
    }
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "step size must be positive and finite, got {h}"
        )));
    }
    // d_j = (j+1)^{1-a} - j^{1-a}, evaluated in difference form to avoid the
    // cancellation of two nearly equal powers at large j.
    let increment = |j: usize| -> f64 {
        if j == 0 {
            1.0
        } else {
            let jf = j as f64;
            jf.powf(1.0 - a) * ((1.0 - a) * (1.0 / jf).ln_1p()).exp_m1()
        }
    };
    let mut unit = Vec::with_capacity(n + 1);
    unit.push(1.0);
    let mut prev = 1.0;
    for j in 1..=n {
        let dj = increment(j);
        unit.push(dj - prev);
        prev = dj;
    }
    let scale = h.powf(-a) / gamma(2.0 - a);
    let weights = unit.into_iter().map(|c| scale * c).collect();
    Ok(WeightTable::new(
        QuadratureMethod::L1,
        WeightKind::Derivative,
        alpha,
        h,
        weights,
    ))
}

/// Outcome of the sign-pattern check `w_0 > 0`, `w_j < 0` for `j >= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Admissibility {
    pub admissible: bool,
    /// Smallest index violating the pattern, if any.
    pub first_violation: Option<usize>,
}

/// Checks the sign pattern required by the discrete energy arguments on a
/// derivative-kind table.
pub fn check_admissible(table: &WeightTable) -> Admissibility {
    debug_assert_eq!(table.kind(), WeightKind::Derivative);
    let w = table.weights();
    if w.is_empty() || w[0] <= 0.0 {
        return Admissibility {
            admissible: false,
            first_violation: Some(0),
        };
    }
    for (j, &wj) in w.iter().enumerate().skip(1) {
        if wj >= 0.0 {
            return Admissibility {
                admissible: false,
                first_violation: Some(j),
            };
        }
    }
    Admissibility {
        admissible: true,
        first_violation: None,
    }
}

/// Partial sum `S_n = sum_{j<=n} w_j`. For an admissible derivative table
/// this is nonnegative, decreasing in n, and tends to zero; its size measures
/// how slowly the rule forgets the history.
///
/// Precondition: `n < table.len()`.
pub fn partial_sums_defect(table: &WeightTable, n: usize) -> f64 {
    assert!(
        n < table.len(),
        "partial sum index {n} exceeds stored weights {}",
        table.len()
    );
    table.weights()[..=n].iter().sum()
}

/// Applies the discrete convolution operator: returns
/// `sum_{j=0}^{n} w_{n-j} seq[j]` as a vector of the sequence dimension.
pub fn apply_discrete_operator(
    table: &WeightTable,
    seq: &SequenceL2,
    n: usize,
) -> Result<Vec<f64>> {
    if n >= seq.len() {
        return Err(Error::IndexOutOfRange(format!(
            "operator index {n} exceeds sequence length {}",
            seq.len()
        )));
    }
    if n >= table.len() {
        return Err(Error::IndexOutOfRange(format!(
            "operator index {n} exceeds stored weights {}",
            table.len()
        )));
    }
    let w = table.weights();
    let mut acc = vec![0.0; seq.dim()];
    for j in 0..=n {
        let wj = w[n - j];
        let yj = seq.get(j).expect("index checked above");
        for (a, &y) in acc.iter_mut().zip(yj) {
            *a += wj * y;
        }
    }
    Ok(acc)
}
