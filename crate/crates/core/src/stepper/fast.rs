//! Compressed evaluation of the fractional-integral history sum.
//!
//! The velocity form of the scheme needs, at every step n, the lagged sum
//! `H^n = sum_{j=1}^{n-1} w~_{n-j} v_j` where `w~_j = h^b c_j` are the
//! first-order CQ weights of the fractional integral of order b and
//! `c_j` are the Taylor coefficients of `(1 - z)^{-b}`. Evaluated naively
//! this costs O(N^2) vector operations over a whole run.
//!
//! The coefficients admit the completely monotone representation
//!
//! ```text
//!   c_m = int_0^inf e^{-m t} g(t) dt,
//!   g(t) = (sin(pi b)/pi) e^{-b t} (1 - e^{-t})^{-b},
//! ```
//!
//! (substitute x = e^{-t} in the Beta-integral form of the binomial
//! coefficient). Discretizing the integral with quadrature nodes t_q gives
//! a sum-of-exponentials approximation `c_m ~ sum_q rho_q x_q^m` with
//! `x_q = e^{-t_q}`, uniformly accurate over a lag range [m_min, m_max].
//! Each exponential turns the lagged sum into one scalar recurrence per
//! node, so the tail of the history (lags beyond a short exact window n0)
//! is carried by Q = O(log N log(1/eps)) auxiliary vectors updated once
//! per step, and only the last n0 + 2 velocities are kept.
//!
//! Node placement: a graded head panel [0, a] with a Gauss rule for the
//! weight t^{-b} absorbs the endpoint singularity of g; the remainder
//! [a, T] is covered by geometrically growing panels with Gauss-Legendre
//! rules, T chosen so the truncated tail is below the tolerance for every
//! m >= m_min. All rules are built by the Golub-Welsch eigenvalue method.

use super::super::cq::{QuadratureMethod, WeightKind, WeightTable};
use crate::error::{Error, Result};
use std::collections::VecDeque;

/// Smallest history tolerance honored by the compressed evaluator; below
/// this the request is unreachable in 64-bit arithmetic.
pub const FAST_EPSILON_MIN: f64 = 1e-14;
/// Largest history tolerance accepted; the scheme is pointless beyond it.
pub const FAST_EPSILON_MAX: f64 = 1e-4;
/// Largest supported exact-window length.
pub const FAST_N0_MAX: usize = 64;

/// Eigenvalues (ascending, left in `d`) and first eigenvector components
/// (left in `first`) of a symmetric tridiagonal matrix, by the implicit
/// shift QL iteration. `e` holds the subdiagonal in `e[0..n-1]`.
fn symmetric_tridiag_eigen(d: &mut [f64], e: &mut [f64], first: &mut [f64]) -> Result<()> {
    let n = d.len();
    if n <= 1 {
        return Ok(());
    }
    for l in 0..n {
        let mut iter = 0;
        'sweep: loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::NoConvergence(
                    "tridiagonal eigenvalue iteration stalled".into(),
                ));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            let denom = g + if g >= 0.0 { r } else { -r };
            g = d[m] - d[l] + e[l] / denom;
            let (mut s, mut c, mut p) = (1.0f64, 1.0f64, 0.0f64);
            for i in (l..m).rev() {
                let mut f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    // Underflowed rotation: deflate and restart the sweep.
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    continue 'sweep;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                f = first[i + 1];
                first[i + 1] = s * first[i] + c * f;
                first[i] = c * first[i] - s * f;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    // Sort eigenpairs ascending.
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| d[i].total_cmp(&d[j]));
    let ds: Vec<f64> = idx.iter().map(|&i| d[i]).collect();
    let fs: Vec<f64> = idx.iter().map(|&i| first[i]).collect();
    d.copy_from_slice(&ds);
    first.copy_from_slice(&fs);
    Ok(())
}

/// Gauss rule from the Jacobi matrix of an orthogonal-polynomial family:
/// recurrence `p_{k+1} = (x - a_k) p_k - b_k p_{k-1}` with total weight
/// mass `mu0`. Returns nodes (ascending) and positive weights.
fn golub_welsch(diag: &[f64], offsq: &[f64], mu0: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = diag.len();
    let mut d = diag.to_vec();
    let mut e: Vec<f64> = offsq.iter().map(|b| b.sqrt()).collect();
    e.push(0.0);
    let mut first = vec![0.0; n];
    first[0] = 1.0;
    symmetric_tridiag_eigen(&mut d, &mut e, &mut first)?;
    let w = first.iter().map(|f| mu0 * f * f).collect();
    Ok((d, w))
}

/// n-point Gauss-Legendre rule on [-1, 1].
fn gauss_legendre(n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    assert!(n >= 1);
    let diag = vec![0.0; n];
    let offsq: Vec<f64> = (1..n)
        .map(|k| {
            let k = k as f64;
            k * k / (4.0 * k * k - 1.0)
        })
        .collect();
    golub_welsch(&diag, &offsq, 2.0)
}

/// n-point Gauss rule on [-1, 1] for the weight `(1 + x)^{-beta}`,
/// `0 < beta < 1` (singular at the left endpoint).
fn gauss_jacobi_left(n: usize, beta: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    assert!(n >= 1 && beta > 0.0 && beta < 1.0);
    let diag: Vec<f64> = (0..n)
        .map(|k| {
            let k2 = 2.0 * k as f64 - beta;
            beta * beta / (k2 * (k2 + 2.0))
        })
        .collect();
    let offsq: Vec<f64> = (1..n)
        .map(|k| {
            let kf = k as f64;
            let k2 = 2.0 * kf - beta;
            let num = 2.0 * kf * (kf - beta);
            (num / k2).powi(2) / (k2 * k2 - 1.0)
        })
        .collect();
    let mu0 = 2f64.powf(1.0 - beta) / (1.0 - beta);
    golub_welsch(&diag, &offsq, mu0)
}

/// `(1 - e^{-t})` evaluated without cancellation.
fn one_minus_exp_neg(t: f64) -> f64 {
    -(-t).exp_m1()
}

/// Sum-of-exponentials surrogate for the binomial coefficients `c_m` of
/// `(1 - z)^{-beta}`: `c_m ~ sum_q weight[q] * decay[q]^m`, absolutely
/// accurate to `eps` for all lags `m` in `[m_min, m_max]`.
#[derive(Debug, Clone)]
pub(crate) struct ExpSum {
    pub(crate) decay: Vec<f64>,
    pub(crate) weight: Vec<f64>,
}

impl ExpSum {
    pub(crate) fn build(beta: f64, m_min: usize, m_max: usize, eps: f64) -> Result<ExpSum> {
        assert!(beta > 0.0 && beta < 1.0, "integral order out of range");
        assert!(m_min >= 1);
        if m_max < m_min {
            return Ok(ExpSum {
                decay: Vec::new(),
                weight: Vec::new(),
            });
        }
        let sin_factor = (std::f64::consts::PI * beta).sin() / std::f64::consts::PI;
        // Truncation point: 0.51 e^{-mT}/m below a quarter of the budget
        // for every m >= m_min, with slack for the (1 - e^{-T})^{-beta}
        // prefactor when T is moderate.
        let mm = m_min as f64;
        let eps_q = 0.25 * eps;
        let t_max = (4.4 / (eps_q * mm)).ln() / mm;
        let a = (4.0 / m_max as f64).min(0.5 * t_max);

        // Geometric panels [c, 4c] covering [a, T].
        let mut panels = Vec::new();
        let mut c = a;
        while c < t_max {
            let hi = (4.0 * c).min(t_max);
            panels.push((c, hi));
            c = hi;
        }
        let n_leg =
            ((40.0 * panels.len().max(1) as f64 / eps).ln() / 9f64.ln()).ceil() as usize + 2;

        let mut decay = Vec::new();
        let mut weight = Vec::new();

        // Head panel [0, a]: pull the t^{-beta} endpoint behavior into the
        // quadrature weight; the remaining factor
        //   phi(t) = sin_factor * e^{-beta t} * ((1 - e^{-t})/t)^{-beta}
        // is analytic at t = 0.
        let (xs, ws) = gauss_jacobi_left(n_leg, beta)?;
        let head_scale = (0.5 * a).powf(1.0 - beta);
        for (s, w) in xs.iter().zip(&ws) {
            let t = 0.5 * a * (1.0 + s);
            let phi = sin_factor * (-beta * t).exp() * (one_minus_exp_neg(t) / t).powf(-beta);
            decay.push((-t).exp());
            weight.push(w * head_scale * phi);
        }

        // Dyadic panels: plain Gauss-Legendre on the full integrand.
        let (xl, wl) = gauss_legendre(n_leg)?;
        for (lo, hi) in panels {
            let half = 0.5 * (hi - lo);
            let mid = 0.5 * (lo + hi);
            for (s, w) in xl.iter().zip(&wl) {
                let t = mid + half * s;
                let g = sin_factor * (-beta * t).exp() * one_minus_exp_neg(t).powf(-beta);
                decay.push((-t).exp());
                weight.push(w * half * g);
            }
        }
        Ok(ExpSum { decay, weight })
    }

    pub(crate) fn len(&self) -> usize {
        self.decay.len()
    }
}

/// Streaming evaluator of the velocity-form history sum with an exact
/// recent window and a compressed exponential tail.
///
/// Per step n the caller first asks for the history `H~^n` (which also
/// advances the tail state by the velocity leaving the window) and then
/// pushes the newly computed velocity `v^n`:
///
/// ```text
///   let hist = fh.history();    // H~^n over lags 1..n-1
///   // ... solve for y^n, compute v^n ...
///   fh.push_velocity(&v);
/// ```
///
/// The approximation satisfies
/// `||H~^n - H^n|| <= eps * sum_j ||v_j|| * max_j |w~_j|` for n up to the
/// `n_max` given at construction.
#[derive(Debug, Clone)]
pub struct FastHistory {
    dim: usize,
    n0: usize,
    /// Integral weights of lags 1..n0 (window), including the h^b factor.
    window: Vec<f64>,
    /// Per-node decay factors x_q.
    decay: Vec<f64>,
    /// Per-node injection weights h^b rho_q x_q^{n0+1}.
    gamma: Vec<f64>,
    /// Auxiliary tail states, component-major: state[i*Q + q].
    state: Vec<f64>,
    /// The last n0 + 1 velocities, oldest first.
    ring: VecDeque<Vec<f64>>,
    awaiting_push: bool,
    ops: u64,
}

impl FastHistory {
    /// `int_weights` must be a first-order fractional-integral table (the
    /// velocity-form weights); `n_max` bounds the number of steps served.
    pub fn new(
        int_weights: &WeightTable,
        dim: usize,
        n_max: usize,
        epsilon: f64,
        n0: usize,
    ) -> Result<Self> {
        if int_weights.kind() != WeightKind::Integral
            || int_weights.method() != QuadratureMethod::Bdf1
        {
            return Err(Error::InvalidParameter(
                "compressed history requires first-order fractional-integral weights".into(),
            ));
        }
        if epsilon.is_nan() || epsilon < FAST_EPSILON_MIN {
            return Err(Error::InvalidParameter(format!(
                "history tolerance {epsilon:e} below {FAST_EPSILON_MIN:e} is unreachable in 64-bit arithmetic"
            )));
        }
        if epsilon > FAST_EPSILON_MAX {
            return Err(Error::InvalidParameter(format!(
                "history tolerance {epsilon:e} exceeds {FAST_EPSILON_MAX:e}"
            )));
        }
        if !(2..=FAST_N0_MAX).contains(&n0) {
            return Err(Error::InvalidParameter(format!(
                "exact window {n0} outside [2, {FAST_N0_MAX}]"
            )));
        }
        if int_weights.len() <= n0 {
            return Err(Error::InvalidParameter(
                "weight table shorter than the exact window".into(),
            ));
        }
        if dim == 0 {
            return Err(Error::InvalidParameter("empty state dimension".into()));
        }
        let beta = int_weights.alpha().value();
        let rep = ExpSum::build(beta, n0 + 1, n_max, epsilon)?;
        // w~_0 = h^b exactly, so the table's leading weight carries the
        // scale for the tail nodes.
        let h_b = int_weights.w0();
        let q = rep.len();
        let gamma: Vec<f64> = rep
            .weight
            .iter()
            .zip(&rep.decay)
            .map(|(w, x)| h_b * w * x.powi(n0 as i32 + 1))
            .collect();
        let window = int_weights.weights()[1..=n0].to_vec();
        let mut ring = VecDeque::with_capacity(n0 + 2);
        for _ in 0..=n0 {
            ring.push_back(vec![0.0; dim]);
        }
        Ok(FastHistory {
            dim,
            n0,
            window,
            decay: rep.decay,
            gamma,
            state: vec![0.0; dim * q],
            ring,
            awaiting_push: false,
            ops: 0,
        })
    }

    /// Number of auxiliary tail vectors (Q).
    pub fn state_count(&self) -> usize {
        self.decay.len()
    }

    /// Vector operations spent in history evaluation so far.
    pub fn ops(&self) -> u64 {
        self.ops
    }

    /// Evaluates `H~^n` for the current step and folds the velocity that
    /// leaves the exact window into the tail state.
    pub fn history(&mut self) -> Vec<f64> {
        assert!(
            !self.awaiting_push,
            "history() called again before push_velocity()"
        );
        self.awaiting_push = true;
        let q = self.decay.len();
        let oldest = self.ring.pop_front().expect("ring is never empty");
        if q > 0 {
            for (i, &vi) in oldest.iter().enumerate() {
                let row = &mut self.state[i * q..(i + 1) * q];
                for ((sq, &xq), &gq) in row.iter_mut().zip(&self.decay).zip(&self.gamma) {
                    *sq = xq * *sq + gq * vi;
                }
            }
        }
        let mut h = vec![0.0; self.dim];
        for (lag0, &w) in self.window.iter().enumerate() {
            let vj = &self.ring[self.ring.len() - 1 - lag0];
            for (hi, &vji) in h.iter_mut().zip(vj) {
                *hi += w * vji;
            }
        }
        if q > 0 {
            for (i, hi) in h.iter_mut().enumerate() {
                *hi += self.state[i * q..(i + 1) * q].iter().sum::<f64>();
            }
        }
        self.ops += self.n0 as u64 + 2 * q as u64;
        h
    }

    /// Stores the velocity of the step whose history was just evaluated.
    pub fn push_velocity(&mut self, v: &[f64]) {
        assert!(
            self.awaiting_push,
            "push_velocity() without a preceding history()"
        );
        assert_eq!(v.len(), self.dim, "velocity dimension mismatch");
        self.awaiting_push = false;
        self.ring.push_back(v.to_vec());
    }
}

/// Exact binomial coefficients of `(1 - z)^{-beta}` up to index n.
#[cfg(test)]
pub(crate) fn integral_coeffs(beta: f64, n: usize) -> Vec<f64> {
    let mut c = Vec::with_capacity(n + 1);
    c.push(1.0);
    for j in 1..=n {
        let prev = c[j - 1];
        c.push(prev * (j as f64 - 1.0 + beta) / j as f64);
    }
    c
}
