//! Numerical verification of the discrete energy and Gronwall inequalities
//! that justify the semi-implicit scheme's stability.
//!
//! Both checks operate on concrete finite fixtures: a weight table plus a
//! sequence. They are exercised by randomized suites (see [`super::suites`])
//! and by the acceptance tests; they are also reachable from the CLI so the
//! inequalities can be probed on demand.

use super::weights::{apply_discrete_operator, check_admissible};
use super::{SequenceL2, WeightKind, WeightTable};
use crate::error::{Error, Result};

const REL_TOL: f64 = 1e-12;

/// The three quantities of the discrete coercivity chain at one step:
///
/// ```text
///   1/2 D_h^a ||y||^2 |_n  <=  ||y^n|| (D_h^a ||y||)|_n  <=  (D_h^a y^n, y^n)
/// ```
///
/// valid for admissible weights and sequences starting at zero.
#[derive(Debug, Clone, Copy)]
pub struct CoercivityCheck {
    /// `1/2 sum_j w_{n-j} ||y^j||^2`.
    pub lhs_half_square: f64,
    /// `||y^n|| sum_j w_{n-j} ||y^j||`.
    pub mid: f64,
    /// `sum_j w_{n-j} (y^j, y^n)`.
    pub rhs_inner: f64,
    /// Whether both inequalities hold up to a scale-relative tolerance.
    pub holds: bool,
}

/// Evaluates the coercivity chain at step `n`.
///
/// Refuses non-admissible tables (the chain's hypothesis) and sequences whose
/// initial entry is nonzero (the vanishing-initial-data assumption).
pub fn verify_coercivity(
    table: &WeightTable,
    seq: &SequenceL2,
    n: usize,
) -> Result<CoercivityCheck> {
    if table.kind() != WeightKind::Derivative {
        return Err(Error::InvalidParameter(
            "coercivity check requires a derivative-kind table".into(),
        ));
    }
    let adm = check_admissible(table);
    if !adm.admissible {
        return Err(Error::NotAdmissible {
            first_violation: adm.first_violation.unwrap_or(0),
        });
    }
    if !seq.starts_at_zero() {
        return Err(Error::InvalidParameter(
            "coercivity check requires a sequence starting at the zero vector".into(),
        ));
    }
    if n >= seq.len() || n >= table.len() {
        return Err(Error::IndexOutOfRange(format!(
            "step {n} exceeds sequence length {} or table length {}",
            seq.len(),
            table.len()
        )));
    }

    let w = table.weights();
    let norms: Vec<f64> = (0..=n).map(|j| seq.norm(j)).collect();
    let mut half_square = 0.0;
    let mut scalar = 0.0;
    for j in 0..=n {
        half_square += w[n - j] * norms[j] * norms[j];
        scalar += w[n - j] * norms[j];
    }
    let lhs_half_square = 0.5 * half_square;
    let mid = norms[n] * scalar;

    let yn = seq.get(n).expect("index checked above");
    let conv = apply_discrete_operator(table, seq, n)?;
    let rhs_inner: f64 = conv.iter().zip(yn).map(|(c, y)| c * y).sum();

    let max_norm = norms.iter().cloned().fold(0.0, f64::max);
    let weight_mass: f64 = w[..=n].iter().map(|v| v.abs()).sum();
    let tol = REL_TOL * (weight_mass * max_norm * max_norm).max(f64::MIN_POSITIVE);
    let holds = lhs_half_square <= mid + tol && mid <= rhs_inner + tol;

    Ok(CoercivityCheck {
        lhs_half_square,
        mid,
        rhs_inner,
        holds,
    })
}

/// Checks the integrated form of a discrete differential inequality: given
/// nonnegative scalar sequences with `y^0 = 0` satisfying the hypothesis
/// `(D_h^a y)^n <= G^n` for all n, the conclusion
///
/// ```text
///   y^n <= sum_{j=1}^{n} b_{n-j} G^j
/// ```
///
/// must hold, where `b` are the integral weights of the same rule. Returns
/// whether the conclusion holds at every step; a fixture that violates its
/// own hypothesis is rejected with the first offending index.
pub fn verify_integrated_bound(
    dtable: &WeightTable,
    itable: &WeightTable,
    y: &[f64],
    g: &[f64],
) -> Result<bool> {
    if dtable.kind() != WeightKind::Derivative || itable.kind() != WeightKind::Integral {
        return Err(Error::InvalidParameter(
            "expected a derivative table and an integral table".into(),
        ));
    }
    if dtable.method() != itable.method()
        || dtable.alpha() != itable.alpha()
        || dtable.h() != itable.h()
    {
        return Err(Error::InvalidParameter(
            "derivative and integral tables must share method, order and step size".into(),
        ));
    }
    let adm = check_admissible(dtable);
    if !adm.admissible {
        return Err(Error::NotAdmissible {
            first_violation: adm.first_violation.unwrap_or(0),
        });
    }
    if y.is_empty() || y.len() != g.len() {
        return Err(Error::InvalidParameter(
            "sequences must be nonempty and of equal length".into(),
        ));
    }
    if y.len() > dtable.len() || y.len() > itable.len() {
        return Err(Error::IndexOutOfRange(
            "sequences longer than the stored weight tables".into(),
        ));
    }
    if y[0] != 0.0 {
        return Err(Error::InvalidParameter("y must start at zero".into()));
    }
    if y.iter().any(|&v| v < 0.0) || g.iter().any(|&v| v < 0.0) {
        return Err(Error::InvalidParameter(
            "both sequences must be nonnegative".into(),
        ));
    }

    let w = dtable.weights();
    let b = itable.weights();
    let y_max = y.iter().cloned().fold(0.0, f64::max);
    let g_max = g.iter().cloned().fold(0.0, f64::max);
    let weight_mass: f64 = w[..y.len()].iter().map(|v| v.abs()).sum();
    let hyp_tol = REL_TOL * (weight_mass * y_max).max(f64::MIN_POSITIVE);

    for n in 1..y.len() {
        let mut dy = 0.0;
        for (j, &yj) in y.iter().enumerate().take(n + 1) {
            dy += w[n - j] * yj;
        }
        if dy > g[n] + hyp_tol {
            return Err(Error::InvalidFixture {
                n,
                detail: format!("discrete derivative {dy:e} exceeds bound {:e}", g[n]),
            });
        }
    }

    let b_mass: f64 = b[..y.len()].iter().sum();
    let concl_tol = REL_TOL * (b_mass * g_max).max(y_max).max(f64::MIN_POSITIVE);
    for n in 1..y.len() {
        let mut bound = 0.0;
        for (j, &gj) in g.iter().enumerate().take(n + 1).skip(1) {
            bound += b[n - j] * gj;
        }
        if y[n] > bound + concl_tol {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cq::{generate_weights, FracOrder, QuadratureMethod::*, WeightKind::*};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn fo(a: f64) -> FracOrder {
        FracOrder::new(a).unwrap()
    }

    #[test]
    fn zero_sequence_holds_with_equalities() {
        let t = generate_weights(Bdf1, fo(0.5), Derivative, 1.0, 8).unwrap();
        let seq = SequenceL2::new(vec![vec![0.0; 3]; 9]).unwrap();
        let c = verify_coercivity(&t, &seq, 8).unwrap();
        assert!(c.holds);
        assert_eq!(c.lhs_half_square, 0.0);
        assert_eq!(c.mid, 0.0);
        assert_eq!(c.rhs_inner, 0.0);
    }

    #[test]
    fn random_sequences_satisfy_the_chain() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for &(method, a) in &[
            (Bdf1, 0.2),
            (Bdf1, 0.5),
            (Bdf1, 0.8),
            (Bdf2, 0.3),
            (Bdf2, 0.6),
        ] {
            let t = generate_weights(method, fo(a), Derivative, 0.5, 40).unwrap();
            for _ in 0..200 {
                let mut vals = vec![vec![0.0; 5]];
                for _ in 0..40 {
                    vals.push((0..5).map(|_| rng.gen_range(-1.0..1.0)).collect());
                }
                let seq = SequenceL2::new(vals).unwrap();
                for n in [1usize, 17, 40] {
                    let c = verify_coercivity(&t, &seq, n).unwrap();
                    assert!(
                        c.holds,
                        "{method:?} a={a} n={n}: {} <= {} <= {}",
                        c.lhs_half_square, c.mid, c.rhs_inner
                    );
                }
            }
        }
    }

    #[test]
    fn non_admissible_table_is_refused() {
        let t = generate_weights(Bdf2, fo(0.8), Derivative, 1.0, 8).unwrap();
        let seq = SequenceL2::new(vec![vec![0.0]; 9]).unwrap();
        match verify_coercivity(&t, &seq, 4) {
            Err(Error::NotAdmissible { first_violation }) => assert_eq!(first_violation, 2),
            other => panic!("expected admissibility refusal, got {other:?}"),
        }
    }

    #[test]
    fn nonzero_start_is_refused() {
        let t = generate_weights(Bdf1, fo(0.5), Derivative, 1.0, 4).unwrap();
        let seq = SequenceL2::new(vec![vec![1.0]; 5]).unwrap();
        assert!(verify_coercivity(&t, &seq, 3).is_err());
    }

    #[test]
    fn integrated_bound_trivial_fixture() {
        // y = 0, G = 1: hypothesis 0 <= 1 holds, conclusion 0 <= sum b > 0.
        let d = generate_weights(Bdf1, fo(0.5), Derivative, 1.0, 16).unwrap();
        let i = generate_weights(Bdf1, fo(0.5), Integral, 1.0, 16).unwrap();
        let y = vec![0.0; 17];
        let g = vec![1.0; 17];
        assert!(verify_integrated_bound(&d, &i, &y, &g).unwrap());
    }

    #[test]
    fn integrated_bound_on_discrete_integral_fixture() {
        // y := discrete fractional integral of G gives equality up to
        // roundoff by the convolution-inverse identity.
        let d = generate_weights(Bdf2, fo(0.4), Derivative, 0.25, 64).unwrap();
        let i = generate_weights(Bdf2, fo(0.4), Integral, 0.25, 64).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut g = vec![0.0];
        for _ in 0..64 {
            g.push(rng.gen_range(0.0..2.0));
        }
        let b = i.weights();
        let y: Vec<f64> = (0..=64)
            .map(|n| (0..=n).map(|j| b[n - j] * g[j]).sum())
            .collect();
        assert!(verify_integrated_bound(&d, &i, &y, &g).unwrap());
    }

    #[test]
    fn integrated_bound_random_admissible_fixtures() {
        let d = generate_weights(Bdf1, fo(0.6), Derivative, 0.5, 48).unwrap();
        let i = generate_weights(Bdf1, fo(0.6), Integral, 0.5, 48).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..200 {
            let mut y = vec![0.0];
            for _ in 0..48 {
                y.push(rng.gen_range(0.0..1.0));
            }
            // Define G as the computed discrete derivative clipped from
            // below, so the hypothesis holds by construction.
            let w = d.weights();
            let g: Vec<f64> = (0..y.len())
                .map(|n| {
                    let dy: f64 = (0..=n).map(|j| w[n - j] * y[j]).sum();
                    dy.max(0.0) + 1e-9
                })
                .collect();
            assert!(verify_integrated_bound(&d, &i, &y, &g).unwrap());
        }
    }

    #[test]
    fn hypothesis_violation_reports_first_index() {
        let d = generate_weights(Bdf1, fo(0.5), Derivative, 1.0, 8).unwrap();
        let i = generate_weights(Bdf1, fo(0.5), Integral, 1.0, 8).unwrap();
        // y jumps to 5 at n = 3 while G stays at 1e-6; the discrete
        // derivative exceeds G there.
        let y = vec![0.0, 0.0, 0.0, 5.0, 5.0];
        let g = vec![1e-6; 5];
        match verify_integrated_bound(&d, &i, &y, &g) {
            Err(Error::InvalidFixture { n, .. }) => assert_eq!(n, 3),
            other => panic!("expected fixture rejection, got {other:?}"),
        }
    }

    #[test]
    fn mismatched_tables_are_refused() {
        let d = generate_weights(Bdf1, fo(0.5), Derivative, 1.0, 8).unwrap();
        let i = generate_weights(Bdf2, fo(0.5), Integral, 1.0, 8).unwrap();
        assert!(verify_integrated_bound(&d, &i, &[0.0, 0.1], &[1.0, 1.0]).is_err());
    }
}
