//! Seeded randomized verification suites over the weight-table inequalities.
//!
//! Each suite draws a batch of random fixtures from a [`ChaCha8Rng`] with a
//! caller-supplied seed, runs one of the checks from [`super::checks`] on
//! every fixture, and reports how many failed. The suites are deterministic
//! for a fixed seed, which keeps CLI reruns and CI reproducible.

use super::checks::{verify_coercivity, verify_integrated_bound};
use super::weights::generate_weights;
use super::{FracOrder, QuadratureMethod, SequenceL2, WeightKind};
use crate::error::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Aggregate result of one randomized suite.
#[derive(Debug, Clone)]
pub struct SuiteOutcome {
    /// Human-readable suite name.
    pub name: String,
    /// Number of fixtures attempted.
    pub samples: usize,
    /// Number of fixtures on which the checked property failed.
    pub failures: usize,
    /// Description of the first failure, if any.
    pub first_failure: Option<String>,
}

impl SuiteOutcome {
    fn new(name: &str) -> Self {
        SuiteOutcome {
            name: name.to_string(),
            samples: 0,
            failures: 0,
            first_failure: None,
        }
    }

    fn record(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.samples += 1;
        if !ok {
            self.failures += 1;
            if self.first_failure.is_none() {
                self.first_failure = Some(describe());
            }
        }
    }

    /// True when every attempted fixture passed.
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

/// Draws an admissible (method, order) pair. Second-order tables are only
/// admissible for orders below 5/8, so the draw is restricted accordingly.
fn draw_admissible(rng: &mut ChaCha8Rng) -> (QuadratureMethod, FracOrder) {
    if rng.gen_bool(0.5) {
        let a = rng.gen_range(0.05..0.95);
        (QuadratureMethod::Bdf1, FracOrder::new(a).unwrap())
    } else {
        let a = rng.gen_range(0.05..0.6);
        (QuadratureMethod::Bdf2, FracOrder::new(a).unwrap())
    }
}

/// Random vector-valued sequences starting at zero must satisfy the
/// coercivity chain at every checked step.
pub fn coercivity_suite(seed: u64, samples: usize) -> Result<SuiteOutcome> {
    const DIM: usize = 5;
    const STEPS: usize = 50;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut outcome = SuiteOutcome::new("coercivity");
    for s in 0..samples {
        let (method, alpha) = draw_admissible(&mut rng);
        let h = rng.gen_range(0.01..1.5);
        let table = generate_weights(method, alpha, WeightKind::Derivative, h, STEPS)?;
        let mut vals = vec![vec![0.0; DIM]];
        for _ in 0..STEPS {
            vals.push((0..DIM).map(|_| rng.gen_range(-2.0..2.0)).collect());
        }
        let seq = SequenceL2::new(vals)?;
        let n = rng.gen_range(1..=STEPS);
        let check = verify_coercivity(&table, &seq, n)?;
        outcome.record(check.holds, || {
            format!(
                "sample {s}: {} alpha={} n={n}: {} <= {} <= {} violated",
                method.label(),
                alpha.value(),
                check.lhs_half_square,
                check.mid,
                check.rhs_inner
            )
        });
    }
    Ok(outcome)
}

/// Random nonnegative scalar fixtures built to satisfy the differential
/// hypothesis must satisfy the integrated bound.
pub fn integrated_bound_suite(seed: u64, samples: usize) -> Result<SuiteOutcome> {
    const STEPS: usize = 200;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut outcome = SuiteOutcome::new("integrated-bound");
    for s in 0..samples {
        let (method, alpha) = draw_admissible(&mut rng);
        let h = rng.gen_range(0.01..1.0);
        let dtable = generate_weights(method, alpha, WeightKind::Derivative, h, STEPS)?;
        let itable = generate_weights(method, alpha, WeightKind::Integral, h, STEPS)?;
        let mut y = vec![0.0];
        for _ in 0..STEPS {
            y.push(rng.gen_range(0.0..1.0));
        }
        // G dominates the discrete derivative by construction, with a
        // random nonnegative margin so equality is not baked in.
        let w = dtable.weights();
        let g: Vec<f64> = (0..y.len())
            .map(|n| {
                let dy: f64 = (0..=n).map(|j| w[n - j] * y[j]).sum();
                dy.max(0.0) + rng.gen_range(0.0..0.1)
            })
            .collect();
        let ok = verify_integrated_bound(&dtable, &itable, &y, &g)?;
        outcome.record(ok, || {
            format!(
                "sample {s}: {} alpha={} h={h}: integrated bound violated",
                method.label(),
                alpha.value()
            )
        });
    }
    Ok(outcome)
}

/// The derivative and integral tables of one rule must be convolution
/// inverses: `sum_i w_i b_{m-i} = [m == 0]`.
pub fn convolution_inverse_suite(seed: u64, samples: usize) -> Result<SuiteOutcome> {
    const M_MAX: usize = 500;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut outcome = SuiteOutcome::new("convolution-inverse");
    for s in 0..samples {
        let method = if rng.gen_bool(0.5) {
            QuadratureMethod::Bdf1
        } else {
            QuadratureMethod::Bdf2
        };
        let alpha = FracOrder::new(rng.gen_range(0.05..0.95))?;
        let h = rng.gen_range(0.01..2.0);
        let w = generate_weights(method, alpha, WeightKind::Derivative, h, M_MAX)?;
        let b = generate_weights(method, alpha, WeightKind::Integral, h, M_MAX)?;
        let mut worst = 0.0f64;
        for m in 0..=M_MAX {
            let mut sum = 0.0;
            let mut mass = 0.0;
            for i in 0..=m {
                let term = w.weights()[i] * b.weights()[m - i];
                sum += term;
                mass += term.abs();
            }
            let target = if m == 0 { 1.0 } else { 0.0 };
            let defect = (sum - target).abs() / mass.max(1.0);
            worst = worst.max(defect);
        }
        outcome.record(worst <= 1e-12, || {
            format!(
                "sample {s}: {} alpha={} h={h}: worst relative defect {worst:e}",
                method.label(),
                alpha.value()
            )
        });
    }
    Ok(outcome)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coercivity_suite_is_clean_and_deterministic() {
        let a = coercivity_suite(1234, 100).unwrap();
        assert_eq!(a.samples, 100);
        assert!(a.passed(), "{:?}", a.first_failure);
        let b = coercivity_suite(1234, 100).unwrap();
        assert_eq!(a.failures, b.failures);
        assert_eq!(a.samples, b.samples);
    }

    #[test]
    fn integrated_bound_suite_is_clean() {
        let o = integrated_bound_suite(99, 50).unwrap();
        assert_eq!(o.samples, 50);
        assert!(o.passed(), "{:?}", o.first_failure);
    }

    #[test]
    fn convolution_inverse_suite_is_clean() {
        let o = convolution_inverse_suite(7, 10).unwrap();
        assert_eq!(o.samples, 10);
        assert!(o.passed(), "{:?}", o.first_failure);
    }

    #[test]
    fn vacuous_suite_passes() {
        let o = coercivity_suite(0, 0).unwrap();
        assert_eq!(o.samples, 0);
        assert!(o.passed());
    }
}
