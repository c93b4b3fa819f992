//! Test-only numeric helpers: error-free compensated (double-double)
//! accumulation for high-precision oracles, and adaptive Simpson quadrature
//! for integral oracles. Compiled only under `cfg(test)`.

/// Unevaluated sum `hi + lo` of two doubles with `|lo| <= ulp(hi)/2`,
/// giving roughly 32 significant decimal digits for accumulation.
#[derive(Debug, Clone, Copy)]
pub struct DoubleDouble {
    hi: f64,
    lo: f64,
}

impl DoubleDouble {
    pub fn zero() -> Self {
        DoubleDouble { hi: 0.0, lo: 0.0 }
    }

    pub fn hi(self) -> f64 {
        self.hi
    }

    pub fn value(self) -> f64 {
        self.hi + self.lo
    }

    /// Knuth two-sum.
    pub fn add_f64(self, v: f64) -> Self {
        let s = self.hi + v;
        let bb = s - self.hi;
        let err = (self.hi - (s - bb)) + (v - bb);
        let lo = self.lo + err;
        let hi = s + lo;
        let lo = lo - (hi - s);
        DoubleDouble { hi, lo }
    }
}

/// Adaptive Simpson quadrature to absolute tolerance `tol`.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(f: &dyn Fn(f64) -> f64, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        ((b - a) / 6.0 * (fa + 4.0 * fm + fb), m, fm)
    }
    // The argument list is the classical shape of the algorithm: interval,
    // cached endpoint/midpoint values, previous estimate, budget.
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        whole: f64,
        m: f64,
        fm: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let (left, lm, flm) = simpson(f, a, fa, m, fm);
        let (right, rm, frm) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            recurse(f, a, fa, m, fm, left, lm, flm, 0.5 * tol, depth - 1)
                + recurse(f, m, fm, b, fb, right, rm, frm, 0.5 * tol, depth - 1)
        }
    }
    let fa = f(a);
    let fb = f(b);
    let (whole, m, fm) = simpson(f, a, fa, b, fb);
    recurse(f, a, fa, b, fb, whole, m, fm, tol, 40)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn double_double_recovers_cancelled_tail() {
        // Sum 1 + 1e-20 - 1 in double-double keeps the 1e-20.
        let s = DoubleDouble::zero()
            .add_f64(1.0)
            .add_f64(1e-20)
            .add_f64(-1.0);
        assert!((s.value() - 1e-20).abs() < 1e-35);
    }

    #[test]
    fn simpson_integrates_smooth_functions() {
        let v = adaptive_simpson(&|x: f64| x.sin(), 0.0, std::f64::consts::PI, 1e-12);
        assert!((v - 2.0).abs() < 1e-10);
        let v = adaptive_simpson(&|x: f64| x * x, 0.0, 1.0, 1e-12);
        assert!((v - 1.0 / 3.0).abs() < 1e-12);
    }
}
