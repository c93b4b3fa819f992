//! Thomas algorithm for tridiagonal systems.

use super::{FemCoefVec, TriDiag};
use crate::error::{Error, Result};

const PIVOT_FLOOR: f64 = 1e-300;

/// Solves `A y = rhs` by single-pass LU without pivoting. The systems
/// arising here (`w_0 B + A` with positive `w_0` and positive diffusivity)
/// are symmetric positive definite and diagonally dominant, for which the
/// factorization is stable; a vanishing pivot is reported as an error
/// rather than producing infinities.
pub fn solve_tridiag(a: &TriDiag, rhs: &FemCoefVec) -> Result<FemCoefVec> {
    let n = a.n();
    assert_eq!(rhs.len(), n, "dimension mismatch in solve");
    let (lo, di, up) = (a.lower(), a.diag(), a.upper());
    let mut c = vec![0.0; n];
    let mut d = rhs.values().to_vec();
    let mut pivot = di[0];
    if pivot.abs() < PIVOT_FLOOR {
        return Err(Error::SingularSystem { row: 0, pivot });
    }
    if n > 1 {
        c[0] = up[0] / pivot;
    }
    d[0] /= pivot;
    for i in 1..n {
        pivot = di[i] - lo[i - 1] * c[i - 1];
        if pivot.abs() < PIVOT_FLOOR {
            return Err(Error::SingularSystem { row: i, pivot });
        }
        if i + 1 < n {
            c[i] = up[i] / pivot;
        }
        d[i] = (d[i] - lo[i - 1] * d[i - 1]) / pivot;
    }
    for i in (0..n - 1).rev() {
        d[i] -= c[i] * d[i + 1];
    }
    Ok(FemCoefVec::new(d))
}
