//! Assembly of the tridiagonal mass, stiffness, and load arrays.
//!
//! The mass matrix is integrated analytically. Stiffness and load use
//! 2-point Gauss quadrature per element, which is exact for the polynomial
//! degrees present when the coefficients are element-wise smooth and keeps
//! the quadrature error below the O(k^2) interpolation error. Nonlinear
//! coefficients are evaluated at the previous solution, interpolated
//! linearly to the quadrature points.

use super::{FemCoefVec, Mesh1D, ProblemSpec, TriDiag};
use crate::error::{Error, Result};

/// 2-point Gauss nodes on [0, 1]; both weights are 1/2.
const GAUSS2: [f64; 2] = [
    0.211_324_865_405_187_1, // (1 - 1/sqrt(3))/2
    0.788_675_134_594_812_9, // (1 + 1/sqrt(3))/2
];

/// Mass matrix of the tent basis: diag 2k/3, off-diagonals k/6.
pub fn assemble_mass(mesh: &Mesh1D) -> TriDiag {
    let m = mesh.interior();
    let k = mesh.k();
    TriDiag::new(
        vec![k / 6.0; m - 1],
        vec![2.0 * k / 3.0; m],
        vec![k / 6.0; m - 1],
    )
}

/// Stiffness matrix with coefficient `D(x, t, u_prev(x))` sampled at the
/// Gauss points of each element. Fails if the coefficient is not strictly
/// positive at any sampled point.
pub fn assemble_stiffness(
    mesh: &Mesh1D,
    spec: &ProblemSpec,
    t: f64,
    u_prev: &FemCoefVec,
) -> Result<TriDiag> {
    let m = mesh.interior();
    assert_eq!(u_prev.len(), m, "coefficient vector does not match mesh");
    let k = mesh.k();
    let mut a = TriDiag::zeros(m);
    for e in 0..mesh.elements() {
        let x_l = mesh.node(e);
        // Interior indices of the element's endpoints; -1 / m are boundary.
        let il = e as isize - 1;
        let ir = e as isize;
        let y_l = u_prev.value_or_boundary(il);
        let y_r = u_prev.value_or_boundary(ir);
        let mut d_sum = 0.0;
        for xi in GAUSS2 {
            let x = x_l + xi * k;
            let u = (1.0 - xi) * y_l + xi * y_r;
            let d = spec.diffusivity(x, t, u);
            if d.is_nan() || d <= 0.0 {
                return Err(Error::NonPositiveDiffusivity { x, t, value: d });
            }
            d_sum += d;
        }
        // Element integral of D * Phi_i' * Phi_j' with Phi' = +-1/k:
        // (k/2) * d_sum / k^2 on the diagonal couple, negated off it.
        let s = d_sum / (2.0 * k);
        scatter_element(&mut a, il, ir, s, m);
    }
    Ok(a)
}

fn scatter_element(a: &mut TriDiag, il: isize, ir: isize, s: f64, m: usize) {
    let left_in = il >= 0;
    let right_in = (ir as usize) < m;
    if left_in {
        a.diag[il as usize] += s;
    }
    if right_in {
        a.diag[ir as usize] += s;
    }
    if left_in && right_in {
        a.upper[il as usize] -= s;
        a.lower[il as usize] -= s;
    }
}

/// Load vector with entries `(f(., t, u_prev), Phi_i)` by 2-point Gauss.
pub fn assemble_load(mesh: &Mesh1D, spec: &ProblemSpec, t: f64, u_prev: &FemCoefVec) -> FemCoefVec {
    let m = mesh.interior();
    assert_eq!(u_prev.len(), m, "coefficient vector does not match mesh");
    let k = mesh.k();
    let mut rhs = vec![0.0; m];
    for e in 0..mesh.elements() {
        let x_l = mesh.node(e);
        let il = e as isize - 1;
        let ir = e as isize;
        let y_l = u_prev.value_or_boundary(il);
        let y_r = u_prev.value_or_boundary(ir);
        for xi in GAUSS2 {
            let x = x_l + xi * k;
            let u = (1.0 - xi) * y_l + xi * y_r;
            let fv = spec.source(x, t, u);
            // Hat restricted to the element: 1 - xi on the left dof, xi on
            // the right; element measure k, Gauss weight 1/2.
            let w = 0.5 * k * fv;
            if il >= 0 {
                rhs[il as usize] += w * (1.0 - xi);
            }
            if (ir as usize) < m {
                rhs[ir as usize] += w * xi;
            }
        }
    }
    FemCoefVec::new(rhs)
}
