//! Discrete L2 norms, errors against reference functions, and nodal
//! interpolation.

use super::{FemCoefVec, Mesh1D};

/// 4-point Gauss nodes and weights on [-1, 1]; exact through degree 7,
/// ample for squared differences of linear functions against smooth ones.
const GAUSS4_X: [f64; 4] = [
    -0.861_136_311_594_052_6,
    -0.339_981_043_584_856_3,
    0.339_981_043_584_856_3,
    0.861_136_311_594_052_6,
];
const GAUSS4_W: [f64; 4] = [
    0.347_854_845_137_453_85,
    0.652_145_154_862_546_1,
    0.652_145_154_862_546_1,
    0.347_854_845_137_453_85,
];

/// L2 norm of the mesh function, via the closed form of the mass
/// quadratic form: `||u_h||^2 = k [ (2/3) sum y_j^2 + (1/3) sum y_j y_{j+1} ]`.
pub fn l2_norm(mesh: &Mesh1D, u: &FemCoefVec) -> f64 {
    let m = mesh.interior();
    assert_eq!(u.len(), m, "coefficient vector does not match mesh");
    let y = u.values();
    let sq: f64 = y.iter().map(|v| v * v).sum();
    let cross: f64 = y.windows(2).map(|w| w[0] * w[1]).sum();
    (mesh.k() * (2.0 / 3.0 * sq + cross / 3.0)).max(0.0).sqrt()
}

/// L2 distance between the mesh function and a reference `g`, by 4-point
/// Gauss quadrature on each element.
pub fn l2_error(mesh: &Mesh1D, u: &FemCoefVec, g: &dyn Fn(f64) -> f64) -> f64 {
    let m = mesh.interior();
    assert_eq!(u.len(), m, "coefficient vector does not match mesh");
    let k = mesh.k();
    let mut acc = 0.0;
    for e in 0..mesh.elements() {
        let x_l = mesh.node(e);
        let y_l = u.value_or_boundary(e as isize - 1);
        let y_r = u.value_or_boundary(e as isize);
        for (eta, w) in GAUSS4_X.iter().zip(GAUSS4_W) {
            let xi = 0.5 * (1.0 + eta);
            let x = x_l + xi * k;
            let uh = (1.0 - xi) * y_l + xi * y_r;
            let diff = uh - g(x);
            acc += 0.5 * k * w * diff * diff;
        }
    }
    acc.sqrt()
}

/// Nodal interpolant of `g` at the interior nodes.
pub fn interpolate(mesh: &Mesh1D, g: &dyn Fn(f64) -> f64) -> FemCoefVec {
    FemCoefVec::new(
        (0..mesh.interior())
            .map(|i| g(mesh.interior_node(i)))
            .collect(),
    )
}

/// Value of the mesh function at an arbitrary point of [a, b] (boundary
/// values are zero by construction). Points outside the interval clamp to
/// the nearest endpoint.
pub fn eval_at(mesh: &Mesh1D, u: &FemCoefVec, x: f64) -> f64 {
    let m = mesh.interior();
    assert_eq!(u.len(), m, "coefficient vector does not match mesh");
    let k = mesh.k();
    let s = ((x - mesh.a()) / k).clamp(0.0, (m + 1) as f64);
    let e = (s.floor() as usize).min(m);
    let xi = s - e as f64;
    let y_l = u.value_or_boundary(e as isize - 1);
    let y_r = u.value_or_boundary(e as isize);
    (1.0 - xi) * y_l + xi * y_r
}
