use crate::error::{Error, Result};
use crate::params::ReductionParams;
use crate::pde::grid::ScalarField2D;
use crate::scalar::Real;

/// Discrete residuals `(u_x − v_y, v_x + P'(w) u_y)` of the first-order system.
///
/// Central differences at interior nodes, `w = w(v² + y²)` from the branch
/// solver at each node; boundary entries are zero.
pub fn residual_first_order<T: Real>(
    params: &ReductionParams<T>,
    u: &ScalarField2D<T>,
    v: &ScalarField2D<T>,
) -> Result<(ScalarField2D<T>, ScalarField2D<T>)> {
    if u.domain() != v.domain() {
        return Err(Error::DomainMismatch);
    }
    let d = *u.domain();
    let mut r1 = ScalarField2D::zeros(d);
    let mut r2 = ScalarField2D::zeros(d);
    for (i, j) in d.interior_nodes() {
        let y = d.y(j);
        let vv = v.at(i, j);
        let pp = params.coefficient_f(vv * vv + y * y)?;
        r1.set(i, j, u.dx_central(i, j) - v.dy_central(i, j));
        r2.set(i, j, v.dx_central(i, j) + pp * u.dy_central(i, j));
    }
    Ok((r1, r2))
}

/// Nodal coefficient `P'(w(s))`, `s = (D_x f)² + y²`, of the potential equation.
pub(crate) fn potential_coefficient<T: Real>(
    params: &ReductionParams<T>,
    f: &ScalarField2D<T>,
    i: usize,
    j: usize,
) -> Result<T> {
    let fx = f.dx_central(i, j);
    let y = f.domain().y(j);
    params.coefficient_f(fx * fx + y * y)
}

/// Residual `D_xx f + P'(w) D_yy f` of the potential equation at interior nodes.
pub fn residual_potential<T: Real>(
    params: &ReductionParams<T>,
    f: &ScalarField2D<T>,
) -> Result<ScalarField2D<T>> {
    let d = *f.domain();
    let mut r = ScalarField2D::zeros(d);
    for (i, j) in d.interior_nodes() {
        let c = potential_coefficient(params, f, i, j)?;
        r.set(i, j, f.dxx(i, j) + c * f.dyy(i, j));
    }
    Ok(r)
}

/// Recovers `(u, v) = (f_y, f_x)` from the potential.
pub fn recover_uv<T: Real>(f: &ScalarField2D<T>) -> (ScalarField2D<T>, ScalarField2D<T>) {
    let d = *f.domain();
    let mut u = ScalarField2D::zeros(d);
    let mut v = ScalarField2D::zeros(d);
    for j in 0..d.ny() {
        for i in 0..d.nx() {
            u.set(i, j, f.dy(i, j));
            v.set(i, j, f.dx(i, j));
        }
    }
    (u, v)
}
