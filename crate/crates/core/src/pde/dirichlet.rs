//! Dirichlet problem for `f_xx + P'(w) f_yy = 0` on a rectangle.
//!
//! Picard iteration on the coefficient: freeze `P'(w)` from the current
//! iterate, relax the linear problem with red-black SOR, refresh. A refresh
//! that increases the nonlinear residual is damped.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::ReductionParams;
use crate::pde::grid::{BoundaryData, GridDomain, ScalarField2D};
use crate::pde::residual::{potential_coefficient, recover_uv};
use crate::scalar::{count, lit, to_f64, Real};

const COEFFICIENT_DAMPING: f64 = 0.7;
/// Each linear solve reduces its residual to this fraction of the nonlinear one.
const INNER_REDUCTION: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig<T> {
    /// Max-norm bound on the discrete potential residual.
    pub tolerance: T,
    /// Cap on the total number of SOR sweeps.
    pub max_iterations: usize,
    pub sor_factor: T,
    pub ellipticity_floor: T,
}

impl<T: Real> Default for SolverConfig<T> {
    fn default() -> Self {
        Self {
            tolerance: lit(1e-10),
            max_iterations: 10_000,
            sor_factor: lit(1.7),
            ellipticity_floor: lit(1e-10),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PdeSolution<T> {
    pub f: ScalarField2D<T>,
    /// `u = f_y`
    pub u: ScalarField2D<T>,
    /// `v = f_x`
    pub v: ScalarField2D<T>,
    /// Total SOR sweeps.
    pub iterations: usize,
    /// Coefficient refreshes.
    pub picard_steps: usize,
    pub final_residual: T,
    /// Smallest `P'(w)` over the interior nodes of the final iterate.
    pub ellipticity_margin: T,
    pub tolerance: T,
}

/// Transfinite (Coons) blend of boundary data; exact on the boundary.
pub fn transfinite_blend<T: Real>(domain: &GridDomain<T>, phi: &BoundaryData<T>) -> ScalarField2D<T> {
    let (nx, ny) = (domain.nx(), domain.ny());
    let mut edge = ScalarField2D::zeros(*domain);
    for (&(i, j), &val) in domain.boundary_nodes().iter().zip(phi.values()) {
        edge.set(i, j, val);
    }
    let mut f = edge.clone();
    let one = T::one();
    for (i, j) in domain.interior_nodes() {
        let s = count::<T>(i) / count(nx - 1);
        let t = count::<T>(j) / count(ny - 1);
        let lr = (one - s) * edge.at(0, j) + s * edge.at(nx - 1, j);
        let bt = (one - t) * edge.at(i, 0) + t * edge.at(i, ny - 1);
        let corners = (one - s) * (one - t) * edge.at(0, 0)
            + s * (one - t) * edge.at(nx - 1, 0)
            + (one - s) * t * edge.at(0, ny - 1)
            + s * t * edge.at(nx - 1, ny - 1);
        f.set(i, j, lr + bt - corners);
    }
    f
}

struct Workspace<'a, T> {
    params: &'a ReductionParams<T>,
    cfg: &'a SolverConfig<T>,
    f: ScalarField2D<T>,
    /// Frozen coefficient per node (interior entries used).
    coeff: Vec<T>,
}

impl<T: Real> Workspace<'_, T> {
    /// Evaluates `P'(w)` from the current iterate, checking the floor.
    fn evaluate_coefficients(&self) -> Result<Vec<T>> {
        let d = self.f.domain();
        let mut c = vec![T::zero(); d.len()];
        for (i, j) in d.interior_nodes() {
            let value = potential_coefficient(self.params, &self.f, i, j)?;
            if !(value >= self.cfg.ellipticity_floor) {
                return Err(Error::DegeneracyEncountered {
                    i,
                    j,
                    coefficient: to_f64(value),
                });
            }
            c[d.index(i, j)] = value;
        }
        Ok(c)
    }

    fn residual_with(&self, coeff: &[T]) -> T {
        let d = self.f.domain();
        d.interior_nodes().fold(T::zero(), |acc, (i, j)| {
            let r = self.f.dxx(i, j) + coeff[d.index(i, j)] * self.f.dyy(i, j);
            acc.max(r.abs())
        })
    }

    /// One red-black SOR sweep of the frozen-coefficient problem.
    fn sweep(&mut self) {
        let d = *self.f.domain();
        let ax = (d.hx() * d.hx()).recip();
        let ay = (d.hy() * d.hy()).recip();
        let omega = self.cfg.sor_factor;
        for color in 0..2 {
            for j in 1..d.ny() - 1 {
                let start = 1 + (j + 1 + color) % 2;
                for i in (start..d.nx() - 1).step_by(2) {
                    let c = self.coeff[d.index(i, j)];
                    let east_west = self.f.at(i + 1, j) + self.f.at(i - 1, j);
                    let north_south = self.f.at(i, j + 1) + self.f.at(i, j - 1);
                    let diag = (ax + c * ay) + (ax + c * ay);
                    let gs = (ax * east_west + c * ay * north_south) / diag;
                    let old = self.f.at(i, j);
                    self.f.set(i, j, old + omega * (gs - old));
                }
            }
        }
    }
}

/// Solves the Dirichlet problem in the nonsingular regime.
pub fn solve_dirichlet<T: Real>(
    params: &ReductionParams<T>,
    domain: &GridDomain<T>,
    phi: &BoundaryData<T>,
    cfg: &SolverConfig<T>,
) -> Result<PdeSolution<T>> {
    if !params.is_nonsingular() {
        return Err(Error::SingularParameters(params.min_multiplicity()));
    }
    if phi.values().len() != domain.boundary_len() {
        return Err(Error::InvalidInput("boundary data does not match the grid".into()));
    }
    let mut ws = Workspace {
        params,
        cfg,
        f: transfinite_blend(domain, phi),
        coeff: Vec::new(),
    };
    let mut fresh = ws.evaluate_coefficients()?;
    let mut residual = ws.residual_with(&fresh);
    ws.coeff = fresh.clone();
    let mut sweeps = 0usize;
    let mut picard_steps = 0usize;
    while residual > cfg.tolerance {
        let target = (residual * lit(INNER_REDUCTION)).max(cfg.tolerance * lit(0.25));
        loop {
            if sweeps >= cfg.max_iterations {
                return Err(Error::NoConvergence {
                    iterations: sweeps,
                    residual: to_f64(residual),
                });
            }
            ws.sweep();
            sweeps += 1;
            if ws.residual_with(&ws.coeff) <= target {
                break;
            }
        }
        picard_steps += 1;
        fresh = ws.evaluate_coefficients()?;
        let next = ws.residual_with(&fresh);
        if next > residual {
            let damp = lit::<T>(COEFFICIENT_DAMPING);
            for (c, &new) in ws.coeff.iter_mut().zip(&fresh) {
                *c = *c + damp * (new - *c);
            }
        } else {
            ws.coeff.clone_from(&fresh);
        }
        residual = next;
    }
    let d = *domain;
    let margin = d
        .interior_nodes()
        .fold(T::infinity(), |acc, (i, j)| acc.min(fresh[d.index(i, j)]));
    let (u, v) = recover_uv(&ws.f);
    Ok(PdeSolution {
        f: ws.f,
        u,
        v,
        iterations: sweeps,
        picard_steps,
        final_residual: residual,
        ellipticity_margin: margin,
        tolerance: cfg.tolerance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pde::residual::residual_potential;

    fn joyce() -> ReductionParams<f64> {
        ReductionParams::new(vec![1.0, -1.0]).unwrap()
    }

    #[test]
    fn bilinear_data_reproduced() {
        let d = GridDomain::square(-1.0, 1.0, 33).unwrap();
        let exact = |x: f64, y: f64| 2.0 * x * y + x - y;
        let phi = BoundaryData::from_fn(&d, exact);
        let sol = solve_dirichlet(&joyce(), &d, &phi, &SolverConfig::default()).unwrap();
        let err = ScalarField2D::from_fn(d, exact)
            .values()
            .iter()
            .zip(sol.f.values())
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        assert!(err < 1e-9, "max error {err}");
        assert!(sol.final_residual <= 1e-10);
    }

    #[test]
    fn constant_data_gives_constant_solution() {
        let d = GridDomain::new(0.0, 2.0, -1.0, 1.0, 9, 13).unwrap();
        let phi = BoundaryData::from_fn(&d, |_, _| 3.25);
        let sol = solve_dirichlet(&joyce(), &d, &phi, &SolverConfig::default()).unwrap();
        assert!(sol.f.values().iter().all(|&v| (v - 3.25).abs() < 1e-12));
        assert_eq!(sol.iterations, 0);
    }

    #[test]
    fn nonsolution_data_converges_within_boundary_range() {
        let p = ReductionParams::new(vec![0.5, 1.5, -0.5]).unwrap();
        let d: GridDomain<f64> = GridDomain::square(-1.0, 1.0, 21).unwrap();
        let phi = BoundaryData::from_fn(&d, |x, _| x * x);
        let cfg = SolverConfig::default();
        let sol = solve_dirichlet(&p, &d, &phi, &cfg).unwrap();
        let check = residual_potential(&p, &sol.f).unwrap().interior_max_abs();
        assert!(check <= cfg.tolerance, "independent residual {check}");
        for (&(i, j), &b) in d.boundary_nodes().iter().zip(phi.values()) {
            assert_eq!(sol.f.at(i, j).to_bits(), b.to_bits());
        }
        for (i, j) in d.interior_nodes() {
            let v = sol.f.at(i, j);
            assert!(v >= phi.min() - 10.0 * cfg.tolerance && v <= phi.max() + 10.0 * cfg.tolerance);
        }
        assert!(sol.ellipticity_margin > 0.0);
    }

    #[test]
    fn singular_parameters_rejected() {
        let p = ReductionParams::new(vec![1.0, 1.0, 2.0]).unwrap();
        let d = GridDomain::square(-1.0, 1.0, 9).unwrap();
        let phi = BoundaryData::from_fn(&d, |x, _| x);
        assert_eq!(
            solve_dirichlet(&p, &d, &phi, &SolverConfig::default()),
            Err(Error::SingularParameters(2))
        );
    }

    #[test]
    fn iteration_cap_reports_no_convergence() {
        let d = GridDomain::square(-1.0, 1.0, 17).unwrap();
        let phi = BoundaryData::from_fn(&d, |x, y| x * x - y);
        let cfg = SolverConfig {
            max_iterations: 3,
            ..SolverConfig::default()
        };
        match solve_dirichlet(&joyce(), &d, &phi, &cfg) {
            Err(Error::NoConvergence { iterations, .. }) => assert_eq!(iterations, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn ellipticity_floor_enforced() {
        let d = GridDomain::square(-1.0, 1.0, 9).unwrap();
        let phi = BoundaryData::from_fn(&d, |x, _| x);
        let cfg = SolverConfig {
            ellipticity_floor: 100.0,
            ..SolverConfig::default()
        };
        assert!(matches!(
            solve_dirichlet(&joyce(), &d, &phi, &cfg),
            Err(Error::DegeneracyEncountered { .. })
        ));
    }

    #[test]
    fn transfinite_blend_reproduces_bilinear_functions() {
        let d = GridDomain::new(-1.0, 3.0, 0.0, 1.0, 7, 5).unwrap();
        let g = |x: f64, y: f64| 0.5 - x + 2.0 * y + 0.25 * x * y;
        let f = transfinite_blend(&d, &BoundaryData::from_fn(&d, g));
        for j in 0..d.ny() {
            for i in 0..d.nx() {
                assert!((f.at(i, j) - g(d.x(i), d.y(j))).abs() < 1e-13);
            }
        }
    }
}
