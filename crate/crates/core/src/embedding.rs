//! Lifting planar data `(x, y, u, v)` to points of the n-fold in ℂⁿ.
//!
//! A point satisfies `|z_j|² = w + a_j` for `j < n`, the product relation
//! `i^{n-3} z_1 ⋯ z_{n-1} = v + iy` and `z_n = x + iu`. Only the sum of the
//! first `n - 1` angles is fixed; the remaining `n - 2` are torus
//! coordinates.

use num_complex::Complex;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::ReductionParams;
use crate::pde::{PdeSolution, ScalarField2D};
use crate::scalar::{count, Real};

/// `i^k` as an exact unit complex number.
pub fn i_pow<T: Real>(k: i64) -> Complex<T> {
    let (o, z) = (T::one(), T::zero());
    match k.rem_euclid(4) {
        0 => Complex::new(o, z),
        1 => Complex::new(z, o),
        2 => Complex::new(-o, z),
        _ => Complex::new(z, -o),
    }
}

/// A point of the n-fold together with the data it was lifted from.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddedSample<T> {
    pub z: Vec<Complex<T>>,
    pub x: T,
    pub y: T,
    pub u: T,
    pub v: T,
    pub w: T,
    /// `Θ = θ_1 + ⋯ + θ_{n-1}`
    pub theta_total: T,
    /// `θ_1, …, θ_{n-2}`
    pub torus_angles: Vec<T>,
}

impl<T: Real> EmbeddedSample<T> {
    pub fn n(&self) -> usize {
        self.z.len()
    }

    /// `i^{n-3} z_1 ⋯ z_{n-1}`, which equals `v + iy` on the n-fold.
    pub fn invariant_product(&self) -> Complex<T> {
        let n = self.z.len();
        let prod = self.z[..n - 1]
            .iter()
            .fold(Complex::new(T::one(), T::zero()), |acc, z| acc * z);
        prod * i_pow::<T>(n as i64 - 3)
    }
}

/// Principal value of `Θ = arg(i^{3-n} (v + iy))` in `(-π, π]`.
pub fn theta_total<T: Real>(params: &ReductionParams<T>, v: T, y: T) -> Result<T> {
    if v == T::zero() && y == T::zero() {
        return Err(Error::SingularPoint);
    }
    let rotated = Complex::new(v, y) * i_pow::<T>(3 - params.n() as i64);
    let mut theta = rotated.im.atan2(rotated.re);
    if theta <= -T::PI() {
        theta = theta + T::PI() + T::PI();
    }
    Ok(theta)
}

/// Lifts `(x, y, u, v)` with the given torus angles `θ_1, …, θ_{n-2}`.
pub fn lift_point<T: Real>(
    params: &ReductionParams<T>,
    x: T,
    y: T,
    u: T,
    v: T,
    torus_angles: &[T],
) -> Result<EmbeddedSample<T>> {
    let n = params.n();
    if torus_angles.len() != n - 2 {
        return Err(Error::InvalidInput(format!(
            "expected {} torus angles, got {}",
            n - 2,
            torus_angles.len()
        )));
    }
    let at_origin = v == T::zero() && y == T::zero();
    if at_origin && !params.is_nonsingular() {
        return Err(Error::SingularPoint);
    }
    let branch = params.solve_branch(v * v + y * y)?;
    let w = branch.w;
    // At v = y = 0 one radius vanishes and the total angle is immaterial.
    let theta = if at_origin { T::zero() } else { theta_total(params, v, y)? };
    let last_angle = torus_angles.iter().fold(theta, |acc, &t| acc - t);
    let mut z = Vec::with_capacity(n);
    for (j, &aj) in params.a().iter().enumerate() {
        let radius = (w + aj).max(T::zero()).sqrt();
        let angle = if j < n - 2 { torus_angles[j] } else { last_angle };
        z.push(Complex::from_polar(radius, angle));
    }
    z.push(Complex::new(x, u));
    Ok(EmbeddedSample {
        z,
        x,
        y,
        u,
        v,
        w,
        theta_total: theta,
        torus_angles: torus_angles.to_vec(),
    })
}

/// `(|z_j|² − |z_{n-1}|²) − (a_j − a_{n-1})` for `j = 1, …, n-2`.
pub fn moment_residual<T: Real>(params: &ReductionParams<T>, sample: &EmbeddedSample<T>) -> Vec<T> {
    let n = params.n();
    let a = params.a();
    let last = sample.z[n - 2].norm_sqr();
    (0..n - 2)
        .map(|j| (sample.z[j].norm_sqr() - last) - (a[j] - a[n - 2]))
        .collect()
}

/// A grid node left out of a sampling because its torus orbit collapses.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SkippedNode {
    pub i: usize,
    pub j: usize,
    pub x: f64,
    pub y: f64,
    pub reason: &'static str,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceSampling<T> {
    /// Node-major, then torus multi-index with the first angle slowest.
    pub samples: Vec<EmbeddedSample<T>>,
    pub skipped: Vec<SkippedNode>,
}

/// Torus angles of multi-index `m` at `resolution` steps per circle.
pub fn torus_angles<T: Real>(dims: usize, resolution: usize, mut m: usize) -> Vec<T> {
    let mut angles = vec![T::zero(); dims];
    for k in (0..dims).rev() {
        let digit = m % resolution;
        m /= resolution;
        angles[k] = (T::PI() + T::PI()) * count::<T>(digit) / count(resolution);
    }
    angles
}

/// Samples the n-fold over every grid node of `(u, v)` and every torus index.
pub fn sample_fields<T: Real>(
    params: &ReductionParams<T>,
    u: &ScalarField2D<T>,
    v: &ScalarField2D<T>,
    torus_resolution: usize,
) -> Result<SurfaceSampling<T>> {
    if torus_resolution == 0 {
        return Err(Error::InvalidInput("torus resolution must be at least 1".into()));
    }
    if u.domain() != v.domain() {
        return Err(Error::DomainMismatch);
    }
    let d = *u.domain();
    let dims = params.n() - 2;
    let per_node = torus_resolution.pow(dims as u32);
    let angle_table: Vec<Vec<T>> = (0..per_node).map(|m| torus_angles(dims, torus_resolution, m)).collect();
    let mut samples = Vec::with_capacity(d.len() * per_node);
    let mut skipped = Vec::new();
    for j in 0..d.ny() {
        for i in 0..d.nx() {
            let (x, y) = (d.x(i), d.y(j));
            let (uu, vv) = (u.at(i, j), v.at(i, j));
            for angles in &angle_table {
                match lift_point(params, x, y, uu, vv, angles) {
                    Ok(s) => samples.push(s),
                    Err(Error::SingularPoint) => {
                        skipped.push(SkippedNode {
                            i,
                            j,
                            x: x.to_f64().unwrap_or(f64::NAN),
                            y: y.to_f64().unwrap_or(f64::NAN),
                            reason: "orbit collapses at v = y = 0",
                        });
                        break;
                    }
                    Err(e) => return Err(e),
                }
            }
        }
    }
    Ok(SurfaceSampling { samples, skipped })
}

/// Samples the n-fold generated by a Dirichlet solution.
pub fn sample_surface<T: Real>(
    params: &ReductionParams<T>,
    sol: &PdeSolution<T>,
    torus_resolution: usize,
) -> Result<SurfaceSampling<T>> {
    sample_fields(params, &sol.u, &sol.v, torus_resolution)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pde::GridDomain;
    use std::f64::consts::PI;

    fn params(a: &[f64]) -> ReductionParams<f64> {
        ReductionParams::new(a.to_vec()).unwrap()
    }

    #[test]
    fn theta_total_examples() {
        assert_eq!(theta_total(&params(&[1.0, 2.0]), 1.0, 0.0).unwrap(), 0.0);
        assert!((theta_total(&params(&[1.0, 2.0]), 0.0, 1.0).unwrap() - PI / 2.0).abs() < 1e-15);
        assert_eq!(theta_total(&params(&[1.0, 2.0, 3.0, 4.0]), 1.0, 0.0).unwrap(), PI);
        assert_eq!(theta_total(&params(&[1.0, 2.0]), 0.0, 0.0), Err(Error::SingularPoint));
    }

    #[test]
    fn lift_point_examples() {
        let s = lift_point(&params(&[0.0, 0.0]), 0.0, 0.0, 0.0, 1.0, &[0.0]).unwrap();
        assert!((s.z[0] - Complex::new(1.0, 0.0)).norm() < 1e-15);
        assert!((s.z[1] - Complex::new(1.0, 0.0)).norm() < 1e-15);
        assert_eq!(s.z[2], Complex::new(0.0, 0.0));

        let p = params(&[1.0, -1.0]);
        let s = lift_point(&p, 2.0, 0.0, 5.0, 0.0, &[0.4]).unwrap();
        assert_eq!(s.w, 1.0);
        assert!((s.z[0].norm() - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(s.z[1].norm(), 0.0);
        assert_eq!(s.z[2], Complex::new(2.0, 5.0));

        let p = params(&[1.0, 2.0, 3.0]);
        let s = lift_point(&p, 0.0, 0.0, 0.0, 6f64.sqrt(), &[0.0, 0.0]).unwrap();
        assert!(s.w.abs() < 1e-14);
        let radii: Vec<f64> = s.z[..3].iter().map(|z| z.norm()).collect();
        for (r, e) in radii.iter().zip([1.0, 2f64.sqrt(), 3f64.sqrt()]) {
            assert!((r - e).abs() < 1e-14);
        }
    }

    #[test]
    fn singular_origin_rejected() {
        let p = params(&[0.0, 0.0, 1.0]);
        assert_eq!(lift_point(&p, 1.0, 0.0, 1.0, 0.0, &[0.0, 0.0]), Err(Error::SingularPoint));
        assert!(lift_point(&p, 1.0, 0.0, 1.0, 0.0, &[0.0]).is_err());
    }

    #[test]
    fn lifted_points_satisfy_defining_relations() {
        for a in [vec![0.3, -1.0], vec![1.0, 2.0, -0.5], vec![0.0, 0.5, 1.5, -2.0]] {
            let p = params(&a);
            let n = p.n();
            let angles: Vec<f64> = (0..n - 2).map(|k| 0.7 * k as f64 - 0.3).collect();
            let (x, y, u, v) = (0.4, -1.1, 2.0, 0.35);
            let s = lift_point(&p, x, y, u, v, &angles).unwrap();
            let prod = s.invariant_product();
            assert!((prod - Complex::new(v, y)).norm() < 1e-12);
            assert_eq!(s.z[n - 1], Complex::new(x, u));
            for (zj, aj) in s.z.iter().zip(&a) {
                assert!((zj.norm_sqr() - aj - s.w).abs() < 1e-12);
            }
            assert!(moment_residual(&p, &s).iter().all(|r| r.abs() < 1e-12));
        }
    }

    #[test]
    fn moment_residual_hand_built() {
        let mk = |z: Vec<Complex<f64>>| EmbeddedSample {
            z,
            x: 0.0,
            y: 0.0,
            u: 0.0,
            v: 0.0,
            w: 0.0,
            theta_total: 0.0,
            torus_angles: vec![0.0],
        };
        let c = |r: f64| Complex::new(r, 0.0);
        let r = moment_residual(&params(&[3.0, 0.0]), &mk(vec![c(2.0), c(1.0), c(7.0)]));
        assert_eq!(r, vec![0.0]);
        let r = moment_residual(&params(&[1.0, 0.0]), &mk(vec![c(1.0), c(1.0), c(0.0)]));
        assert_eq!(r, vec![-1.0]);
    }

    #[test]
    fn sampling_counts_and_skips() {
        let d = GridDomain::square(-1.0, 1.0, 3).unwrap();
        let p = params(&[1.0, -1.0]);
        let u = ScalarField2D::from_fn(d, |x, _| x);
        let v = ScalarField2D::from_fn(d, |_, y| y + 0.5);
        let out = sample_fields(&p, &u, &v, 4).unwrap();
        assert_eq!(out.samples.len(), 36);
        assert!(out.skipped.is_empty());
        let out = sample_fields(&p, &u, &v, 1).unwrap();
        assert_eq!(out.samples.len(), 9);
        assert!(out.samples.iter().all(|s| s.torus_angles == vec![0.0]));

        // v = y vanishes along the middle row, where the orbit collapses
        let sing = params(&[0.0, 0.0]);
        let v = ScalarField2D::from_fn(d, |_, y| y);
        let out = sample_fields(&sing, &u, &v, 4).unwrap();
        assert_eq!(out.skipped.len(), 3);
        assert!(out.skipped.iter().all(|s| s.j == 1));
        assert_eq!(out.samples.len(), 24);
    }

    #[test]
    fn torus_multi_index_order() {
        let a: Vec<f64> = torus_angles(2, 4, 0);
        assert_eq!(a, vec![0.0, 0.0]);
        let a: Vec<f64> = torus_angles(2, 4, 1);
        assert_eq!(a[0], 0.0);
        assert!((a[1] - PI / 2.0).abs() < 1e-15);
        let a: Vec<f64> = torus_angles(2, 4, 4);
        assert!((a[0] - PI / 2.0).abs() < 1e-15);
        assert_eq!(a[1], 0.0);
    }
}
