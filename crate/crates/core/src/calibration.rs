//! Tangent frames of the n-fold and the special Lagrangian conditions.
//!
//! At a nonsingular point the tangent space is spanned by the fibre
//! vectors `W_φi` of the torus action and the transverse vectors `W_x`,
//! `W_y`. The frame is assembled at the orbit representative with equal
//! angles `θ_1 = ⋯ = θ_{n-1} = Θ/(n-1)`.
//!
//! The calibrated cross product of `W_φ1, …, W_φ(n-2), W_x` has complex
//! components `D_j = det[W_φ1, …, W_φ(n-2), W_x, e_j]`; as a vector of ℂⁿ it
//! is `conj(D)`, because `g(conj(D), w) = Re Σ D_j w_j = Re Ω(…, w)`.

use num_complex::Complex;
use serde::Serialize;

use crate::embedding::{i_pow, theta_total, EmbeddedSample};
use crate::error::{Error, Result};
use crate::linalg::{complex_det, least_squares, numerical_rank};
use crate::params::{ReductionParams, DEGENERACY_THRESHOLD};
use crate::scalar::{count, lit, to_f64, Real};

/// Radii `sqrt(w + a_j)` below this are treated as zero.
pub const ZERO_RADIUS_SQ: f64 = 1e-14;

/// First partial derivatives of the planar pair at a point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BasePartials<T> {
    pub u_x: T,
    pub u_y: T,
    pub v_x: T,
    pub v_y: T,
}

impl<T: Real> BasePartials<T> {
    pub fn new(u_x: T, u_y: T, v_x: T, v_y: T) -> Self {
        Self { u_x, u_y, v_x, v_y }
    }
}

/// Derivatives of the gauge angle `θ = Θ/(n-1)` and of `w` along the base.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ImplicitDerivatives<T> {
    pub theta_x: T,
    pub theta_y: T,
    pub w_x: T,
    pub w_y: T,
}

/// Differentiates `(n-1)θ = arg(v + iy) + const` and `P(w) = v² + y²`
/// along a base point with the given `v`-derivatives.
pub fn implicit_derivatives<T: Real>(
    params: &ReductionParams<T>,
    v: T,
    y: T,
    v_x: T,
    v_y: T,
) -> Result<ImplicitDerivatives<T>> {
    if v == T::zero() && y == T::zero() {
        return Err(Error::SingularPoint);
    }
    let s = v * v + y * y;
    let branch = params.solve_branch(s)?;
    let pp = branch.p_prime_at_w;
    if !(pp >= lit(DEGENERACY_THRESHOLD)) {
        return Err(Error::DegenerateBranch {
            w: to_f64(branch.w),
            p_prime: to_f64(pp),
        });
    }
    let m = count::<T>(params.n() - 1) * s;
    let two = lit::<T>(2.0);
    Ok(ImplicitDerivatives {
        theta_x: -y * v_x / m,
        theta_y: (v - y * v_y) / m,
        w_x: two * v * v_x / pp,
        w_y: two * (v * v_y + y) / pp,
    })
}

/// The `n` tangent vectors `W_φ1, …, W_φ(n-2), W_x, W_y` at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentFrame<T> {
    pub w_phi: Vec<Vec<Complex<T>>>,
    pub wx: Vec<Complex<T>>,
    pub wy: Vec<Complex<T>>,
    pub derivs: ImplicitDerivatives<T>,
    pub partials: BasePartials<T>,
    /// Equal-angle representative of the orbit the frame is attached to.
    pub point: EmbeddedSample<T>,
}

impl<T: Real> TangentFrame<T> {
    pub fn n(&self) -> usize {
        self.wx.len()
    }

    /// Frame vectors in the order `W_φ1, …, W_φ(n-2), W_x, W_y`.
    pub fn vectors(&self) -> Vec<&[Complex<T>]> {
        let mut out: Vec<&[Complex<T>]> = self.w_phi.iter().map(Vec::as_slice).collect();
        out.push(&self.wx);
        out.push(&self.wy);
        out
    }

    /// Real rank of the frame seen as `n` vectors of ℝ^{2n}.
    pub fn real_rank(&self) -> usize {
        let cols: Vec<Vec<T>> = self.vectors().into_iter().map(realify).collect();
        numerical_rank(&cols, lit(1e-10))
    }
}

fn realify<T: Real>(v: &[Complex<T>]) -> Vec<T> {
    v.iter().map(|c| c.re).chain(v.iter().map(|c| c.im)).collect()
}

fn vec_norm<T: Real>(v: &[Complex<T>]) -> T {
    v.iter().fold(T::zero(), |acc, c| acc.hypot(c.norm()))
}

fn radii<T: Real>(params: &ReductionParams<T>, w: T) -> Result<Vec<T>> {
    params
        .a()
        .iter()
        .enumerate()
        .map(|(k, &ak)| {
            let sq = w + ak;
            if sq <= lit(ZERO_RADIUS_SQ) {
                Err(Error::ZeroRadius {
                    index: k + 1,
                    value: to_f64(sq),
                })
            } else {
                Ok(sq.sqrt())
            }
        })
        .collect()
}

/// Assembles the tangent frame over the base point of `sample`.
pub fn tangent_frame<T: Real>(
    params: &ReductionParams<T>,
    sample: &EmbeddedSample<T>,
    partials: BasePartials<T>,
) -> Result<TangentFrame<T>> {
    let n = params.n();
    if sample.z.len() != n {
        return Err(Error::InvalidInput("sample dimension does not match parameters".into()));
    }
    let derivs = implicit_derivatives(params, sample.v, sample.y, partials.v_x, partials.v_y)?;
    let w = params.solve_branch(sample.v * sample.v + sample.y * sample.y)?.w;
    let amp = radii(params, w)?;
    let big_theta = theta_total(params, sample.v, sample.y)?;
    let theta = big_theta / count(n - 1);
    let phase = Complex::from_polar(T::one(), theta);
    let i = Complex::new(T::zero(), T::one());
    let two = lit::<T>(2.0);

    let mut z: Vec<Complex<T>> = amp.iter().map(|&r| phase * r).collect();
    z.push(Complex::new(sample.x, sample.u));

    let w_phi = (0..n - 2)
        .map(|k| {
            let mut col = vec![Complex::new(T::zero(), T::zero()); n];
            col[k] = i * z[k];
            col[n - 2] = -i * z[n - 2];
            col
        })
        .collect();
    let transverse = |w_d: T, theta_d: T, last: Complex<T>| {
        let mut col: Vec<Complex<T>> = amp
            .iter()
            .map(|&r| phase * Complex::new(w_d / (two * r), theta_d * r))
            .collect();
        col.push(last);
        col
    };
    let wx = transverse(derivs.w_x, derivs.theta_x, Complex::new(T::one(), partials.u_x));
    let wy = transverse(derivs.w_y, derivs.theta_y, Complex::new(T::zero(), partials.u_y));

    let point = EmbeddedSample {
        z,
        x: sample.x,
        y: sample.y,
        u: sample.u,
        v: sample.v,
        w,
        theta_total: big_theta,
        torus_angles: vec![theta; n - 2],
    };
    Ok(TangentFrame {
        w_phi,
        wx,
        wy,
        derivs,
        partials,
        point,
    })
}

/// `ω(a, b) = Im Σ conj(a_j) b_j` for `ω = (i/2) Σ dz_j ∧ dz̄_j`.
pub fn omega<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> T {
    a.iter()
        .zip(b)
        .fold(Complex::new(T::zero(), T::zero()), |acc, (p, q)| acc + p.conj() * q)
        .im
}

/// Largest normalised `|ω(A, B)|` over all pairs of frame vectors.
pub fn omega_residual<T: Real>(frame: &TangentFrame<T>) -> T {
    let vs = frame.vectors();
    let mut worst = T::zero();
    for (k, a) in vs.iter().enumerate() {
        for b in &vs[k + 1..] {
            let scale = vec_norm(a) * vec_norm(b);
            if scale > T::zero() {
                worst = worst.max(omega(a, b).abs() / scale);
            }
        }
    }
    worst
}

/// `|Im det M| / ∏ ‖v_k‖` for the frame matrix `M`.
pub fn imomega_residual<T: Real>(frame: &TangentFrame<T>) -> T {
    let vs = frame.vectors();
    let scale = vs.iter().fold(T::one(), |acc, v| acc * vec_norm(v));
    if scale == T::zero() {
        return T::zero();
    }
    let cols: Vec<Vec<Complex<T>>> = vs.iter().map(|v| v.to_vec()).collect();
    complex_det(&cols).im.abs() / scale
}

/// Complex components `D_j` of the calibrated cross product.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossProductVector<T> {
    pub components: Vec<Complex<T>>,
}

impl<T: Real> CrossProductVector<T> {
    /// The cross product as a vector of ℂⁿ: `conj(D)`.
    pub fn as_vector(&self) -> Vec<Complex<T>> {
        self.components.iter().map(|c| c.conj()).collect()
    }

    /// `max_j |D_j − E_j| / max_j |D_j|`
    pub fn relative_distance(&self, other: &Self) -> T {
        let scale = self
            .components
            .iter()
            .fold(T::zero(), |acc, c| acc.max(c.norm()));
        let diff = self
            .components
            .iter()
            .zip(&other.components)
            .fold(T::zero(), |acc, (a, b)| acc.max((a - b).norm()));
        if scale == T::zero() {
            diff
        } else {
            diff / scale
        }
    }
}

/// `D_j = det[v_1, …, v_{n-1}, e_j]` by LU.
pub fn cross_product_det<T: Real>(vectors: &[Vec<Complex<T>>]) -> Result<CrossProductVector<T>> {
    let n = vectors.len() + 1;
    if vectors.iter().any(|v| v.len() != n) {
        return Err(Error::InvalidInput(format!(
            "cross product of {} vectors needs vectors of length {n}",
            vectors.len()
        )));
    }
    let components = (0..n)
        .map(|j| {
            let mut cols = vectors.to_vec();
            let mut e = vec![Complex::new(T::zero(), T::zero()); n];
            e[j] = Complex::new(T::one(), T::zero());
            cols.push(e);
            complex_det(&cols)
        })
        .collect();
    Ok(CrossProductVector { components })
}

/// Closed form of `det[W_φ1, …, W_φ(n-2), W_x, e_j]` in the equal-angle gauge:
///
/// ```text
/// D_i = −i^{n-2} e^{i(n-2)θ} (∏_{k≠i} A_k) (1 + i u_x),            i < n
/// D_n =  i^{n-2} e^{i(n-1)θ} (∏_k A_k) (w_x/2 Σ_k 1/A_k² + i(n-1)θ_x)
/// ```
///
/// with `A_k = sqrt(w + a_k)`. Expanding along the last column, the fibre
/// block has determinant `(−1)^{n-1+i} i^{n-2} ∏_{k≠i} z_k`; for `D_n`
/// adding the first `n-2` rows to row `n-1` leaves `Σ_k q_k` with
/// `W_x = (z_k q_k)`.
pub fn cross_product_closed_form<T: Real>(
    params: &ReductionParams<T>,
    frame: &TangentFrame<T>,
) -> Result<CrossProductVector<T>> {
    let n = params.n();
    let w = frame.point.w;
    let amp = radii(params, w)?;
    let theta = frame.point.theta_total / count(n - 1);
    let ipow = i_pow::<T>(n as i64 - 2);
    let one = T::one();
    let lead = -ipow
        * Complex::from_polar(one, count::<T>(n - 2) * theta)
        * Complex::new(one, frame.partials.u_x);
    let mut components: Vec<Complex<T>> = (0..n - 1)
        .map(|i| {
            let others = amp
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != i)
                .fold(one, |acc, (_, &r)| acc * r);
            lead * others
        })
        .collect();
    let all = amp.iter().fold(one, |acc, &r| acc * r);
    let inv_sum = params.a().iter().fold(T::zero(), |acc, &ak| acc + (w + ak).recip());
    let bracket = Complex::new(
        frame.derivs.w_x / lit(2.0) * inv_sum,
        count::<T>(n - 1) * frame.derivs.theta_x,
    );
    components.push(ipow * Complex::from_polar(one, count::<T>(n - 1) * theta) * bracket * all);
    Ok(CrossProductVector { components })
}

/// Fit of `W_y = Σ α_i W_φi + β W_x + γ X`, `X` the cross-product vector.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Decomposition<T> {
    pub alphas: Vec<T>,
    pub beta: T,
    pub gamma: T,
    /// `‖fit − W_y‖ / ‖W_y‖`
    pub residual: T,
    /// `P'(w)` at the frame point.
    pub p_prime: T,
}

/// Real least-squares decomposition of `W_y` over the fibre vectors, `W_x`
/// and the cross product of `W_φ1, …, W_φ(n-2), W_x`.
pub fn decomposition_check<T: Real>(
    params: &ReductionParams<T>,
    frame: &TangentFrame<T>,
) -> Result<Decomposition<T>> {
    let n = params.n();
    let mut spanning: Vec<Vec<Complex<T>>> = frame.w_phi.clone();
    spanning.push(frame.wx.clone());
    let cross = cross_product_det(&spanning)?.as_vector();
    spanning.push(cross);
    let cols: Vec<Vec<T>> = spanning.iter().map(|v| realify(v)).collect();
    let target = realify(&frame.wy);
    let rank_tol = lit::<T>(1e-10).max(T::epsilon() * lit(100.0));
    let fit = least_squares(&cols, &target, rank_tol)?;
    let scale = vec_norm(&frame.wy);
    let residual = if scale > T::zero() {
        fit.residual_norm / scale
    } else {
        fit.residual_norm
    };
    let c = fit.coefficients;
    Ok(Decomposition {
        alphas: c[..n - 2].to_vec(),
        beta: c[n - 2],
        gamma: c[n - 1],
        residual,
        p_prime: params.eval_p_prime(frame.point.w),
    })
}

/// All calibration residuals at one base point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointCheck<T> {
    pub omega: T,
    pub im_omega: T,
    pub decomposition: Decomposition<T>,
}

/// Lifts `(x, y, u, v)`, builds the frame and evaluates every residual.
pub fn check_point<T: Real>(
    params: &ReductionParams<T>,
    x: T,
    y: T,
    u: T,
    v: T,
    partials: BasePartials<T>,
) -> Result<PointCheck<T>> {
    let angles = vec![T::zero(); params.n() - 2];
    let sample = crate::embedding::lift_point(params, x, y, u, v, &angles)?;
    let frame = tangent_frame(params, &sample, partials)?;
    Ok(PointCheck {
        omega: omega_residual(&frame),
        im_omega: imomega_residual(&frame),
        decomposition: decomposition_check(params, &frame)?,
    })
}
