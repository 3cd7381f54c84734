//! Closed-form and pointwise-solvable solution families.
//!
//! * Affine pairs `u = αx + β`, `v = αy + γ` solve the system for every
//!   parameter set because `u_y = 0`.
//! * The Harvey–Lawson type subfamily imposes `w = x² + u² + b`,
//!   `vu + xy = 0`, `vx − uy > 0`, which reduces the system to one scalar
//!   equation in `α = u²` per base point.
//! * For `n = 3`, `a = (a, −a)` the coefficient is `2 sqrt(s + a²)`.

use num_complex::Complex;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::ReductionParams;
use crate::pde::{GridDomain, ScalarField2D};
use crate::scalar::{count, lit, to_f64, Real};

/// `u = αx + β`, `v = αy + γ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AffineSolution<T> {
    pub alpha: T,
    pub beta: T,
    pub gamma: T,
}

impl<T: Real> AffineSolution<T> {
    pub fn new(alpha: T, beta: T, gamma: T) -> Self {
        Self { alpha, beta, gamma }
    }

    /// Potential `f = αxy + γx + βy` with `f_y = u`, `f_x = v`.
    pub fn potential(&self, x: T, y: T) -> T {
        self.alpha * x * y + self.gamma * x + self.beta * y
    }

    /// `e^{iθ} = (1 + iα) / sqrt(1 + α²)`; `Im(e^{−iθ} z_n)` is constant on the lift.
    pub fn split_phase(&self) -> Complex<T> {
        Complex::new(T::one(), self.alpha) / T::one().hypot(self.alpha)
    }

    /// `(u, v)` sampled on a grid.
    pub fn fields(&self, domain: GridDomain<T>) -> (ScalarField2D<T>, ScalarField2D<T>) {
        (
            ScalarField2D::from_fn(domain, |x, _| self.alpha * x + self.beta),
            ScalarField2D::from_fn(domain, |_, y| self.alpha * y + self.gamma),
        )
    }
}

pub fn affine_uv<T: Real>(sol: &AffineSolution<T>, x: T, y: T) -> (T, T) {
    (sol.alpha * x + sol.beta, sol.alpha * y + sol.gamma)
}

/// Parameters of the Harvey–Lawson type subfamily; the last `a_j` is zero.
#[derive(Debug, Clone, PartialEq)]
pub struct HlConfig<T> {
    params: ReductionParams<T>,
    b: T,
}

impl<T: Real> HlConfig<T> {
    /// Full parameter vector whose last entry must be zero.
    pub fn new(params: ReductionParams<T>, b: T) -> Result<Self> {
        if *params.a().last().expect("at least two parameters") != T::zero() {
            return Err(Error::InvalidParams("the last parameter must be 0 for this family".into()));
        }
        if !b.is_finite() {
            return Err(Error::InvalidParams("offset b must be finite".into()));
        }
        Ok(Self { params, b })
    }

    /// Builds from `a_1, …, a_{n-2}`; `a_{n-1} = 0` is appended.
    pub fn from_leading(leading: &[T], b: T) -> Result<Self> {
        let mut a = leading.to_vec();
        a.push(T::zero());
        Self::new(ReductionParams::new(a)?, b)
    }

    pub fn params(&self) -> &ReductionParams<T> {
        &self.params
    }

    pub fn b(&self) -> T {
        self.b
    }
}

/// `F(α) = y²(1 + x²/α) − P(x² + α + b)`.
pub fn hl_f<T: Real>(cfg: &HlConfig<T>, x: T, y: T, alpha: T) -> Result<T> {
    if !(alpha > T::zero()) {
        return Err(Error::NonpositiveAlpha(to_f64(alpha)));
    }
    Ok(y * y * (T::one() + x * x / alpha) - cfg.params.eval_p(x * x + alpha + cfg.b))
}

fn hl_f_unchecked<T: Real>(cfg: &HlConfig<T>, x: T, y: T, alpha: T) -> T {
    y * y * (T::one() + x * x / alpha) - cfg.params.eval_p(x * x + alpha + cfg.b)
}

/// Root of `F` and the bracket it was isolated in.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HlRoot<T> {
    pub alpha: T,
    /// `F(lo) > 0 > F(hi)`; both ends equal the root on the `x = 0` reduction.
    pub lo: T,
    pub hi: T,
}

const MAX_BRACKET_STEPS: usize = 2000;
const DEGENERACY_PROBES: usize = 256;
const ROOT_SCAN: usize = 4096;

/// Solves `F(α) = 0` for `α > 0` at a base point with `y ≠ 0`.
pub fn hl_solve_alpha<T: Real>(cfg: &HlConfig<T>, x: T, y: T) -> Result<HlRoot<T>> {
    if y == T::zero() {
        return Err(Error::YZero);
    }
    if x == T::zero() {
        let alpha = cfg.params.solve_branch(y * y)?.w - cfg.b;
        if !(alpha > T::zero()) {
            return Err(Error::NoPositiveRoot);
        }
        return Ok(HlRoot { alpha, lo: alpha, hi: alpha });
    }
    let f = |a: T| hl_f_unchecked(cfg, x, y, a);
    let one = T::one();
    let two = lit::<T>(2.0);
    let x2 = x * x;
    let mut hi = one;
    let mut lo = one.min(y * y * x2 / (one + cfg.params.eval_p(x2 + one + cfg.b).abs()));
    let mut steps = 0;
    while !(f(hi) < T::zero()) {
        hi = hi * two;
        steps += 1;
        if steps > MAX_BRACKET_STEPS || !hi.is_finite() {
            return Err(Error::NoPositiveRoot);
        }
    }
    steps = 0;
    while !(f(lo) > T::zero()) {
        lo = lo / two;
        steps += 1;
        if steps > MAX_BRACKET_STEPS || lo == T::zero() {
            return Err(Error::NoPositiveRoot);
        }
    }
    check_bracket(cfg, x, y, lo, hi)?;
    let alpha = refine(cfg, x, y, lo, hi);
    Ok(HlRoot { alpha, lo, hi })
}

/// `P' > 0` holds to the right of every root of `P`, hence above `w0`.
/// Below it the bracket is probed; any `P' <= 0` turns the answer into the
/// list of all sign changes of `F` on the bracket.
fn check_bracket<T: Real>(cfg: &HlConfig<T>, x: T, y: T, lo: T, hi: T) -> Result<()> {
    let p = &cfg.params;
    let w_lo = x * x + lo + cfg.b;
    let w_hi = x * x + hi + cfg.b;
    if w_lo > p.w0() || (w_lo == p.w0() && p.is_nonsingular()) {
        return Ok(());
    }
    let probes = DEGENERACY_PROBES;
    let degenerate = (0..=probes).any(|k| {
        let w = w_lo + (w_hi - w_lo) * count::<T>(k) / count(probes);
        !(p.eval_p_prime(w) > T::zero())
    });
    if !degenerate {
        return Ok(());
    }
    // Scan geometrically so the 1/α end is resolved as well as the far end.
    let ratio = (hi / lo).ln() / count(ROOT_SCAN);
    let at = |k: usize| if k == ROOT_SCAN { hi } else { lo * (ratio * count(k)).exp() };
    let mut roots = Vec::new();
    let mut prev = hl_f_unchecked(cfg, x, y, lo);
    for k in 1..=ROOT_SCAN {
        let cur = hl_f_unchecked(cfg, x, y, at(k));
        if prev == T::zero() {
            roots.push(to_f64(at(k - 1)));
        } else if prev * cur < T::zero() {
            roots.push(to_f64(refine(cfg, x, y, at(k - 1), at(k))));
        }
        prev = cur;
    }
    Err(Error::DegenerateRegion { roots })
}

/// Safeguarded Newton on a sign-changing bracket.
fn refine<T: Real>(cfg: &HlConfig<T>, x: T, y: T, mut lo: T, mut hi: T) -> T {
    let p = &cfg.params;
    let x2 = x * x;
    let y2 = y * y;
    let f = |a: T| hl_f_unchecked(cfg, x, y, a);
    let f_lo_positive = f(lo) > T::zero();
    let mut a = (lo + hi) / lit(2.0);
    for _ in 0..400 {
        let fa = f(a);
        let scale = T::one() + y2 + p.eval_p(x2 + a + cfg.b).abs();
        if fa.abs() <= lit::<T>(1e-13) * scale {
            return a;
        }
        if (fa > T::zero()) == f_lo_positive {
            lo = a;
        } else {
            hi = a;
        }
        let slope = -y2 * x2 / (a * a) - p.eval_p_prime(x2 + a + cfg.b);
        let newton = a - fa / slope;
        let next = if newton.is_finite() && newton > lo.min(hi) && newton < lo.max(hi) {
            newton
        } else {
            (lo + hi) / lit(2.0)
        };
        if next == a {
            return a;
        }
        a = next;
    }
    a
}

/// A pointwise solution of the subfamily.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HlTriple<T> {
    pub x: T,
    pub y: T,
    pub u: T,
    pub v: T,
    pub w: T,
    pub alpha: T,
}

/// Residuals of the four defining relations of a triple.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HlInvariants<T> {
    /// `|w − x² − u² − b|`
    pub gauge: T,
    /// `|vu + xy| / (1 + |vu| + |xy|)`
    pub phase: T,
    /// `vx − uy`, must be positive.
    pub branch: T,
    /// `|P(w) − v² − y²| / (1 + v² + y²)`
    pub modulus: T,
}

impl<T: Real> HlInvariants<T> {
    pub fn hold(&self) -> bool {
        self.gauge <= lit(1e-10)
            && self.phase <= lit(1e-10)
            && self.branch > T::zero()
            && self.modulus <= lit(1e-9)
    }
}

impl<T: Real> HlTriple<T> {
    pub fn invariants(&self, cfg: &HlConfig<T>) -> HlInvariants<T> {
        let one = T::one();
        let vu = self.v * self.u;
        let xy = self.x * self.y;
        let target = self.v * self.v + self.y * self.y;
        HlInvariants {
            gauge: (self.w - self.x * self.x - self.u * self.u - cfg.b).abs(),
            phase: (vu + xy).abs() / (one + vu.abs() + xy.abs()),
            branch: self.v * self.x - self.u * self.y,
            modulus: (cfg.params.eval_p(self.w) - target).abs() / (one + target),
        }
    }
}

/// `u = −sign(y) sqrt(α)`, `v = −xy/u`, `w = x² + α + b`.
pub fn hl_triple<T: Real>(cfg: &HlConfig<T>, x: T, y: T) -> Result<HlTriple<T>> {
    let alpha = hl_solve_alpha(cfg, x, y)?.alpha;
    let u = -y.signum() * alpha.sqrt();
    Ok(HlTriple {
        x,
        y,
        u,
        v: -x * y / u,
        w: x * x + alpha + cfg.b,
        alpha,
    })
}

/// Largest deviation of `F(s)` from `2 sqrt(s + a²)` for `n = 3`, `a = (a, −a)`.
pub fn joyce_check<T: Real>(a: T, s_grid: &[T]) -> Result<T> {
    if a == T::zero() {
        return Err(Error::InvalidParams("a must be nonzero".into()));
    }
    let p = ReductionParams::new(vec![a, -a])?;
    let two = lit::<T>(2.0);
    s_grid.iter().try_fold(T::zero(), |worst, &s| {
        let dev = (p.coefficient_f(s)? - two * (s + a * a).sqrt()).abs();
        Ok(worst.max(dev))
    })
}
