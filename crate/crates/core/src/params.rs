//! Reduction parameters, the polynomial `P(w) = ∏ (w + a_j)` and the
//! distinguished branch `w(s) >= -min(a_j)` of `P(w) = s`.

use crate::error::{Error, Result};
use crate::scalar::{count, lit, to_f64, Real};

/// Below this value of `P'(w)` the branch derivative is treated as blown up.
pub const DEGENERACY_THRESHOLD: f64 = 1e-8;

/// Dimension `n` and the parameters `a_1, …, a_{n-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReductionParams<T> {
    n: usize,
    a: Vec<T>,
    w0: T,
    min_multiplicity: usize,
}

impl<T: Real> ReductionParams<T> {
    /// Builds the parameter set from `a_1, …, a_{n-1}`; `n` is `a.len() + 1`.
    pub fn new(a: Vec<T>) -> Result<Self> {
        if a.len() < 2 {
            return Err(Error::InvalidParams(format!(
                "need at least two parameters (n >= 3), got {}",
                a.len()
            )));
        }
        if let Some(bad) = a.iter().find(|x| !x.is_finite()) {
            return Err(Error::InvalidParams(format!("non-finite parameter {bad}")));
        }
        // -0.0 and 0.0 must count as the same minimum.
        let a: Vec<T> = a.into_iter().map(|x| x + T::zero()).collect();
        let min = a.iter().copied().fold(T::infinity(), T::min);
        let min_multiplicity = a.iter().filter(|&&x| x == min).count();
        Ok(Self {
            n: a.len() + 1,
            w0: -min,
            a,
            min_multiplicity,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn a(&self) -> &[T] {
        &self.a
    }

    /// `-min(a_j)`, the left end of the distinguished branch.
    pub fn w0(&self) -> T {
        self.w0
    }

    pub fn min_multiplicity(&self) -> usize {
        self.min_multiplicity
    }

    /// True when `min(a_j)` is attained once; the smooth regime.
    pub fn is_nonsingular(&self) -> bool {
        self.min_multiplicity == 1
    }

    /// `P(w)` as a running product of the linear factors.
    pub fn eval_p(&self, w: T) -> T {
        self.a.iter().fold(T::one(), |acc, &aj| acc * (w + aj))
    }

    /// `P'(w) = Σ_k ∏_{i≠k} (w + a_i)`.
    pub fn eval_p_prime(&self, w: T) -> T {
        (0..self.a.len())
            .map(|k| {
                self.a
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != k)
                    .fold(T::one(), |acc, (_, &ai)| acc * (w + ai))
            })
            .fold(T::zero(), |acc, t| acc + t)
    }

    /// Solves `P(w) = s` on the branch `w >= w0`.
    ///
    /// Safeguarded Newton iteration inside a bracket on which `P - s`
    /// changes sign; a Newton step leaving the bracket is replaced by
    /// bisection.
    pub fn solve_branch(&self, s: T) -> Result<BranchState<T>> {
        if s < T::zero() || s.is_nan() {
            return Err(Error::NegativeS(to_f64(s)));
        }
        let w0 = self.w0;
        if s == T::zero() {
            return Ok(BranchState {
                s,
                w: w0,
                p_prime_at_w: self.eval_p_prime(w0).max(T::zero()),
            });
        }
        let deg = count::<T>(self.a.len());
        let spread = self.a.iter().fold(T::zero(), |acc, x| acc + x.abs());
        let mut lo = w0;
        let mut hi = w0 + T::one().max(s.powf(deg.recip())) + spread;
        let residual = |w: T| self.eval_p(w) - s;

        let eps = T::epsilon();
        let mut w = lo + (hi - lo) * lit(0.5);
        // Start Newton from the right end when P is convex there, which
        // keeps iterates on one side of the root.
        if residual(hi) > T::zero() {
            w = hi;
        }
        for _ in 0..400 {
            let f = residual(w);
            if f == T::zero() {
                break;
            }
            if f < T::zero() {
                lo = w;
            } else {
                hi = w;
            }
            let df = self.eval_p_prime(w);
            let newton = if df > T::zero() { w - f / df } else { T::nan() };
            let next = if newton.is_finite() && newton > lo && newton < hi {
                newton
            } else {
                lo + (hi - lo) * lit(0.5)
            };
            let step = (next - w).abs();
            w = next;
            if step <= lit::<T>(4.0) * eps * w.abs().max(T::one()) || hi - lo <= eps * w.abs() {
                break;
            }
        }
        let w = w.max(w0);
        Ok(BranchState {
            s,
            w,
            p_prime_at_w: self.eval_p_prime(w).max(T::zero()),
        })
    }

    /// `dw/ds = 1 / P'(w)` on the branch.
    pub fn branch_sensitivity(&self, state: &BranchState<T>) -> Result<T> {
        let pp = self.eval_p_prime(state.w);
        if !(pp >= lit(DEGENERACY_THRESHOLD)) {
            return Err(Error::DegenerateBranch {
                w: to_f64(state.w),
                p_prime: to_f64(pp),
            });
        }
        Ok(pp.recip())
    }

    /// The coefficient `F(s) = P'(w(s))` of the potential equation.
    pub fn coefficient_f(&self, s: T) -> Result<T> {
        Ok(self.solve_branch(s)?.p_prime_at_w)
    }
}

impl<T: Real> TryFrom<Vec<T>> for ReductionParams<T> {
    type Error = Error;

    fn try_from(a: Vec<T>) -> Result<Self> {
        Self::new(a)
    }
}

impl<T: Real> From<ReductionParams<T>> for Vec<T> {
    fn from(p: ReductionParams<T>) -> Self {
        p.a
    }
}

/// A solved point `(s, w(s))` of the distinguished branch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchState<T> {
    pub s: T,
    pub w: T,
    pub p_prime_at_w: T,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(a: &[f64]) -> ReductionParams<f64> {
        ReductionParams::new(a.to_vec()).unwrap()
    }

    #[test]
    fn construction_invariants() {
        let p = params(&[1.0, 2.0, 3.0]);
        assert_eq!(p.n(), 4);
        assert_eq!(p.w0(), -1.0);
        assert_eq!(p.min_multiplicity(), 1);
        let q = params(&[1.0, 1.0, 2.0]);
        assert_eq!(q.min_multiplicity(), 2);
        assert!(!q.is_nonsingular());
        let z = params(&[-0.0, 0.0]);
        assert_eq!(z.min_multiplicity(), 2);
        assert!(ReductionParams::new(vec![1.0]).is_err());
        assert!(ReductionParams::new(vec![1.0, f64::NAN]).is_err());
    }

    #[test]
    fn eval_p_examples() {
        assert_eq!(params(&[1.0, -1.0]).eval_p(2.0), 3.0);
        assert_eq!(params(&[1.0, 2.0, 3.0]).eval_p(0.0), 6.0);
        assert_eq!(params(&[1.0, 2.0, 3.0]).eval_p(-1.0), 0.0);
    }

    #[test]
    fn eval_p_prime_examples() {
        let a = 0.7;
        let p = params(&[a, -a]);
        for w in [0.0, 0.3, 2.5] {
            assert!((p.eval_p_prime(w) - 2.0 * w).abs() < 1e-15);
        }
        assert_eq!(params(&[1.0, 2.0, 3.0]).eval_p_prime(0.0), 11.0);
        assert_eq!(params(&[1.0, -1.0]).eval_p_prime(1.0), 2.0);
    }

    #[test]
    fn solve_branch_examples() {
        assert!((params(&[1.0, -1.0]).solve_branch(3.0).unwrap().w - 2.0).abs() < 1e-14);
        assert!(params(&[1.0, 2.0, 3.0]).solve_branch(6.0).unwrap().w.abs() < 1e-14);
        assert!((params(&[2.0, -2.0]).solve_branch(5.0).unwrap().w - 3.0).abs() < 1e-14);
        let p = params(&[0.5, 2.0, -1.5]);
        assert_eq!(p.solve_branch(0.0).unwrap().w, 1.5);
        assert_eq!(p.solve_branch(-1e-3), Err(Error::NegativeS(-1e-3)));
    }

    #[test]
    fn sensitivity_examples() {
        let p = params(&[2.0, -2.0]);
        let st = p.solve_branch(5.0).unwrap();
        assert!((p.branch_sensitivity(&st).unwrap() - 1.0 / 6.0).abs() < 1e-14);
        let p = params(&[1.0, 2.0, 3.0]);
        let st = p.solve_branch(6.0).unwrap();
        assert!((p.branch_sensitivity(&st).unwrap() - 1.0 / 11.0).abs() < 1e-14);
        let p = params(&[1.0, -1.0]);
        let st = p.solve_branch(0.0).unwrap();
        assert_eq!(st.w, 1.0);
        assert_eq!(p.branch_sensitivity(&st).unwrap(), 0.5);
    }

    #[test]
    fn degenerate_branch_refuses() {
        let p = params(&[1.0, 1.0, 2.0]);
        let st = p.solve_branch(0.0).unwrap();
        assert_eq!(st.w, -1.0);
        assert_eq!(st.p_prime_at_w, 0.0);
        assert!(matches!(
            p.branch_sensitivity(&st),
            Err(Error::DegenerateBranch { .. })
        ));
        // The branch itself is still well defined away from s = 0.
        let st = p.solve_branch(0.25).unwrap();
        assert!((p.eval_p(st.w) - 0.25).abs() < 1e-13);
    }

    #[test]
    fn coefficient_f_examples() {
        let p = params(&[1.0, -1.0]);
        for s in [0.0, 0.5, 3.0, 99.0] {
            assert!((p.coefficient_f(s).unwrap() - 2.0 * (s + 1.0f64).sqrt()).abs() < 1e-12);
        }
        assert!((params(&[2.0, -2.0]).coefficient_f(0.0).unwrap() - 4.0).abs() < 1e-15);
        assert!((params(&[1.0, 2.0, 3.0]).coefficient_f(6.0).unwrap() - 11.0).abs() < 1e-12);
    }

    #[test]
    fn works_in_single_precision() {
        let p = ReductionParams::<f32>::new(vec![1.0, 2.0, 3.0]).unwrap();
        let st = p.solve_branch(6.0).unwrap();
        assert!(st.w.abs() < 1e-5);
        assert!((p.eval_p(st.w) - 6.0).abs() < 1e-4);
    }
}
