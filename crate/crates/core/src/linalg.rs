//! Dense helpers: complex determinants and real least squares.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

/// Determinant of the square complex matrix whose columns are `columns`.
///
/// LU factorisation with partial pivoting on a private copy.
pub fn complex_det<T: Real>(columns: &[Vec<Complex<T>>]) -> Complex<T> {
    let n = columns.len();
    assert!(columns.iter().all(|c| c.len() == n), "matrix must be square");
    // row-major copy: m[r][c]
    let mut m: Vec<Vec<Complex<T>>> = (0..n).map(|r| (0..n).map(|c| columns[c][r]).collect()).collect();
    let mut det = Complex::new(T::one(), T::zero());
    for k in 0..n {
        let pivot = (k..n)
            .max_by(|&a, &b| m[a][k].norm().partial_cmp(&m[b][k].norm()).unwrap())
            .unwrap();
        if m[pivot][k].norm() == T::zero() {
            return Complex::new(T::zero(), T::zero());
        }
        if pivot != k {
            m.swap(pivot, k);
            det = -det;
        }
        let p = m[k][k];
        det = det * p;
        for r in (k + 1)..n {
            let factor = m[r][k] / p;
            if factor.norm() == T::zero() {
                continue;
            }
            let (top, bottom) = m.split_at_mut(r);
            for (dst, &t) in bottom[0][k..n].iter_mut().zip(&top[k][k..n]) {
                *dst = *dst - factor * t;
            }
        }
    }
    det
}

/// Least-squares fit of `b` by the columns of `a`.
#[derive(Debug, Clone, PartialEq)]
pub struct LeastSquares<T> {
    pub coefficients: Vec<T>,
    /// `‖A c − b‖`
    pub residual_norm: T,
}

/// Solves `min ‖A c − b‖` by Householder QR. `columns` holds the columns of `A`.
///
/// Fails with [`Error::RankDeficient`] when a diagonal entry of `R` falls
/// below `rank_tol` times the largest one.
pub fn least_squares<T: Real>(columns: &[Vec<T>], b: &[T], rank_tol: T) -> Result<LeastSquares<T>> {
    let ncols = columns.len();
    let nrows = b.len();
    assert!(columns.iter().all(|c| c.len() == nrows));
    if ncols > nrows {
        return Err(Error::RankDeficient);
    }
    let mut a: Vec<Vec<T>> = columns.to_vec();
    let mut rhs = b.to_vec();
    let mut diag = Vec::with_capacity(ncols);
    for k in 0..ncols {
        let norm = a[k][k..].iter().fold(T::zero(), |acc, &x| acc.hypot(x));
        let alpha = if a[k][k] > T::zero() { -norm } else { norm };
        let mut v: Vec<T> = a[k][k..].to_vec();
        v[0] = v[0] - alpha;
        let vnorm2 = v.iter().fold(T::zero(), |acc, &x| acc + x * x);
        if vnorm2 > T::zero() {
            for col in a.iter_mut().skip(k) {
                let dot = v.iter().zip(&col[k..]).fold(T::zero(), |acc, (&p, &q)| acc + p * q);
                let f = lit::<T>(2.0) * dot / vnorm2;
                for (x, &vi) in col[k..].iter_mut().zip(&v) {
                    *x = *x - f * vi;
                }
            }
            let dot = v.iter().zip(&rhs[k..]).fold(T::zero(), |acc, (&p, &q)| acc + p * q);
            let f = lit::<T>(2.0) * dot / vnorm2;
            for (x, &vi) in rhs[k..].iter_mut().zip(&v) {
                *x = *x - f * vi;
            }
        }
        diag.push(a[k][k]);
    }
    let rmax = diag.iter().fold(T::zero(), |acc, d| acc.max(d.abs()));
    if rmax == T::zero() || diag.iter().any(|d| d.abs() <= rank_tol * rmax) {
        return Err(Error::RankDeficient);
    }
    let mut c = vec![T::zero(); ncols];
    for k in (0..ncols).rev() {
        let mut acc = rhs[k];
        for j in (k + 1)..ncols {
            acc = acc - a[j][k] * c[j];
        }
        c[k] = acc / a[k][k];
    }
    let residual_norm = rhs[ncols..].iter().fold(T::zero(), |acc, &x| acc.hypot(x));
    Ok(LeastSquares {
        coefficients: c,
        residual_norm,
    })
}

/// Numerical rank of a real matrix given by columns.
pub fn numerical_rank<T: Real>(columns: &[Vec<T>], rel_tol: T) -> usize {
    let mut cols: Vec<Vec<T>> = columns.to_vec();
    let scale = cols
        .iter()
        .flat_map(|c| c.iter())
        .fold(T::zero(), |acc, x| acc.max(x.abs()));
    if scale == T::zero() {
        return 0;
    }
    // Gram-Schmidt with column pivoting by remaining norm.
    let mut rank = 0;
    let mut basis: Vec<Vec<T>> = Vec::new();
    while !cols.is_empty() {
        let (idx, norm) = cols
            .iter()
            .enumerate()
            .map(|(i, c)| (i, c.iter().fold(T::zero(), |acc, &x| acc.hypot(x))))
            .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .unwrap();
        if norm <= rel_tol * scale {
            break;
        }
        let q: Vec<T> = cols.swap_remove(idx).iter().map(|&x| x / norm).collect();
        for c in cols.iter_mut() {
            let dot = q.iter().zip(c.iter()).fold(T::zero(), |acc, (&p, &r)| acc + p * r);
            for (x, &qi) in c.iter_mut().zip(&q) {
                *x = *x - dot * qi;
            }
        }
        basis.push(q);
        rank += 1;
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn identity_and_permutation_determinants() {
        let e = |j: usize| (0..3).map(|i| if i == j { c(1.0, 0.0) } else { c(0.0, 0.0) }).collect::<Vec<_>>();
        assert_eq!(complex_det(&[e(0), e(1), e(2)]), c(1.0, 0.0));
        assert_eq!(complex_det(&[e(1), e(0), e(2)]), c(-1.0, 0.0));
        assert_eq!(complex_det(&[e(0), e(0), e(2)]), c(0.0, 0.0));
    }

    #[test]
    fn two_by_two_complex() {
        // columns (1+i, 2), (3, 4i): det = (1+i)(4i) - 3*2 = -4 + 4i - 6
        let d = complex_det(&[vec![c(1.0, 1.0), c(2.0, 0.0)], vec![c(3.0, 0.0), c(0.0, 4.0)]]);
        assert!((d - c(-10.0, 4.0)).norm() < 1e-14);
    }

    #[test]
    fn least_squares_exact_and_overdetermined() {
        let cols: Vec<Vec<f64>> = vec![vec![1.0, 1.0, 1.0], vec![0.0, 1.0, 2.0]];
        let fit = least_squares(&cols, &[1.0, 3.0, 5.0], 1e-12).unwrap();
        assert!((fit.coefficients[0] - 1.0).abs() < 1e-14);
        assert!((fit.coefficients[1] - 2.0).abs() < 1e-14);
        assert!(fit.residual_norm < 1e-14);
        let fit = least_squares(&cols, &[0.0, 1.0, 0.0], 1e-12).unwrap();
        assert!((fit.residual_norm - (2.0f64 / 3.0).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn rank_deficiency_detected() {
        let cols = vec![vec![1.0, 2.0, 3.0], vec![2.0, 4.0, 6.0]];
        assert_eq!(least_squares(&cols, &[1.0, 0.0, 0.0], 1e-12), Err(Error::RankDeficient));
        assert_eq!(numerical_rank(&cols, 1e-12), 1);
    }
}
