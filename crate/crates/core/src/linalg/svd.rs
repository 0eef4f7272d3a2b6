use num_complex::Complex64;

use super::{lu_factor, vec_norm, ComplexMatrix};
use crate::error::Result;

const RESIDUAL_TOLERANCE: f64 = 1e-12;
const MAX_KRYLOV: usize = 400;
const CHECK_EVERY: usize = 2;

/// `σ_min(A - λI)` by Lanczos on `((A - λI)*(A - λI))⁻¹`.
///
/// Each step solves with `A - λI` and its adjoint using a single LU
/// factorisation; the Krylov basis is fully reorthogonalised. A Ritz value
/// never exceeds the largest eigenvalue `1/σ_min²`, so the returned value is
/// never below the true `σ_min`. An exactly singular pivot yields 0.
pub fn smallest_singular_value(a: &ComplexMatrix, lambda: Complex64) -> Result<f64> {
    let n = a.require_square()?;
    if n == 0 {
        return Ok(0.0);
    }
    let factors = lu_factor(&a.shifted(lambda))?;
    if factors.is_singular() {
        return Ok(0.0);
    }
    let limit = n.min(MAX_KRYLOV);
    let mut basis: Vec<Vec<Complex64>> = vec![start_vector(n)];
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut theta = 0.0;
    for k in 0..limit {
        let z = factors.solve_adjoint(&basis[k])?;
        let mut w = factors.solve(&z)?;
        if w.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            // Overflow means A - λI is numerically singular.
            return Ok(0.0);
        }
        let a_k = dot(&basis[k], &w).re;
        alpha.push(a_k);
        // Two passes of Gram-Schmidt against the whole basis.
        for _ in 0..2 {
            for q in &basis {
                let h = dot(q, &w);
                for (wi, qi) in w.iter_mut().zip(q) {
                    *wi -= h * qi;
                }
            }
        }
        let b_k = vec_norm(&w);
        let done = k + 1 == limit || b_k <= f64::EPSILON * a_k.abs();
        if done || (k + 1) % CHECK_EVERY == 0 {
            let (t, last) = largest_ritz_pair(&alpha, &beta);
            theta = t;
            if done || (b_k * last).abs() <= RESIDUAL_TOLERANCE * t {
                break;
            }
        }
        beta.push(b_k);
        basis.push(w.into_iter().map(|v| v / b_k).collect());
    }
    if !(theta > 0.0) || !theta.is_finite() {
        return Ok(0.0);
    }
    Ok(1.0 / theta.sqrt())
}

fn dot(x: &[Complex64], y: &[Complex64]) -> Complex64 {
    x.iter().zip(y).map(|(a, b)| a.conj() * b).sum()
}

/// Largest eigenvalue of the symmetric tridiagonal matrix with diagonal
/// `alpha` and off-diagonal `beta`, with the last component of its unit
/// eigenvector. Sturm bisection for the value, inverse iteration for the
/// vector.
fn largest_ritz_pair(alpha: &[f64], beta: &[f64]) -> (f64, f64) {
    let k = alpha.len();
    let radius = (0..k)
        .map(|i| {
            let left = if i > 0 { beta[i - 1].abs() } else { 0.0 };
            let right = if i + 1 < k { beta[i].abs() } else { 0.0 };
            alpha[i].abs() + left + right
        })
        .fold(0.0, f64::max);
    let pivot_floor = f64::EPSILON * radius.max(f64::MIN_POSITIVE);
    // Number of eigenvalues strictly above x.
    let count_above = |x: f64| {
        let mut q = 1.0f64;
        let mut above = 0;
        for i in 0..k {
            q = alpha[i] - x - if i > 0 { beta[i - 1] * beta[i - 1] / q } else { 0.0 };
            if q.abs() < pivot_floor {
                q = -pivot_floor;
            }
            if q > 0.0 {
                above += 1;
            }
        }
        above
    };
    let (mut lo, mut hi) = (-radius, radius);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if count_above(mid) > 0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let theta = 0.5 * (lo + hi);

    let mut v = vec![1.0; k];
    for _ in 0..3 {
        v = solve_shifted_tridiagonal(alpha, beta, theta, &v, pivot_floor);
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return (theta, 0.0);
        }
        v.iter_mut().for_each(|x| *x /= norm);
    }
    (theta, v[k - 1])
}

/// Solves `(T - θI) x = b` by Gaussian elimination with partial pivoting;
/// tiny pivots are replaced by `floor`.
fn solve_shifted_tridiagonal(alpha: &[f64], beta: &[f64], theta: f64, b: &[f64], floor: f64) -> Vec<f64> {
    let k = alpha.len();
    // Row i holds entries in columns i, i+1, i+2 after elimination.
    let mut rows: Vec<[f64; 3]> = (0..k)
        .map(|i| [alpha[i] - theta, if i + 1 < k { beta[i] } else { 0.0 }, 0.0])
        .collect();
    let mut sub: Vec<f64> = (0..k).map(|i| if i > 0 { beta[i - 1] } else { 0.0 }).collect();
    let mut rhs = b.to_vec();
    for i in 0..k.saturating_sub(1) {
        if sub[i + 1].abs() > rows[i][0].abs() {
            // Swap rows i and i+1; row i+1 currently spans columns i, i+1, i+2.
            let next = [sub[i + 1], rows[i + 1][0], rows[i + 1][1]];
            rows[i + 1] = [rows[i][1], rows[i][2], 0.0];
            sub[i + 1] = rows[i][0];
            rows[i] = next;
            rhs.swap(i, i + 1);
        }
        if rows[i][0].abs() < floor {
            rows[i][0] = floor;
        }
        let m = sub[i + 1] / rows[i][0];
        rows[i + 1][0] -= m * rows[i][1];
        rows[i + 1][1] -= m * rows[i][2];
        rhs[i + 1] -= m * rhs[i];
    }
    if rows[k - 1][0].abs() < floor {
        rows[k - 1][0] = floor;
    }
    let mut x = vec![0.0; k];
    for i in (0..k).rev() {
        let mut acc = rhs[i];
        if i + 1 < k {
            acc -= rows[i][1] * x[i + 1];
        }
        if i + 2 < k {
            acc -= rows[i][2] * x[i + 2];
        }
        x[i] = acc / rows[i][0];
    }
    x
}

fn start_vector(n: usize) -> Vec<Complex64> {
    // Deterministic, without special structure relative to Toeplitz bands.
    const GOLDEN: f64 = 0.618_033_988_749_894_9;
    let v: Vec<Complex64> = (0..n)
        .map(|i| {
            let t = (i as f64 + 1.0) * GOLDEN;
            Complex64::new(1.0 + t.fract(), (t * 1.7).fract() - 0.5)
        })
        .collect();
    let norm = vec_norm(&v);
    v.into_iter().map(|z| z / norm).collect()
}

/// All singular values, descending, by one-sided Jacobi rotations.
///
/// Slow (`O(N³)` per sweep); intended for cross-checking
/// [`smallest_singular_value`].
pub fn singular_values(a: &ComplexMatrix) -> Vec<f64> {
    let (rows, cols) = (a.rows(), a.cols());
    let mut columns: Vec<Vec<Complex64>> = (0..cols).map(|j| (0..rows).map(|i| a[(i, j)]).collect()).collect();
    for _sweep in 0..60 {
        let mut rotated = false;
        for p in 0..cols {
            for q in (p + 1)..cols {
                let alpha: f64 = columns[p].iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = columns[q].iter().map(|z| z.norm_sqr()).sum();
                let gamma: Complex64 = columns[p].iter().zip(&columns[q]).map(|(u, v)| u.conj() * v).sum();
                let g = gamma.norm();
                if g == 0.0 || g <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let (left, right) = columns.split_at_mut(q);
                for (u, v) in left[p].iter_mut().zip(right[0].iter_mut()) {
                    let vq = *v * phase.conj();
                    let up = *u;
                    *u = up * c - vq * s;
                    *v = (up * s + vq * c) * phase;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<f64> = columns.iter().map(|col| vec_norm(col)).collect();
    sv.sort_by(|x, y| y.total_cmp(x));
    sv
}
