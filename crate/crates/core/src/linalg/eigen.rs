use num_complex::Complex64;

use super::{ComplexMatrix, ZERO};
use crate::error::{Error, Result};

/// Default iteration budget per eigenvalue for [`eigenvalues`].
pub const DEFAULT_MAX_SWEEPS: usize = 30;

#[derive(Debug, Clone, PartialEq)]
pub struct EigenResult {
    /// Eigenvalues in deflation order. When `converged` is false the entries
    /// that never deflated are the current diagonal of the iterate.
    pub values: Vec<Complex64>,
    pub converged: bool,
    /// Total number of QR sweeps performed.
    pub sweeps: usize,
}

/// Diagonal similarity `D⁻¹AD` with power-of-two scales that roughly
/// equalises off-diagonal row and column norms. Returns the scaled matrix
/// and the diagonal of `D`.
pub fn balance(a: &ComplexMatrix) -> Result<(ComplexMatrix, Vec<f64>)> {
    const RADIX: f64 = 2.0;
    let n = a.require_square()?;
    let mut m = a.clone();
    let mut scale = vec![1.0; n];
    let abs1 = |z: Complex64| z.re.abs() + z.im.abs();
    for _ in 0..200 {
        let mut changed = false;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += abs1(m[(j, i)]);
                    r += abs1(m[(i, j)]);
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let (mut c, mut r) = (c, r);
            let mut f = 1.0;
            let mut g = r / RADIX;
            while c < g && f < 1e100 {
                f *= RADIX;
                c *= RADIX;
                r /= RADIX;
                g /= RADIX;
            }
            g = c / RADIX;
            while g >= r && f > 1e-100 {
                f /= RADIX;
                c /= RADIX;
                g /= RADIX;
                r *= RADIX;
            }
            if c + r < 0.95 * s {
                changed = true;
                scale[i] *= f;
                for j in 0..n {
                    m[(i, j)] /= f;
                    m[(j, i)] *= f;
                }
            }
        }
        if !changed {
            break;
        }
    }
    Ok((m, scale))
}

/// Householder reduction to upper Hessenberg form, `H = Q*AQ`.
pub fn hessenberg(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = a.require_square()?;
    let mut h = a.clone();
    let mut v = vec![ZERO; n];
    for k in 0..n.saturating_sub(2) {
        let len = n - k - 1;
        let x: Vec<Complex64> = (0..len).map(|t| h[(k + 1 + t, k)]).collect();
        let xnorm = super::vec_norm(&x);
        if xnorm == 0.0 || x[1..].iter().all(|z| *z == ZERO) {
            continue;
        }
        let phase = if x[0] == ZERO {
            Complex64::new(1.0, 0.0)
        } else {
            x[0] / x[0].norm()
        };
        let alpha = -phase * xnorm;
        v[..len].copy_from_slice(&x);
        v[0] -= alpha;
        let vnorm_sq: f64 = v[..len].iter().map(|z| z.norm_sqr()).sum();
        let beta = 2.0 / vnorm_sq;

        // Left: rows k+1.., columns k..
        let mut s = vec![ZERO; n];
        for (t, vt) in v[..len].iter().enumerate() {
            let vc = vt.conj();
            let row = h.row(k + 1 + t);
            for j in k..n {
                s[j] += vc * row[j];
            }
        }
        for (t, vt) in v[..len].iter().enumerate() {
            let vt = vt * beta;
            let i = k + 1 + t;
            for j in k..n {
                let sj = s[j];
                h[(i, j)] -= vt * sj;
            }
        }
        // Right: all rows, columns k+1..
        for i in 0..n {
            let mut acc = ZERO;
            for t in 0..len {
                acc += h[(i, k + 1 + t)] * v[t];
            }
            acc *= beta;
            for t in 0..len {
                let vc = v[t].conj();
                h[(i, k + 1 + t)] -= acc * vc;
            }
        }
        h[(k + 1, k)] = alpha;
        for t in 1..len {
            h[(k + 1 + t, k)] = ZERO;
        }
    }
    Ok(h)
}

/// All eigenvalues of a square matrix by balancing, Hessenberg reduction and
/// single-shift complex QR with Wilkinson shifts.
///
/// Non-convergence within `max_sweeps · N` sweeps is reported through
/// [`EigenResult::converged`], not as an error.
pub fn eigenvalues(a: &ComplexMatrix, max_sweeps: usize) -> Result<EigenResult> {
    let n = a.require_square()?;
    if n == 0 {
        return Err(Error::InvalidOrder { order: 0, minimum: 1 });
    }
    let (balanced, _) = balance(a)?;
    let mut h = hessenberg(&balanced)?;
    symmetrize_tridiagonal(&mut h);
    Ok(hessenberg_qr(&mut h, max_sweeps.saturating_mul(n)))
}

/// For a tridiagonal Hessenberg matrix, rescales by a positive diagonal so
/// that `|h_{k,k+1}| = |h_{k+1,k}|`. Such a matrix is often far from normal
/// (e.g. non-symmetric Toeplitz tridiagonals) while the rescaled one is
/// close to normal, which keeps the QR backward error from being amplified.
fn symmetrize_tridiagonal(h: &mut ComplexMatrix) {
    let n = h.rows();
    let tridiagonal = (0..n).all(|i| (i + 2..n).all(|j| h[(i, j)] == ZERO));
    if !tridiagonal || n < 3 {
        return;
    }
    // Only the ratios d_{k+1}/d_k enter a tridiagonal similarity, so no
    // running product is needed. Zero couplings split the matrix and are left alone.
    for k in 0..n - 1 {
        let up = h[(k, k + 1)].norm();
        let low = h[(k + 1, k)].norm();
        if up == 0.0 || low == 0.0 {
            continue;
        }
        let ratio = (up / low).sqrt();
        h[(k + 1, k)] *= ratio;
        h[(k, k + 1)] /= ratio;
    }
}

fn abs1(z: Complex64) -> f64 {
    z.re.abs() + z.im.abs()
}

/// Complex Givens rotation `G = [[c, s], [-conj(s), c]]` with `G·[x; y] = [r; 0]`.
fn givens(x: Complex64, y: Complex64) -> (f64, Complex64, Complex64) {
    if y == ZERO {
        return (1.0, ZERO, x);
    }
    if x == ZERO {
        let ny = y.norm();
        return (0.0, y.conj() / ny, Complex64::new(ny, 0.0));
    }
    let nx = x.norm();
    let nu = nx.hypot(y.norm());
    let phase = x / nx;
    (nx / nu, phase * y.conj() / nu, phase * nu)
}

fn wilkinson_shift(h: &ComplexMatrix, i: usize) -> Complex64 {
    let mut t = h[(i, i)];
    let u = h[(i - 1, i)].sqrt() * h[(i, i - 1)].sqrt();
    let s = abs1(u);
    if s != 0.0 {
        let x = (h[(i - 1, i - 1)] - t) * 0.5;
        let sx = abs1(x);
        let s = s.max(sx);
        let mut y = ((x / s) * (x / s) + (u / s) * (u / s)).sqrt() * s;
        if sx > 0.0 {
            let xs = x / sx;
            if xs.re * y.re + xs.im * y.im < 0.0 {
                y = -y;
            }
        }
        let denom = x + y;
        if denom != ZERO {
            t -= u * (u / denom);
        }
    }
    t
}

fn hessenberg_qr(h: &mut ComplexMatrix, max_iterations: usize) -> EigenResult {
    let n = h.rows();
    let ulp = f64::EPSILON;
    let safe_min = f64::MIN_POSITIVE;
    let small = safe_min * (n as f64 / ulp);
    let mut values = vec![ZERO; n];
    let mut total = 0usize;
    let mut converged = true;

    let mut hi = n - 1;
    let mut its = 0usize;
    loop {
        if hi == 0 {
            values[0] = h[(0, 0)];
            break;
        }
        // Locate the start of the unreduced block ending at `hi`.
        let mut lo = 0;
        for k in (1..=hi).rev() {
            let sub = abs1(h[(k, k - 1)]);
            if sub <= small {
                h[(k, k - 1)] = ZERO;
                lo = k;
                break;
            }
            let mut tst = abs1(h[(k - 1, k - 1)]) + abs1(h[(k, k)]);
            if tst == 0.0 {
                if k >= 2 {
                    tst += abs1(h[(k - 1, k - 2)]);
                }
                if k < hi {
                    tst += abs1(h[(k + 1, k)]);
                }
            }
            if sub <= ulp * tst {
                // Ahues–Tisseur refinement.
                let ab = abs1(h[(k, k - 1)]).max(abs1(h[(k - 1, k)]));
                let ba = abs1(h[(k, k - 1)]).min(abs1(h[(k - 1, k)]));
                let diff = h[(k - 1, k - 1)] - h[(k, k)];
                let aa = abs1(h[(k, k)]).max(abs1(diff));
                let bb = abs1(h[(k, k)]).min(abs1(diff));
                let s = aa + ab;
                if ba * (ab / s) <= (small).max(ulp * (bb * (aa / s))) {
                    h[(k, k - 1)] = ZERO;
                    lo = k;
                    break;
                }
            }
        }

        if lo == hi {
            values[hi] = h[(hi, hi)];
            hi -= 1;
            its = 0;
            continue;
        }
        if total >= max_iterations {
            converged = false;
            for (k, v) in values.iter_mut().enumerate().take(hi + 1) {
                *v = h[(k, k)];
            }
            break;
        }

        let shift = if its > 0 && its.is_multiple_of(10) {
            // Exceptional shift to break cycles.
            let anchor = if its.is_multiple_of(20) { lo } else { hi };
            let sub = if anchor == lo { h[(lo + 1, lo)] } else { h[(hi, hi - 1)] };
            h[(anchor, anchor)] + Complex64::new(0.75 * sub.re.abs(), 0.0)
        } else {
            wilkinson_shift(h, hi)
        };

        qr_sweep(h, lo, hi, shift);
        its += 1;
        total += 1;
    }

    EigenResult {
        values,
        converged,
        sweeps: total,
    }
}

/// One implicit single-shift QR sweep on the active block `[lo, hi]`.
fn qr_sweep(h: &mut ComplexMatrix, lo: usize, hi: usize, shift: Complex64) {
    let n = h.cols();
    for k in lo..hi {
        let (x, y) = if k == lo {
            (h[(lo, lo)] - shift, h[(lo + 1, lo)])
        } else {
            (h[(k, k - 1)], h[(k + 1, k - 1)])
        };
        let (c, s, r) = givens(x, y);
        let start = if k == lo { lo } else {
            h[(k, k - 1)] = r;
            h[(k + 1, k - 1)] = ZERO;
            k
        };
        let sc = s.conj();
        {
            let data = &mut h.data;
            let (top, bottom) = data.split_at_mut((k + 1) * n);
            let row_k = &mut top[k * n..];
            let row_k1 = &mut bottom[..n];
            for j in start..=hi {
                let a = row_k[j];
                let b = row_k1[j];
                row_k[j] = a * c + s * b;
                row_k1[j] = b * c - sc * a;
            }
        }
        let last = (k + 2).min(hi);
        for i in lo..=last {
            let a = h[(i, k)];
            let b = h[(i, k + 1)];
            h[(i, k)] = a * c + b * sc;
            h[(i, k + 1)] = b * c - a * s;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sorted(mut v: Vec<Complex64>) -> Vec<Complex64> {
        v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        v
    }

    #[test]
    fn small_hessenberg_is_unchanged() {
        let a = ComplexMatrix::from_rows(&[vec![c(1.0, 2.0), c(3.0, 0.0)], vec![c(-1.0, 0.5), c(0.0, 1.0)]]).unwrap();
        assert_eq!(hessenberg(&a).unwrap(), a);
        let d = ComplexMatrix::from_fn(4, 4, |i, j| if i == j { c(i as f64, 1.0) } else { ZERO });
        assert_eq!(hessenberg(&d).unwrap(), d);
    }

    #[test]
    fn diagonal_eigenvalues() {
        let d = [c(1.0, 0.0), c(0.0, 2.0), c(-3.0, 0.0)];
        let a = ComplexMatrix::from_fn(3, 3, |i, j| if i == j { d[i] } else { ZERO });
        let r = eigenvalues(&a, DEFAULT_MAX_SWEEPS).unwrap();
        assert!(r.converged);
        assert_eq!(sorted(r.values), sorted(d.to_vec()));
    }

    #[test]
    fn two_by_two_square_root() {
        let a = ComplexMatrix::from_rows(&[vec![ZERO, c(0.25, 0.0)], vec![c(1.0, 0.0), ZERO]]).unwrap();
        let r = eigenvalues(&a, DEFAULT_MAX_SWEEPS).unwrap();
        let v = sorted(r.values);
        assert!((v[0] - c(-0.5, 0.0)).norm() < 1e-14);
        assert!((v[1] - c(0.5, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn non_square_is_rejected() {
        let a = ComplexMatrix::zeros(2, 3);
        assert!(matches!(hessenberg(&a), Err(Error::NotSquare { .. })));
        assert!(matches!(eigenvalues(&a, 10), Err(Error::NotSquare { .. })));
    }

    #[test]
    fn nilpotent_block_converges() {
        let n = 60;
        let a = ComplexMatrix::from_fn(n, n, |i, j| if i == j + 1 { c(1.0, 0.0) } else { ZERO });
        let r = eigenvalues(&a, DEFAULT_MAX_SWEEPS).unwrap();
        assert!(r.converged);
        assert!(r.values.iter().all(|z| z.norm() < 1.0));
    }

    #[test]
    fn zero_budget_reports_non_convergence() {
        let a = ComplexMatrix::from_fn(5, 5, |i, j| c((i * 7 + j * 3) as f64 % 5.0, (i + 2 * j) as f64 % 3.0));
        let r = eigenvalues(&a, 0).unwrap();
        assert!(!r.converged);
        assert_eq!(r.values.len(), 5);
    }

    #[test]
    fn balance_is_a_diagonal_similarity() {
        let a = ComplexMatrix::from_rows(&[
            vec![c(1.0, 0.0), c(1e6, 0.0), ZERO],
            vec![c(1e-6, 0.0), c(2.0, 0.0), c(1e4, 0.0)],
            vec![ZERO, c(1e-4, 1.0), c(3.0, 0.0)],
        ])
        .unwrap();
        let (b, d) = balance(&a).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert!((b[(i, j)] - a[(i, j)] * d[j] / d[i]).norm() <= 1e-15 * a[(i, j)].norm());
            }
        }
        assert!(b.frobenius_norm() < a.frobenius_norm());
    }
}
