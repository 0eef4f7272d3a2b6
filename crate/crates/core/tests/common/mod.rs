//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use num_bigint::BigInt;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use toeplitz_spectra::linalg::ComplexMatrix;
use toeplitz_spectra::symbol::HarmonicSymbol;
use toeplitz_spectra::Complex64;

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Uniform point of the open disk of the given radius.
pub fn disk_point(rng: &mut StdRng, radius: f64) -> Complex64 {
    let r = radius * rng.gen::<f64>().sqrt();
    Complex64::from_polar(r, rng.gen_range(0.0..std::f64::consts::TAU))
}

/// Random symbol with `b_{-m}` and `b_n` nonzero and all coefficients in the
/// unit disk.
pub fn random_symbol(rng: &mut StdRng, m: usize, n: usize) -> HarmonicSymbol {
    let mut pairs = Vec::new();
    for j in -(m as i64)..=(n as i64) {
        let mut b = disk_point(rng, 1.0);
        if (j == -(m as i64) || j == n as i64) && b.norm() < 0.1 {
            b = c(0.5, 0.0);
        }
        pairs.push((j, b));
    }
    HarmonicSymbol::from_coefficients(pairs)
}

pub fn random_matrix(rng: &mut StdRng, n: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, n, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

/// Gaussian integers `(re, im)` with parts in `[-k, k]`, row-major.
pub fn gaussian_integer_matrix(rng: &mut StdRng, n: usize, k: i64) -> Vec<(i64, i64)> {
    (0..n * n).map(|_| (rng.gen_range(-k..=k), rng.gen_range(-k..=k))).collect()
}

pub fn to_matrix(entries: &[(i64, i64)], n: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, n, |i, j| {
        let (a, b) = entries[i * n + j];
        c(a as f64, b as f64)
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct GaussInt {
    pub re: BigInt,
    pub im: BigInt,
}

impl GaussInt {
    pub fn zero() -> Self {
        GaussInt {
            re: BigInt::from(0),
            im: BigInt::from(0),
        }
    }

    pub fn from_pair((a, b): (i64, i64)) -> Self {
        GaussInt {
            re: BigInt::from(a),
            im: BigInt::from(b),
        }
    }

    pub fn add(&self, o: &GaussInt) -> GaussInt {
        GaussInt {
            re: &self.re + &o.re,
            im: &self.im + &o.im,
        }
    }

    pub fn mul(&self, o: &GaussInt) -> GaussInt {
        GaussInt {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }

    pub fn shl(&self, bits: usize) -> GaussInt {
        GaussInt {
            re: &self.re << bits,
            im: &self.im << bits,
        }
    }
}

/// Exact coefficients `c_0..c_n` (with `c_n = 1`) of `det(zI - A)` by the
/// Faddeev–LeVerrier recursion over the Gaussian integers.
pub fn characteristic_polynomial(entries: &[(i64, i64)], n: usize) -> Vec<GaussInt> {
    let a: Vec<GaussInt> = entries.iter().map(|&p| GaussInt::from_pair(p)).collect();
    let mut coeffs = vec![GaussInt::zero(); n + 1];
    coeffs[n] = GaussInt::from_pair((1, 0));
    let mut m = vec![GaussInt::zero(); n * n];
    for k in 1..=n {
        // M_k = A M_{k-1} + c_{n-k+1} I
        let mut next = vec![GaussInt::zero(); n * n];
        for i in 0..n {
            for l in 0..n {
                if a[i * n + l].re.sign() == num_bigint::Sign::NoSign && a[i * n + l].im.sign() == num_bigint::Sign::NoSign {
                    continue;
                }
                for j in 0..n {
                    let t = a[i * n + l].mul(&m[l * n + j]);
                    next[i * n + j] = next[i * n + j].add(&t);
                }
            }
        }
        for i in 0..n {
            next[i * n + i] = next[i * n + i].add(&coeffs[n - k + 1]);
        }
        // c_{n-k} = -tr(A M_k) / k, exact over the integers.
        let mut tr = GaussInt::zero();
        for i in 0..n {
            for l in 0..n {
                tr = tr.add(&a[i * n + l].mul(&next[l * n + i]));
            }
        }
        let kk = BigInt::from(k as i64);
        assert!((&tr.re % &kk) == BigInt::from(0) && (&tr.im % &kk) == BigInt::from(0));
        coeffs[n - k] = GaussInt {
            re: -(&tr.re / &kk),
            im: -(&tr.im / &kk),
        };
        m = next;
    }
    coeffs
}

fn big_to_f64_shifted(x: &BigInt, shift: u64) -> f64 {
    let y: BigInt = x >> shift;
    i128::try_from(&y).expect("fits after shift") as f64
}

/// `num / den` for Gaussian integers, rounded to double precision.
fn ratio(num: &GaussInt, den: &GaussInt) -> Complex64 {
    let bits = [&num.re, &num.im, &den.re, &den.im].iter().map(|x| x.bits()).max().unwrap();
    let shift = bits.saturating_sub(110);
    let n = c(big_to_f64_shifted(&num.re, shift), big_to_f64_shifted(&num.im, shift));
    let d = c(big_to_f64_shifted(&den.re, shift), big_to_f64_shifted(&den.im, shift));
    n / d
}

/// Newton correction `p(z)/p'(z)` with `p` evaluated exactly at the dyadic
/// rational nearest to `z`.
pub fn newton_step(coeffs: &[GaussInt], z: Complex64) -> Complex64 {
    let n = coeffs.len() - 1;
    let scale = z.re.abs().max(z.im.abs()).max(1.0);
    let s = (60 - scale.log2().ceil() as i64).max(0) as usize;
    let f = 2f64.powi(s as i32);
    let zz = GaussInt {
        re: BigInt::from((z.re * f).round() as i128),
        im: BigInt::from((z.im * f).round() as i128),
    };
    // h = 2^{s n} p(z), d = 2^{s (n-1)} p'(z)
    let mut h = coeffs[n].clone();
    let mut d = GaussInt::zero();
    for k in (0..n).rev() {
        d = d.mul(&zz).add(&h);
        h = h.mul(&zz).add(&coeffs[k].shl(s * (n - k)));
    }
    let d = d.shl(s);
    if d.re.bits() == 0 && d.im.bits() == 0 {
        return c(0.0, 0.0);
    }
    ratio(&h, &d)
}

/// Refines `z` towards a root of the exact polynomial.
pub fn polish_root(coeffs: &[GaussInt], mut z: Complex64) -> Complex64 {
    for _ in 0..12 {
        let step = newton_step(coeffs, z);
        z -= step;
        if step.norm() <= 1e-15 * z.norm().max(1.0) {
            break;
        }
    }
    z
}

/// Companion matrix of the monic polynomial, in double precision.
pub fn companion(coeffs: &[GaussInt]) -> ComplexMatrix {
    let n = coeffs.len() - 1;
    let to_f64 = |x: &BigInt| {
        let shift = x.bits().saturating_sub(110);
        big_to_f64_shifted(x, shift) * 2f64.powi(shift as i32)
    };
    ComplexMatrix::from_fn(n, n, |i, j| {
        if i == 0 {
            let k = &coeffs[n - 1 - j];
            -c(to_f64(&k.re), to_f64(&k.im))
        } else if i == j + 1 {
            c(1.0, 0.0)
        } else {
            c(0.0, 0.0)
        }
    })
}

/// Maximum pair distance of a matching between two equally sized multisets,
/// built greedily from the globally closest pairs.
pub fn matching_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(a.len() * b.len());
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            pairs.push(((x - y).norm(), i, j));
        }
    }
    pairs.sort_by(|p, q| p.0.total_cmp(&q.0));
    let (mut ua, mut ub) = (vec![false; a.len()], vec![false; b.len()]);
    let mut worst: f64 = 0.0;
    let mut matched = 0;
    for (d, i, j) in pairs {
        if !ua[i] && !ub[j] {
            ua[i] = true;
            ub[j] = true;
            worst = worst.max(d);
            matched += 1;
            if matched == a.len() {
                break;
            }
        }
    }
    worst
}

/// Eigenvalues of the real symmetric tridiagonal matrix with diagonal `d`
/// and off-diagonal `e`, ascending, by Sturm-count bisection.
pub fn symmetric_tridiagonal_eigenvalues(d: &[f64], e: &[f64]) -> Vec<f64> {
    let n = d.len();
    let bound = d
        .iter()
        .enumerate()
        .map(|(i, x)| x.abs() + if i > 0 { e[i - 1].abs() } else { 0.0 } + if i < n - 1 { e[i].abs() } else { 0.0 })
        .fold(0.0, f64::max);
    // Number of eigenvalues strictly below x.
    let count_below = |x: f64| {
        let mut q = 1.0f64;
        let mut count = 0;
        for i in 0..n {
            let off = if i > 0 { e[i - 1] * e[i - 1] / q } else { 0.0 };
            q = d[i] - x - off;
            if q == 0.0 {
                q = -f64::EPSILON * bound.max(1.0);
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    };
    (0..n)
        .map(|k| {
            let (mut lo, mut hi) = (-bound - 1.0, bound + 1.0);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if count_below(mid) > k {
                    hi = mid;
                } else {
                    lo = mid;
                }
                if hi - lo <= 4.0 * f64::EPSILON * mid.abs().max(1e-300) {
                    break;
                }
            }
            0.5 * (lo + hi)
        })
        .collect()
}

/// Hardy section entry `b_{i-j}` straight from the analytic and
/// anti-analytic parts, `φ = conj(g) + f`.
pub fn ht_entry_from_parts(f: &[Complex64], g: &[Complex64], i: usize, j: usize) -> Complex64 {
    let get = |v: &[Complex64], k: usize| v.get(k).copied().unwrap_or(c(0.0, 0.0));
    if i > j {
        get(f, i - j)
    } else if j > i {
        get(g, j - i).conj()
    } else {
        get(f, 0) + get(g, 0).conj()
    }
}
