//! Finite sections of the Hardy–Toeplitz and Bergman–Toeplitz operators.
//!
//! In the monomial bases `t^n` (Hardy) and `√(n+1) z^n` (Bergman) the two
//! operators with symbol `φ` have matrices `[b_{i-j}]` and
//! `τ_{i,j} = √((min(i,j)+1)/(max(i,j)+1)) · b_{i-j}`.

use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::symbol::HarmonicSymbol;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SectionKind {
    #[serde(rename = "HT")]
    Hardy,
    #[serde(rename = "BT")]
    Bergman,
}

/// Upper-left `N×N` corner of a Toeplitz-type operator matrix.
#[derive(Debug, Clone)]
pub struct FiniteSection {
    kind: SectionKind,
    symbol: HarmonicSymbol,
    matrix: ComplexMatrix,
}

impl FiniteSection {
    pub fn new(kind: SectionKind, symbol: &HarmonicSymbol, order: usize) -> Result<Self> {
        match kind {
            SectionKind::Hardy => ht_section(symbol, order),
            SectionKind::Bergman => bt_section(symbol, order),
        }
    }

    pub fn kind(&self) -> SectionKind {
        self.kind
    }

    pub fn order(&self) -> usize {
        self.matrix.rows()
    }

    pub fn symbol(&self) -> &HarmonicSymbol {
        &self.symbol
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    /// Row-major CSV dump, one line per row with `re,im` pairs per entry.
    pub fn to_csv(&self) -> String {
        let n = self.order();
        let mut out = String::new();
        for i in 0..n {
            for (j, z) in self.matrix.row(i).iter().enumerate() {
                if j > 0 {
                    out.push(',');
                }
                let _ = write!(out, "{:.16e},{:.16e}", z.re, z.im);
            }
            out.push('\n');
        }
        out
    }
}

fn check_order(order: usize) -> Result<()> {
    if order < 1 {
        return Err(Error::InvalidOrder { order, minimum: 1 });
    }
    Ok(())
}

/// Bergman weight `√((min(i,j)+1)/(max(i,j)+1))`.
pub fn bergman_weight(i: usize, j: usize) -> f64 {
    let (lo, hi) = if i <= j { (i, j) } else { (j, i) };
    ((lo as f64 + 1.0) / (hi as f64 + 1.0)).sqrt()
}

fn diff_index(i: usize, j: usize) -> i64 {
    i as i64 - j as i64
}

/// Hardy–Toeplitz section `[b_{i-j}]`.
pub fn ht_section(s: &HarmonicSymbol, order: usize) -> Result<FiniteSection> {
    check_order(order)?;
    Ok(FiniteSection {
        kind: SectionKind::Hardy,
        symbol: s.clone(),
        matrix: ComplexMatrix::from_fn(order, order, |i, j| s.coeff(diff_index(i, j))),
    })
}

/// Bergman–Toeplitz matrix entry `τ_{i,j}`.
pub fn bt_entry(s: &HarmonicSymbol, i: usize, j: usize) -> Complex64 {
    let b = s.coeff(diff_index(i, j));
    if b == Complex64::new(0.0, 0.0) {
        return b;
    }
    b * bergman_weight(i, j)
}

/// Bergman–Toeplitz section `[τ_{i,j}]`.
pub fn bt_section(s: &HarmonicSymbol, order: usize) -> Result<FiniteSection> {
    check_order(order)?;
    Ok(FiniteSection {
        kind: SectionKind::Bergman,
        symbol: s.clone(),
        matrix: ComplexMatrix::from_fn(order, order, |i, j| bt_entry(s, i, j)),
    })
}

/// `Σ_{0≤i,j<N} |τ_{i,j} - b_{i-j}|²`, the squared Frobenius norm of the
/// difference of the two sections.
pub fn hs_difference_sq_truncated(s: &HarmonicSymbol, order: usize) -> f64 {
    let mut total = 0.0;
    for (l, b) in s.coefficients() {
        let mag = b.norm_sqr();
        let shift = l.unsigned_abs() as usize;
        if l == 0 || mag == 0.0 || shift >= order {
            continue;
        }
        // Pairs on diagonal l: min index k = 0..N-|l|-1, max index k+|l|.
        let inner: f64 = (0..order - shift)
            .map(|k| {
                let gap = 1.0 - bergman_weight(k, k + shift);
                gap * gap
            })
            .sum();
        total += mag * inner;
    }
    total
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesValue {
    pub value: f64,
    /// Certified bound on `|value - exact|`.
    pub tail_bound: f64,
    /// Number of directly summed terms of each inner series.
    pub terms: usize,
}

/// Term `k` of the inner series
/// `S(l) = Σ_k 1/((k+l+1)(√(k+l+1)+√(k+1))²)`.
fn inner_term(l: f64, k: f64) -> f64 {
    let hi = k + l + 1.0;
    let root = hi.sqrt() + (k + 1.0).sqrt();
    1.0 / (hi * root * root)
}

/// `∫_K^∞` of the inner term as a function of real `k`, in closed form.
///
/// With `a = K + 1`, `v = √(a+l)`, `w = √a + v`, `q = √(a/(a+l))` and
/// `r = (1-q)/(1+q)` the integral is `(2l·ln(1+r) - l²/w²)/l²`; writing
/// `1 - q = l/(v w)` avoids cancellation for large `K`.
fn inner_tail_integral(l: f64, k: f64) -> f64 {
    let a = k + 1.0;
    let u = a.sqrt();
    let v = (a + l).sqrt();
    let w = u + v;
    let one_minus_q = l / (v * w);
    let r = one_minus_q / (2.0 - one_minus_q);
    (2.0 * l * r.ln_1p() - l * l / (w * w)) / (l * l)
}

/// Inner series summed directly over `k < terms`, plus the midpoint of the
/// integral bracket for the remainder. Returns `(value, half_width)`.
fn inner_series(l: f64, terms: usize) -> (f64, f64) {
    let partial = neumaier_sum((0..terms).rev().map(|k| inner_term(l, k as f64)));
    let k = terms as f64;
    // Terms decrease in k, so the tail lies in [I, I + t_K].
    let integral = inner_tail_integral(l, k);
    let last = inner_term(l, k);
    (partial + integral + 0.5 * last, 0.5 * last)
}

/// Compensated summation; the error is bounded by a few ulps of the result
/// independently of the number of terms.
fn neumaier_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// `‖𝒯_φ̂ - 𝒯_φ‖²_{S₂} = Σ_l |l b_l|² S(|l|)` with a certified error bound
/// below `tol`.
///
/// Each inner series is summed directly for `K` terms; the remainder is
/// bracketed between `∫_K^∞` and `∫_K^∞ + t_K` of its monotone terms.
/// Since `t_K ≤ 1/(4(K+1)²)`, `K` is chosen so that
/// `‖φ'‖²/(8(K+1)²) < tol` before rounding is accounted for.
pub fn hs_difference_sq_series(s: &HarmonicSymbol, tol: f64) -> Result<SeriesValue> {
    if !(tol > 0.0) {
        return Err(Error::NonPositive { name: "tol", value: tol });
    }
    let mut weights: Vec<(f64, f64)> = Vec::new();
    for l in 1..=(s.anti_analytic_degree().max(s.analytic_degree()) as i64) {
        let mag = s.coeff(l).norm_sqr() + s.coeff(-l).norm_sqr();
        if mag > 0.0 {
            let lf = l as f64;
            weights.push((lf, lf * lf * mag));
        }
    }
    let total_weight: f64 = weights.iter().map(|w| w.1).sum();
    if total_weight == 0.0 {
        return Ok(SeriesValue {
            value: 0.0,
            tail_bound: 0.0,
            terms: 0,
        });
    }

    let mut terms = ((total_weight / (8.0 * tol)).sqrt().ceil() as usize).max(16);
    loop {
        let mut value = 0.0;
        let mut bound = 0.0;
        for &(l, weight) in &weights {
            let (sum, half_width) = inner_series(l, terms);
            value += weight * sum;
            bound += weight * half_width;
        }
        // Rounding: compensated inner sums plus the short outer sum.
        bound += 8.0 * (weights.len() as f64 + 2.0) * f64::EPSILON * value;
        if bound < tol {
            return Ok(SeriesValue {
                value,
                tail_bound: bound,
                terms,
            });
        }
        terms *= 2;
    }
}

/// `(π²/24)·‖φ'‖₂²`.
pub fn hs_bound(s: &HarmonicSymbol) -> f64 {
    PI * PI / 24.0 * s.derivative_norm_sq()
}
