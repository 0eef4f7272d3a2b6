//! Harmonic symbols `φ = ḡ + f` with trigonometric-polynomial parts.
//!
//! A symbol is stored through its Fourier coefficients `b_j`, `j ∈ [-m, n]`:
//! `b_j = f_j` for `j ≥ 1`, `b_{-j} = conj(g_j)` for `j ≥ 1` and
//! `b_0 = f_0 + conj(g_0)`. On the circle `φ(e^{iθ}) = Σ b_j e^{ijθ}`; inside
//! the disk the harmonic extension is `Σ b_j r^{|j|} e^{ijθ}`.

mod curve;

pub use curve::{point_segment_distance, segment_distance, CurveDiagnostics, DiagnosticTolerances, SymbolCurve, ON_CURVE_TOLERANCE};

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Minimum number of curve samples regardless of the symbol degree.
pub const MIN_CURVE_SAMPLES: usize = 64;

/// A harmonic symbol with finitely many nonzero Fourier coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HarmonicSymbol {
    /// `coeffs[k]` holds `b_{k - m}`.
    coeffs: Vec<Complex64>,
    m: usize,
    n: usize,
}

impl Default for HarmonicSymbol {
    fn default() -> Self {
        Self::zero()
    }
}

impl HarmonicSymbol {
    pub fn zero() -> Self {
        HarmonicSymbol {
            coeffs: vec![Complex64::new(0.0, 0.0)],
            m: 0,
            n: 0,
        }
    }

    /// Builds `φ = ḡ + f` from the Taylor coefficients of `f` and `g`.
    pub fn from_parts(f: &[Complex64], g: &[Complex64]) -> Self {
        let pairs = f
            .iter()
            .enumerate()
            .map(|(k, &c)| (k as i64, c))
            .chain(g.iter().enumerate().map(|(k, &c)| (-(k as i64), c.conj())));
        Self::from_coefficients(pairs)
    }

    /// Builds a symbol from `(j, b_j)` pairs. Repeated indices are summed.
    pub fn from_coefficients<I>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (i64, Complex64)>,
    {
        let pairs: Vec<(i64, Complex64)> = pairs.into_iter().collect();
        let lo = pairs.iter().map(|&(j, _)| j).min().unwrap_or(0).min(0);
        let hi = pairs.iter().map(|&(j, _)| j).max().unwrap_or(0).max(0);
        let mut dense = vec![Complex64::new(0.0, 0.0); (hi - lo + 1) as usize];
        for (j, c) in pairs {
            dense[(j - lo) as usize] += c;
        }
        Self::from_dense(dense, (-lo) as usize)
    }

    /// Trims zero coefficients at both ends so that `m` and `n` are the true
    /// anti-analytic and analytic degrees.
    fn from_dense(mut dense: Vec<Complex64>, mut m: usize) -> Self {
        let zero = Complex64::new(0.0, 0.0);
        while dense.len() > m + 1 && *dense.last().unwrap() == zero {
            dense.pop();
        }
        let lead = dense.iter().take(m).take_while(|&&c| c == zero).count();
        dense.drain(..lead);
        m -= lead;
        let n = dense.len() - 1 - m;
        HarmonicSymbol {
            coeffs: dense,
            m,
            n,
        }
    }

    /// Anti-analytic degree `m` (number of negative Fourier modes).
    pub fn anti_analytic_degree(&self) -> usize {
        self.m
    }

    /// Analytic degree `n`.
    pub fn analytic_degree(&self) -> usize {
        self.n
    }

    /// Fourier coefficient `b_j`; zero outside `[-m, n]`.
    pub fn coeff(&self, j: i64) -> Complex64 {
        let k = j + self.m as i64;
        if k < 0 || k as usize >= self.coeffs.len() {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs[k as usize]
        }
    }

    /// Iterates `(j, b_j)` over `j ∈ [-m, n]`, including zero entries.
    pub fn coefficients(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        let m = self.m as i64;
        self.coeffs
            .iter()
            .enumerate()
            .map(move |(k, &c)| (k as i64 - m, c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.norm_sqr() == 0.0)
    }

    pub fn is_constant(&self) -> bool {
        self.coefficients().all(|(j, c)| j == 0 || c.norm_sqr() == 0.0)
    }

    /// `m = 0`: the symbol is the boundary value of an analytic polynomial.
    pub fn is_analytic(&self) -> bool {
        self.m == 0
    }

    /// True when `b_{-j} = conj(b_j)` for every `j`, i.e. `φ` is real on the circle.
    pub fn is_real_valued(&self) -> bool {
        self.coefficients().all(|(j, c)| self.coeff(-j) == c.conj())
    }

    /// `φ(e^{iθ}) = Σ_j b_j e^{ijθ}`.
    pub fn eval_boundary(&self, theta: f64) -> Complex64 {
        self.coefficients()
            .filter(|(_, c)| c.norm_sqr() != 0.0)
            .map(|(j, c)| c * Complex64::cis(j as f64 * theta))
            .sum()
    }

    /// `dφ/dθ = Σ_j i j b_j e^{ijθ}`.
    pub fn eval_tangent(&self, theta: f64) -> Complex64 {
        self.coefficients()
            .filter(|(j, c)| *j != 0 && c.norm_sqr() != 0.0)
            .map(|(j, c)| Complex64::new(0.0, j as f64) * c * Complex64::cis(j as f64 * theta))
            .sum()
    }

    /// Harmonic extension `ḡ(z) + f(z)` at `|z| < 1`.
    pub fn eval_disk(&self, z: Complex64) -> Result<Complex64> {
        let r = z.norm();
        if !(r < 1.0) {
            return Err(Error::OutsideDisk { z });
        }
        let theta = z.arg();
        Ok(self
            .coefficients()
            .filter(|(_, c)| c.norm_sqr() != 0.0)
            .map(|(j, c)| c * r.powi(j.unsigned_abs() as i32) * Complex64::cis(j as f64 * theta))
            .sum())
    }

    /// `‖φ'‖₂² = Σ l² |b_l|²` with respect to normalised arc length.
    pub fn derivative_norm_sq(&self) -> f64 {
        self.coefficients()
            .map(|(l, c)| (l * l) as f64 * c.norm_sqr())
            .sum()
    }

    /// Wiener algebra norm `Σ |b_j|`.
    pub fn wiener_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).sum()
    }

    /// Upper bound for `sup_θ |φ|` and for the spectral radius of `T_φ`.
    pub fn sup_bound(&self) -> f64 {
        self.wiener_norm()
    }

    /// Smallest admissible sample count for [`HarmonicSymbol::sample_curve`].
    pub fn min_curve_samples(&self) -> usize {
        MIN_CURVE_SAMPLES.max(16 * (self.m + self.n + 1))
    }

    /// Sample count used by the analysis pipeline when none is configured.
    pub fn default_curve_samples(&self) -> usize {
        1024.max(self.min_curve_samples())
    }

    /// Uniform-angle samples `φ(e^{2πik/M})` without the sample-count guard.
    pub fn boundary_samples(&self, count: usize) -> Vec<Complex64> {
        (0..count)
            .map(|k| self.eval_boundary(sample_angle(k, count)))
            .collect()
    }

    pub fn sample_curve(&self, count: usize) -> Result<SymbolCurve> {
        let minimum = self.min_curve_samples();
        if count < minimum {
            return Err(Error::TooFewSamples {
                requested: count,
                minimum,
            });
        }
        let tangents = (0..count)
            .map(|k| self.eval_tangent(sample_angle(k, count)))
            .collect();
        Ok(SymbolCurve::new(self.boundary_samples(count), tangents))
    }
}

/// Absolute on-curve tolerance for `curve`.
pub(crate) fn curve_tolerance(curve: &SymbolCurve) -> f64 {
    curve::ON_CURVE_TOLERANCE * curve.scale()
}

pub(crate) fn sample_angle(k: usize, count: usize) -> f64 {
    TAU * k as f64 / count as f64
}
