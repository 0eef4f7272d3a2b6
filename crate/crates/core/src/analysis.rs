//! Distances to `σ(T_φ)`, the `Σ dist^{3+ε}` eigenvalue sum and the
//! assembled spectral report.
//!
//! For a continuous symbol the Hardy–Toeplitz spectrum is the curve `γ`
//! together with every point it winds around; distances are measured to
//! that filled set.

use std::f64::consts::TAU;
use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{eigenvalues, DEFAULT_MAX_SWEEPS};
use crate::operators::{bt_section, hs_bound, hs_difference_sq_series, hs_difference_sq_truncated};
use crate::spectra::{
    detect_from_spectra, growth_sample_points, resolvent_growth_fit, section_spectra, Component, DetectOptions,
    DiscreteCandidate, GrowthFit, ResolvedTolerances, RungSpectrum, MIN_GROWTH_SAMPLES,
};
use crate::symbol::{CurveDiagnostics, HarmonicSymbol, SymbolCurve};

/// Distance from `z` to `γ ∪ {winding ≠ 0}`.
pub fn dist_to_spectrum(z: Complex64, curve: &SymbolCurve) -> f64 {
    match curve.winding_number(z) {
        Ok(0) => curve.distance(z),
        _ => 0.0,
    }
}

/// `Σ dist^{3+ε}(λ, σ(T_φ))` over the candidates lying in `F0`.
pub fn lt_sum(candidates: &[DiscreteCandidate], curve: &SymbolCurve, epsilon: f64) -> Result<f64> {
    if !(epsilon > 0.0) {
        return Err(Error::NonPositive {
            name: "epsilon",
            value: epsilon,
        });
    }
    Ok(candidates
        .iter()
        .filter(|c| c.component == Component::F0)
        .map(|c| dist_to_spectrum(c.location, curve).powf(3.0 + epsilon))
        .fold(0.0, |acc, v| acc + v))
}

/// Fraction of `values` within `delta` of the filled spectrum.
pub fn fraction_near_spectrum(values: &[Complex64], curve: &SymbolCurve, delta: f64) -> f64 {
    if values.is_empty() {
        return 1.0;
    }
    let near = values.iter().filter(|&&z| dist_to_spectrum(z, curve) <= delta).count();
    near as f64 / values.len() as f64
}

/// Share of the eigenvalues of `bt_section(s, N)` within `0.1·‖φ‖_W` of the
/// filled spectrum. Sections without spectral pollution approach 1.
pub fn weyl_diagnostic(s: &HarmonicSymbol, order: usize) -> Result<f64> {
    if order < 16 {
        return Err(Error::InvalidOrder { order, minimum: 16 });
    }
    let section = bt_section(s, order)?;
    let eig = eigenvalues(section.matrix(), DEFAULT_MAX_SWEEPS)?;
    let curve = s.sample_curve(s.default_curve_samples())?;
    Ok(fraction_near_spectrum(&eig.values, &curve, 0.1 * s.wiener_norm()))
}

/// Bound on the gap between the sampled polyline and the true curve,
/// `2π Σ |j² b_j| / M²`.
pub fn polyline_error_bound(s: &HarmonicSymbol, samples: usize) -> f64 {
    let second: f64 = s.coefficients().map(|(j, c)| (j * j) as f64 * c.norm()).sum();
    TAU * second / (samples * samples) as f64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportOptions {
    pub ladder: Vec<usize>,
    pub epsilon: f64,
    pub series_tol: f64,
    pub detect: DetectOptions,
    /// Hardy section order for the resolvent growth fit.
    pub growth_order: usize,
    pub growth_samples: usize,
}

impl Default for ReportOptions {
    fn default() -> Self {
        ReportOptions {
            ladder: vec![200, 400, 800],
            epsilon: 0.01,
            series_tol: 1e-10,
            detect: DetectOptions::default(),
            growth_order: 400,
            growth_samples: 16,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymbolSummary {
    pub analytic_degree: usize,
    pub anti_analytic_degree: usize,
    /// `(j, [re, im])` for every nonzero `b_j`.
    pub coefficients: Vec<(i64, [f64; 2])>,
    pub wiener_norm: f64,
    pub derivative_norm_sq: f64,
}

impl SymbolSummary {
    pub fn new(s: &HarmonicSymbol) -> Self {
        SymbolSummary {
            analytic_degree: s.analytic_degree(),
            anti_analytic_degree: s.anti_analytic_degree(),
            coefficients: s
                .coefficients()
                .filter(|(_, c)| c.norm_sqr() > 0.0)
                .map(|(j, c)| (j, [c.re, c.im]))
                .collect(),
            wiener_norm: s.wiener_norm(),
            derivative_norm_sq: s.derivative_norm_sq(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RungSummary {
    pub order: usize,
    pub converged: bool,
    pub sweeps: usize,
    pub hs_truncated: f64,
    /// Share of section eigenvalues within `0.1·‖φ‖_W` of `σ(T_φ)`.
    pub weyl_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralReport {
    pub symbol: SymbolSummary,
    pub curve_samples: usize,
    /// `None` when the curve degenerates to a point.
    pub curve_diagnostics: Option<CurveDiagnostics>,
    pub dist_error_bound: f64,
    pub ladder: Vec<RungSummary>,
    /// Truncated Frobenius sum at the largest ladder order.
    pub hs_truncated: f64,
    pub hs_series: f64,
    pub hs_series_tail_bound: f64,
    pub hs_bound: f64,
    pub hs_bound_holds: bool,
    pub tolerances: ResolvedTolerances,
    pub candidates: Vec<DiscreteCandidate>,
    pub uncertified_candidates: Vec<DiscreteCandidate>,
    pub skipped_rungs: Vec<usize>,
    pub epsilon: f64,
    /// Over all persistent `F0` chains, certified or not.
    pub lt_sum: f64,
    pub lt_sum_certified_only: f64,
    /// `lt_sum / ‖φ'‖₂²`, absent for constant symbols.
    pub empirical_constant: Option<f64>,
    pub empirical_constant_certified_only: Option<f64>,
    pub p_hat: Option<f64>,
    pub growth: Option<GrowthFit>,
}

impl SpectralReport {
    pub fn converged(&self) -> bool {
        self.skipped_rungs.is_empty()
    }

    /// Aligned plain-text summary.
    pub fn summary_table(&self) -> String {
        let mut rows: Vec<(String, String)> = vec![
            ("degrees (m, n)".into(), format!("({}, {})", self.symbol.anti_analytic_degree, self.symbol.analytic_degree)),
            ("wiener norm".into(), format!("{:.6e}", self.symbol.wiener_norm)),
            ("|phi'|_2^2".into(), format!("{:.6e}", self.symbol.derivative_norm_sq)),
        ];
        if let Some(d) = &self.curve_diagnostics {
            rows.push(("curve jordan / cusp-free".into(), format!("{} / {}", d.jordan, d.cusp_free)));
        }
        for r in &self.ladder {
            rows.push((
                format!("N = {}", r.order),
                format!(
                    "hs_trunc {:.6e}  weyl {:.3}  sweeps {}{}",
                    r.hs_truncated,
                    r.weyl_fraction,
                    r.sweeps,
                    if r.converged { "" } else { "  (not converged)" }
                ),
            ));
        }
        rows.extend([
            ("hs series".into(), format!("{:.10e} (+/- {:.1e})", self.hs_series, self.hs_series_tail_bound)),
            ("hs bound pi^2/24 |phi'|^2".into(), format!("{:.10e} ({})", self.hs_bound, if self.hs_bound_holds { "holds" } else { "VIOLATED" })),
            ("candidates (certified)".into(), format!("{}", self.candidates.len())),
            ("candidates (uncertified)".into(), format!("{}", self.uncertified_candidates.len())),
            ("epsilon".into(), format!("{}", self.epsilon)),
            ("lt sum".into(), format!("{:.6e}", self.lt_sum)),
            ("lt sum (certified only)".into(), format!("{:.6e}", self.lt_sum_certified_only)),
            ("empirical constant".into(), fmt_opt(self.empirical_constant)),
            ("p_hat".into(), fmt_opt(self.p_hat)),
        ]);
        let width = rows.iter().map(|r| r.0.len()).max().unwrap_or(0);
        let mut out = String::new();
        for (k, v) in rows {
            let _ = writeln!(out, "{k:<width$}  {v}");
        }
        out
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "n/a".to_string(), |x| format!("{x:.6e}"))
}

/// Runs curve diagnostics, Hilbert–Schmidt computations, ladder detection,
/// the eigenvalue sum and the resolvent growth fit.
pub fn build_report(s: &HarmonicSymbol, opts: &ReportOptions) -> Result<SpectralReport> {
    let spectra = section_spectra(s, &opts.ladder, opts.detect.max_sweeps).map_err(|e| e.in_stage("eigenvalues"))?;
    build_report_from_spectra(s, &spectra, opts)
}

/// [`build_report`] on precomputed rung spectra (one per ladder order).
pub fn build_report_from_spectra(s: &HarmonicSymbol, spectra: &[RungSpectrum], opts: &ReportOptions) -> Result<SpectralReport> {
    if !(opts.epsilon > 0.0) {
        return Err(Error::NonPositive {
            name: "epsilon",
            value: opts.epsilon,
        }
        .in_stage("options"));
    }
    let samples = opts.detect.curve_samples.unwrap_or_else(|| s.default_curve_samples());
    let curve = s.sample_curve(samples).map_err(|e| e.in_stage("curve"))?;
    let curve_diagnostics = curve.diagnostics().ok();

    let series = hs_difference_sq_series(s, opts.series_tol).map_err(|e| e.in_stage("hilbert-schmidt"))?;
    let bound = hs_bound(s);

    let detection = detect_from_spectra(s, spectra, &curve, &opts.detect).map_err(|e| e.in_stage("detection"))?;

    let delta = 0.1 * s.wiener_norm();
    let ladder: Vec<RungSummary> = spectra
        .iter()
        .map(|r| RungSummary {
            order: r.order,
            converged: r.converged,
            sweeps: r.sweeps,
            hs_truncated: hs_difference_sq_truncated(s, r.order),
            weyl_fraction: fraction_near_spectrum(&r.values, &curve, delta),
        })
        .collect();

    let persistent: Vec<DiscreteCandidate> =
        detection.candidates.iter().chain(&detection.uncertified).cloned().collect();
    let lt_all = lt_sum(&persistent, &curve, opts.epsilon).map_err(|e| e.in_stage("lt-sum"))?;
    let lt_cert = lt_sum(&detection.candidates, &curve, opts.epsilon).map_err(|e| e.in_stage("lt-sum"))?;
    let d2 = s.derivative_norm_sq();
    let ratio = |v: f64| (d2 > 0.0).then(|| v / d2);

    let wn = s.wiener_norm();
    let points = growth_sample_points(&curve, opts.growth_samples, 0.05 * wn, 0.5 * wn);
    let growth = if points.len() >= MIN_GROWTH_SAMPLES {
        match resolvent_growth_fit(s, &points, opts.growth_order) {
            Ok(fit) => Some(fit),
            Err(Error::DegenerateFit) | Err(Error::SampleOutsideF0 { .. }) => None,
            Err(e) => return Err(e.in_stage("resolvent-growth")),
        }
    } else {
        None
    };

    Ok(SpectralReport {
        symbol: SymbolSummary::new(s),
        curve_samples: samples,
        curve_diagnostics,
        dist_error_bound: polyline_error_bound(s, samples),
        hs_truncated: ladder.last().map_or(0.0, |r| r.hs_truncated),
        ladder,
        hs_series: series.value,
        hs_series_tail_bound: series.tail_bound,
        hs_bound: bound,
        hs_bound_holds: series.value <= bound + opts.series_tol,
        tolerances: detection.tolerances,
        candidates: detection.candidates,
        uncertified_candidates: detection.uncertified,
        skipped_rungs: detection.skipped_rungs,
        epsilon: opts.epsilon,
        lt_sum: lt_all,
        lt_sum_certified_only: lt_cert,
        empirical_constant: ratio(lt_all),
        empirical_constant_certified_only: ratio(lt_cert),
        p_hat: growth.map(|g| g.p_hat),
        growth,
    })
}
