//! Discrete spectrum detection for Bergman–Toeplitz sections.
//!
//! Eigenvalues of non-normal finite sections need not approximate the
//! operator spectrum. Candidates are therefore required to persist across a
//! ladder of section orders with small total drift and to be certified by a
//! small `σ_min(A_N - λ)` at the largest order.

use std::fmt::Write as _;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::dist_to_spectrum;
use crate::error::{Error, Result};
use crate::linalg::{eigenvalues, smallest_singular_value, ComplexMatrix, DEFAULT_MAX_SWEEPS};
use crate::operators::bt_section;
use crate::operators::ht_section;
use crate::symbol::{HarmonicSymbol, SymbolCurve};

/// Closed axis-aligned rectangle in the complex plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Region {
    pub fn from_corners(lower_left: Complex64, upper_right: Complex64) -> Self {
        Region {
            re_min: lower_left.re,
            re_max: upper_right.re,
            im_min: lower_left.im,
            im_max: upper_right.im,
        }
    }

    /// Square of half-width `radius` around `center`.
    pub fn around(center: Complex64, radius: f64) -> Self {
        let r = Complex64::new(radius, radius);
        Self::from_corners(center - r, center + r)
    }

    pub fn is_empty(&self) -> bool {
        !(self.re_max > self.re_min && self.im_max > self.im_min)
    }
}

/// `σ_min(A - λ)` on a uniform grid, i.e. `1/‖(A - λ)⁻¹‖` per node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PseudospectrumField {
    pub region: Region,
    pub nx: usize,
    pub ny: usize,
    /// Index `p * ny + q` holds the value at node `(p, q)`.
    pub sigma_min: Vec<f64>,
    pub section_order: usize,
}

impl PseudospectrumField {
    pub fn node(&self, p: usize, q: usize) -> Complex64 {
        grid_node(&self.region, self.nx, self.ny, p, q)
    }

    pub fn value(&self, p: usize, q: usize) -> f64 {
        self.sigma_min[p * self.ny + q]
    }

    /// Iterates `(λ, σ_min)` in row-major node order.
    pub fn nodes(&self) -> impl Iterator<Item = (Complex64, f64)> + '_ {
        (0..self.nx).flat_map(move |p| (0..self.ny).map(move |q| (self.node(p, q), self.value(p, q))))
    }

    /// CSV with header `re,im,sigma_min`, 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("re,im,sigma_min\n");
        for (z, s) in self.nodes() {
            let _ = writeln!(out, "{:.16e},{:.16e},{:.16e}", z.re, z.im, s);
        }
        out
    }
}

fn grid_node(region: &Region, nx: usize, ny: usize, p: usize, q: usize) -> Complex64 {
    let re = region.re_min + (region.re_max - region.re_min) * p as f64 / (nx - 1) as f64;
    let im = region.im_min + (region.im_max - region.im_min) * q as f64 / (ny - 1) as f64;
    Complex64::new(re, im)
}

pub fn pseudospectrum(a: &ComplexMatrix, region: Region, nx: usize, ny: usize) -> Result<PseudospectrumField> {
    let order = a.require_square()?;
    if region.is_empty() {
        return Err(Error::EmptyRegion);
    }
    if nx < 2 || ny < 2 {
        return Err(Error::InvalidGrid { nx, ny });
    }
    let sigma_min = (0..nx * ny)
        .into_par_iter()
        .map(|k| smallest_singular_value(a, grid_node(&region, nx, ny, k / ny, k % ny)))
        .collect::<Result<Vec<f64>>>()?;
    Ok(PseudospectrumField {
        region,
        nx,
        ny,
        sigma_min,
        section_order: order,
    })
}

/// Position of a point relative to the essential spectrum `γ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Component {
    /// Unbounded component of `ℂ \ γ` (where `T_φ - λ` is invertible).
    #[serde(rename = "F0")]
    F0,
    #[serde(rename = "boundedHole")]
    BoundedHole,
    #[serde(rename = "nearEssential")]
    NearEssential,
}

/// Classifies points against one sampled curve; the Jordan check is done once.
#[derive(Debug, Clone)]
pub struct Classifier<'a> {
    curve: &'a SymbolCurve,
    delta_curve: f64,
    jordan: bool,
    escape_radius: f64,
}

const RAY_DIRECTIONS: usize = 32;

impl<'a> Classifier<'a> {
    pub fn new(curve: &'a SymbolCurve, delta_curve: f64) -> Self {
        let jordan = curve.diagnostics().map(|d| d.jordan).unwrap_or(false);
        Classifier {
            curve,
            delta_curve,
            jordan,
            escape_radius: 2.0 * curve.scale() + 1.0,
        }
    }

    pub fn curve(&self) -> &SymbolCurve {
        self.curve
    }

    /// `nearEssential` within `delta_curve` of `γ`; `F0` when the winding
    /// number vanishes and a straight ray escapes to beyond the curve
    /// without touching it (winding zero alone suffices for Jordan curves);
    /// `boundedHole` otherwise.
    pub fn classify(&self, z: Complex64) -> Result<Component> {
        let winding = self.curve.winding_number(z)?;
        if self.curve.distance(z) < self.delta_curve {
            return Ok(Component::NearEssential);
        }
        if winding != 0 {
            return Ok(Component::BoundedHole);
        }
        if self.jordan || self.escapes(z) {
            Ok(Component::F0)
        } else {
            Ok(Component::BoundedHole)
        }
    }

    fn escapes(&self, z: Complex64) -> bool {
        let tol = crate::symbol::curve_tolerance(self.curve);
        let reach = 2.0 * (self.escape_radius + z.norm());
        let base = if z.norm() > 0.0 { z.arg() } else { 0.0 };
        (0..RAY_DIRECTIONS).any(|k| {
            let angle = base + std::f64::consts::TAU * k as f64 / RAY_DIRECTIONS as f64;
            let end = z + Complex64::from_polar(reach, angle);
            !self.curve.touches_segment(z, end, tol)
        })
    }
}

pub fn classify(z: Complex64, curve: &SymbolCurve, delta_curve: f64) -> Result<Component> {
    Classifier::new(curve, delta_curve).classify(z)
}

/// Tolerances for [`detect_discrete`]; unset values take defaults scaled by
/// the symbol's Wiener norm and the section's Frobenius norm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectOptions {
    pub delta_curve: Option<f64>,
    pub drift_tol: Option<f64>,
    pub cert_tol: Option<f64>,
    pub max_sweeps: usize,
    pub curve_samples: Option<usize>,
}

impl Default for DetectOptions {
    fn default() -> Self {
        DetectOptions {
            delta_curve: None,
            drift_tol: None,
            cert_tol: None,
            max_sweeps: DEFAULT_MAX_SWEEPS,
            curve_samples: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResolvedTolerances {
    pub delta_curve: f64,
    pub drift_tol: f64,
    pub cert_tol: f64,
}

impl DetectOptions {
    pub fn resolve(&self, s: &HarmonicSymbol, largest_section_norm: f64) -> ResolvedTolerances {
        let wn = s.wiener_norm();
        ResolvedTolerances {
            delta_curve: self.delta_curve.unwrap_or(0.05 * wn),
            drift_tol: self.drift_tol.unwrap_or(1e-3 * wn),
            cert_tol: self.cert_tol.unwrap_or(1e-6 * largest_section_norm),
        }
    }

    pub fn curve(&self, s: &HarmonicSymbol) -> Result<SymbolCurve> {
        s.sample_curve(self.curve_samples.unwrap_or_else(|| s.default_curve_samples()))
    }
}

/// Eigenvalues of one Bergman section of the ladder.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RungSpectrum {
    pub order: usize,
    pub values: Vec<Complex64>,
    pub converged: bool,
    pub sweeps: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteCandidate {
    /// Position at the largest section order.
    pub location: Complex64,
    /// Total path length of the chain across the ladder.
    pub persistence_drift: f64,
    /// `σ_min(A_{N_max} - location)`.
    pub certificate: f64,
    pub component: Component,
    /// Chain positions, one per used rung.
    pub trajectory: Vec<Complex64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Detection {
    /// Persistent and certified candidates.
    pub candidates: Vec<DiscreteCandidate>,
    /// Persistent chains whose certificate failed `cert_tol`.
    pub uncertified: Vec<DiscreteCandidate>,
    /// Orders of the rungs whose eigensolve did not converge; they are left
    /// out of the chaining.
    pub skipped_rungs: Vec<usize>,
    pub tolerances: ResolvedTolerances,
}

fn check_ladder(ladder: &[usize], minimum: usize) -> Result<()> {
    if ladder.len() < minimum {
        return Err(Error::LadderTooShort {
            len: ladder.len(),
            minimum,
        });
    }
    if ladder.windows(2).any(|w| w[0] >= w[1]) || ladder[0] < 1 {
        return Err(Error::LadderNotIncreasing);
    }
    Ok(())
}

/// Eigenvalues of `bt_section(s, N)` for every `N` of the ladder.
pub fn section_spectra(s: &HarmonicSymbol, ladder: &[usize], max_sweeps: usize) -> Result<Vec<RungSpectrum>> {
    ladder
        .par_iter()
        .map(|&order| {
            let section = bt_section(s, order)?;
            let eig = eigenvalues(section.matrix(), max_sweeps)?;
            Ok(RungSpectrum {
                order,
                values: eig.values,
                converged: eig.converged,
                sweeps: eig.sweeps,
            })
        })
        .collect()
}

/// Full pipeline: eigensolve every rung, chain, certify and classify.
pub fn detect_discrete(s: &HarmonicSymbol, ladder: &[usize], opts: &DetectOptions) -> Result<Detection> {
    check_ladder(ladder, 3)?;
    let spectra = section_spectra(s, ladder, opts.max_sweeps)?;
    let curve = opts.curve(s)?;
    detect_from_spectra(s, &spectra, &curve, opts)
}

struct Chain {
    trajectory: Vec<Complex64>,
    drift: f64,
}

/// Chaining, certification and classification on precomputed rung spectra.
/// Accepts ladders of two or more rungs so sub-ladders can be compared.
pub fn detect_from_spectra(
    s: &HarmonicSymbol,
    spectra: &[RungSpectrum],
    curve: &SymbolCurve,
    opts: &DetectOptions,
) -> Result<Detection> {
    let orders: Vec<usize> = spectra.iter().map(|r| r.order).collect();
    check_ladder(&orders, 2)?;
    let largest = bt_section(s, *orders.last().unwrap())?;
    let tolerances = opts.resolve(s, largest.matrix().frobenius_norm());

    let skipped_rungs: Vec<usize> = spectra.iter().filter(|r| !r.converged).map(|r| r.order).collect();
    let rungs: Vec<&RungSpectrum> = spectra.iter().filter(|r| r.converged).collect();
    let mut detection = Detection {
        candidates: Vec::new(),
        uncertified: Vec::new(),
        skipped_rungs,
        tolerances,
    };
    if rungs.len() < 2 {
        return Ok(detection);
    }
    // Certification uses the largest converged rung.
    let top = rungs.last().unwrap().order;
    let top_section = if top == largest.order() { largest } else { bt_section(s, top)? };

    let survivors: Vec<Vec<Complex64>> = rungs
        .iter()
        .map(|r| {
            r.values
                .iter()
                .copied()
                .filter(|&z| curve.distance(z) > tolerances.delta_curve)
                .collect()
        })
        .collect();

    let mut chains: Vec<Chain> = survivors[0]
        .iter()
        .map(|&z| Chain {
            trajectory: vec![z],
            drift: 0.0,
        })
        .collect();
    for next in &survivors[1..] {
        let mut used = vec![false; next.len()];
        let mut extended = Vec::with_capacity(chains.len());
        for mut chain in chains {
            let last = *chain.trajectory.last().unwrap();
            let nearest = next
                .iter()
                .enumerate()
                .filter(|(j, _)| !used[*j])
                .map(|(j, z)| (j, (z - last).norm()))
                .fold(None, |best: Option<(usize, f64)>, cand| match best {
                    Some(b) if b.1 <= cand.1 => Some(b),
                    _ => Some(cand),
                });
            if let Some((j, step)) = nearest {
                if step < tolerances.drift_tol && chain.drift + step < tolerances.drift_tol {
                    used[j] = true;
                    chain.drift += step;
                    chain.trajectory.push(next[j]);
                    extended.push(chain);
                }
            }
        }
        chains = extended;
    }

    let classifier = Classifier::new(curve, tolerances.delta_curve);
    let matrix = top_section.matrix();
    let certified: Vec<(DiscreteCandidate, bool)> = chains
        .into_par_iter()
        .map(|chain| {
            let location = *chain.trajectory.last().unwrap();
            let certificate = smallest_singular_value(matrix, location)?;
            let component = match classifier.classify(location) {
                Ok(c) => c,
                Err(Error::OnCurve { .. }) => Component::NearEssential,
                Err(e) => return Err(e),
            };
            let candidate = DiscreteCandidate {
                location,
                persistence_drift: chain.drift,
                certificate,
                component,
                trajectory: chain.trajectory,
            };
            Ok((candidate, certificate < tolerances.cert_tol))
        })
        .collect::<Result<_>>()?;
    for (candidate, ok) in certified {
        if ok {
            detection.candidates.push(candidate);
        } else {
            detection.uncertified.push(candidate);
        }
    }
    Ok(detection)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthFit {
    /// Fitted exponent `p` in `‖R(z)‖ ≈ c / dist^p`.
    pub p_hat: f64,
    pub c_hat: f64,
    pub samples: usize,
}

pub const MIN_GROWTH_SAMPLES: usize = 8;

/// Least-squares fit of `log ‖(A_N - z)⁻¹‖ = p·(-log dist(z, σ(T_φ))) + log c`
/// over points of the unbounded component, with `A_N` the Hardy section.
pub fn resolvent_growth_fit(s: &HarmonicSymbol, samples: &[Complex64], order: usize) -> Result<GrowthFit> {
    if samples.len() < MIN_GROWTH_SAMPLES {
        return Err(Error::InsufficientSamples {
            len: samples.len(),
            minimum: MIN_GROWTH_SAMPLES,
        });
    }
    let curve = s.sample_curve(s.default_curve_samples())?;
    let classifier = Classifier::new(&curve, 0.0);
    let mut xs = Vec::with_capacity(samples.len());
    for &z in samples {
        let component = classifier.classify(z).map_err(|_| Error::SampleOutsideF0 { point: z })?;
        let dist = dist_to_spectrum(z, &curve);
        if component != Component::F0 || dist <= 0.0 {
            return Err(Error::SampleOutsideF0 { point: z });
        }
        xs.push(-dist.ln());
    }
    let section = ht_section(s, order)?;
    let ys = samples
        .par_iter()
        .map(|&z| smallest_singular_value(section.matrix(), z).map(|sv| -sv.ln()))
        .collect::<Result<Vec<f64>>>()?;

    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    // A slope across less than a 0.1% spread of distances is meaningless.
    let spread = xs.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b)) - xs.iter().fold(f64::INFINITY, |a, &b| a.min(b));
    if spread < 1e-3 || sxx <= 0.0 {
        return Err(Error::DegenerateFit);
    }
    let p_hat = sxy / sxx;
    let intercept = my - p_hat * mx;
    Ok(GrowthFit {
        p_hat,
        c_hat: intercept.exp(),
        samples: xs.len(),
    })
}

/// Up to `count` points of the unbounded component at geometrically spaced
/// distances in `[d_min, d_max]` from `σ(T_φ)`, placed along outward normals
/// at spread-out curve nodes.
pub fn growth_sample_points(curve: &SymbolCurve, count: usize, d_min: f64, d_max: f64) -> Vec<Complex64> {
    let m = curve.len();
    if m == 0 || count == 0 || !(d_max >= d_min && d_min > 0.0) {
        return Vec::new();
    }
    let classifier = Classifier::new(curve, 0.0);
    let mut out = Vec::with_capacity(count);
    let ratio = if count > 1 { (d_max / d_min).powf(1.0 / (count - 1) as f64) } else { 1.0 };
    // Interleaved node order spreads the samples around the curve.
    let stride = (m / count.max(1)).max(1);
    for k in 0..count {
        let d = d_min * ratio.powi(k as i32);
        let start = k * stride + (k * 7919) % stride;
        // Nodes without a usable normal (cusps, inner sides) hand over to
        // their successors.
        let found = (0..m).map(|step| (start + step) % m).find_map(|node| {
            let p = curve.points()[node];
            let t = curve.tangents()[node];
            if t.norm() == 0.0 {
                return None;
            }
            let normal = t / t.norm() * Complex64::new(0.0, -1.0);
            [normal, -normal].into_iter().map(|dir| p + dir * d).find(|&z| {
                let dist = dist_to_spectrum(z, curve);
                let in_range = dist >= d_min * (1.0 - 1e-9) && dist <= d_max * (1.0 + 1e-9);
                in_range && matches!(classifier.classify(z), Ok(Component::F0))
            })
        });
        out.extend(found);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sym(pairs: &[(i64, f64)]) -> HarmonicSymbol {
        HarmonicSymbol::from_coefficients(pairs.iter().map(|&(j, v)| (j, c(v, 0.0))))
    }

    #[test]
    fn zero_matrix_field_is_modulus() {
        let a = ComplexMatrix::zeros(4, 4);
        let f = pseudospectrum(&a, Region::around(c(0.1, 0.0), 1.0), 5, 4).unwrap();
        for (z, s) in f.nodes() {
            assert!((s - z.norm()).abs() < 1e-12);
        }
        assert_eq!(f.section_order, 4);
    }

    #[test]
    fn identity_field_vanishes_at_one() {
        let a = ComplexMatrix::identity(3);
        let f = pseudospectrum(&a, Region::from_corners(c(0.0, -1.0), c(2.0, 1.0)), 3, 3).unwrap();
        assert_eq!(f.node(1, 1), c(1.0, 0.0));
        assert_eq!(f.value(1, 1), 0.0);
    }

    #[test]
    fn far_nodes_obey_neumann_bound() {
        let s = sym(&[(1, 1.0), (-1, 0.5)]);
        let a = ht_section(&s, 40).unwrap();
        let f = pseudospectrum(a.matrix(), Region::from_corners(c(10.0, 0.0), c(10.5, 0.5)), 2, 2).unwrap();
        for (z, v) in f.nodes() {
            assert!(v >= z.norm() - s.wiener_norm() - 1e-9);
        }
    }

    #[test]
    fn bad_grids_are_rejected() {
        let a = ComplexMatrix::identity(2);
        assert!(matches!(
            pseudospectrum(&a, Region::from_corners(c(1.0, 0.0), c(1.0, 1.0)), 3, 3),
            Err(Error::EmptyRegion)
        ));
        assert!(matches!(
            pseudospectrum(&a, Region::around(c(0.0, 0.0), 1.0), 1, 3),
            Err(Error::InvalidGrid { .. })
        ));
    }

    #[test]
    fn csv_has_header_and_rows() {
        let a = ComplexMatrix::identity(2);
        let f = pseudospectrum(&a, Region::around(c(0.0, 0.0), 1.0), 2, 3).unwrap();
        let csv = f.to_csv();
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(lines[0], "re,im,sigma_min");
        assert_eq!(lines.len(), 7);
    }

    #[test]
    fn classification() {
        let s = sym(&[(1, 1.0), (-1, 0.5)]);
        let curve = s.sample_curve(512).unwrap();
        let delta = 0.05 * s.wiener_norm();
        assert_eq!(classify(c(10.0, 0.0), &curve, delta).unwrap(), Component::F0);
        assert_eq!(classify(c(0.0, 0.0), &curve, delta).unwrap(), Component::BoundedHole);
        assert_eq!(classify(c(1.5 + delta / 2.0, 0.0), &curve, delta).unwrap(), Component::NearEssential);
        assert!(classify(curve.points()[3], &curve, delta).is_err());
    }

    #[test]
    fn segment_symbol_complement_is_f0() {
        // γ = [-2, 2] traversed twice; not Jordan, so the ray test decides.
        let curve = sym(&[(1, 1.0), (-1, 1.0)]).sample_curve(512).unwrap();
        assert_eq!(classify(c(0.0, 0.5), &curve, 0.1).unwrap(), Component::F0);
        assert_eq!(classify(c(3.0, 0.0), &curve, 0.1).unwrap(), Component::F0);
    }

    #[test]
    fn ladder_validation() {
        let s = sym(&[(1, 1.0)]);
        let opts = DetectOptions::default();
        assert!(matches!(detect_discrete(&s, &[10, 20], &opts), Err(Error::LadderTooShort { .. })));
        assert!(matches!(detect_discrete(&s, &[10, 30, 20], &opts), Err(Error::LadderNotIncreasing)));
        assert!(matches!(detect_discrete(&s, &[10, 10, 20], &opts), Err(Error::LadderNotIncreasing)));
    }

    #[test]
    fn constant_symbol_has_no_candidates() {
        let s = sym(&[(0, 2.0)]);
        let d = detect_discrete(&s, &[10, 20, 40], &DetectOptions::default()).unwrap();
        assert!(d.candidates.is_empty() && d.uncertified.is_empty());
    }

    #[test]
    fn shift_symbol_has_no_f0_candidates() {
        let s = sym(&[(1, 1.0)]);
        let d = detect_discrete(&s, &[20, 40, 80], &DetectOptions::default()).unwrap();
        assert!(d.candidates.iter().all(|c| c.component != Component::F0));
    }

    #[test]
    fn growth_fit_rejects_bad_samples() {
        let s = sym(&[(1, 1.0)]);
        let few: Vec<_> = (0..5).map(|k| c(1.5 + k as f64 * 0.1, 0.0)).collect();
        assert!(matches!(resolvent_growth_fit(&s, &few, 50), Err(Error::InsufficientSamples { .. })));
        let same: Vec<_> = (0..8).map(|k| Complex64::from_polar(1.3, k as f64)).collect();
        assert!(matches!(resolvent_growth_fit(&s, &same, 50), Err(Error::DegenerateFit)));
        let inside: Vec<_> = (0..8).map(|k| c(0.1 * k as f64, 0.0)).collect();
        assert!(matches!(resolvent_growth_fit(&s, &inside, 50), Err(Error::SampleOutsideF0 { .. })));
    }

    #[test]
    fn growth_samples_lie_in_range() {
        let s = sym(&[(1, 1.0), (-1, 0.5)]);
        let curve = s.sample_curve(1024).unwrap();
        let pts = growth_sample_points(&curve, 16, 0.075, 0.75);
        assert_eq!(pts.len(), 16);
        for z in pts {
            let d = dist_to_spectrum(z, &curve);
            assert!((0.075 * 0.999..=0.75 * 1.001).contains(&d));
        }
    }
}
