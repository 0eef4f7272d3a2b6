use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative distance below which a point counts as lying on the curve.
pub const ON_CURVE_TOLERANCE: f64 = 1e-12;

/// Closed polyline sampled from `γ = φ(𝕋)` at uniform angles, with the
/// analytic tangents `dφ/dθ` at the same nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolCurve {
    points: Vec<Complex64>,
    tangents: Vec<Complex64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagnosticTolerances {
    /// Relative tangent speed below which a node counts as a cusp.
    pub cusp: f64,
    /// Distance, relative to the curve scale, at which two segments touch.
    pub self_intersection: f64,
}

impl Default for DiagnosticTolerances {
    fn default() -> Self {
        DiagnosticTolerances {
            cusp: 1e-6,
            self_intersection: 1e-9,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveDiagnostics {
    pub jordan: bool,
    pub cusp_free: bool,
    pub min_tangent_speed: f64,
    pub min_self_distance: f64,
}

impl SymbolCurve {
    pub(crate) fn new(points: Vec<Complex64>, tangents: Vec<Complex64>) -> Self {
        debug_assert_eq!(points.len(), tangents.len());
        SymbolCurve { points, tangents }
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn tangents(&self) -> &[Complex64] {
        &self.tangents
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Largest modulus among the samples.
    pub fn scale(&self) -> f64 {
        self.points.iter().map(|p| p.norm()).fold(0.0, f64::max)
    }

    /// Segments `[p_k, p_{k+1}]` of the closed polyline.
    pub fn segments(&self) -> impl Iterator<Item = (Complex64, Complex64)> + '_ {
        let m = self.points.len();
        (0..m).map(move |k| (self.points[k], self.points[(k + 1) % m]))
    }

    /// Euclidean distance from `z` to the polyline.
    pub fn distance(&self, z: Complex64) -> f64 {
        self.segments()
            .map(|(a, b)| point_segment_distance(z, a, b))
            .fold(f64::INFINITY, f64::min)
    }

    /// Winding number of the polyline around `z`, from the summed argument
    /// increments along its segments.
    pub fn winding_number(&self, z: Complex64) -> Result<i64> {
        let distance = self.distance(z);
        if distance <= ON_CURVE_TOLERANCE * self.scale() {
            return Err(Error::OnCurve { point: z, distance });
        }
        let total: f64 = self
            .segments()
            .map(|(a, b)| ((b - z) / (a - z)).arg())
            .sum();
        Ok((total / TAU).round() as i64)
    }

    /// True when the closed segment `[a, b]` comes within `tol` of the polyline.
    pub fn touches_segment(&self, a: Complex64, b: Complex64, tol: f64) -> bool {
        let (lo, hi) = bounding_box(a, b);
        self.segments().any(|(p, q)| {
            let (plo, phi) = bounding_box(p, q);
            boxes_overlap(lo, hi, plo, phi, tol) && segment_distance(a, b, p, q) <= tol
        })
    }

    pub fn diagnostics(&self) -> Result<CurveDiagnostics> {
        self.diagnostics_with(DiagnosticTolerances::default())
    }

    /// Cusp and self-intersection checks on the sampled curve. The
    /// self-intersection test compares every pair of non-adjacent segments.
    pub fn diagnostics_with(&self, tol: DiagnosticTolerances) -> Result<CurveDiagnostics> {
        let scale = self.scale();
        let first = *self.points.first().ok_or(Error::DegenerateCurve)?;
        let spread = self
            .points
            .iter()
            .map(|p| (p - first).norm())
            .fold(0.0, f64::max);
        if spread <= f64::EPSILON * scale || self.points.len() < 3 {
            return Err(Error::DegenerateCurve);
        }

        let speeds = self.tangents.iter().map(|t| t.norm());
        let (min_speed, max_speed) = speeds.fold((f64::INFINITY, 0.0f64), |(lo, hi), v| {
            (lo.min(v), hi.max(v))
        });
        let cusp_free = min_speed > tol.cusp * max_speed;

        let min_self_distance = self.min_nonadjacent_distance();
        let jordan = min_self_distance > tol.self_intersection * scale;

        Ok(CurveDiagnostics {
            jordan,
            cusp_free,
            min_tangent_speed: min_speed,
            min_self_distance,
        })
    }

    fn min_nonadjacent_distance(&self) -> f64 {
        let m = self.points.len();
        let segs: Vec<(Complex64, Complex64)> = self.segments().collect();
        let boxes: Vec<_> = segs.iter().map(|&(a, b)| bounding_box(a, b)).collect();
        let mut best = f64::INFINITY;
        for i in 0..m {
            for j in (i + 2)..m {
                if i == 0 && j == m - 1 {
                    continue;
                }
                let (ilo, ihi) = boxes[i];
                let (jlo, jhi) = boxes[j];
                // Box gap is a lower bound on the segment distance.
                let gap_x = (jlo.re - ihi.re).max(ilo.re - jhi.re).max(0.0);
                let gap_y = (jlo.im - ihi.im).max(ilo.im - jhi.im).max(0.0);
                if gap_x.hypot(gap_y) >= best {
                    continue;
                }
                let (a, b) = segs[i];
                let (p, q) = segs[j];
                best = best.min(segment_distance(a, b, p, q));
            }
        }
        best
    }
}

fn bounding_box(a: Complex64, b: Complex64) -> (Complex64, Complex64) {
    (
        Complex64::new(a.re.min(b.re), a.im.min(b.im)),
        Complex64::new(a.re.max(b.re), a.im.max(b.im)),
    )
}

fn boxes_overlap(alo: Complex64, ahi: Complex64, blo: Complex64, bhi: Complex64, tol: f64) -> bool {
    alo.re <= bhi.re + tol && blo.re <= ahi.re + tol && alo.im <= bhi.im + tol && blo.im <= ahi.im + tol
}

fn cross(a: Complex64, b: Complex64) -> f64 {
    a.re * b.im - a.im * b.re
}

/// Distance from `z` to the closed segment `[a, b]`.
pub fn point_segment_distance(z: Complex64, a: Complex64, b: Complex64) -> f64 {
    let d = b - a;
    let len_sq = d.norm_sqr();
    if len_sq == 0.0 {
        return (z - a).norm();
    }
    let t = (((z - a) * d.conj()).re / len_sq).clamp(0.0, 1.0);
    (z - (a + d * t)).norm()
}

/// Distance between the closed segments `[a, b]` and `[p, q]`.
pub fn segment_distance(a: Complex64, b: Complex64, p: Complex64, q: Complex64) -> f64 {
    let d1 = cross(b - a, p - a);
    let d2 = cross(b - a, q - a);
    let d3 = cross(q - p, a - p);
    let d4 = cross(q - p, b - p);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)) {
        return 0.0;
    }
    point_segment_distance(a, p, q)
        .min(point_segment_distance(b, p, q))
        .min(point_segment_distance(p, a, b))
        .min(point_segment_distance(q, a, b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbol::HarmonicSymbol;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sym(pairs: &[(i64, f64)]) -> HarmonicSymbol {
        HarmonicSymbol::from_coefficients(pairs.iter().map(|&(j, v)| (j, c(v, 0.0))))
    }

    #[test]
    fn winding_numbers() {
        let ellipse = sym(&[(1, 1.0), (-1, 0.5)]).sample_curve(256).unwrap();
        assert_eq!(ellipse.winding_number(c(0.0, 0.0)).unwrap(), 1);
        assert_eq!(ellipse.winding_number(c(2.0, 2.0)).unwrap(), 0);
        let double = sym(&[(2, 1.0)]).sample_curve(256).unwrap();
        assert_eq!(double.winding_number(c(0.0, 0.0)).unwrap(), 2);
        let reversed = sym(&[(-1, 1.0)]).sample_curve(256).unwrap();
        assert_eq!(reversed.winding_number(c(0.1, -0.2)).unwrap(), -1);
    }

    #[test]
    fn winding_rejects_points_on_curve() {
        let circle = sym(&[(1, 1.0)]).sample_curve(64).unwrap();
        assert!(matches!(circle.winding_number(c(1.0, 0.0)), Err(Error::OnCurve { .. })));
        let zero = HarmonicSymbol::zero().sample_curve(64).unwrap();
        assert!(zero.winding_number(c(0.0, 0.0)).is_err());
        assert_eq!(zero.winding_number(c(1.0, 0.0)).unwrap(), 0);
    }

    #[test]
    fn circle_and_ellipse_are_jordan() {
        for s in [sym(&[(1, 1.0)]), sym(&[(1, 1.0), (-1, 0.5)])] {
            let d = s.sample_curve(512).unwrap().diagnostics().unwrap();
            assert!(d.jordan && d.cusp_free, "{d:?}");
        }
    }

    #[test]
    fn folded_segment_has_cusps_and_overlaps() {
        let d = sym(&[(1, 1.0), (-1, 1.0)]).sample_curve(512).unwrap().diagnostics().unwrap();
        assert!(!d.cusp_free);
        assert!(!d.jordan);
        assert!(d.min_tangent_speed < 1e-12);
    }

    #[test]
    fn doubly_traversed_circle_is_not_jordan() {
        let d = sym(&[(2, 1.0)]).sample_curve(512).unwrap().diagnostics().unwrap();
        assert!(!d.jordan);
        assert!(d.cusp_free);
    }

    #[test]
    fn degenerate_curves_are_rejected() {
        assert!(matches!(
            HarmonicSymbol::zero().sample_curve(64).unwrap().diagnostics(),
            Err(Error::DegenerateCurve)
        ));
        assert!(sym(&[(0, 3.0)]).sample_curve(64).unwrap().diagnostics().is_err());
    }

    #[test]
    fn segment_distances() {
        assert_eq!(point_segment_distance(c(0.0, 1.0), c(-1.0, 0.0), c(1.0, 0.0)), 1.0);
        assert_eq!(point_segment_distance(c(3.0, 0.0), c(-1.0, 0.0), c(1.0, 0.0)), 2.0);
        assert_eq!(segment_distance(c(-1.0, -1.0), c(1.0, 1.0), c(-1.0, 1.0), c(1.0, -1.0)), 0.0);
        assert_eq!(segment_distance(c(0.0, 0.0), c(1.0, 0.0), c(0.0, 2.0), c(1.0, 2.0)), 2.0);
        // collinear overlap
        assert_eq!(segment_distance(c(0.0, 0.0), c(2.0, 0.0), c(1.0, 0.0), c(3.0, 0.0)), 0.0);
    }

    #[test]
    fn winding_is_stable_under_refinement() {
        let s = HarmonicSymbol::from_coefficients([(2, c(1.0, 0.0)), (-1, c(0.6, 0.2)), (0, c(0.1, 0.0))]);
        let wn = s.wiener_norm();
        let coarse = s.sample_curve(128).unwrap();
        let fine = s.sample_curve(256).unwrap();
        let guard = 4.0 * std::f64::consts::PI * wn * 3.0 / 128.0;
        for i in -12..=12 {
            for k in -12..=12 {
                let z = c(0.2 * i as f64, 0.2 * k as f64);
                if coarse.distance(z) > guard {
                    assert_eq!(coarse.winding_number(z).unwrap(), fine.winding_number(z).unwrap());
                }
            }
        }
    }
}
