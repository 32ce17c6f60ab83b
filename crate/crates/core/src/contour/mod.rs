//! Integration contours, quadrature on them, and the norms of the rational
//! functions `h_{w,z}(x) = (x - w) / (x - z)` and `h_z(x) = 1 / (x - z)` on
//! subsets of the real line.

pub mod hnorm;
pub mod quadrature;
pub mod sets;

use std::f64::consts::PI;
use std::ops::Range;

use num_complex::Complex64;

use crate::error::{invalid, Result};
pub use hnorm::{h_norm_interval, hz_norm_interval, region_membership};
pub use quadrature::{PathPiece, QuadOptions, QuadResult};
pub use sets::{split_interval_at, SetComponent, SpectrumSet};

/// Straight line or circular arc, parametrized over `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Segment {
    Line { start: Complex64, end: Complex64 },
    Arc { center: Complex64, radius: f64, theta0: f64, theta1: f64 },
}

impl Segment {
    pub fn length(&self) -> f64 {
        match *self {
            Segment::Line { start, end } => (end - start).norm(),
            Segment::Arc { radius, theta0, theta1, .. } => radius * (theta1 - theta0).abs(),
        }
    }

    pub fn start(&self) -> Complex64 {
        self.eval(0.0).0
    }

    pub fn end(&self) -> Complex64 {
        self.eval(1.0).0
    }
}

impl Segment {
    /// The piece between parameters `t0` and `t1`.
    pub fn sub(&self, t0: f64, t1: f64) -> Segment {
        match *self {
            Segment::Line { start, end } => {
                Segment::Line { start: start + (end - start) * t0, end: start + (end - start) * t1 }
            }
            Segment::Arc { center, radius, theta0, theta1 } => Segment::Arc {
                center,
                radius,
                theta0: theta0 + (theta1 - theta0) * t0,
                theta1: theta0 + (theta1 - theta0) * t1,
            },
        }
    }
}

impl PathPiece for Segment {
    fn eval(&self, t: f64) -> (Complex64, Complex64) {
        match *self {
            Segment::Line { start, end } => (start + (end - start) * t, end - start),
            Segment::Arc { center, radius, theta0, theta1 } => {
                let th = theta0 + t * (theta1 - theta0);
                let e = Complex64::from_polar(radius, th);
                (center + e, Complex64::new(0.0, 1.0) * e * (theta1 - theta0))
            }
        }
    }
}

/// Shape that produced a contour.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ContourKind {
    Circle { center: f64, radius: f64 },
    /// Boundary of `D(c, R)` with the slit `{Re z <= c, |Im z| < r}` and the
    /// disk `D(c, r)` removed. `outer = None` sends `R` to infinity; the
    /// path then consists of two rays truncated at `truncation`.
    PacMan { center: f64, r: f64, outer: Option<f64>, truncation: f64 },
    /// Circles around `lambda_min` and `lambda_max` that touch at `w` when
    /// `eps = 0`.
    DoubleCircle { w: f64, lambda_min: f64, lambda_max: f64, eps: f64 },
    Custom,
}

/// A positively oriented integration path built from segments.
#[derive(Debug, Clone, PartialEq)]
pub struct Contour {
    kind: ContourKind,
    segments: Vec<Segment>,
    components: Vec<Range<usize>>,
    panels_per_segment: usize,
    n_nodes: usize,
}

fn panels_for(n_nodes: usize, n_segments: usize) -> usize {
    n_nodes.div_ceil(quadrature::GL_ORDER * n_segments.max(1)).max(1)
}

fn circle_segments(center: f64, radius: f64, pieces: usize) -> Vec<Segment> {
    (0..pieces)
        .map(|i| Segment::Arc {
            center: Complex64::new(center, 0.0),
            radius,
            theta0: 2.0 * PI * i as f64 / pieces as f64,
            theta1: 2.0 * PI * (i + 1) as f64 / pieces as f64,
        })
        .collect()
}

/// Circle split into arcs whose boundaries include angles `0` and `pi`.
const CIRCLE_PIECES: usize = 8;
const OUTER_ARC_PIECES: usize = 8;

/// Counterclockwise circle around the real point `center`.
pub fn make_circle(center: f64, radius: f64, n_nodes: usize) -> Result<Contour> {
    if !(radius > 0.0 && radius.is_finite() && center.is_finite()) {
        return invalid("circle needs a finite center and positive radius");
    }
    let segments = circle_segments(center, radius, CIRCLE_PIECES);
    Ok(Contour {
        kind: ContourKind::Circle { center, radius },
        components: vec![0..segments.len()],
        panels_per_segment: panels_for(n_nodes, segments.len()),
        segments,
        n_nodes,
    })
}

/// Pac-Man contour around `center` with inner radius `r` and outer radius
/// `outer` (`None` for the limit `R -> infinity`).
pub fn make_pacman(center: f64, r: f64, outer: Option<f64>, n_nodes: usize) -> Result<Contour> {
    if !(r > 0.0 && r.is_finite() && center.is_finite()) {
        return invalid("Pac-Man contour needs a finite center and positive inner radius");
    }
    if let Some(big) = outer {
        if !(big > r && big.is_finite()) {
            return invalid("outer radius must exceed the inner radius");
        }
    }
    let truncation = outer.unwrap_or(1.0 + center.abs() + 2.0 * r);
    let mut c = Contour {
        kind: ContourKind::PacMan { center, r, outer, truncation },
        segments: Vec::new(),
        components: Vec::new(),
        panels_per_segment: 1,
        n_nodes,
    };
    c.rebuild_pacman();
    Ok(c)
}

/// Two circles: around `lambda_min` through `w - eps` and around
/// `lambda_max` through `w + eps`.
pub fn make_double_circle(w: f64, lambda_min: f64, lambda_max: f64, eps: f64, n_nodes: usize) -> Result<Contour> {
    if !(lambda_min < w && w < lambda_max) {
        return invalid(format!("w = {w} must lie strictly between {lambda_min} and {lambda_max}"));
    }
    let limit = (w - lambda_min).min(lambda_max - w);
    if !(eps >= 0.0 && eps < limit) {
        return invalid(format!("eps = {eps} must lie in [0, {limit})"));
    }
    let mut segments = circle_segments(lambda_min, w - lambda_min - eps, CIRCLE_PIECES);
    segments.extend(circle_segments(lambda_max, lambda_max - w - eps, CIRCLE_PIECES));
    Ok(Contour {
        kind: ContourKind::DoubleCircle { w, lambda_min, lambda_max, eps },
        components: vec![0..CIRCLE_PIECES, CIRCLE_PIECES..2 * CIRCLE_PIECES],
        panels_per_segment: panels_for(n_nodes, segments.len()),
        segments,
        n_nodes,
    })
}

/// Contour from explicit closed components.
pub fn make_custom(components: Vec<Vec<Segment>>, n_nodes: usize) -> Result<Contour> {
    let mut segments = Vec::new();
    let mut ranges = Vec::new();
    for comp in components {
        if comp.is_empty() {
            return invalid("contour component has no segments");
        }
        let start = segments.len();
        segments.extend(comp);
        ranges.push(start..segments.len());
    }
    if segments.is_empty() {
        return invalid("contour has no segments");
    }
    Ok(Contour {
        kind: ContourKind::Custom,
        components: ranges,
        panels_per_segment: panels_for(n_nodes, segments.len()),
        segments,
        n_nodes,
    })
}

impl Contour {
    pub fn kind(&self) -> ContourKind {
        self.kind
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn components(&self) -> &[Range<usize>] {
        &self.components
    }

    pub fn panels_per_segment(&self) -> usize {
        self.panels_per_segment
    }

    /// Total arclength of the segments.
    pub fn length(&self) -> f64 {
        self.segments.iter().map(Segment::length).sum()
    }

    pub fn component_lengths(&self) -> Vec<f64> {
        self.components.iter().map(|r| self.segments[r.clone()].iter().map(Segment::length).sum()).collect()
    }

    /// True for the Pac-Man contour with `R -> infinity`.
    pub fn is_unbounded(&self) -> bool {
        matches!(self.kind, ContourKind::PacMan { outer: None, .. })
    }

    /// Same unbounded Pac-Man contour with the rays cut at distance `radius`
    /// to the left of the center.
    pub fn with_truncation(&self, radius: f64) -> Self {
        let mut c = self.clone();
        if let ContourKind::PacMan { outer: None, ref mut truncation, r, .. } = c.kind {
            *truncation = radius.max(2.0 * r);
            c.rebuild_pacman();
        }
        c
    }

    fn rebuild_pacman(&mut self) {
        let ContourKind::PacMan { center, r, outer, truncation } = self.kind else { return };
        let c = Complex64::new(center, 0.0);
        let i = Complex64::new(0.0, 1.0);
        // Horizontal extent of the rays measured from the center.
        let reach = match outer {
            Some(big) => (big * big - r * r).sqrt(),
            None => truncation,
        };
        // Geometrically graded breakpoints along each ray.
        let mut marks = vec![0.0];
        let mut d = r;
        while d < reach {
            marks.push(d);
            d *= 2.0;
        }
        marks.push(reach);
        let mut segments = Vec::new();
        if let Some(big) = outer {
            let phi = (r / big).asin();
            let (a0, a1) = (-PI + phi, PI - phi);
            for j in 0..OUTER_ARC_PIECES {
                segments.push(Segment::Arc {
                    center: c,
                    radius: big,
                    theta0: a0 + (a1 - a0) * j as f64 / OUTER_ARC_PIECES as f64,
                    theta1: a0 + (a1 - a0) * (j + 1) as f64 / OUTER_ARC_PIECES as f64,
                });
            }
        }
        // Upper ray, traversed toward the center.
        for w in marks.windows(2).rev() {
            segments.push(Segment::Line { start: c - w[1] + i * r, end: c - w[0] + i * r });
        }
        // Small arc, clockwise through angle 0.
        segments.push(Segment::Arc { center: c, radius: r, theta0: PI / 2.0, theta1: 0.0 });
        segments.push(Segment::Arc { center: c, radius: r, theta0: 0.0, theta1: -PI / 2.0 });
        // Lower ray, traversed away from the center.
        for w in marks.windows(2) {
            segments.push(Segment::Line { start: c - w[0] - i * r, end: c - w[1] - i * r });
        }
        self.panels_per_segment = panels_for(self.n_nodes, segments.len());
        self.components = vec![0..segments.len()];
        self.segments = segments;
    }

    /// Whether the real point `x` lies inside the region bounded by the contour.
    pub fn encloses(&self, x: f64) -> bool {
        match self.kind {
            ContourKind::Circle { center, radius } => (x - center).abs() < radius,
            ContourKind::PacMan { center, r, outer, .. } => x > center + r && outer.is_none_or(|big| x < center + big),
            ContourKind::DoubleCircle { w, lambda_min, lambda_max, eps } => {
                (x - lambda_min).abs() < w - lambda_min - eps || (x - lambda_max).abs() < lambda_max - w - eps
            }
            ContourKind::Custom => self.winding_number(Complex64::new(x, 0.0)).map(|n| n != 0).unwrap_or(false),
        }
    }

    /// Winding number of the contour around `z`, rounded; only meaningful
    /// for closed contours.
    pub fn winding_number(&self, z: Complex64) -> Result<i64> {
        let r = self.integrate_signed(&QuadOptions { rel_tol: 1e-10, abs_tol: 1e-10, max_panels: 50_000 }, |p| {
            Ok((p - z).inv())
        })?;
        Ok((r.value / Complex64::new(0.0, 2.0 * PI)).re.round() as i64)
    }

    /// Largest distance between consecutive segment endpoints within each
    /// component, including the wrap from last to first.
    pub fn closure_gap(&self) -> f64 {
        let mut gap = 0.0f64;
        for range in &self.components {
            let segs = &self.segments[range.clone()];
            for (j, s) in segs.iter().enumerate() {
                let next = &segs[(j + 1) % segs.len()];
                gap = gap.max((s.end() - next.start()).norm());
            }
        }
        gap
    }

    /// `int g(z) |dz|` with adaptive refinement.
    pub fn integrate_arclength(&self, opts: &QuadOptions, mut g: impl FnMut(Complex64) -> Result<f64>) -> Result<QuadResult<f64>> {
        quadrature::integrate_pieces(&self.segments, self.panels_per_segment, opts, |z, dz| Ok(g(z)? * dz.norm()))
    }

    /// `int g(z) dz` with adaptive refinement.
    pub fn integrate_signed(
        &self,
        opts: &QuadOptions,
        mut g: impl FnMut(Complex64) -> Result<Complex64>,
    ) -> Result<QuadResult<Complex64>> {
        quadrature::integrate_pieces(&self.segments, self.panels_per_segment, opts, |z, dz| Ok(g(z)? * dz))
    }

    /// Nodes of the fixed composite rule: `(z, dz weight, |dz| weight)`.
    pub fn fixed_nodes(&self) -> Vec<(Complex64, Complex64, f64)> {
        quadrature::fixed_nodes(&self.segments, self.panels_per_segment)
            .into_iter()
            .map(|(z, dz, w)| (z, dz * w, dz.norm() * w))
            .collect()
    }

    /// Copy in which every segment ending at the real point `x` is split
    /// into pieces whose lengths halve toward `x`, down to `scale`. Used
    /// when the integrand has a narrow spike at a crossing point.
    pub fn graded_toward(&self, x: f64, scale: f64) -> Self {
        let target = Complex64::new(x, 0.0);
        let mut segments = Vec::new();
        let mut components = Vec::new();
        for range in &self.components {
            let first = segments.len();
            for s in &self.segments[range.clone()] {
                let len = s.length();
                let near = |p: Complex64| (p - target).norm() <= 1e-12 * len.max(x.abs());
                let (at_start, at_end) = (near(s.start()), near(s.end()));
                if !(at_start || at_end) || !(scale > 0.0) || scale >= len / 2.0 {
                    segments.push(*s);
                    continue;
                }
                // Breakpoints as fractions of the segment measured from `x`.
                let mut marks = vec![1.0];
                let mut t = 0.5;
                while t * len > scale {
                    marks.push(t);
                    t /= 2.0;
                }
                marks.push(0.0);
                marks.reverse();
                let mut pieces: Vec<Segment> = marks.windows(2).map(|m| s.sub(m[0], m[1])).collect();
                if at_end {
                    // Fractions were measured from the start; mirror them.
                    pieces = marks.windows(2).rev().map(|m| s.sub(1.0 - m[1], 1.0 - m[0])).collect();
                }
                segments.extend(pieces);
            }
            components.push(first..segments.len());
        }
        let mut c = self.clone();
        c.segments = segments;
        c.components = components;
        c
    }

    /// Copy with a different node budget for the fixed rule.
    pub fn with_nodes(&self, n_nodes: usize) -> Self {
        let mut c = self.clone();
        c.n_nodes = n_nodes;
        c.panels_per_segment = panels_for(n_nodes, c.segments.len());
        c
    }
}

/// Integral of `g` along the contour with respect to arclength.
pub fn contour_integral(contour: &Contour, opts: &QuadOptions, g: impl FnMut(Complex64) -> Result<f64>) -> Result<QuadResult<f64>> {
    contour.integrate_arclength(opts, g)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_length_and_winding() {
        let c = make_circle(4.0, 4.0, 64).unwrap();
        assert!((c.length() - 8.0 * PI).abs() < 1e-12);
        let r = c.integrate_arclength(&QuadOptions::default(), |_| Ok(1.0)).unwrap();
        assert!((r.value - 8.0 * PI).abs() < 1e-10);
        assert_eq!(c.winding_number(Complex64::new(4.5, 0.1)).unwrap(), 1);
        assert_eq!(c.winding_number(Complex64::new(9.0, 0.0)).unwrap(), 0);
        assert!(c.closure_gap() < 1e-12);
    }

    #[test]
    fn double_circle_lengths() {
        let c = make_double_circle(1.0, 0.0, 4.0, 0.0, 64).unwrap();
        let l = c.component_lengths();
        assert!((l[0] - 2.0 * PI).abs() < 1e-12 && (l[1] - 6.0 * PI).abs() < 1e-12);
        assert!(c.encloses(0.5) && c.encloses(3.0) && !c.encloses(1.0));
        assert!(make_double_circle(5.0, 0.0, 4.0, 0.0, 64).is_err());
    }

    #[test]
    fn pacman_is_closed_and_winds_once() {
        let c = make_pacman(0.0, 0.01, Some(10.0), 256).unwrap();
        assert!(c.closure_gap() < 1e-12);
        assert_eq!(c.winding_number(Complex64::new(3.0, 0.0)).unwrap(), 1);
        assert_eq!(c.winding_number(Complex64::new(-3.0, 0.0)).unwrap(), 0);
        assert!(c.encloses(5.0) && !c.encloses(-1.0) && !c.encloses(0.005));
        let expect = 10.0 * (2.0 * PI - 2.0 * (0.001f64).asin()) + 2.0 * ((100.0f64 - 1e-4).sqrt()) + PI * 0.01;
        assert!((c.length() - expect).abs() < 1e-9, "{} vs {expect}", c.length());
    }

    #[test]
    fn cauchy_integral_on_pacman() {
        // (1/2 pi i) int sqrt(z) / (z - 2) dz = sqrt(2)
        let c = make_pacman(0.0, 1e-6, Some(50.0), 256).unwrap();
        let r = c.integrate_signed(&QuadOptions::default(), |z| Ok(z.sqrt() / (z - 2.0))).unwrap();
        let v = r.value / Complex64::new(0.0, 2.0 * PI);
        assert!((v - Complex64::new(2f64.sqrt(), 0.0)).norm() < 1e-8, "{v}");
    }
}
