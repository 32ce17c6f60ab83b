//! Finite unions of closed intervals and points on the real line.

use std::fmt;

use num_complex::Complex64;

use crate::contour::hnorm::{h_norm_interval, hz_norm_interval};
use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SetComponent {
    Interval { lo: f64, hi: f64 },
    Point(f64),
}

impl SetComponent {
    fn bounds(&self) -> (f64, f64) {
        match *self {
            SetComponent::Interval { lo, hi } => (lo, hi),
            SetComponent::Point(x) => (x, x),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumSet {
    components: Vec<SetComponent>,
}

impl SpectrumSet {
    pub fn new(components: Vec<SetComponent>) -> Result<Self> {
        if components.is_empty() {
            return invalid("set must have at least one component");
        }
        for c in &components {
            let (lo, hi) = c.bounds();
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                return invalid(format!("invalid set component [{lo}, {hi}]"));
            }
        }
        Ok(Self { components })
    }

    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        Self::new(vec![SetComponent::Interval { lo, hi }])
    }

    pub fn point(x: f64) -> Result<Self> {
        Self::new(vec![SetComponent::Point(x)])
    }

    pub fn components(&self) -> &[SetComponent] {
        &self.components
    }

    /// Components as `(lo, hi)` pairs; points have `lo == hi`.
    pub fn pieces(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.components.iter().map(SetComponent::bounds)
    }

    pub fn hull(&self) -> Option<(f64, f64)> {
        self.pieces().fold(None, |acc, (lo, hi)| match acc {
            None => Some((lo, hi)),
            Some((a, b)) => Some((a.min(lo), b.max(hi))),
        })
    }

    pub fn hull_set(&self) -> Self {
        let (lo, hi) = self.hull().expect("non-empty set");
        Self { components: vec![SetComponent::Interval { lo, hi }] }
    }

    /// Whether `x` is within `tol` of the set.
    pub fn contains(&self, x: f64, tol: f64) -> bool {
        self.pieces().any(|(lo, hi)| x >= lo - tol && x <= hi + tol)
    }

    /// `sup_{x in S} |h_{w,z}(x)|`.
    pub fn h_norm(&self, w: f64, z: Complex64) -> f64 {
        self.pieces().map(|(lo, hi)| h_norm_interval(w, z, lo, hi)).fold(0.0, f64::max)
    }

    /// `sup_{x in S} |h_z(x)|`.
    pub fn hz_norm(&self, z: Complex64) -> f64 {
        self.pieces().map(|(lo, hi)| hz_norm_interval(z, lo, hi)).fold(0.0, f64::max)
    }

    /// Parses `l:u[,l:u...]`; a single number denotes a point.
    pub fn parse(s: &str) -> Result<Self> {
        let mut comps = Vec::new();
        for part in s.split(',') {
            let part = part.trim();
            let num = |t: &str| t.trim().parse::<f64>().map_err(|_| Error::Validation(format!("bad number `{t}` in set `{s}`")));
            match part.split_once(':') {
                Some((l, u)) => comps.push(SetComponent::Interval { lo: num(l)?, hi: num(u)? }),
                None => comps.push(SetComponent::Point(num(part)?)),
            }
        }
        Self::new(comps)
    }
}

impl fmt::Display for SpectrumSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .components
            .iter()
            .map(|c| match *c {
                SetComponent::Interval { lo, hi } => format!("{lo:e}:{hi:e}"),
                SetComponent::Point(x) => format!("{x:e}"),
            })
            .collect();
        write!(f, "{}", parts.join(","))
    }
}

/// `[lambda_min, l] U [u, lambda_max]` where `l` and `u` are the nearest
/// eigenvalues below and above `w`, each widened toward `w` by
/// `margin_frac * (u - l)`.
pub fn split_interval_at(eigenvalues: &[f64], w: f64, margin_frac: f64) -> Result<SpectrumSet> {
    let lo = eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = eigenvalues.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let below = eigenvalues.iter().copied().filter(|&x| x < w).fold(f64::NEG_INFINITY, f64::max);
    let above = eigenvalues.iter().copied().filter(|&x| x > w).fold(f64::INFINITY, f64::min);
    if eigenvalues.iter().any(|&x| x == w) {
        return invalid(format!("split point {w} is an eigenvalue"));
    }
    if !below.is_finite() || !above.is_finite() {
        return invalid(format!("split point {w} does not lie inside the spectrum"));
    }
    let gamma = margin_frac * (above - below);
    if !(0.0..0.5).contains(&margin_frac) {
        return invalid("margin fraction must lie in [0, 0.5)");
    }
    SpectrumSet::new(vec![
        SetComponent::Interval { lo, hi: below + gamma },
        SetComponent::Interval { lo: above - gamma, hi },
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn union_example() {
        let s = SpectrumSet::parse("0:1,5").unwrap();
        let z = Complex64::new(3.0, 4.0);
        let expect = (5.0 / 20f64.sqrt()).max(1.0 / 20f64.sqrt());
        assert!((s.h_norm(0.0, z) - expect).abs() < 1e-15);
    }

    #[test]
    fn split_with_margin() {
        let s = split_interval_at(&[0.0, 1.0, 3.0, 4.0], 2.0, 0.01).unwrap();
        let p: Vec<_> = s.pieces().collect();
        assert_eq!(p.len(), 2);
        assert!((p[0].1 - 1.02).abs() < 1e-15 && (p[1].0 - 2.98).abs() < 1e-15);
        assert!(split_interval_at(&[0.0, 1.0], 1.0, 0.0).is_err());
        assert!(split_interval_at(&[0.0, 1.0], 5.0, 0.0).is_err());
    }

    #[test]
    fn parse_display_round_trip() {
        let s = SpectrumSet::parse("1e-2:1.5, 3:4, 7").unwrap();
        assert_eq!(SpectrumSet::parse(&s.to_string()).unwrap(), s);
    }
}
