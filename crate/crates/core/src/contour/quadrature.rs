//! Composite Gauss-Legendre quadrature with adaptive panel bisection.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::ops::{Add, Mul, Sub};
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::Tridiagonal;

/// Nodes per panel.
pub const GL_ORDER: usize = 16;

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Nodes as eigenvalues of the Jacobi matrix, weights from the first
    /// eigenvector components.
    pub fn new(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::Validation("quadrature order must be positive".into()));
        }
        let betas: Vec<f64> = (1..m).map(|j| j as f64 / ((4 * j * j - 1) as f64).sqrt()).collect();
        let t = Tridiagonal::new(vec![0.0; m], betas)?;
        let (mut nodes, first) = t.eig_first_components()?;
        let mut weights: Vec<f64> = first.iter().map(|s| 2.0 * s * s).collect();
        // Enforce the exact symmetry of the rule.
        for i in 0..m / 2 {
            let j = m - 1 - i;
            let x = 0.5 * (nodes[j] - nodes[i]);
            nodes[i] = -x;
            nodes[j] = x;
            let w = 0.5 * (weights[i] + weights[j]);
            weights[i] = w;
            weights[j] = w;
        }
        if m % 2 == 1 {
            nodes[m / 2] = 0.0;
        }
        Ok(Self { nodes, weights })
    }
}

pub fn gl16() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(GL_ORDER).expect("16-point rule"))
}

/// Values that can be integrated.
pub trait QuadValue: Copy + Default + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn magnitude(&self) -> f64;
    fn is_finite_value(&self) -> bool;
}

impl QuadValue for f64 {
    fn magnitude(&self) -> f64 {
        self.abs()
    }
    fn is_finite_value(&self) -> bool {
        self.is_finite()
    }
}

impl QuadValue for Complex64 {
    fn magnitude(&self) -> f64 {
        self.norm()
    }
    fn is_finite_value(&self) -> bool {
        self.is_finite()
    }
}

/// Tolerances for adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_panels: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self { rel_tol: 1e-8, abs_tol: 0.0, max_panels: 20_000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult<T> {
    pub value: T,
    /// Sum over panels of `|I(panel) - I(left half) - I(right half)|`.
    pub err_estimate: f64,
    pub evaluations: usize,
    pub panels: usize,
    pub converged: bool,
}

/// A parametrized piece `t in [0, 1] -> C` of an integration path.
pub trait PathPiece {
    /// Point and derivative with respect to the parameter.
    fn eval(&self, t: f64) -> (Complex64, Complex64);
}

struct Panel<T> {
    piece: usize,
    t0: f64,
    t1: f64,
    left: T,
    right: T,
    err: f64,
}

struct HeapItem {
    err: f64,
    idx: usize,
}

impl PartialEq for HeapItem {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for HeapItem {}
impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for HeapItem {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err).then_with(|| other.idx.cmp(&self.idx))
    }
}

/// Relative length below which a panel is not split further.
const PATH_RESOLUTION: f64 = 64.0 * f64::EPSILON;

/// Rule applied to `[t0, t1]` of one piece. The integrand receives the
/// point and the derivative of the parametrization.
fn panel_rule<P, T, F>(pieces: &[P], piece: usize, t0: f64, t1: f64, g: &mut F, evals: &mut usize) -> Result<T>
where
    P: PathPiece,
    T: QuadValue,
    F: FnMut(Complex64, Complex64) -> Result<T>,
{
    let rule = gl16();
    let half = 0.5 * (t1 - t0);
    let mid = 0.5 * (t1 + t0);
    let mut acc = T::default();
    for (x, w) in rule.nodes.iter().zip(&rule.weights) {
        let (z, dz) = pieces[piece].eval(mid + half * x);
        let v = g(z, dz)?;
        if !v.is_finite_value() {
            return Err(Error::SingularIntegrand { z });
        }
        acc = acc + v * (w * half);
    }
    *evals += rule.nodes.len();
    Ok(acc)
}

/// Integrates over the concatenation of `pieces`, each initially split
/// into `panels_per_piece` panels, bisecting the panel with the largest
/// error estimate until the total estimate meets the tolerance.
pub fn integrate_pieces<P, T, F>(pieces: &[P], panels_per_piece: usize, opts: &QuadOptions, mut g: F) -> Result<QuadResult<T>>
where
    P: PathPiece,
    T: QuadValue,
    F: FnMut(Complex64, Complex64) -> Result<T>,
{
    let mut evals = 0usize;
    let mut panels: Vec<Panel<T>> = Vec::new();
    let mut heap = BinaryHeap::new();
    let m = panels_per_piece.max(1);
    let make = |piece: usize, t0: f64, t1: f64, whole: Option<T>, g: &mut F, evals: &mut usize| -> Result<Panel<T>> {
        let tm = 0.5 * (t0 + t1);
        let whole = match whole {
            Some(w) => w,
            None => panel_rule(pieces, piece, t0, t1, g, evals)?,
        };
        let left = panel_rule(pieces, piece, t0, tm, g, evals)?;
        let right = panel_rule(pieces, piece, tm, t1, g, evals)?;
        let err = (whole - (left + right)).magnitude();
        Ok(Panel { piece, t0, t1, left, right, err })
    };
    for p in 0..pieces.len() {
        for i in 0..m {
            let t0 = i as f64 / m as f64;
            let t1 = (i + 1) as f64 / m as f64;
            let panel = make(p, t0, t1, None, &mut g, &mut evals)?;
            heap.push(HeapItem { err: panel.err, idx: panels.len() });
            panels.push(panel);
        }
    }
    let mut active = panels.len();
    let mut converged = false;
    // Error of panels too short to split at the resolution of the path.
    let mut frozen = 0.0;
    loop {
        let (total, err): (T, f64) = panels
            .iter()
            .filter(|p| p.t1 > p.t0)
            .fold((T::default(), 0.0), |(s, e), p| (s + p.left + p.right, e + p.err));
        let target = opts.abs_tol.max(opts.rel_tol * total.magnitude());
        if err - frozen <= target {
            converged = true;
        }
        if converged || active >= opts.max_panels || heap.is_empty() {
            return Ok(QuadResult { value: total, err_estimate: err, evaluations: evals, panels: active, converged });
        }
        // Refine a batch of the worst panels before re-summing.
        let batch = (active / 8).max(1);
        for _ in 0..batch {
            let Some(item) = heap.pop() else { break };
            if item.err == 0.0 {
                heap.push(item);
                break;
            }
            let (piece, t0, t1, left, right) = {
                let p = &panels[item.idx];
                (p.piece, p.t0, p.t1, p.left, p.right)
            };
            let tm = 0.5 * (t0 + t1);
            let (z0, z1) = (pieces[piece].eval(t0).0, pieces[piece].eval(t1).0);
            if tm <= t0 || tm >= t1 || (z1 - z0).norm() <= PATH_RESOLUTION * z0.norm().max(z1.norm()) {
                // Points inside the panel are not resolved in floating
                // point; keep its error in the estimate and stop splitting.
                frozen += item.err;
                continue;
            }
            let lp = make(piece, t0, tm, Some(left), &mut g, &mut evals)?;
            let rp = make(piece, tm, t1, Some(right), &mut g, &mut evals)?;
            // Retire the parent by collapsing it to an empty interval.
            panels[item.idx].t1 = panels[item.idx].t0;
            panels[item.idx].err = 0.0;
            heap.push(HeapItem { err: lp.err, idx: panels.len() });
            panels.push(lp);
            heap.push(HeapItem { err: rp.err, idx: panels.len() });
            panels.push(rp);
            active += 1;
        }
    }
}

/// Fixed composite rule: `(point, derivative, weight)` triples over all
/// panels, without adaptivity.
pub fn fixed_nodes<P: PathPiece>(pieces: &[P], panels_per_piece: usize) -> Vec<(Complex64, Complex64, f64)> {
    let rule = gl16();
    let m = panels_per_piece.max(1);
    let mut out = Vec::with_capacity(pieces.len() * m * GL_ORDER);
    for p in pieces {
        for i in 0..m {
            let t0 = i as f64 / m as f64;
            let t1 = (i + 1) as f64 / m as f64;
            let half = 0.5 * (t1 - t0);
            let mid = 0.5 * (t1 + t0);
            for (x, w) in rule.nodes.iter().zip(&rule.weights) {
                let (z, dz) = p.eval(mid + half * x);
                out.push((z, dz, w * half));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Interval(f64, f64);
    impl PathPiece for Interval {
        fn eval(&self, t: f64) -> (Complex64, Complex64) {
            (Complex64::new(self.0 + t * (self.1 - self.0), 0.0), Complex64::new(self.1 - self.0, 0.0))
        }
    }

    #[test]
    fn rule_is_exact_for_degree_31() {
        let r = GaussLegendre::new(16).unwrap();
        for deg in 0..32 {
            let s: f64 = r.nodes.iter().zip(&r.weights).map(|(x, w)| w * x.powi(deg)).sum();
            let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
            assert!((s - exact).abs() < 1e-14, "degree {deg}: {s}");
        }
    }

    #[test]
    fn adaptive_handles_kink() {
        let pieces = [Interval(-1.0, 2.0)];
        let opts = QuadOptions::default();
        let r = integrate_pieces(&pieces, 1, &opts, |z, dz| Ok((z.re - 0.3).abs() * dz.re)).unwrap();
        let exact = 0.5 * 1.3 * 1.3 + 0.5 * 1.7 * 1.7;
        assert!(r.converged);
        assert!((r.value - exact).abs() <= 1e-8 * exact, "{}", r.value);
        assert!(r.err_estimate <= 1e-8 * exact);
    }

    #[test]
    fn nonfinite_integrand_reports_node() {
        let pieces = [Interval(0.0, 1.0)];
        let err = integrate_pieces(&pieces, 1, &QuadOptions::default(), |z, _| Ok(if z.re > 0.5 { f64::NAN } else { 1.0 }))
            .unwrap_err();
        assert!(matches!(err, Error::SingularIntegrand { z } if z.re > 0.5));
    }
}
