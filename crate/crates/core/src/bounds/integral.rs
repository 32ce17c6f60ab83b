//! Contour integrals that make up the error bounds.

use std::borrow::Cow;
use std::f64::consts::PI;

use num_complex::Complex64;

use crate::contour::{Contour, ContourKind, QuadOptions, QuadResult, SpectrumSet};
use crate::error::{Error, Result};
use crate::function::ScalarFunction;
use crate::lanczos::{LanczosFactorization, RecurrenceResidual};

/// Half-width of the a posteriori Ritz sets in units of `k * eps * max|theta|`.
pub const RITZ_SLACK: f64 = 4.0;

/// Sets entering the bound: `s0` contains the spectrum of `A`, `s_list[i]`
/// contains the `i`-th Ritz value.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumSets {
    pub s0: SpectrumSet,
    pub s_list: Vec<SpectrumSet>,
}

impl SpectrumSets {
    /// `k` copies of `si`.
    pub fn apriori(s0: SpectrumSet, si: SpectrumSet, k: usize) -> Self {
        Self { s0, s_list: vec![si; k] }
    }

    /// One set per Ritz value: the interval of half-width
    /// `RITZ_SLACK * k * eps * max|theta|` around it, clipped to the hull of
    /// `s0`. The width covers the rounding in computed Ritz values, so a
    /// Ritz value that lands on `w` cannot make the integral vanish.
    pub fn aposteriori(s0: SpectrumSet, ritz: &[f64]) -> Result<Self> {
        let (lo, hi) = s0.hull().ok_or_else(|| Error::Validation("empty spectrum set".into()))?;
        let scale = ritz.iter().fold(0.0f64, |m, t| m.max(t.abs()));
        let eta = RITZ_SLACK * ritz.len() as f64 * f64::EPSILON * scale;
        let s_list = ritz
            .iter()
            .map(|&t| {
                let t = t.clamp(lo, hi);
                SpectrumSet::interval((t - eta).max(lo), (t + eta).min(hi))
            })
            .collect::<Result<_>>()?;
        Ok(Self { s0, s_list })
    }

    /// Consecutive equal sets merged into `(set, multiplicity)`.
    fn groups(&self) -> Vec<(&SpectrumSet, usize)> {
        let mut out: Vec<(&SpectrumSet, usize)> = Vec::new();
        for s in &self.s_list {
            match out.last_mut() {
                Some((last, n)) if *last == s => *n += 1,
                _ => out.push((s, 1)),
            }
        }
        out
    }

    /// Smallest interval containing every set.
    pub fn hull(&self) -> (f64, f64) {
        let mut h = self.s0.hull().expect("non-empty");
        for s in &self.s_list {
            let (a, b) = s.hull().expect("non-empty");
            h = (h.0.min(a), h.1.max(b));
        }
        h
    }
}

/// Result of a bound integral: quadrature value plus, for unbounded
/// contours, a certified bound on the truncated tail (already included in
/// `value`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegralValue {
    pub value: f64,
    pub err_estimate: f64,
    pub tail: f64,
    pub truncation: Option<f64>,
    pub converged: bool,
}

impl IntegralValue {
    fn from_quad(q: QuadResult<f64>) -> Self {
        Self { value: q.value, err_estimate: q.err_estimate, tail: 0.0, truncation: None, converged: q.converged }
    }
}

/// Checks that each piece of `set` lies inside the contour. A piece may
/// touch the real crossing point `w` of a double-circle contour with
/// `eps = 0`, where the integrand stays bounded.
pub fn check_enclosure(contour: &Contour, set: &SpectrumSet, w: f64) -> Result<()> {
    let crossing_ok = matches!(contour.kind(), ContourKind::DoubleCircle { eps, .. } if eps == 0.0);
    for (lo, hi) in set.pieces() {
        for x in [lo, hi] {
            if !contour.encloses(x) && !(crossing_ok && x == w) {
                return Err(Error::Enclosure(format!("point {x} of set [{lo}, {hi}] is not enclosed by the contour")));
            }
        }
        if let ContourKind::DoubleCircle { w: cw, eps, .. } = contour.kind() {
            if lo < cw && hi > cw && eps > 0.0 {
                return Err(Error::Enclosure(format!(
                    "set [{lo}, {hi}] crosses the gap at {cw} between the circles"
                )));
            }
        }
    }
    Ok(())
}

/// For a double circle touching at `w`, the contour graded toward `w` when
/// some set endpoint comes within a small fraction of the radii of `w`.
fn graded_for<'a>(contour: &'a Contour, ends: impl Iterator<Item = f64>) -> Cow<'a, Contour> {
    let ContourKind::DoubleCircle { w, lambda_min, lambda_max, eps } = contour.kind() else {
        return Cow::Borrowed(contour);
    };
    if eps != 0.0 {
        return Cow::Borrowed(contour);
    }
    let d = ends.filter(|&x| x != w).map(|x| (x - w).abs()).fold(f64::INFINITY, f64::min);
    let radius = (w - lambda_min).min(lambda_max - w);
    if d < radius / 8.0 {
        Cow::Owned(contour.graded_toward(w, d / 4.0))
    } else {
        Cow::Borrowed(contour)
    }
}

fn set_ends(sets: &SpectrumSets) -> impl Iterator<Item = f64> + '_ {
    std::iter::once(&sets.s0).chain(&sets.s_list).flat_map(|s| s.pieces().flat_map(|(a, b)| [a, b]))
}

fn check_all(contour: &Contour, sets: &SpectrumSets, w: f64) -> Result<()> {
    check_enclosure(contour, &sets.s0, w)?;
    let mut seen: Option<&SpectrumSet> = None;
    for s in &sets.s_list {
        if seen != Some(s) {
            check_enclosure(contour, s, w)?;
            seen = Some(s);
        }
    }
    Ok(())
}

/// Which factor closes the integrand.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Closing {
    /// `||h_{w,z}||_{S0}`, products to the first power.
    Shifted,
    /// `||h_z||_{S0}`, products squared.
    Resolvent,
}

struct Integrand<'a> {
    f: &'a ScalarFunction,
    w: f64,
    s0: &'a SpectrumSet,
    groups: Vec<(&'a SpectrumSet, usize)>,
    closing: Closing,
}

impl Integrand<'_> {
    fn eval(&self, z: Complex64) -> Result<f64> {
        let fz = self.f.eval_complex(z).norm();
        if fz == 0.0 {
            return Ok(0.0);
        }
        let power = match self.closing {
            Closing::Shifted => 1.0,
            Closing::Resolvent => 2.0,
        };
        let mut log = 0.0;
        for (s, n) in &self.groups {
            let h = s.h_norm(self.w, z);
            if h == 0.0 {
                return Ok(0.0);
            }
            log += power * (*n as f64) * h.ln();
        }
        let last = match self.closing {
            Closing::Shifted => self.s0.h_norm(self.w, z),
            Closing::Resolvent => self.s0.hz_norm(z),
        };
        let v = fz * log.exp() * last / (2.0 * PI);
        if !v.is_finite() {
            return Err(Error::SingularIntegrand { z });
        }
        Ok(v)
    }
}

/// Relative size of the certified tail accepted for unbounded contours.
pub const TAIL_REL: f64 = 1e-3;

/// Tail bound data: the integrand is at most
/// `|f(z)| * sum_j exp(log_a_j) / (t + delta)^{m_j}` at distance `t` along
/// the rays, where `delta` separates the rays' vertical line from the sets.
struct TailModel {
    delta: f64,
    terms: Vec<(f64, f64)>,
}

fn tail_bound(f: &ScalarFunction, contour: &Contour, model: &TailModel, reach: f64) -> Result<f64> {
    let ContourKind::PacMan { center, r, .. } = contour.kind() else {
        return Ok(0.0);
    };
    let g = f.growth().ok_or_else(|| {
        Error::Unsupported(format!("{f} has no growth bound, so the unbounded contour cannot be truncated"))
    })?;
    let delta = model.delta;
    let s = reach + delta;
    let kappa = 1.0 + (center.abs() + r - delta).max(0.0) / s;
    let mut total = 0.0;
    for &(log_a, m) in &model.terms {
        if m <= g.exponent + 1.0 {
            return Err(Error::Unsupported(format!(
                "integrand of {f} decays too slowly for the unbounded contour"
            )));
        }
        // (1/2pi) * 2 rays * int_R^inf C |z|^p a / (t + delta)^m dt
        let log_t = g.constant.ln() + g.exponent * kappa.ln() + log_a + (g.exponent - m + 1.0) * s.ln()
            - (PI * (m - g.exponent - 1.0)).ln();
        total += log_t.exp();
    }
    Ok(total)
}

/// Integrates over the contour; unbounded contours are truncated at a
/// growing radius until the certified tail is at most `TAIL_REL` times
/// `max(value, floor)`. The tail is added to the value, so the result stays
/// an upper bound even when the radius limit is reached first.
fn integrate_with_tail(
    f: &ScalarFunction,
    contour: &Contour,
    quad: &QuadOptions,
    floor: f64,
    model: impl Fn() -> Result<TailModel>,
    mut g: impl FnMut(Complex64) -> Result<f64>,
) -> Result<IntegralValue> {
    if !contour.is_unbounded() {
        return Ok(IntegralValue::from_quad(contour.integrate_arclength(quad, &mut g)?));
    }
    let ContourKind::PacMan { center, r, .. } = contour.kind() else { unreachable!() };
    let model = model()?;
    if model.delta <= 0.0 {
        return Err(Error::Enclosure("sets reach the slit of the Pac-Man contour".into()));
    }
    let p = f.growth().map(|g| g.exponent).unwrap_or(0.0);
    let decay = model.terms.iter().map(|&(_, m)| m - p - 1.0).fold(f64::INFINITY, f64::min);
    let mut reach = (4.0 * (model.delta + r)).max(1.0 + center.abs() + r);
    let mut last = None;
    for _ in 0..MAX_TRUNCATIONS {
        let c = contour.with_truncation(reach);
        let q = c.integrate_arclength(quad, &mut g)?;
        let tail = tail_bound(f, contour, &model, reach)?;
        let target = TAIL_REL * q.value.max(floor);
        let value = IntegralValue {
            value: q.value + tail,
            err_estimate: q.err_estimate,
            tail,
            truncation: Some(reach),
            converged: q.converged,
        };
        if tail <= target || (q.value == 0.0 && tail == 0.0) {
            return Ok(value);
        }
        last = Some(value);
        // The tail scales like (reach + delta)^(-decay); aim past the target.
        let s = reach + model.delta;
        let wanted = s * (2.0 * tail / target.max(f64::MIN_POSITIVE)).powf(1.0 / decay) - model.delta;
        if !wanted.is_finite() || wanted > MAX_REACH {
            if reach >= MAX_REACH {
                break;
            }
            reach = MAX_REACH;
        } else {
            reach = wanted.max(4.0 * reach);
        }
    }
    Ok(last.expect("at least one truncation"))
}

const MAX_TRUNCATIONS: usize = 12;
const MAX_REACH: f64 = 1e30;

fn shift_model(contour: &Contour, hull: (f64, f64), w: f64) -> (f64, f64) {
    let center = match contour.kind() {
        ContourKind::PacMan { center, .. } => center,
        _ => 0.0,
    };
    let delta = hull.0 - center;
    let m = (hull.0 - w).abs().max((hull.1 - w).abs());
    (delta, m)
}

/// `(1/2pi) oint |f(z)| prod_i ||h_{w,z}||_{S_i} ||h_{w,z}||_{S0} |dz|`.
pub fn integral_term(
    f: &ScalarFunction,
    contour: &Contour,
    w: f64,
    sets: &SpectrumSets,
    quad: &QuadOptions,
) -> Result<IntegralValue> {
    check_all(contour, sets, w)?;
    let contour = &*graded_for(contour, set_ends(sets));
    let integrand = Integrand { f, w, s0: &sets.s0, groups: sets.groups(), closing: Closing::Shifted };
    let model = || {
        let (delta, m) = shift_model(contour, sets.hull(), w);
        let count = sets.s_list.len() as f64 + 1.0;
        Ok(TailModel { delta, terms: vec![(count * m.max(f64::MIN_POSITIVE).ln(), count)] })
    };
    integrate_with_tail(f, contour, quad, 0.0, model, |z| integrand.eval(z))
}

/// `(1/2pi) oint |f(z)| prod_i ||h_{w,z}||_{S_i}^2 ||h_z||_{S0} |dz|`, the
/// integral factor of the quadratic-form bound.
pub fn quadform_integral_term(
    f: &ScalarFunction,
    contour: &Contour,
    w: f64,
    sets: &SpectrumSets,
    quad: &QuadOptions,
) -> Result<IntegralValue> {
    check_all(contour, sets, w)?;
    let contour = &*graded_for(contour, set_ends(sets));
    let integrand = Integrand { f, w, s0: &sets.s0, groups: sets.groups(), closing: Closing::Resolvent };
    let model = || {
        let (delta, m) = shift_model(contour, sets.hull(), w);
        let k = sets.s_list.len() as f64;
        Ok(TailModel { delta, terms: vec![(2.0 * k * m.max(f64::MIN_POSITIVE).ln(), 2.0 * k + 1.0)] })
    };
    integrate_with_tail(f, contour, quad, 0.0, model, |z| integrand.eval(z))
}

/// Quadratic-form bound: integral factor times `||res_k(w)||_2^2`.
pub fn bound_quadform(
    f: &ScalarFunction,
    contour: &Contour,
    w: f64,
    sets: &SpectrumSets,
    res_w_norm_2: f64,
    quad: &QuadOptions,
) -> Result<(f64, IntegralValue)> {
    let it = quadform_integral_term(f, contour, w, sets, quad)?;
    Ok((it.value * res_w_norm_2 * res_w_norm_2, it))
}

/// `(1/2pi) oint |f(z)| ||h_{w,z}||_{S0} ||f_k(w,z)||_2 |dz|` with
/// `f_k(w,z) = ||b|| F_k ((T_k - zI)^{-1} - det(h_{w,z}(T_k)) (T_k - wI)^{-1}) e_1`.
/// `residual` must hold at least `k` columns for the `k`-step `fact`.
/// Tolerances are taken relative to `max(value, floor)`; pass the main
/// bound as `floor` so that a negligible correction is not resolved to
/// rounding level.
pub fn fp_correction(
    f: &ScalarFunction,
    contour: &Contour,
    w: f64,
    s0: &SpectrumSet,
    fact: &LanczosFactorization,
    residual: &RecurrenceResidual,
    quad: &QuadOptions,
    floor: f64,
) -> Result<IntegralValue> {
    check_enclosure(contour, s0, w)?;
    let quad = &QuadOptions { abs_tol: quad.abs_tol.max(quad.rel_tol * floor), ..*quad };
    let k = fact.steps();
    let t = fact.tridiagonal();
    let ritz = t.eigvals()?;
    for &th in &ritz {
        if !contour.encloses(th) {
            return Err(Error::Enclosure(format!("Ritz value {th} is not enclosed by the contour")));
        }
    }
    let contour = &*graded_for(contour, s0.pieces().flat_map(|(a, b)| [a, b]).chain(ritz.iter().copied()));
    let gram = residual.gram(k);
    if gram.iter().all(|&v| v == 0.0) {
        return Ok(IntegralValue { value: 0.0, err_estimate: 0.0, tail: 0.0, truncation: None, converged: true });
    }
    let wc = Complex64::new(w, 0.0);
    let y_w = t.solve_shifted_e1(wc)?;
    let bn = fact.b_norm();
    let fk_norm = |z: Complex64| -> Result<f64> {
        let y_z = t.solve_shifted_e1(z)?;
        let d = t.det_ratio_with_ritz(&ritz, wc, z)?;
        let u: Vec<Complex64> = y_z.iter().zip(&y_w).map(|(a, b)| a - d * b).collect();
        let mut s = 0.0;
        for i in 0..k {
            let mut row = Complex64::new(0.0, 0.0);
            for j in 0..k {
                row += u[j] * gram[i * k + j];
            }
            s += (u[i].conj() * row).re;
        }
        Ok(bn * s.max(0.0).sqrt())
    };
    let integrand = |z: Complex64| -> Result<f64> {
        let fz = f.eval_complex(z).norm();
        if fz == 0.0 {
            return Ok(0.0);
        }
        let v = fz * s0.h_norm(w, z) * fk_norm(z)? / (2.0 * PI);
        if !v.is_finite() {
            return Err(Error::SingularIntegrand { z });
        }
        Ok(v)
    };
    let model = || {
        let (lo, hi) = s0.hull().expect("non-empty");
        let hull = (lo.min(ritz[0]), hi.max(ritz[k - 1]));
        let (delta, m) = shift_model(contour, hull, w);
        let f_norm = residual.frobenius_prefix(k).max(f64::MIN_POSITIVE);
        let yw_norm = y_w.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
        let base = (bn * f_norm).ln();
        let lm = m.max(f64::MIN_POSITIVE).ln();
        Ok(TailModel {
            delta,
            terms: vec![(base + lm, 2.0), (base + (k as f64 + 1.0) * lm + yw_norm.ln(), k as f64 + 1.0)],
        })
    };
    integrate_with_tail(f, contour, quad, floor, model, integrand)
}
