//! Closed-form constants and simple bounds built on them.

use std::f64::consts::PI;

use crate::bounds::integral::{IntegralValue, SpectrumSets};
use crate::contour::{make_circle, Contour, QuadOptions};
use crate::error::{invalid, Error, Result};
use crate::function::ScalarFunction;

/// `Gamma(k - 1/2) / Gamma(k + 1)` from the exact product recurrence
/// `R(1) = sqrt(pi)`, `R(k + 1) = R(k) (k - 1/2) / (k + 1)`.
pub fn pacman_gamma_ratio(k: usize) -> f64 {
    let mut r = PI.sqrt();
    for j in 1..k {
        let j = j as f64;
        r *= (j - 0.5) / (j + 1.0);
    }
    r
}

/// Integral factor for `f = sqrt` on the Pac-Man contour around 0 in the
/// limit of vanishing inner and infinite outer radius with `S_i = I(A)`:
/// `lambda_max^{3/2} / (2 sqrt(pi)) * Gamma(k - 1/2) / Gamma(k + 1)`.
pub fn sqrt_pacman_constant(k: usize, lambda_max: f64) -> Result<f64> {
    if k == 0 {
        return invalid("k must be at least 1");
    }
    if !(lambda_max > 0.0) {
        return invalid("lambda_max must be positive");
    }
    Ok(lambda_max.powf(1.5) / (2.0 * PI.sqrt()) * pacman_gamma_ratio(k))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PiecewiseKind {
    Abs,
    Step,
    StepOverX,
}

impl PiecewiseKind {
    pub fn function(self, a: f64) -> ScalarFunction {
        match self {
            Self::Abs => ScalarFunction::AbsShift { a },
            Self::Step => ScalarFunction::Step { a },
            Self::StepOverX => ScalarFunction::StepOverX { a },
        }
    }
}

/// `(1/2pi) sum_j |Gamma_j| max_{Gamma_j} |f|` for the double circle
/// through `a` with `eps = 0`.
pub fn piecewise_constant(kind: PiecewiseKind, a: f64, lambda_min: f64, lambda_max: f64) -> Result<f64> {
    if !(lambda_min < a && a < lambda_max) {
        return invalid(format!("need lambda_min < a < lambda_max, got {lambda_min}, {a}, {lambda_max}"));
    }
    Ok(match kind {
        PiecewiseKind::Abs => 2.0 * (a - lambda_min).powi(2) + 2.0 * (lambda_max - a).powi(2),
        PiecewiseKind::Step => lambda_max - a,
        PiecewiseKind::StepOverX => {
            if a <= 0.0 {
                return invalid("step(x - a)/x needs a > 0");
            }
            (lambda_max - a) / a
        }
    })
}

/// Per-component arclength and node maximum of `|f|` on a contour, and the
/// resulting `(1/2pi) sum_j |Gamma_j| max_{Gamma_j} |f|`.
pub fn length_times_max(f: &ScalarFunction, contour: &Contour, quad: &QuadOptions) -> Result<f64> {
    let nodes = contour.fixed_nodes();
    let mut total = 0.0;
    let mut offset = 0;
    let per_segment = nodes.len() / contour.segments().len();
    for range in contour.components() {
        let comp = contour.segments()[range.clone()].to_vec();
        let sub = crate::contour::make_custom(vec![comp], contour.panels_per_segment() * range.len() * 16)?;
        let len = sub.integrate_arclength(quad, |_| Ok(1.0))?.value;
        let count = range.len() * per_segment;
        let fmax = nodes[offset..offset + count].iter().map(|(z, _, _)| f.eval_complex(*z).norm()).fold(0.0, f64::max);
        offset += count;
        total += len * fmax;
    }
    Ok(total / (2.0 * PI))
}

/// Disk bound: `(lambda_max - w) * max_{z in Gamma} |f(z)| * err_w_norm`
/// with `Gamma` the circle around `lambda_max` through `w`; the maximum is
/// taken over quadrature nodes.
pub fn bound_disk(f: &ScalarFunction, w: f64, lambda_max: f64, err_w_norm: f64, n_nodes: usize) -> Result<f64> {
    if !(w < lambda_max) {
        return invalid("w must lie left of lambda_max");
    }
    let c = make_circle(lambda_max, lambda_max - w, n_nodes)?;
    let mut m = 0.0f64;
    for (z, _, _) in c.fixed_nodes() {
        let v = f.eval_complex(z).norm();
        if !v.is_finite() {
            return Err(Error::SingularIntegrand { z });
        }
        m = m.max(v);
    }
    Ok((lambda_max - w) * m * err_w_norm)
}

/// `(1/2pi) oint |f| |dz|` over the same circle; the sharper middle
/// quantity of the disk bound.
pub fn disk_integral(f: &ScalarFunction, w: f64, lambda_max: f64, quad: &QuadOptions) -> Result<f64> {
    let c = make_circle(lambda_max, lambda_max - w, 256)?;
    Ok(c.integrate_arclength(quad, |z| Ok(f.eval_complex(z).norm() / (2.0 * PI)))?.value)
}

/// Relative error bound for `f(x) = x^{-q}` with `w = c lambda_min`:
/// `c^{-q} kappa(A)^q kappa(A - wI) * err_ratio`.
pub fn bound_xq_relative(q: f64, c: f64, kappa_a: f64, kappa_shift: f64, err_ratio: f64) -> Result<f64> {
    if !(q > 0.0 && q.is_finite()) {
        return invalid("q must be positive");
    }
    if !(c > 0.0 && c <= 1.0) {
        return invalid("c must lie in (0, 1]");
    }
    if !(kappa_a >= 1.0 && kappa_shift >= 1.0) {
        return invalid("condition numbers must be at least 1");
    }
    if !(err_ratio >= 0.0) {
        return invalid("error ratio must be nonnegative");
    }
    Ok(c.powf(-q) * kappa_a.powf(q) * kappa_shift * err_ratio)
}

/// Fixed-node discretization of the integral term next to its adaptive
/// value.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalDiscretization {
    pub node_count: usize,
    /// `(1/2pi) sum_i |w_i| |f(z_i)| prod ||h||_{S_i} ||h||_{S0}`.
    pub discrete_sum: f64,
    /// Same sum with twice as many nodes.
    pub refined_sum: f64,
    pub refinement_gap: f64,
    pub adaptive: IntegralValue,
}

pub fn rational_discretization_report(
    f: &ScalarFunction,
    contour: &Contour,
    w: f64,
    sets: &SpectrumSets,
    node_count: usize,
    quad: &QuadOptions,
) -> Result<RationalDiscretization> {
    let eval = |c: &Contour| -> Result<f64> {
        let mut s = 0.0;
        for (z, _, ds) in c.fixed_nodes() {
            let mut v = f.eval_complex(z).norm();
            if v != 0.0 {
                for si in &sets.s_list {
                    v *= si.h_norm(w, z);
                }
                v *= sets.s0.h_norm(w, z);
            }
            if !v.is_finite() {
                return Err(Error::SingularIntegrand { z });
            }
            s += ds * v;
        }
        Ok(s / (2.0 * PI))
    };
    let base = contour.with_nodes(node_count);
    let discrete_sum = eval(&base)?;
    let refined_sum = eval(&contour.with_nodes(2 * node_count))?;
    let adaptive = crate::bounds::integral::integral_term(f, &base, w, sets, quad)?;
    Ok(RationalDiscretization {
        node_count,
        discrete_sum,
        refined_sum,
        refinement_gap: (refined_sum - discrete_sum).abs(),
        adaptive,
    })
}

/// Estimate of the classical bound `2 E_k(f) ||b||`, where `E_k` is the
/// uniform error of Chebyshev interpolation of degree `k - 1` on `[l, u]`
/// measured on a `4k`-point Chebyshev grid. This is a near-best proxy, not
/// a certified bound.
pub fn uniform_poly_bound(f: &ScalarFunction, l: f64, u: f64, k: usize, b_norm: f64) -> Result<f64> {
    if !(l < u) || k == 0 {
        return invalid("need l < u and k >= 1");
    }
    let map = |t: f64| 0.5 * (l + u) + 0.5 * (u - l) * t;
    let nodes: Vec<f64> = (0..k).map(|j| ((2 * j + 1) as f64 * PI / (2 * k) as f64).cos()).collect();
    let vals: Vec<f64> = nodes.iter().map(|&t| f.eval_real(map(t))).collect::<Result<_>>()?;
    let weights: Vec<f64> = (0..k)
        .map(|j| {
            let s = ((2 * j + 1) as f64 * PI / (2 * k) as f64).sin();
            if j % 2 == 0 { s } else { -s }
        })
        .collect();
    let interp = |t: f64| -> f64 {
        let mut num = 0.0;
        let mut den = 0.0;
        for j in 0..k {
            let d = t - nodes[j];
            if d == 0.0 {
                return vals[j];
            }
            let c = weights[j] / d;
            num += c * vals[j];
            den += c;
        }
        num / den
    };
    let m = 4 * k;
    let mut err = 0.0f64;
    for i in 0..m {
        let t = ((2 * i + 1) as f64 * PI / (2 * m) as f64).cos();
        err = err.max((f.eval_real(map(t))? - interp(t)).abs());
    }
    Ok(2.0 * err * b_norm)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pacman_examples() {
        assert!((sqrt_pacman_constant(1, 4.0).unwrap() - 4.0).abs() < 1e-14);
        let k = 1000usize;
        let v = (k as f64).powf(1.5) * pacman_gamma_ratio(k);
        assert!((v - 1.0).abs() < 1e-2);
    }

    #[test]
    fn piecewise_examples() {
        assert_eq!(piecewise_constant(PiecewiseKind::Abs, 1.0, 0.0, 4.0).unwrap(), 20.0);
        assert_eq!(piecewise_constant(PiecewiseKind::Step, 1.0, 0.0, 4.0).unwrap(), 3.0);
        assert_eq!(piecewise_constant(PiecewiseKind::StepOverX, 1.0, 0.0, 4.0).unwrap(), 3.0);
        assert!(piecewise_constant(PiecewiseKind::Step, 5.0, 0.0, 4.0).is_err());
    }

    #[test]
    fn cg_style_arithmetic() {
        let b = bound_xq_relative(2.0, 0.5, 100.0, 3.0, 0.01).unwrap();
        assert!((b - 4.0 * 1e4 * 3.0 * 0.01).abs() < 1e-9);
    }

    #[test]
    fn poly_proxy_exact_for_low_degree() {
        let f = ScalarFunction::Polynomial { coeffs: vec![1.0, -3.0, 0.5, 2.0] };
        assert!(uniform_poly_bound(&f, -1.0, 2.0, 5, 1.0).unwrap() < 1e-12);
        let g = ScalarFunction::Exp { scale: -1.0 };
        let e6 = uniform_poly_bound(&g, 0.0, 5.0, 6, 1.0).unwrap();
        let e12 = uniform_poly_bound(&g, 0.0, 5.0, 12, 1.0).unwrap();
        assert!(e6 > 0.0 && e12 < e6);
    }

    #[test]
    fn disk_bound_dominates_integral() {
        let f = ScalarFunction::Exp { scale: -1.0 };
        let q = QuadOptions::default();
        let integral = disk_integral(&f, 0.0, 1.0, &q).unwrap();
        let disk = bound_disk(&f, 0.0, 1.0, 1.0, 256).unwrap();
        assert!(disk >= integral);
        assert!((disk - 1.0).abs() < 1e-3);
    }
}
