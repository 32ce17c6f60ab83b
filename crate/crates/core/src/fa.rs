//! Lanczos approximation of `f(A) b` and `b^T f(A) b`, reference values, and
//! the errors and residuals of the shifted systems `(A - zI) x = b`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::function::ScalarFunction;
use crate::lanczos::LanczosFactorization;
use crate::linalg::operator::{dot, MAX_DENSE_SPECTRUM};
use crate::linalg::SymmetricOperator;

/// `||b|| Q_k f(T_k) e_1`.
pub fn lanczos_fa(fact: &LanczosFactorization, f: &ScalarFunction) -> Result<Vec<f64>> {
    let c = fa_coefficients(fact, f)?;
    Ok(fact.combine(&c))
}

/// Coefficients `||b|| f(T_k) e_1` in the Lanczos basis.
pub fn fa_coefficients(fact: &LanczosFactorization, f: &ScalarFunction) -> Result<Vec<f64>> {
    let t = fact.tridiagonal();
    let k = t.dim();
    let (theta, s) = t.eigh()?;
    let mut c = vec![0.0; k];
    for j in 0..k {
        let fj = f.eval_real(theta[j]).map_err(|e| ritz_domain(e, theta[j]))?;
        let weight = fj * s[j] * fact.b_norm();
        for i in 0..k {
            c[i] += s[i * k + j] * weight;
        }
    }
    Ok(c)
}

/// `||b||^2 e_1^T f(T_k) e_1`, the Gauss quadrature estimate of `b^T f(A) b`.
pub fn quadform(fact: &LanczosFactorization, f: &ScalarFunction) -> Result<f64> {
    let (theta, s1) = fact.tridiagonal().eig_first_components()?;
    let mut acc = 0.0;
    for (t, s) in theta.iter().zip(&s1) {
        acc += f.eval_real(*t).map_err(|e| ritz_domain(e, *t))? * s * s;
    }
    Ok(acc * fact.b_norm() * fact.b_norm())
}

fn ritz_domain(e: Error, theta: f64) -> Error {
    match e {
        Error::Domain { reason, .. } => Error::Domain { at: theta, reason: format!("at Ritz value {theta}: {reason}") },
        other => other,
    }
}

fn check_reference_size(a: &SymmetricOperator) -> Result<()> {
    if !a.is_diagonal() && a.dim() > MAX_DENSE_SPECTRUM {
        return Err(Error::Unsupported(format!(
            "reference evaluation needs a diagonal operator or dimension <= {MAX_DENSE_SPECTRUM}"
        )));
    }
    Ok(())
}

/// `f(A) b` through the eigendecomposition of `A`.
pub fn ground_truth(a: &SymmetricOperator, b: &[f64], f: &ScalarFunction) -> Result<Vec<f64>> {
    check_reference_size(a)?;
    if b.len() != a.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), got: b.len() });
    }
    let s = a.spectrum()?;
    let vals: Vec<f64> = s.eigenvalues.iter().map(|&l| f.eval_real(l)).collect::<Result<_>>()?;
    let mut c = s.to_eigenbasis(b);
    for (ci, v) in c.iter_mut().zip(&vals) {
        *ci *= v;
    }
    Ok(s.from_eigenbasis(&c))
}

/// `b^T f(A) b` through the eigendecomposition of `A`.
pub fn ground_truth_quadform(a: &SymmetricOperator, b: &[f64], f: &ScalarFunction) -> Result<f64> {
    check_reference_size(a)?;
    let s = a.spectrum()?;
    let c = s.to_eigenbasis(b);
    let mut acc = 0.0;
    for (ci, &l) in c.iter().zip(&s.eigenvalues) {
        acc += f.eval_real(l)? * ci * ci;
    }
    Ok(acc)
}

/// Error and residual of the Lanczos approximation to `(A - zI)^{-1} b`.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftedSolveRecord {
    pub z: Complex64,
    /// `(A - zI)^{-1} b - Q_k (T_k - zI)^{-1} Q_k^T b`.
    pub err: Vec<Complex64>,
    /// `b - (A - zI) Q_k (T_k - zI)^{-1} Q_k^T b`.
    pub res: Vec<Complex64>,
}

/// `||b|| Q_k (T_k - zI)^{-1} e_1`.
pub fn shifted_krylov_solution(fact: &LanczosFactorization, z: Complex64) -> Result<Vec<Complex64>> {
    let mut y = fact.tridiagonal().solve_shifted_e1(z)?;
    let bn = fact.b_norm();
    y.iter_mut().for_each(|v| *v *= bn);
    Ok(fact.combine_complex(&y))
}

/// Error and residual from their definitions. `b` should be the start
/// vector of the factorization.
pub fn shifted_err_res(
    fact: &LanczosFactorization,
    a: &SymmetricOperator,
    b: &[f64],
    z: Complex64,
) -> Result<ShiftedSolveRecord> {
    let x = shifted_krylov_solution(fact, z)?;
    let exact = a.solve_shifted(z, b)?;
    let err: Vec<Complex64> = exact.iter().zip(&x).map(|(e, v)| e - v).collect();
    let res = residual_from_solution(a, b, z, &x);
    Ok(ShiftedSolveRecord { z, err, res })
}

/// `b - (A - zI) x`.
pub fn residual_from_solution(a: &SymmetricOperator, b: &[f64], z: Complex64, x: &[Complex64]) -> Vec<Complex64> {
    let xr: Vec<f64> = x.iter().map(|v| v.re).collect();
    let xi: Vec<f64> = x.iter().map(|v| v.im).collect();
    let ar = a.apply(&xr);
    let ai = a.apply(&xi);
    (0..b.len()).map(|i| Complex64::new(b[i] - ar[i], -ai[i]) + z * x[i]).collect()
}

/// Residual through its closed form
/// `(-1)^k (prod_j beta_j) ||b|| / det(T_k - zI) q_{k+1}`.
pub fn residual_closed_form(fact: &LanczosFactorization, z: Complex64) -> Result<Vec<Complex64>> {
    let t = fact.tridiagonal();
    let ritz = t.eigvals()?;
    let coeff = residual_coefficient(fact, &ritz, z)?;
    Ok(fact.next_vector().iter().map(|&q| coeff * q).collect())
}

/// Scalar multiplying `q_{k+1}` in the residual.
pub fn residual_coefficient(fact: &LanczosFactorization, ritz: &[f64], z: Complex64) -> Result<Complex64> {
    let t = fact.tridiagonal();
    // Reuse the singular-shift check of the determinant ratio.
    t.det_ratio_with_ritz(ritz, z, z)?;
    if fact.beta_last() == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let log_betas: f64 = t.betas().iter().map(|b| b.abs().ln()).sum::<f64>() + fact.beta_last().abs().ln();
    let sign = t.betas().iter().chain(std::iter::once(&fact.beta_last())).filter(|b| **b < 0.0).count();
    let k = t.dim();
    let log = Complex64::new(log_betas + fact.b_norm().ln(), 0.0) - t.log_det_shifted(z);
    let s = if (k + sign) % 2 == 0 { 1.0 } else { -1.0 };
    Ok(log.exp() * s)
}

/// `b^H v` for real `b`.
pub fn real_dot_complex(b: &[f64], v: &[Complex64]) -> Complex64 {
    b.iter().zip(v).fold(Complex64::new(0.0, 0.0), |s, (&x, &y)| s + y * x)
}

/// `b^T v`.
pub fn real_dot(b: &[f64], v: &[f64]) -> f64 {
    dot(b, v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lanczos::{lanczos, Precision};
    use crate::linalg::operator::norm2_complex;

    fn setup() -> (SymmetricOperator, Vec<f64>) {
        let a = SymmetricOperator::diagonal((0..60).map(|i| 0.5 + 0.1 * i as f64).collect()).unwrap();
        let b: Vec<f64> = (0..60).map(|i| 1.0 + 0.3 * ((i * 13) % 7) as f64).collect();
        (a, b)
    }

    #[test]
    fn exact_for_low_degree_polynomials() {
        let (a, b) = setup();
        let fact = lanczos(&a, &b, 6, true, Precision::Fp64).unwrap();
        let f = ScalarFunction::Polynomial { coeffs: vec![0.5, -1.0, 2.0, 0.0, 1.0, 0.3] };
        let lan = lanczos_fa(&fact, &f).unwrap();
        let truth = ground_truth(&a, &b, &f).unwrap();
        let scale = truth.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for (x, y) in lan.iter().zip(&truth) {
            assert!((x - y).abs() <= 1e-10 * scale);
        }
        let qf = quadform(&fact, &f).unwrap();
        let qt = ground_truth_quadform(&a, &b, &f).unwrap();
        assert!((qf - qt).abs() <= 1e-10 * qt.abs());
    }

    #[test]
    fn residual_routes_agree() {
        let (a, b) = setup();
        let fact = lanczos(&a, &b, 12, true, Precision::Fp64).unwrap();
        for z in [Complex64::new(0.0, 0.0), Complex64::new(2.0, 0.7), Complex64::new(-1.0, -3.0)] {
            let rec = shifted_err_res(&fact, &a, &b, z).unwrap();
            let closed = residual_closed_form(&fact, z).unwrap();
            let diff: Vec<Complex64> = rec.res.iter().zip(&closed).map(|(x, y)| x - y).collect();
            assert!(norm2_complex(&diff) <= 1e-8 * norm2_complex(&rec.res).max(1e-300), "z={z}");
        }
    }

    #[test]
    fn domain_error_names_ritz_value() {
        let a = SymmetricOperator::diagonal(vec![-1.0, 2.0, 3.0]).unwrap();
        let fact = lanczos(&a, &[1.0, 1.0, 1.0], 3, true, Precision::Fp64).unwrap();
        match lanczos_fa(&fact, &ScalarFunction::Sqrt) {
            Err(Error::Domain { at, reason }) => {
                assert!((at + 1.0).abs() < 1e-12);
                assert!(reason.contains("Ritz value"));
            }
            other => panic!("{other:?}"),
        }
    }
}
