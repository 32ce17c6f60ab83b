//! Shifted linear systems: conjugate gradient bounds, MINRES residuals from
//! the Lanczos tridiagonal, and the relation between MINRES and Galerkin
//! (Lanczos) residual norms.

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::lanczos::LanczosFactorization;

/// Ratio at or above which a MINRES step counts as stagnant.
pub const STAGNATION_RATIO: f64 = 1.0 - 1e-12;

/// `2 ((sqrt(kappa) - 1) / (sqrt(kappa) + 1))^k`.
pub fn cg_apriori_bound(kappa: f64, k: usize) -> Result<f64> {
    if !(kappa >= 1.0) || !kappa.is_finite() {
        return invalid(format!("condition number must be finite and at least 1, got {kappa}"));
    }
    let s = kappa.sqrt();
    Ok(2.0 * ((s - 1.0) / (s + 1.0)).powi(k as i32))
}

/// `2 exp(-2k / sqrt(kappa))`, an upper bound on [`cg_apriori_bound`].
pub fn cg_apriori_bound_exp(kappa: f64, k: usize) -> Result<f64> {
    if !(kappa >= 1.0) || !kappa.is_finite() {
        return invalid(format!("condition number must be finite and at least 1, got {kappa}"));
    }
    Ok(2.0 * (-2.0 * k as f64 / kappa.sqrt()).exp())
}

/// MINRES residual norms `||r_k||_2` for `(A - wI) x = b`, `k = 0..=steps`,
/// from Givens rotations applied to the extended tridiagonal
/// `[T_k - wI; beta_k e_k^T]`.
pub fn minres_residual_norms(fact: &LanczosFactorization, w: f64) -> Vec<f64> {
    let t = fact.tridiagonal();
    let k = t.dim();
    let alphas = t.alphas();
    let betas = t.betas();
    let sub = |j: usize| if j + 1 < k { betas[j] } else { fact.beta_last() };
    let mut out = Vec::with_capacity(k + 1);
    let mut r = fact.b_norm();
    out.push(r);
    // Rotations from the two previous columns as (c, s).
    let mut g2 = (1.0, 0.0);
    let mut g1 = (1.0, 0.0);
    for j in 0..k {
        let above = if j > 0 { betas[j - 1] } else { 0.0 };
        let below = sub(j);
        // Rotations from earlier columns acting on this column's entries.
        let above = g2.0 * above;
        let diag = -g1.1 * above + g1.0 * (alphas[j] - w);
        let h = diag.hypot(below);
        let g = if h == 0.0 { (1.0, 0.0) } else { (diag / h, below / h) };
        r *= g.1.abs();
        out.push(r);
        g2 = g1;
        g1 = g;
    }
    out
}

/// Galerkin residual norms `||res_k(w)||_2 = ||b|| beta_k |e_k^T (T_k - wI)^{-1} e_1|`
/// for `k = 0..=steps`; `None` where `T_k - wI` is singular.
pub fn lanczos_residual_norms(fact: &LanczosFactorization, w: f64) -> Result<Vec<Option<f64>>> {
    let t = fact.tridiagonal();
    let k = t.dim();
    let mut out = Vec::with_capacity(k + 1);
    out.push(Some(fact.b_norm()));
    for j in 1..=k {
        let tj = t.leading(j)?;
        let beta = if j < k { t.betas()[j - 1] } else { fact.beta_last() };
        match tj.solve_shifted_e1(Complex64::new(w, 0.0)) {
            Ok(y) => out.push(Some(fact.b_norm() * beta * y[j - 1].norm())),
            Err(Error::SingularShift { .. }) => out.push(None),
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

/// Galerkin relative residuals predicted from MINRES norms (`minres[0]` is
/// the initial residual):
/// `(r_k / r_0) / sqrt(1 - (r_k / r_{k-1})^2)`, `None` at stagnant steps.
pub fn galerkin_from_minres(minres: &[f64]) -> Vec<Option<f64>> {
    let mut out = Vec::with_capacity(minres.len());
    if minres.is_empty() {
        return out;
    }
    out.push(Some(1.0));
    for j in 1..minres.len() {
        let prev = minres[j - 1];
        let ratio = if prev == 0.0 { 1.0 } else { minres[j] / prev };
        if ratio >= STAGNATION_RATIO {
            out.push(None);
        } else {
            out.push(Some((minres[j] / minres[0]) / (1.0 - ratio * ratio).sqrt()));
        }
    }
    out
}

/// Residual norms of both methods on the same Krylov data.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualHistory {
    pub w: f64,
    pub lanczos: Vec<Option<f64>>,
    pub minres: Vec<f64>,
}

impl ResidualHistory {
    pub fn new(fact: &LanczosFactorization, w: f64) -> Result<Self> {
        Ok(Self { w, lanczos: lanczos_residual_norms(fact, w)?, minres: minres_residual_norms(fact, w) })
    }

    pub fn galerkin_prediction(&self) -> Vec<Option<f64>> {
        galerkin_from_minres(&self.minres)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IndefiniteBound {
    pub gamma: f64,
    pub k_bound: f64,
}

/// For spectra in `[a, b] U [c, d]` with `a < b < 0 < c < d` and equal
/// widths: `gamma = sqrt(|ad| / |bc|)` and the iteration count
/// `2 gamma log(sqrt(2) gamma / eps)` after which some Galerkin residual
/// is below `eps`.
pub fn indefinite_iteration_bound(a: f64, b: f64, c: f64, d: f64, eps: f64) -> Result<IndefiniteBound> {
    if !(a < b && b < 0.0 && 0.0 < c && c < d) {
        return invalid("need a < b < 0 < c < d");
    }
    let (wl, wr) = (b - a, d - c);
    if (wl - wr).abs() > 1e-12 * wl.max(wr) {
        return invalid(format!("cluster widths differ: {wl} vs {wr}"));
    }
    let gamma = ((a * d).abs() / (b * c).abs()).sqrt();
    if !(eps > 0.0 && eps < gamma / 4.0) {
        return invalid(format!("eps must lie in (0, gamma/4) = (0, {})", gamma / 4.0));
    }
    Ok(IndefiniteBound { gamma, k_bound: 2.0 * gamma * (2f64.sqrt() * gamma / eps).ln() })
}

/// `2 ((gamma - 1) / (gamma + 1))^{floor(j/2)}`, the MINRES bound on two
/// intervals of equal width.
pub fn two_cluster_minres_bound(gamma: f64, j: usize) -> Result<f64> {
    if !(gamma >= 1.0) {
        return invalid("gamma must be at least 1");
    }
    Ok(2.0 * ((gamma - 1.0) / (gamma + 1.0)).powi((j / 2) as i32))
}

/// `(1 / sqrt(1 - x^y), 2 / y)` for `x` in `[0, 3/4]`, `y` in `(0, 1]`;
/// the first never exceeds the second.
pub fn inverse_sqrt_gap(x: f64, y: f64) -> Result<(f64, f64)> {
    if !(0.0..=0.75).contains(&x) || !(y > 0.0 && y <= 1.0) {
        return invalid("need x in [0, 3/4] and y in (0, 1]");
    }
    Ok((1.0 / (1.0 - x.powf(y)).sqrt(), 2.0 / y))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lanczos::{lanczos, Precision};
    use crate::linalg::SymmetricOperator;

    #[test]
    fn cg_examples() {
        assert_eq!(cg_apriori_bound(1.0, 3).unwrap(), 0.0);
        assert!((cg_apriori_bound(9.0, 3).unwrap() - 0.25).abs() < 1e-15);
        assert!(cg_apriori_bound_exp(9.0, 3).unwrap() >= 0.25);
        assert!(cg_apriori_bound(0.5, 1).is_err());
    }

    #[test]
    fn indefinite_examples() {
        let r = indefinite_iteration_bound(-2.0, -1.0, 1.0, 2.0, 0.01).unwrap();
        assert!((r.gamma - 2.0).abs() < 1e-15);
        assert!((r.k_bound - 4.0 * (200.0 * 2f64.sqrt()).ln()).abs() < 1e-12);
        assert!((r.k_bound - 22.58).abs() < 5e-3);
        assert!(indefinite_iteration_bound(-3.0, -1.0, 1.0, 2.0, 0.01).is_err());
        assert!(indefinite_iteration_bound(-2.0, -1.0, 1.0, 2.0, 0.6).is_err());
    }

    #[test]
    fn minres_two_by_two_brute_force() {
        let a = SymmetricOperator::diagonal(vec![1.0, 2.0]).unwrap();
        let b = [1.0 / 2f64.sqrt(); 2];
        let f = lanczos(&a, &b, 2, true, Precision::Fp64).unwrap();
        let r = minres_residual_norms(&f, 0.0);
        // k = 1: min_c ||b - c A b|| with A b = (1, 2)/sqrt2.
        let ab = [1.0 / 2f64.sqrt(), 2.0 / 2f64.sqrt()];
        let c = (b[0] * ab[0] + b[1] * ab[1]) / (ab[0] * ab[0] + ab[1] * ab[1]);
        let brute = ((b[0] - c * ab[0]).powi(2) + (b[1] - c * ab[1]).powi(2)).sqrt();
        assert!((r[1] - brute).abs() < 1e-14);
        assert!(r[2] < 1e-14);
    }

    #[test]
    fn galerkin_guards() {
        let p = galerkin_from_minres(&[1.0, 1.0, 1e-9]);
        assert_eq!(p[1], None);
        assert!((p[2].unwrap() - 1e-9).abs() < 1e-20);
    }

    #[test]
    fn identity_on_indefinite_problem() {
        let eigs: Vec<f64> = (0..60).map(|i| if i % 2 == 0 { -1.0 - i as f64 / 60.0 } else { 0.5 + i as f64 / 30.0 }).collect();
        let a = SymmetricOperator::diagonal(eigs).unwrap();
        let b: Vec<f64> = (0..60).map(|i| ((i * 7 % 11) as f64 - 5.0) / 10.0 + 0.05).collect();
        let f = lanczos(&a, &b, 25, true, Precision::Fp64).unwrap();
        let h = ResidualHistory::new(&f, 0.0).unwrap();
        let pred = h.galerkin_prediction();
        for k in 1..=25 {
            assert!(h.minres[k] <= h.minres[k - 1] * (1.0 + 1e-14));
            if let (Some(l), Some(p)) = (h.lanczos[k], pred[k]) {
                let rel = l / h.lanczos[0].unwrap();
                assert!((rel - p).abs() <= 1e-6 * rel, "k={k}: {rel} vs {p}");
                assert!(h.minres[k] <= l * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn inverse_sqrt_gap_example() {
        let (l, r) = inverse_sqrt_gap(0.75, 1.0).unwrap();
        assert!(l <= r);
        assert!(inverse_sqrt_gap(0.8, 1.0).is_err());
    }
}
