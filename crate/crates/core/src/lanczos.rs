//! The Lanczos process and its factorization
//! `A Q_k = Q_k T_k + beta_k q_{k+1} e_k^T (+ F_k)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::linalg::operator::{dot, norm2};
use crate::linalg::{SymmetricOperator, Tridiagonal};

/// A step terminates when `beta <= BREAKDOWN_REL * ||A||_est`.
pub const BREAKDOWN_REL: f64 = 1e-13;

/// Arithmetic used for the recurrence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Precision {
    Fp64,
    /// Vectors and coefficients are rounded to single precision after each
    /// arithmetic group; products with `A` accumulate in double precision.
    Fp32,
}

impl Precision {
    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "fp64" | "f64" | "double" => Ok(Self::Fp64),
            "fp32" | "f32" | "single" => Ok(Self::Fp32),
            other => invalid(format!("unknown precision `{other}` (expected fp64 or fp32)")),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Self::Fp64 => "fp64",
            Self::Fp32 => "fp32",
        }
    }

    #[inline]
    fn round(self, x: f64) -> f64 {
        match self {
            Self::Fp64 => x,
            Self::Fp32 => x as f32 as f64,
        }
    }

    fn round_vec(self, v: &mut [f64]) {
        if self == Self::Fp32 {
            v.iter_mut().for_each(|x| *x = *x as f32 as f64);
        }
    }
}

/// Output of [`lanczos`].
#[derive(Debug, Clone, PartialEq)]
pub struct LanczosFactorization {
    basis: Vec<Vec<f64>>,
    tridiag: Tridiagonal,
    beta_last: f64,
    b_norm: f64,
    reorthogonalized: bool,
    precision: Precision,
    terminated_early: bool,
}

impl LanczosFactorization {
    /// Number of completed steps `k`.
    pub fn steps(&self) -> usize {
        self.tridiag.dim()
    }

    pub fn dim(&self) -> usize {
        self.basis[0].len()
    }

    /// Column `j` (zero-based, `j <= k`) of `[Q_k, q_{k+1}]`. After early
    /// termination `q_{k+1}` is the zero vector.
    pub fn basis_vector(&self, j: usize) -> &[f64] {
        &self.basis[j]
    }

    pub fn next_vector(&self) -> &[f64] {
        &self.basis[self.steps()]
    }

    pub fn tridiagonal(&self) -> &Tridiagonal {
        &self.tridiag
    }

    pub fn beta_last(&self) -> f64 {
        self.beta_last
    }

    pub fn b_norm(&self) -> f64 {
        self.b_norm
    }

    pub fn reorthogonalized(&self) -> bool {
        self.reorthogonalized
    }

    pub fn precision(&self) -> Precision {
        self.precision
    }

    pub fn terminated_early(&self) -> bool {
        self.terminated_early
    }

    /// `||b|| q_1`, the start vector actually used by the recurrence.
    pub fn start_vector(&self) -> Vec<f64> {
        self.basis[0].iter().map(|v| v * self.b_norm).collect()
    }

    /// Factorization after the first `k` steps.
    pub fn prefix(&self, k: usize) -> Result<Self> {
        if k == 0 || k > self.steps() {
            return invalid(format!("prefix length {k} out of range 1..={}", self.steps()));
        }
        if k == self.steps() {
            return Ok(self.clone());
        }
        Ok(Self {
            basis: self.basis[..=k].to_vec(),
            tridiag: self.tridiag.leading(k)?,
            beta_last: self.tridiag.betas()[k - 1],
            b_norm: self.b_norm,
            reorthogonalized: self.reorthogonalized,
            precision: self.precision,
            terminated_early: false,
        })
    }

    /// `Q_k c`.
    pub fn combine(&self, c: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        for (q, &cj) in self.basis.iter().zip(c) {
            for (o, &qi) in out.iter_mut().zip(q) {
                *o += cj * qi;
            }
        }
        out
    }

    /// `Q_k c` for complex `c`.
    pub fn combine_complex(&self, c: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.dim()];
        for (q, &cj) in self.basis.iter().zip(c) {
            for (o, &qi) in out.iter_mut().zip(q) {
                *o += cj * qi;
            }
        }
        out
    }

    /// `Q_k^T v`.
    pub fn project(&self, v: &[f64]) -> Vec<f64> {
        self.basis[..self.steps()].iter().map(|q| dot(q, v)).collect()
    }

    pub fn ritz_values(&self) -> Result<Vec<f64>> {
        self.tridiag.eigvals()
    }

    /// `||Q^T Q - I||_F` over `Q_k` and, unless the process terminated,
    /// `q_{k+1}`.
    pub fn orthogonality_loss(&self) -> f64 {
        let m = if self.terminated_early { self.steps() } else { self.steps() + 1 };
        let mut s = 0.0;
        for i in 0..m {
            for j in 0..m {
                let d = dot(&self.basis[i], &self.basis[j]) - if i == j { 1.0 } else { 0.0 };
                s += d * d;
            }
        }
        s.sqrt()
    }
}

/// Runs `k` steps of the Lanczos process on `A` from `b`.
///
/// With `reorth`, each new vector is orthogonalized against all previous
/// basis vectors by classical Gram-Schmidt applied twice. The process
/// stops early when an off-diagonal coefficient drops below
/// [`BREAKDOWN_REL`] times the norm estimate; the factorization then has
/// fewer than `k` steps, `beta_last = 0` and a zero `q_{k+1}`.
pub fn lanczos(
    a: &SymmetricOperator,
    b: &[f64],
    k: usize,
    reorth: bool,
    precision: Precision,
) -> Result<LanczosFactorization> {
    let n = a.dim();
    if b.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: b.len() });
    }
    if k == 0 {
        return invalid("number of steps must be positive");
    }
    if k > n {
        return invalid(format!("number of steps {k} exceeds dimension {n}"));
    }
    if b.iter().any(|v| !v.is_finite()) {
        return invalid("start vector must be finite");
    }
    let b_norm = precision.round(norm2(b));
    if b_norm == 0.0 {
        return invalid("start vector must be nonzero");
    }
    let tol = BREAKDOWN_REL * a.norm_estimate();
    let p = precision;

    let mut q: Vec<f64> = b.iter().map(|v| v / b_norm).collect();
    p.round_vec(&mut q);
    let mut basis = vec![q];
    let mut alphas = Vec::with_capacity(k);
    let mut betas: Vec<f64> = Vec::with_capacity(k);
    let mut v = vec![0.0; n];
    let mut terminated = false;
    let mut beta_last = 0.0;

    for j in 0..k {
        let qj = &basis[j];
        a.apply_into(qj, &mut v);
        p.round_vec(&mut v);
        if j > 0 {
            let bprev = betas[j - 1];
            let qprev = &basis[j - 1];
            for (vi, &qi) in v.iter_mut().zip(qprev) {
                *vi -= bprev * qi;
            }
            p.round_vec(&mut v);
        }
        let alpha = p.round(dot(&v, qj));
        for (vi, &qi) in v.iter_mut().zip(qj) {
            *vi -= alpha * qi;
        }
        p.round_vec(&mut v);
        if reorth {
            for _ in 0..2 {
                let coeffs: Vec<f64> = basis.iter().map(|q| dot(q, &v)).collect();
                for (q, &c) in basis.iter().zip(&coeffs) {
                    for (vi, &qi) in v.iter_mut().zip(q) {
                        *vi -= c * qi;
                    }
                }
                p.round_vec(&mut v);
            }
        }
        alphas.push(alpha);
        let beta = p.round(norm2(&v));
        if beta <= tol {
            terminated = true;
            basis.push(vec![0.0; n]);
            break;
        }
        let mut qn: Vec<f64> = v.iter().map(|x| x / beta).collect();
        p.round_vec(&mut qn);
        basis.push(qn);
        if j + 1 < k {
            betas.push(beta);
        } else {
            beta_last = beta;
        }
    }
    let tridiag = Tridiagonal::new(alphas, betas)?;
    Ok(LanczosFactorization {
        basis,
        tridiag,
        beta_last,
        b_norm,
        reorthogonalized: reorth,
        precision,
        terminated_early: terminated,
    })
}

/// Columns of `F_k = A Q_k - Q_k T_k - beta_k q_{k+1} e_k^T`, evaluated in
/// double precision, with the Frobenius norm.
#[derive(Debug, Clone, PartialEq)]
pub struct RecurrenceResidual {
    pub columns: Vec<Vec<f64>>,
    pub frobenius: f64,
}

impl RecurrenceResidual {
    /// Frobenius norm of the first `k` columns.
    pub fn frobenius_prefix(&self, k: usize) -> f64 {
        self.columns[..k].iter().map(|c| dot(c, c)).sum::<f64>().sqrt()
    }

    /// Gram matrix `F_k^T F_k` of the first `k` columns, row-major.
    pub fn gram(&self, k: usize) -> Vec<f64> {
        let mut g = vec![0.0; k * k];
        for i in 0..k {
            for j in 0..=i {
                let v = dot(&self.columns[i], &self.columns[j]);
                g[i * k + j] = v;
                g[j * k + i] = v;
            }
        }
        g
    }
}

pub fn recurrence_residual(a: &SymmetricOperator, fact: &LanczosFactorization) -> Result<RecurrenceResidual> {
    if a.dim() != fact.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), got: fact.dim() });
    }
    let k = fact.steps();
    let alphas = fact.tridiag.alphas();
    let betas = fact.tridiag.betas();
    let mut columns = Vec::with_capacity(k);
    let mut total = 0.0;
    for j in 0..k {
        let mut col = a.apply(&fact.basis[j]);
        for (c, &q) in col.iter_mut().zip(&fact.basis[j]) {
            *c -= alphas[j] * q;
        }
        if j > 0 {
            for (c, &q) in col.iter_mut().zip(&fact.basis[j - 1]) {
                *c -= betas[j - 1] * q;
            }
        }
        let beta_next = if j + 1 < k { betas[j] } else { fact.beta_last };
        for (c, &q) in col.iter_mut().zip(&fact.basis[j + 1]) {
            *c -= beta_next * q;
        }
        total += dot(&col, &col);
        columns.push(col);
    }
    Ok(RecurrenceResidual { columns, frobenius: total.sqrt() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uniform(n: usize) -> SymmetricOperator {
        SymmetricOperator::diagonal((0..n).map(|i| 1.0 + i as f64).collect()).unwrap()
    }

    #[test]
    fn identity_terminates_after_one_step() {
        let a = SymmetricOperator::diagonal(vec![1.0; 5]).unwrap();
        let f = lanczos(&a, &[1.0, 2.0, 0.0, -1.0, 3.0], 3, false, Precision::Fp64).unwrap();
        assert_eq!(f.steps(), 1);
        assert!(f.terminated_early());
        assert!((f.tridiagonal().alphas()[0] - 1.0).abs() < 1e-15);
        assert_eq!(f.beta_last(), 0.0);
    }

    #[test]
    fn one_step_gives_rayleigh_quotient() {
        let a = uniform(6);
        let b = [1.0, -1.0, 2.0, 0.5, 0.0, 1.0];
        let f = lanczos(&a, &b, 1, false, Precision::Fp64).unwrap();
        let rq = dot(&b, &a.apply(&b)) / dot(&b, &b);
        assert!((f.tridiagonal().alphas()[0] - rq).abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_input() {
        let a = uniform(3);
        assert!(lanczos(&a, &[0.0; 3], 1, false, Precision::Fp64).is_err());
        assert!(lanczos(&a, &[1.0; 3], 4, false, Precision::Fp64).is_err());
        assert!(lanczos(&a, &[1.0; 2], 1, false, Precision::Fp64).is_err());
    }

    #[test]
    fn reorthogonalized_basis_is_orthonormal() {
        let a = uniform(100);
        let b = vec![1.0; 100];
        let f = lanczos(&a, &b, 30, true, Precision::Fp64).unwrap();
        assert_eq!(f.steps(), 30);
        assert!(f.orthogonality_loss() <= 1e-10, "{}", f.orthogonality_loss());
        let r = recurrence_residual(&a, &f).unwrap();
        assert!(r.frobenius <= 1e-12 * a.norm_estimate() * 30.0, "{}", r.frobenius);
    }

    #[test]
    fn prefix_matches_shorter_run() {
        let a = uniform(40);
        let b: Vec<f64> = (0..40).map(|i| ((i * 7) % 5) as f64 - 1.5).collect();
        let long = lanczos(&a, &b, 20, false, Precision::Fp64).unwrap();
        let short = lanczos(&a, &b, 12, false, Precision::Fp64).unwrap();
        assert_eq!(long.prefix(12).unwrap(), short);
    }

    #[test]
    fn fp32_values_are_single_precision() {
        let a = uniform(20);
        let b = vec![1.0; 20];
        let f = lanczos(&a, &b, 10, false, Precision::Fp32).unwrap();
        for &x in f.tridiagonal().alphas().iter().chain(f.basis_vector(3)) {
            assert_eq!(x, x as f32 as f64);
        }
    }
}
