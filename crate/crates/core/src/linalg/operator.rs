//! Real symmetric operators with a lazily computed spectral decomposition.

use std::sync::{Arc, OnceLock};

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::linalg::dense::dense_sym_eigh;

/// Largest dimension for which a sparse operator is densified to obtain
/// its spectrum.
pub const MAX_DENSE_SPECTRUM: usize = 5000;

/// Relative tolerance for accepting a dense matrix as symmetric.
pub const SYMMETRY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum OperatorKind {
    /// Row-major `n x n`.
    Dense { n: usize, data: Vec<f64> },
    /// Eigenvalues in ascending order; the eigenbasis is the identity.
    Diagonal { eigenvalues: Vec<f64> },
    /// Symmetric pattern stored in full compressed-row form.
    Sparse { n: usize, row_ptr: Vec<usize>, cols: Vec<usize>, vals: Vec<f64> },
}

/// Spectral decomposition used by the reference computations.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    /// Row-major eigenvector matrix; `None` means the identity.
    pub eigenvectors: Option<Vec<f64>>,
    pub n: usize,
}

impl Spectrum {
    pub fn min(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues[self.n - 1]
    }

    /// Coefficients of `v` in the eigenbasis.
    pub fn to_eigenbasis(&self, v: &[f64]) -> Vec<f64> {
        match &self.eigenvectors {
            None => v.to_vec(),
            Some(q) => {
                let n = self.n;
                let mut c = vec![0.0; n];
                for (i, &vi) in v.iter().enumerate() {
                    let row = &q[i * n..(i + 1) * n];
                    for j in 0..n {
                        c[j] += row[j] * vi;
                    }
                }
                c
            }
        }
    }

    pub fn from_eigenbasis(&self, c: &[f64]) -> Vec<f64> {
        match &self.eigenvectors {
            None => c.to_vec(),
            Some(q) => {
                let n = self.n;
                (0..n).map(|i| dot(&q[i * n..(i + 1) * n], c)).collect()
            }
        }
    }

    pub fn from_eigenbasis_complex(&self, c: &[Complex64]) -> Vec<Complex64> {
        match &self.eigenvectors {
            None => c.to_vec(),
            Some(q) => {
                let n = self.n;
                (0..n)
                    .map(|i| {
                        let row = &q[i * n..(i + 1) * n];
                        row.iter().zip(c).fold(Complex64::new(0.0, 0.0), |s, (&a, &b)| s + b * a)
                    })
                    .collect()
            }
        }
    }
}

/// Real symmetric linear operator.
#[derive(Debug, Clone)]
pub struct SymmetricOperator {
    kind: OperatorKind,
    spectrum: OnceLock<Arc<Spectrum>>,
    norm_est: OnceLock<f64>,
}

impl SymmetricOperator {
    /// Dense operator from row-major storage. Entries must be symmetric to
    /// within [`SYMMETRY_TOL`] relative to the largest entry; the stored
    /// matrix is the exact symmetric part.
    pub fn dense(n: usize, data: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return invalid("operator dimension must be positive");
        }
        if data.len() != n * n {
            return invalid(format!("dense storage has {} entries, expected {}", data.len(), n * n));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return invalid("matrix entries must be finite");
        }
        let scale = data.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
        let mut data = data;
        for i in 0..n {
            for j in 0..i {
                let (a, b) = (data[i * n + j], data[j * n + i]);
                if (a - b).abs() > SYMMETRY_TOL * scale {
                    return invalid(format!("matrix is not symmetric at ({}, {})", i + 1, j + 1));
                }
                let m = 0.5 * (a + b);
                data[i * n + j] = m;
                data[j * n + i] = m;
            }
        }
        Ok(Self::from_kind(OperatorKind::Dense { n, data }))
    }

    /// Diagonal operator; the eigenvalues are stored sorted ascending.
    pub fn diagonal(mut eigenvalues: Vec<f64>) -> Result<Self> {
        if eigenvalues.is_empty() {
            return invalid("operator dimension must be positive");
        }
        if eigenvalues.iter().any(|v| !v.is_finite()) {
            return invalid("eigenvalues must be finite");
        }
        eigenvalues.sort_by(f64::total_cmp);
        Ok(Self::from_kind(OperatorKind::Diagonal { eigenvalues }))
    }

    /// Sparse operator from zero-based coordinate triplets. Each triplet
    /// `(i, j, v)` with `i != j` also sets `(j, i)`; duplicates are summed.
    pub fn sparse(n: usize, triplets: &[(usize, usize, f64)]) -> Result<Self> {
        if n == 0 {
            return invalid("operator dimension must be positive");
        }
        let mut full: Vec<(usize, usize, f64)> = Vec::with_capacity(2 * triplets.len());
        for &(i, j, v) in triplets {
            if i >= n || j >= n {
                return invalid(format!("entry ({}, {}) out of range for dimension {n}", i + 1, j + 1));
            }
            if !v.is_finite() {
                return invalid("matrix entries must be finite");
            }
            full.push((i, j, v));
            if i != j {
                full.push((j, i, v));
            }
        }
        full.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut row_ptr = vec![0usize; n + 1];
        let mut cols = Vec::with_capacity(full.len());
        let mut vals: Vec<f64> = Vec::with_capacity(full.len());
        let mut last: Option<(usize, usize)> = None;
        for (i, j, v) in full {
            if last == Some((i, j)) {
                *vals.last_mut().unwrap() += v;
                continue;
            }
            last = Some((i, j));
            cols.push(j);
            vals.push(v);
            row_ptr[i + 1] += 1;
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        Ok(Self::from_kind(OperatorKind::Sparse { n, row_ptr, cols, vals }))
    }

    fn from_kind(kind: OperatorKind) -> Self {
        Self { kind, spectrum: OnceLock::new(), norm_est: OnceLock::new() }
    }

    pub fn kind(&self) -> &OperatorKind {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        match &self.kind {
            OperatorKind::Dense { n, .. } | OperatorKind::Sparse { n, .. } => *n,
            OperatorKind::Diagonal { eigenvalues } => eigenvalues.len(),
        }
    }

    pub fn is_diagonal(&self) -> bool {
        matches!(self.kind, OperatorKind::Diagonal { .. })
    }

    /// `y = A x`.
    pub fn apply_into(&self, x: &[f64], y: &mut [f64]) {
        match &self.kind {
            OperatorKind::Dense { n, data } => {
                for i in 0..*n {
                    y[i] = dot(&data[i * n..(i + 1) * n], x);
                }
            }
            OperatorKind::Diagonal { eigenvalues } => {
                for ((yi, &l), &xi) in y.iter_mut().zip(eigenvalues).zip(x) {
                    *yi = l * xi;
                }
            }
            OperatorKind::Sparse { n, row_ptr, cols, vals } => {
                for i in 0..*n {
                    let mut s = 0.0;
                    for p in row_ptr[i]..row_ptr[i + 1] {
                        s += vals[p] * x[cols[p]];
                    }
                    y[i] = s;
                }
            }
        }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.dim()];
        self.apply_into(x, &mut y);
        y
    }

    /// Row-major dense copy.
    pub fn to_dense(&self) -> Vec<f64> {
        let n = self.dim();
        match &self.kind {
            OperatorKind::Dense { data, .. } => data.clone(),
            OperatorKind::Diagonal { eigenvalues } => {
                let mut m = vec![0.0; n * n];
                for (i, &l) in eigenvalues.iter().enumerate() {
                    m[i * n + i] = l;
                }
                m
            }
            OperatorKind::Sparse { row_ptr, cols, vals, .. } => {
                let mut m = vec![0.0; n * n];
                for i in 0..n {
                    for p in row_ptr[i]..row_ptr[i + 1] {
                        m[i * n + cols[p]] += vals[p];
                    }
                }
                m
            }
        }
    }

    /// Spectral decomposition, computed once and cached.
    pub fn spectrum(&self) -> Result<Arc<Spectrum>> {
        if let Some(s) = self.spectrum.get() {
            return Ok(s.clone());
        }
        let n = self.dim();
        let s = match &self.kind {
            OperatorKind::Diagonal { eigenvalues } => {
                Spectrum { eigenvalues: eigenvalues.clone(), eigenvectors: None, n }
            }
            OperatorKind::Dense { data, .. } => {
                let r = dense_sym_eigh(data, n)?;
                Spectrum { eigenvalues: r.eigenvalues, eigenvectors: Some(r.eigenvectors), n }
            }
            OperatorKind::Sparse { .. } => {
                if n > MAX_DENSE_SPECTRUM {
                    return Err(Error::Unsupported(format!(
                        "reference spectrum requires dimension <= {MAX_DENSE_SPECTRUM}, got {n}"
                    )));
                }
                let r = dense_sym_eigh(&self.to_dense(), n)?;
                Spectrum { eigenvalues: r.eigenvalues, eigenvectors: Some(r.eigenvectors), n }
            }
        };
        Ok(self.spectrum.get_or_init(|| Arc::new(s)).clone())
    }

    /// Estimate of `||A||_2`: exact for diagonal operators, otherwise the
    /// largest absolute Ritz value of a short Lanczos probe.
    pub fn norm_estimate(&self) -> f64 {
        *self.norm_est.get_or_init(|| match &self.kind {
            OperatorKind::Diagonal { eigenvalues } => {
                eigenvalues[0].abs().max(eigenvalues[eigenvalues.len() - 1].abs())
            }
            _ => probe_norm(self),
        })
    }

    /// `g(A) v` through the spectral decomposition.
    pub fn apply_spectral(&self, v: &[f64], g: impl Fn(f64) -> f64) -> Result<Vec<f64>> {
        let s = self.spectrum()?;
        let mut c = s.to_eigenbasis(v);
        for (ci, &l) in c.iter_mut().zip(&s.eigenvalues) {
            *ci *= g(l);
        }
        Ok(s.from_eigenbasis(&c))
    }

    /// `(A - zI)^{-1} v` through the spectral decomposition.
    pub fn solve_shifted(&self, z: Complex64, v: &[f64]) -> Result<Vec<Complex64>> {
        let s = self.spectrum()?;
        let c = s.to_eigenbasis(v);
        let mut out = Vec::with_capacity(c.len());
        for (&ci, &l) in c.iter().zip(&s.eigenvalues) {
            let d = Complex64::new(l, 0.0) - z;
            if d.norm() == 0.0 {
                return Err(Error::SingularShift { ritz: l, z });
            }
            out.push(Complex64::new(ci, 0.0) / d);
        }
        Ok(s.from_eigenbasis_complex(&out))
    }
}

fn probe_norm(a: &SymmetricOperator) -> f64 {
    let n = a.dim();
    let steps = n.min(10);
    // Deterministic start vector with no special structure.
    let mut q: Vec<f64> = (0..n).map(|i| 1.0 + ((i as f64 + 1.0) * 0.618_033_988_749_895).fract()).collect();
    let nrm = norm2(&q);
    q.iter_mut().for_each(|v| *v /= nrm);
    let mut q_prev = vec![0.0; n];
    let mut alphas = Vec::new();
    let mut betas = Vec::new();
    let mut beta_prev = 0.0;
    let mut v = vec![0.0; n];
    for j in 0..steps {
        a.apply_into(&q, &mut v);
        for i in 0..n {
            v[i] -= beta_prev * q_prev[i];
        }
        let alpha = dot(&v, &q);
        for i in 0..n {
            v[i] -= alpha * q[i];
        }
        alphas.push(alpha);
        let beta = norm2(&v);
        if j + 1 == steps || beta == 0.0 {
            break;
        }
        betas.push(beta);
        q_prev.copy_from_slice(&q);
        for i in 0..n {
            q[i] = v[i] / beta;
        }
        beta_prev = beta;
    }
    betas.truncate(alphas.len() - 1);
    let t = crate::linalg::tridiag::Tridiagonal::new(alphas, betas);
    match t.and_then(|t| t.eigvals()) {
        Ok(ev) => ev.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE),
        Err(_) => f64::MIN_POSITIVE,
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    let scale = a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if scale == 0.0 || !scale.is_finite() {
        return scale;
    }
    scale * a.iter().map(|v| (v / scale) * (v / scale)).sum::<f64>().sqrt()
}

pub fn norm2_complex(a: &[Complex64]) -> f64 {
    let scale = a.iter().fold(0.0f64, |m, v| m.max(v.re.abs()).max(v.im.abs()));
    if scale == 0.0 || !scale.is_finite() {
        return scale;
    }
    scale * a.iter().map(|v| (v / scale).norm_sqr()).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sparse_matches_dense() {
        let trip = [(0, 0, 2.0), (1, 0, -1.0), (1, 1, 2.0), (2, 1, -1.0), (2, 2, 2.0), (2, 2, 0.5)];
        let s = SymmetricOperator::sparse(3, &trip).unwrap();
        let d = SymmetricOperator::dense(3, s.to_dense()).unwrap();
        let x = [1.0, -2.0, 3.0];
        assert_eq!(s.apply(&x), d.apply(&x));
        assert_eq!(s.apply(&x), vec![4.0, -8.0, 9.5]);
    }

    #[test]
    fn dense_rejects_asymmetric() {
        assert!(SymmetricOperator::dense(2, vec![1.0, 2.0, 2.1, 1.0]).is_err());
        assert!(SymmetricOperator::dense(2, vec![1.0, 2.0, 2.0 + 1e-15, 1.0]).is_ok());
    }

    #[test]
    fn diagonal_sorted_and_norm_exact() {
        let a = SymmetricOperator::diagonal(vec![3.0, -5.0, 1.0]).unwrap();
        let s = a.spectrum().unwrap();
        assert_eq!(s.eigenvalues, vec![-5.0, 1.0, 3.0]);
        assert_eq!(a.norm_estimate(), 5.0);
    }

    #[test]
    fn spectral_solve_inverts() {
        let a = SymmetricOperator::dense(3, vec![4.0, 1.0, 0.0, 1.0, 3.0, 1.0, 0.0, 1.0, 2.0]).unwrap();
        let z = Complex64::new(1.0, 0.5);
        let v = [1.0, 2.0, -1.0];
        let x = a.solve_shifted(z, &v).unwrap();
        let xr: Vec<f64> = x.iter().map(|c| c.re).collect();
        let xi: Vec<f64> = x.iter().map(|c| c.im).collect();
        let ar = a.apply(&xr);
        let ai = a.apply(&xi);
        for i in 0..3 {
            let r = Complex64::new(ar[i], ai[i]) - z * x[i];
            assert!((r - v[i]).norm() < 1e-13);
        }
    }

    #[test]
    fn probe_norm_is_close_for_dense() {
        let a = SymmetricOperator::dense(3, vec![4.0, 1.0, 0.0, 1.0, 3.0, 1.0, 0.0, 1.0, 2.0]).unwrap();
        let exact = a.spectrum().unwrap().max();
        assert!((a.norm_estimate() - exact).abs() < 1e-10);
    }
}
