//! Dense symmetric eigendecomposition: Householder reduction to tridiagonal
//! form followed by implicit QL with accumulated rotations.

use crate::error::{invalid, Result};
use crate::linalg::tridiag::{implicit_ql, sort_eigenpairs};

/// Ascending eigenvalues and orthonormal eigenvectors of a symmetric matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct EighResult {
    pub eigenvalues: Vec<f64>,
    /// Row-major `n x n`; column `j` is the eigenvector of `eigenvalues[j]`.
    pub eigenvectors: Vec<f64>,
    pub n: usize,
}

impl EighResult {
    pub fn vector(&self, j: usize) -> Vec<f64> {
        (0..self.n).map(|i| self.eigenvectors[i * self.n + j]).collect()
    }
}

/// Eigendecomposition of the symmetric row-major matrix `a` (`n x n`).
/// Only the lower triangle is read.
pub fn dense_sym_eigh(a: &[f64], n: usize) -> Result<EighResult> {
    if a.len() != n * n {
        return invalid(format!("matrix storage has {} entries, expected {}", a.len(), n * n));
    }
    if n == 0 {
        return invalid("matrix must be non-empty");
    }
    if a.iter().any(|v| !v.is_finite()) {
        return invalid("matrix entries must be finite");
    }
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            v[i * n + j] = a[i * n + j];
            v[j * n + i] = a[i * n + j];
        }
    }
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tred2(&mut v, &mut d, &mut e, n);
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;
    implicit_ql(&mut d, &mut e, Some((&mut v, n)))?;
    let (eigenvalues, eigenvectors) = sort_eigenpairs(&d, &v, n, n);
    Ok(EighResult { eigenvalues, eigenvectors, n })
}

/// Householder tridiagonalization. On exit `v` holds the orthogonal
/// transformation, `d` the diagonal and `e[1..]` the sub-diagonal.
fn tred2(v: &mut [f64], d: &mut [f64], e: &mut [f64], n: usize) {
    let idx = |i: usize, j: usize| i * n + j;
    for j in 0..n {
        d[j] = v[idx(n - 1, j)];
    }
    for i in (1..n).rev() {
        let mut scale = 0.0;
        let mut h = 0.0;
        for dk in d.iter().take(i) {
            scale += dk.abs();
        }
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[idx(i - 1, j)];
                v[idx(i, j)] = 0.0;
                v[idx(j, i)] = 0.0;
            }
        } else {
            for dk in d.iter_mut().take(i) {
                *dk /= scale;
                h += *dk * *dk;
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for ej in e.iter_mut().take(i) {
                *ej = 0.0;
            }
            for j in 0..i {
                f = d[j];
                v[idx(j, i)] = f;
                g = e[j] + v[idx(j, j)] * f;
                for k in (j + 1)..i {
                    g += v[idx(k, j)] * d[k];
                    e[k] += v[idx(k, j)] * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    v[idx(k, j)] -= f * e[k] + g * d[k];
                }
                d[j] = v[idx(i - 1, j)];
                v[idx(i, j)] = 0.0;
            }
        }
        d[i] = h;
    }
    for i in 0..n - 1 {
        v[idx(n - 1, i)] = v[idx(i, i)];
        v[idx(i, i)] = 1.0;
        let h = d[i + 1];
        if h != 0.0 {
            for k in 0..=i {
                d[k] = v[idx(k, i + 1)] / h;
            }
            for j in 0..=i {
                let mut g = 0.0;
                for k in 0..=i {
                    g += v[idx(k, i + 1)] * v[idx(k, j)];
                }
                for k in 0..=i {
                    v[idx(k, j)] -= g * d[k];
                }
            }
        }
        for k in 0..=i {
            v[idx(k, i + 1)] = 0.0;
        }
    }
    for j in 0..n {
        d[j] = v[idx(n - 1, j)];
        v[idx(n - 1, j)] = 0.0;
    }
    v[idx(n - 1, n - 1)] = 1.0;
    e[0] = 0.0;
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_sym(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let x: f64 = rng.random_range(-1.0..1.0);
                a[i * n + j] = x;
                a[j * n + i] = x;
            }
        }
        a
    }

    fn check(a: &[f64], n: usize) {
        let r = dense_sym_eigh(a, n).unwrap();
        let norm_a = a.iter().map(|x| x * x).sum::<f64>().sqrt();
        let q = &r.eigenvectors;
        let mut recon_err = 0.0;
        let mut orth_err = 0.0;
        for i in 0..n {
            for j in 0..n {
                let mut s = 0.0;
                let mut o = 0.0;
                for m in 0..n {
                    s += q[i * n + m] * r.eigenvalues[m] * q[j * n + m];
                    o += q[m * n + i] * q[m * n + j];
                }
                recon_err += (s - a[i * n + j]).powi(2);
                orth_err += (o - if i == j { 1.0 } else { 0.0 }).powi(2);
            }
        }
        assert!(recon_err.sqrt() <= 1e-10 * norm_a, "recon {}", recon_err.sqrt());
        assert!(orth_err.sqrt() <= 1e-10, "orth {}", orth_err.sqrt());
        assert!(r.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn random_matrices_reconstruct() {
        for (n, seed) in [(1, 1), (2, 2), (3, 3), (10, 4), (57, 5), (150, 6)] {
            check(&random_sym(n, seed), n);
        }
    }

    #[test]
    fn diagonal_and_repeated_eigenvalues() {
        let n = 6;
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            a[i * n + i] = if i % 2 == 0 { 2.0 } else { -1.0 };
        }
        check(&a, n);
        let r = dense_sym_eigh(&a, n).unwrap();
        assert_eq!(r.eigenvalues, vec![-1.0, -1.0, -1.0, 2.0, 2.0, 2.0]);
    }
}
