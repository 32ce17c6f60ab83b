//! Real symmetric tridiagonal matrices: eigenvalues by implicit QL, shifted
//! complex solves and ratios of shifted determinants.

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};

/// Symmetric tridiagonal matrix stored by its diagonal and off-diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct Tridiagonal {
    alphas: Vec<f64>,
    betas: Vec<f64>,
}

impl Tridiagonal {
    pub fn new(alphas: Vec<f64>, betas: Vec<f64>) -> Result<Self> {
        if alphas.is_empty() {
            return invalid("tridiagonal matrix must have at least one row");
        }
        if betas.len() + 1 != alphas.len() {
            return invalid(format!(
                "off-diagonal length {} does not match diagonal length {}",
                betas.len(),
                alphas.len()
            ));
        }
        if alphas.iter().chain(betas.iter()).any(|v| !v.is_finite()) {
            return invalid("tridiagonal entries must be finite");
        }
        Ok(Self { alphas, betas })
    }

    pub fn dim(&self) -> usize {
        self.alphas.len()
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    pub fn betas(&self) -> &[f64] {
        &self.betas
    }

    /// Leading principal `k x k` block.
    pub fn leading(&self, k: usize) -> Result<Self> {
        if k == 0 || k > self.dim() {
            return invalid(format!("leading block size {k} out of range 1..={}", self.dim()));
        }
        Ok(Self {
            alphas: self.alphas[..k].to_vec(),
            betas: self.betas[..k - 1].to_vec(),
        })
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let k = self.dim();
        let mut y = vec![0.0; k];
        for i in 0..k {
            let mut s = self.alphas[i] * x[i];
            if i > 0 {
                s += self.betas[i - 1] * x[i - 1];
            }
            if i + 1 < k {
                s += self.betas[i] * x[i + 1];
            }
            y[i] = s;
        }
        y
    }

    /// Dense row-major copy.
    pub fn to_dense(&self) -> Vec<f64> {
        let k = self.dim();
        let mut m = vec![0.0; k * k];
        for i in 0..k {
            m[i * k + i] = self.alphas[i];
            if i + 1 < k {
                m[i * k + i + 1] = self.betas[i];
                m[(i + 1) * k + i] = self.betas[i];
            }
        }
        m
    }

    /// Eigenvalues in ascending order.
    pub fn eigvals(&self) -> Result<Vec<f64>> {
        let mut d = self.alphas.clone();
        let mut e = self.betas.clone();
        e.push(0.0);
        implicit_ql(&mut d, &mut e, None)?;
        let mut idx: Vec<usize> = (0..d.len()).collect();
        idx.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
        Ok(idx.into_iter().map(|i| d[i]).collect())
    }

    /// Eigenvalues (ascending) with the first component of each normalized
    /// eigenvector. Costs O(k^2).
    pub fn eig_first_components(&self) -> Result<(Vec<f64>, Vec<f64>)> {
        let k = self.dim();
        let mut d = self.alphas.clone();
        let mut e = self.betas.clone();
        e.push(0.0);
        let mut row = vec![0.0; k];
        row[0] = 1.0;
        implicit_ql(&mut d, &mut e, Some((&mut row, 1)))?;
        let mut idx: Vec<usize> = (0..k).collect();
        idx.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
        Ok((idx.iter().map(|&i| d[i]).collect(), idx.iter().map(|&i| row[i]).collect()))
    }

    /// Full eigendecomposition: ascending eigenvalues and the row-major
    /// `k x k` matrix whose columns are the eigenvectors.
    pub fn eigh(&self) -> Result<(Vec<f64>, Vec<f64>)> {
        let k = self.dim();
        let mut d = self.alphas.clone();
        let mut e = self.betas.clone();
        e.push(0.0);
        let mut z = vec![0.0; k * k];
        for i in 0..k {
            z[i * k + i] = 1.0;
        }
        implicit_ql(&mut d, &mut e, Some((&mut z, k)))?;
        Ok(sort_eigenpairs(&d, &z, k, k))
    }

    /// Solves `(T - zI) x = rhs` by Gaussian elimination with partial pivoting.
    pub fn solve_shifted(&self, z: Complex64, rhs: &[Complex64]) -> Result<Vec<Complex64>> {
        let k = self.dim();
        if rhs.len() != k {
            return Err(Error::DimensionMismatch { expected: k, got: rhs.len() });
        }
        let tol = 1e-300;
        // Row i of the eliminated system holds entries at columns i, i+1, i+2.
        let mut dl: Vec<Complex64> = self.betas.iter().map(|&b| Complex64::new(b, 0.0)).collect();
        let mut d: Vec<Complex64> = self.alphas.iter().map(|&a| Complex64::new(a, 0.0) - z).collect();
        let mut du: Vec<Complex64> = dl.clone();
        let mut du2 = vec![Complex64::new(0.0, 0.0); k.saturating_sub(2)];
        let mut x = rhs.to_vec();
        for i in 0..k.saturating_sub(1) {
            if d[i].norm() >= dl[i].norm() {
                if d[i].norm() <= tol {
                    return Err(singular_solve(self, z));
                }
                let fact = dl[i] / d[i];
                d[i + 1] -= fact * du[i];
                x[i + 1] = x[i + 1] - fact * x[i];
            } else {
                let fact = d[i] / dl[i];
                d[i] = dl[i];
                let temp = d[i + 1];
                d[i + 1] = du[i] - fact * temp;
                if i + 2 < k {
                    du2[i] = du[i + 1];
                    du[i + 1] = -fact * du2[i];
                }
                du[i] = temp;
                let xi = x[i];
                x[i] = x[i + 1];
                x[i + 1] = xi - fact * x[i + 1];
            }
            dl[i] = Complex64::new(0.0, 0.0);
        }
        if d[k - 1].norm() <= tol {
            return Err(singular_solve(self, z));
        }
        // Back substitution.
        x[k - 1] = x[k - 1] / d[k - 1];
        if k > 1 {
            x[k - 2] = (x[k - 2] - du[k - 2] * x[k - 1]) / d[k - 2];
        }
        for i in (0..k.saturating_sub(2)).rev() {
            x[i] = (x[i] - du[i] * x[i + 1] - du2[i] * x[i + 2]) / d[i];
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(singular_solve(self, z));
        }
        Ok(x)
    }

    /// `(T - zI)^{-1} e_1`.
    pub fn solve_shifted_e1(&self, z: Complex64) -> Result<Vec<Complex64>> {
        let mut rhs = vec![Complex64::new(0.0, 0.0); self.dim()];
        rhs[0] = Complex64::new(1.0, 0.0);
        self.solve_shifted(z, &rhs)
    }

    /// Ratio `det(T - wI) / det(T - zI)`, which equals `det(h_{w,z}(T))`.
    ///
    /// Evaluated by the three-term determinant recurrence carried as ratios
    /// of consecutive leading minors, accumulated as a complex logarithm.
    /// Fails when `z` lies within `1e-14 * (spread + 1)` of a Ritz value.
    pub fn det_ratio(&self, w: Complex64, z: Complex64) -> Result<Complex64> {
        let ritz = self.eigvals()?;
        self.det_ratio_with_ritz(&ritz, w, z)
    }

    /// [`det_ratio`](Self::det_ratio) when the eigenvalues are already known.
    pub fn det_ratio_with_ritz(&self, ritz: &[f64], w: Complex64, z: Complex64) -> Result<Complex64> {
        check_shift(ritz, z)?;
        if w == z {
            return Ok(Complex64::new(1.0, 0.0));
        }
        let lw = self.log_det_shifted(w);
        let lz = self.log_det_shifted(z);
        Ok((lw - lz).exp())
    }

    /// Complex logarithm of `det(T - xI)`; `-inf` real part when singular.
    pub fn log_det_shifted(&self, x: Complex64) -> Complex64 {
        let scale = self
            .alphas
            .iter()
            .chain(self.betas.iter())
            .fold(0.0f64, |m, v| m.max(v.abs()))
            .max(x.norm())
            .max(f64::MIN_POSITIVE);
        let pivmin = f64::EPSILON * f64::EPSILON * scale;
        let k = self.dim();
        let mut acc = Complex64::new(0.0, 0.0);
        let mut r = Complex64::new(self.alphas[0], 0.0) - x;
        for j in 0..k {
            if j > 0 {
                let b = self.betas[j - 1];
                r = Complex64::new(self.alphas[j], 0.0) - x - Complex64::new(b * b, 0.0) / r;
            }
            if r.norm() == 0.0 {
                if j == k - 1 {
                    return Complex64::new(f64::NEG_INFINITY, 0.0);
                }
                r = Complex64::new(-pivmin, 0.0);
            }
            acc += r.ln();
        }
        acc
    }
}

/// `prod_i (theta_i - w) / (theta_i - z)` over given Ritz values.
pub fn det_ratio_from_ritz(ritz: &[f64], w: Complex64, z: Complex64) -> Result<Complex64> {
    check_shift(ritz, z)?;
    let mut log = Complex64::new(0.0, 0.0);
    for &t in ritz {
        let num = Complex64::new(t, 0.0) - w;
        if num.norm() == 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        log += num.ln() - (Complex64::new(t, 0.0) - z).ln();
    }
    Ok(log.exp())
}

fn check_shift(ritz: &[f64], z: Complex64) -> Result<()> {
    let (lo, hi) = ritz
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &t| (a.min(t), b.max(t)));
    let tol = 1e-14 * ((hi - lo) + 1.0);
    for &t in ritz {
        if (z - t).norm() < tol {
            return Err(Error::SingularShift { ritz: t, z });
        }
    }
    Ok(())
}

fn singular_solve(t: &Tridiagonal, z: Complex64) -> Error {
    let ritz = t.eigvals().unwrap_or_default();
    let nearest = ritz
        .iter()
        .copied()
        .min_by(|a, b| (z - a).norm().total_cmp(&(z - b).norm()))
        .unwrap_or(f64::NAN);
    Error::SingularShift { ritz: nearest, z }
}

/// Sorts eigenvalues ascending and permutes the columns of the row-major
/// `rows x n` matrix `z` accordingly.
pub(crate) fn sort_eigenpairs(d: &[f64], z: &[f64], rows: usize, n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
    let vals = idx.iter().map(|&i| d[i]).collect();
    let mut vecs = vec![0.0; rows * n];
    for r in 0..rows {
        for (c, &i) in idx.iter().enumerate() {
            vecs[r * n + c] = z[r * n + i];
        }
    }
    (vals, vecs)
}

/// Implicit QL iteration on a symmetric tridiagonal matrix.
///
/// `d` holds the diagonal and is overwritten by the (unsorted) eigenvalues.
/// `e[i]` couples rows `i` and `i+1`; `e[n-1]` must be zero. When `rows` is
/// given, the row-major `nrows x n` block is multiplied on the right by the
/// accumulated rotations, so starting from identity rows yields the matching
/// rows of the eigenvector matrix.
pub(crate) fn implicit_ql(d: &mut [f64], e: &mut [f64], mut rows: Option<(&mut [f64], usize)>) -> Result<()> {
    let n = d.len();
    if n == 0 {
        return Ok(());
    }
    e[n - 1] = 0.0;
    let eps = f64::EPSILON;
    let mut f = 0.0;
    let mut tst1 = 0.0f64;
    let max_iter = 60 * n.max(1) + 60;
    let mut iter_total = 0usize;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            loop {
                iter_total += 1;
                if iter_total > max_iter {
                    return Err(Error::Numerical("implicit QL iteration did not converge".into()));
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().take(n).skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    if let Some((z, nrows)) = rows.as_mut() {
                        for k in 0..*nrows {
                            let base = k * n;
                            let hh = z[base + i + 1];
                            z[base + i + 1] = s * z[base + i] + c * hh;
                            z[base + i] = c * z[base + i] - s * hh;
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    if d.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical("implicit QL produced non-finite eigenvalues".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn eigvals_of_2x2() {
        let t = Tridiagonal::new(vec![2.0, 2.0], vec![1.0]).unwrap();
        let ev = t.eigvals().unwrap();
        assert!((ev[0] - 1.0).abs() < 1e-14 && (ev[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn eigvals_match_chebyshev_closed_form() {
        // Tridiagonal with zero diagonal and unit off-diagonal has eigenvalues 2cos(j pi/(n+1)).
        let n = 40;
        let t = Tridiagonal::new(vec![0.0; n], vec![1.0; n - 1]).unwrap();
        let ev = t.eigvals().unwrap();
        let mut expect: Vec<f64> = (1..=n)
            .map(|j| 2.0 * (j as f64 * std::f64::consts::PI / (n as f64 + 1.0)).cos())
            .collect();
        expect.sort_by(f64::total_cmp);
        for (a, b) in ev.iter().zip(expect.iter()) {
            assert!((a - b).abs() < 1e-13, "{a} vs {b}");
        }
    }

    #[test]
    fn eigh_reconstructs() {
        let t = Tridiagonal::new(vec![4.0, -1.0, 3.0, 0.5, 2.0], vec![1.0, 0.3, -2.0, 0.7]).unwrap();
        let (vals, vecs) = t.eigh().unwrap();
        let k = 5;
        let dense = t.to_dense();
        for i in 0..k {
            for j in 0..k {
                let mut s = 0.0;
                for m in 0..k {
                    s += vecs[i * k + m] * vals[m] * vecs[j * k + m];
                }
                assert!((s - dense[i * k + j]).abs() < 1e-13);
            }
        }
        let (v2, first) = t.eig_first_components().unwrap();
        for m in 0..k {
            assert!((v2[m] - vals[m]).abs() < 1e-13);
            assert!((first[m].abs() - vecs[m].abs()).abs() < 1e-13);
        }
    }

    #[test]
    fn det_ratio_examples() {
        let t = Tridiagonal::new(vec![1.0, 2.0], vec![0.0]).unwrap();
        let r = t.det_ratio(c(0.0), c(3.0)).unwrap();
        assert!((r - c(1.0)).norm() < 1e-14);
        let r = t.det_ratio(Complex64::new(0.3, 0.2), Complex64::new(0.3, 0.2)).unwrap();
        assert_eq!(r, c(1.0));
    }

    #[test]
    fn det_ratio_singular_names_ritz_value() {
        let t = Tridiagonal::new(vec![1.0, 2.0], vec![0.0]).unwrap();
        match t.det_ratio(c(0.0), c(2.0)) {
            Err(Error::SingularShift { ritz, .. }) => assert_eq!(ritz, 2.0),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn det_ratio_matches_product_of_ritz_ratios() {
        let t = Tridiagonal::new(vec![1.0, 3.0, -2.0, 0.5, 7.0, 2.0], vec![0.5, 1.2, 0.1, 2.0, 0.9]).unwrap();
        let ritz = t.eigvals().unwrap();
        for (w, z) in [
            (c(-5.0), Complex64::new(1.0, 1.0)),
            (c(0.7), Complex64::new(-3.0, 0.01)),
            (c(10.0), Complex64::new(4.0, -2.0)),
        ] {
            let a = t.det_ratio(w, z).unwrap();
            let b = det_ratio_from_ritz(&ritz, w, z).unwrap();
            assert!((a - b).norm() <= 1e-12 * b.norm().max(1.0), "{a} vs {b}");
        }
    }

    #[test]
    fn shifted_solve_matches_dense_residual() {
        let t = Tridiagonal::new(vec![1.0, 3.0, -2.0, 0.5, 7.0], vec![0.5, 1.2, 0.1, 2.0]).unwrap();
        let z = Complex64::new(0.4, 0.3);
        let rhs: Vec<Complex64> = (0..5).map(|i| Complex64::new(i as f64 - 1.0, 0.5)).collect();
        let x = t.solve_shifted(z, &rhs).unwrap();
        let dense = t.to_dense();
        for i in 0..5 {
            let mut s = -z * x[i];
            for j in 0..5 {
                s += x[j] * dense[i * 5 + j];
            }
            assert!((s - rhs[i]).norm() < 1e-12);
        }
        // real shift requiring pivoting
        let t = Tridiagonal::new(vec![0.0; 4], vec![1.0; 3]).unwrap();
        let rhs = [1.0, 0.0, 1.0, -2.0];
        let x = t.solve_shifted(c(0.0), &rhs.map(c)).unwrap();
        let y = t.matvec(&x.iter().map(|v| v.re).collect::<Vec<_>>());
        for i in 0..4 {
            assert!((y[i] - rhs[i]).abs() < 1e-14);
        }
    }
}
