//! Synthetic test operators and right-hand sides.
//!
//! Random draws use ChaCha8 seeded from a 64-bit integer and the
//! ziggurat standard normal sampler of `rand_distr`.

use std::path::PathBuf;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::linalg::operator::norm2;
use crate::linalg::{read_matrix_market, SymmetricOperator};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn normal(r: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(r)
}

fn linspace(n: usize, lo: f64, hi: f64) -> Vec<f64> {
    let mut v: Vec<f64> = (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect();
    v[n - 1] = hi;
    v
}

/// `n` eigenvalues spaced uniformly on `[lmin, lmax]`.
pub fn gen_uniform(n: usize, lmin: f64, lmax: f64) -> Result<SymmetricOperator> {
    if n < 2 || !(lmin < lmax) || !lmin.is_finite() || !lmax.is_finite() {
        return invalid("uniform spectrum needs n >= 2 and finite lmin < lmax");
    }
    SymmetricOperator::diagonal(linspace(n, lmin, lmax))
}

/// `lambda_i = lambda_n + ((n - i)/(n - 1)) (lambda_1 - lambda_n) rho^{i-1}`,
/// `i = 1..n`.
pub fn gen_strakos(n: usize, lambda1: f64, lambdan: f64, rho: f64) -> Result<SymmetricOperator> {
    if n < 2 || !(lambdan < lambda1) || !(rho > 0.0 && rho <= 1.0) {
        return invalid("Strakos spectrum needs n >= 2, lambdan < lambda1 and 0 < rho <= 1");
    }
    let eigs = (1..=n)
        .map(|i| lambdan + ((n - i) as f64 / (n - 1) as f64) * (lambda1 - lambdan) * rho.powi(i as i32 - 1))
        .collect();
    SymmetricOperator::diagonal(eigs)
}

/// `X X^T` for an `n x m` matrix `X` of independent `N(0, 1/m)` entries.
pub fn gen_wishart(n: usize, m: usize, seed: u64) -> Result<SymmetricOperator> {
    if n == 0 || m < n {
        return invalid("Wishart matrix needs 1 <= n <= m");
    }
    let mut r = rng(seed);
    let scale = 1.0 / (m as f64).sqrt();
    let x: Vec<f64> = (0..n * m).map(|_| scale * normal(&mut r)).collect();
    let mut a = vec![0.0; n * n];
    for i in 0..n {
        let xi = &x[i * m..(i + 1) * m];
        for j in 0..=i {
            let xj = &x[j * m..(j + 1) * m];
            let v: f64 = xi.iter().zip(xj).map(|(p, q)| p * q).sum();
            a[i * n + j] = v;
            a[j * n + i] = v;
        }
    }
    SymmetricOperator::dense(n, a)
}

/// `n - 1` eigenvalues spaced uniformly on `[0, 1]` and one at `kappa`.
pub fn gen_outlier(n: usize, kappa: f64) -> Result<SymmetricOperator> {
    if n < 3 || !(kappa > 1.0) || !kappa.is_finite() {
        return invalid("outlier spectrum needs n >= 3 and finite kappa > 1");
    }
    let mut eigs = linspace(n - 1, 0.0, 1.0);
    eigs.push(kappa);
    SymmetricOperator::diagonal(eigs)
}

/// `n / 2` eigenvalues uniform on `[a, b]` and the rest uniform on `[c, d]`.
pub fn gen_two_interval(n: usize, a: f64, b: f64, c: f64, d: f64) -> Result<SymmetricOperator> {
    if n < 4 || !(a < b && b < c && c < d) {
        return invalid("two-interval spectrum needs n >= 4 and a < b < c < d");
    }
    let left = n / 2;
    let mut eigs = linspace(left, a, b);
    eigs.extend(linspace(n - left, c, d));
    SymmetricOperator::diagonal(eigs)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Generator {
    Uniform { n: usize, lmin: f64, lmax: f64 },
    Strakos { n: usize, lambda1: f64, lambdan: f64, rho: f64 },
    Wishart { n: usize, m: usize },
    Outlier { n: usize, kappa: f64 },
    #[serde(rename = "two-interval")]
    TwoInterval { n: usize, a: f64, b: f64, c: f64, d: f64 },
    /// Matrix Market file.
    File { path: PathBuf },
}

impl Generator {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Uniform { .. } => "uniform",
            Self::Strakos { .. } => "strakos",
            Self::Wishart { .. } => "wishart",
            Self::Outlier { .. } => "outlier",
            Self::TwoInterval { .. } => "two-interval",
            Self::File { .. } => "file",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum RhsPolicy {
    /// Unit vector with equal coefficients in the eigenbasis of `A`.
    #[default]
    Equal,
    /// Seeded Gaussian vector scaled to unit norm.
    Gaussian,
}

impl RhsPolicy {
    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "equal" | "ones" => Ok(Self::Equal),
            "gaussian" | "random" => Ok(Self::Gaussian),
            other => Err(Error::Validation(format!("unknown right-hand side policy `{other}` (expected equal or gaussian)"))),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Self::Equal => "equal",
            Self::Gaussian => "gaussian",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub generator: Generator,
    pub seed: u64,
    pub rhs: RhsPolicy,
}

impl ProblemSpec {
    pub fn operator(&self) -> Result<SymmetricOperator> {
        match &self.generator {
            Generator::Uniform { n, lmin, lmax } => gen_uniform(*n, *lmin, *lmax),
            Generator::Strakos { n, lambda1, lambdan, rho } => gen_strakos(*n, *lambda1, *lambdan, *rho),
            Generator::Wishart { n, m } => gen_wishart(*n, *m, self.seed),
            Generator::Outlier { n, kappa } => gen_outlier(*n, *kappa),
            Generator::TwoInterval { n, a, b, c, d } => gen_two_interval(*n, *a, *b, *c, *d),
            Generator::File { path } => read_matrix_market(path),
        }
    }

    /// Right-hand side; Gaussian draws use a stream separate from the
    /// operator's.
    pub fn rhs(&self, a: &SymmetricOperator) -> Result<Vec<f64>> {
        gen_rhs(self.rhs, a, self.seed.wrapping_add(0x9e37_79b9_7f4a_7c15))
    }

    pub fn build(&self) -> Result<(SymmetricOperator, Vec<f64>)> {
        let a = self.operator()?;
        let b = self.rhs(&a)?;
        Ok((a, b))
    }
}

pub fn gen_rhs(policy: RhsPolicy, a: &SymmetricOperator, seed: u64) -> Result<Vec<f64>> {
    let n = a.dim();
    match policy {
        RhsPolicy::Equal => {
            if a.is_diagonal() {
                return Ok(vec![1.0 / (n as f64).sqrt(); n]);
            }
            let s = a.spectrum().map_err(|e| match e {
                Error::Unsupported(m) => Error::Unsupported(format!("equal eigenprojection needs the eigenvectors: {m}")),
                other => other,
            })?;
            let mut b = s.from_eigenbasis(&vec![1.0; n]);
            let nrm = norm2(&b);
            b.iter_mut().for_each(|v| *v /= nrm);
            Ok(b)
        }
        RhsPolicy::Gaussian => {
            let mut r = rng(seed);
            let mut b: Vec<f64> = (0..n).map(|_| normal(&mut r)).collect();
            let nrm = norm2(&b);
            b.iter_mut().for_each(|v| *v /= nrm);
            Ok(b)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eigs(a: &SymmetricOperator) -> Vec<f64> {
        a.spectrum().unwrap().eigenvalues.clone()
    }

    #[test]
    fn uniform_endpoints() {
        assert_eq!(eigs(&gen_uniform(2, 0.5, 3.0).unwrap()), vec![0.5, 3.0]);
        let e = eigs(&gen_uniform(1000, 1e-2, 1e2).unwrap());
        assert_eq!((e[0], e[999]), (1e-2, 1e2));
        assert_eq!(e[999] / e[0], 1e4);
    }

    #[test]
    fn strakos_endpoints() {
        let e = eigs(&gen_strakos(50, 1.0, 1e-3, 0.8).unwrap());
        assert_eq!(e[0], 1e-3);
        assert_eq!(e[49], 1.0);
        assert!(e.windows(2).all(|p| p[0] <= p[1]));
    }

    #[test]
    fn outlier_small() {
        assert_eq!(eigs(&gen_outlier(3, 5.0).unwrap()), vec![0.0, 1.0, 5.0]);
    }

    #[test]
    fn wishart_is_deterministic_and_psd() {
        let a = gen_wishart(30, 60, 7).unwrap();
        let b = gen_wishart(30, 60, 7).unwrap();
        assert_eq!(a.to_dense(), b.to_dense());
        assert!(eigs(&a)[0] >= -1e-10);
    }

    #[test]
    fn rhs_policies() {
        let a = gen_uniform(16, 1.0, 2.0).unwrap();
        assert_eq!(gen_rhs(RhsPolicy::Equal, &a, 0).unwrap(), vec![0.25; 16]);
        let g1 = gen_rhs(RhsPolicy::Gaussian, &a, 3).unwrap();
        assert_eq!(g1, gen_rhs(RhsPolicy::Gaussian, &a, 3).unwrap());
        assert!((norm2(&g1) - 1.0).abs() < 1e-14);
        let w = gen_wishart(20, 40, 1).unwrap();
        let b = gen_rhs(RhsPolicy::Equal, &w, 0).unwrap();
        let c = w.spectrum().unwrap().to_eigenbasis(&b);
        assert!(c.iter().all(|v| (v - c[0]).abs() < 1e-12));
    }
}
