//! Norms in which approximation errors are measured.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::operator::{dot, norm2, norm2_complex, SymmetricOperator};

/// Norm selector. `A2Shift` is the `(A - wI)^2`-norm, `||(A - wI) v||_2`,
/// with `w` supplied at evaluation time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormKind {
    Two,
    A,
    A2,
}

impl NormKind {
    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "2" | "two" => Ok(Self::Two),
            "a" => Ok(Self::A),
            "a2" | "a2shift" => Ok(Self::A2),
            other => Err(Error::Validation(format!("unknown norm `{other}` (expected 2, a or a2)"))),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Self::Two => "2",
            Self::A => "a",
            Self::A2 => "a2",
        }
    }
}

/// Norm of a real vector. The `A`-norm requires `A` positive definite.
pub fn weighted_norm(v: &[f64], a: &SymmetricOperator, kind: NormKind, w: f64) -> Result<f64> {
    if v.len() != a.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), got: v.len() });
    }
    match kind {
        NormKind::Two => Ok(norm2(v)),
        NormKind::A => {
            let s = a.spectrum()?;
            if s.min() <= 0.0 {
                return Err(Error::Domain {
                    at: s.min(),
                    reason: "A-norm requires a positive definite operator".into(),
                });
            }
            let c = s.to_eigenbasis(v);
            Ok(c.iter().zip(&s.eigenvalues).map(|(ci, l)| l * ci * ci).sum::<f64>().sqrt())
        }
        NormKind::A2 => {
            let mut y = a.apply(v);
            for (yi, vi) in y.iter_mut().zip(v) {
                *yi -= w * vi;
            }
            Ok(norm2(&y))
        }
    }
}

/// Norm of a complex vector; only the 2-norm and the shifted norm need
/// complex arguments.
pub fn weighted_norm_complex(v: &[Complex64], a: &SymmetricOperator, kind: NormKind, w: f64) -> Result<f64> {
    let re: Vec<f64> = v.iter().map(|c| c.re).collect();
    let im: Vec<f64> = v.iter().map(|c| c.im).collect();
    match kind {
        NormKind::Two => Ok(norm2_complex(v)),
        _ => {
            let a_re = weighted_norm(&re, a, kind, w)?;
            let a_im = weighted_norm(&im, a, kind, w)?;
            Ok(a_re.hypot(a_im))
        }
    }
}

/// `v^T A v`.
pub fn quadratic_form(a: &SymmetricOperator, v: &[f64]) -> f64 {
    dot(v, &a.apply(v))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn norms_on_diagonal() {
        let a = SymmetricOperator::diagonal(vec![1.0, 4.0]).unwrap();
        let v = [3.0, 1.0];
        assert!((weighted_norm(&v, &a, NormKind::Two, 0.0).unwrap() - 10f64.sqrt()).abs() < 1e-15);
        assert!((weighted_norm(&v, &a, NormKind::A, 0.0).unwrap() - 13f64.sqrt()).abs() < 1e-15);
        assert!((weighted_norm(&v, &a, NormKind::A2, 1.0).unwrap() - 3.0).abs() < 1e-15);
    }

    #[test]
    fn a_norm_requires_pd() {
        let a = SymmetricOperator::diagonal(vec![-1.0, 4.0]).unwrap();
        assert!(matches!(weighted_norm(&[1.0, 1.0], &a, NormKind::A, 0.0), Err(Error::Domain { .. })));
    }
}
