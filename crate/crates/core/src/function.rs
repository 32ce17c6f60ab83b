//! Scalar functions applied to matrices, with real and complex evaluation.

use std::f64::consts::{E, PI};
use std::fmt;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum ScalarFunction {
    Sqrt,
    Log,
    /// `x^{-q}`.
    InversePower { q: f64 },
    /// `exp(scale * x)`.
    Exp { scale: f64 },
    /// 1 for `x >= a`, 0 otherwise.
    Step { a: f64 },
    /// `|x - a|`.
    AbsShift { a: f64 },
    /// `step(x - a) / x`.
    StepOverX { a: f64 },
    /// Coefficients in increasing degree.
    Polynomial { coeffs: Vec<f64> },
    /// Ratio of two polynomials, coefficients in increasing degree.
    Rational { num: Vec<f64>, den: Vec<f64> },
}

/// Constants `(c, p)` with `|f(z)| <= c |z|^p` whenever `|z| >= 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Growth {
    pub constant: f64,
    pub exponent: f64,
}

fn horner_real(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &ci| acc * x + ci)
}

fn horner_complex(c: &[f64], z: Complex64) -> Complex64 {
    c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &ci| acc * z + ci)
}

fn is_integer(q: f64) -> bool {
    q.fract() == 0.0 && q.abs() < 1e15
}

impl ScalarFunction {
    pub fn inverse() -> Self {
        Self::InversePower { q: 1.0 }
    }

    /// Value at a real point; `Domain` error outside the real domain.
    pub fn eval_real(&self, x: f64) -> Result<f64> {
        let dom = |reason: &str| Error::Domain { at: x, reason: format!("{} {reason}", self.label()) };
        match self {
            Self::Sqrt => {
                if x < 0.0 {
                    return Err(dom("requires a nonnegative argument"));
                }
                Ok(x.sqrt())
            }
            Self::Log => {
                if x <= 0.0 {
                    return Err(dom("requires a positive argument"));
                }
                Ok(x.ln())
            }
            Self::InversePower { q } => {
                if x == 0.0 || (x < 0.0 && !is_integer(*q)) {
                    return Err(dom("is singular or multivalued here"));
                }
                if is_integer(*q) {
                    Ok(x.powi(-(*q as i32)))
                } else {
                    Ok(x.powf(-q))
                }
            }
            Self::Exp { scale } => Ok((scale * x).exp()),
            Self::Step { a } => Ok(if x >= *a { 1.0 } else { 0.0 }),
            Self::AbsShift { a } => Ok((x - a).abs()),
            Self::StepOverX { a } => {
                if x < *a {
                    Ok(0.0)
                } else if x == 0.0 {
                    Err(dom("is singular at zero"))
                } else {
                    Ok(1.0 / x)
                }
            }
            Self::Polynomial { coeffs } => Ok(horner_real(coeffs, x)),
            Self::Rational { num, den } => {
                let d = horner_real(den, x);
                if d == 0.0 {
                    return Err(dom("has a pole here"));
                }
                Ok(horner_real(num, x) / d)
            }
        }
    }

    /// Value at a complex point using principal branches. Piecewise
    /// functions are continued by the real part of `z`.
    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        match self {
            Self::Sqrt => z.sqrt(),
            Self::Log => z.ln(),
            Self::InversePower { q } => {
                if is_integer(*q) {
                    z.powi(-(*q as i32))
                } else {
                    z.powf(-q)
                }
            }
            Self::Exp { scale } => (z * scale).exp(),
            Self::Step { a } => Complex64::new(if z.re < *a { 0.0 } else { 1.0 }, 0.0),
            Self::AbsShift { a } => {
                if z.re > *a {
                    z - a
                } else {
                    a - z
                }
            }
            Self::StepOverX { a } => {
                if z.re < *a {
                    Complex64::new(0.0, 0.0)
                } else {
                    z.inv()
                }
            }
            Self::Polynomial { coeffs } => horner_complex(coeffs, z),
            Self::Rational { num, den } => horner_complex(num, z) / horner_complex(den, z),
        }
    }

    /// Polynomial growth at infinity, when the function has it.
    pub fn growth(&self) -> Option<Growth> {
        match self {
            Self::Sqrt => Some(Growth { constant: 1.0, exponent: 0.5 }),
            // |log z| <= ln|z| + pi and ln s <= (2/e) sqrt(s).
            Self::Log => Some(Growth { constant: 2.0 / E + PI, exponent: 0.5 }),
            Self::InversePower { q } if *q >= 0.0 => Some(Growth { constant: 1.0, exponent: 0.0 }),
            Self::Polynomial { coeffs } => {
                let deg = coeffs.iter().rposition(|&c| c != 0.0).unwrap_or(0);
                Some(Growth { constant: coeffs.iter().map(|c| c.abs()).sum::<f64>().max(f64::MIN_POSITIVE), exponent: deg as f64 })
            }
            _ => None,
        }
    }

    /// Location of the discontinuity of a piecewise function.
    pub fn breakpoint(&self) -> Option<f64> {
        match self {
            Self::Step { a } | Self::AbsShift { a } | Self::StepOverX { a } => Some(*a),
            _ => None,
        }
    }

    pub fn is_piecewise(&self) -> bool {
        self.breakpoint().is_some()
    }

    /// True when the function has a branch cut or pole on `(-inf, 0]`.
    pub fn singular_on_nonpositive_axis(&self) -> bool {
        match self {
            Self::Sqrt | Self::Log => true,
            Self::InversePower { q } => *q > 0.0,
            _ => false,
        }
    }

    pub fn label(&self) -> String {
        self.to_string()
    }

    /// Parses `sqrt`, `log`, `inv`, `invpow:Q`, `exp:S`, `step[:A]`,
    /// `abs[:A]`, `stepx[:A]`, `poly:C0,C1,..` or `rational:N0,N1,../D0,D1,..`.
    /// For piecewise functions without an explicit breakpoint,
    /// `default_a` supplies one.
    pub fn parse(spec: &str, default_a: impl FnOnce() -> Result<f64>) -> Result<Self> {
        let spec = spec.trim();
        let (name, arg) = match spec.split_once(':') {
            Some((n, a)) => (n.trim().to_ascii_lowercase(), Some(a.trim())),
            None => (spec.to_ascii_lowercase(), None),
        };
        let num = |s: &str| -> Result<f64> {
            s.trim().parse::<f64>().map_err(|_| Error::Validation(format!("bad number `{s}` in function `{spec}`")))
        };
        let list = |s: &str| -> Result<Vec<f64>> { s.split(',').map(num).collect() };
        let breakpoint = |arg: Option<&str>, default_a: Box<dyn FnOnce() -> Result<f64>>| match arg {
            Some(a) => num(a),
            None => default_a(),
        };
        let f = match name.as_str() {
            "sqrt" => Self::Sqrt,
            "log" => Self::Log,
            "inv" => Self::inverse(),
            "invpow" | "xq" => Self::InversePower { q: num(arg.ok_or_else(|| Error::Validation("invpow needs an exponent".into()))?)? },
            "exp" => Self::Exp { scale: arg.map(num).transpose()?.unwrap_or(1.0) },
            "step" => Self::Step { a: breakpoint(arg, Box::new(default_a))? },
            "abs" => Self::AbsShift { a: breakpoint(arg, Box::new(default_a))? },
            "stepx" | "step/x" => Self::StepOverX { a: breakpoint(arg, Box::new(default_a))? },
            "poly" => {
                let c = list(arg.ok_or_else(|| Error::Validation("poly needs coefficients".into()))?)?;
                Self::Polynomial { coeffs: c }
            }
            "rational" => {
                let arg = arg.ok_or_else(|| Error::Validation("rational needs coefficients".into()))?;
                let (n, d) = arg
                    .split_once('/')
                    .ok_or_else(|| Error::Validation("rational expects NUM/DEN coefficient lists".into()))?;
                let den = list(d)?;
                if den.iter().all(|&c| c == 0.0) {
                    return invalid("rational denominator is identically zero");
                }
                Self::Rational { num: list(n)?, den }
            }
            other => return invalid(format!("unknown function `{other}`")),
        };
        if let Some(a) = f.breakpoint() {
            if !a.is_finite() {
                return invalid("breakpoint must be finite");
            }
        }
        Ok(f)
    }
}

impl fmt::Display for ScalarFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |c: &[f64]| c.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",");
        match self {
            Self::Sqrt => write!(f, "sqrt"),
            Self::Log => write!(f, "log"),
            Self::InversePower { q } if *q == 1.0 => write!(f, "inv"),
            Self::InversePower { q } => write!(f, "invpow:{q}"),
            Self::Exp { scale } => write!(f, "exp:{scale}"),
            Self::Step { a } => write!(f, "step:{a}"),
            Self::AbsShift { a } => write!(f, "abs:{a}"),
            Self::StepOverX { a } => write!(f, "stepx:{a}"),
            Self::Polynomial { coeffs } => write!(f, "poly:{}", join(coeffs)),
            Self::Rational { num, den } => write!(f, "rational:{}/{}", join(num), join(den)),
        }
    }
}
