//! Experiment configuration: TOML file values merged with command-line
//! flags, then resolved against the generated operator.

use std::path::{Path, PathBuf};

use clap::Args;
use serde::{Deserialize, Serialize};

use crate::bounds::{BoundConfig, ErrSource, SetsPolicy};
use crate::contour::{make_circle, make_double_circle, make_pacman, split_interval_at, QuadOptions, SpectrumSet};
use crate::error::{invalid, Error, Result};
use crate::function::ScalarFunction;
use crate::lanczos::Precision;
use crate::linalg::{NormKind, SymmetricOperator};
use crate::problems::{Generator, ProblemSpec, RhsPolicy};

/// Default number of quadrature nodes used to size the initial panels.
pub const DEFAULT_NODES: usize = 256;

/// Every experiment setting. Unset fields take defaults that depend on
/// the problem and the function; [`RunConfig::problem_spec`] and [`RunConfig::resolve_bound`] fills them in.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize, Args)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Test problem: uniform, strakos, wishart, outlier, two-interval or file.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub problem: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    /// Columns of the Wishart factor.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lmin: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lmax: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda1: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambdan: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    /// Isolated eigenvalue of the outlier problem.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
    /// Two intervals `a:b,c:d` for the two-interval problem.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub intervals: Option<String>,
    /// Matrix Market file for `--problem file`.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matrix: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Right-hand side: equal (eigenprojection) or gaussian.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rhs: Option<String>,
    /// Function, e.g. sqrt, log, invpow:2, step:0.5, abs, stepx, poly:1,0,2.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub f: Option<String>,
    /// Contour: pacman, circle or double-circle.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub contour: Option<String>,
    /// Circle center.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub center: Option<f64>,
    /// Circle radius, or inner radius of the Pac-Man contour.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    /// Gap between the two circles at `w`.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub w: Option<f64>,
    /// Error norm: 2, a or a2.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub norm: Option<String>,
    /// apriori or aposteriori.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sets: Option<String>,
    /// Set containing the spectrum, `l:u[,l:u]`.
    #[arg(long = "S0", allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s0: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kmax: Option<usize>,
    /// fp64 or fp32.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub precision: Option<String>,
    #[arg(skip)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reorth: Option<bool>,
    #[arg(skip)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fp_term: Option<bool>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quad_tol: Option<f64>,
    /// Source of the shifted-system error: oracle or cg.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub err_source: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub jobs: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

macro_rules! overlay {
    ($base:ident, $over:ident; $($field:ident),*) => {
        $(if $over.$field.is_some() { $base.$field = $over.$field.clone(); })*
    };
}

impl RunConfig {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        toml::from_str(s).map_err(|e| Error::Validation(format!("config: {e}")))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Validation(format!("config: {e}")))
    }

    /// Values set in `over` replace those in `self`.
    pub fn overlay(mut self, over: &RunConfig) -> Self {
        overlay!(self, over; problem, n, m, lmin, lmax, lambda1, lambdan, rho, kappa, intervals, matrix, seed, rhs,
            f, contour, center, radius, eps, w, norm, sets, s0, kmax, precision, reorth, fp_term, quad_tol,
            err_source, jobs, out);
        self
    }

    /// Problem description with defaults for the chosen generator.
    pub fn problem_spec(&self) -> Result<(ProblemSpec, RunConfig)> {
        let mut c = self.clone();
        let kind = c.problem.get_or_insert_with(|| "uniform".into()).to_ascii_lowercase();
        let generator = match kind.as_str() {
            "uniform" => Generator::Uniform {
                n: *c.n.get_or_insert(1000),
                lmin: *c.lmin.get_or_insert(1e-2),
                lmax: *c.lmax.get_or_insert(1e2),
            },
            "strakos" => Generator::Strakos {
                n: *c.n.get_or_insert(50),
                lambda1: *c.lambda1.get_or_insert(1.0),
                lambdan: *c.lambdan.get_or_insert(1e-3),
                rho: *c.rho.get_or_insert(0.8),
            },
            "wishart" => {
                let n = *c.n.get_or_insert(300);
                Generator::Wishart { n, m: *c.m.get_or_insert(2 * n) }
            }
            "outlier" => Generator::Outlier { n: *c.n.get_or_insert(200), kappa: *c.kappa.get_or_insert(5.0) },
            "two-interval" => {
                let s = SpectrumSet::parse(c.intervals.get_or_insert_with(|| "-2:-1,1:2".into()))?;
                let p: Vec<(f64, f64)> = s.pieces().collect();
                if p.len() != 2 {
                    return invalid("--intervals needs exactly two intervals a:b,c:d");
                }
                Generator::TwoInterval { n: *c.n.get_or_insert(400), a: p[0].0, b: p[0].1, c: p[1].0, d: p[1].1 }
            }
            "file" => Generator::File {
                path: c.matrix.clone().ok_or_else(|| Error::Validation("--problem file needs --matrix PATH".into()))?,
            },
            other => return invalid(format!("unknown problem `{other}`")),
        };
        let rhs = RhsPolicy::parse(c.rhs.get_or_insert_with(|| "equal".into()))?;
        let seed = *c.seed.get_or_insert(0);
        Ok((ProblemSpec { generator, seed, rhs }, c))
    }

    pub fn precision_mode(&self) -> Result<Precision> {
        Precision::parse(self.precision.as_deref().unwrap_or("fp64"))
    }

    /// Resolves every bound setting against the operator `a`. The returned
    /// config has all defaults written out.
    pub fn resolve_bound(&self, a: &SymmetricOperator, quadform: bool) -> Result<(BoundConfig, RunConfig)> {
        let mut c = self.clone();
        let spec = a.spectrum()?;
        let (lmin, lmax) = (spec.min(), spec.max());
        let eigs = &spec.eigenvalues;
        let f_text = c.f.get_or_insert_with(|| "sqrt".into()).clone();
        let f = ScalarFunction::parse(&f_text, || default_breakpoint(eigs))?;
        c.f = Some(f.to_string());

        let kind = c.contour.get_or_insert_with(|| default_contour(&f).into()).to_ascii_lowercase();
        let (contour, w) = match kind.as_str() {
            "pacman" => {
                let w = *c.w.get_or_insert(0.0);
                if !(w < lmin) {
                    return invalid(format!("Pac-Man contour needs w = {w} below the spectrum (lambda_min = {lmin})"));
                }
                let r = *c.radius.get_or_insert((lmin - w) / 100.0);
                (make_pacman(w, r, None, DEFAULT_NODES)?, w)
            }
            "circle" => {
                let (center, radius, w) = default_circle(&f, lmin, lmax);
                let center = *c.center.get_or_insert(center);
                let radius = *c.radius.get_or_insert(radius);
                let w = *c.w.get_or_insert(w);
                (make_circle(center, radius, DEFAULT_NODES)?, w)
            }
            "double-circle" | "doublecircle" => {
                let w = *c.w.get_or_insert_with(|| f.breakpoint().unwrap_or(0.5 * (lmin + lmax)));
                let eps = *c.eps.get_or_insert(0.0);
                (make_double_circle(w, lmin, lmax, eps, DEFAULT_NODES)?, w)
            }
            other => return invalid(format!("unknown contour `{other}` (expected pacman, circle or double-circle)")),
        };
        c.contour = Some(kind.clone());

        let norm = NormKind::parse(c.norm.get_or_insert_with(|| default_norm(&f).into()))?;
        c.norm = Some(norm.label().into());
        let policy = SetsPolicy::parse(c.sets.get_or_insert_with(|| "aposteriori".into()))?;
        let s0 = match &c.s0 {
            Some(s) => SpectrumSet::parse(s)?,
            None if quadform && kind.starts_with("double") => split_interval_at(eigs, w, 0.0)?,
            None => SpectrumSet::interval(lmin, lmax)?,
        };
        c.s0 = Some(s0.to_string());
        let k_max = *c.kmax.get_or_insert(60);
        let precision = Precision::parse(c.precision.get_or_insert_with(|| "fp64".into()))?;
        c.precision = Some(precision.label().into());
        let reorth = *c.reorth.get_or_insert(true);
        let fp_term = *c.fp_term.get_or_insert(false);
        let rel_tol = *c.quad_tol.get_or_insert(QuadOptions::default().rel_tol);
        if !(rel_tol > 0.0 && rel_tol < 1.0) {
            return invalid("--quad-tol must lie in (0, 1)");
        }
        let err_source = match c.err_source.get_or_insert_with(|| "oracle".into()).to_ascii_lowercase().as_str() {
            "oracle" => ErrSource::Oracle,
            "cg" => ErrSource::Cg,
            other => return invalid(format!("unknown error source `{other}` (expected oracle or cg)")),
        };
        let jobs = *c.jobs.get_or_insert(0);
        let cfg = BoundConfig {
            f,
            contour,
            w,
            policy,
            s0: Some(s0),
            s_apriori: None,
            norm,
            k_max,
            quad: QuadOptions { rel_tol, ..QuadOptions::default() },
            fp_term,
            reorth,
            precision,
            err_source,
            jobs,
        };
        Ok((cfg, c))
    }
}

/// Midpoint of the eigenvalue gap containing `lambda_max - 0.01 (lambda_max - lambda_min)`.
/// Away from the center of the spectrum, so symmetric problems do not put
/// a Ritz value on the breakpoint.
pub fn default_breakpoint(eigs: &[f64]) -> Result<f64> {
    let lo = eigs.first().copied().unwrap_or(0.0);
    let hi = eigs.last().copied().unwrap_or(0.0);
    let mid = hi - 0.01 * (hi - lo);
    eigs.windows(2)
        .find(|p| p[0] <= mid && mid < p[1])
        .map(|p| 0.5 * (p[0] + p[1]))
        .ok_or_else(|| Error::Validation("spectrum has no gap to place a breakpoint in".into()))
}

fn default_contour(f: &ScalarFunction) -> &'static str {
    match f {
        ScalarFunction::Sqrt | ScalarFunction::Log => "pacman",
        _ if f.is_piecewise() => "double-circle",
        _ => "circle",
    }
}

fn default_norm(f: &ScalarFunction) -> &'static str {
    match f {
        ScalarFunction::Sqrt => "a",
        ScalarFunction::StepOverX { .. } => "a2",
        _ => "2",
    }
}

/// `(center, radius, w)`: for `x^{-q}` the disk around `lambda_max` through
/// `w = lambda_min / 2`; otherwise a circle around the spectrum with `w`
/// outside it.
fn default_circle(f: &ScalarFunction, lmin: f64, lmax: f64) -> (f64, f64, f64) {
    if let ScalarFunction::InversePower { .. } = f {
        let w = 0.5 * lmin;
        return (lmax, lmax - w, w);
    }
    let half = 0.5 * (lmax - lmin).max(f64::MIN_POSITIVE.sqrt());
    let center = 0.5 * (lmin + lmax);
    let radius = 1.25 * half;
    (center, radius, center - 2.0 * radius)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::gen_uniform;

    #[test]
    fn toml_round_trip() {
        let c = RunConfig {
            problem: Some("strakos".into()),
            n: Some(50),
            rho: Some(0.8),
            f: Some("sqrt".into()),
            reorth: Some(false),
            fp_term: Some(true),
            w: Some(-0.5),
            s0: Some("0.001:1".into()),
            ..Default::default()
        };
        let back = RunConfig::from_toml_str(&c.to_toml().unwrap()).unwrap();
        assert_eq!(back, c);
        assert!(RunConfig::from_toml_str("bogus = 1").is_err());
    }

    #[test]
    fn overlay_prefers_flags() {
        let file = RunConfig { n: Some(10), kmax: Some(5), ..Default::default() };
        let flags = RunConfig { n: Some(20), ..Default::default() };
        let m = file.overlay(&flags);
        assert_eq!((m.n, m.kmax), (Some(20), Some(5)));
    }

    #[test]
    fn breakpoint_sits_in_a_gap() {
        let e = [0.0, 1.0, 2.0, 3.0, 4.0];
        assert_eq!(default_breakpoint(&e).unwrap(), 3.5);
        assert_eq!(default_breakpoint(&[0.0, 0.5, 1.0, 5.0]).unwrap(), 3.0);
    }

    #[test]
    fn resolved_config_is_complete_and_stable() {
        let a = gen_uniform(100, 0.1, 10.0).unwrap();
        let (cfg, full) = RunConfig::default().resolve_bound(&a, false).unwrap();
        assert_eq!(cfg.w, 0.0);
        assert_eq!(full.norm.as_deref(), Some("a"));
        let (again, full2) = full.resolve_bound(&a, false).unwrap();
        assert_eq!(full2, full);
        assert_eq!(again.contour, cfg.contour);
    }
}
