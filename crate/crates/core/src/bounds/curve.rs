//! Bound curves: the integral term times the shifted-system error, per
//! iteration, next to the true Lanczos-FA error.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::integral::{bound_quadform, fp_correction, integral_term, IntegralValue, SpectrumSets};
use crate::contour::{Contour, ContourKind, QuadOptions, SpectrumSet};
use crate::error::{invalid, Error, Result};
use crate::fa::{ground_truth, lanczos_fa, quadform};
use crate::function::ScalarFunction;
use crate::lanczos::{lanczos, recurrence_residual, LanczosFactorization, Precision, RecurrenceResidual};
use crate::linalg::operator::{dot, norm2};
use crate::linalg::{weighted_norm, NormKind, SymmetricOperator};
use crate::linsys::cg_apriori_bound;

/// Relative rounding slack on the computed reference `f(A) b`.
pub const TRUTH_ROUNDOFF: f64 = 64.0 * f64::EPSILON;

/// Multiple of `eps * ||T|| * max |f[x_i, x_j]|` allowed for rounding in
/// evaluating `f(T_k) e_1` (and `f(A) b` for a dense `A`).
pub const EVAL_ROUNDOFF: f64 = 4.0;

/// Largest divided difference `|f[x_i, x_j]|` over the points, with the
/// derivative (by complex step) on the diagonal. This bounds the
/// sensitivity of `f(M)` to symmetric perturbations of a matrix `M` with
/// eigenvalues `xs`.
pub fn max_divided_difference(f: &ScalarFunction, xs: &[f64]) -> f64 {
    let vals: Vec<Option<f64>> = xs.iter().map(|&x| f.eval_real(x).ok()).collect();
    let mut m = 0.0f64;
    for (i, &x) in xs.iter().enumerate() {
        let h = 1e-20 * x.abs().max(1e-280);
        let d = (f.eval_complex(Complex64::new(x, h)).im / h).abs();
        if d.is_finite() {
            m = m.max(d);
        }
        for j in 0..i {
            if let (Some(a), Some(b)) = (vals[i], vals[j]) {
                let gap = (x - xs[j]).abs();
                if gap > 0.0 {
                    m = m.max((a - b).abs() / gap);
                }
            }
        }
    }
    m
}

/// Largest factor by which `norm` can exceed the 2-norm.
fn norm_scale(norm: NormKind, lmin: f64, lmax: f64, w: f64) -> f64 {
    let m = (lmin - w).abs().max((lmax - w).abs());
    match norm {
        NormKind::Two => 1.0,
        NormKind::A => m.sqrt(),
        NormKind::A2 => m,
    }
}

fn spectral_radius(xs: &[f64]) -> f64 {
    xs.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SetsPolicy {
    /// Every `S_i` is the same interval containing the spectrum.
    Apriori,
    /// `S_i` are the Ritz values of the current iterate.
    Aposteriori,
}

impl SetsPolicy {
    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "apriori" | "a-priori" => Ok(Self::Apriori),
            "aposteriori" | "a-posteriori" => Ok(Self::Aposteriori),
            other => Err(Error::Validation(format!("unknown sets policy `{other}` (expected apriori or aposteriori)"))),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Self::Apriori => "apriori",
            Self::Aposteriori => "aposteriori",
        }
    }
}

/// Where `||err_k(w)||` comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ErrSource {
    /// Exact value from the eigendecomposition of `A`.
    Oracle,
    /// Conjugate gradient a priori bound on `A - wI`, converted to the
    /// requested norm. Needs `w < lambda_min`.
    Cg,
}

#[derive(Debug, Clone)]
pub struct BoundConfig {
    pub f: ScalarFunction,
    pub contour: Contour,
    pub w: f64,
    pub policy: SetsPolicy,
    /// Set containing the spectrum; defaults to `[lambda_min, lambda_max]`.
    pub s0: Option<SpectrumSet>,
    /// A priori set for every Ritz value; defaults to the hull of `s0`.
    pub s_apriori: Option<SpectrumSet>,
    pub norm: NormKind,
    pub k_max: usize,
    pub quad: QuadOptions,
    pub fp_term: bool,
    pub reorth: bool,
    pub precision: Precision,
    pub err_source: ErrSource,
    /// Worker threads for rows; 0 uses the global pool.
    pub jobs: usize,
}

impl BoundConfig {
    pub fn new(f: ScalarFunction, contour: Contour, w: f64, norm: NormKind, k_max: usize) -> Self {
        Self {
            f,
            contour,
            w,
            policy: SetsPolicy::Aposteriori,
            s0: None,
            s_apriori: None,
            norm,
            k_max,
            quad: QuadOptions::default(),
            fp_term: false,
            reorth: true,
            precision: Precision::Fp64,
            err_source: ErrSource::Oracle,
            jobs: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundRow {
    pub k: usize,
    pub true_err: f64,
    pub err_w_norm: f64,
    pub res_w_norm_2: f64,
    pub integral_term: f64,
    pub bound_value: f64,
    pub fp_term: Option<f64>,
    pub quad_err_estimate: f64,
    /// Rounding slack on `true_err` from evaluating `f(A) b` and
    /// `f(T_k) e_1` in floating point.
    pub rounding_slack: f64,
}

impl BoundRow {
    pub fn violates(&self) -> bool {
        self.true_err > self.bound_value + self.quad_err_estimate + self.rounding_slack
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundMetadata {
    pub f: String,
    pub contour: ContourKind,
    pub w: f64,
    pub norm: NormKind,
    pub policy: SetsPolicy,
    pub precision: Precision,
    pub reorth: bool,
    pub err_source: ErrSource,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub rows: Vec<BoundRow>,
    pub metadata: BoundMetadata,
}

impl BoundReport {
    pub fn violations(&self) -> Vec<&BoundRow> {
        self.rows.iter().filter(|r| r.violates()).collect()
    }
}

fn pool(jobs: usize) -> Result<Option<rayon::ThreadPool>> {
    if jobs == 0 {
        return Ok(None);
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map(Some)
        .map_err(|e| Error::Numerical(format!("cannot start worker threads: {e}")))
}

fn run_rows<T: Send>(jobs: usize, ks: Vec<usize>, row: impl Fn(usize) -> Result<T> + Sync) -> Result<Vec<T>> {
    let work = || ks.par_iter().map(|&k| row(k)).collect::<Result<Vec<T>>>();
    match pool(jobs)? {
        Some(p) => p.install(work),
        None => work(),
    }
}

fn default_s0(a: &SymmetricOperator) -> Result<SpectrumSet> {
    let s = a.spectrum()?;
    SpectrumSet::interval(s.min(), s.max())
}

/// `||b|| Q_k (T_k - wI)^{-1} e_1` for real `w`, or `None` when `w` is a
/// Ritz value.
fn krylov_shifted(fact: &LanczosFactorization, w: f64) -> Result<Option<Vec<f64>>> {
    match fact.tridiagonal().solve_shifted_e1(Complex64::new(w, 0.0)) {
        Ok(y) => {
            let c: Vec<f64> = y.iter().map(|v| v.re * fact.b_norm()).collect();
            Ok(Some(fact.combine(&c)))
        }
        Err(Error::SingularShift { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

fn shifted_residual(a: &SymmetricOperator, b: &[f64], w: f64, x: &[f64]) -> f64 {
    let ax = a.apply(x);
    let r: Vec<f64> = b.iter().zip(&ax).zip(x).map(|((bi, axi), xi)| bi - (axi - w * xi)).collect();
    norm2(&r)
}

/// Data shared by every row of a curve.
struct Shared {
    b_eff: Vec<f64>,
    exact_shifted: Option<Vec<f64>>,
    lambda_min: f64,
    lambda_max: f64,
}

fn shared(a: &SymmetricOperator, fact: &LanczosFactorization, w: f64) -> Result<Shared> {
    let b_eff = fact.start_vector();
    let s = a.spectrum()?;
    let exact_shifted = if s.eigenvalues.contains(&w) {
        None
    } else {
        Some(a.apply_spectral(&b_eff, |l| 1.0 / (l - w))?)
    };
    Ok(Shared { b_eff, exact_shifted, lambda_min: s.min(), lambda_max: s.max() })
}

/// `||err_k(w)||` in `norm` from the chosen source, with `||res_k(w)||_2`.
fn err_w(
    a: &SymmetricOperator,
    fact: &LanczosFactorization,
    cfg: &BoundConfig,
    sh: &Shared,
) -> Result<(f64, f64)> {
    let w = cfg.w;
    let Some(x) = krylov_shifted(fact, w)? else {
        return Ok((f64::INFINITY, f64::INFINITY));
    };
    let res = shifted_residual(a, &sh.b_eff, w, &x);
    let err = match cfg.err_source {
        ErrSource::Oracle => {
            let Some(exact) = &sh.exact_shifted else {
                return Err(Error::SingularShift { ritz: w, z: Complex64::new(w, 0.0) });
            };
            let e: Vec<f64> = exact.iter().zip(&x).map(|(u, v)| u - v).collect();
            weighted_norm(&e, a, cfg.norm, w)?
        }
        ErrSource::Cg => {
            let (lo, hi) = (sh.lambda_min - w, sh.lambda_max - w);
            let kappa = hi / lo;
            let e0 = a.apply_spectral(&sh.b_eff, |l| 1.0 / (l - w))?;
            let e0_shift = dot(&e0, &sh.b_eff).sqrt();
            let to_norm = match cfg.norm {
                NormKind::Two => 1.0 / lo.sqrt(),
                NormKind::A => (sh.lambda_min / lo).max(sh.lambda_max / hi).sqrt(),
                NormKind::A2 => hi.sqrt(),
            };
            cg_apriori_bound(kappa, fact.steps())? * e0_shift * to_norm
        }
    };
    Ok((err, res))
}

/// Rounding in `f(A) b` through a dense eigendecomposition, per unit
/// `||b||`; zero for diagonal operators, whose reference is entrywise.
fn dense_eval_slack(a: &SymmetricOperator, f: &ScalarFunction) -> Result<f64> {
    if a.is_diagonal() {
        return Ok(0.0);
    }
    let eigs = &a.spectrum()?.eigenvalues;
    Ok(EVAL_ROUNDOFF * f64::EPSILON * spectral_radius(eigs) * max_divided_difference(f, eigs))
}

fn validate(a: &SymmetricOperator, b: &[f64], cfg: &BoundConfig) -> Result<()> {
    if b.len() != a.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), got: b.len() });
    }
    if cfg.k_max == 0 {
        return invalid("k_max must be positive");
    }
    if cfg.fp_term && cfg.norm != NormKind::A2 {
        return invalid("the finite-precision term is derived for the (A - wI)^2-norm; use norm a2");
    }
    if cfg.err_source == ErrSource::Cg {
        let s = a.spectrum()?;
        if !(cfg.w < s.min()) {
            return invalid("the CG error source needs w below the spectrum");
        }
    }
    Ok(())
}

/// Runs Lanczos for `min(k_max, n)` steps and evaluates the bound for every
/// prefix.
pub fn bound_curve(a: &SymmetricOperator, b: &[f64], cfg: &BoundConfig) -> Result<BoundReport> {
    validate(a, b, cfg)?;
    let steps = cfg.k_max.min(a.dim());
    let fact = lanczos(a, b, steps, cfg.reorth, cfg.precision)?;
    bound_curve_with(a, &fact, cfg)
}

/// Bound curve for an existing factorization; rows run up to
/// `min(k_max, fact.steps())`.
pub fn bound_curve_with(a: &SymmetricOperator, fact: &LanczosFactorization, cfg: &BoundConfig) -> Result<BoundReport> {
    let b = fact.start_vector();
    validate(a, &b, cfg)?;
    let sh = shared(a, fact, cfg.w)?;
    let truth = ground_truth(a, &sh.b_eff, &cfg.f)?;
    let truth_scale = weighted_norm(&truth, a, cfg.norm, cfg.w)?;
    let scale = norm_scale(cfg.norm, sh.lambda_min, sh.lambda_max, cfg.w) * fact.b_norm();
    let truth_slack = TRUTH_ROUNDOFF * truth_scale + scale * dense_eval_slack(a, &cfg.f)?;
    let s0 = match &cfg.s0 {
        Some(s) => s.clone(),
        None => default_s0(a)?,
    };
    let si = cfg.s_apriori.clone().unwrap_or_else(|| s0.hull_set());
    let residual: Option<RecurrenceResidual> = if cfg.fp_term { Some(recurrence_residual(a, fact)?) } else { None };
    let k_top = cfg.k_max.min(fact.steps());
    let row = |k: usize| -> Result<BoundRow> {
        let fk = fact.prefix(k)?;
        let approx = lanczos_fa(&fk, &cfg.f)?;
        let diff: Vec<f64> = truth.iter().zip(&approx).map(|(t, v)| t - v).collect();
        let true_err = weighted_norm(&diff, a, cfg.norm, cfg.w)?;
        let (err_w_norm, res_w_norm_2) = err_w(a, &fk, cfg, &sh)?;
        let ritz = fk.ritz_values()?;
        let rounding_slack = truth_slack
            + scale * EVAL_ROUNDOFF * f64::EPSILON * spectral_radius(&ritz) * max_divided_difference(&cfg.f, &ritz);
        let sets = match cfg.policy {
            SetsPolicy::Apriori => SpectrumSets::apriori(s0.clone(), si.clone(), k),
            SetsPolicy::Aposteriori => SpectrumSets::aposteriori(s0.clone(), &ritz)?,
        };
        let it = integral_term(&cfg.f, &cfg.contour, cfg.w, &sets, &cfg.quad)?;
        let mut bound_value = product(it.value, err_w_norm);
        let mut quad_err_estimate = product(it.err_estimate, err_w_norm);
        let fp = match &residual {
            Some(res) => {
                let v = fp_correction(&cfg.f, &cfg.contour, cfg.w, &s0, &fk, res, &cfg.quad, bound_value)?;
                bound_value += v.value;
                quad_err_estimate += v.err_estimate;
                Some(v.value)
            }
            None => None,
        };
        Ok(BoundRow {
            k,
            true_err,
            err_w_norm,
            res_w_norm_2,
            integral_term: it.value,
            bound_value,
            fp_term: fp,
            quad_err_estimate,
            rounding_slack,
        })
    };
    let rows = run_rows(cfg.jobs, (1..=k_top).collect(), row)?;
    Ok(BoundReport {
        rows,
        metadata: BoundMetadata {
            f: cfg.f.to_string(),
            contour: cfg.contour.kind(),
            w: cfg.w,
            norm: cfg.norm,
            policy: cfg.policy,
            precision: fact.precision(),
            reorth: fact.reorthogonalized(),
            err_source: cfg.err_source,
        },
    })
}

/// `x * y` with `0 * inf = 0`: a vanishing integral makes the bound zero
/// even when the shifted system is singular.
fn product(x: f64, y: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * y
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadformRow {
    pub k: usize,
    pub true_qf_err: f64,
    pub res_w_sq: f64,
    pub integral_term: f64,
    pub bound_value: f64,
    pub quad_err_estimate: f64,
    pub rounding_slack: f64,
}

impl QuadformRow {
    pub fn violates(&self) -> bool {
        self.true_qf_err > self.bound_value + self.quad_err_estimate + self.rounding_slack
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadformReport {
    pub rows: Vec<QuadformRow>,
    pub metadata: BoundMetadata,
}

impl QuadformReport {
    pub fn violations(&self) -> Vec<&QuadformRow> {
        self.rows.iter().filter(|r| r.violates()).collect()
    }
}

/// Bound on `|b^T f(A) b - ||b||^2 e_1^T f(T_k) e_1|` per iteration. The
/// norm field of `cfg` is ignored; `s0` must avoid the contour's real
/// crossing (a split set for a double circle).
pub fn quadform_curve(a: &SymmetricOperator, b: &[f64], cfg: &BoundConfig) -> Result<QuadformReport> {
    if b.len() != a.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), got: b.len() });
    }
    if cfg.k_max == 0 {
        return invalid("k_max must be positive");
    }
    let steps = cfg.k_max.min(a.dim());
    let fact = lanczos(a, b, steps, cfg.reorth, cfg.precision)?;
    let sh = shared(a, &fact, cfg.w)?;
    let s = a.spectrum()?;
    let c = s.to_eigenbasis(&sh.b_eff);
    let mut truth = 0.0;
    let mut truth_abs = 0.0;
    for (ci, &l) in c.iter().zip(&s.eigenvalues) {
        let v = cfg.f.eval_real(l)? * ci * ci;
        truth += v;
        truth_abs += v.abs();
    }
    let s0 = match &cfg.s0 {
        Some(s) => s.clone(),
        None => default_s0(a)?,
    };
    let si = cfg.s_apriori.clone().unwrap_or_else(|| s0.hull_set());
    let k_top = cfg.k_max.min(fact.steps());
    let bb = fact.b_norm() * fact.b_norm();
    let truth_slack = TRUTH_ROUNDOFF * truth_abs + fact.b_norm() * dense_eval_slack(a, &cfg.f)?;
    let row = |k: usize| -> Result<QuadformRow> {
        let fk = fact.prefix(k)?;
        let approx = quadform(&fk, &cfg.f)?;
        let ritz = fk.ritz_values()?;
        let rounding_slack = truth_slack
            + bb * EVAL_ROUNDOFF * f64::EPSILON * spectral_radius(&ritz) * max_divided_difference(&cfg.f, &ritz);
        let res = match krylov_shifted(&fk, cfg.w)? {
            Some(x) => shifted_residual(a, &sh.b_eff, cfg.w, &x),
            None => f64::INFINITY,
        };
        let sets = match cfg.policy {
            SetsPolicy::Apriori => SpectrumSets::apriori(s0.clone(), si.clone(), k),
            SetsPolicy::Aposteriori => SpectrumSets::aposteriori(s0.clone(), &ritz)?,
        };
        let (_, it): (f64, IntegralValue) = bound_quadform(&cfg.f, &cfg.contour, cfg.w, &sets, res, &cfg.quad)?;
        let res_sq = res * res;
        Ok(QuadformRow {
            k,
            true_qf_err: (truth - approx).abs(),
            res_w_sq: res_sq,
            integral_term: it.value,
            bound_value: product(it.value, res_sq),
            quad_err_estimate: product(it.err_estimate, res_sq),
            rounding_slack,
        })
    };
    let rows = run_rows(cfg.jobs, (1..=k_top).collect(), row)?;
    Ok(QuadformReport {
        rows,
        metadata: BoundMetadata {
            f: cfg.f.to_string(),
            contour: cfg.contour.kind(),
            w: cfg.w,
            norm: NormKind::Two,
            policy: cfg.policy,
            precision: fact.precision(),
            reorth: fact.reorthogonalized(),
            err_source: ErrSource::Oracle,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contour::{make_circle, make_pacman};

    fn uniform(n: usize, lo: f64, hi: f64) -> SymmetricOperator {
        SymmetricOperator::diagonal((0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()).unwrap()
    }

    #[test]
    fn sqrt_pacman_bound_holds_both_policies() {
        let a = uniform(200, 1e-2, 1e2);
        let b = vec![1.0 / (200f64).sqrt(); 200];
        let contour = make_pacman(0.0, 1e-4, None, 256).unwrap();
        let mut cfg = BoundConfig::new(ScalarFunction::Sqrt, contour, 0.0, NormKind::A, 20);
        for policy in [SetsPolicy::Apriori, SetsPolicy::Aposteriori] {
            cfg.policy = policy;
            let rep = bound_curve(&a, &b, &cfg).unwrap();
            assert_eq!(rep.rows.len(), 20);
            assert!(rep.violations().is_empty(), "{policy:?}");
        }
    }

    #[test]
    fn polynomial_is_exact_beyond_degree() {
        let a = uniform(50, 1.0, 3.0);
        let b: Vec<f64> = (0..50).map(|i| 1.0 + i as f64 / 50.0).collect();
        let f = ScalarFunction::Polynomial { coeffs: vec![1.0, 0.0, -2.0, 0.5] };
        let contour = make_circle(3.0, 3.5, 128).unwrap();
        let cfg = BoundConfig::new(f, contour, -1.0, NormKind::Two, 8);
        let rep = bound_curve(&a, &b, &cfg).unwrap();
        for r in &rep.rows[4..] {
            assert!(r.true_err < 1e-10 * 50f64.sqrt() * 20.0, "{r:?}");
            assert!(r.bound_value.is_finite());
        }
        assert!(rep.violations().is_empty());
    }

    #[test]
    fn cg_source_dominates_oracle() {
        let a = uniform(100, 1.0, 10.0);
        let b = vec![0.1; 100];
        let contour = make_circle(10.0, 9.5, 128).unwrap();
        let mut cfg = BoundConfig::new(ScalarFunction::inverse(), contour, 0.5, NormKind::Two, 10);
        let oracle = bound_curve(&a, &b, &cfg).unwrap();
        cfg.err_source = ErrSource::Cg;
        let cg = bound_curve(&a, &b, &cfg).unwrap();
        for (o, c) in oracle.rows.iter().zip(&cg.rows) {
            assert!(c.err_w_norm >= o.err_w_norm * (1.0 - 1e-12));
        }
    }

    #[test]
    fn fp_term_requires_shifted_norm() {
        let a = uniform(10, 1.0, 2.0);
        let contour = make_circle(2.0, 1.5, 64).unwrap();
        let mut cfg = BoundConfig::new(ScalarFunction::Sqrt, contour, 0.5, NormKind::A, 3);
        cfg.fp_term = true;
        assert!(matches!(bound_curve(&a, &[1.0; 10], &cfg), Err(Error::Validation(_))));
    }
}
