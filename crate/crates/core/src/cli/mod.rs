//! The `lanfa` command-line tool.
//!
//! Every CSV starts with the fully resolved configuration as `# `-prefixed
//! TOML lines, so a file can be fed back through `--config` after
//! stripping the prefix.

pub mod config;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::bounds::{bound_curve, quadform_curve};
use crate::error::{Error, Result};
use crate::lanczos::lanczos;
use crate::linalg::write_matrix_market;
use crate::linsys::{cg_apriori_bound, ResidualHistory};

pub use config::RunConfig;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_VIOLATION: i32 = 3;
pub const EXIT_NUMERICAL: i32 = 4;

pub const RUN_HEADER: &str = "k,true_err,err_w,res_w,integral_term,bound,fp_term,quad_err";
pub const QUADFORM_HEADER: &str = "k,true_qf_err,res_w_sq,integral_term,bound,quad_err";
pub const LINSYS_HEADER: &str = "k,lanczos_res,minres_res,galerkin_pred,cg_bound";

#[derive(Debug, Parser)]
#[command(name = "lanfa", version, about = "Lanczos-FA error bounds from contour integrals")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Bound curve for ||f(A) b - lan_k||.
    Run(ExperimentArgs),
    /// Bound curve for |b^T f(A) b - ||b||^2 e_1^T f(T_k) e_1|.
    Quadform(ExperimentArgs),
    /// Galerkin and MINRES residuals of (A - wI) x = b.
    Linsys(ExperimentArgs),
    /// Write a generated operator in Matrix Market format.
    Gen(ExperimentArgs),
}

#[derive(Debug, clap::Args)]
pub struct ExperimentArgs {
    /// TOML file with settings; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Skip reorthogonalization.
    #[arg(long)]
    pub no_reorth: bool,
    /// Add the finite-precision correction (needs --norm a2).
    #[arg(long)]
    pub fp_term: bool,
    #[command(flatten)]
    pub settings: RunConfig,
}

impl ExperimentArgs {
    pub fn merged(&self) -> Result<RunConfig> {
        let base = match &self.config {
            Some(p) => RunConfig::from_file(p)?,
            None => RunConfig::default(),
        };
        let mut flags = self.settings.clone();
        if self.no_reorth {
            flags.reorth = Some(false);
        }
        if self.fp_term {
            flags.fp_term = Some(true);
        }
        Ok(base.overlay(&flags))
    }
}

/// Outcome of a command besides hard errors.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub violations: Vec<usize>,
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Numerical(_) | Error::SingularShift { .. } | Error::SingularIntegrand { .. } => EXIT_NUMERICAL,
        _ => EXIT_CONFIG,
    }
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code. Messages go to `err`.
pub fn main_with(args: impl IntoIterator<Item = impl Into<OsString> + Clone>, err: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = write!(err, "{e}");
            return code;
        }
    };
    match execute(&cli.command) {
        Ok(o) if o.violations.is_empty() => EXIT_OK,
        Ok(o) => {
            let ks: Vec<String> = o.violations.iter().map(|k| k.to_string()).collect();
            let _ = writeln!(err, "bound violated at k = {}", ks.join(", "));
            EXIT_VIOLATION
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

pub fn execute(cmd: &Command) -> Result<Outcome> {
    match cmd {
        Command::Run(a) => cmd_run(&a.merged()?),
        Command::Quadform(a) => cmd_quadform(&a.merged()?),
        Command::Linsys(a) => cmd_linsys(&a.merged()?),
        Command::Gen(a) => cmd_gen(&a.merged()?),
    }
}

fn num(x: f64) -> String {
    format!("{x:e}")
}

fn header_lines(cfg: &RunConfig, command: &str) -> Result<String> {
    let mut s = format!("# lanfa {command}\n");
    for line in cfg.to_toml()?.lines() {
        s.push_str("# ");
        s.push_str(line);
        s.push('\n');
    }
    Ok(s)
}

fn emit(cfg: &RunConfig, body: &str) -> Result<()> {
    match &cfg.out {
        Some(p) => std::fs::write(p, body).map_err(|e| Error::Io(format!("{}: {e}", p.display()))),
        None => {
            std::io::stdout().write_all(body.as_bytes())?;
            Ok(())
        }
    }
}

pub fn cmd_run(cfg: &RunConfig) -> Result<Outcome> {
    let (spec, cfg) = cfg.problem_spec()?;
    let (a, b) = spec.build()?;
    let (bound, cfg) = cfg.resolve_bound(&a, false)?;
    let report = bound_curve(&a, &b, &bound)?;
    let mut out = header_lines(&cfg, "run")?;
    out.push_str(RUN_HEADER);
    out.push('\n');
    for r in &report.rows {
        let fp = r.fp_term.map(num).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            r.k,
            num(r.true_err),
            num(r.err_w_norm),
            num(r.res_w_norm_2),
            num(r.integral_term),
            num(r.bound_value),
            fp,
            num(r.quad_err_estimate)
        ));
    }
    emit(&cfg, &out)?;
    Ok(Outcome { violations: report.violations().iter().map(|r| r.k).collect() })
}

pub fn cmd_quadform(cfg: &RunConfig) -> Result<Outcome> {
    let (spec, cfg) = cfg.problem_spec()?;
    let (a, b) = spec.build()?;
    let (bound, mut cfg) = cfg.resolve_bound(&a, true)?;
    cfg.norm = None;
    cfg.fp_term = None;
    let report = quadform_curve(&a, &b, &bound)?;
    let mut out = header_lines(&cfg, "quadform")?;
    out.push_str(QUADFORM_HEADER);
    out.push('\n');
    for r in &report.rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.k,
            num(r.true_qf_err),
            num(r.res_w_sq),
            num(r.integral_term),
            num(r.bound_value),
            num(r.quad_err_estimate)
        ));
    }
    emit(&cfg, &out)?;
    Ok(Outcome { violations: report.violations().iter().map(|r| r.k).collect() })
}

/// Relative residuals `||r_k|| / ||r_0||` of both methods, the Galerkin
/// prediction from MINRES, and the CG bound on the `(A - wI)`-norm error
/// ratio when `A - wI` is positive definite.
pub fn cmd_linsys(cfg: &RunConfig) -> Result<Outcome> {
    let (spec, mut cfg) = cfg.problem_spec()?;
    let (a, b) = spec.build()?;
    let w = *cfg.w.get_or_insert(0.0);
    let k_max = *cfg.kmax.get_or_insert(60);
    let precision = cfg.precision_mode()?;
    cfg.precision = Some(precision.label().into());
    let reorth = *cfg.reorth.get_or_insert(true);
    let fact = lanczos(&a, &b, k_max.min(a.dim()), reorth, precision)?;
    let hist = ResidualHistory::new(&fact, w)?;
    let pred = hist.galerkin_prediction();
    let s = a.spectrum()?;
    let kappa = if w < s.min() { Some((s.max() - w) / (s.min() - w)) } else { None };
    let r0 = hist.minres[0];
    let mut out = header_lines(&cfg, "linsys")?;
    out.push_str(LINSYS_HEADER);
    out.push('\n');
    for k in 0..hist.minres.len() {
        let cg = match kappa {
            Some(kp) => num(cg_apriori_bound(kp, k)?),
            None => String::new(),
        };
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            k,
            hist.lanczos[k].map(|v| num(v / r0)).unwrap_or_default(),
            num(hist.minres[k] / r0),
            pred[k].map(num).unwrap_or_default(),
            cg
        ));
    }
    emit(&cfg, &out)?;
    Ok(Outcome { violations: Vec::new() })
}

pub fn cmd_gen(cfg: &RunConfig) -> Result<Outcome> {
    let (spec, cfg) = cfg.problem_spec()?;
    let a = spec.operator()?;
    let path = cfg.out.as_ref().ok_or_else(|| Error::Validation("gen needs --out PATH".into()))?;
    write_matrix_market(&a, path)?;
    Ok(Outcome { violations: Vec::new() })
}

/// Extracts the configuration embedded at the top of a CSV produced by
/// this tool.
pub fn embedded_config(csv: &str) -> Result<RunConfig> {
    let toml: String = csv
        .lines()
        .take_while(|l| l.starts_with('#'))
        .skip(1)
        .map(|l| l.strip_prefix("# ").unwrap_or(l.trim_start_matches('#')))
        .collect::<Vec<_>>()
        .join("\n");
    RunConfig::from_toml_str(&toml)
}
