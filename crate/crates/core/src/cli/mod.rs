//! Command-line front end.
//!
//! Subcommands: `parse-check`, `diagnose`, `trace`, `involution`,
//! `fixed-points`, `pair`. Reports are JSON (schema `ergodic-lab/1`) or CSV
//! with floats printed to 17 significant digits, so identical inputs give
//! byte-identical output.
//!
//! Exit codes: 0 success, 2 parse error, 3 precondition error, 4 numerical
//! failure. A verdict is data and never changes the exit code.

mod config;
mod report;

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

pub use config::RunConfig;
pub use report::{diagnosis_json, error_json, fmt_f64, Csv, Num, SCHEMA};

use crate::dynamics::{fixed_points, stable_orbits_with, CompactInterval, EvenInvolution, OrbitSettings};
use crate::ergodic::{
    cesaro_means_at, check_cesaro_bound_condition, check_vanishing_condition, diagnose, distribution_pairing,
    vanishing_power_check, DistributionSample, Mode, SeminormRequest, TestFunction,
};
use crate::expr::parse;
use crate::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_PRECONDITION: i32 = 3;
pub const EXIT_NUMERICAL: i32 = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub code: i32,
    pub kind: String,
    pub message: String,
}

impl CliError {
    pub fn new(code: i32, kind: &str, message: impl Into<String>) -> Self {
        Self { code, kind: kind.into(), message: message.into() }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.kind, self.message)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let (code, kind) = match &e {
            Error::Parse(_) => (EXIT_PARSE, "parse error"),
            Error::Precondition(_)
            | Error::NotEven { .. }
            | Error::ContractionViolation { .. }
            | Error::NotPolynomial(_)
            | Error::IndexContract(_)
            | Error::LengthMismatch { .. }
            | Error::OrderCap { .. }
            | Error::OrderMismatch { .. }
            | Error::BasePointMismatch { .. }
            | Error::NotMonotone { .. } => (EXIT_PRECONDITION, "precondition failed"),
            _ => (EXIT_NUMERICAL, "numerical failure"),
        };
        CliError::new(code, kind, e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Smooth,
    Distributions,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Smooth => Mode::Smooth,
            ModeArg::Distributions => Mode::Distributions,
        }
    }
}

/// Operator and run settings shared by all subcommands.
#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Symbol φ as an expression in x.
    #[arg(long, allow_hyphen_values = true)]
    pub phi: Option<String>,
    /// Real weight shape; the full weight is alpha * weight.
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    pub weight: String,
    /// Complex weight scalar "re,im".
    #[arg(long, default_value = "1,0", allow_hyphen_values = true)]
    pub alpha: String,
    /// Open domain "lo,hi"; "inf" and "-inf" allowed.
    #[arg(long, default_value = "-inf,inf", allow_hyphen_values = true)]
    pub domain: String,
    /// Seed compact set "a,b,grid" [default: derived from the domain, 21 points].
    #[arg(long, allow_hyphen_values = true)]
    pub k: Option<String>,
    /// Largest derivative order of the condition traces.
    #[arg(long, default_value_t = 3)]
    pub smax: usize,
    /// Number of operator powers N.
    #[arg(long, default_value_t = 200)]
    pub n: usize,
    /// Number of Cesàro terms M.
    #[arg(long, default_value_t = 200)]
    pub m: usize,
    /// Function space: smooth functions or distributions.
    #[arg(long, value_enum, default_value_t = ModeArg::Smooth)]
    pub mode: ModeArg,
    /// Assert that φ is real analytic.
    #[arg(long)]
    pub real_analytic: bool,
    /// Assert that the weight is non-vanishing on a dense set.
    #[arg(long)]
    pub assert_dense: bool,
    /// Tolerance for residuals and the involution test.
    #[arg(long, default_value_t = 1e-9, allow_hyphen_values = true)]
    pub tol: f64,
    /// Output file [default: stdout].
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TraceKind {
    Cesaro,
    Conditions,
    Vanishing,
    Orbit,
    Pairing,
}

#[derive(Debug, Parser)]
#[command(name = "ergodic-lab", version, about = "Mean ergodicity diagnostics for weighted composition operators")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse the expressions and print their normalized form.
    ParseCheck {
        #[command(flatten)]
        common: CommonArgs,
        /// Extra expression to check.
        #[arg(long, allow_hyphen_values = true)]
        f: Option<String>,
    },
    /// Run the diagnosis and write the JSON report.
    Diagnose {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Emit a CSV trace.
    Trace {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, value_enum)]
        kind: TraceKind,
        /// Function the operator acts on (cesaro, vanishing).
        #[arg(long, default_value = "x", allow_hyphen_values = true)]
        f: String,
        /// Derivative order.
        #[arg(long, default_value_t = 0)]
        s: usize,
        /// Bell index h <= s (conditions).
        #[arg(long, default_value_t = 0)]
        h: usize,
        #[command(flatten)]
        pairing: PairingArgs,
    },
    /// Tabulate the involution defined by x + y = f(x - y) for an even contraction f.
    Involution {
        #[command(flatten)]
        common: CommonArgs,
        /// Even function with |f'| < 1.
        #[arg(long, allow_hyphen_values = true)]
        even_f: String,
    },
    /// List fixed points of φ on the seed grid.
    FixedPoints {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Pair a power of the operator on a distribution with a test function.
    Pair {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        pairing: PairingArgs,
        /// Operator power m.
        #[arg(long, default_value_t = 1)]
        power: usize,
    },
}

#[derive(Debug, Clone, Args)]
pub struct PairingArgs {
    /// Distribution: "dirac:a[:k]" or "density:EXPR@a,b".
    #[arg(long, allow_hyphen_values = true)]
    pub u: Option<String>,
    /// Test function expression.
    #[arg(long, allow_hyphen_values = true)]
    pub psi: Option<String>,
    /// Test function support "a,b".
    #[arg(long, allow_hyphen_values = true)]
    pub psi_support: Option<String>,
}

impl PairingArgs {
    fn resolve(&self) -> Result<(DistributionSample, TestFunction), CliError> {
        let missing = |flag: &str| CliError::new(EXIT_PRECONDITION, "invalid configuration", format!("--{flag} is required"));
        let u = self.u.as_deref().ok_or_else(|| missing("u"))?;
        let psi = parse(self.psi.as_deref().ok_or_else(|| missing("psi"))?).map_err(Error::from)?;
        let support = config::parse_support(self.psi_support.as_deref().ok_or_else(|| missing("psi-support"))?)
            .map_err(|e| CliError::new(EXIT_PRECONDITION, "invalid configuration", format!("--psi-support: {e}")))?;
        Ok((parse_distribution(u)?, TestFunction::new(psi, support)))
    }
}

fn parse_distribution(text: &str) -> Result<DistributionSample, CliError> {
    let bad = || CliError::new(EXIT_PRECONDITION, "invalid configuration", format!("--u {text:?}: expected \"dirac:a[:k]\" or \"density:EXPR@a,b\""));
    if let Some(rest) = text.strip_prefix("dirac:") {
        let mut parts = rest.split(':');
        let a: f64 = parts.next().and_then(|p| p.trim().parse().ok()).ok_or_else(bad)?;
        let k: usize = match parts.next() {
            Some(p) => p.trim().parse().map_err(|_| bad())?,
            None => 0,
        };
        if parts.next().is_some() || !a.is_finite() {
            return Err(bad());
        }
        return Ok(DistributionSample::Dirac { a, k });
    }
    if let Some(rest) = text.strip_prefix("density:") {
        let (expr, support) = rest.rsplit_once('@').ok_or_else(bad)?;
        let rho = parse(expr).map_err(Error::from)?;
        let support = config::parse_support(support).map_err(|_| bad())?;
        return Ok(DistributionSample::Density { rho, support });
    }
    Err(bad())
}

/// Text produced by a command: the main payload and a short summary.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Output {
    pub payload: String,
    pub summary: String,
}

fn cell(v: f64) -> String {
    fmt_f64(v)
}

/// Runs the diagnosis for a validated configuration.
pub fn cmd_diagnose(config: &RunConfig) -> Result<Output, CliError> {
    let op = config.symbol()?;
    let report = diagnose(&op, &config.diagnosis());
    let mut summary = format!("verdict: {}\n", report.verdict.label());
    for t in &report.theorem_trail {
        summary.push_str(&format!("  {}: {} ({})\n", t.theorem, t.rule, t.evidence));
    }
    for w in &report.warnings {
        summary.push_str(&format!("  warning: {w}\n"));
    }
    Ok(Output { payload: diagnosis_json(config, &report), summary })
}

pub fn cmd_parse_check(config: &RunConfig, f: Option<&str>) -> Result<Output, CliError> {
    let mut payload = String::new();
    if let Some(phi) = &config.phi {
        payload.push_str(&format!("phi: {phi}\n"));
    }
    payload.push_str(&format!("weight: {}\n", config.weight));
    if let Some(f) = f {
        payload.push_str(&format!("f: {}\n", parse(f).map_err(Error::from)?));
    }
    Ok(Output { payload, summary: String::new() })
}

pub fn cmd_trace(config: &RunConfig, kind: TraceKind, f: &str, s: usize, h: usize, pairing: &PairingArgs) -> Result<Output, CliError> {
    let op = config.symbol()?;
    let k = config.seed();
    let f = parse(f).map_err(Error::from)?;
    let req = SeminormRequest::new(s, k)?;
    let csv = match kind {
        TraceKind::Orbit => {
            let settings = OrbitSettings { max_steps: config.n, margin: None, bound: 1e8 };
            let rep = stable_orbits_with(op.phi(), &k, op.domain(), &settings);
            let mut csv = Csv::new(&["step", "hull_min", "hull_max", "union_min", "union_max"]);
            for (i, (h, u)) in rep.hull_per_step.iter().zip(&rep.running_union).enumerate() {
                csv.row(&[i.to_string(), cell(h[0]), cell(h[1]), cell(u[0]), cell(u[1])]);
            }
            let summary = format!("orbit verdict: {}\n", rep.verdict.label());
            return Ok(Output { payload: csv.into_string(), summary });
        }
        TraceKind::Cesaro => {
            let mut csv = Csv::new(&["n", "x", "re", "im"]);
            let rows: Vec<Vec<Complex64>> =
                k.grid().iter().map(|&x| cesaro_means_at(&op, &f, config.n, s, x)).collect::<Result<_, _>>()?;
            for n in 0..config.n {
                for (x, means) in k.grid().iter().zip(&rows) {
                    csv.row(&[(n + 1).to_string(), cell(*x), cell(means[n].re), cell(means[n].im)]);
                }
            }
            csv
        }
        TraceKind::Conditions => {
            let a = check_vanishing_condition(&op, &req, h, config.n)?;
            let b = check_cesaro_bound_condition(&op, &req, h, config.n)?;
            let mut csv = Csv::new(&["s", "h", "n", "a_n", "b_n", "cesaro_avg", "cesaro_sup"]);
            let mut sum = 0.0;
            for n in 0..config.n {
                sum += b.values[n];
                let avg = sum / (n + 1) as f64;
                csv.row(&[s.to_string(), h.to_string(), (n + 1).to_string(), cell(a.values[n]), cell(b.values[n]), cell(avg), cell(b.cesaro_sup[n])]);
            }
            let summary = format!("vanishing trend: {}; cesaro-bound trend: {}\n", a.trend.label(), b.trend.label());
            return Ok(Output { payload: csv.into_string(), summary });
        }
        TraceKind::Vanishing => {
            let t = vanishing_power_check(&op, &f, &req, config.n)?;
            let mut csv = Csv::new(&["n", "a_n"]);
            for (n, v) in t.values.iter().enumerate() {
                csv.row(&[(n + 1).to_string(), cell(*v)]);
            }
            let summary = format!("trend: {}\n", t.trend.label());
            return Ok(Output { payload: csv.into_string(), summary });
        }
        TraceKind::Pairing => {
            let (u, psi) = pairing.resolve()?;
            let mut csv = Csv::new(&["m", "re", "im", "cesaro_re", "cesaro_im"]);
            let mut sum = Complex64::new(0.0, 0.0);
            for m in 1..=config.n {
                let v = distribution_pairing(&op, &u, m, &psi)?;
                sum += v;
                let avg = sum / m as f64;
                csv.row(&[m.to_string(), cell(v.re), cell(v.im), cell(avg.re), cell(avg.im)]);
            }
            csv
        }
    };
    Ok(Output { payload: csv.into_string(), summary: String::new() })
}

pub fn cmd_involution(config: &RunConfig, even_f: &str) -> Result<Output, CliError> {
    let f = parse(even_f).map_err(Error::from)?;
    let k = config.k.unwrap_or(CompactInterval::new(-10.0, 10.0, 1001).expect("valid interval"));
    // Second application needs x - y for y = φ(x), which can reach ~7|x|.
    let r = 2.0 + 64.0 * k.magnitude();
    let inv = EvenInvolution::certify(&f, &CompactInterval::new(-r, r, 4001)?)?;
    let mut csv = Csv::new(&["x", "phi", "defect"]);
    let mut worst: f64 = 0.0;
    for x in k.grid() {
        let y = inv.apply(x, config.tol)?;
        let back = inv.apply(y, config.tol)?;
        let defect = (back - x).abs();
        worst = worst.max(defect);
        csv.row(&[cell(x), cell(y), cell(defect)]);
    }
    let summary = format!("max defect: {}\nsampled sup |f'|: {}\n", fmt_f64(worst), fmt_f64(inv.lipschitz()));
    Ok(Output { payload: csv.into_string(), summary })
}

pub fn cmd_fixed_points(config: &RunConfig) -> Result<Output, CliError> {
    let phi = config.phi()?;
    let k = config.k.unwrap_or(CompactInterval::new(-10.0, 10.0, 2001).expect("valid interval"));
    let set = fixed_points(phi, &k, config.tol);
    let mut csv = Csv::new(&["x", "residual", "tangential", "bracket_lo", "bracket_hi"]);
    for p in &set.points {
        csv.row(&[cell(p.x), cell(p.residual), p.tangential.to_string(), cell(p.bracket[0]), cell(p.bracket[1])]);
    }
    Ok(Output { payload: csv.into_string(), summary: format!("{} fixed point(s)\n", set.len()) })
}

pub fn cmd_pair(config: &RunConfig, pairing: &PairingArgs, power: usize) -> Result<Output, CliError> {
    let op = config.symbol()?;
    let (u, psi) = pairing.resolve()?;
    let v = distribution_pairing(&op, &u, power, &psi)?;
    let mut csv = Csv::new(&["m", "re", "im"]);
    csv.row(&[power.to_string(), cell(v.re), cell(v.im)]);
    Ok(Output { payload: csv.into_string(), summary: String::new() })
}

/// Dispatches a parsed command line.
pub fn run(cli: &Cli) -> Result<(Output, Option<PathBuf>), CliError> {
    let (common, require_phi) = match &cli.command {
        Command::Involution { common, .. } => (common, false),
        Command::ParseCheck { common, .. }
        | Command::Diagnose { common }
        | Command::Trace { common, .. }
        | Command::FixedPoints { common }
        | Command::Pair { common, .. } => (common, true),
    };
    let config = RunConfig::from_args(common, require_phi)?;
    let output = match &cli.command {
        Command::ParseCheck { f, .. } => cmd_parse_check(&config, f.as_deref())?,
        Command::Diagnose { .. } => cmd_diagnose(&config)?,
        Command::Trace { kind, f, s, h, pairing, .. } => cmd_trace(&config, *kind, f, *s, *h, pairing)?,
        Command::Involution { even_f, .. } => cmd_involution(&config, even_f)?,
        Command::FixedPoints { .. } => cmd_fixed_points(&config)?,
        Command::Pair { pairing, power, .. } => cmd_pair(&config, pairing, *power)?,
    };
    Ok((output, config.out.clone()))
}

/// Runs the command line, writing payloads and diagnostics; returns the
/// process exit code.
pub fn main_with(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let structured = matches!(cli.command, Command::Diagnose { .. });
    match run(cli) {
        Ok((output, out)) => {
            let written = match &out {
                Some(path) => std::fs::write(path, &output.payload)
                    .map(|_| write!(stdout, "{}", output.summary))
                    .map_err(|e| e.to_string()),
                None => Ok(write!(stdout, "{}", output.payload).and_then(|_| write!(stderr, "{}", output.summary))),
            };
            match written {
                Ok(_) => EXIT_OK,
                Err(e) => {
                    let _ = writeln!(stderr, "error: cannot write output: {e}");
                    EXIT_NUMERICAL
                }
            }
        }
        Err(e) => {
            if structured {
                let _ = write!(stderr, "{}", error_json(e.code, &e.kind, &e.message));
            } else {
                let _ = writeln!(stderr, "error: {e}");
            }
            e.code
        }
    }
}
