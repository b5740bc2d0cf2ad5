use std::path::PathBuf;

use num_complex::Complex64;

use super::{CliError, CommonArgs, EXIT_PARSE, EXIT_PRECONDITION};
use crate::dynamics::{CompactInterval, DomainInterval};
use crate::ergodic::{DiagnosisConfig, Mode, WeightedSymbol};
use crate::expr::{parse, Expression};

/// Validated run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub phi: Option<Expression>,
    pub weight: Expression,
    pub alpha: Complex64,
    pub domain: DomainInterval,
    pub k: Option<CompactInterval>,
    pub smax: usize,
    pub n: usize,
    pub m: usize,
    pub mode: Mode,
    pub real_analytic: bool,
    pub assert_dense: bool,
    pub tol: f64,
    pub out: Option<PathBuf>,
}

fn parse_real(text: &str) -> Option<f64> {
    match text.trim() {
        "inf" | "+inf" => Some(f64::INFINITY),
        "-inf" => Some(f64::NEG_INFINITY),
        t => t.parse().ok(),
    }
}

fn split_reals(text: &str) -> Option<Vec<f64>> {
    text.split(',').map(parse_real).collect()
}

fn parse_pair(text: &str) -> Option<(f64, f64)> {
    match split_reals(text)?.as_slice() {
        [a, b] => Some((*a, *b)),
        _ => None,
    }
}

/// `"a,b,grid"` with a grid of at least 2 points.
pub(crate) fn parse_compact(text: &str) -> Result<CompactInterval, String> {
    let parts: Vec<&str> = text.split(',').collect();
    let [a, b, g] = parts.as_slice() else {
        return Err(format!("expected \"a,b,grid\", got {text:?}"));
    };
    let (Some(a), Some(b), Ok(g)) = (parse_real(a), parse_real(b), g.trim().parse::<usize>()) else {
        return Err(format!("expected \"a,b,grid\", got {text:?}"));
    };
    CompactInterval::new(a, b, g).map_err(|e| e.to_string())
}

/// `"a,b"` finite support interval.
pub(crate) fn parse_support(text: &str) -> Result<CompactInterval, String> {
    let (a, b) = parse_pair(text).ok_or_else(|| format!("expected \"a,b\", got {text:?}"))?;
    CompactInterval::new(a, b, 11).map_err(|e| e.to_string())
}

struct Collector {
    parse_errors: Vec<String>,
    violations: Vec<String>,
}

impl Collector {
    fn expr(&mut self, flag: &str, text: &str) -> Option<Expression> {
        match parse(text) {
            Ok(e) => Some(e),
            Err(e) => {
                self.parse_errors.push(format!("--{flag} {text:?}: {e}"));
                None
            }
        }
    }

    fn finish(self) -> Result<(), CliError> {
        if self.parse_errors.is_empty() && self.violations.is_empty() {
            return Ok(());
        }
        let code = if self.parse_errors.is_empty() { EXIT_PRECONDITION } else { EXIT_PARSE };
        let all: Vec<String> = self.parse_errors.into_iter().chain(self.violations).collect();
        Err(CliError::new(code, "invalid configuration", all.join("\n")))
    }
}

impl RunConfig {
    /// Parses every field and reports all violations together.
    pub fn from_args(args: &CommonArgs, require_phi: bool) -> Result<Self, CliError> {
        let mut c = Collector { parse_errors: Vec::new(), violations: Vec::new() };
        let phi = match &args.phi {
            Some(t) => c.expr("phi", t),
            None => {
                if require_phi {
                    c.violations.push("--phi is required".into());
                }
                None
            }
        };
        let weight = c.expr("weight", &args.weight);
        let alpha = match parse_pair(&args.alpha) {
            Some((re, im)) if re.is_finite() && im.is_finite() => Some(Complex64::new(re, im)),
            _ => {
                c.violations.push(format!("--alpha {:?}: expected finite \"re,im\"", args.alpha));
                None
            }
        };
        let domain = match parse_pair(&args.domain).map(|(lo, hi)| DomainInterval::new(lo, hi)) {
            Some(Ok(d)) => Some(d),
            _ => {
                c.violations.push(format!("--domain {:?}: expected \"lo,hi\" with lo < hi (\"inf\" allowed)", args.domain));
                None
            }
        };
        let k = match args.k.as_deref().map(parse_compact) {
            Some(Ok(k)) => Some(k),
            Some(Err(e)) => {
                c.violations.push(format!("--k: {e}"));
                None
            }
            None => None,
        };
        if let (Some(k), Some(d)) = (k, domain) {
            if k.distance_to_boundary(&d) <= 0.0 {
                c.violations.push(format!("--k [{}, {}] is not inside the domain", k.a(), k.b()));
            }
        }
        if args.smax > crate::jets::DEFAULT_ORDER_CAP {
            c.violations.push(format!("--smax {} exceeds the order cap {}", args.smax, crate::jets::DEFAULT_ORDER_CAP));
        }
        if args.n == 0 {
            c.violations.push("--n must be at least 1".into());
        }
        if args.m == 0 {
            c.violations.push("--m must be at least 1".into());
        }
        if !(args.tol.is_finite() && args.tol > 0.0) {
            c.violations.push(format!("--tol {} must be positive", args.tol));
        }
        c.finish()?;
        Ok(Self {
            phi,
            weight: weight.expect("checked"),
            alpha: alpha.expect("checked"),
            domain: domain.expect("checked"),
            k,
            smax: args.smax,
            n: args.n,
            m: args.m,
            mode: args.mode.into(),
            real_analytic: args.real_analytic,
            assert_dense: args.assert_dense,
            tol: args.tol,
            out: args.out.clone(),
        })
    }

    pub fn phi(&self) -> Result<&Expression, CliError> {
        self.phi.as_ref().ok_or_else(|| CliError::new(EXIT_PRECONDITION, "invalid configuration", "--phi is required"))
    }

    pub fn symbol(&self) -> Result<WeightedSymbol, CliError> {
        Ok(WeightedSymbol::new(self.phi()?.clone(), self.weight.clone(), self.alpha, self.domain)?)
    }

    /// Seed set: `--k` or the domain default with 21 points.
    pub fn seed(&self) -> CompactInterval {
        self.k.unwrap_or_else(|| self.domain.default_seed(21))
    }

    pub fn diagnosis(&self) -> DiagnosisConfig {
        DiagnosisConfig {
            mode: self.mode,
            real_analytic: self.real_analytic,
            assert_dense: self.assert_dense,
            tol: self.tol,
            powers: self.n,
            cesaro_terms: self.m,
            s_max: self.smax,
            seed: self.k,
            grid_size: self.k.map_or(21, |k| k.grid_size()),
            ..DiagnosisConfig::default()
        }
    }
}
