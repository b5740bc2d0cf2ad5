//! JSON and CSV emission with fixed 17-significant-digit floats.

use num_complex::Complex64;
use serde::ser::Error as _;
use serde::{Serialize, Serializer};
use serde_json::value::RawValue;

use super::RunConfig;
use crate::dynamics::CompactInterval;
use crate::ergodic::{ConditionTrace, DiagnosisReport, Witness};

pub const SCHEMA: &str = "ergodic-lab/1";

/// Float written as `{:.16e}`; infinities as the strings `"inf"`/`"-inf"`,
/// NaN as `null`.
#[derive(Debug, Clone, Copy)]
pub struct Num(pub f64);

pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v:.16e}")
    }
}

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let v = self.0;
        if v.is_nan() {
            serializer.serialize_none()
        } else if v.is_infinite() {
            serializer.serialize_str(&fmt_f64(v))
        } else {
            RawValue::from_string(fmt_f64(v)).map_err(S::Error::custom)?.serialize(serializer)
        }
    }
}

fn nums(values: &[f64]) -> Vec<Num> {
    values.iter().map(|&v| Num(v)).collect()
}

fn complex(z: Complex64) -> [Num; 2] {
    [Num(z.re), Num(z.im)]
}

#[derive(Serialize)]
struct ConfigJson {
    phi: Option<String>,
    weight: String,
    alpha: [Num; 2],
    domain: [Num; 2],
    k: Option<(Num, Num, usize)>,
    smax: usize,
    n: usize,
    m: usize,
    mode: &'static str,
    real_analytic: bool,
    assert_dense: bool,
    tol: Num,
}

impl ConfigJson {
    fn new(c: &RunConfig) -> Self {
        Self {
            phi: c.phi.as_ref().map(|e| e.to_string()),
            weight: c.weight.to_string(),
            alpha: complex(c.alpha),
            domain: [Num(c.domain.lower()), Num(c.domain.upper())],
            k: c.k.map(|k| (Num(k.a()), Num(k.b()), k.grid_size())),
            smax: c.smax,
            n: c.n,
            m: c.m,
            mode: c.mode.label(),
            real_analytic: c.real_analytic,
            assert_dense: c.assert_dense,
            tol: Num(c.tol),
        }
    }
}

#[derive(Serialize)]
struct TrailJson<'a> {
    theorem: &'a str,
    rule: &'a str,
    evidence: &'a str,
}

#[derive(Serialize)]
struct OrbitJson {
    map: &'static str,
    seed_set: [Num; 2],
    margin: Num,
    bound: Num,
    verdict: &'static str,
    escape_step: Option<usize>,
    enclosure: Option<[Num; 2]>,
    hull_per_step: Vec<[Num; 2]>,
    running_union: Vec<[Num; 2]>,
}

#[derive(Serialize)]
struct TraceJson {
    kind: &'static str,
    s: usize,
    h: usize,
    k: [Num; 2],
    trend: &'static str,
    values: Vec<Num>,
    cesaro_sup: Vec<Num>,
}

impl TraceJson {
    fn new(t: &ConditionTrace) -> Self {
        Self {
            kind: t.kind.label(),
            s: t.s,
            h: t.h,
            k: [Num(t.k.a()), Num(t.k.b())],
            trend: t.trend.label(),
            values: nums(&t.values),
            cesaro_sup: nums(&t.cesaro_sup),
        }
    }
}

#[derive(Serialize)]
struct PeriodJson {
    period: usize,
    defect: Num,
}

#[derive(Serialize)]
struct TracesJson {
    ladder: Vec<(Num, Num, usize)>,
    orbits: Vec<OrbitJson>,
    conditions: Vec<TraceJson>,
    periodic_defects: Vec<PeriodJson>,
}

#[derive(Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
enum WitnessJson {
    Escape { map: &'static str, seed: Num, step: usize, value: Option<Num> },
    InvolutionDefect { x: Num, defect: Num },
    Condition { condition: &'static str, s: usize, h: usize, k: [Num; 2], trend: &'static str },
}

impl WitnessJson {
    fn new(w: &Witness) -> Self {
        match w {
            Witness::Escape { map, seed, step, value } => {
                WitnessJson::Escape { map, seed: Num(*seed), step: *step, value: value.map(Num) }
            }
            Witness::InvolutionDefect { x, defect } => WitnessJson::InvolutionDefect { x: Num(*x), defect: Num(*defect) },
            Witness::Condition { kind, s, h, k, trend } => {
                WitnessJson::Condition { condition: kind, s: *s, h: *h, k: [Num(k[0]), Num(k[1])], trend: trend.label() }
            }
        }
    }
}

#[derive(Serialize)]
struct ReportJson<'a> {
    schema: &'static str,
    config: ConfigJson,
    verdict: &'static str,
    theorem_trail: Vec<TrailJson<'a>>,
    traces: TracesJson,
    witnesses: Vec<WitnessJson>,
    warnings: &'a [String],
}

fn ladder_entry(k: &CompactInterval) -> (Num, Num, usize) {
    (Num(k.a()), Num(k.b()), k.grid_size())
}

fn pair(v: &[f64; 2]) -> [Num; 2] {
    [Num(v[0]), Num(v[1])]
}

/// Pretty-printed JSON report, newline terminated.
pub fn diagnosis_json(config: &RunConfig, report: &DiagnosisReport) -> String {
    let orbits = report
        .orbit_checks
        .iter()
        .map(|c| {
            let r = &c.report;
            OrbitJson {
                map: c.map,
                seed_set: [Num(r.seed_set.a()), Num(r.seed_set.b())],
                margin: Num(r.margin),
                bound: Num(r.bound),
                verdict: r.verdict.label(),
                escape_step: r.witness.map(|w| w.step),
                enclosure: r.enclosure.as_ref().map(pair),
                hull_per_step: r.hull_per_step.iter().map(pair).collect(),
                running_union: r.running_union.iter().map(pair).collect(),
            }
        })
        .collect();
    let json = ReportJson {
        schema: SCHEMA,
        config: ConfigJson::new(config),
        verdict: report.verdict.label(),
        theorem_trail: report
            .theorem_trail
            .iter()
            .map(|t| TrailJson { theorem: &t.theorem, rule: &t.rule, evidence: &t.evidence })
            .collect(),
        traces: TracesJson {
            ladder: report.ladder.iter().map(ladder_entry).collect(),
            orbits,
            conditions: report.traces.iter().map(TraceJson::new).collect(),
            periodic_defects: report.periodic_defects.iter().map(|&(period, d)| PeriodJson { period, defect: Num(d) }).collect(),
        },
        witnesses: report.witnesses.iter().map(WitnessJson::new).collect(),
        warnings: &report.warnings,
    };
    let mut text = serde_json::to_string_pretty(&json).expect("report serialization cannot fail");
    text.push('\n');
    text
}

#[derive(Serialize)]
struct ErrorBody<'a> {
    code: i32,
    kind: &'a str,
    message: &'a str,
}

#[derive(Serialize)]
struct ErrorJson<'a> {
    schema: &'static str,
    error: ErrorBody<'a>,
}

/// Structured error object for machine consumers.
pub fn error_json(code: i32, kind: &str, message: &str) -> String {
    let body = ErrorJson { schema: SCHEMA, error: ErrorBody { code, kind, message } };
    serde_json::to_string(&body).expect("error serialization cannot fail") + "\n"
}

/// Comma-separated table with a header row and LF line endings.
pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        let mut text = header.join(",");
        text.push('\n');
        Self { text }
    }

    pub fn row(&mut self, cells: &[String]) {
        self.text.push_str(&cells.join(","));
        self.text.push('\n');
    }

    pub fn into_string(self) -> String {
        self.text
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_have_seventeen_digits() {
        assert_eq!(fmt_f64(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt_f64(-2.0), "-2.0000000000000000e0");
        assert_eq!(serde_json::to_string(&[Num(1.5), Num(f64::INFINITY), Num(f64::NAN)]).unwrap(), "[1.5000000000000000e0,\"inf\",null]");
    }

    #[test]
    fn csv_layout() {
        let mut csv = Csv::new(&["a", "b"]);
        csv.row(&["1".into(), "2".into()]);
        assert_eq!(csv.into_string(), "a,b\n1,2\n");
    }
}
