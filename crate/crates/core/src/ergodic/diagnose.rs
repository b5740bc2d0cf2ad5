use super::conditions::{condition_traces, ConditionTrace, Trend};
use super::WeightedSymbol;
use crate::dynamics::{
    derivative_sign, periodic_defect, stable_orbits_with, CompactInterval, InverseMap, OrbitReport,
    OrbitSettings, OrbitVerdict,
};
use crate::jets::SmoothFunction;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Smooth functions `ℰ(X)`.
    Smooth,
    /// Distributions `𝒟′(X)`.
    Distributions,
}

impl Mode {
    pub fn label(&self) -> &'static str {
        match self {
            Mode::Smooth => "smooth",
            Mode::Distributions => "distributions",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosisConfig {
    pub mode: Mode,
    /// User assertion that `φ` is real analytic.
    pub real_analytic: bool,
    /// User assertion that `{w ≠ 0}` is dense; skips the grid evidence.
    pub assert_dense: bool,
    pub tol: f64,
    /// Operator powers per vanishing trace (`N`).
    pub powers: usize,
    /// Cesàro terms per boundedness trace (`M`).
    pub cesaro_terms: usize,
    pub s_max: usize,
    /// Largest seed set of the ladder; defaults from the domain.
    pub seed: Option<CompactInterval>,
    /// Number of nested seed sets (half-width halves each rung).
    pub ladder: usize,
    pub grid_size: usize,
    /// Escape magnitude bound for orbit checks.
    pub bound: f64,
}

impl Default for DiagnosisConfig {
    fn default() -> Self {
        Self {
            mode: Mode::Smooth,
            real_analytic: false,
            assert_dense: false,
            tol: 1e-9,
            powers: 200,
            cesaro_terms: 200,
            s_max: 3,
            seed: None,
            ladder: 3,
            grid_size: 21,
            bound: 1e8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    MeanErgodicCertified,
    NotMeanErgodicWitnessed,
    EvidenceForMeanErgodic,
    EvidenceAgainst,
    Inconclusive,
}

impl Verdict {
    pub fn label(&self) -> &'static str {
        match self {
            Verdict::MeanErgodicCertified => "mean-ergodic-certified",
            Verdict::NotMeanErgodicWitnessed => "not-mean-ergodic-witnessed",
            Verdict::EvidenceForMeanErgodic => "evidence-for-mean-ergodic",
            Verdict::EvidenceAgainst => "evidence-against",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrailEntry {
    pub theorem: String,
    pub rule: String,
    pub evidence: String,
}

impl TrailEntry {
    fn new(theorem: &str, rule: &str, evidence: impl Into<String>) -> Self {
        Self { theorem: theorem.into(), rule: rule.into(), evidence: evidence.into() }
    }
}

/// Stable-orbit run of `φ` (`map = "phi"`) or `φ^{-1}` (`"phi-inverse"`).
#[derive(Debug, Clone, PartialEq)]
pub struct OrbitCheck {
    pub map: &'static str,
    pub report: OrbitReport,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Witness {
    Escape { map: &'static str, seed: f64, step: usize, value: Option<f64> },
    InvolutionDefect { x: f64, defect: f64 },
    Condition { kind: &'static str, s: usize, h: usize, k: [f64; 2], trend: Trend },
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosisReport {
    pub verdict: Verdict,
    pub theorem_trail: Vec<TrailEntry>,
    pub ladder: Vec<CompactInterval>,
    pub orbit_checks: Vec<OrbitCheck>,
    pub traces: Vec<ConditionTrace>,
    /// `(p, max |φ^p(x) - x|)` on the largest seed set.
    pub periodic_defects: Vec<(usize, f64)>,
    pub witnesses: Vec<Witness>,
    pub warnings: Vec<String>,
}

impl DiagnosisReport {
    fn finish(mut self, verdict: Verdict) -> Self {
        self.verdict = verdict;
        self
    }
}

fn build_ladder(op: &WeightedSymbol, config: &DiagnosisConfig) -> Vec<CompactInterval> {
    let grid = config.grid_size.max(2);
    let base = config.seed.unwrap_or_else(|| op.domain().default_seed(grid));
    let base = base.with_grid(grid).unwrap_or(base);
    let rungs = config.ladder.max(1);
    (0..rungs).map(|i| base.scaled(0.5f64.powi((rungs - 1 - i) as i32))).collect()
}

fn check_preconditions(op: &WeightedSymbol, config: &DiagnosisConfig, ladder: &[CompactInterval]) -> Vec<String> {
    let mut failures = Vec::new();
    for k in ladder {
        if k.distance_to_boundary(op.domain()) <= 0.0 {
            failures.push(format!("seed set [{}, {}] is not inside the domain", k.a(), k.b()));
        }
    }
    let Some(largest) = ladder.last() else { return failures };
    let grid = largest.grid();
    if !config.assert_dense {
        let weight_small = |x: f64| op.weight_at(x).map(|w| w.norm() < 1e-12);
        for cell in grid.windows(2) {
            let points = [cell[0], 0.5 * (cell[0] + cell[1]), cell[1]];
            match points.iter().map(|&x| weight_small(x)).collect::<crate::Result<Vec<bool>>>() {
                Ok(small) if small.iter().all(|s| *s) => {
                    failures.push(format!("weight vanishes on the grid cell [{}, {}]", cell[0], cell[1]));
                    break;
                }
                Ok(_) => {}
                Err(e) => {
                    failures.push(format!("weight cannot be evaluated: {e}"));
                    break;
                }
            }
        }
    }
    if config.mode == Mode::Distributions {
        match derivative_sign(op.phi(), &grid) {
            Ok(Some(_)) => {}
            Ok(None) => failures.push("symbol derivative vanishes or changes sign on the seed grid".into()),
            Err(e) => failures.push(format!("symbol derivative cannot be evaluated: {e}")),
        }
    }
    failures
}

fn orbit_sweep<F: SmoothFunction + ?Sized>(
    map: &F,
    label: &'static str,
    op: &WeightedSymbol,
    config: &DiagnosisConfig,
    ladder: &[CompactInterval],
    report: &mut DiagnosisReport,
) -> Option<Witness> {
    let settings = OrbitSettings { max_steps: config.powers, margin: None, bound: config.bound };
    for k in ladder {
        let run = stable_orbits_with(map, k, op.domain(), &settings);
        let verdict = run.verdict;
        let witness = run.witness;
        report.orbit_checks.push(OrbitCheck { map: label, report: run });
        match verdict {
            OrbitVerdict::EscapeDetected { .. } => {
                let w = witness.expect("escape verdict carries a witness");
                return Some(Witness::Escape { map: label, seed: w.seed, step: w.step, value: w.value });
            }
            OrbitVerdict::Inconclusive => report
                .warnings
                .push(format!("{label}: stable-orbit check inconclusive on [{}, {}]", k.a(), k.b())),
            OrbitVerdict::StableEvidence => {}
        }
    }
    None
}

fn escape_evidence(w: &Witness) -> String {
    match w {
        Witness::Escape { map, seed, step, value } => match value {
            Some(v) => format!("{map} orbit of {seed} leaves the admissible region at step {step} (value {v:e})"),
            None => format!("{map} orbit of {seed} cannot be continued at step {step}"),
        },
        _ => String::new(),
    }
}

fn all_stable(report: &DiagnosisReport, label: &str) -> bool {
    report
        .orbit_checks
        .iter()
        .filter(|c| c.map == label)
        .all(|c| c.report.verdict == OrbitVerdict::StableEvidence)
}

/// Runs the decision procedure:
///
/// 1. stable orbits of `φ` on the seed ladder (an escape rules out mean
///    ergodicity);
/// 2. in distribution mode, stable orbits of `φ^{-1}`;
/// 3. in distribution mode with a real-analytic `φ` and `w ≡ 1`, the
///    involution test `φ∘φ = id`;
/// 4. in smooth mode, the vanishing and Cesàro-bound condition traces.
pub fn diagnose(op: &WeightedSymbol, config: &DiagnosisConfig) -> DiagnosisReport {
    let ladder = build_ladder(op, config);
    let mut report = DiagnosisReport {
        verdict: Verdict::Inconclusive,
        theorem_trail: vec![TrailEntry::new(
            "Theorem 2.5(a)",
            "mean ergodicity and uniform mean ergodicity coincide; one verdict covers both",
            match config.mode {
                Mode::Smooth => "the space of smooth functions is Montel",
                Mode::Distributions => "the space of distributions is Montel",
            },
        )],
        ladder: ladder.clone(),
        orbit_checks: Vec::new(),
        traces: Vec::new(),
        periodic_defects: Vec::new(),
        witnesses: Vec::new(),
        warnings: Vec::new(),
    };

    let failures = check_preconditions(op, config, &ladder);
    if !failures.is_empty() {
        for f in failures {
            report.theorem_trail.push(TrailEntry::new("precondition", "hypothesis check failed", f));
        }
        return report.finish(Verdict::Inconclusive);
    }
    let density = if config.assert_dense { "asserted by the user" } else { "grid evidence" };
    report.warnings.push(format!("density of the non-vanishing set of w: {density}"));

    let orbit_theorem = match config.mode {
        Mode::Smooth => "Theorem 3.2",
        Mode::Distributions => "Theorem 4.4",
    };

    // Step 1.
    if let Some(w) = orbit_sweep(op.phi(), "phi", op, config, &ladder, &mut report) {
        report.theorem_trail.push(TrailEntry::new(
            orbit_theorem,
            "mean ergodicity requires stable orbits of the symbol",
            escape_evidence(&w),
        ));
        report.witnesses.push(w);
        return report.finish(Verdict::NotMeanErgodicWitnessed);
    }

    if config.mode == Mode::Distributions {
        // Step 2.
        let inverse = InverseMap::new(op.phi(), *op.domain());
        if let Some(w) = orbit_sweep(&inverse, "phi-inverse", op, config, &ladder, &mut report) {
            report.theorem_trail.push(TrailEntry::new(
                "Theorem 4.4",
                "mean ergodicity on distributions requires stable orbits of the inverse symbol",
                escape_evidence(&w),
            ));
            report.witnesses.push(w);
            return report.finish(Verdict::NotMeanErgodicWitnessed);
        }
        let stable = all_stable(&report, "phi") && all_stable(&report, "phi-inverse");
        report.theorem_trail.push(TrailEntry::new(
            "Theorem 4.4",
            "stable orbits of the symbol and its inverse",
            if stable { "no escape; stable evidence on every seed set" } else { "no escape; some runs inconclusive" },
        ));

        // Step 3.
        if !config.real_analytic || !op.is_unweighted() {
            report.theorem_trail.push(TrailEntry::new(
                "Theorem 4.9",
                "involution test not applicable",
                if config.real_analytic { "weight is not identically 1" } else { "real analyticity not asserted" },
            ));
            report
                .warnings
                .push("no decision rule is implemented for this case on distributions; verdict left open".into());
            return report.finish(Verdict::Inconclusive);
        }
        return involution_step(op, config, &ladder, report);
    }

    // Step 4.
    let mut any_diverging: Option<Witness> = None;
    let mut all_good = all_stable(&report, "phi");
    for k in &ladder {
        match condition_traces(op, k, config.s_max, config.powers, config.cesaro_terms) {
            Ok(pairs) => {
                for (vanishing, cesaro) in pairs {
                    if vanishing.trend != Trend::Vanishing || cesaro.trend != Trend::Bounded {
                        all_good = false;
                    }
                    if vanishing.trend == Trend::Diverging && any_diverging.is_none() {
                        any_diverging = Some(Witness::Condition {
                            kind: "vanishing",
                            s: vanishing.s,
                            h: vanishing.h,
                            k: [k.a(), k.b()],
                            trend: Trend::Diverging,
                        });
                    }
                    report.traces.push(vanishing);
                    report.traces.push(cesaro);
                }
            }
            Err(e) => {
                all_good = false;
                report.warnings.push(format!("condition traces on [{}, {}] failed: {e}", k.a(), k.b()));
            }
        }
    }
    let summary = format!(
        "{} traces over s <= {}, h <= s, {} seed sets",
        report.traces.len(),
        config.s_max,
        ladder.len()
    );
    if let Some(w) = any_diverging {
        let evidence = match &w {
            Witness::Condition { s, h, k, .. } => format!("vanishing trace diverges for s = {s}, h = {h} on [{}, {}]", k[0], k[1]),
            _ => unreachable!(),
        };
        report.theorem_trail.push(TrailEntry::new(
            "Theorem 3.2",
            "(ii) => (iii): the vanishing condition is necessary",
            evidence,
        ));
        report.witnesses.push(w);
        return report.finish(Verdict::EvidenceAgainst);
    }
    if all_good {
        report.theorem_trail.push(TrailEntry::new(
            "Theorem 3.2",
            "(i) => (ii): stable orbits, vanishing and Cesàro-bound conditions are sufficient",
            format!("{summary}: all vanishing / bounded"),
        ));
        return report.finish(Verdict::EvidenceForMeanErgodic);
    }
    report.theorem_trail.push(TrailEntry::new(
        "Theorem 3.2",
        "neither the sufficient nor the necessary condition is decided",
        format!("{summary}: some traces inconclusive"),
    ));
    report.finish(Verdict::Inconclusive)
}

fn involution_step(op: &WeightedSymbol, config: &DiagnosisConfig, ladder: &[CompactInterval], mut report: DiagnosisReport) -> DiagnosisReport {
    let phi = op.phi();
    let mut worst = (f64::NAN, 0.0f64);
    for k in ladder {
        for x in k.grid() {
            let defect = match phi.value(x).and_then(|y| phi.value(y)) {
                Ok(v) => (v - x).abs(),
                Err(e) => {
                    report.warnings.push(format!("involution defect at {x} failed: {e}"));
                    return report.finish(Verdict::Inconclusive);
                }
            };
            if worst.0.is_nan() || defect > worst.1 {
                worst = (x, defect);
            }
        }
    }
    if let Some(largest) = ladder.last() {
        for p in 2..=6 {
            if let Ok(d) = periodic_defect(phi, largest, p) {
                report.periodic_defects.push((p, d));
            }
        }
    }
    let (x, defect) = worst;
    if defect <= config.tol {
        report.theorem_trail.push(TrailEntry::new(
            "Theorem 4.9",
            "(iv) => (ii), (iii), (i): a real analytic involution yields a mean ergodic operator",
            format!("max |phi(phi(x)) - x| = {defect:e} <= tol = {:e} on the seed ladder", config.tol),
        ));
        return report.finish(Verdict::MeanErgodicCertified);
    }
    if defect > 10.0 * config.tol {
        report.theorem_trail.push(TrailEntry::new(
            "Theorem 4.9",
            "(ii) => (iv) by contraposition: a non-involution is not mean ergodic",
            format!("|phi(phi({x})) - {x}| = {defect:e} > 10 tol"),
        ));
        let periods: Vec<String> = report.periodic_defects.iter().map(|(p, d)| format!("p = {p}: {d:e}")).collect();
        report.theorem_trail.push(TrailEntry::new(
            "Corollary 4.10",
            "periodicity check phi^p = id for p <= 6",
            periods.join(", "),
        ));
        if let Some((p, _)) = report.periodic_defects.iter().find(|(p, d)| *p > 2 && *d <= config.tol) {
            report.warnings.push(format!("phi^{p} = id on the largest seed set while phi is not an involution"));
        }
        report.witnesses.push(Witness::InvolutionDefect { x, defect });
        return report.finish(Verdict::NotMeanErgodicWitnessed);
    }
    report.warnings.push(format!("involution defect {defect:e} lies between tol and 10 tol"));
    report.theorem_trail.push(TrailEntry::new("Theorem 4.9", "involution test undecided", format!("defect {defect:e}")));
    report.finish(Verdict::Inconclusive)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn cites(report: &DiagnosisReport, theorem: &str) -> bool {
        report.theorem_trail.iter().any(|t| t.theorem == theorem)
    }

    fn dist() -> DiagnosisConfig {
        DiagnosisConfig { mode: Mode::Distributions, real_analytic: true, ..DiagnosisConfig::default() }
    }

    #[test]
    fn halving_on_distributions() {
        let op = WeightedSymbol::composition(parse("x/2").unwrap());
        let r = diagnose(&op, &dist());
        assert_eq!(r.verdict, Verdict::NotMeanErgodicWitnessed);
        assert!(cites(&r, "Theorem 4.4"));
        assert!(matches!(r.witnesses[0], Witness::Escape { map: "phi-inverse", .. }));
    }

    #[test]
    fn halving_on_smooth_functions() {
        let op = WeightedSymbol::composition(parse("x/2").unwrap());
        let r = diagnose(&op, &DiagnosisConfig::default());
        assert_eq!(r.verdict, Verdict::EvidenceForMeanErgodic, "{:?}", r.warnings);
        assert_eq!(r.traces.len(), 3 * 10 * 2);
        assert!(cites(&r, "Theorem 3.2"));
    }

    #[test]
    fn involution_is_certified() {
        let op = WeightedSymbol::composition(parse("-3*x+sqrt(8*x^2+2)").unwrap());
        let r = diagnose(&op, &dist());
        assert_eq!(r.verdict, Verdict::MeanErgodicCertified);
        assert!(cites(&r, "Theorem 4.9"));
    }

    #[test]
    fn non_involution_is_witnessed() {
        let op = WeightedSymbol::composition(parse("x/2 + sin(x)/4").unwrap());
        let r = diagnose(&op, &dist());
        // 1/4 <= φ′ <= 3/4, so the inverse expands and escapes.
        assert_eq!(r.verdict, Verdict::NotMeanErgodicWitnessed);
    }

    #[test]
    fn stable_non_involution_fails_the_involution_test() {
        let op = WeightedSymbol::composition(parse("x + sin(x)/10").unwrap());
        let r = diagnose(&op, &dist());
        assert_eq!(r.verdict, Verdict::NotMeanErgodicWitnessed);
        assert!(cites(&r, "Theorem 4.9") && cites(&r, "Corollary 4.10"));
        assert!(matches!(r.witnesses[0], Witness::InvolutionDefect { .. }));
        let not_analytic = diagnose(&op, &DiagnosisConfig { real_analytic: false, ..dist() });
        assert_eq!(not_analytic.verdict, Verdict::Inconclusive);
    }

    #[test]
    fn doubling_escapes_in_smooth_mode() {
        let op = WeightedSymbol::composition(parse("2*x").unwrap());
        let r = diagnose(&op, &DiagnosisConfig { seed: Some(CompactInterval::new(1.0, 2.0, 5).unwrap()), ..DiagnosisConfig::default() });
        assert_eq!(r.verdict, Verdict::NotMeanErgodicWitnessed);
        assert!(cites(&r, "Theorem 3.2"));
    }

    #[test]
    fn large_constant_weight_is_evidence_against() {
        let op = WeightedSymbol::composition(parse("x/2").unwrap()).with_weight(parse("2").unwrap(), num_complex::Complex64::new(1.0, 0.0));
        let r = diagnose(&op, &DiagnosisConfig::default());
        assert_eq!(r.verdict, Verdict::EvidenceAgainst);
    }

    #[test]
    fn vanishing_weight_fails_preconditions() {
        let op = WeightedSymbol::composition(parse("x/2").unwrap()).with_weight(parse("0").unwrap(), num_complex::Complex64::new(1.0, 0.0));
        let r = diagnose(&op, &DiagnosisConfig::default());
        assert_eq!(r.verdict, Verdict::Inconclusive);
        assert!(cites(&r, "precondition"));
        let r = diagnose(&op, &DiagnosisConfig { assert_dense: true, ..DiagnosisConfig::default() });
        assert_ne!(r.verdict, Verdict::Inconclusive);
    }
}
