//! The weighted composition operator `C_{w,φ} f = w · (f ∘ φ)` with
//! `w = α · weight(x)`: powers and their derivatives, Cesàro means,
//! seminorms, the vanishing and Cesàro-boundedness condition traces, the
//! dual action on distributions, and the diagnosis procedure.

mod conditions;
mod diagnose;
mod pairing;
mod power;
mod shift;

pub use conditions::{
    check_cesaro_bound_condition, check_vanishing_condition, classify_cesaro_sup, classify_sequence, condition_traces,
    vanishing_power_check, ConditionKind, ConditionTrace, Trend,
};
pub use diagnose::{diagnose, DiagnosisConfig, DiagnosisReport, Mode, OrbitCheck, TrailEntry, Verdict, Witness};
pub use pairing::{cesaro_pairing, distribution_pairing, DistributionSample, TestFunction};
pub use power::{
    apply_power_derivative, cesaro_mean, cesaro_means_at, power_jet, power_jet_with, power_sequence, seminorm,
};
pub use shift::antiderivative_shift_check;

use num_complex::Complex64;

use crate::dynamics::{CompactInterval, DomainInterval};
use crate::expr::Expression;
use crate::jets::DEFAULT_ORDER_CAP;
use crate::{Error, Result};

/// Symbol `φ`, real weight shape and complex scalar of `C_{w,φ}` on an
/// open interval.
#[derive(Debug, Clone)]
pub struct WeightedSymbol {
    phi: Expression,
    weight: Expression,
    alpha: Complex64,
    domain: DomainInterval,
}

impl WeightedSymbol {
    pub fn new(phi: Expression, weight: Expression, alpha: Complex64, domain: DomainInterval) -> Result<Self> {
        if !alpha.re.is_finite() || !alpha.im.is_finite() {
            return Err(Error::NonFinite("weight scalar".into()));
        }
        Ok(Self { phi, weight, alpha, domain })
    }

    /// Unweighted composition operator on ℝ.
    pub fn composition(phi: Expression) -> Self {
        Self { phi, weight: Expression::constant(1.0), alpha: Complex64::new(1.0, 0.0), domain: DomainInterval::real_line() }
    }

    pub fn with_weight(mut self, weight: Expression, alpha: Complex64) -> Self {
        self.weight = weight;
        self.alpha = alpha;
        self
    }

    pub fn with_domain(mut self, domain: DomainInterval) -> Self {
        self.domain = domain;
        self
    }

    pub fn phi(&self) -> &Expression {
        &self.phi
    }

    pub fn weight(&self) -> &Expression {
        &self.weight
    }

    pub fn alpha(&self) -> Complex64 {
        self.alpha
    }

    pub fn domain(&self) -> &DomainInterval {
        &self.domain
    }

    /// The full weight as a constant `α · c`, if the shape is constant.
    pub fn constant_weight(&self) -> Option<Complex64> {
        self.weight.as_constant().map(|c| self.alpha * c)
    }

    /// Whether `w ≡ 1`.
    pub fn is_unweighted(&self) -> bool {
        self.constant_weight() == Some(Complex64::new(1.0, 0.0))
    }

    /// `w(x)`.
    pub fn weight_at(&self, x: f64) -> Result<Complex64> {
        Ok(self.alpha * self.weight.evaluate(x)?)
    }
}

/// Derivative order `s` and compact set `K` of the seminorm `‖·‖_{s,K}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeminormRequest {
    pub s: usize,
    pub k: CompactInterval,
}

impl SeminormRequest {
    pub fn new(s: usize, k: CompactInterval) -> Result<Self> {
        if s > DEFAULT_ORDER_CAP {
            return Err(Error::OrderCap { order: s, cap: DEFAULT_ORDER_CAP });
        }
        Ok(Self { s, k })
    }
}
