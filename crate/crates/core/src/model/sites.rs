//! Finite reference models and measures over them.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ext;
use crate::model::WaitingLaw;

/// Tolerance on the normalization of reference weights.
pub const WEIGHT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SupportSite {
    pub label: String,
    pub mu: f64,
    pub tau: f64,
}

/// A site carrying no reference mass. Measures may still charge it, at
/// cost `xi` per unit mass.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SingularSite {
    pub label: String,
    #[serde(with = "ext::real")]
    pub xi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Violation {
    EmptySupport,
    WeightsSum(f64),
    NonPositiveWeight { label: String, mu: f64 },
    NonPositiveTau { label: String, tau: f64 },
    InfiniteTau { label: String },
    NegativeXi { label: String, xi: f64 },
    NegativeXiInf(f64),
    DuplicateLabel(String),
    InvalidLaw { label: String, reason: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptySupport => write!(f, "model has no support sites"),
            Violation::WeightsSum(s) => write!(f, "weights sum {s} ≠ 1"),
            Violation::NonPositiveWeight { label, mu } => {
                write!(f, "site `{label}`: weight must be strictly positive, got {mu}")
            }
            Violation::NonPositiveTau { label, tau } => {
                write!(f, "site `{label}`: tau must be strictly positive, got {tau}")
            }
            Violation::InfiniteTau { label } => write!(f, "site `{label}`: tau must be finite"),
            Violation::NegativeXi { label, xi } => {
                write!(f, "site `{label}`: xi must lie in [0, +inf], got {xi}")
            }
            Violation::NegativeXiInf(x) => write!(f, "xi_inf must lie in [0, +inf], got {x}"),
            Violation::DuplicateLabel(l) => write!(f, "duplicate site label `{l}`"),
            Violation::InvalidLaw { label, reason } => write!(f, "state `{label}`: {reason}"),
        }
    }
}

/// Checks every invariant of a finite reference model and reports all
/// violations found.
pub fn validate(
    support: &[SupportSite],
    singular: &[SingularSite],
    xi_inf: f64,
) -> std::result::Result<(), Vec<Violation>> {
    let mut out = Vec::new();
    if support.is_empty() {
        out.push(Violation::EmptySupport);
    }
    let sum: f64 = support.iter().map(|s| s.mu).sum();
    if !support.is_empty() && !((sum - 1.0).abs() <= WEIGHT_TOL) {
        out.push(Violation::WeightsSum(sum));
    }
    for s in support {
        if !(s.mu > 0.0 && s.mu.is_finite()) {
            out.push(Violation::NonPositiveWeight { label: s.label.clone(), mu: s.mu });
        }
        if !(s.tau > 0.0) {
            out.push(Violation::NonPositiveTau { label: s.label.clone(), tau: s.tau });
        } else if !s.tau.is_finite() {
            out.push(Violation::InfiniteTau { label: s.label.clone() });
        }
    }
    for s in singular {
        if !(s.xi >= 0.0) {
            out.push(Violation::NegativeXi { label: s.label.clone(), xi: s.xi });
        }
    }
    if !(xi_inf >= 0.0) {
        out.push(Violation::NegativeXiInf(xi_inf));
    }
    let mut seen = HashSet::new();
    for label in support.iter().map(|s| &s.label).chain(singular.iter().map(|s| &s.label)) {
        if !seen.insert(label) {
            out.push(Violation::DuplicateLabel(label.clone()));
        }
    }
    if out.is_empty() {
        Ok(())
    } else {
        Err(out)
    }
}

/// Finite reference model: support sites with weight `μ̄` and holding time
/// `τ`, singular sites with exponent `ξ`, and the boundary exponent `ξ∞`.
///
/// At a support site `ξ` is implicitly `+inf`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RateModelRepr", into = "RateModelRepr")]
pub struct RateModel {
    support: Vec<SupportSite>,
    singular: Vec<SingularSite>,
    xi_inf: f64,
    infinite_mean: bool,
    cumulative: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RateModelRepr {
    support_sites: Vec<SupportSite>,
    #[serde(default)]
    singular_sites: Vec<SingularSite>,
    #[serde(with = "ext::real")]
    xi_inf: f64,
    #[serde(default)]
    infinite_mean: bool,
}

impl TryFrom<RateModelRepr> for RateModel {
    type Error = Error;
    fn try_from(r: RateModelRepr) -> Result<Self> {
        Ok(RateModel::new(r.support_sites, r.singular_sites, r.xi_inf)?.with_infinite_mean(r.infinite_mean))
    }
}

impl From<RateModel> for RateModelRepr {
    fn from(m: RateModel) -> Self {
        RateModelRepr {
            support_sites: m.support,
            singular_sites: m.singular,
            xi_inf: m.xi_inf,
            infinite_mean: m.infinite_mean,
        }
    }
}

impl RateModel {
    pub fn new(support: Vec<SupportSite>, singular: Vec<SingularSite>, xi_inf: f64) -> Result<Self> {
        validate(&support, &singular, xi_inf).map_err(Error::InvalidModel)?;
        let mut acc = 0.0;
        let cumulative = support
            .iter()
            .map(|s| {
                acc += s.mu;
                acc
            })
            .collect();
        Ok(RateModel { support, singular, xi_inf, infinite_mean: false, cumulative })
    }

    /// Convenience constructor with labels `s0, s1, ...`, no singular sites
    /// and `ξ∞ = +inf`.
    pub fn from_weights(mu: &[f64], tau: &[f64]) -> Result<Self> {
        if mu.len() != tau.len() {
            return Err(Error::LengthMismatch { expected: mu.len(), got: tau.len() });
        }
        let support = mu
            .iter()
            .zip(tau)
            .enumerate()
            .map(|(i, (&mu, &tau))| SupportSite { label: format!("s{i}"), mu, tau })
            .collect();
        RateModel::new(support, Vec::new(), f64::INFINITY)
    }

    /// Marks the model as the truncation of a source whose holding times
    /// have infinite mean.
    pub fn with_infinite_mean(mut self, flag: bool) -> Self {
        self.infinite_mean = flag;
        self
    }

    pub fn with_singular(self, singular: Vec<SingularSite>) -> Result<Self> {
        let flag = self.infinite_mean;
        Ok(RateModel::new(self.support, singular, self.xi_inf)?.with_infinite_mean(flag))
    }

    pub fn with_xi_inf(mut self, xi_inf: f64) -> Result<Self> {
        validate(&self.support, &self.singular, xi_inf).map_err(Error::InvalidModel)?;
        self.xi_inf = xi_inf;
        Ok(self)
    }

    /// Re-runs [`validate`] on the stored parts.
    pub fn validate(&self) -> std::result::Result<(), Vec<Violation>> {
        validate(&self.support, &self.singular, self.xi_inf)
    }

    pub fn support(&self) -> &[SupportSite] {
        &self.support
    }

    pub fn singular(&self) -> &[SingularSite] {
        &self.singular
    }

    pub fn xi_inf(&self) -> f64 {
        self.xi_inf
    }

    pub fn infinite_mean(&self) -> bool {
        self.infinite_mean
    }

    pub fn n_support(&self) -> usize {
        self.support.len()
    }

    pub fn n_singular(&self) -> usize {
        self.singular.len()
    }

    pub fn mu(&self) -> Vec<f64> {
        self.support.iter().map(|s| s.mu).collect()
    }

    pub fn tau(&self) -> Vec<f64> {
        self.support.iter().map(|s| s.tau).collect()
    }

    pub fn xi(&self) -> Vec<f64> {
        self.singular.iter().map(|s| s.xi).collect()
    }

    /// `μ̄(τ)`.
    pub fn mean_tau(&self) -> f64 {
        self.support.iter().map(|s| s.mu * s.tau).sum()
    }

    /// Index of a support site drawn by inverse CDF from `u ∈ [0,1)`.
    pub fn site_for_uniform(&self, u: f64) -> usize {
        let target = u * self.cumulative[self.cumulative.len() - 1];
        self.cumulative.partition_point(|&c| c <= target).min(self.support.len() - 1)
    }

    /// Labels of all sites, support first then singular.
    pub fn labels(&self) -> Vec<&str> {
        self.support.iter().map(|s| s.label.as_str()).chain(self.singular.iter().map(|s| s.label.as_str())).collect()
    }

    /// Position of `label` in [`Self::labels`].
    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels().iter().position(|l| *l == label)
    }

    /// Indices of singular sites with `ξ = 0`.
    pub fn zero_set(&self) -> Vec<usize> {
        self.singular.iter().enumerate().filter(|(_, s)| s.xi == 0.0).map(|(i, _)| i).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JumpState {
    pub label: String,
    pub p: f64,
    pub law: WaitingLaw,
}

/// Pure jump process: jump to state `y` with probability `p_y`, then hold
/// for a time drawn from `φ_y`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<JumpState>", into = "Vec<JumpState>")]
pub struct JumpModel {
    states: Vec<JumpState>,
}

impl TryFrom<Vec<JumpState>> for JumpModel {
    type Error = Error;
    fn try_from(states: Vec<JumpState>) -> Result<Self> {
        JumpModel::new(states)
    }
}

impl From<JumpModel> for Vec<JumpState> {
    fn from(m: JumpModel) -> Self {
        m.states
    }
}

impl JumpModel {
    pub fn new(states: Vec<JumpState>) -> Result<Self> {
        let mut out = Vec::new();
        if states.is_empty() {
            out.push(Violation::EmptySupport);
        }
        let sum: f64 = states.iter().map(|s| s.p).sum();
        if !states.is_empty() && !((sum - 1.0).abs() <= WEIGHT_TOL) {
            out.push(Violation::WeightsSum(sum));
        }
        let mut seen = HashSet::new();
        for s in &states {
            if !(s.p > 0.0 && s.p.is_finite()) {
                out.push(Violation::NonPositiveWeight { label: s.label.clone(), mu: s.p });
            }
            if let Err(e) = s.law.validate() {
                out.push(Violation::InvalidLaw { label: s.label.clone(), reason: e.to_string() });
            }
            if !seen.insert(&s.label) {
                out.push(Violation::DuplicateLabel(s.label.clone()));
            }
        }
        if out.is_empty() {
            Ok(JumpModel { states })
        } else {
            Err(Error::InvalidModel(out))
        }
    }

    /// One state with probability 1.
    pub fn single(label: &str, law: WaitingLaw) -> Result<Self> {
        JumpModel::new(vec![JumpState { label: label.to_string(), p: 1.0, law }])
    }

    pub fn states(&self) -> &[JumpState] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// `μ̄(τ) = Σ p_y E_y[T]`, possibly `+inf`.
    pub fn mean_tau(&self) -> f64 {
        self.states.iter().map(|s| s.p * s.law.mean()).sum()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.states.iter().position(|s| s.label == label)
    }
}

/// A (sub-)probability over the sites of a [`RateModel`]: absolutely
/// continuous weights on support sites, singular weights on singular sites,
/// and the remaining defect `1 − ν(X)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureVec {
    pub ac: Vec<f64>,
    pub sing: Vec<f64>,
}

/// Tolerance on total mass exceeding one.
pub const MASS_TOL: f64 = 1e-12;

impl MeasureVec {
    pub fn new(model: &RateModel, ac: Vec<f64>, sing: Vec<f64>) -> Result<Self> {
        if ac.len() != model.n_support() {
            return Err(Error::LengthMismatch { expected: model.n_support(), got: ac.len() });
        }
        if sing.len() != model.n_singular() {
            return Err(Error::LengthMismatch { expected: model.n_singular(), got: sing.len() });
        }
        if let Some(w) = ac.iter().chain(&sing).find(|w| !(**w >= 0.0 && w.is_finite())) {
            return Err(Error::InvalidInput(format!("measure weights must be finite and ≥ 0, got {w}")));
        }
        let m = MeasureVec { ac, sing };
        if m.total() > 1.0 + MASS_TOL {
            return Err(Error::InvalidInput(format!("measure has total mass {} > 1", m.total())));
        }
        Ok(m)
    }

    /// Absolutely continuous measure from support-site weights.
    pub fn absolutely_continuous(model: &RateModel, ac: Vec<f64>) -> Result<Self> {
        MeasureVec::new(model, ac, vec![0.0; model.n_singular()])
    }

    /// Builds a measure from one flat vector in [`RateModel::labels`] order.
    pub fn from_flat(model: &RateModel, flat: &[f64]) -> Result<Self> {
        let m = model.n_support();
        if flat.len() != m + model.n_singular() {
            return Err(Error::LengthMismatch { expected: m + model.n_singular(), got: flat.len() });
        }
        MeasureVec::new(model, flat[..m].to_vec(), flat[m..].to_vec())
    }

    /// Builds a measure from a label → mass map; unlisted sites get mass 0.
    pub fn from_labels(model: &RateModel, map: &BTreeMap<String, f64>) -> Result<Self> {
        let mut flat = vec![0.0; model.n_support() + model.n_singular()];
        for (label, &w) in map {
            let i = model.index_of(label).ok_or_else(|| Error::UnknownLabel(label.clone()))?;
            flat[i] = w;
        }
        MeasureVec::from_flat(model, &flat)
    }

    /// Point mass on the site at flat index `i`.
    pub fn dirac(model: &RateModel, i: usize) -> Result<Self> {
        let mut flat = vec![0.0; model.n_support() + model.n_singular()];
        *flat.get_mut(i).ok_or_else(|| Error::InvalidInput(format!("site index {i} out of range")))? = 1.0;
        MeasureVec::from_flat(model, &flat)
    }

    pub fn flat(&self) -> Vec<f64> {
        self.ac.iter().chain(&self.sing).copied().collect()
    }

    pub fn to_labels(&self, model: &RateModel) -> BTreeMap<String, f64> {
        model.labels().into_iter().map(String::from).zip(self.flat()).collect()
    }

    pub fn ac_mass(&self) -> f64 {
        self.ac.iter().sum()
    }

    pub fn sing_mass(&self) -> f64 {
        self.sing.iter().sum()
    }

    pub fn total(&self) -> f64 {
        self.ac_mass() + self.sing_mass()
    }

    /// `1 − ν(X)`; anything within [`MASS_TOL`] of zero is rounding and
    /// reads as 0.
    pub fn defect(&self) -> f64 {
        let d = 1.0 - self.total();
        if d <= MASS_TOL {
            0.0
        } else {
            d
        }
    }

    pub fn is_absolutely_continuous(&self) -> bool {
        self.sing.iter().all(|w| *w == 0.0)
    }

    /// Total variation distance `½ Σ |ν_i − λ_i| + ½ |defect_ν − defect_λ|`.
    pub fn tv_distance(&self, other: &MeasureVec) -> f64 {
        let sites: f64 =
            self.ac.iter().zip(&other.ac).chain(self.sing.iter().zip(&other.sing)).map(|(a, b)| (a - b).abs()).sum();
        0.5 * (sites + (self.defect() - other.defect()).abs())
    }

    /// `α·self + (1 − α)·other`.
    pub fn mix(&self, alpha: f64, other: &MeasureVec) -> MeasureVec {
        let lerp = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| alpha * x + (1.0 - alpha) * y).collect();
        MeasureVec { ac: lerp(&self.ac, &other.ac), sing: lerp(&self.sing, &other.sing) }
    }
}
