//! Report envelope and per-command result types.
//!
//! Every report is `{schema_version, command, seed, result}`. Extended real
//! values (`+inf` rates) are written as the string `"inf"`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use renewal_ldp::ext;
use renewal_ldp::harness::ObservableRate;
use renewal_ldp::simulate::MomentEstimate;
use renewal_ldp::{DualCertificate, ExactLaw, LdpReport, MinimizerReport, TailFit};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Report {
    pub schema_version: u32,
    /// Seed actually used; absent for deterministic commands.
    pub seed: Option<u64>,
    #[serde(flatten)]
    pub body: Body,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", content = "result", rename_all = "lowercase")]
pub enum Body {
    Validate(ValidateResult),
    Simulate(SimulateResult),
    Exact(Vec<ExactLaw>),
    Rate(RateResult),
    Dual(DualResult),
    Minimizers(MinimizerReport),
    Ldp(LdpReport),
    Xi(XiResult),
    Recover(RecoverResult),
    Examples(ExamplesResult),
}

impl Body {
    pub fn command(&self) -> &'static str {
        match self {
            Body::Validate(_) => "validate",
            Body::Simulate(_) => "simulate",
            Body::Exact(_) => "exact",
            Body::Rate(_) => "rate",
            Body::Dual(_) => "dual",
            Body::Minimizers(_) => "minimizers",
            Body::Ldp(_) => "ldp",
            Body::Xi(_) => "xi",
            Body::Recover(_) => "recover",
            Body::Examples(_) => "examples",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidateResult {
    /// `sites` or `jump`.
    pub kind: String,
    pub support_sites: usize,
    pub singular_sites: usize,
    pub labels: Vec<String>,
    #[serde(with = "ext::real")]
    pub xi_inf: f64,
    pub infinite_mean: bool,
    pub zero_set: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathSummary {
    pub seed: u64,
    pub n_t: usize,
    pub pi_t: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub visited: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulateResult {
    pub t: f64,
    pub paths: Vec<PathSummary>,
    /// `E[N_t]/t`, present with at least 100 paths.
    pub renewal_rate: Option<MomentEstimate>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateResult {
    pub nu: BTreeMap<String, f64>,
    #[serde(with = "ext::real")]
    pub primal: f64,
    #[serde(with = "ext::real")]
    pub dual: f64,
    /// `ν̄ ∝ ν/τ` on support sites; absent when `ν` has no such mass.
    pub nubar: Option<BTreeMap<String, f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualResult {
    pub nu: BTreeMap<String, f64>,
    pub certificate: DualCertificate,
    /// `μ̄` tilted by the certificate, which equals `ν̄` at the optimum.
    pub tilted_mu: Option<BTreeMap<String, f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct XiResult {
    pub source: String,
    #[serde(with = "ext::real")]
    pub abscissa: f64,
    pub fit: TailFit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecoverStepSummary {
    pub l: f64,
    pub m: f64,
    pub support_sites: usize,
    #[serde(with = "ext::real")]
    pub j_value: f64,
    #[serde(with = "ext::real")]
    pub convex_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecoverResult {
    pub ac: BTreeMap<String, f64>,
    pub atoms: BTreeMap<String, f64>,
    /// Rate of the target on the finest discretization.
    #[serde(with = "ext::real")]
    pub target_rate: f64,
    pub steps: Vec<RecoverStepSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SanovExample {
    pub mu: Vec<f64>,
    pub nu: Vec<f64>,
    pub rate: f64,
    pub relative_entropy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateTail {
    pub label: String,
    pub p: f64,
    #[serde(with = "ext::real")]
    pub xi: f64,
    #[serde(with = "ext::real")]
    pub mean: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JumpExample {
    pub states: Vec<StateTail>,
    #[serde(with = "ext::real")]
    pub xi_inf: f64,
    pub support_sites: usize,
    pub infinite_mean: bool,
    /// Rate of the stationary measure of the discretized model.
    pub stationary_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HotExample {
    pub n: usize,
    pub beta: f64,
    pub points: usize,
    pub sites: usize,
    /// Stationary mean kinetic energy.
    pub mean_kinetic: f64,
    pub zero_set: Vec<String>,
    pub levels: Vec<KineticLevel>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KineticLevel {
    pub multiple: f64,
    pub rate: ObservableSummary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservableSummary {
    pub level: f64,
    #[serde(with = "ext::real")]
    pub primal: f64,
    #[serde(with = "ext::real")]
    pub dual: f64,
    pub theta: f64,
    /// Mass the minimizer puts on the zero set.
    pub stall_mass: f64,
}

impl ObservableSummary {
    pub fn new(r: &ObservableRate) -> Self {
        ObservableSummary {
            level: r.level,
            primal: r.primal,
            dual: r.dual,
            theta: r.theta,
            stall_mass: r.argmin.sing.iter().sum(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExamplesResult {
    pub sanov: SanovExample,
    pub jump: JumpExample,
    pub poisson: JumpExample,
    pub hot_particle: HotExample,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LdpCsvRow {
    pub t: f64,
    pub p: f64,
    pub stderr: f64,
    pub method: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryCsvRow {
    pub seed: u64,
    pub t: f64,
    #[serde(rename = "N_t")]
    pub n_t: usize,
    pub site: String,
    pub weight: f64,
}
