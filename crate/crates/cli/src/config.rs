//! Experiment files.
//!
//! One TOML file holds a `[model]` table plus one optional table per
//! command. Unknown keys are rejected everywhere. `--set a.b=value`
//! overrides are applied to the parsed tree before it is typed, so they go
//! through the same checks as the file itself.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use renewal_ldp::model::LawSpecRaw;
use renewal_ldp::presets::HotParticleConfig;
use renewal_ldp::{ModelSpec, SourceModel};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub model: Option<ModelSpec>,
    #[serde(default)]
    pub simulate: Option<SimulateConfig>,
    #[serde(default)]
    pub exact: Option<ExactConfig>,
    #[serde(default)]
    pub rate: Option<RateConfig>,
    #[serde(default)]
    pub ldp: Option<LdpConfig>,
    #[serde(default)]
    pub xi: Option<XiConfig>,
    #[serde(default)]
    pub recover: Option<RecoverConfig>,
    #[serde(default)]
    pub examples: Option<ExamplesConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    pub t: f64,
    /// Number of independent paths; path `i` uses seed `seed + i`.
    #[serde(default = "one")]
    pub n: usize,
    #[serde(default)]
    pub seed: u64,
    /// Also list the visited sites of each path.
    #[serde(default)]
    pub dump: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExactConfig {
    pub t: Vec<u32>,
    #[serde(default = "default_max_t")]
    pub max_t: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RateConfig {
    /// Label → mass; the stationary measure when absent.
    #[serde(default)]
    pub nu: Option<BTreeMap<String, f64>>,
    #[serde(default = "default_tol")]
    pub tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LdpMethod {
    Exact,
    #[default]
    Mc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LdpConfig {
    pub center: BTreeMap<String, f64>,
    pub eps: f64,
    pub t_grid: Vec<f64>,
    #[serde(default)]
    pub method: LdpMethod,
    #[serde(default = "default_replicas")]
    pub n: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub importance_sampling: bool,
    #[serde(default = "default_max_t")]
    pub max_t: u32,
}

/// Either an explicit `law` or the `state` label of a jump model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct XiConfig {
    #[serde(default)]
    pub law: Option<LawSpecRaw>,
    #[serde(default)]
    pub state: Option<String>,
    pub l_grid: Vec<f64>,
    /// Samples to draw; 0 uses the analytic tail.
    #[serde(default)]
    pub n: usize,
    #[serde(default)]
    pub seed: u64,
}

/// Target on the states of a jump model: `ac` is mass spread over the
/// holding law, `atoms` is mass escaping to infinite holding time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RecoverConfig {
    #[serde(default)]
    pub ac: BTreeMap<String, f64>,
    #[serde(default)]
    pub atoms: BTreeMap<String, f64>,
    pub l_schedule: Vec<f64>,
    pub m_schedule: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExamplesConfig {
    #[serde(default)]
    pub hot: HotConfig,
    /// Kinetic energy levels as multiples of the stationary mean.
    #[serde(default = "default_levels")]
    pub levels: Vec<f64>,
}

impl Default for ExamplesConfig {
    fn default() -> Self {
        ExamplesConfig { hot: HotConfig::default(), levels: default_levels() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HotConfig {
    pub n: usize,
    pub beta: f64,
    pub points: usize,
}

impl Default for HotConfig {
    fn default() -> Self {
        let d = HotParticleConfig::default();
        HotConfig { n: d.n, beta: d.beta, points: d.points }
    }
}

impl From<&HotConfig> for HotParticleConfig {
    fn from(h: &HotConfig) -> Self {
        HotParticleConfig { n: h.n, beta: h.beta, points: h.points }
    }
}

fn one() -> usize {
    1
}

fn default_max_t() -> u32 {
    30
}

fn default_tol() -> f64 {
    1e-9
}

fn default_replicas() -> usize {
    20_000
}

fn default_levels() -> Vec<f64> {
    vec![0.25, 0.5, 0.75, 1.25, 1.5, 2.0]
}

/// Reads `path`, applies `overrides` (each `dotted.key=value`) and types
/// the result.
pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<ExperimentConfig> {
    let mut tree = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|source| CliError::Read { path: p.into(), source })?;
            text.parse::<toml::Table>().map_err(|e| CliError::Parse(format!("{}: {e}", p.display())))?
        }
        None => toml::Table::new(),
    };
    for o in overrides {
        apply_override(&mut tree, o)?;
    }
    ExperimentConfig::deserialize(toml::Value::Table(tree)).map_err(|e| CliError::Parse(e.to_string()))
}

/// `a.b.c=value`; the value is read as a TOML literal, or as a bare string
/// when it is not one.
pub fn apply_override(tree: &mut toml::Table, assignment: &str) -> Result<()> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| CliError::Parse(format!("override `{assignment}` is not of the form key=value")))?;
    let path: Vec<&str> = key.trim().split('.').collect();
    if path.iter().any(|p| p.is_empty()) {
        return Err(CliError::Parse(format!("override key `{key}` has an empty segment")));
    }
    let value = format!("v = {}", raw.trim())
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.trim().to_string()));

    let (last, parents) = path.split_last().expect("nonempty key");
    let mut node = tree;
    for p in parents {
        let entry = node.entry(p.to_string()).or_insert_with(|| toml::Value::Table(toml::Table::new()));
        node =
            entry.as_table_mut().ok_or_else(|| CliError::Parse(format!("override `{key}`: `{p}` is not a table")))?;
    }
    node.insert(last.to_string(), value);
    Ok(())
}

impl ExperimentConfig {
    pub fn model(&self) -> Result<&ModelSpec> {
        self.model.as_ref().ok_or_else(|| CliError::Parse("config has no [model] table".into()))
    }

    /// Builds the model, reporting every violated invariant at once.
    pub fn build_model(&self) -> Result<SourceModel> {
        let spec = self.model()?;
        let violations = spec.violations();
        if !violations.is_empty() {
            let msg = violations.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; ");
            return Err(CliError::Validation(msg));
        }
        Ok(spec.build()?)
    }

    /// Problems with the command tables given the built model: unknown site
    /// or state labels and out-of-range parameters.
    pub fn problems(&self, model: &SourceModel) -> Vec<String> {
        let rm = model.rate_model();
        let labels: Vec<&str> = rm.labels();
        let mut out = Vec::new();
        let mut check_labels = |what: &str, map: &BTreeMap<String, f64>, known: &[&str]| {
            for (k, v) in map {
                if !known.contains(&k.as_str()) {
                    out.push(format!("{what}: unknown label `{k}`"));
                }
                if !(*v >= 0.0 && v.is_finite()) {
                    out.push(format!("{what}: mass of `{k}` must be finite and ≥ 0, got {v}"));
                }
            }
        };
        if let Some(r) = &self.rate {
            if let Some(nu) = &r.nu {
                check_labels("rate.nu", nu, &labels);
            }
        }
        if let Some(l) = &self.ldp {
            check_labels("ldp.center", &l.center, &labels);
        }
        let states: Vec<&str> = match model {
            SourceModel::Jump(d) => d.jump.states().iter().map(|s| s.label.as_str()).collect(),
            SourceModel::Sites(_) => Vec::new(),
        };
        if let Some(r) = &self.recover {
            check_labels("recover.ac", &r.ac, &states);
            check_labels("recover.atoms", &r.atoms, &states);
        }
        if let Some(x) = &self.xi {
            if let Some(s) = &x.state {
                if !states.contains(&s.as_str()) {
                    out.push(format!("xi.state: unknown jump state `{s}`"));
                }
            }
        }
        out.extend(self.parameter_problems());
        out
    }

    /// Range checks that need no model.
    pub fn parameter_problems(&self) -> Vec<String> {
        let mut out = Vec::new();
        let positive = |x: f64| x > 0.0 && x.is_finite();
        if let Some(s) = &self.simulate {
            if !positive(s.t) {
                out.push(format!("simulate.t must be positive and finite, got {}", s.t));
            }
            if s.n == 0 {
                out.push("simulate.n must be at least 1".into());
            }
        }
        if let Some(e) = &self.exact {
            if e.t.is_empty() || e.t.contains(&0) {
                out.push("exact.t must list positive horizons".into());
            }
        }
        if let Some(r) = &self.rate {
            if !positive(r.tol) {
                out.push(format!("rate.tol must be positive, got {}", r.tol));
            }
        }
        if let Some(l) = &self.ldp {
            if !positive(l.eps) {
                out.push(format!("ldp.eps must be positive, got {}", l.eps));
            }
            if l.t_grid.is_empty() || !l.t_grid.iter().all(|&t| positive(t)) {
                out.push("ldp.t_grid must list positive horizons".into());
            }
            if l.method == LdpMethod::Exact && l.t_grid.iter().any(|t| t.fract() != 0.0) {
                out.push("ldp.t_grid must be integral for the exact method".into());
            }
        }
        if let Some(x) = &self.xi {
            if x.law.is_some() == x.state.is_some() {
                out.push("xi needs exactly one of `law` or `state`".into());
            }
        }
        if let Some(r) = &self.recover {
            if r.l_schedule.len() != r.m_schedule.len() || r.l_schedule.is_empty() {
                out.push("recover.l_schedule and recover.m_schedule must be nonempty and of equal length".into());
            }
        }
        out
    }

    pub fn section<'a, T>(&self, name: &str, block: &'a Option<T>) -> Result<&'a T> {
        block.as_ref().ok_or_else(|| CliError::Parse(format!("config has no [{name}] table")))
    }
}
