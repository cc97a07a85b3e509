//! Model definitions as read from configuration files.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ext;
use crate::model::{
    discretize, validate, Discretized, JumpModel, JumpState, LawSpec, RateModel, SingularSite, SupportSite, Violation,
    WaitingLaw,
};

/// Either a finite site model (`support_sites`, `singular_sites`, `xi_inf`)
/// or a jump model (`jump_states` plus `discretization`).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub support_sites: Vec<SupportSite>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub singular_sites: Vec<SingularSite>,
    #[serde(default, with = "ext::real_opt", skip_serializing_if = "Option::is_none")]
    pub xi_inf: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub jump_states: Vec<JumpStateSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub discretization: Option<DiscretizationSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JumpStateSpec {
    pub label: String,
    pub p: f64,
    pub law: LawSpecRaw,
}

/// Law parameters kept unchecked until validation, so that bad values are
/// reported as model violations rather than parse errors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LawSpecRaw {
    pub kind: String,
    pub params: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiscretizationSpec {
    pub edges: Vec<f64>,
    pub tail_threshold: f64,
}

/// A model ready for simulation and rate evaluation.
#[derive(Debug, Clone, PartialEq)]
pub enum SourceModel {
    Sites(RateModel),
    Jump(Discretized),
}

impl SourceModel {
    /// The finite site model all measures live on.
    pub fn rate_model(&self) -> &RateModel {
        match self {
            SourceModel::Sites(m) => m,
            SourceModel::Jump(d) => &d.model,
        }
    }
}

impl ModelSpec {
    fn is_jump(&self) -> bool {
        !self.jump_states.is_empty() || self.discretization.is_some()
    }

    /// Every model invariant violated by this definition.
    pub fn violations(&self) -> Vec<Violation> {
        if self.is_jump() {
            let mut out = Vec::new();
            let states: Vec<JumpState> = self
                .jump_states
                .iter()
                .filter_map(|s| match law_of(&s.law) {
                    Ok(law) => Some(JumpState { label: s.label.clone(), p: s.p, law }),
                    Err(e) => {
                        out.push(Violation::InvalidLaw { label: s.label.clone(), reason: e.to_string() });
                        None
                    }
                })
                .collect();
            if out.is_empty() {
                if let Err(Error::InvalidModel(v)) = JumpModel::new(states) {
                    out.extend(v);
                }
            }
            out
        } else {
            validate(&self.support_sites, &self.singular_sites, self.xi_inf.unwrap_or(f64::INFINITY))
                .err()
                .unwrap_or_default()
        }
    }

    pub fn build(&self) -> Result<SourceModel> {
        if self.is_jump() {
            if !self.support_sites.is_empty() || !self.singular_sites.is_empty() || self.xi_inf.is_some() {
                return Err(Error::InvalidInput("a model is either site-based or jump-based, not both".into()));
            }
            let states = self
                .jump_states
                .iter()
                .map(|s| Ok(JumpState { label: s.label.clone(), p: s.p, law: law_of(&s.law)? }))
                .collect::<Result<Vec<_>>>()?;
            let jm = JumpModel::new(states)?;
            let disc = self
                .discretization
                .as_ref()
                .ok_or_else(|| Error::InvalidInput("jump models need a `discretization` block".into()))?;
            Ok(SourceModel::Jump(discretize(&jm, &disc.edges, disc.tail_threshold)?))
        } else {
            Ok(SourceModel::Sites(RateModel::new(
                self.support_sites.clone(),
                self.singular_sites.clone(),
                self.xi_inf.unwrap_or(f64::INFINITY),
            )?))
        }
    }

    pub fn from_rate_model(m: &RateModel) -> Self {
        ModelSpec {
            support_sites: m.support().to_vec(),
            singular_sites: m.singular().to_vec(),
            xi_inf: Some(m.xi_inf()),
            ..Default::default()
        }
    }
}

fn law_of(raw: &LawSpecRaw) -> Result<WaitingLaw> {
    WaitingLaw::try_from(LawSpec { kind: raw.kind.clone(), params: raw.params.clone() })
}
