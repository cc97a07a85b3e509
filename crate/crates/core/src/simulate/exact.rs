//! Exact law of the local time for integer holding times.
//!
//! With integer `τ` and integer horizon `t`, every `π_t` is a vector of
//! integer multiples of `1/t`. Dynamic programming over the elapsed time
//! `S_n < t` and the per-site time already accumulated enumerates the law
//! without sampling.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{MeasureVec, RateModel};

/// Size limits for exact enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExactCaps {
    pub max_t: u32,
    pub max_sites: usize,
}

impl Default for ExactCaps {
    fn default() -> Self {
        ExactCaps { max_t: 30, max_sites: 6 }
    }
}

/// Law of `π_t`, keyed by `t·π_t` (time units spent at each support site).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ExactLawRepr", into = "ExactLawRepr")]
pub struct ExactLaw {
    pub t: u32,
    pub sites: Vec<String>,
    pub law: BTreeMap<Vec<u32>, f64>,
}

/// JSON form: keys are comma-joined time units, e.g. `"2,1"`.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ExactLawRepr {
    t: u32,
    sites: Vec<String>,
    law: BTreeMap<String, f64>,
}

impl From<ExactLaw> for ExactLawRepr {
    fn from(e: ExactLaw) -> Self {
        let law = e
            .law
            .into_iter()
            .map(|(k, p)| (k.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(","), p))
            .collect();
        ExactLawRepr { t: e.t, sites: e.sites, law }
    }
}

impl TryFrom<ExactLawRepr> for ExactLaw {
    type Error = Error;
    fn try_from(r: ExactLawRepr) -> Result<Self> {
        let mut law = BTreeMap::new();
        for (k, p) in r.law {
            let key = k
                .split(',')
                .map(|c| c.trim().parse::<u32>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|_| Error::InvalidInput(format!("bad exact-law key {k:?}")))?;
            if key.len() != r.sites.len() {
                return Err(Error::LengthMismatch { expected: r.sites.len(), got: key.len() });
            }
            law.insert(key, p);
        }
        Ok(ExactLaw { t: r.t, sites: r.sites, law })
    }
}

impl ExactLaw {
    pub fn total(&self) -> f64 {
        self.law.values().sum()
    }

    /// Local-time weights of a key.
    pub fn weights(&self, key: &[u32]) -> Vec<f64> {
        key.iter().map(|&c| c as f64 / self.t as f64).collect()
    }

    /// Probability of the event `{π_t ∈ A}` for `A` given by a predicate on
    /// support-site weights.
    pub fn probability<F: Fn(&[f64]) -> bool>(&self, event: F) -> f64 {
        self.law.iter().filter(|(k, _)| event(&self.weights(k))).map(|(_, p)| p).sum()
    }

    /// The atom as a measure on `model`.
    pub fn measure(&self, model: &RateModel, key: &[u32]) -> Result<MeasureVec> {
        MeasureVec::absolutely_continuous(model, self.weights(key))
    }
}

pub fn exact_distribution(model: &RateModel, t: u32, caps: ExactCaps) -> Result<ExactLaw> {
    if t == 0 {
        return Err(Error::InvalidInput("horizon must be a positive integer".into()));
    }
    if t > caps.max_t {
        return Err(Error::SizeCap(format!("horizon {t} exceeds cap {}", caps.max_t)));
    }
    if model.n_support() > caps.max_sites {
        return Err(Error::SizeCap(format!("{} support sites exceed cap {}", model.n_support(), caps.max_sites)));
    }
    let taus = model
        .support()
        .iter()
        .map(|s| {
            let r = s.tau.round();
            if (s.tau - r).abs() < 1e-12 && r >= 1.0 {
                Ok(r as u32)
            } else {
                Err(Error::InvalidInput(format!("site `{}` has non-integer tau {}", s.label, s.tau)))
            }
        })
        .collect::<Result<Vec<u32>>>()?;
    let mu = model.mu();
    let m = taus.len();

    // layers[s]: partial paths with S_n = s < t, keyed by accumulated time per site
    let mut layers: Vec<BTreeMap<Vec<u32>, f64>> = vec![BTreeMap::new(); t as usize];
    layers[0].insert(vec![0; m], 1.0);
    let mut law: BTreeMap<Vec<u32>, f64> = BTreeMap::new();
    for s in 0..t {
        let layer = std::mem::take(&mut layers[s as usize]);
        for (key, p) in layer {
            for j in 0..m {
                let q = p * mu[j];
                let mut next = key.clone();
                if s + taus[j] >= t {
                    next[j] += t - s;
                    *law.entry(next).or_insert(0.0) += q;
                } else {
                    next[j] += taus[j];
                    *layers[(s + taus[j]) as usize].entry(next).or_insert(0.0) += q;
                }
            }
        }
    }
    Ok(ExactLaw { t, sites: model.support().iter().map(|s| s.label.clone()).collect(), law })
}
