//! Zero set of the rate.
//!
//! Without singular sites of zero cost the rate vanishes only at the
//! stationary measure `μ`. A singular site with `ξ = 0` opens a segment of
//! minimizers `α μ + (1 − α) λ` with `λ` concentrated on the zero set `E`.

use serde::{Deserialize, Serialize};

use crate::model::{MeasureVec, RateModel};
use crate::rate::{rate_primal, stationary_measure};

/// Mixing weights checked along the minimizer segment.
pub const ALPHA_GRID: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];
/// Mass moved by a perturbation.
pub const PERTURBATION: f64 = 0.05;
/// A claimed minimizer passes when its rate is at most this.
pub const ZERO_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MinimizerCase {
    /// `E = ∅`: the stationary measure is the unique zero.
    #[serde(rename = "1")]
    Unique,
    /// `E ≠ ∅`: a segment of zeros between `μ` and measures on `E`.
    #[serde(rename = "2A")]
    Segment,
    /// The source law had infinite mean before truncation.
    #[serde(rename = "2B")]
    InfiniteMean,
}

impl MinimizerCase {
    pub fn label(self) -> &'static str {
        match self {
            MinimizerCase::Unique => "1",
            MinimizerCase::Segment => "2A",
            MinimizerCase::InfiniteMean => "2B",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinimizerCheck {
    pub alpha: f64,
    pub measure: MeasureVec,
    #[serde(with = "crate::ext::real")]
    pub rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbationCheck {
    pub alpha: f64,
    pub tv: f64,
    #[serde(with = "crate::ext::real")]
    pub rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinimizerReport {
    pub case: MinimizerCase,
    /// Labels of singular sites with `ξ = 0`.
    pub zero_set: Vec<String>,
    pub stationary: MeasureVec,
    pub minimizers: Vec<MinimizerCheck>,
    pub perturbations: Vec<PerturbationCheck>,
    /// All claimed minimizers have rate ≤ [`ZERO_TOL`] and all perturbations
    /// a strictly positive rate.
    pub verified: bool,
}

/// Moves [`PERTURBATION`] of mass off `nu`: between support sites when one
/// holds enough, otherwise from the zero set to the first support site.
fn perturb(nu: &MeasureVec) -> Option<MeasureVec> {
    let mut out = nu.clone();
    let (big, mass) =
        nu.ac.iter().enumerate().fold((0, f64::NEG_INFINITY), |acc, (i, &w)| if w > acc.1 { (i, w) } else { acc });
    if nu.ac.len() >= 2 && mass >= PERTURBATION {
        let to = if big == 0 { 1 } else { 0 };
        out.ac[big] -= PERTURBATION;
        out.ac[to] += PERTURBATION;
        return Some(out);
    }
    let (e, &s) = nu.sing.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1))?;
    if s < PERTURBATION || nu.ac.is_empty() {
        return None;
    }
    out.sing[e] -= PERTURBATION;
    out.ac[0] += PERTURBATION;
    Some(out)
}

pub fn minimizer_classification(model: &RateModel) -> MinimizerReport {
    let zero = model.zero_set();
    let mu = stationary_measure(model);
    let case = if model.infinite_mean() {
        MinimizerCase::InfiniteMean
    } else if zero.is_empty() {
        MinimizerCase::Unique
    } else {
        MinimizerCase::Segment
    };

    let mut minimizers = Vec::new();
    if zero.is_empty() {
        minimizers.push(MinimizerCheck { alpha: 1.0, rate: rate_primal(model, &mu), measure: mu.clone() });
    } else {
        // λ spreads evenly over E
        let mut lambda = MeasureVec { ac: vec![0.0; model.n_support()], sing: vec![0.0; model.n_singular()] };
        for &i in &zero {
            lambda.sing[i] = 1.0 / zero.len() as f64;
        }
        for alpha in ALPHA_GRID {
            let nu = mu.mix(alpha, &lambda);
            minimizers.push(MinimizerCheck { alpha, rate: rate_primal(model, &nu), measure: nu });
        }
    }

    let perturbations: Vec<PerturbationCheck> = minimizers
        .iter()
        .filter_map(|c| {
            let p = perturb(&c.measure)?;
            Some(PerturbationCheck { alpha: c.alpha, tv: p.tv_distance(&c.measure), rate: rate_primal(model, &p) })
        })
        .collect();

    let verified = minimizers.iter().all(|c| c.rate <= ZERO_TOL) && perturbations.iter().all(|p| p.rate > ZERO_TOL);
    MinimizerReport {
        case,
        zero_set: zero.iter().map(|&i| model.singular()[i].label.clone()).collect(),
        stationary: mu,
        minimizers,
        perturbations,
        verified,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;

    #[test]
    fn no_singular_sites_is_case_one() {
        let r = minimizer_classification(&presets::m2());
        assert_eq!(r.case, MinimizerCase::Unique);
        assert!(r.zero_set.is_empty());
        assert_eq!(r.minimizers.len(), 1);
        assert!(r.verified);
    }

    #[test]
    fn zero_site_opens_a_segment() {
        let r = minimizer_classification(&presets::m2_with_zero_site());
        assert_eq!(r.case, MinimizerCase::Segment);
        assert_eq!(r.zero_set, vec!["e".to_string()]);
        for c in &r.minimizers {
            assert!(c.rate <= ZERO_TOL, "alpha {}: {}", c.alpha, c.rate);
        }
        assert_eq!(r.perturbations.len(), 5);
        for p in &r.perturbations {
            assert!((p.tv - PERTURBATION).abs() < 1e-12);
            assert!(p.rate >= 1e-3, "alpha {}: {}", p.alpha, p.rate);
        }
        assert!(r.verified);
    }

    #[test]
    fn case_labels_serialize() {
        assert_eq!(serde_json::to_string(&MinimizerCase::Segment).unwrap(), "\"2A\"");
        assert_eq!(MinimizerCase::InfiniteMean.label(), "2B");
    }
}
