//! Recovery sequences for measures with singular atoms.
//!
//! An atom of mass `s` sitting at `(y, +inf)` is replaced by `s ρ`, where
//!
//! ```text
//! ρ = τ μ̄(· | A) / μ̄(τ | A),   A = {y} × [L, M]
//! ```
//!
//! is the size-biased law of the holding time on the window. Its rate is
//! `I(ρ) = −log μ̄(A) / μ̄(τ | A)`, which tends to `ξ(y, +inf)` as the window
//! moves out. The approximant is absolutely continuous, so its value `J`
//! equals `I`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{discretize, Discretized, JumpModel, MeasureVec, RateModel};
use crate::rate::{ac_rate, rate_primal};

/// Bins on `[0, L]`.
pub const INNER_BINS: usize = 16;
/// Bins on the window `[L, M]`.
pub const WINDOW_BINS: usize = 32;

/// A measure on a jump model: `ac[y]` is absolutely continuous mass on state
/// `y`, shaped like the size-biased holding law `t φ_y(dt) / E_y[T]`, and
/// `atoms[y]` is singular mass at `(y, +inf)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JumpTarget {
    pub ac: Vec<f64>,
    pub atoms: Vec<f64>,
}

impl JumpTarget {
    fn check(&self, jm: &JumpModel) -> Result<()> {
        for v in [&self.ac, &self.atoms] {
            if v.len() != jm.len() {
                return Err(Error::LengthMismatch { expected: jm.len(), got: v.len() });
            }
        }
        if let Some(w) = self.ac.iter().chain(&self.atoms).find(|w| !(**w >= 0.0 && w.is_finite())) {
            return Err(Error::InvalidInput(format!("target weights must be finite and ≥ 0, got {w}")));
        }
        let total: f64 = self.ac.iter().chain(&self.atoms).sum();
        if total > 1.0 + 1e-12 {
            return Err(Error::InvalidInput(format!("target has total mass {total} > 1")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecoveryStep {
    pub l: f64,
    pub m: f64,
    /// The refined discretization the approximant lives on.
    pub model: RateModel,
    /// Absolutely continuous approximant `ν^{L,M}`.
    pub measure: MeasureVec,
    /// The target itself on the same discretization (atoms on `y@inf`).
    pub target_measure: MeasureVec,
    /// `J(ν^{L,M}) = I(ν^{L,M})`.
    #[serde(with = "crate::ext::real")]
    pub j_value: f64,
    /// `I(ν)`.
    #[serde(with = "crate::ext::real")]
    pub target_rate: f64,
    /// `ν_a(X) I(ν_a/ν_a(X)) + Σ_y s_y I(ρ_y)`, an upper bound on `J` by
    /// convexity.
    #[serde(with = "crate::ext::real")]
    pub convex_bound: f64,
}

/// Edges `0 = e_0 < ... < L < ... < M < 2M`.
fn refined_edges(l: f64, m: f64) -> Vec<f64> {
    let mut edges = vec![0.0];
    if l > 0.0 {
        edges.extend((1..=INNER_BINS).map(|i| if i == INNER_BINS { l } else { l * i as f64 / INNER_BINS as f64 }));
    }
    edges.extend((1..=WINDOW_BINS).map(
        |i| {
            if i == WINDOW_BINS {
                m
            } else {
                l + (m - l) * i as f64 / WINDOW_BINS as f64
            }
        },
    ));
    edges.push(2.0 * m);
    edges
}

/// Size-biased spread of `mass` over `sites` of a discretized model.
fn spread(model: &RateModel, sites: &[usize], mass: f64, out: &mut [f64]) {
    if mass == 0.0 {
        return;
    }
    let weight = |i: usize| model.support()[i].mu * model.support()[i].tau;
    let total: f64 = sites.iter().map(|&i| weight(i)).sum();
    for &i in sites {
        out[i] += mass * weight(i) / total;
    }
}

/// One step of the recovery sequence for window `[L, M]`.
pub fn recovery_sequence(jm: &JumpModel, target: &JumpTarget, l: f64, m: f64) -> Result<RecoveryStep> {
    target.check(jm)?;
    if !(l >= 0.0 && m > l && m.is_finite()) {
        return Err(Error::InvalidInput(format!("recovery window needs 0 ≤ L < M < inf, got L={l}, M={m}")));
    }
    let edges = refined_edges(l, m);
    let d: Discretized = discretize(jm, &edges, 2.0 * m)?;
    let model = &d.model;

    let mut ac = vec![0.0; model.n_support()];
    let mut target_ac = vec![0.0; model.n_support()];
    let mut target_sing = vec![0.0; model.n_singular()];
    let mut bound = 0.0;
    let mut target_rate = 0.0;

    for (y, state) in jm.states().iter().enumerate() {
        let sites = d.sites_of_state(y);
        spread(model, &sites, target.ac[y], &mut ac);
        spread(model, &sites, target.ac[y], &mut target_ac);

        let s = target.atoms[y];
        if s == 0.0 {
            continue;
        }
        let p_window = state.law.prob_between(l, m);
        if !(p_window > 0.0) {
            return Err(Error::EmptyWindow { state: state.label.clone(), lower: l, upper: m });
        }
        let window: Vec<usize> = sites.iter().copied().filter(|&i| d.bins[i].lo >= l && d.bins[i].hi <= m).collect();
        spread(model, &window, s, &mut ac);

        let cond_mean = state.law.partial_mean(l, m) / p_window;
        bound += s * (-(state.p * p_window).ln() / cond_mean);
        match d.singular_of_state[y] {
            Some(k) => {
                target_sing[k] += s;
                target_rate += s * model.singular()[k].xi;
            }
            None => target_rate = f64::INFINITY,
        }
    }

    let ac_total: f64 = target.ac.iter().sum();
    let ac_part = ac_rate(model, &target_ac);
    bound += ac_part;
    target_rate +=
        ac_part + crate::rate::mass_times((1.0 - ac_total - target.atoms.iter().sum::<f64>()).max(0.0), model.xi_inf());

    let measure = MeasureVec::absolutely_continuous(model, ac)?;
    let target_measure = MeasureVec::new(model, target_ac, target_sing)?;
    let j_value = rate_primal(model, &measure);
    Ok(RecoveryStep { l, m, model: model.clone(), measure, target_measure, j_value, target_rate, convex_bound: bound })
}

/// Steps along a schedule of windows `(L_k, M_k)`.
pub fn recovery_schedule(
    jm: &JumpModel,
    target: &JumpTarget,
    l_schedule: &[f64],
    m_schedule: &[f64],
) -> Result<Vec<RecoveryStep>> {
    if l_schedule.len() != m_schedule.len() {
        return Err(Error::LengthMismatch { expected: l_schedule.len(), got: m_schedule.len() });
    }
    l_schedule.iter().zip(m_schedule).map(|(&l, &m)| recovery_sequence(jm, target, l, m)).collect()
}
