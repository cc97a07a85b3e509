//! Binning of a [`JumpModel`] into a finite [`RateModel`].
//!
//! Each state `y` and each bin `[e_k, e_{k+1}[` yields a support site with
//! weight `p_y P_y(T ∈ bin)` and holding time `E_y[T | bin]`. The mass beyond
//! the tail threshold is folded into the last bin, so the last site of each
//! state covers `[e_{K-1}, +inf[`. A state whose law has a finite abscissa
//! additionally gets a singular site `y@inf` with `ξ` equal to that abscissa.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{JumpModel, RateModel, SingularSite, SupportSite};

/// Position of a discretized support site in the source jump model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SiteBin {
    pub state: usize,
    pub bin: usize,
    pub lo: f64,
    /// `+inf` for the folded last bin.
    #[serde(with = "crate::ext::real")]
    pub hi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Discretized {
    pub jump: JumpModel,
    pub edges: Vec<f64>,
    pub model: RateModel,
    pub bins: Vec<SiteBin>,
    /// For each state, the index (among singular sites) of its `y@inf` site.
    pub singular_of_state: Vec<Option<usize>>,
    lookup: Vec<Vec<Option<usize>>>,
}

pub fn discretize(jm: &JumpModel, edges: &[f64], tail_threshold: f64) -> Result<Discretized> {
    check_edges(edges, tail_threshold)?;
    let n_bins = edges.len() - 1;
    let mut support = Vec::new();
    let mut bins = Vec::new();
    let mut singular = Vec::new();
    let mut singular_of_state = Vec::with_capacity(jm.len());
    let mut lookup = vec![vec![None; n_bins]; jm.len()];
    let mut infinite_mean = false;

    for (y, state) in jm.states().iter().enumerate() {
        let law = &state.law;
        for k in 0..n_bins {
            let lo = edges[k];
            let last = k + 1 == n_bins;
            let hi = if last { f64::INFINITY } else { edges[k + 1] };
            let prob = law.prob_between(lo, hi);
            if !(prob > 0.0) {
                continue;
            }
            let mut tau = law.partial_mean(lo, hi) / prob;
            if !tau.is_finite() {
                // infinite-mean tail: keep the within-threshold conditional mean
                infinite_mean = true;
                let inner = law.prob_between(lo, edges[k + 1]);
                tau = if inner > 0.0 { law.partial_mean(lo, edges[k + 1]) / inner } else { edges[k + 1] };
            }
            let tau = tau.clamp(lo.max(f64::MIN_POSITIVE), hi);
            lookup[y][k] = Some(support.len());
            support.push(SupportSite {
                label: if last {
                    format!("{}[{},inf)", state.label, lo)
                } else {
                    format!("{}[{},{})", state.label, lo, hi)
                },
                mu: state.p * prob,
                tau,
            });
            bins.push(SiteBin { state: y, bin: k, lo, hi });
        }
        let xi = law.abscissa();
        if xi.is_finite() {
            singular_of_state.push(Some(singular.len()));
            singular.push(SingularSite { label: format!("{}@inf", state.label), xi });
        } else {
            singular_of_state.push(None);
        }
    }

    let total: f64 = support.iter().map(|s| s.mu).sum();
    if (total - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidInput(format!("discretization lost mass: total weight {total}")));
    }
    for s in &mut support {
        s.mu /= total;
    }
    let model = RateModel::new(support, singular, f64::INFINITY)?.with_infinite_mean(infinite_mean);
    Ok(Discretized { jump: jm.clone(), edges: edges.to_vec(), model, bins, singular_of_state, lookup })
}

fn check_edges(edges: &[f64], tail_threshold: f64) -> Result<()> {
    if edges.len() < 2 {
        return Err(Error::InvalidInput("at least two bin edges are required".into()));
    }
    if edges[0] != 0.0 {
        return Err(Error::InvalidInput(format!("bin edges must start at 0, got {}", edges[0])));
    }
    if let Some(w) = edges.windows(2).find(|w| !(w[1] > w[0]) || !w[1].is_finite()) {
        return Err(Error::InvalidInput(format!(
            "bin edges must be finite and strictly increasing, got {} then {}",
            w[0], w[1]
        )));
    }
    if edges[edges.len() - 1] != tail_threshold {
        return Err(Error::InvalidInput(format!(
            "last bin edge {} must equal the tail threshold {tail_threshold}",
            edges[edges.len() - 1]
        )));
    }
    Ok(())
}

/// Evenly spaced edges `0, h, 2h, ..., threshold`.
pub fn uniform_edges(threshold: f64, n_bins: usize) -> Vec<f64> {
    (0..=n_bins).map(|i| if i == n_bins { threshold } else { threshold * i as f64 / n_bins as f64 }).collect()
}

impl Discretized {
    /// Support site holding a draw `hold` from state `state`.
    pub fn site_of(&self, state: usize, hold: f64) -> usize {
        let n_bins = self.edges.len() - 1;
        let k = self.edges.partition_point(|&e| e <= hold).saturating_sub(1).min(n_bins - 1);
        let row = &self.lookup[state];
        if let Some(i) = row[k] {
            return i;
        }
        // a draw in a bin of numerically zero mass: use the nearest kept bin
        (1..n_bins)
            .flat_map(|d| [k.checked_sub(d), Some(k + d)])
            .flatten()
            .filter(|&j| j < n_bins)
            .find_map(|j| row[j])
            .expect("every state keeps at least one bin")
    }

    /// Support sites belonging to `state`, in bin order.
    pub fn sites_of_state(&self, state: usize) -> Vec<usize> {
        self.lookup[state].iter().flatten().copied().collect()
    }
}
