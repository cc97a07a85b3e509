//! Decay rates of ball probabilities `P(TV(π_t, center) < ε)`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harness::ball::{ball_infimum, BallInfimum, BALL_TOL};
use crate::model::{MeasureVec, RateModel};
use crate::rate::nubar;
use crate::simulate::{exact_distribution, replicate, walk, ExactCaps};

/// Open balls exclude points within this distance of the boundary.
pub const BOUNDARY_TOL: f64 = 1e-12;
/// Relative slope budget for Monte Carlo reports.
pub const MC_BUDGET: f64 = 0.15;
/// Relative slope budget for exact small-horizon reports.
pub const EXACT_BUDGET: f64 = 0.20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Exact,
    Mc,
    Is,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::Mc => "mc",
            Method::Is => "is",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LdpRow {
    pub t: f64,
    pub p: f64,
    pub stderr: f64,
    pub method: Method,
    /// No hits (or zero exact probability): the row is left out of the fit.
    pub underflow: bool,
}

/// Least-squares line `−log p ≈ intercept + slope · t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub slope_stderr: f64,
    pub intercept: f64,
    pub points: usize,
}

/// The fitted slope should land in `[lower, upper]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sandwich {
    /// `inf I` over the closed `2ε` ball minus the budget.
    #[serde(with = "crate::ext::real")]
    pub lower: f64,
    /// `inf I` over the `ε` ball plus the budget.
    #[serde(with = "crate::ext::real")]
    pub upper: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LdpReport {
    pub center: BTreeMap<String, f64>,
    pub eps: f64,
    pub metric: String,
    pub t_grid: Vec<f64>,
    pub rows: Vec<LdpRow>,
    pub fit: Option<SlopeFit>,
    #[serde(with = "crate::ext::real")]
    pub rate_inf: f64,
    #[serde(with = "crate::ext::real")]
    pub rate_inf_2eps: f64,
    pub argmin: BTreeMap<String, f64>,
    /// `|slope − rate_inf| / rate_inf` (absolute gap when `rate_inf = 0`).
    pub relative_gap: Option<f64>,
    pub budget: f64,
    pub sandwich: Option<Sandwich>,
}

/// Weighted least squares of `−log p` on `t` over rows without underflow.
/// Rows with a positive stderr get weight `p²/stderr²`; when no row has one
/// the fit is ordinary least squares with a residual-based slope error.
pub fn fit_slope(rows: &[LdpRow]) -> Option<SlopeFit> {
    let pts: Vec<(f64, f64, f64)> = rows
        .iter()
        .filter(|r| !r.underflow && r.p > 0.0)
        .map(|r| (r.t, -r.p.ln(), if r.stderr > 0.0 { r.stderr / r.p } else { 0.0 }))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let weighted = pts.iter().all(|p| p.2 > 0.0);
    let w = |p: &(f64, f64, f64)| if weighted { 1.0 / (p.2 * p.2) } else { 1.0 };
    let s: f64 = pts.iter().map(w).sum();
    let sx: f64 = pts.iter().map(|p| w(p) * p.0).sum();
    let sy: f64 = pts.iter().map(|p| w(p) * p.1).sum();
    let sxx: f64 = pts.iter().map(|p| w(p) * p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| w(p) * p.0 * p.1).sum();
    let det = s * sxx - sx * sx;
    if !(det > 0.0) {
        return None;
    }
    let slope = (s * sxy - sx * sy) / det;
    let intercept = (sy - slope * sx) / s;
    let slope_stderr = if weighted {
        (s / det).sqrt()
    } else if pts.len() > 2 {
        let rss: f64 = pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
        (rss / (pts.len() - 2) as f64 * s / det).sqrt()
    } else {
        0.0
    };
    Some(SlopeFit { slope, slope_stderr, intercept, points: pts.len() })
}

fn in_open_ball(center: &MeasureVec, weights: &[f64], eps: f64) -> bool {
    let nu = MeasureVec { ac: weights.to_vec(), sing: vec![0.0; center.sing.len()] };
    center.tv_distance(&nu) < eps - BOUNDARY_TOL
}

fn assemble(
    model: &RateModel,
    center: &MeasureVec,
    eps: f64,
    t_grid: Vec<f64>,
    rows: Vec<LdpRow>,
    budget: f64,
) -> Result<LdpReport> {
    let inner: BallInfimum = ball_infimum(model, center, eps, BALL_TOL)?;
    let outer = ball_infimum(model, center, 2.0 * eps, BALL_TOL)?;
    let fit = fit_slope(&rows);
    let relative_gap = fit.map(|f| {
        let d = (f.slope - inner.value).abs();
        if inner.value > 0.0 {
            d / inner.value
        } else {
            d
        }
    });
    let sandwich = fit.map(|f| {
        let slack = budget * inner.value.max(1e-3);
        let lower = outer.value - slack;
        let upper = inner.value + slack;
        Sandwich { lower, upper, holds: f.slope >= lower && f.slope <= upper }
    });
    Ok(LdpReport {
        center: center.to_labels(model),
        eps,
        metric: "tv".into(),
        t_grid,
        rows,
        fit,
        rate_inf: inner.value,
        rate_inf_2eps: outer.value,
        argmin: inner.argmin.to_labels(model),
        relative_gap,
        budget,
        sandwich,
    })
}

/// Exact ball probabilities from [`exact_distribution`].
pub fn exact_ldp(
    model: &RateModel,
    center: &MeasureVec,
    eps: f64,
    t_grid: &[u32],
    caps: ExactCaps,
) -> Result<LdpReport> {
    let rows = t_grid
        .iter()
        .map(|&t| {
            let law = exact_distribution(model, t, caps)?;
            let p = law.probability(|w| in_open_ball(center, w, eps)).min(1.0);
            Ok(LdpRow { t: t as f64, p, stderr: 0.0, method: Method::Exact, underflow: p <= 0.0 })
        })
        .collect::<Result<Vec<_>>>()?;
    assemble(model, center, eps, t_grid.iter().map(|&t| t as f64).collect(), rows, EXACT_BUDGET)
}

/// Seed for the replicas at horizon index `k`.
fn horizon_seed(seed: u64, k: usize) -> u64 {
    seed.wrapping_add((k as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Proposal for importance sampling: `ν̄` of the center, mixed half and half
/// with `μ̄` when it misses a site so the likelihood ratio stays finite.
pub fn proposal(model: &RateModel, center: &MeasureVec) -> Result<RateModel> {
    let mu = model.mu();
    let q = match nubar(center, model) {
        Ok(bar) if bar.iter().all(|&b| b > 0.0) => bar,
        Ok(bar) => bar.iter().zip(&mu).map(|(b, m)| 0.5 * (b + m)).collect(),
        Err(Error::NubarUndefined) => mu,
        Err(e) => return Err(e),
    };
    let support = model
        .support()
        .iter()
        .zip(&q)
        .map(|(s, &w)| crate::model::SupportSite { label: s.label.clone(), mu: w, tau: s.tau })
        .collect();
    RateModel::new(support, vec![], f64::INFINITY)
}

/// Monte Carlo ball probabilities; with `use_is` sites are drawn from
/// [`proposal`] and each path carries the likelihood ratio
/// `Π μ̄(x_i)/q(x_i)` over its `N_t + 1` draws.
pub fn mc_ldp(
    model: &RateModel,
    center: &MeasureVec,
    eps: f64,
    t_grid: &[f64],
    n: usize,
    seed: u64,
    use_is: bool,
) -> Result<LdpReport> {
    if n < 1000 {
        return Err(Error::InvalidInput(format!("need at least 1000 replicas, got {n}")));
    }
    if let Some(t) = t_grid.iter().find(|t| !(**t > 0.0 && t.is_finite())) {
        return Err(Error::InvalidInput(format!("horizons must be positive and finite, got {t}")));
    }
    let q = if use_is { proposal(model, center)? } else { model.clone() };
    let log_ratio: Vec<f64> = model.support().iter().zip(q.support()).map(|(m, q)| (m.mu / q.mu).ln()).collect();
    let m = model.n_support();
    let method = if use_is { Method::Is } else { Method::Mc };

    let mut rows = Vec::with_capacity(t_grid.len());
    for (k, &t) in t_grid.iter().enumerate() {
        let samples: Vec<f64> = replicate(n, horizon_seed(seed, k), |rng| {
            let mut w = vec![0.0; m];
            let mut lr = 0.0;
            walk(&q, t, rng, |site, credit| {
                w[site] += credit / t;
                lr += log_ratio[site];
            });
            if in_open_ball(center, &w, eps) {
                lr.exp()
            } else {
                0.0
            }
        });
        let hits = samples.iter().filter(|x| **x > 0.0).count();
        let mean = samples.iter().sum::<f64>() / n as f64;
        let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        rows.push(LdpRow { t, p: mean.min(1.0), stderr: (var / n as f64).sqrt(), method, underflow: hits == 0 });
    }
    assemble(model, center, eps, t_grid.to_vec(), rows, MC_BUDGET)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;
    use crate::rate::stationary_measure;

    #[test]
    fn exact_dirac_probability() {
        let m2 = presets::m2();
        let delta = MeasureVec::dirac(&m2, 0).unwrap();
        let r = exact_ldp(&m2, &delta, 0.01, &[3], ExactCaps::default()).unwrap();
        assert!((r.rows[0].p - 0.125).abs() < 1e-15);
    }

    #[test]
    fn exact_probabilities_grow_around_mu() {
        let m2 = presets::m2();
        let mu = stationary_measure(&m2);
        let r = exact_ldp(&m2, &mu, 0.3, &[4, 8, 12, 16, 20], ExactCaps::default()).unwrap();
        for w in r.rows.windows(2) {
            assert!(w[1].p >= w[0].p, "{:?}", r.rows);
        }
        assert_eq!(r.rate_inf, 0.0);
    }

    #[test]
    fn slope_of_a_pure_exponential() {
        let rows: Vec<LdpRow> = [10.0, 20.0, 30.0]
            .iter()
            .map(|&t: &f64| LdpRow {
                t,
                p: 0.3 * (-0.07 * t).exp(),
                stderr: 0.0,
                method: Method::Exact,
                underflow: false,
            })
            .collect();
        let f = fit_slope(&rows).unwrap();
        assert!((f.slope - 0.07).abs() < 1e-12);
        assert!((f.intercept + 0.3f64.ln()).abs() < 1e-12);
        assert!(f.slope_stderr < 1e-10);
    }

    #[test]
    fn lln_regime() {
        let unit = presets::sanov(&[0.3, 0.7]).unwrap();
        let center = stationary_measure(&unit);
        let r = mc_ldp(&unit, &center, 0.2, &[50.0, 100.0], 2000, 1, false).unwrap();
        assert!(r.rows[1].p > 0.99);
        assert!(r.fit.unwrap().slope.abs() < 0.01);
    }

    #[test]
    fn importance_sampling_is_unbiased() {
        let m2 = presets::m2();
        let center = MeasureVec::absolutely_continuous(&m2, vec![0.5, 0.5]).unwrap();
        let plain = mc_ldp(&m2, &center, 0.15, &[10.0], 40_000, 11, false).unwrap();
        let is = mc_ldp(&m2, &center, 0.15, &[10.0], 40_000, 12, true).unwrap();
        let (a, b) = (&plain.rows[0], &is.rows[0]);
        let se = (a.stderr.powi(2) + b.stderr.powi(2)).sqrt();
        assert!((a.p - b.p).abs() <= 4.0 * se, "{} vs {} (se {se})", a.p, b.p);
    }
}
