//! Rate of a linear observable: `inf { I(ν) : ν(K) = level }`.
//!
//! The Legendre transform `sup_θ θ·level − Λ(θ)`, where `Λ(θ)` is the
//! smallest `c` making `θK − c` a feasible dual test function, bounds the
//! rate from below. The tilted measure at the optimal `θ` is feasible and
//! usually attains the bound. When it does not, projected gradient on the
//! simplex cut by the hyperplane `ν(K) = level` takes over.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harness::convex::{project_intersection, projected_gradient, Hyperplane, PgOptions, Simplex};
use crate::model::{MeasureVec, RateModel};
use crate::rate::{rate_and_gradient, rate_primal, stationary_measure};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservableRate {
    pub level: f64,
    /// Value found by the convex solver.
    #[serde(with = "crate::ext::real")]
    pub primal: f64,
    pub argmin: MeasureVec,
    /// Legendre-transform value.
    #[serde(with = "crate::ext::real")]
    pub dual: f64,
    pub theta: f64,
}

/// `Λ(θ)`: the root `c` of `Σ μ̄_j e^{τ_j(θK_j − c)} = 1`, raised to
/// `θK_k − ξ_k` on singular sites.
pub fn scgf(model: &RateModel, k: &[f64], theta: f64) -> f64 {
    let m = model.n_support();
    let g: Vec<f64> = k[..m].iter().map(|x| theta * x).collect();
    let (mut lo, mut hi) = g.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    let excess =
        |c: f64| model.support().iter().zip(&g).map(|(s, gj)| s.mu * (s.tau * (gj - c)).exp()).sum::<f64>() - 1.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if excess(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi.abs().max(1.0) {
            break;
        }
    }
    let mut c = 0.5 * (lo + hi);
    for (kk, site) in k[m..].iter().zip(model.singular()) {
        c = c.max(theta * kk - site.xi);
    }
    c
}

/// `Λ'(θ)`: the `K`-mean of the tilted measure, or the `K` value of an
/// active singular site.
fn scgf_slope(model: &RateModel, k: &[f64], theta: f64) -> f64 {
    let c = scgf(model, k, theta);
    let m = model.n_support();
    let active = k[m..]
        .iter()
        .zip(model.singular())
        .filter(|(kk, site)| theta * **kk - site.xi >= c)
        .map(|(kk, _)| *kk)
        .fold(None, |acc: Option<f64>, x| Some(acc.map_or(x, |a| if theta >= 0.0 { a.max(x) } else { a.min(x) })));
    active.unwrap_or_else(|| tilted(model, k, theta).iter().zip(k).map(|(a, b)| a * b).sum())
}

/// `sup_θ θ·level − Λ(θ)` and its maximizer, by bisection on the
/// nondecreasing slope `Λ'`.
fn legendre(model: &RateModel, k: &[f64], level: f64) -> (f64, f64) {
    let slope = |th: f64| scgf_slope(model, k, th);
    let mut hi = 1.0;
    while hi < 1e12 && slope(hi) < level {
        hi *= 2.0;
    }
    let mut lo = -1.0;
    while lo > -1e12 && slope(lo) > level {
        lo *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if slope(mid) < level {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi.abs().max(1.0) {
            break;
        }
    }
    let th = 0.5 * (lo + hi);
    (th * level - scgf(model, k, th), th)
}

/// Primal–dual gap below which the tilted measure is accepted as the
/// minimizer without running the solver.
pub const CERTIFY_TOL: f64 = 1e-8;

/// Rate of `ν(K) = level` over probability measures. `k` lists the
/// observable on every site in label order.
pub fn observable_infimum(model: &RateModel, k: &[f64], level: f64) -> Result<ObservableRate> {
    let dim = model.n_support() + model.n_singular();
    if k.len() != dim {
        return Err(Error::LengthMismatch { expected: dim, got: k.len() });
    }
    let (kmin, kmax) = k.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    if !(level > kmin && level < kmax) {
        return Err(Error::InvalidInput(format!(
            "level {level} outside the open range ({kmin}, {kmax}) of the observable"
        )));
    }

    let plane = Hyperplane { normal: k.to_vec(), offset: level };
    let project = |x: &[f64]| project_intersection(&[&plane, &Simplex], x, 1e-14, 20_000);
    let objective = |x: &[f64]| rate_and_gradient(model, x);
    let (dual, theta) = legendre(model, k, level);
    let mu = stationary_measure(model).flat();
    let uniform = vec![1.0 / dim as f64; dim];
    let certified = hit_level(&tilted(model, k, theta), k, level);
    let value = rate_and_gradient(model, &certified).0;
    // weak duality: a feasible point at the dual value is optimal
    if value - dual <= CERTIFY_TOL * (1.0 + dual.abs()) {
        let argmin = MeasureVec::from_flat(model, &certified)?;
        return Ok(ObservableRate { level, primal: rate_primal(model, &argmin), argmin, dual, theta });
    }
    let starts = [certified, hit_level(&mu, k, level), uniform];
    let opts = PgOptions { max_iter: 5_000, ..PgOptions::default() };
    let best = starts
        .iter()
        .map(|s| {
            let r = projected_gradient(objective, project, s, opts);
            let clean: Vec<f64> = r.x.iter().map(|v| v.max(0.0)).collect();
            let total: f64 = clean.iter().sum();
            clean.iter().map(|v| v / total).collect::<Vec<f64>>()
        })
        .map(|x| (rate_and_gradient(model, &x).0, x))
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .expect("three starts");
    let argmin = MeasureVec::from_flat(model, &best.1)?;
    Ok(ObservableRate { level, primal: rate_primal(model, &argmin), argmin, dual, theta })
}

/// Probability on support sites `∝ τ_j μ̄_j e^{τ_j (θ K_j − Λ(θ))}`, the
/// optimizer of the ac part for the tilt `θ`.
fn tilted(model: &RateModel, k: &[f64], theta: f64) -> Vec<f64> {
    let m = model.n_support();
    let c = scgf(model, k, theta);
    let expo: Vec<f64> = model.support().iter().zip(k).map(|(s, kj)| s.tau * (theta * kj - c)).collect();
    let top = expo.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut w: Vec<f64> = model.support().iter().zip(&expo).map(|(s, e)| s.tau * s.mu * (e - top).exp()).collect();
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= total);
    w.resize(m + model.n_singular(), 0.0);
    w
}

/// Mixes `x` with the site of smallest or largest `K` so that the mixture
/// has `K`-mean `level`.
fn hit_level(x: &[f64], k: &[f64], level: f64) -> Vec<f64> {
    let mean: f64 = x.iter().zip(k).map(|(a, b)| a * b).sum();
    let pick =
        |better: fn(f64, f64) -> bool| (0..k.len()).fold(0, |best, i| if better(k[i], k[best]) { i } else { best });
    let ext = if level < mean { pick(|a, b| a < b) } else { pick(|a, b| a > b) };
    let s = if (k[ext] - mean).abs() > 0.0 { ((level - mean) / (k[ext] - mean)).clamp(0.0, 1.0) } else { 0.0 };
    let mut out: Vec<f64> = x.iter().map(|v| (1.0 - s) * v).collect();
    out[ext] += s;
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;

    #[test]
    fn level_at_the_mean_costs_nothing() {
        let m2 = presets::m2();
        // K = indicator of a; μ(a) = 1/3
        let r = observable_infimum(&m2, &[1.0, 0.0], 1.0 / 3.0).unwrap();
        assert!(r.primal < 1e-9 && r.dual.abs() < 1e-9, "{r:?}");
    }

    #[test]
    fn indicator_level_is_a_point_rate() {
        let m2 = presets::m2();
        let r = observable_infimum(&m2, &[1.0, 0.0], 0.5).unwrap();
        let direct = rate_primal(&m2, &MeasureVec::absolutely_continuous(&m2, vec![0.5, 0.5]).unwrap());
        assert!((r.primal - direct).abs() < 1e-7, "{} vs {direct}", r.primal);
        assert!((r.dual - direct).abs() < 1e-7, "{} vs {direct}", r.dual);
    }

    #[test]
    fn hot_particle_primal_meets_dual() {
        let hp =
            crate::presets::hot_particle(&crate::presets::HotParticleConfig { n: 2, beta: 1.0, points: 8 }).unwrap();
        let mean: f64 = stationary_measure(&hp.model).flat().iter().zip(&hp.kinetic).map(|(a, b)| a * b).sum();
        for c in [0.5, 1.5] {
            let r = observable_infimum(&hp.model, &hp.kinetic, c * mean).unwrap();
            assert!((r.primal - r.dual).abs() < 1e-7, "{r:?}");
        }
        // below the mean the stall site absorbs the deficit for free
        let low = observable_infimum(&hp.model, &hp.kinetic, 0.5 * mean).unwrap();
        assert!(low.primal < 1e-12 && (low.argmin.sing[0] - 0.5).abs() < 1e-9);
    }

    #[test]
    fn zero_site_flattens_low_levels() {
        // mass on `e` is free, so any level between 0 and μ(K) costs nothing
        let m = presets::m2_with_zero_site();
        let r = observable_infimum(&m, &[1.0, 2.0, 0.0], 0.8).unwrap();
        assert!(r.primal < 1e-8 && r.dual.abs() < 1e-8, "{r:?}");
    }
}
