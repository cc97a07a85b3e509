//! Reference models.
//!
//! * [`m2`]: two sites, `μ̄ = (½, ½)`, `τ = (1, 2)`.
//! * [`sanov`]: unit clock, where the rate is plain relative entropy.
//! * [`jump_example`] and [`poisson_example`]: pure jump processes with
//!   random holding times.
//! * [`hot_particle`]: a particle on the unit torus whose speed is resampled
//!   at `n` equally spaced hot points.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    discretize, uniform_edges, Discretized, JumpModel, JumpState, RateModel, SingularSite, SupportSite, WaitingLaw,
};

pub fn m2() -> RateModel {
    RateModel::new(
        vec![
            SupportSite { label: "a".into(), mu: 0.5, tau: 1.0 },
            SupportSite { label: "b".into(), mu: 0.5, tau: 2.0 },
        ],
        vec![],
        f64::INFINITY,
    )
    .expect("m2 is valid")
}

/// [`m2`] plus a singular site `e` with `ξ = 0`.
pub fn m2_with_zero_site() -> RateModel {
    m2().with_singular(vec![SingularSite { label: "e".into(), xi: 0.0 }]).expect("valid")
}

/// `τ ≡ 1` on the given weights.
pub fn sanov(mu: &[f64]) -> Result<RateModel> {
    RateModel::from_weights(mu, &vec![1.0; mu.len()])
}

/// One state with `Exponential(rate)` holding times, binned on 20 bins up to
/// `10 / rate`.
pub fn exponential_jump(rate: f64) -> Result<Discretized> {
    let jm = JumpModel::single("y", WaitingLaw::Exponential { rate })?;
    let threshold = 10.0 / rate;
    discretize(&jm, &uniform_edges(threshold, 20), threshold)
}

/// Three states with light, moderate and heavy tails.
pub fn jump_example() -> JumpModel {
    JumpModel::new(vec![
        JumpState { label: "fast".into(), p: 0.5, law: WaitingLaw::Exponential { rate: 2.0 } },
        JumpState { label: "slow".into(), p: 0.3, law: WaitingLaw::Gamma { shape: 2.0, rate: 1.0 } },
        JumpState { label: "heavy".into(), p: 0.2, law: WaitingLaw::Pareto { alpha: 2.5, xmin: 0.5 } },
    ])
    .expect("valid")
}

/// Exponential holding times with means `theta[y]`, visited with weights `p`.
pub fn poisson_example(p: &[f64], theta: &[f64]) -> Result<JumpModel> {
    if p.len() != theta.len() {
        return Err(Error::LengthMismatch { expected: p.len(), got: theta.len() });
    }
    JumpModel::new(
        p.iter()
            .zip(theta)
            .enumerate()
            .map(|(i, (&p, &th))| JumpState {
                label: format!("y{i}"),
                p,
                law: WaitingLaw::Exponential { rate: 1.0 / th },
            })
            .collect(),
    )
}

/// Largest number of composite sites [`hot_particle`] will build.
pub const HOT_SITE_CAP: usize = 4096;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HotParticleConfig {
    /// Number of hot points.
    pub n: usize,
    pub beta: f64,
    /// Speed grid size per hot point.
    pub points: usize,
}

impl Default for HotParticleConfig {
    fn default() -> Self {
        HotParticleConfig { n: 2, beta: 1.0, points: 32 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HotParticle {
    pub config: HotParticleConfig,
    /// Speed grid shared by all hot points.
    pub speeds: Vec<f64>,
    /// Composite sites plus a singular site `stall` with `ξ = 0` standing for
    /// tours at vanishing speed.
    pub model: RateModel,
    /// Mean kinetic energy over one tour, per site in label order (0 on
    /// `stall`).
    pub kinetic: Vec<f64>,
}

/// Speeds on the midpoints of `[0, 4/√β]`, weighted by `x e^{−β x²}`.
///
/// A composite site `x = (x_1, ..., x_n)` has `τ(x) = (1/n) Σ 1/x_i`. Hot
/// section `i` is crossed at speed `x_i` in time `1/(n x_i)`, so the kinetic
/// energy averaged over the tour is `(1/(2n)) Σ x_i / τ(x)`.
pub fn hot_particle(config: &HotParticleConfig) -> Result<HotParticle> {
    let HotParticleConfig { n, beta, points } = *config;
    if n == 0 || points == 0 || !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "hot particle needs n ≥ 1, points ≥ 1 and β > 0, got n={n}, points={points}, β={beta}"
        )));
    }
    let sites = u32::try_from(n)
        .ok()
        .and_then(|n| points.checked_pow(n))
        .filter(|&s| s <= HOT_SITE_CAP)
        .ok_or_else(|| Error::SizeCap(format!("{points}^{n} composite sites exceed the cap of {HOT_SITE_CAP}")))?;

    let h = 4.0 / beta.sqrt() / points as f64;
    let speeds: Vec<f64> = (0..points).map(|k| (k as f64 + 0.5) * h).collect();
    let density: Vec<f64> = speeds.iter().map(|x| x * (-beta * x * x).exp()).collect();
    let norm: f64 = density.iter().sum();
    let weights: Vec<f64> = density.iter().map(|d| d / norm).collect();

    let mut support = Vec::with_capacity(sites);
    let mut kinetic = Vec::with_capacity(sites + 1);
    let mut idx = vec![0usize; n];
    for _ in 0..sites {
        let mu: f64 = idx.iter().map(|&k| weights[k]).product();
        let tau = idx.iter().map(|&k| 1.0 / speeds[k]).sum::<f64>() / n as f64;
        let energy = idx.iter().map(|&k| speeds[k]).sum::<f64>() / (2.0 * n as f64);
        let label = format!("x[{}]", idx.iter().map(|k| k.to_string()).collect::<Vec<_>>().join(","));
        support.push(SupportSite { label, mu, tau });
        kinetic.push(energy / tau);
        // odometer increment, last coordinate fastest
        for d in (0..n).rev() {
            idx[d] += 1;
            if idx[d] < points {
                break;
            }
            idx[d] = 0;
        }
    }
    // product weights may drift from 1 by rounding
    let total: f64 = support.iter().map(|s| s.mu).sum();
    for s in &mut support {
        s.mu /= total;
    }
    kinetic.push(0.0);
    let model = RateModel::new(support, vec![SingularSite { label: "stall".into(), xi: 0.0 }], f64::INFINITY)?;
    Ok(HotParticle { config: config.clone(), speeds, model, kinetic })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn m2_shape() {
        let m = m2();
        assert_eq!(m.mu(), vec![0.5, 0.5]);
        assert_eq!(m.tau(), vec![1.0, 2.0]);
        assert_eq!(m.mean_tau(), 1.5);
        assert_eq!(m2_with_zero_site().zero_set(), vec![0]);
    }

    #[test]
    fn hot_particle_sites() {
        let hp = hot_particle(&HotParticleConfig { n: 2, beta: 1.0, points: 8 }).unwrap();
        assert_eq!(hp.model.n_support(), 64);
        assert_eq!(hp.kinetic.len(), 65);
        let s = &hp.model.support()[1];
        let (x0, x1) = (hp.speeds[0], hp.speeds[1]);
        assert!((s.tau - 0.5 * (1.0 / x0 + 1.0 / x1)).abs() < 1e-14);
        assert!((hp.kinetic[1] - 0.25 * (x0 + x1) / s.tau).abs() < 1e-14);
        // one hot point: kinetic energy is x²/2
        let one = hot_particle(&HotParticleConfig { n: 1, beta: 2.0, points: 5 }).unwrap();
        for (k, x) in one.kinetic.iter().zip(&one.speeds) {
            assert!((k - 0.5 * x * x).abs() < 1e-14);
        }
    }

    #[test]
    fn hot_particle_cap() {
        let r = hot_particle(&HotParticleConfig { n: 3, beta: 1.0, points: 32 });
        assert!(matches!(r, Err(Error::SizeCap(_))));
    }
}
