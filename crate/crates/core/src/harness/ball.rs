//! Infimum of the rate over a total-variation ball.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harness::convex::{project_intersection, projected_gradient, L1Ball, PgOptions, Simplex};
use crate::model::{MeasureVec, RateModel};
use crate::rate::{rate_and_gradient, rate_primal, stationary_measure};
use crate::simulate::replica_rng;

/// Default agreement required between restarts.
pub const BALL_TOL: f64 = 1e-5;
/// Random restarts on top of the center, `μ` and the uniform measure.
const RANDOM_STARTS: u64 = 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallInfimum {
    pub eps: f64,
    #[serde(with = "crate::ext::real")]
    pub value: f64,
    pub argmin: MeasureVec,
    /// Final value reached from each start.
    #[serde(with = "crate::ext::real_vec")]
    pub start_values: Vec<f64>,
    /// `max − min` over starts.
    pub spread: f64,
}

/// `inf { I(ν) : ν probability, TV(ν, center) ≤ eps }`.
///
/// With probability measures `ν` the ball is
/// `{‖ν − center‖₁ ≤ 2 eps − defect(center)}` intersected with the simplex
/// of all sites. The program is convex, so the restarts must agree within
/// `tol`; disagreement is reported as non-convergence.
pub fn ball_infimum(model: &RateModel, center: &MeasureVec, eps: f64, tol: f64) -> Result<BallInfimum> {
    if !(eps > 0.0) {
        return Err(Error::InvalidInput(format!("radius must be positive, got {eps}")));
    }
    if center.ac.len() != model.n_support() || center.sing.len() != model.n_singular() {
        return Err(Error::LengthMismatch {
            expected: model.n_support() + model.n_singular(),
            got: center.ac.len() + center.sing.len(),
        });
    }
    let mu = stationary_measure(model);
    if mu.tv_distance(center) <= eps {
        return Ok(BallInfimum { eps, value: 0.0, argmin: mu, start_values: vec![0.0], spread: 0.0 });
    }
    let radius = 2.0 * eps - center.defect();
    if radius < 0.0 {
        return Err(Error::InvalidInput(format!(
            "ball of radius {eps} around a measure with defect {} holds no probability measure",
            center.defect()
        )));
    }

    let c = center.flat();
    let ball = L1Ball { center: c.clone(), radius };
    let project = |x: &[f64]| project_intersection(&[&ball, &Simplex], x, 1e-15, 5_000);
    let objective = |x: &[f64]| rate_and_gradient(model, x);

    let dim = c.len();
    let mut starts = vec![c.clone(), mu.flat(), vec![1.0 / dim as f64; dim]];
    let mut rng = replica_rng(0x5eed, 0);
    for _ in 0..RANDOM_STARTS {
        let raw: Vec<f64> = (0..dim).map(|_| -rng.random::<f64>().max(1e-300).ln()).collect();
        let s: f64 = raw.iter().sum();
        starts.push(raw.into_iter().map(|x| x / s).collect());
    }

    let runs: Vec<_> = starts.iter().map(|s| projected_gradient(objective, project, s, PgOptions::default())).collect();
    let values: Vec<f64> = runs.iter().map(|r| r.value).collect();
    let best = runs.iter().min_by(|a, b| a.value.total_cmp(&b.value)).expect("at least one start");
    let worst = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let spread = worst - best.value;
    if !(spread <= tol) {
        return Err(Error::NonConvergence {
            iterations: runs.iter().map(|r| r.iterations).max().unwrap_or(0),
            best: best.value,
            residual: spread,
        });
    }
    let clean: Vec<f64> = best.x.iter().map(|v| v.max(0.0)).collect();
    let argmin = MeasureVec::from_flat(model, &clean)?;
    Ok(BallInfimum { eps, value: rate_primal(model, &argmin), argmin, start_values: values, spread })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;

    #[test]
    fn center_at_mu_is_zero() {
        let m2 = presets::m2();
        let mu = stationary_measure(&m2);
        let r = ball_infimum(&m2, &mu, 0.01, BALL_TOL).unwrap();
        assert_eq!(r.value, 0.0);
        assert_eq!(r.argmin, mu);
    }

    #[test]
    fn huge_ball_reaches_zero() {
        let m2 = presets::m2();
        let far = MeasureVec::absolutely_continuous(&m2, vec![1.0, 0.0]).unwrap();
        assert_eq!(ball_infimum(&m2, &far, 1.0, BALL_TOL).unwrap().value, 0.0);
    }

    #[test]
    fn m2_ball_matches_grid_search() {
        let m2 = presets::m2();
        let center = MeasureVec::absolutely_continuous(&m2, vec![0.5, 0.5]).unwrap();
        let r = ball_infimum(&m2, &center, 0.05, BALL_TOL).unwrap();
        // oracle: dense grid on the 1-simplex, step 1e-4
        let grid = (0..=10_000)
            .map(|k| k as f64 * 1e-4)
            .filter(|a| (a - 0.5).abs() <= 0.05 + 1e-12)
            .map(|a| rate_primal(&m2, &MeasureVec::absolutely_continuous(&m2, vec![a, 1.0 - a]).unwrap()))
            .fold(f64::INFINITY, f64::min);
        assert!((r.value - grid).abs() < 1e-6, "{} vs {grid}", r.value);
        assert!(r.value <= rate_primal(&m2, &center));
        assert!((r.argmin.ac[0] - 0.45).abs() < 1e-6);
    }

    #[test]
    fn singular_sites_join_the_simplex() {
        let m = presets::m2_with_zero_site();
        let center = MeasureVec::new(&m, vec![0.0, 0.2], vec![0.8]).unwrap();
        // the whole segment between μ and δ_e is free, and the ball touches it
        let r = ball_infimum(&m, &center, 0.2, BALL_TOL).unwrap();
        assert!(r.value < 1e-6, "{}", r.value);
    }
}
