//! Closed-form evaluation of the rate.

use crate::error::{Error, Result};
use crate::model::{MeasureVec, RateModel};
use crate::rate::entropy::entropy_unchecked;

/// `0 · x` with the convention `0 · (+inf) = 0`.
pub(crate) fn mass_times(mass: f64, cost: f64) -> f64 {
    if mass == 0.0 {
        0.0
    } else {
        mass * cost
    }
}

/// `ν̄_j ∝ ν_{a,j}/τ_j` over support sites.
pub fn nubar(nu: &MeasureVec, model: &RateModel) -> Result<Vec<f64>> {
    if nu.ac.len() != model.n_support() {
        return Err(Error::LengthMismatch { expected: model.n_support(), got: nu.ac.len() });
    }
    let w: Vec<f64> = nu.ac.iter().zip(model.support()).map(|(a, s)| a / s.tau).collect();
    let total: f64 = w.iter().sum();
    if !(total > 0.0) {
        return Err(Error::NubarUndefined);
    }
    Ok(w.into_iter().map(|x| x / total).collect())
}

/// `μ_j = τ_j μ̄_j / μ̄(τ)`, the unique zero of the rate when no singular
/// site has `ξ = 0`.
pub fn stationary_measure(model: &RateModel) -> MeasureVec {
    let mean = model.mean_tau();
    MeasureVec {
        ac: model.support().iter().map(|s| s.mu * s.tau / mean).collect(),
        sing: vec![0.0; model.n_singular()],
    }
}

/// `ν_a(1/τ) H(ν̄_a|μ̄)` for support-site weights `ac` (any total mass).
pub fn ac_rate(model: &RateModel, ac: &[f64]) -> f64 {
    let w: Vec<f64> = ac.iter().zip(model.support()).map(|(a, s)| a / s.tau).collect();
    let total: f64 = w.iter().sum();
    if total == 0.0 {
        return 0.0;
    }
    let bar: Vec<f64> = w.iter().map(|x| x / total).collect();
    total * entropy_unchecked(&bar, &model.mu())
}

/// `I′(ν) = ν_a(1/τ) H(ν̄_a|μ̄) + ν_s(ξ) + (1 − ν(X)) ξ∞`; this is `I(ν)` for
/// probability measures.
///
/// # Panics
///
/// If `nu` was built for a model with a different number of sites.
pub fn rate_primal(model: &RateModel, nu: &MeasureVec) -> f64 {
    assert_eq!(nu.ac.len(), model.n_support(), "measure does not match model");
    assert_eq!(nu.sing.len(), model.n_singular(), "measure does not match model");
    let mut value = ac_rate(model, &nu.ac);
    for (s, site) in nu.sing.iter().zip(model.singular()) {
        value += mass_times(*s, site.xi);
    }
    value + mass_times(nu.defect(), model.xi_inf())
}

/// Rate and gradient on a flat probability vector (support then singular
/// sites). Zero coordinates of the support get a large finite negative
/// slope in place of `−inf`.
pub(crate) fn rate_and_gradient(model: &RateModel, flat: &[f64]) -> (f64, Vec<f64>) {
    let m = model.n_support();
    let support = model.support();
    let w: Vec<f64> = flat[..m].iter().zip(support).map(|(a, s)| a.max(0.0) / s.tau).collect();
    let total: f64 = w.iter().sum();
    let mut grad = Vec::with_capacity(flat.len());
    let mut value = 0.0;
    if total > 0.0 {
        let bar: Vec<f64> = w.iter().map(|x| x / total).collect();
        value = total * entropy_unchecked(&bar, &model.mu());
        for (b, s) in bar.iter().zip(support) {
            grad.push((b.max(1e-300) / s.mu).ln() / s.tau);
        }
    } else {
        for s in support {
            grad.push(-s.mu.ln() / s.tau);
        }
    }
    for (x, site) in flat[m..].iter().zip(model.singular()) {
        value += mass_times(x.max(0.0), site.xi);
        grad.push(site.xi);
    }
    (value, grad)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;

    #[test]
    fn nubar_examples() {
        let m2 = presets::m2();
        let nu = MeasureVec::absolutely_continuous(&m2, vec![0.5, 0.5]).unwrap();
        let bar = nubar(&nu, &m2).unwrap();
        assert!((bar[0] - 2.0 / 3.0).abs() < 1e-15 && (bar[1] - 1.0 / 3.0).abs() < 1e-15);
        let zero = MeasureVec::absolutely_continuous(&m2, vec![0.0, 0.0]).unwrap();
        assert!(matches!(nubar(&zero, &m2), Err(Error::NubarUndefined)));
        let unit = RateModel::from_weights(&[0.25, 0.75], &[1.0, 1.0]).unwrap();
        let nu = MeasureVec::absolutely_continuous(&unit, vec![0.2, 0.2]).unwrap();
        assert_eq!(nubar(&nu, &unit).unwrap(), vec![0.5, 0.5]);
    }

    #[test]
    fn stationary_examples() {
        let mu = stationary_measure(&presets::m2());
        assert!((mu.ac[0] - 1.0 / 3.0).abs() < 1e-15 && (mu.ac[1] - 2.0 / 3.0).abs() < 1e-15);
        let unit = RateModel::from_weights(&[0.25, 0.75], &[1.0, 1.0]).unwrap();
        assert_eq!(stationary_measure(&unit).ac, vec![0.25, 0.75]);
        let single = RateModel::from_weights(&[1.0], &[4.0]).unwrap();
        assert_eq!(stationary_measure(&single).ac, vec![1.0]);
    }

    #[test]
    fn primal_examples() {
        let m2 = presets::m2();
        assert!(rate_primal(&m2, &stationary_measure(&m2)).abs() < 1e-15);
        let nu = MeasureVec::absolutely_continuous(&m2, vec![0.5, 0.5]).unwrap();
        let expected = 0.75 * (2.0 / 3.0 * (4.0f64 / 3.0).ln() + 1.0 / 3.0 * (2.0f64 / 3.0).ln());
        assert!((rate_primal(&m2, &nu) - expected).abs() < 1e-15);
        assert!((rate_primal(&m2, &nu) - 0.042475).abs() < 1e-6);
    }

    #[test]
    fn defect_term() {
        let m2 = presets::m2().with_xi_inf(2.0).unwrap();
        let nu = MeasureVec::absolutely_continuous(&m2, vec![0.4, 0.4]).unwrap();
        let full = MeasureVec::absolutely_continuous(&m2, vec![0.5, 0.5]).unwrap();
        // the a.c. term is 1-homogeneous, so I′(0.8 ν) = 0.8 I(ν) + 0.2 ξ∞
        let expected = 0.8 * rate_primal(&m2, &full) + 0.4;
        assert!((rate_primal(&m2, &nu) - expected).abs() < 1e-14);
    }

    #[test]
    fn singular_costs() {
        let m = presets::m2_with_zero_site();
        let nu = MeasureVec::new(&m, vec![1.0 / 6.0, 1.0 / 3.0], vec![0.5]).unwrap();
        assert!(rate_primal(&m, &nu).abs() < 1e-15);
        let m = presets::m2()
            .with_singular(vec![crate::model::SingularSite { label: "e".into(), xi: f64::INFINITY }])
            .unwrap();
        let nu = MeasureVec::new(&m, vec![0.5, 0.5], vec![0.0]).unwrap();
        assert!(rate_primal(&m, &nu).is_finite());
        let nu = MeasureVec::new(&m, vec![0.5, 0.4], vec![0.1]).unwrap();
        assert_eq!(rate_primal(&m, &nu), f64::INFINITY);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let m = presets::m2_with_zero_site()
            .with_singular(vec![crate::model::SingularSite { label: "e".into(), xi: 0.7 }])
            .unwrap();
        let x = [0.3, 0.5, 0.2];
        let (_, g) = rate_and_gradient(&m, &x);
        for i in 0..3 {
            let eps = 1e-7;
            let mut up = x;
            let mut dn = x;
            up[i] += eps;
            dn[i] -= eps;
            let fd = (rate_and_gradient(&m, &up).0 - rate_and_gradient(&m, &dn).0) / (2.0 * eps);
            assert!((fd - g[i]).abs() < 1e-6, "coordinate {i}: {fd} vs {}", g[i]);
        }
    }
}
