use crate::error::{Error, Result};
use crate::model::{RateModel, SupportSite};

/// Tolerance on `Σ μ̄_j e^{τ_j f_j} = 1` for a tilt.
pub const TILT_TOL: f64 = 1e-9;

/// Reweights `μ̄` by `e^{τ f}`. The tilt must already be normalized; the
/// result is renormalized to absorb rounding.
pub fn tilted_model(model: &RateModel, f: &[f64]) -> Result<RateModel> {
    if f.len() != model.n_support() {
        return Err(Error::LengthMismatch { expected: model.n_support(), got: f.len() });
    }
    let weights: Vec<f64> = model.support().iter().zip(f).map(|(s, fj)| s.mu * (s.tau * fj).exp()).collect();
    let total: f64 = weights.iter().sum();
    if !((total - 1.0).abs() <= TILT_TOL) {
        return Err(Error::NotNormalized { total });
    }
    let support = model
        .support()
        .iter()
        .zip(weights)
        .map(|(s, w)| SupportSite { label: s.label.clone(), mu: w / total, tau: s.tau })
        .collect();
    Ok(RateModel::new(support, model.singular().to_vec(), model.xi_inf())?.with_infinite_mean(model.infinite_mean()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;

    #[test]
    fn identity_tilt() {
        let m2 = presets::m2();
        assert_eq!(tilted_model(&m2, &[0.0, 0.0]).unwrap(), m2);
    }

    #[test]
    fn unnormalized_tilt_reports_total() {
        match tilted_model(&presets::m2(), &[0.1, 0.1]) {
            Err(Error::NotNormalized { total }) => assert!(total > 1.0),
            other => panic!("{other:?}"),
        }
    }
}
