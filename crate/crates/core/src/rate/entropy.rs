use crate::error::{Error, Result};

/// Tolerance on the normalization of probability vectors.
pub const NORM_TOL: f64 = 1e-12;

/// `h(ρ) = ρ(log ρ − 1) + 1`, with `h(0) = 1`.
pub fn h(rho: f64) -> f64 {
    if rho == 0.0 {
        1.0
    } else {
        rho * (rho.ln() - 1.0) + 1.0
    }
}

/// `Σ μ_j h(ν_j/μ_j)` without normalization checks; `+inf` when `ν` charges
/// a site where `μ` vanishes.
pub(crate) fn entropy_unchecked(nu: &[f64], mu: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (&n, &m) in nu.iter().zip(mu) {
        if m == 0.0 {
            if n > 0.0 {
                return f64::INFINITY;
            }
        } else {
            acc += m * h(n / m);
        }
    }
    acc.max(0.0)
}

/// Relative entropy `H(ν|μ)` of two probability vectors.
pub fn relative_entropy(nu: &[f64], mu: &[f64]) -> Result<f64> {
    if nu.len() != mu.len() {
        return Err(Error::LengthMismatch { expected: mu.len(), got: nu.len() });
    }
    for (name, v) in [("nu", nu), ("mu", mu)] {
        let s: f64 = v.iter().sum();
        if v.iter().any(|x| !(*x >= 0.0)) || (s - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidInput(format!("{name} is not a probability vector (sum {s})")));
        }
    }
    Ok(entropy_unchecked(nu, mu))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        assert_eq!(relative_entropy(&[0.3, 0.7], &[0.3, 0.7]).unwrap(), 0.0);
        let v = relative_entropy(&[2.0 / 3.0, 1.0 / 3.0], &[0.5, 0.5]).unwrap();
        let direct = 2.0 / 3.0 * (4.0f64 / 3.0).ln() + 1.0 / 3.0 * (2.0f64 / 3.0).ln();
        assert!((v - direct).abs() < 1e-15);
        assert!((v - 0.0566).abs() < 5e-5);
        assert_eq!(relative_entropy(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), f64::INFINITY);
        assert!(relative_entropy(&[1.0], &[0.5, 0.5]).is_err());
    }

    /// Oracle: the variational form `sup_φ ν(φ) − log μ(e^φ)`, by grid
    /// search over `φ = (s, 0)`.
    #[test]
    fn variational_form_agrees() {
        let (nu, mu) = ([2.0 / 3.0, 1.0 / 3.0], [0.5, 0.5]);
        let best = (0..200_001)
            .map(|i| -2.0 + 4.0 * i as f64 / 200_000.0)
            .map(|s| nu[0] * s - (mu[0] * f64::exp(s) + mu[1]).ln())
            .fold(f64::NEG_INFINITY, f64::max);
        assert!((best - relative_entropy(&nu, &mu).unwrap()).abs() < 1e-9);
    }
}
