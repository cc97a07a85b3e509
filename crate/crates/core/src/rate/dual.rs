//! Dual evaluation of the rate:
//!
//! ```text
//! I(ν) = sup { ν(f) : Σ_j μ̄_j e^{τ_j f_j} ≤ 1,  f ≤ ξ on singular sites }
//! ```
//!
//! On support sites the maximizer has the form
//! `f_j = (1/τ_j) log(ν_{a,j} / (λ μ̄_j τ_j))`, and the multiplier `λ` is found
//! by bisection on `log λ` until the constraint is active. On singular sites
//! the test function sits at its cap `min(ξ, M)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ext;
use crate::model::{MeasureVec, RateModel};
use crate::rate::mass_times;

/// Cap `M` applied to test-function values at sites with `ξ = +inf`.
pub const DUAL_CAP: f64 = 1e6;
/// Constraint residual accepted by the multiplier search.
pub const LAMBDA_TOL: f64 = 1e-12;
pub const LAMBDA_MAX_ITER: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DualMethod {
    /// No absolutely continuous mass: `f ≡ 0` on the support.
    Trivial,
    KktBisection,
    GradientAscent,
}

/// A feasible test function and the value it certifies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualCertificate {
    /// Values on support sites.
    pub f: Vec<f64>,
    /// Values on singular sites, `min(ξ, M)`.
    #[serde(with = "ext::real_vec")]
    pub f_singular: Vec<f64>,
    /// Value charged per unit of missing mass, `min(ξ∞, M)`.
    pub f_defect: f64,
    pub lambda: f64,
    /// `ν(f)`, or `+inf` when the capped value keeps growing with the cap.
    #[serde(with = "ext::real")]
    pub value: f64,
    /// `Σ μ̄_j e^{τ_j f_j} − 1`.
    pub constraint_residual: f64,
    pub method: DualMethod,
}

/// Test-function values on the support for multiplier `λ`; sites without
/// mass get `−M`.
fn kkt_family(model: &RateModel, ac: &[f64], lambda: f64) -> Vec<f64> {
    model
        .support()
        .iter()
        .zip(ac)
        .map(|(s, &a)| if a > 0.0 { (a / (lambda * s.mu * s.tau)).ln() / s.tau } else { -DUAL_CAP })
        .collect()
}

fn constraint(model: &RateModel, f: &[f64]) -> f64 {
    model.support().iter().zip(f).map(|(s, fj)| s.mu * (s.tau * fj).exp()).sum::<f64>() - 1.0
}

/// Root of the (decreasing) constraint residual in `log λ`.
fn solve_lambda(model: &RateModel, ac: &[f64], tol: f64) -> Option<(f64, Vec<f64>, f64)> {
    let residual = |log_l: f64| {
        let f = kkt_family(model, ac, log_l.exp());
        let r = constraint(model, &f);
        (r, f)
    };
    let (mut lo, mut hi) = (-1.0_f64, 1.0_f64);
    let mut iter = 0;
    while residual(lo).0 < 0.0 {
        lo -= 2.0 * (hi - lo);
        iter += 1;
        if iter > LAMBDA_MAX_ITER {
            return None;
        }
    }
    while residual(hi).0 > 0.0 {
        hi += 2.0 * (hi - lo);
        iter += 1;
        if iter > LAMBDA_MAX_ITER {
            return None;
        }
    }
    while iter < LAMBDA_MAX_ITER {
        let mid = 0.5 * (lo + hi);
        let (r, f) = residual(mid);
        if r.abs() <= tol {
            return Some((mid.exp(), f, r));
        }
        if r > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        iter += 1;
    }
    None
}

/// Gradient ascent on the unconstrained concave form
/// `Σ (ν_{a,j}/τ_j) φ_j − W log Σ μ̄_j e^{φ_j}`, normalized afterwards so the
/// constraint is active. Returns `(f, residual_of_gradient)`.
pub fn dual_ascent(model: &RateModel, ac: &[f64], tol: f64, max_iter: usize) -> (Vec<f64>, f64) {
    let support = model.support();
    let w: Vec<f64> = ac.iter().zip(support).map(|(a, s)| a / s.tau).collect();
    let total: f64 = w.iter().sum();
    let mut phi = vec![0.0; support.len()];
    let mut gnorm = f64::INFINITY;
    if total == 0.0 {
        return (phi, 0.0);
    }
    let step = 1.0 / total;
    for _ in 0..max_iter {
        let peak = phi.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let z: f64 = support.iter().zip(&phi).map(|(s, p)| s.mu * (p - peak).exp()).sum();
        let mut g = 0.0_f64;
        for ((p, s), wj) in phi.iter_mut().zip(support).zip(&w) {
            let q = s.mu * (*p - peak).exp() / z;
            let grad = wj - total * q;
            g = g.max(grad.abs());
            *p += step * grad;
        }
        gnorm = g;
        if g <= tol * total {
            break;
        }
    }
    let peak = phi.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let log_z = peak + support.iter().zip(&phi).map(|(s, p)| s.mu * (p - peak).exp()).sum::<f64>().ln();
    let f = phi.iter().zip(support).map(|(p, s)| (p - log_z) / s.tau).collect();
    (f, gnorm)
}

/// Dual value and certificate for `ν`.
///
/// The multiplier search falls back to [`dual_ascent`] when bisection does
/// not reach the residual tolerance within its iteration cap.
pub fn rate_dual(model: &RateModel, nu: &MeasureVec, tol: f64) -> Result<(f64, DualCertificate)> {
    if !(tol > 0.0) {
        return Err(Error::InvalidInput(format!("tolerance must be positive, got {tol}")));
    }
    if nu.ac.len() != model.n_support() || nu.sing.len() != model.n_singular() {
        return Err(Error::LengthMismatch {
            expected: model.n_support() + model.n_singular(),
            got: nu.ac.len() + nu.sing.len(),
        });
    }
    let w: f64 = nu.ac.iter().zip(model.support()).map(|(a, s)| a / s.tau).sum();

    let (f, lambda, method) = if w == 0.0 {
        (vec![0.0; model.n_support()], 0.0, DualMethod::Trivial)
    } else {
        match solve_lambda(model, &nu.ac, LAMBDA_TOL.min(tol)) {
            Some((lambda, f, _)) => (f, lambda, DualMethod::KktBisection),
            None => {
                let (f, gnorm) = dual_ascent(model, &nu.ac, tol, 1_000_000);
                let residual = constraint(model, &f);
                if gnorm > tol * w || residual.abs() > 1e-9 {
                    let best = nu.ac.iter().zip(&f).filter(|(a, _)| **a > 0.0).map(|(a, x)| a * x).sum();
                    return Err(Error::NonConvergence {
                        iterations: LAMBDA_MAX_ITER,
                        best,
                        residual: gnorm.max(residual.abs()),
                    });
                }
                (f, w, DualMethod::GradientAscent)
            }
        }
    };

    let support_value: f64 = nu.ac.iter().zip(&f).filter(|(a, _)| **a > 0.0).map(|(a, x)| a * x).sum();
    let capped = |cap: f64| {
        let sing: f64 = nu.sing.iter().zip(model.singular()).map(|(s, site)| mass_times(*s, site.xi.min(cap))).sum();
        sing + mass_times(nu.defect(), model.xi_inf().min(cap))
    };
    let at_cap = capped(DUAL_CAP);
    let value = if capped(2.0 * DUAL_CAP) > at_cap { f64::INFINITY } else { support_value + at_cap };
    let cert = DualCertificate {
        constraint_residual: constraint(model, &f),
        f,
        f_singular: model.singular().iter().map(|s| s.xi.min(DUAL_CAP)).collect(),
        f_defect: model.xi_inf().min(DUAL_CAP),
        lambda,
        value,
        method,
    };
    Ok((value, cert))
}
