//! Entropy cost of forcing the local time to `ν` by drawing sites from `ν̄`.
//!
//! Under i.i.d. sampling from `ν̄` the path up to time `t` costs
//! `H(ν̄|μ̄)` per draw, so the cost per unit time is
//! `H(ν̄|μ̄) (E[N_t] + 1)/t`, which tends to `ν(1/τ) H(ν̄|μ̄) = I(ν)`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{MeasureVec, RateModel};
use crate::rate::{nubar, rate_primal, relative_entropy};
use crate::simulate::replicate;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BudgetRow {
    pub t: f64,
    /// `(E[N_t] + 1)/t`.
    pub draws_per_time: f64,
    pub stderr: f64,
    /// `H(ν̄|μ̄) (E[N_t] + 1)/t`.
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyBudget {
    pub entropy: f64,
    /// `I(ν)`.
    #[serde(with = "crate::ext::real")]
    pub limit: f64,
    pub rows: Vec<BudgetRow>,
}

pub fn entropy_budget(
    model: &RateModel,
    nu: &MeasureVec,
    t_grid: &[f64],
    n: usize,
    seed: u64,
) -> Result<EntropyBudget> {
    if !nu.is_absolutely_continuous() {
        return Err(Error::InvalidInput("entropy budget needs an absolutely continuous measure".into()));
    }
    if n < 2 {
        return Err(Error::InvalidInput(format!("need at least 2 replicas, got {n}")));
    }
    let bar = nubar(nu, model)?;
    let entropy = relative_entropy(&bar, &model.mu())?;
    let tau = model.tau();
    let mut cumulative = Vec::with_capacity(bar.len());
    let mut acc = 0.0;
    for b in &bar {
        acc += b;
        cumulative.push(acc);
    }
    let draw = |u: f64| cumulative.partition_point(|&c| c <= u * acc).min(bar.len() - 1);

    let mut rows = Vec::with_capacity(t_grid.len());
    for (k, &t) in t_grid.iter().enumerate() {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::InvalidInput(format!("horizon must be positive and finite, got {t}")));
        }
        let counts = replicate(n, seed.wrapping_add(k as u64), |rng| {
            let mut elapsed = 0.0;
            let mut draws = 0usize;
            loop {
                draws += 1;
                elapsed += tau[draw(rng.random::<f64>())];
                if elapsed >= t {
                    break;
                }
            }
            draws as f64 / t
        });
        let mean = counts.iter().sum::<f64>() / n as f64;
        let var = counts.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        rows.push(BudgetRow { t, draws_per_time: mean, stderr: (var / n as f64).sqrt(), value: entropy * mean });
    }
    Ok(EntropyBudget { entropy, limit: rate_primal(model, nu), rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;
    use crate::rate::stationary_measure;

    #[test]
    fn stationary_costs_nothing() {
        let m2 = presets::m2();
        let b = entropy_budget(&m2, &stationary_measure(&m2), &[10.0, 100.0], 200, 1).unwrap();
        assert!(b.rows.iter().all(|r| r.value.abs() < 1e-15));
    }

    #[test]
    fn unit_clock_counts_are_deterministic() {
        let unit = presets::sanov(&[0.5, 0.5]).unwrap();
        let nu = MeasureVec::absolutely_continuous(&unit, vec![0.8, 0.2]).unwrap();
        let b = entropy_budget(&unit, &nu, &[10.0, 10.5], 50, 2).unwrap();
        // τ ≡ 1: N_t + 1 = ⌈t⌉
        assert!((b.rows[0].draws_per_time - 1.0).abs() < 1e-12);
        assert!((b.rows[1].draws_per_time - 11.0 / 10.5).abs() < 1e-12);
        assert!((b.limit - b.entropy).abs() < 1e-15);
    }
}
