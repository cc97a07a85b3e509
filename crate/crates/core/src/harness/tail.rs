//! Tail exponent `ξ = −lim (1/L) log P(T ≥ L)` by regression.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::WaitingLaw;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailSource {
    Law(WaitingLaw),
    Samples(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailFit {
    /// Slope of `−log P(T ≥ L)` against `L`.
    pub slope: f64,
    /// Zero for analytic tails.
    pub stderr: f64,
    pub intercept: f64,
    /// Grid actually used after dropping empty tails.
    pub l_used: Vec<f64>,
    pub neg_log_tail: Vec<f64>,
    /// `−log P(T ≥ L) / L` at the largest `L` used, when that `L` is positive.
    pub local_slope: Option<f64>,
    pub warnings: Vec<String>,
}

/// Regresses `−log P(T ≥ L)` on `L`. Sampled tails use weights from the
/// binomial error of the empirical tail and drop grid points with no
/// samples beyond them.
pub fn tail_xi_estimate(source: &TailSource, l_grid: &[f64]) -> Result<TailFit> {
    if l_grid.len() < 3 {
        return Err(Error::InvalidInput(format!("need at least 3 grid points, got {}", l_grid.len())));
    }
    if l_grid.windows(2).any(|w| !(w[1] > w[0])) || !(l_grid[0] >= 0.0) {
        return Err(Error::InvalidInput("tail grid must be nonnegative and strictly increasing".into()));
    }

    let mut warnings = Vec::new();
    // (L, −log tail, variance of −log tail)
    let mut pts: Vec<(f64, f64, f64)> = Vec::new();
    match source {
        TailSource::Law(law) => {
            law.validate()?;
            for &l in l_grid {
                let p = law.tail_prob(l);
                if p > 0.0 {
                    pts.push((l, -p.ln(), 0.0));
                } else {
                    warnings.push(format!("tail underflows at L = {l}; grid truncated"));
                    break;
                }
            }
        }
        TailSource::Samples(xs) => {
            if xs.is_empty() {
                return Err(Error::InvalidInput("no samples".into()));
            }
            let mut sorted = xs.clone();
            sorted.sort_by(f64::total_cmp);
            let n = sorted.len() as f64;
            for &l in l_grid {
                let count = sorted.len() - sorted.partition_point(|&x| x < l);
                if count == 0 {
                    warnings.push(format!("no samples beyond L = {l}; grid truncated"));
                    break;
                }
                let p = count as f64 / n;
                pts.push((l, -p.ln(), ((1.0 - p) / (n * p)).max(1.0 / (n * n))));
            }
        }
    }
    if pts.len() < 2 {
        return Err(Error::InvalidInput("fewer than two usable grid points".into()));
    }

    let weighted = pts.iter().all(|p| p.2 > 0.0);
    let w = |p: &(f64, f64, f64)| if weighted { 1.0 / p.2 } else { 1.0 };
    let s: f64 = pts.iter().map(w).sum();
    let sx: f64 = pts.iter().map(|p| w(p) * p.0).sum();
    let sy: f64 = pts.iter().map(|p| w(p) * p.1).sum();
    let sxx: f64 = pts.iter().map(|p| w(p) * p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| w(p) * p.0 * p.1).sum();
    let det = s * sxx - sx * sx;
    let slope = (s * sxy - sx * sy) / det;
    let intercept = (sy - slope * sx) / s;
    let stderr = if weighted { (s / det).sqrt() } else { 0.0 };
    let (l_last, y_last, _) = *pts.last().expect("nonempty");
    Ok(TailFit {
        slope,
        stderr,
        intercept,
        l_used: pts.iter().map(|p| p.0).collect(),
        neg_log_tail: pts.iter().map(|p| p.1).collect(),
        local_slope: (l_last > 0.0).then(|| y_last / l_last),
        warnings,
    })
}

/// `n` draws from `law`, reproducible from `seed`.
pub fn sample_law(law: &WaitingLaw, n: usize, seed: u64) -> Vec<f64> {
    let sampler = law.sampler();
    let chunk = 4096;
    let chunks = n.div_ceil(chunk);
    crate::simulate::replicate(chunks, seed, |rng| {
        use rand::Rng;
        (0..chunk).map(|_| rng.sample(sampler)).collect::<Vec<f64>>()
    })
    .into_iter()
    .flatten()
    .take(n)
    .collect()
}
