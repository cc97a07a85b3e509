//! Path sampling and renewal counts.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Discretized, MeasureVec, RateModel, SourceModel};
use crate::simulate::rng::{replica_rng, replicate};

/// Something that emits i.i.d. (site, holding time) pairs.
pub trait HoldingSource: Sync {
    /// The finite model whose sites label the draws.
    fn rate_model(&self) -> &RateModel;

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> (usize, f64);
}

impl HoldingSource for RateModel {
    fn rate_model(&self) -> &RateModel {
        self
    }

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> (usize, f64) {
        let j = self.site_for_uniform(rng.random::<f64>());
        (j, self.support()[j].tau)
    }
}

impl HoldingSource for Discretized {
    fn rate_model(&self) -> &RateModel {
        &self.model
    }

    /// Draws a state, then its holding time from the state's law; the
    /// returned site is the bin containing the drawn time.
    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> (usize, f64) {
        let states = self.jump.states();
        let u = rng.random::<f64>();
        let mut acc = 0.0;
        let mut y = states.len() - 1;
        for (i, s) in states.iter().enumerate() {
            acc += s.p;
            if u < acc {
                y = i;
                break;
            }
        }
        let hold = states[y].law.sample(rng);
        (self.site_of(y, hold), hold)
    }
}

impl HoldingSource for SourceModel {
    fn rate_model(&self) -> &RateModel {
        SourceModel::rate_model(self)
    }

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> (usize, f64) {
        match self {
            SourceModel::Sites(m) => m.draw(rng),
            SourceModel::Jump(d) => d.draw(rng),
        }
    }
}

/// Runs one path up to horizon `t`, calling `visit(site, credited_time)` for
/// each of the `N_t + 1` visited states. Completed holds are credited in
/// full, the last state gets `t − S_{N_t}`. Returns `N_t`.
pub fn walk<S, R, F>(src: &S, t: f64, rng: &mut R, mut visit: F) -> usize
where
    S: HoldingSource + ?Sized,
    R: Rng + ?Sized,
    F: FnMut(usize, f64),
{
    let mut elapsed = 0.0;
    let mut n = 0;
    loop {
        let (site, hold) = src.draw(rng);
        if elapsed + hold >= t {
            visit(site, t - elapsed);
            return n;
        }
        visit(site, hold);
        elapsed += hold;
        n += 1;
    }
}

/// One simulated path with its local time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub seed: u64,
    pub t: f64,
    /// Sites `x_1, ..., x_{N_t+1}`.
    pub visited: Vec<usize>,
    /// Arrival times `S_0 = 0, S_1, ..., S_{N_t+1}`.
    pub arrivals: Vec<f64>,
    pub n_t: usize,
    pub pi_t: MeasureVec,
}

impl Trajectory {
    /// Builds the trajectory of a prescribed site sequence of a finite
    /// model, consuming as many sites as the horizon requires.
    pub fn from_path(model: &RateModel, path: &[usize], t: f64) -> Result<Self> {
        let mut arrivals = vec![0.0];
        let mut visited = Vec::new();
        for &j in path {
            let tau =
                model.support().get(j).ok_or_else(|| Error::InvalidInput(format!("site index {j} out of range")))?.tau;
            let s = arrivals[arrivals.len() - 1];
            visited.push(j);
            arrivals.push(s + tau);
            if s + tau >= t {
                let n_t = visited.len() - 1;
                let pi_t = local_time(model, &visited, &arrivals, t)?;
                return Ok(Trajectory { seed: 0, t, visited, arrivals, n_t, pi_t });
            }
        }
        Err(Error::InvalidInput(format!("path of length {} ends before horizon {t}", path.len())))
    }

    /// Pairs `(site, weight)` of the local time, support sites only.
    pub fn weights(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.pi_t.ac.iter().copied().enumerate().filter(|(_, w)| *w > 0.0)
    }
}

/// `π_t` from visited sites and arrival times.
fn local_time(model: &RateModel, visited: &[usize], arrivals: &[f64], t: f64) -> Result<MeasureVec> {
    let n_t = visited.len() - 1;
    let mut w = vec![0.0; model.n_support()];
    for i in 0..n_t {
        w[visited[i]] += arrivals[i + 1] - arrivals[i];
    }
    w[visited[n_t]] += t - arrivals[n_t];
    for x in &mut w {
        *x /= t;
    }
    MeasureVec::absolutely_continuous(model, w)
}

pub fn sample_trajectory<S: HoldingSource + ?Sized>(src: &S, t: f64, seed: u64) -> Result<Trajectory> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidInput(format!("horizon must be positive and finite, got {t}")));
    }
    let mut rng = replica_rng(seed, 0);
    let mut visited = Vec::new();
    let mut arrivals = vec![0.0];
    let mut elapsed = 0.0;
    loop {
        let (site, hold) = src.draw(&mut rng);
        visited.push(site);
        if elapsed + hold >= t {
            arrivals.push(elapsed + hold);
            break;
        }
        elapsed += hold;
        arrivals.push(elapsed);
    }
    let n_t = visited.len() - 1;
    let pi_t = local_time(src.rate_model(), &visited, &arrivals, t)?;
    Ok(Trajectory { seed, t, visited, arrivals, n_t, pi_t })
}

/// Monte Carlo estimate of `E[N_t]/t` with a normal 95% interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentEstimate {
    pub t: f64,
    pub n: usize,
    pub mean: f64,
    pub stderr: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl MomentEstimate {
    pub(crate) fn from_samples(t: f64, xs: &[f64]) -> Self {
        let n = xs.len();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n as f64 - 1.0).max(1.0);
        let stderr = (var / n as f64).sqrt();
        MomentEstimate { t, n, mean, stderr, ci_low: mean - 1.96 * stderr, ci_high: mean + 1.96 * stderr }
    }
}

pub fn empirical_moments<S: HoldingSource + ?Sized>(src: &S, t: f64, n: usize, seed: u64) -> Result<MomentEstimate> {
    if n < 100 {
        return Err(Error::InvalidInput(format!("need at least 100 replicas, got {n}")));
    }
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidInput(format!("horizon must be positive and finite, got {t}")));
    }
    let xs = replicate(n, seed, |rng| walk(src, t, rng, |_, _| {}) as f64 / t);
    Ok(MomentEstimate::from_samples(t, &xs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;

    #[test]
    fn unit_clock() {
        let m = RateModel::from_weights(&[0.2, 0.3, 0.5], &[1.0, 1.0, 1.0]).unwrap();
        for seed in 0..20 {
            let tr = sample_trajectory(&m, 5.0, seed).unwrap();
            assert_eq!(tr.n_t, 4);
            assert_eq!(tr.visited.len(), 5);
            let mut expect = vec![0.0; 3];
            for &j in &tr.visited {
                expect[j] += 0.2;
            }
            for (a, b) in tr.pi_t.ac.iter().zip(&expect) {
                assert!((a - b).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn hand_traced_path() {
        let m2 = presets::m2();
        let tr = Trajectory::from_path(&m2, &[0, 0, 1], 3.0).unwrap();
        assert_eq!(tr.n_t, 2);
        assert_eq!(tr.arrivals, vec![0.0, 1.0, 2.0, 4.0]);
        assert!((tr.pi_t.ac[0] - 2.0 / 3.0).abs() < 1e-15);
        assert!((tr.pi_t.ac[1] - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn seeds_are_deterministic() {
        let m2 = presets::m2();
        assert_eq!(sample_trajectory(&m2, 50.0, 9).unwrap(), sample_trajectory(&m2, 50.0, 9).unwrap());
        assert_ne!(sample_trajectory(&m2, 50.0, 9).unwrap(), sample_trajectory(&m2, 50.0, 10).unwrap());
    }

    #[test]
    fn unit_clock_counts_are_deterministic() {
        let m = RateModel::from_weights(&[0.5, 0.5], &[1.0, 1.0]).unwrap();
        let est = empirical_moments(&m, 100.0, 200, 1).unwrap();
        assert!((est.mean - 0.99).abs() < 1e-12);
        assert!(est.stderr < 1e-12);
        assert!(empirical_moments(&m, 100.0, 50, 1).is_err());
    }

    #[test]
    fn jump_trajectory_uses_drawn_times() {
        let d = presets::exponential_jump(1.0).unwrap();
        let tr = sample_trajectory(&d, 20.0, 3).unwrap();
        let holds: Vec<f64> = tr.arrivals.windows(2).map(|w| w[1] - w[0]).collect();
        // drawn times are continuous, bin means are not reused
        assert!(holds.iter().zip(&tr.visited).any(|(h, &j)| (h - d.model.support()[j].tau).abs() > 1e-6));
        assert!((tr.pi_t.total() - 1.0).abs() < 1e-12);
    }
}
