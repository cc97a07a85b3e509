//! Parametric holding-time laws.

use rand::Rng;
use rand_distr::{Distribution, Exp, Gamma, Pareto};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma_ur;

/// Regularized upper incomplete gamma `Q(a, x)` extended to `x ∈ [0, +inf]`.
fn upper_gamma(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        1.0
    } else if x == f64::INFINITY {
        0.0
    } else {
        gamma_ur(a, x)
    }
}

use crate::error::{Error, Result};

/// Law of the time spent at a visited state. All parameters are strictly
/// positive and finite, so every law lives on `]0, +inf[`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "LawSpec", into = "LawSpec")]
pub enum WaitingLaw {
    Deterministic { value: f64 },
    Exponential { rate: f64 },
    Gamma { shape: f64, rate: f64 },
    Pareto { alpha: f64, xmin: f64 },
}

/// Wire form of a [`WaitingLaw`]: `{kind = "gamma", params = [shape, rate]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LawSpec {
    pub kind: String,
    pub params: Vec<f64>,
}

impl TryFrom<LawSpec> for WaitingLaw {
    type Error = Error;

    fn try_from(spec: LawSpec) -> Result<Self> {
        let want = |n: usize| {
            if spec.params.len() == n {
                Ok(())
            } else {
                Err(Error::InvalidLaw(format!("`{}` takes {n} parameter(s), got {}", spec.kind, spec.params.len())))
            }
        };
        let p = &spec.params;
        let law = match spec.kind.as_str() {
            "deterministic" => {
                want(1)?;
                WaitingLaw::Deterministic { value: p[0] }
            }
            "exponential" => {
                want(1)?;
                WaitingLaw::Exponential { rate: p[0] }
            }
            "gamma" => {
                want(2)?;
                WaitingLaw::Gamma { shape: p[0], rate: p[1] }
            }
            "pareto" => {
                want(2)?;
                WaitingLaw::Pareto { alpha: p[0], xmin: p[1] }
            }
            other => return Err(Error::InvalidLaw(format!("unknown law kind `{other}`"))),
        };
        law.validate()?;
        Ok(law)
    }
}

impl From<WaitingLaw> for LawSpec {
    fn from(law: WaitingLaw) -> Self {
        let (kind, params) = match law {
            WaitingLaw::Deterministic { value } => ("deterministic", vec![value]),
            WaitingLaw::Exponential { rate } => ("exponential", vec![rate]),
            WaitingLaw::Gamma { shape, rate } => ("gamma", vec![shape, rate]),
            WaitingLaw::Pareto { alpha, xmin } => ("pareto", vec![alpha, xmin]),
        };
        LawSpec { kind: kind.to_string(), params }
    }
}

impl std::fmt::Display for WaitingLaw {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            WaitingLaw::Deterministic { value } => write!(f, "Deterministic({value})"),
            WaitingLaw::Exponential { rate } => write!(f, "Exponential(rate={rate})"),
            WaitingLaw::Gamma { shape, rate } => write!(f, "Gamma(shape={shape}, rate={rate})"),
            WaitingLaw::Pareto { alpha, xmin } => write!(f, "Pareto(alpha={alpha}, xmin={xmin})"),
        }
    }
}

impl WaitingLaw {
    pub fn validate(&self) -> Result<()> {
        let params: &[(&str, f64)] = match self {
            WaitingLaw::Deterministic { value } => &[("value", *value)],
            WaitingLaw::Exponential { rate } => &[("rate", *rate)],
            WaitingLaw::Gamma { shape, rate } => &[("shape", *shape), ("rate", *rate)],
            WaitingLaw::Pareto { alpha, xmin } => &[("alpha", *alpha), ("xmin", *xmin)],
        };
        for (name, v) in params {
            if !(v.is_finite() && *v > 0.0) {
                return Err(Error::InvalidLaw(format!(
                    "{self}: parameter `{name}` must be strictly positive and finite, got {v}"
                )));
            }
        }
        Ok(())
    }

    /// Abscissa of convergence `sup{c ≥ 0 : E[e^{cT}] < +inf}`.
    pub fn abscissa(&self) -> f64 {
        match *self {
            WaitingLaw::Deterministic { .. } => f64::INFINITY,
            WaitingLaw::Exponential { rate } => rate,
            WaitingLaw::Gamma { rate, .. } => rate,
            WaitingLaw::Pareto { .. } => 0.0,
        }
    }

    /// `E[e^{cT}]`, possibly `+inf`.
    ///
    /// Exponential and gamma laws diverge at the abscissa itself; a Pareto
    /// law is finite at its abscissa `c = 0` and infinite for every `c > 0`.
    pub fn exp_moment(&self, c: f64) -> f64 {
        if c == 0.0 {
            return 1.0;
        }
        match *self {
            WaitingLaw::Deterministic { value } => (c * value).exp(),
            WaitingLaw::Exponential { rate } => {
                if c < rate {
                    rate / (rate - c)
                } else {
                    f64::INFINITY
                }
            }
            WaitingLaw::Gamma { shape, rate } => {
                if c < rate {
                    (rate / (rate - c)).powf(shape)
                } else {
                    f64::INFINITY
                }
            }
            WaitingLaw::Pareto { alpha, xmin } => {
                if c > 0.0 {
                    f64::INFINITY
                } else {
                    // T = xmin U^{-1/alpha} with U uniform on ]0,1]
                    let g = |u: f64| {
                        if u <= 0.0 {
                            0.0
                        } else {
                            (c * xmin * u.powf(-1.0 / alpha)).exp()
                        }
                    };
                    adaptive_simpson(&g, 0.0, 1.0, 1e-10)
                }
            }
        }
    }

    /// `P(T ≥ level)`.
    pub fn tail_prob(&self, level: f64) -> f64 {
        if level <= 0.0 {
            return 1.0;
        }
        if level == f64::INFINITY {
            return 0.0;
        }
        match *self {
            WaitingLaw::Deterministic { value } => {
                if level <= value {
                    1.0
                } else {
                    0.0
                }
            }
            WaitingLaw::Exponential { rate } => (-rate * level).exp(),
            WaitingLaw::Gamma { shape, rate } => upper_gamma(shape, rate * level),
            WaitingLaw::Pareto { alpha, xmin } => {
                if level <= xmin {
                    1.0
                } else {
                    (xmin / level).powf(alpha)
                }
            }
        }
    }

    /// `P(lo ≤ T < hi)`; `hi` may be `+inf`.
    pub fn prob_between(&self, lo: f64, hi: f64) -> f64 {
        if hi <= lo {
            return 0.0;
        }
        match *self {
            WaitingLaw::Exponential { rate } if lo >= 0.0 => {
                if hi == f64::INFINITY {
                    (-rate * lo).exp()
                } else {
                    -(-rate * lo).exp() * (-rate * (hi - lo)).exp_m1()
                }
            }
            _ => (self.tail_prob(lo) - self.tail_prob(hi)).max(0.0),
        }
    }

    /// Partial mean `E[T; lo ≤ T < hi]`; `hi` may be `+inf`.
    pub fn partial_mean(&self, lo: f64, hi: f64) -> f64 {
        let lo = lo.max(0.0);
        if hi <= lo {
            return 0.0;
        }
        match *self {
            WaitingLaw::Deterministic { value } => {
                if lo <= value && value < hi {
                    value
                } else {
                    0.0
                }
            }
            WaitingLaw::Exponential { rate } => {
                let m = 1.0 / rate;
                let head = (lo + m) * (-rate * lo).exp();
                if hi == f64::INFINITY {
                    head
                } else {
                    (head - (hi + m) * (-rate * hi).exp()).max(0.0)
                }
            }
            WaitingLaw::Gamma { shape, rate } => {
                // t * density(shape, rate) = (shape/rate) * density(shape+1, rate)
                let upper = |x: f64| upper_gamma(shape + 1.0, rate * x);
                (shape / rate * (upper(lo) - upper(hi))).max(0.0)
            }
            WaitingLaw::Pareto { alpha, xmin } => {
                let lo = lo.max(xmin);
                if hi <= lo {
                    return 0.0;
                }
                let scale = alpha * xmin.powf(alpha);
                if (alpha - 1.0).abs() < 1e-12 {
                    if hi == f64::INFINITY {
                        f64::INFINITY
                    } else {
                        scale * (hi / lo).ln()
                    }
                } else if hi == f64::INFINITY {
                    if alpha <= 1.0 {
                        f64::INFINITY
                    } else {
                        scale * lo.powf(1.0 - alpha) / (alpha - 1.0)
                    }
                } else {
                    scale * (lo.powf(1.0 - alpha) - hi.powf(1.0 - alpha)) / (alpha - 1.0)
                }
            }
        }
    }

    pub fn mean(&self) -> f64 {
        self.partial_mean(0.0, f64::INFINITY)
    }

    pub fn sampler(&self) -> LawSampler {
        match *self {
            WaitingLaw::Deterministic { value } => LawSampler::Point(value),
            WaitingLaw::Exponential { rate } => LawSampler::Exp(Exp::new(rate).expect("validated")),
            WaitingLaw::Gamma { shape, rate } => LawSampler::Gamma(Gamma::new(shape, 1.0 / rate).expect("validated")),
            WaitingLaw::Pareto { alpha, xmin } => LawSampler::Pareto(Pareto::new(xmin, alpha).expect("validated")),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.sampler().sample(rng)
    }
}

/// Pre-built sampler for a [`WaitingLaw`].
#[derive(Debug, Clone, Copy)]
pub enum LawSampler {
    Point(f64),
    Exp(Exp<f64>),
    Gamma(Gamma<f64>),
    Pareto(Pareto<f64>),
}

impl Distribution<f64> for LawSampler {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let x = match self {
            LawSampler::Point(v) => *v,
            LawSampler::Exp(d) => d.sample(rng),
            LawSampler::Gamma(d) => d.sample(rng),
            LawSampler::Pareto(d) => d.sample(rng),
        };
        // holding times are strictly positive
        x.max(f64::MIN_POSITIVE)
    }
}

/// Adaptive Simpson quadrature with absolute tolerance `tol`.
pub(crate) fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn rec<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
                + rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
        }
    }
    let fa = f(a);
    let fb = f(b);
    let fm = f(0.5 * (a + b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    rec(f, a, b, fa, fm, fb, whole, tol, 48)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn abscissa_per_family() {
        assert_eq!(WaitingLaw::Exponential { rate: 0.5 }.abscissa(), 0.5);
        assert_eq!(WaitingLaw::Deterministic { value: 3.0 }.abscissa(), f64::INFINITY);
        assert_eq!(WaitingLaw::Pareto { alpha: 1.5, xmin: 1.0 }.abscissa(), 0.0);
        assert_eq!(WaitingLaw::Gamma { shape: 2.5, rate: 1.7 }.abscissa(), 1.7);
    }

    /// Oracle for the gamma abscissa: the truncated integral of
    /// `e^{ct} t^{k-1} e^{-rt}` stabilizes in the cutoff iff `c < r`.
    #[test]
    fn gamma_abscissa_matches_integral_divergence() {
        let (k, r) = (2.5_f64, 1.7_f64);
        let trunc = |c: f64, upper: f64| {
            // composite trapezoid on a fine grid, independent of the closed forms
            let n = 400_000;
            let h = upper / n as f64;
            let g = |t: f64| if t == 0.0 { 0.0 } else { (c * t + (k - 1.0) * t.ln() - r * t).exp() };
            let mut s = 0.5 * (g(0.0) + g(upper));
            for i in 1..n {
                s += g(i as f64 * h);
            }
            s * h
        };
        let below = r - 0.2;
        let (a, b) = (trunc(below, 200.0), trunc(below, 400.0));
        assert!((b - a).abs() / a < 1e-9, "converges below abscissa: {a} vs {b}");
        let above = r + 0.01;
        assert!(trunc(above, 400.0) > 10.0 * trunc(above, 200.0), "diverges above abscissa");
        assert_eq!(WaitingLaw::Gamma { shape: k, rate: r }.abscissa(), r);
    }

    #[test]
    fn exp_moment_examples() {
        assert_eq!(WaitingLaw::Exponential { rate: 2.0 }.exp_moment(1.0), 2.0);
        for law in [
            WaitingLaw::Exponential { rate: 2.0 },
            WaitingLaw::Deterministic { value: 1.3 },
            WaitingLaw::Gamma { shape: 0.5, rate: 1.0 },
            WaitingLaw::Pareto { alpha: 0.7, xmin: 2.0 },
        ] {
            assert_eq!(law.exp_moment(0.0), 1.0);
        }
        assert_eq!(WaitingLaw::Pareto { alpha: 3.0, xmin: 1.0 }.exp_moment(0.1), f64::INFINITY);
    }

    #[test]
    fn exp_moment_monte_carlo_oracle() {
        let law = WaitingLaw::Exponential { rate: 2.0 };
        let sampler = law.sampler();
        let mut rng = ChaCha8Rng::seed_from_u64(20240601);
        let n = 1_000_000;
        let (mut s, mut s2) = (0.0, 0.0);
        for _ in 0..n {
            let v = sampler.sample(&mut rng).exp();
            s += v;
            s2 += v * v;
        }
        let mean = s / n as f64;
        let sd = (s2 / n as f64 - mean * mean).sqrt();
        let se = sd / (n as f64).sqrt();
        assert!((mean - law.exp_moment(1.0)).abs() < 3.0 * se, "mean {mean} se {se}");
    }

    #[test]
    fn pareto_negative_moment_matches_tail_integral() {
        // E[e^{cT}] = 1 + c ∫_0^∞ e^{cL} P(T ≥ L) dL for c < 0
        let law = WaitingLaw::Pareto { alpha: 1.5, xmin: 2.0 };
        let c = -0.3;
        let n = 2_000_000;
        let upper = 200.0;
        let h = upper / n as f64;
        let mut acc = 0.0;
        for i in 0..n {
            let l = (i as f64 + 0.5) * h;
            acc += (c * l).exp() * law.tail_prob(l);
        }
        let expected = 1.0 + c * acc * h;
        assert!((law.exp_moment(c) - expected).abs() < 1e-6);
    }

    #[test]
    fn tail_examples() {
        let r = 0.8;
        assert!((WaitingLaw::Exponential { rate: r }.tail_prob(2.0) - (-1.6f64).exp()).abs() < 1e-15);
        let d = WaitingLaw::Deterministic { value: 3.0 };
        assert_eq!(d.tail_prob(1.0), 1.0);
        assert_eq!(d.tail_prob(3.0), 1.0);
        assert_eq!(d.tail_prob(3.0 + 1e-12), 0.0);
        let p = WaitingLaw::Pareto { alpha: 2.0, xmin: 1.5 };
        assert!((p.tail_prob(6.0) - 0.0625).abs() < 1e-15);
    }

    #[test]
    fn partial_means_sum_to_mean() {
        for law in [
            WaitingLaw::Exponential { rate: 1.3 },
            WaitingLaw::Gamma { shape: 2.2, rate: 0.9 },
            WaitingLaw::Pareto { alpha: 2.5, xmin: 1.0 },
            WaitingLaw::Deterministic { value: 2.0 },
        ] {
            let edges = [0.0, 0.5, 1.0, 2.0, 3.5, 7.0, f64::INFINITY];
            let total: f64 = edges.windows(2).map(|w| law.partial_mean(w[0], w[1])).sum();
            let mass: f64 = edges.windows(2).map(|w| law.prob_between(w[0], w[1])).sum();
            assert!((total - law.mean()).abs() < 1e-12, "{law}");
            assert!((mass - 1.0).abs() < 1e-12, "{law}");
        }
        assert!((WaitingLaw::Gamma { shape: 2.2, rate: 0.9 }.mean() - 2.2 / 0.9).abs() < 1e-12);
        assert_eq!(WaitingLaw::Pareto { alpha: 1.0, xmin: 1.0 }.mean(), f64::INFINITY);
    }

    #[test]
    fn spec_round_trip_and_rejection() {
        let law: WaitingLaw = serde_json::from_str(r#"{"kind":"gamma","params":[2.0,3.0]}"#).unwrap();
        assert_eq!(law, WaitingLaw::Gamma { shape: 2.0, rate: 3.0 });
        assert!(serde_json::from_str::<WaitingLaw>(r#"{"kind":"gamma","params":[2.0]}"#).is_err());
        assert!(serde_json::from_str::<WaitingLaw>(r#"{"kind":"exponential","params":[-1.0]}"#).is_err());
        assert!(serde_json::from_str::<WaitingLaw>(r#"{"kind":"weibull","params":[1.0]}"#).is_err());
    }
}
