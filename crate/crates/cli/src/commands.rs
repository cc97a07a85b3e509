//! One function per subcommand, each returning a typed report body.

use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::ValueEnum;

use renewal_ldp::harness::{observable_infimum, sample_law};
use renewal_ldp::model::{uniform_edges, LawSpec};
use renewal_ldp::rate::recovery_schedule;
use renewal_ldp::simulate::{empirical_moments, ExactCaps};
use renewal_ldp::{
    discretize, exact_distribution, exact_ldp, mc_ldp, minimizer_classification, nubar, presets, rate_dual,
    rate_primal, relative_entropy, sample_trajectory, stationary_measure, tail_xi_estimate, tilted_model, JumpModel,
    JumpTarget, MeasureVec, RateModel, SourceModel, TailSource, WaitingLaw,
};

use crate::config::{self, ExperimentConfig, LdpMethod};
use crate::error::{CliError, Result};
use crate::report::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Validate,
    Simulate,
    Exact,
    Rate,
    Dual,
    Minimizers,
    Ldp,
    Xi,
    Recover,
    Examples,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Validate => "validate",
            Command::Simulate => "simulate",
            Command::Exact => "exact",
            Command::Rate => "rate",
            Command::Dual => "dual",
            Command::Minimizers => "minimizers",
            Command::Ldp => "ldp",
            Command::Xi => "xi",
            Command::Recover => "recover",
            Command::Examples => "examples",
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub config: Option<PathBuf>,
    /// JSON report destination; stdout when absent.
    pub out: Option<PathBuf>,
    /// CSV table destination for `simulate` and `ldp`.
    pub csv: Option<PathBuf>,
    /// Overrides every seed in the config.
    pub seed: Option<u64>,
    pub overrides: Vec<String>,
}

/// Loads the config and computes the report without writing anything.
pub fn execute(command: Command, opts: &RunOptions) -> Result<Report> {
    let cfg = config::load(opts.config.as_deref(), &opts.overrides)?;
    let (seed, body) = match command {
        Command::Examples => (None, examples(&cfg)?),
        _ => {
            let model = cfg.build_model()?;
            let problems = cfg.problems(&model);
            if !problems.is_empty() {
                return Err(CliError::Validation(problems.join("; ")));
            }
            dispatch(command, &cfg, &model, opts.seed)?
        }
    };
    Ok(Report { schema_version: SCHEMA_VERSION, seed, body })
}

fn dispatch(
    command: Command,
    cfg: &ExperimentConfig,
    model: &SourceModel,
    seed: Option<u64>,
) -> Result<(Option<u64>, Body)> {
    let rm = model.rate_model();
    Ok(match command {
        Command::Validate => (None, Body::Validate(validate(model))),
        Command::Simulate => {
            let s = cfg.section("simulate", &cfg.simulate)?;
            let seed = seed.unwrap_or(s.seed);
            (Some(seed), Body::Simulate(simulate(model, s.t, s.n, seed, s.dump)?))
        }
        Command::Exact => {
            let e = cfg.section("exact", &cfg.exact)?;
            let caps = ExactCaps { max_t: e.max_t, ..ExactCaps::default() };
            let laws = e.t.iter().map(|&t| exact_distribution(rm, t, caps)).collect::<renewal_ldp::Result<_>>()?;
            (None, Body::Exact(laws))
        }
        Command::Rate => (None, Body::Rate(rate(cfg, rm)?)),
        Command::Dual => (None, Body::Dual(dual(cfg, rm)?)),
        Command::Minimizers => (None, Body::Minimizers(minimizer_classification(rm))),
        Command::Ldp => {
            let l = cfg.section("ldp", &cfg.ldp)?;
            let center = MeasureVec::from_labels(rm, &l.center)?;
            match l.method {
                LdpMethod::Exact => {
                    let grid: Vec<u32> = l.t_grid.iter().map(|&t| t as u32).collect();
                    let caps = ExactCaps { max_t: l.max_t, ..ExactCaps::default() };
                    (None, Body::Ldp(exact_ldp(rm, &center, l.eps, &grid, caps)?))
                }
                LdpMethod::Mc => {
                    let seed = seed.unwrap_or(l.seed);
                    let r = mc_ldp(rm, &center, l.eps, &l.t_grid, l.n, seed, l.importance_sampling)?;
                    (Some(seed), Body::Ldp(r))
                }
            }
        }
        Command::Xi => {
            let x = cfg.section("xi", &cfg.xi)?;
            let (source, law) = match (&x.law, &x.state, model) {
                (Some(raw), _, _) => {
                    let law = WaitingLaw::try_from(LawSpec { kind: raw.kind.clone(), params: raw.params.clone() })?;
                    (raw.kind.clone(), law)
                }
                (None, Some(label), SourceModel::Jump(d)) => {
                    let st = d.jump.states().iter().find(|s| &s.label == label).expect("label checked");
                    (label.clone(), st.law)
                }
                _ => return Err(CliError::Validation("xi.state needs a jump model".into())),
            };
            let (seed, tail) = if x.n == 0 {
                (None, TailSource::Law(law))
            } else {
                let seed = seed.unwrap_or(x.seed);
                (Some(seed), TailSource::Samples(sample_law(&law, x.n, seed)))
            };
            let fit = tail_xi_estimate(&tail, &x.l_grid)?;
            (seed, Body::Xi(XiResult { source, abscissa: law.abscissa(), fit }))
        }
        Command::Recover => {
            let SourceModel::Jump(d) = model else {
                return Err(CliError::Validation("recover needs a jump model".into()));
            };
            let r = cfg.section("recover", &cfg.recover)?;
            (None, Body::Recover(recover(&d.jump, r)?))
        }
        Command::Examples => unreachable!("handled before the model is built"),
    })
}

fn validate(model: &SourceModel) -> ValidateResult {
    let rm = model.rate_model();
    ValidateResult {
        kind: match model {
            SourceModel::Sites(_) => "sites".into(),
            SourceModel::Jump(_) => "jump".into(),
        },
        support_sites: rm.n_support(),
        singular_sites: rm.n_singular(),
        labels: rm.labels().into_iter().map(String::from).collect(),
        xi_inf: rm.xi_inf(),
        infinite_mean: rm.infinite_mean(),
        zero_set: rm.zero_set().into_iter().map(|i| rm.singular()[i].label.clone()).collect(),
    }
}

fn simulate(model: &SourceModel, t: f64, n: usize, seed: u64, dump: bool) -> Result<SimulateResult> {
    let rm = model.rate_model();
    let labels = rm.labels();
    let paths = (0..n as u64)
        .map(|i| {
            let tr = sample_trajectory(model, t, seed.wrapping_add(i))?;
            Ok(PathSummary {
                seed: tr.seed,
                n_t: tr.n_t,
                pi_t: tr.pi_t.to_labels(rm).into_iter().filter(|(_, w)| *w > 0.0).collect(),
                visited: dump.then(|| tr.visited.iter().map(|&j| labels[j].to_string()).collect()),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let renewal_rate = if n >= 100 { Some(empirical_moments(model, t, n, seed)?) } else { None };
    Ok(SimulateResult { t, paths, renewal_rate })
}

fn target_measure(cfg: &ExperimentConfig, rm: &RateModel) -> Result<(MeasureVec, f64)> {
    let r = cfg.section("rate", &cfg.rate)?;
    let nu = match &r.nu {
        Some(map) => MeasureVec::from_labels(rm, map)?,
        None => stationary_measure(rm),
    };
    Ok((nu, r.tol))
}

fn support_map(rm: &RateModel, w: &[f64]) -> BTreeMap<String, f64> {
    rm.support().iter().zip(w).map(|(s, &x)| (s.label.clone(), x)).collect()
}

fn rate(cfg: &ExperimentConfig, rm: &RateModel) -> Result<RateResult> {
    let (nu, tol) = target_measure(cfg, rm)?;
    let (dual, _) = rate_dual(rm, &nu, tol)?;
    Ok(RateResult {
        nu: nu.to_labels(rm),
        primal: rate_primal(rm, &nu),
        dual,
        nubar: nubar(&nu, rm).ok().map(|b| support_map(rm, &b)),
    })
}

fn dual(cfg: &ExperimentConfig, rm: &RateModel) -> Result<DualResult> {
    let (nu, tol) = target_measure(cfg, rm)?;
    let (_, certificate) = rate_dual(rm, &nu, tol)?;
    let tilted_mu = tilted_model(rm, &certificate.f).ok().map(|m| support_map(rm, &m.mu()));
    Ok(DualResult { nu: nu.to_labels(rm), certificate, tilted_mu })
}

fn recover(jm: &JumpModel, r: &config::RecoverConfig) -> Result<RecoverResult> {
    let by_state = |map: &BTreeMap<String, f64>| -> Vec<f64> {
        jm.states().iter().map(|s| map.get(&s.label).copied().unwrap_or(0.0)).collect()
    };
    let target = JumpTarget { ac: by_state(&r.ac), atoms: by_state(&r.atoms) };
    let steps = recovery_schedule(jm, &target, &r.l_schedule, &r.m_schedule)?;
    let target_rate = steps.last().map(|s| s.target_rate).unwrap_or(f64::NAN);
    Ok(RecoverResult {
        ac: r.ac.clone(),
        atoms: r.atoms.clone(),
        target_rate,
        steps: steps
            .iter()
            .map(|s| RecoverStepSummary {
                l: s.l,
                m: s.m,
                support_sites: s.model.n_support(),
                j_value: s.j_value,
                convex_bound: s.convex_bound,
            })
            .collect(),
    })
}

/// Edges used to discretize the example jump models.
const EXAMPLE_THRESHOLD: f64 = 10.0;
const EXAMPLE_BINS: usize = 20;

fn jump_summary(jm: &JumpModel) -> Result<JumpExample> {
    let d = discretize(jm, &uniform_edges(EXAMPLE_THRESHOLD, EXAMPLE_BINS), EXAMPLE_THRESHOLD)?;
    let states = jm
        .states()
        .iter()
        .map(|s| StateTail { label: s.label.clone(), p: s.p, xi: s.law.abscissa(), mean: s.law.mean() })
        .collect();
    Ok(JumpExample {
        states,
        xi_inf: d.model.xi_inf(),
        support_sites: d.model.n_support(),
        infinite_mean: d.model.infinite_mean(),
        stationary_rate: rate_primal(&d.model, &stationary_measure(&d.model)),
    })
}

fn examples(cfg: &ExperimentConfig) -> Result<Body> {
    let ex = cfg.examples.clone().unwrap_or_default();

    let mu = vec![0.2, 0.3, 0.5];
    let nu = vec![0.5, 0.3, 0.2];
    let unit = presets::sanov(&mu)?;
    let sanov = SanovExample {
        rate: rate_primal(&unit, &MeasureVec::absolutely_continuous(&unit, nu.clone())?),
        relative_entropy: relative_entropy(&nu, &mu)?,
        mu,
        nu,
    };

    let jump = jump_summary(&presets::jump_example())?;
    let poisson = jump_summary(&presets::poisson_example(&[0.5, 0.5], &[1.0, 2.0])?)?;

    let hp = presets::hot_particle(&(&ex.hot).into())?;
    let m = &hp.model;
    let mean_kinetic: f64 = stationary_measure(m).flat().iter().zip(&hp.kinetic).map(|(w, k)| w * k).sum();
    let kmax = hp.kinetic.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let levels = ex
        .levels
        .iter()
        .filter(|&&c| c > 0.0 && c * mean_kinetic < kmax)
        .map(|&c| {
            let r = observable_infimum(m, &hp.kinetic, c * mean_kinetic)?;
            Ok(KineticLevel { multiple: c, rate: ObservableSummary::new(&r) })
        })
        .collect::<Result<Vec<_>>>()?;
    let hot_particle = HotExample {
        n: ex.hot.n,
        beta: ex.hot.beta,
        points: ex.hot.points,
        sites: m.n_support(),
        mean_kinetic,
        zero_set: m.zero_set().into_iter().map(|i| m.singular()[i].label.clone()).collect(),
        levels,
    };
    Ok(Body::Examples(ExamplesResult { sanov, jump, poisson, hot_particle }))
}

/// CSV rows for commands that have a table form.
pub fn write_csv(body: &Body, path: &std::path::Path) -> Result<()> {
    let write_err = |e: csv::Error| CliError::Write { path: path.into(), source: std::io::Error::other(e) };
    let mut w = csv::Writer::from_path(path).map_err(write_err)?;
    match body {
        Body::Simulate(s) => {
            for p in &s.paths {
                for (site, &weight) in &p.pi_t {
                    w.serialize(TrajectoryCsvRow { seed: p.seed, t: s.t, n_t: p.n_t, site: site.clone(), weight })
                        .map_err(write_err)?;
                }
            }
        }
        Body::Ldp(r) => {
            for row in &r.rows {
                w.serialize(LdpCsvRow { t: row.t, p: row.p, stderr: row.stderr, method: row.method.as_str().into() })
                    .map_err(write_err)?;
            }
        }
        other => {
            return Err(CliError::Validation(format!("`{}` has no CSV output", other.command())));
        }
    }
    w.flush().map_err(|source| CliError::Write { path: path.into(), source })
}

/// Runs `command`, writing the JSON report to `opts.out` (or stdout) and the
/// CSV table to `opts.csv` when given.
pub fn run(command: Command, opts: &RunOptions) -> Result<Report> {
    let report = execute(command, opts)?;
    if let Some(csv_path) = &opts.csv {
        write_csv(&report.body, csv_path)?;
    }
    let mut json = serde_json::to_string_pretty(&report).expect("reports serialize");
    json.push('\n');
    match &opts.out {
        Some(p) => std::fs::write(p, json).map_err(|source| CliError::Write { path: p.clone(), source })?,
        None => print!("{json}"),
    }
    Ok(report)
}
