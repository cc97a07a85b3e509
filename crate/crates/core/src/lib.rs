//! Large deviations of the local time of renewal-type processes.
//!
//! An i.i.d. sequence `x_1, x_2, ...` drawn from a reference law `μ̄` on a
//! finite site set drives a process that stays at `x_i` for a holding time
//! `τ(x_i)`. The local time (empirical measure)
//!
//! ```text
//! π_t = (1/t) Σ_{i ≤ N_t} τ(x_i) δ_{x_i} + ((t − S_{N_t})/t) δ_{x_{N_t+1}}
//! ```
//!
//! satisfies a large deviations principle with rate
//!
//! ```text
//! I(ν) = ν_a(1/τ) H(ν̄_a | μ̄) + ν_s(ξ) + (1 − ν(X)) ξ∞
//! ```
//!
//! where `ν̄ ∝ ν/τ`, `ν_s` is the part of `ν` living on singular sites and
//! `ξ` is the local exponential-moment abscissa of `τ`.
//!
//! The crate is split into four layers:
//!
//! * [`model`]: holding-time laws, finite reference models, measures.
//! * [`simulate`]: trajectories, exact small-horizon laws, tilting.
//! * [`rate`]: primal and dual evaluation of the rate, minimizers,
//!   recovery sequences for singular measures.
//! * [`harness`]: numerical verification of the large deviations bounds.
//!
//! [`presets`] bundles the reference models used across tests, benches and
//! the command-line tool.

// guards like `!(x > 0.0)` are meant to reject NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod ext;
pub mod harness;
pub mod model;
pub mod presets;
pub mod rate;
pub mod simulate;

pub use error::{Error, Result};
pub use harness::{
    ball_infimum, entropy_budget, exact_ldp, mc_ldp, observable_infimum, tail_xi_estimate, BallInfimum, EntropyBudget,
    LdpReport, LdpRow, Method, TailFit, TailSource,
};
pub use model::{
    discretize, Discretized, JumpModel, JumpState, MeasureVec, ModelSpec, RateModel, SingularSite, SourceModel,
    SupportSite, Violation, WaitingLaw,
};
pub use rate::{
    minimizer_classification, nubar, rate_dual, rate_primal, recovery_sequence, relative_entropy, stationary_measure,
    DualCertificate, JumpTarget, MinimizerCase, MinimizerReport, RecoveryStep,
};
pub use simulate::{
    empirical_moments, exact_distribution, sample_trajectory, tilted_model, ExactLaw, HoldingSource, MomentEstimate,
    Trajectory,
};
