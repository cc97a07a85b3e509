//! The rate functional: closed form, dual form, zero set and recovery
//! sequences.

mod dual;
mod entropy;
mod minimizers;
mod primal;
mod recovery;

pub use dual::{dual_ascent, rate_dual, DualCertificate, DualMethod, DUAL_CAP, LAMBDA_MAX_ITER, LAMBDA_TOL};
pub use entropy::{h, relative_entropy, NORM_TOL};
pub use minimizers::{
    minimizer_classification, MinimizerCase, MinimizerCheck, MinimizerReport, PerturbationCheck, ALPHA_GRID,
    PERTURBATION, ZERO_TOL,
};
pub use primal::{ac_rate, nubar, rate_primal, stationary_measure};
pub(crate) use primal::{mass_times, rate_and_gradient};
pub use recovery::{recovery_schedule, recovery_sequence, JumpTarget, RecoveryStep, INNER_BINS, WINDOW_BINS};
