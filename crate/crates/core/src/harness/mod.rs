//! Numerical checks of the large deviations bounds: ball infima, decay
//! slopes of ball probabilities, tail exponents, entropy budgets and rates of
//! linear observables.

mod ball;
mod budget;
pub mod convex;
mod ldp;
mod observable;
mod tail;

pub use ball::{ball_infimum, BallInfimum, BALL_TOL};
pub use budget::{entropy_budget, BudgetRow, EntropyBudget};
pub use ldp::{
    exact_ldp, fit_slope, mc_ldp, proposal, LdpReport, LdpRow, Method, Sandwich, SlopeFit, BOUNDARY_TOL, EXACT_BUDGET,
    MC_BUDGET,
};
pub use observable::{observable_infimum, scgf, ObservableRate, CERTIFY_TOL};
pub use tail::{sample_law, tail_xi_estimate, TailFit, TailSource};
