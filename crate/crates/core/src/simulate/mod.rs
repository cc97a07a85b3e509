//! Trajectories, renewal counts, exact small-horizon laws and tilting.

mod exact;
pub mod rng;
mod tilt;
mod trajectory;

pub use exact::{exact_distribution, ExactCaps, ExactLaw};
pub use rng::{replica_rng, replicate};
pub use tilt::{tilted_model, TILT_TOL};
pub use trajectory::{empirical_moments, sample_trajectory, walk, HoldingSource, MomentEstimate, Trajectory};
