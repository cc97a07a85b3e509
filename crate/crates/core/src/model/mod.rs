//! Holding-time laws, finite reference models and measures over them.

mod discretize;
mod law;
mod sites;
mod spec;

pub use discretize::{discretize, uniform_edges, Discretized, SiteBin};
pub use law::{LawSampler, LawSpec, WaitingLaw};
pub use sites::{
    validate, JumpModel, JumpState, MeasureVec, RateModel, SingularSite, SupportSite, Violation, MASS_TOL, WEIGHT_TOL,
};
pub use spec::{DiscretizationSpec, JumpStateSpec, LawSpecRaw, ModelSpec, SourceModel};
