//! Numerical integration of logarithmic forms over semi-algebraic regions.

mod checks;
mod config;
mod engine;
mod ladder;
mod quad;

pub use checks::{
    decay_from_points, default_decay_params, deformation_limit_check, pushforward_bound_check, slice_decay_report,
    BoundReport, BoundVerdict, DecayReport, DecayVerdict, DeformationReport, MAX_SAFETY,
};
pub use config::QuadConfig;
pub use engine::{
    excision_ladder, integrate_abs, integrate_density, integrate_log_form, Density, IntegralResult, Problem,
};
pub use ladder::{fit_decay_exponent, DecayFit, Ladder, LadderEntry, LadderRule, LadderVerdict, NO_DECAY_ALPHA};
pub use quad::{adaptive, Pair};
