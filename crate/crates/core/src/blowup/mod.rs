//! Blow-ups of coordinate faces, strict transforms and properness.

mod invariance;
mod proper;
mod tower;

pub use invariance::{integral_invariance_check, InvarianceReport};
pub use proper::{
    make_almost_strictly_allowable, make_proper, meets_faces_properly, CounterEntry, ProperOutcome, StrictOutcome,
    DEFAULT_CAP,
};
pub use tower::{face_chart_maps, preimage_region, strict_transform, BlowupTower, Chart, ChartId, Stage};
