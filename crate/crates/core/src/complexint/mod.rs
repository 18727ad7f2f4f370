//! Integration of complex logarithmic forms through sectors and the polar
//! map `(r, τ) ↦ z`.

mod form;
mod polar;
mod tasks;

pub use form::{ComplexLogForm, ComplexPoly};
pub use polar::{polar_inverse, polar_map, polar_preimage, sector_piece, SectorAssignment};
pub use tasks::{
    annulus_slice_decay, integrate_admissible, mirror_region, reduce_to_real_tasks, sector_decompose, AnnulusVariant,
    ComplexIntegral, Partition, RealTask, Reduction, TaskIntegral,
};
