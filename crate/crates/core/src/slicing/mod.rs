//! Root isolation and fiberwise slicing along one coordinate.

mod fiber;
mod roots;
mod support;

pub use fiber::{slice_fiber, slice_sup_volume, CompiledRegion, FiberSlices, SupVolume};
pub use roots::{isolate_real_roots, real_roots_f64, RootInterval, RootIntervals, UnivariatePoly};
