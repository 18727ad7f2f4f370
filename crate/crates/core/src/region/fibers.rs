//! Sampled check that the projection dropping one axis has finite fibers.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Region;
use crate::error::{Error, Result};
use crate::slicing::CompiledRegion;

#[derive(Clone, Debug, PartialEq)]
pub enum FiberReport {
    /// Largest number of fiber components seen over the samples.
    Finite { max_count: usize, samples: usize },
    /// Some fiber contained an interval of positive length.
    InfiniteWitnessed { base: Vec<f64> },
}

impl fmt::Display for FiberReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FiberReport::Finite { max_count, samples } => write!(f, "FINITE max={max_count} samples={samples}"),
            FiberReport::InfiniteWitnessed { base } => write!(f, "INFINITE fiber witnessed at base {base:?}"),
        }
    }
}

/// Sample `samples` base points in the box (dropping `axis`) and count the
/// fiber components; more than `cap` components is an error.
pub fn fiber_finiteness_probe(
    region: &Region,
    axis: usize,
    samples: usize,
    cap: usize,
    seed: u64,
) -> Result<FiberReport> {
    if axis >= region.n() {
        return Err(Error::IndexOutOfRange(format!(
            "axis {} in dimension {}",
            axis + 1,
            region.n()
        )));
    }
    let compiled = CompiledRegion::new(region)?;
    let bbox = compiled.bbox().to_vec();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut point = vec![0.0; region.n()];
    let mut max_count = 0;
    for _ in 0..samples {
        for (i, &(lo, hi)) in bbox.iter().enumerate() {
            if i != axis {
                point[i] = if hi > lo { rng.gen_range(lo..=hi) } else { lo };
            }
        }
        let fiber = compiled.fiber_at(&point, axis)?;
        if fiber.has_positive_length() {
            return Ok(FiberReport::InfiniteWitnessed { base: fiber.base });
        }
        let count = fiber.intervals.len();
        if count > cap {
            return Err(Error::FiberCapExceeded(cap));
        }
        max_count = max_count.max(count);
    }
    Ok(FiberReport::Finite { max_count, samples })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyform::rat_int;
    use crate::region::BoundingBox;

    #[test]
    fn graph_has_single_points() {
        let r = Region::from_strings(2, 2, &[&["r2 = r1^2"]], Some(BoundingBox::unit(2))).unwrap();
        let rep = fiber_finiteness_probe(&r, 1, 200, 16, 0).unwrap();
        assert_eq!(
            rep,
            FiberReport::Finite {
                max_count: 1,
                samples: 200
            }
        );
    }

    #[test]
    fn box_has_interval_fibers() {
        let r = Region::from_strings(2, 2, &[&[]], Some(BoundingBox::unit(2))).unwrap();
        assert!(matches!(
            fiber_finiteness_probe(&r, 1, 10, 16, 0).unwrap(),
            FiberReport::InfiniteWitnessed { .. }
        ));
    }

    #[test]
    fn two_square_roots() {
        let bb = BoundingBox(vec![(rat_int(0), rat_int(1)), (rat_int(-1), rat_int(1))]);
        let r = Region::from_strings(2, 2, &[&["r2^2 = r1"]], Some(bb)).unwrap();
        let rep = fiber_finiteness_probe(&r, 1, 200, 16, 0).unwrap();
        assert_eq!(
            rep,
            FiberReport::Finite {
                max_count: 2,
                samples: 200
            }
        );
        assert_eq!(
            fiber_finiteness_probe(&r, 1, 200, 1, 0),
            Err(Error::FiberCapExceeded(1))
        );
    }
}
