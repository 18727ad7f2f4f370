//! Fibers of a region along one coordinate line.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::roots::real_roots_f64;
use super::support::support_breaks;
use crate::error::{Error, Result};
use crate::polyform::{CompiledPoly, Polynomial, Rational};
use crate::region::{Region, Relation};

/// Closed intervals along `axis` whose union is the fiber over `base`.
/// Isolated points appear as intervals of zero length.
#[derive(Clone, Debug, PartialEq)]
pub struct FiberSlices {
    pub base: Vec<f64>,
    pub axis: usize,
    pub intervals: Vec<(f64, f64)>,
    /// Some cell had all its constraints vanish identically on the line.
    pub degenerate: bool,
}

impl FiberSlices {
    pub fn total_length(&self) -> f64 {
        self.intervals.iter().map(|(a, b)| b - a).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn has_positive_length(&self) -> bool {
        self.intervals.iter().any(|(a, b)| b > a)
    }
}

struct CompiledCell {
    constraints: Vec<(CompiledPoly, Relation)>,
}

/// A region compiled to floats for repeated slicing.
pub struct CompiledRegion {
    n: usize,
    cells: Vec<CompiledCell>,
    bbox: Vec<(f64, f64)>,
    exact_cells: Vec<Vec<(Polynomial, Relation)>>,
    exact_bbox: Vec<(Rational, Rational)>,
}

const ROOT_MERGE: f64 = 1e-13;

impl CompiledRegion {
    /// Needs a bounding box (declared, or derived for linear regions).
    pub fn new(region: &Region) -> Result<Self> {
        let exact = region.effective_box()?;
        let bbox = exact.to_f64();
        let exact_cells = region
            .cells()
            .iter()
            .map(|c| c.constraints.iter().map(|k| (k.poly().clone(), k.relation())).collect())
            .collect();
        let cells = region
            .cells()
            .iter()
            .map(|c| CompiledCell {
                constraints: c
                    .constraints
                    .iter()
                    .map(|k| (k.poly().compile(), k.relation()))
                    .collect(),
            })
            .collect();
        Ok(CompiledRegion {
            n: region.n(),
            cells,
            bbox,
            exact_cells,
            exact_bbox: exact.0,
        })
    }

    /// Breakpoint polynomials per depth for iterated integration over
    /// `order` with `axis` innermost.
    pub fn support_breaks(&self, order: &[usize], axis: usize) -> Vec<Vec<CompiledPoly>> {
        support_breaks(&self.exact_cells, &self.exact_bbox, order, axis)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn bbox(&self) -> &[(f64, f64)] {
        &self.bbox
    }

    /// Fiber through `point` along `axis`; `point[axis]` is ignored.
    pub fn fiber_at(&self, point: &[f64], axis: usize) -> Result<FiberSlices> {
        if point.len() != self.n || axis >= self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: point.len(),
            });
        }
        let base: Vec<f64> = point
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != axis)
            .map(|(_, v)| *v)
            .collect();
        for (i, (&(lo, hi), &v)) in self.bbox.iter().zip(point).enumerate() {
            if i != axis && (v < lo - 1e-12 * (hi - lo).max(1.0) || v > hi + 1e-12 * (hi - lo).max(1.0)) {
                return Ok(FiberSlices {
                    base,
                    axis,
                    intervals: Vec::new(),
                    degenerate: false,
                });
            }
        }
        let (lo, hi) = self.bbox[axis];
        let width = (hi - lo).max(f64::MIN_POSITIVE);
        let mut probe = point.to_vec();
        let mut pieces: Vec<(f64, f64)> = Vec::new();
        let mut degenerate = false;
        for cell in &self.cells {
            let mut payloads = Vec::with_capacity(cell.constraints.len());
            let mut all_zero = !cell.constraints.is_empty();
            for (p, rel) in &cell.constraints {
                let mut coeffs = p.univariate(axis, point);
                probe[axis] = 1.0;
                let scale = p.magnitude(&probe).max(1.0);
                for c in coeffs.iter_mut() {
                    if c.abs() <= 1e-14 * scale {
                        *c = 0.0;
                    }
                }
                let zero = coeffs.iter().all(|&c| c == 0.0);
                all_zero &= zero;
                payloads.push((coeffs, *rel, zero));
            }
            if all_zero {
                degenerate = true;
                pieces.push((lo, hi));
                continue;
            }
            let mut crit = vec![lo, hi];
            for (coeffs, _, zero) in &payloads {
                if !zero {
                    crit.extend(real_roots_f64(coeffs).into_iter().filter(|&y| y > lo && y < hi));
                }
            }
            crit.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
            crit.dedup_by(|a, b| (*a - *b).abs() <= ROOT_MERGE * width);
            let holds = |y: f64, slack: f64| {
                payloads.iter().all(|(coeffs, rel, zero)| {
                    if *zero {
                        return true;
                    }
                    let v = coeffs.iter().rev().fold(0.0, |acc, c| acc * y + c);
                    let mag = coeffs.iter().rev().fold(0.0, |acc, c| acc * y.abs() + c.abs());
                    let tol = slack * (1.0 + mag);
                    match rel {
                        Relation::Le => v <= tol,
                        Relation::Eq => v.abs() <= tol,
                    }
                })
            };
            let mut kept: Vec<(f64, f64)> = Vec::new();
            for w in crit.windows(2) {
                if holds(0.5 * (w[0] + w[1]), 1e-12) {
                    match kept.last_mut() {
                        Some(last) if last.1 == w[0] => last.1 = w[1],
                        _ => kept.push((w[0], w[1])),
                    }
                }
            }
            for &y in &crit {
                let covered = kept.iter().any(|&(a, b)| y >= a && y <= b);
                if !covered && holds(y, 1e-9) {
                    kept.push((y, y));
                }
            }
            pieces.extend(kept);
        }
        Ok(FiberSlices {
            base,
            axis,
            intervals: merge_intervals(pieces),
            degenerate,
        })
    }

    /// Fiber over `base`, which lists the coordinates other than `axis`.
    pub fn fiber(&self, base: &[f64], axis: usize) -> Result<FiberSlices> {
        if base.len() + 1 != self.n || axis >= self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n.saturating_sub(1),
                got: base.len(),
            });
        }
        let mut point = Vec::with_capacity(self.n);
        point.extend_from_slice(&base[..axis]);
        point.push(0.0);
        point.extend_from_slice(&base[axis..]);
        self.fiber_at(&point, axis)
    }
}

fn merge_intervals(mut v: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    v.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(v.len());
    for (a, b) in v {
        match out.last_mut() {
            Some(last) if a <= last.1 => last.1 = last.1.max(b),
            _ => out.push((a, b)),
        }
    }
    out
}

/// Fiber of `region` over `base` (the coordinates other than `axis`).
pub fn slice_fiber(region: &Region, base: &[f64], axis: usize) -> Result<FiberSlices> {
    CompiledRegion::new(region)?.fiber(base, axis)
}

/// Sampled lower bound for the largest fiber length.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SupVolume {
    pub value: f64,
    pub samples: usize,
}

/// Sup of the fiber length along `axis` over base points whose first
/// `fixed.len()` coordinates are pinned; the remaining base coordinates are
/// drawn uniformly from the box.
pub fn slice_sup_volume(region: &Region, axis: usize, fixed: &[f64], samples: usize, seed: u64) -> Result<SupVolume> {
    let compiled = CompiledRegion::new(region)?;
    let n = region.n();
    if axis >= n || fixed.len() > n - 1 || fixed.len() > axis {
        return Err(Error::IndexOutOfRange(format!(
            "axis {} with {} fixed coordinates in dimension {n}",
            axis + 1,
            fixed.len()
        )));
    }
    let free: Vec<usize> = (fixed.len()..n).filter(|&i| i != axis).collect();
    let draws = if free.is_empty() { 1 } else { samples.max(1) };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut point = vec![0.0; n];
    point[..fixed.len()].copy_from_slice(fixed);
    let mut best = 0.0f64;
    for _ in 0..draws {
        for &i in &free {
            let (lo, hi) = compiled.bbox[i];
            point[i] = if hi > lo { rng.gen_range(lo..=hi) } else { lo };
        }
        best = best.max(compiled.fiber_at(&point, axis)?.total_length());
    }
    Ok(SupVolume {
        value: best,
        samples: draws,
    })
}
