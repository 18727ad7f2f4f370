//! Dimension of regions: exact for linear cells, sampled otherwise.

use std::fmt;

use num_traits::{One, Zero};

use super::normalize::normalize_cell;
use super::probe::{probe_dimension, ProbeConfig};
use super::{BoundingBox, Cell, Region, Relation};
use crate::error::{Error, Result};
use crate::lp::{rank, AffineHull, LinearProgram, LpOutcome};
use crate::polyform::Rational;

/// A dimension in `{-1, 0, …, n}` with a flag for sampled estimates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Dimension {
    pub value: i64,
    pub heuristic: bool,
}

impl Dimension {
    pub const EMPTY: Dimension = Dimension {
        value: -1,
        heuristic: false,
    };

    pub fn max(self, other: Dimension) -> Dimension {
        Dimension {
            value: self.value.max(other.value),
            heuristic: self.heuristic || other.heuristic,
        }
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)?;
        if self.heuristic {
            f.write_str(" (heuristic)")?;
        }
        Ok(())
    }
}

/// Linear program of a cell all of whose constraints are linear.
pub(crate) fn cell_lp(cell: &Cell, n: usize) -> LinearProgram {
    let mut lp = LinearProgram::new(n);
    for c in &cell.constraints {
        let (coeffs, c0) = c.poly().linear_parts().expect("linear cell");
        match c.relation() {
            Relation::Le => lp.add_le(coeffs, -c0),
            Relation::Eq => lp.add_eq(coeffs, -c0),
        }
    }
    lp
}

/// Dimension of the projection of an affine hull to `keep`.
pub(crate) fn projected_hull_dimension(hull: &AffineHull, keep: &[usize]) -> i64 {
    let n = hull.nvars;
    let pivots: Vec<usize> = hull
        .rows
        .iter()
        .map(|(r, _)| r.iter().position(|v| !v.is_zero()).expect("nonzero row"))
        .collect();
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    if free.is_empty() {
        return 0;
    }
    let basis: Vec<Vec<Rational>> = free
        .iter()
        .map(|&f| {
            let mut v = vec![Rational::zero(); n];
            v[f] = Rational::one();
            for (row, &pc) in hull.rows.iter().zip(&pivots) {
                v[pc] = -row.0[f].clone();
            }
            v
        })
        .collect();
    let projected: Vec<Vec<Rational>> = basis
        .iter()
        .map(|v| keep.iter().map(|&k| v[k].clone()).collect())
        .collect();
    if keep.is_empty() {
        return 0;
    }
    rank(&projected) as i64
}

/// Affine hulls of the nonempty normalized pieces of a cell; `Err` when a
/// piece stays nonlinear.
pub(crate) fn linear_hulls(cell: &Cell, n: usize) -> Result<Vec<AffineHull>> {
    let mut out = Vec::new();
    for piece in normalize_cell(cell) {
        if !piece.is_linear() {
            return Err(Error::Nonlinear("cell with polynomial constraints".into()));
        }
        if let Some(h) = cell_lp(&piece, n).affine_hull() {
            out.push(h);
        }
    }
    Ok(out)
}

/// Dimension of one cell (box constraints already included), projected to
/// `keep` when given. `stream` separates probe random streams.
pub fn cell_dimension(
    cell: &Cell,
    n: usize,
    bbox: Option<&BoundingBox>,
    keep: Option<&[usize]>,
    cfg: &ProbeConfig,
    stream: u64,
) -> Result<Dimension> {
    let mut best = Dimension::EMPTY;
    for (k, piece) in normalize_cell(cell).into_iter().enumerate() {
        let d = if piece.is_linear() {
            let value = match cell_lp(&piece, n).affine_hull() {
                None => -1,
                Some(h) => match keep {
                    None => h.dimension(),
                    Some(keep) => projected_hull_dimension(&h, keep),
                },
            };
            Dimension {
                value,
                heuristic: false,
            }
        } else {
            let b = bbox.ok_or_else(|| Error::Unbounded("polynomial cell without a bounding box".into()))?;
            Dimension {
                value: probe_dimension(&piece, &b.to_f64(), keep, cfg, (stream << 16) ^ k as u64),
                heuristic: true,
            }
        };
        best = best.max(d);
    }
    Ok(best)
}

pub fn dimension(region: &Region, cfg: &ProbeConfig) -> Result<Dimension> {
    dimension_projected(region, None, cfg)
}

pub fn dimension_projected(region: &Region, keep: Option<&[usize]>, cfg: &ProbeConfig) -> Result<Dimension> {
    let mut best = Dimension::EMPTY;
    for i in 0..region.cells().len() {
        let cell = region.cell_with_box(i);
        best = best.max(cell_dimension(&cell, region.n(), region.bbox(), keep, cfg, i as u64)?);
    }
    Ok(best)
}

/// Exact coordinate bounds of a linear region, via one LP per direction.
pub(crate) fn linear_bounding_box(region: &Region) -> Result<BoundingBox> {
    let n = region.n();
    let mut lo: Vec<Option<Rational>> = vec![None; n];
    let mut hi: Vec<Option<Rational>> = vec![None; n];
    for cell in region.cells() {
        for piece in normalize_cell(cell) {
            if !piece.is_linear() {
                return Err(Error::Unbounded("polynomial cell without a bounding box".into()));
            }
            let lp = cell_lp(&piece, n);
            if matches!(lp.feasible_point(), LpOutcome::Infeasible) {
                continue;
            }
            for v in 0..n {
                for (sign, slot) in [(1i64, &mut hi[v]), (-1i64, &mut lo[v])] {
                    let mut obj = vec![Rational::zero(); n];
                    obj[v] = Rational::from_integer(sign.into());
                    match lp.maximize(&obj) {
                        LpOutcome::Optimal { value, .. } => {
                            let val = if sign > 0 { value } else { -value };
                            let better = match slot.as_ref() {
                                None => true,
                                Some(cur) => (sign > 0 && val > *cur) || (sign < 0 && val < *cur),
                            };
                            if better {
                                *slot = Some(val);
                            }
                        }
                        LpOutcome::Unbounded => {
                            return Err(Error::Unbounded(format!("coordinate {} is unbounded", v + 1)))
                        }
                        LpOutcome::Infeasible => {}
                    }
                }
            }
        }
    }
    Ok(BoundingBox(
        lo.into_iter()
            .zip(hi)
            .map(|(l, h)| (l.unwrap_or_else(Rational::zero), h.unwrap_or_else(Rational::zero)))
            .collect(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyform::{rat_int, Variables};
    use crate::region::{Constraint, Face, RegionKind};

    #[test]
    fn linear_examples() {
        let cfg = ProbeConfig::default();
        let b = Region::from_strings(2, 2, &[&["0 <= r1", "r1 <= 1", "0 <= r2", "r2 <= 1"]], None).unwrap();
        assert_eq!(dimension(&b, &cfg).unwrap().value, 2);
        let seg = Region::from_strings(2, 2, &[&["r1 = 0", "0 <= r2", "r2 <= 1"]], None).unwrap();
        assert_eq!(dimension(&seg, &cfg).unwrap().value, 1);
        let empty = Region::from_strings(2, 2, &[], None).unwrap();
        assert_eq!(dimension(&empty, &cfg).unwrap(), Dimension::EMPTY);
        let origin = b.face_intersection(&Face::new(vec![0, 1])).unwrap();
        assert_eq!(dimension(&origin, &cfg).unwrap().value, 0);
    }

    #[test]
    fn circle_needs_box() {
        let cfg = ProbeConfig::default();
        let v = Variables::complex(1);
        let c = Cell::new(vec![Constraint::parse("zr1^2 + zi1^2 - 1 = 0", &v).unwrap()]);
        let r = Region::new(2, 1, RegionKind::Complex, vec![c.clone()], None).unwrap();
        assert!(matches!(dimension(&r, &cfg), Err(Error::Unbounded(_))));
        let bb = BoundingBox(vec![(rat_int(-2), rat_int(2)); 2]);
        let r = Region::new(2, 1, RegionKind::Complex, vec![c], Some(bb)).unwrap();
        let d = dimension(&r, &cfg).unwrap();
        assert_eq!(d.value, 1);
        assert!(d.heuristic);
    }

    #[test]
    fn projected_linear() {
        let cfg = ProbeConfig::default();
        let r = Region::from_strings(3, 0, &[&["x1 = x2", "0 <= x1", "x1 <= 1", "x3 = 0"]], None).unwrap();
        assert_eq!(dimension_projected(&r, Some(&[0]), &cfg).unwrap().value, 1);
        assert_eq!(dimension_projected(&r, Some(&[2]), &cfg).unwrap().value, 0);
    }

    #[test]
    fn lp_box() {
        let r = Region::from_strings(
            2,
            2,
            &[&["0 <= r1", "r1 <= 1", "0 <= r2", "r2 <= 1/2", "r1 + r2 >= 1"]],
            None,
        )
        .unwrap();
        let b = linear_bounding_box(&r).unwrap();
        assert_eq!(b.0[0], (crate::polyform::rat(1, 2), rat_int(1)));
        assert_eq!(b.0[1], (rat_int(0), crate::polyform::rat(1, 2)));
    }
}
