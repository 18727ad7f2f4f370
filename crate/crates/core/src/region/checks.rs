//! Allowability, strict allowability and admissibility checkers.

use std::fmt;

use rayon::prelude::*;

use super::dimension::{cell_dimension, linear_hulls, Dimension};
use super::normalize::normalize_cell;
use super::probe::ProbeConfig;
use super::{Constraint, Face, Region, RegionKind};
use crate::error::{Error, Result};
use crate::polyform::Polynomial;

/// Upper bound a face dimension must respect.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Bound {
    Below(i64),
    AtMost(i64),
}

impl Bound {
    pub fn admits(self, d: i64) -> bool {
        match self {
            Bound::Below(b) => d < b,
            Bound::AtMost(b) => d <= b,
        }
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::Below(b) => write!(f, "need<{b}"),
            Bound::AtMost(b) => write!(f, "need<={b}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Allowable {
        heuristic: bool,
    },
    Violated {
        face: Face,
        dim: i64,
        need: Bound,
        heuristic: bool,
    },
}

impl Verdict {
    pub fn passed(&self) -> bool {
        matches!(self, Verdict::Allowable { .. })
    }

    pub fn heuristic(&self) -> bool {
        match self {
            Verdict::Allowable { heuristic } | Verdict::Violated { heuristic, .. } => *heuristic,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Allowable { heuristic } => {
                f.write_str("ALLOWABLE")?;
                if *heuristic {
                    f.write_str(" [heuristic]")?;
                }
            }
            Verdict::Violated {
                face,
                dim,
                need,
                heuristic,
            } => {
                write!(f, "VIOLATED face={face} dim={dim} {need}")?;
                if *heuristic {
                    f.write_str(" [heuristic]")?;
                }
            }
        }
        Ok(())
    }
}

/// Run a face-dimension check over `faces` concurrently and report the
/// first violation in face order.
pub fn check_allowable_with<F>(faces: &[Face], face_check: F) -> Result<Verdict>
where
    F: Fn(&Face) -> Result<(Dimension, Bound)> + Sync,
{
    let results: Vec<Result<(Dimension, Bound)>> = faces.par_iter().map(&face_check).collect();
    let mut heuristic = false;
    for (face, r) in faces.iter().zip(results) {
        let (d, bound) = r?;
        heuristic |= d.heuristic;
        if !bound.admits(d.value) {
            return Ok(Verdict::Violated {
                face: face.clone(),
                dim: d.value,
                need: bound,
                heuristic,
            });
        }
    }
    Ok(Verdict::Allowable { heuristic })
}

fn require_real(region: &Region) -> Result<()> {
    if region.kind() != RegionKind::Real {
        return Err(Error::Precondition("checker needs a real region".into()));
    }
    Ok(())
}

/// `dim(A ∩ H_I) < n − |I|` for every nonempty `I`.
pub fn is_allowable(region: &Region, cfg: &ProbeConfig) -> Result<Verdict> {
    require_real(region)?;
    let faces = Face::all_nonempty(region.p());
    check_allowable_with(&faces, |face| {
        let d = super::dimension(&region.face_intersection(face)?, cfg)?;
        Ok((d, Bound::Below(region.face_dimension(face))))
    })
}

/// Outcome of a strictness test with respect to a face `F`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrictVerdict {
    pub strict: bool,
    /// The face `F` at which strictness failed.
    pub at: Option<Face>,
    /// A face `H_J` inside the affine hull of `A ∩ F`.
    pub blocking: Option<Face>,
}

impl fmt::Display for StrictVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.at, &self.blocking) {
            (Some(at), Some(b)) if !self.strict => write!(f, "NOT STRICT at face={at}: hull contains face {b}"),
            _ => f.write_str("STRICT"),
        }
    }
}

fn all_faces(p: usize) -> Vec<Face> {
    let mut out = vec![Face::ambient()];
    out.extend(Face::all_nonempty(p));
    out
}

/// Whether the Zariski closure of `A ∩ H_F` contains no face `H_J`. Exact
/// for regions whose normalized cells are linear; `Err(Nonlinear)` otherwise.
pub fn is_strictly_allowable(region: &Region, face: &Face) -> Result<StrictVerdict> {
    require_real(region)?;
    let a = region.face_intersection(face)?;
    let faces = all_faces(region.p());
    for i in 0..a.cells().len() {
        for hull in linear_hulls(&a.cell_with_box(i), a.n())? {
            if let Some(j) = faces.iter().find(|j| hull.contains_coordinate_subspace(j.indices())) {
                return Ok(StrictVerdict {
                    strict: false,
                    at: Some(face.clone()),
                    blocking: Some(j.clone()),
                });
            }
        }
    }
    Ok(StrictVerdict {
        strict: true,
        at: None,
        blocking: None,
    })
}

/// Strictness with respect to every proper face; checking the
/// codimension-one faces suffices since strictness passes to smaller faces.
pub fn is_almost_strictly_allowable(region: &Region) -> Result<StrictVerdict> {
    require_real(region)?;
    for i in 0..region.p() {
        let v = is_strictly_allowable(region, &Face::new(vec![i]))?;
        if !v.strict {
            return Ok(v);
        }
    }
    Ok(StrictVerdict {
        strict: true,
        at: None,
        blocking: None,
    })
}

/// Per face `I` (including the empty face): the dimension of
/// `A ∩ H_I` away from `D = ∪ {z_t = 1}` and the bound `m − 2|I|`.
pub fn admissibility_faces(region: &Region, m: i64, cfg: &ProbeConfig) -> Result<Vec<(Face, Dimension, Bound)>> {
    if region.kind() != RegionKind::Complex {
        return Err(Error::Precondition("admissibility needs a complex region".into()));
    }
    let k = region.n() / 2;
    if m < k as i64 || m > 2 * k as i64 {
        return Err(Error::Precondition(format!("degree m = {m} outside [{k}, {}]", 2 * k)));
    }
    let faces = all_faces(region.p());
    let n = region.n();
    let d_sets: Vec<Vec<Constraint>> = (0..k)
        .map(|t| {
            vec![
                Constraint::eq(&Polynomial::var(2 * t, n) - &Polynomial::one(n)),
                Constraint::eq(Polynomial::var(2 * t + 1, n)),
            ]
        })
        .collect();
    let results: Vec<Result<Dimension>> = faces
        .par_iter()
        .map(|face| {
            let a = region.face_intersection(face)?;
            let mut best = Dimension::EMPTY;
            for i in 0..a.cells().len() {
                for (j, piece) in normalize_cell(&a.cell_with_box(i)).into_iter().enumerate() {
                    let stream = ((i as u64) << 8) | j as u64;
                    let d = cell_dimension(&piece, n, a.bbox(), None, cfg, stream)?;
                    if d.value < 0 {
                        continue;
                    }
                    let mut inside_d = false;
                    let mut heuristic = d.heuristic;
                    for (t, extra) in d_sets.iter().enumerate() {
                        let dt = cell_dimension(
                            &piece.with(extra.iter().cloned()),
                            n,
                            a.bbox(),
                            None,
                            cfg,
                            stream ^ ((t as u64 + 1) << 32),
                        )?;
                        heuristic |= dt.heuristic;
                        if dt.value == d.value {
                            inside_d = true;
                        }
                    }
                    let value = if inside_d { -1 } else { d.value };
                    best = best.max(Dimension { value, heuristic });
                }
            }
            Ok(best)
        })
        .collect();
    faces
        .into_iter()
        .zip(results)
        .map(|(face, r)| {
            let bound = Bound::AtMost(m - 2 * face.len() as i64);
            Ok((face, r?, bound))
        })
        .collect()
}

/// `dim(A ∩ H_I ∖ D) ≤ m − 2|I|` for every face.
pub fn is_admissible(region: &Region, m: i64, cfg: &ProbeConfig) -> Result<Verdict> {
    let mut heuristic = false;
    for (face, d, bound) in admissibility_faces(region, m, cfg)? {
        heuristic |= d.heuristic;
        if !bound.admits(d.value) {
            return Ok(Verdict::Violated {
                face,
                dim: d.value,
                need: bound,
                heuristic,
            });
        }
    }
    Ok(Verdict::Allowable { heuristic })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyform::rat_int;
    use crate::region::BoundingBox;

    fn cfg() -> ProbeConfig {
        ProbeConfig::default()
    }

    fn s_half() -> Region {
        Region::from_strings(
            2,
            2,
            &[&["0 <= r1", "r1 <= 1", "0 <= r2", "r2 <= 1/2", "r1 + r2 >= 1"]],
            None,
        )
        .unwrap()
    }

    fn unit_box(p: usize) -> Region {
        Region::from_strings(2, p, &[&["0 <= r1", "r1 <= 1", "0 <= r2", "r2 <= 1"]], None).unwrap()
    }

    #[test]
    fn allowability_examples() {
        assert_eq!(
            is_allowable(&s_half(), &cfg()).unwrap(),
            Verdict::Allowable { heuristic: false }
        );
        let v = is_allowable(&unit_box(2), &cfg()).unwrap();
        assert_eq!(v.to_string(), "VIOLATED face={1} dim=1 need<1");
        let tri = Region::from_strings(2, 1, &[&["0 <= x2", "x2 <= r1", "r1 <= 1"]], None).unwrap();
        assert!(is_allowable(&tri, &cfg()).unwrap().passed());
        let tri = Region::from_strings(2, 2, &[&["0 <= r2", "r2 <= r1", "r1 <= 1"]], None).unwrap();
        let v = is_allowable(&tri, &cfg()).unwrap();
        assert!(!v.passed());
    }

    #[test]
    fn strict_examples() {
        let seg = Region::from_strings(2, 2, &[&["r2 = 0", "0 <= r1", "r1 <= 1"]], None).unwrap();
        let v = is_strictly_allowable(&seg, &Face::new(vec![1])).unwrap();
        assert!(!v.strict);
        assert_eq!(v.blocking, Some(Face::new(vec![1])));

        let point = Region::from_strings(2, 2, &[&["r1 = 0", "r2 = 0"]], None).unwrap();
        assert!(!is_strictly_allowable(&point, &Face::new(vec![0, 1])).unwrap().strict);
        assert!(!is_strictly_allowable(&point, &Face::new(vec![0])).unwrap().strict);

        let diag = Region::from_strings(2, 2, &[&["r2 = r1", "0 <= r1", "r1 <= 1"]], None).unwrap();
        let v = is_almost_strictly_allowable(&diag).unwrap();
        assert!(!v.strict);
        assert_eq!(v.blocking, Some(Face::new(vec![0, 1])));

        let shifted = Region::from_strings(2, 2, &[&["r2 = r1 + 1/2", "0 <= r1", "r1 <= 1/4"]], None).unwrap();
        assert!(is_almost_strictly_allowable(&shifted).unwrap().strict);
        assert!(is_strictly_allowable(&shifted, &Face::ambient()).unwrap().strict);

        let empty = Region::from_strings(2, 2, &[], None).unwrap();
        assert!(is_almost_strictly_allowable(&empty).unwrap().strict);

        let curve = Region::from_strings(2, 2, &[&["r2 = r1^2", "0 <= r1", "r1 <= 1"]], None).unwrap();
        assert!(matches!(
            is_strictly_allowable(&curve, &Face::ambient()),
            Err(Error::Nonlinear(_))
        ));
    }

    fn bb(k: usize, lo: i64, hi: i64) -> Option<BoundingBox> {
        Some(BoundingBox(vec![(rat_int(lo), rat_int(hi)); 2 * k]))
    }

    #[test]
    fn admissibility_examples() {
        let disk = Region::complex_from_strings(1, 1, &[&["zr1^2 + zi1^2 <= 1"]], bb(1, -1, 1)).unwrap();
        assert!(is_admissible(&disk, 2, &cfg()).unwrap().passed());
        let v = is_admissible(&disk, 1, &cfg()).unwrap();
        assert!(!v.passed());
        // The whole disk already exceeds m = 1; the face {1} fails too.
        let faces = admissibility_faces(&disk, 1, &cfg()).unwrap();
        let (_, d, b) = faces.iter().find(|(f, _, _)| f.len() == 1).unwrap();
        assert_eq!(d.value, 0);
        assert!(!b.admits(d.value));

        let dc = Region::complex_from_strings(
            2,
            2,
            &[&["zr1^2 + zi1^2 <= 1", "(zr2 - 3)^2 + zi2^2 = 1"]],
            Some(BoundingBox(vec![
                (rat_int(-1), rat_int(1)),
                (rat_int(-1), rat_int(1)),
                (rat_int(2), rat_int(4)),
                (rat_int(-1), rat_int(1)),
            ])),
        )
        .unwrap();
        let v = is_admissible(&dc, 3, &cfg()).unwrap();
        assert!(v.passed(), "{v}");
        assert!(v.heuristic());
    }

    #[test]
    fn d_exclusion() {
        // The single point z = 1 lies in D, so it does not count at I = ∅.
        let pt = Region::complex_from_strings(1, 1, &[&["zr1 = 1", "zi1 = 0"]], None).unwrap();
        let faces = admissibility_faces(&pt, 1, &cfg()).unwrap();
        assert_eq!(faces[0].1.value, -1);
    }
}
