//! Blow-up sequences making a hypersurface meet the faces properly, and the
//! face-by-face loop towards almost strict allowability.

use std::fmt;

use super::tower::{face_chart_maps, BlowupTower, ChartId};
use crate::error::{Error, Result};
use crate::polyform::{newton_exponents, MonomialMap, Polynomial, Rational};
use crate::region::{is_allowable, is_strictly_allowable, Face, ProbeConfig, Region, RegionKind, Verdict};

pub const DEFAULT_CAP: usize = 64;

/// Result of [`make_proper`]: the tower and the strict transform in every
/// leaf chart. `complete` is false when the stage cap stopped the run.
#[derive(Clone, Debug, PartialEq)]
pub struct ProperOutcome {
    pub tower: BlowupTower,
    pub transforms: Vec<(ChartId, Polynomial)>,
    pub complete: bool,
}

/// Constant term present in the divisor variables.
pub fn meets_faces_properly(g: &Polynomial, p: usize) -> Result<bool> {
    Ok(newton_exponents(g, p)?.contains_origin())
}

fn transform_in_chart(g: &Polynomial, a: usize, local: &MonomialMap) -> Result<Polynomial> {
    let h = local.apply_poly(g)?;
    let content = h.monomial_content(&[a]);
    Ok(h.div_monomial(&content).expect("content divides"))
}

/// Strip the monomial factor in the divisor variables outside `zeros`.
fn strip_divisors(g: &Polynomial, p: usize, zeros: &[usize]) -> Polynomial {
    let vars: Vec<usize> = (0..p).filter(|v| !zeros.contains(v)).collect();
    let content = g.monomial_content(&vars);
    g.div_monomial(&content).expect("content divides")
}

/// Greedy choice of a codimension-2 center among the divisor variables not
/// in `zeros`: largest total drop of the minimal r-degree over the new
/// charts, ties broken lexicographically.
fn choose_center(g: &Polynomial, n: usize, p: usize, zeros: &[usize]) -> Result<Face> {
    let free: Vec<usize> = (0..p).filter(|v| !zeros.contains(v)).collect();
    let base = newton_exponents(g, p)?;
    let d0 = base.min_total_degree() as i64;
    let mut best: Option<(i64, Face)> = None;
    for (x, &i) in free.iter().enumerate() {
        for &j in &free[x + 1..] {
            let center = Face::new(vec![i, j]);
            // Both variables must occur, otherwise the blow-up cannot help.
            if !g.involves(i) || !g.involves(j) {
                continue;
            }
            let mut score = 0;
            for (a, local) in face_chart_maps(n, p, &center)? {
                let h = transform_in_chart(g, a, &local)?;
                score += d0 - newton_exponents(&h, p)?.min_total_degree() as i64;
            }
            if best.as_ref().is_none_or(|(s, _)| score > *s) {
                best = Some((score, center));
            }
        }
    }
    best.map(|(_, c)| c)
        .ok_or_else(|| Error::Precondition("no codimension-2 center involves the polynomial".into()))
}

/// Blow up inside `start` until the transform of `g` meets the faces
/// properly in every new chart; `zeros` are divisor variables already set
/// to zero (the face being worked on). Returns the leaves reached.
fn proper_run(
    tower: &mut BlowupTower,
    start: ChartId,
    g: Polynomial,
    zeros: &[usize],
    cap: usize,
) -> Result<(Vec<(ChartId, Polynomial)>, bool)> {
    let (n, p) = (tower.n(), tower.p());
    let mut leaves = Vec::new();
    let mut stack = vec![(start, strip_divisors(&g, p, zeros))];
    let mut complete = true;
    while let Some((chart, g)) = stack.pop() {
        if meets_faces_properly(&g, p)? {
            leaves.push((chart, g));
            continue;
        }
        if tower.stages().len() >= cap {
            complete = false;
            leaves.push((chart, g));
            continue;
        }
        let center = choose_center(&g, n, p, zeros)?;
        let ids = tower.blow_up_in_place(chart, &center)?;
        let maps = face_chart_maps(n, p, &center)?;
        for (id, (a, local)) in ids.into_iter().zip(maps).rev() {
            let h = transform_in_chart(&g, a, &local)?;
            stack.push((id, strip_divisors(&h, p, zeros)));
        }
    }
    leaves.sort_by_key(|(id, _)| *id);
    Ok((leaves, complete))
}

/// Blow up codimension-2 faces until the strict transform of `f` has a
/// nonzero constant term in the divisor variables of every leaf chart.
pub fn make_proper(f: &Polynomial, p: usize, cap: usize) -> Result<ProperOutcome> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let n = f.nvars();
    if p > n {
        return Err(Error::IndexOutOfRange(format!("p = {p} exceeds {n} variables")));
    }
    let all: Vec<usize> = (0..p).collect();
    if !f.monomial_content(&all).is_one() {
        return Err(Error::Precondition(
            "polynomial is divisible by a divisor coordinate".into(),
        ));
    }
    let mut tower = BlowupTower::new(n, p);
    let root = tower.root();
    let (transforms, complete) = proper_run(&mut tower, root, f.clone(), &[], cap)?;
    Ok(ProperOutcome {
        tower,
        transforms,
        complete,
    })
}

/// One line of the run log: in `chart`, `failing` faces of dimension
/// `face_dim` were not strictly allowable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CounterEntry {
    pub chart: ChartId,
    pub face_dim: usize,
    pub failing: usize,
}

impl fmt::Display for CounterEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "chart {} dim {}: {} failing",
            self.chart, self.face_dim, self.failing
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StrictOutcome {
    pub tower: BlowupTower,
    pub log: Vec<CounterEntry>,
}

/// Blow up until every leaf chart's preimage of `a` is almost strictly
/// allowable. `witnesses` gives, for faces where strictness fails, a
/// polynomial on the base vanishing on `a ∩ F`. Faces are treated in
/// ascending dimension; each failing face is repaired by making the
/// witness, restricted to the face, meet the remaining faces properly.
pub fn make_almost_strictly_allowable(
    a: &Region,
    witnesses: &[(Face, Polynomial)],
    cap: usize,
) -> Result<StrictOutcome> {
    if a.kind() != RegionKind::Real {
        return Err(Error::Precondition("needs a real region".into()));
    }
    match is_allowable(a, &ProbeConfig::default())? {
        Verdict::Allowable { heuristic: true } | Verdict::Violated { heuristic: true, .. } => {
            return Err(Error::Unsupported("allowability is only known heuristically".into()))
        }
        Verdict::Violated { face, .. } => {
            return Err(Error::Precondition(format!("region is not allowable (face {face})")))
        }
        Verdict::Allowable { .. } => {}
    }
    let (n, p) = (a.n(), a.p());
    let mut tower = BlowupTower::new(n, p);
    let mut log = Vec::new();
    let mut work = vec![tower.root()];
    let faces = Face::all_nonempty(p);
    while let Some(chart) = work.pop() {
        let pre = tower.chart(chart)?.preimage_region(a, None)?;
        let mut repair: Option<Face> = None;
        for size in (1..=p).rev() {
            let mut failing = Vec::new();
            for face in faces.iter().filter(|f| f.len() == size) {
                if !is_strictly_allowable(&pre, face)?.strict {
                    failing.push(face.clone());
                }
            }
            log.push(CounterEntry {
                chart,
                face_dim: n - size,
                failing: failing.len(),
            });
            if let Some(face) = failing.into_iter().next() {
                repair = Some(face);
                break;
            }
        }
        let Some(face) = repair else { continue };
        if tower.stages().len() >= cap {
            return Err(Error::CapExceeded(cap));
        }
        let witness = witnesses
            .iter()
            .find(|(f, _)| *f == face)
            .map(|(_, w)| w)
            .ok_or_else(|| Error::MissingWitness(face.to_string()))?;
        let mut g = tower.chart(chart)?.strict_transform(witness)?;
        for &i in face.indices() {
            g = g.substitute_value(i, &Rational::from_integer(0.into()));
        }
        if g.is_zero() {
            return Err(Error::Precondition(format!(
                "witness vanishes on the whole face {face}"
            )));
        }
        let g = strip_divisors(&g, p, face.indices());
        if meets_faces_properly(&g, p)? {
            return Err(Error::Precondition(format!(
                "witness for face {face} does not vanish on the region"
            )));
        }
        let before = tower.stages().len();
        let (leaves, complete) = proper_run(&mut tower, chart, g, face.indices(), cap)?;
        if !complete || tower.stages().len() == before {
            return Err(Error::CapExceeded(cap));
        }
        work.extend(leaves.into_iter().rev().map(|(id, _)| id));
    }
    Ok(StrictOutcome { tower, log })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyform::{parse_poly, Variables};
    use crate::region::is_almost_strictly_allowable;

    fn poly(s: &str, n: usize, p: usize) -> Polynomial {
        parse_poly(s, &Variables::real(n, p)).unwrap()
    }

    fn check_leaves(out: &ProperOutcome, f: &Polynomial, p: usize) {
        for c in out.tower.leaves() {
            let g = c.strict_transform(f).unwrap();
            assert!(meets_faces_properly(&g, p).unwrap(), "chart {} has {}", c.label(), g);
        }
    }

    #[test]
    fn proper_examples() {
        let f = poly("r1 + r2", 2, 2);
        let out = make_proper(&f, 2, DEFAULT_CAP).unwrap();
        assert!(out.complete);
        assert_eq!(out.tower.depth(), 1);
        check_leaves(&out, &f, 2);

        let f = poly("r1 + r2^2", 2, 2);
        let out = make_proper(&f, 2, DEFAULT_CAP).unwrap();
        assert_eq!(out.tower.depth(), 2);
        assert_eq!(out.tower.stages().len(), 2);
        check_leaves(&out, &f, 2);

        let out = make_proper(&poly("1 + r1", 2, 2), 2, DEFAULT_CAP).unwrap();
        assert!(out.tower.is_trivial());
    }

    #[test]
    fn proper_errors_and_cap() {
        assert!(matches!(
            make_proper(&poly("r1*r2 + r1", 2, 2), 2, 8),
            Err(Error::Precondition(_))
        ));
        let out = make_proper(&poly("r1 + r2^5", 2, 2), 2, 2).unwrap();
        assert!(!out.complete);
        assert_eq!(out.tower.stages().len(), 2);
    }

    #[test]
    fn strict_loop_examples() {
        let diag = Region::from_strings(2, 2, &[&["r2 = r1", "0 <= r1", "r1 <= 1/2"]], None).unwrap();
        assert!(matches!(
            make_almost_strictly_allowable(&diag, &[], DEFAULT_CAP),
            Err(Error::Precondition(_))
        ));
        let off = Region::from_strings(2, 2, &[&["r2 = r1", "1/4 <= r1", "r1 <= 1/2"]], None).unwrap();
        assert!(make_almost_strictly_allowable(&off, &[], DEFAULT_CAP)
            .unwrap()
            .tower
            .is_trivial());
        let curve = Region::from_strings(2, 2, &[&["r2 - r1^2 = 0", "1/4 <= r1", "r1 <= 1"]], None).unwrap();
        let w = [(Face::new(vec![0]), poly("r2 - r1^2", 2, 2))];
        assert!(make_almost_strictly_allowable(&curve, &w, DEFAULT_CAP)
            .unwrap()
            .tower
            .is_trivial());
    }

    #[test]
    fn strict_loop_blows_up() {
        // A ∩ H_1 is a segment on a line through the origin of H_1.
        let a = Region::from_strings(
            3,
            3,
            &[&["r2 = r3", "1/4 <= r2", "r2 <= 1/2", "0 <= r1", "r1 <= 1"]],
            None,
        )
        .unwrap();
        assert!(!is_almost_strictly_allowable(&a).unwrap().strict);
        let w = [(Face::new(vec![0]), poly("r2 - r3", 3, 3))];
        assert!(matches!(
            make_almost_strictly_allowable(&a, &[], DEFAULT_CAP),
            Err(Error::MissingWitness(_))
        ));
        let out = make_almost_strictly_allowable(&a, &w, DEFAULT_CAP).unwrap();
        assert_eq!(out.tower.stages().len(), 1);
        assert_eq!(out.tower.stages()[0].center, Face::new(vec![1, 2]));
        for c in out.tower.leaves() {
            let pre = c.preimage_region(&a, None).unwrap();
            assert!(
                is_almost_strictly_allowable(&pre).unwrap().strict,
                "chart {}",
                c.label()
            );
        }
        // The counter for the failing dimension went from 1 to 0.
        let root: Vec<_> = out.log.iter().filter(|e| e.chart == ChartId(0)).collect();
        assert_eq!(root.last().unwrap().failing, 1);
        for e in out.log.iter().filter(|e| e.chart != ChartId(0)) {
            assert_eq!(e.failing, 0);
        }
    }
}
