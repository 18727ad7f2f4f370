//! Semi-algebraic regions with distinguished divisor coordinates.

mod checks;
mod dimension;
mod fibers;
mod io;
mod normalize;
mod probe;

use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::polyform::{format_poly, parse_poly, rat_to_f64, Polynomial, Rational, Variables};

pub use checks::{
    admissibility_faces, check_allowable_with, is_admissible, is_allowable, is_almost_strictly_allowable,
    is_strictly_allowable, Bound, StrictVerdict, Verdict,
};
pub(crate) use dimension::cell_lp;
pub use dimension::{cell_dimension, dimension, dimension_projected, Dimension};
pub use fibers::{fiber_finiteness_probe, FiberReport};
pub use io::{RegionDocument, RegionFile};
pub use normalize::normalize_cell;
pub use probe::ProbeConfig;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Relation {
    /// `poly ≤ 0`
    Le,
    /// `poly = 0`
    Eq,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConstraintKind {
    LinearLe,
    LinearEq,
    PolyLe,
    PolyEq,
}

/// `poly ≤ 0` or `poly = 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Constraint {
    poly: Polynomial,
    relation: Relation,
}

impl Constraint {
    pub fn le(poly: Polynomial) -> Self {
        Constraint {
            poly,
            relation: Relation::Le,
        }
    }

    pub fn eq(poly: Polynomial) -> Self {
        Constraint {
            poly,
            relation: Relation::Eq,
        }
    }

    /// `lo ≤ x_var ≤ hi` as two constraints.
    pub fn bounds(var: usize, n: usize, lo: &Rational, hi: &Rational) -> [Constraint; 2] {
        let x = Polynomial::var(var, n);
        [
            Constraint::le(&Polynomial::constant(lo.clone(), n) - &x),
            Constraint::le(&x - &Polynomial::constant(hi.clone(), n)),
        ]
    }

    pub fn poly(&self) -> &Polynomial {
        &self.poly
    }

    pub fn relation(&self) -> Relation {
        self.relation
    }

    pub fn kind(&self) -> ConstraintKind {
        match (self.poly.is_linear(), self.relation) {
            (true, Relation::Le) => ConstraintKind::LinearLe,
            (true, Relation::Eq) => ConstraintKind::LinearEq,
            (false, Relation::Le) => ConstraintKind::PolyLe,
            (false, Relation::Eq) => ConstraintKind::PolyEq,
        }
    }

    pub fn is_linear(&self) -> bool {
        self.poly.is_linear()
    }

    pub fn map_poly(&self, f: impl FnOnce(&Polynomial) -> Polynomial) -> Constraint {
        Constraint {
            poly: f(&self.poly),
            relation: self.relation,
        }
    }

    /// Same relation, different polynomial.
    pub fn with_poly(&self, poly: Polynomial) -> Constraint {
        Constraint {
            poly,
            relation: self.relation,
        }
    }

    /// Parse `lhs OP rhs` with `OP` one of `<=`, `>=`, `=`, `==`, `<`, `>`.
    /// Strict relations denote their closures.
    pub fn parse(text: &str, vars: &Variables) -> Result<Constraint> {
        const OPS: [&str; 6] = ["<=", ">=", "==", "=", "<", ">"];
        let (pos, op) = OPS
            .iter()
            .filter_map(|op| text.find(op).map(|p| (p, *op)))
            .min_by_key(|(p, op)| (*p, std::cmp::Reverse(op.len())))
            .ok_or_else(|| Error::Syntax {
                pos: 0,
                msg: format!("no relation in constraint `{text}`"),
            })?;
        let lhs = parse_poly(&text[..pos], vars)?;
        let rhs_text = &text[pos + op.len()..];
        let rhs = parse_poly(rhs_text, vars).map_err(|e| match e {
            Error::Syntax { pos: p, msg } => Error::Syntax {
                pos: p + pos + op.len(),
                msg,
            },
            other => other,
        })?;
        Ok(match op {
            "<=" | "<" => Constraint::le(&lhs - &rhs),
            ">=" | ">" => Constraint::le(&rhs - &lhs),
            _ => Constraint::eq(&lhs - &rhs),
        })
    }

    pub fn format(&self, vars: &Variables) -> String {
        let op = match self.relation {
            Relation::Le => "<=",
            Relation::Eq => "=",
        };
        format!("{} {} 0", format_poly(&self.poly, vars), op)
    }

    /// Float satisfaction test with an absolute slack.
    pub fn holds_f64(&self, point: &[f64], slack: f64) -> bool {
        let v = self.poly.eval_f64(point).unwrap_or(f64::NAN);
        match self.relation {
            Relation::Le => v <= slack,
            Relation::Eq => v.abs() <= slack,
        }
    }
}

/// Conjunction of constraints.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Cell {
    pub constraints: Vec<Constraint>,
}

impl Cell {
    pub fn new(constraints: Vec<Constraint>) -> Self {
        Cell { constraints }
    }

    pub fn is_linear(&self) -> bool {
        self.constraints.iter().all(Constraint::is_linear)
    }

    pub fn with(&self, extra: impl IntoIterator<Item = Constraint>) -> Cell {
        let mut c = self.clone();
        c.constraints.extend(extra);
        c
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RegionKind {
    Real,
    Complex,
}

/// Axis-aligned box `Π [lo_i, hi_i]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundingBox(pub Vec<(Rational, Rational)>);

impl BoundingBox {
    pub fn to_f64(&self) -> Vec<(f64, f64)> {
        self.0.iter().map(|(a, b)| (rat_to_f64(a), rat_to_f64(b))).collect()
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn constraints(&self) -> Vec<Constraint> {
        let n = self.0.len();
        self.0
            .iter()
            .enumerate()
            .flat_map(|(i, (lo, hi))| Constraint::bounds(i, n, lo, hi))
            .collect()
    }

    pub fn unit(n: usize) -> Self {
        BoundingBox(vec![(Rational::zero(), Rational::one()); n])
    }
}

/// A coordinate face `H_I`, stored with 0-based sorted indices.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Face(Vec<usize>);

impl Face {
    pub fn new(mut indices: Vec<usize>) -> Self {
        indices.sort_unstable();
        indices.dedup();
        Face(indices)
    }

    /// From 1-based indices as written in reports.
    pub fn from_one_based(indices: &[usize]) -> Self {
        Self::new(indices.iter().map(|i| i - 1).collect())
    }

    pub fn ambient() -> Self {
        Face(Vec::new())
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// All nonempty subsets of `0..p`, by size then lexicographically.
    pub fn all_nonempty(p: usize) -> Vec<Face> {
        let mut out: Vec<Face> = (1u64..(1u64 << p))
            .map(|mask| Face((0..p).filter(|i| mask & (1 << i) != 0).collect()))
            .collect();
        out.sort_by(|a, b| a.0.len().cmp(&b.0.len()).then_with(|| a.0.cmp(&b.0)));
        out
    }
}

impl fmt::Display for Face {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|i| (i + 1).to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// Union of cells, intersected with an optional bounding box.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Region {
    n: usize,
    p: usize,
    kind: RegionKind,
    cells: Vec<Cell>,
    bbox: Option<BoundingBox>,
}

impl Region {
    pub fn new(n: usize, p: usize, kind: RegionKind, cells: Vec<Cell>, bbox: Option<BoundingBox>) -> Result<Self> {
        match kind {
            RegionKind::Real if p > n => {
                return Err(Error::InvalidRegion(format!("divisor count {p} exceeds dimension {n}")))
            }
            RegionKind::Complex if !n.is_multiple_of(2) => {
                return Err(Error::InvalidRegion(format!(
                    "complex region with odd real dimension {n}"
                )))
            }
            RegionKind::Complex if 2 * p > n => {
                return Err(Error::InvalidRegion(format!(
                    "divisor count {p} exceeds complex dimension {}",
                    n / 2
                )))
            }
            _ => {}
        }
        for c in cells.iter().flat_map(|c| &c.constraints) {
            if c.poly().nvars() != n {
                return Err(Error::InvalidRegion(format!(
                    "constraint over {} variables in a {n}-dimensional region",
                    c.poly().nvars()
                )));
            }
        }
        if let Some(b) = &bbox {
            if b.dim() != n {
                return Err(Error::InvalidRegion(format!(
                    "box of dimension {} in ambient {n}",
                    b.dim()
                )));
            }
            if b.0.iter().any(|(lo, hi)| lo > hi) {
                return Err(Error::InvalidRegion("box with lower bound above upper bound".into()));
            }
        }
        Ok(Region {
            n,
            p,
            kind,
            cells,
            bbox,
        })
    }

    pub fn real(n: usize, p: usize, cells: Vec<Cell>, bbox: Option<BoundingBox>) -> Result<Self> {
        Self::new(n, p, RegionKind::Real, cells, bbox)
    }

    /// Parse a real region from constraint strings, one list per cell.
    pub fn from_strings(n: usize, p: usize, cells: &[&[&str]], bbox: Option<BoundingBox>) -> Result<Self> {
        let vars = Variables::real(n, p);
        let cells = cells
            .iter()
            .map(|cs| {
                Ok(Cell::new(
                    cs.iter().map(|s| Constraint::parse(s, &vars)).collect::<Result<_>>()?,
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::real(n, p, cells, bbox)
    }

    /// Parse a complex region over `k` complex coordinates.
    pub fn complex_from_strings(k: usize, p: usize, cells: &[&[&str]], bbox: Option<BoundingBox>) -> Result<Self> {
        let vars = Variables::complex(k);
        let cells = cells
            .iter()
            .map(|cs| {
                Ok(Cell::new(
                    cs.iter().map(|s| Constraint::parse(s, &vars)).collect::<Result<_>>()?,
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(2 * k, p, RegionKind::Complex, cells, bbox)
    }

    pub fn empty(n: usize, p: usize) -> Self {
        Region {
            n,
            p,
            kind: RegionKind::Real,
            cells: Vec::new(),
            bbox: None,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn kind(&self) -> RegionKind {
        self.kind
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn bbox(&self) -> Option<&BoundingBox> {
        self.bbox.as_ref()
    }

    pub fn variables(&self) -> Variables {
        match self.kind {
            RegionKind::Real => Variables::real(self.n, self.p),
            RegionKind::Complex => Variables::complex(self.n / 2),
        }
    }

    pub fn is_linear(&self) -> bool {
        self.cells.iter().all(Cell::is_linear)
    }

    /// Real coordinates that vanish on the divisor with 0-based index `i`.
    pub fn divisor_coordinates(&self, i: usize) -> Vec<usize> {
        match self.kind {
            RegionKind::Real => vec![i],
            RegionKind::Complex => vec![2 * i, 2 * i + 1],
        }
    }

    /// Cell `i` together with the box constraints.
    pub fn cell_with_box(&self, i: usize) -> Cell {
        match &self.bbox {
            Some(b) => self.cells[i].with(b.constraints()),
            None => self.cells[i].clone(),
        }
    }

    pub fn with_cells(&self, cells: Vec<Cell>) -> Region {
        Region { cells, ..self.clone() }
    }

    pub fn with_bbox(&self, bbox: Option<BoundingBox>) -> Region {
        Region { bbox, ..self.clone() }
    }

    /// Add constraints to every cell.
    pub fn restrict(&self, extra: &[Constraint]) -> Region {
        self.with_cells(self.cells.iter().map(|c| c.with(extra.iter().cloned())).collect())
    }

    /// Region whose cell list is the concatenation of both.
    pub fn union(&self, other: &Region) -> Result<Region> {
        if self.n != other.n || self.p != other.p || self.kind != other.kind {
            return Err(Error::InvalidRegion("union of regions over different spaces".into()));
        }
        let bbox = match (&self.bbox, &other.bbox) {
            (Some(a), Some(b)) => Some(BoundingBox(
                a.0.iter()
                    .zip(&b.0)
                    .map(|((l1, h1), (l2, h2))| (l1.min(l2).clone(), h1.max(h2).clone()))
                    .collect(),
            )),
            _ => None,
        };
        let mut cells = self.cells.clone();
        cells.extend(other.cells.iter().cloned());
        Ok(Region {
            cells,
            bbox,
            ..self.clone()
        })
    }

    pub fn face_constraints(&self, face: &Face) -> Result<Vec<Constraint>> {
        if let Some(&bad) = face.indices().iter().find(|&&i| i >= self.p) {
            return Err(Error::IndexOutOfRange(format!(
                "face index {} exceeds divisor count {}",
                bad + 1,
                self.p
            )));
        }
        Ok(face
            .indices()
            .iter()
            .flat_map(|&i| self.divisor_coordinates(i))
            .map(|v| Constraint::eq(Polynomial::var(v, self.n)))
            .collect())
    }

    pub fn face_intersection(&self, face: &Face) -> Result<Region> {
        Ok(self.restrict(&self.face_constraints(face)?))
    }

    /// Real dimension of the face `H_I`.
    pub fn face_dimension(&self, face: &Face) -> i64 {
        let per = match self.kind {
            RegionKind::Real => 1,
            RegionKind::Complex => 2,
        };
        self.n as i64 - per * face.len() as i64
    }

    /// The slice `{x_i = value}` as a region in the remaining coordinates.
    pub fn slice_coordinate(&self, i: usize, value: &Rational) -> Result<Region> {
        if self.kind != RegionKind::Real {
            return Err(Error::Unsupported("coordinate slices of complex regions".into()));
        }
        if i >= self.n {
            return Err(Error::IndexOutOfRange(format!("coordinate {} of {}", i + 1, self.n)));
        }
        let cells = self
            .cells
            .iter()
            .map(|c| {
                Cell::new(
                    c.constraints
                        .iter()
                        .map(|k| k.with_poly(k.poly().substitute_value(i, value).remove_var(i)))
                        .collect(),
                )
            })
            .collect();
        let mut cells: Vec<Cell> = cells;
        let bbox = match &self.bbox {
            Some(b) => {
                let (lo, hi) = &b.0[i];
                if value < lo || value > hi {
                    cells.clear();
                }
                let mut rows = b.0.clone();
                rows.remove(i);
                Some(BoundingBox(rows))
            }
            None => None,
        };
        let p = if i < self.p { self.p - 1 } else { self.p };
        Region::real(self.n - 1, p, cells, bbox)
    }

    /// Float membership test with slack.
    pub fn contains_f64(&self, point: &[f64], slack: f64) -> bool {
        if let Some(b) = &self.bbox {
            if b.to_f64()
                .iter()
                .zip(point)
                .any(|(&(lo, hi), &x)| x < lo - slack || x > hi + slack)
            {
                return false;
            }
        }
        self.cells
            .iter()
            .any(|c| c.constraints.iter().all(|k| k.holds_f64(point, slack)))
    }

    /// Bounding box: the declared one, else an exact LP box for linear regions.
    pub fn effective_box(&self) -> Result<BoundingBox> {
        if let Some(b) = &self.bbox {
            return Ok(b.clone());
        }
        dimension::linear_bounding_box(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_classifies() {
        let vars = Variables::real(2, 2);
        let c = Constraint::parse("r1 + r2 >= 1", &vars).unwrap();
        assert_eq!(c.kind(), ConstraintKind::LinearLe);
        assert_eq!(c.poly(), &parse_poly("1 - r1 - r2", &vars).unwrap());
        let e = Constraint::parse("r2^2 = r1", &vars).unwrap();
        assert_eq!(e.kind(), ConstraintKind::PolyEq);
        assert!(Constraint::parse("r1 + r2", &vars).is_err());
    }

    #[test]
    fn validates_dimensions() {
        assert!(Region::from_strings(1, 2, &[], None).is_err());
        let r = Region::from_strings(2, 2, &[&["0 <= r1", "r1 <= 1", "0 <= r2", "r2 <= 1"]], None).unwrap();
        assert_eq!(r.cells().len(), 1);
        assert_eq!(r.cells()[0].constraints.len(), 4);
        assert!(r.face_intersection(&Face::new(vec![2])).is_err());
    }

    #[test]
    fn faces_enumerate_in_order() {
        let f = Face::all_nonempty(3);
        let shown: Vec<String> = f.iter().map(|x| x.to_string()).collect();
        assert_eq!(shown, ["{1}", "{2}", "{3}", "{1,2}", "{1,3}", "{2,3}", "{1,2,3}"]);
    }
}
