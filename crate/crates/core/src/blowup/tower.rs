//! Towers of blow-ups of coordinate faces.

use std::fmt::{self, Write as _};

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::polyform::{format_poly, rat_int, MonomialMap, Polynomial, Rational, Variables};
use crate::region::{BoundingBox, Cell, Constraint, Face, Region, RegionKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ChartId(pub usize);

impl fmt::Display for ChartId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// One coordinate chart of a tower.
#[derive(Clone, Debug, PartialEq)]
pub struct Chart {
    id: ChartId,
    parent: Option<ChartId>,
    stage: Option<usize>,
    label: String,
    depth: usize,
    local: MonomialMap,
    to_base: MonomialMap,
    exceptional: Vec<usize>,
    /// Constraints (in chart coordinates) cutting out this chart's share of
    /// the overlap with its sibling charts.
    partition: Vec<Constraint>,
}

impl Chart {
    pub fn id(&self) -> ChartId {
        self.id
    }

    pub fn parent(&self) -> Option<ChartId> {
        self.parent
    }

    /// Index into the tower's stages of the blow-up that created the chart.
    pub fn stage(&self) -> Option<usize> {
        self.stage
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// Map from this chart to its parent chart.
    pub fn local_map(&self) -> &MonomialMap {
        &self.local
    }

    /// Composed map from this chart to the base.
    pub fn map(&self) -> &MonomialMap {
        &self.to_base
    }

    /// Divisor coordinates of the chart that are exceptional divisors.
    pub fn exceptional(&self) -> &[usize] {
        &self.exceptional
    }

    pub fn partition(&self) -> &[Constraint] {
        &self.partition
    }

    /// Pull `f` (on the base) back to the chart and remove the largest
    /// monomial factor in the exceptional coordinates.
    pub fn strict_transform(&self, f: &Polynomial) -> Result<Polynomial> {
        if f.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let g = self.to_base.apply_poly(f)?;
        let content = g.monomial_content(&self.exceptional);
        Ok(g.div_monomial(&content).expect("content divides"))
    }

    /// `μ⁻¹(A)` inside this chart, with the chart's share of the overlap
    /// and a bounding box (derived from the base box when not given).
    pub fn preimage_region(&self, a: &Region, bbox: Option<BoundingBox>) -> Result<Region> {
        if a.kind() != RegionKind::Real {
            return Err(Error::Precondition("preimage needs a real region".into()));
        }
        if a.n() != self.to_base.target_n() || a.p() != self.to_base.target_p() {
            return Err(Error::DimensionMismatch {
                expected: self.to_base.target_n(),
                got: a.n(),
            });
        }
        if self.parent.is_none() {
            return Ok(match bbox {
                Some(b) => a.with_bbox(Some(b)),
                None => a.clone(),
            });
        }
        // The declared box of `A` is part of `A`.
        let mut walls = Vec::new();
        if let Some(b) = a.bbox() {
            let n = a.n();
            for (i, (lo, hi)) in b.0.iter().enumerate() {
                let x = Polynomial::var(i, n);
                walls.push(Constraint::le(&Polynomial::constant(lo.clone(), n) - &x));
                walls.push(Constraint::le(&x - &Polynomial::constant(hi.clone(), n)));
            }
        }
        let cells = a
            .cells()
            .iter()
            .map(|c| {
                let mut cs = c
                    .constraints
                    .iter()
                    .chain(&walls)
                    .map(|k| Ok(k.with_poly(self.to_base.apply_poly(k.poly())?)))
                    .collect::<Result<Vec<_>>>()?;
                cs.extend(self.partition.iter().cloned());
                Ok(Cell::new(cs))
            })
            .collect::<Result<Vec<_>>>()?;
        let bbox = match bbox {
            Some(b) => b,
            None => self.derived_box(a)?,
        };
        Region::real(a.n(), a.p(), cells, Some(bbox))
    }

    /// Every chart coordinate is an old coordinate or a ratio bounded by 1,
    /// so divisor coordinates stay within `max(1, |base bounds|)`.
    fn derived_box(&self, a: &Region) -> Result<BoundingBox> {
        let base = a.effective_box()?;
        let p = a.p();
        let m = base.0[..p]
            .iter()
            .flat_map(|(lo, hi)| [lo.abs(), hi.abs()])
            .fold(Rational::one(), |acc, v| if v > acc { v } else { acc });
        let nonneg = base.0[..p].iter().all(|(lo, _)| !lo.is_negative());
        let lo = if nonneg { Rational::zero() } else { -m.clone() };
        let mut rows = vec![(lo, m); p];
        rows.extend(base.0[p..].iter().cloned());
        Ok(BoundingBox(rows))
    }
}

/// One blow-up: a center in a parent chart and the charts it created.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stage {
    pub parent: ChartId,
    pub center: Face,
    pub charts: Vec<ChartId>,
}

/// A tree of blow-ups over the base space `(n, p)`.
#[derive(Clone, Debug, PartialEq)]
pub struct BlowupTower {
    n: usize,
    p: usize,
    charts: Vec<Chart>,
    stages: Vec<Stage>,
}

/// The standard charts of the blow-up of `center`: in chart `a`,
/// `r_a ↦ u_a` and `r_b ↦ u_a·u_b` for the other `b` in the center.
pub fn face_chart_maps(n: usize, p: usize, center: &Face) -> Result<Vec<(usize, MonomialMap)>> {
    if center.len() < 2 {
        return Err(Error::InvalidCenter(format!("center {center} has codimension below 2")));
    }
    if let Some(&bad) = center.indices().iter().find(|&&i| i >= p) {
        return Err(Error::InvalidCenter(format!(
            "index {} is not a divisor coordinate",
            bad + 1
        )));
    }
    center
        .indices()
        .iter()
        .map(|&a| {
            let images = (0..n)
                .map(|t| {
                    if t != a && center.indices().contains(&t) {
                        &Polynomial::var(a, n) * &Polynomial::var(t, n)
                    } else {
                        Polynomial::var(t, n)
                    }
                })
                .collect();
            Ok((a, MonomialMap::from_polys(p, p, images)?))
        })
        .collect()
}

impl BlowupTower {
    pub fn new(n: usize, p: usize) -> Self {
        let id = MonomialMap::identity(n, p);
        BlowupTower {
            n,
            p,
            charts: vec![Chart {
                id: ChartId(0),
                parent: None,
                stage: None,
                label: "0".into(),
                depth: 0,
                local: id.clone(),
                to_base: id,
                exceptional: Vec::new(),
                partition: Vec::new(),
            }],
            stages: Vec::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn root(&self) -> ChartId {
        ChartId(0)
    }

    pub fn charts(&self) -> &[Chart] {
        &self.charts
    }

    pub fn stages(&self) -> &[Stage] {
        &self.stages
    }

    pub fn is_trivial(&self) -> bool {
        self.stages.is_empty()
    }

    pub fn chart(&self, id: ChartId) -> Result<&Chart> {
        self.charts
            .get(id.0)
            .ok_or_else(|| Error::IndexOutOfRange(format!("unknown chart {id}")))
    }

    /// Charts that were not blown up further, by id.
    pub fn leaves(&self) -> Vec<&Chart> {
        self.charts
            .iter()
            .filter(|c| !self.stages.iter().any(|s| s.parent == c.id))
            .collect()
    }

    /// Longest chain of blow-ups.
    pub fn depth(&self) -> usize {
        self.charts.iter().map(|c| c.depth).max().unwrap_or(0)
    }

    /// Blow up `center` inside `chart`, returning the extended tower.
    pub fn blow_up_face(&self, chart: ChartId, center: &Face) -> Result<BlowupTower> {
        let mut t = self.clone();
        t.blow_up_in_place(chart, center)?;
        Ok(t)
    }

    pub(crate) fn blow_up_in_place(&mut self, chart: ChartId, center: &Face) -> Result<Vec<ChartId>> {
        let parent = self.chart(chart)?.clone();
        if self.stages.iter().any(|s| s.parent == chart) {
            return Err(Error::InvalidCenter(format!("chart {chart} was already blown up")));
        }
        let maps = face_chart_maps(self.n, self.p, center)?;
        let stage_index = self.stages.len();
        let mut ids = Vec::new();
        for (k, (a, local)) in maps.into_iter().enumerate() {
            let id = ChartId(self.charts.len());
            let mut exceptional = parent.exceptional.clone();
            if !exceptional.contains(&a) {
                exceptional.push(a);
                exceptional.sort_unstable();
            }
            let mut partition = parent
                .partition
                .iter()
                .map(|c| Ok(c.with_poly(local.apply_poly(c.poly())?)))
                .collect::<Result<Vec<_>>>()?;
            for &b in center.indices() {
                if b != a {
                    partition.extend(Constraint::bounds(b, self.n, &rat_int(-1), &rat_int(1)));
                }
            }
            self.charts.push(Chart {
                id,
                parent: Some(chart),
                stage: Some(stage_index),
                label: format!("{}.{}", stage_index + 1, (b'a' + k as u8) as char),
                depth: parent.depth + 1,
                to_base: parent.to_base.compose(&local)?,
                local,
                exceptional,
                partition,
            });
            ids.push(id);
        }
        self.stages.push(Stage {
            parent: chart,
            center: center.clone(),
            charts: ids.clone(),
        });
        Ok(ids)
    }

    /// `stage k: center {i,j} in chart c; chart k.a: r1<-r1, r2<-r1*r2; ...`
    pub fn to_text(&self) -> String {
        let vars = Variables::real(self.n, self.p);
        let mut out = String::new();
        for (k, s) in self.stages.iter().enumerate() {
            let _ = write!(
                out,
                "stage {}: center {} in chart {}",
                k + 1,
                s.center,
                self.charts[s.parent.0].label
            );
            for id in &s.charts {
                let c = &self.charts[id.0];
                let images = c.local.images();
                let parts: Vec<String> = s
                    .center
                    .indices()
                    .iter()
                    .map(|&t| {
                        format!(
                            "{}<-{}",
                            vars.names()[t],
                            format_poly(&images[t], &vars).replace(' ', "")
                        )
                    })
                    .collect();
                let _ = write!(out, "; chart {}: {}", c.label, parts.join(", "));
            }
            out.push('\n');
        }
        out
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph tower {\n");
        for c in &self.charts {
            let _ = writeln!(out, "  c{} [label=\"{}\"];", c.id, c.label);
        }
        for s in &self.stages {
            for id in &s.charts {
                let _ = writeln!(out, "  c{} -> c{} [label=\"{}\"];", s.parent, id, s.center);
            }
        }
        out.push_str("}\n");
        out
    }
}

impl fmt::Display for BlowupTower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Free-function form of [`Chart::strict_transform`].
pub fn strict_transform(f: &Polynomial, chart: &Chart) -> Result<Polynomial> {
    chart.strict_transform(f)
}

/// Free-function form of [`Chart::preimage_region`].
pub fn preimage_region(a: &Region, chart: &Chart, bbox: Option<BoundingBox>) -> Result<Region> {
    chart.preimage_region(a, bbox)
}
