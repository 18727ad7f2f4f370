//! Reduction of complex integrals to real integration tasks in polar
//! coordinates, admissible integration and annulus-slice decay.

use std::collections::BTreeSet;
use std::fmt;

use num_traits::Signed;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::integrate::{decay_from_points, integrate_density, DecayReport, Density, IntegralResult, QuadConfig};
use crate::polyform::{rat_from_f64, sort_sign, Polynomial, Rational};
use crate::region::{
    admissibility_faces, check_allowable_with, dimension, dimension_projected, is_admissible, Bound, BoundingBox,
    Constraint, Face, ProbeConfig, Region, RegionKind, Relation, Verdict,
};
use crate::slicing::CompiledRegion;

use super::form::{ComplexLogForm, ComplexPoly};
use super::polar::{polar_preimage, sector_piece, SectorAssignment};

/// Split of the complex coordinates by which polar differentials survive:
/// `P` keeps `dr/r`, `Q` keeps `dτ`, `R` keeps both. Indices are zero-based.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    pub p: Vec<usize>,
    pub q: Vec<usize>,
    pub r: Vec<usize>,
}

impl Partition {
    /// Real degree `|P| + |Q| + 2|R|`.
    pub fn degree(&self) -> usize {
        self.p.len() + self.q.len() + 2 * self.r.len()
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |v: &[usize]| v.iter().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(",");
        write!(
            f,
            "P={{{}}} Q={{{}}} R={{{}}}",
            show(&self.p),
            show(&self.q),
            show(&self.r)
        )
    }
}

/// One real integral contributing to a complex one.
#[derive(Clone, Debug)]
pub struct RealTask {
    pub sectors: SectorAssignment,
    pub partition: Partition,
    /// Real region in the surviving polar coordinates, `r`'s first.
    pub region: Region,
    /// Polar index (`r_k = k`, `τ_k = n + k`) of each region coordinate.
    pub coords: Vec<usize>,
    /// Density coefficient over the region coordinates followed by
    /// `c_k = (1 + τ_k²)^{-1/2}`, `k = 1..n`; `r` entries are `dr/r`.
    pub coefficient: ComplexPoly,
    /// Sign relating the coordinate order to `(r_1, τ_1, r_2, τ_2, …)`.
    pub orientation: i32,
    n: usize,
}

impl RealTask {
    fn extras(&self) -> Vec<usize> {
        (0..self.n)
            .map(|k| {
                self.coords
                    .iter()
                    .position(|&c| c == self.n + k)
                    .expect("angles are never sliced")
            })
            .collect()
    }

    fn poles(&self) -> Vec<bool> {
        self.coords.iter().map(|&c| c < self.n).collect()
    }

    /// Densities of the real and imaginary parts.
    pub fn densities(&self) -> Result<(Density, Density)> {
        let d = self.coords.len();
        let re = Density::weighted(d, self.coefficient.re.clone(), self.extras(), self.poles())?;
        let im = Density::weighted(d, self.coefficient.im.clone(), self.extras(), self.poles())?;
        Ok((re, im))
    }

    /// Allowability of the projected task region (angles of `P` forgotten)
    /// with respect to `H_i` for `i ∈ P ∪ extra`.
    pub fn allowability(&self, extra: &[usize], probe: &ProbeConfig) -> Result<Verdict> {
        let allowed: BTreeSet<usize> = self.partition.p.iter().chain(extra).copied().collect();
        let radii: Vec<usize> = self.coords.iter().copied().filter(|&c| c < self.n).collect();
        let local: BTreeSet<usize> = radii
            .iter()
            .enumerate()
            .filter(|(_, k)| allowed.contains(k))
            .map(|(j, _)| j)
            .collect();
        let faces: Vec<Face> = Face::all_nonempty(radii.len())
            .into_iter()
            .filter(|f| f.indices().iter().all(|j| local.contains(j)))
            .collect();
        let keep: Vec<usize> = (0..self.coords.len())
            .filter(|&j| {
                let c = self.coords[j];
                !(c >= self.n && self.partition.p.contains(&(c - self.n)))
            })
            .collect();
        let m = keep.len() as i64;
        check_allowable_with(&faces, |face| {
            let d = dimension_projected(&self.region.face_intersection(face)?, Some(&keep), probe)?;
            Ok((d, Bound::Below(m - face.len() as i64)))
        })
    }
}

/// Sector pieces `A ∩ (S_{α_1} × … × S_{α_n})`; pieces decided empty
/// exactly are dropped, doubtful ones kept.
pub fn sector_decompose(a: &Region, probe: &ProbeConfig) -> Result<Vec<(SectorAssignment, Region)>> {
    if a.kind() != RegionKind::Complex {
        return Err(Error::Precondition(
            "sector decomposition needs a complex region".into(),
        ));
    }
    let pieces: Vec<(SectorAssignment, Region)> = SectorAssignment::all(a.n() / 2)
        .into_iter()
        .map(|s| sector_piece(a, &s).map(|r| (s, r)))
        .collect::<Result<_>>()?;
    let keep: Vec<bool> = pieces
        .par_iter()
        .map(|(_, r)| dimension(r, probe).map(|d| d.value >= 0 || d.heuristic))
        .collect::<Result<_>>()?;
    Ok(pieces
        .into_iter()
        .zip(keep)
        .filter(|(_, k)| *k)
        .map(|(p, _)| p)
        .collect())
}

/// Coordinates pinned to one constant by a single-variable linear equality
/// in every cell.
fn pinned_radii(region: &Region, n: usize) -> Vec<(usize, Rational)> {
    if region.cells().is_empty() {
        return Vec::new();
    }
    (0..n)
        .filter_map(|k| {
            let mut value: Option<Rational> = None;
            for cell in region.cells() {
                let found = cell.constraints.iter().find_map(|c| {
                    if c.relation() != Relation::Eq || !c.is_linear() || c.poly().support() != [k] {
                        return None;
                    }
                    let (coeffs, c0) = c.poly().linear_parts()?;
                    Some(-c0 / &coeffs[k])
                });
                match (found, &value) {
                    (None, _) => return None,
                    (Some(v), None) => value = Some(v),
                    (Some(v), Some(w)) if &v == w => {}
                    _ => return None,
                }
            }
            value.filter(|v| !v.is_negative()).map(|v| (k, v))
        })
        .collect()
}

/// Real tasks of one sector piece. `extra` constrains the polar region,
/// `slices` fix radii before pinned ones are detected.
fn sector_tasks(
    a: &Region,
    w: &ComplexLogForm,
    sectors: &SectorAssignment,
    extra: &[Constraint],
    slices: &[(usize, Rational)],
) -> Result<Vec<RealTask>> {
    let n = w.n();
    let pre = polar_preimage(a, sectors)?.restrict(extra);
    let mut fixed: Vec<(usize, Rational)> = slices.to_vec();
    for (k, v) in pinned_radii(&pre, n) {
        if !fixed.iter().any(|(j, _)| *j == k) {
            fixed.push((k, v));
        }
    }
    fixed.sort_by_key(|x| std::cmp::Reverse(x.0));
    let mut region = pre;
    for (k, v) in &fixed {
        region = region.slice_coordinate(*k, v)?;
    }
    let sliced: BTreeSet<usize> = fixed.iter().map(|(k, _)| *k).collect();
    let coords: Vec<usize> = (0..2 * n).filter(|c| !sliced.contains(c)).collect();
    let ranks: Vec<usize> = coords
        .iter()
        .map(|&c| if c < n { 2 * c } else { 2 * (c - n) + 1 })
        .collect();
    let orientation = sort_sign(&ranks).expect("distinct coordinates").1;

    let mut tasks = Vec::new();
    for (key, coeff) in w.polar_pullback(sectors)? {
        if key.iter().any(|c| sliced.contains(c)) {
            continue;
        }
        if key != coords {
            return Err(Error::Unsupported(format!(
                "form of degree {} on a polar region of dimension {}",
                key.len(),
                coords.len()
            )));
        }
        let mut c = coeff;
        for (k, v) in &fixed {
            c = c.map(|p| p.substitute_value(*k, v).remove_var(*k));
        }
        let mut partition = Partition::default();
        for k in 0..n {
            match (key.contains(&k), key.contains(&(n + k))) {
                (true, true) => partition.r.push(k),
                (true, false) => partition.p.push(k),
                _ => partition.q.push(k),
            }
        }
        tasks.push(RealTask {
            sectors: sectors.clone(),
            partition,
            region: region.clone(),
            coords: coords.clone(),
            coefficient: c,
            orientation,
            n,
        });
    }
    Ok(tasks)
}

/// Tasks of a reduction plus whether any decision behind them was sampled.
#[derive(Clone, Debug)]
pub struct Reduction {
    pub tasks: Vec<RealTask>,
    pub heuristic: bool,
}

fn check_degree(a: &Region, w: &ComplexLogForm, m: usize) -> Result<()> {
    if a.kind() != RegionKind::Complex || a.n() != 2 * w.n() {
        return Err(Error::FormMismatch(format!(
            "form in {} complex variables on a region of real dimension {}",
            w.n(),
            a.n()
        )));
    }
    if w.degree() != m {
        return Err(Error::FormMismatch(format!(
            "form of degree {} for m = {m}",
            w.degree()
        )));
    }
    Ok(())
}

fn gate(a: &Region, m: usize, probe: &ProbeConfig) -> Result<bool> {
    let v = is_admissible(a, m as i64, probe)?;
    if !v.passed() {
        return Err(Error::Precondition(format!("region is not {m}-admissible: {v}")));
    }
    Ok(v.heuristic())
}

/// Sector pieces times surviving partitions, after the admissibility gate.
pub fn reduce_to_real_tasks(a: &Region, w: &ComplexLogForm, m: usize, probe: &ProbeConfig) -> Result<Reduction> {
    check_degree(a, w, m)?;
    let heuristic = gate(a, m, probe)?;
    let mut tasks = Vec::new();
    for (s, _) in sector_decompose(a, probe)? {
        tasks.extend(sector_tasks(a, w, &s, &[], &[])?);
    }
    Ok(Reduction { tasks, heuristic })
}

/// Result of one task: signed real and imaginary contributions.
#[derive(Clone, Debug)]
pub struct TaskIntegral {
    pub sectors: SectorAssignment,
    pub partition: Partition,
    pub re: Option<IntegralResult>,
    pub im: Option<IntegralResult>,
    pub orientation: i32,
}

/// A complex integral with error estimates. `abs_value` bounds `∫|ω|`
/// from above by the sum of the absolute real and imaginary parts.
#[derive(Clone, Debug)]
pub struct ComplexIntegral {
    pub re: f64,
    pub im: f64,
    pub re_error: f64,
    pub im_error: f64,
    pub abs_value: f64,
    pub abs_error: f64,
    pub converged: bool,
    pub heuristic: bool,
    pub tasks: Vec<TaskIntegral>,
}

impl fmt::Display for ComplexIntegral {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let head = if self.converged { "CONVERGED" } else { "NOT CONVERGED" };
        write!(
            f,
            "{head} value={:.10} {} {:.10}i error=({:.3e}, {:.3e}) abs<={:.10}",
            self.re,
            if self.im < 0.0 { "-" } else { "+" },
            self.im.abs(),
            self.re_error,
            self.im_error,
            self.abs_value
        )?;
        if self.heuristic {
            f.write_str(" [heuristic]")?;
        }
        Ok(())
    }
}

fn integrate_part(
    region: &CompiledRegion,
    density: &Density,
    zero: bool,
    cfg: &QuadConfig,
) -> Result<Option<IntegralResult>> {
    if zero {
        return Ok(None);
    }
    integrate_density(region, density, cfg).map(Some)
}

fn integrate_task(task: &RealTask, cfg: &QuadConfig) -> Result<TaskIntegral> {
    let compiled = CompiledRegion::new(&task.region)?;
    let (re_d, im_d) = task.densities()?;
    Ok(TaskIntegral {
        sectors: task.sectors.clone(),
        partition: task.partition.clone(),
        re: integrate_part(&compiled, &re_d, task.coefficient.re.is_zero(), cfg)?,
        im: integrate_part(&compiled, &im_d, task.coefficient.im.is_zero(), cfg)?,
        orientation: task.orientation,
    })
}

fn combine(results: Vec<TaskIntegral>, heuristic: bool) -> ComplexIntegral {
    let mut out = ComplexIntegral {
        re: 0.0,
        im: 0.0,
        re_error: 0.0,
        im_error: 0.0,
        abs_value: 0.0,
        abs_error: 0.0,
        converged: true,
        heuristic,
        tasks: Vec::new(),
    };
    for t in &results {
        let s = t.orientation as f64;
        if let Some(r) = &t.re {
            out.re += s * r.value;
            out.re_error += r.error;
            out.abs_value += r.abs_value;
            out.abs_error += r.abs_error;
            out.converged &= r.converged();
            out.heuristic |= r.heuristic;
        }
        if let Some(r) = &t.im {
            out.im += s * r.value;
            out.im_error += r.error;
            out.abs_value += r.abs_value;
            out.abs_error += r.abs_error;
            out.converged &= r.converged();
            out.heuristic |= r.heuristic;
        }
    }
    out.tasks = results;
    out
}

/// `∫_A ω` for an `m`-admissible complex region, summed over sectors and
/// partitions. Integrals run in the orientation of `(r_1, τ_1, r_2, τ_2, …)`,
/// which is the complex orientation on top-degree pieces.
pub fn integrate_admissible(
    a: &Region,
    w: &ComplexLogForm,
    m: usize,
    cfg: &QuadConfig,
    probe: &ProbeConfig,
) -> Result<ComplexIntegral> {
    cfg.validate()?;
    let reduction = reduce_to_real_tasks(a, w, m, probe)?;
    let results: Vec<TaskIntegral> = reduction
        .tasks
        .par_iter()
        .map(|t| integrate_task(t, cfg))
        .collect::<Result<_>>()?;
    Ok(combine(results, reduction.heuristic))
}

/// How the slice `A_t` is cut out.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AnnulusVariant {
    /// `A ∩ {|z_1| = t ≥ |z_2|}`, gated by admissibility.
    Dominated,
    /// `A ∩ {|z_1| = t}`, gated by `A ∩ (∪ H_i) ⊂ D`.
    Circle,
}

/// `∫_{A_t} |ω|` for `t` on a ladder, fitted to `C·t^α`.
pub fn annulus_slice_decay(
    a: &Region,
    w: &ComplexLogForm,
    ts: &[f64],
    variant: AnnulusVariant,
    cfg: &QuadConfig,
    probe: &ProbeConfig,
) -> Result<DecayReport> {
    cfg.validate()?;
    let n = w.n();
    if n < 2 {
        return Err(Error::Precondition(
            "annulus slices need at least two complex coordinates".into(),
        ));
    }
    let m = w.degree() + 1;
    check_degree(a, w, w.degree())?;
    let mut heuristic = match variant {
        AnnulusVariant::Dominated => gate(a, m, probe)?,
        AnnulusVariant::Circle => {
            let mut h = false;
            for (face, d, _) in admissibility_faces(a, m as i64, probe)? {
                h |= d.heuristic;
                if !face.is_empty() && d.value >= 0 {
                    return Err(Error::Precondition(format!(
                        "region meets the divisor face {face} outside D (dimension {})",
                        d.value
                    )));
                }
            }
            h
        }
    };
    if ts.iter().any(|&t| !(t > 0.0)) {
        return Err(Error::Domain("slice parameters must be positive".into()));
    }
    let pieces = sector_decompose(a, probe)?;
    let nv = 2 * n;
    let mut points = Vec::new();
    for &t in ts {
        let tr = rat_from_f64(t);
        let extra = match variant {
            AnnulusVariant::Dominated => {
                vec![Constraint::le(
                    &Polynomial::var(1, nv) - &Polynomial::constant(tr.clone(), nv),
                )]
            }
            AnnulusVariant::Circle => Vec::new(),
        };
        let mut tasks = Vec::new();
        for (s, _) in &pieces {
            tasks.extend(sector_tasks(a, w, s, &extra, &[(0, tr.clone())])?);
        }
        let results: Vec<TaskIntegral> = tasks
            .par_iter()
            .map(|task| integrate_task(task, cfg))
            .collect::<Result<_>>()?;
        let total = combine(results, false);
        heuristic |= total.heuristic || !total.converged;
        points.push((t, total.abs_value));
    }
    decay_from_points(points, heuristic)
}

/// Mirror image `{(x, -y)}` of a complex region.
pub fn mirror_region(a: &Region) -> Result<Region> {
    if a.kind() != RegionKind::Complex {
        return Err(Error::Precondition("mirroring needs a complex region".into()));
    }
    let nv = a.n();
    let images: Vec<Polynomial> = (0..nv)
        .map(|j| {
            let v = Polynomial::var(j, nv);
            if j % 2 == 1 {
                -&v
            } else {
                v
            }
        })
        .collect();
    let cells = a
        .cells()
        .iter()
        .map(|c| {
            c.constraints
                .iter()
                .map(|k| Ok(k.with_poly(k.poly().compose(&images)?)))
                .collect::<Result<Vec<_>>>()
                .map(crate::region::Cell::new)
        })
        .collect::<Result<Vec<_>>>()?;
    let bbox = a.bbox().map(|b| {
        BoundingBox(
            b.0.iter()
                .enumerate()
                .map(|(j, (lo, hi))| {
                    if j % 2 == 1 {
                        (-hi.clone(), -lo.clone())
                    } else {
                        (lo.clone(), hi.clone())
                    }
                })
                .collect(),
        )
    });
    Region::new(a.n(), a.p(), RegionKind::Complex, cells, bbox)
}
