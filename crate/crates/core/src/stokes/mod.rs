//! Stokes checks on the standard simplex for polynomial maps, with the
//! retraction onto the `t`-excised simplex.

mod corpus;

use std::fmt;

use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::integrate::{integrate_log_form, Ladder, LadderEntry, QuadConfig};
use crate::polyform::{
    parse_log_form, parse_poly, rat_from_f64, sort_sign, LogForm, MonomialMap, Polynomial, Rational, Variables,
};
use crate::region::{BoundingBox, Cell, Constraint, Region};

pub use corpus::{stokes_corpus, StokesCase};

/// Polynomial map from `ℝ^m` (containing the standard `m`-simplex) to `ℝ^ℓ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplexMap {
    m: usize,
    components: Vec<Polynomial>,
}

impl SimplexMap {
    pub fn new(m: usize, components: Vec<Polynomial>) -> Result<Self> {
        if m == 0 {
            return Err(Error::Precondition("simplex dimension must be positive".into()));
        }
        if let Some(c) = components.iter().find(|c| c.nvars() != m) {
            return Err(Error::DimensionMismatch {
                expected: m,
                got: c.nvars(),
            });
        }
        Ok(SimplexMap { m, components })
    }

    pub fn identity(m: usize) -> Result<Self> {
        SimplexMap::new(m, (0..m).map(|i| Polynomial::var(i, m)).collect())
    }

    /// Components written in `x1..xm`.
    pub fn parse(m: usize, components: &[&str]) -> Result<Self> {
        let vars = Variables::real(m, 0);
        let polys = components.iter().map(|c| parse_poly(c, &vars)).collect::<Result<_>>()?;
        SimplexMap::new(m, polys)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn target_dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[Polynomial] {
        &self.components
    }

    /// `self ∘ inner` for an affine or polynomial `inner: ℝ^k → ℝ^m`.
    fn after(&self, inner: &[Polynomial]) -> Result<Vec<Polynomial>> {
        self.components.iter().map(|c| c.compose(inner)).collect()
    }
}

/// A codimension-one face given by an ordered list of vertices of the
/// simplex (`0` is the origin, `i` is `e_i`) and an orientation sign.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundaryFace {
    pub vertices: Vec<usize>,
    pub sign: i32,
}

impl BoundaryFace {
    /// Affine embedding `y ↦ v_{a_0} + Σ_j y_j (v_{a_j} − v_{a_0})` of the
    /// standard `(m−1)`-simplex.
    pub fn embedding(&self, m: usize) -> Vec<Polynomial> {
        let k = self.vertices.len() - 1;
        let vertex = |v: usize, i: usize| if v == i + 1 { Rational::one() } else { Rational::zero() };
        (0..m)
            .map(|i| {
                let base = vertex(self.vertices[0], i);
                let mut p = Polynomial::constant(base.clone(), k);
                for j in 1..=k {
                    let d = vertex(self.vertices[j], i) - &base;
                    if !d.is_zero() {
                        p = &p + &Polynomial::var(j - 1, k).scale(&d);
                    }
                }
                p
            })
            .collect()
    }
}

/// Signed boundary of the standard `m`-simplex, outward normal first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundaryChain {
    pub m: usize,
    pub faces: Vec<BoundaryFace>,
}

/// Faces `{x_i = 0}` with sign `(−1)^i`, then `{Σ x = 1}` with sign
/// `(−1)^{m−1}`, each parametrized by its vertex order.
pub fn boundary_chain(m: usize) -> Result<BoundaryChain> {
    if m == 0 {
        return Err(Error::Precondition("boundary of a point".into()));
    }
    let mut faces: Vec<BoundaryFace> = (1..=m)
        .map(|i| BoundaryFace {
            vertices: (0..=m).filter(|&v| v != i).collect(),
            sign: if i % 2 == 0 { 1 } else { -1 },
        })
        .collect();
    let mut last = vec![m];
    last.extend(1..m);
    faces.push(BoundaryFace {
        vertices: last,
        sign: if m % 2 == 1 { 1 } else { -1 },
    });
    Ok(BoundaryChain { m, faces })
}

/// Faces of `∂∂Δ^m` as (sorted vertex set, net signed multiplicity).
pub fn double_boundary(m: usize) -> Result<Vec<(Vec<usize>, i32)>> {
    if m < 2 {
        return Err(Error::Precondition("double boundary needs m >= 2".into()));
    }
    let outer = boundary_chain(m)?;
    let inner = boundary_chain(m - 1)?;
    let mut acc: Vec<(Vec<usize>, i32)> = Vec::new();
    for f in &outer.faces {
        for g in &inner.faces {
            let verts: Vec<usize> = g.vertices.iter().map(|&b| f.vertices[b]).collect();
            // An ordered vertex list is a permutation of its sorted set.
            let (sorted, perm) = sort_sign(&verts).expect("distinct vertices");
            let s = f.sign * g.sign * perm;
            match acc.iter_mut().find(|(k, _)| *k == sorted) {
                Some(e) => e.1 += s,
                None => acc.push((sorted, s)),
            }
        }
    }
    Ok(acc)
}

/// `r_t(x)_i = (1 − (m+1)t)·x_i + t`, retracting `Δ^m` onto
/// `S_t = {x_i ≥ t, Σ x_i ≤ 1 − t}`.
pub fn t_excision(x: &[f64], t: f64) -> Result<Vec<f64>> {
    let m = x.len();
    if !(0.0..1.0 / (m as f64 + 1.0)).contains(&t) {
        return Err(Error::Domain(format!("t = {t} outside [0, 1/{})", m + 1)));
    }
    let s = 1.0 - (m as f64 + 1.0) * t;
    Ok(x.iter().map(|&xi| s * xi + t).collect())
}

fn excision_polys(m: usize, t: &Rational) -> Vec<Polynomial> {
    let s = Rational::one() - Rational::from_integer((m as i64 + 1).into()) * t;
    (0..m)
        .map(|i| &Polynomial::var(i, m).scale(&s) + &Polynomial::constant(t.clone(), m))
        .collect()
}

/// The standard simplex `{x_i ≥ t, Σ x ≤ 1 − t}` (`t = 0` for `Δ^m`).
pub fn excised_simplex(m: usize, t: &Rational) -> Result<Region> {
    let mut cs: Vec<Constraint> = (0..m)
        .map(|i| Constraint::le(&Polynomial::constant(t.clone(), m) - &Polynomial::var(i, m)))
        .collect();
    let sum = (0..m).fold(Polynomial::zero(m), |acc, i| &acc + &Polynomial::var(i, m));
    cs.push(Constraint::le(&sum - &Polynomial::constant(Rational::one() - t, m)));
    let bbox = BoundingBox(vec![(Rational::zero(), Rational::one()); m]);
    Region::real(m, 0, vec![Cell::new(cs)], Some(bbox))
}

/// Both sides of Stokes' formula with per-face contributions.
#[derive(Clone, Debug, PartialEq)]
pub struct StokesReport {
    pub lhs: f64,
    pub lhs_error: f64,
    pub rhs: f64,
    pub rhs_error: f64,
    pub residual: f64,
    /// Signed boundary-face integrals in chain order.
    pub faces: Vec<f64>,
}

impl fmt::Display for StokesReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "boundary={:.12} interior={:.12} residual={:.3e}",
            self.lhs, self.rhs, self.residual
        )
    }
}

fn require_smooth(h: &SimplexMap, psi: &LogForm) -> Result<()> {
    if psi.p() != 0 {
        return Err(Error::Precondition("the form must not have logarithmic poles".into()));
    }
    if psi.n() != h.target_dim() {
        return Err(Error::DimensionMismatch {
            expected: h.target_dim(),
            got: psi.n(),
        });
    }
    if psi.degree() + 1 != h.m() {
        return Err(Error::FormMismatch(format!(
            "a {}-form on the boundary of a {}-simplex",
            psi.degree(),
            h.m()
        )));
    }
    Ok(())
}

/// `∫_{Δ^k} g*ψ` for a top-degree pullback (`k ≥ 1`) or a point value.
fn simplex_integral(images: Vec<Polynomial>, psi: &LogForm, k: usize, cfg: &QuadConfig) -> Result<(f64, f64)> {
    if k == 0 {
        let point: Vec<f64> = images.iter().map(|p| p.eval_f64(&[])).collect::<Result<_>>()?;
        return Ok((psi.coefficient(&[]).eval_f64(&point)?, 0.0));
    }
    let pulled = psi.pullback(&MonomialMap::from_polys(0, 0, images)?)?;
    let region = excised_simplex(k, &Rational::zero())?;
    let r = integrate_log_form(&region, &pulled, cfg)?;
    Ok((r.value, r.error))
}

fn boundary_integral(
    images_of: impl Fn(&[Polynomial]) -> Result<Vec<Polynomial>> + Sync,
    m: usize,
    psi: &LogForm,
    cfg: &QuadConfig,
) -> Result<(Vec<f64>, f64)> {
    let chain = boundary_chain(m)?;
    let parts: Vec<(f64, f64)> = chain
        .faces
        .par_iter()
        .map(|f| {
            let (v, e) = simplex_integral(images_of(&f.embedding(m))?, psi, m - 1, cfg)?;
            Ok((f.sign as f64 * v, e))
        })
        .collect::<Result<_>>()?;
    Ok((parts.iter().map(|p| p.0).collect(), parts.iter().map(|p| p.1).sum()))
}

/// `∫_{∂Δ^m} h*ψ` against `∫_{Δ^m} h*(dψ)`.
pub fn check_stokes(h: &SimplexMap, psi: &LogForm, cfg: &QuadConfig) -> Result<StokesReport> {
    require_smooth(h, psi)?;
    let m = h.m();
    let (faces, lhs_error) = boundary_integral(|e| h.after(e), m, psi, cfg)?;
    let lhs: f64 = faces.iter().sum();
    let (rhs, rhs_error) = simplex_integral(h.components().to_vec(), &psi.exterior_d()?, m, cfg)?;
    Ok(StokesReport {
        lhs,
        lhs_error,
        rhs,
        rhs_error,
        residual: (lhs - rhs).abs(),
        faces,
    })
}

/// Boundary integrals of `(h ∘ r_t)*ψ` on a ladder of `t`, with the `t = 0`
/// value for comparison.
#[derive(Clone, Debug, PartialEq)]
pub struct ExcisionReport {
    pub ladder: Ladder,
    pub at_zero: f64,
}

impl ExcisionReport {
    /// The ladder converged to the unexcised boundary integral.
    pub fn consistent(&self, tol: f64) -> bool {
        match self.ladder.verdict {
            crate::integrate::LadderVerdict::Converged { limit, error_bound } => {
                (limit - self.at_zero).abs() <= tol + error_bound
            }
            _ => false,
        }
    }
}

pub fn excision_boundary_ladder(h: &SimplexMap, psi: &LogForm, ts: &[f64], cfg: &QuadConfig) -> Result<ExcisionReport> {
    require_smooth(h, psi)?;
    let m = h.m();
    let limit = 1.0 / (m as f64 + 1.0);
    if let Some(t) = ts.iter().find(|&&t| !(t > 0.0 && t < limit)) {
        return Err(Error::Domain(format!("t = {t} outside (0, 1/{})", m + 1)));
    }
    let (faces, _) = boundary_integral(|e| h.after(e), m, psi, cfg)?;
    let at_zero = faces.iter().sum();
    let mut entries = Vec::new();
    for &t in ts {
        let r = excision_polys(m, &rat_from_f64(t));
        let (faces, err) = boundary_integral(
            |e| {
                let inner: Vec<Polynomial> = r.iter().map(|p| p.compose(e)).collect::<Result<_>>()?;
                h.after(&inner)
            },
            m,
            psi,
            cfg,
        )?;
        entries.push(LadderEntry {
            param: t,
            value: faces.iter().sum(),
            stderr: err,
        });
    }
    Ok(ExcisionReport {
        ladder: Ladder::new(entries, &cfg.ladder_rule()),
        at_zero,
    })
}

/// Parse a smooth form in `x1..xl`.
pub fn parse_smooth_form(text: &str, l: usize) -> Result<LogForm> {
    parse_log_form(text, l, 0)
}
