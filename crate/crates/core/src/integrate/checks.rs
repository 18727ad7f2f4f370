//! Decay of slice volumes, pushforward bounds and deformation limits.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::config::QuadConfig;
use super::engine::integrate_log_form;
use super::ladder::{fit_decay_exponent, DecayFit, Ladder, LadderEntry, LadderVerdict};
use crate::error::{Error, Result};
use crate::polyform::{rat_from_f64, rat_to_f64, CompiledPoly, LogForm, MonomialMap, Polynomial};
use crate::region::{is_allowable, ProbeConfig, Region, RegionKind};
use crate::slicing::{real_roots_f64, CompiledRegion};

/// `t = 2^-3, …, 2^-10`.
pub fn default_decay_params() -> Vec<f64> {
    (3..=10).map(|k| 0.5f64.powi(k)).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub enum DecayVerdict {
    Decaying {
        alpha: f64,
    },
    /// Every slice volume vanished.
    IdenticallyZero,
    NoDecay {
        alpha: f64,
    },
}

impl fmt::Display for DecayVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DecayVerdict::Decaying { alpha } => write!(f, "DECAYING alpha={alpha:.4}"),
            DecayVerdict::IdenticallyZero => f.write_str("IDENTICALLY ZERO"),
            DecayVerdict::NoDecay { alpha } => write!(f, "NO DECAY alpha={alpha:.4}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecayReport {
    /// `(t, ∫_{A ∩ {u = t}} |ω|)`.
    pub points: Vec<(f64, f64)>,
    pub fit: Option<DecayFit>,
    pub verdict: DecayVerdict,
    pub heuristic: bool,
}

impl fmt::Display for DecayReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.verdict)?;
        if let Some(fit) = &self.fit {
            write!(f, " ({fit})")?;
        }
        if self.heuristic {
            f.write_str(" [heuristic]")?;
        }
        Ok(())
    }
}

/// Volumes below this count as zero when deciding "identically zero".
const ZERO_VOLUME: f64 = 1e-14;

/// Build a decay report from `(t, vol)` samples.
pub fn decay_from_points(points: Vec<(f64, f64)>, heuristic: bool) -> Result<DecayReport> {
    if points.iter().all(|&(_, v)| v.abs() <= ZERO_VOLUME) {
        return Ok(DecayReport {
            points,
            fit: None,
            verdict: DecayVerdict::IdenticallyZero,
            heuristic,
        });
    }
    let fit = fit_decay_exponent(&points)?;
    let verdict = if fit.no_decay {
        DecayVerdict::NoDecay { alpha: fit.alpha }
    } else {
        DecayVerdict::Decaying { alpha: fit.alpha }
    };
    Ok(DecayReport {
        points,
        fit: Some(fit),
        verdict,
        heuristic,
    })
}

/// Volumes `∫_{A ∩ {u = t}} |ω|` for `u = r_i^k` (given as an exponent
/// vector over the divisor coordinates), fitted to `C·t^α`.
pub fn slice_decay_report(a: &Region, u: &[u32], w: &LogForm, ts: &[f64], cfg: &QuadConfig) -> Result<DecayReport> {
    if u.len() != a.p() {
        return Err(Error::DimensionMismatch {
            expected: a.p(),
            got: u.len(),
        });
    }
    let support: Vec<usize> = (0..u.len()).filter(|&i| u[i] > 0).collect();
    let (var, k) = match support.as_slice() {
        [] => return Err(Error::Domain("the monomial u must not be 1".into())),
        [i] => (*i, u[*i]),
        _ => {
            return Err(Error::Unsupported(
                "slices by monomials in more than one coordinate".into(),
            ))
        }
    };
    if w.n() != a.n() || w.degree() + 1 != a.n() {
        return Err(Error::FormMismatch(format!(
            "need a {}-form on {} coordinates, got a {}-form on {}",
            a.n() - 1,
            a.n(),
            w.degree(),
            w.n()
        )));
    }
    if a.n() < 2 {
        return Err(Error::Unsupported("slices of one-dimensional regions".into()));
    }
    let verdict = is_allowable(a, &ProbeConfig::default())?;
    if !verdict.passed() {
        return Err(Error::Precondition(format!("region is not allowable: {verdict}")));
    }
    let negative_side = a.effective_box()?.0[var].0 < num_traits::Zero::zero();
    let mut points = Vec::with_capacity(ts.len());
    for &t in ts {
        if !(t > 0.0) {
            return Err(Error::Domain(format!("slice parameter {t} must be positive")));
        }
        let root = t.powf(1.0 / k as f64);
        let mut values = vec![root];
        if k % 2 == 0 && negative_side {
            values.push(-root);
        }
        let mut vol = 0.0;
        for v in values {
            let value = rat_from_f64(v);
            let slice = a.slice_coordinate(var, &value)?;
            let form = w.restrict_coordinate(var, &value)?;
            vol += integrate_log_form(&slice, &form, cfg)?.abs_value;
        }
        points.push((t, vol));
    }
    decay_from_points(points, verdict.heuristic())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundVerdict {
    Pass,
    Fail,
    /// The fiber count hit its cap; the right side is only a lower bound.
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundReport {
    pub lhs: f64,
    pub lhs_error: f64,
    pub delta: usize,
    pub max_abs_coefficient: f64,
    pub image_volume: f64,
    pub rhs: f64,
    pub verdict: BoundVerdict,
}

impl fmt::Display for BoundReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = match self.verdict {
            BoundVerdict::Pass => "PASS",
            BoundVerdict::Fail => "FAIL",
            BoundVerdict::Inconclusive => "INCONCLUSIVE",
        };
        write!(
            f,
            "{v} lhs={:.10} rhs={:.10} delta={} max|a|={:.6} vol(image)={:.6}",
            self.lhs, self.rhs, self.delta, self.max_abs_coefficient, self.image_volume
        )
    }
}

/// Safety factor on the sampled maximum of `|a|`.
pub const MAX_SAFETY: f64 = 1.05;
const BOUND_SAMPLES: usize = 2000;
const DELTA_CAP: usize = 64;
const IMAGE_BINS: usize = 256;

/// `|∫_S a df_1 ∧ … ∧ df_m| ≤ δ(f) · max_S |a| · vol(f(S))` for `m = dim S`.
pub fn pushforward_bound_check(s: &Region, f: &[Polynomial], a: &Polynomial, cfg: &QuadConfig) -> Result<BoundReport> {
    let n = s.n();
    if s.kind() != RegionKind::Real {
        return Err(Error::Precondition("bound check needs a real region".into()));
    }
    if f.len() != n {
        return Err(Error::Unsupported(format!(
            "{} map components on a {n}-dimensional region",
            f.len()
        )));
    }
    if f.iter().chain(std::iter::once(a)).any(|g| g.nvars() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: a.nvars(),
        });
    }
    let mut form = LogForm::function(a.clone(), s.p());
    for g in f {
        form = form.wedge(&LogForm::function(g.clone(), s.p()).exterior_d()?)?;
    }
    let integral = if form.is_zero() {
        None
    } else {
        Some(integrate_log_form(s, &form, cfg)?)
    };
    let (lhs, lhs_error) = integral.map_or((0.0, 0.0), |r| (r.value.abs(), r.error));
    let region = CompiledRegion::new(s)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let pts = sample_points(s, &region, BOUND_SAMPLES, &mut rng);
    let ca = a.compile();
    let max_abs = if a.is_constant() {
        rat_to_f64(&a.constant_term()).abs()
    } else {
        pts.iter().map(|x| ca.eval(x).abs()).fold(0.0, f64::max)
    } * MAX_SAFETY;
    let cf: Vec<_> = f.iter().map(|g| g.compile()).collect();
    let (delta, capped, image_volume) = if n == 1 {
        let (d, c) = fiber_count_1d(&f[0], &region, &pts)?;
        (d, c, image_length_1d(&f[0], &region)?)
    } else {
        let (d, c) = fiber_count_newton(&cf, s, &region, &pts, &mut rng);
        (d, c, image_volume_binned(&cf, &pts))
    };
    let rhs = delta as f64 * max_abs * image_volume;
    let verdict = if capped {
        BoundVerdict::Inconclusive
    } else if lhs <= rhs + lhs_error {
        BoundVerdict::Pass
    } else {
        BoundVerdict::Fail
    };
    Ok(BoundReport {
        lhs,
        lhs_error,
        delta,
        max_abs_coefficient: max_abs,
        image_volume,
        rhs,
        verdict,
    })
}

fn sample_points(s: &Region, region: &CompiledRegion, count: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let bbox = region.bbox();
    let mut out = Vec::with_capacity(count);
    for _ in 0..count * 50 {
        if out.len() == count {
            break;
        }
        let x: Vec<f64> = bbox.iter().map(|&(lo, hi)| lo + (hi - lo) * rng.gen::<f64>()).collect();
        if s.contains_f64(&x, 0.0) {
            out.push(x);
        }
    }
    out
}

/// Largest number of preimages of sampled values `f(x)`.
fn fiber_count_1d(f: &Polynomial, region: &CompiledRegion, pts: &[Vec<f64>]) -> Result<(usize, bool)> {
    let coeffs = f.compile().univariate(0, &[0.0]);
    let fiber = region.fiber_at(&[0.0], 0)?;
    let inside = |x: f64| fiber.intervals.iter().any(|&(u, v)| x >= u - 1e-12 && x <= v + 1e-12);
    let mut best = 0;
    for x in pts {
        let y = f.eval_f64(x)?;
        let mut shifted = coeffs.clone();
        shifted[0] -= y;
        let count = real_roots_f64(&shifted).into_iter().filter(|&r| inside(r)).count();
        best = best.max(count);
        if best > DELTA_CAP {
            return Ok((DELTA_CAP, true));
        }
    }
    Ok((best, false))
}

/// `f(S)` for `S` a union of intervals: images of each interval are spanned
/// by endpoint and critical values; the union length is exact.
fn image_length_1d(f: &Polynomial, region: &CompiledRegion) -> Result<f64> {
    let coeffs = f.compile().univariate(0, &[0.0]);
    let deriv: Vec<f64> = coeffs.iter().enumerate().skip(1).map(|(k, c)| k as f64 * c).collect();
    let crit = real_roots_f64(&deriv);
    let eval = |x: f64| coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c);
    let fiber = region.fiber_at(&[0.0], 0)?;
    let mut images: Vec<(f64, f64)> = fiber
        .intervals
        .iter()
        .map(|&(u, v)| {
            let vals = [u, v]
                .into_iter()
                .chain(crit.iter().copied().filter(|&c| c > u && c < v))
                .map(eval);
            vals.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), y| (lo.min(y), hi.max(y)))
        })
        .collect();
    images.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut total = 0.0;
    let mut cur: Option<(f64, f64)> = None;
    for (lo, hi) in images {
        cur = match cur {
            Some((a, b)) if lo <= b => Some((a, b.max(hi))),
            Some((a, b)) => {
                total += b - a;
                Some((lo, hi))
            }
            None => Some((lo, hi)),
        };
    }
    if let Some((a, b)) = cur {
        total += b - a;
    }
    Ok(total)
}

/// Distinct Newton solutions of `f(x) = f(x0)` from random starts.
fn fiber_count_newton(
    f: &[CompiledPoly],
    s: &Region,
    region: &CompiledRegion,
    pts: &[Vec<f64>],
    rng: &mut ChaCha8Rng,
) -> (usize, bool) {
    let n = f.len();
    let bbox = region.bbox();
    let scale = bbox.iter().map(|(lo, hi)| hi - lo).fold(0.0, f64::max).max(1.0);
    let mut best = 0;
    for x0 in pts.iter().take(64) {
        let target: Vec<f64> = f.iter().map(|g| g.eval(x0)).collect();
        let mut found: Vec<Vec<f64>> = Vec::new();
        for _ in 0..64 {
            let mut x: Vec<f64> = bbox.iter().map(|&(lo, hi)| lo + (hi - lo) * rng.gen::<f64>()).collect();
            let mut ok = false;
            for _ in 0..50 {
                let r: Vec<f64> = f.iter().zip(&target).map(|(g, t)| g.eval(&x) - t).collect();
                if r.iter().map(|v| v.abs()).fold(0.0, f64::max) < 1e-12 {
                    ok = true;
                    break;
                }
                let jac = nalgebra::DMatrix::from_fn(n, n, |i, j| f[i].gradient(&x)[j]);
                let Some(step) = jac.lu().solve(&nalgebra::DVector::from_vec(r)) else {
                    break;
                };
                for (xi, d) in x.iter_mut().zip(step.iter()) {
                    *xi -= d;
                }
            }
            if ok && s.contains_f64(&x, 1e-9) && !found.iter().any(|y| dist(y, &x) < 1e-6 * scale) {
                found.push(x);
            }
        }
        best = best.max(found.len());
        if best > DELTA_CAP {
            return (DELTA_CAP, true);
        }
    }
    (best, false)
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Image volume estimated by the fraction of occupied bins of the image's
/// bounding box.
fn image_volume_binned(f: &[CompiledPoly], pts: &[Vec<f64>]) -> f64 {
    if pts.is_empty() {
        return 0.0;
    }
    let m = f.len();
    let images: Vec<Vec<f64>> = pts.iter().map(|x| f.iter().map(|g| g.eval(x)).collect()).collect();
    let lo: Vec<f64> = (0..m)
        .map(|j| images.iter().map(|y| y[j]).fold(f64::INFINITY, f64::min))
        .collect();
    let hi: Vec<f64> = (0..m)
        .map(|j| images.iter().map(|y| y[j]).fold(f64::NEG_INFINITY, f64::max))
        .collect();
    let bins = ((IMAGE_BINS as f64).powf(1.0 / m as f64).round() as usize).max(2);
    let mut occupied = std::collections::HashSet::new();
    for y in &images {
        let key: Vec<usize> = (0..m)
            .map(|j| {
                let w = hi[j] - lo[j];
                if w == 0.0 {
                    0
                } else {
                    (((y[j] - lo[j]) / w * bins as f64) as usize).min(bins - 1)
                }
            })
            .collect();
        occupied.insert(key);
    }
    let box_vol: f64 = lo.iter().zip(&hi).map(|(a, b)| b - a).product();
    box_vol * occupied.len() as f64 / (bins as f64).powi(m as i32)
}

#[derive(Clone, Debug, PartialEq)]
pub struct DeformationReport {
    /// Rungs `(t, ∫_S h_t^*ψ)`.
    pub ladder: Ladder,
    pub at_zero: f64,
    pub pass: bool,
}

impl fmt::Display for DeformationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} value(t=0)={:.10}",
            if self.pass { "PASS" } else { "FAIL" },
            self.ladder.verdict,
            self.at_zero
        )
    }
}

/// Follow `∫_S h_t^*ψ` as `t → 0` and compare with the value at `t = 0`.
/// Each component of `h` is a polynomial in the coordinates of `S` followed
/// by `t`; `ψ` is a smooth top-degree form on the target.
pub fn deformation_limit_check(
    s: &Region,
    h: &[Polynomial],
    psi: &LogForm,
    ts: &[f64],
    cfg: &QuadConfig,
) -> Result<DeformationReport> {
    let n = s.n();
    if psi.p() != 0 {
        return Err(Error::Precondition("the pulled-back form must be smooth".into()));
    }
    if psi.n() != h.len() || psi.degree() != n {
        return Err(Error::FormMismatch(format!(
            "a {}-form on {} coordinates pulled back to a {n}-dimensional region",
            psi.degree(),
            psi.n()
        )));
    }
    if h.iter().any(|g| g.nvars() != n + 1) {
        return Err(Error::DimensionMismatch {
            expected: n + 1,
            got: h.first().map_or(0, |g| g.nvars()),
        });
    }
    let value_at = |t: f64| -> Result<(f64, f64)> {
        let tv = rat_from_f64(t);
        let images: Vec<Polynomial> = h.iter().map(|g| g.substitute_value(n, &tv).remove_var(n)).collect();
        let map = MonomialMap::from_polys(s.p(), 0, images)?;
        let pulled = psi.pullback(&map)?;
        if pulled.is_zero() {
            return Ok((0.0, 0.0));
        }
        let r = integrate_log_form(s, &pulled, cfg)?;
        Ok((r.value, r.error))
    };
    let mut entries = Vec::with_capacity(ts.len());
    for &t in ts {
        let (value, stderr) = value_at(t)?;
        entries.push(LadderEntry {
            param: t,
            value,
            stderr,
        });
    }
    let ladder = Ladder::new(entries, &cfg.ladder_rule());
    let (at_zero, zero_err) = value_at(0.0)?;
    let pass = match ladder.verdict {
        LadderVerdict::Converged { limit, error_bound } => {
            (limit - at_zero).abs() <= 3.0 * (error_bound + zero_err) + cfg.abs_tol + cfg.rel_tol * at_zero.abs()
        }
        _ => false,
    };
    Ok(DeformationReport { ladder, at_zero, pass })
}
