//! Iterated quadrature of top-degree forms with ε-excision.

use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::config::QuadConfig;
use super::ladder::{Ladder, LadderEntry, LadderVerdict};
use super::quad::{adaptive, Pair};
use crate::error::{Error, Result};
use crate::polyform::{CompiledPoly, LogForm, Polynomial};
use crate::region::Region;
use crate::slicing::{real_roots_f64, CompiledRegion};

/// A top-degree form as the density `a(x) / Π_{i ∈ poles} x_i` against
/// `dx_1 ∧ … ∧ dx_n` (standard orientation). The coefficient may also use
/// derived variables `(1 + x_j²)^{-1/2}` placed after the `n` coordinates.
#[derive(Clone, Debug)]
pub struct Density {
    n: usize,
    coeff: CompiledPoly,
    /// Source coordinate of each derived variable.
    extras: Vec<usize>,
    poles: Vec<bool>,
    /// Innermost coordinate; integrated in closed form unless it feeds a
    /// derived variable.
    axis: usize,
    exact_axis: bool,
}

impl Density {
    /// Coordinates whose `dr/r` factor is cancelled by the coefficient are
    /// divided out exactly and carry no pole.
    pub fn from_form(w: &LogForm) -> Result<Density> {
        let n = w.n();
        if w.degree() != n {
            return Err(Error::FormMismatch(format!(
                "integrand of degree {} on a {n}-dimensional space",
                w.degree()
            )));
        }
        let key: Vec<usize> = (0..n).collect();
        let mut poles = vec![false; n];
        poles[..w.p()].fill(true);
        Density::weighted(n, w.coefficient(&key), Vec::new(), poles)
    }

    /// `coeff` has `n + extras.len()` variables; `poles[i]` requests a
    /// `1/x_i` factor. The innermost axis is the last coordinate not feeding
    /// a derived variable, or the last coordinate when all of them do.
    pub fn weighted(n: usize, coeff: Polynomial, extras: Vec<usize>, poles: Vec<bool>) -> Result<Density> {
        if coeff.nvars() != n + extras.len() || poles.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n + extras.len(),
                got: coeff.nvars(),
            });
        }
        if extras.iter().any(|&j| j >= n) {
            return Err(Error::IndexOutOfRange("derived variable source".into()));
        }
        if n == 0 {
            return Err(Error::Unsupported("zero-dimensional integrand".into()));
        }
        let free = (0..n).rev().find(|i| !extras.contains(i));
        let axis = free.unwrap_or(n - 1);
        let mut a = coeff;
        let mut poles = poles;
        for (i, pole) in poles.iter_mut().enumerate() {
            if *pole {
                if let Some(q) = a.div_var(i) {
                    a = q;
                    *pole = false;
                }
            }
        }
        if a.is_zero() {
            poles = vec![false; n];
        }
        Ok(Density {
            n,
            coeff: a.compile(),
            extras,
            poles,
            axis,
            exact_axis: free.is_some(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn has_poles(&self) -> bool {
        self.poles.iter().any(|&b| b)
    }

    pub fn poles(&self) -> &[bool] {
        &self.poles
    }

    fn set(&self, point: &mut [f64], var: usize, x: f64) {
        point[var] = x;
        for (j, &src) in self.extras.iter().enumerate() {
            if src == var {
                point[self.n + j] = 1.0 / (1.0 + x * x).sqrt();
            }
        }
    }

    fn buffer(&self) -> Vec<f64> {
        vec![0.0; self.n + self.extras.len()]
    }
}

#[derive(Clone, Copy, Debug)]
enum Segment {
    Plain(f64, f64),
    /// `x = sign·e^s` for `s ∈ [s0, s1]`.
    Log {
        s0: f64,
        s1: f64,
        sign: f64,
    },
}

impl Segment {
    fn bounds(&self) -> (f64, f64) {
        match *self {
            Segment::Plain(a, b) => (a, b),
            Segment::Log { s0, s1, .. } => (s0, s1),
        }
    }

    /// Parameter of the coordinate value `x`, if the segment reaches it.
    fn param(&self, x: f64) -> Option<f64> {
        match *self {
            Segment::Plain(_, _) => Some(x),
            Segment::Log { sign, .. } => (sign * x > 0.0).then(|| (sign * x).ln()),
        }
    }

    /// Coordinate value and quadrature weight (Jacobian times pole factor).
    fn map(&self, s: f64) -> (f64, f64) {
        match *self {
            Segment::Plain(_, _) => (s, 1.0),
            Segment::Log { sign, .. } => (sign * s.exp(), sign),
        }
    }
}

/// Integration problem: a compiled region and a density.
pub struct Problem<'a> {
    region: &'a CompiledRegion,
    density: &'a Density,
    cfg: &'a QuadConfig,
    /// Outer coordinates, outermost first.
    order: Vec<usize>,
    /// Per depth, polynomials whose roots split the outer integrals.
    breaks: Vec<Vec<CompiledPoly>>,
}

impl<'a> Problem<'a> {
    pub fn new(region: &'a CompiledRegion, density: &'a Density, cfg: &'a QuadConfig) -> Result<Self> {
        if region.n() != density.n {
            return Err(Error::DimensionMismatch {
                expected: region.n(),
                got: density.n,
            });
        }
        let order: Vec<usize> = (0..density.n).filter(|&i| i != density.axis).collect();
        let breaks = region.support_breaks(&order, density.axis);
        Ok(Problem {
            region,
            density,
            cfg,
            order,
            breaks,
        })
    }

    fn segments(&self, var: usize, eps: f64) -> Vec<Segment> {
        let (lo, hi) = self.region.bbox()[var];
        if !self.density.poles[var] {
            return vec![Segment::Plain(lo, hi)];
        }
        let mut out = Vec::new();
        if lo < -eps {
            let near = (-hi).max(eps);
            out.push(Segment::Log {
                s0: near.ln(),
                s1: (-lo).ln(),
                sign: -1.0,
            });
        }
        if hi > eps {
            out.push(Segment::Log {
                s0: lo.max(eps).ln(),
                s1: hi.ln(),
                sign: 1.0,
            });
        }
        out
    }

    /// Exact integral along the last coordinate at `point`.
    fn innermost(&self, point: &[f64], eps: f64) -> Pair {
        let axis = self.density.axis;
        let fiber = match self.region.fiber_at(&point[..self.density.n], axis) {
            Ok(f) => f,
            Err(_) => return Pair::default(),
        };
        if fiber.intervals.is_empty() {
            return Pair::default();
        }
        let pole = self.density.poles[axis];
        if !self.density.exact_axis {
            return self.innermost_numeric(point, &fiber.intervals, eps);
        }
        let c = self.density.coeff.univariate(axis, point);
        let mut pieces = Vec::new();
        for &(u, v) in &fiber.intervals {
            if !pole {
                pieces.push((u, v));
                continue;
            }
            if u < -eps {
                pieces.push((u, v.min(-eps)));
            }
            if v > eps {
                pieces.push((u.max(eps), v));
            }
        }
        let mut roots: Option<Vec<f64>> = None;
        let mut out = Pair::default();
        for (u, v) in pieces {
            if v <= u {
                continue;
            }
            out.value += antiderivative_diff(&c, pole, u, v);
            let roots = roots.get_or_insert_with(|| real_roots_f64(&c));
            let mut last = u;
            for &r in roots.iter().filter(|&&r| r > u && r < v) {
                out.abs += antiderivative_diff(&c, pole, last, r).abs();
                last = r;
            }
            out.abs += antiderivative_diff(&c, pole, last, v).abs();
        }
        out
    }

    /// Adaptive quadrature along an axis that feeds a derived variable.
    fn innermost_numeric(&self, point: &[f64], intervals: &[(f64, f64)], eps: f64) -> Pair {
        let axis = self.density.axis;
        let pole = self.density.poles[axis];
        let mut buf = point.to_vec();
        let mut out = Pair::default();
        for &(u, v) in intervals {
            let pieces = if pole {
                vec![(u, v.min(-eps)), (u.max(eps), v)]
            } else {
                vec![(u, v)]
            };
            for (a, b) in pieces {
                if b <= a {
                    continue;
                }
                out = out
                    + adaptive(
                        |y| {
                            self.density.set(&mut buf, axis, y);
                            let mut f = self.density.coeff.eval(&buf);
                            if pole {
                                f /= y;
                            }
                            Pair {
                                value: f,
                                abs: f.abs(),
                                err: 0.0,
                                abs_err: 0.0,
                            }
                        },
                        a,
                        b,
                        self.cfg.abs_tol,
                        self.cfg.rel_tol,
                        self.cfg.inner_intervals,
                    );
            }
        }
        out
    }

    fn level(&self, depth: usize, point: &mut [f64], eps: f64) -> Pair {
        if depth == self.order.len() {
            return self.innermost(point, eps);
        }
        let var = self.order[depth];
        let budget = if depth == 0 {
            self.cfg.outer_intervals
        } else {
            self.cfg.inner_intervals
        };
        let cuts = self.cuts(depth, point);
        let mut total = Pair::default();
        for seg in self.segments(var, eps) {
            let (a, b) = seg.bounds();
            let mut knots = vec![a];
            knots.extend(cuts.iter().filter_map(|&x| seg.param(x)).filter(|&s| s > a && s < b));
            knots.push(b);
            knots.sort_by(f64::total_cmp);
            for w in knots.windows(2) {
                if w[1] <= w[0] {
                    continue;
                }
                let part = adaptive(
                    |s| {
                        let (x, wt) = seg.map(s);
                        self.density.set(point, var, x);
                        self.level(depth + 1, point, eps) * wt
                    },
                    w[0],
                    w[1],
                    self.cfg.abs_tol,
                    self.cfg.rel_tol,
                    budget,
                );
                total = total + part;
            }
        }
        total
    }

    /// Roots of the breakpoint polynomials at `depth` given the outer values.
    fn cuts(&self, depth: usize, point: &[f64]) -> Vec<f64> {
        let var = self.order[depth];
        let mut out = Vec::new();
        for p in &self.breaks[depth] {
            let c = p.univariate(var, point);
            match c.len() {
                0 | 1 => {}
                2 => {
                    if c[1] != 0.0 {
                        out.push(-c[0] / c[1]);
                    }
                }
                _ => out.extend(real_roots_f64(&c)),
            }
        }
        out
    }

    /// Integral over the region with `|x_i| ≥ eps` for every pole.
    pub fn rung(&self, eps: f64, rung_index: u64) -> Pair {
        if self.density.n > self.cfg.mc_threshold {
            return self.rung_mc(eps, rung_index);
        }
        let mut point = self.density.buffer();
        self.level(0, &mut point, eps)
    }

    /// Latin-hypercube sampling of the outer variables, exact innermost.
    fn rung_mc(&self, eps: f64, rung_index: u64) -> Pair {
        let samples = self.cfg.mc_samples;
        let outer = self.order.len();
        let mut rng = ChaCha8Rng::seed_from_u64(self.cfg.seed);
        rng.set_stream(rung_index + 1);
        let segs: Vec<Vec<Segment>> = self.order.iter().map(|&v| self.segments(v, eps)).collect();
        let lens: Vec<Vec<f64>> = segs
            .iter()
            .map(|ss| {
                ss.iter()
                    .map(|s| {
                        let (a, b) = s.bounds();
                        b - a
                    })
                    .collect()
            })
            .collect();
        let measure: f64 = lens.iter().map(|l| l.iter().sum::<f64>()).product();
        if measure == 0.0 {
            return Pair::default();
        }
        let perms: Vec<Vec<usize>> = (0..outer)
            .map(|_| {
                let mut p: Vec<usize> = (0..samples).collect();
                p.shuffle(&mut rng);
                p
            })
            .collect();
        let mut point = self.density.buffer();
        let (mut s1, mut s2, mut a1, mut a2) = (0.0, 0.0, 0.0, 0.0);
        for j in 0..samples {
            let mut weight = measure;
            for v in 0..outer {
                let total: f64 = lens[v].iter().sum();
                let mut t = (perms[v][j] as f64 + rng.gen::<f64>()) / samples as f64 * total;
                let mut k = 0;
                while k + 1 < segs[v].len() && t > lens[v][k] {
                    t -= lens[v][k];
                    k += 1;
                }
                let (a, _) = segs[v][k].bounds();
                let (x, w) = segs[v][k].map(a + t);
                self.density.set(&mut point, self.order[v], x);
                weight *= w;
            }
            let inner = self.innermost(&point, eps) * weight;
            s1 += inner.value;
            s2 += inner.value * inner.value;
            a1 += inner.abs;
            a2 += inner.abs * inner.abs;
        }
        let m = samples as f64;
        let se = |s1: f64, s2: f64| ((s2 / m - (s1 / m).powi(2)).max(0.0) / (m - 1.0).max(1.0)).sqrt();
        Pair {
            value: s1 / m,
            abs: a1 / m,
            err: se(s1, s2),
            abs_err: se(a1, a2),
        }
    }
}

/// `∫_u^v c(y)·y^{-pole} dy` in closed form.
fn antiderivative_diff(c: &[f64], pole: bool, u: f64, v: f64) -> f64 {
    let mut total = 0.0;
    for (k, &ck) in c.iter().enumerate() {
        if ck == 0.0 {
            continue;
        }
        let e = if pole { k as i32 } else { k as i32 + 1 };
        total += if e == 0 {
            ck * (v / u).ln()
        } else {
            ck * (v.powi(e) - u.powi(e)) / e as f64
        };
    }
    total
}

/// Outcome of integrating a top-degree form.
#[derive(Clone, Debug, PartialEq)]
pub struct IntegralResult {
    pub value: f64,
    pub error: f64,
    /// `∫|ω|`.
    pub abs_value: f64,
    pub abs_error: f64,
    /// Signed rung values.
    pub ladder: Ladder,
    /// Rung values of `∫|ω|`; their verdict decides absolute convergence.
    pub abs_ladder: Ladder,
    pub verdict: LadderVerdict,
    pub monte_carlo: bool,
    /// Set by callers whose inputs rest on sampled dimension estimates.
    pub heuristic: bool,
}

pub const ORIENTATION_NOTE: &str = "standard orientation of R^n";

impl IntegralResult {
    pub fn converged(&self) -> bool {
        self.verdict.is_converged()
    }

    /// `|∫ω| ≤ ∫|ω|` up to the error estimates.
    pub fn triangle_ok(&self) -> bool {
        self.value.abs() <= self.abs_value + self.error + self.abs_error + 1e-12
    }
}

impl fmt::Display for IntegralResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.verdict {
            LadderVerdict::Converged { .. } => write!(
                f,
                "CONVERGED value={:.10} error={:.3e} abs={:.10} ({ORIENTATION_NOTE})",
                self.value, self.error, self.abs_value
            )?,
            LadderVerdict::Diverging => write!(f, "DIVERGING last={:.10}", self.abs_value)?,
            LadderVerdict::Inconclusive => write!(
                f,
                "INCONCLUSIVE value={:.10} error={:.3e} abs={:.10}",
                self.value, self.error, self.abs_value
            )?,
        }
        if self.monte_carlo {
            f.write_str(" [monte-carlo]")?;
        }
        if self.heuristic {
            f.write_str(" [heuristic]")?;
        }
        Ok(())
    }
}

/// Run the excision ladder for a compiled problem.
pub fn integrate_density(region: &CompiledRegion, density: &Density, cfg: &QuadConfig) -> Result<IntegralResult> {
    cfg.validate()?;
    let problem = Problem::new(region, density, cfg)?;
    let rungs: Vec<f64> = if density.has_poles() { cfg.rungs() } else { vec![0.0] };
    let values: Vec<Pair> = rungs
        .par_iter()
        .enumerate()
        .map(|(k, &eps)| problem.rung(eps, k as u64))
        .collect();
    let rule = cfg.ladder_rule();
    let ladder = Ladder::new(
        rungs
            .iter()
            .zip(&values)
            .map(|(&param, v)| LadderEntry {
                param,
                value: v.value,
                stderr: v.err,
            })
            .collect(),
        &rule,
    );
    let abs_ladder = Ladder::new(
        rungs
            .iter()
            .zip(&values)
            .map(|(&param, v)| LadderEntry {
                param,
                value: v.abs,
                stderr: v.abs_err,
            })
            .collect(),
        &rule,
    );
    let last = *values.last().expect("at least one rung");
    let verdict = abs_ladder.verdict;
    let (abs_value, abs_error) = match verdict {
        LadderVerdict::Converged { limit, error_bound } => (limit, error_bound),
        _ => (last.abs, last.abs_err),
    };
    let (value, error) = match (ladder.verdict, verdict) {
        (LadderVerdict::Converged { limit, error_bound }, _) => (limit, error_bound),
        // The excised part is bounded by the tail of the absolute ladder.
        (_, LadderVerdict::Converged { .. }) => (last.value, last.err + (abs_value - last.abs).abs() + abs_error),
        _ => (last.value, last.err),
    };
    Ok(IntegralResult {
        value,
        error,
        abs_value,
        abs_error,
        ladder,
        abs_ladder,
        verdict,
        monte_carlo: density.n() > cfg.mc_threshold,
        heuristic: false,
    })
}

fn check_form(a: &Region, w: &LogForm) -> Result<()> {
    if w.n() != a.n() || w.degree() != a.n() {
        return Err(Error::FormMismatch(format!(
            "a {}-form on {} coordinates over a {}-dimensional region",
            w.degree(),
            w.n(),
            a.n()
        )));
    }
    Ok(())
}

/// `∫_A ω` and `∫_A |ω|` for a top-degree logarithmic form, with the
/// ε-excision ladder deciding convergence.
pub fn integrate_log_form(a: &Region, w: &LogForm, cfg: &QuadConfig) -> Result<IntegralResult> {
    check_form(a, w)?;
    let region = CompiledRegion::new(a)?;
    integrate_density(&region, &Density::from_form(w)?, cfg)
}

/// `∫_A |ω|` (limit of the absolute ladder, or its last rung).
pub fn integrate_abs(a: &Region, w: &LogForm, cfg: &QuadConfig) -> Result<f64> {
    Ok(integrate_log_form(a, w, cfg)?.abs_value)
}

/// Signed rung values `∫_{A, |r_i| ≥ ε_k} ω` with their verdict.
pub fn excision_ladder(a: &Region, w: &LogForm, cfg: &QuadConfig) -> Result<Ladder> {
    Ok(integrate_log_form(a, w, cfg)?.ladder)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyform::{parse_log_form, rat, rat_int};
    use crate::region::BoundingBox;

    fn li2_half() -> f64 {
        (1..=60).map(|k| 0.5f64.powi(k) / (k * k) as f64).sum()
    }

    #[test]
    fn log_identity() {
        let a = Region::from_strings(1, 1, &[&[]], Some(BoundingBox(vec![(rat(1, 2), rat_int(1))]))).unwrap();
        let w = parse_log_form("dr1/r1", 1, 1).unwrap();
        let r = integrate_log_form(&a, &w, &QuadConfig::default()).unwrap();
        assert!(r.converged());
        assert!((r.value - 2f64.ln()).abs() < 1e-9, "{r}");
        let r = integrate_log_form(&a, &w.neg(), &QuadConfig::default()).unwrap();
        assert!((r.abs_value - 2f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn symmetric_cancellation() {
        let a = Region::from_strings(1, 1, &[&["r1 <= -1/2", "r1 >= -1"], &["r1 >= 1/2", "r1 <= 1"]], None).unwrap();
        let w = parse_log_form("dr1/r1", 1, 1).unwrap();
        let r = integrate_log_form(&a, &w, &QuadConfig::default()).unwrap();
        assert!(r.value.abs() < 1e-9);
        assert!((r.abs_value - 2.0 * 2f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn dilogarithm() {
        let a = Region::from_strings(
            2,
            2,
            &[&["0 <= r1", "r1 <= 1", "0 <= r2", "r2 <= 1/2", "r1 + r2 >= 1"]],
            None,
        )
        .unwrap();
        let w = parse_log_form("dr1/r1 ^ dr2/r2", 2, 2).unwrap();
        let r = integrate_log_form(&a, &w, &QuadConfig::default()).unwrap();
        assert!(r.converged(), "{r}");
        assert!((r.value - li2_half()).abs() < 1e-4, "{r}");
        assert!(r.triangle_ok());
    }

    #[test]
    fn product_and_box() {
        let cfg = QuadConfig::default();
        let w = parse_log_form("dr1/r1 ^ dr2/r2", 2, 2).unwrap();
        let sq = Region::from_strings(2, 2, &[&["1 <= r1", "r1 <= 2", "1 <= r2", "r2 <= 2"]], None).unwrap();
        let r = integrate_log_form(&sq, &w, &cfg).unwrap();
        assert!((r.value - 2f64.ln().powi(2)).abs() < 1e-8);
        let unit = Region::from_strings(2, 2, &[&["0 <= r1", "r1 <= 1", "0 <= r2", "r2 <= 1"]], None).unwrap();
        let r = integrate_log_form(&unit, &w, &cfg).unwrap();
        assert_eq!(r.verdict, LadderVerdict::Diverging);
        for (k, e) in r.ladder.entries.iter().enumerate() {
            let want = e.param.ln().powi(2);
            assert!((e.value - want).abs() <= 1e-6 * want, "rung {k}");
        }
    }

    #[test]
    fn smooth_form_single_rung() {
        let tri = Region::from_strings(2, 0, &[&["x1 >= 0", "x2 >= 0", "x1 + x2 <= 1"]], None).unwrap();
        let w = parse_log_form("x1 * dx1 ^ dx2", 2, 0).unwrap();
        let r = integrate_log_form(&tri, &w, &QuadConfig::default()).unwrap();
        assert_eq!(r.ladder.entries.len(), 1);
        assert!((r.value - 1.0 / 6.0).abs() < 1e-12);
        assert!(matches!(
            integrate_log_form(&tri, &parse_log_form("dx1", 2, 0).unwrap(), &QuadConfig::default()),
            Err(Error::FormMismatch(_))
        ));
    }

    #[test]
    fn monte_carlo_path() {
        let cfg = QuadConfig {
            mc_threshold: 1,
            mc_samples: 4000,
            ..QuadConfig::default()
        };
        let sq = Region::from_strings(2, 2, &[&["1 <= r1", "r1 <= 2", "1 <= r2", "r2 <= 2"]], None).unwrap();
        let w = parse_log_form("dr1/r1 ^ dr2/r2", 2, 2).unwrap();
        let r = integrate_log_form(&sq, &w, &cfg).unwrap();
        assert!(r.monte_carlo);
        assert!((r.value - 2f64.ln().powi(2)).abs() < 1e-3, "{r}");
    }
}
