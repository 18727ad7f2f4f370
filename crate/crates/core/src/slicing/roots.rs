//! Real-root isolation for univariate polynomials with rational
//! coefficients (Descartes' rule of signs with bisection).

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::polyform::{rat_from_f64, rat_to_f64, Rational};

/// Dense univariate polynomial, coefficients from degree 0 upward, with no
/// trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnivariatePoly(Vec<Rational>);

impl UnivariatePoly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        UnivariatePoly(coeffs)
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Rational::from_integer(c.into())).collect())
    }

    /// Exact image of float coefficients.
    pub fn from_f64(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| rat_from_f64(c)).collect())
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Degree, `None` for zero.
    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.0.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, c| acc * x + rat_to_f64(c))
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * Rational::from_integer((k as i64).into()))
                .collect(),
        )
    }

    fn monic(&self) -> Self {
        match self.0.last() {
            Some(lc) => Self::new(self.0.iter().map(|c| c / lc).collect()),
            None => self.clone(),
        }
    }

    pub fn div_rem(&self, d: &UnivariatePoly) -> (UnivariatePoly, UnivariatePoly) {
        let dd = d.degree().expect("division by zero polynomial");
        let mut r = self.0.clone();
        if r.len() <= dd {
            return (Self::new(Vec::new()), self.clone());
        }
        let mut q = vec![Rational::zero(); r.len() - dd];
        let lc = d.0.last().expect("nonzero");
        for k in (0..q.len()).rev() {
            let f = &r[k + dd] / lc;
            if f.is_zero() {
                continue;
            }
            for (j, dc) in d.0.iter().enumerate() {
                r[k + j] = &r[k + j] - &(&f * dc);
            }
            q[k] = f;
        }
        r.truncate(dd);
        (Self::new(q), Self::new(r))
    }

    pub fn gcd(&self, other: &UnivariatePoly) -> UnivariatePoly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Yun's square-free decomposition: `f = c · Π a_i^i`, returned as
    /// `(i, a_i)` for nonconstant factors.
    pub fn squarefree_decomposition(&self) -> Vec<(usize, UnivariatePoly)> {
        let mut out = Vec::new();
        if self.degree().unwrap_or(0) == 0 {
            return out;
        }
        let f = self.monic();
        let df = f.derivative();
        let a0 = f.gcd(&df);
        let mut b = f.div_rem(&a0).0;
        let mut c = df.div_rem(&a0).0;
        let mut d = &c - &b.derivative();
        let mut i = 1;
        while b.degree().unwrap_or(0) > 0 {
            let a = b.gcd(&d);
            b = b.div_rem(&a).0;
            c = d.div_rem(&a).0;
            if a.degree().unwrap_or(0) > 0 {
                out.push((i, a));
            }
            d = &c - &b.derivative();
            i += 1;
        }
        out
    }

    /// `p(a + s·x)`.
    fn affine_compose(&self, a: &Rational, s: &Rational) -> UnivariatePoly {
        // Taylor shift by `a`, then scale.
        let mut c = self.0.clone();
        let n = c.len();
        for i in 0..n {
            for j in (i..n.saturating_sub(1)).rev() {
                let t = &c[j + 1] * a;
                c[j] = &c[j] + &t;
            }
        }
        let mut pow = Rational::one();
        for v in c.iter_mut() {
            *v = &*v * &pow;
            pow = &pow * s;
        }
        Self::new(c)
    }

    /// Upper bound on the number of roots in the open interval `(a, b)`.
    fn descartes_bound(&self, a: &Rational, b: &Rational) -> usize {
        let q = self.affine_compose(a, &(b - a));
        let mut rev: Vec<Rational> = q.0.clone();
        rev.reverse();
        let shifted = UnivariatePoly(rev).affine_compose(&Rational::one(), &Rational::one());
        let mut count = 0;
        let mut last = 0i8;
        for c in &shifted.0 {
            let s = if c.is_positive() {
                1
            } else if c.is_negative() {
                -1
            } else {
                0
            };
            if s != 0 {
                if last != 0 && s != last {
                    count += 1;
                }
                last = s;
            }
        }
        count
    }

    /// Cauchy bound: every real root lies in `(-B, B)`.
    fn cauchy_bound(&self) -> Rational {
        let lc = self.0.last().expect("nonzero").abs();
        let m = self.0[..self.0.len() - 1]
            .iter()
            .map(|c| c.abs() / &lc)
            .fold(Rational::zero(), |a, b| if b > a { b } else { a });
        m + Rational::one()
    }
}

impl std::ops::Sub for &UnivariatePoly {
    type Output = UnivariatePoly;
    fn sub(self, rhs: &UnivariatePoly) -> UnivariatePoly {
        let n = self.0.len().max(rhs.0.len());
        UnivariatePoly::new(
            (0..n)
                .map(|k| {
                    let a = self.0.get(k).cloned().unwrap_or_else(Rational::zero);
                    let b = rhs.0.get(k).cloned().unwrap_or_else(Rational::zero);
                    a - b
                })
                .collect(),
        )
    }
}

/// An interval `[lo, hi]` holding exactly one real root; `lo == hi` for an
/// exactly located root.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootInterval {
    pub lo: Rational,
    pub hi: Rational,
    pub multiplicity: usize,
}

impl RootInterval {
    pub fn midpoint(&self) -> Rational {
        (&self.lo + &self.hi) / Rational::from_integer(2.into())
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }
}

/// Sorted, pairwise disjoint isolating intervals.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RootIntervals {
    pub roots: Vec<RootInterval>,
}

impl RootIntervals {
    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    pub fn midpoints_f64(&self) -> Vec<f64> {
        self.roots.iter().map(|r| rat_to_f64(&r.midpoint())).collect()
    }
}

fn sign(p: &UnivariatePoly, x: &Rational) -> i8 {
    let v = p.eval(x);
    if v.is_positive() {
        1
    } else if v.is_negative() {
        -1
    } else {
        0
    }
}

fn isolate_squarefree(p: &UnivariatePoly, a: Rational, b: Rational, out: &mut Vec<(Rational, Rational)>) {
    let two = Rational::from_integer(2.into());
    let mut stack = vec![(a, b)];
    while let Some((a, b)) = stack.pop() {
        match p.descartes_bound(&a, &b) {
            0 => {}
            1 => out.push((a, b)),
            _ => {
                let m = (&a + &b) / &two;
                if sign(p, &m) == 0 {
                    out.push((m.clone(), m.clone()));
                }
                stack.push((m.clone(), b));
                stack.push((a, m));
            }
        }
    }
}

/// Sign of a square-free `p` just to the right of `x`.
fn sign_right_of(p: &UnivariatePoly, x: &Rational) -> i8 {
    match sign(p, x) {
        0 => sign(&p.derivative(), x),
        s => s,
    }
}

/// Shrink an isolating interval (open, or a single point) of a
/// square-free `p` by one bisection step.
fn bisect_once(p: &UnivariatePoly, iv: &mut RootInterval) {
    if iv.lo == iv.hi {
        return;
    }
    let m = iv.midpoint();
    let sm = sign(p, &m);
    if sm == 0 {
        iv.lo = m.clone();
        iv.hi = m;
    } else if sm == sign_right_of(p, &iv.lo) {
        iv.lo = m;
    } else {
        iv.hi = m;
    }
}

/// Isolate all real roots of `f` in intervals of width at most `tol`.
pub fn isolate_real_roots(f: &UnivariatePoly, tol: &Rational) -> Result<RootIntervals> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if !tol.is_positive() {
        return Err(Error::Domain("tolerance must be positive".into()));
    }
    let mut all: Vec<(RootInterval, UnivariatePoly)> = Vec::new();
    for (mult, factor) in f.squarefree_decomposition() {
        let b = factor.cauchy_bound();
        let mut raw = Vec::new();
        isolate_squarefree(&factor, -b.clone(), b, &mut raw);
        for (lo, hi) in raw {
            let mut iv = RootInterval {
                lo,
                hi,
                multiplicity: mult,
            };
            while iv.width() > *tol {
                bisect_once(&factor, &mut iv);
            }
            all.push((iv, factor.clone()));
        }
    }
    // Separate intervals of different factors that still overlap.
    loop {
        all.sort_by(|a, b| a.0.lo.cmp(&b.0.lo).then_with(|| a.0.hi.cmp(&b.0.hi)));
        let clash = all.windows(2).position(|w| w[0].0.hi > w[1].0.lo);
        match clash {
            None => break,
            Some(k) => {
                let (f0, f1) = (all[k].1.clone(), all[k + 1].1.clone());
                bisect_once(&f0, &mut all[k].0);
                bisect_once(&f1, &mut all[k + 1].0);
            }
        }
    }
    Ok(RootIntervals {
        roots: all.into_iter().map(|(iv, _)| iv).collect(),
    })
}

/// Real roots of a float polynomial (coefficients from degree 0), sorted.
/// Degree ≤ 2 uses closed forms; higher degrees go through exact isolation
/// of the dyadic coefficients.
pub fn real_roots_f64(coeffs: &[f64]) -> Vec<f64> {
    let mut c = coeffs.to_vec();
    let scale = c.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        return Vec::new();
    }
    while c.last().is_some_and(|v| v.abs() <= 1e-14 * scale) {
        c.pop();
    }
    match c.len() {
        0 | 1 => Vec::new(),
        2 => vec![-c[0] / c[1]],
        3 => {
            let (a, b, cc) = (c[2], c[1], c[0]);
            let disc = b * b - 4.0 * a * cc;
            if disc < -1e-14 * (b * b).max((4.0 * a * cc).abs()) {
                return Vec::new();
            }
            let sq = disc.max(0.0).sqrt();
            // Numerically stable pair.
            let q = -0.5 * (b + b.signum() * sq);
            let mut roots = if q == 0.0 { vec![0.0, 0.0] } else { vec![q / a, cc / q] };
            roots.sort_by(|x, y| x.partial_cmp(y).expect("finite"));
            if sq == 0.0 {
                roots.truncate(1);
            }
            roots
        }
        _ => {
            let p = UnivariatePoly::from_f64(&c);
            let b = rat_to_f64(&p.cauchy_bound());
            let tol = rat_from_f64((b * 1e-15).max(1e-300));
            match isolate_real_roots(&p, &tol) {
                Ok(r) => r.midpoints_f64(),
                Err(_) => Vec::new(),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyform::{rat, rat_int};

    #[test]
    fn dyadic_root_on_an_endpoint() {
        // 2x³ + 6x² + 5x + 1 = (x + 1)(2x² + 4x + 1)
        let r = real_roots_f64(&[2.0, 10.0, 12.0, 4.0]);
        let want = [-1.0 - 0.5f64.sqrt(), -1.0, -1.0 + 0.5f64.sqrt()];
        assert_eq!(r.len(), 3, "{r:?}");
        for (a, b) in r.iter().zip(want) {
            assert!((a - b).abs() < 1e-12, "{r:?}");
        }
        let r = real_roots_f64(&[0.0, -1.0, 0.0, 4.0]);
        assert_eq!(r.len(), 3);
        for (a, b) in r.iter().zip([-0.5, 0.0, 0.5]) {
            assert!((a - b).abs() < 1e-14, "{r:?}");
        }
    }

    #[test]
    fn sqrt_two() {
        let p = UnivariatePoly::from_i64(&[-2, 0, 1]);
        let tol = rat(1, 1_000_000_000_000);
        let r = isolate_real_roots(&p, &tol).unwrap();
        assert_eq!(r.len(), 2);
        let m = r.midpoints_f64();
        assert!((m[0] + std::f64::consts::SQRT_2).abs() < 1e-11);
        assert!((m[1] - std::f64::consts::SQRT_2).abs() < 1e-11);
        for iv in &r.roots {
            assert!(iv.width() <= tol);
        }
    }

    #[test]
    fn no_real_roots() {
        let p = UnivariatePoly::from_i64(&[1, 0, 1]);
        assert!(isolate_real_roots(&p, &rat(1, 1000)).unwrap().is_empty());
    }

    #[test]
    fn multiplicities() {
        // (y - 1)^2 (y + 2) = y^3 - 3y + 2
        let p = UnivariatePoly::from_i64(&[2, -3, 0, 1]);
        let r = isolate_real_roots(&p, &rat(1, 1_000_000)).unwrap();
        assert_eq!(r.len(), 2);
        assert_eq!(r.roots[0].multiplicity, 1);
        assert_eq!(r.roots[1].multiplicity, 2);
        assert!(r.roots[0].lo <= rat_int(-2) && rat_int(-2) <= r.roots[0].hi);
        assert!(r.roots[1].lo <= rat_int(1) && rat_int(1) <= r.roots[1].hi);
    }

    #[test]
    fn zero_polynomial_rejected() {
        assert_eq!(
            isolate_real_roots(&UnivariatePoly::new(vec![]), &rat(1, 10)),
            Err(Error::ZeroPolynomial)
        );
    }

    #[test]
    fn float_roots() {
        assert_eq!(real_roots_f64(&[-1.0, 0.0, 1.0]), vec![-1.0, 1.0]);
        let r = real_roots_f64(&[-6.0, 11.0, -6.0, 1.0]);
        assert_eq!(r.len(), 3);
        for (a, b) in r.iter().zip([1.0, 2.0, 3.0]) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(real_roots_f64(&[1.0, 0.0, 1.0]).is_empty());
    }
}
