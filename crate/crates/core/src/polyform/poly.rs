//! Sparse multivariate polynomials with exact rational coefficients.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Build a rational from a numerator/denominator pair.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn rat_int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

/// Exact conversion of a finite `f64` into a dyadic rational.
pub fn rat_from_f64(v: f64) -> Rational {
    Rational::from_float(v).unwrap_or_else(Rational::zero)
}

pub fn rat_to_f64(v: &Rational) -> f64 {
    v.to_f64().unwrap_or_else(|| {
        // Huge numerators/denominators: scale through the bit lengths.
        let n = v.numer().to_f64().unwrap_or(f64::INFINITY);
        let d = v.denom().to_f64().unwrap_or(f64::INFINITY);
        n / d
    })
}

/// Exponent vector, one entry per ambient variable.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exponents: Vec<u32>) -> Self {
        Monomial(exponents)
    }

    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn var(nvars: usize, idx: usize) -> Self {
        let mut e = vec![0; nvars];
        e[idx] = 1;
        Monomial(e)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// `other / self`, assuming `self` divides `other`.
    pub fn quotient_of(&self, other: &Monomial) -> Monomial {
        Monomial(other.0.iter().zip(&self.0).map(|(a, b)| a - b).collect())
    }

    /// Componentwise minimum.
    pub fn gcd(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| *a.min(b)).collect())
    }

    pub fn eval_f64(&self, point: &[f64]) -> f64 {
        self.0
            .iter()
            .zip(point)
            .filter(|(e, _)| **e > 0)
            .map(|(&e, &x)| x.powi(e as i32))
            .product()
    }
}

/// Sparse polynomial `Σ c_m x^m` over a fixed number of variables.
///
/// Zero coefficients are never stored, so structural equality is
/// polynomial equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Polynomial {
    nvars: usize,
    terms: BTreeMap<Monomial, Rational>,
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Polynomial {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(Rational::one(), nvars)
    }

    pub fn constant(c: Rational, nvars: usize) -> Self {
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(Monomial::one(nvars), c);
        }
        p
    }

    pub fn var(idx: usize, nvars: usize) -> Self {
        assert!(idx < nvars, "variable index {idx} out of range for {nvars} variables");
        let mut p = Self::zero(nvars);
        p.terms.insert(Monomial::var(nvars, idx), Rational::one());
        p
    }

    pub fn monomial(coeff: Rational, mono: Monomial) -> Self {
        let nvars = mono.len();
        let mut p = Self::zero(nvars);
        if !coeff.is_zero() {
            p.terms.insert(mono, coeff);
        }
        p
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, Rational)>>(nvars: usize, terms: I) -> Self {
        let mut p = Self::zero(nvars);
        for (m, c) in terms {
            assert_eq!(m.len(), nvars, "monomial length must equal nvars");
            p.add_term(m, c);
        }
        p
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(existing) => {
                *existing += c;
                if existing.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    pub fn constant_term(&self) -> Rational {
        self.terms
            .get(&Monomial::one(self.nvars))
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    /// Total degree, `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::total_degree).max()
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|m| m.0[var]).max().unwrap_or(0)
    }

    pub fn is_linear(&self) -> bool {
        self.total_degree().unwrap_or(0) <= 1
    }

    pub fn involves(&self, var: usize) -> bool {
        self.terms.keys().any(|m| m.0[var] > 0)
    }

    /// Variables with a positive exponent in some term.
    pub fn support(&self) -> Vec<usize> {
        (0..self.nvars).filter(|&v| self.involves(v)).collect()
    }

    /// For a polynomial of degree ≤ 1: per-variable coefficients and constant.
    pub fn linear_parts(&self) -> Option<(Vec<Rational>, Rational)> {
        if !self.is_linear() {
            return None;
        }
        let mut coeffs = vec![Rational::zero(); self.nvars];
        let mut constant = Rational::zero();
        for (m, c) in &self.terms {
            match m.0.iter().position(|&e| e == 1) {
                Some(i) => coeffs[i] = c.clone(),
                None => constant = c.clone(),
            }
        }
        Some((coeffs, constant))
    }

    pub fn from_linear(coeffs: &[Rational], constant: Rational) -> Self {
        let n = coeffs.len();
        let mut p = Self::constant(constant, n);
        for (i, c) in coeffs.iter().enumerate() {
            p.add_term(Monomial::var(n, i), c.clone());
        }
        p
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        Polynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn mul_monomial(&self, mono: &Monomial, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        Polynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, v)| (m.mul(mono), v * c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut result = Self::one(self.nvars);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    pub fn derivative(&self, var: usize) -> Self {
        let mut out = Self::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.0[var];
            if e == 0 {
                continue;
            }
            let mut dm = m.clone();
            dm.0[var] -= 1;
            out.add_term(dm, c * Rational::from_integer(BigInt::from(e)));
        }
        out
    }

    /// Exact evaluation at a rational point.
    pub fn eval(&self, point: &[Rational]) -> Result<Rational> {
        if point.len() != self.nvars {
            return Err(Error::DimensionMismatch {
                expected: self.nvars,
                got: point.len(),
            });
        }
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (x, &e) in point.iter().zip(&m.0) {
                if e > 0 {
                    t *= num_traits::pow(x.clone(), e as usize);
                }
            }
            acc += t;
        }
        Ok(acc)
    }

    pub fn eval_f64(&self, point: &[f64]) -> Result<f64> {
        if point.len() != self.nvars {
            return Err(Error::DimensionMismatch {
                expected: self.nvars,
                got: point.len(),
            });
        }
        Ok(self.terms.iter().map(|(m, c)| rat_to_f64(c) * m.eval_f64(point)).sum())
    }

    /// Replace each variable `i` by `images[i]`; the result lives in the
    /// images' variable space.
    pub fn compose(&self, images: &[Polynomial]) -> Result<Polynomial> {
        if images.len() != self.nvars {
            return Err(Error::DimensionMismatch {
                expected: self.nvars,
                got: images.len(),
            });
        }
        let target_n = images.first().map(|p| p.nvars).unwrap_or(0);
        if images.iter().any(|p| p.nvars != target_n) {
            return Err(Error::FormMismatch("images live in different spaces".into()));
        }
        // Cache powers per variable.
        let mut powers: Vec<Vec<Polynomial>> = images
            .iter()
            .map(|p| vec![Polynomial::one(target_n), p.clone()])
            .collect();
        let mut out = Polynomial::zero(target_n);
        for (m, c) in &self.terms {
            let mut t = Polynomial::constant(c.clone(), target_n);
            for (v, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                while powers[v].len() <= e as usize {
                    let next = &powers[v][powers[v].len() - 1] * &images[v];
                    powers[v].push(next);
                }
                t = &t * &powers[v][e as usize];
            }
            out = &out + &t;
        }
        Ok(out)
    }

    /// Substitute a constant for one variable (the variable stays in the
    /// ambient space but no longer appears).
    pub fn substitute_value(&self, var: usize, value: &Rational) -> Polynomial {
        let mut out = Polynomial::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.0[var];
            let mut nm = m.clone();
            nm.0[var] = 0;
            let factor = if e == 0 {
                c.clone()
            } else {
                c * num_traits::pow(value.clone(), e as usize)
            };
            out.add_term(nm, factor);
        }
        out
    }

    /// Substitute a polynomial (in the same space) for one variable.
    pub fn substitute_poly(&self, var: usize, image: &Polynomial) -> Polynomial {
        let images: Vec<Polynomial> = (0..self.nvars)
            .map(|i| {
                if i == var {
                    image.clone()
                } else {
                    Polynomial::var(i, self.nvars)
                }
            })
            .collect();
        self.compose(&images).expect("dimensions agree by construction")
    }

    /// Coefficients `c_k` with `self = Σ c_k · x_var^k`; each `c_k` is free of `var`.
    pub fn coefficients_in(&self, var: usize) -> Vec<Polynomial> {
        let deg = self.degree_in(var) as usize;
        let mut out = vec![Polynomial::zero(self.nvars); deg + 1];
        for (m, c) in &self.terms {
            let e = m.0[var] as usize;
            let mut nm = m.clone();
            nm.0[var] = 0;
            out[e].add_term(nm, c.clone());
        }
        out
    }

    /// Largest monomial in the listed variables dividing every term.
    pub fn monomial_content(&self, vars: &[usize]) -> Monomial {
        let mut e = vec![0u32; self.nvars];
        if self.is_zero() {
            return Monomial(e);
        }
        for &v in vars {
            e[v] = self.terms.keys().map(|m| m.0[v]).min().unwrap_or(0);
        }
        Monomial(e)
    }

    pub fn div_monomial(&self, mono: &Monomial) -> Option<Polynomial> {
        if !self.terms.keys().all(|m| mono.divides(m)) {
            return None;
        }
        Some(Polynomial {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (mono.quotient_of(m), c.clone()))
                .collect(),
        })
    }

    /// Exact division by a single variable, if it divides every term.
    pub fn div_var(&self, var: usize) -> Option<Polynomial> {
        self.div_monomial(&Monomial::var(self.nvars, var))
    }

    /// Leading coefficient in the map order (used only for normalization).
    pub fn leading_coefficient(&self) -> Option<&Rational> {
        self.terms.iter().next_back().map(|(_, c)| c)
    }

    /// Divide by the absolute value of the leading coefficient.
    pub fn normalize_positive(&self) -> Polynomial {
        match self.leading_coefficient() {
            Some(c) => self.scale(&(Rational::one() / c.abs())),
            None => self.clone(),
        }
    }

    /// Divide by the leading coefficient (leading coefficient becomes 1).
    pub fn normalize_monic(&self) -> Polynomial {
        match self.leading_coefficient() {
            Some(c) => self.scale(&(Rational::one() / c)),
            None => self.clone(),
        }
    }

    /// Re-embed into `new_nvars` variables; variable `i` goes to `mapping[i]`.
    pub fn embed(&self, new_nvars: usize, mapping: &[usize]) -> Polynomial {
        let mut out = Polynomial::zero(new_nvars);
        for (m, c) in &self.terms {
            let mut e = vec![0u32; new_nvars];
            for (i, &x) in m.0.iter().enumerate() {
                e[mapping[i]] += x;
            }
            out.add_term(Monomial(e), c.clone());
        }
        out
    }

    /// Drop variable `var`, which must not occur.
    pub fn remove_var(&self, var: usize) -> Polynomial {
        debug_assert!(!self.involves(var));
        let mut out = Polynomial::zero(self.nvars - 1);
        for (m, c) in &self.terms {
            let mut e = m.0.clone();
            e.remove(var);
            out.add_term(Monomial(e), c.clone());
        }
        out
    }

    pub fn compile(&self) -> CompiledPoly {
        CompiledPoly::new(self)
    }

    pub fn fmt_with(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        // Graded order, highest degree first, for readability.
        let mut terms: Vec<_> = self.terms.iter().collect();
        terms.sort_by(|a, b| b.0.total_degree().cmp(&a.0.total_degree()).then_with(|| b.0.cmp(a.0)));
        for (k, (m, c)) in terms.into_iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if k == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mut factors: Vec<String> = Vec::new();
            if !abs.is_one() || m.is_one() {
                factors.push(abs.to_string());
            }
            for (v, &e) in m.0.iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(names[v].clone()),
                    _ => factors.push(format!("{}^{}", names[v], e)),
                }
            }
            out.push_str(&factors.join("*"));
        }
        out
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (1..=self.nvars).map(|i| format!("x{i}")).collect();
        f.write_str(&self.fmt_with(&names))
    }
}

impl<'a> Add<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &'a Polynomial) -> Polynomial {
        assert_eq!(self.nvars, rhs.nvars, "adding polynomials over different spaces");
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl<'a> Sub<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &'a Polynomial) -> Polynomial {
        assert_eq!(self.nvars, rhs.nvars, "subtracting polynomials over different spaces");
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl<'a> Mul<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &'a Polynomial) -> Polynomial {
        assert_eq!(self.nvars, rhs.nvars, "multiplying polynomials over different spaces");
        let mut out = Polynomial::zero(self.nvars);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(&-Rational::one())
    }
}

impl Add for Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: Polynomial) -> Polynomial {
        &self + &rhs
    }
}

impl Sub for Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: Polynomial) -> Polynomial {
        &self - &rhs
    }
}

impl Mul for Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: Polynomial) -> Polynomial {
        &self * &rhs
    }
}

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        -&self
    }
}

/// Float image of a polynomial for repeated evaluation inside quadrature.
#[derive(Clone, Debug)]
pub struct CompiledPoly {
    nvars: usize,
    terms: Vec<(f64, Vec<(usize, u32)>)>,
}

impl CompiledPoly {
    pub fn new(p: &Polynomial) -> Self {
        let terms = p
            .terms
            .iter()
            .map(|(m, c)| {
                let factors =
                    m.0.iter()
                        .enumerate()
                        .filter(|(_, &e)| e > 0)
                        .map(|(i, &e)| (i, e))
                        .collect();
                (rat_to_f64(c), factors)
            })
            .collect();
        CompiledPoly { nvars: p.nvars, terms }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn eval(&self, point: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(c, fs)| c * fs.iter().map(|&(i, e)| point[i].powi(e as i32)).product::<f64>())
            .sum()
    }

    /// Sum of absolute term values, a scale for rounding tolerances.
    pub fn magnitude(&self, point: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(c, fs)| (c * fs.iter().map(|&(i, e)| point[i].powi(e as i32)).product::<f64>()).abs())
            .sum()
    }

    /// Coefficients in `var` with every other variable fixed from `point`
    /// (the entry of `point` at `var` is ignored).
    pub fn univariate(&self, var: usize, point: &[f64]) -> Vec<f64> {
        let deg = self
            .terms
            .iter()
            .flat_map(|(_, fs)| fs.iter().filter(|(i, _)| *i == var).map(|&(_, e)| e as usize))
            .max()
            .unwrap_or(0);
        let mut out = vec![0.0; deg + 1];
        for (c, fs) in &self.terms {
            let mut k = 0usize;
            let mut v = *c;
            for &(i, e) in fs {
                if i == var {
                    k = e as usize;
                } else {
                    v *= point[i].powi(e as i32);
                }
            }
            out[k] += v;
        }
        out
    }

    pub fn gradient(&self, point: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; self.nvars];
        for (c, fs) in &self.terms {
            for (k, &(i, e)) in fs.iter().enumerate() {
                let mut v = c * e as f64 * point[i].powi(e as i32 - 1);
                for (j, &(i2, e2)) in fs.iter().enumerate() {
                    if j != k {
                        v *= point[i2].powi(e2 as i32);
                    }
                }
                g[i] += v;
            }
        }
        g
    }
}
