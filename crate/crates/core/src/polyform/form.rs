//! Differential forms with logarithmic poles along coordinate hyperplanes.
//!
//! A form on `(n, p)` is `Σ_K a_K · ⋀_{k∈K} e_k` where `K` is an ascending
//! list of coordinate indices and `e_k = dr_k/r_k` for `k < p`, `e_k = dx_k`
//! otherwise. A smooth `dr_k` is stored as `r_k · dr_k/r_k`.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed};

use super::map::{Coordinate, MonomialMap};
use super::parse::{parse_poly, Variables};
use super::poly::{Monomial, Polynomial, Rational};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LogForm {
    n: usize,
    p: usize,
    degree: usize,
    terms: BTreeMap<Vec<usize>, Polynomial>,
}

/// Sign of the permutation sorting `idx`, or `None` on a repeated index.
pub fn sort_sign(idx: &[usize]) -> Option<(Vec<usize>, i32)> {
    let mut v = idx.to_vec();
    let mut sign = 1;
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some((v, sign))
}

impl LogForm {
    pub fn zero(n: usize, p: usize, degree: usize) -> Self {
        LogForm {
            n,
            p,
            degree,
            terms: BTreeMap::new(),
        }
    }

    /// The 0-form given by a function.
    pub fn function(f: Polynomial, p: usize) -> Self {
        let n = f.nvars();
        let mut out = Self::zero(n, p, 0);
        out.add_term(Vec::new(), f);
        out
    }

    /// `dr_i/r_i` for a divisor coordinate, `dx_i` otherwise.
    pub fn basis(n: usize, p: usize, i: usize) -> Self {
        let mut out = Self::zero(n, p, 1);
        out.add_term(vec![i], Polynomial::one(n));
        out
    }

    /// The exact 1-form `dx_i`, also for divisor coordinates.
    pub fn differential(n: usize, p: usize, i: usize) -> Self {
        let mut out = Self::zero(n, p, 1);
        let coeff = if i < p {
            Polynomial::var(i, n)
        } else {
            Polynomial::one(n)
        };
        out.add_term(vec![i], coeff);
        out
    }

    /// Build from `(indices, coefficient)` pairs in arbitrary index order.
    pub fn from_terms<I: IntoIterator<Item = (Vec<usize>, Polynomial)>>(
        n: usize,
        p: usize,
        degree: usize,
        terms: I,
    ) -> Result<Self> {
        let mut out = Self::zero(n, p, degree);
        for (idx, coeff) in terms {
            if idx.len() != degree {
                return Err(Error::FormMismatch(format!(
                    "term of degree {} in a {}-form",
                    idx.len(),
                    degree
                )));
            }
            if let Some(&bad) = idx.iter().find(|&&i| i >= n) {
                return Err(Error::IndexOutOfRange(format!("coordinate {} of {}", bad + 1, n)));
            }
            if coeff.nvars() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: coeff.nvars(),
                });
            }
            if let Some((sorted, sign)) = sort_sign(&idx) {
                let c = if sign < 0 { -&coeff } else { coeff };
                out.add_term(sorted, c);
            }
        }
        Ok(out)
    }

    fn add_term(&mut self, key: Vec<usize>, coeff: Polynomial) {
        if coeff.is_zero() {
            return;
        }
        let merged = match self.terms.remove(&key) {
            Some(existing) => &existing + &coeff,
            None => coeff,
        };
        if !merged.is_zero() {
            self.terms.insert(key, merged);
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<usize>, &Polynomial)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, key: &[usize]) -> Polynomial {
        self.terms.get(key).cloned().unwrap_or_else(|| Polynomial::zero(self.n))
    }

    /// Divisor indices occurring in some key.
    pub fn log_indices(&self) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .terms
            .keys()
            .flat_map(|k| k.iter().copied().filter(|&i| i < self.p))
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// True when some `dr_i/r_i` has a coefficient not divisible by `r_i`.
    pub fn has_poles(&self) -> bool {
        self.terms
            .iter()
            .any(|(k, c)| k.iter().any(|&i| i < self.p && c.div_var(i).is_none()))
    }

    fn check_compatible(&self, other: &LogForm) -> Result<()> {
        if self.n != other.n || self.p != other.p {
            return Err(Error::FormMismatch(format!(
                "(n, p) = ({}, {}) vs ({}, {})",
                self.n, self.p, other.n, other.p
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &LogForm) -> Result<LogForm> {
        self.check_compatible(other)?;
        if self.degree != other.degree {
            return Err(Error::FormMismatch(format!(
                "adding a {}-form to a {}-form",
                self.degree, other.degree
            )));
        }
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(k.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn neg(&self) -> LogForm {
        self.scale(&-Rational::one())
    }

    pub fn sub(&self, other: &LogForm) -> Result<LogForm> {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Rational) -> LogForm {
        let mut out = Self::zero(self.n, self.p, self.degree);
        for (k, v) in &self.terms {
            out.add_term(k.clone(), v.scale(c));
        }
        out
    }

    pub fn mul_poly(&self, f: &Polynomial) -> LogForm {
        let mut out = Self::zero(self.n, self.p, self.degree);
        for (k, v) in &self.terms {
            out.add_term(k.clone(), v * f);
        }
        out
    }

    pub fn wedge(&self, other: &LogForm) -> Result<LogForm> {
        self.check_compatible(other)?;
        let mut out = Self::zero(self.n, self.p, self.degree + other.degree);
        for (k1, c1) in &self.terms {
            for (k2, c2) in &other.terms {
                let joined: Vec<usize> = k1.iter().chain(k2).copied().collect();
                if let Some((key, sign)) = sort_sign(&joined) {
                    let c = c1 * c2;
                    out.add_term(key, if sign < 0 { -&c } else { c });
                }
            }
        }
        Ok(out)
    }

    /// Coefficients against `dx_K` (all factors exact), failing on a true pole.
    pub fn to_smooth(&self) -> Result<BTreeMap<Vec<usize>, Polynomial>> {
        let mut out = BTreeMap::new();
        for (k, c) in &self.terms {
            let mut a = c.clone();
            for &i in k.iter().filter(|&&i| i < self.p) {
                a = a.div_var(i).ok_or(Error::LogTermInDerivative(i + 1))?;
            }
            out.insert(k.clone(), a);
        }
        Ok(out)
    }

    /// Inverse of [`LogForm::to_smooth`].
    pub fn from_smooth(n: usize, p: usize, degree: usize, terms: BTreeMap<Vec<usize>, Polynomial>) -> LogForm {
        let mut out = Self::zero(n, p, degree);
        for (k, c) in terms {
            let mono = Monomial::new((0..n).map(|i| u32::from(i < p && k.contains(&i))).collect());
            out.add_term(k, c.mul_monomial(&mono, &Rational::one()));
        }
        out
    }

    pub fn exterior_d(&self) -> Result<LogForm> {
        let smooth = self.to_smooth()?;
        let mut out: BTreeMap<Vec<usize>, Polynomial> = BTreeMap::new();
        for (k, a) in &smooth {
            for j in 0..self.n {
                if k.contains(&j) {
                    continue;
                }
                let da = a.derivative(j);
                if da.is_zero() {
                    continue;
                }
                let mut joined = vec![j];
                joined.extend_from_slice(k);
                let (key, sign) = sort_sign(&joined).expect("j not in key");
                let term = if sign < 0 { -&da } else { da };
                let entry = out.entry(key).or_insert_with(|| Polynomial::zero(self.n));
                *entry = &*entry + &term;
            }
        }
        out.retain(|_, c| !c.is_zero());
        Ok(Self::from_smooth(self.n, self.p, self.degree + 1, out))
    }

    /// Pull back along `map`; the result lives on the map's source space.
    pub fn pullback(&self, map: &MonomialMap) -> Result<LogForm> {
        if map.target_n() != self.n || map.target_p() != self.p {
            return Err(Error::FormMismatch(format!(
                "map targets ({}, {}) but form lives on ({}, {})",
                map.target_n(),
                map.target_p(),
                self.n,
                self.p
            )));
        }
        let sn = map.source_n();
        let sp = map.source_p();
        let images = map.images();
        // Pull back each basis 1-form once.
        let mut ones: Vec<Option<LogForm>> = vec![None; self.n];
        for key in self.terms.keys() {
            for &v in key {
                if ones[v].is_some() {
                    continue;
                }
                let form = if v < self.p {
                    let Coordinate::Monomial { exponents, .. } = &map.coords()[v] else {
                        return Err(Error::NonMonomialChart(v + 1));
                    };
                    let mut f = LogForm::zero(sn, sp, 1);
                    for (s, &e) in exponents.iter().enumerate() {
                        if e > 0 {
                            f.add_term(vec![s], Polynomial::constant(Rational::from_integer(e.into()), sn));
                        }
                    }
                    f
                } else {
                    let img = &images[v];
                    let mut f = LogForm::zero(sn, sp, 1);
                    for s in 0..sn {
                        let mut c = img.derivative(s);
                        if s < sp {
                            c = &c * &Polynomial::var(s, sn);
                        }
                        f.add_term(vec![s], c);
                    }
                    f
                };
                ones[v] = Some(form);
            }
        }
        let mut out = LogForm::zero(sn, sp, self.degree);
        for (key, coeff) in &self.terms {
            let mut acc = LogForm::function(map.apply_poly(coeff)?, sp);
            for &v in key {
                acc = acc.wedge(ones[v].as_ref().expect("filled above"))?;
            }
            out = out.add(&acc)?;
        }
        Ok(out)
    }

    /// Restriction to the hyperplane `{x_i = value}`, as a form on the
    /// remaining coordinates (a divisor coordinate stops being one).
    pub fn restrict_coordinate(&self, i: usize, value: &Rational) -> Result<LogForm> {
        if i >= self.n {
            return Err(Error::IndexOutOfRange(format!("coordinate {} of {}", i + 1, self.n)));
        }
        let p = if i < self.p { self.p - 1 } else { self.p };
        let mut out = Self::zero(self.n - 1, p, self.degree);
        for (k, c) in &self.terms {
            if k.contains(&i) {
                continue;
            }
            let key = k.iter().map(|&j| if j > i { j - 1 } else { j }).collect();
            out.add_term(key, c.substitute_value(i, value).remove_var(i));
        }
        Ok(out)
    }

    /// Render in the form-string syntax accepted by [`parse_log_form`].
    pub fn format(&self, vars: &Variables) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let atom = |i: usize| {
            if i < self.p {
                format!("d{0}/{0}", vars.names()[i])
            } else {
                format!("d{}", vars.names()[i])
            }
        };
        let mut parts = Vec::new();
        for (k, c) in &self.terms {
            let wedge = k.iter().map(|&i| atom(i)).collect::<Vec<_>>().join(" ^ ");
            let coeff = if c.is_constant() && c.constant_term().abs().is_one() {
                if c.constant_term().is_negative() {
                    "-".to_string()
                } else {
                    String::new()
                }
            } else {
                format!("({})", c.fmt_with(vars.names()))
            };
            let s = match (coeff.as_str(), wedge.is_empty()) {
                ("", true) => "1".to_string(),
                ("-", true) => "-1".to_string(),
                ("", false) => wedge,
                ("-", false) => format!("-{wedge}"),
                (c, true) => c.to_string(),
                (c, false) => format!("{c}*{wedge}"),
            };
            parts.push(s);
        }
        let mut out = parts[0].clone();
        for s in &parts[1..] {
            match s.strip_prefix('-') {
                Some(rest) => {
                    out.push_str(" - ");
                    out.push_str(rest);
                }
                None => {
                    out.push_str(" + ");
                    out.push_str(s);
                }
            }
        }
        out
    }
}

impl fmt::Display for LogForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vars = Variables::real(self.n, self.p);
        f.write_str(&self.format(&vars))
    }
}

/// One summand of a form string: sign, coefficient text, wedge atoms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawTerm {
    pub negative: bool,
    pub coefficient: Vec<String>,
    pub atoms: Vec<String>,
    pub offset: usize,
}

/// Split a form string into summands. Factors beginning with `d` are wedge
/// atoms; inside them `^` is the wedge, elsewhere it is a power.
pub fn split_form_terms(text: &str) -> Result<Vec<RawTerm>> {
    let bytes = text.as_bytes();
    let mut terms = Vec::new();
    let mut depth = 0i32;
    let mut start = 0usize;
    let mut negative = false;
    let mut pending: Vec<(bool, usize, usize)> = Vec::new();
    let mut seen_content = false;
    for (i, &b) in bytes.iter().enumerate() {
        match b {
            b'(' => {
                depth += 1;
                seen_content = true;
            }
            b')' => {
                depth -= 1;
                if depth < 0 {
                    return Err(Error::Syntax {
                        pos: i,
                        msg: "unbalanced ')'".into(),
                    });
                }
            }
            b'+' | b'-' if depth == 0 => {
                if seen_content {
                    pending.push((negative, start, i));
                    negative = b == b'-';
                } else if b == b'-' {
                    negative = !negative;
                }
                start = i + 1;
                seen_content = false;
            }
            c if !c.is_ascii_whitespace() => seen_content = true,
            _ => {}
        }
    }
    if depth != 0 {
        return Err(Error::Syntax {
            pos: bytes.len(),
            msg: "unbalanced '('".into(),
        });
    }
    if !seen_content {
        return Err(Error::Syntax {
            pos: bytes.len(),
            msg: "empty term".into(),
        });
    }
    pending.push((negative, start, bytes.len()));

    for (negative, s, e) in pending {
        let body = &text[s..e];
        let mut factors = Vec::new();
        let mut depth = 0i32;
        let mut fs = 0usize;
        for (i, c) in body.char_indices() {
            match c {
                '(' => depth += 1,
                ')' => depth -= 1,
                '*' if depth == 0 => {
                    factors.push((fs, &body[fs..i]));
                    fs = i + 1;
                }
                _ => {}
            }
        }
        factors.push((fs, &body[fs..]));
        let mut coefficient = Vec::new();
        let mut atoms = Vec::new();
        for (off, f) in factors {
            let t = f.trim();
            if t.is_empty() {
                return Err(Error::Syntax {
                    pos: s + off,
                    msg: "empty factor".into(),
                });
            }
            if t.starts_with('d') {
                for a in t.split('^') {
                    let a = a.trim();
                    if !a.starts_with('d') {
                        return Err(Error::Syntax {
                            pos: s + off,
                            msg: format!("expected a differential, found `{a}`"),
                        });
                    }
                    atoms.push(a.to_string());
                }
            } else {
                if !atoms.is_empty() {
                    return Err(Error::Syntax {
                        pos: s + off,
                        msg: "coefficient factor after a differential".into(),
                    });
                }
                coefficient.push(t.to_string());
            }
        }
        terms.push(RawTerm {
            negative,
            coefficient,
            atoms,
            offset: s,
        });
    }
    Ok(terms)
}

/// Parse a real log form such as `"dr1/r1 ^ dr2/r2 - x3*dr1 ^ dx3"`.
pub fn parse_log_form(text: &str, n: usize, p: usize) -> Result<LogForm> {
    let vars = Variables::real(n, p);
    let raw = split_form_terms(text)?;
    let mut out: Option<LogForm> = None;
    for t in raw {
        let coeff_text = if t.coefficient.is_empty() {
            "1".to_string()
        } else {
            t.coefficient.join("*")
        };
        let mut coeff = parse_poly(&coeff_text, &vars)?;
        if t.negative {
            coeff = -&coeff;
        }
        let mut acc = LogForm::function(coeff, p);
        for a in &t.atoms {
            let one = parse_real_atom(a, n, p).map_err(|e| match e {
                Error::Syntax { msg, .. } => Error::Syntax { pos: t.offset, msg },
                other => other,
            })?;
            acc = acc.wedge(&one)?;
        }
        out = Some(match out {
            None => acc,
            Some(prev) => prev.add(&acc)?,
        });
    }
    Ok(out.expect("at least one term"))
}

fn parse_real_atom(atom: &str, n: usize, p: usize) -> Result<LogForm> {
    let index = |s: &str| -> Result<usize> {
        s.parse::<usize>()
            .ok()
            .filter(|&i| i >= 1 && i <= n)
            .ok_or_else(|| Error::UnknownVariable(atom.to_string()))
    };
    if let Some(rest) = atom.strip_prefix("dr") {
        if let Some((a, b)) = rest.split_once('/') {
            let i = index(a)?;
            if b.trim() != format!("r{i}") || i > p {
                return Err(Error::UnknownVariable(atom.to_string()));
            }
            return Ok(LogForm::basis(n, p, i - 1));
        }
        let i = index(rest)?;
        if i > p {
            return Err(Error::UnknownVariable(atom.to_string()));
        }
        return Ok(LogForm::differential(n, p, i - 1));
    }
    if let Some(rest) = atom.strip_prefix("dx") {
        let i = index(rest)?;
        if i <= p {
            return Err(Error::UnknownVariable(atom.to_string()));
        }
        return Ok(LogForm::basis(n, p, i - 1));
    }
    Err(Error::Syntax {
        pos: 0,
        msg: format!("unknown differential `{atom}`"),
    })
}

/// Exponent data of a polynomial with respect to the first `p` coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NewtonData {
    /// Projections of the support to the first `p` coordinates.
    pub exponents: Vec<Vec<u32>>,
    /// Vertices of the hull of `∪ (r + ℝ≥0^p)`.
    pub vertices: Vec<Vec<u32>>,
}

impl NewtonData {
    pub fn contains_origin(&self) -> bool {
        self.exponents.iter().any(|e| e.iter().all(|&x| x == 0))
    }

    pub fn min_total_degree(&self) -> u32 {
        self.exponents.iter().map(|e| e.iter().sum()).min().unwrap_or(0)
    }
}

pub fn newton_exponents(f: &Polynomial, p: usize) -> Result<NewtonData> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if p > f.nvars() {
        return Err(Error::IndexOutOfRange(format!(
            "p = {p} exceeds {} variables",
            f.nvars()
        )));
    }
    let mut set = std::collections::BTreeSet::new();
    // A projected exponent survives when its coefficient polynomial in the
    // remaining variables is nonzero; coefficients of distinct monomials
    // cannot cancel, so every projection of the support qualifies.
    for (m, _) in f.terms() {
        set.insert(m.exponents()[..p].to_vec());
    }
    let exponents: Vec<Vec<u32>> = set.into_iter().collect();
    let vertices = exponents
        .iter()
        .enumerate()
        .filter(|(i, r)| !dominated_by_hull(r, &exponents, *i))
        .map(|(_, r)| r.clone())
        .collect();
    Ok(NewtonData { exponents, vertices })
}

/// Whether `r` lies in `conv(others) + ℝ≥0^p`.
fn dominated_by_hull(r: &[u32], all: &[Vec<u32>], skip: usize) -> bool {
    use crate::lp::{LinearProgram, LpOutcome};
    let others: Vec<&Vec<u32>> = all
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != skip)
        .map(|(_, v)| v)
        .collect();
    if others.is_empty() {
        return false;
    }
    // Cheap test first: dominated by a single point.
    if others.iter().any(|o| o.iter().zip(r).all(|(a, b)| a <= b)) {
        return true;
    }
    let k = others.len();
    let p = r.len();
    let mut lp = LinearProgram::new(k);
    for j in 0..p {
        let row: Vec<Rational> = others.iter().map(|o| Rational::from_integer(o[j].into())).collect();
        lp.add_le(row, Rational::from_integer(r[j].into()));
    }
    lp.add_eq(vec![Rational::one(); k], Rational::one());
    for i in 0..k {
        let mut row = vec![Rational::from_integer(0.into()); k];
        row[i] = -Rational::one();
        lp.add_le(row, Rational::from_integer(0.into()));
    }
    matches!(lp.feasible_point(), LpOutcome::Optimal { .. })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyform::poly::rat_int;

    fn pf(s: &str, n: usize, p: usize) -> LogForm {
        parse_log_form(s, n, p).unwrap()
    }

    #[test]
    fn exterior_derivative_examples() {
        // Smooth coordinates only.
        let d1 = pf("x1*dx2", 2, 0).exterior_d().unwrap();
        assert_eq!(d1, pf("dx1 ^ dx2", 2, 0));
        let d2 = pf("dx2", 2, 0).exterior_d().unwrap();
        assert!(d2.is_zero());
        let d3 = pf("x1*x2*dx1", 2, 0).exterior_d().unwrap();
        assert_eq!(d3, pf("-x1*dx1 ^ dx2", 2, 0));
    }

    #[test]
    fn exterior_derivative_rejects_pole() {
        let e = pf("x2*dr1/r1", 2, 1).exterior_d().unwrap_err();
        assert_eq!(e, Error::LogTermInDerivative(1));
        // r1 * dr1/r1 = dr1 is smooth.
        let ok = pf("x2*dr1", 2, 1).exterior_d().unwrap();
        assert_eq!(ok, pf("-dr1 ^ dx2", 2, 1));
    }

    #[test]
    fn wedge_examples() {
        let a = pf("dr1/r1", 2, 1);
        assert!(a.wedge(&a).unwrap().is_zero());
        let b = pf("dx2", 2, 1);
        let ab = a.wedge(&b).unwrap();
        assert_eq!(ab.coefficient(&[0, 1]), Polynomial::one(2));
        let ba = b.wedge(&a).unwrap();
        assert_eq!(ba.coefficient(&[0, 1]), Polynomial::constant(rat_int(-1), 2));
        assert!(a.wedge(&pf("dx2", 2, 0)).is_err());
    }

    fn blowup_chart() -> MonomialMap {
        let u = Polynomial::var(0, 2);
        let v = Polynomial::var(1, 2);
        MonomialMap::from_polys(2, 2, vec![u.clone(), &u * &v]).unwrap()
    }

    #[test]
    fn pullback_examples() {
        // r1 = u*v
        let u = Polynomial::var(0, 2);
        let v = Polynomial::var(1, 2);
        let m = MonomialMap::from_polys(2, 1, vec![&u * &v]).unwrap();
        let w = LogForm::basis(1, 1, 0);
        assert_eq!(w.pullback(&m).unwrap(), pf("dr1/r1 + dr2/r2", 2, 2));

        let id = MonomialMap::identity(3, 0);
        let dx3 = pf("dx3", 3, 0);
        assert_eq!(dx3.pullback(&id).unwrap(), dx3);

        let ll = pf("dr1/r1 ^ dr2/r2", 2, 2);
        assert_eq!(ll.pullback(&blowup_chart()).unwrap(), ll);
    }

    #[test]
    fn pullback_of_smooth_target() {
        // x2 -> u^2 + x2 over (r1, x2) with r1 -> r1
        let r = Polynomial::var(0, 2);
        let x = Polynomial::var(1, 2);
        let m = MonomialMap::from_polys(1, 1, vec![r.clone(), &r.pow(2) + &x]).unwrap();
        let w = pf("dx2", 2, 1);
        // d(r^2 + x) = 2 r dr + dx = 2 r^2 dr/r + dx
        assert_eq!(w.pullback(&m).unwrap(), pf("2*r1^2*dr1/r1 + dx2", 2, 1));
    }

    #[test]
    fn format_round_trip() {
        let w = pf("(r1 - 1/2)*dr1/r1 ^ dx3 - x3^2*dr2/r2 ^ dx3 + 3*dr1/r1 ^ dr2/r2", 3, 2);
        let vars = Variables::real(3, 2);
        assert_eq!(pf(&w.format(&vars), 3, 2), w);
    }

    #[test]
    fn parse_errors() {
        assert!(parse_log_form("dr3/r3", 2, 2).is_err());
        assert!(parse_log_form("dx1", 2, 1).is_err());
        assert!(parse_log_form("dr1/r2", 2, 2).is_err());
        assert!(parse_log_form("dr1/r1 * x2", 2, 1).is_err());
    }

    #[test]
    fn newton_examples() {
        use crate::polyform::parse_poly;
        let v = Variables::real(2, 2);
        let nd = newton_exponents(&parse_poly("r1 + r2", &v).unwrap(), 2).unwrap();
        assert_eq!(nd.exponents, vec![vec![0, 1], vec![1, 0]]);
        let nd = newton_exponents(&parse_poly("r1 + r2^2", &v).unwrap(), 2).unwrap();
        assert_eq!(nd.exponents, vec![vec![0, 2], vec![1, 0]]);
        assert_eq!(nd.vertices.len(), 2);
        let v3 = Variables::real(3, 1);
        let nd = newton_exponents(&parse_poly("r1*x3 + r1*x3^2", &v3).unwrap(), 1).unwrap();
        assert_eq!(nd.exponents, vec![vec![1]]);
        // (1,1) lies above the segment from (2,0) to (0,2): not a vertex.
        let nd = newton_exponents(&parse_poly("r1^2 + r2^2 + r1*r2", &v).unwrap(), 2).unwrap();
        assert_eq!(nd.vertices, vec![vec![0, 2], vec![2, 0]]);
        let nd = newton_exponents(&parse_poly("r1^2 + r2^2 + r1*r2^3", &v).unwrap(), 2).unwrap();
        assert_eq!(nd.vertices, vec![vec![0, 2], vec![2, 0]]);
        assert!(newton_exponents(&Polynomial::zero(2), 2).is_err());
    }
}
