//! Complex logarithmic forms `a·(dz₁/z₁ ∧ … ∧ dzₙ/zₙ) ∧ ⋀_{k∈R} dz̄_k` and
//! their pullback to polar coordinates.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::polyform::{parse_poly, sort_sign, split_form_terms, Polynomial, Rational, Variables};

use super::polar::{sector_images, SectorAssignment};

/// `re + i·im` with polynomial parts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComplexPoly {
    pub re: Polynomial,
    pub im: Polynomial,
}

impl ComplexPoly {
    pub fn new(re: Polynomial, im: Polynomial) -> Result<Self> {
        if re.nvars() != im.nvars() {
            return Err(Error::DimensionMismatch {
                expected: re.nvars(),
                got: im.nvars(),
            });
        }
        Ok(ComplexPoly { re, im })
    }

    pub fn real(re: Polynomial) -> Self {
        let im = Polynomial::zero(re.nvars());
        ComplexPoly { re, im }
    }

    pub fn zero(nvars: usize) -> Self {
        ComplexPoly::real(Polynomial::zero(nvars))
    }

    pub fn one(nvars: usize) -> Self {
        ComplexPoly::real(Polynomial::one(nvars))
    }

    pub fn i(nvars: usize) -> Self {
        ComplexPoly {
            re: Polynomial::zero(nvars),
            im: Polynomial::one(nvars),
        }
    }

    pub fn nvars(&self) -> usize {
        self.re.nvars()
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn add(&self, o: &ComplexPoly) -> ComplexPoly {
        ComplexPoly {
            re: &self.re + &o.re,
            im: &self.im + &o.im,
        }
    }

    pub fn mul(&self, o: &ComplexPoly) -> ComplexPoly {
        ComplexPoly {
            re: &(&self.re * &o.re) - &(&self.im * &o.im),
            im: &(&self.re * &o.im) + &(&self.im * &o.re),
        }
    }

    pub fn scale(&self, c: &Rational) -> ComplexPoly {
        ComplexPoly {
            re: self.re.scale(c),
            im: self.im.scale(c),
        }
    }

    pub fn conj(&self) -> ComplexPoly {
        ComplexPoly {
            re: self.re.clone(),
            im: -&self.im,
        }
    }

    pub fn compose(&self, images: &[Polynomial]) -> Result<ComplexPoly> {
        Ok(ComplexPoly {
            re: self.re.compose(images)?,
            im: self.im.compose(images)?,
        })
    }

    pub fn map(&self, f: impl Fn(&Polynomial) -> Polynomial) -> ComplexPoly {
        ComplexPoly {
            re: f(&self.re),
            im: f(&self.im),
        }
    }

    /// `i^k`.
    fn unit_power(k: u8, nvars: usize) -> ComplexPoly {
        let one = Polynomial::one(nvars);
        let zero = Polynomial::zero(nvars);
        match k % 4 {
            0 => ComplexPoly { re: one, im: zero },
            1 => ComplexPoly { re: zero, im: one },
            2 => ComplexPoly { re: -&one, im: zero },
            _ => ComplexPoly { re: zero, im: -&one },
        }
    }
}

/// Sum of `a_R·(dz₁/z₁ ∧ … ∧ dzₙ/zₙ) ∧ ⋀_{k∈R} dz̄_k` over subsets `R` of
/// one fixed size. Coefficients live in `(zr_1, zi_1, …, zr_n, zi_n)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComplexLogForm {
    n: usize,
    conj_degree: usize,
    terms: BTreeMap<Vec<usize>, ComplexPoly>,
}

fn atom_index(atom: &str, n: usize) -> Option<usize> {
    let in_range = |k: usize| (1..=n).contains(&k).then_some(k - 1);
    if let Some(rest) = atom.strip_prefix("dzbar") {
        return rest.parse::<usize>().ok().and_then(in_range).map(|k| n + k);
    }
    let rest = atom.strip_prefix("dz")?;
    let (a, b) = rest.split_once("/z")?;
    if a != b {
        return None;
    }
    a.parse::<usize>().ok().and_then(in_range)
}

impl ComplexLogForm {
    /// Terms keyed by zero-based `R`; every key must have `conj_degree` entries.
    pub fn new(
        n: usize,
        conj_degree: usize,
        terms: impl IntoIterator<Item = (Vec<usize>, ComplexPoly)>,
    ) -> Result<Self> {
        if conj_degree > n {
            return Err(Error::FormMismatch(format!(
                "{conj_degree} conjugate differentials in {n} variables"
            )));
        }
        let mut out: BTreeMap<Vec<usize>, ComplexPoly> = BTreeMap::new();
        for (key, c) in terms {
            if c.nvars() != 2 * n {
                return Err(Error::DimensionMismatch {
                    expected: 2 * n,
                    got: c.nvars(),
                });
            }
            let (key, sign) =
                sort_sign(&key).ok_or_else(|| Error::FormMismatch("repeated conjugate differential".into()))?;
            if key.len() != conj_degree || key.iter().any(|&k| k >= n) {
                return Err(Error::FormMismatch(format!(
                    "term {key:?} does not have {conj_degree} conjugate differentials"
                )));
            }
            let c = if sign < 0 {
                c.scale(&Rational::from_integer((-1).into()))
            } else {
                c
            };
            let slot = out.entry(key).or_insert_with(|| ComplexPoly::zero(2 * n));
            *slot = slot.add(&c);
        }
        out.retain(|_, c| !c.is_zero());
        Ok(ComplexLogForm {
            n,
            conj_degree,
            terms: out,
        })
    }

    /// Parse e.g. `"dz1/z1 ^ dz2/z2 ^ dzbar2 - i*zr1*dz1/z1 ^ dz2/z2 ^ dzbar1"`.
    /// A coefficient factor `i` is the imaginary unit.
    pub fn parse(text: &str, n: usize) -> Result<Self> {
        let vars = Variables::complex(n);
        let nv = 2 * n;
        let mut terms = Vec::new();
        let mut conj_degree = None;
        for raw in split_form_terms(text)? {
            let mut coeff = ComplexPoly::one(nv);
            for f in &raw.coefficient {
                let factor = if f == "i" {
                    ComplexPoly::i(nv)
                } else {
                    ComplexPoly::real(parse_poly(f, &vars).map_err(|e| shift(e, raw.offset))?)
                };
                coeff = coeff.mul(&factor);
            }
            if raw.negative {
                coeff = coeff.scale(&Rational::from_integer((-1).into()));
            }
            let mut idx = Vec::new();
            for a in &raw.atoms {
                idx.push(atom_index(a, n).ok_or_else(|| Error::Syntax {
                    pos: raw.offset,
                    msg: format!("unknown complex differential `{a}`"),
                })?);
            }
            let (sorted, sign) = sort_sign(&idx).ok_or_else(|| Error::Syntax {
                pos: raw.offset,
                msg: "repeated differential".into(),
            })?;
            if sorted.iter().filter(|&&k| k < n).count() != n {
                return Err(Error::FormMismatch(
                    "every term needs the full dz1/z1 ^ ... ^ dzn/zn factor".into(),
                ));
            }
            let key: Vec<usize> = sorted[n..].iter().map(|k| k - n).collect();
            if *conj_degree.get_or_insert(key.len()) != key.len() {
                return Err(Error::FormMismatch("terms of different degrees".into()));
            }
            if sign < 0 {
                coeff = coeff.scale(&Rational::from_integer((-1).into()));
            }
            terms.push((key, coeff));
        }
        ComplexLogForm::new(n, conj_degree.unwrap_or(0), terms)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Total real degree `m = n + |R|`.
    pub fn degree(&self) -> usize {
        self.n + self.conj_degree
    }

    pub fn conj_degree(&self) -> usize {
        self.conj_degree
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<usize>, &ComplexPoly)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficients `b(x, y) = conj(a(x, -y))`, the form whose integral over
    /// the mirrored region relates to the conjugate integral.
    pub fn mirrored(&self) -> ComplexLogForm {
        let nv = 2 * self.n;
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
        let terms = self
            .terms
            .iter()
            .map(|(k, c)| (k.clone(), c.compose(&images).expect("same arity").conj()))
            .collect();
        ComplexLogForm {
            n: self.n,
            conj_degree: self.conj_degree,
            terms,
        }
    }

    /// Pullback under the polar map of `sectors`. Keys index the real
    /// coordinates `(r_1..r_n, τ_1..τ_n)`, with an `r_k` entry meaning
    /// `dr_k/r_k`; coefficients are polynomials in `(r, τ, c)` with
    /// `c_k = (1 + τ_k²)^{-1/2}`.
    pub fn polar_pullback(&self, sectors: &SectorAssignment) -> Result<BTreeMap<Vec<usize>, ComplexPoly>> {
        let n = self.n;
        if sectors.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: sectors.len(),
            });
        }
        let nv = 3 * n;
        let var = |i: usize| Polynomial::var(i, nv);
        let images: Vec<Polynomial> = (0..n)
            .flat_map(|k| {
                let (x, y) = sector_images(n, k, sectors.sectors()[k]);
                [x, y]
            })
            .collect();
        // dz/z = dr/r + i c² dτ.
        let dlog: Vec<Vec<(usize, ComplexPoly)>> = (0..n)
            .map(|k| {
                let c = var(2 * n + k);
                vec![
                    (k, ComplexPoly::one(nv)),
                    (
                        n + k,
                        ComplexPoly::new(Polynomial::zero(nv), &c * &c).expect("same arity"),
                    ),
                ]
            })
            .collect();
        let mut base: BTreeMap<Vec<usize>, ComplexPoly> = BTreeMap::new();
        base.insert(Vec::new(), ComplexPoly::one(nv));
        for one in &dlog {
            base = wedge_one(&base, one);
        }
        let mut out: BTreeMap<Vec<usize>, ComplexPoly> = BTreeMap::new();
        for (r_set, a) in &self.terms {
            let mut acc = base.clone();
            for &k in r_set {
                // dz̄ = conj(ρ)·(r c (1 - iτ)·dr/r + r c³ (-τ - i)·dτ).
                let (r, t, c) = (var(k), var(n + k), var(2 * n + k));
                let rc = &r * &c;
                let rot = ComplexPoly::unit_power((4 - (sectors.sectors()[k] - 1)) % 4, nv);
                let dr = ComplexPoly::new(rc.clone(), -&(&rc * &t)).expect("same arity");
                let c3 = &(&rc * &c) * &c;
                let dt = ComplexPoly::new(-&(&c3 * &t), -&c3).expect("same arity");
                acc = wedge_one(&acc, &[(k, rot.mul(&dr)), (n + k, rot.mul(&dt))]);
            }
            let coeff = a.compose(&images)?;
            for (key, c) in acc {
                let slot = out.entry(key).or_insert_with(|| ComplexPoly::zero(nv));
                *slot = slot.add(&c.mul(&coeff));
            }
        }
        out.retain(|_, c| !c.is_zero());
        Ok(out)
    }
}

fn shift(e: Error, offset: usize) -> Error {
    match e {
        Error::Syntax { pos, msg } => Error::Syntax { pos: pos + offset, msg },
        other => other,
    }
}

fn wedge_one(
    form: &BTreeMap<Vec<usize>, ComplexPoly>,
    one: &[(usize, ComplexPoly)],
) -> BTreeMap<Vec<usize>, ComplexPoly> {
    let mut out: BTreeMap<Vec<usize>, ComplexPoly> = BTreeMap::new();
    for (key, a) in form {
        for (idx, b) in one {
            let mut k = key.clone();
            k.push(*idx);
            if let Some((sorted, sign)) = sort_sign(&k) {
                let mut c = a.mul(b);
                if sign < 0 {
                    c = c.scale(&Rational::from_integer((-1).into()));
                }
                let slot = out.entry(sorted).or_insert_with(|| ComplexPoly::zero(a.nvars()));
                *slot = slot.add(&c);
            }
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

impl fmt::Display for ComplexLogForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vars = Variables::complex(self.n);
        let base: Vec<String> = (1..=self.n).map(|k| format!("dz{k}/z{k}")).collect();
        let mut first = true;
        for (key, c) in &self.terms {
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            let re = crate::polyform::format_poly(&c.re, &vars);
            let im = crate::polyform::format_poly(&c.im, &vars);
            let coeff = match (c.re.is_zero(), c.im.is_zero()) {
                (false, true) => format!("({re})"),
                (true, false) => format!("i*({im})"),
                _ => format!("(({re}) + i*({im}))"),
            };
            let mut atoms = base.clone();
            atoms.extend(key.iter().map(|k| format!("dzbar{}", k + 1)));
            write!(f, "{coeff}*{}", atoms.join(" ^ "))?;
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complexint::polar::polar_map;
    use crate::polyform::rat_int;

    fn eval(c: &ComplexPoly, r: &[f64], t: &[f64]) -> (f64, f64) {
        let mut pt: Vec<f64> = r.iter().chain(t).copied().collect();
        pt.extend(t.iter().map(|t| 1.0 / (1.0 + t * t).sqrt()));
        (c.re.eval_f64(&pt).unwrap(), c.im.eval_f64(&pt).unwrap())
    }

    #[test]
    fn parses_and_orders() {
        let w = ComplexLogForm::parse("dz1/z1 ^ dzbar1", 1).unwrap();
        assert_eq!(w.degree(), 2);
        let w2 = ComplexLogForm::parse("-dzbar2 ^ dz1/z1 ^ dz2/z2 ^ dzbar1", 2).unwrap();
        // dzbar2 moves past three differentials.
        let (key, c) = w2.terms().next().unwrap();
        assert_eq!(key, &vec![0, 1]);
        assert_eq!(c.re, Polynomial::constant(rat_int(1), 4));
        let w3 = ComplexLogForm::parse("i*zr1*dz1/z1", 1).unwrap();
        let (_, c) = w3.terms().next().unwrap();
        assert!(c.re.is_zero() && c.im == Polynomial::var(0, 2));
        assert!(ComplexLogForm::parse("dzbar1", 1).is_err());
        assert!(ComplexLogForm::parse("dz1/z2", 2).is_err());
        assert!(ComplexLogForm::parse("dz1/z1 + dz1/z1 ^ dzbar1", 1).is_err());
        assert_eq!(w3.to_string(), "i*(zr1)*dz1/z1");
    }

    #[test]
    fn area_form_identity() {
        // dz/z ∧ dz̄ = -2 c³ (τ + i) dr ∧ dτ on the first sector.
        let w = ComplexLogForm::parse("dz1/z1 ^ dzbar1", 1).unwrap();
        let pb = w.polar_pullback(&SectorAssignment::new(vec![1]).unwrap()).unwrap();
        assert_eq!(pb.len(), 1);
        let c = &pb[&vec![0, 1]];
        for &t in &[-1.0, -0.3, 0.0, 0.8] {
            let (re, im) = eval(c, &[0.7], &[t]);
            let w = (1.0 + t * t).powf(-1.5);
            // The dr/r key carries one extra factor r.
            assert!((re - (-2.0 * t * w * 0.7)).abs() < 1e-14);
            assert!((im - (-2.0 * w * 0.7)).abs() < 1e-14);
        }
    }

    #[test]
    fn log_form_splits() {
        let w = ComplexLogForm::parse("dz1/z1", 1).unwrap();
        let pb = w.polar_pullback(&SectorAssignment::new(vec![3]).unwrap()).unwrap();
        let keys: Vec<_> = pb.keys().cloned().collect();
        assert_eq!(keys, vec![vec![0], vec![1]]);
        let (re, im) = eval(&pb[&vec![1]], &[2.0], &[0.5]);
        assert!(re.abs() < 1e-15 && (im - 1.0 / 1.25).abs() < 1e-15);
    }

    #[test]
    fn coefficient_composition_matches_polar_map() {
        let w = ComplexLogForm::parse("(zr1 + 2*zi1^2)*dz1/z1", 1).unwrap();
        for s in 1..=4u8 {
            let pb = w.polar_pullback(&SectorAssignment::new(vec![s]).unwrap()).unwrap();
            let (r, t) = (0.6, -0.25);
            let (x, y) = polar_map(r, t, s).unwrap();
            let (re, _) = eval(&pb[&vec![0]], &[r], &[t]);
            assert!((re - (x + 2.0 * y * y)).abs() < 1e-12);
        }
    }

    #[test]
    fn rotated_sectors_agree_with_cartesian() {
        // Pullback of dz/z ∧ dz̄ equals (-2i/z)·Jacobian in every sector.
        let w = ComplexLogForm::parse("dz1/z1 ^ dzbar1", 1).unwrap();
        for s in 1..=4u8 {
            let pb = w.polar_pullback(&SectorAssignment::new(vec![s]).unwrap()).unwrap();
            let (r, t) = (0.9, 0.4);
            let (x, y) = polar_map(r, t, s).unwrap();
            let jac = r / (1.0 + t * t);
            let d = x * x + y * y;
            // -2i / z = -2i (x - iy)/|z|² = (-2y - 2ix)/|z|².
            let want = (-2.0 * y / d * jac, -2.0 * x / d * jac);
            let (re, im) = eval(&pb[&vec![0, 1]], &[r], &[t]);
            // Divide the dr/r key by r to get the dr ∧ dτ density.
            assert!(
                (re / r - want.0).abs() < 1e-12 && (im / r - want.1).abs() < 1e-12,
                "sector {s}"
            );
        }
    }

    #[test]
    fn mirror_conjugates_coefficients() {
        let w = ComplexLogForm::parse("zi1*dz1/z1 ^ dzbar1 + i*zr1*dz1/z1 ^ dzbar1", 1).unwrap();
        let m = w.mirrored();
        let (_, c) = m.terms().next().unwrap();
        assert_eq!(c.re, -&Polynomial::var(1, 2));
        assert_eq!(c.im, -&Polynomial::var(0, 2));
    }
}
