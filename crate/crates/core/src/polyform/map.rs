//! Maps whose divisor components are signed monomials.

use nalgebra::DMatrix;
use num_traits::{One, Signed, Zero};

use super::poly::{rat_to_f64, Monomial, Polynomial, Rational};
use crate::error::{Error, Result};

/// Image of one target coordinate, expressed in source coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Coordinate {
    /// `coeff * Π u_s^{e_s}`.
    Monomial { coeff: Rational, exponents: Vec<u32> },
    /// Any polynomial; allowed only on non-divisor targets.
    Poly(Polynomial),
}

impl Coordinate {
    pub fn to_poly(&self, source_n: usize) -> Polynomial {
        match self {
            Coordinate::Monomial { coeff, exponents } => {
                Polynomial::monomial(coeff.clone(), Monomial::new(exponents.clone()))
            }
            Coordinate::Poly(p) => {
                debug_assert_eq!(p.nvars(), source_n);
                p.clone()
            }
        }
    }
}

/// A map from a source space `(n', p')` to a target space `(n, p)`; the
/// first `p` target coordinates are divisor coordinates and must be sent to
/// monomials in the first `p'` source coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialMap {
    source_n: usize,
    source_p: usize,
    target_p: usize,
    coords: Vec<Coordinate>,
}

impl MonomialMap {
    pub fn new(source_n: usize, source_p: usize, target_p: usize, coords: Vec<Coordinate>) -> Result<Self> {
        if target_p > coords.len() || source_p > source_n {
            return Err(Error::DimensionMismatch {
                expected: coords.len(),
                got: target_p,
            });
        }
        let mut coords = coords;
        for (v, c) in coords.iter_mut().enumerate() {
            if let Coordinate::Poly(p) = c {
                if p.nvars() != source_n {
                    return Err(Error::DimensionMismatch {
                        expected: source_n,
                        got: p.nvars(),
                    });
                }
                // Single-term images are stored as monomials.
                if p.num_terms() == 1 {
                    let (m, k) = p.terms().next().expect("one term");
                    *c = Coordinate::Monomial {
                        coeff: k.clone(),
                        exponents: m.exponents().to_vec(),
                    };
                }
            }
            match c {
                Coordinate::Monomial { coeff, exponents } => {
                    if exponents.len() != source_n {
                        return Err(Error::DimensionMismatch {
                            expected: source_n,
                            got: exponents.len(),
                        });
                    }
                    if v < target_p && (coeff.is_zero() || exponents[source_p..].iter().any(|&e| e > 0)) {
                        return Err(Error::NonMonomialChart(v + 1));
                    }
                }
                Coordinate::Poly(_) if v < target_p => return Err(Error::NonMonomialChart(v + 1)),
                Coordinate::Poly(_) => {}
            }
        }
        Ok(MonomialMap {
            source_n,
            source_p,
            target_p,
            coords,
        })
    }

    pub fn identity(n: usize, p: usize) -> Self {
        let coords = (0..n)
            .map(|i| Coordinate::Monomial {
                coeff: Rational::one(),
                exponents: Monomial::var(n, i).exponents().to_vec(),
            })
            .collect();
        MonomialMap {
            source_n: n,
            source_p: p,
            target_p: p,
            coords,
        }
    }

    /// Build from polynomial images, classifying each as monomial or general.
    pub fn from_polys(source_p: usize, target_p: usize, images: Vec<Polynomial>) -> Result<Self> {
        let source_n = images.first().map(|p| p.nvars()).unwrap_or(0);
        let coords = images.into_iter().map(Coordinate::Poly).collect();
        Self::new(source_n, source_p, target_p, coords)
    }

    pub fn source_n(&self) -> usize {
        self.source_n
    }

    pub fn source_p(&self) -> usize {
        self.source_p
    }

    pub fn target_n(&self) -> usize {
        self.coords.len()
    }

    pub fn target_p(&self) -> usize {
        self.target_p
    }

    pub fn coords(&self) -> &[Coordinate] {
        &self.coords
    }

    pub fn images(&self) -> Vec<Polynomial> {
        self.coords.iter().map(|c| c.to_poly(self.source_n)).collect()
    }

    /// `self ∘ inner`: first apply `inner`, then `self`.
    pub fn compose(&self, inner: &MonomialMap) -> Result<MonomialMap> {
        if inner.target_n() != self.source_n || inner.target_p != self.source_p {
            return Err(Error::DimensionMismatch {
                expected: self.source_n,
                got: inner.target_n(),
            });
        }
        let inner_images = inner.images();
        let images = self
            .images()
            .iter()
            .map(|p| p.compose(&inner_images))
            .collect::<Result<Vec<_>>>()?;
        let coords = images.into_iter().map(Coordinate::Poly).collect();
        MonomialMap::new(inner.source_n, inner.source_p, self.target_p, coords).map_err(|e| match e {
            Error::NonMonomialChart(v) => {
                Error::FormMismatch(format!("composition is not monomial on divisor coordinate {v}"))
            }
            other => other,
        })
    }

    /// Substitute the map into a polynomial on the target space.
    pub fn apply_poly(&self, f: &Polynomial) -> Result<Polynomial> {
        f.compose(&self.images())
    }

    pub fn eval_f64(&self, point: &[f64]) -> Vec<f64> {
        self.coords
            .iter()
            .map(|c| match c {
                Coordinate::Monomial { coeff, exponents } => {
                    rat_to_f64(coeff) * Monomial::new(exponents.clone()).eval_f64(point)
                }
                Coordinate::Poly(p) => p.compile().eval(point),
            })
            .collect()
    }

    /// Numeric inverse away from the exceptional locus. Divisor coordinates
    /// are recovered from `log|u| = E⁻¹ log|r/c|` with signs solved over GF(2);
    /// non-divisor coordinates must be images of single source variables.
    pub fn invert_numeric(&self, target: &[f64]) -> Result<Vec<f64>> {
        if target.len() != self.target_n() {
            return Err(Error::DimensionMismatch {
                expected: self.target_n(),
                got: target.len(),
            });
        }
        if self.source_p != self.target_p || self.source_n != self.target_n() {
            return Err(Error::Unsupported("numeric inverse needs equal dimensions".into()));
        }
        let p = self.target_p;
        let mut out = vec![0.0; self.source_n];
        if p > 0 {
            let mut e = DMatrix::<f64>::zeros(p, p);
            let mut rhs = nalgebra::DVector::<f64>::zeros(p);
            let mut signs = vec![vec![0u8; p + 1]; p];
            for v in 0..p {
                let Coordinate::Monomial { coeff, exponents } = &self.coords[v] else {
                    return Err(Error::NonMonomialChart(v + 1));
                };
                let ratio = target[v] / rat_to_f64(coeff);
                if ratio == 0.0 || !ratio.is_finite() {
                    return Err(Error::Domain(format!("point lies on divisor {}", v + 1)));
                }
                for s in 0..p {
                    e[(v, s)] = exponents[s] as f64;
                    signs[v][s] = (exponents[s] % 2) as u8;
                }
                rhs[v] = ratio.abs().ln();
                signs[v][p] = u8::from(ratio < 0.0);
            }
            let logs = e
                .lu()
                .solve(&rhs)
                .ok_or_else(|| Error::Domain("singular exponent matrix".into()))?;
            let neg = solve_gf2(signs, p).ok_or_else(|| Error::Domain("no real preimage".into()))?;
            for s in 0..p {
                let mag = logs[s].exp();
                out[s] = if neg[s] { -mag } else { mag };
            }
        }
        for v in p..self.target_n() {
            let img = self.coords[v].to_poly(self.source_n);
            let support = img.support();
            if support.len() != 1 || !img.is_linear() {
                return Err(Error::Unsupported(
                    "non-divisor coordinate is not a scaled variable".into(),
                ));
            }
            let s = support[0];
            let (coeffs, c0) = img.linear_parts().expect("linear");
            out[s] = (target[v] - rat_to_f64(&c0)) / rat_to_f64(&coeffs[s]);
        }
        Ok(out)
    }

    /// Sign of every divisor coefficient, used to flag orientation changes.
    pub fn divisor_coefficients_positive(&self) -> bool {
        self.coords[..self.target_p].iter().all(|c| match c {
            Coordinate::Monomial { coeff, .. } => coeff.is_positive(),
            Coordinate::Poly(_) => false,
        })
    }
}

/// Solve an augmented system over GF(2); `None` if inconsistent.
fn solve_gf2(mut rows: Vec<Vec<u8>>, n: usize) -> Option<Vec<bool>> {
    let m = rows.len();
    let mut pivot_cols = Vec::new();
    let mut r = 0;
    for c in 0..n {
        let Some(piv) = (r..m).find(|&i| rows[i][c] == 1) else {
            continue;
        };
        rows.swap(r, piv);
        for i in 0..m {
            if i != r && rows[i][c] == 1 {
                let pivot_row = rows[r].clone();
                for (a, b) in rows[i].iter_mut().zip(&pivot_row) {
                    *a ^= b;
                }
            }
        }
        pivot_cols.push(c);
        r += 1;
    }
    if rows[r..].iter().any(|row| row[n] == 1) {
        return None;
    }
    let mut x = vec![false; n];
    for (i, &c) in pivot_cols.iter().enumerate() {
        x[c] = rows[i][n] == 1;
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyform::poly::rat_int;

    fn chart_a() -> MonomialMap {
        // (u, v) -> (u, u v)
        let u = Polynomial::var(0, 2);
        let v = Polynomial::var(1, 2);
        MonomialMap::from_polys(2, 2, vec![u.clone(), &u * &v]).unwrap()
    }

    #[test]
    fn rejects_non_monomial_divisor_image() {
        let u = Polynomial::var(0, 2);
        let v = Polynomial::var(1, 2);
        let err = MonomialMap::from_polys(2, 2, vec![&u + &v, v.clone()]).unwrap_err();
        assert_eq!(err, Error::NonMonomialChart(1));
    }

    #[test]
    fn compose_twice() {
        let a = chart_a();
        let aa = a.compose(&a).unwrap();
        let u = Polynomial::var(0, 2);
        let v = Polynomial::var(1, 2);
        assert_eq!(aa.images(), vec![u.clone(), &u.pow(2) * &v]);
    }

    #[test]
    fn numeric_inverse_round_trip() {
        let u = Polynomial::var(0, 3);
        let v = Polynomial::var(1, 3);
        let x = Polynomial::var(2, 3);
        let m = MonomialMap::from_polys(
            2,
            2,
            vec![
                (&u.pow(2) * &v).scale(&rat_int(-3)),
                &u * &v,
                &x + &Polynomial::constant(rat_int(2), 3),
            ],
        )
        .unwrap();
        let src = [-0.7, 1.3, 0.25];
        let tgt = m.eval_f64(&src);
        let back = m.invert_numeric(&tgt).unwrap();
        for (a, b) in src.iter().zip(&back) {
            assert!((a - b).abs() < 1e-12 * a.abs().max(1.0));
        }
    }
}
