//! Expression parser for polynomials.
//!
//! Grammar:
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := factor ('*' factor)*
//! factor := ('-')? base ('^' nat)?
//! base   := var | rational | '(' expr ')'
//! ```
//! Rational literals are integers, `a/b`, or decimals such as `0.25`.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::Zero;

use super::poly::{Polynomial, Rational};
use crate::error::{Error, Result};

/// Ordered variable names of an ambient space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Variables {
    names: Vec<String>,
    index: HashMap<String, usize>,
}

impl Variables {
    pub fn new(names: Vec<String>) -> Self {
        let index = names.iter().enumerate().map(|(i, n)| (n.clone(), i)).collect();
        Variables { names, index }
    }

    /// `r1..rp` followed by `x{p+1}..xn`.
    pub fn real(n: usize, p: usize) -> Self {
        let names = (1..=n)
            .map(|i| if i <= p { format!("r{i}") } else { format!("x{i}") })
            .collect();
        Self::new(names)
    }

    /// `zr1, zi1, zr2, zi2, ...` for `k` complex coordinates.
    pub fn complex(k: usize) -> Self {
        let names = (1..=k).flat_map(|i| [format!("zr{i}"), format!("zi{i}")]).collect();
        Self::new(names)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }
}

pub fn parse_poly(text: &str, vars: &Variables) -> Result<Polynomial> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
        vars,
    };
    let out = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(out)
}

/// Parse a rational literal such as `3`, `-1/2` or `0.125`.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let t = text.trim();
    let (neg, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t),
    };
    let mut p = Parser {
        src: body.as_bytes(),
        pos: 0,
        vars: &Variables::new(Vec::new()),
    };
    let v = p.number()?;
    if p.pos != body.len() {
        return Err(p.error("malformed rational"));
    }
    Ok(if neg { -v } else { v })
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    vars: &'a Variables,
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> Error {
        Error::Syntax {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<Polynomial> {
        let n = self.vars.len();
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = &acc + &self.term()?;
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = &acc - &self.term()?;
                }
                _ => break,
            }
        }
        debug_assert_eq!(acc.nvars(), n);
        Ok(acc)
    }

    fn term(&mut self) -> Result<Polynomial> {
        let mut acc = self.factor()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            acc = &acc * &self.factor()?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Polynomial> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            return Ok(-&self.factor()?);
        }
        let base = self.base()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            if self.peek() == Some(b'-') {
                return Err(Error::NegativeExponent(self.pos));
            }
            let start = self.pos;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            if start == self.pos {
                return Err(self.error("expected exponent"));
            }
            let e: u32 = std::str::from_utf8(&self.src[start..self.pos])
                .expect("ascii digits")
                .parse()
                .map_err(|_| self.error("exponent too large"))?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn base(&mut self) -> Result<Polynomial> {
        let n = self.vars.len();
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.error("expected ')'"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => Ok(Polynomial::constant(self.number()?, n)),
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
                match self.vars.index_of(name) {
                    Some(i) => Ok(Polynomial::var(i, n)),
                    None => Err(Error::UnknownVariable(name.to_string())),
                }
            }
            Some(_) => Err(self.error("unexpected character")),
            None => Err(self.error("unexpected end of input")),
        }
    }

    fn digits(&mut self) -> Option<BigInt> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return None;
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        s.parse().ok()
    }

    fn number(&mut self) -> Result<Rational> {
        self.skip_ws();
        let int = self.digits().unwrap_or_else(BigInt::zero);
        if self.pos < self.src.len() && self.src[self.pos] == b'.' {
            self.pos += 1;
            let start = self.pos;
            let frac = self.digits().unwrap_or_else(BigInt::zero);
            let scale = BigInt::from(10u32).pow((self.pos - start) as u32);
            return Ok(Rational::from_integer(int) + Rational::new(frac, scale));
        }
        // `a/b` binds only when a digit follows the slash.
        if self.pos + 1 < self.src.len() && self.src[self.pos] == b'/' && self.src[self.pos + 1].is_ascii_digit() {
            self.pos += 1;
            let den = self.digits().expect("digit checked");
            if den.is_zero() {
                return Err(self.error("zero denominator"));
            }
            return Ok(Rational::new(int, den));
        }
        Ok(Rational::from_integer(int))
    }
}

/// Render a polynomial in the grammar accepted by [`parse_poly`].
pub fn format_poly(p: &Polynomial, vars: &Variables) -> String {
    p.fmt_with(vars.names())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyform::poly::{rat, rat_int, Monomial};

    fn rv() -> Variables {
        Variables::real(2, 2)
    }

    #[test]
    fn parses_sum() {
        let p = parse_poly("r1 + r2", &rv()).unwrap();
        assert_eq!(p.coefficient(&Monomial::new(vec![1, 0])), rat_int(1));
        assert_eq!(p.coefficient(&Monomial::new(vec![0, 1])), rat_int(1));
        assert_eq!(p.num_terms(), 2);
    }

    #[test]
    fn zero_product_is_empty() {
        let p = parse_poly("0*r1", &rv()).unwrap();
        assert!(p.is_zero());
    }

    #[test]
    fn expands_square() {
        let p = parse_poly("(r1 - 1)^2", &rv()).unwrap();
        assert_eq!(p.coefficient(&Monomial::new(vec![2, 0])), rat_int(1));
        assert_eq!(p.coefficient(&Monomial::new(vec![1, 0])), rat_int(-2));
        assert_eq!(p.coefficient(&Monomial::new(vec![0, 0])), rat_int(1));
        assert_eq!(p.num_terms(), 3);
    }

    #[test]
    fn rational_literals() {
        let p = parse_poly("1/2*r1 - 0.25", &rv()).unwrap();
        assert_eq!(p.coefficient(&Monomial::new(vec![1, 0])), rat(1, 2));
        assert_eq!(p.constant_term(), rat(-1, 4));
        assert_eq!(parse_rational("-3/4").unwrap(), rat(-3, 4));
    }

    #[test]
    fn errors() {
        assert!(matches!(parse_poly("r1 + y", &rv()), Err(Error::UnknownVariable(_))));
        assert!(matches!(parse_poly("r1^-2", &rv()), Err(Error::NegativeExponent(_))));
        match parse_poly("r1 + * r2", &rv()) {
            Err(Error::Syntax { pos, .. }) => assert_eq!(pos, 5),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse_poly("(r1", &rv()), Err(Error::Syntax { .. })));
    }

    #[test]
    fn complex_variables() {
        let v = Variables::complex(2);
        let p = parse_poly("zr1^2 + zi1^2 - zr2", &v).unwrap();
        assert_eq!(p.nvars(), 4);
        assert_eq!(p.num_terms(), 3);
    }

    #[test]
    fn format_round_trips() {
        let v = Variables::real(3, 1);
        let p = parse_poly("(r1 - x2)^3 + 1/3*x3 - 7", &v).unwrap();
        let q = parse_poly(&format_poly(&p, &v), &v).unwrap();
        assert_eq!(p, q);
    }
}
