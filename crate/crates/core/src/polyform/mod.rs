//! Exact polynomials, logarithmic forms and monomial maps.

mod form;
mod map;
mod parse;
mod poly;

pub use form::{newton_exponents, parse_log_form, sort_sign, split_form_terms, LogForm, NewtonData, RawTerm};
pub use map::{Coordinate, MonomialMap};
pub use parse::{format_poly, parse_poly, parse_rational, Variables};
pub use poly::{rat, rat_from_f64, rat_int, rat_to_f64, CompiledPoly, Monomial, Polynomial, Rational};
