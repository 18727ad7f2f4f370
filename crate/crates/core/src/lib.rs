//! Allowability checks, permissible blow-ups and singular quadrature for
//! logarithmic differential forms on semi-algebraic regions.

pub mod blowup;
pub mod complexint;
pub mod error;
pub mod integrate;
pub mod lp;
pub mod polyform;
pub mod region;
pub mod slicing;
pub mod stokes;

pub use error::{Error, Result};
