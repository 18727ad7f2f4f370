use crate::error::Result;
use crate::polyform::LogForm;

use super::{parse_smooth_form, SimplexMap};

/// A polynomial map on a simplex and a smooth form on its target.
#[derive(Clone, Debug)]
pub struct StokesCase {
    pub name: &'static str,
    pub map: SimplexMap,
    pub form: LogForm,
}

const CASES: [(&str, usize, &[&str], &str); 10] = [
    ("identity-area", 2, &["x1", "x2"], "x1*dx2"),
    ("identity-closed", 2, &["x1", "x2"], "dx2"),
    ("square-first", 2, &["x1^2", "x2"], "x1*dx2"),
    ("mixed-plane", 2, &["x1 + x2^2", "x2 + x1*x2"], "x2*dx1 - x1^2*dx2"),
    ("interval", 1, &["x1^2 + 2*x1"], "x1^2 + x1"),
    ("identity-volume", 3, &["x1", "x2", "x3"], "x1*dx2^dx3"),
    (
        "cubic-space",
        3,
        &["x1*x2", "x2 + x3^2", "x3"],
        "x1*x3*dx1^dx2 + x2*dx2^dx3",
    ),
    ("graph-surface", 2, &["x1", "x2", "x1*x2"], "x3*dx1 - x1*dx3"),
    (
        "graph-solid",
        3,
        &["x1", "x2", "x3", "x1^2*x2"],
        "x4*dx1^dx2 + x1^3*dx2^dx3",
    ),
    ("identity-four", 4, &["x1", "x2", "x3", "x4"], "x1*dx2^dx3^dx4"),
];

/// Ten `(h, ψ)` pairs of polynomial degree at most three.
pub fn stokes_corpus() -> Result<Vec<StokesCase>> {
    CASES
        .iter()
        .map(|(name, m, comps, form)| {
            let map = SimplexMap::parse(*m, comps)?;
            let form = parse_smooth_form(form, map.target_dim())?;
            Ok(StokesCase { name, map, form })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrate::QuadConfig;
    use crate::stokes::check_stokes;

    #[test]
    fn corpus_residuals() {
        let cfg = QuadConfig::default();
        for case in stokes_corpus().unwrap() {
            let rep = check_stokes(&case.map, &case.form, &cfg).unwrap();
            assert!(rep.residual < 1e-6, "{}: {rep}", case.name);
        }
        let cases = stokes_corpus().unwrap();
        let known = [
            ("identity-area", 0.5),
            ("mixed-plane", -1.0),
            ("interval", 12.0),
            ("identity-volume", 1.0 / 6.0),
            ("identity-four", 1.0 / 24.0),
        ];
        for (name, want) in known {
            let c = cases.iter().find(|c| c.name == name).unwrap();
            let rep = check_stokes(&c.map, &c.form, &cfg).unwrap();
            assert!((rep.rhs - want).abs() < 1e-9, "{name}: {rep}");
        }
    }
}
