//! Sampling estimate of the dimension of a polynomial cell.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Cell, Relation};
use crate::polyform::CompiledPoly;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProbeConfig {
    pub samples: usize,
    /// Relative singular-value threshold for numerical rank.
    pub theta: f64,
    pub seed: u64,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        ProbeConfig {
            samples: 4096,
            theta: 1e-6,
            seed: 0,
        }
    }
}

const NEWTON_STEPS: usize = 60;

struct Compiled {
    eqs: Vec<CompiledPoly>,
    les: Vec<CompiledPoly>,
}

fn compile(cell: &Cell) -> Compiled {
    let mut eqs = Vec::new();
    let mut les = Vec::new();
    for c in &cell.constraints {
        match c.relation() {
            Relation::Eq => eqs.push(c.poly().compile()),
            Relation::Le => les.push(c.poly().compile()),
        }
    }
    Compiled { eqs, les }
}

fn jacobian(eqs: &[CompiledPoly], x: &[f64]) -> DMatrix<f64> {
    let n = x.len();
    let mut j = DMatrix::zeros(eqs.len(), n);
    for (r, e) in eqs.iter().enumerate() {
        for (c, g) in e.gradient(x).into_iter().enumerate() {
            j[(r, c)] = g;
        }
    }
    j
}

/// Gauss-Newton projection onto the equality set; `None` if it fails to
/// converge.
fn project(eqs: &[CompiledPoly], x: &mut [f64], scale: f64) -> Option<()> {
    if eqs.is_empty() {
        return Some(());
    }
    for _ in 0..NEWTON_STEPS {
        let g: Vec<f64> = eqs.iter().map(|e| e.eval(x)).collect();
        let mag: f64 = eqs.iter().map(|e| e.magnitude(x)).fold(0.0, f64::max);
        if g.iter().all(|v| v.abs() <= 1e-13 * (1.0 + mag)) {
            return Some(());
        }
        let j = jacobian(eqs, x);
        let svd = j.svd(true, true);
        let step = svd.solve(&DVector::from_vec(g), 1e-14).ok()?;
        let norm = step.norm();
        if !norm.is_finite() {
            return None;
        }
        // Damp very long steps so the iterate stays near the box.
        let damp = if norm > scale { scale / norm } else { 1.0 };
        for (xi, s) in x.iter_mut().zip(step.iter()) {
            *xi -= damp * s;
        }
    }
    let g: Vec<f64> = eqs.iter().map(|e| e.eval(x)).collect();
    let mag: f64 = eqs.iter().map(|e| e.magnitude(x)).fold(0.0, f64::max);
    g.iter().all(|v| v.abs() <= 1e-10 * (1.0 + mag)).then_some(())
}

/// Dimension of the tangent space `ker J`, optionally after projecting to
/// the coordinates in `keep`.
fn local_dimension(eqs: &[CompiledPoly], x: &[f64], keep: Option<&[usize]>, theta: f64) -> usize {
    let n = x.len();
    if eqs.is_empty() {
        return keep.map_or(n, <[usize]>::len);
    }
    let j = jacobian(eqs, x);
    let gram = j.transpose() * &j;
    let eig = SymmetricEigen::new(gram);
    let top = eig.eigenvalues.iter().cloned().fold(0.0, f64::max);
    let cut = (theta * theta) * top.max(f64::MIN_POSITIVE);
    let null: Vec<usize> = (0..n).filter(|&k| eig.eigenvalues[k] <= cut).collect();
    match keep {
        None => null.len(),
        Some(keep) => {
            if null.is_empty() {
                return 0;
            }
            let mut t = DMatrix::zeros(keep.len(), null.len());
            for (r, &kc) in keep.iter().enumerate() {
                for (c, &k) in null.iter().enumerate() {
                    t[(r, c)] = eig.eigenvectors[(kc, k)];
                }
            }
            let sv = t.singular_values();
            let top = sv.iter().cloned().fold(0.0, f64::max);
            sv.iter()
                .filter(|&&s| s > theta * top.max(f64::MIN_POSITIVE) && s > 1e-9)
                .count()
        }
    }
}

/// Probe estimate of `dim(cell ∩ box)`, projected to `keep` when given;
/// `-1` when no sample lands in the cell.
pub(crate) fn probe_dimension(
    cell: &Cell,
    bbox: &[(f64, f64)],
    keep: Option<&[usize]>,
    cfg: &ProbeConfig,
    stream: u64,
) -> i64 {
    let c = compile(cell);
    let n = bbox.len();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(stream);
    let diam = bbox
        .iter()
        .map(|(a, b)| (b - a).powi(2))
        .sum::<f64>()
        .sqrt()
        .max(1e-300);
    let mut counts = vec![0usize; n + 1];
    let mut accepted = 0usize;
    let mut x = vec![0.0; n];
    for _ in 0..cfg.samples {
        for (xi, &(lo, hi)) in x.iter_mut().zip(bbox) {
            *xi = if hi > lo { rng.gen_range(lo..=hi) } else { lo };
        }
        if project(&c.eqs, &mut x, diam).is_none() {
            continue;
        }
        let slack = 1e-9 * diam;
        if bbox
            .iter()
            .zip(&x)
            .any(|(&(lo, hi), &v)| v < lo - slack || v > hi + slack)
        {
            continue;
        }
        if c.les.iter().any(|p| p.eval(&x) > 1e-9 * (1.0 + p.magnitude(&x))) {
            continue;
        }
        accepted += 1;
        counts[local_dimension(&c.eqs, &x, keep, cfg.theta)] += 1;
    }
    if accepted == 0 {
        return -1;
    }
    // Highest dimension seen at two or more points (or at the only point).
    let need = if accepted == 1 { 1 } else { 2 };
    let mut acc = 0;
    for d in (0..=n).rev() {
        acc += counts[d];
        if counts[d] > 0 && acc >= need {
            return d as i64;
        }
    }
    0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyform::Variables;
    use crate::region::Constraint;

    fn cell(cs: &[&str], vars: &Variables) -> Cell {
        Cell::new(cs.iter().map(|s| Constraint::parse(s, vars).unwrap()).collect())
    }

    #[test]
    fn circle_is_one_dimensional() {
        let v = Variables::complex(1);
        let c = cell(&["zr1^2 + zi1^2 - 1 = 0"], &v);
        let d = probe_dimension(&c, &[(-2.0, 2.0), (-2.0, 2.0)], None, &ProbeConfig::default(), 0);
        assert_eq!(d, 1);
    }

    #[test]
    fn projection_of_curve() {
        // Helix-like curve in R^3 projected to one coordinate.
        let v = Variables::real(3, 0);
        let c = cell(&["x1^2 + x2^2 = 1", "x3 = x1"], &v);
        let bb = [(-2.0, 2.0); 3];
        assert_eq!(probe_dimension(&c, &bb, None, &ProbeConfig::default(), 0), 1);
        assert_eq!(probe_dimension(&c, &bb, Some(&[2]), &ProbeConfig::default(), 0), 1);
        let c = cell(&["x1^2 + x2^2 = 1", "x3 = 1/2"], &v);
        assert_eq!(probe_dimension(&c, &bb, Some(&[2]), &ProbeConfig::default(), 0), 0);
    }

    #[test]
    fn empty_cell() {
        let v = Variables::real(2, 0);
        let c = cell(&["x1^2 + x2^2 <= 1", "x1 >= 3"], &v);
        assert_eq!(
            probe_dimension(&c, &[(-5.0, 5.0); 2], None, &ProbeConfig::default(), 0),
            -1
        );
    }
}
