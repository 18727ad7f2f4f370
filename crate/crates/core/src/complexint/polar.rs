//! Sectors of the complex plane and the semi-algebraic polar map.
//!
//! Sector `α ∈ {1,2,3,4}` is `i^{α-1}·S₁` with `S₁ = {x ≥ |y|}`. On `S₁`,
//! `r = |z|`, `τ = y/x ∈ [-1, 1]` and `z = r·c·(1 + iτ)` where
//! `c = (1 + τ²)^{-1/2}`.

use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::lp::LpOutcome;
use crate::polyform::{Monomial, Polynomial, Rational};
use crate::region::{cell_lp, BoundingBox, Cell, Constraint, Region, RegionKind, Relation};

/// One sector index per complex coordinate.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SectorAssignment(Vec<u8>);

impl SectorAssignment {
    pub fn new(sectors: Vec<u8>) -> Result<Self> {
        if let Some(&s) = sectors.iter().find(|&&s| !(1..=4).contains(&s)) {
            return Err(Error::Domain(format!("sector index {s} outside 1..4")));
        }
        Ok(SectorAssignment(sectors))
    }

    pub fn sectors(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// All `4^n` assignments in lexicographic order.
    pub fn all(n: usize) -> Vec<SectorAssignment> {
        let mut out = vec![Vec::new()];
        for _ in 0..n {
            out = out
                .into_iter()
                .flat_map(|v: Vec<u8>| {
                    (1..=4u8).map(move |s| {
                        let mut w = v.clone();
                        w.push(s);
                        w
                    })
                })
                .collect();
        }
        out.into_iter().map(SectorAssignment).collect()
    }
}

impl fmt::Display for SectorAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.0.iter().map(|a| format!("S{a}")).collect();
        f.write_str(&s.join("x"))
    }
}

/// Rotate `(x, y)` by `i^k`.
fn rotate(x: f64, y: f64, k: u8) -> (f64, f64) {
    match k % 4 {
        0 => (x, y),
        1 => (-y, x),
        2 => (-x, -y),
        _ => (y, -x),
    }
}

fn check_sector(sector: u8) -> Result<()> {
    if (1..=4).contains(&sector) {
        Ok(())
    } else {
        Err(Error::Domain(format!("sector index {sector} outside 1..4")))
    }
}

/// `(r, τ) ↦ (x, y)` in sector `sector`.
pub fn polar_map(r: f64, tau: f64, sector: u8) -> Result<(f64, f64)> {
    check_sector(sector)?;
    if !(-1.0..=1.0).contains(&tau) {
        return Err(Error::Domain(format!("tau = {tau} outside [-1, 1]")));
    }
    if r < 0.0 {
        return Err(Error::Domain(format!("negative radius {r}")));
    }
    let c = 1.0 / (1.0 + tau * tau).sqrt();
    Ok(rotate(r * c, r * tau * c, sector - 1))
}

/// Inverse of [`polar_map`] away from the origin.
pub fn polar_inverse(x: f64, y: f64, sector: u8) -> Result<(f64, f64)> {
    check_sector(sector)?;
    let r = x.hypot(y);
    if r == 0.0 {
        return Err(Error::Domain("the origin has no polar preimage point".into()));
    }
    let (wx, wy) = rotate(x, y, (4 - (sector - 1)) % 4);
    if wx < wy.abs() - 1e-12 * r {
        return Err(Error::Domain(format!("({x}, {y}) is outside sector {sector}")));
    }
    Ok((r, (wy / wx).clamp(-1.0, 1.0)))
}

/// `(x_k, y_k)` of sector `sector` as polynomials in `(r, τ, c)` variables
/// `r_k = k`, `τ_k = n + k`, `c_k = 2n + k` out of `3n`.
pub(crate) fn sector_images(n: usize, k: usize, sector: u8) -> (Polynomial, Polynomial) {
    let nv = 3 * n;
    let r = Polynomial::var(k, nv);
    let t = Polynomial::var(n + k, nv);
    let c = Polynomial::var(2 * n + k, nv);
    let wx = &r * &c;
    let wy = &wx * &t;
    match (sector - 1) % 4 {
        0 => (wx, wy),
        1 => (-wy, wx),
        2 => (-wx, -wy),
        _ => (wy, -wx),
    }
}

/// Two linear constraints in `(zr_k, zi_k)` cutting out sector `sector`.
pub(crate) fn sector_constraints(n_real: usize, k: usize, sector: u8) -> [Constraint; 2] {
    let x = Polynomial::var(2 * k, n_real);
    let y = Polynomial::var(2 * k + 1, n_real);
    // w = i^{-(α-1)} z must satisfy w_x ≥ |w_y|.
    let (wx, wy) = match (sector - 1) % 4 {
        0 => (x, y),
        1 => (y, -x),
        2 => (-x, -y),
        _ => (-y, x),
    };
    [Constraint::le(&wy - &wx), Constraint::le(&(-&wy) - &wx)]
}

/// `A ∩ (S_{α_1} × … × S_{α_n})` as a complex region.
pub fn sector_piece(a: &Region, sectors: &SectorAssignment) -> Result<Region> {
    let n = a.n() / 2;
    if a.kind() != RegionKind::Complex || sectors.len() != n {
        return Err(Error::Precondition(
            "sector pieces need a complex region and one sector per coordinate".into(),
        ));
    }
    let extra: Vec<Constraint> = (0..n)
        .flat_map(|k| sector_constraints(a.n(), k, sectors.0[k]))
        .collect();
    Ok(a.restrict(&extra))
}

fn one_plus_square(var: usize, nv: usize) -> Polynomial {
    let t = Polynomial::var(var, nv);
    &Polynomial::one(nv) + &(&t * &t)
}

/// Divide out every factor `1 + x_var²`.
fn strip_one_plus_square(p: &Polynomial, var: usize) -> Polynomial {
    let mut cur = p.clone();
    loop {
        if cur.is_zero() || cur.degree_in(var) < 2 {
            return cur;
        }
        // Synthetic division by x² + 1 on the coefficients in `var`.
        let coeffs = cur.coefficients_in(var);
        let d = coeffs.len() - 1;
        let mut rem = coeffs.clone();
        let mut quot = vec![Polynomial::zero(cur.nvars()); d - 1];
        for e in (2..=d).rev() {
            let q = rem[e].clone();
            rem[e - 2] = &rem[e - 2] - &q;
            rem[e] = Polynomial::zero(cur.nvars());
            quot[e - 2] = q;
        }
        if !(rem[0].is_zero() && rem[1].is_zero()) {
            return cur;
        }
        let x = Polynomial::var(var, cur.nvars());
        let mut acc = Polynomial::zero(cur.nvars());
        for q in quot.iter().rev() {
            acc = &(&acc * &x) + q;
        }
        cur = acc;
    }
}

fn rational_sqrt(q: &Rational) -> Option<Rational> {
    if q.is_negative() {
        return None;
    }
    let (n, d) = (q.numer().sqrt(), q.denom().sqrt());
    let s = Rational::new(n, d);
    (&s * &s == *q).then_some(s)
}

/// `A·X² − B·Y²` with `X, Y` nonnegative coordinates or `1` becomes
/// `√A·X − √B·Y` when the square roots are rational.
fn linearize_squares(p: &Polynomial, nonneg: &[usize]) -> Polynomial {
    let nv = p.nvars();
    if p.num_terms() != 2 {
        return p.clone();
    }
    let mut parts = Vec::new();
    for (m, c) in p.terms() {
        let e = m.exponents();
        let support: Vec<usize> = (0..nv).filter(|&i| e[i] > 0).collect();
        let base = match support.as_slice() {
            [] => Polynomial::one(nv),
            [i] if e[*i] == 2 && nonneg.contains(i) => Polynomial::var(*i, nv),
            _ => return p.clone(),
        };
        parts.push((c.clone(), base));
    }
    let (c0, b0) = &parts[0];
    let (c1, b1) = &parts[1];
    if c0.is_positive() == c1.is_positive() {
        return p.clone();
    }
    match (rational_sqrt(&c0.abs()), rational_sqrt(&c1.abs())) {
        (Some(s0), Some(s1)) => {
            let s0 = if c0.is_negative() { -s0 } else { s0 };
            let s1 = if c1.is_negative() { -s1 } else { s1 };
            &b0.scale(&s0) + &b1.scale(&s1)
        }
        _ => p.clone(),
    }
}

/// Alternatives (disjunction of conjunctions) equivalent to one constraint
/// after the polar substitution, for `r ≥ 0` and `τ ∈ [-1, 1]`.
fn polar_constraint(
    c: &Constraint,
    n: usize,
    sectors: &SectorAssignment,
    bounds: &[(Rational, Rational)],
) -> Result<Vec<Vec<Constraint>>> {
    let nv = 2 * n;
    let images: Vec<Polynomial> = (0..n)
        .flat_map(|k| {
            let (x, y) = sector_images(n, k, sectors.0[k]);
            [x, y]
        })
        .collect();
    let h = c.poly().compose(&images)?;
    let degs: Vec<u32> = (0..n).map(|k| h.degree_in(2 * n + k)).collect();
    let mut even = Polynomial::zero(nv);
    let mut odd = Polynomial::zero(nv);
    let mut odd_var: Option<usize> = None;
    for (m, coeff) in h.terms() {
        let e = m.exponents();
        let mut exps = e[..nv].to_vec();
        let mut factor = Polynomial::one(nv);
        let mut this_odd = None;
        for k in 0..n {
            let d = degs[k] - e[2 * n + k];
            factor = &factor * &one_plus_square(n + k, nv).pow(d / 2);
            if d % 2 == 1 {
                if this_odd.is_some() {
                    return Err(Error::Unsupported(
                        "constraint mixing odd and even degrees in several coordinates".into(),
                    ));
                }
                this_odd = Some(k);
            }
        }
        let term = &Polynomial::monomial(coeff.clone(), Monomial::new(std::mem::take(&mut exps))) * &factor;
        match this_odd {
            None => even = &even + &term,
            Some(k) => {
                if odd_var.is_some_and(|j| j != k) {
                    return Err(Error::Unsupported(
                        "constraint mixing odd and even degrees in several coordinates".into(),
                    ));
                }
                odd_var = Some(k);
                odd = &odd + &term;
            }
        }
    }
    let tidy = |p: Polynomial| -> Polynomial {
        let mut p = p;
        for k in 0..n {
            p = strip_one_plus_square(&p, n + k);
        }
        linearize_squares(&p, &(0..n).collect::<Vec<_>>())
    };
    let le = |p: Polynomial| Constraint::le(p);
    let alternatives = match odd_var {
        None => vec![vec![c.with_poly(even)]],
        Some(k) => {
            // even + σ·odd with σ = (1 + τ_k²)^{1/2}.
            let sq = &(&even * &even) - &(&one_plus_square(n + k, nv) * &(&odd * &odd));
            let (se, so) = (sign_on_box(&even, bounds), sign_on_box(&odd, bounds));
            match (c.relation(), se, so) {
                (Relation::Le, Some(Sign::NonPos), Some(Sign::NonPos)) => vec![vec![]],
                (Relation::Le, _, Some(Sign::NonNeg)) => vec![vec![le(even.clone()), le(-&sq)]],
                (Relation::Le, Some(Sign::NonNeg), _) => vec![vec![le(odd.clone()), le(sq)]],
                (Relation::Le, _, Some(Sign::NonPos)) => vec![vec![le(even.clone())], vec![le(-&even), le(sq)]],
                (Relation::Le, Some(Sign::NonPos), None) => vec![vec![le(odd.clone())], vec![le(-&odd), le(-&sq)]],
                (Relation::Le, None, None) => vec![
                    vec![le(even.clone()), le(odd.clone())],
                    vec![le(even.clone()), le(-&odd), le(-&sq)],
                    vec![le(-&even), le(odd.clone()), le(sq)],
                ],
                (Relation::Eq, _, _) => vec![vec![Constraint::eq(sq), le(&even * &odd)]],
            }
        }
    };
    let mut out = Vec::new();
    for alt in alternatives {
        out.extend(split_radial_content(alt, n));
    }
    Ok(out
        .into_iter()
        .filter_map(|cs| {
            simplify_cell(
                cs.into_iter().map(|k| k.map_poly(|p| tidy(p.clone()))).collect(),
                bounds,
            )
        })
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Sign {
    NonNeg,
    NonPos,
}

fn mul_iv(a: &(Rational, Rational), b: &(Rational, Rational)) -> (Rational, Rational) {
    let p = [&a.0 * &b.0, &a.0 * &b.1, &a.1 * &b.0, &a.1 * &b.1];
    let lo = p.iter().min().expect("four products").clone();
    let hi = p.iter().max().expect("four products").clone();
    (lo, hi)
}

fn pow_iv(a: &(Rational, Rational), e: u32) -> (Rational, Rational) {
    let mut acc = (Rational::one(), Rational::one());
    for _ in 0..e {
        acc = mul_iv(&acc, a);
    }
    if e.is_multiple_of(2) && a.0.is_negative() && a.1.is_positive() {
        acc.0 = Rational::zero();
    }
    acc
}

/// Exact interval enclosure of `p` over a box.
fn enclose(p: &Polynomial, bounds: &[(Rational, Rational)]) -> (Rational, Rational) {
    let mut total = (Rational::zero(), Rational::zero());
    for (m, c) in p.terms() {
        let mut iv = (c.clone(), c.clone());
        for (i, &e) in m.exponents().iter().enumerate() {
            if e > 0 {
                iv = mul_iv(&iv, &pow_iv(&bounds[i], e));
            }
        }
        total = (&total.0 + &iv.0, &total.1 + &iv.1);
    }
    total
}

fn sign_on_box(p: &Polynomial, bounds: &[(Rational, Rational)]) -> Option<Sign> {
    let (lo, hi) = enclose(p, bounds);
    if !hi.is_positive() {
        Some(Sign::NonPos)
    } else if !lo.is_negative() {
        Some(Sign::NonNeg)
    } else {
        None
    }
}

/// Drop constraints that hold on the whole box; `None` when one fails on it.
fn simplify_cell(cell: Vec<Constraint>, bounds: &[(Rational, Rational)]) -> Option<Vec<Constraint>> {
    let mut out: Vec<Constraint> = Vec::new();
    for c in cell {
        let (lo, hi) = enclose(c.poly(), bounds);
        match c.relation() {
            Relation::Le if !hi.is_positive() => continue,
            Relation::Le if lo.is_positive() => return None,
            Relation::Eq if lo.is_positive() || hi.is_negative() => return None,
            _ => {}
        }
        if !out.contains(&c) {
            out.push(c);
        }
    }
    Some(out)
}

/// `r^e·g ⋈ 0` with `r ≥ 0` holds iff `r = 0` or `g ⋈ 0`.
fn split_radial_content(cell: Vec<Constraint>, n: usize) -> Vec<Vec<Constraint>> {
    let nv = 2 * n;
    let mut out: Vec<Vec<Constraint>> = vec![Vec::new()];
    for c in cell {
        let content = c.poly().monomial_content(&(0..n).collect::<Vec<_>>());
        if content.is_one() || c.poly().is_zero() {
            for alt in &mut out {
                alt.push(c.clone());
            }
            continue;
        }
        let rest = c.with_poly(c.poly().div_monomial(&content).expect("content divides"));
        let zeros: Vec<usize> = (0..n).filter(|&i| content.exponents()[i] > 0).collect();
        let mut next = Vec::new();
        for alt in &out {
            let mut a = alt.clone();
            a.push(rest.clone());
            next.push(a);
            for &i in &zeros {
                let mut a = alt.clone();
                a.push(Constraint::eq(Polynomial::var(i, nv)));
                next.push(a);
            }
        }
        out = next;
    }
    out
}

/// Largest modulus bound `|x| + |y|` of coordinate `k` over a box.
fn radius_bound(b: &BoundingBox, k: usize) -> Rational {
    let m = |(lo, hi): &(Rational, Rational)| if lo.abs() > hi.abs() { lo.abs() } else { hi.abs() };
    let r = m(&b.0[2 * k]) + m(&b.0[2 * k + 1]);
    if r.is_zero() {
        Rational::one()
    } else {
        r
    }
}

/// `π⁻¹(A)` for one sector assignment: a real region in `(r_1..r_n, τ_1..τ_n)`
/// with the `r` as divisor coordinates.
pub fn polar_preimage(a: &Region, sectors: &SectorAssignment) -> Result<Region> {
    let n = a.n() / 2;
    if a.kind() != RegionKind::Complex || sectors.len() != n {
        return Err(Error::Precondition(
            "polar preimage needs a complex region and one sector per coordinate".into(),
        ));
    }
    let bbox = a.effective_box()?;
    let mut rows: Vec<(Rational, Rational)> = (0..n).map(|k| (Rational::zero(), radius_bound(&bbox, k))).collect();
    rows.extend((0..n).map(|_| (-Rational::one(), Rational::one())));
    let rbox = BoundingBox(rows);
    let mut cells = polar_cells(a.cells(), n, sectors, &rbox)?;
    if let Some(declared) = a.bbox() {
        // Box faces of a coordinate are dropped when every cell already lies
        // in the largest disk the box contains.
        let keep_faces: Vec<usize> = (0..n).filter(|&k| !disk_fits(&cells, &rbox, declared, k)).collect();
        if !keep_faces.is_empty() {
            let faces: Vec<Constraint> = declared
                .constraints()
                .into_iter()
                .enumerate()
                .filter(|(j, _)| keep_faces.contains(&(j / 4)))
                .map(|(_, c)| c)
                .collect();
            let boxed: Vec<Cell> = a.cells().iter().map(|c| c.with(faces.iter().cloned())).collect();
            cells = polar_cells(&boxed, n, sectors, &rbox)?;
        }
    }
    Region::real(2 * n, n, cells, Some(rbox))
}

fn polar_cells(source: &[Cell], n: usize, sectors: &SectorAssignment, rbox: &BoundingBox) -> Result<Vec<Cell>> {
    let mut cells = Vec::new();
    for cell in source {
        let mut alts: Vec<Vec<Constraint>> = vec![Vec::new()];
        for c in &cell.constraints {
            let options = polar_constraint(c, n, sectors, &rbox.0)?;
            alts = alts
                .iter()
                .flat_map(|prefix| {
                    options.iter().map(move |o| {
                        let mut v = prefix.clone();
                        v.extend(o.iter().filter(|k| !prefix.contains(k)).cloned());
                        v
                    })
                })
                .collect();
        }
        for cs in alts {
            let cell = Cell::new(cs);
            if !cells.contains(&cell) {
                cells.push(cell);
            }
        }
    }
    Ok(cells)
}

/// Whether `r_k` stays within the inscribed disk of the declared box on
/// every polar cell, bounding `r_k` through the linear constraints only.
fn disk_fits(cells: &[Cell], rbox: &BoundingBox, declared: &BoundingBox, k: usize) -> bool {
    let (xl, xh) = &declared.0[2 * k];
    let (yl, yh) = &declared.0[2 * k + 1];
    let inner = [-xl.clone(), xh.clone(), -yl.clone(), yh.clone()]
        .into_iter()
        .min()
        .expect("four bounds");
    if inner.is_negative() {
        return false;
    }
    let nv = rbox.dim();
    let mut objective = vec![Rational::zero(); nv];
    objective[k] = Rational::one();
    cells.iter().all(|cell| {
        let linear = Cell::new(cell.constraints.iter().filter(|c| c.is_linear()).cloned().collect());
        let full = linear.with(rbox.constraints());
        match cell_lp(&full, nv).maximize(&objective) {
            LpOutcome::Optimal { value, .. } => value <= inner,
            LpOutcome::Infeasible => true,
            LpOutcome::Unbounded => false,
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyform::{rat, rat_int, Variables};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn polar_examples() {
        assert_eq!(polar_map(1.0, 0.0, 1).unwrap(), (1.0, 0.0));
        let (x, y) = polar_map(1.0, 1.0, 1).unwrap();
        assert!((x - 0.5f64.sqrt()).abs() < 1e-15 && (y - 0.5f64.sqrt()).abs() < 1e-15);
        assert_eq!(polar_map(0.0, 0.3, 3).unwrap(), (-0.0, -0.0));
        assert!(polar_map(1.0, 1.5, 1).is_err());
        let (r, t) = polar_inverse(0.5f64.sqrt(), 0.5f64.sqrt(), 1).unwrap();
        assert!((r - 1.0).abs() < 1e-15 && (t - 1.0).abs() < 1e-15);
        assert_eq!(polar_inverse(0.0, 1.0, 2).unwrap(), (1.0, 0.0));
        assert!(polar_inverse(0.0, 0.0, 1).is_err());
        assert!(polar_inverse(-1.0, 0.0, 1).is_err());
    }

    #[test]
    fn round_trip_every_sector() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for s in 1..=4u8 {
            for _ in 0..1000 {
                let r = rng.gen_range(1e-3..10.0);
                let t = rng.gen_range(-1.0..=1.0);
                let (x, y) = polar_map(r, t, s).unwrap();
                let (r2, t2) = polar_inverse(x, y, s).unwrap();
                assert!((r2 - r).abs() <= 1e-14 * r && (t2 - t).abs() <= 1e-14, "{s} {r} {t}");
            }
        }
    }

    #[test]
    fn jacobian_is_r_over_one_plus_tau_squared() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let h = 1e-6;
        for _ in 0..100 {
            let s = rng.gen_range(1..=4u8);
            let r = rng.gen_range(0.1..2.0);
            let t = rng.gen_range(-0.99..0.99);
            let f = |r: f64, t: f64| polar_map(r, t, s).unwrap();
            let (a, b) = (f(r + h, t), f(r - h, t));
            let (c, d) = (f(r, t + h), f(r, t - h));
            let j = ((a.0 - b.0) * (c.1 - d.1) - (a.1 - b.1) * (c.0 - d.0)) / (4.0 * h * h);
            let want = r / (1.0 + t * t);
            assert!((j - want).abs() <= 1e-6 * want, "{j} {want}");
        }
    }

    #[test]
    fn images_match_numeric_map() {
        for s in 1..=4u8 {
            let (x, y) = sector_images(1, 0, s);
            let (r, t): (f64, f64) = (0.7, -0.4);
            let c = 1.0 / (1.0 + t * t).sqrt();
            let (xn, yn) = polar_map(r, t, s).unwrap();
            assert!((x.eval_f64(&[r, t, c]).unwrap() - xn).abs() < 1e-15);
            assert!((y.eval_f64(&[r, t, c]).unwrap() - yn).abs() < 1e-15);
        }
    }

    #[test]
    fn moduli_become_linear() {
        let a = Region::complex_from_strings(
            2,
            2,
            &[&["zr2^2 + zi2^2 <= zr1^2 + zi1^2", "zr1^2 + zi1^2 <= 1"]],
            Some(BoundingBox(vec![(rat_int(-1), rat_int(1)); 4])),
        )
        .unwrap();
        let pre = polar_preimage(&a, &SectorAssignment::new(vec![1, 3]).unwrap()).unwrap();
        assert_eq!(pre.cells().len(), 1);
        assert!(pre.is_linear());
        let vars = Variables::real(4, 2);
        let shown: Vec<String> = pre.cells()[0].constraints.iter().map(|c| c.format(&vars)).collect();
        assert_eq!(shown, vec!["-r1 + r2 <= 0", "r1 - 1 <= 0"]);
    }

    #[test]
    fn half_planes_and_shifted_lines() {
        let b = Some(BoundingBox(vec![(rat_int(-1), rat_int(1)); 2]));
        let a = Region::complex_from_strings(1, 1, &[&["zi1 >= 0", "zr1 <= 1/2"]], b).unwrap();
        let pre = polar_preimage(&a, &SectorAssignment::new(vec![1]).unwrap()).unwrap();
        assert!(pre.cells().len() < 40);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..2000 {
            let r: f64 = rng.gen_range(0.0..2.0);
            let t: f64 = rng.gen_range(-1.0..1.0);
            let (x, y) = polar_map(r, t, 1).unwrap();
            let inside = y >= 0.0 && x <= 0.5 && x.abs() <= 1.0 && y.abs() <= 1.0;
            let margin = (y.abs())
                .min((x - 0.5).abs())
                .min((1.0 - x.abs()).abs())
                .min((1.0 - y.abs()).abs());
            if margin > 1e-9 && r < 2.0 {
                assert_eq!(pre.contains_f64(&[r, t], 0.0), inside, "r={r} t={t}");
            }
        }
        assert_eq!(rational_sqrt(&rat(9, 4)), Some(rat(3, 2)));
        assert_eq!(rational_sqrt(&rat(2, 1)), None);
    }
}
