//! Breakpoints of iterated fiber integrals: where the support of the inner
//! integral can start, stop or change shape along an outer coordinate.

use num_traits::{One, Signed, Zero};

use crate::polyform::{CompiledPoly, Polynomial, Rational};
use crate::region::Relation;

/// Projections larger than this fall back to box-corner substitution.
const PROJECTION_CAP: usize = 400;
const CORNER_CAP: usize = 4;

type Row = (Vec<Rational>, Rational);

fn normalized(mut row: Row) -> Option<Row> {
    let lead = row.0.iter().find(|c| !c.is_zero())?.abs();
    for c in row.0.iter_mut() {
        *c = &*c / &lead;
    }
    row.1 = &row.1 / &lead;
    Some(row)
}

/// Fourier-Motzkin elimination of `var` from `le` rows after using an
/// equality that involves it. `None` past the size cap.
fn eliminate(le: Vec<Row>, eq: Vec<Row>, var: usize) -> Option<(Vec<Row>, Vec<Row>)> {
    let substitute = |rows: Vec<Row>, pivot: &Row| -> Vec<Row> {
        rows.into_iter()
            .map(|(mut c, mut k)| {
                let f = &c[var] / &pivot.0[var];
                for (ci, pi) in c.iter_mut().zip(&pivot.0) {
                    *ci = &*ci - &f * pi;
                }
                k = &k - &f * &pivot.1;
                (c, k)
            })
            .collect()
    };
    if let Some(pos) = eq.iter().position(|r| !r.0[var].is_zero()) {
        let mut eq = eq;
        let pivot = eq.swap_remove(pos);
        return Some((substitute(le, &pivot), substitute(eq, &pivot)));
    }
    let (mut pos, mut neg, mut rest) = (Vec::new(), Vec::new(), Vec::new());
    for r in le {
        if r.0[var].is_positive() {
            pos.push(r);
        } else if r.0[var].is_negative() {
            neg.push(r);
        } else {
            rest.push(r);
        }
    }
    if rest.len() + pos.len() * neg.len() > PROJECTION_CAP {
        return None;
    }
    for p in &pos {
        for q in &neg {
            let (a, b) = (q.0[var].abs(), p.0[var].clone());
            let c: Vec<Rational> = p.0.iter().zip(&q.0).map(|(x, y)| &a * x + &b * y).collect();
            rest.push((c, &a * &p.1 + &b * &q.1));
        }
    }
    let mut out: Vec<Row> = rest.into_iter().filter_map(normalized).collect();
    out.sort();
    out.dedup();
    Some((out, eq))
}

fn rows_to_polys(rows: &[Row], var: usize) -> Vec<Polynomial> {
    rows.iter()
        .filter(|r| !r.0[var].is_zero())
        .map(|(c, k)| Polynomial::from_linear(c, k.clone()))
        .collect()
}

/// Substitute every corner of `bbox` over `vars` into `p`.
fn corner_images(p: &Polynomial, vars: &[usize], bbox: &[(Rational, Rational)]) -> Vec<Polynomial> {
    let vars: Vec<usize> = vars.iter().copied().filter(|&v| p.involves(v)).collect();
    if vars.len() > CORNER_CAP {
        return Vec::new();
    }
    (0..1usize << vars.len())
        .map(|mask| {
            vars.iter().enumerate().fold(p.clone(), |acc, (j, &v)| {
                let x = if mask >> j & 1 == 1 { &bbox[v].1 } else { &bbox[v].0 };
                acc.substitute_value(v, x)
            })
        })
        .collect()
}

/// For each depth `d` of the outer coordinates `order` (the last coordinate
/// `axis` is integrated innermost), polynomials in the first `d + 1` outer
/// coordinates whose roots in `order[d]` are the breakpoints at that depth.
///
/// Linear cells are projected exactly. Other cells contribute their
/// constraints with the deeper coordinates set at box corners.
pub(crate) fn support_breaks(
    cells: &[Vec<(Polynomial, Relation)>],
    bbox: &[(Rational, Rational)],
    order: &[usize],
    axis: usize,
) -> Vec<Vec<CompiledPoly>> {
    let depth = order.len();
    let mut out: Vec<Vec<Polynomial>> = vec![Vec::new(); depth];
    for cell in cells {
        let linear = cell.iter().all(|(p, _)| p.is_linear());
        let mut projected = None;
        if linear {
            let n = bbox.len();
            let mut le: Vec<Row> = Vec::with_capacity(cell.len() + 2 * n);
            let mut eq = Vec::new();
            for (i, (lo, hi)) in bbox.iter().enumerate() {
                let mut c = vec![Rational::zero(); n];
                c[i] = -Rational::one();
                le.push((c.clone(), lo.clone()));
                c[i] = Rational::one();
                le.push((c, -hi));
            }
            for (p, rel) in cell {
                let row = p.linear_parts().expect("linear");
                match rel {
                    Relation::Le => le.push(row),
                    Relation::Eq => eq.push(row),
                }
            }
            let mut state = Some((le, eq));
            let mut levels = vec![Vec::new(); depth];
            let mut current = axis;
            for d in (0..depth).rev() {
                state = state.and_then(|(le, eq)| eliminate(le, eq, current));
                let Some((le, eq)) = &state else { break };
                levels[d] = rows_to_polys(le, order[d]);
                levels[d].extend(rows_to_polys(eq, order[d]));
                current = order[d];
            }
            if state.is_some() {
                projected = Some(levels);
            }
        }
        match projected {
            Some(levels) => {
                for (slot, polys) in out.iter_mut().zip(levels) {
                    slot.extend(polys);
                }
            }
            None => {
                for d in 0..depth {
                    let mut inner: Vec<usize> = order[d + 1..].to_vec();
                    inner.push(axis);
                    for (p, _) in cell {
                        out[d].extend(
                            corner_images(p, &inner, bbox)
                                .into_iter()
                                .filter(|q| q.involves(order[d])),
                        );
                    }
                }
            }
        }
    }
    out.into_iter()
        .map(|mut polys| {
            polys.sort_by_key(|p| format!("{p:?}"));
            polys.dedup();
            polys.iter().map(Polynomial::compile).collect()
        })
        .collect()
}
