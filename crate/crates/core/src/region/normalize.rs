//! Sound rewrites of a cell into simpler cells with the same union.

use num_traits::{Signed, Zero};

use super::{Cell, Constraint, Relation};
use crate::polyform::Polynomial;

const MAX_ROUNDS: usize = 200;

/// Rewrite a cell into a list of cells whose union is the original set.
/// An empty result means the cell was proved empty.
///
/// Rules: constant constraints are decided; `g ≤ 0 ∧ -g ≤ 0` becomes
/// `g = 0`; equalities fixing one variable are substituted; sums of even
/// powers with positive coefficients force their variables to zero; an
/// equality `m·g = 0` with a monomial factor `m` splits into cases.
pub fn normalize_cell(cell: &Cell) -> Vec<Cell> {
    let mut out = Vec::new();
    let mut work = vec![cell.constraints.clone()];
    let mut budget = 4096;
    while let Some(cs) = work.pop() {
        budget -= 1;
        if budget == 0 {
            // Give up splitting; keep the remaining branches as they are.
            out.push(Cell::new(cs));
            out.extend(work.drain(..).map(Cell::new));
            break;
        }
        match simplify(cs) {
            Step::Empty => {}
            Step::Done(cs) => out.push(Cell::new(cs)),
            Step::Split(branches) => work.extend(branches.into_iter().rev()),
        }
    }
    out
}

enum Step {
    Empty,
    Done(Vec<Constraint>),
    Split(Vec<Vec<Constraint>>),
}

fn canonical(c: &Constraint) -> Constraint {
    match c.relation() {
        Relation::Le => c.map_poly(Polynomial::normalize_positive),
        Relation::Eq => c.map_poly(Polynomial::normalize_monic),
    }
}

fn simplify(mut cs: Vec<Constraint>) -> Step {
    for _ in 0..MAX_ROUNDS {
        let mut changed = false;

        // Decide constants, canonicalize, deduplicate.
        let mut next: Vec<Constraint> = Vec::with_capacity(cs.len());
        for c in &cs {
            if c.poly().is_constant() {
                let v = c.poly().constant_term();
                let ok = match c.relation() {
                    Relation::Le => !v.is_positive(),
                    Relation::Eq => v.is_zero(),
                };
                if !ok {
                    return Step::Empty;
                }
                changed = true;
                continue;
            }
            let k = canonical(c);
            if !next.contains(&k) {
                next.push(k);
            } else {
                changed = true;
            }
        }
        cs = next;

        // Sums of even powers.
        for i in 0..cs.len() {
            if let Some(outcome) = even_power_rule(&cs[i]) {
                match outcome {
                    EvenPower::Infeasible => return Step::Empty,
                    EvenPower::Zeros(vars) => {
                        let n = cs[i].poly().nvars();
                        cs.remove(i);
                        cs.extend(vars.into_iter().map(|v| Constraint::eq(Polynomial::var(v, n))));
                        changed = true;
                        break;
                    }
                }
            }
        }
        if changed {
            continue;
        }

        // Pinched inequalities.
        'pinch: for i in 0..cs.len() {
            if cs[i].relation() != Relation::Le {
                continue;
            }
            let neg = -cs[i].poly();
            for j in 0..cs.len() {
                if j != i
                    && cs[j].relation() == Relation::Le
                    && cs[j].poly().normalize_positive() == neg.normalize_positive()
                {
                    let eq = Constraint::eq(cs[i].poly().clone());
                    let (a, b) = (i.max(j), i.min(j));
                    cs.remove(a);
                    cs.remove(b);
                    cs.push(canonical(&eq));
                    changed = true;
                    break 'pinch;
                }
            }
        }
        if changed {
            continue;
        }

        // Substitute equalities that fix a single variable.
        for i in 0..cs.len() {
            let c = &cs[i];
            if c.relation() != Relation::Eq || !c.is_linear() {
                continue;
            }
            let support = c.poly().support();
            if support.len() != 1 {
                continue;
            }
            let v = support[0];
            let (coeffs, c0) = c.poly().linear_parts().expect("linear");
            let value = -c0 / &coeffs[v];
            let mut touched = false;
            for (j, other) in cs.iter_mut().enumerate() {
                if j != i && other.poly().involves(v) {
                    *other = other.map_poly(|p| p.substitute_value(v, &value));
                    touched = true;
                }
            }
            if touched {
                changed = true;
                break;
            }
        }
        if changed {
            continue;
        }

        // Monomial factors in equalities.
        for i in 0..cs.len() {
            let c = &cs[i];
            if c.relation() != Relation::Eq {
                continue;
            }
            let p = c.poly();
            let all: Vec<usize> = (0..p.nvars()).collect();
            let content = p.monomial_content(&all);
            if content.is_one() {
                continue;
            }
            let n = p.nvars();
            let cofactor = p.div_monomial(&content).expect("content divides");
            let rest: Vec<Constraint> = cs
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, c)| c.clone())
                .collect();
            // `r = 0` on its own is already in normal form.
            if cofactor.is_constant() && content.total_degree() == 1 {
                continue;
            }
            let mut branches = Vec::new();
            for (v, &e) in content.exponents().iter().enumerate() {
                if e > 0 {
                    let mut b = rest.clone();
                    b.push(Constraint::eq(Polynomial::var(v, n)));
                    branches.push(b);
                }
            }
            if !cofactor.is_constant() {
                let mut b = rest.clone();
                b.push(Constraint::eq(cofactor));
                branches.push(b);
            }
            return Step::Split(branches);
        }

        return Step::Done(cs);
    }
    Step::Done(cs)
}

enum EvenPower {
    Infeasible,
    Zeros(Vec<usize>),
}

/// `Σ c_m x^m (+ c0)` with all `c_m` of one sign and all exponents even.
fn even_power_rule(c: &Constraint) -> Option<EvenPower> {
    let p = c.poly();
    let c0 = p.constant_term();
    let mut sign = 0i32;
    for (m, k) in p.terms() {
        if m.is_one() {
            continue;
        }
        if m.exponents().iter().any(|e| e % 2 != 0) {
            return None;
        }
        let s = if k.is_positive() { 1 } else { -1 };
        if sign == 0 {
            sign = s;
        } else if sign != s {
            return None;
        }
    }
    if sign == 0 {
        return None;
    }
    let c0s = if c0.is_zero() {
        0
    } else if c0.is_positive() {
        1
    } else {
        -1
    };
    let vars = p.support();
    match c.relation() {
        // Σ (positive even) + c0 ≤ 0
        Relation::Le if sign > 0 => match c0s {
            1 => Some(EvenPower::Infeasible),
            0 => Some(EvenPower::Zeros(vars)),
            _ => None,
        },
        Relation::Le => None,
        Relation::Eq => {
            if c0s == 0 {
                Some(EvenPower::Zeros(vars))
            } else if c0s == sign {
                Some(EvenPower::Infeasible)
            } else {
                None
            }
        }
    }
}
