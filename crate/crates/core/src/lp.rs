//! Exact rational linear programming (two-phase simplex, Bland's rule) and
//! small linear-algebra helpers over the rationals.

use num_traits::{One, Signed, Zero};

use crate::polyform::Rational;

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome {
    Optimal { x: Vec<Rational>, value: Rational },
    Infeasible,
    Unbounded,
}

/// `max c·x` subject to `a x ≤ b` and `a x = b` rows; variables are free.
#[derive(Clone, Debug, Default)]
pub struct LinearProgram {
    nvars: usize,
    le: Vec<(Vec<Rational>, Rational)>,
    eq: Vec<(Vec<Rational>, Rational)>,
}

impl LinearProgram {
    pub fn new(nvars: usize) -> Self {
        LinearProgram {
            nvars,
            le: Vec::new(),
            eq: Vec::new(),
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn add_le(&mut self, row: Vec<Rational>, rhs: Rational) {
        assert_eq!(row.len(), self.nvars);
        self.le.push((row, rhs));
    }

    pub fn add_eq(&mut self, row: Vec<Rational>, rhs: Rational) {
        assert_eq!(row.len(), self.nvars);
        self.eq.push((row, rhs));
    }

    pub fn le_rows(&self) -> &[(Vec<Rational>, Rational)] {
        &self.le
    }

    pub fn eq_rows(&self) -> &[(Vec<Rational>, Rational)] {
        &self.eq
    }

    pub fn feasible_point(&self) -> LpOutcome {
        self.maximize(&vec![Rational::zero(); self.nvars])
    }

    pub fn maximize(&self, objective: &[Rational]) -> LpOutcome {
        let n = self.nvars;
        let nle = self.le.len();
        // Columns: x⁺ (n), x⁻ (n), slacks (nle).
        let ncols = 2 * n + nle;
        let mut a: Vec<Vec<Rational>> = Vec::new();
        let mut b: Vec<Rational> = Vec::new();
        for (k, (row, rhs)) in self.le.iter().enumerate() {
            let mut r = vec![Rational::zero(); ncols];
            for j in 0..n {
                r[j] = row[j].clone();
                r[n + j] = -row[j].clone();
            }
            r[2 * n + k] = Rational::one();
            a.push(r);
            b.push(rhs.clone());
        }
        for (row, rhs) in &self.eq {
            let mut r = vec![Rational::zero(); ncols];
            for j in 0..n {
                r[j] = row[j].clone();
                r[n + j] = -row[j].clone();
            }
            a.push(r);
            b.push(rhs.clone());
        }
        let mut c = vec![Rational::zero(); ncols];
        for j in 0..n {
            c[j] = objective[j].clone();
            c[n + j] = -objective[j].clone();
        }
        match standard_simplex(a, b, &c) {
            StdOutcome::Infeasible => LpOutcome::Infeasible,
            StdOutcome::Unbounded => LpOutcome::Unbounded,
            StdOutcome::Optimal(y, value) => {
                let x = (0..n).map(|j| &y[j] - &y[n + j]).collect();
                LpOutcome::Optimal { x, value }
            }
        }
    }

    /// Indices of `≤` rows that hold with equality on the whole feasible set.
    /// `None` if the program is infeasible.
    pub fn implicit_equalities(&self) -> Option<Vec<usize>> {
        if matches!(self.feasible_point(), LpOutcome::Infeasible) {
            return None;
        }
        let n = self.nvars;
        let m = self.le.len();
        let mut strict = vec![false; m];
        loop {
            let open: Vec<usize> = (0..m).filter(|&i| !strict[i]).collect();
            if open.is_empty() {
                break;
            }
            // max Σ t_i, a_i x + t_i ≤ b_i, 0 ≤ t_i ≤ 1 over undecided rows.
            let k = open.len();
            let mut lp = LinearProgram::new(n + k);
            for (i, (row, rhs)) in self.le.iter().enumerate() {
                let mut r = row.clone();
                r.extend(std::iter::repeat_n(Rational::zero(), k));
                if let Some(pos) = open.iter().position(|&o| o == i) {
                    r[n + pos] = Rational::one();
                }
                lp.add_le(r, rhs.clone());
            }
            for (row, rhs) in &self.eq {
                let mut r = row.clone();
                r.extend(std::iter::repeat_n(Rational::zero(), k));
                lp.add_eq(r, rhs.clone());
            }
            for t in 0..k {
                let mut up = vec![Rational::zero(); n + k];
                up[n + t] = Rational::one();
                lp.add_le(up.clone(), Rational::one());
                let down: Vec<Rational> = up.iter().map(|v| -v.clone()).collect();
                lp.add_le(down, Rational::zero());
            }
            let mut obj = vec![Rational::zero(); n + k];
            for t in 0..k {
                obj[n + t] = Rational::one();
            }
            match lp.maximize(&obj) {
                LpOutcome::Optimal { x, value } => {
                    if value.is_zero() {
                        break;
                    }
                    for (pos, &i) in open.iter().enumerate() {
                        if x[n + pos].is_positive() {
                            strict[i] = true;
                        }
                    }
                }
                _ => unreachable!("bounded auxiliary program with a feasible point"),
            }
        }
        Some((0..m).filter(|&i| !strict[i]).collect())
    }

    /// Affine hull of the feasible set as equality rows, or `None` if empty.
    pub fn affine_hull(&self) -> Option<AffineHull> {
        let implicit = self.implicit_equalities()?;
        let mut rows: Vec<(Vec<Rational>, Rational)> = self.eq.clone();
        rows.extend(implicit.iter().map(|&i| self.le[i].clone()));
        Some(AffineHull::from_rows(self.nvars, rows))
    }
}

/// `{x : E x = f}` with `E` in reduced row echelon form.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineHull {
    pub nvars: usize,
    pub rows: Vec<(Vec<Rational>, Rational)>,
}

impl AffineHull {
    pub fn from_rows(nvars: usize, rows: Vec<(Vec<Rational>, Rational)>) -> Self {
        let mut aug: Vec<Vec<Rational>> = rows
            .into_iter()
            .map(|(mut r, b)| {
                r.push(b);
                r
            })
            .collect();
        let rank = rref(&mut aug, nvars);
        aug.truncate(rank);
        AffineHull {
            nvars,
            rows: aug
                .into_iter()
                .map(|mut r| {
                    let b = r.pop().expect("augmented");
                    (r, b)
                })
                .collect(),
        }
    }

    pub fn dimension(&self) -> i64 {
        self.nvars as i64 - self.rows.len() as i64
    }

    /// Whether the coordinate subspace `{x_j = 0, j ∈ zeros}` lies inside.
    pub fn contains_coordinate_subspace(&self, zeros: &[usize]) -> bool {
        self.rows
            .iter()
            .all(|(r, b)| b.is_zero() && r.iter().enumerate().all(|(j, v)| v.is_zero() || zeros.contains(&j)))
    }
}

/// Reduce the first `ncols` columns of `m` to row echelon form in place and
/// return the rank; rows are sorted with pivots first.
pub fn rref(m: &mut [Vec<Rational>], ncols: usize) -> usize {
    let nrows = m.len();
    let mut r = 0;
    for c in 0..ncols {
        if r == nrows {
            break;
        }
        let Some(piv) = (r..nrows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, piv);
        let inv = Rational::one() / &m[r][c];
        for v in m[r].iter_mut() {
            *v = &*v * &inv;
        }
        for i in 0..nrows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                let pivot_row = m[r].clone();
                for (v, pv) in m[i].iter_mut().zip(&pivot_row) {
                    *v = &*v - &(&f * pv);
                }
            }
        }
        r += 1;
    }
    // An inconsistent augmented row keeps a nonzero entry past `ncols`; keep
    // it counted so callers see the extra rank.
    let mut rank = r;
    for i in r..nrows {
        if m[i].iter().any(|v| !v.is_zero()) {
            m.swap(rank, i);
            rank += 1;
        }
    }
    rank
}

pub fn rank(rows: &[Vec<Rational>]) -> usize {
    let Some(first) = rows.first() else {
        return 0;
    };
    let mut m = rows.to_vec();
    let ncols = first.len();
    rref(&mut m, ncols)
}

enum StdOutcome {
    Optimal(Vec<Rational>, Rational),
    Infeasible,
    Unbounded,
}

/// `max c·y`, `A y = b`, `y ≥ 0`.
fn standard_simplex(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>, c: &[Rational]) -> StdOutcome {
    let m = a.len();
    let n = c.len();
    for i in 0..m {
        if b[i].is_negative() {
            for v in a[i].iter_mut() {
                *v = -v.clone();
            }
            b[i] = -b[i].clone();
        }
    }
    // Phase 1 tableau with artificials in columns n..n+m.
    let width = n + m + 1;
    let mut t: Vec<Vec<Rational>> = (0..m)
        .map(|i| {
            let mut row = a[i].clone();
            row.extend((0..m).map(|k| if k == i { Rational::one() } else { Rational::zero() }));
            row.push(b[i].clone());
            row
        })
        .collect();
    let mut basis: Vec<usize> = (n..n + m).collect();
    let mut phase1_cost = vec![Rational::zero(); n + m];
    for v in phase1_cost.iter_mut().skip(n) {
        *v = -Rational::one();
    }
    let allowed: Vec<bool> = (0..n + m).map(|_| true).collect();
    if run_simplex(&mut t, &mut basis, &phase1_cost, &allowed).is_err() {
        unreachable!("phase 1 is bounded");
    }
    let infeas: Rational = basis
        .iter()
        .enumerate()
        .filter(|(_, &j)| j >= n)
        .map(|(i, _)| t[i][width - 1].clone())
        .fold(Rational::zero(), |acc, v| acc + v);
    if infeas.is_positive() {
        return StdOutcome::Infeasible;
    }
    // Drive remaining artificials out of the basis.
    let mut i = 0;
    while i < t.len() {
        if basis[i] >= n {
            match (0..n).find(|&j| !t[i][j].is_zero()) {
                Some(j) => pivot(&mut t, &mut basis, i, j),
                None => {
                    t.remove(i);
                    basis.remove(i);
                    continue;
                }
            }
        }
        i += 1;
    }
    let mut cost = c.to_vec();
    cost.extend(std::iter::repeat_n(Rational::zero(), m));
    let allowed: Vec<bool> = (0..n + m).map(|j| j < n).collect();
    if run_simplex(&mut t, &mut basis, &cost, &allowed).is_err() {
        return StdOutcome::Unbounded;
    }
    let mut y = vec![Rational::zero(); n];
    for (i, &j) in basis.iter().enumerate() {
        if j < n {
            y[j] = t[i][width - 1].clone();
        }
    }
    let value = y
        .iter()
        .zip(c)
        .map(|(a, b)| a * b)
        .fold(Rational::zero(), |acc, v| acc + v);
    StdOutcome::Optimal(y, value)
}

fn pivot(t: &mut [Vec<Rational>], basis: &mut [usize], r: usize, c: usize) {
    let inv = Rational::one() / &t[r][c];
    for v in t[r].iter_mut() {
        *v = &*v * &inv;
    }
    let pivot_row = t[r].clone();
    for (i, row) in t.iter_mut().enumerate() {
        if i != r && !row[c].is_zero() {
            let f = row[c].clone();
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v = &*v - &(&f * pv);
                }
            }
        }
    }
    basis[r] = c;
}

/// Maximize `cost·y` from the current basic feasible tableau. `Err` on
/// unboundedness.
fn run_simplex(t: &mut [Vec<Rational>], basis: &mut [usize], cost: &[Rational], allowed: &[bool]) -> Result<(), ()> {
    let ncols = cost.len();
    let last = ncols;
    loop {
        // Reduced costs z_j - c_j; enter the smallest index with a negative one.
        let mut entering = None;
        for j in 0..ncols {
            if !allowed[j] || basis.contains(&j) {
                continue;
            }
            let mut z = -cost[j].clone();
            for (i, &bj) in basis.iter().enumerate() {
                if !t[i][j].is_zero() && !cost[bj].is_zero() {
                    z += &cost[bj] * &t[i][j];
                }
            }
            if z.is_negative() {
                entering = Some(j);
                break;
            }
        }
        let Some(j) = entering else {
            return Ok(());
        };
        let mut best: Option<(usize, Rational)> = None;
        for i in 0..t.len() {
            if t[i][j].is_positive() {
                let ratio = &t[i][last] / &t[i][j];
                let better = match &best {
                    None => true,
                    Some((bi, br)) => ratio < *br || (ratio == *br && basis[i] < basis[*bi]),
                };
                if better {
                    best = Some((i, ratio));
                }
            }
        }
        let Some((r, _)) = best else {
            return Err(());
        };
        pivot(t, basis, r, j);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyform::{rat, rat_int};

    fn row(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| rat_int(x)).collect()
    }

    #[test]
    fn simple_optimum() {
        // max x + y, x ≤ 1, y ≤ 2, x + y ≤ 5/2
        let mut lp = LinearProgram::new(2);
        lp.add_le(row(&[1, 0]), rat_int(1));
        lp.add_le(row(&[0, 1]), rat_int(2));
        lp.add_le(row(&[1, 1]), rat(5, 2));
        match lp.maximize(&row(&[1, 1])) {
            LpOutcome::Optimal { value, .. } => assert_eq!(value, rat(5, 2)),
            other => panic!("{other:?}"),
        }
        assert_eq!(lp.maximize(&row(&[-1, 0])), LpOutcome::Unbounded);
    }

    #[test]
    fn infeasible_detected() {
        let mut lp = LinearProgram::new(1);
        lp.add_le(row(&[1]), rat_int(0));
        lp.add_le(row(&[-1]), rat_int(-1));
        assert_eq!(lp.feasible_point(), LpOutcome::Infeasible);
        assert!(lp.affine_hull().is_none());
    }

    #[test]
    fn hull_of_pinched_box() {
        // 0 ≤ x ≤ 1, 0 ≤ y ≤ 0 -> segment
        let mut lp = LinearProgram::new(2);
        lp.add_le(row(&[-1, 0]), rat_int(0));
        lp.add_le(row(&[1, 0]), rat_int(1));
        lp.add_le(row(&[0, -1]), rat_int(0));
        lp.add_le(row(&[0, 1]), rat_int(0));
        let h = lp.affine_hull().unwrap();
        assert_eq!(h.dimension(), 1);
        assert!(h.contains_coordinate_subspace(&[1]));
        assert!(!h.contains_coordinate_subspace(&[0]));
    }

    #[test]
    fn hull_with_tradeoff_rows() {
        // x ≤ e, -x ≤ e with tiny e: full-dimensional, a single auxiliary LP
        // would zero one slack.
        let mut lp = LinearProgram::new(1);
        lp.add_le(row(&[1]), rat(1, 1000));
        lp.add_le(row(&[-1]), rat(1, 1000));
        assert_eq!(lp.affine_hull().unwrap().dimension(), 1);
    }

    #[test]
    fn ranks() {
        assert_eq!(rank(&[row(&[1, 2]), row(&[2, 4])]), 1);
        assert_eq!(rank(&[row(&[1, 2]), row(&[0, 4])]), 2);
    }
}
