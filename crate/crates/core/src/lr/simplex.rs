//! Exact two-phase simplex over the rationals (Bland's rule).

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

type Q = BigRational;

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome {
    Optimal { value: Q, x: Vec<Q> },
    Infeasible,
    Unbounded,
}

struct Tableau {
    rows: Vec<Vec<Q>>,
    basis: Vec<usize>,
    cols: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c].clone();
        for v in self.rows[r].iter_mut() {
            *v /= &p;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v -= &f * pv;
                }
            }
        }
        self.basis[r] = c;
    }

    /// Maximizes obj . y over columns allowed by `allowed`.
    fn optimize(&mut self, obj: &[Q], allowed: &dyn Fn(usize) -> bool) -> bool {
        let rhs = self.cols;
        loop {
            let mut entering = None;
            for j in 0..self.cols {
                if !allowed(j) || self.basis.contains(&j) {
                    continue;
                }
                let mut r = obj[j].clone();
                for (i, row) in self.rows.iter().enumerate() {
                    if !row[j].is_zero() {
                        r -= &obj[self.basis[i]] * &row[j];
                    }
                }
                if r.is_positive() {
                    entering = Some(j);
                    break;
                }
            }
            let Some(c) = entering else { return true };
            let mut best: Option<(usize, Q)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if row[c].is_positive() {
                    let ratio = &row[rhs] / &row[c];
                    let better = match &best {
                        None => true,
                        Some((bi, br)) => {
                            ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi])
                        }
                    };
                    if better {
                        best = Some((i, ratio));
                    }
                }
            }
            match best {
                Some((r, _)) => self.pivot(r, c),
                None => return false,
            }
        }
    }

    fn value(&self, obj: &[Q]) -> Q {
        self.basis
            .iter()
            .zip(&self.rows)
            .map(|(&b, row)| &obj[b] * &row[self.cols])
            .sum()
    }

    fn solution(&self, nvars: usize) -> Vec<Q> {
        let mut y = vec![Q::zero(); nvars];
        for (&b, row) in self.basis.iter().zip(&self.rows) {
            if b < nvars {
                y[b] = row[self.cols].clone();
            }
        }
        y
    }
}

/// Maximizes c . x subject to A x <= b with x free.
pub fn maximize(c: &[Q], a: &[Vec<Q>], b: &[Q]) -> LpOutcome {
    let k = c.len();
    let m = a.len();
    // Columns: x+ (k), x- (k), slack (m), artificial (m), rhs.
    let cols = 2 * k + 2 * m;
    let mut rows = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    for i in 0..m {
        let mut row = vec![Q::zero(); cols + 1];
        let flip = b[i].is_negative();
        let s = if flip { -Q::one() } else { Q::one() };
        for j in 0..k {
            row[j] = &s * &a[i][j];
            row[k + j] = -&s * &a[i][j];
        }
        row[2 * k + i] = s.clone();
        row[cols] = &s * &b[i];
        if flip {
            row[2 * k + m + i] = Q::one();
            basis.push(2 * k + m + i);
        } else {
            basis.push(2 * k + i);
        }
        rows.push(row);
    }
    let mut t = Tableau { rows, basis, cols };
    let is_art = |j: usize| j >= 2 * k + m;
    let phase1: Vec<Q> = (0..cols)
        .map(|j| if is_art(j) { -Q::one() } else { Q::zero() })
        .collect();
    t.optimize(&phase1, &|_| true);
    if t.value(&phase1).is_negative() {
        return LpOutcome::Infeasible;
    }
    for r in 0..m {
        if is_art(t.basis[r]) {
            if let Some(c) = (0..2 * k + m).find(|&j| !t.rows[r][j].is_zero()) {
                t.pivot(r, c);
            }
        }
    }
    let mut obj = vec![Q::zero(); cols];
    for j in 0..k {
        obj[j] = c[j].clone();
        obj[k + j] = -c[j].clone();
    }
    if !t.optimize(&obj, &|j| !is_art(j)) {
        return LpOutcome::Unbounded;
    }
    let y = t.solution(2 * k);
    let x = (0..k).map(|j| &y[j] - &y[k + j]).collect();
    LpOutcome::Optimal {
        value: t.value(&obj),
        x,
    }
}

/// Rank of a rational matrix.
pub fn rank(rows: &[Vec<Q>]) -> usize {
    let mut m: Vec<Vec<Q>> = rows.to_vec();
    let cols = m.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let pivot = m[r][c].clone();
        for i in r + 1..m.len() {
            if m[i][c].is_zero() {
                continue;
            }
            let f = &m[i][c] / &pivot;
            for j in c..cols {
                let v = &f * &m[r][j];
                m[i][j] -= v;
            }
        }
        r += 1;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::int;

    #[test]
    fn small_lp() {
        // max x + y s.t. x <= 2, y <= 3, x + y <= 4, -x <= 1
        let a = vec![
            vec![int(1), int(0)],
            vec![int(0), int(1)],
            vec![int(1), int(1)],
            vec![int(-1), int(0)],
        ];
        let b = vec![int(2), int(3), int(4), int(1)];
        match maximize(&[int(1), int(1)], &a, &b) {
            LpOutcome::Optimal { value, .. } => assert_eq!(value, int(4)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn infeasible_and_unbounded() {
        let a = vec![vec![int(1)], vec![int(-1)]];
        assert_eq!(
            maximize(&[int(1)], &a, &[int(1), int(-2)]),
            LpOutcome::Infeasible
        );
        assert_eq!(
            maximize(&[int(1)], &[vec![int(-1)]], &[int(0)]),
            LpOutcome::Unbounded
        );
    }

    #[test]
    fn rank_of_dependent_rows() {
        let m = vec![
            vec![int(1), int(2)],
            vec![int(2), int(4)],
            vec![int(0), int(1)],
        ];
        assert_eq!(rank(&m), 2);
    }
}
