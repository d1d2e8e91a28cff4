//! Stretching (Ehrhart) quasi-polynomials P(s) = N_{s lambda, s mu}^{s nu}
//! and the volume of the hive polytope.

use super::hive::{gl_boundary, interior_vertices, rhombi, vertex_index, HiveProblem};
use super::simplex::{maximize, rank, LpOutcome};
use crate::error::{HornError, Result};
use crate::exec::Execution;
use crate::scalar::int;
use crate::spectra::DynkinWeight;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

type Q = BigRational;

pub const MAX_PERIOD: usize = 3;

#[derive(Clone, Debug, PartialEq)]
pub struct QuasiPolynomial {
    pub degree: usize,
    pub period: usize,
    /// coefficients[r][l] multiplies s^l when s = r (mod period).
    pub coefficients: Vec<Vec<Q>>,
    /// The counts the fit was built from, (s, P(s)).
    pub counts: Vec<(u32, u64)>,
}

impl QuasiPolynomial {
    pub fn eval(&self, s: u32) -> Q {
        let c = &self.coefficients[s as usize % self.period];
        let x = int(s as i64);
        c.iter().rev().fold(Q::zero(), |acc, a| acc * &x + a)
    }

    pub fn is_polynomial(&self) -> bool {
        self.period == 1
    }

    /// a_d, equal for every residue class.
    pub fn leading(&self) -> Option<Q> {
        let first = self.coefficients[0].get(self.degree)?.clone();
        self.coefficients
            .iter()
            .all(|c| c[self.degree] == first)
            .then_some(first)
    }
}

/// a . x + c >= 0.
type Inequality = (Vec<Q>, Q);

/// Hive polytope as rational inequalities a . x + c >= 0 in the interior values.
fn hive_inequalities(
    lambda: &DynkinWeight,
    mu: &DynkinWeight,
    nu: &DynkinWeight,
) -> Option<(usize, Vec<Inequality>)> {
    let [l, m, v] = gl_boundary(lambda, mu, nu)?;
    let n = l.len();
    let interior = interior_vertices(n);
    let mut var = vec![None; (n + 1) * (n + 2) / 2];
    for (k, &(i, j)) in interior.iter().enumerate() {
        var[vertex_index(i, j)] = Some(k);
    }
    let total_l: i64 = l.iter().sum();
    let mut boundary = vec![0i64; (n + 1) * (n + 2) / 2];
    for i in 0..=n {
        boundary[vertex_index(i, 0)] = l[..i].iter().sum();
        boundary[vertex_index(i, i)] = v[..i].iter().sum();
        boundary[vertex_index(n, i)] = total_l + m[..i].iter().sum::<i64>();
    }
    let rows = rhombi(n)
        .iter()
        .map(|r| {
            let mut a = vec![Q::zero(); interior.len()];
            let mut c = Q::zero();
            let terms = r
                .obtuse
                .iter()
                .map(|&p| (p, 1))
                .chain(r.acute.iter().map(|&p| (p, -1)));
            for ((i, j), s) in terms {
                let idx = vertex_index(i, j);
                match var[idx] {
                    Some(k) => a[k] += int(s),
                    None => c += int(s * boundary[idx]),
                }
            }
            (a, c)
        })
        .collect();
    Some((interior.len(), rows))
}

/// Affine dimension of the hive polytope (None if empty): repeatedly
/// maximize the number of strictly slack inequalities until the remaining
/// ones are implicit equalities.
pub fn polytope_dimension(
    lambda: &DynkinWeight,
    mu: &DynkinWeight,
    nu: &DynkinWeight,
) -> Option<usize> {
    let (k, ineq) = hive_inequalities(lambda, mu, nu)?;
    let mut candidates: Vec<usize> = (0..ineq.len()).collect();
    loop {
        let t = candidates.len();
        // Variables: x (k), then t_c for each candidate c.
        let mut a = Vec::new();
        let mut b = Vec::new();
        for (idx, (row, c)) in ineq.iter().enumerate() {
            // -a.x + t <= c  (candidate) or  -a.x <= c
            let mut r: Vec<Q> = row.iter().map(|v| -v.clone()).collect();
            r.resize(k + t, Q::zero());
            if let Some(pos) = candidates.iter().position(|&x| x == idx) {
                r[k + pos] = Q::one();
            }
            a.push(r);
            b.push(c.clone());
        }
        for pos in 0..t {
            let mut up = vec![Q::zero(); k + t];
            up[k + pos] = Q::one();
            a.push(up.clone());
            b.push(Q::one());
            up[k + pos] = -Q::one();
            a.push(up);
            b.push(Q::zero());
        }
        let mut obj = vec![Q::zero(); k];
        obj.extend(std::iter::repeat_n(Q::one(), t));
        let x = match maximize(&obj, &a, &b) {
            LpOutcome::Optimal { x, .. } => x,
            LpOutcome::Infeasible => return None,
            LpOutcome::Unbounded => unreachable!("slack variables are bounded"),
        };
        let slack: Vec<usize> = (0..t)
            .filter(|&p| x[k + p].is_positive())
            .map(|p| candidates[p])
            .collect();
        if slack.is_empty() {
            let eq: Vec<Vec<Q>> = candidates.iter().map(|&c| ineq[c].0.clone()).collect();
            return Some(k - rank(&eq));
        }
        candidates.retain(|c| !slack.contains(c));
    }
}

/// Coefficients of the degree-d polynomial through the given points.
fn interpolate(points: &[(u32, u64)], degree: usize) -> Vec<Q> {
    let m = degree + 1;
    let mut rows: Vec<Vec<Q>> = points[..m]
        .iter()
        .map(|&(s, p)| {
            let mut r: Vec<Q> = (0..m).map(|l| int(s as i64).pow(l as i32)).collect();
            r.push(Q::from_integer(BigInt::from(p)));
            r
        })
        .collect();
    for c in 0..m {
        let p = (c..m)
            .find(|&i| !rows[i][c].is_zero())
            .expect("distinct nodes");
        rows.swap(c, p);
        let pivot = rows[c][c].clone();
        for v in rows[c].iter_mut() {
            *v /= &pivot;
        }
        for i in 0..m {
            if i != c && !rows[i][c].is_zero() {
                let f = rows[i][c].clone();
                let pr = rows[c].clone();
                for (v, pv) in rows[i].iter_mut().zip(&pr) {
                    *v -= &f * pv;
                }
            }
        }
    }
    rows.into_iter().map(|r| r[m].clone()).collect()
}

fn eval_poly(c: &[Q], s: u32) -> Q {
    let x = int(s as i64);
    c.iter().rev().fold(Q::zero(), |acc, a| acc * &x + a)
}

/// Counts P(s) for s = 1..=s_max and fits the lowest period <= 3 that
/// reproduces all of them.
pub fn stretch_quasipolynomial(
    lambda: &DynkinWeight,
    mu: &DynkinWeight,
    nu: &DynkinWeight,
    s_max: u32,
) -> Result<QuasiPolynomial> {
    let d = polytope_dimension(lambda, mu, nu)
        .ok_or_else(|| HornError::InvalidArgument("the hive polytope is empty".into()))?;
    if (s_max as usize) < 2 * d + 2 {
        return Err(HornError::InvalidArgument(format!(
            "s_max must be at least 2d+2 = {}",
            2 * d + 2
        )));
    }
    let counts: Vec<(u32, u64)> = (1..=s_max)
        .map(|s| {
            let c = HiveProblem::from_weights(&lambda.scaled(s), &mu.scaled(s), &nu.scaled(s))
                .map_or(0, |p| p.count(Execution::Sequential));
            (s, c)
        })
        .collect();
    fit_quasipolynomial(d, counts)
}

/// Fits P from exact counts, trying periods 1, 2, 3.
pub fn fit_quasipolynomial(degree: usize, counts: Vec<(u32, u64)>) -> Result<QuasiPolynomial> {
    'period: for period in 1..=MAX_PERIOD {
        let mut coefficients = Vec::with_capacity(period);
        for r in 0..period {
            let pts: Vec<(u32, u64)> = counts
                .iter()
                .copied()
                .filter(|(s, _)| *s as usize % period == r)
                .collect();
            if pts.len() < degree + 2 {
                continue 'period;
            }
            let c = interpolate(&pts, degree);
            if pts
                .iter()
                .any(|&(s, p)| eval_poly(&c, s) != Q::from_integer(BigInt::from(p)))
            {
                continue 'period;
            }
            coefficients.push(c);
        }
        return Ok(QuasiPolynomial {
            degree,
            period,
            coefficients,
            counts,
        });
    }
    Err(HornError::PeriodUndetermined {
        max_period: MAX_PERIOD,
    })
}

/// Leading coefficient a_d of the stretching polynomial: the relative volume
/// of the hive polytope.  A single point has volume 1 (= a_0).
pub fn polytope_volume(lambda: &DynkinWeight, mu: &DynkinWeight, nu: &DynkinWeight) -> Result<Q> {
    let d = polytope_dimension(lambda, mu, nu)
        .ok_or_else(|| HornError::InvalidArgument("the hive polytope is empty".into()))?;
    let qp = stretch_quasipolynomial(lambda, mu, nu, (2 * d + 2).max(4) as u32)?;
    qp.leading().ok_or_else(|| {
        HornError::InvalidArgument("leading coefficient differs between residue classes".into())
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(v: &[u32]) -> DynkinWeight {
        DynkinWeight::new(v.to_vec())
    }

    #[test]
    fn adjoint_cube() {
        let a = w(&[1, 1]);
        assert_eq!(polytope_dimension(&a, &a, &a), Some(1));
        let qp = stretch_quasipolynomial(&a, &a, &a, 5).unwrap();
        assert!(qp.is_polynomial());
        assert_eq!(qp.coefficients[0], vec![int(1), int(1)]);
        assert_eq!(polytope_volume(&a, &a, &a).unwrap(), int(1));
    }

    #[test]
    fn rigid_triple() {
        let (l, m) = (w(&[1, 0]), w(&[0, 1]));
        let z = w(&[0, 0]);
        assert_eq!(polytope_dimension(&l, &m, &z), Some(0));
        let qp = stretch_quasipolynomial(&l, &m, &z, 4).unwrap();
        assert!((1..=4).all(|s| qp.eval(s) == int(1)));
    }

    #[test]
    fn periodic_fit() {
        // floor(s/2) + 1 has period 2
        let counts = (1..=8).map(|s| (s, (s / 2 + 1) as u64)).collect();
        let qp = fit_quasipolynomial(1, counts).unwrap();
        assert_eq!(qp.period, 2);
    }
}
