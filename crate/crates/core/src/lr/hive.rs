//! Hives: integer functions on the triangular array {(i, j) : 0 <= j <= i <= n}
//! with prescribed boundary, satisfying one inequality per unit rhombus.
//! Their number is the Littlewood-Richardson coefficient.

use crate::exec::{map_indexed, Execution};
use crate::spectra::DynkinWeight;
use serde::{Deserialize, Serialize};

/// Position of vertex (i, j) in a flat array.
pub fn vertex_index(i: usize, j: usize) -> usize {
    i * (i + 1) / 2 + j
}

pub fn vertex_count(n: usize) -> usize {
    (n + 1) * (n + 2) / 2
}

/// h(obtuse[0]) + h(obtuse[1]) >= h(acute[0]) + h(acute[1]).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Rhombus {
    pub obtuse: [(usize, usize); 2],
    pub acute: [(usize, usize); 2],
}

impl Rhombus {
    pub fn slack(&self, h: &[i64]) -> i64 {
        let v = |(i, j): (usize, usize)| h[vertex_index(i, j)];
        v(self.obtuse[0]) + v(self.obtuse[1]) - v(self.acute[0]) - v(self.acute[1])
    }
}

/// All 3n(n-1)/2 unit rhombi.  The obtuse vertices span the short diagonal,
/// which is an internal edge of the triangle; every internal edge occurs once.
pub fn rhombi(n: usize) -> Vec<Rhombus> {
    let mut out = Vec::with_capacity(3 * n * n.saturating_sub(1) / 2);
    for i in 0..n.saturating_sub(1) {
        for j in 0..=i {
            out.push(Rhombus {
                obtuse: [(i + 1, j), (i + 1, j + 1)],
                acute: [(i, j), (i + 2, j + 1)],
            });
        }
    }
    for i in 1..n {
        for j in 0..i {
            out.push(Rhombus {
                obtuse: [(i + 1, j + 1), (i, j + 1)],
                acute: [(i, j), (i + 1, j + 2)],
            });
        }
    }
    for i in 1..n {
        for j in 1..=i {
            out.push(Rhombus {
                obtuse: [(i + 1, j), (i, j - 1)],
                acute: [(i, j), (i + 1, j - 1)],
            });
        }
    }
    out
}

/// Interior vertices in row-major order.
pub fn interior_vertices(n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in 2..n {
        for j in 1..i {
            out.push((i, j));
        }
    }
    out
}

/// A complete hive.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HivePattern {
    pub n: usize,
    /// Values in [`vertex_index`] order.
    pub entries: Vec<i64>,
}

impl HivePattern {
    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.entries[vertex_index(i, j)]
    }

    pub fn rows(&self) -> Vec<Vec<i64>> {
        (0..=self.n)
            .map(|i| (0..=i).map(|j| self.get(i, j)).collect())
            .collect()
    }

    pub fn is_valid(&self) -> bool {
        rhombi(self.n).iter().all(|r| r.slack(&self.entries) >= 0)
    }

    /// Rhombus slacks in the order of [`rhombi`].
    pub fn slacks(&self) -> Vec<i64> {
        rhombi(self.n)
            .iter()
            .map(|r| r.slack(&self.entries))
            .collect()
    }
}

/// GL(n) partitions (lambda, mu, nu) realizing an su(n) triple, or `None`
/// when lambda + mu - nu is outside the root lattice.
pub fn gl_boundary(
    lambda: &DynkinWeight,
    mu: &DynkinWeight,
    nu: &DynkinWeight,
) -> Option<[Vec<i64>; 3]> {
    let n = lambda.n();
    let (l, m, mut v) = (lambda.to_partition(), mu.to_partition(), nu.to_partition());
    let excess = l.iter().sum::<i64>() + m.iter().sum::<i64>() - v.iter().sum::<i64>();
    if excess.rem_euclid(n as i64) != 0 {
        return None;
    }
    let k = excess / n as i64;
    for p in v.iter_mut() {
        *p += k;
    }
    Some([l, m, v])
}

/// lambda + mu - nu in the root lattice.
pub fn root_lattice_check(lambda: &DynkinWeight, mu: &DynkinWeight, nu: &DynkinWeight) -> bool {
    let n = lambda.n() as i64;
    (lambda.congruence() as i64 + mu.congruence() as i64 - nu.congruence() as i64).rem_euclid(n)
        == 0
}

/// A bound on the last-assigned vertex of a rhombus: `sign * h >= rhs`,
/// with rhs = -(sum of the other signed values).
#[derive(Clone, Debug)]
struct Bound {
    sign: i64,
    others: Vec<(usize, i64)>,
}

/// Hive counting problem with fixed boundary, compiled for depth-first search.
#[derive(Clone, Debug)]
pub struct HiveProblem {
    n: usize,
    base: Vec<i64>,
    free: Vec<usize>,
    bounds: Vec<Vec<Bound>>,
    feasible: bool,
}

impl HiveProblem {
    /// Boundary from GL partitions with |nu| = |lambda| + |mu|.
    pub fn from_partitions(lambda: &[i64], mu: &[i64], nu: &[i64]) -> Self {
        let n = lambda.len();
        let mut base = vec![0i64; vertex_count(n)];
        let mut fixed = vec![false; vertex_count(n)];
        let total_l: i64 = lambda.iter().sum();
        let partial = |p: &[i64], k: usize| p[..k].iter().sum::<i64>();
        for i in 0..=n {
            base[vertex_index(i, 0)] = partial(lambda, i);
            fixed[vertex_index(i, 0)] = true;
            base[vertex_index(i, i)] = partial(nu, i);
            fixed[vertex_index(i, i)] = true;
            base[vertex_index(n, i)] = total_l + partial(mu, i);
            fixed[vertex_index(n, i)] = true;
        }
        let mut feasible = total_l + mu.iter().sum::<i64>() == nu.iter().sum::<i64>();
        let free: Vec<usize> = interior_vertices(n)
            .into_iter()
            .map(|(i, j)| vertex_index(i, j))
            .collect();
        let order: Vec<usize> = {
            let mut o = vec![usize::MAX; vertex_count(n)];
            for (k, &v) in free.iter().enumerate() {
                o[v] = k;
            }
            o
        };
        let mut bounds = vec![Vec::new(); free.len()];
        for r in rhombi(n) {
            let terms: Vec<(usize, i64)> = r
                .obtuse
                .iter()
                .map(|&(i, j)| (vertex_index(i, j), 1))
                .chain(r.acute.iter().map(|&(i, j)| (vertex_index(i, j), -1)))
                .collect();
            let last = terms
                .iter()
                .filter(|(v, _)| !fixed[*v])
                .map(|(v, _)| order[*v])
                .max();
            match last {
                None => {
                    if r.slack(&base) < 0 {
                        feasible = false;
                    }
                }
                Some(k) => {
                    let v = free[k];
                    let sign: i64 = terms.iter().filter(|(u, _)| *u == v).map(|(_, s)| s).sum();
                    let others = terms.into_iter().filter(|(u, _)| *u != v).collect();
                    bounds[k].push(Bound { sign, others });
                }
            }
        }
        HiveProblem {
            n,
            base,
            free,
            bounds,
            feasible,
        }
    }

    pub fn from_weights(
        lambda: &DynkinWeight,
        mu: &DynkinWeight,
        nu: &DynkinWeight,
    ) -> Option<Self> {
        let [l, m, v] = gl_boundary(lambda, mu, nu)?;
        if v.last().copied().unwrap_or(0) < 0 {
            return None;
        }
        Some(Self::from_partitions(&l, &m, &v))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn free_vertices(&self) -> usize {
        self.free.len()
    }

    fn interval(&self, k: usize, h: &[i64]) -> (i64, i64) {
        let (mut lo, mut hi) = (i64::MIN, i64::MAX);
        for b in &self.bounds[k] {
            let rest: i64 = b.others.iter().map(|&(v, s)| s * h[v]).sum();
            if b.sign > 0 {
                lo = lo.max(-rest);
            } else {
                hi = hi.min(rest);
            }
        }
        (lo, hi)
    }

    fn count_from(&self, k: usize, h: &mut [i64]) -> u64 {
        let (lo, hi) = self.interval(k, h);
        if lo > hi {
            return 0;
        }
        if k + 1 == self.free.len() {
            return (hi - lo + 1) as u64;
        }
        let v = self.free[k];
        let mut total = 0;
        for x in lo..=hi {
            h[v] = x;
            total += self.count_from(k + 1, h);
        }
        total
    }

    /// Number of hives, split across the admissible values of the first
    /// interior vertex.
    pub fn count(&self, exec: Execution) -> u64 {
        if !self.feasible {
            return 0;
        }
        if self.free.is_empty() {
            return 1;
        }
        let mut h = self.base.clone();
        let (lo, hi) = self.interval(0, &h);
        if lo > hi {
            return 0;
        }
        if self.free.len() == 1 {
            return (hi - lo + 1) as u64;
        }
        let span = (hi - lo + 1) as usize;
        if !exec.is_parallel() || span < 2 {
            return self.count_from(0, &mut h);
        }
        let v0 = self.free[0];
        map_indexed(exec, span, |off| {
            let mut h = self.base.clone();
            h[v0] = lo + off as i64;
            self.count_from(1, &mut h)
        })
        .into_iter()
        .sum()
    }

    fn visit_from<F: FnMut(&[i64])>(&self, k: usize, h: &mut [i64], f: &mut F) {
        if k == self.free.len() {
            f(h);
            return;
        }
        let (lo, hi) = self.interval(k, h);
        let v = self.free[k];
        for x in lo..=hi {
            h[v] = x;
            self.visit_from(k + 1, h, f);
        }
    }

    /// Calls `f` on every hive, in lexicographic order of interior values.
    pub fn for_each<F: FnMut(&HivePattern)>(&self, mut f: F) {
        if !self.feasible {
            return;
        }
        let mut h = self.base.clone();
        let n = self.n;
        self.visit_from(0, &mut h, &mut |e: &[i64]| {
            f(&HivePattern {
                n,
                entries: e.to_vec(),
            })
        });
    }
}

/// Littlewood-Richardson coefficient N_{lambda mu}^nu by hive counting.
pub fn lr_coefficient(lambda: &DynkinWeight, mu: &DynkinWeight, nu: &DynkinWeight) -> u64 {
    lr_coefficient_with(lambda, mu, nu, Execution::Sequential)
}

pub fn lr_coefficient_with(
    lambda: &DynkinWeight,
    mu: &DynkinWeight,
    nu: &DynkinWeight,
    exec: Execution,
) -> u64 {
    match HiveProblem::from_weights(lambda, mu, nu) {
        Some(p) => p.count(exec),
        None => 0,
    }
}

/// Every hive for the triple.
pub fn enumerate_hives(
    lambda: &DynkinWeight,
    mu: &DynkinWeight,
    nu: &DynkinWeight,
) -> Vec<HivePattern> {
    let mut out = Vec::new();
    if let Some(p) = HiveProblem::from_weights(lambda, mu, nu) {
        p.for_each(|h| out.push(h.clone()));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(v: &[u32]) -> DynkinWeight {
        DynkinWeight::new(v.to_vec())
    }

    #[test]
    fn rhombus_count() {
        for n in 2..7 {
            assert_eq!(rhombi(n).len(), 3 * n * (n - 1) / 2);
        }
    }

    #[test]
    fn small_coefficients() {
        assert_eq!(lr_coefficient(&w(&[1, 0]), &w(&[0, 1]), &w(&[0, 0])), 1);
        assert_eq!(lr_coefficient(&w(&[1, 1]), &w(&[1, 1]), &w(&[1, 1])), 2);
        assert_eq!(lr_coefficient(&w(&[0, 0]), &w(&[1, 0]), &w(&[1, 0])), 1);
        assert_eq!(lr_coefficient(&w(&[1, 0]), &w(&[0, 0]), &w(&[0, 0])), 0);
    }

    #[test]
    fn root_lattice() {
        assert!(root_lattice_check(&w(&[1, 0]), &w(&[0, 1]), &w(&[0, 0])));
        assert!(!root_lattice_check(&w(&[1, 0]), &w(&[0, 0]), &w(&[0, 0])));
        assert!(root_lattice_check(&w(&[1, 1]), &w(&[1, 1]), &w(&[1, 1])));
    }

    #[test]
    fn enumerated_hives_are_valid() {
        let hs = enumerate_hives(&w(&[2, 1, 1]), &w(&[1, 2, 0]), &w(&[2, 1, 2]));
        assert_eq!(
            hs.len() as u64,
            lr_coefficient(&w(&[2, 1, 1]), &w(&[1, 2, 0]), &w(&[2, 1, 2]))
        );
        assert!(hs.iter().all(HivePattern::is_valid));
    }
}
