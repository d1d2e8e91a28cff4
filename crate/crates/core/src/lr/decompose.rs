//! Tensor-product decomposition V_lambda (x) V_mu = sum_nu N V_nu.

use super::hive::HiveProblem;
use crate::exec::{map_slice, Execution};
use crate::spectra::DynkinWeight;
use std::collections::BTreeMap;

/// GL(n) partitions nu of |lambda| + |mu| allowed by containment
/// (nu >= lambda, nu >= mu) and the Weyl inequalities nu_{i+j-1} <= lambda_i + mu_j.
fn candidates(lambda: &[i64], mu: &[i64]) -> Vec<Vec<i64>> {
    let n = lambda.len();
    let total: i64 = lambda.iter().sum::<i64>() + mu.iter().sum::<i64>();
    let upper: Vec<i64> = (0..n)
        .map(|k| (0..=k).map(|i| lambda[i] + mu[k - i]).min().unwrap())
        .collect();
    let lower: Vec<i64> = (0..n).map(|k| lambda[k].max(mu[k])).collect();
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(n);
    fn rec(
        k: usize,
        rest: i64,
        upper: &[i64],
        lower: &[i64],
        cur: &mut Vec<i64>,
        out: &mut Vec<Vec<i64>>,
    ) {
        let n = upper.len();
        if k == n {
            if rest == 0 {
                out.push(cur.clone());
            }
            return;
        }
        let prev = if k == 0 { i64::MAX } else { cur[k - 1] };
        let hi = upper[k].min(prev).min(rest);
        // The remaining parts cannot exceed this one.
        let lo = lower[k].max(if n - k > 0 {
            (rest + (n - k) as i64 - 1) / (n - k) as i64
        } else {
            0
        });
        for v in lo..=hi {
            cur.push(v);
            rec(k + 1, rest - v, upper, lower, cur, out);
            cur.pop();
        }
    }
    rec(0, total, &upper, &lower, &mut cur, &mut out);
    out
}

/// Every constituent with its multiplicity.
pub fn tensor_decomposition(
    lambda: &DynkinWeight,
    mu: &DynkinWeight,
    exec: Execution,
) -> BTreeMap<DynkinWeight, u64> {
    let (l, m) = (lambda.to_partition(), mu.to_partition());
    let cands = candidates(&l, &m);
    let counts = map_slice(exec, &cands, |nu| {
        HiveProblem::from_partitions(&l, &m, nu).count(Execution::Sequential)
    });
    cands
        .iter()
        .zip(counts)
        .filter(|(_, c)| *c > 0)
        .map(|(nu, c)| (DynkinWeight::from_partition(nu), c))
        .collect()
}

/// sum_tau N_{lambda mu}^tau N_{tau kappa}^nu.
pub fn triple_multiplicity(
    lambda: &DynkinWeight,
    mu: &DynkinWeight,
    kappa: &DynkinWeight,
    nu: &DynkinWeight,
) -> u64 {
    tensor_decomposition(lambda, mu, Execution::Sequential)
        .iter()
        .map(|(tau, c)| c * super::hive::lr_coefficient(tau, kappa, nu))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orbital::weyl_dimension;
    use num_bigint::BigInt;

    fn w(v: &[u32]) -> DynkinWeight {
        DynkinWeight::new(v.to_vec())
    }

    #[test]
    fn fundamental_times_antifundamental() {
        let d = tensor_decomposition(&w(&[1, 0]), &w(&[0, 1]), Execution::Sequential);
        let expect: BTreeMap<_, _> = [(w(&[0, 0]), 1), (w(&[1, 1]), 1)].into_iter().collect();
        assert_eq!(d, expect);
    }

    #[test]
    fn trivial_factor() {
        let d = tensor_decomposition(&w(&[0, 0, 0]), &w(&[2, 0, 1]), Execution::Sequential);
        assert_eq!(d.into_iter().collect::<Vec<_>>(), vec![(w(&[2, 0, 1]), 1)]);
    }

    #[test]
    fn dimension_sum_rule() {
        for (a, b) in [(w(&[2, 1]), w(&[1, 3])), (w(&[1, 0, 2]), w(&[0, 2, 1]))] {
            let d = tensor_decomposition(&a, &b, Execution::Parallel);
            let lhs: BigInt = d
                .iter()
                .map(|(nu, c)| weyl_dimension(nu) * BigInt::from(*c))
                .sum();
            assert_eq!(lhs, weyl_dimension(&a) * weyl_dimension(&b));
        }
    }
}
