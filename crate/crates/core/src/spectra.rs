//! Spectra, dominant weights and the combinatorics shared by every engine.

use crate::error::{check_len, HornError, Result};
use crate::scalar::{int, Scalar};
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

/// A weakly decreasing real spectrum.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "Vec<f64>", try_from = "Vec<f64>")]
pub struct Spectrum {
    values: Vec<f64>,
    traceless: bool,
}

impl Spectrum {
    /// Sorts `values` decreasingly; verifies the trace when `traceless` is set.
    pub fn new(values: Vec<f64>, traceless: bool) -> Result<Self> {
        if values.is_empty() {
            return Err(HornError::InvalidArgument("empty spectrum".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(HornError::InvalidArgument("non-finite eigenvalue".into()));
        }
        let mut values = values;
        values.sort_by(|a, b| b.total_cmp(a));
        if traceless {
            let trace: f64 = values.iter().sum();
            let scale = values.iter().fold(1.0f64, |m, v| m.max(v.abs()));
            let tol = 1e-12 * scale;
            if trace.abs() > tol {
                return Err(HornError::Trace { trace, tol });
            }
        }
        Ok(Spectrum { values, traceless })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn is_traceless(&self) -> bool {
        self.traceless
    }

    pub fn trace(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn has_repeats(&self) -> bool {
        self.values.windows(2).any(|w| w[0] == w[1])
    }
}

impl From<Spectrum> for Vec<f64> {
    fn from(s: Spectrum) -> Self {
        s.values
    }
}

impl TryFrom<Vec<f64>> for Spectrum {
    type Error = HornError;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Spectrum::new(v, false)
    }
}

/// Non-negative Dynkin labels of a dominant su(n) weight.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DynkinWeight {
    labels: Vec<u32>,
}

impl DynkinWeight {
    pub fn new(labels: Vec<u32>) -> Self {
        DynkinWeight { labels }
    }

    pub fn zero(rank: usize) -> Self {
        DynkinWeight {
            labels: vec![0; rank],
        }
    }

    /// The Weyl vector, all labels one.
    pub fn rho(rank: usize) -> Self {
        DynkinWeight {
            labels: vec![1; rank],
        }
    }

    /// Fundamental weight omega_k (1-based).
    pub fn fundamental(rank: usize, k: usize) -> Self {
        let mut labels = vec![0; rank];
        labels[k - 1] = 1;
        DynkinWeight { labels }
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn rank(&self) -> usize {
        self.labels.len()
    }

    /// n for su(n).
    pub fn n(&self) -> usize {
        self.labels.len() + 1
    }

    pub fn scaled(&self, s: u32) -> Self {
        DynkinWeight {
            labels: self.labels.iter().map(|l| l * s).collect(),
        }
    }

    pub fn plus(&self, other: &DynkinWeight) -> Self {
        let labels = self
            .labels
            .iter()
            .zip(&other.labels)
            .map(|(a, b)| a + b)
            .collect();
        DynkinWeight { labels }
    }

    /// GL(n) partition: part_i = sum_{j >= i} labels_j, last part 0.
    pub fn to_partition(&self) -> Vec<i64> {
        let n = self.n();
        let mut parts = vec![0i64; n];
        for i in (0..n - 1).rev() {
            parts[i] = parts[i + 1] + self.labels[i] as i64;
        }
        parts
    }

    /// Inverse of [`to_partition`](Self::to_partition) up to columns of height n.
    pub fn from_partition(parts: &[i64]) -> Self {
        let labels = parts.windows(2).map(|w| (w[0] - w[1]) as u32).collect();
        DynkinWeight { labels }
    }

    /// Sum of i * label_i, whose residue mod n is the congruence class.
    pub fn congruence(&self) -> u64 {
        self.labels
            .iter()
            .enumerate()
            .map(|(i, &l)| (i as u64 + 1) * l as u64)
            .sum()
    }
}

impl fmt::Display for DynkinWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.labels.iter().map(|l| l.to_string()).collect();
        write!(f, "({})", s.join(","))
    }
}

/// Half the Dyson index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Theta {
    #[serde(rename = "1/2")]
    Half,
    #[serde(rename = "1")]
    One,
    #[serde(rename = "2")]
    Two,
}

impl Theta {
    pub fn as_f64(self) -> f64 {
        match self {
            Theta::Half => 0.5,
            Theta::One => 1.0,
            Theta::Two => 2.0,
        }
    }

    /// Exact value as (numerator, denominator).
    pub fn as_ratio(self) -> (u32, u32) {
        match self {
            Theta::Half => (1, 2),
            Theta::One => (1, 1),
            Theta::Two => (2, 1),
        }
    }
}

/// Compact group acting on the orbits: SO(n), SU(n) or USp(n).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GroupClass {
    So,
    Su,
    Usp,
}

impl GroupClass {
    pub fn theta(self) -> Theta {
        match self {
            GroupClass::So => Theta::Half,
            GroupClass::Su => Theta::One,
            GroupClass::Usp => Theta::Two,
        }
    }

    pub fn from_theta(theta: Theta) -> Self {
        match theta {
            Theta::Half => GroupClass::So,
            Theta::One => GroupClass::Su,
            Theta::Two => GroupClass::Usp,
        }
    }

    pub fn name(self, n: usize) -> String {
        match self {
            GroupClass::So => format!("SO({n})"),
            GroupClass::Su => format!("SU({n})"),
            GroupClass::Usp => format!("USp({n})"),
        }
    }
}

impl std::str::FromStr for GroupClass {
    type Err = HornError;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "so" | "o" | "real" | "1/2" => Ok(GroupClass::So),
            "su" | "u" | "complex" | "1" => Ok(GroupClass::Su),
            "usp" | "sp" | "quaternion" | "2" => Ok(GroupClass::Usp),
            other => Err(HornError::InvalidArgument(format!(
                "unknown group '{other}'"
            ))),
        }
    }
}

/// Exact zero-trace spectrum with consecutive differences equal to the labels.
pub fn weight_to_rational_spectrum(w: &DynkinWeight) -> Vec<BigRational> {
    let parts = w.to_partition();
    let n = parts.len() as i64;
    let total: i64 = parts.iter().sum();
    parts
        .iter()
        .map(|&p| int(p) - BigRational::new(total.into(), n.into()))
        .collect()
}

pub fn weight_to_spectrum(w: &DynkinWeight) -> Spectrum {
    let values = weight_to_rational_spectrum(w)
        .iter()
        .map(|r| ToPrimitive::to_f64(r).unwrap_or(f64::NAN))
        .collect();
    Spectrum {
        values,
        traceless: true,
    }
}

/// Recovers the weight of a decreasing rational spectrum with integer gaps.
pub fn rational_spectrum_to_weight(s: &[BigRational]) -> Option<DynkinWeight> {
    let mut labels = Vec::with_capacity(s.len().saturating_sub(1));
    for w in s.windows(2) {
        let d = &w[0] - &w[1];
        if !d.is_integer() || d < BigRational::zero() {
            return None;
        }
        labels.push(d.to_integer().to_u32()?);
    }
    Some(DynkinWeight::new(labels))
}

/// Adds (`+1`) or subtracts (`-1`) the Weyl vector.
pub fn rho_shift(w: &DynkinWeight, direction: i32) -> Result<DynkinWeight> {
    let mut labels = Vec::with_capacity(w.rank());
    for (index, &l) in w.labels().iter().enumerate() {
        let v = l as i64 + direction.signum() as i64;
        if v < 0 {
            return Err(HornError::Dominance { index });
        }
        labels.push(v as u32);
    }
    Ok(DynkinWeight::new(labels))
}

/// prod_{i<j} (s_i - s_j).
pub fn vandermonde<T: Scalar>(s: &[T]) -> T {
    let mut prod = T::one();
    for i in 0..s.len() {
        for j in i + 1..s.len() {
            prod = prod * (s[i].clone() - s[j].clone());
        }
    }
    prod
}

/// Pairs (i, j), 1-based, with gamma_{i+j-1} > alpha_i + beta_j + tol.
pub fn weyl_check(
    alpha: &Spectrum,
    beta: &Spectrum,
    gamma: &Spectrum,
    tol: f64,
) -> Result<Vec<(usize, usize)>> {
    let n = alpha.n();
    check_len(n, beta.n())?;
    check_len(n, gamma.n())?;
    Ok(weyl_violations(
        alpha.values(),
        beta.values(),
        gamma.values(),
        tol,
    ))
}

/// Same as [`weyl_check`] on raw decreasing slices.
pub fn weyl_violations(a: &[f64], b: &[f64], g: &[f64], tol: f64) -> Vec<(usize, usize)> {
    let n = a.len();
    let mut out = Vec::new();
    for i in 1..=n {
        for j in 1..=n + 1 - i {
            if g[i + j - 2] > a[i - 1] + b[j - 1] + tol {
                out.push((i, j));
            }
        }
    }
    out
}

/// A candidate wall sum_{k in K} gamma_k = sum_{i in I} alpha_i + sum_{j in J} beta_j.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HyperplaneTriple {
    /// 1-based, strictly increasing.
    pub i: Vec<usize>,
    pub j: Vec<usize>,
    pub k: Vec<usize>,
    pub constant: f64,
}

impl HyperplaneTriple {
    /// Signed residual sum_K gamma_k - constant for a full gamma vector.
    pub fn residual(&self, gamma: &[f64]) -> f64 {
        self.k.iter().map(|&k| gamma[k - 1]).sum::<f64>() - self.constant
    }

    /// Euclidean distance in the coordinates (gamma_1..gamma_{n-1}), where the
    /// last eigenvalue is fixed by the trace.  `None` if the wall is parallel
    /// to the trace constraint (|K| = n).
    pub fn distance(&self, gamma: &[f64]) -> Option<f64> {
        let n = gamma.len();
        let in_k = |i: usize| self.k.contains(&i) as i32 as f64;
        let norm2: f64 = (1..n).map(|i| (in_k(i) - in_k(n)).powi(2)).sum();
        if norm2 == 0.0 {
            return None;
        }
        Some(self.residual(gamma).abs() / norm2.sqrt())
    }
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..=n {
            if n + 1 - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(1, n, k, &mut Vec::new(), &mut out);
    out
}

/// All candidate walls with |I|=|J|=|K| <= max_card, deduplicated by
/// (K, constant rounded to 12 decimals).
pub fn singular_hyperplanes(
    alpha: &Spectrum,
    beta: &Spectrum,
    max_card: usize,
) -> Result<Vec<HyperplaneTriple>> {
    let n = alpha.n();
    check_len(n, beta.n())?;
    if max_card == 0 || max_card > n {
        return Err(HornError::InvalidArgument(format!(
            "max_card must be in 1..={n}"
        )));
    }
    let (a, b) = (alpha.values(), beta.values());
    let mut seen: BTreeMap<(Vec<usize>, i64), ()> = BTreeMap::new();
    let mut out = Vec::new();
    for card in 1..=max_card {
        let sets = subsets(n, card);
        for ii in &sets {
            let sa: f64 = ii.iter().map(|&i| a[i - 1]).sum();
            for jj in &sets {
                let constant = sa + jj.iter().map(|&j| b[j - 1]).sum::<f64>();
                let key_c = (constant * 1e12).round() as i64;
                for kk in &sets {
                    if seen.insert((kk.clone(), key_c), ()).is_none() {
                        out.push(HyperplaneTriple {
                            i: ii.clone(),
                            j: jj.clone(),
                            k: kk.clone(),
                            constant,
                        });
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Permutahedron membership via majorization.
pub fn permutahedron_contains(alpha: &Spectrum, xi: &[f64], tol: f64) -> Result<bool> {
    let n = alpha.n();
    check_len(n, xi.len())?;
    let (sa, sx) = (alpha.trace(), xi.iter().sum::<f64>());
    if (sa - sx).abs() > tol {
        return Err(HornError::SumMismatch {
            left: sa,
            right: sx,
        });
    }
    let mut sorted = xi.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let (mut pa, mut px) = (0.0, 0.0);
    for k in 0..n - 1 {
        pa += alpha.values()[k];
        px += sorted[k];
        if px > pa + tol {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    fn spectrum_of(v: &[f64]) -> Spectrum {
        Spectrum::new(v.to_vec(), false).unwrap()
    }

    #[test]
    fn make_spectrum_sorts_and_checks_trace() {
        let s = Spectrum::new(vec![0.0, 1.0, -1.0], true).unwrap();
        assert_eq!(s.values(), &[1.0, 0.0, -1.0]);
        assert!(matches!(
            Spectrum::new(vec![1.0, 1.0], true),
            Err(HornError::Trace { .. })
        ));
        assert!(Spectrum::new(vec![], false).is_err());
    }

    #[test]
    fn weights_to_spectra() {
        let w = weight_to_rational_spectrum(&DynkinWeight::new(vec![1, 1]));
        assert_eq!(w, vec![int(1), int(0), int(-1)]);
        let w = weight_to_rational_spectrum(&DynkinWeight::new(vec![2, 2]));
        assert_eq!(w, vec![int(2), int(0), int(-2)]);
        let w = weight_to_rational_spectrum(&DynkinWeight::new(vec![1, 0, 0]));
        assert_eq!(w, vec![rat(3, 4), rat(-1, 4), rat(-1, 4), rat(-1, 4)]);
        let back = rational_spectrum_to_weight(&w).unwrap();
        assert_eq!(back, DynkinWeight::new(vec![1, 0, 0]));
    }

    #[test]
    fn rho_shifts() {
        let w = DynkinWeight::new(vec![1, 1]);
        assert_eq!(rho_shift(&w, 1).unwrap(), DynkinWeight::new(vec![2, 2]));
        assert_eq!(
            rho_shift(&DynkinWeight::zero(2), 1).unwrap(),
            DynkinWeight::rho(2)
        );
        assert_eq!(
            rho_shift(&DynkinWeight::new(vec![0, 1]), -1),
            Err(HornError::Dominance { index: 0 })
        );
    }

    #[test]
    fn vandermonde_values() {
        assert_eq!(vandermonde(&[1.0, 0.0, -1.0]), 2.0);
        assert_eq!(vandermonde(&[2.0, 0.0, -2.0]), 16.0);
        assert_eq!(vandermonde(&[2.0, 1.0, 1.0]), 0.0);
    }

    #[test]
    fn weyl_inequalities() {
        let a = spectrum_of(&[1.0, 0.0, -1.0]);
        assert!(weyl_check(&a, &a, &spectrum_of(&[2.0, 0.0, -2.0]), 0.0)
            .unwrap()
            .is_empty());
        assert!(weyl_check(&a, &a, &spectrum_of(&[3.0, -1.0, -2.0]), 0.0)
            .unwrap()
            .contains(&(1, 1)));
        let z = spectrum_of(&[0.0, 0.0, 0.0]);
        assert!(weyl_check(&a, &z, &a, 0.0).unwrap().is_empty());
        assert!(weyl_check(&a, &spectrum_of(&[0.0, 0.0]), &a, 0.0).is_err());
    }

    #[test]
    fn hyperplane_enumeration() {
        let a = spectrum_of(&[1.0, 0.0, -1.0]);
        let h = singular_hyperplanes(&a, &a, 1).unwrap();
        assert!(h.iter().any(|t| t.k == vec![1] && t.constant == 2.0));
        let b = spectrum_of(&[1.0, -1.0]);
        let h = singular_hyperplanes(&b, &b, 1).unwrap();
        for k in 1..=2 {
            let mut c: Vec<f64> = h
                .iter()
                .filter(|t| t.k == vec![k])
                .map(|t| t.constant)
                .collect();
            c.sort_by(f64::total_cmp);
            assert_eq!(c, vec![-2.0, 0.0, 2.0]);
        }
    }

    #[test]
    fn permutahedron() {
        let a = spectrum_of(&[1.0, 0.0, -1.0]);
        assert!(permutahedron_contains(&a, &[1.0, 0.0, -1.0], 1e-12).unwrap());
        assert!(permutahedron_contains(&a, &[0.0, -1.0, 1.0], 1e-12).unwrap());
        assert!(!permutahedron_contains(&a, &[1.5, 0.0, -1.5], 1e-12).unwrap());
        assert!(permutahedron_contains(&a, &[1.0, 0.0, 0.0], 1e-12).is_err());
    }

    #[test]
    fn partitions_roundtrip() {
        let w = DynkinWeight::new(vec![21, 13, 5]);
        assert_eq!(w.to_partition(), vec![39, 18, 5, 0]);
        assert_eq!(DynkinWeight::from_partition(&[39, 18, 5, 0]), w);
    }
}
