//! Sparse multivariate polynomials with exact rational coefficients.

use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

type Q = BigRational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MPoly {
    nvars: usize,
    terms: BTreeMap<Vec<u16>, Q>,
}

impl MPoly {
    pub fn zero(nvars: usize) -> Self {
        MPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: Q) -> Self {
        let mut p = MPoly::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        let mut p = MPoly::zero(nvars);
        p.add_term(e, Q::one());
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u16], &Q)> {
        self.terms.iter().map(|(e, c)| (e.as_slice(), c))
    }

    pub fn add_term(&mut self, exps: Vec<u16>, c: Q) {
        debug_assert_eq!(exps.len(), self.nvars);
        if c.is_zero() {
            return;
        }
        match self.terms.entry(exps) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &Q) -> Self {
        if c.is_zero() {
            return MPoly::zero(self.nvars);
        }
        MPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect(),
        }
    }

    pub fn degree_in(&self, i: usize) -> u16 {
        self.terms.keys().map(|e| e[i]).max().unwrap_or(0)
    }

    /// Coefficient of x_i^k, as a polynomial in the same variables (x_i absent).
    pub fn coefficient_of(&self, i: usize, k: u16) -> Self {
        let mut out = MPoly::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[i] == k {
                let mut e = e.clone();
                e[i] = 0;
                out.add_term(e, c.clone());
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = MPoly::constant(self.nvars, Q::one());
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    pub fn derivative(&self, i: usize) -> Self {
        let mut out = MPoly::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[i] > 0 {
                let mut e2 = e.clone();
                e2[i] -= 1;
                out.add_term(e2, c * Q::from_integer(e[i].into()));
            }
        }
        out
    }

    /// Rewrites s^k as s^(k mod 2) (1 - c^2)^(k div 2).
    pub fn reduce_pythagorean(&self, s: usize, c: usize) -> Self {
        let mut out = MPoly::zero(self.nvars);
        for (e, coef) in &self.terms {
            let half = e[s] / 2;
            let mut base = e.clone();
            base[s] %= 2;
            // (1 - c^2)^half = sum_k binom(half,k) (-1)^k c^(2k)
            let mut binom = Q::one();
            for k in 0..=half {
                let mut ek = base.clone();
                ek[c] += 2 * k;
                let sign = if k % 2 == 0 { Q::one() } else { -Q::one() };
                out.add_term(ek, coef * &binom * sign);
                binom =
                    binom * Q::from_integer((half - k).into()) / Q::from_integer((k + 1).into());
            }
        }
        out
    }

    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| {
                let m: f64 = e.iter().zip(x).map(|(&k, &v)| v.powi(k as i32)).product();
                c.to_f64().unwrap_or(f64::NAN) * m
            })
            .sum()
    }

    pub fn eval_exact(&self, x: &[Q]) -> Q {
        self.terms
            .iter()
            .map(|(e, c)| {
                let mut m = c.clone();
                for (&k, v) in e.iter().zip(x) {
                    for _ in 0..k {
                        m *= v;
                    }
                }
                m
            })
            .sum()
    }

    /// Substitutes exact values for some variables (None keeps the variable).
    pub fn substitute(&self, values: &[Option<Q>]) -> Self {
        let mut out = MPoly::zero(self.nvars);
        for (e, c) in &self.terms {
            let mut coef = c.clone();
            let mut e2 = e.clone();
            for (i, v) in values.iter().enumerate() {
                if let Some(v) = v {
                    for _ in 0..e[i] {
                        coef *= v;
                    }
                    e2[i] = 0;
                }
            }
            out.add_term(e2, coef);
        }
        out
    }

    /// Keeps only the listed variables, in the given order.  Every other
    /// variable must be absent.
    pub fn project(&self, keep: &[usize]) -> Option<Self> {
        let mut out = MPoly::zero(keep.len());
        for (e, c) in &self.terms {
            if e.iter()
                .enumerate()
                .any(|(i, &k)| k > 0 && !keep.contains(&i))
            {
                return None;
            }
            out.add_term(keep.iter().map(|&i| e[i]).collect(), c.clone());
        }
        Some(out)
    }

    /// Applies `f` to every exponent vector (used for u = c^2 style maps).
    pub fn map_exponents(&self, nvars: usize, f: impl Fn(&[u16]) -> Vec<u16>) -> Self {
        let mut out = MPoly::zero(nvars);
        for (e, c) in &self.terms {
            out.add_term(f(e), c.clone());
        }
        out
    }
}

impl Add for &MPoly {
    type Output = MPoly;
    fn add(self, rhs: &MPoly) -> MPoly {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl Sub for &MPoly {
    type Output = MPoly;
    fn sub(self, rhs: &MPoly) -> MPoly {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), -c.clone());
        }
        out
    }
}

impl Neg for &MPoly {
    type Output = MPoly;
    fn neg(self) -> MPoly {
        self.scale(&-Q::one())
    }
}

impl Mul for &MPoly {
    type Output = MPoly;
    fn mul(self, rhs: &MPoly) -> MPoly {
        let mut acc: BTreeMap<Vec<u16>, Q> = BTreeMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let e: Vec<u16> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                *acc.entry(e).or_insert_with(Q::zero) += ca * cb;
            }
        }
        acc.retain(|_, v| !v.is_zero());
        MPoly {
            nvars: self.nvars,
            terms: acc,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rat};

    #[test]
    fn arithmetic_and_cancellation() {
        let x = MPoly::var(2, 0);
        let y = MPoly::var(2, 1);
        let s = &x + &y;
        let d = &x - &y;
        let prod = &s * &d;
        let expect = &x.pow(2) - &y.pow(2);
        assert_eq!(prod, expect);
        assert!((&prod - &expect).is_zero());
        assert_eq!(prod.eval_exact(&[int(3), rat(1, 2)]), rat(35, 4));
    }

    #[test]
    fn pythagorean_reduction() {
        // s^4 + 2 s^2 c^2 + c^4 = 1
        let s = MPoly::var(2, 0);
        let c = MPoly::var(2, 1);
        let one = &s.pow(2) + &c.pow(2);
        let p = one.pow(2).reduce_pythagorean(0, 1);
        assert_eq!(p, MPoly::constant(2, int(1)));
    }

    #[test]
    fn derivative_and_coefficients() {
        let x = MPoly::var(2, 0);
        let y = MPoly::var(2, 1);
        let p = &(&x.pow(3) * &y) + &x.scale(&int(5));
        assert_eq!(p.derivative(0).eval_exact(&[int(2), int(1)]), int(17));
        assert_eq!(p.coefficient_of(0, 3), y);
        assert_eq!(p.degree_in(0), 3);
    }
}
