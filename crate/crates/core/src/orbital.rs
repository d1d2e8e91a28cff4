//! The unitary orbital integral (HCIZ), Weyl characters of su(n), and a
//! Fourier-inversion evaluation of the n=2 Horn density.

use crate::error::{check_len, HornError, Result};
use crate::quad::GaussLegendre;
use crate::spectra::DynkinWeight;
use nalgebra::{Complex, DMatrix};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::sync::OnceLock;

type C64 = Complex<f64>;

const I: C64 = Complex { re: 0.0, im: 1.0 };

pub const DEFAULT_CONFLUENCE_TOL: f64 = 1e-3;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrbitalArgs {
    pub alpha: Vec<f64>,
    pub x: Vec<f64>,
    pub confluence_tol: f64,
}

impl OrbitalArgs {
    pub fn new(alpha: Vec<f64>, x: Vec<f64>) -> Result<Self> {
        check_len(alpha.len(), x.len())?;
        Ok(OrbitalArgs {
            alpha,
            x,
            confluence_tol: DEFAULT_CONFLUENCE_TOL,
        })
    }
}

fn factorial_product(n: usize) -> f64 {
    let mut prod = 1.0;
    let mut f = 1.0;
    for p in 1..n {
        f *= p as f64;
        prod *= f;
    }
    prod
}

fn min_gap(v: &[f64]) -> f64 {
    let mut g = f64::INFINITY;
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            g = g.min((v[i] - v[j]).abs());
        }
    }
    g
}

fn det_small(m: &DMatrix<C64>) -> C64 {
    match m.nrows() {
        0 => C64::one(),
        1 => m[(0, 0)],
        2 => m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)],
        3 => {
            m[(0, 0)] * (m[(1, 1)] * m[(2, 2)] - m[(1, 2)] * m[(2, 1)])
                - m[(0, 1)] * (m[(1, 0)] * m[(2, 2)] - m[(1, 2)] * m[(2, 0)])
                + m[(0, 2)] * (m[(1, 0)] * m[(2, 1)] - m[(1, 1)] * m[(2, 0)])
        }
        _ => m.clone().lu().determinant(),
    }
}

/// i^k for integer k >= 0.
fn i_pow(k: usize) -> C64 {
    match k % 4 {
        0 => C64::new(1.0, 0.0),
        1 => I,
        2 => C64::new(-1.0, 0.0),
        _ => -I,
    }
}

/// H(alpha, i x) = prod p! det(e^{i x_k alpha_l}) / (Delta(i x) Delta(alpha)).
pub fn hciz(args: &OrbitalArgs) -> C64 {
    let (a, x) = (&args.alpha, &args.x);
    let n = a.len();
    if n == 1 {
        return (I * x[0] * a[0]).exp();
    }
    if x.iter().all(|&v| v == 0.0) {
        return C64::one();
    }
    let tol = args.confluence_tol;
    if min_gap(a) < tol || min_gap(x) < tol {
        hciz_confluent(a, x)
    } else {
        hciz_generic(a, x)
    }
}

fn hciz_generic(a: &[f64], x: &[f64]) -> C64 {
    let n = a.len();
    let m = DMatrix::from_fn(n, n, |k, l| (I * x[k] * a[l]).exp());
    let mut denom = C64::one();
    for i in 0..n {
        for j in i + 1..n {
            denom *= I * (x[i] - x[j]) * (a[i] - a[j]);
        }
    }
    det_small(&m) * factorial_product(n) / denom
}

/// Divided differences of e^{i x alpha} in both arguments, read off the
/// exponential of i (B_x kron B_alpha) with B lower bidiagonal (nodes on the
/// diagonal, ones below).  Exact in the confluent limit.
fn hciz_confluent(a: &[f64], x: &[f64]) -> C64 {
    let n = a.len();
    let bidiag = |nodes: &[f64]| {
        DMatrix::<f64>::from_fn(n, n, |r, c| {
            if r == c {
                nodes[r]
            } else if r == c + 1 {
                1.0
            } else {
                0.0
            }
        })
    };
    let k = bidiag(x).kronecker(&bidiag(a));
    let e = k.map(|v| I * v).exp();
    let d = DMatrix::from_fn(n, n, |r, c| e[(r * n + c, 0)]);
    let big_n = n * (n - 1) / 2;
    det_small(&d) * factorial_product(n) / i_pow(big_n)
}

/// Delta_g(i x) = prod_{i<j} i (x_i - x_j).
pub fn delta_g(x: &[f64]) -> C64 {
    let mut p = C64::one();
    for i in 0..x.len() {
        for j in i + 1..x.len() {
            p *= I * (x[i] - x[j]);
        }
    }
    p
}

/// Delta-hat_g(e^{i x}) = prod_{i<j} (e^{i(x_i-x_j)/2} - e^{-i(x_i-x_j)/2}).
pub fn delta_hat(x: &[f64]) -> C64 {
    let mut p = C64::one();
    for i in 0..x.len() {
        for j in i + 1..x.len() {
            p *= I * 2.0 * ((x[i] - x[j]) / 2.0).sin();
        }
    }
    p
}

fn binomial(n: i64, k: i64) -> BigInt {
    if k < 0 || n < k {
        return BigInt::zero();
    }
    let mut r = BigInt::one();
    for i in 0..k {
        r = r * (n - i) / (i + 1);
    }
    r
}

/// Weyl dimension formula: prod_{i<j} (l_i - l_j + j - i) / (j - i).
pub fn weyl_dimension(w: &DynkinWeight) -> BigInt {
    let p = w.to_partition();
    let n = p.len();
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..n {
        for j in i + 1..n {
            num *= BigInt::from(p[i] - p[j] + (j - i) as i64);
            den *= BigInt::from((j - i) as i64);
        }
    }
    num / den
}

fn det_rational(mut m: Vec<Vec<BigRational>>) -> BigRational {
    let n = m.len();
    let mut det = BigRational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !m[r][c].is_zero()) else {
            return BigRational::zero();
        };
        if p != c {
            m.swap(p, c);
            det = -det;
        }
        let pivot = m[c][c].clone();
        det *= &pivot;
        for r in c + 1..n {
            if m[r][c].is_zero() {
                continue;
            }
            let f = &m[r][c] / &pivot;
            for k in c..n {
                let v = &f * &m[c][k];
                m[r][k] -= v;
            }
        }
    }
    det
}

fn jacobi_trudi_at_identity(parts: &[i64], n: usize) -> BigInt {
    let l = parts.iter().take_while(|&&p| p > 0).count();
    let m: Vec<Vec<BigRational>> = (0..l)
        .map(|i| {
            (0..l)
                .map(|j| {
                    let k = parts[i] - i as i64 + j as i64;
                    BigRational::from_integer(binomial(n as i64 + k - 1, k))
                })
                .collect()
        })
        .collect();
    det_rational(m).to_integer()
}

/// Complete homogeneous symmetric polynomials h_0..=h_max of z.
fn complete_homogeneous(z: &[C64], max: usize) -> Vec<C64> {
    let mut h = vec![C64::zero(); max + 1];
    h[0] = C64::one();
    for &zi in z {
        for k in 1..=max {
            let prev = h[k - 1];
            h[k] += zi * prev;
        }
    }
    h
}

fn jacobi_trudi(parts: &[i64], z: &[C64]) -> C64 {
    let l = parts.iter().take_while(|&&p| p > 0).count();
    if l == 0 {
        return C64::one();
    }
    let max = (parts[0] + l as i64) as usize;
    let h = complete_homogeneous(z, max);
    let m = DMatrix::from_fn(l, l, |i, j| {
        let k = parts[i] - i as i64 + j as i64;
        if k < 0 {
            C64::zero()
        } else {
            h[k as usize]
        }
    });
    det_small(&m)
}

/// Character of the irreducible su(n) representation with highest weight `w`
/// at the torus element e^{i x}, by the Weyl determinant ratio (Jacobi-Trudi
/// near the walls of the torus, exact integers at the identity).
pub fn weyl_character_su(w: &DynkinWeight, x: &[f64]) -> Result<C64> {
    let n = w.n();
    check_len(n, x.len())?;
    let scale = x.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let sum: f64 = x.iter().sum();
    if sum.abs() > 1e-9 * scale {
        return Err(HornError::InvalidArgument(format!(
            "torus argument must sum to zero, got {sum}"
        )));
    }
    let parts = w.to_partition();
    if x.iter().all(|&v| v == 0.0) {
        let d = jacobi_trudi_at_identity(&parts, n);
        return Ok(C64::new(d.to_f64().unwrap_or(f64::NAN), 0.0));
    }
    let z: Vec<C64> = x.iter().map(|&v| (I * v).exp()).collect();
    let vdm = DMatrix::from_fn(n, n, |i, j| z[i].powi((n - 1 - j) as i32));
    let denom = det_small(&vdm);
    if denom.norm() < 1e-6 {
        return Ok(jacobi_trudi(&parts, &z));
    }
    let numer = DMatrix::from_fn(n, n, |i, j| {
        z[i].powi((parts[j] + (n - 1 - j) as i64) as i32)
    });
    Ok(det_small(&numer) / denom)
}

/// Left minus right side of chi_w / dim = Delta_g(ix)/Delta-hat_g(e^{ix}) H(w+rho, ix).
pub fn character_relation_residual(w: &DynkinWeight, x: &[f64]) -> Result<f64> {
    let chi = weyl_character_su(w, x)?;
    let dim = weyl_dimension(w).to_f64().unwrap_or(f64::NAN);
    let shifted = crate::spectra::weight_to_spectrum(&w.plus(&DynkinWeight::rho(w.rank())));
    let h = hciz(&OrbitalArgs::new(shifted.values().to_vec(), x.to_vec())?);
    let rhs = delta_g(x) / delta_hat(x) * h;
    Ok((chi / dim - rhs).norm())
}

const FOURIER_TARGET: f64 = 1e-3;

struct FourierIntegral {
    value: f64,
    tail: f64,
}

/// int_{-T}^{T} (2t)^2 H(alpha, ix) H(beta, ix) conj H(gamma, ix) dt, x = (t, -t).
fn fourier_integral(a: &[f64], b: &[f64], g: &[f64], cutoff: f64, order: usize) -> FourierIntegral {
    let (a12, b12, g12) = (a[0] - a[1], b[0] - b[1], g[0] - g[1]);
    let omega_max = a12.abs() + b12.abs() + g12.abs();
    let mut omega_min = f64::INFINITY;
    for sa in [-1.0, 1.0] {
        for sb in [-1.0, 1.0] {
            let w = (sa * a12 + sb * b12 + g12).abs();
            if w > 1e-12 {
                omega_min = omega_min.min(w);
            }
        }
    }
    let rule = GaussLegendre::new(order.max(2));
    let width = (std::f64::consts::PI / omega_max.max(1e-12)).min(1.0) / 2.0;
    let panels = (cutoff / width).ceil().max(1.0) as usize;
    let h = cutoff / panels as f64;
    let tail_zone = if omega_min.is_finite() {
        cutoff - 2.0 * std::f64::consts::PI / omega_min
    } else {
        0.0
    };
    let integrand = |t: f64| {
        let hp = |s: &[f64]| hciz_generic_or_confluent(s, t);
        let hm = |s: &[f64]| hciz_generic_or_confluent(s, -t);
        4.0 * t * t * ((hp(a) * hp(b) * hp(g).conj()).re + (hm(a) * hm(b) * hm(g).conj()).re)
    };
    let mut value = 0.0;
    let mut envelope = 0.0f64;
    for p in 0..panels {
        let lo = p as f64 * h;
        let hi = lo + h;
        value += rule.integrate(lo, hi, |t| {
            let v = integrand(t);
            if t >= tail_zone {
                envelope = envelope.max(v.abs());
            }
            v
        });
    }
    let tail = if omega_min.is_finite() {
        envelope / omega_min
    } else {
        f64::INFINITY
    };
    FourierIntegral { value, tail }
}

fn hciz_generic_or_confluent(s: &[f64], t: f64) -> C64 {
    hciz(&OrbitalArgs {
        alpha: s.to_vec(),
        x: vec![t, -t],
        confluence_tol: DEFAULT_CONFLUENCE_TOL,
    })
}

fn fourier_normalization() -> f64 {
    static K: OnceLock<f64> = OnceLock::new();
    *K.get_or_init(|| {
        let a = [1.0, -1.0];
        let rule = GaussLegendre::new(32);
        let mass = rule.integrate(0.0, 2.0, |g1| {
            let g = [g1, -g1];
            (2.0 * g1).powi(2) * fourier_integral(&a, &a, &g, 2000.0, 8).value
        });
        1.0 / mass
    })
}

/// n=2 Horn density of gamma_1 (sorted gamma) by truncated Fourier inversion
/// of the orbital integrals, with the Jacobian |Delta(gamma)|^2.  The overall
/// constant is fixed once so that the density integrates to one.
pub fn pdf_fourier_check(
    alpha: &[f64],
    beta: &[f64],
    gamma: &[f64],
    cutoff: f64,
    quadrature_order: usize,
) -> Result<f64> {
    if alpha.len() != 2 || beta.len() != 2 || gamma.len() != 2 {
        return Err(HornError::InvalidArgument(
            "Fourier check is implemented for n = 2 only".into(),
        ));
    }
    let tr = |v: &[f64]| v[0] + v[1];
    let centre = |v: &[f64]| {
        let m = tr(v) / 2.0;
        [v[0] - m, v[1] - m]
    };
    if (tr(alpha) + tr(beta) - tr(gamma)).abs() > 1e-9 * (1.0 + alpha[0].abs() + beta[0].abs()) {
        return Ok(0.0);
    }
    let (a, b, g) = (centre(alpha), centre(beta), centre(gamma));
    let fi = fourier_integral(&a, &b, &g, cutoff, quadrature_order);
    let k = fourier_normalization();
    let jac = (g[0] - g[1]).powi(2);
    let tail = k * jac * fi.tail;
    if tail > FOURIER_TARGET {
        return Err(HornError::CutoffTooSmall {
            tail,
            target: FOURIER_TARGET,
        });
    }
    Ok(k * jac * fi.value)
}
