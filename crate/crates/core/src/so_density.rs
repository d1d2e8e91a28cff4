//! Real symmetric orbits under SO(2) and SO(3).
//!
//! For SO(3) with traceless 3x3 spectra, the eigenvalues of
//! C = diag(alpha) + R diag(beta) R^T are traded for p = sum gamma_i gamma_j and
//! q = -gamma_1 gamma_2 gamma_3.  With Euler angles R = Rz(phi) Ry(theta) Rz(psi),
//! the coefficients P(R), Q(R) of det(z - C) = z^3 + P z + Q are quadratics in
//! c = cos(theta), and their resultant in c is a polynomial R(u, z) in
//! u = cos^2(phi), z = cos^2(psi).  For alpha = beta = (1, 0, -1),
//!
//!   rho(p, q) = 2/pi^2 int_0^1 dz sum_{R(u_i, z) = 0, u_i in [0, 1]} (2 + u_i + z) / |R_u(u_i, z)|
//!
//! and the density of the ordered (gamma_1, gamma_2) is |Delta(gamma)| rho(p, q).

use crate::error::{HornError, Result};
use crate::exec::{map_indexed, Execution};
use crate::poly::MPoly;
use crate::quad::{adaptive_smoothstep, GaussLegendre};
use crate::roots::real_roots_in;
use crate::spectra::{weyl_violations, Spectrum};
use nalgebra::{Matrix2, Matrix3, Vector2, Vector3};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::OnceLock;

type Q = BigRational;

// ---------------------------------------------------------------- SO(2)

/// Horn density of gamma_12 = gamma_1 - gamma_2 for SO(2) orbits with
/// gaps alpha_12, beta_12 > 0; zero outside [|a - b|, a + b].
pub fn so2_horn_pdf(alpha12: f64, beta12: f64, gamma12: f64) -> f64 {
    if alpha12 <= 0.0 || beta12 <= 0.0 {
        return 0.0;
    }
    let hi = alpha12 + beta12;
    let lo = (alpha12 - beta12).abs();
    if gamma12 <= lo || gamma12 >= hi {
        return 0.0;
    }
    2.0 / PI * gamma12 / ((hi * hi - gamma12 * gamma12) * (gamma12 * gamma12 - lo * lo)).sqrt()
}

/// Schur density of a diagonal entry of a 2x2 traceless real symmetric
/// matrix with eigenvalues (alpha_1, -alpha_1).
pub fn so2_schur_pdf(alpha1: f64, x: f64) -> f64 {
    if alpha1 <= 0.0 || x.abs() >= alpha1 {
        return 0.0;
    }
    1.0 / (PI * (alpha1 * alpha1 - x * x).sqrt())
}

// ------------------------------------------------------ symmetric functions

fn check_traceless3(s: &Spectrum) -> Result<()> {
    if s.n() != 3 {
        return Err(HornError::DimensionMismatch {
            expected: 3,
            found: s.n(),
        });
    }
    let tol = 1e-12 * s.max_abs().max(1.0);
    if s.trace().abs() > tol {
        return Err(HornError::Trace {
            trace: s.trace(),
            tol,
        });
    }
    Ok(())
}

/// (p, q) with det(z - diag(gamma)) = z^3 + p z + q.
pub fn gamma_to_pq(gamma: &Spectrum) -> Result<(f64, f64)> {
    check_traceless3(gamma)?;
    let g = gamma.values();
    Ok(pq_of(g[0], g[1], g[2]))
}

fn pq_of(g1: f64, g2: f64, g3: f64) -> (f64, f64) {
    (g1 * g2 + g2 * g3 + g3 * g1, -g1 * g2 * g3)
}

/// Decreasing real roots of z^3 + p z + q.
pub fn pq_to_gamma(p: f64, q: f64) -> Result<[f64; 3]> {
    let disc = -4.0 * p * p * p - 27.0 * q * q;
    let scale = (4.0 * p.abs().powi(3))
        .max(27.0 * q * q)
        .max(f64::MIN_POSITIVE);
    if disc < -1e-12 * scale {
        return Err(HornError::NoRealTriple { p, q });
    }
    if p >= 0.0 {
        // only the triple root 0 survives the discriminant test
        let r = (-q).cbrt();
        return Ok([r, r, r]);
    }
    let m = 2.0 * (-p / 3.0).sqrt();
    let arg = (3.0 * q / (p * m)).clamp(-1.0, 1.0);
    let theta = arg.acos() / 3.0;
    let mut g = [0.0; 3];
    for (k, v) in g.iter_mut().enumerate() {
        *v = m * (theta - 2.0 * PI * k as f64 / 3.0).cos();
    }
    g.sort_by(|a, b| b.total_cmp(a));
    Ok(g)
}

/// Horn polygon membership for traceless 3x3 spectra: Weyl's upper bounds
/// and their duals.
pub fn in_horn_polygon3(alpha: &[f64], beta: &[f64], gamma: &[f64], tol: f64) -> bool {
    let neg = |v: &[f64]| -> Vec<f64> { v.iter().rev().map(|x| -x).collect() };
    weyl_violations(alpha, beta, gamma, tol).is_empty()
        && weyl_violations(&neg(alpha), &neg(beta), &neg(gamma), tol).is_empty()
}

// ------------------------------------------------------ symbolic machinery

const NV: usize = 8;
const C: usize = 0;
const S: usize = 1;
const CPHI: usize = 2;
const SPHI: usize = 3;
const CPSI: usize = 4;
const SPSI: usize = 5;
const PV: usize = 6;
const QV: usize = 7;

/// P(R) - p and Q(R) - q as quadratics in c = cos(theta).  Coefficients are
/// polynomials in cos/sin of phi and psi and in the symbols p, q.
#[derive(Clone, Debug)]
pub struct CharPolyPair {
    pub p_coeffs: [MPoly; 3],
    pub q_coeffs: [MPoly; 3],
}

impl CharPolyPair {
    /// (P_p(c), Q_q(c)) at concrete angles.
    pub fn eval(&self, phi: f64, theta: f64, psi: f64, p: f64, q: f64) -> (f64, f64) {
        let mut x = [0.0; NV];
        x[CPHI] = phi.cos();
        x[SPHI] = phi.sin();
        x[CPSI] = psi.cos();
        x[SPSI] = psi.sin();
        x[PV] = p;
        x[QV] = q;
        let c = theta.cos();
        let ev = |k: &[MPoly; 3]| k.iter().rev().fold(0.0, |acc, m| acc * c + m.eval_f64(&x));
        (ev(&self.p_coeffs), ev(&self.q_coeffs))
    }
}

fn exact(v: f64) -> Result<Q> {
    Q::from_float(v).ok_or_else(|| HornError::InvalidArgument(format!("non-finite eigenvalue {v}")))
}

type Mat3 = [[MPoly; 3]; 3];

fn matmul(a: &Mat3, b: &Mat3) -> Mat3 {
    std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            (0..3).fold(MPoly::zero(NV), |acc, k| &acc + &(&a[i][k] * &b[k][j]))
        })
    })
}

fn rot_z(c: usize, s: usize) -> Mat3 {
    let v = |i| MPoly::var(NV, i);
    let z = || MPoly::zero(NV);
    let one = || MPoly::constant(NV, Q::one());
    [[v(c), -&v(s), z()], [v(s), v(c), z()], [z(), z(), one()]]
}

fn rot_y() -> Mat3 {
    let v = |i| MPoly::var(NV, i);
    let z = || MPoly::zero(NV);
    let one = || MPoly::constant(NV, Q::one());
    [[v(C), z(), v(S)], [z(), one(), z()], [-&v(S), z(), v(C)]]
}

fn reduce_all(p: &MPoly) -> MPoly {
    p.reduce_pythagorean(S, C)
        .reduce_pythagorean(SPHI, CPHI)
        .reduce_pythagorean(SPSI, CPSI)
}

/// Symbolic characteristic coefficients for traceless 3x3 spectra.
pub fn char_poly_pair(alpha: &Spectrum, beta: &Spectrum) -> Result<CharPolyPair> {
    check_traceless3(alpha)?;
    check_traceless3(beta)?;
    let a: Vec<Q> = alpha
        .values()
        .iter()
        .map(|&v| exact(v))
        .collect::<Result<_>>()?;
    let b: Vec<Q> = beta
        .values()
        .iter()
        .map(|&v| exact(v))
        .collect::<Result<_>>()?;
    let r = matmul(&matmul(&rot_z(CPHI, SPHI), &rot_y()), &rot_z(CPSI, SPSI));
    let c: Mat3 = std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            let mut e = (0..3).fold(MPoly::zero(NV), |acc, k| {
                &acc + &(&r[i][k] * &r[j][k]).scale(&b[k])
            });
            if i == j {
                e = &e + &MPoly::constant(NV, a[i].clone());
            }
            e
        })
    });
    let mut tr_c2 = MPoly::zero(NV);
    for i in 0..3 {
        for j in 0..3 {
            tr_c2 = &tr_c2 + &(&c[i][j] * &c[j][i]);
        }
    }
    let minor =
        |i: usize, j: usize, k: usize, l: usize| &(&c[i][k] * &c[j][l]) - &(&c[i][l] * &c[j][k]);
    let det = &(&(&c[0][0] * &minor(1, 2, 1, 2)) - &(&c[0][1] * &minor(1, 2, 0, 2)))
        + &(&c[0][2] * &minor(1, 2, 0, 1));
    let half = Q::new(1.into(), 2.into());
    let pp = reduce_all(&(&tr_c2.scale(&-half) - &MPoly::var(NV, PV)));
    let qq = reduce_all(&(&(-&det) - &MPoly::var(NV, QV)));
    for (name, poly) in [("P", &pp), ("Q", &qq)] {
        if poly.degree_in(S) > 0 {
            return Err(HornError::ReductionFailure(format!(
                "{name} keeps an odd power of sin(theta)"
            )));
        }
        if poly.degree_in(C) > 2 {
            return Err(HornError::ReductionFailure(format!(
                "{name} has degree {} in cos(theta)",
                poly.degree_in(C)
            )));
        }
    }
    let coeffs = |p: &MPoly| std::array::from_fn(|k| p.coefficient_of(C, k as u16));
    Ok(CharPolyPair {
        p_coeffs: coeffs(&pp),
        q_coeffs: coeffs(&qq),
    })
}

/// Dense-in-exponents polynomial in (u, z) with exact coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BivariatePoly {
    coefficients: BTreeMap<(u16, u16), Q>,
}

impl BivariatePoly {
    pub fn coefficient(&self, du: u16, dz: u16) -> Q {
        self.coefficients
            .get(&(du, dz))
            .cloned()
            .unwrap_or_else(Q::zero)
    }

    pub fn coefficients(&self) -> &BTreeMap<(u16, u16), Q> {
        &self.coefficients
    }

    pub fn degree_u(&self) -> u16 {
        self.coefficients.keys().map(|k| k.0).max().unwrap_or(0)
    }

    pub fn degree_z(&self) -> u16 {
        self.coefficients.keys().map(|k| k.1).max().unwrap_or(0)
    }

    pub fn is_symmetric(&self) -> bool {
        self.coefficients
            .iter()
            .all(|(&(a, b), c)| self.coefficient(b, a) == *c)
    }

    pub fn eval(&self, u: f64, z: f64) -> f64 {
        self.coefficients
            .iter()
            .map(|(&(a, b), c)| {
                c.to_f64().unwrap_or(f64::NAN) * u.powi(a as i32) * z.powi(b as i32)
            })
            .sum()
    }
}

impl std::fmt::Display for BivariatePoly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut first = true;
        for (&(a, b), c) in self.coefficients.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})")?;
            if a > 0 {
                write!(f, "*u^{a}")?;
            }
            if b > 0 {
                write!(f, "*z^{b}")?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

// variable order in ResultantPoly: u, z, p, q
const RU: usize = 0;
const RZ: usize = 1;

/// R(u, z; p, q) with p and q still symbolic.
#[derive(Clone, Debug)]
pub struct ResultantPoly {
    poly: MPoly,
    terms: Vec<([i32; 4], f64)>,
}

/// Value and the derivatives used by the singular-point search.
#[derive(Clone, Copy, Debug, Default)]
struct Jet {
    r: f64,
    u: f64,
    z: f64,
    p: f64,
    q: f64,
    uu: f64,
    uz: f64,
    zz: f64,
    up: f64,
    uq: f64,
    zp: f64,
    zq: f64,
}

impl ResultantPoly {
    fn new(poly: MPoly) -> Self {
        let terms = poly
            .terms()
            .map(|(e, c)| {
                (
                    [e[0] as i32, e[1] as i32, e[2] as i32, e[3] as i32],
                    c.to_f64().unwrap_or(f64::NAN),
                )
            })
            .collect();
        ResultantPoly { poly, terms }
    }

    pub fn poly(&self) -> &MPoly {
        &self.poly
    }

    pub fn at(&self, p: &Q, q: &Q) -> BivariatePoly {
        let s = self
            .poly
            .substitute(&[None, None, Some(p.clone()), Some(q.clone())]);
        BivariatePoly {
            coefficients: s
                .terms()
                .map(|(e, c)| ((e[RU], e[RZ]), c.clone()))
                .collect(),
        }
    }

    /// Coefficients r[a][b] of u^a z^b at numeric (p, q).
    pub fn dense_at(&self, p: f64, q: f64) -> DenseR {
        let mut c = [[0.0; 5]; 5];
        for (e, v) in &self.terms {
            c[e[0] as usize][e[1] as usize] += v * p.powi(e[2]) * q.powi(e[3]);
        }
        DenseR { c }
    }

    pub fn eval(&self, u: f64, z: f64, p: f64, q: f64) -> f64 {
        self.jet(u, z, p, q).r
    }

    fn jet(&self, u: f64, z: f64, p: f64, q: f64) -> Jet {
        // x^k and its first two derivatives
        let pw = |x: f64, k: i32, d: i32| -> f64 {
            match d {
                0 => x.powi(k),
                1 if k >= 1 => k as f64 * x.powi(k - 1),
                2 if k >= 2 => (k * (k - 1)) as f64 * x.powi(k - 2),
                _ => 0.0,
            }
        };
        let mut j = Jet::default();
        for (e, c) in &self.terms {
            let m = |du, dz, dp, dq| {
                c * pw(u, e[0], du) * pw(z, e[1], dz) * pw(p, e[2], dp) * pw(q, e[3], dq)
            };
            j.r += m(0, 0, 0, 0);
            j.u += m(1, 0, 0, 0);
            j.z += m(0, 1, 0, 0);
            j.p += m(0, 0, 1, 0);
            j.q += m(0, 0, 0, 1);
            j.uu += m(2, 0, 0, 0);
            j.uz += m(1, 1, 0, 0);
            j.zz += m(0, 2, 0, 0);
            j.up += m(1, 0, 1, 0);
            j.uq += m(1, 0, 0, 1);
            j.zp += m(0, 1, 1, 0);
            j.zq += m(0, 1, 0, 1);
        }
        j
    }
}

/// Two roots of R(., z) closer than this are a double root up to round-off
/// (about sqrt of machine epsilon); the slope between them is not resolved.
pub const ROOT_SEPARATION_FLOOR: f64 = 1e-7;

/// R at fixed (p, q), for root finding in u.
#[derive(Clone, Copy, Debug)]
pub struct DenseR {
    c: [[f64; 5]; 5],
}

impl DenseR {
    /// Ascending coefficients of R(., z).
    pub fn in_u(&self, z: f64) -> [f64; 5] {
        std::array::from_fn(|a| self.c[a].iter().rev().fold(0.0, |acc, v| acc * z + v))
    }

    /// Roots of R(., z) in [0, 1].
    pub fn roots_u(&self, z: f64) -> Vec<f64> {
        real_roots_in(&self.in_u(z), 0.0, 1.0, 1e-10)
    }

    /// Roots of R(., z) in [0, 1] with |R_u| there, taken from the factored
    /// form.  Root distances are floored at [`ROOT_SEPARATION_FLOOR`].
    pub fn roots_with_slope(&self, z: f64) -> Vec<(f64, f64)> {
        let k = self.in_u(z);
        let roots = crate::roots::poly_roots(&k);
        let lc = k[roots.len()].abs();
        let mut out = Vec::new();
        for (i, a) in roots.iter().enumerate() {
            let tol = 1e-10;
            if a.im.abs() > 1e-8 * (1.0 + a.re.abs()) || a.re < -tol || a.re > 1.0 + tol {
                continue;
            }
            let slope = roots
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, b)| (a - b).norm().max(ROOT_SEPARATION_FLOOR))
                .product::<f64>()
                * lc;
            out.push((a.re.clamp(0.0, 1.0), slope));
        }
        out
    }

    pub fn du(&self, u: f64, z: f64) -> f64 {
        let k = self.in_u(z);
        (1..5).rev().fold(0.0, |acc, a| acc * u + a as f64 * k[a])
    }

    /// R, its gradient and Hessian at (u, z).
    fn hessian(&self, u: f64, z: f64) -> (f64, Vector2<f64>, Matrix2<f64>) {
        let mut v = 0.0;
        let mut g = Vector2::zeros();
        let mut h = Matrix2::zeros();
        let pw = |x: f64, k: usize, d: usize| -> f64 {
            if k < d {
                0.0
            } else {
                let f: f64 = (0..d).map(|i| (k - i) as f64).product();
                f * x.powi((k - d) as i32)
            }
        };
        for a in 0..5 {
            for b in 0..5 {
                let c = self.c[a][b];
                if c == 0.0 {
                    continue;
                }
                let m = |du, dz| c * pw(u, a, du) * pw(z, b, dz);
                v += m(0, 0);
                g[0] += m(1, 0);
                g[1] += m(0, 1);
                h[(0, 0)] += m(2, 0);
                h[(0, 1)] += m(1, 1);
                h[(1, 1)] += m(0, 2);
            }
        }
        h[(1, 0)] = h[(0, 1)];
        (v, g, h)
    }

    fn scale(&self) -> f64 {
        self.c
            .iter()
            .flatten()
            .map(|v| v.abs())
            .sum::<f64>()
            .max(1e-300)
    }
}

/// Eliminates c: (a2 b0 - a0 b2)^2 - (a2 b1 - a1 b2)(a1 b0 - a0 b1), reduced to
/// u = cos^2 phi, z = cos^2 psi.  Surviving odd trigonometric powers are an
/// error.
pub fn resultant_r(pair: &CharPolyPair) -> Result<ResultantPoly> {
    let [a0, a1, a2] = &pair.p_coeffs;
    let [b0, b1, b2] = &pair.q_coeffs;
    let x = &(a2 * b0) - &(a0 * b2);
    let y = &(a2 * b1) - &(a1 * b2);
    let w = &(a1 * b0) - &(a0 * b1);
    let res = reduce_all(&(&(&x * &x) - &(&y * &w)));
    if res.degree_in(C) > 0 || res.degree_in(S) > 0 {
        return Err(HornError::ReductionFailure(
            "theta survives the elimination".into(),
        ));
    }
    if res.degree_in(SPHI) > 0 || res.degree_in(SPSI) > 0 {
        return Err(HornError::ReductionFailure(
            "odd power of sin(phi) or sin(psi) survives".into(),
        ));
    }
    if res
        .terms()
        .any(|(e, _)| e[CPHI] % 2 == 1 || e[CPSI] % 2 == 1)
    {
        return Err(HornError::ReductionFailure(
            "odd power of cos(phi) or cos(psi) survives".into(),
        ));
    }
    let uz = res.map_exponents(4, |e| vec![e[CPHI] / 2, e[CPSI] / 2, e[PV], e[QV]]);
    Ok(ResultantPoly::new(uz))
}

pub const REFERENCE_SPECTRUM: [f64; 3] = [1.0, 0.0, -1.0];

/// R for alpha = beta = (1, 0, -1), built once.
pub fn reference_resultant() -> &'static ResultantPoly {
    static CELL: OnceLock<ResultantPoly> = OnceLock::new();
    CELL.get_or_init(|| {
        let a = Spectrum::new(REFERENCE_SPECTRUM.to_vec(), true).expect("valid spectrum");
        let pair = char_poly_pair(&a, &a).expect("reference pair");
        resultant_r(&pair).expect("reference resultant")
    })
}

// ------------------------------------------------------ density

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RhoValue {
    /// +inf when `divergent`.
    pub value: f64,
    pub divergent: bool,
}

const SCAN: usize = 256;

/// Per-piece relative tolerance of the z quadrature.  Root round-off near
/// double roots puts a noise floor near 1e-8 on the integrand.
const RHO_REL_TOL: f64 = 1e-7;

/// Piece boundaries in [0, 1]: where the number of admissible u-roots
/// changes, and where a root curve touches u = 0 or u = 1.
fn breakpoints(r: &DenseR) -> Vec<f64> {
    let count = |z: f64| r.roots_u(z).len();
    let mut out = vec![0.0, 1.0];
    let mut prev = count(0.0);
    for k in 1..=SCAN {
        let z = k as f64 / SCAN as f64;
        let c = count(z);
        if c != prev {
            let (mut lo, mut hi) = ((k - 1) as f64 / SCAN as f64, z);
            while hi - lo > 1e-15 {
                let mid = 0.5 * (lo + hi);
                if count(mid) == prev {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            out.push(0.5 * (lo + hi));
            prev = c;
        }
    }
    // R(0, z) and R(1, z) are squares for the reference spectra; their zeros
    // are the zeros of the z-derivative where R itself vanishes.
    for ub in [0.0f64, 1.0] {
        let k: Vec<f64> = (0..5)
            .map(|b| (0..5).map(|a| r.c[a][b] * ub.powi(a as i32)).sum())
            .collect();
        let scale: f64 = k.iter().map(|v| v.abs()).sum::<f64>().max(1e-300);
        let dk: Vec<f64> = (1..5).map(|b| b as f64 * k[b]).collect();
        for z in real_roots_in(&dk, 0.0, 1.0, 0.0) {
            if crate::roots::horner(&k, z).0.abs() <= 1e-9 * scale {
                out.push(z);
            }
        }
    }
    out.sort_by(f64::total_cmp);
    out.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
    out
}

/// Smallest distance between two roots of R(., z) near [0, 1], complex ones
/// included, with the midpoint of that pair.
fn closest_pair(r: &DenseR, z: f64) -> (f64, f64) {
    let roots = crate::roots::poly_roots(&r.in_u(z));
    let near = |x: &nalgebra::Complex<f64>| (-0.05..=1.05).contains(&x.re);
    let mut best = (f64::INFINITY, 0.5);
    for (i, a) in roots.iter().enumerate().filter(|(_, a)| near(a)) {
        for b in roots[i + 1..].iter().filter(|b| near(b)) {
            let d = (a - b).norm();
            if d < best.0 {
                best = (d, 0.5 * (a.re + b.re));
            }
        }
    }
    best
}

/// Local minima in z of the closest root pair, as (z, u, gap).
fn pinches(r: &DenseR) -> Vec<(f64, f64, f64)> {
    let zs: Vec<f64> = (0..=SCAN).map(|k| k as f64 / SCAN as f64).collect();
    let gaps: Vec<f64> = zs.iter().map(|&z| closest_pair(r, z).0).collect();
    let mut out = Vec::new();
    for k in 0..=SCAN {
        let left = if k == 0 { f64::INFINITY } else { gaps[k - 1] };
        let right = if k == SCAN {
            f64::INFINITY
        } else {
            gaps[k + 1]
        };
        if !(gaps[k] <= left && gaps[k] <= right && gaps[k].is_finite()) {
            continue;
        }
        let (mut lo, mut hi) = (zs[k.saturating_sub(1)], zs[(k + 1).min(SCAN)]);
        // golden section on the gap
        let phi = 0.5 * (5f64.sqrt() - 1.0);
        let gap = |z: f64| closest_pair(r, z).0;
        let (mut x1, mut x2) = (hi - phi * (hi - lo), lo + phi * (hi - lo));
        let (mut f1, mut f2) = (gap(x1), gap(x2));
        while hi - lo > 1e-13 {
            if f1 <= f2 {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - phi * (hi - lo);
                f1 = gap(x1);
            } else {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + phi * (hi - lo);
                f2 = gap(x2);
            }
        }
        let mut z = 0.5 * (lo + hi);
        for end in [0.0, 1.0] {
            if closest_pair(r, end).0 <= gap(z) && (z - end).abs() < 1.0 / SCAN as f64 {
                z = end;
            }
        }
        let (g, u) = closest_pair(r, z);
        out.push((z, u, g));
    }
    out
}

/// A critical point with R = R0 and Hessian H splits the two crossing root
/// branches by about sqrt(|R0| / |H|).  Below this (p, q) counts as lying on
/// a singular curve; the floor from rounding p and q is near 1e-8.
pub const NODE_TOL: f64 = 2e-7;

/// Critical point of R(., .; p, q) reached by Newton from (u, z).
fn critical_point(r: &DenseR, mut x: Vector2<f64>) -> Option<(Vector2<f64>, f64)> {
    for _ in 0..50 {
        let (_, g, h) = r.hessian(x[0], x[1]);
        let step = h.lu().solve(&g)?;
        x -= step;
        if !x.iter().all(|v| v.is_finite() && v.abs() < 10.0) {
            return None;
        }
        if step.norm() < 1e-15 {
            break;
        }
    }
    let (v, g, _) = r.hessian(x[0], x[1]);
    (g.norm() <= 1e-10 * r.scale()).then_some((x, v))
}

/// R(., .; p, q) has a node in [0, 1]^2: R and its gradient vanish together.
fn has_node(r: &DenseR, pinches: &[(f64, f64, f64)]) -> bool {
    let grid = (0..=4).flat_map(|i| (0..=4).map(move |j| (i as f64 / 4.0, j as f64 / 4.0)));
    let starts = pinches.iter().map(|&(z, u, _)| (u, z)).chain(grid);
    let inside = |v: f64| (-1e-7..=1.0 + 1e-7).contains(&v);
    starts
        .into_iter()
        .any(|(u, z)| match critical_point(r, Vector2::new(u, z)) {
            Some((x, v)) => {
                let (_, _, h) = r.hessian(x[0], x[1]);
                inside(x[0]) && inside(x[1]) && (v.abs() / h.norm()).sqrt() <= NODE_TOL
            }
            None => false,
        })
}

/// R(., z) keeps a repeated root in [0, 1] for every z: R has a square
/// factor and R_u vanishes along a whole root curve.
fn has_square_factor(r: &DenseR) -> bool {
    [0.2134, 0.5021, 0.7813].iter().all(|&z| {
        let roots = crate::roots::poly_roots(&r.in_u(z));
        roots.iter().enumerate().any(|(i, a)| {
            (-1e-6..=1.0 + 1e-6).contains(&a.re)
                && a.im.abs() < 1e-5
                && roots[i + 1..].iter().any(|b| (a - b).norm() < 1e-5)
        })
    })
}

/// Density of (p, q), (2/pi^2) int_0^1 dz sum_{R(u,z)=0} (2 + u + z)/|R_u|,
/// for alpha = beta = (1, 0, -1), with a `quad_points`-point Gauss-Legendre
/// base rule.
pub fn rho_reference(p: f64, q: f64, quad_points: usize) -> RhoValue {
    let rule = if quad_points == GaussLegendre::default_rule().order() {
        None
    } else {
        Some(GaussLegendre::new(quad_points))
    };
    let rule = rule
        .as_ref()
        .unwrap_or_else(|| GaussLegendre::default_rule());
    let zero = RhoValue {
        value: 0.0,
        divergent: false,
    };
    let divergent = RhoValue {
        value: f64::INFINITY,
        divergent: true,
    };
    match pq_to_gamma(p, q) {
        Ok(g) if in_horn_polygon3(&REFERENCE_SPECTRUM, &REFERENCE_SPECTRUM, &g, 1e-12) => {}
        _ => return zero,
    }
    let r = reference_resultant().dense_at(p, q);
    let pinch = pinches(&r);
    if has_square_factor(&r) || has_node(&r, &pinch) {
        return divergent;
    }
    // A noisy double root can come out with zero slope on a null set.
    let mut f = |z: f64| -> f64 {
        r.roots_with_slope(z)
            .iter()
            .map(|&(u, d)| (2.0 + u + z) / d)
            .filter(|v| v.is_finite())
            .sum()
    };
    // Near-nodes go on piece ends; folds are already there.
    let mut cuts = breakpoints(&r);
    let extra: Vec<f64> = pinch
        .iter()
        .filter(|p| p.2 < 1e-2 && cuts.iter().all(|c| (c - p.0).abs() > 1e-6))
        .map(|p| p.0)
        .collect();
    cuts.extend(extra);
    cuts.sort_by(f64::total_cmp);
    let mut total = 0.0;
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        let width = b - a;
        // Slivers this thin are round-off in the root count near a double
        // root; a true window this narrow would be a flagged node.
        if width <= 1e-10
            || [0.25, 0.5, 0.75]
                .iter()
                .all(|t| r.roots_u(a + t * width).is_empty())
        {
            continue;
        }
        let qd = adaptive_smoothstep(rule, a, b, RHO_REL_TOL, 1e-12, 40, &mut f);
        if !qd.value.is_finite() {
            return divergent;
        }
        total += qd.value;
    }
    RhoValue {
        value: 2.0 / (PI * PI) * total,
        divergent: false,
    }
}

/// (gamma_1, gamma_2) lies on a curve where the density diverges: R(., .; p, q)
/// has a square factor or a node in [0, 1]^2.
pub fn is_singular(gamma1: f64, gamma2: f64) -> bool {
    let g = [gamma1, gamma2, -gamma1 - gamma2];
    if !in_horn_polygon3(&REFERENCE_SPECTRUM, &REFERENCE_SPECTRUM, &g, 1e-9) {
        return false;
    }
    let (p, q) = pq_of(g[0], g[1], g[2]);
    let r = reference_resultant().dense_at(p, q);
    has_square_factor(&r) || has_node(&r, &pinches(&r))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct So3Pdf {
    pub value: f64,
    /// The point sits on a divergence; `value` is +inf.
    pub singular: bool,
}

/// Density of ordered (gamma_1, gamma_2), gamma_3 = -gamma_1 - gamma_2, for
/// alpha = beta = (1, 0, -1).  Zero off the ordered chamber and outside the
/// Horn polygon.
pub fn pdf_so3(gamma1: f64, gamma2: f64) -> So3Pdf {
    pdf_so3_with(gamma1, gamma2, GaussLegendre::default_rule().order())
}

pub fn pdf_so3_with(gamma1: f64, gamma2: f64, quad_points: usize) -> So3Pdf {
    let g = [gamma1, gamma2, -gamma1 - gamma2];
    let zero = So3Pdf {
        value: 0.0,
        singular: false,
    };
    if !(g[0] >= g[1] && g[1] >= g[2])
        || !in_horn_polygon3(&REFERENCE_SPECTRUM, &REFERENCE_SPECTRUM, &g, 0.0)
    {
        return zero;
    }
    // |Delta| -> 0 beats the log growth of rho on a chamber wall.
    if g[0] - g[1] < 1e-9 || g[1] - g[2] < 1e-9 {
        return zero;
    }
    let vdm = (g[0] - g[1]) * (g[0] - g[2]) * (g[1] - g[2]);
    let (p, q) = pq_of(g[0], g[1], g[2]);
    let rho = rho_reference(p, q, quad_points);
    if rho.divergent {
        So3Pdf {
            value: f64::INFINITY,
            singular: true,
        }
    } else {
        So3Pdf {
            value: vdm * rho.value,
            singular: false,
        }
    }
}

/// pdf_so3 at cell centres of a resolution x resolution grid over
/// gamma_1 in [0, 2], gamma_2 in [-1, 1].  Row-major in gamma_1.
#[derive(Clone, Debug, Serialize)]
pub struct So3Grid {
    pub resolution: usize,
    pub gamma1_range: (f64, f64),
    pub gamma2_range: (f64, f64),
    pub values: Vec<f64>,
    pub singular_cells: usize,
}

impl So3Grid {
    pub fn cell_width(&self) -> (f64, f64) {
        let r = self.resolution as f64;
        (
            (self.gamma1_range.1 - self.gamma1_range.0) / r,
            (self.gamma2_range.1 - self.gamma2_range.0) / r,
        )
    }

    pub fn center(&self, i: usize, j: usize) -> (f64, f64) {
        let (w1, w2) = self.cell_width();
        (
            self.gamma1_range.0 + (i as f64 + 0.5) * w1,
            self.gamma2_range.0 + (j as f64 + 0.5) * w2,
        )
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.resolution + j]
    }

    /// Sum of finite cell values times the cell area.
    pub fn mass(&self) -> f64 {
        let (w1, w2) = self.cell_width();
        self.values.iter().filter(|v| v.is_finite()).sum::<f64>() * w1 * w2
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("gamma1,gamma2,pdf\n");
        for i in 0..self.resolution {
            for j in 0..self.resolution {
                let (a, b) = self.center(i, j);
                s.push_str(&format!("{a},{b},{}\n", self.value(i, j)));
            }
        }
        s
    }
}

pub fn so3_density_grid(resolution: usize, exec: Execution) -> So3Grid {
    let resolution = resolution.max(1);
    let mut grid = So3Grid {
        resolution,
        gamma1_range: (0.0, 2.0),
        gamma2_range: (-1.0, 1.0),
        values: Vec::new(),
        singular_cells: 0,
    };
    let centers: Vec<(f64, f64)> = (0..resolution * resolution)
        .map(|k| grid.center(k / resolution, k % resolution))
        .collect();
    let vals = map_indexed(exec, centers.len(), |k| pdf_so3(centers[k].0, centers[k].1));
    grid.singular_cells = vals.iter().filter(|v| v.singular).count();
    grid.values = vals.into_iter().map(|v| v.value).collect();
    grid
}

/// Offset of the sub-cell lattice; keeps sample points off the singular lines,
/// which pass through rational points of the grid.
const SUB_OFFSET: f64 = 0.5318;

fn in_support(g1: f64, g2: f64) -> bool {
    let g = [g1, g2, -g1 - g2];
    g[0] > g[1]
        && g[1] > g[2]
        && in_horn_polygon3(&REFERENCE_SPECTRUM, &REFERENCE_SPECTRUM, &g, 0.0)
}

/// Cell averages of pdf_so3 on the same cells as [`so3_density_grid`], from a
/// sub x sub shifted lattice in each cell; cells straddling the support edge
/// or a chamber wall use edge_sub x edge_sub.  Divergent samples are dropped
/// from their cell's average and counted in `singular_cells`.
pub fn so3_cell_means(resolution: usize, sub: usize, edge_sub: usize, exec: Execution) -> So3Grid {
    let resolution = resolution.max(1);
    let mut grid = So3Grid {
        resolution,
        gamma1_range: (0.0, 2.0),
        gamma2_range: (-1.0, 1.0),
        values: Vec::new(),
        singular_cells: 0,
    };
    let (w1, w2) = grid.cell_width();
    let (x0, y0) = (grid.gamma1_range.0, grid.gamma2_range.0);
    let cells = map_indexed(exec, resolution * resolution, |k| {
        let (i, j) = (k / resolution, k % resolution);
        let (a, b) = (x0 + i as f64 * w1, y0 + j as f64 * w2);
        let corners = [(a, b), (a + w1, b), (a, b + w2), (a + w1, b + w2)];
        let inside = corners.iter().filter(|c| in_support(c.0, c.1)).count();
        if inside == 0 {
            let (c1, c2) = (a + 0.5 * w1, b + 0.5 * w2);
            if !in_support(c1, c2) {
                return (0.0, false);
            }
        }
        let m = if inside == 4 { sub } else { edge_sub }.max(1);
        let (mut sum, mut count, mut singular) = (0.0, 0usize, false);
        for s in 0..m {
            for t in 0..m {
                let g1 = a + w1 * (s as f64 + SUB_OFFSET) / m as f64;
                let g2 = b + w2 * (t as f64 + SUB_OFFSET) / m as f64;
                let v = pdf_so3(g1, g2);
                if v.singular {
                    singular = true;
                } else {
                    sum += v.value;
                    count += 1;
                }
            }
        }
        (if count > 0 { sum / count as f64 } else { 0.0 }, singular)
    });
    grid.singular_cells = cells.iter().filter(|c| c.1).count();
    grid.values = cells.into_iter().map(|c| c.0).collect();
    grid
}

/// Integral of pdf_so3 over the ordered chamber, by [`so3_cell_means`].
pub fn so3_mass(resolution: usize, sub: usize, edge_sub: usize, exec: Execution) -> f64 {
    so3_cell_means(resolution, sub, edge_sub, exec).mass()
}

// ------------------------------------------------------ singular set

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SingularPoint {
    pub gamma1: f64,
    pub gamma2: f64,
    /// Where the curve R = 0 is singular.
    pub u: f64,
    pub z: f64,
}

/// a gamma_1 + b gamma_2 = c with a^2 + b^2 = 1.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SingularLine {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub support: usize,
}

impl SingularLine {
    pub fn distance(&self, g1: f64, g2: f64) -> f64 {
        (self.a * g1 + self.b * g2 - self.c).abs()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SingularSet {
    pub points: Vec<SingularPoint>,
    pub lines: Vec<SingularLine>,
    /// Crossings of singular lines inside the support.
    pub special: Vec<(f64, f64)>,
}

struct Transect {
    base: (f64, f64),
    dir: (f64, f64),
}

impl Transect {
    fn at(&self, t: f64) -> (f64, f64) {
        (self.base.0 + t * self.dir.0, self.base.1 + t * self.dir.1)
    }

    /// p, q and their t-derivatives.
    fn pq(&self, t: f64) -> (f64, f64, f64, f64) {
        let (g1, g2) = self.at(t);
        let p = -(g1 * g1 + g1 * g2 + g2 * g2);
        let q = g1 * g2 * (g1 + g2);
        let dp = -(2.0 * g1 + g2) * self.dir.0 - (g1 + 2.0 * g2) * self.dir.1;
        let dq = (2.0 * g1 * g2 + g2 * g2) * self.dir.0 + (g1 * g1 + 2.0 * g1 * g2) * self.dir.1;
        (p, q, dp, dq)
    }
}

/// (R, R_u, R_z, R_t, R_ut, R_zt) along a transect.
fn transect_jet(r: &ResultantPoly, tr: &Transect, u: f64, z: f64, t: f64) -> (Jet, f64, f64, f64) {
    let (p, q, dp, dq) = tr.pq(t);
    let j = r.jet(u, z, p, q);
    (
        j,
        j.p * dp + j.q * dq,
        j.up * dp + j.uq * dq,
        j.zp * dp + j.zq * dq,
    )
}

fn newton3(r: &ResultantPoly, tr: &Transect, mut x: Vector3<f64>) -> Option<Vector3<f64>> {
    for _ in 0..80 {
        let (j, rt, rut, rzt) = transect_jet(r, tr, x[0], x[1], x[2]);
        let f = Vector3::new(j.r, j.u, j.z);
        let m = Matrix3::new(j.u, j.z, rt, j.uu, j.uz, rut, j.uz, j.zz, rzt);
        let dx = m.lu().solve(&-f)?;
        x += dx;
        if !x.iter().all(|v| v.is_finite())
            || x[0].abs() > 4.0
            || x[1].abs() > 4.0
            || x[2].abs() > 8.0
        {
            return None;
        }
        if dx.norm() < 1e-15 {
            break;
        }
    }
    Some(x)
}

// Off the chamber walls R has no singular points inside the open square, and
// Newton crawls on the degenerate system near its edges.
fn snap(v: f64) -> Option<f64> {
    [0.0, 1.0].into_iter().find(|b| (v - b).abs() < 1e-3)
}

/// Re-solves on the boundary of [0,1]^2 where the full system is degenerate.
fn polish(r: &ResultantPoly, tr: &Transect, x: Vector3<f64>) -> Vector3<f64> {
    let (mut u, mut z, mut t) = (x[0], x[1], x[2]);
    match (snap(u), snap(z)) {
        (Some(ub), Some(zb)) => {
            u = ub;
            z = zb;
            // R is a square in t here, so Newton runs on R_t.
            for _ in 0..60 {
                let h = 1e-7 * (1.0 + t.abs());
                let (_, f0, _, _) = transect_jet(r, tr, u, z, t);
                let (_, f1, _, _) = transect_jet(r, tr, u, z, t + h);
                let d = (f1 - f0) / h;
                if d == 0.0 {
                    break;
                }
                let step = f0 / d;
                t -= step;
                if step.abs() < 1e-15 {
                    break;
                }
            }
        }
        (None, Some(zb)) => {
            z = zb;
            for _ in 0..60 {
                let (j, _, rut, rzt) = transect_jet(r, tr, u, z, t);
                let m = Matrix2::new(j.uu, rut, j.uz, rzt);
                let Some(d) = m.lu().solve(&-Vector2::new(j.u, j.z)) else {
                    break;
                };
                u += d[0];
                t += d[1];
                if d.norm() < 1e-15 {
                    break;
                }
            }
        }
        (Some(ub), None) => {
            u = ub;
            for _ in 0..60 {
                let (j, _, rut, rzt) = transect_jet(r, tr, u, z, t);
                let m = Matrix2::new(j.uz, rut, j.zz, rzt);
                let Some(d) = m.lu().solve(&-Vector2::new(j.u, j.z)) else {
                    break;
                };
                z += d[0];
                t += d[1];
                if d.norm() < 1e-15 {
                    break;
                }
            }
        }
        (None, None) => {}
    }
    Vector3::new(u, z, t)
}

fn residual_ok(r: &ResultantPoly, tr: &Transect, x: &Vector3<f64>) -> bool {
    let (j, _, _, _) = transect_jet(r, tr, x[0], x[1], x[2]);
    j.r.abs() < 1e-8 && j.u.abs() < 1e-6 && j.z.abs() < 1e-6
}

fn fit_lines(points: &[(f64, f64)], tol: f64) -> Vec<SingularLine> {
    let mut left: Vec<(f64, f64)> = points.to_vec();
    let mut lines = Vec::new();
    loop {
        let mut best: Option<(SingularLine, Vec<usize>)> = None;
        for i in 0..left.len() {
            for k in i + 1..left.len() {
                let (dx, dy) = (left[k].0 - left[i].0, left[k].1 - left[i].1);
                let len = dx.hypot(dy);
                if len < 1e-3 {
                    continue;
                }
                let (a, b) = (-dy / len, dx / len);
                let line = SingularLine {
                    a,
                    b,
                    c: a * left[i].0 + b * left[i].1,
                    support: 0,
                };
                let inliers: Vec<usize> = (0..left.len())
                    .filter(|&m| line.distance(left[m].0, left[m].1) < tol)
                    .collect();
                if inliers.len() >= 3
                    && best.as_ref().is_none_or(|(_, bi)| inliers.len() > bi.len())
                {
                    best = Some((line, inliers));
                }
            }
        }
        let Some((_, inliers)) = best else { break };
        let pts: Vec<(f64, f64)> = inliers.iter().map(|&m| left[m]).collect();
        lines.push(least_squares_line(&pts));
        let mut k = 0;
        left.retain(|_| {
            k += 1;
            !inliers.contains(&(k - 1))
        });
    }
    lines
}

fn least_squares_line(pts: &[(f64, f64)]) -> SingularLine {
    let n = pts.len() as f64;
    let (mx, my) = (
        pts.iter().map(|p| p.0).sum::<f64>() / n,
        pts.iter().map(|p| p.1).sum::<f64>() / n,
    );
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for p in pts {
        let (dx, dy) = (p.0 - mx, p.1 - my);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    // normal = eigenvector of the scatter matrix with the smaller eigenvalue
    let angle = 0.5 * (2.0 * sxy).atan2(sxx - syy);
    let (a, b) = (-angle.sin(), angle.cos());
    SingularLine {
        a,
        b,
        c: a * mx + b * my,
        support: pts.len(),
    }
}

/// Points this close to a chamber wall belong to the wall, where R is
/// degenerate, and are dropped.
const WALL_GAP: f64 = 1e-4;

/// Points (gamma_1, gamma_2) of the ordered chamber where the curve
/// R(u, z) = 0 is singular inside [0,1]^2, found along `resolution`
/// horizontal and `resolution` vertical transects; then lines through them
/// and their crossings.  alpha = beta = (1, 0, -1).
pub fn singular_curves(resolution: usize, exec: Execution) -> SingularSet {
    let r = reference_resultant();
    let resolution = resolution.max(2);
    // offsets keep transects off lattice values
    let mut transects = Vec::new();
    for k in 0..resolution {
        let s = (k as f64 + 0.5 + 0.1234567) / resolution as f64;
        transects.push(Transect {
            base: (0.0, -1.0 + 2.0 * s),
            dir: (1.0, 0.0),
        });
        transects.push(Transect {
            base: (2.0 * s, 0.0),
            dir: (0.0, 1.0),
        });
    }
    let starts: Vec<f64> = (0..5).map(|k| 0.05 + 0.225 * k as f64).collect();
    let found = map_indexed(exec, transects.len(), |ti| {
        let tr = &transects[ti];
        let mut out: Vec<SingularPoint> = Vec::new();
        for &u0 in &starts {
            for &z0 in &starts {
                for k in 0..12 {
                    let t0 = if tr.dir.0 > 0.0 {
                        2.0 * k as f64 / 11.0
                    } else {
                        -1.0 + 2.0 * k as f64 / 11.0
                    };
                    let Some(x) = newton3(r, tr, Vector3::new(u0, z0, t0)) else {
                        continue;
                    };
                    if !(-1e-6..=1.0 + 1e-6).contains(&x[0])
                        || !(-1e-6..=1.0 + 1e-6).contains(&x[1])
                    {
                        continue;
                    }
                    if !residual_ok(r, tr, &x) {
                        continue;
                    }
                    let x = polish(r, tr, x);
                    if !residual_ok(r, tr, &x) {
                        continue;
                    }
                    let (g1, g2) = tr.at(x[2]);
                    let g = [g1, g2, -g1 - g2];
                    let gap = (g[0] - g[1]).min(g[1] - g[2]);
                    if gap < WALL_GAP
                        || !in_horn_polygon3(&REFERENCE_SPECTRUM, &REFERENCE_SPECTRUM, &g, 1e-9)
                    {
                        continue;
                    }
                    if !is_singular(g1, g2) {
                        continue;
                    }
                    if out
                        .iter()
                        .all(|p| (p.gamma1 - g1).hypot(p.gamma2 - g2) > 1e-9)
                    {
                        out.push(SingularPoint {
                            gamma1: g1,
                            gamma2: g2,
                            u: x[0],
                            z: x[1],
                        });
                    }
                }
            }
        }
        out
    });
    let points: Vec<SingularPoint> = found.into_iter().flatten().collect();
    let xy: Vec<(f64, f64)> = points.iter().map(|p| (p.gamma1, p.gamma2)).collect();
    let lines = fit_lines(&xy, 1e-7);
    let mut special: Vec<(f64, f64)> = Vec::new();
    for i in 0..lines.len() {
        for k in i + 1..lines.len() {
            let (l1, l2) = (lines[i], lines[k]);
            let det = l1.a * l2.b - l1.b * l2.a;
            if det.abs() < 1e-6 {
                continue;
            }
            let g1 = (l1.c * l2.b - l1.b * l2.c) / det;
            let g2 = (l1.a * l2.c - l1.c * l2.a) / det;
            let g = [g1, g2, -g1 - g2];
            let gap = (g[0] - g[1]).min(g[1] - g[2]);
            if gap < 1e-6 || !in_horn_polygon3(&REFERENCE_SPECTRUM, &REFERENCE_SPECTRUM, &g, 1e-7) {
                continue;
            }
            if special.iter().all(|s| (s.0 - g1).hypot(s.1 - g2) > 1e-6) {
                special.push((g1, g2));
            }
        }
    }
    special.sort_by(|a, b| a.0.total_cmp(&b.0));
    SingularSet {
        points,
        lines,
        special,
    }
}

// ------------------------------------------------------ divergence fits

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DivergenceKind {
    Logarithmic,
    InverseSqrt,
    Bounded,
    Other,
}

#[derive(Clone, Debug, Serialize)]
pub struct DivergenceFit {
    /// Slope of log pdf against log distance.
    pub exponent: f64,
    /// pdf ~ log_slope * ln(d) + intercept.
    pub log_slope: f64,
    pub log_r2: f64,
    pub kind: DivergenceKind,
    pub samples: Vec<(f64, f64)>,
}

fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 {
        1.0
    } else {
        sxy * sxy / (sxx * syy)
    };
    (slope, my - slope * mx, r2)
}

/// Samples pdf_so3 at point + d * direction for the given distances and fits
/// both a power law and a logarithm.
pub fn classify_divergence(
    point: (f64, f64),
    direction: (f64, f64),
    distances: &[f64],
) -> DivergenceFit {
    let norm = direction.0.hypot(direction.1);
    let dir = (direction.0 / norm, direction.1 / norm);
    let samples: Vec<(f64, f64)> = distances
        .iter()
        .map(|&d| (d, pdf_so3(point.0 + d * dir.0, point.1 + d * dir.1).value))
        .collect();
    let ld: Vec<f64> = samples.iter().map(|s| s.0.ln()).collect();
    let vals: Vec<f64> = samples.iter().map(|s| s.1).collect();
    let lv: Vec<f64> = vals.iter().map(|v| v.ln()).collect();
    let (exponent, _, _) = linear_fit(&ld, &lv);
    let (log_slope, _, log_r2) = linear_fit(&ld, &vals);
    let kind = if !vals.iter().all(|v| v.is_finite() && *v > 0.0) {
        DivergenceKind::Other
    } else if (exponent + 0.5).abs() <= 0.05 {
        DivergenceKind::InverseSqrt
    } else if log_slope < 0.0 && log_r2 > 0.999 && exponent > -0.3 {
        DivergenceKind::Logarithmic
    } else if exponent.abs() < 0.02 {
        DivergenceKind::Bounded
    } else {
        DivergenceKind::Other
    };
    DivergenceFit {
        exponent,
        log_slope,
        log_r2,
        kind,
        samples,
    }
}

/// Exact coefficients of R at rational (p, q), e.g. for printing.
pub fn reference_r_at(p: &Q, q: &Q) -> BivariatePoly {
    reference_resultant().at(p, q)
}

pub fn is_zero_poly(b: &BivariatePoly) -> bool {
    b.coefficients.values().all(Zero::is_zero)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::int;

    fn spectrum_of(v: &[f64]) -> Spectrum {
        Spectrum::new(v.to_vec(), true).unwrap()
    }

    #[test]
    fn pq_examples_and_round_trip() {
        assert_eq!(
            gamma_to_pq(&spectrum_of(&[1.0, 0.0, -1.0])).unwrap(),
            (-1.0, -0.0)
        );
        assert_eq!(
            gamma_to_pq(&spectrum_of(&[2.0, 0.0, -2.0])).unwrap().0,
            -4.0
        );
        let g = [1.3, -0.2, -1.1];
        let (p, q) = pq_of(g[0], g[1], g[2]);
        let back = pq_to_gamma(p, q).unwrap();
        for k in 0..3 {
            assert!((back[k] - g[k]).abs() < 1e-12);
        }
        assert!(matches!(
            pq_to_gamma(1.0, 1.0),
            Err(HornError::NoRealTriple { .. })
        ));
    }

    #[test]
    fn so2_examples() {
        assert!((so2_horn_pdf(2.0, 2.0, 2.0) - 2.0 / (PI * 12f64.sqrt())).abs() < 1e-12);
        assert_eq!(so2_horn_pdf(2.0, 2.0, 5.0), 0.0);
        assert!((so2_schur_pdf(1.0, 0.0) - 1.0 / PI).abs() < 1e-15);
        assert_eq!(so2_schur_pdf(1.0, 1.5), 0.0);
    }

    #[test]
    fn reference_resultant_shape() {
        let r = reference_resultant();
        let b = r.at(&int(-1), &int(0));
        assert_eq!((b.degree_u(), b.degree_z()), (4, 4));
        assert!(b.is_symmetric());
        // gamma = (2, 0, -2): R = 4 (u - z)^2 (u + z + 2)^2
        let b = r.at(&int(-4), &int(0));
        for &(u, z) in &[(0.3f64, 0.3f64), (0.7, 0.7), (0.1, 0.9)] {
            let want = 4.0 * (u - z).powi(2) * (u + z + 2.0).powi(2);
            assert!((b.eval(u, z) - want).abs() < 1e-12);
        }
    }

    #[test]
    fn beta_zero_pair_is_constant() {
        let a = spectrum_of(&[1.0, 0.0, -1.0]);
        let z = spectrum_of(&[0.0, 0.0, 0.0]);
        let pair = char_poly_pair(&a, &z).unwrap();
        for &(phi, th, psi) in &[(0.1, 0.2, 0.3), (2.0, 1.0, 4.0)] {
            let (pv, _) = pair.eval(phi, th, psi, 0.5, 0.0);
            assert!((pv - (-1.0 - 0.5)).abs() < 1e-14);
        }
    }

    #[test]
    fn rho_outside_support_and_symmetry() {
        let (p, q) = pq_of(5.0, 0.0, -5.0);
        assert_eq!(rho_reference(p, q, 20).value, 0.0);
        let (p, q) = pq_of(1.3, -0.2, -1.1);
        let a = rho_reference(p, q, 20);
        let b = rho_reference(p, -q, 20);
        assert!(!a.divergent && a.value > 0.0);
        assert!((a.value - b.value).abs() < 1e-8 * a.value);
    }
}
