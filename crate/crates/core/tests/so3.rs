//! SO(3) density checks against direct matrix computations.

use horn_core::quad::GaussLegendre;
use horn_core::so_density::*;
use horn_core::Spectrum;
use nalgebra::{Matrix3, Matrix4, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

fn spectrum_of(v: &[f64]) -> Spectrum {
    Spectrum::new(v.to_vec(), true).unwrap()
}

fn rz(t: f64) -> Matrix3<f64> {
    let (s, c) = t.sin_cos();
    Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0)
}

fn ry(t: f64) -> Matrix3<f64> {
    let (s, c) = t.sin_cos();
    Matrix3::new(c, 0.0, s, 0.0, 1.0, 0.0, -s, 0.0, c)
}

/// (p, q) of C = diag(a) + R diag(b) R^T with R = Rz(phi) Ry(theta) Rz(psi).
fn pq_direct(a: &[f64], b: &[f64], phi: f64, theta: f64, psi: f64) -> (f64, f64) {
    let r = rz(phi) * ry(theta) * rz(psi);
    let diag = |v: &[f64]| Matrix3::from_diagonal(&Vector3::from_column_slice(v));
    let c = diag(a) + r * diag(b) * r.transpose();
    (-0.5 * (c * c).trace(), -c.determinant())
}

/// Quadratic coefficients in c = cos(theta) of P - p and Q - q, fitted at c = -1, 0, 1.
fn quadratics(a: &[f64], b: &[f64], phi: f64, psi: f64, p: f64, q: f64) -> ([f64; 3], [f64; 3]) {
    let at = |c: f64| {
        let (pp, qq) = pq_direct(a, b, phi, c.acos(), psi);
        (pp - p, qq - q)
    };
    let (m, z, pl) = (at(-1.0), at(0.0), at(1.0));
    let fit = |m: f64, z: f64, pl: f64| [z, 0.5 * (pl - m), 0.5 * (pl + m) - z];
    (fit(m.0, z.0, pl.0), fit(m.1, z.1, pl.1))
}

fn sylvester(f: &[f64; 3], g: &[f64; 3]) -> f64 {
    Matrix4::new(
        f[2], f[1], f[0], 0.0, //
        0.0, f[2], f[1], f[0], //
        g[2], g[1], g[0], 0.0, //
        0.0, g[2], g[1], g[0],
    )
    .determinant()
}

#[test]
fn char_poly_pair_matches_matrices() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for (a, b) in [
        (vec![1.0, 0.0, -1.0], vec![1.0, 0.0, -1.0]),
        (vec![2.0, 0.5, -2.5], vec![1.2, -0.2, -1.0]),
    ] {
        let pair = char_poly_pair(&spectrum_of(&a), &spectrum_of(&b)).unwrap();
        for _ in 0..1000 {
            let (phi, theta, psi) = (
                rng.random_range(0.0..2.0 * PI),
                rng.random_range(0.0..PI),
                rng.random_range(0.0..2.0 * PI),
            );
            let (p, q) = (rng.random_range(-3.0..0.0), rng.random_range(-2.0..2.0));
            let (pp, qq) = pair.eval(phi, theta, psi, p, q);
            let (dp, dq) = pq_direct(&a, &b, phi, theta, psi);
            assert!((pp - (dp - p)).abs() < 1e-12, "{pp} vs {}", dp - p);
            assert!((qq - (dq - q)).abs() < 1e-12, "{qq} vs {}", dq - q);
        }
    }
}

#[test]
fn characteristic_coefficients_are_quadratic_in_cos_theta() {
    let (a, b) = ([2.0, 0.5, -2.5], [1.2, -0.2, -1.0]);
    let (phi, psi) = (0.7, 2.1);
    let (f, g) = quadratics(&a, &b, phi, psi, 0.0, 0.0);
    for c in [-0.6, 0.3, 0.85] {
        let (p, q) = pq_direct(&a, &b, phi, f64::acos(c), psi);
        assert!((p - (f[0] + f[1] * c + f[2] * c * c)).abs() < 1e-12);
        assert!((q - (g[0] + g[1] * c + g[2] * c * c)).abs() < 1e-12);
    }
}

#[test]
fn resultant_is_sylvester_determinant_and_detects_shared_roots() {
    let r = reference_resultant();
    let a = REFERENCE_SPECTRUM;
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..200 {
        let (phi, theta, psi) = (
            rng.random_range(0.0..2.0 * PI),
            rng.random_range(0.0..PI),
            rng.random_range(0.0..2.0 * PI),
        );
        let (u, z) = (phi.cos().powi(2), psi.cos().powi(2));
        // (p, q) read off a matrix: the two quadratics share the root cos(theta)
        let (p, q) = pq_direct(&a, &a, phi, theta, psi);
        let (f, g) = quadratics(&a, &a, phi, psi, p, q);
        let scale = f
            .iter()
            .chain(&g)
            .map(|x| x.abs())
            .fold(0.0, f64::max)
            .powi(4);
        assert!(r.eval(u, z, p, q).abs() < 1e-10 * scale);
        assert!(sylvester(&f, &g).abs() < 1e-10 * scale);

        // shifted q: the quadratics have no common root and R tracks Sylvester
        let q2 = q + rng.random_range(0.1..0.5);
        let (f, g) = quadratics(&a, &a, phi, psi, p, q2);
        let syl = sylvester(&f, &g);
        assert!(syl.abs() > 1e-8);
        assert!((r.eval(u, z, p, q2) - syl).abs() < 1e-10 * (1.0 + syl.abs()));
    }
}

/// Haar measure dphi dpsi dc / 8 pi^2 gives rho(p, q) = (1/8 pi^2) int dpsi G(psi),
/// G = sum over solutions (phi, c) of 1/|d(P,Q)/d(phi,c)|.  With z = cos^2 psi
/// (four psi per z) this is (1/4 pi^2) int_0^1 dz G / sqrt(z (1 - z)), so the
/// u-sum integrand must equal G / (8 sqrt(z (1 - z))).
fn jacobian_sum(p: f64, q: f64, psi: f64) -> (f64, usize) {
    let a = REFERENCE_SPECTRUM;
    let res = |phi: f64| {
        let (f, g) = quadratics(&a, &a, phi, psi, p, q);
        sylvester(&f, &g)
    };
    let n = 20_000;
    let mut total = 0.0;
    let mut count = 0;
    let step = 2.0 * PI / n as f64;
    let mut prev = res(0.0);
    for k in 1..=n {
        let (lo, hi) = ((k - 1) as f64 * step, k as f64 * step);
        let cur = res(hi);
        if prev.signum() != cur.signum() {
            let (mut l, mut h, mut fl) = (lo, hi, prev);
            for _ in 0..60 {
                let m = 0.5 * (l + h);
                let fm = res(m);
                if fm.signum() == fl.signum() {
                    l = m;
                    fl = fm;
                } else {
                    h = m;
                }
            }
            let phi = 0.5 * (l + h);
            let (f, g) = quadratics(&a, &a, phi, psi, p, q);
            let c = (f[0] * g[2] - f[2] * g[0]) / (f[2] * g[1] - f[1] * g[2]);
            if c.abs() <= 1.0 {
                let d = 1e-5;
                let (fp, gp) = quadratics(&a, &a, phi + d, psi, p, q);
                let (fm, gm) = quadratics(&a, &a, phi - d, psi, p, q);
                let ev = |k: &[f64; 3]| k[0] + k[1] * c + k[2] * c * c;
                let (dp_phi, dq_phi) = (
                    (ev(&fp) - ev(&fm)) / (2.0 * d),
                    (ev(&gp) - ev(&gm)) / (2.0 * d),
                );
                let (dp_c, dq_c) = (f[1] + 2.0 * f[2] * c, g[1] + 2.0 * g[2] * c);
                total += 1.0 / (dp_phi * dq_c - dq_phi * dp_c).abs();
                count += 1;
            }
        }
        prev = cur;
    }
    (total, count)
}

#[test]
fn integrand_matches_euler_angle_jacobian() {
    let r = reference_resultant();
    let points: [(f64, f64, f64); 4] = [
        (1.3, -0.2, 0.9),
        (0.6, 0.2, 0.4),
        (1.7, -0.5, 1.2),
        (0.8, -0.1, 2.0),
    ];
    for &(g1, g2, psi) in &points {
        let (p, q) = gamma_to_pq(&spectrum_of(&[g1, g2, -g1 - g2])).unwrap();
        let z = psi.cos().powi(2);
        let roots = r.dense_at(p, q).roots_with_slope(z);
        let usum: f64 = roots.iter().map(|&(u, s)| (2.0 + u + z) / s).sum();
        let (g, solutions) = jacobian_sum(p, q, psi);
        // each u in (0, 1) is cos^2 of four angles phi
        assert_eq!(solutions, 4 * roots.len(), "({g1}, {g2}, {psi})");
        let want = g / (8.0 * (z * (1.0 - z)).sqrt());
        assert!(
            (usum - want).abs() <= 1e-6 * want,
            "({g1}, {g2}): {usum} vs {want}"
        );
    }
}

#[test]
fn rho_is_even_in_q() {
    for &(p, q) in &[(-1.2, 0.15), (-0.7, 0.05), (-2.1, 0.4)] {
        let a = rho_reference(p, q, 20);
        let b = rho_reference(p, -q, 20);
        assert!(!a.divergent && !b.divergent);
        assert!((a.value - b.value).abs() < 1e-5 * a.value, "{a:?} {b:?}");
    }
}

#[test]
fn pdf_reference_values() {
    // regular points, values from an independent scipy evaluation of the z-integral
    for &(g1, g2, want) in &[(1.3, -0.2, 0.743222), (0.6, 0.2, 0.2208176)] {
        let v = pdf_so3(g1, g2);
        assert!(!v.singular);
        assert!(
            (v.value - want).abs() < 2e-5 * want,
            "({g1}, {g2}): {}",
            v.value
        );
    }
    assert_eq!(pdf_so3(2.5, 0.0).value, 0.0);
    assert_eq!(pdf_so3(0.2, 0.5).value, 0.0);
}

#[test]
fn normalization() {
    let mass = so3_mass(40, 1, 4, horn_core::Execution::Parallel);
    assert!((mass - 1.0).abs() < 2e-2, "{mass}");
}

#[test]
fn singular_flags() {
    for &(g1, g2) in &[(1.0, 0.0), (2.0, 0.0), (1.0, 0.35), (1.5, 0.0), (1.3, -0.3)] {
        assert!(is_singular(g1, g2), "({g1}, {g2})");
        assert!(pdf_so3(g1, g2).singular);
    }
    for &(g1, g2) in &[(1.0001, 0.35), (1.5, 0.0001), (1.3, -0.2), (0.6, 0.2)] {
        assert!(!is_singular(g1, g2), "({g1}, {g2})");
    }
}

#[test]
fn so2_densities_normalize() {
    let rule = GaussLegendre::new(40);
    let horn = rule.integrate_smoothstep(0.5, 3.5, |g| so2_horn_pdf(2.0, 1.5, g));
    assert!((horn - 1.0).abs() < 1e-8, "{horn}");
    let schur = rule.integrate_smoothstep(-1.3, 1.3, |x| so2_schur_pdf(1.3, x));
    assert!((schur - 1.0).abs() < 1e-10, "{schur}");
}
