//! Polynomial roots through companion-matrix eigenvalues.

use nalgebra::{Complex, DMatrix};

/// Evaluates sum_k c_k x^k and its derivative.
pub fn horner(coeffs: &[f64], x: f64) -> (f64, f64) {
    let (mut p, mut d) = (0.0, 0.0);
    for &c in coeffs.iter().rev() {
        d = d * x + p;
        p = p * x + c;
    }
    (p, d)
}

/// All complex roots of sum_k c_k x^k (ascending coefficients).  Leading
/// coefficients below 1e-14 of the largest are dropped.
pub fn poly_roots(coeffs: &[f64]) -> Vec<Complex<f64>> {
    let scale = coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    if scale == 0.0 {
        return Vec::new();
    }
    let mut deg = coeffs.len() - 1;
    while deg > 0 && coeffs[deg].abs() <= 1e-14 * scale {
        deg -= 1;
    }
    match deg {
        0 => Vec::new(),
        1 => vec![Complex::new(-coeffs[0] / coeffs[1], 0.0)],
        _ => {
            let lead = coeffs[deg];
            let mut m = DMatrix::<f64>::zeros(deg, deg);
            for i in 1..deg {
                m[(i, i - 1)] = 1.0;
            }
            for i in 0..deg {
                m[(i, deg - 1)] = -coeffs[i] / lead;
            }
            // nalgebra's 2x2 blocks give a NaN imaginary part when a double
            // root's discriminant rounds negative.
            m.complex_eigenvalues()
                .iter()
                .map(|c| {
                    if c.im.is_nan() {
                        Complex::new(c.re, 0.0)
                    } else {
                        *c
                    }
                })
                .collect()
        }
    }
}

/// Real roots in [lo - tol, hi + tol], polished by Newton steps and clamped
/// into [lo, hi].  Returned sorted.
pub fn real_roots_in(coeffs: &[f64], lo: f64, hi: f64, tol: f64) -> Vec<f64> {
    let mut out = Vec::new();
    for r in poly_roots(coeffs) {
        if r.im.abs() > 1e-8 * (1.0 + r.re.abs()) {
            continue;
        }
        let mut x = r.re;
        let (mut px, _) = horner(coeffs, x);
        for _ in 0..3 {
            let (p, d) = horner(coeffs, x);
            if d == 0.0 {
                break;
            }
            let y = x - p / d;
            let (py, _) = horner(coeffs, y);
            if py.abs() < px.abs() {
                x = y;
                px = py;
            } else {
                break;
            }
        }
        if x >= lo - tol && x <= hi + tol {
            out.push(x.clamp(lo, hi));
        }
    }
    out.sort_by(f64::total_cmp);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn from_roots(rs: &[f64]) -> Vec<f64> {
        let mut c = vec![1.0];
        for &r in rs {
            let mut next = vec![0.0; c.len() + 1];
            for (i, &ci) in c.iter().enumerate() {
                next[i + 1] += ci;
                next[i] -= r * ci;
            }
            c = next;
        }
        c
    }

    #[test]
    fn quartic_roots() {
        let c = from_roots(&[0.1, 0.35, 0.9, 3.0]);
        let r = real_roots_in(&c, 0.0, 1.0, 1e-10);
        assert_eq!(r.len(), 3);
        for (a, b) in r.iter().zip([0.1, 0.35, 0.9]) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn complex_pairs_are_skipped() {
        // (x^2 + 1)(x - 0.5)
        let r = real_roots_in(&[-0.5, 1.0, -0.5, 1.0], 0.0, 1.0, 1e-10);
        assert_eq!(r.len(), 1);
        assert!((r[0] - 0.5).abs() < 1e-14);
    }

    #[test]
    fn degree_drop() {
        let r = real_roots_in(&[-0.25, 1.0, 0.0, 0.0, 0.0], 0.0, 1.0, 1e-10);
        assert_eq!(r, vec![0.25]);
    }

    #[test]
    fn near_double_roots_stay_finite() {
        for k in 0..2000 {
            let eps = 1e-9 * (k as f64 - 1000.0) / 1000.0;
            let mut c = from_roots(&[0.000445, 0.000445, -0.68, 2.0]);
            c[0] += eps * 1e-6;
            for r in poly_roots(&c) {
                assert!(r.re.is_finite() && r.im.is_finite(), "{c:?}");
            }
        }
    }
}
