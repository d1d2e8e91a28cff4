//! Gauss-Legendre rules and an adaptive driver tolerant of endpoint
//! singularities.

use std::sync::OnceLock;

#[derive(Clone, Debug)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Nodes and weights on [-1, 1] by Newton iteration on P_n.
    pub fn new(order: usize) -> Self {
        assert!(order >= 1, "quadrature order must be positive");
        let n = order;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        GaussLegendre { nodes, weights }
    }

    /// Shared 20-point rule.
    pub fn default_rule() -> &'static GaussLegendre {
        static RULE: OnceLock<GaussLegendre> = OnceLock::new();
        RULE.get_or_init(|| GaussLegendre::new(20))
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let (h, c) = (0.5 * (b - a), 0.5 * (a + b));
        let mut s = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            s += w * f(c + h * x);
        }
        s * h
    }

    /// Integrates after z = a + (b-a) t^2 (3-2t), whose Jacobian vanishes at
    /// both ends and tames inverse-square-root endpoint behaviour.
    pub fn integrate_smoothstep<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let w = b - a;
        self.integrate(0.0, 1.0, |t| {
            let z = a + w * t * t * (3.0 - 2.0 * t);
            let jac = 6.0 * w * t * (1.0 - t);
            if jac == 0.0 {
                0.0
            } else {
                f(z) * jac
            }
        })
    }
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let d = n as f64 * (x * p - p0) / (x * x - 1.0);
    (p, d)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    pub converged: bool,
    pub depth: usize,
    pub pieces: usize,
}

/// Hard cap on the number of bisections in one adaptive run.
pub const MAX_PIECES: usize = 4_000;

/// Adaptive bisection with the smoothstep rule on each piece.  Every piece must
/// agree with its two halves to max(rel_tol * |first estimate|, abs_tol).
/// Gives up after `max_depth` levels on any branch, or after
/// [`MAX_PIECES`] bisections overall, and reports non-convergence.
pub fn adaptive_smoothstep<F: FnMut(f64) -> f64>(
    rule: &GaussLegendre,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_tol: f64,
    max_depth: usize,
    f: &mut F,
) -> Quadrature {
    let whole = rule.integrate_smoothstep(a, b, &mut *f);
    let mut out = Quadrature {
        value: 0.0,
        converged: true,
        depth: 0,
        pieces: 0,
    };
    let tol = (rel_tol * whole.abs()).max(abs_tol);
    refine(rule, a, b, whole, tol, max_depth, 0, f, &mut out);
    out
}

#[allow(clippy::too_many_arguments)]
fn refine<F: FnMut(f64) -> f64>(
    rule: &GaussLegendre,
    a: f64,
    b: f64,
    whole: f64,
    tol: f64,
    max_depth: usize,
    depth: usize,
    f: &mut F,
    out: &mut Quadrature,
) {
    let m = 0.5 * (a + b);
    let left = rule.integrate_smoothstep(a, m, &mut *f);
    let right = rule.integrate_smoothstep(m, b, &mut *f);
    let sum = left + right;
    out.depth = out.depth.max(depth);
    out.pieces += 1;
    if !sum.is_finite() {
        out.value += sum;
        out.converged = false;
        return;
    }
    if (sum - whole).abs() <= tol {
        out.value += sum;
        return;
    }
    if depth >= max_depth || out.pieces >= MAX_PIECES || m <= a || m >= b {
        out.value += sum;
        out.converged = false;
        return;
    }
    refine(rule, a, m, left, tol, max_depth, depth + 1, f, out);
    refine(rule, m, b, right, tol, max_depth, depth + 1, f, out);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_on_polynomials() {
        let g = GaussLegendre::new(5);
        let v = g.integrate(0.0, 2.0, |x| x.powi(9) + 3.0 * x * x);
        assert!((v - (512.0 / 10.0 * 2.0 + 8.0)).abs() < 1e-10);
        assert!((g.weights().iter().sum::<f64>() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn inverse_sqrt_endpoints() {
        let g = GaussLegendre::new(20);
        let v = g.integrate_smoothstep(-1.0, 1.0, |x| 1.0 / (1.0 - x * x).sqrt());
        assert!((v - std::f64::consts::PI).abs() < 1e-9, "{v}");
    }

    #[test]
    fn adaptive_flags_divergence() {
        let g = GaussLegendre::new(10);
        let ok = adaptive_smoothstep(&g, 0.0, 1.0, 1e-10, 1e-14, 40, &mut |x: f64| x.ln());
        assert!(ok.converged);
        assert!((ok.value + 1.0).abs() < 1e-9);
        let bad = adaptive_smoothstep(&g, 0.0, 1.0, 1e-10, 1e-14, 40, &mut |x: f64| 1.0 / x);
        assert!(!bad.converged);
    }
}
