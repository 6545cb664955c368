//! Free-form quadrature: composite Gauss–Legendre panels on finite intervals
//! and a tangent substitution for semi-infinite ranges.
//!
//! This complements the nodal quadrature of [`crate::grid`]: the instanton
//! integrals carry an internal scale ε that the fixed mesh cannot always
//! resolve, so they are integrated here with panels placed around that scale.

use std::f64::consts::FRAC_PI_2;

/// Gauss–Legendre nodes and weights on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Rule with `order` points, exact for polynomials of degree 2·order − 1.
    pub fn new(order: usize) -> Self {
        assert!(order >= 1);
        let n = order;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            // Newton iteration from the Chebyshev-based initial guess.
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..100 {
                let (p, dp) = legendre_with_derivative(n, x);
                let dx = p / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, dp) = legendre_with_derivative(n, x);
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    /// ∫_a^b f(x) dx with a single panel.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64) -> f64 {
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        let mut acc = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(mid + half * x);
        }
        acc * half
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for j in 2..=n {
        let jf = j as f64;
        let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Composite integration over consecutive panels `[breaks[i], breaks[i+1]]`.
pub fn integrate_panels<F: Fn(f64) -> f64>(f: F, breaks: &[f64], rule: &GaussLegendre) -> f64 {
    let mut acc = 0.0;
    for pair in breaks.windows(2) {
        acc += rule.integrate(&f, pair[0], pair[1]);
    }
    acc
}

/// ∫_0^∞ f(r) dr via the double-exponential map r = scale·exp(λ·sinh t).
///
/// Handles integrands with algebraic (including fractional-power) decay at
/// both ends, which defeats polynomial substitutions. Factor overflow deep in
/// the tail can turn a mathematical zero into inf·0; such samples are treated
/// as zero.
pub fn integrate_semi_infinite<F: Fn(f64) -> f64>(f: F, scale: f64) -> f64 {
    let lambda = FRAC_PI_2;
    let h = 5e-3;
    let t_max = 4.6;
    let steps = (2.0 * t_max / h) as usize;
    let mut acc = 0.0;
    for j in 0..=steps {
        let t = -t_max + j as f64 * h;
        let r = scale * (lambda * t.sinh()).exp();
        let jac = r * lambda * t.cosh();
        let v = f(r) * jac;
        if v.is_finite() {
            acc += v;
        }
    }
    acc * h
}

/// ∫_a^∞ f(r) dr, a > 0, via r = a·e^u: polynomial decay in r becomes
/// exponential decay in u, integrated by wide Gauss panels. Non-finite
/// samples from deep-tail factor overflow are treated as zero.
pub fn integrate_tail<F: Fn(f64) -> f64>(f: F, a: f64, panels: usize, rule: &GaussLegendre) -> f64 {
    assert!(a > 0.0);
    let g = |u: f64| {
        let r = a * u.exp();
        let v = f(r) * r;
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    let width = 120.0 / panels as f64;
    let mut acc = 0.0;
    for i in 0..panels {
        acc += rule.integrate(g, i as f64 * width, (i + 1) as f64 * width);
    }
    acc
}

/// Breakpoints 0, lo, 2·lo, …, hi (geometric with the given ratio), with the
/// extras inserted, sorted and deduplicated. Intended for integrands whose
/// variation concentrates near the origin at scale `lo`.
pub fn geometric_breakpoints(lo: f64, hi: f64, ratio: f64, extras: &[f64]) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && ratio > 1.0);
    let mut breaks = vec![0.0];
    let mut x = lo;
    while x < hi {
        breaks.push(x);
        x *= ratio;
    }
    breaks.push(hi);
    for &e in extras {
        if e > 0.0 && e < hi {
            breaks.push(e);
        }
    }
    breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
    breaks.dedup_by(|a, b| (*a - *b).abs() <= f64::EPSILON * b.abs());
    breaks
}

/// Geometric breakpoints from a to b (both > 0), without the leading zero.
pub fn log_breakpoints(a: f64, b: f64, ratio: f64) -> Vec<f64> {
    assert!(a > 0.0 && b > a && ratio > 1.0);
    let mut breaks = vec![a];
    let mut x = a * ratio;
    while x < b {
        breaks.push(x);
        x *= ratio;
    }
    breaks.push(b);
    breaks
}
