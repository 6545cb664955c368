//! Graded quadrature mesh on (0, 1].
//!
//! Nodes follow the power law r_i = (i/n)^g, clustering near the origin where
//! the weights r^{N−k}, r^{N−1} and the concentrating profiles live. Each
//! inter-node panel is integrated with the quartic through its five nearest
//! nodes (three-point Gauss on the panel makes that exact), except for a few
//! panels next to the origin where the spacing ratios are extreme and the
//! trapezoid rule keeps the nodal weights positive — those panels are
//! O(n^{-g}) long, so the loss is far below the target accuracy. The leftover
//! segment [0, r_1] uses the one-point rule r_1·f(r_1). On the default mesh
//! the monomial family ∫ r^m dr, m ≤ 18, comes out correct to ~2e-12.

use crate::error::{CoreError, Result};

pub const DEFAULT_GRID_SIZE: usize = 4096;
pub const DEFAULT_GRADING: f64 = 3.0;

/// A panel contribution: integral over one sub-interval expressed as a linear
/// functional of up to five consecutive nodal samples.
#[derive(Debug, Clone, Copy)]
struct Panel {
    stencil: usize,
    coeffs: [f64; 5],
}

#[derive(Debug, Clone)]
pub struct RadialGrid {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    panels: Vec<Panel>,
    grading: f64,
}

impl RadialGrid {
    /// Graded mesh r_i = (i/n)^g, i = 1..n, with quadrature weights for
    /// ∫_0^1 f(r) dr.
    pub fn graded(n: usize, grading: f64) -> Result<Self> {
        if n < 16 {
            return Err(CoreError::InvalidParams(format!(
                "grid needs at least 16 nodes (got {n})"
            )));
        }
        if !n.is_multiple_of(2) {
            // node counts stay even so that every other node is again a
            // graded mesh (refinement estimates rely on the alignment)
            return Err(CoreError::InvalidParams(format!(
                "grid size must be even (got {n})"
            )));
        }
        if !(grading >= 1.0) || !grading.is_finite() {
            return Err(CoreError::InvalidParams(format!(
                "grading exponent must be >= 1 (got {grading})"
            )));
        }
        let nodes: Vec<f64> = (1..=n)
            .map(|i| (i as f64 / n as f64).powf(grading))
            .collect();
        debug_assert_eq!(*nodes.last().unwrap(), 1.0);

        let mut origin_trapezoids = 3usize;
        loop {
            let panels = assemble_panels(&nodes, origin_trapezoids);
            let mut weights = vec![0.0; n];
            for p in &panels {
                for (m, c) in p.coeffs.iter().enumerate() {
                    weights[p.stencil + m] += c;
                }
            }
            if weights.iter().all(|w| *w > 0.0) {
                let total: f64 = weights.iter().sum();
                if (total - 1.0).abs() > 1e-12 {
                    return Err(CoreError::InternalConsistency(format!(
                        "quadrature weights sum to {total}, expected 1"
                    )));
                }
                return Ok(Self {
                    nodes,
                    weights,
                    panels,
                    grading,
                });
            }
            if origin_trapezoids >= n {
                return Err(CoreError::InternalConsistency(
                    "non-positive quadrature weight even with all-trapezoid panels".into(),
                ));
            }
            origin_trapezoids = (origin_trapezoids * 2).min(n);
        }
    }

    pub fn default_grid() -> Self {
        Self::graded(DEFAULT_GRID_SIZE, DEFAULT_GRADING).expect("default grid is valid")
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn grading(&self) -> f64 {
        self.grading
    }

    /// ∫_0^1 f dr from nodal samples.
    pub fn integrate(&self, samples: &[f64]) -> f64 {
        assert_eq!(samples.len(), self.len());
        self.weights.iter().zip(samples).map(|(w, s)| w * s).sum()
    }

    /// ∫_0^1 f dr for a closed-form integrand sampled at the nodes.
    pub fn integrate_fn<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(r, w)| w * f(*r))
            .sum()
    }

    /// Same, with the node index available to the integrand.
    pub fn integrate_fn_indexed<F: Fn(usize, f64) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .enumerate()
            .zip(&self.weights)
            .map(|((i, r), w)| w * f(i, *r))
            .sum()
    }

    /// Cumulative integrals: the i-th entry is ∫_0^{r_i} f dr.
    pub fn cumulative(&self, samples: &[f64]) -> Vec<f64> {
        assert_eq!(samples.len(), self.len());
        let mut out = Vec::with_capacity(self.len());
        let mut acc = 0.0;
        for p in &self.panels {
            let mut v = 0.0;
            for (m, c) in p.coeffs.iter().enumerate() {
                v += c * samples[p.stencil + m];
            }
            acc += v;
            out.push(acc);
        }
        out
    }

    /// ∫_{r0}^{1} f dr, interpolating the cumulative integral at r0.
    pub fn tail_integral(&self, samples: &[f64], r0: f64) -> f64 {
        let cum = self.cumulative(samples);
        let total = *cum.last().unwrap();
        total - self.interp_cumulative(&cum, r0)
    }

    fn interp_cumulative(&self, cum: &[f64], r: f64) -> f64 {
        if r <= 0.0 {
            return 0.0;
        }
        if r >= 1.0 {
            return *cum.last().unwrap();
        }
        match self.nodes.binary_search_by(|x| x.partial_cmp(&r).unwrap()) {
            Ok(i) => cum[i],
            Err(0) => cum[0] * r / self.nodes[0],
            Err(i) => {
                let t = (r - self.nodes[i - 1]) / (self.nodes[i] - self.nodes[i - 1]);
                cum[i - 1] * (1.0 - t) + cum[i] * t
            }
        }
    }

    /// Index of the first node >= r (self.len() if r > 1).
    pub fn first_node_at_or_above(&self, r: f64) -> usize {
        self.nodes.partition_point(|x| *x < r)
    }

    /// The same family with every other node removed (n/2 nodes, same grading);
    /// fine node 2j coincides with coarse node j, so nodal data restricts by
    /// taking odd 0-based indices.
    pub fn coarsened(&self) -> Result<RadialGrid> {
        if !self.len().is_multiple_of(2) {
            return Err(CoreError::InvalidParams(
                "coarsening needs an even node count".into(),
            ));
        }
        RadialGrid::graded(self.len() / 2, self.grading)
    }

    /// Restriction of fine-grid samples to the coarsened grid.
    pub fn restrict(&self, samples: &[f64]) -> Vec<f64> {
        assert_eq!(samples.len(), self.len());
        samples.iter().skip(1).step_by(2).copied().collect()
    }

    /// Integral together with a coarse/fine Richardson error estimate.
    pub fn integrate_with_error(&self, samples: &[f64]) -> Result<(f64, f64)> {
        let fine = self.integrate(samples);
        let coarse_grid = self.coarsened()?;
        let coarse = coarse_grid.integrate(&self.restrict(samples));
        Ok((fine, (fine - coarse).abs()))
    }
}

fn assemble_panels(nodes: &[f64], origin_trapezoids: usize) -> Vec<Panel> {
    let n = nodes.len();
    let mut panels = Vec::with_capacity(n);
    // [0, r_1]: one-point rule, exact for constants and positive by design
    panels.push(Panel {
        stencil: 0,
        coeffs: [nodes[0], 0.0, 0.0, 0.0, 0.0],
    });
    for i in 0..n - 1 {
        if i < origin_trapezoids {
            let h = nodes[i + 1] - nodes[i];
            panels.push(Panel {
                stencil: i,
                coeffs: [0.5 * h, 0.5 * h, 0.0, 0.0, 0.0],
            });
        } else {
            let stencil = i.saturating_sub(2).min(n - 5);
            panels.push(panel_coeffs(nodes, stencil, nodes[i], nodes[i + 1]));
        }
    }
    panels
}

/// Integral over [a, b] of the quartic through nodes[stencil..stencil+5],
/// expressed as coefficients of the five samples. Three-point Gauss is exact
/// for the quartic Lagrange basis.
fn panel_coeffs(nodes: &[f64], stencil: usize, a: f64, b: f64) -> Panel {
    let xs = &nodes[stencil..stencil + 5];
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let g = (3f64 / 5.0).sqrt();
    let q = [
        (mid - half * g, 5.0 / 9.0),
        (mid, 8.0 / 9.0),
        (mid + half * g, 5.0 / 9.0),
    ];
    let mut coeffs = [0.0; 5];
    for (j, c) in coeffs.iter_mut().enumerate() {
        let mut acc = 0.0;
        for &(x, wq) in &q {
            let mut l = 1.0;
            for (m, &xm) in xs.iter().enumerate() {
                if m != j {
                    l *= (x - xm) / (xs[j] - xm);
                }
            }
            acc += wq * l;
        }
        *c = acc * half;
    }
    Panel { stencil, coeffs }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_one_and_stay_positive() {
        for (n, g) in [(64, 1.0), (256, 2.0), (512, 3.0), (4096, 3.0)] {
            let grid = RadialGrid::graded(n, g).unwrap();
            let total: f64 = grid.weights().iter().sum();
            assert!((total - 1.0).abs() < 1e-12, "n={n} g={g}: sum {total}");
            assert!(grid.weights().iter().all(|w| *w > 0.0));
        }
    }

    #[test]
    fn monomials_integrate_to_high_accuracy() {
        let grid = RadialGrid::default_grid();
        for m in 0..=18u32 {
            let exact = 1.0 / (m as f64 + 1.0);
            let val = grid.integrate_fn(|r| r.powi(m as i32));
            let rel = (val - exact).abs() / exact;
            assert!(rel < 1e-10, "m={m}: relative error {rel:e}");
        }
    }

    #[test]
    fn nodes_strictly_increasing_last_is_one() {
        let grid = RadialGrid::graded(333 * 2, 2.5).unwrap();
        let nodes = grid.nodes();
        assert!(nodes.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(*nodes.last().unwrap(), 1.0);
        assert!(nodes[0] > 0.0);
    }

    #[test]
    fn cumulative_matches_total_and_closed_form() {
        let grid = RadialGrid::graded(1024, 3.0).unwrap();
        let samples: Vec<f64> = grid.nodes().iter().map(|r| r * r).collect();
        let cum = grid.cumulative(&samples);
        assert!((cum.last().unwrap() - grid.integrate(&samples)).abs() < 1e-15);
        // spot check ∫_0^{r} s² ds = r³/3 at a few nodes
        for &i in &[10usize, 100, 500, 1023] {
            let r = grid.nodes()[i];
            let exact = r * r * r / 3.0;
            assert!(
                (cum[i] - exact).abs() < 1e-12,
                "node {i}: {} vs {exact}",
                cum[i]
            );
        }
    }

    #[test]
    fn tail_integral_closed_form() {
        let grid = RadialGrid::graded(2048, 3.0).unwrap();
        let samples: Vec<f64> = grid.nodes().iter().map(|r| r.powi(4)).collect();
        // ∫_{0.3}^{1} r^4 dr = (1 - 0.3^5)/5
        let exact = (1.0 - 0.3f64.powi(5)) / 5.0;
        let val = grid.tail_integral(&samples, 0.3);
        assert!((val - exact).abs() < 1e-9);
        assert!((grid.tail_integral(&samples, 0.0) - 0.2).abs() < 1e-12);
        assert_eq!(grid.tail_integral(&samples, 1.0), 0.0);
    }

    #[test]
    fn coarsening_aligns_nodes() {
        let grid = RadialGrid::graded(256, 3.0).unwrap();
        let coarse = grid.coarsened().unwrap();
        let restricted = grid.restrict(grid.nodes());
        for (a, b) in coarse.nodes().iter().zip(&restricted) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn rejects_degenerate_descriptions() {
        assert!(RadialGrid::graded(8, 3.0).is_err());
        assert!(RadialGrid::graded(64, 0.5).is_err());
        assert!(RadialGrid::graded(64, f64::NAN).is_err());
    }

    #[test]
    fn extreme_grading_keeps_weights_positive() {
        // strong grading widens the origin spacing ratios; the builder falls
        // back to more trapezoid panels there until every weight is positive
        for (n, g) in [(300, 6.0), (1024, 5.0), (2048, 4.0)] {
            let grid = RadialGrid::graded(n, g).unwrap();
            assert!(grid.weights().iter().all(|w| *w > 0.0), "n={n} g={g}");
            let total: f64 = grid.weights().iter().sum();
            assert!((total - 1.0).abs() < 1e-12);
        }
    }
}
