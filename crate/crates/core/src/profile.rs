//! Nodal representation of radial profiles.

use std::sync::Arc;

use crate::error::{CoreError, Result};
use crate::grid::RadialGrid;

/// Whether a profile is pinned to zero at the outer boundary.
///
/// `X1` marks membership in the weighted space with v(1) = 0; norms that are
/// only meaningful there require it. `Free` profiles (e.g. trial shots that
/// do not yet satisfy the boundary condition) skip the constraint.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryMode {
    X1,
    Free,
}

/// A radial profile: nodal values and nodal derivative values on a shared grid.
///
/// Derivatives either come from the caller (closed-form families, solver
/// output where the derivative is the primary object) or from second-order
/// finite differences on the graded mesh.
#[derive(Debug, Clone)]
pub struct RadialFunction {
    grid: Arc<RadialGrid>,
    values: Vec<f64>,
    derivative: Vec<f64>,
    mode: BoundaryMode,
}

impl RadialFunction {
    /// Build from nodal values; the derivative is filled in by non-uniform
    /// central differences (one-sided at the ends).
    pub fn from_values(
        grid: Arc<RadialGrid>,
        values: Vec<f64>,
        mode: BoundaryMode,
    ) -> Result<Self> {
        let derivative = finite_differences(&grid, &values);
        Self::from_values_and_derivative(grid, values, derivative, mode)
    }

    /// Build from nodal values plus a caller-supplied derivative.
    pub fn from_values_and_derivative(
        grid: Arc<RadialGrid>,
        mut values: Vec<f64>,
        derivative: Vec<f64>,
        mode: BoundaryMode,
    ) -> Result<Self> {
        if values.len() != grid.len() || derivative.len() != grid.len() {
            return Err(CoreError::InvalidInput(format!(
                "profile length {} / derivative length {} do not match grid length {}",
                values.len(),
                derivative.len(),
                grid.len()
            )));
        }
        if values.iter().chain(&derivative).any(|v| !v.is_finite()) {
            return Err(CoreError::InvalidInput(
                "profile contains non-finite nodal values".into(),
            ));
        }
        if mode == BoundaryMode::X1 {
            let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let tail = values.last().unwrap().abs();
            if tail > 1e-8 * scale.max(1e-300) {
                return Err(CoreError::InvalidInput(format!(
                    "boundary value {tail:e} too large for an X1-mode profile"
                )));
            }
            *values.last_mut().unwrap() = 0.0;
        }
        Ok(Self {
            grid,
            values,
            derivative,
            mode,
        })
    }

    /// Sample a closed-form profile; finite-difference derivative.
    pub fn from_fn<F: Fn(f64) -> f64>(
        grid: Arc<RadialGrid>,
        f: F,
        mode: BoundaryMode,
    ) -> Result<Self> {
        let values: Vec<f64> = grid.nodes().iter().map(|r| f(*r)).collect();
        Self::from_values(grid, values, mode)
    }

    /// Sample a closed-form profile together with its derivative.
    pub fn from_fn_with_derivative<F, G>(
        grid: Arc<RadialGrid>,
        f: F,
        df: G,
        mode: BoundaryMode,
    ) -> Result<Self>
    where
        F: Fn(f64) -> f64,
        G: Fn(f64) -> f64,
    {
        let values: Vec<f64> = grid.nodes().iter().map(|r| f(*r)).collect();
        let derivative: Vec<f64> = grid.nodes().iter().map(|r| df(*r)).collect();
        Self::from_values_and_derivative(grid, values, derivative, mode)
    }

    pub fn zero(grid: Arc<RadialGrid>) -> Self {
        let n = grid.len();
        Self {
            grid,
            values: vec![0.0; n],
            derivative: vec![0.0; n],
            mode: BoundaryMode::X1,
        }
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn derivative(&self) -> &[f64] {
        &self.derivative
    }

    pub fn mode(&self) -> BoundaryMode {
        self.mode
    }

    pub fn is_x1(&self) -> bool {
        self.mode == BoundaryMode::X1
    }

    /// c·v (derivative scales along).
    pub fn scaled(&self, c: f64) -> Self {
        Self {
            grid: Arc::clone(&self.grid),
            values: self.values.iter().map(|v| c * v).collect(),
            derivative: self.derivative.iter().map(|v| c * v).collect(),
            mode: self.mode,
        }
    }

    /// |v| with the chain-rule derivative sign(v)·v'.
    pub fn abs(&self) -> Self {
        let derivative = self
            .values
            .iter()
            .zip(&self.derivative)
            .map(|(v, d)| if *v < 0.0 { -d } else { *d })
            .collect();
        Self {
            grid: Arc::clone(&self.grid),
            values: self.values.iter().map(|v| v.abs()).collect(),
            derivative,
            mode: self.mode,
        }
    }

    /// Linear interpolation of the nodal values (constant below the first node).
    pub fn eval(&self, r: f64) -> f64 {
        let nodes = self.grid.nodes();
        if r <= nodes[0] {
            return self.values[0];
        }
        if r >= 1.0 {
            return *self.values.last().unwrap();
        }
        let i = nodes.partition_point(|x| *x < r);
        let t = (r - nodes[i - 1]) / (nodes[i] - nodes[i - 1]);
        self.values[i - 1] * (1.0 - t) + self.values[i] * t
    }
}

/// Second-order finite differences on a non-uniform mesh, written in
/// difference form to dodge cancellation on the tightly graded panels.
fn finite_differences(grid: &RadialGrid, values: &[f64]) -> Vec<f64> {
    let x = grid.nodes();
    let n = x.len();
    let mut d = vec![0.0; n];
    for i in 1..n - 1 {
        let hl = x[i] - x[i - 1];
        let hr = x[i + 1] - x[i];
        d[i] = -hr / (hl * (hl + hr)) * (values[i - 1] - values[i])
            + hl / (hr * (hl + hr)) * (values[i + 1] - values[i]);
    }
    // one-sided second order at both ends
    d[0] = one_sided(x[0], x[1], x[2], values[0], values[1], values[2]);
    d[n - 1] = one_sided(
        x[n - 1],
        x[n - 2],
        x[n - 3],
        values[n - 1],
        values[n - 2],
        values[n - 3],
    );
    d
}

fn one_sided(x0: f64, x1: f64, x2: f64, f0: f64, f1: f64, f2: f64) -> f64 {
    let h1 = x1 - x0;
    let h2 = x2 - x0;
    // derivative at x0 of the quadratic through the three points
    (f1 - f0) * (h2 / (h1 * (h2 - h1))) - (f2 - f0) * (h1 / (h2 * (h2 - h1)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Arc<RadialGrid> {
        Arc::new(RadialGrid::graded(512, 3.0).unwrap())
    }

    #[test]
    fn finite_differences_are_second_order() {
        let g = grid();
        let v = RadialFunction::from_fn(Arc::clone(&g), |r| r * r * r, BoundaryMode::Free).unwrap();
        for (i, r) in g.nodes().iter().enumerate().skip(4) {
            let exact = 3.0 * r * r;
            assert!(
                (v.derivative()[i] - exact).abs() < 1e-6 + 1e-4 * exact,
                "node {i}"
            );
        }
    }

    #[test]
    fn linear_profiles_differentiate_exactly() {
        let g = grid();
        let v = RadialFunction::from_fn(Arc::clone(&g), |r| 1.0 - r, BoundaryMode::X1).unwrap();
        for d in v.derivative() {
            assert!((d + 1.0).abs() < 1e-10);
        }
        assert_eq!(*v.values().last().unwrap(), 0.0);
    }

    #[test]
    fn x1_mode_rejects_nonzero_boundary() {
        let g = grid();
        let res = RadialFunction::from_fn(Arc::clone(&g), |_| 1.0, BoundaryMode::X1);
        assert!(res.is_err());
        assert!(RadialFunction::from_fn(g, |_| 1.0, BoundaryMode::Free).is_ok());
    }

    #[test]
    fn rejects_non_finite_values() {
        let g = grid();
        let mut vals = vec![0.0; g.len()];
        vals[3] = f64::NAN;
        assert!(RadialFunction::from_values(g, vals, BoundaryMode::Free).is_err());
    }

    #[test]
    fn scaling_and_abs() {
        let g = grid();
        let v = RadialFunction::from_fn(Arc::clone(&g), |r| r - 0.5, BoundaryMode::Free).unwrap();
        let w = v.scaled(-2.0);
        assert!((w.eval(0.25) - 0.5).abs() < 1e-12);
        let a = w.abs();
        assert!(a.values().iter().all(|x| *x >= 0.0));
    }
}
