//! Maximization of the supercritical functional on the unit gradient sphere,
//! plus the diagnostics used to watch maximizing sequences concentrate.
//!
//! The ascent step exploits the one-dimensional structure: the quasilinear
//! operator of the Euler-Lagrange equation inverts in closed form by two
//! cumulative integrals and a k-th root, so each iteration solves the
//! linearized problem exactly and then renormalizes (successive linearization
//! with a backtracking line search). Fixed points of the map are exactly the
//! discrete Euler-Lagrange solutions.

use crate::error::{CoreError, Result};
use crate::grid::RadialGrid;
use crate::instanton::{sobolev_constant, w_eps_profile, InstantonSpec};
use crate::norms::{signed_power, x1_norm};
use crate::params::Params;
use crate::profile::{BoundaryMode, RadialFunction};
use crate::rng::SplitMix64;
use std::sync::Arc;

/// How the ascent is seeded.
#[derive(Debug, Clone, Copy)]
pub enum Initialization {
    /// Normalized cutoff instanton at the given scale (the default warm start).
    InstantonWarmStart { eps: f64 },
    /// Seeded random positive profile, for restart-invariance experiments.
    RandomPositive { seed: u64 },
}

#[derive(Debug, Clone, Copy)]
pub struct SolverConfig {
    pub max_iterations: usize,
    pub el_tolerance: f64,
    pub init: Initialization,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            max_iterations: 100_000,
            el_tolerance: 1e-6,
            init: Initialization::InstantonWarmStart { eps: 1e-2 },
        }
    }
}

/// Converged (or best-effort) maximizer data.
#[derive(Debug, Clone)]
pub struct OptimResult {
    /// Maximizer profile, unit gradient norm, nonnegative and nonincreasing.
    pub profile: RadialFunction,
    /// Value of the supercritical functional at the maximizer.
    pub value: f64,
    /// Lagrange multiplier 1/(omega_{N,k} int r^{N-1}(k*+r^a)|v|^{k*+r^a} dr).
    pub lambda: f64,
    /// Scaled sup-norm defect of the Euler-Lagrange integral identity.
    pub el_residual: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Objective value after every accepted iteration.
    pub objective_trace: Vec<f64>,
    /// Coarse/fine quadrature discrepancy of the reported value.
    pub quadrature_error_estimate: f64,
    /// Whether alpha sits in the regime with an attainment guarantee.
    pub attainable_regime: bool,
}

/// Best constant of the critical embedding, via the sharp-constant identity
/// (omega_{N,k} S)^{-k*/(k+1)}.
pub fn best_subcritical_constant(p: &Params) -> Result<f64> {
    let s = sobolev_constant(p)?;
    Ok((p.omega_nk() * s.value).powf(-p.k_star() / (p.k() as f64 + 1.0)))
}

struct Workspace {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    wgt_surface: Vec<f64>,
    wgt_gradient: Vec<f64>,
    exponents: Vec<f64>,
}

impl Workspace {
    fn new(grid: &RadialGrid, p: &Params) -> Self {
        let nodes = grid.nodes().to_vec();
        let weights = grid.weights().to_vec();
        let wgt_surface = nodes.iter().map(|r| r.powi(p.dim() as i32 - 1)).collect();
        let wgt_gradient = nodes
            .iter()
            .map(|r| r.powi((p.dim() - p.k()) as i32))
            .collect();
        let exponents = nodes.iter().map(|r| p.exponent(*r)).collect();
        Self {
            nodes,
            weights,
            wgt_surface,
            wgt_gradient,
            exponents,
        }
    }

    fn objective(&self, values: &[f64]) -> f64 {
        let mut acc = 0.0;
        for (i, v) in values.iter().enumerate() {
            acc += self.weights[i] * self.wgt_surface[i] * signed_power(*v, self.exponents[i]);
        }
        acc
    }

    fn gradient_energy(&self, derivative: &[f64], p: &Params) -> f64 {
        let kp1 = p.k() as f64 + 1.0;
        let mut acc = 0.0;
        for (i, d) in derivative.iter().enumerate() {
            acc += self.weights[i] * self.wgt_gradient[i] * d.abs().powf(kp1);
        }
        p.omega_nk() * acc
    }

    /// Source term of the linearized problem: r^{N-1}(k*+r^a)|v|^{k*+r^a-2}v.
    fn el_source(&self, values: &[f64]) -> Vec<f64> {
        (0..values.len())
            .map(|i| {
                self.wgt_surface[i]
                    * self.exponents[i]
                    * signed_power(values[i], self.exponents[i] - 1.0)
            })
            .collect()
    }
}

#[derive(Clone)]
struct Iterate {
    values: Vec<f64>,
    derivative: Vec<f64>,
}

impl Iterate {
    fn normalize(&mut self, ws: &Workspace, p: &Params) {
        let norm = ws
            .gradient_energy(&self.derivative, p)
            .powf(1.0 / (p.k() as f64 + 1.0));
        for v in &mut self.values {
            *v /= norm;
        }
        for d in &mut self.derivative {
            *d /= norm;
        }
    }

    fn blend(&self, other: &Iterate, theta: f64) -> Iterate {
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (1.0 - theta) * a + theta * b)
            .collect();
        let derivative = self
            .derivative
            .iter()
            .zip(&other.derivative)
            .map(|(a, b)| (1.0 - theta) * a + theta * b)
            .collect();
        Iterate { values, derivative }
    }
}

/// Exact inverse of the quasilinear operator with the given source:
/// r^{N-k}(-u')^k = cumulative(source), then u(r) = tail integral of (-u').
fn invert_operator(grid: &RadialGrid, ws: &Workspace, p: &Params, source: &[f64]) -> Iterate {
    let cum = grid.cumulative(source);
    let invk = 1.0 / p.k() as f64;
    let slope: Vec<f64> = cum
        .iter()
        .zip(&ws.wgt_gradient)
        .map(|(c, w)| (c.max(0.0) / w).powf(invk))
        .collect();
    let slope_cum = grid.cumulative(&slope);
    let total = *slope_cum.last().unwrap();
    let values: Vec<f64> = slope_cum.iter().map(|m| total - m).collect();
    let derivative = slope.iter().map(|m| -m).collect();
    Iterate { values, derivative }
}

/// Multiplier and scaled sup-norm defect of the integral form of the
/// Euler-Lagrange equation.
fn el_diagnostics(grid: &RadialGrid, ws: &Workspace, p: &Params, it: &Iterate) -> (f64, f64) {
    let source = ws.el_source(&it.values);
    let cum = grid.cumulative(&source);
    let mut denom = 0.0;
    for i in 0..it.values.len() {
        denom += ws.weights[i]
            * ws.wgt_surface[i]
            * ws.exponents[i]
            * signed_power(it.values[i], ws.exponents[i]);
    }
    let lambda = 1.0 / (p.omega_nk() * denom);
    let kf = p.k() as f64;
    let mut defect: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for (i, c) in cum.iter().enumerate() {
        let lhs = ws.wgt_gradient[i] * (-it.derivative[i]).max(0.0).powf(kf);
        let rhs = lambda * c;
        defect = defect.max((lhs - rhs).abs());
        scale = scale.max(lhs.abs().max(rhs.abs()));
    }
    (lambda, defect / scale.max(f64::MIN_POSITIVE))
}

fn initial_iterate(
    grid: &Arc<RadialGrid>,
    ws: &Workspace,
    p: &Params,
    init: Initialization,
) -> Result<Iterate> {
    match init {
        Initialization::InstantonWarmStart { eps } => {
            let spec = InstantonSpec::new(eps, p)?;
            let w = w_eps_profile(Arc::clone(grid), &spec, p)?;
            let mut it = Iterate {
                values: w.values().to_vec(),
                derivative: w.derivative().to_vec(),
            };
            it.normalize(ws, p);
            Ok(it)
        }
        Initialization::RandomPositive { seed } => {
            let mut rng = SplitMix64::new(seed);
            let knots = 8usize;
            let heights: Vec<f64> = (0..=knots).map(|_| rng.in_range(0.2, 1.2)).collect();
            let values: Vec<f64> = ws
                .nodes
                .iter()
                .map(|r| {
                    let x = r * knots as f64;
                    let i = (x.floor() as usize).min(knots - 1);
                    let t = x - i as f64;
                    let h = heights[i] * (1.0 - t) + heights[i + 1] * t;
                    (1.0 - r) * h
                })
                .collect();
            let profile = RadialFunction::from_values(Arc::clone(grid), values, BoundaryMode::X1)?;
            let mut it = Iterate {
                values: profile.values().to_vec(),
                derivative: profile.derivative().to_vec(),
            };
            it.normalize(ws, p);
            Ok(it)
        }
    }
}

/// Ascends the supercritical functional over the unit sphere of the gradient
/// norm. Non-convergence within the iteration budget is reported through
/// `converged = false`, never silently.
pub fn maximize_supercritical(
    p: &Params,
    grid: &Arc<RadialGrid>,
    cfg: &SolverConfig,
) -> Result<OptimResult> {
    let ws = Workspace::new(grid, p);
    let mut current = initial_iterate(grid, &ws, p, cfg.init)?;
    let mut objective = ws.objective(&current.values);
    let mut trace = vec![objective];
    let mut converged = false;
    let mut iterations = 0;

    for iter in 0..cfg.max_iterations {
        iterations = iter + 1;
        let (_, res) = el_diagnostics(grid, &ws, p, &current);
        if res < cfg.el_tolerance {
            converged = true;
            break;
        }
        if iter % 1000 == 0 {
            log::debug!(
                target: "hessext::extremal",
                "iter {iter}: objective {objective:.12e}, residual {res:.3e}"
            );
        }

        let source = ws.el_source(&current.values);
        let mut candidate = invert_operator(grid, &ws, p, &source);
        candidate.normalize(&ws, p);

        // Backtracking along the segment towards the linearized maximizer.
        let mut theta = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let mut trial = current.blend(&candidate, theta);
            trial.normalize(&ws, p);
            let trial_objective = ws.objective(&trial.values);
            if trial_objective >= objective - 1e-14 * objective.abs() {
                current = trial;
                objective = trial_objective;
                accepted = true;
                break;
            }
            theta *= 0.5;
        }
        trace.push(objective);
        if !accepted {
            log::debug!(
                target: "hessext::extremal",
                "line search exhausted at iter {iter} with residual {res:.3e}"
            );
            break;
        }
    }

    let (lambda, residual) = el_diagnostics(grid, &ws, p, &current);
    if residual < cfg.el_tolerance {
        converged = true;
    }

    let phi: Vec<f64> = (0..current.values.len())
        .map(|i| ws.wgt_surface[i] * signed_power(current.values[i], ws.exponents[i]))
        .collect();
    let (value, quad_err) = grid.integrate_with_error(&phi)?;

    let profile = RadialFunction::from_values_and_derivative(
        Arc::clone(grid),
        current.values,
        current.derivative,
        BoundaryMode::X1,
    )?;

    Ok(OptimResult {
        profile,
        value,
        lambda,
        el_residual: residual,
        iterations,
        converged,
        objective_trace: trace,
        quadrature_error_estimate: quad_err,
        attainable_regime: p.in_attainable_regime(),
    })
}

/// Ball-level value: U = omega_{N-1} * V, with the norm transfer re-checked.
#[derive(Debug, Clone, Copy)]
pub struct SphereValue {
    pub u_value: f64,
    pub profile_norm: f64,
}

pub fn u_from_v(res: &OptimResult, p: &Params) -> Result<SphereValue> {
    if !res.converged {
        return Err(CoreError::Unconverged(
            "ball-level value requires a converged maximizer".into(),
        ));
    }
    Ok(SphereValue {
        u_value: p.omega_sphere() * res.value,
        profile_norm: x1_norm(&res.profile, p)?,
    })
}

pub const DEFAULT_CONCENTRATION_THRESHOLD: f64 = 1e-3;

/// Tail gradient energies int_{r0}^1 r^{N-k}|v'|^{k+1} dr at each probe radius.
#[derive(Debug, Clone)]
pub struct ConcentrationReport {
    pub tail_energies: Vec<(f64, f64)>,
    pub concentrated: bool,
    pub threshold: f64,
}

pub fn concentration_diagnostic(
    v: &RadialFunction,
    p: &Params,
    probes: &[f64],
    threshold: Option<f64>,
) -> Result<ConcentrationReport> {
    let norm = x1_norm(v, p)?;
    if (norm - 1.0).abs() > 1e-6 {
        return Err(CoreError::InvalidInput(format!(
            "concentration diagnostic expects a unit-norm profile (norm = {norm})"
        )));
    }
    let threshold = threshold.unwrap_or(DEFAULT_CONCENTRATION_THRESHOLD);
    let kp1 = p.k() as f64 + 1.0;
    let wexp = (p.dim() - p.k()) as i32;
    let grid = v.grid();
    let samples: Vec<f64> = grid
        .nodes()
        .iter()
        .zip(v.derivative())
        .map(|(r, dv)| r.powi(wexp) * dv.abs().powf(kp1))
        .collect();
    let mut tail_energies = Vec::with_capacity(probes.len());
    let mut concentrated = true;
    for &r0 in probes {
        let tail = grid.tail_integral(&samples, r0);
        if r0 > 0.0 && tail >= threshold {
            concentrated = false;
        }
        tail_energies.push((r0, tail));
    }
    Ok(ConcentrationReport {
        tail_energies,
        concentrated,
        threshold,
    })
}

/// Inner/outer split of the supercritical functional at an internally chosen
/// radius, mirroring the two-sided bound used to control concentrating
/// sequences.
#[derive(Debug, Clone, Copy)]
pub struct SplitBoundCheck {
    pub delta: f64,
    pub inner: f64,
    pub outer: f64,
    pub bound_ok: bool,
}

pub fn step2_bound_check(v: &RadialFunction, p: &Params, eps_tol: f64) -> Result<SplitBoundCheck> {
    if !(eps_tol > 0.0) {
        return Err(CoreError::InvalidInput(format!(
            "tolerance must be positive (got {eps_tol})"
        )));
    }
    let norm = x1_norm(v, p)?;
    if (norm - 1.0).abs() > 1e-6 {
        return Err(CoreError::InvalidInput(format!(
            "split bound expects a unit-norm profile (norm = {norm})"
        )));
    }
    let best = best_subcritical_constant(p)?;

    // Pick delta so the pointwise-bound excess keeps the inner integral within
    // eps_tol/2 of the critical constant: |v(r)| <= c r^{-(N-2k)/(k+1)} with
    // c = cbar^{k/(k+1)}, so sup_{r<=delta} r^alpha log+(c r^{-(N-2k)/(k+1)})
    // must stay below log(1 + eps_tol/(2 best)).
    let kf = p.k() as f64;
    let nf = p.dim() as f64;
    let c = p.radial_bound_coeff().powf(kf / (kf + 1.0));
    let b = (nf - 2.0 * kf) / (kf + 1.0);
    let target = (1.0 + eps_tol / (2.0 * best)).ln();
    let alpha = if p.is_degenerate() { 0.0 } else { p.alpha() };
    let pointwise = |r: f64| r.powf(alpha) * (c.ln() + b * (1.0 / r).ln()).max(0.0);
    // interior maximum of r^alpha (log c + b log(1/r))
    let r_peak = c.powf(1.0 / b) * (-1.0 / alpha).exp();
    let delta = if alpha == 0.0 || pointwise(r_peak) <= target {
        0.5
    } else {
        // below r_peak the excess is increasing; bisect for the target level
        let mut lo = 1e-12;
        let mut hi = r_peak.min(0.5);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if pointwise(mid) > target {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        lo
    };

    let grid = v.grid();
    let wexp = (p.dim() - 1) as i32;
    let phi: Vec<f64> = grid
        .nodes()
        .iter()
        .zip(v.values())
        .map(|(r, val)| r.powi(wexp) * signed_power(*val, p.exponent(*r)))
        .collect();
    let total = grid.integrate(&phi);
    let outer = grid.tail_integral(&phi, delta);
    let inner = total - outer;
    let bound_ok = inner <= best + 0.5 * eps_tol && outer <= 0.5 * eps_tol;
    Ok(SplitBoundCheck {
        delta,
        inner,
        outer,
        bound_ok,
    })
}
