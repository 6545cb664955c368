//! Problem parameters and derived constants.

use crate::error::{CoreError, Result};
use crate::special::unit_sphere_area;

/// The problem triple `(N, k, alpha)` together with every derived constant.
///
/// `N` is the space dimension, `k` the Hessian order with `2k < N`, and
/// `alpha > 0` the exponent perturbation: the variable exponent of the
/// functional is `k* + r^alpha`. The degenerate constructor
/// [`Params::critical_only`] disables the perturbation entirely (the exponent
/// is exactly `k*`), which is the mode used by closed-form test oracles and by
/// the non-attainment experiments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Params {
    dim: u32,
    k: u32,
    alpha: f64,
    degenerate: bool,
    k_star: f64,
    omega_sphere: f64,
    omega_nk: f64,
    tau: f64,
    radial_bound_coeff: f64,
    instanton_amplitude: f64,
}

impl Params {
    /// Standard construction with `alpha > 0`.
    pub fn new(dim: u32, k: u32, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(CoreError::InvalidParams(format!(
                "alpha must be finite and > 0 (got {alpha}); use Params::critical_only for the \
                 degenerate pure-critical mode"
            )));
        }
        Self::build(dim, k, alpha, false)
    }

    /// Degenerate test mode: the exponent is exactly `k*` (no `r^alpha` term).
    pub fn critical_only(dim: u32, k: u32) -> Result<Self> {
        Self::build(dim, k, 0.0, true)
    }

    fn build(dim: u32, k: u32, alpha: f64, degenerate: bool) -> Result<Self> {
        if dim < 3 {
            return Err(CoreError::InvalidParams(format!(
                "dimension N must be at least 3 (got {dim})"
            )));
        }
        if k < 1 || 2 * k >= dim {
            return Err(CoreError::InvalidParams(format!(
                "Hessian order k must satisfy 1 <= k < N/2 (got k = {k}, N = {dim})"
            )));
        }
        let n = dim as f64;
        let kf = k as f64;
        let k_star = n * (kf + 1.0) / (n - 2.0 * kf);
        let omega_sphere = unit_sphere_area(dim);
        let binom = binomial(dim, k);
        let omega_nk = omega_sphere * binom / n;
        let tau = n / binom;
        let radial_bound_coeff = kf * omega_nk.powf(-1.0 / kf) / (n - 2.0 * kf);
        // Exponent chosen so that the extremal family equalizes its gradient-side
        // and critical-side integrals (equivalently, solves the radial
        // Euler-Lagrange equation with unit constant); at k = 1 this reproduces
        // the classical bubble amplitude [N(N-2)]^{(N-2)/4}.
        let instanton_amplitude = (n * ((n - 2.0 * kf) / kf).powi(k as i32))
            .powf((n - 2.0 * kf) / (2.0 * kf * (kf + 1.0)));
        let out = Self {
            dim,
            k,
            alpha,
            degenerate,
            k_star,
            omega_sphere,
            omega_nk,
            tau,
            radial_bound_coeff,
            instanton_amplitude,
        };
        debug_assert!(out.k_star > kf + 1.0);
        for (name, value) in [
            ("k*", out.k_star),
            ("omega_sphere", out.omega_sphere),
            ("omega_nk", out.omega_nk),
            ("tau", out.tau),
            ("radial_bound_coeff", out.radial_bound_coeff),
            ("instanton_amplitude", out.instanton_amplitude),
        ] {
            if !(value > 0.0) || !value.is_finite() {
                return Err(CoreError::InvalidParams(format!(
                    "derived constant {name} is not strictly positive: {value}"
                )));
            }
        }
        Ok(out)
    }

    pub fn dim(&self) -> u32 {
        self.dim
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// True for the degenerate pure-critical test mode.
    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    /// Critical exponent k* = N(k+1)/(N−2k).
    pub fn k_star(&self) -> f64 {
        self.k_star
    }

    /// Area of the unit sphere in R^N.
    pub fn omega_sphere(&self) -> f64 {
        self.omega_sphere
    }

    /// Normalizing constant ω_{N,k} = ω_{N−1}·C(N,k)/N of the gradient norm.
    pub fn omega_nk(&self) -> f64 {
        self.omega_nk
    }

    /// Combinatorial ratio τ = N/C(N,k) of the quasilinear equation.
    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// Coefficient of the pointwise radial bound.
    pub fn radial_bound_coeff(&self) -> f64 {
        self.radial_bound_coeff
    }

    /// Amplitude of the extremal family at unit multiplier.
    pub fn instanton_amplitude(&self) -> f64 {
        self.instanton_amplitude
    }

    /// The variable exponent k* + r^alpha (just k* in degenerate mode).
    pub fn exponent(&self, r: f64) -> f64 {
        if self.degenerate {
            self.k_star
        } else {
            self.k_star + r.powf(self.alpha)
        }
    }

    /// Upper end (N−2k)/k of the attainability range for alpha.
    pub fn attainability_limit(&self) -> f64 {
        (self.dim as f64 - 2.0 * self.k as f64) / self.k as f64
    }

    /// True when 0 < alpha < (N−2k)/k, the regime with an attainment guarantee.
    pub fn in_attainable_regime(&self) -> bool {
        !self.degenerate && self.alpha < self.attainability_limit()
    }

    /// A copy with the perturbation disabled (pure k* exponent).
    pub fn to_critical_only(&self) -> Self {
        let mut p = *self;
        p.alpha = 0.0;
        p.degenerate = true;
        p
    }
}

fn binomial(n: u32, k: u32) -> f64 {
    let k = k.min(n - k);
    let mut num: u128 = 1;
    let mut den: u128 = 1;
    for i in 0..k as u128 {
        num *= n as u128 - i;
        den *= i + 1;
    }
    (num / den) as f64
}
