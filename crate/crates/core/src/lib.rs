//! Numerical toolkit for the supercritical Sobolev-type extremal problem of the
//! radial k-Hessian operator on the unit ball.
//!
//! Everything is phrased on the weighted radial spaces over (0, 1]: profiles are
//! nodal functions on a graded mesh, norms and functionals are weighted
//! quadratures, and the two solvers (a constrained maximizer and a shooting
//! solver for the associated quasilinear boundary-value problem) work directly
//! on that representation.
//!
//! The crate is organized along the problem structure:
//!
//! * [`params`] — the problem triple `(N, k, alpha)` and every derived constant;
//! * [`grid`] / [`profile`] — graded quadrature meshes and nodal radial profiles;
//! * [`norms`] — gradient norm, weighted Lebesgue norms, the supercritical
//!   functional and the Luxemburg norm of the variable-exponent space;
//! * [`instanton`] — the explicit extremal family, the Sobolev constant, and
//!   numerical verification of its asymptotic expansions;
//! * [`extremal`] — maximization of the supercritical functional on the unit
//!   gradient sphere plus concentration diagnostics;
//! * [`hessian_ode`] — outward integration and shooting for the radial
//!   supercritical k-Hessian equation with admissibility certification;
//! * [`mountain_pass`] — the energy functional, the explicit noncompactness
//!   threshold, and instanton-ray level estimates.
//!
//! All operations are pure functions of immutable inputs and can be used from
//! multiple threads without synchronization.
//!
//! # Example
//!
//! ```
//! use hessext_core::{best_subcritical_constant, instanton, radial_bound, Params};
//!
//! let p = Params::new(5, 1, 1.0)?;
//! assert!((p.k_star() - 10.0 / 3.0).abs() < 1e-14);
//!
//! // sharp embedding constant, computed from both of its defining integrals
//! let s = instanton::sobolev_constant(&p)?;
//! assert!((s.gradient_integral - s.critical_integral).abs() < 1e-8 * s.power);
//!
//! // best constant of the critical embedding and the pointwise bound
//! let best = best_subcritical_constant(&p)?;
//! assert!(best > 0.0 && radial_bound(0.5, &p)? > 0.0);
//! # Ok::<(), hessext_core::CoreError>(())
//! ```

// `!(x > 0.0)` is the NaN-rejecting validation idiom used throughout.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod extremal;
pub mod fit;
pub mod grid;
pub mod hessian_ode;
pub mod instanton;
pub mod mountain_pass;
pub mod norms;
pub mod params;
pub mod profile;
pub mod quad;
pub mod rng;
pub mod special;

pub use error::{CoreError, Result};
pub use extremal::{
    best_subcritical_constant, concentration_diagnostic, maximize_supercritical, step2_bound_check,
    u_from_v, ConcentrationReport, Initialization, OptimResult, SolverConfig, SplitBoundCheck,
};
pub use grid::RadialGrid;
pub use hessian_ode::{
    auto_bracket, hessian_residual, integrate_outward, k_admissibility_check, shoot,
    OutwardProfile, ShootResult,
};
pub use instanton::{
    a_eps, expansion_far_tail, expansion_midrange, expansion_near_zero, instanton_value,
    sharper_estimates, sobolev_constant, w_eps, ExpansionRegime, ExpansionReport, InstantonSpec,
    SharperEstimates, SobolevConstant,
};
pub use mountain_pass::{
    ar_margin, balanced_amplitude, functional_energy, mp_upper_bound, noncompactness_level,
    stationary_ray_scale, LevelReport,
};
pub use norms::{
    critical_functional, lq_norm, luxemburg_norm, radial_bound, supercritical_functional, x1_norm,
};
pub use params::Params;
pub use profile::{BoundaryMode, RadialFunction};
