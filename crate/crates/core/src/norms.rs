//! Weighted norms and the supercritical functional.

use crate::error::{CoreError, Result};
use crate::params::Params;
use crate::profile::RadialFunction;

/// |base|^e with the convention 0^e = 0 for e > 0, evaluated through exp/log
/// so variable exponents never produce NaN from log 0.
#[inline]
pub fn signed_power(base: f64, exponent: f64) -> f64 {
    let b = base.abs();
    if b == 0.0 {
        0.0
    } else {
        (exponent * b.ln()).exp()
    }
}

/// Gradient norm of the weighted space: (ω_{N,k} ∫_0^1 r^{N−k} |v'|^{k+1} dr)^{1/(k+1)}.
pub fn x1_norm(v: &RadialFunction, p: &Params) -> Result<f64> {
    if !v.is_x1() {
        return Err(CoreError::InvalidInput(
            "x1_norm requires an X1-mode profile (v(1) = 0)".into(),
        ));
    }
    Ok(x1_norm_unchecked(v, p))
}

/// Same integral without the boundary-mode check; used internally on trial
/// profiles that are not yet pinned at the boundary.
pub(crate) fn x1_norm_unchecked(v: &RadialFunction, p: &Params) -> f64 {
    let wexp = (p.dim() - p.k()) as i32;
    let kp1 = p.k() as f64 + 1.0;
    let grid = v.grid();
    let mut acc = 0.0;
    for ((r, w), dv) in grid.nodes().iter().zip(grid.weights()).zip(v.derivative()) {
        acc += w * r.powi(wexp) * dv.abs().powf(kp1);
    }
    (p.omega_nk() * acc).powf(1.0 / kp1)
}

/// Weighted Lebesgue norm (∫_0^1 r^{N−j} |v|^q dr)^{1/q}, j ∈ {1, …, k}.
pub fn lq_norm(v: &RadialFunction, q: f64, j: u32, p: &Params) -> Result<f64> {
    if !(q >= 1.0) || !q.is_finite() {
        return Err(CoreError::InvalidInput(format!(
            "Lebesgue exponent must be finite and >= 1 (got {q})"
        )));
    }
    if j < 1 || j > p.k() {
        return Err(CoreError::InvalidInput(format!(
            "weight index j must lie in 1..=k (got j = {j}, k = {})",
            p.k()
        )));
    }
    let wexp = (p.dim() - j) as i32;
    let grid = v.grid();
    let mut acc = 0.0;
    for ((r, w), val) in grid.nodes().iter().zip(grid.weights()).zip(v.values()) {
        acc += w * r.powi(wexp) * val.abs().powf(q);
    }
    Ok(acc.powf(1.0 / q))
}

/// The supercritical functional ∫_0^1 r^{N−1} |v|^{k* + r^α} dr.
pub fn supercritical_functional(v: &RadialFunction, p: &Params) -> Result<f64> {
    let wexp = (p.dim() - 1) as i32;
    let grid = v.grid();
    let mut acc = 0.0;
    for ((r, w), val) in grid.nodes().iter().zip(grid.weights()).zip(v.values()) {
        acc += w * r.powi(wexp) * signed_power(*val, p.exponent(*r));
    }
    if !acc.is_finite() {
        return Err(CoreError::InvalidInput(
            "supercritical functional overflowed; profile values too large".into(),
        ));
    }
    Ok(acc)
}

/// The critical functional ∫_0^1 r^{N−1} |v|^{k*} dr (perturbation disabled).
pub fn critical_functional(v: &RadialFunction, p: &Params) -> Result<f64> {
    supercritical_functional(v, &p.to_critical_only())
}

/// Pointwise bound [c̄ (r^{−(N−2k)/k} − 1)]^{k/(k+1)} valid for every
/// unit-gradient-norm profile.
pub fn radial_bound(r: f64, p: &Params) -> Result<f64> {
    if !(r > 0.0 && r <= 1.0) {
        return Err(CoreError::Domain(format!(
            "radial bound is defined on (0, 1] (got r = {r})"
        )));
    }
    let nf = p.dim() as f64;
    let kf = p.k() as f64;
    let inner = p.radial_bound_coeff() * (r.powf(-(nf - 2.0 * kf) / kf) - 1.0);
    Ok(inner.max(0.0).powf(kf / (kf + 1.0)))
}

/// Luxemburg norm of the variable-exponent space:
/// inf{λ > 0 : ∫_0^1 r^{N−1} |v/λ|^{k*+r^α} dr ≤ 1}, by bisection on λ.
pub fn luxemburg_norm(v: &RadialFunction, p: &Params) -> Result<f64> {
    let modular = |lambda: f64| -> Result<f64> {
        let wexp = (p.dim() - 1) as i32;
        let grid = v.grid();
        let mut acc = 0.0;
        for ((r, w), val) in grid.nodes().iter().zip(grid.weights()).zip(v.values()) {
            acc += w * r.powi(wexp) * signed_power(val / lambda, p.exponent(*r));
        }
        if acc.is_nan() {
            return Err(CoreError::InternalConsistency(
                "Luxemburg modular evaluated to NaN".into(),
            ));
        }
        Ok(acc)
    };

    if v.values().iter().all(|x| *x == 0.0) {
        return Ok(0.0);
    }

    // Bracket the unit-modular level: the modular is strictly decreasing in λ,
    // → ∞ as λ ↓ 0 and → 0 as λ → ∞.
    let mut lo = 1.0f64;
    let mut hi = 1.0f64;
    let mut guard = 0;
    while modular(lo)? <= 1.0 {
        lo *= 0.5;
        guard += 1;
        if guard > 4200 {
            return Err(CoreError::InternalConsistency(
                "Luxemburg bisection failed to bracket from below".into(),
            ));
        }
    }
    guard = 0;
    while modular(hi)? > 1.0 {
        hi *= 2.0;
        guard += 1;
        if guard > 4200 {
            return Err(CoreError::InternalConsistency(
                "Luxemburg bisection failed to bracket from above".into(),
            ));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if modular(mid)? > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo) <= 1e-14 * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::RadialGrid;
    use crate::profile::BoundaryMode;
    use crate::special::beta;
    use std::f64::consts::PI;
    use std::sync::Arc;

    fn grid() -> Arc<RadialGrid> {
        Arc::new(RadialGrid::graded(1024, 3.0).unwrap())
    }

    #[test]
    fn x1_norm_of_zero_is_zero() {
        let p = Params::new(3, 1, 1.0).unwrap();
        let v = RadialFunction::zero(grid());
        assert_eq!(x1_norm(&v, &p).unwrap(), 0.0);
    }

    #[test]
    fn x1_norm_linear_profile_closed_form() {
        // N=3, k=1, v = 1 − r: ω ∫ r² dr = 4π/3
        let p = Params::new(3, 1, 1.0).unwrap();
        let v = RadialFunction::from_fn(grid(), |r| 1.0 - r, BoundaryMode::X1).unwrap();
        let expected = (4.0 * PI / 3.0).sqrt();
        let got = x1_norm(&v, &p).unwrap();
        assert!((got - expected).abs() < 1e-10, "{got} vs {expected}");
        assert!((expected - 2.046_654).abs() < 1e-6);
    }

    #[test]
    fn x1_norm_is_absolutely_homogeneous() {
        let p = Params::new(5, 2, 1.0).unwrap();
        let v =
            RadialFunction::from_fn(grid(), |r| (1.0 - r) * (2.0 + r), BoundaryMode::X1).unwrap();
        let c = -2.5;
        let a = x1_norm(&v.scaled(c), &p).unwrap();
        let b = c.abs() * x1_norm(&v, &p).unwrap();
        assert!((a - b).abs() <= 1e-12 * b);
    }

    #[test]
    fn x1_norm_requires_boundary_mode() {
        let p = Params::new(3, 1, 1.0).unwrap();
        let v = RadialFunction::from_fn(grid(), |_| 1.0, BoundaryMode::Free).unwrap();
        assert!(x1_norm(&v, &p).is_err());
    }

    #[test]
    fn lq_norm_closed_form_and_abs_invariance() {
        let p = Params::new(3, 1, 1.0).unwrap();
        let one = RadialFunction::from_fn(grid(), |_| 1.0, BoundaryMode::Free).unwrap();
        let got = lq_norm(&one, 2.0, 1, &p).unwrap();
        let expected = 3f64.powf(-0.5);
        assert!((got - expected).abs() < 1e-12);

        let zero = RadialFunction::zero(grid());
        assert_eq!(lq_norm(&zero, 2.0, 1, &p).unwrap(), 0.0);

        let osc =
            RadialFunction::from_fn(grid(), |r| (20.0 * r).sin(), BoundaryMode::Free).unwrap();
        let a = lq_norm(&osc, 3.0, 1, &p).unwrap();
        let b = lq_norm(&osc.abs(), 3.0, 1, &p).unwrap();
        assert!((a - b).abs() <= 1e-14 * b.max(1.0));
    }

    #[test]
    fn lq_norm_validates_arguments() {
        let p = Params::new(5, 2, 1.0).unwrap();
        let v = RadialFunction::zero(grid());
        assert!(lq_norm(&v, 0.5, 1, &p).is_err());
        assert!(lq_norm(&v, f64::INFINITY, 1, &p).is_err());
        assert!(lq_norm(&v, 2.0, 0, &p).is_err());
        assert!(lq_norm(&v, 2.0, 3, &p).is_err());
    }

    #[test]
    fn supercritical_functional_beta_oracle() {
        // degenerate mode (pure k* = 6), N=3, k=1, v = 1−r:
        // ∫ r²(1−r)^6 dr = B(3,7) = 1/252
        let p = Params::critical_only(3, 1).unwrap();
        let v = RadialFunction::from_fn(grid(), |r| 1.0 - r, BoundaryMode::X1).unwrap();
        let got = supercritical_functional(&v, &p).unwrap();
        let expected = beta(3.0, 7.0);
        assert!((got - expected).abs() < 1e-12, "{got} vs {expected}");
        assert!((expected - 1.0 / 252.0).abs() < 1e-15);
    }

    #[test]
    fn supercritical_functional_zero_convention() {
        let p = Params::new(3, 1, 1.0).unwrap();
        let v = RadialFunction::zero(grid());
        assert_eq!(supercritical_functional(&v, &p).unwrap(), 0.0);
    }

    #[test]
    fn radial_bound_examples() {
        let p = Params::new(3, 1, 1.0).unwrap();
        assert_eq!(radial_bound(1.0, &p).unwrap(), 0.0);
        // N=3, k=1, r=1/4: sqrt(c̄ (4 − 1)) = sqrt(3/(4π))
        let got = radial_bound(0.25, &p).unwrap();
        let expected = (3.0 / (4.0 * PI)).sqrt();
        assert!((got - expected).abs() < 1e-12);
        assert!((expected - 0.48860).abs() < 1e-5);
        assert!(radial_bound(0.0, &p).is_err());
        assert!(radial_bound(-1.0, &p).is_err());
    }

    #[test]
    fn radial_bound_is_one_at_the_unit_level_radius() {
        // at ρ* = (c̄/(1+c̄))^{k/(N−2k)} the bound equals exactly 1
        for (n, k) in [(3u32, 1u32), (5, 1), (5, 2), (9, 2), (7, 3)] {
            let p = Params::new(n, k, 1.0).unwrap();
            let cb = p.radial_bound_coeff();
            let rho = (cb / (1.0 + cb)).powf(k as f64 / (n as f64 - 2.0 * k as f64));
            let b = radial_bound(rho, &p).unwrap();
            assert!((b - 1.0).abs() < 1e-12, "(N,k)=({n},{k}): {b}");
        }
    }

    #[test]
    fn luxemburg_norm_zero_and_homogeneity() {
        let p = Params::new(3, 1, 1.0).unwrap();
        let zero = RadialFunction::zero(grid());
        assert_eq!(luxemburg_norm(&zero, &p).unwrap(), 0.0);

        let v = RadialFunction::from_fn(grid(), |r| 1.0 - r * r, BoundaryMode::Free).unwrap();
        let base = luxemburg_norm(&v, &p).unwrap();
        let scaled = luxemburg_norm(&v.scaled(3.0), &p).unwrap();
        assert!(
            (scaled - 3.0 * base).abs() <= 1e-12 * scaled,
            "{scaled} vs {}",
            3.0 * base
        );
    }

    #[test]
    fn luxemburg_norm_modular_at_norm_is_one() {
        let p = Params::new(5, 1, 1.0).unwrap();
        let v = RadialFunction::from_fn(grid(), |r| 2.0 * (1.0 - r), BoundaryMode::X1).unwrap();
        let lam = luxemburg_norm(&v, &p).unwrap();
        let scaled = v.scaled(1.0 / lam);
        let modular = supercritical_functional(&scaled, &p).unwrap();
        assert!((modular - 1.0).abs() < 1e-10, "modular {modular}");
    }
}
