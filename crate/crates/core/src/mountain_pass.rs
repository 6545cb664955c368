//! The energy functional of the quasilinear equation, the explicit
//! noncompactness threshold, and the instanton-ray level estimates.
//!
//! The mountain-pass level itself is not computed by path optimization; only
//! the upper bound obtained by maximizing the energy along the ray t -> t w_e
//! is reproduced, which is what places the level strictly below the
//! noncompactness threshold.

use crate::error::{CoreError, Result};
use crate::instanton::{
    integrate_cutoff_family, sobolev_constant, w_gradient_energy, InstantonSpec,
};
use crate::norms::signed_power;
use crate::params::Params;
use crate::profile::RadialFunction;

/// Energy functional
/// I(v) = 1/(k+1) int r^{N-k}|v'|^{k+1} - tau int r^{N-1}/(k*+r^a) (v+)^{k*+r^a}.
pub fn functional_energy(v: &RadialFunction, p: &Params) -> Result<f64> {
    if !v.is_x1() {
        return Err(CoreError::InvalidInput(
            "energy functional expects an X1-mode profile".into(),
        ));
    }
    let grid = v.grid();
    let kp1 = p.k() as f64 + 1.0;
    let gexp = (p.dim() - p.k()) as i32;
    let sexp = p.dim() as i32 - 1;
    let gradient =
        grid.integrate_fn_indexed(|i, r| r.powi(gexp) * v.derivative()[i].abs().powf(kp1));
    let potential = grid.integrate_fn_indexed(|i, r| {
        let e = p.exponent(r);
        r.powi(sexp) / e * signed_power(v.values()[i].max(0.0), e)
    });
    Ok(gradient / kp1 - p.tau() * potential)
}

/// The explicit threshold
/// (1/(k+1) - 1/k*) (C(N,k)/N)^{(k+1)/(k*-k-1)} S^{N/(2k)}.
pub fn noncompactness_level(p: &Params) -> Result<f64> {
    let s = sobolev_constant(p)?;
    let kf = p.k() as f64;
    let ks = p.k_star();
    let ratio = 1.0 / p.tau(); // C(N,k)/N
    Ok((1.0 / (kf + 1.0) - 1.0 / ks) * ratio.powf((kf + 1.0) / (ks - kf - 1.0)) * s.power)
}

/// The multiplier (C(N,k)/N)^{1/(k*-k-1)} that balances the gradient and
/// potential terms of the energy along the instanton ray.
pub fn balanced_amplitude(p: &Params) -> f64 {
    (1.0 / p.tau()).powf(1.0 / (p.k_star() - p.k() as f64 - 1.0))
}

/// Potential side of the stationarity equation:
/// P(t) = int_0^1 t^{r^a} r^{N-1} |w_e|^{k*+r^a} dr.
fn scaled_supercritical_integral(t: f64, spec: &InstantonSpec, p: &Params) -> f64 {
    let sexp = (p.dim() - 1) as f64;
    integrate_cutoff_family(spec, p, |r, w, _| {
        signed_power(t, r.powf(p.alpha())) * r.powf(sexp) * signed_power(w, p.exponent(r))
    })
}

/// Energy along the ray: I(t w_e).
fn ray_energy(t: f64, gradient_energy: f64, spec: &InstantonSpec, p: &Params) -> f64 {
    let kp1 = p.k() as f64 + 1.0;
    let sexp = (p.dim() - 1) as f64;
    let potential = integrate_cutoff_family(spec, p, |r, w, _| {
        let e = p.exponent(r);
        r.powf(sexp) / e * signed_power(t * w, e)
    });
    t.powf(kp1) / kp1 * gradient_energy - p.tau() * potential
}

/// Root of the ray stationarity equation
/// int r^{N-k}|w'|^{k+1} = tau t^{k*-k-1} int t^{r^a} r^{N-1}|w|^{k*+r^a},
/// solved for the scale t of the balanced-amplitude cutoff instanton.
pub fn stationary_ray_scale(eps: f64, p: &Params) -> Result<f64> {
    if p.is_degenerate() {
        return Err(CoreError::InvalidInput(
            "ray stationarity needs alpha > 0".into(),
        ));
    }
    let spec = InstantonSpec::with_amplitude(eps, balanced_amplitude(p), p)?;
    if eps >= spec.inner_radius {
        return Err(CoreError::Domain(format!(
            "scale {eps} must sit below the cutoff radius {}",
            spec.inner_radius
        )));
    }
    let energy = w_gradient_energy(&spec, p);
    solve_ray_scale(energy, p, |t| scaled_supercritical_integral(t, &spec, p))
}

/// Bisection for G(t) = E_g - tau t^{k*-k-1} P(t) = 0; G decreases strictly
/// from E_g at t -> 0, so the root in (0, 10) is unique.
fn solve_ray_scale<F: Fn(f64) -> f64>(
    gradient_energy: f64,
    p: &Params,
    potential: F,
) -> Result<f64> {
    let expo = p.k_star() - p.k() as f64 - 1.0;
    let g = |t: f64| gradient_energy - p.tau() * t.powf(expo) * potential(t);
    let mut lo = 1e-6;
    let mut hi = 10.0;
    if !(g(lo) > 0.0 && g(hi) < 0.0) {
        return Err(CoreError::Domain(format!(
            "ray stationarity has no root in ({lo}, {hi})"
        )));
    }
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-13 * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Level estimates along a decreasing ladder of scales.
#[derive(Debug, Clone)]
pub struct LevelReport {
    /// The noncompactness threshold.
    pub threshold: f64,
    /// (eps, max_t I(t w_eps)) per ladder entry.
    pub ray_max_energies: Vec<(f64, f64)>,
    /// (eps, stationary scale t_eps) per ladder entry.
    pub ray_scales: Vec<(f64, f64)>,
    /// threshold minus the largest ray maximum over the ladder.
    pub margin: f64,
    /// Estimated quadrature error of the ray maxima.
    pub quadrature_error: f64,
}

/// Maximizes the energy along the instanton ray for each scale in the ladder
/// and reports the strict margin below the noncompactness threshold.
pub fn mp_upper_bound(eps_ladder: &[f64], p: &Params) -> Result<LevelReport> {
    if p.is_degenerate() {
        return Err(CoreError::InvalidInput(
            "level estimates need alpha > 0".into(),
        ));
    }
    if eps_ladder.is_empty() {
        return Err(CoreError::InvalidInput("empty scale ladder".into()));
    }
    if !p.in_attainable_regime() {
        return Err(CoreError::Domain(format!(
            "level bound requires 0 < alpha < (N-2k)/k (alpha = {}, limit = {})",
            p.alpha(),
            p.attainability_limit()
        )));
    }
    let threshold = noncompactness_level(p)?;
    let amplitude = balanced_amplitude(p);
    let mut ray_max_energies = Vec::with_capacity(eps_ladder.len());
    let mut ray_scales = Vec::with_capacity(eps_ladder.len());
    let mut worst = f64::NEG_INFINITY;
    let mut quadrature_error: f64 = 0.0;

    for &eps in eps_ladder {
        let spec = InstantonSpec::with_amplitude(eps, amplitude, p)?;
        if eps >= spec.inner_radius {
            return Err(CoreError::Domain(format!(
                "scale {eps} must sit below the cutoff radius {}",
                spec.inner_radius
            )));
        }
        let energy = w_gradient_energy(&spec, p);
        let ray = |t: f64| ray_energy(t, energy, &spec, p);

        // path endpoint with negative energy
        let mut t_hi = 1.0;
        let mut guard = 0;
        while ray(t_hi) > 0.0 {
            t_hi *= 2.0;
            guard += 1;
            if guard > 60 {
                return Err(CoreError::Unconverged(
                    "no negative-energy endpoint along the ray".into(),
                ));
            }
        }

        // coarse scan, then golden-section refinement
        let samples = 192usize;
        let mut best_i = 0usize;
        let mut best_v = f64::NEG_INFINITY;
        for i in 0..=samples {
            let t = t_hi * i as f64 / samples as f64;
            let v = if t == 0.0 { 0.0 } else { ray(t) };
            if v > best_v {
                best_v = v;
                best_i = i;
            }
        }
        let mut a = t_hi * best_i.saturating_sub(1) as f64 / samples as f64;
        let mut b = t_hi * (best_i + 1).min(samples) as f64 / samples as f64;
        let phi = 0.5 * (5f64.sqrt() - 1.0);
        let mut x1 = b - phi * (b - a);
        let mut x2 = a + phi * (b - a);
        let mut f1 = ray(x1);
        let mut f2 = ray(x2);
        for _ in 0..80 {
            if f1 < f2 {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + phi * (b - a);
                f2 = ray(x2);
            } else {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - phi * (b - a);
                f1 = ray(x1);
            }
            if (b - a) <= 1e-12 * b {
                break;
            }
        }
        let t_star = 0.5 * (a + b);
        let max_energy = ray(t_star);

        // error bar: re-evaluate the maximum against the panel-refined energy
        let refined = ray_energy_refined(t_star, &spec, p);
        quadrature_error = quadrature_error.max((max_energy - refined).abs());

        ray_max_energies.push((eps, max_energy));
        let t_eps = solve_ray_scale(energy, p, |t| scaled_supercritical_integral(t, &spec, p))?;
        ray_scales.push((eps, t_eps));
        worst = worst.max(max_energy);
    }

    Ok(LevelReport {
        threshold,
        margin: threshold - worst,
        ray_max_energies,
        ray_scales,
        quadrature_error,
    })
}

/// Same ray energy with twice the panel resolution, to estimate the
/// quadrature error bar.
fn ray_energy_refined(t: f64, spec: &InstantonSpec, p: &Params) -> f64 {
    use crate::instanton::{w_eps, w_eps_derivative};
    use crate::quad::{geometric_breakpoints, integrate_panels, GaussLegendre};
    let rule = GaussLegendre::new(48);
    let r0 = spec.inner_radius;
    let extras = [
        r0,
        1.25 * r0,
        1.5 * r0,
        1.75 * r0,
        2.0 * r0,
        spec.eps,
        0.5 * spec.eps,
    ];
    let breaks = geometric_breakpoints(spec.eps / 4096.0, 1.0, 1.5, &extras);
    let kp1 = p.k() as f64 + 1.0;
    let gexp = (p.dim() - p.k()) as f64;
    let sexp = (p.dim() - 1) as f64;
    let gradient = integrate_panels(
        |r| r.powf(gexp) * w_eps_derivative(r, spec, p).abs().powf(kp1),
        &breaks,
        &rule,
    );
    let potential = integrate_panels(
        |r| {
            let e = p.exponent(r);
            r.powf(sexp) / e * signed_power(t * w_eps(r, spec, p), e)
        },
        &breaks,
        &rule,
    );
    t.powf(kp1) / kp1 * gradient - p.tau() * potential
}

/// Superlinearity margin s f(r,s) - xi F(r,s) with xi = (k+1+k*)/2 and
/// F(r,s) = s^{k*+r^a}/(k*+r^a); nonnegative, vanishing only at s = 0.
pub fn ar_margin(r: f64, s: f64, p: &Params) -> f64 {
    let e = p.exponent(r);
    let xi = ar_xi(p);
    signed_power(s, e) * (1.0 - xi / e)
}

/// Midpoint of (k+1, k*).
pub fn ar_xi(p: &Params) -> f64 {
    0.5 * (p.k() as f64 + 1.0 + p.k_star())
}
