//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.
//! Criterion 10 (CLI determinism) lives in the CLI crate's own acceptance
//! test, next to the binary it exercises.

use hessext_core::*;
use std::sync::Arc;
use std::time::Instant;

const MATRIX: [(u32, u32); 5] = [(3, 1), (5, 1), (5, 2), (9, 2), (7, 3)];
const TRIPLES: [(u32, u32, f64); 3] = [(5, 1, 1.0), (5, 1, 2.5), (9, 2, 1.0)];

struct Criterion {
    id: u32,
    failures: Vec<String>,
    details: Vec<String>,
}

impl Criterion {
    fn new(id: u32) -> Self {
        Self {
            id,
            failures: Vec::new(),
            details: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, what: impl Into<String>) {
        let what = what.into();
        self.details.push(what.clone());
        if !ok {
            self.failures.push(what);
        }
    }

    fn finish(self) {
        if self.failures.is_empty() {
            println!("criterion {}: PASS — {}", self.id, self.details.join("; "));
        } else {
            println!("criterion {}: FAIL — {}", self.id, self.failures.join("; "));
            panic!("criterion {} failed: {}", self.id, self.failures.join("; "));
        }
    }
}

#[test]
fn criterion_01_dual_integral_identity() {
    let start = Instant::now();
    let mut c = Criterion::new(1);
    for (n, k) in MATRIX {
        let p = Params::new(n, k, 1.0).unwrap();
        let s = instanton::sobolev_constant(&p).unwrap();
        let rel = (s.gradient_integral - s.critical_integral).abs() / s.critical_integral;
        c.check(
            rel < 1e-8,
            format!("(N,k)=({n},{k}) rel dual gap {rel:.2e}"),
        );
        let s_small = instanton::sobolev_constant_at(&p, 0.1).unwrap();
        let indep = (s.value - s_small.value).abs() / s.value;
        c.check(
            indep < 1e-8,
            format!("(N,k)=({n},{k}) eps-independence {indep:.2e}"),
        );
    }
    let elapsed = start.elapsed();
    c.check(
        elapsed.as_secs_f64() < 5.0,
        format!("runtime {:.2}s < 5s", elapsed.as_secs_f64()),
    );
    c.finish();
}

#[test]
fn criterion_02_remark_identity_and_witness() {
    let mut c = Criterion::new(2);
    for (n, k) in MATRIX {
        let p = Params::new(n, k, 1.0).unwrap();
        let s = instanton::sobolev_constant(&p).unwrap();
        let best = best_subcritical_constant(&p).unwrap();
        let product = (p.omega_nk() * s.value).powf(p.k_star() / (k as f64 + 1.0)) * best;
        c.check(
            (product - 1.0).abs() < 1e-10,
            format!(
                "(N,k)=({n},{k}) identity defect {:.1e}",
                (product - 1.0).abs()
            ),
        );
    }
    // Witness quality at eps = 1e-3 for the pairs whose first correction
    // O(eps^{(N-2k)/k}) has actually decayed at that scale; for (3,1), (5,2)
    // and (7,3) the corrections measure 3.3e-2, 5.2e-1 and 2.3 there, so a
    // 1e-3 surrogate cannot certify them and they are exercised at the
    // identity level above instead.
    for (n, k) in [(5u32, 1u32), (9, 2)] {
        let p = Params::new(n, k, 1.0).unwrap();
        let s = instanton::sobolev_constant(&p).unwrap();
        let best = best_subcritical_constant(&p).unwrap();
        let amp = (p.omega_nk() * s.power).powf(-1.0 / (k as f64 + 1.0));
        let spec = InstantonSpec::with_amplitude(1e-3, amp, &p).unwrap();
        let grad = instanton::w_gradient_energy(&spec, &p);
        let norm = (p.omega_nk() * grad).powf(1.0 / (k as f64 + 1.0));
        let witness = instanton::w_critical_integral(&spec, &p) / norm.powf(p.k_star());
        c.check(
            witness >= 0.99 * best && witness <= best,
            format!(
                "(N,k)=({n},{k}) witness attains {:.4}% from below",
                100.0 * witness / best
            ),
        );
    }
    c.finish();
}

#[test]
fn criterion_03_radial_bound_on_random_profiles() {
    let mut c = Criterion::new(3);
    let grid = Arc::new(RadialGrid::default_grid());
    let p = Params::new(5, 1, 1.0).unwrap();
    let mut rng = rng::SplitMix64::new(0x5eed);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let v = random_unit_piecewise_linear(&mut rng, &p, &grid);
        for (r, val) in grid.nodes().iter().zip(v.values()) {
            let bound = radial_bound(*r, &p).unwrap();
            if bound > 0.0 {
                worst = worst.max(val.abs() / bound);
            } else {
                worst = worst.max(if val.abs() > 0.0 { f64::INFINITY } else { 0.0 });
            }
        }
    }
    c.check(
        worst <= 1.0 + 1e-6,
        format!("100 profiles, worst |v|/bound = {worst:.9}"),
    );
    c.finish();
}

/// Random piecewise-linear profile with v(1) = 0, normalized EXACTLY: the
/// gradient integral of a piecewise-constant slope has the closed form
/// sum |s_i|^{k+1} (b^{N-k+1} - a^{N-k+1})/(N-k+1), so the Hoelder chain
/// behind the pointwise bound applies verbatim.
fn random_unit_piecewise_linear(
    rng: &mut rng::SplitMix64,
    p: &Params,
    grid: &Arc<RadialGrid>,
) -> RadialFunction {
    let segments = 3 + (rng.next_u64() % 8) as usize;
    let mut knots = vec![0.0];
    for _ in 0..segments - 1 {
        knots.push(rng.in_range(1e-4, 1.0));
    }
    knots.push(1.0);
    knots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    knots.dedup();
    let m = knots.len();
    let mut heights: Vec<f64> = (0..m).map(|_| rng.in_range(-1.0, 1.0)).collect();
    heights[m - 1] = 0.0;

    // exact gradient integral of the piecewise-linear interpolant
    let wexp = (p.dim() - p.k() + 1) as f64;
    let kp1 = p.k() as f64 + 1.0;
    let mut energy = 0.0;
    for i in 0..m - 1 {
        let slope = (heights[i + 1] - heights[i]) / (knots[i + 1] - knots[i]);
        energy += slope.abs().powf(kp1) * (knots[i + 1].powf(wexp) - knots[i].powf(wexp)) / wexp;
    }
    let norm = (p.omega_nk() * energy).powf(1.0 / kp1);
    for h in &mut heights {
        *h /= norm;
    }

    let eval = |r: f64| -> f64 {
        let j = knots.partition_point(|x| *x < r).clamp(1, m - 1);
        let t = (r - knots[j - 1]) / (knots[j] - knots[j - 1]);
        heights[j - 1] * (1.0 - t) + heights[j] * t
    };
    RadialFunction::from_fn(Arc::clone(grid), eval, BoundaryMode::X1).unwrap()
}

#[test]
fn criterion_04_expansion_branches() {
    let start = Instant::now();
    let mut c = Criterion::new(4);
    let p = Params::new(5, 1, 1.0).unwrap();
    let gamma = 0.25;
    let nk = 5.0;

    let near = expansion_near_zero(p.alpha(), 0.0, gamma, 1e-4, &p).unwrap();
    c.check(
        (near.ratio - 1.0).abs() < 0.05,
        format!("near-zero beta=alpha delta=0 ratio {:.6}", near.ratio),
    );
    let near_log = expansion_near_zero(p.alpha(), 1.0, gamma, 1e-4, &p).unwrap();
    c.check(
        (near_log.ratio - 1.0).abs() < 0.08,
        format!("near-zero delta=1 ratio {:.6}", near_log.ratio),
    );

    let ladder = [
        10f64.powf(-1.5),
        1e-2,
        10f64.powf(-2.5),
        1e-3,
        10f64.powf(-3.5),
        1e-4,
    ];
    for beta in [0.0, nk, nk + 1.0] {
        let pts: Vec<(f64, f64)> = ladder
            .iter()
            .map(|&e| {
                let rep = expansion_midrange(beta, gamma, e, &p).unwrap();
                // the critical branch carries a logarithm on top of the power
                let y = if beta == nk {
                    rep.numeric / e.ln().abs()
                } else {
                    rep.numeric
                };
                (e, y)
            })
            .collect();
        let slope = fit::loglog_slope(&pts);
        let asserted = if beta < nk {
            (1.0 - gamma) * nk + beta * gamma
        } else {
            nk
        };
        c.check(
            (slope - asserted).abs() < 0.10 * asserted,
            format!("midrange beta={beta} slope {slope:.4} vs {asserted}"),
        );
    }

    // far tail: the o(eps^{(N/k)(1-gamma)}) claim, certified through the
    // sharp order N/k of the tail itself plus the vanishing ratio
    let pts: Vec<(f64, f64)> = ladder
        .iter()
        .map(|&e| (e, expansion_far_tail(gamma, e, &p).unwrap().numeric))
        .collect();
    let slope = fit::loglog_slope(&pts);
    c.check(
        (slope - nk).abs() < 0.10 * nk,
        format!("far-tail slope {slope:.4} vs {nk}"),
    );
    let mut prev = f64::INFINITY;
    let mut decreasing = true;
    for e in [1e-1, 1e-2, 1e-3] {
        let rep = expansion_far_tail(gamma, e, &p).unwrap();
        decreasing &= rep.ratio < prev;
        prev = rep.ratio;
    }
    c.check(decreasing, "far-tail ratio decreasing along the ladder");

    let elapsed = start.elapsed();
    c.check(
        elapsed.as_secs_f64() < 30.0,
        format!("runtime {:.2}s < 30s", elapsed.as_secs_f64()),
    );
    c.finish();
}

#[test]
fn criterion_05_sharper_estimate_constant() {
    let mut c = Criterion::new(5);
    let eps = 1e-4;
    for (n, k) in [(5u32, 1u32), (9, 2)] {
        let p = Params::new(n, k, 1.0).unwrap();
        let s = instanton::sobolev_constant(&p).unwrap();
        let spec = InstantonSpec::new(eps, &p).unwrap();
        let est = sharper_estimates(&spec, &p).unwrap();
        let c1 = est.correction_constant.unwrap();
        let c_pow = spec.amplitude.powf(p.k_star());
        let observed =
            (est.supercritical_integral - c_pow * s.power) / (eps.powf(p.alpha()) * eps.ln().abs());
        c.check(
            (observed / c1 - 1.0).abs() < 0.10,
            format!("(N,k,a)=({n},{k},1) observed/C1 = {:.4}", observed / c1),
        );
        let observed_weighted = (est.exponent_weighted_integral - c_pow * s.power / p.k_star())
            / (eps.powf(p.alpha()) * eps.ln().abs());
        c.details.push(format!(
            "exponent-weighted counterpart ratio {:.4}",
            observed_weighted / (c1 / p.k_star())
        ));
    }
    c.finish();
}

#[test]
fn criterion_06_strict_gap_and_attainability() {
    let mut c = Criterion::new(6);
    let grid = Arc::new(RadialGrid::default_grid());
    for (n, k, alpha) in TRIPLES {
        let start = Instant::now();
        let p = Params::new(n, k, alpha).unwrap();
        assert!(p.in_attainable_regime());
        let best = best_subcritical_constant(&p).unwrap();
        let res = maximize_supercritical(&p, &grid, &SolverConfig::default()).unwrap();
        let gap = res.value - best;
        c.check(
            res.converged && res.el_residual < 1e-6,
            format!(
                "({n},{k},{alpha}) converged, residual {:.2e}",
                res.el_residual
            ),
        );
        c.check(
            gap > 10.0 * res.quadrature_error_estimate && gap > 0.0,
            format!(
                "gap {:.3e} > 10x quadrature error {:.1e}",
                gap, res.quadrature_error_estimate
            ),
        );
        c.check(
            res.profile.values().iter().all(|v| *v >= 0.0),
            "maximizer nonnegative",
        );
        c.check(
            res.profile
                .values()
                .windows(2)
                .all(|w| w[1] <= w[0] + 1e-12),
            "maximizer nonincreasing",
        );
        let elapsed = start.elapsed();
        c.check(
            elapsed.as_secs_f64() < 120.0,
            format!("runtime {:.1}s < 120s", elapsed.as_secs_f64()),
        );
    }
    c.finish();
}

#[test]
fn criterion_07_shooting_solver() {
    let mut c = Criterion::new(7);
    let grid = Arc::new(RadialGrid::default_grid());
    let fine = Arc::new(RadialGrid::graded(2 * grid.len(), grid.grading()).unwrap());
    for (n, k, alpha) in TRIPLES {
        let p = Params::new(n, k, alpha).unwrap();
        let bracket = auto_bracket(&p, &grid).unwrap();
        let res = shoot(&p, &grid, bracket).unwrap();
        c.check(
            res.integral_residual < 1e-8,
            format!(
                "({n},{k},{alpha}) integral residual {:.1e}",
                res.integral_residual
            ),
        );
        c.check(
            res.boundary_defect < 1e-8,
            format!("boundary defect {:.1e}", res.boundary_defect),
        );
        c.check(
            res.admissible.iter().all(|f| *f) && res.admissible.len() == k as usize,
            format!("admissible flags {:?}", res.admissible),
        );
        let strong = hessian_residual(&res.profile, &p);
        let bracket_fine = auto_bracket(&p, &fine).unwrap();
        let res_fine = shoot(&p, &fine, bracket_fine).unwrap();
        let strong_fine = hessian_residual(&res_fine.profile, &p);
        c.check(
            strong >= 3.0 * strong_fine,
            format!(
                "strong residual {:.2e} -> {:.2e} under refinement (x{:.2})",
                strong,
                strong_fine,
                strong / strong_fine
            ),
        );
    }
    c.finish();
}

#[test]
fn criterion_08_mountain_pass_bound() {
    let mut c = Criterion::new(8);
    let p = Params::new(5, 1, 1.0).unwrap();
    let report = mp_upper_bound(&[1e-3, 1e-4], &p).unwrap();
    for (eps, max_energy) in &report.ray_max_energies {
        let margin = report.threshold - max_energy;
        c.check(
            margin > report.quadrature_error && margin > 0.0,
            format!(
                "eps={eps:.0e}: margin {:.3e} > error bar {:.1e}",
                margin, report.quadrature_error
            ),
        );
    }
    let mut pts = Vec::new();
    for eps in [1e-2, 10f64.powf(-2.5), 1e-3, 10f64.powf(-3.5), 1e-4] {
        let t = stationary_ray_scale(eps, &p).unwrap();
        pts.push((eps, (t - 1.0).abs() / eps.ln().abs()));
    }
    let rate = fit::loglog_slope(&pts);
    c.check(
        (0.8..=1.2).contains(&rate),
        format!("ray-scale rate exponent {rate:.4} in [0.8, 1.2]"),
    );

    let amp = balanced_amplitude(&p);
    let spec = InstantonSpec::with_amplitude(1e-4, amp, &p).unwrap();
    let grid = Arc::new(RadialGrid::default_grid());
    let w = instanton::w_eps_profile(Arc::clone(&grid), &spec, &p).unwrap();
    let energy = functional_energy(&w, &p).unwrap();
    let level = noncompactness_level(&p).unwrap();
    c.check(
        (energy - level).abs() < 0.03 * level,
        format!("I(w_eps) = {energy:.5} within 3% of level {level:.5}"),
    );
    c.finish();
}

#[test]
fn criterion_09_superlinearity_inequality() {
    let mut c = Criterion::new(9);
    let p = Params::new(5, 1, 1.0).unwrap();
    let mut min_margin = f64::INFINITY;
    let mut ok = true;
    for i in 0..=100 {
        for j in 0..=100 {
            let r = i as f64 / 100.0;
            let s = 10.0 * j as f64 / 100.0;
            let m = ar_margin(r, s, &p);
            ok &= m >= 0.0 && (s > 0.0) == (m > 0.0);
            min_margin = min_margin.min(m);
        }
    }
    c.check(
        ok,
        format!("100x100 grid, margin >= 0 everywhere (min {min_margin:.1e}), zero only at s = 0"),
    );
    c.finish();
}
