use crate::json::{format_float, render, JVal};
use crate::{CommonArgs, Format};
use hessext_core::*;
use log::info;
use std::fmt;
use std::path::PathBuf;
use std::sync::Arc;

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Io(std::io::Error),
    Core(CoreError),
    Unconverged(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "invalid config: {msg}"),
            CliError::Io(err) => write!(f, "io: {err}"),
            CliError::Core(err) => write!(f, "{err}"),
            CliError::Unconverged(msg) => write!(f, "solver unconverged: {msg}"),
        }
    }
}

impl From<CoreError> for CliError {
    fn from(err: CoreError) -> Self {
        CliError::Core(err)
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        CliError::Io(err)
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

struct Context {
    params: Params,
    grid: Arc<RadialGrid>,
    sobolev: SobolevConstant,
    args: CommonArgs,
    command: String,
}

fn validate(args: &CommonArgs) -> CliResult<()> {
    if args.grid_n < 256 {
        return Err(CliError::Config(format!(
            "grid size must be at least 256 (got {})",
            args.grid_n
        )));
    }
    if args.eps.is_empty() {
        return Err(CliError::Config("scale ladder must not be empty".into()));
    }
    for pair in args.eps.windows(2) {
        if pair[1] >= pair[0] || pair[1].is_nan() {
            return Err(CliError::Config(format!(
                "scale ladder must be strictly decreasing (got {:?})",
                args.eps
            )));
        }
    }
    for &e in &args.eps {
        if !(e > 0.0 && e < 0.25) {
            return Err(CliError::Config(format!(
                "every scale must lie in (0, 0.25) (got {e})"
            )));
        }
    }
    if args.jobs == 0 {
        return Err(CliError::Config("jobs must be at least 1".into()));
    }
    Ok(())
}

pub fn run(command: &str, args: &CommonArgs) -> CliResult<()> {
    validate(args)?;
    if args.format == Format::Csv && command != "expansions" {
        return Err(CliError::Config(format!(
            "csv output is only defined for the expansions table (command: {command})"
        )));
    }
    let params = Params::new(args.dim, args.k, args.alpha)?;
    let grid = Arc::new(RadialGrid::graded(args.grid_n, args.grid_g)?);
    let sobolev = instanton::sobolev_constant(&params)?;
    info!(
        "resolved (N,k,alpha) = ({}, {}, {}), k* = {:.6}, grid n = {}",
        args.dim,
        args.k,
        args.alpha,
        params.k_star(),
        args.grid_n
    );
    let ctx = Context {
        params,
        grid,
        sobolev,
        args: args.clone(),
        command: command.to_string(),
    };

    match command {
        "inequality" => emit_json(&ctx, inequality_payload(&ctx)?),
        "extremal" => emit_json(&ctx, extremal_payload(&ctx)?),
        "solve-hessian" => {
            let (payload, profile) = solve_hessian_payload(&ctx)?;
            write_profile_csv(&ctx, &profile)?;
            emit_json(&ctx, payload)
        }
        "expansions" => {
            let rows = expansion_rows(&ctx)?;
            if ctx.args.format == Format::Csv {
                emit_text(&ctx, expansion_csv(&rows))
            } else {
                emit_json(
                    &ctx,
                    JVal::Arr(rows.iter().map(ExpansionRow::to_json).collect()),
                )
            }
        }
        "mountain-pass" => emit_json(&ctx, mountain_pass_payload(&ctx)?),
        "report" => {
            let mut payload = JVal::obj();
            payload.push("inequality", inequality_payload(&ctx)?);
            payload.push("extremal", extremal_payload(&ctx)?);
            let (hessian, profile) = solve_hessian_payload(&ctx)?;
            write_profile_csv(&ctx, &profile)?;
            payload.push("solve_hessian", hessian);
            let rows = expansion_rows(&ctx)?;
            payload.push(
                "expansions",
                JVal::Arr(rows.iter().map(ExpansionRow::to_json).collect()),
            );
            payload.push("mountain_pass", mountain_pass_payload(&ctx)?);
            emit_json(&ctx, payload)
        }
        other => Err(CliError::Config(format!("unknown command {other}"))),
    }
}

fn document(ctx: &Context, payload: JVal) -> JVal {
    let mut config = JVal::obj();
    config.push("N", JVal::Int(ctx.args.dim as i64));
    config.push("k", JVal::Int(ctx.args.k as i64));
    config.push("alpha", JVal::Num(ctx.args.alpha));
    config.push("grid_n", JVal::Int(ctx.args.grid_n as i64));
    config.push("grid_g", JVal::Num(ctx.args.grid_g));
    config.push(
        "eps",
        JVal::Arr(ctx.args.eps.iter().map(|e| JVal::Num(*e)).collect()),
    );
    config.push("seed", JVal::Int(ctx.args.seed as i64));
    config.push(
        "format",
        JVal::Str(
            match ctx.args.format {
                Format::Json => "json",
                Format::Csv => "csv",
            }
            .to_string(),
        ),
    );
    config.push("jobs", JVal::Int(ctx.args.jobs as i64));

    let mut constants = JVal::obj();
    constants.push("k_star", JVal::Num(ctx.params.k_star()));
    constants.push("omega_nk", JVal::Num(ctx.params.omega_nk()));
    constants.push("tau", JVal::Num(ctx.params.tau()));
    constants.push("S", JVal::Num(ctx.sobolev.value));

    let mut doc = JVal::obj();
    doc.push("command", JVal::Str(ctx.command.clone()));
    doc.push("config", config);
    doc.push("constants", constants);
    if let JVal::Obj(entries) = payload {
        if let JVal::Obj(doc_entries) = &mut doc {
            doc_entries.extend(entries);
        }
    } else {
        doc.push("result", payload);
    }
    doc
}

fn emit_json(ctx: &Context, payload: JVal) -> CliResult<()> {
    emit_text(ctx, render(&document(ctx, payload)))
}

fn emit_text(ctx: &Context, text: String) -> CliResult<()> {
    match &ctx.args.out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// inequality

fn inequality_payload(ctx: &Context) -> CliResult<JVal> {
    let p = &ctx.params;
    let grid = &ctx.grid;
    let mut rng = rng::SplitMix64::new(ctx.args.seed);

    let mut worst_ratio: f64 = 0.0;
    for _ in 0..100 {
        let v = random_unit_piecewise_linear(&mut rng, p, grid);
        for (r, val) in grid.nodes().iter().zip(v.values()) {
            let bound = radial_bound(*r, p)?;
            if bound > 0.0 {
                worst_ratio = worst_ratio.max(val.abs() / bound);
            }
        }
    }
    let bound_pass = worst_ratio <= 1.0 + 1e-6;

    let mut family_max: f64 = 0.0;
    for _ in 0..200 {
        let v = random_unit_piecewise_linear(&mut rng, p, grid);
        family_max = family_max.max(supercritical_functional(&v, p)?);
    }
    let bounded_pass = family_max.is_finite();

    let mut worst_monomial: f64 = 0.0;
    for m in 0..=(2 * p.dim()) {
        let exact = 1.0 / (m as f64 + 1.0);
        let val = grid.integrate_fn(|r| r.powi(m as i32));
        worst_monomial = worst_monomial.max((val - exact).abs() / exact);
    }
    let quad_pass = worst_monomial < 1e-10;

    let probe = RadialFunction::from_fn(
        Arc::clone(grid),
        |r| (1.0 - r) * (1.0 + 0.3 * (7.0 * r).sin()),
        BoundaryMode::X1,
    )?;
    let lux = luxemburg_norm(&probe, p)?;
    let lux_scaled = luxemburg_norm(&probe.scaled(3.0), p)?;
    let homogeneity_defect = (lux_scaled - 3.0 * lux).abs() / (3.0 * lux);
    let homogeneity_pass = homogeneity_defect < 1e-12;

    let lambda_star = family_max.powf(1.0 / p.k_star()).max(1.0);
    let witness_pass = lux <= lambda_star * x1_norm(&probe, p)? * (1.0 + 1e-10);

    let mut checks = JVal::obj();
    let mut radial = JVal::obj();
    radial.push("profiles", JVal::Int(100));
    radial.push("worst_ratio", JVal::Num(worst_ratio));
    radial.push("pass", JVal::Bool(bound_pass));
    checks.push("radial_bound", radial);
    let mut bounded = JVal::obj();
    bounded.push("family_size", JVal::Int(200));
    bounded.push("max_value", JVal::Num(family_max));
    bounded.push("pass", JVal::Bool(bounded_pass));
    checks.push("boundedness", bounded);
    let mut quad = JVal::obj();
    quad.push("worst_monomial_rel_error", JVal::Num(worst_monomial));
    quad.push("pass", JVal::Bool(quad_pass));
    checks.push("quadrature", quad);
    let mut lux_obj = JVal::obj();
    lux_obj.push("homogeneity_defect", JVal::Num(homogeneity_defect));
    lux_obj.push("pass", JVal::Bool(homogeneity_pass));
    checks.push("luxemburg_homogeneity", lux_obj);
    let mut witness = JVal::obj();
    witness.push("empirical_cap", JVal::Num(family_max));
    witness.push("lambda_star", JVal::Num(lambda_star));
    witness.push("pass", JVal::Bool(witness_pass));
    checks.push("embedding_witness", witness);

    let all = bound_pass && bounded_pass && quad_pass && homogeneity_pass && witness_pass;
    let mut payload = JVal::obj();
    payload.push("checks", checks);
    payload.push("pass", JVal::Bool(all));
    Ok(payload)
}

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
    let eval = move |r: f64| -> f64 {
        let j = knots.partition_point(|x| *x < r).clamp(1, m - 1);
        let t = (r - knots[j - 1]) / (knots[j] - knots[j - 1]);
        heights[j - 1] * (1.0 - t) + heights[j] * t
    };
    RadialFunction::from_fn(Arc::clone(grid), eval, BoundaryMode::X1)
        .expect("piecewise-linear profile is valid")
}

// ---------------------------------------------------------------------------
// extremal

fn extremal_payload(ctx: &Context) -> CliResult<JVal> {
    let best = best_subcritical_constant(&ctx.params)?;
    let res = maximize_supercritical(&ctx.params, &ctx.grid, &SolverConfig::default())?;
    if !res.converged {
        return Err(CliError::Unconverged(format!(
            "extremal solver stopped after {} iterations with residual {:.3e}",
            res.iterations, res.el_residual
        )));
    }
    let sphere = u_from_v(&res, &ctx.params)?;
    let mut payload = JVal::obj();
    payload.push("value", JVal::Num(res.value));
    payload.push("lambda", JVal::Num(res.lambda));
    payload.push("el_residual", JVal::Num(res.el_residual));
    payload.push("gap", JVal::Num(res.value - best));
    payload.push("converged", JVal::Bool(res.converged));
    payload.push("iterations", JVal::Int(res.iterations as i64));
    payload.push(
        "quadrature_error_estimate",
        JVal::Num(res.quadrature_error_estimate),
    );
    payload.push("best_subcritical_constant", JVal::Num(best));
    payload.push("u_value", JVal::Num(sphere.u_value));
    payload.push("attainable_regime", JVal::Bool(res.attainable_regime));
    Ok(payload)
}

// ---------------------------------------------------------------------------
// solve-hessian

fn solve_hessian_payload(ctx: &Context) -> CliResult<(JVal, RadialFunction)> {
    let bracket = auto_bracket(&ctx.params, &ctx.grid)?;
    let res = shoot(&ctx.params, &ctx.grid, bracket)?;
    let energy = functional_energy(&res.profile, &ctx.params)?;
    let mut payload = JVal::obj();
    payload.push("a0", JVal::Num(res.initial_value));
    payload.push("residual", JVal::Num(res.integral_residual));
    payload.push("boundary_defect", JVal::Num(res.boundary_defect));
    payload.push(
        "admissible",
        JVal::Arr(res.admissible.iter().map(|f| JVal::Bool(*f)).collect()),
    );
    payload.push("energy", JVal::Num(energy));
    payload.push("bisections", JVal::Int(res.bisections as i64));
    Ok((payload, res.profile))
}

fn write_profile_csv(ctx: &Context, profile: &RadialFunction) -> CliResult<()> {
    let path = match &ctx.args.out {
        Some(out) => {
            let mut p = out.clone();
            p.set_extension("profile.csv");
            p
        }
        None => PathBuf::from("hessext-profile.csv"),
    };
    let mut text = String::from("r,v\n");
    for (r, v) in profile.grid().nodes().iter().zip(profile.values()) {
        text.push_str(&format_float(*r));
        text.push(',');
        text.push_str(&format_float(*v));
        text.push('\n');
    }
    std::fs::write(&path, text)?;
    info!("profile written to {}", path.display());
    Ok(())
}

// ---------------------------------------------------------------------------
// expansions

struct ExpansionRow {
    index: usize,
    lemma: &'static str,
    branch: String,
    eps: f64,
    numeric: f64,
    leading: f64,
    ratio: f64,
}

impl ExpansionRow {
    fn to_json(&self) -> JVal {
        let mut row = JVal::obj();
        row.push("lemma", JVal::Str(self.lemma.to_string()));
        row.push("branch", JVal::Str(self.branch.clone()));
        row.push("eps", JVal::Num(self.eps));
        row.push("numeric", JVal::Num(self.numeric));
        row.push("leading", JVal::Num(self.leading));
        row.push("ratio", JVal::Num(self.ratio));
        row
    }
}

fn expansion_csv(rows: &[ExpansionRow]) -> String {
    let mut out = String::from("lemma,branch,eps,numeric,leading,ratio\n");
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            row.lemma,
            row.branch,
            format_float(row.eps),
            format_float(row.numeric),
            format_float(row.leading),
            format_float(row.ratio)
        ));
    }
    out
}

enum ExpansionCase {
    NearZero { beta: f64, delta: f64 },
    Midrange { beta: f64 },
    FarTail,
}

fn expansion_rows(ctx: &Context) -> CliResult<Vec<ExpansionRow>> {
    let p = ctx.params;
    let gamma = 0.5 / (p.k() as f64 + 1.0);
    let nk = p.dim() as f64 / p.k() as f64;
    let cases = [
        ExpansionCase::NearZero {
            beta: 0.0,
            delta: 0.0,
        },
        ExpansionCase::NearZero {
            beta: p.alpha(),
            delta: 0.0,
        },
        ExpansionCase::NearZero {
            beta: p.alpha(),
            delta: 1.0,
        },
        ExpansionCase::NearZero {
            beta: nk,
            delta: 0.0,
        },
        ExpansionCase::Midrange { beta: 0.0 },
        ExpansionCase::Midrange { beta: nk },
        ExpansionCase::Midrange { beta: nk + 1.0 },
        ExpansionCase::FarTail,
    ];

    let mut tasks = Vec::new();
    for (ci, _) in cases.iter().enumerate() {
        for &eps in &ctx.args.eps {
            tasks.push((tasks.len(), ci, eps));
        }
    }

    let compute = |index: usize, case: &ExpansionCase, eps: f64| -> CliResult<ExpansionRow> {
        let (lemma, branch, rep) = match case {
            ExpansionCase::NearZero { beta, delta } => {
                let rep = expansion_near_zero(*beta, *delta, gamma, eps, &p)?;
                (
                    "near-zero",
                    format!("{} beta={beta} delta={delta}", rep.regime.label()),
                    rep,
                )
            }
            ExpansionCase::Midrange { beta } => {
                let rep = expansion_midrange(*beta, gamma, eps, &p)?;
                (
                    "midrange",
                    format!("{} beta={beta}", rep.regime.label()),
                    rep,
                )
            }
            ExpansionCase::FarTail => {
                let rep = expansion_far_tail(gamma, eps, &p)?;
                ("far-tail", format!("o-small gamma={gamma}"), rep)
            }
        };
        Ok(ExpansionRow {
            index,
            lemma,
            branch,
            eps,
            numeric: rep.numeric,
            leading: rep.leading,
            ratio: rep.ratio,
        })
    };

    let mut rows: Vec<ExpansionRow> = if ctx.args.jobs <= 1 {
        tasks
            .iter()
            .map(|&(idx, ci, eps)| compute(idx, &cases[ci], eps))
            .collect::<CliResult<_>>()?
    } else {
        let chunks: Vec<Vec<(usize, usize, f64)>> = {
            let mut c: Vec<Vec<(usize, usize, f64)>> = vec![Vec::new(); ctx.args.jobs];
            for (i, t) in tasks.iter().enumerate() {
                c[i % ctx.args.jobs].push(*t);
            }
            c
        };
        let results: Vec<CliResult<Vec<ExpansionRow>>> = std::thread::scope(|scope| {
            let handles: Vec<_> = chunks
                .iter()
                .map(|chunk| {
                    scope.spawn(|| {
                        chunk
                            .iter()
                            .map(|&(idx, ci, eps)| compute(idx, &cases[ci], eps))
                            .collect::<CliResult<Vec<_>>>()
                    })
                })
                .collect();
            handles.into_iter().map(|h| h.join().unwrap()).collect()
        });
        let mut all = Vec::new();
        for r in results {
            all.extend(r?);
        }
        all
    };
    rows.sort_by_key(|r| r.index);
    Ok(rows)
}

// ---------------------------------------------------------------------------
// mountain pass

fn mountain_pass_payload(ctx: &Context) -> CliResult<JVal> {
    let report = mp_upper_bound(&ctx.args.eps, &ctx.params)?;
    let mut payload = JVal::obj();
    payload.push("threshold", JVal::Num(report.threshold));
    let entries: Vec<JVal> = report
        .ray_max_energies
        .iter()
        .zip(&report.ray_scales)
        .map(|((eps, max_e), (_, scale))| {
            let mut e = JVal::obj();
            e.push("eps", JVal::Num(*eps));
            e.push("max_energy", JVal::Num(*max_e));
            e.push("ray_scale", JVal::Num(*scale));
            e
        })
        .collect();
    payload.push("entries", JVal::Arr(entries));
    payload.push("margin", JVal::Num(report.margin));
    payload.push("quadrature_error", JVal::Num(report.quadrature_error));
    Ok(payload)
}
