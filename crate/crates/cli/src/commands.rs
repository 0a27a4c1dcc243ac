use std::io::Write;
use std::path::Path;

use anyhow::{anyhow, bail, Context};
use clap::Args;
use largerho::appendix::{
    f2_identity, interval_of_positivity, ku_constant, positivity_claims, sandwich_violation, series_coefficients,
};
use largerho::melnikov::{floquet_prediction, solve_branch, solve_sym_branch, RESIDUAL_TOL};
use largerho::odesim::{
    hysteresis_run, integrate, measure_transport, simulate_lorenz, stenflo, x_plus, HysteresisOptions, LambdaSchedule,
    Rescaling, Sampling,
};
use largerho::orbits::{classify_region, DEFAULT_REGION_TOL};
use largerho::shooting::{dm_per_revolution, refine_from_branch, RescaledLorenz, ShootingOptions};
use largerho::stenflo::{measure_stenflo_transport, melnikov_m4, refine_stenflo_orbit, stenflo_block};
use largerho::transport::{fill_transport, fixed_point_transport, proportionality_check};
use largerho::{Branch, ConservedPair, Error, Frame, OrbitFamily, Params, Region, State3, State4};
use log::{info, warn};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::config::{config_error, pick, BranchChoice, FamilyChoice, FileConfig, Model, SignChoice};
use crate::output::{g, opt, row, sink, Resolved};

/// Schedule and parameter mistakes are configuration errors; the rest are
/// numerical failures.
fn lib(e: Error) -> anyhow::Error {
    match e {
        Error::Schedule(_) => config_error(e.to_string()),
        e => anyhow!(e),
    }
}

fn print_json(v: &serde_json::Value) -> anyhow::Result<()> {
    let mut out = std::io::stdout().lock();
    writeln!(out, "{}", serde_json::to_string_pretty(v)?)?;
    Ok(())
}

/// A seeded start in the original frame, spread over the attractor's scale.
fn random_start(rng: &mut ChaCha8Rng, rho: f64, beta: f64) -> [f64; 3] {
    let r = 2.0 * (beta * (rho - 1.0).abs()).sqrt() + 1.0;
    [rng.random_range(-r..r), rng.random_range(-r..r), rng.random_range(0.0..2.0 * rho.max(1.0))]
}

#[derive(Args, Debug, Default)]
pub struct BranchArgs {
    /// First lambda of the grid.
    #[arg(long)]
    pub from: Option<f64>,
    #[arg(long)]
    pub to: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
    #[arg(long, value_enum)]
    pub kind: Option<BranchChoice>,
}

#[derive(Serialize)]
struct BranchOptions {
    from: f64,
    to: f64,
    points: usize,
    kind: BranchChoice,
}

pub fn branch(model: &Model, file: &FileConfig, args: &BranchArgs, lambdas: Option<f64>, out: Option<&Path>) -> anyhow::Result<()> {
    let f = &file.branch;
    let (from, to) = match lambdas {
        Some(l) => (l, l),
        None => (pick(args.from, f.from, 0.7), pick(args.to, f.to, 3.0)),
    };
    let opts = BranchOptions {
        from,
        to,
        points: if lambdas.is_some() { 1 } else { pick(args.points, f.points, 100) },
        kind: pick(args.kind, f.kind, BranchChoice::Symmetric),
    };
    if opts.points == 0 || !(opts.from.is_finite() && opts.to.is_finite()) {
        return Err(config_error("branch grid needs finite bounds and at least one point"));
    }
    let branches: &[Branch] = match opts.kind {
        BranchChoice::Symmetric => &[Branch::Symmetric],
        BranchChoice::Asymmetric => &[Branch::Asymmetric],
        BranchChoice::Both => &[Branch::Symmetric, Branch::Asymmetric],
    };
    let grid: Vec<f64> = (0..opts.points)
        .map(|i| if opts.points == 1 { opts.from } else { opts.from + (opts.to - opts.from) * i as f64 / (opts.points - 1) as f64 })
        .collect();
    let beta = model.beta;
    let rows: Vec<(String, bool)> = grid
        .par_iter()
        .flat_map_iter(|&lambda| branches.iter().map(move |&b| branch_row(lambda, beta, b)))
        .collect();

    let resolved = Resolved { command: "branch", model, options: &opts };
    let mut w = sink(out)?;
    write!(w, "{}", resolved.header())?;
    writeln!(w, "lambda,branch,k,B,trDM,detDM,h_limit")?;
    for (line, _) in &rows {
        writeln!(w, "{line}")?;
    }
    w.flush()?;
    let failed = rows.iter().filter(|r| !r.1).count();
    if failed > 0 {
        bail!("{failed} rows failed the residual check");
    }
    Ok(())
}

/// One CSV row and whether it passed; missing branches are flagged, not failed.
fn branch_row(lambda: f64, beta: f64, branch: Branch) -> (String, bool) {
    let flagged = |tag: &str| (row(&[g(lambda), tag.into(), String::new(), String::new(), String::new(), String::new(), String::new()]), true);
    let p = match Params::from_lambda(lambda, beta) {
        Ok(p) => p,
        Err(_) => return flagged("no-branch"),
    };
    match solve_branch(branch, &p).and_then(|bp| fill_transport(&bp, &p)) {
        Ok(bp) => {
            let ok = bp.residuals.iter().all(|r| r.abs() <= RESIDUAL_TOL);
            if !ok {
                warn!("lambda {lambda}: residuals {:?}", bp.residuals);
            }
            let line = row(&[g(lambda), branch.name().into(), g(bp.k), g(bp.b), g(bp.tr_dm), g(bp.det_dm), opt(bp.transport_h)]);
            (line, ok)
        }
        Err(Error::NoBranch { .. } | Error::Domain(_)) => flagged("no-branch"),
        Err(e) => {
            warn!("lambda {lambda}: {e}");
            (row(&[g(lambda), "error".into(), String::new(), String::new(), String::new(), String::new(), String::new()]), false)
        }
    }
}

#[derive(Args, Debug, Default)]
pub struct SimulateArgs {
    #[arg(long)]
    pub t_end: Option<f64>,
    /// Discarded initial time; defaults to a tenth of the run.
    #[arg(long)]
    pub t_transient: Option<f64>,
    /// Number of seeded random starts.
    #[arg(long)]
    pub runs: Option<usize>,
    /// Spacing of the written time series.
    #[arg(long)]
    pub sample_dt: Option<f64>,
}

#[derive(Serialize)]
struct SimulateOptions {
    t_end: f64,
    t_transient: f64,
    runs: usize,
    sample_dt: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    x0: Option<[f64; 3]>,
}

pub fn simulate(model: &Model, file: &FileConfig, args: &SimulateArgs, out: Option<&Path>) -> anyhow::Result<()> {
    let f = &file.simulate;
    let t_end = pick(args.t_end, f.t_end, 100.0);
    let opts = SimulateOptions {
        t_end,
        t_transient: pick(args.t_transient, f.t_transient, 0.1 * t_end),
        runs: pick(args.runs, f.runs, 1),
        sample_dt: pick(args.sample_dt, f.sample_dt, t_end / 10_000.0),
        x0: f.x0,
    };
    if !(opts.t_end > opts.t_transient && opts.t_transient >= 0.0 && opts.sample_dt > 0.0 && opts.runs > 0) {
        return Err(config_error("need 0 <= t_transient < t_end, sample_dt > 0 and runs > 0"));
    }
    let params = model.params()?;
    let integ = model.integrator();
    let mut rng = ChaCha8Rng::seed_from_u64(model.seed);
    let starts: Vec<[f64; 3]> = (0..opts.runs)
        .map(|i| match (i, opts.x0) {
            (0, Some(x0)) => x0,
            _ => random_start(&mut rng, model.rho, model.beta),
        })
        .collect();
    let resolved = Resolved { command: "simulate", model, options: &opts };
    info!("simulate: {} runs to t = {}", opts.runs, opts.t_end);

    let mut series_error = None;
    if let Some(path) = out {
        let x0 = State3::original(starts[0][0], starts[0][1], starts[0][2]);
        let mut w = sink(Some(path))?;
        write!(w, "{}", resolved.header())?;
        writeln!(w, "t,X,Y,Z")?;
        match simulate_lorenz(&params, &x0, opts.t_end, &integ, Sampling::Every(opts.sample_dt)) {
            Ok(traj) => {
                for (t, y) in traj.times.iter().zip(&traj.states) {
                    writeln!(w, "{}", row(&[g(*t), g(y[0]), g(y[1]), g(y[2])]))?;
                }
            }
            Err(e) => series_error = Some(e),
        }
        w.flush()?;
    }

    let bound = fixed_point_transport(model.rho, model.beta).h;
    let results: Vec<_> = starts
        .par_iter()
        .map(|x0| measure_transport(&params, &State3::original(x0[0], x0[1], x0[2]), opts.t_end, opts.t_transient, &integ))
        .collect();
    let mut failure = series_error.map(|e| e.to_string());
    let runs: Vec<_> = starts
        .iter()
        .zip(&results)
        .map(|(x0, r)| match r {
            Ok(m) => json!({
                "x0": x0,
                "H": m.h,
                "beta_avgZ": m.beta_avg_z,
                "stderr": m.stderr_proxy,
                "bound": bound,
                "gap": bound - m.h,
                "proportionality": proportionality_check(&m.averages, model.beta).xy_vs_z,
            }),
            Err(e) => {
                failure.get_or_insert_with(|| e.to_string());
                json!({ "x0": x0, "error": e.to_string() })
            }
        })
        .collect();
    let mut summary = resolved.json();
    summary["runs"] = json!(runs);
    print_json(&summary)?;
    match failure {
        Some(e) => bail!("simulation failed: {e}"),
        None => Ok(()),
    }
}

#[derive(Args, Debug, Default)]
pub struct HysteresisArgs {
    /// Starting lambda of the parabolic ramp.
    #[arg(long)]
    pub lambda0: Option<f64>,
    #[arg(long)]
    pub peak: Option<f64>,
    /// Time at which the ramp crosses lambda = 1.
    #[arg(long)]
    pub t_cross: Option<f64>,
    /// Width of the classification windows.
    #[arg(long)]
    pub window: Option<f64>,
}

#[derive(Serialize)]
struct HysteresisConfig {
    lambda0: f64,
    peak: f64,
    t_cross: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    breakpoints: Option<Vec<[f64; 2]>>,
    window: f64,
}

pub fn hysteresis(model: &Model, file: &FileConfig, args: &HysteresisArgs, out: Option<&Path>) -> anyhow::Result<()> {
    let f = &file.hysteresis;
    let opts = HysteresisConfig {
        lambda0: pick(args.lambda0, f.lambda0, 0.3),
        peak: pick(args.peak, f.peak, 2.4),
        t_cross: pick(args.t_cross, f.t_cross, 800.0),
        breakpoints: f.breakpoints.clone(),
        window: pick(args.window, f.window, 5.0),
    };
    let schedule = match &opts.breakpoints {
        Some(b) => LambdaSchedule::Piecewise(b.iter().map(|p| (p[0], p[1])).collect()),
        None => LambdaSchedule::parabola_crossing_one(opts.lambda0, opts.peak, opts.t_cross).map_err(lib)?,
    };
    let t_end = schedule.duration().ok_or_else(|| config_error("schedule has no end time"))?;
    let xp = x_plus(model.rho, model.beta);
    let x0 = State3::original(xp.v[0] + 0.1, xp.v[1], xp.v[2]);
    let hopts = HysteresisOptions { window: opts.window, integrator: model.integrator(), ..HysteresisOptions::default() };
    let resolved = Resolved { command: "hysteresis", model, options: &opts };
    let run = hysteresis_run(model.rho, model.beta, &schedule, &x0, t_end, &hopts).map_err(lib)?;

    let mut w = sink(out)?;
    write!(w, "{}", resolved.header())?;
    for e in &run.events {
        writeln!(w, "# event t = {} lambda = {} {:?} -> {:?}", g(e.t), g(e.lambda), e.from, e.to)?;
    }
    writeln!(w, "t,lambda,X,localH")?;
    for win in &run.windows {
        writeln!(w, "{}", row(&[g(win.t_end), g(win.lambda_mid), g(win.x_end), g(win.local_h)]))?;
    }
    w.flush()?;
    if out.is_some() {
        let mut summary = resolved.json();
        summary["events"] = run
            .events
            .iter()
            .map(|e| json!({ "t": e.t, "lambda": e.lambda, "from": format!("{:?}", e.from), "to": format!("{:?}", e.to), "jump": e.jump }))
            .collect();
        print_json(&summary)?;
    }
    Ok(())
}

#[derive(Args, Debug, Default)]
pub struct OrbitArgs {
    #[arg(long, value_enum)]
    pub kind: Option<BranchChoice>,
}

#[derive(Serialize)]
struct OrbitOptions {
    kind: BranchChoice,
}

pub fn orbit(model: &Model, file: &FileConfig, args: &OrbitArgs, out: Option<&Path>) -> anyhow::Result<()> {
    let opts = OrbitOptions { kind: pick(args.kind, file.orbit.kind, BranchChoice::Symmetric) };
    let branch = match opts.kind {
        BranchChoice::Symmetric => Branch::Symmetric,
        BranchChoice::Asymmetric => Branch::Asymmetric,
        BranchChoice::Both => return Err(config_error("orbit refines one branch at a time")),
    };
    let params = model.params()?;
    let resolved = Resolved { command: "orbit", model, options: &opts };
    let bp = solve_branch(branch, &params).and_then(|bp| fill_transport(&bp, &params)).map_err(lib)?;
    // shooting keeps its own tight tolerances
    let sopts = ShootingOptions::default();
    let orbit = refine_from_branch(&bp, &params, &sopts).map_err(lib).context("shooting did not converge")?;
    let eps = params.require_epsilon().map_err(lib)?;
    let field = RescaledLorenz::from_params(&params).map_err(lib)?;
    let [xi_eta] = orbit.averages(&field, |y| [y[0] * y[1]], &sopts.integrator).map_err(lib)?;
    let (tr, det) = dm_per_revolution(&bp);
    let pred = floquet_prediction(tr, det, eps);
    let mut record = resolved.json();
    record["orbit"] = json!({
        "lambda": model.lambda,
        "rho": model.rho,
        "branch": branch.name(),
        "symmetry": format!("{:?}", orbit.symmetry),
        "period": Rescaling::from_params(&params).map_err(lib)?.time(orbit.period),
        "period_rescaled": orbit.period,
        "multipliers": orbit.multipliers.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>(),
        "predicted_multipliers": [[pred.0.re, pred.0.im], [pred.1.re, pred.1.im]],
        "transport": xi_eta / (eps * model.sigma),
        "transport_limit": bp.transport_h,
        "residual": orbit.converged_residual,
        "iterations": orbit.iterations,
        "anchor": orbit.anchor,
    });
    let text = serde_json::to_string_pretty(&record)?;
    let mut w = sink(out)?;
    writeln!(w, "{text}")?;
    w.flush()?;
    Ok(())
}

#[derive(Args, Debug, Default)]
pub struct VerifyArgs {
    /// Uniform points per positivity scan.
    #[arg(long)]
    pub grid: Option<usize>,
}

#[derive(Serialize)]
struct VerifyOptions {
    grid: usize,
}

pub fn verify(model: &Model, file: &FileConfig, args: &VerifyArgs, out: Option<&Path>) -> anyhow::Result<()> {
    let opts = VerifyOptions { grid: pick(args.grid, file.verify.grid, 10_000) };
    if opts.grid < 2 {
        return Err(config_error("verify grid needs at least two points"));
    }
    let resolved = Resolved { command: "verify", model, options: &opts };
    let mut lines = Vec::new();
    let mut all = true;
    let mut check = |name: &str, pass: bool, margin: String, at: String| {
        all &= pass;
        lines.push(format!("{:<44} {:<4} {:>24} {:>24}", name, if pass { "PASS" } else { "FAIL" }, margin, at));
    };
    for c in positivity_claims(opts.grid) {
        check(c.claim, c.pass, g(c.worst_margin), format!("k = {}", g(c.worst_at)));
    }
    let (mut id_err, mut id_at) = (0.0, 0.0);
    for i in 1..opts.grid {
        let k = i as f64 / opts.grid as f64;
        let e = f2_identity(k).map_err(lib)?.relative_error();
        if !(e <= id_err) {
            (id_err, id_at) = (e, k);
        }
    }
    check("F2 product identity (relative error <= 1e-9)", id_err <= 1e-9, g(id_err), format!("k = {}", g(id_at)));
    let small = series_coefficients(9).map_err(lib)?;
    let n9 = interval_of_positivity(&small, 0.5).map_err(lib)?;
    check("N = 9 truncation covers (0, 0.5)", n9.covers(), g(n9.bound - n9.k_ell), format!("bound {}", g(n9.bound)));
    let big = series_coefficients(2360).map_err(lib)?;
    let sandwich = sandwich_violation(&big);
    check("2c_(n+1) <= c_n <= c_(n+1) < 0 up to 2360", sandwich.is_none(), String::new(), sandwich.map(|n| format!("n = {n}")).unwrap_or_default());
    let n2360 = interval_of_positivity(&big, 0.9984).map_err(lib)?;
    check(
        "N = 2360 truncation covers (0, 0.9984)",
        n2360.covers(),
        g(n2360.bound - n2360.k_ell),
        n2360.first_nonpositive.map(|n| format!("tau_{n} <= 0")).unwrap_or_else(|| format!("bound {}", g(n2360.bound))),
    );
    let ku = ku_constant();
    check("k_u below the N = 2360 cover", ku < n2360.k_ell, g(n2360.k_ell - ku), format!("k_u = {}", g(ku)));

    let mut w = sink(out)?;
    write!(w, "{}", resolved.header())?;
    writeln!(w, "{:<44} {:<4} {:>24} {:>24}", "claim", "", "worst margin", "location")?;
    for l in &lines {
        writeln!(w, "{l}")?;
    }
    writeln!(w, "\nn  tau_n")?;
    for (n, t) in small.tau.iter().enumerate() {
        writeln!(w, "{n}  {t}")?;
    }
    w.flush()?;
    if !all {
        bail!("appendix verification failed");
    }
    Ok(())
}

#[derive(Args, Debug, Default)]
pub struct StenfloArgs {
    /// Rotation coupling.
    #[arg(long)]
    pub s: Option<f64>,
    #[arg(long)]
    pub t_end: Option<f64>,
    #[arg(long)]
    pub t_transient: Option<f64>,
    /// Also refine the periodic orbit by shooting.
    #[arg(long)]
    pub refine: bool,
}

#[derive(Serialize)]
struct StenfloOptions {
    s: f64,
    t_end: f64,
    t_transient: f64,
    refine: bool,
}

pub fn stenflo_cmd(model: &Model, file: &FileConfig, args: &StenfloArgs, out: Option<&Path>) -> anyhow::Result<()> {
    let f = &file.stenflo;
    let t_end = pick(args.t_end, f.t_end, 20.0);
    let opts = StenfloOptions {
        s: pick(args.s, f.s, 1.0),
        t_end,
        t_transient: pick(args.t_transient, f.t_transient, 0.25 * t_end),
        refine: args.refine || f.refine.unwrap_or(false),
    };
    if !(opts.t_end > opts.t_transient && opts.t_transient >= 0.0 && opts.s.is_finite()) {
        return Err(config_error("need 0 <= t_transient < t_end and finite s"));
    }
    let params = model.params()?;
    let resolved = Resolved { command: "stenflo", model, options: &opts };
    let bp = solve_sym_branch(&params).and_then(|bp| fill_transport(&bp, &params)).map_err(lib)?;
    let m4_zero = melnikov_m4(&bp, &params, 0.0).map_err(lib)?;
    let m4_off = melnikov_m4(&bp, &params, 0.1).map_err(lib)?;
    let block = stenflo_block(&bp, &params).map_err(lib)?;
    let structure_ok = m4_zero == 0.0 && m4_off != 0.0 && block.det_lorenz > 0.0 && block.dm4_dchi != 0.0;

    let mut rng = ChaCha8Rng::seed_from_u64(model.seed);
    let s0 = random_start(&mut rng, model.rho, model.beta);
    let x0 = State4::original(s0[0], s0[1], s0[2], 0.0);
    let integ = model.integrator();
    if let Some(path) = out {
        let (sigma, beta, rho, s) = (model.sigma, model.beta, model.rho, opts.s);
        let traj = integrate(|_, y: &[f64; 4]| stenflo(y, sigma, beta, rho, s), Frame::Original, x0.v, (0.0, opts.t_end), &integ, Sampling::Every(opts.t_end / 10_000.0))
            .map_err(lib)?;
        let mut w = sink(Some(path))?;
        write!(w, "{}", resolved.header())?;
        writeln!(w, "t,X,Y,Z,V")?;
        for (t, y) in traj.times.iter().zip(&traj.states) {
            writeln!(w, "{}", row(&[g(*t), g(y[0]), g(y[1]), g(y[2]), g(y[3])]))?;
        }
        w.flush()?;
    }
    let m = measure_stenflo_transport(&params, opts.s, &x0, opts.t_end, opts.t_transient, &integ).map_err(lib)?;
    let mut record = resolved.json();
    record["branch"] = json!({ "k": bp.k, "B": bp.b, "h_limit": bp.transport_h });
    record["melnikov"] = json!({
        "m4_at_chi0_zero": m4_zero,
        "m4_at_chi0_0.1": m4_off,
        "tr_lorenz": block.tr_lorenz,
        "det_lorenz": block.det_lorenz,
        "dm4_dchi": block.dm4_dchi,
        "det_full": block.det_full,
        "structure_ok": structure_ok,
    });
    record["simulation"] = json!({
        "x0": x0.v,
        "H": m.h,
        "H_over_rho": m.h / model.rho,
        "beta_avgZ": m.beta_avg_z,
        "avg_V": m.avg_v,
    });
    if opts.refine {
        let o = refine_stenflo_orbit(&params, opts.s, &ShootingOptions::default()).map_err(lib).context("shooting did not converge")?;
        record["orbit"] = json!({
            "period_rescaled": o.orbit.period,
            "multipliers": o.orbit.multipliers.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>(),
            "chi_mean": o.chi_mean,
            "chi_rms": o.chi_rms,
            "H_over_rho": o.h_over_rho,
            "residual": o.orbit.converged_residual,
        });
    }
    print_json(&record)?;
    if !structure_ok {
        bail!("Melnikov structure check failed");
    }
    Ok(())
}

#[derive(Args, Debug, Default)]
pub struct SampleArgs {
    /// Orbit family; inferred from (A, B) when absent.
    #[arg(long, value_enum)]
    pub family: Option<FamilyChoice>,
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<f64>,
    #[arg(long)]
    pub b: Option<f64>,
    #[arg(long, value_enum)]
    pub sign: Option<SignChoice>,
    #[arg(long)]
    pub points: Option<usize>,
}

#[derive(Serialize)]
struct SampleOptions {
    family: FamilyChoice,
    a: f64,
    b: f64,
    sign: SignChoice,
    points: usize,
}

pub fn orbit_sample(model: &Model, file: &FileConfig, args: &SampleArgs, out: Option<&Path>) -> anyhow::Result<()> {
    let f = &file.sample;
    let a = pick(args.a, f.a, 0.5);
    let b = pick(args.b, f.b, 1.0);
    let pair = ConservedPair::new(a, b).map_err(|e| config_error(e.to_string()))?;
    let family = match args.family.or(f.family) {
        Some(fam) => fam,
        None => match classify_region(&pair, DEFAULT_REGION_TOL) {
            Region::D1 => FamilyChoice::L1,
            Region::D2 => FamilyChoice::L2,
            Region::D3 => FamilyChoice::L3,
            r => return Err(config_error(format!("(A, B) in region {r} carries no orbit"))),
        },
    };
    let opts = SampleOptions { family, a, b, sign: pick(args.sign, f.sign, SignChoice::Plus), points: pick(args.points, f.points, 200) };
    if opts.points < 2 {
        return Err(config_error("need at least two sample points"));
    }
    let orbit = match family {
        FamilyChoice::L1 => OrbitFamily::l1(pair),
        FamilyChoice::L2 => OrbitFamily::l2(pair, opts.sign.into()),
        FamilyChoice::L3 => OrbitFamily::l3(b, opts.sign.into()),
    }
    .map_err(|e| config_error(e.to_string()))?;
    let (t0, t1) = match family {
        FamilyChoice::L3 => (-10.0 / b.sqrt(), 10.0 / b.sqrt()),
        _ => (0.0, orbit.minimal_period().map_err(lib)?),
    };
    let resolved = Resolved { command: "orbit-sample", model, options: &opts };
    let mut w = sink(out)?;
    write!(w, "{}", resolved.header())?;
    writeln!(w, "tau,xi,eta,zeta")?;
    for i in 0..opts.points {
        let tau = t0 + (t1 - t0) * i as f64 / (opts.points - 1) as f64;
        let v = orbit.eval(tau).map_err(lib)?.v;
        writeln!(w, "{}", row(&[g(tau), g(v[0]), g(v[1]), g(v[2])]))?;
    }
    w.flush()?;
    Ok(())
}
