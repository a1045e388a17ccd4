//! One function per CLI subcommand.

use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use super::config::*;
use super::output::{num, opt, Meta, OutputDir};
use super::{HarnessError, Report, RunContext};
use crate::dynamics::{
    ed_field, field_norm, integrate_scores, integrate_with, relative_scores, DynamicsSpec,
    IntegrateOptions, Representation,
};
use crate::entropy::Entropy;
use crate::equilibria::{
    bifurcation_scan, interior_rest_points, qre_newton, qre_path, qre_solve, scan_temperature,
    CriticalMethod, QrePoint, RestPointKind, CRITICAL_TOL, QRE_TOL,
};
use crate::error::{Error, Result};
use crate::games::{fit_potential, FiniteGame, POTENTIAL_TOL};
use crate::learning::*;
use crate::profile::MixedProfile;

/// Tolerance of the simulate-versus-solver check.
pub const SIMULATE_CHECK_TOL: f64 = 1e-6;
/// Field norm a reported rest point must reach under `--check`.
pub const REST_CHECK_TOL: f64 = 1e-8;

type Outcome = std::result::Result<Report, HarnessError>;

fn context<T>(what: &str, r: Result<T>) -> std::result::Result<T, HarnessError> {
    r.map_err(|e| HarnessError::Lib {
        context: what.to_string(),
        source: e,
    })
}

fn finish(out: OutputDir, failures: Vec<String>, check: bool) -> Outcome {
    if check && !failures.is_empty() {
        return Err(HarnessError::Check(failures.join("; ")));
    }
    Ok(Report {
        files: out.written,
        check_passed: check.then_some(true),
    })
}

fn profile_rows(t: f64, x: &MixedProfile, rows: &mut Vec<Vec<String>>) {
    for (k, xk) in x.blocks().iter().enumerate() {
        for (a, p) in xk.iter().enumerate() {
            rows.push(vec![num(t), k.to_string(), a.to_string(), num(*p)]);
        }
    }
}

fn qre_distance(game: &FiniteGame, entropy: &Entropy, t: f64, x: &MixedProfile) -> Option<f64> {
    if t <= 0.0 || !x.is_interior() {
        return None;
    }
    let rho = 1.0 / t;
    let q = qre_newton(game, entropy, rho, x)
        .ok()
        .filter(|p| p.residual < QRE_TOL)
        .or_else(|| qre_solve(game, entropy, rho, x).ok())?;
    Some(x.dist_inf(&q.x))
}

pub fn simulate(path: &Path, ctx: &RunContext) -> Outcome {
    let l: Loaded<SimulateConfig> = context(&path.display().to_string(), load(path))?;
    let c = &l.config;
    let game = context("game", c.game.load(&l.base))?;
    let entropy = context("entropy", entropy_or_gibbs(&c.entropy))?;
    let seed = ctx.seed.or(c.seed).unwrap_or(0);
    let mut spec = DynamicsSpec::new(&game, entropy, c.temperature);
    if let Some(r) = &c.rates {
        spec = context("rates", spec.with_rates(r.clone()))?;
    }
    let x0 =
        c.x0.clone()
            .unwrap_or_else(|| MixedProfile::uniform(game.action_counts()));
    let cert = fit_potential(&game, POTENTIAL_TOL);
    let mut opts = IntegrateOptions::new(c.t_end, c.dt, c.space);
    opts.record_every = c.record_every;
    if cert.is_potential() {
        opts.potential = Some(cert.clone());
    }
    let traj = context("integration", integrate_with(&spec, &x0, &opts))?;

    let mut out = context(
        "output",
        OutputDir::create(&ctx.out_dir, Meta::new("simulate", &l.raw, seed)),
    )?;
    let mut rows = Vec::new();
    for (t, x) in traj.times.iter().zip(&traj.states) {
        profile_rows(*t, x, &mut rows);
    }
    context(
        "output",
        out.csv("trajectory.csv", &["t", "player", "action", "prob"], &rows),
    )?;
    let diag: Vec<Vec<String>> = traj
        .times
        .iter()
        .zip(&traj.diagnostics)
        .map(|(t, d)| vec![num(*t), opt(d.free_energy), num(d.field_norm)])
        .collect();
    context(
        "output",
        out.csv(
            "diagnostics.csv",
            &["t", "free_energy", "field_norm"],
            &diag,
        ),
    )?;

    let last = traj.last_state();
    let mut failures = Vec::new();
    let mut check_distance = None;
    if ctx.check {
        if c.temperature <= 0.0 {
            failures.push("the endpoint check needs T > 0".to_string());
        } else {
            match qre_solve(&game, &entropy, 1.0 / c.temperature, last) {
                Ok(q) => {
                    let d = last.dist_inf(&q.x);
                    check_distance = Some(d);
                    if d > SIMULATE_CHECK_TOL {
                        failures.push(format!("endpoint is {d:e} from the QRE solver output"));
                    }
                }
                Err(e) => failures.push(format!("QRE solver failed: {e}")),
            }
        }
    }
    let summary = json!({
        "status": traj.status,
        "t_final": traj.last_time(),
        "final_profile": last,
        "final_field_norm": traj.diagnostics.last().map(|d| d.field_norm),
        "max_sum_drift": traj.max_sum_drift,
        "potential": cert.is_potential(),
        "check": ctx.check.then(|| json!({ "distance": check_distance, "failures": failures })),
    });
    context("output", out.json("summary.json", &summary))?;
    finish(out, failures, ctx.check)
}

#[derive(Serialize)]
struct RunSummary {
    seed: u64,
    replicate: u64,
    iterations: usize,
    status: RunStatus,
    final_profile: MixedProfile,
    min_coordinate: f64,
    max_sum_error: f64,
    qre_distance: Option<f64>,
}

pub fn learn(path: &Path, ctx: &RunContext) -> Outcome {
    let l: Loaded<LearnConfig> = context(&path.display().to_string(), load(path))?;
    let c = &l.config;
    let game = context("game", prepared_game(&c.game, &l.base, c.normalize))?;
    let entropy = context("entropy", entropy_or_gibbs(&c.entropy))?;
    if c.algorithm != Algorithm::Async && (!c.revision.is_synchronous() || c.delay.max_delay > 0) {
        return Err(HarnessError::Lib {
            context: "config".into(),
            source: Error::Config("`revision` and `delay` need `\"algorithm\": \"async\"`".into()),
        });
    }
    let seeds = ctx.seed.map(|s| vec![s]).unwrap_or_else(|| c.seeds.clone());
    if seeds.is_empty() || c.replicates == 0 {
        return Err(HarnessError::Lib {
            context: "config".into(),
            source: Error::Config("need at least one seed and one replicate".into()),
        });
    }
    let jobs: Vec<(u64, u64)> = seeds
        .iter()
        .flat_map(|&s| (0..c.replicates as u64).map(move |r| (s, r)))
        .collect();
    let runs: Vec<LearnerRun> = context(
        "learning",
        jobs.par_iter()
            .map(|&(seed, replicate)| {
                let initial = match &c.initial {
                    InitSpec::Named(InitKind::Uniform) => None,
                    InitSpec::Named(InitKind::Dirichlet) => {
                        Some(dirichlet_profile(game.action_counts(), seed, replicate))
                    }
                    InitSpec::Profile(p) => Some(p.clone()),
                };
                let opts = LearnerOptions {
                    temperature: c.temperature,
                    schedule: c.schedule,
                    iterations: c.iters,
                    seed,
                    replicate,
                    noise: c.noise,
                    record: c.record.clone(),
                    initial,
                    allow_zero_temperature: ctx.unsafe_zero_temperature,
                };
                match c.algorithm {
                    Algorithm::Score => run_score_learner(&game, &entropy, &opts),
                    Algorithm::Strategy => run_strategy_learner(&game, &entropy, &opts),
                    Algorithm::Async => {
                        run_async_learner(&game, &entropy, &opts, &c.revision, &c.delay)
                    }
                }
            })
            .collect::<Result<Vec<_>>>(),
    )?;

    let mut out = context(
        "output",
        OutputDir::create(&ctx.out_dir, Meta::new("learn", &l.raw, seeds[0])),
    )?;
    let width = game.action_counts().iter().copied().max().unwrap_or(0);
    let mut columns = vec![
        "n".to_string(),
        "player".into(),
        "action_chosen".into(),
        "payoff".into(),
    ];
    columns.extend((0..width).map(|a| format!("prob_{a}")));
    let columns: Vec<&str> = columns.iter().map(String::as_str).collect();
    for run in &runs {
        let mut rows = Vec::new();
        for rec in &run.records {
            for (k, xk) in rec.profile.blocks().iter().enumerate() {
                let mut row = vec![
                    rec.n.to_string(),
                    k.to_string(),
                    rec.actions
                        .get(k)
                        .map(|a| a.to_string())
                        .unwrap_or_default(),
                    opt(rec.payoffs.get(k).copied().flatten()),
                ];
                row.extend((0..width).map(|a| xk.get(a).map(|p| num(*p)).unwrap_or_default()));
                rows.push(row);
            }
        }
        let name = format!("run_s{}_r{}.csv", run.seed, run.replicate);
        context("output", out.csv(&name, &columns, &rows))?;
    }
    let summaries: Vec<RunSummary> = runs
        .par_iter()
        .map(|r| RunSummary {
            seed: r.seed,
            replicate: r.replicate,
            iterations: r.iterations,
            status: r.status.clone(),
            final_profile: r.final_profile.clone(),
            min_coordinate: r.min_coordinate,
            max_sum_error: r.max_sum_error,
            qre_distance: qre_distance(&game, &entropy, c.temperature, &r.final_profile),
        })
        .collect();
    let mut failures = Vec::new();
    if ctx.check {
        for s in &summaries {
            let id = format!("seed {} replicate {}", s.seed, s.replicate);
            if s.status != RunStatus::Completed {
                failures.push(format!("{id}: {:?}", s.status));
            }
            if s.min_coordinate < 0.0 || s.max_sum_error > SUM_TOL {
                failures.push(format!("{id}: left the simplex"));
            }
            match s.qre_distance {
                Some(d) if d <= c.check_tolerance => {}
                Some(d) => failures.push(format!("{id}: final profile {d:e} from the nearest QRE")),
                None => failures.push(format!("{id}: no QRE reference (needs T > 0)")),
            }
        }
    }
    let summary = json!({
        "algorithm": c.algorithm,
        "entropy": entropy.name(),
        "runs": summaries,
        "stationary_rates": c.revision.stationary_rates(game.num_players()).ok(),
        "check": ctx.check.then(|| json!({ "failures": failures })),
    });
    context("output", out.json("summary.json", &summary))?;
    finish(out, failures, ctx.check)
}

pub fn qre(path: &Path, ctx: &RunContext) -> Outcome {
    let l: Loaded<QreConfig> = context(&path.display().to_string(), load(path))?;
    let c = &l.config;
    let game = context("game", c.game.load(&l.base))?;
    let entropy = context("entropy", entropy_or_gibbs(&c.entropy))?;
    let rho = context("config", c.rationality())?;
    let seed = ctx.seed.or(c.seed).unwrap_or(0);
    let init = c
        .init
        .clone()
        .unwrap_or_else(|| MixedProfile::uniform(game.action_counts()));
    let point = context("QRE solver", qre_solve(&game, &entropy, rho, &init))?;
    let qpath = match &c.path {
        Some(p) => Some(context(
            "QRE path",
            qre_path(&game, &entropy, p.rho_max, p.steps),
        )?),
        None => None,
    };

    let mut out = context(
        "output",
        OutputDir::create(&ctx.out_dir, Meta::new("qre", &l.raw, seed)),
    )?;
    if let Some(p) = &qpath {
        let mut rows = Vec::new();
        for q in &p.points {
            profile_rows(q.rationality, &q.x, &mut rows);
        }
        context(
            "output",
            out.csv("qre_path.csv", &["rho", "player", "action", "prob"], &rows),
        )?;
    }
    let mut failures = Vec::new();
    let mut field = None;
    if ctx.check && rho > 0.0 {
        let spec = DynamicsSpec::new(&game, entropy, 1.0 / rho);
        match ed_field(&spec, &point.x) {
            Ok(f) => {
                let n = field_norm(&f);
                field = Some(n);
                if n >= REST_CHECK_TOL {
                    failures.push(format!("QRE is not a rest point: field norm {n:e}"));
                }
            }
            Err(e) => failures.push(format!("field evaluation failed: {e}")),
        }
    }
    let summary = json!({
        "entropy": entropy.name(),
        "point": point,
        "path": qpath.as_ref().map(|p| json!({
            "status": p.status,
            "points": p.points.len(),
            "branch_points": p.branch_points,
            "terminal_vertex": p.terminal_vertex,
            "terminal_is_nash": p.terminal_is_nash,
            "terminal_distance": p.terminal_distance,
        })),
        "check": ctx.check.then(|| json!({ "field_norm": field, "failures": failures })),
    });
    context("output", out.json("qre.json", &summary))?;
    finish(out, failures, ctx.check)
}

fn require_two_by_two(game: &FiniteGame) -> std::result::Result<(), HarnessError> {
    if game.action_counts() != [2, 2] {
        return Err(HarnessError::Lib {
            context: "game".into(),
            source: Error::Config(format!(
                "this command needs a 2×2 game, got actions {:?}",
                game.action_counts()
            )),
        });
    }
    Ok(())
}

pub fn portrait(path: &Path, ctx: &RunContext) -> Outcome {
    let l: Loaded<PortraitConfig> = context(&path.display().to_string(), load(path))?;
    let c = &l.config;
    let game = context("game", c.game.load(&l.base))?;
    require_two_by_two(&game)?;
    let entropy = context("entropy", entropy_or_gibbs(&c.entropy))?;
    let temps = context("config", c.temperatures.values())?;
    if c.grid == 0 {
        return Err(HarnessError::Lib {
            context: "config".into(),
            source: Error::Config("`grid` must be positive".into()),
        });
    }
    let seed = ctx.seed.or(c.seed).unwrap_or(0);
    let g = c.grid;
    let jobs: Vec<(usize, usize)> = (0..temps.len())
        .flat_map(|ti| (0..g * g).map(move |j| (ti, j)))
        .collect();
    let trajectories = context(
        "integration",
        jobs.par_iter()
            .map(|&(ti, j)| {
                let spec = DynamicsSpec::new(&game, entropy, temps[ti]);
                let p = (j / g) as f64 / g as f64 + 0.5 / g as f64;
                let q = (j % g) as f64 / g as f64 + 0.5 / g as f64;
                let x0 = MixedProfile::new(vec![vec![p, 1.0 - p], vec![q, 1.0 - q]]);
                let z0 = relative_scores(&entropy, &x0)?;
                let mut opts = IntegrateOptions::new(c.t_end, c.dt, Representation::Score);
                opts.record_every = c.record_every;
                integrate_scores(&spec, &z0, &opts)
            })
            .collect::<Result<Vec<_>>>(),
    )?;
    let entries = context(
        "rest points",
        temps
            .par_iter()
            .map(|&t| scan_temperature(&game, &entropy, t))
            .collect::<Result<Vec<_>>>(),
    )?;

    let mut out = context(
        "output",
        OutputDir::create(&ctx.out_dir, Meta::new("portrait", &l.raw, seed)),
    )?;
    let mut rows = Vec::new();
    let mut endpoints = vec![Vec::new(); temps.len()];
    for (&(ti, j), traj) in jobs.iter().zip(&trajectories) {
        for (t, x) in traj.times.iter().zip(&traj.states) {
            rows.push(vec![
                num(temps[ti]),
                j.to_string(),
                num(*t),
                num(x.player(0)[0]),
                num(x.player(1)[0]),
            ]);
        }
        let x = traj.last_state();
        endpoints[ti].push(json!({
            "trajectory": j,
            "x1": x.player(0)[0],
            "x2": x.player(1)[0],
            "status": traj.status,
        }));
    }
    context(
        "output",
        out.csv(
            "portrait_trajectories.csv",
            &["T", "trajectory", "t", "x1", "x2"],
            &rows,
        ),
    )?;
    let mut rest_rows = Vec::new();
    let mut failures = Vec::new();
    for e in &entries {
        let spec = DynamicsSpec::new(&game, entropy, e.temperature);
        for (id, r) in e.rest_points.iter().enumerate() {
            rest_rows.push(vec![
                num(e.temperature),
                id.to_string(),
                format!("{:?}", r.kind).to_lowercase(),
                num(r.x.player(0)[0]),
                num(r.x.player(1)[0]),
                opt(r.max_eig_real),
                r.tag.clone(),
            ]);
            if ctx.check && r.kind == RestPointKind::Interior {
                match ed_field(&spec, &r.x).map(|f| field_norm(&f)) {
                    Ok(n) if n < REST_CHECK_TOL => {}
                    Ok(n) => failures.push(format!(
                        "T = {}: rest point {id} has field norm {n:e}",
                        e.temperature
                    )),
                    Err(err) => failures.push(format!("T = {}: {err}", e.temperature)),
                }
            }
        }
    }
    context(
        "output",
        out.csv(
            "portrait_rest_points.csv",
            &[
                "T",
                "rest_point_id",
                "kind",
                "x1",
                "x2",
                "max_eig_real",
                "tag",
            ],
            &rest_rows,
        ),
    )?;
    let per_t: Vec<_> = temps
        .iter()
        .zip(&endpoints)
        .map(|(t, e)| json!({ "T": t, "endpoints": e }))
        .collect();
    let summary = json!({
        "entropy": entropy.name(),
        "grid": g,
        "temperatures": per_t,
        "check": ctx.check.then(|| json!({ "failures": failures })),
    });
    context("output", out.json("summary.json", &summary))?;
    finish(out, failures, ctx.check)
}

pub fn bifurcate(path: &Path, ctx: &RunContext) -> Outcome {
    let l: Loaded<BifurcateConfig> = context(&path.display().to_string(), load(path))?;
    let c = &l.config;
    let game = context("game", c.game.load(&l.base))?;
    require_two_by_two(&game)?;
    let entropy = context("entropy", entropy_or_gibbs(&c.entropy))?;
    let temps = context("config", c.temperatures.values())?;
    let seed = ctx.seed.or(c.seed).unwrap_or(0);
    let scan = context("scan", bifurcation_scan(&game, &entropy, &temps))?;

    let mut out = context(
        "output",
        OutputDir::create(&ctx.out_dir, Meta::new("bifurcate", &l.raw, seed)),
    )?;
    let mut rows = Vec::new();
    for e in &scan.entries {
        for (id, r) in e.rest_points.iter().enumerate() {
            for (k, xk) in r.x.blocks().iter().enumerate() {
                for (a, p) in xk.iter().enumerate() {
                    rows.push(vec![
                        num(e.temperature),
                        id.to_string(),
                        k.to_string(),
                        a.to_string(),
                        num(*p),
                        opt(r.max_eig_real),
                        r.tag.clone(),
                    ]);
                }
            }
        }
    }
    context(
        "output",
        out.csv(
            "scan.csv",
            &[
                "T",
                "rest_point_id",
                "player",
                "action",
                "prob",
                "max_eig_real",
                "tag",
            ],
            &rows,
        ),
    )?;
    let mut failures = Vec::new();
    if ctx.check {
        for ct in &scan.critical {
            if ct.method == CriticalMethod::ZeroTemperature {
                continue;
            }
            let count = |t: f64| interior_rest_points(&DynamicsSpec::new(&game, entropy, t)).len();
            let below = count(ct.estimate - 2.0 * CRITICAL_TOL);
            let above = count(ct.estimate + 2.0 * CRITICAL_TOL);
            if below == above {
                failures.push(format!(
                    "no count change around the critical temperature {}",
                    ct.estimate
                ));
            }
        }
    }
    let counts: Vec<_> = scan
        .entries
        .iter()
        .map(|e| json!({ "T": e.temperature, "interior_rest_points": e.interior_count() }))
        .collect();
    let summary = json!({
        "entropy": entropy.name(),
        "critical": scan.critical,
        "counts": counts,
        "check": ctx.check.then(|| json!({ "failures": failures })),
    });
    context("output", out.json("critical.json", &summary))?;
    finish(out, failures, ctx.check)
}

pub fn fig2(path: &Path, ctx: &RunContext) -> Outcome {
    let l: Loaded<Fig2Config> = context(&path.display().to_string(), load(path))?;
    let c = &l.config;
    let game = context("game", c.game.load(&l.base))?;
    require_two_by_two(&game)?;
    let cert = fit_potential(&game, POTENTIAL_TOL);
    let config_err = |m: String| HarnessError::Lib {
        context: "config".into(),
        source: Error::Config(m),
    };
    if !cert.is_potential() {
        return Err(config_err(format!(
            "fig2 needs a potential game (residual {:e})",
            cert.residual
        )));
    }
    let entropy = context("entropy", entropy_or_gibbs(&c.entropy))?;
    if !(c.temperature > 0.0) {
        return Err(config_err("fig2 needs T > 0".into()));
    }
    if c.replicates == 0 || c.grid == 0 {
        return Err(config_err(
            "`replicates` and `grid` must be positive".into(),
        ));
    }
    let mut checkpoints = c.checkpoints.clone();
    checkpoints.sort_unstable();
    checkpoints.dedup();
    let iters = checkpoints.last().copied().unwrap_or(0).max(1);
    let seed = ctx.seed.or(c.seed).unwrap_or(0);

    let spec = DynamicsSpec::new(&game, entropy, c.temperature);
    let refs: Vec<QrePoint> = interior_rest_points(&spec)
        .into_iter()
        .map(|(_, x)| QrePoint {
            x,
            rationality: 1.0 / c.temperature,
            residual: 0.0,
            support: None,
        })
        .collect();
    let runs = context(
        "learning",
        (0..c.replicates as u64)
            .into_par_iter()
            .map(|r| {
                let initial = match &c.initial {
                    InitSpec::Named(InitKind::Dirichlet) => {
                        dirichlet_profile(game.action_counts(), seed, r)
                    }
                    InitSpec::Named(InitKind::Uniform) => {
                        MixedProfile::uniform(game.action_counts())
                    }
                    InitSpec::Profile(p) => p.clone(),
                };
                let mut opts = LearnerOptions::new(c.temperature, c.schedule, iters, seed);
                opts.replicate = r;
                opts.noise = c.noise;
                opts.initial = Some(initial);
                opts.record = RecordMode::Checkpoints(checkpoints.clone());
                run_strategy_learner(&game, &entropy, &opts)
            })
            .collect::<Result<Vec<_>>>(),
    )?;
    let stats = context("statistics", convergence_stats(&runs, &refs, c.epsilon))?;
    let mono = context(
        "statistics",
        bootstrap_monotone(&stats, c.bootstrap_resamples, 0.95, seed),
    )?;

    let mut out = context(
        "output",
        OutputDir::create(&ctx.out_dir, Meta::new("fig2", &l.raw, seed)),
    )?;
    for &n in &stats.checkpoints {
        let grid = context("statistics", density_grid(&runs, n, c.grid))?;
        let mut rows = Vec::with_capacity(c.grid * c.grid);
        for (i, row) in grid.iter().enumerate() {
            for (j, count) in row.iter().enumerate() {
                rows.push(vec![
                    num((i as f64 + 0.5) / c.grid as f64),
                    num((j as f64 + 0.5) / c.grid as f64),
                    count.to_string(),
                ]);
            }
        }
        context(
            "output",
            out.csv(&format!("density_n{n}.csv"), &["x1", "x2", "count"], &rows),
        )?;
    }
    let mut failures = Vec::new();
    if ctx.check {
        if !mono.monotone {
            failures.push("converged fraction decreases significantly between checkpoints".into());
        }
        for (i, r) in refs.iter().enumerate() {
            match ed_field(&spec, &r.x).map(|f| field_norm(&f)) {
                Ok(n) if n < REST_CHECK_TOL => {}
                Ok(n) => failures.push(format!("reference {i} has field norm {n:e}")),
                Err(e) => failures.push(format!("reference {i}: {e}")),
            }
        }
    }
    let summary = json!({
        "entropy": entropy.name(),
        "T": c.temperature,
        "replicates": c.replicates,
        "epsilon": c.epsilon,
        "grid": c.grid,
        "checkpoints": stats.checkpoints,
        "fractions": stats.fractions,
        "monotonicity": mono,
        "references": refs.iter().map(|r| &r.x).collect::<Vec<_>>(),
        "check": ctx.check.then(|| json!({ "failures": failures })),
    });
    context("output", out.json("summary.json", &summary))?;
    finish(out, failures, ctx.check)
}
