//! Subcommand implementations. Each returns the JSON summary printed on stdout.

use std::fs::File;
use std::path::{Path, PathBuf};

use ompath::bvp::{shoot, sweep_alpha_beta, sweep_d_with_resolution, BvpProblem, BvpSolution, ExistenceSweep, Outcome};
use ompath::elode::assemble_el;
use ompath::io::{grid_velocity, read_path_csv, write_path_csv, write_sample_csv, SWEEP_D_HEADER};
use ompath::levy::StableJumpMeasure;
use ompath::mcsim::{rank_paths, simulate_path, tube_probability, Compensation, SdeSpec};
use ompath::om::{check_theorem51, om_action, om_rewritten_value, om_value, DriftModel, OmLagrangian, PathGrid};
use ompath::oracle::linear_closed_form;
use ompath::varmin::{compare_methods, minimize_action, MinimizeResult};
use serde_json::{json, Value};

use crate::args::{
    parse_grid, ClosedFormArgs, Cli, Command, CompensationArg, ModelArgs, OmActionArgs, OmEvalArgs, ProblemArgs,
    RankArgs, SdeArgs, SimulateArgs, SweepAbArgs, SweepDArgs, TubeProbArgs,
};
use crate::config::{ExperimentConfig, Format, Method};
use crate::failure::Failure;
use crate::output::Artifacts;
use crate::reproduce;

/// Smallest hit count per candidate before a ranking is called conclusive.
pub const MIN_HITS: u64 = 50;

pub const ROOT_POLICY: &str = "least-action root among all sign changes of the miss function in the bracket";

pub fn run(cli: &Cli) -> Result<Value, Failure> {
    let out = |name: &str, configured: Option<&PathBuf>| -> PathBuf {
        cli.out
            .clone()
            .or_else(|| configured.cloned())
            .unwrap_or_else(|| Path::new("ompath-out").join(name))
    };
    match &cli.command {
        Command::LevyConstant(a) => {
            let m = StableJumpMeasure::new(a.alpha, a.beta)?;
            let summary = json!({ "alpha": a.alpha, "beta": a.beta, "d_nu": m.drift_constant() });
            save_query(cli, "levy-constant", a, &summary)
        }
        Command::OmEval(a) => om_eval(cli, a),
        Command::OmAction(a) => om_action_cmd(cli, a),
        Command::Solve(a) => problem(a, Method::Shoot, |cfg| out("solve", cfg.output.directory.as_ref())),
        Command::Minimize(a) => problem(a, Method::Minimize, |cfg| out("minimize", cfg.output.directory.as_ref())),
        Command::Compare(a) => problem(a, Method::Both, |cfg| out("compare", cfg.output.directory.as_ref())),
        Command::SweepD(a) => sweep_d_cmd(a, |cfg| out("sweep-d", cfg.output.directory.as_ref())),
        Command::SweepAb(a) => sweep_ab_cmd(a, |cfg| out("sweep-ab", cfg.output.directory.as_ref())),
        Command::ClosedForm(a) => closed_form(a, &out("closed-form", None)),
        Command::Simulate(a) => simulate(a, &out("simulate", None)),
        Command::TubeProb(a) => tube_prob(cli, a),
        Command::Rank(a) => rank(cli, a),
        Command::Reproduce(a) => {
            let name = serde_json::to_value(a.figure)
                .ok()
                .and_then(|v| v.as_str().map(String::from))
                .unwrap_or_default();
            reproduce::run(a.figure, &out(&format!("reproduce-{name}"), None))
        }
    }
}

/// Query commands print JSON; with `--out` the result is also saved.
fn save_query(cli: &Cli, name: &str, inputs: &impl serde::Serialize, summary: &Value) -> Result<Value, Failure> {
    if let Some(dir) = &cli.out {
        let mut art = Artifacts::create(dir)?;
        art.write_json(&format!("{name}.json"), summary)?;
        art.finish(name, to_value(inputs))?;
    }
    Ok(summary.clone())
}

fn to_value(v: &impl serde::Serialize) -> Value {
    serde_json::to_value(v).unwrap_or(Value::Null)
}

fn lagrangian(m: &ModelArgs) -> Result<OmLagrangian, Failure> {
    let d = m.noise.to_noise().d_nu()?;
    Ok(OmLagrangian::new(DriftModel::parse(&m.drift)?, m.c, d)?)
}

fn om_eval(cli: &Cli, a: &OmEvalArgs) -> Result<Value, Failure> {
    let l = lagrangian(&a.model)?;
    let summary = json!({
        "z": a.z,
        "zdot": a.zdot,
        "d_nu": l.d_nu(),
        "om": om_value(&l, a.z, a.zdot)?,
        "om_rewritten": om_rewritten_value(&l, a.z, a.zdot)?,
    });
    save_query(cli, "om-eval", a, &summary)
}

fn om_action_cmd(cli: &Cli, a: &OmActionArgs) -> Result<Value, Failure> {
    let l = lagrangian(&a.model)?;
    let grid = read_grid(&a.path)?;
    let summary = json!({
        "action": om_action(&l, &grid)?,
        "n": grid.n(),
        "s": grid.s(),
        "u": grid.u(),
        "d_nu": l.d_nu(),
        "stencil": "midpoint",
    });
    save_query(cli, "om-action", a, &summary)
}

fn read_grid(path: &Path) -> Result<PathGrid, Failure> {
    let f = File::open(path).map_err(|e| Failure::config(format!("cannot open {}: {e}", path.display())))?;
    Ok(read_path_csv(f)?)
}

fn bvp_problem(cfg: &ExperimentConfig, l: &OmLagrangian) -> Result<BvpProblem, Failure> {
    let b = &cfg.boundary;
    let (lo, hi) = cfg.bracket();
    Ok(BvpProblem::new(assemble_el(l), b.x0, b.x1, b.s, b.u)?
        .with_h(cfg.h())?
        .with_tol(cfg.tol_boundary())?
        .with_bracket(lo, hi)?)
}

fn record_problem(art: &mut Artifacts, cfg: &ExperimentConfig, method: Method) -> Result<(), Failure> {
    let resolved = cfg.resolved(method);
    let text = toml::to_string(&resolved).map_err(|e| Failure::numerical("io", e.to_string()))?;
    art.write_text("config.toml", &text)?;
    art.tolerance("h", cfg.h());
    art.tolerance("tol_boundary", cfg.tol_boundary());
    art.tolerance("grad_tol", cfg.minimize_config().grad_tol);
    art.tolerance("bisection_rel", ompath::bvp::BISECTION_TOL);
    Ok(())
}

fn shoot_summary(sol: &BvpSolution, l: &OmLagrangian) -> Value {
    json!({
        "method": "shoot",
        "v0": sol.v0,
        "residual": sol.residual,
        "action": sol.action,
        "roots_found": sol.multiplicity_note,
        "roots": sol.roots,
        "bracket": [sol.bracket.0, sol.bracket.1],
        "root_policy": ROOT_POLICY,
        "d_nu": l.d_nu(),
    })
}

fn minimize_summary(r: &MinimizeResult, l: &OmLagrangian) -> Value {
    json!({
        "method": "minimize",
        "v0": grid_velocity(&r.grid)[0],
        "residual": 0.0,
        "action": r.action,
        "roots_found": Value::Null,
        "grad_norm": r.grad_norm,
        "iters": r.iters,
        "newton_iters": r.newton_iters,
        "saddle_escapes": r.saddle_escapes,
        "converged": r.converged,
        "init": r.init,
        "d_nu": l.d_nu(),
    })
}

fn write_grid(art: &mut Artifacts, name: &str, grid: &PathGrid) -> Result<(), Failure> {
    let v = grid_velocity(grid);
    art.write_with(name, |w| write_path_csv(w, &grid.times(), grid.values(), &v))
}

fn problem(a: &ProblemArgs, method: Method, dir: impl Fn(&ExperimentConfig) -> PathBuf) -> Result<Value, Failure> {
    let cfg = a.experiment(method)?;
    let l = cfg.lagrangian()?;
    let mut art = Artifacts::create(&dir(&cfg))?;
    record_problem(&mut art, &cfg, method)?;
    let existence = check_theorem51(&l, None, None);
    let b = &cfg.boundary;
    let json_only = cfg.output.format == Format::Json;
    let mut summary = match method {
        Method::Shoot => {
            let sol = shoot(&bvp_problem(&cfg, &l)?)?;
            let mut s = shoot_summary(&sol, &l);
            if json_only {
                s["path"] = json!({ "t": sol.path.t, "z": sol.path.z, "zdot": sol.path.zdot });
            } else {
                art.write_with("path.csv", |w| write_path_csv(w, &sol.path.t, &sol.path.z, &sol.path.zdot))?;
            }
            s
        }
        Method::Minimize => {
            let r = minimize_action(&l, b.x0, b.x1, b.s, b.u, &cfg.minimize_config())?;
            let mut s = minimize_summary(&r, &l);
            if json_only {
                s["path"] = json!({ "t": r.grid.times(), "z": r.grid.values() });
            } else {
                write_grid(&mut art, "path.csv", &r.grid)?;
            }
            s
        }
        Method::Both => {
            let c = compare_methods(&l, b.x0, b.x1, b.s, b.u, &cfg.minimize_config())?;
            if !json_only {
                write_grid(&mut art, "path_minimize.csv", &c.minimize.grid)?;
            }
            json!({
                "method": "both",
                "shoot": { "v0": c.shoot_v0, "roots_found": c.shoot_roots, "action": c.shoot_action },
                "minimize": minimize_summary(&c.minimize, &l),
                "max_discrepancy": c.max_discrepancy,
                "action_discrepancy": c.action_discrepancy,
                "action_rel_discrepancy": c.action_rel_discrepancy,
                "multi_minimum": c.multi_minimum,
                "root_policy": ROOT_POLICY,
            })
        }
    };
    summary["existence_check"] = to_value(&existence);
    let file = match method {
        Method::Shoot => "solve.json",
        Method::Minimize => "minimize.json",
        Method::Both => "compare.json",
    };
    art.write_json(file, &summary)?;
    let not_converged = summary["converged"] == json!(false);
    let dir = art.finish(file.trim_end_matches(".json"), to_value(&cfg.resolved(method)))?;
    summary["output_dir"] = json!(dir);
    if not_converged {
        return Err(Failure::numerical("not-converged", "minimization stopped before reaching grad_tol")
            .with_details(summary));
    }
    Ok(summary)
}

fn outcome_label(o: Outcome) -> Value {
    to_value(&o)
}

fn write_sweep(art: &mut Artifacts, name: &str, sweep: &ExistenceSweep) -> Result<(), Failure> {
    art.write_with(name, |w| {
        use std::io::Write;
        writeln!(w, "{SWEEP_D_HEADER}")?;
        for (d, o) in &sweep.points {
            writeln!(w, "{},{}", d, outcome_label(*o).as_str().unwrap_or("?"))?;
        }
        Ok(())
    })
}

fn sweep_json(sweep: &ExistenceSweep) -> Value {
    json!({
        "flips": sweep.flips,
        "resolution": sweep.resolution,
        "interval": sweep.interval,
        "points": sweep.points.len(),
        "solved": sweep.points.iter().filter(|p| p.1.is_solved()).count(),
    })
}

fn sweep_d_cmd(a: &SweepDArgs, dir: impl Fn(&ExperimentConfig) -> PathBuf) -> Result<Value, Failure> {
    let cfg = a.problem.experiment(Method::Shoot)?;
    if !(a.d_step > 0.0 && a.d_min <= a.d_max && a.resolution > 0.0) {
        return Err(Failure::config("need d_min <= d_max and positive d_step and resolution"));
    }
    let grid = parse_grid(&format!("{}:{}:{}", a.d_min, a.d_max, a.d_step))?;
    let l = cfg.lagrangian()?;
    let mut art = Artifacts::create(&dir(&cfg))?;
    record_problem(&mut art, &cfg, Method::Shoot)?;
    art.tolerance("sweep_resolution", a.resolution);
    let sweep = sweep_d_with_resolution(&bvp_problem(&cfg, &l)?, &grid, a.resolution)?;
    write_sweep(&mut art, "sweep_d.csv", &sweep)?;
    let mut summary = sweep_json(&sweep);
    art.write_json("sweep_d.json", &summary)?;
    let inputs = json!({ "experiment": cfg.resolved(Method::Shoot), "sweep": a });
    summary["output_dir"] = json!(art.finish("sweep-d", inputs)?);
    Ok(summary)
}

fn sweep_ab_cmd(a: &SweepAbArgs, dir: impl Fn(&ExperimentConfig) -> PathBuf) -> Result<Value, Failure> {
    let cfg = a.problem.experiment(Method::Shoot)?;
    let alphas = parse_grid(&a.alphas)?;
    let betas = parse_grid(&a.betas)?;
    let l = cfg.lagrangian()?;
    let mut art = Artifacts::create(&dir(&cfg))?;
    record_problem(&mut art, &cfg, Method::Shoot)?;
    art.tolerance("sweep_resolution", ompath::bvp::SWEEP_RESOLUTION);
    art.note("pixels are classified by membership of d_nu(alpha, beta) in the solvable d-interval containing 0");
    let raster = sweep_alpha_beta(&bvp_problem(&cfg, &l)?, &alphas, &betas)?;
    art.write_text("raster.csv", &raster.to_csv())?;
    write_sweep(&mut art, "sweep_d.csv", &raster.sweep)?;
    let mut summary = sweep_json(&raster.sweep);
    summary["pixels"] = json!(raster.pixels.len());
    summary["solvable_pixels"] = json!(raster.pixels.iter().filter(|p| p.solvable).count());
    art.write_json("sweep_ab.json", &summary)?;
    let inputs = json!({ "experiment": cfg.resolved(Method::Shoot), "alphas": alphas, "betas": betas });
    summary["output_dir"] = json!(art.finish("sweep-ab", inputs)?);
    Ok(summary)
}

fn closed_form(a: &ClosedFormArgs, dir: &Path) -> Result<Value, Failure> {
    let cf = linear_closed_form(a.x0, a.x1, a.horizon, a.d)?;
    let grid = cf.grid(a.n)?;
    let zdot: Vec<f64> = grid.times().iter().map(|&t| cf.zdot(t)).collect();
    let mut art = Artifacts::create(dir)?;
    art.write_with("closed_form.csv", |w| write_path_csv(w, &grid.times(), grid.values(), &zdot))?;
    let mut summary = json!({ "c1": cf.c1, "c2": cf.c2, "x0": a.x0, "x1": a.x1, "T": a.horizon, "d": a.d, "n": a.n });
    art.write_json("closed_form.json", &summary)?;
    summary["output_dir"] = json!(art.finish("closed-form", to_value(a))?);
    Ok(summary)
}

fn sde_spec(a: &SdeArgs, x0: f64, s: f64, u: f64) -> Result<SdeSpec, Failure> {
    let measure = match (a.alpha, a.beta) {
        (Some(al), Some(be)) => Some(StableJumpMeasure::new(al, be)?),
        _ => None,
    };
    let mut spec = SdeSpec::new(DriftModel::parse(&a.drift)?, a.c, measure, x0, s, u);
    if let Some(h) = a.em_step {
        spec.em_step = h;
    }
    spec.delta = a.delta;
    spec.compensation = match a.compensation {
        CompensationArg::Full => Compensation::FullBand,
        CompensationArg::Simulated => Compensation::SimulatedBand,
    };
    spec.validate()?;
    Ok(spec)
}

fn record_sde(art: &mut Artifacts, spec: &SdeSpec, seed: u64) {
    art.seed(seed);
    art.tolerance("em_step", spec.em_step);
    art.tolerance("delta", spec.delta);
    art.tolerance("guard", spec.guard);
}

fn simulate(a: &SimulateArgs, dir: &Path) -> Result<Value, Failure> {
    let spec = sde_spec(&a.sde, a.x0, a.s, a.s + a.horizon)?;
    let path = simulate_path(&spec, a.sde.seed)?;
    let mut art = Artifacts::create(dir)?;
    record_sde(&mut art, &spec, a.sde.seed);
    art.write_with("sample.csv", |w| write_sample_csv(w, &path))?;
    let mut summary = json!({
        "seed": a.sde.seed,
        "steps": path.n(),
        "em_step": path.dt(),
        "d_nu": spec.d_nu(),
        "compensation": spec.compensation,
        "x_end": path.values()[path.n()],
    });
    art.write_json("simulate.json", &summary)?;
    summary["output_dir"] = json!(art.finish("simulate", to_value(a))?);
    Ok(summary)
}

fn tube_prob(cli: &Cli, a: &TubeProbArgs) -> Result<Value, Failure> {
    let reference = read_grid(&a.path)?;
    let spec = sde_spec(&a.sde, reference.values()[0], reference.s(), reference.u())?;
    let est = tube_probability(&spec, &reference, a.eps, a.npaths, a.sde.seed)?;
    let action = om_action(&spec.lagrangian()?, &reference)?;
    let (lo, hi) = est.ci95();
    let summary = json!({
        "epsilon": est.epsilon,
        "n_paths": est.n_paths,
        "hits": est.hits,
        "diverged": est.diverged,
        "p_hat": est.p_hat,
        "ci95_halfwidth": est.ci95_halfwidth,
        "ci95": [lo, hi],
        "action": action,
        "seed": a.sde.seed,
        "em_step": spec.em_step,
        "norm": "sup over reference grid nodes",
    });
    save_query(cli, "tube-prob", a, &summary)
}

fn rank(cli: &Cli, a: &RankArgs) -> Result<Value, Failure> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(&a.paths)
        .map_err(|e| Failure::config(format!("cannot list {}: {e}", a.paths.display())))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "csv"))
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(Failure::config(format!("no .csv files in {}", a.paths.display())));
    }
    let candidates = files.iter().map(|f| read_grid(f)).collect::<Result<Vec<_>, _>>()?;
    let first = &candidates[0];
    let spec = sde_spec(&a.sde, first.values()[0], first.s(), first.u())?;
    let report = rank_paths(&spec, &candidates, a.eps, a.npaths, a.sde.seed)?;
    let entries: Vec<Value> = report
        .entries
        .iter()
        .map(|e| {
            json!({
                "file": files[e.index].file_name().map(|n| n.to_string_lossy().into_owned()),
                "action": e.action,
                "p_hat": e.estimate.p_hat,
                "ci95_halfwidth": e.estimate.ci95_halfwidth,
                "hits": e.estimate.hits,
            })
        })
        .collect();
    let conclusive = report.entries.iter().all(|e| e.estimate.hits >= MIN_HITS);
    let summary = json!({
        "spearman": report.spearman,
        "conclusive": conclusive,
        "min_hits_required": MIN_HITS,
        "epsilon": a.eps,
        "n_paths": a.npaths,
        "seed": a.sde.seed,
        "entries": entries,
    });
    save_query(cli, "rank", a, &summary)
}
