//! Canned experiments: CSV data, a summary and a gnuplot script per figure.

use std::path::Path;

use ompath::bvp::{shoot, sweep_alpha_beta, sweep_d_with_resolution, BvpProblem, SWEEP_RESOLUTION};
use ompath::elode::assemble_el;
use ompath::io::write_path_csv;
use ompath::om::{DriftModel, OmLagrangian};
use ompath::oracle::linear_closed_form;
use serde_json::{json, Value};

use crate::args::{parse_grid, Figure};
use crate::failure::Failure;
use crate::output::Artifacts;

const LINEAR: &str = "-z";
const DOUBLE_WELL: &str = "z - z^3";
const FIG2_HORIZONS: [f64; 4] = [1.0, 2.0, 2.3, 6.0];
const FIG3_HORIZONS: [f64; 6] = [1.0, 2.0, 2.3, 6.0, 9.0, 20.0];

pub fn run(figure: Figure, dir: &Path) -> Result<Value, Failure> {
    let mut art = Artifacts::create(dir)?;
    let (name, mut summary) = match figure {
        Figure::Fig1 => ("fig1", fig1(&mut art)?),
        Figure::Fig2 => ("fig2", fig2(&mut art)?),
        Figure::Fig3 => ("fig3", fig3(&mut art)?),
    };
    art.write_json(&format!("{name}.json"), &summary)?;
    summary["output_dir"] = json!(art.finish(&format!("reproduce {name}"), json!({ "figure": name }))?);
    Ok(summary)
}

fn problem(drift: &str, d: f64, x0: f64, x1: f64, t: f64, h: f64) -> Result<BvpProblem, Failure> {
    let l = OmLagrangian::new(DriftModel::parse(drift)?, 1.0, d)?;
    Ok(BvpProblem::new(assemble_el(&l), x0, x1, 0.0, t)?.with_h(h)?)
}

/// Label used in file names, e.g. `-0.5` becomes `m0.5`.
fn tag(x: f64) -> String {
    let s = format!("{x}");
    s.strip_prefix('-').map_or(s.clone(), |r| format!("m{r}"))
}

fn fig1(art: &mut Artifacts) -> Result<Value, Failure> {
    let (x0, x1, t, h) = (3.0, 4.0, 1.0, 1e-3);
    art.tolerance("h", h);
    art.tolerance("tol_boundary", ompath::bvp::DEFAULT_TOL_BOUNDARY);

    let sol = shoot(&problem(LINEAR, 1.0, x0, x1, t, h)?)?;
    let exact = linear_closed_form(x0, x1, t, 1.0)?;
    let ez: Vec<f64> = sol.path.t.iter().map(|&s| exact.z(s)).collect();
    let ev: Vec<f64> = sol.path.t.iter().map(|&s| exact.zdot(s)).collect();
    let max_err = sol.path.z.iter().zip(&ez).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    art.write_with("fig1a_numerical.csv", |w| write_path_csv(w, &sol.path.t, &sol.path.z, &sol.path.zdot))?;
    art.write_with("fig1a_exact.csv", |w| write_path_csv(w, &sol.path.t, &ez, &ev))?;

    let mut panel_b = Vec::new();
    let mut plot_b = Vec::new();
    for d in [-1.0, -0.5, 0.0, 0.5, 1.0] {
        let s = shoot(&problem(LINEAR, d, x0, x1, t, h)?)?;
        let file = format!("fig1b_d{}.csv", tag(d));
        art.write_with(&file, |w| write_path_csv(w, &s.path.t, &s.path.z, &s.path.zdot))?;
        plot_b.push(format!("'{file}' using 1:2 with lines title 'd = {d}'"));
        panel_b.push(json!({ "d": d, "v0": s.v0, "action": s.action, "file": file }));
    }
    art.write_text(
        "fig1.gp",
        &format!(
            "set datafile separator ','\nset key autotitle columnhead\nset xlabel 't'\nset ylabel 'z'\n\
             set multiplot layout 1,2\n\
             plot 'fig1a_numerical.csv' using 1:2 with lines title 'shooting', \
             'fig1a_exact.csv' using 1:2 with points pointinterval 50 title 'exact'\n\
             plot {}\nunset multiplot\n",
            plot_b.join(", ")
        ),
    )?;
    Ok(json!({
        "figure": "fig1",
        "drift": LINEAR,
        "boundary": { "x0": x0, "x1": x1, "T": t },
        "h": h,
        "panel_a": { "d": 1.0, "v0": sol.v0, "max_abs_error": max_err, "c1": exact.c1, "c2": exact.c2 },
        "panel_b": panel_b,
    }))
}

fn fig2(art: &mut Artifacts) -> Result<Value, Failure> {
    let d_grid = parse_grid("-3:3:0.05")?;
    let shown = parse_grid("-1.5:1.5:0.5")?;
    art.tolerance("sweep_resolution", SWEEP_RESOLUTION);
    art.tolerance("tol_boundary", ompath::bvp::DEFAULT_TOL_BOUNDARY);
    let mut panels = Vec::new();
    let mut gp = String::from("set datafile separator ','\nset xlabel 't'\nset ylabel 'z'\nset multiplot layout 2,2\n");
    for t in FIG2_HORIZONS {
        let h = t / 1e4;
        let template = problem(DOUBLE_WELL, 0.0, -1.0, 1.0, t, h)?;
        let sweep = sweep_d_with_resolution(&template, &d_grid, SWEEP_RESOLUTION)?;
        art.write_with(&format!("fig2_T{t}_sweep_d.csv"), |w| {
            use std::io::Write;
            writeln!(w, "{}", ompath::io::SWEEP_D_HEADER)?;
            for (d, o) in &sweep.points {
                writeln!(w, "{d},{}", serde_json::to_value(o).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default())?;
            }
            Ok(())
        })?;
        let mut paths = Vec::new();
        let mut plots = Vec::new();
        for &d in &shown {
            let Ok(sol) = shoot(&template.with_d_nu(d)?) else { continue };
            let file = format!("fig2_T{t}_d{}.csv", tag(d));
            art.write_with(&file, |w| write_path_csv(w, &sol.path.t, &sol.path.z, &sol.path.zdot))?;
            plots.push(format!("'{file}' using 1:2 with lines title 'd = {d}'"));
            paths.push(json!({ "d": d, "v0": sol.v0, "action": sol.action, "roots_found": sol.multiplicity_note }));
        }
        gp += &format!("set title 'T = {t}'\nplot {}\n", plots.join(", "));
        panels.push(json!({
            "T": t,
            "h": h,
            "flips": sweep.flips,
            "interval": sweep.interval,
            "paths": paths,
        }));
    }
    gp += "unset multiplot\n";
    art.write_text("fig2.gp", &gp)?;
    Ok(json!({ "figure": "fig2", "drift": DOUBLE_WELL, "boundary": { "x0": -1.0, "x1": 1.0 }, "panels": panels }))
}

fn fig3(art: &mut Artifacts) -> Result<Value, Failure> {
    let alphas = parse_grid("0.05:0.95:0.05")?;
    let betas = parse_grid("-1:1:0.1")?;
    art.tolerance("sweep_resolution", SWEEP_RESOLUTION);
    art.tolerance("raster_d_step", ompath::bvp::RASTER_D_STEP);
    art.note("pixels are classified by membership of d_nu(alpha, beta) in the solvable d-interval containing 0");
    let mut panels = Vec::new();
    let mut gp = String::from(
        "set datafile separator ','\nset xlabel 'alpha'\nset ylabel 'beta'\nset palette maxcolors 2\n\
         set multiplot layout 2,3\n",
    );
    for t in FIG3_HORIZONS {
        let template = problem(DOUBLE_WELL, 0.0, -1.0, 1.0, t, t / 1e4)?;
        let raster = sweep_alpha_beta(&template, &alphas, &betas)?;
        let file = format!("fig3_T{t}_raster.csv");
        art.write_text(&file, &raster.to_csv())?;
        gp += &format!("set title 'T = {t}'\nplot '{file}' every ::1 using 1:2:3 with image notitle\n");
        panels.push(json!({
            "T": t,
            "solvable_pixels": raster.pixels.iter().filter(|p| p.solvable).count(),
            "pixels": raster.pixels.len(),
            "interval": raster.sweep.interval,
            "flips": raster.sweep.flips,
        }));
    }
    gp += "unset multiplot\n";
    art.write_text("fig3.gp", &gp)?;
    Ok(json!({ "figure": "fig3", "drift": DOUBLE_WELL, "boundary": { "x0": -1.0, "x1": 1.0 }, "panels": panels }))
}
