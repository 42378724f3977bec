mod common;

use common::lag;
use ompath::bvp::{classify, shoot, sweep_alpha_beta, sweep_d, BvpProblem, Outcome};
use ompath::elode::assemble_el;
use ompath::oracle::{el_residual, linear_closed_form};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn problem(src: &str, d: f64, x0: f64, x1: f64, t: f64) -> BvpProblem {
    BvpProblem::new(assemble_el(&lag(src, 1.0, d)), x0, x1, 0.0, t).unwrap()
}

fn double_well(d: f64, t: f64) -> BvpProblem {
    problem("z - z^3", d, -1.0, 1.0, t)
}

/// Checks that a returned path is a genuine solution: both boundary values and
/// the discrete EL equation hold.
fn assert_genuine(p: &BvpProblem, src: &str, d: f64) {
    let sol = shoot(p).unwrap();
    let (_, z_end, _) = sol.path.last();
    assert_eq!(sol.path.z[0], p.x0);
    assert!((z_end - p.x1).abs() <= p.tol_boundary);
    let grid = sol.path.to_grid().unwrap();
    let coarse = grid.subsample(1000).unwrap();
    assert!(el_residual(&lag(src, 1.0, d), &coarse).unwrap() < 1e-4);
}

#[test]
fn linear_example_matches_closed_form() {
    let p = problem("-z", 1.0, 3.0, 4.0, 1.0).with_h(1e-3).unwrap();
    let sol = shoot(&p).unwrap();
    let exact = linear_closed_form(3.0, 4.0, 1.0, 1.0).unwrap();
    let err = sol
        .path
        .t
        .iter()
        .zip(&sol.path.z)
        .map(|(t, z)| (z - exact.z(*t)).abs())
        .fold(0.0, f64::max);
    assert!(err <= 1e-6, "max error {err}");
    assert!((sol.v0 - exact.zdot(0.0)).abs() <= 1e-6);
    assert_eq!(sol.multiplicity_note, 1);
}

#[test]
fn random_linear_problems_match_closed_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..20 {
        let (x0, x1) = (rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
        let t = rng.random_range(0.5..3.0);
        let d = rng.random_range(-2.0..2.0);
        let sol = shoot(&problem("-z", d, x0, x1, t).with_h(1e-3).unwrap()).unwrap();
        let exact = linear_closed_form(x0, x1, t, d).unwrap();
        for (s, z) in sol.path.t.iter().zip(&sol.path.z) {
            assert!((z - exact.z(*s)).abs() <= 1e-6 * (1.0 + z.abs()), "x0 {x0} x1 {x1} T {t} d {d}");
        }
    }
}

#[test]
fn linear_problem_is_solvable_for_every_d() {
    let template = problem("-z", 0.0, 3.0, 4.0, 1.0).with_h(1e-2).unwrap();
    let grid: Vec<f64> = (-20..=20).map(|k| k as f64 * 0.25).collect();
    let sweep = sweep_d(&template, &grid).unwrap();
    assert!(sweep.flips.is_empty());
    assert!(sweep.points.iter().all(|p| p.1 == Outcome::Solved));
    let interval = sweep.interval.unwrap();
    assert!(!interval.lo_bounded && !interval.hi_bounded);
}

#[test]
fn free_particle_moves_in_a_straight_line() {
    let sol = shoot(&problem("1.5", 0.3, 2.0, -1.0, 3.0)).unwrap();
    assert!((sol.v0 + 1.0).abs() < 1e-9);
    for (t, z) in sol.path.t.iter().zip(&sol.path.z) {
        assert!((z - (2.0 - t)).abs() < 1e-9);
    }
}

#[test]
fn double_well_two_unit_horizon_has_three_roots() {
    let sol = shoot(&double_well(0.0, 2.0)).unwrap();
    assert_eq!(sol.multiplicity_note, 3);
    let mut v: Vec<f64> = sol.roots.iter().map(|r| r.v0).collect();
    v.sort_by(f64::total_cmp);
    assert!((v[0] + 0.98622).abs() < 1e-4 && (v[1] + 0.31968).abs() < 1e-4 && (v[2] - 0.98622).abs() < 1e-4);
    // the selected root has the least action
    assert!(sol.roots.iter().all(|r| r.action >= sol.action - 1e-12 * sol.action.abs()));
    assert!((sol.action - 1.408994).abs() < 1e-5);
}

#[test]
fn returned_paths_are_genuine_solutions() {
    for (d, t) in [(0.0, 2.0), (0.9, 6.0), (1.7, 1.0), (-2.0, 1.0)] {
        assert_genuine(&double_well(d, t), "z - z^3", d);
    }
}

#[test]
fn shooting_is_deterministic() {
    let a = shoot(&double_well(0.4, 2.0)).unwrap();
    let b = shoot(&double_well(0.4, 2.0)).unwrap();
    assert_eq!(a.v0.to_bits(), b.v0.to_bits());
    assert_eq!(a.path, b.path);
}

#[test]
fn solvable_beyond_reference_lower_endpoint_for_two_unit_horizon() {
    // d = -1.6 lies outside the reference interval for T = 2, yet a root exists
    let p = double_well(-1.6, 2.0);
    let sol = shoot(&p).unwrap();
    assert!((sol.v0 - 2.5385).abs() < 1e-3);
    assert_genuine(&p, "z - z^3", -1.6);
}

#[test]
#[ignore = "reference result not reproduced: a verified root exists at d = -1.6, see solvable_beyond_reference_lower_endpoint_for_two_unit_horizon"]
fn reference_no_root_for_two_unit_horizon() {
    assert_eq!(classify(&double_well(-1.6, 2.0)).unwrap(), Outcome::NoRootInBracket);
}

#[test]
#[ignore = "reference intervals not reproduced: the T = 1 problem stays solvable across [-3, 3]"]
fn reference_interval_for_unit_horizon() {
    let grid: Vec<f64> = (-60..=60).map(|k| k as f64 * 0.05).collect();
    let i = sweep_d(&double_well(0.0, 1.0), &grid).unwrap().interval.unwrap();
    assert!((i.lo + 1.9407).abs() <= 0.05 && (i.hi - 1.6305).abs() <= 0.05);
}

#[test]
#[ignore = "reference intervals not reproduced: the T = 6 solvable set is fragmented"]
fn reference_interval_for_six_unit_horizon() {
    let grid: Vec<f64> = (-60..=60).map(|k| k as f64 * 0.05).collect();
    let i = sweep_d(&double_well(0.0, 6.0), &grid).unwrap().interval.unwrap();
    assert!((i.lo + 0.8899).abs() <= 0.05 && (i.hi - 0.3836).abs() <= 0.05);
}

#[test]
fn unit_horizon_roots_exist_outside_reference_interval() {
    for d in [1.7, -2.0] {
        let p = double_well(d, 1.0);
        assert_genuine(&p, "z - z^3", d);
    }
}

#[test]
fn raster_rows_and_columns() {
    let alphas = [0.3, 0.5, 0.7];
    let betas: Vec<f64> = (-4..=4).map(|k| k as f64 * 0.25).collect();
    let template = double_well(0.0, 2.0).with_h(2e-3).unwrap();
    let raster = sweep_alpha_beta(&template, &alphas, &betas).unwrap();
    let interval = raster.sweep.interval.unwrap();
    for ia in 0..alphas.len() {
        // β = 0 gives d_ν = 0, which is always in the interval around 0
        assert!(raster.pixel(ia, 4).solvable);
        assert_eq!(raster.pixel(ia, 4).d_nu, 0.0);
        let col: Vec<bool> = (0..betas.len()).map(|ib| raster.pixel(ia, ib).solvable).collect();
        let changes = col.windows(2).filter(|w| w[0] != w[1]).count();
        assert!(changes <= 2);
        // solvable pixels form one contiguous run
        let first = col.iter().position(|&s| s).unwrap();
        let last = col.iter().rposition(|&s| s).unwrap();
        assert!(col[first..=last].iter().all(|&s| s));
        for ib in 0..betas.len() {
            let p = raster.pixel(ia, ib);
            assert_eq!(p.solvable, interval.contains(p.d_nu));
        }
    }
    assert!(raster.to_csv().starts_with("alpha,beta,solvable\n"));
}
