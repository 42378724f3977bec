mod common;

use common::lag;
use ompath::bvp::{shoot, BvpProblem};
use ompath::elode::assemble_el;
use ompath::om::{om_action_gradient, PathGrid};
use ompath::oracle::linear_closed_form;
use ompath::varmin::{compare_methods, minimize_action, Init, MinimizeConfig};

#[test]
fn linear_minimizer_matches_closed_form() {
    let l = lag("-z", 1.0, 1.0);
    let r = minimize_action(&l, 3.0, 4.0, 0.0, 1.0, &MinimizeConfig::default()).unwrap();
    assert!(r.converged);
    let exact = linear_closed_form(3.0, 4.0, 1.0, 1.0).unwrap();
    let err = (0..=r.grid.n())
        .map(|i| (r.grid.values()[i] - exact.z(r.grid.t(i))).abs())
        .fold(0.0, f64::max);
    assert!(err <= 1e-4, "max error {err}");
}

#[test]
fn zero_drift_gives_straight_lines() {
    let l = lag("0", 1.0, 0.0);
    let r = minimize_action(&l, 2.0, 2.0, 0.0, 1.0, &MinimizeConfig::default()).unwrap();
    assert!(r.grid.values().iter().all(|v| (v - 2.0).abs() < 1e-12));
    let r = minimize_action(&l, -1.0, 3.0, 0.0, 2.0, &MinimizeConfig::default()).unwrap();
    for (i, v) in r.grid.values().iter().enumerate() {
        assert!((v - (-1.0 + 2.0 * r.grid.t(i))).abs() < 1e-10);
    }
    assert!((r.action - 8.0).abs() < 1e-10);
}

#[test]
fn double_well_action_agrees_with_shooting() {
    let l = lag("z - z^3", 1.0, 0.0);
    let r = minimize_action(&l, -1.0, 1.0, 0.0, 2.0, &MinimizeConfig::default()).unwrap();
    let shot = shoot(&BvpProblem::new(assemble_el(&l), -1.0, 1.0, 0.0, 2.0).unwrap()).unwrap();
    assert!((r.action - shot.action).abs() <= 1e-3 * shot.action.abs());
}

#[test]
fn converged_result_is_stationary() {
    for (src, d) in [("-z", 0.5), ("z - z^3", 0.3), ("sin(z)", -0.2)] {
        let l = lag(src, 1.0, d);
        let cfg = MinimizeConfig { n: 200, ..Default::default() };
        let r = minimize_action(&l, -1.0, 1.0, 0.0, 2.0, &cfg).unwrap();
        assert!(r.converged, "{src}");
        let g = om_action_gradient(&l, &r.grid).unwrap();
        let gmax = g.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(gmax <= cfg.grad_tol, "{src}: {gmax}");
        assert_eq!(gmax, r.grad_norm);
    }
}

#[test]
fn minimum_action_converges_at_second_order() {
    let l = lag("-z", 1.0, 1.0);
    let a = |n| minimize_action(&l, 3.0, 4.0, 0.0, 1.0, &MinimizeConfig { n, ..Default::default() }).unwrap().action;
    let (a1, a2, a3) = (a(200), a(400), a(800));
    let ratio = (a1 - a2) / (a2 - a3);
    assert!((3.0..=5.0).contains(&ratio), "ratio {ratio}");
}

#[test]
fn recovers_from_perturbed_start() {
    let l = lag("z - z^3", 1.0, 0.2);
    let base = minimize_action(&l, -1.0, 1.0, 0.0, 2.0, &MinimizeConfig::default()).unwrap();
    let start = PathGrid::from_fn(0.0, 2.0, 400, |t| {
        base.grid.interpolate(t) + 0.05 * (std::f64::consts::PI * t).sin()
    })
    .unwrap();
    let cfg = MinimizeConfig { init: Init::Supplied(start), ..Default::default() };
    let r = minimize_action(&l, -1.0, 1.0, 0.0, 2.0, &cfg).unwrap();
    assert_eq!(r.init, "supplied");
    assert!(r.grid.max_distance(&base.grid) <= 1e-3);
}

#[test]
fn method_comparison_on_examples() {
    let cfg = MinimizeConfig::default();
    let lin = compare_methods(&lag("-z", 1.0, 1.0), 3.0, 4.0, 0.0, 1.0, &cfg).unwrap();
    assert!(lin.max_discrepancy <= 1e-4);
    assert!(!lin.multi_minimum);
    assert_eq!(lin.shoot_roots, 1);

    let dw = compare_methods(&lag("z - z^3", 1.0, 0.0), -1.0, 1.0, 0.0, 2.0, &cfg).unwrap();
    assert!(dw.action_rel_discrepancy <= 1e-3);
    assert_eq!(dw.shoot_roots, 3);

    // the minimizer finds a path lingering near a well that shooting does not resolve
    let long = compare_methods(&lag("z - z^3", 1.0, 0.0), -1.0, 1.0, 0.0, 6.0, &cfg).unwrap();
    assert!(long.multi_minimum);
    assert!(long.minimize.action < long.shoot_action);
}
