mod common;

use common::lag;
use ompath::elode::{assemble_el, integrate_ivp};
use ompath::oracle::{el_residual, linear_closed_form, OracleError};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn det(a: f64, b: f64, c: f64, d: f64) -> f64 {
    a * d - b * c
}

/// Cramer's rule on the boundary system written with the jump term moved to
/// the right-hand side.
fn determinant_constants(x0: f64, x1: f64, t: f64, d: f64) -> (f64, f64) {
    let (ep, em) = (t.exp(), (-t).exp());
    let r0 = x0 + d - 0.5 * d - 0.5 * d;
    let r1 = x1 + d - 0.5 * ep * d - 0.5 * em * d;
    let den = det(1.0, 1.0, ep, em);
    (det(r0, 1.0, r1, em) / den, det(1.0, r0, ep, r1) / den)
}

#[test]
fn constants_match_determinant_formulas() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..200 {
        let (x0, x1) = (rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0));
        let t = rng.random_range(0.1..4.0);
        let d = rng.random_range(-3.0..3.0);
        let cf = linear_closed_form(x0, x1, t, d).unwrap();
        let (c1, c2) = determinant_constants(x0, x1, t, d);
        assert!((cf.c1 - c1).abs() <= 1e-12 * (1.0 + c1.abs()));
        assert!((cf.c2 - c2).abs() <= 1e-12 * (1.0 + c2.abs()));
    }
}

#[test]
fn boundary_values_are_exact() {
    let cf = linear_closed_form(3.0, 4.0, 1.0, 1.0).unwrap();
    assert!((cf.z(0.0) - 3.0).abs() < 1e-14);
    assert!((cf.z(1.0) - 4.0).abs() < 1e-14);
    let g = cf.grid(50).unwrap();
    assert_eq!(g.values()[0], 3.0);
    assert_eq!(g.values()[50], 4.0);
}

#[test]
fn closed_form_solves_the_ode() {
    let cf = linear_closed_form(-1.0, 2.5, 2.0, 0.6).unwrap();
    let h = 1e-4;
    for k in 1..20 {
        let t = k as f64 * 0.1;
        let zdd = (cf.zdot(t + h) - cf.zdot(t - h)) / (2.0 * h);
        assert!((zdd - (cf.z(t) + 0.6)).abs() <= 1e-7);
    }
    let l = lag("-z", 1.0, 0.6);
    assert!(el_residual(&l, &cf.grid(2000).unwrap()).unwrap() <= 1e-6);
}

#[test]
fn closed_form_agrees_with_integrator() {
    let cf = linear_closed_form(3.0, 4.0, 1.0, 1.0).unwrap();
    let sol = integrate_ivp(&assemble_el(&lag("-z", 1.0, 1.0)), 3.0, cf.zdot(0.0), 0.0, 1.0, 1e-4).unwrap();
    for (t, z) in sol.t.iter().zip(&sol.z) {
        assert!((z - cf.z(*t)).abs() <= 1e-9);
    }
}

#[test]
fn rejects_degenerate_input() {
    assert!(matches!(linear_closed_form(0.0, 1.0, 0.0, 0.0), Err(OracleError::Horizon(_))));
    let cf = linear_closed_form(0.0, 1.0, 1.0, 0.0).unwrap();
    assert!(matches!(el_residual(&lag("-z", 1.0, 0.0), &cf.grid(4).unwrap()), Err(OracleError::TooFewIntervals(4))));
}
