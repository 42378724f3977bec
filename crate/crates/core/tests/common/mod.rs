#![allow(dead_code)]

use ompath::levy::StableJumpMeasure;
use ompath::om::{DriftModel, OmLagrangian};

pub fn lag(src: &str, c: f64, d: f64) -> OmLagrangian {
    OmLagrangian::new(DriftModel::parse(src).unwrap(), c, d).unwrap()
}

/// Composite 5-point Gauss-Legendre on `panels` equal panels.
pub fn gauss_legendre(f: &dyn Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    const X: [f64; 5] = [
        0.0,
        0.538_469_310_105_683_1,
        -0.538_469_310_105_683_1,
        0.906_179_845_938_664,
        -0.906_179_845_938_664,
    ];
    const W: [f64; 5] = [
        0.568_888_888_888_888_9,
        0.478_628_670_499_366_5,
        0.478_628_670_499_366_5,
        0.236_926_885_056_189_1,
        0.236_926_885_056_189_1,
    ];
    let w = (b - a) / panels as f64;
    (0..panels)
        .map(|k| {
            let mid = a + (k as f64 + 0.5) * w;
            X.iter().zip(W).map(|(x, wt)| wt * f(mid + 0.5 * w * x)).sum::<f64>() * 0.5 * w
        })
        .sum()
}

/// `∫_{|ξ|<1} ξ ν(dξ)` by quadrature of the density. With `ξ = e^{-y}` each
/// side becomes an integral over `y ≥ 0` of a decaying exponential; beyond
/// `y = 300` the tail is closed off by extrapolating the numerically observed
/// log-slope.
pub fn drift_constant_by_quadrature(m: &StableJumpMeasure) -> f64 {
    const Y_MAX: f64 = 300.0;
    let side = |sign: f64| {
        let g = move |y: f64| {
            let xi = (-y).exp();
            sign * (m.density(sign * xi) * xi) * xi
        };
        let body = gauss_legendre(&g, 0.0, Y_MAX, 6000);
        let (g0, g1) = (g(Y_MAX), g(Y_MAX - 1.0));
        let rate = (g1 / g0).ln();
        body + if g0 == 0.0 { 0.0 } else { g0 / rate }
    };
    side(1.0) + side(-1.0)
}

/// `ν({lo ≤ |ξ| < hi})` by quadrature of the density.
pub fn mass_by_quadrature(m: &StableJumpMeasure, lo: f64, hi: f64) -> f64 {
    let g = |y: f64| {
        let xi = (-y).exp();
        (m.density(xi) + m.density(-xi)) * xi
    };
    gauss_legendre(&g, -hi.ln(), -lo.ln(), 400)
}
