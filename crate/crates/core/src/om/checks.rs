//! Advisory checks for the existence and local-minimizer conditions.
//!
//! For polynomial drifts the infimum of `f'` is computed symbolically from the
//! real roots of `f''`; for other drifts it is sampled, which cannot prove a
//! global bound.

use super::OmLagrangian;
use serde::Serialize;

const SAMPLES: usize = 10_001;
const DEFAULT_SAMPLE_RANGE: (f64, f64) = (-10.0, 10.0);

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DerivativeCheck {
    /// Infimum of `f'` found on the range; `None` when unbounded below.
    pub observed_min: Option<f64>,
    /// `None` means the whole real line.
    pub range: Option<(f64, f64)>,
    pub symbolic: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Theorem51Report {
    /// The bound `M` actually used, if any could be determined.
    pub m: Option<f64>,
    pub derivative: DerivativeCheck,
    pub derivative_bounded_below: bool,
    pub jump_condition: bool,
    pub globally_lipschitz: bool,
    pub existence_guaranteed: bool,
    pub advisory: bool,
}

/// Checks `f' ≥ M`, `d_ν² ≥ M c²` and global Lipschitz continuity of `f`.
///
/// `M` is taken from `m`, else from the drift's hint, else from the observed
/// infimum of `f'`. `range` restricts the derivative check; without it
/// polynomial drifts are checked on the whole line and other drifts are
/// sampled on `[-10, 10]`.
pub fn check_theorem51(
    l: &OmLagrangian,
    m: Option<f64>,
    range: Option<(f64, f64)>,
) -> Theorem51Report {
    let drift = l.drift();
    let derivative = match drift.polynomial() {
        Some(p) => {
            let fp = p.derivative();
            let observed_min = match range {
                None => fp.global_min(),
                Some((lo, hi)) => {
                    let mut pts = fp.derivative().real_roots_in(lo, hi);
                    pts.extend([lo, hi]);
                    pts.into_iter().map(|x| fp.eval(x)).reduce(f64::min)
                }
            };
            DerivativeCheck { observed_min, range, symbolic: true }
        }
        None => {
            let (lo, hi) = range.unwrap_or(DEFAULT_SAMPLE_RANGE);
            let observed_min = (0..SAMPLES)
                .map(|i| lo + (hi - lo) * i as f64 / (SAMPLES - 1) as f64)
                .map(|z| drift.fp(z).unwrap_or(f64::NEG_INFINITY))
                .reduce(f64::min)
                .filter(|v| v.is_finite());
            DerivativeCheck { observed_min, range: Some((lo, hi)), symbolic: false }
        }
    };
    let m = m.or(drift.derivative_lower_bound_hint).or(derivative.observed_min);
    let derivative_bounded_below = match (m, derivative.observed_min) {
        (Some(m), Some(min)) => min >= m - 1e-12 * (1.0 + m.abs()),
        _ => false,
    };
    let c2 = l.c() * l.c();
    let jump_condition = m.map_or(false, |m| l.d_nu() * l.d_nu() >= m * c2);
    let globally_lipschitz = match drift.polynomial() {
        Some(p) => p.degree() <= 1,
        None => drift.lipschitz_hint.is_some(),
    };
    Theorem51Report {
        m,
        advisory: !derivative.symbolic,
        derivative,
        derivative_bounded_below,
        jump_condition,
        globally_lipschitz,
        existence_guaranteed: derivative_bounded_below && jump_condition && globally_lipschitz,
    }
}

/// Rectangle in the `(z, ż)` plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Region {
    pub z: (f64, f64),
    pub zdot: (f64, f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvexityViolation {
    pub z: f64,
    pub zdot: f64,
    pub min_eigenvalue: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvexityReport {
    pub convex_in_zdot: bool,
    /// `∂²OM/∂ż² = 2/c²`.
    pub zdot_curvature: f64,
    pub jointly_convex: bool,
    pub first_violation: Option<ConvexityViolation>,
    pub samples: usize,
}

/// Samples the 2×2 Hessian of `OM` on a 41×41 grid over `region`.
pub fn check_convexity(l: &OmLagrangian, region: Region) -> ConvexityReport {
    const N: usize = 41;
    let node = |(lo, hi): (f64, f64), i: usize| lo + (hi - lo) * i as f64 / (N - 1) as f64;
    let mut first_violation = None;
    let mut samples = 0;
    'outer: for i in 0..N {
        let z = node(region.z, i);
        for j in 0..N {
            let zdot = node(region.zdot, j);
            samples += 1;
            let lam = match l.second_partials(z, zdot) {
                Ok((a, b, c)) => {
                    let mean = 0.5 * (a + c);
                    let rad = (0.25 * (a - c) * (a - c) + b * b).sqrt();
                    let scale = a.abs().max(b.abs()).max(c.abs());
                    let lam = mean - rad;
                    if lam >= -1e-12 * scale {
                        continue;
                    }
                    lam
                }
                Err(_) => f64::NAN,
            };
            first_violation = Some(ConvexityViolation { z, zdot, min_eigenvalue: lam });
            break 'outer;
        }
    }
    let zdot_curvature = 2.0 / (l.c() * l.c());
    ConvexityReport {
        convex_in_zdot: zdot_curvature > 0.0,
        zdot_curvature,
        jointly_convex: first_violation.is_none(),
        first_violation,
        samples,
    }
}
