//! Two-point boundary value problems for the EL equation, solved by shooting on
//! the initial velocity, and existence sweeps over the jump drift constant.
//!
//! The miss function is `m(v) = z(u; v) - x1`. Shots that leave the divergence
//! guard are assigned `±∞` by the sign of `z` at escape, so bracketing and
//! bisection stay well defined on the extended reals.

use crate::elode::{integrate_ivp, ElOde, IvpError, IvpSolution};
use crate::expr::EvalError;
use crate::levy::StableJumpMeasure;
use crate::om::{om_action_nodes, OmError};
use rayon::prelude::*;
use serde::Serialize;

pub const SCAN_NODES: usize = 256;
pub const MAX_DOUBLINGS: usize = 4;
pub const DEFAULT_BRACKET: (f64, f64) = (-50.0, 50.0);
pub const DEFAULT_TOL_BOUNDARY: f64 = 1e-8;
pub const BISECTION_TOL: f64 = 1e-12;
pub const DEFAULT_STEPS: f64 = 1e4;
pub const SWEEP_RESOLUTION: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BvpError {
    #[error("invalid problem: {0}")]
    Invalid(String),
    #[error("no root of the miss function in [{lo}, {hi}] (after bracket doubling)")]
    NoRootInBracket { lo: f64, hi: f64 },
    #[error("every shot in [{lo}, {hi}] diverged")]
    AllShotsDivergent { lo: f64, hi: f64 },
    #[error(transparent)]
    Domain(#[from] EvalError),
    #[error(transparent)]
    Ivp(IvpError),
    #[error(transparent)]
    Lagrangian(#[from] OmError),
}

impl From<IvpError> for BvpError {
    fn from(e: IvpError) -> Self {
        match e {
            IvpError::Domain(d) => BvpError::Domain(d),
            other => BvpError::Ivp(other),
        }
    }
}

#[derive(Debug, Clone)]
pub struct BvpProblem {
    pub ode: ElOde,
    pub x0: f64,
    pub x1: f64,
    pub s: f64,
    pub u: f64,
    pub shoot_bracket: (f64, f64),
    pub tol_boundary: f64,
    /// RK4 step.
    pub h: f64,
}

impl BvpProblem {
    /// Defaults: bracket `[-50, 50]`, `tol_boundary = 1e-8`, `h = (u - s)/1e4`.
    pub fn new(ode: ElOde, x0: f64, x1: f64, s: f64, u: f64) -> Result<Self, BvpError> {
        let p = BvpProblem {
            ode,
            x0,
            x1,
            s,
            u,
            shoot_bracket: DEFAULT_BRACKET,
            tol_boundary: DEFAULT_TOL_BOUNDARY,
            h: (u - s) / DEFAULT_STEPS,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_bracket(mut self, lo: f64, hi: f64) -> Result<Self, BvpError> {
        self.shoot_bracket = (lo, hi);
        self.validate()?;
        Ok(self)
    }

    pub fn with_h(mut self, h: f64) -> Result<Self, BvpError> {
        self.h = h;
        self.validate()?;
        Ok(self)
    }

    pub fn with_tol(mut self, tol: f64) -> Result<Self, BvpError> {
        self.tol_boundary = tol;
        self.validate()?;
        Ok(self)
    }

    /// Same boundary data for a different jump drift constant.
    pub fn with_d_nu(&self, d_nu: f64) -> Result<Self, BvpError> {
        Ok(BvpProblem { ode: self.ode.with_d_nu(d_nu)?, ..self.clone() })
    }

    fn validate(&self) -> Result<(), BvpError> {
        let finite = [self.x0, self.x1, self.s, self.u].iter().all(|v| v.is_finite());
        if !finite {
            return Err(BvpError::Invalid("boundary data must be finite".into()));
        }
        if !(self.s < self.u) {
            return Err(BvpError::Invalid(format!("need s < u, got [{}, {}]", self.s, self.u)));
        }
        let (lo, hi) = self.shoot_bracket;
        if !(lo < hi && lo.is_finite() && hi.is_finite()) {
            return Err(BvpError::Invalid(format!("need v_lo < v_hi, got [{lo}, {hi}]")));
        }
        if !(self.tol_boundary > 0.0) {
            return Err(BvpError::Invalid("tol_boundary must be positive".into()));
        }
        if !(self.h > 0.0 && self.h.is_finite()) {
            return Err(BvpError::Invalid(format!("step h = {} must be positive", self.h)));
        }
        Ok(())
    }

    /// `z(u; v) - x1`, or `±∞` for divergent shots.
    pub fn miss(&self, v: f64) -> Result<f64, BvpError> {
        match self.ode.end_state(self.x0, v, self.s, self.u, self.h) {
            Ok((z, _)) => Ok(z - self.x1),
            Err(IvpError::Divergence { z, .. }) => Ok(if z >= 0.0 { f64::INFINITY } else { f64::NEG_INFINITY }),
            Err(e) => Err(e.into()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Root {
    pub v0: f64,
    pub residual: f64,
    pub action: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BvpSolution {
    pub path: IvpSolution,
    pub v0: f64,
    pub residual: f64,
    pub action: f64,
    /// Every accepted root, in increasing `v0`.
    pub roots: Vec<Root>,
    /// Number of distinct roots found in the bracket.
    pub multiplicity_note: usize,
    pub bracket: (f64, f64),
}

fn sign(m: f64) -> i8 {
    if m > 0.0 {
        1
    } else if m < 0.0 {
        -1
    } else {
        0
    }
}

/// Bisection to `BISECTION_TOL` (relative to `max(1, |v|)`), continued while
/// the miss still exceeds the boundary tolerance, then secant polish.
fn refine(p: &BvpProblem, mut a: f64, mut ma: f64, mut b: f64, mut mb: f64) -> Result<(f64, f64), BvpError> {
    let mut best = if ma.abs() <= mb.abs() { (a, ma) } else { (b, mb) };
    for _ in 0..400 {
        if ma == 0.0 {
            return Ok((a, 0.0));
        }
        if mb == 0.0 {
            return Ok((b, 0.0));
        }
        let width = b - a;
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        if width <= BISECTION_TOL * mid.abs().max(1.0) && best.1.abs() <= p.tol_boundary {
            break;
        }
        let mm = p.miss(mid)?;
        if mm.abs() < best.1.abs() {
            best = (mid, mm);
        }
        if sign(mm) == sign(ma) {
            a = mid;
            ma = mm;
        } else {
            b = mid;
            mb = mm;
        }
    }
    // secant polish from the bracket ends, kept only when it improves
    if ma.is_finite() && mb.is_finite() {
        let (mut x0, mut m0, mut x1, mut m1) = (a, ma, b, mb);
        for _ in 0..8 {
            if m1 == m0 {
                break;
            }
            let x2 = x1 - m1 * (x1 - x0) / (m1 - m0);
            if !(x2.is_finite()) || x2 < a - (b - a) || x2 > b + (b - a) {
                break;
            }
            let m2 = p.miss(x2)?;
            if !m2.is_finite() {
                break;
            }
            if m2.abs() < best.1.abs() {
                best = (x2, m2);
            }
            if m2 == 0.0 || (x2 - x1).abs() <= f64::EPSILON * x2.abs().max(1.0) {
                break;
            }
            (x0, m0, x1, m1) = (x1, m1, x2, m2);
        }
    }
    Ok(best)
}

/// Solves the boundary value problem by shooting.
///
/// The bracket is scanned on 256 uniform nodes; when no sign change is found
/// and both end misses are finite with the same sign, it is doubled about its
/// centre, at most four times. Every sign change is refined; roots whose miss
/// is within `tol_boundary` are accepted, and the one with least discrete OM
/// action is returned (ties go to smaller `|v0|`).
pub fn shoot(p: &BvpProblem) -> Result<BvpSolution, BvpError> {
    p.validate()?;
    let (mut lo, mut hi) = p.shoot_bracket;
    let mut doublings = 0;
    loop {
        let vs: Vec<f64> = (0..SCAN_NODES)
            .map(|i| lo + (hi - lo) * i as f64 / (SCAN_NODES - 1) as f64)
            .collect();
        let ms = vs.iter().map(|&v| p.miss(v)).collect::<Result<Vec<_>, _>>()?;
        let mut candidates = Vec::new();
        for i in 0..SCAN_NODES - 1 {
            if ms[i] == 0.0 {
                candidates.push((vs[i], 0.0));
            } else if sign(ms[i]) * sign(ms[i + 1]) < 0 {
                candidates.push(refine(p, vs[i], ms[i], vs[i + 1], ms[i + 1])?);
            }
        }
        if ms[SCAN_NODES - 1] == 0.0 {
            candidates.push((vs[SCAN_NODES - 1], 0.0));
        }
        let mut accepted: Vec<(f64, f64)> = Vec::new();
        for (v, m) in candidates {
            if m.abs() <= p.tol_boundary
                && accepted.last().map_or(true, |&(w, _)| (v - w).abs() > 1e-9 * v.abs().max(1.0))
            {
                accepted.push((v, m));
            }
        }
        if !accepted.is_empty() {
            return finish(p, &accepted, (lo, hi));
        }
        let (first, last) = (ms[0], ms[SCAN_NODES - 1]);
        let extend = first.is_finite() && last.is_finite() && sign(first) == sign(last) && doublings < MAX_DOUBLINGS;
        if !extend {
            if ms.iter().all(|m| !m.is_finite()) {
                return Err(BvpError::AllShotsDivergent { lo, hi });
            }
            return Err(BvpError::NoRootInBracket { lo, hi });
        }
        let (c, w) = (0.5 * (lo + hi), hi - lo);
        lo = c - w;
        hi = c + w;
        doublings += 1;
    }
}

fn finish(p: &BvpProblem, accepted: &[(f64, f64)], bracket: (f64, f64)) -> Result<BvpSolution, BvpError> {
    let l = p.ode.lagrangian();
    let mut best: Option<(IvpSolution, Root)> = None;
    let mut roots = Vec::with_capacity(accepted.len());
    for &(v, m) in accepted {
        let path = integrate_ivp(&p.ode, p.x0, v, p.s, p.u, p.h)?;
        let action = om_action_nodes(l, &path.t, &path.z)?;
        let root = Root { v0: v, residual: m.abs(), action };
        roots.push(root);
        let better = match &best {
            None => true,
            Some((_, b)) => {
                let tie = (action - b.action).abs() <= 1e-12 * action.abs().max(1.0);
                if tie {
                    v.abs() < b.v0.abs()
                } else {
                    action < b.action
                }
            }
        };
        if better {
            best = Some((path, root));
        }
    }
    let (path, root) = best.expect("at least one accepted root");
    Ok(BvpSolution {
        path,
        v0: root.v0,
        residual: root.residual,
        action: root.action,
        multiplicity_note: roots.len(),
        roots,
        bracket,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    Solved,
    NoRootInBracket,
    Divergent,
}

impl Outcome {
    pub fn is_solved(self) -> bool {
        self == Outcome::Solved
    }
}

/// Shoots and classifies the result; numerical errors other than
/// non-existence are propagated.
pub fn classify(p: &BvpProblem) -> Result<Outcome, BvpError> {
    match shoot(p) {
        Ok(_) => Ok(Outcome::Solved),
        Err(BvpError::NoRootInBracket { .. }) => Ok(Outcome::NoRootInBracket),
        Err(BvpError::AllShotsDivergent { .. }) => Ok(Outcome::Divergent),
        Err(e) => Err(e),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolvableInterval {
    pub lo: f64,
    pub hi: f64,
    /// `false` when the interval runs into the end of the sweep grid.
    pub lo_bounded: bool,
    pub hi_bounded: bool,
}

impl SolvableInterval {
    pub fn contains(&self, d: f64) -> bool {
        (d >= self.lo || !self.lo_bounded) && (d <= self.hi || !self.hi_bounded)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExistenceSweep {
    /// `(d, outcome)` at every grid point, sorted by `d`.
    pub points: Vec<(f64, Outcome)>,
    /// Estimated `d` where solvability flips, bracketed to `resolution`.
    pub flips: Vec<f64>,
    pub resolution: f64,
    /// Maximal solvable interval containing `d = 0`.
    pub interval: Option<SolvableInterval>,
}

/// Runs [`shoot`] at each `d` (the grid is sorted and `0` is added when
/// missing), then bisects every solvability flip in `d` to 1e-3.
pub fn sweep_d(template: &BvpProblem, d_grid: &[f64]) -> Result<ExistenceSweep, BvpError> {
    sweep_d_with_resolution(template, d_grid, SWEEP_RESOLUTION)
}

pub fn sweep_d_with_resolution(
    template: &BvpProblem,
    d_grid: &[f64],
    resolution: f64,
) -> Result<ExistenceSweep, BvpError> {
    let mut ds: Vec<f64> = d_grid.iter().copied().filter(|d| d.is_finite()).collect();
    ds.push(0.0);
    ds.sort_by(f64::total_cmp);
    ds.dedup();
    let outcomes = ds
        .par_iter()
        .map(|&d| classify(&template.with_d_nu(d)?))
        .collect::<Result<Vec<_>, _>>()?;
    let points: Vec<(f64, Outcome)> = ds.iter().copied().zip(outcomes).collect();

    let flip_at = |i: usize| -> Result<f64, BvpError> {
        let (mut a, oa) = points[i];
        let (mut b, _) = points[i + 1];
        while b - a > resolution {
            let mid = 0.5 * (a + b);
            if classify(&template.with_d_nu(mid)?)?.is_solved() == oa.is_solved() {
                a = mid;
            } else {
                b = mid;
            }
        }
        Ok(0.5 * (a + b))
    };
    let flip_idx: Vec<usize> = (0..points.len().saturating_sub(1))
        .filter(|&i| points[i].1.is_solved() != points[i + 1].1.is_solved())
        .collect();
    let flips = flip_idx
        .par_iter()
        .map(|&i| flip_at(i))
        .collect::<Result<Vec<_>, _>>()?;

    let zero = points.iter().position(|p| p.0 == 0.0).expect("0 is in the grid");
    let interval = points[zero].1.is_solved().then(|| {
        let below = flip_idx.iter().rposition(|&i| i < zero);
        let above = flip_idx.iter().position(|&i| i >= zero);
        SolvableInterval {
            lo: below.map_or(points[0].0, |k| flips[k]),
            hi: above.map_or(points[points.len() - 1].0, |k| flips[k]),
            lo_bounded: below.is_some(),
            hi_bounded: above.is_some(),
        }
    });
    Ok(ExistenceSweep { points, flips, resolution, interval })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RasterPixel {
    pub alpha: f64,
    pub beta: f64,
    pub d_nu: f64,
    pub solvable: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlphaBetaRaster {
    pub pixels: Vec<RasterPixel>,
    pub alphas: Vec<f64>,
    pub betas: Vec<f64>,
    pub sweep: ExistenceSweep,
}

impl AlphaBetaRaster {
    pub fn pixel(&self, ia: usize, ib: usize) -> &RasterPixel {
        &self.pixels[ia * self.betas.len() + ib]
    }

    /// CSV with header `alpha,beta,solvable`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("alpha,beta,solvable\n");
        for p in &self.pixels {
            out.push_str(&format!("{},{},{}\n", p.alpha, p.beta, p.solvable as u8));
        }
        out
    }
}

/// Step of the `d` grid used to cover the lattice's range of `d_ν`.
pub const RASTER_D_STEP: f64 = 0.05;

/// Classifies every `(α, β)` by membership of `d_ν(α, β)` in the solvable
/// interval found by [`sweep_d`] over a grid covering all lattice values.
pub fn sweep_alpha_beta(template: &BvpProblem, alphas: &[f64], betas: &[f64]) -> Result<AlphaBetaRaster, BvpError> {
    let mut lattice = Vec::with_capacity(alphas.len() * betas.len());
    for &alpha in alphas {
        for &beta in betas {
            let m = StableJumpMeasure::new(alpha, beta).map_err(|e| BvpError::Invalid(e.to_string()))?;
            lattice.push((alpha, beta, m.drift_constant()));
        }
    }
    let dmin = lattice.iter().map(|p| p.2).fold(0.0, f64::min);
    let dmax = lattice.iter().map(|p| p.2).fold(0.0, f64::max);
    let lo = (dmin / RASTER_D_STEP).floor() - 1.0;
    let hi = (dmax / RASTER_D_STEP).ceil() + 1.0;
    let grid: Vec<f64> = (lo as i64..=hi as i64).map(|k| k as f64 * RASTER_D_STEP).collect();
    let sweep = sweep_d(template, &grid)?;
    let pixels = lattice
        .into_iter()
        .map(|(alpha, beta, d_nu)| RasterPixel {
            alpha,
            beta,
            d_nu,
            solvable: sweep.interval.map_or(false, |iv| iv.contains(d_nu)),
        })
        .collect();
    Ok(AlphaBetaRaster { pixels, alphas: alphas.to_vec(), betas: betas.to_vec(), sweep })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elode::assemble_el;
    use crate::om::{DriftModel, OmLagrangian};

    fn problem(src: &str, d: f64, x0: f64, x1: f64, t: f64) -> BvpProblem {
        let l = OmLagrangian::new(DriftModel::parse(src).unwrap(), 1.0, d).unwrap();
        BvpProblem::new(assemble_el(&l), x0, x1, 0.0, t).unwrap()
    }

    #[test]
    fn free_particle_line() {
        let p = problem("1", 0.0, 0.0, 1.0, 1.0);
        let sol = shoot(&p).unwrap();
        assert!((sol.v0 - 1.0).abs() < 1e-10);
        assert_eq!(sol.multiplicity_note, 1);
        for (t, z) in sol.path.t.iter().zip(&sol.path.z) {
            assert!((z - t).abs() < 1e-9);
        }
    }

    #[test]
    fn linear_example_matches_closed_form() {
        let p = problem("-z", 1.0, 3.0, 4.0, 1.0).with_h(1e-3).unwrap();
        let sol = shoot(&p).unwrap();
        assert!(sol.residual <= 1e-8);
        // z = A e^t + B e^-t - d with A + B = x0 + d, A e + B / e = x1 + d
        let e = std::f64::consts::E;
        let a = (5.0 - 4.0 / e) / (e - 1.0 / e);
        let b = 4.0 - a;
        for (t, z) in sol.path.t.iter().zip(&sol.path.z) {
            let exact = a * t.exp() + b * (-t).exp() - 1.0;
            assert!((z - exact).abs() < 1e-6, "t = {t}");
        }
    }

    #[test]
    fn double_well_symmetric_case_solves() {
        let sol = shoot(&problem("z - z^3", 0.0, -1.0, 1.0, 2.0)).unwrap();
        assert!(sol.residual <= 1e-8);
        assert!(sol.multiplicity_note >= 1);
        let sol = shoot(&problem("z - z^3", 1.0, -1.0, 1.0, 2.0)).unwrap();
        assert!(sol.residual <= 1e-8);
    }

    #[test]
    fn root_free_bracket_reports_no_root() {
        // v in [5, 6] overshoots x1 = 0 for z'' = 0 on [0, 1]
        let p = problem("1", 0.0, 0.0, 0.0, 1.0).with_bracket(5.0, 6.0).unwrap();
        // doubling about the centre reaches [-2.5, 13.5] after three steps
        assert!(shoot(&p).is_ok());
        let p = problem("1", 0.0, 0.0, 0.0, 1.0).with_bracket(50.0, 51.0).unwrap();
        assert!(matches!(shoot(&p), Err(BvpError::NoRootInBracket { .. })));
    }

    #[test]
    fn validation() {
        let p = problem("1", 0.0, 0.0, 0.0, 1.0);
        assert!(p.clone().with_bracket(1.0, 1.0).is_err());
        assert!(p.clone().with_h(0.0).is_err());
        assert!(p.with_tol(-1.0).is_err());
    }

    #[test]
    fn interval_membership() {
        let iv = SolvableInterval { lo: -1.0, hi: 2.0, lo_bounded: true, hi_bounded: false };
        assert!(iv.contains(-1.0) && iv.contains(100.0) && !iv.contains(-1.5));
    }
}
