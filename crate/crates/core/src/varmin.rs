//! Direct minimization of the discrete OM action over interior path nodes.
//!
//! Descent uses the H¹ gradient: the Euclidean gradient is preconditioned by
//! the Hessian of the kinetic part `Σ (Δz)²/(c² dt)`, which is the discrete
//! Sobolev inner product and makes the step size independent of the mesh.
//! Once the gradient is small, Newton steps with the exact tridiagonal Hessian
//! polish the result. Stationary points with an indefinite Hessian are left
//! along the eigenvector of the most negative eigenvalue.

use crate::bvp::{shoot, BvpError, BvpProblem};
use crate::elode::{assemble_el, IvpSolution};
use crate::expr::EvalError;
use crate::linalg::SymTridiagonal;
use crate::om::{action_hessian, om_action, om_action_gradient, OmLagrangian, PathError, PathGrid};
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum VarminError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Domain(#[from] EvalError),
    #[error(transparent)]
    Path(#[from] PathError),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Init {
    Linear,
    Supplied(PathGrid),
}

impl Init {
    pub fn label(&self) -> &'static str {
        match self {
            Init::Linear => "linear-interpolant",
            Init::Supplied(_) => "supplied",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MinimizeConfig {
    pub n: usize,
    pub max_iters: usize,
    /// On the gradient max-norm.
    pub grad_tol: f64,
    pub init: Init,
    pub initial_step: f64,
    pub shrink: f64,
    pub sufficient_decrease: f64,
    pub newton_iters: usize,
    pub max_escapes: usize,
}

impl Default for MinimizeConfig {
    fn default() -> Self {
        MinimizeConfig {
            n: 400,
            max_iters: 50_000,
            grad_tol: 1e-7,
            init: Init::Linear,
            initial_step: 1.0,
            shrink: 0.5,
            sufficient_decrease: 1e-4,
            newton_iters: 50,
            max_escapes: 8,
        }
    }
}

impl MinimizeConfig {
    fn validate(&self) -> Result<(), VarminError> {
        let bad = |m: &str| Err(VarminError::Config(m.into()));
        if self.n < 2 {
            return bad("n must be at least 2");
        }
        if !(self.grad_tol > 0.0) {
            return bad("grad_tol must be positive");
        }
        if !(self.initial_step > 0.0) {
            return bad("initial_step must be positive");
        }
        if !(self.shrink > 0.0 && self.shrink < 1.0) {
            return bad("shrink must lie in (0, 1)");
        }
        if !(self.sufficient_decrease > 0.0 && self.sufficient_decrease < 1.0) {
            return bad("sufficient_decrease must lie in (0, 1)");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MinimizeResult {
    pub grid: PathGrid,
    pub action: f64,
    pub grad_norm: f64,
    pub iters: usize,
    pub newton_iters: usize,
    pub saddle_escapes: usize,
    pub converged: bool,
    pub init: &'static str,
}

fn max_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

struct Objective<'a> {
    l: &'a OmLagrangian,
    base: PathGrid,
}

impl Objective<'_> {
    fn grid(&self, x: &[f64]) -> PathGrid {
        let mut values = self.base.values().to_vec();
        let n = values.len() - 1;
        values[1..n].copy_from_slice(x);
        PathGrid::new(self.base.s(), self.base.u(), values).unwrap_or_else(|_| self.base.clone())
    }

    /// Action at `x`; non-finite iterates count as `+∞`.
    fn value(&self, x: &[f64]) -> Result<f64, EvalError> {
        if x.iter().any(|v| !v.is_finite()) {
            return Ok(f64::INFINITY);
        }
        let a = om_action(self.l, &self.grid(x))?;
        Ok(if a.is_nan() { f64::INFINITY } else { a })
    }

    fn gradient(&self, x: &[f64]) -> Result<Vec<f64>, EvalError> {
        om_action_gradient(self.l, &self.grid(x))
    }

    fn hessian(&self, x: &[f64]) -> Result<SymTridiagonal, EvalError> {
        action_hessian(self.l, &self.grid(x))
    }

    /// Backtracking along `p` from `step`; returns the accepted point and value.
    fn armijo(
        &self,
        cfg: &MinimizeConfig,
        x: &[f64],
        fx: f64,
        g: &[f64],
        p: &[f64],
        step: f64,
    ) -> Result<Option<(Vec<f64>, f64)>, EvalError> {
        let slope = dot(g, p);
        if !(slope < 0.0) {
            return Ok(None);
        }
        let mut a = step;
        for _ in 0..60 {
            let trial: Vec<f64> = x.iter().zip(p).map(|(xi, pi)| xi + a * pi).collect();
            let ft = match self.value(&trial) {
                Ok(v) => v,
                // a domain error along the ray is treated as an infeasible step
                Err(_) => f64::INFINITY,
            };
            if ft <= fx + cfg.sufficient_decrease * a * slope {
                return Ok(Some((trial, ft)));
            }
            a *= cfg.shrink;
        }
        Ok(None)
    }
}

/// Minimizes the discrete action with `z(s) = x0`, `z(u) = x1` pinned.
///
/// Non-convergence within `max_iters` is not an error: the best iterate is
/// returned with `converged = false`.
pub fn minimize_action(
    l: &OmLagrangian,
    x0: f64,
    x1: f64,
    s: f64,
    u: f64,
    cfg: &MinimizeConfig,
) -> Result<MinimizeResult, VarminError> {
    cfg.validate()?;
    let base = match &cfg.init {
        Init::Linear => PathGrid::linear(s, u, x0, x1, cfg.n)?,
        Init::Supplied(g) => {
            if g.n() != cfg.n || g.s() != s || g.u() != u {
                return Err(VarminError::Config("supplied init does not match n, s, u".into()));
            }
            let mut v = g.values().to_vec();
            v[0] = x0;
            v[cfg.n] = x1;
            PathGrid::new(s, u, v)?
        }
    };
    let obj = Objective { l, base };
    let mut x = obj.base.values()[1..cfg.n].to_vec();
    let dt = obj.base.dt();
    let kinetic = 2.0 / (l.c() * l.c() * dt);
    let precond = SymTridiagonal::constant(cfg.n - 1, 2.0 * kinetic, -kinetic)
        .factor()
        .expect("kinetic matrix is positive definite");

    let mut fx = obj.value(&x)?;
    let mut g = obj.gradient(&x)?;
    let g0 = max_norm(&g);
    let polish_at = (100.0 * cfg.grad_tol).max(1e-3 * g0);
    let (mut iters, mut newton, mut escapes) = (0, 0, 0);
    let mut converged = false;

    while iters < cfg.max_iters {
        let gn = max_norm(&g);
        let near = gn <= polish_at;
        let mut moved = false;
        if near || gn <= cfg.grad_tol {
            let h = obj.hessian(&x)?;
            let definite = h.factor().filter(|f| f.negative_pivots() == 0);
            match definite {
                Some(_) if gn <= cfg.grad_tol => {
                    converged = true;
                    break;
                }
                Some(f) if newton < cfg.newton_iters => {
                    let p: Vec<f64> = f.solve(&g).into_iter().map(|v| -v).collect();
                    if let Some((xn, fnew)) = obj.armijo(cfg, &x, fx, &g, &p, 1.0)? {
                        newton += 1;
                        iters += 1;
                        assert!(fnew <= fx, "line search must not increase the action");
                        x = xn;
                        fx = fnew;
                        g = obj.gradient(&x)?;
                        continue;
                    }
                }
                None if escapes < cfg.max_escapes => {
                    if let Some((xn, fnew)) = escape_saddle(&obj, &h, &x, fx, &g)? {
                        escapes += 1;
                        iters += 1;
                        x = xn;
                        fx = fnew;
                        g = obj.gradient(&x)?;
                        continue;
                    }
                    if gn <= cfg.grad_tol {
                        converged = true;
                        break;
                    }
                }
                _ => {
                    if gn <= cfg.grad_tol {
                        converged = true;
                        break;
                    }
                }
            }
        }
        let p: Vec<f64> = precond.solve(&g).into_iter().map(|v| -v).collect();
        if let Some((xn, fnew)) = obj.armijo(cfg, &x, fx, &g, &p, cfg.initial_step)? {
            assert!(fnew <= fx, "line search must not increase the action");
            x = xn;
            fx = fnew;
            g = obj.gradient(&x)?;
            moved = true;
        }
        iters += 1;
        if !moved {
            converged = max_norm(&g) <= cfg.grad_tol;
            break;
        }
    }
    let grad_norm = max_norm(&g);
    Ok(MinimizeResult {
        grid: obj.grid(&x),
        action: fx,
        grad_norm,
        iters,
        newton_iters: newton,
        saddle_escapes: escapes,
        converged: converged && grad_norm <= cfg.grad_tol,
        init: cfg.init.label(),
    })
}

/// Moves along the eigenvector of the smallest Hessian eigenvalue, picking the
/// sign that does not ascend and the step (halving from a unit sup-norm move)
/// with the lowest action.
fn escape_saddle(
    obj: &Objective,
    h: &SymTridiagonal,
    x: &[f64],
    fx: f64,
    g: &[f64],
) -> Result<Option<(Vec<f64>, f64)>, EvalError> {
    let (lambda, mut e) = h.min_eigenpair();
    if !(lambda < 0.0) {
        return Ok(None);
    }
    let scale = max_norm(&e);
    let sgn = if dot(g, &e) > 0.0 { -1.0 } else { 1.0 };
    e.iter_mut().for_each(|v| *v *= sgn / scale);
    let mut best: Option<(Vec<f64>, f64)> = None;
    let mut t = 1.0;
    for _ in 0..30 {
        let trial: Vec<f64> = x.iter().zip(&e).map(|(xi, ei)| xi + t * ei).collect();
        let ft = obj.value(&trial).unwrap_or(f64::INFINITY);
        if ft < fx && best.as_ref().map_or(true, |b| ft < b.1) {
            best = Some((trial, ft));
        }
        t *= 0.5;
    }
    Ok(best)
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CompareError {
    #[error("shooting failed: {0}")]
    Shoot(#[from] BvpError),
    #[error("minimization failed: {0}")]
    Minimize(#[from] VarminError),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MethodComparison {
    pub shoot_v0: f64,
    pub shoot_roots: usize,
    /// Action of the shooting path sampled on the minimizer's grid.
    pub shoot_action: f64,
    pub minimize: MinimizeResult,
    pub max_discrepancy: f64,
    pub action_discrepancy: f64,
    pub action_rel_discrepancy: f64,
    /// Pointwise disagreement above 1e-2: the methods found different stationary paths.
    pub multi_minimum: bool,
}

pub const MULTI_MINIMUM_THRESHOLD: f64 = 1e-2;

/// Linear interpolation of an IVP trajectory at `t`.
pub fn sample_trajectory(sol: &IvpSolution, t: f64) -> f64 {
    let k = sol.t.partition_point(|&x| x <= t).clamp(1, sol.len() - 1);
    let (ta, tb) = (sol.t[k - 1], sol.t[k]);
    let w = ((t - ta) / (tb - ta)).clamp(0.0, 1.0);
    (1.0 - w) * sol.z[k - 1] + w * sol.z[k]
}

/// Runs [`shoot`] with default settings and [`minimize_action`] with `cfg`,
/// and compares the two paths on the minimizer's grid.
pub fn compare_methods(
    l: &OmLagrangian,
    x0: f64,
    x1: f64,
    s: f64,
    u: f64,
    cfg: &MinimizeConfig,
) -> Result<MethodComparison, CompareError> {
    let bvp = shoot(&BvpProblem::new(assemble_el(l), x0, x1, s, u)?)?;
    let min = minimize_action(l, x0, x1, s, u, cfg)?;
    let sampled = PathGrid::new(
        s,
        u,
        min.grid.times().iter().map(|&t| sample_trajectory(&bvp.path, t)).collect(),
    )
    .map_err(VarminError::from)?;
    let shoot_action = om_action(l, &sampled).map_err(VarminError::from)?;
    let max_discrepancy = sampled.max_distance(&min.grid);
    let action_discrepancy = (shoot_action - min.action).abs();
    Ok(MethodComparison {
        shoot_v0: bvp.v0,
        shoot_roots: bvp.multiplicity_note,
        shoot_action,
        action_rel_discrepancy: action_discrepancy / shoot_action.abs().max(f64::MIN_POSITIVE),
        action_discrepancy,
        multi_minimum: max_discrepancy > MULTI_MINIMUM_THRESHOLD,
        max_discrepancy,
        minimize: min,
    })
}
