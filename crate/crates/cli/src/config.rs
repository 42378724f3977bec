//! Experiment configuration files (TOML).

use std::path::{Path, PathBuf};

use ompath::bvp::{DEFAULT_BRACKET, DEFAULT_STEPS, DEFAULT_TOL_BOUNDARY};
use ompath::levy::StableJumpMeasure;
use ompath::om::{DriftModel, OmLagrangian};
use ompath::varmin::MinimizeConfig;
use serde::{Deserialize, Serialize};

use crate::failure::Failure;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Shoot,
    Minimize,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Either an explicit `d` or an α-stable `(alpha, beta)` pair.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Noise {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
}

impl Noise {
    pub fn measure(&self) -> Result<Option<StableJumpMeasure>, Failure> {
        match (self.d, self.alpha, self.beta) {
            (Some(_), None, None) | (None, None, None) => Ok(None),
            (None, Some(a), Some(b)) => Ok(Some(StableJumpMeasure::new(a, b)?)),
            (Some(_), _, _) => Err(Failure::config("noise: give either d or alpha and beta, not both")),
            _ => Err(Failure::config("noise: alpha and beta must be given together")),
        }
    }

    /// `d_ν`; no noise section means `d = 0`.
    pub fn d_nu(&self) -> Result<f64, Failure> {
        Ok(match self.measure()? {
            Some(m) => m.drift_constant(),
            None => self.d.unwrap_or(0.0),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Boundary {
    pub x0: f64,
    pub x1: f64,
    #[serde(default)]
    pub s: f64,
    pub u: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Solver {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub method: Option<Method>,
    /// RK4 step for shooting; defaults to `(u - s)/1e4`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
    /// Grid intervals for direct minimization.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol_boundary: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grad_tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_iters: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bracket: Option<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Output {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub directory: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub drift: String,
    #[serde(default = "unit")]
    pub c: f64,
    #[serde(default)]
    pub noise: Noise,
    pub boundary: Boundary,
    #[serde(default)]
    pub solver: Solver,
    #[serde(default)]
    pub output: Output,
}

fn unit() -> f64 {
    1.0
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::config(format!("cannot read {}: {e}", path.display())))?;
        let cfg: ExperimentConfig =
            toml::from_str(&text).map_err(|e| Failure::config(format!("{}: {e}", path.display())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Checks everything that can be checked before any computation.
    pub fn validate(&self) -> Result<(), Failure> {
        self.lagrangian()?;
        let b = &self.boundary;
        if ![b.x0, b.x1, b.s, b.u].iter().all(|v| v.is_finite()) || !(b.s < b.u) {
            return Err(Failure::config("boundary: need finite x0, x1 and s < u"));
        }
        let sv = &self.solver;
        if sv.h.is_some_and(|h| !(h > 0.0 && h.is_finite())) {
            return Err(Failure::config("solver.h must be positive"));
        }
        if sv.n.is_some_and(|n| n < 2) {
            return Err(Failure::config("solver.n must be at least 2"));
        }
        if sv.tol_boundary.is_some_and(|t| !(t > 0.0)) || sv.grad_tol.is_some_and(|t| !(t > 0.0)) {
            return Err(Failure::config("solver tolerances must be positive"));
        }
        if sv.bracket.is_some_and(|[lo, hi]| !(lo < hi && lo.is_finite() && hi.is_finite())) {
            return Err(Failure::config("solver.bracket must be [lo, hi] with lo < hi"));
        }
        Ok(())
    }

    pub fn lagrangian(&self) -> Result<OmLagrangian, Failure> {
        Ok(OmLagrangian::new(DriftModel::parse(&self.drift)?, self.c, self.noise.d_nu()?)?)
    }

    pub fn h(&self) -> f64 {
        self.solver.h.unwrap_or((self.boundary.u - self.boundary.s) / DEFAULT_STEPS)
    }

    pub fn tol_boundary(&self) -> f64 {
        self.solver.tol_boundary.unwrap_or(DEFAULT_TOL_BOUNDARY)
    }

    pub fn bracket(&self) -> (f64, f64) {
        self.solver.bracket.map_or(DEFAULT_BRACKET, |[lo, hi]| (lo, hi))
    }

    pub fn minimize_config(&self) -> MinimizeConfig {
        let mut cfg = MinimizeConfig::default();
        if let Some(n) = self.solver.n {
            cfg.n = n;
        }
        if let Some(t) = self.solver.grad_tol {
            cfg.grad_tol = t;
        }
        if let Some(m) = self.solver.max_iters {
            cfg.max_iters = m;
        }
        cfg
    }

    /// The configuration with every default spelled out, as recorded in manifests.
    pub fn resolved(&self, method: Method) -> ExperimentConfig {
        let m = self.minimize_config();
        let (lo, hi) = self.bracket();
        let mut out = self.clone();
        out.solver = Solver {
            method: Some(method),
            h: Some(self.h()),
            n: Some(m.n),
            tol_boundary: Some(self.tol_boundary()),
            grad_tol: Some(m.grad_tol),
            max_iters: Some(m.max_iters),
            bracket: Some([lo, hi]),
        };
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FULL: &str = r#"
drift = "z - z^3"
c = 1.0

[noise]
alpha = 0.5
beta = 0.0

[boundary]
x0 = -1.0
x1 = 1.0
u = 2.0

[solver]
method = "both"
n = 200
bracket = [-10.0, 10.0]

[output]
directory = "out/dw"
format = "json"
"#;

    #[test]
    fn parses_full_config() {
        let cfg: ExperimentConfig = toml::from_str(FULL).unwrap();
        cfg.validate().unwrap();
        assert_eq!(cfg.solver.method, Some(Method::Both));
        assert_eq!(cfg.noise.d_nu().unwrap(), 0.0);
        assert_eq!(cfg.bracket(), (-10.0, 10.0));
        assert_eq!(cfg.h(), 2e-4);
        assert_eq!(cfg.output.format, Format::Json);
    }

    #[test]
    fn rejects_unknown_keys() {
        let text = FULL.replace("c = 1.0", "c = 1.0\nsigma = 2.0");
        assert!(toml::from_str::<ExperimentConfig>(&text).is_err());
        let text = FULL.replace("n = 200", "n = 200\nsteps = 3");
        assert!(toml::from_str::<ExperimentConfig>(&text).is_err());
    }

    #[test]
    fn rejects_mixed_noise() {
        let text = FULL.replace("beta = 0.0", "beta = 0.0\nd = 1.0");
        let cfg: ExperimentConfig = toml::from_str(&text).unwrap();
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn resolved_config_round_trips() {
        let cfg: ExperimentConfig = toml::from_str(FULL).unwrap();
        let resolved = cfg.resolved(Method::Shoot);
        let text = toml::to_string(&resolved).unwrap();
        let back: ExperimentConfig = toml::from_str(&text).unwrap();
        assert_eq!(back, resolved);
        assert_eq!(back.solver.tol_boundary, Some(1e-8));
    }
}
