//! Command-line arguments.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::config::{Boundary, ExperimentConfig, Method, Noise, Output, Solver};
use crate::failure::Failure;

#[derive(Debug, Parser)]
#[command(name = "ompath", version, about = "Most probable paths of scalar jump-diffusions")]
pub struct Cli {
    /// Worker threads for sweeps and Monte Carlo (falls back to OMPATH_JOBS).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,

    /// Output directory for artifacts.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the Lévy drift constant d_nu of an alpha-stable measure.
    LevyConstant(LevyArgs),
    /// Evaluate the OM function in both algebraic forms.
    OmEval(OmEvalArgs),
    /// Discrete OM action of a path read from a (t, z) CSV.
    OmAction(OmActionArgs),
    /// Solve the two-point problem by shooting.
    Solve(ProblemArgs),
    /// Minimize the discrete action directly.
    Minimize(ProblemArgs),
    /// Run shooting and minimization and compare them.
    Compare(ProblemArgs),
    /// Classify solvability over a grid of d values.
    SweepD(SweepDArgs),
    /// Classify solvability over an (alpha, beta) lattice.
    SweepAb(SweepAbArgs),
    /// Closed-form solution of the linear example.
    ClosedForm(ClosedFormArgs),
    /// Simulate one Euler-Maruyama path.
    Simulate(SimulateArgs),
    /// Monte Carlo tube probability around a reference path.
    TubeProb(TubeProbArgs),
    /// Rank candidate paths by tube probability and action.
    Rank(RankArgs),
    /// Regenerate the data behind one of the canned figures.
    Reproduce(ReproduceArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct LevyArgs {
    #[arg(long)]
    pub alpha: f64,
    #[arg(long)]
    pub beta: f64,
}

/// Jump noise: an explicit `--d`, or `--alpha` with `--beta`. Neither means `d = 0`.
#[derive(Debug, Clone, Args, Serialize)]
pub struct NoiseArgs {
    #[arg(long, allow_hyphen_values = true, conflicts_with_all = ["alpha", "beta"])]
    pub d: Option<f64>,
    #[arg(long, requires = "beta")]
    pub alpha: Option<f64>,
    #[arg(long, requires = "alpha", allow_hyphen_values = true)]
    pub beta: Option<f64>,
}

impl NoiseArgs {
    pub fn to_noise(&self) -> Noise {
        Noise { d: self.d, alpha: self.alpha, beta: self.beta }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ModelArgs {
    /// Drift expression in z, e.g. "z - z^3".
    #[arg(long, allow_hyphen_values = true)]
    pub drift: String,
    /// Diffusion constant.
    #[arg(long, default_value_t = 1.0)]
    pub c: f64,
    #[command(flatten)]
    pub noise: NoiseArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct OmEvalArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, allow_hyphen_values = true)]
    pub z: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub zdot: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct OmActionArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// CSV with columns t,z (or t,x) on a uniform grid.
    #[arg(long)]
    pub path: PathBuf,
}

/// A two-point problem given by flags or by `--config FILE`.
#[derive(Debug, Clone, Args, Serialize)]
pub struct ProblemArgs {
    /// Experiment configuration file (TOML); replaces all problem flags.
    #[arg(long, conflicts_with_all = ["drift", "x0", "x1", "horizon"])]
    pub config: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true, required_unless_present = "config")]
    pub drift: Option<String>,
    #[arg(long, default_value_t = 1.0)]
    pub c: f64,
    #[command(flatten)]
    pub noise: NoiseArgs,
    #[arg(long, allow_hyphen_values = true, required_unless_present = "config")]
    pub x0: Option<f64>,
    #[arg(long, allow_hyphen_values = true, required_unless_present = "config")]
    pub x1: Option<f64>,
    /// Horizon length; the window is [s, s + T].
    #[arg(long = "T", id = "horizon", required_unless_present = "config")]
    pub horizon: Option<f64>,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub s: f64,
    /// RK4 step for shooting.
    #[arg(long)]
    pub h: Option<f64>,
    /// Grid intervals for minimization.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub tol_boundary: Option<f64>,
    #[arg(long)]
    pub grad_tol: Option<f64>,
    #[arg(long)]
    pub max_iters: Option<usize>,
    /// Initial-velocity bracket for shooting.
    #[arg(long, num_args = 2, value_names = ["LO", "HI"], allow_hyphen_values = true)]
    pub bracket: Option<Vec<f64>>,
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FormatArg {
    Csv,
    Json,
}

impl ProblemArgs {
    /// The experiment described by the flags or the config file. `method` is
    /// fixed by the subcommand; a config naming another method is rejected.
    pub fn experiment(&self, method: Method) -> Result<ExperimentConfig, Failure> {
        let cfg = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => {
                let t = self.horizon.expect("required by clap");
                let cfg = ExperimentConfig {
                    drift: self.drift.clone().expect("required by clap"),
                    c: self.c,
                    noise: self.noise.to_noise(),
                    boundary: Boundary {
                        x0: self.x0.expect("required by clap"),
                        x1: self.x1.expect("required by clap"),
                        s: self.s,
                        u: self.s + t,
                    },
                    solver: Solver {
                        method: Some(method),
                        h: self.h,
                        n: self.n,
                        tol_boundary: self.tol_boundary,
                        grad_tol: self.grad_tol,
                        max_iters: self.max_iters,
                        bracket: self.bracket.as_ref().map(|b| [b[0], b[1]]),
                    },
                    output: Output {
                        directory: None,
                        format: match self.format {
                            Some(FormatArg::Json) => crate::config::Format::Json,
                            _ => crate::config::Format::Csv,
                        },
                    },
                };
                cfg.validate()?;
                cfg
            }
        };
        match cfg.solver.method {
            Some(m) if m != method => Err(Failure::config(format!(
                "config asks for method {m:?} but the subcommand runs {method:?}"
            ))),
            _ => Ok(cfg),
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SweepDArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[arg(long, default_value_t = -3.0, allow_hyphen_values = true)]
    pub d_min: f64,
    #[arg(long, default_value_t = 3.0, allow_hyphen_values = true)]
    pub d_max: f64,
    #[arg(long, default_value_t = 0.05)]
    pub d_step: f64,
    /// Bisection resolution for solvability flips.
    #[arg(long, default_value_t = ompath::bvp::SWEEP_RESOLUTION)]
    pub resolution: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SweepAbArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    /// `lo:hi:step` or a comma-separated list.
    #[arg(long, default_value = "0.05:0.95:0.05")]
    pub alphas: String,
    #[arg(long, default_value = "-1:1:0.1", allow_hyphen_values = true)]
    pub betas: String,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ClosedFormArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub x0: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub x1: f64,
    #[arg(long = "T")]
    pub horizon: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    pub d: f64,
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CompensationArg {
    Full,
    Simulated,
}

/// SDE settings shared by the Monte Carlo commands. Jumps need `--alpha` and
/// `--beta`; without them the noise is Brownian.
#[derive(Debug, Clone, Args, Serialize)]
pub struct SdeArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub drift: String,
    #[arg(long, default_value_t = 1.0)]
    pub c: f64,
    #[arg(long, requires = "beta")]
    pub alpha: Option<f64>,
    #[arg(long, requires = "alpha", allow_hyphen_values = true)]
    pub beta: Option<f64>,
    /// Euler-Maruyama step; defaults to (u - s)/100.
    #[arg(long)]
    pub em_step: Option<f64>,
    /// Smallest simulated jump size.
    #[arg(long, default_value_t = ompath::levy::DEFAULT_TRUNCATION)]
    pub delta: f64,
    #[arg(long, value_enum, default_value_t = CompensationArg::Full)]
    pub compensation: CompensationArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub sde: SdeArgs,
    #[arg(long, allow_hyphen_values = true)]
    pub x0: f64,
    #[arg(long = "T")]
    pub horizon: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub s: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct TubeProbArgs {
    #[command(flatten)]
    pub sde: SdeArgs,
    /// Reference path CSV (t,z); its nodes define the sup-norm grid.
    #[arg(long)]
    pub path: PathBuf,
    #[arg(long)]
    pub eps: f64,
    #[arg(long, default_value_t = 100_000)]
    pub npaths: u64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct RankArgs {
    #[command(flatten)]
    pub sde: SdeArgs,
    /// Directory of candidate path CSVs sharing one grid.
    #[arg(long)]
    pub paths: PathBuf,
    #[arg(long)]
    pub eps: f64,
    #[arg(long, default_value_t = 100_000)]
    pub npaths: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Figure {
    Fig1,
    Fig2,
    Fig3,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ReproduceArgs {
    #[arg(value_enum)]
    pub figure: Figure,
}

/// Parses `lo:hi:step` (inclusive, tolerant to roundoff) or `a,b,c`.
pub fn parse_grid(text: &str) -> Result<Vec<f64>, Failure> {
    let bad = || Failure::config(format!("cannot parse grid `{text}`; use lo:hi:step or a,b,c"));
    let nums = |sep: char| -> Result<Vec<f64>, Failure> {
        text.split(sep).map(|p| p.trim().parse::<f64>().map_err(|_| bad())).collect()
    };
    if text.contains(':') {
        let v = nums(':')?;
        let [lo, hi, step] = v[..] else { return Err(bad()) };
        if !(step > 0.0 && lo <= hi && lo.is_finite() && hi.is_finite()) {
            return Err(bad());
        }
        let count = ((hi - lo) / step + 1e-9).floor() as usize;
        // round to the step's decimal precision so that 0.1*3 prints as 0.3
        Ok((0..=count).map(|k| snap(lo + k as f64 * step)).collect())
    } else {
        nums(',')
    }
}

fn snap(x: f64) -> f64 {
    (x * 1e9).round() / 1e9
}
