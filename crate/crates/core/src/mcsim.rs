//! Euler–Maruyama simulation of `dX = f(X) dt + c dB + dL` with compensated
//! small α-stable jumps, and Monte Carlo tube probabilities
//! `P(max_k |X(t_k) - z(t_k)| ≤ ε)`.
//!
//! Randomness for path `i` comes from `ChaCha8Rng::seed_from_u64(seed)` on
//! stream `i`, so estimates are reproducible regardless of thread count and
//! candidate paths can be compared under common random numbers.

use crate::levy::{LevyError, SmallJumpSampler, StableJumpMeasure, DEFAULT_TRUNCATION};
use crate::om::{om_action, DriftModel, OmError, OmLagrangian, PathError, PathGrid};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

pub const DEFAULT_GUARD: f64 = 1e8;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SimError {
    #[error("invalid simulation spec: {0}")]
    Spec(String),
    #[error(transparent)]
    Levy(#[from] LevyError),
    #[error(transparent)]
    Path(#[from] PathError),
    #[error(transparent)]
    Lagrangian(#[from] OmError),
    #[error("drift evaluation failed at z = {0}")]
    Domain(f64),
    #[error("path left |x| <= guard at step {0}")]
    Divergence(usize),
}

/// Which jump mean is subtracted per unit time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Compensation {
    /// `d_ν`, the mean of the whole band `|ξ| < 1`.
    FullBand,
    /// Only the mean of the simulated band `δ ≤ |ξ| < 1`.
    SimulatedBand,
}

#[derive(Debug, Clone)]
pub struct SdeSpec {
    pub drift: DriftModel,
    pub c: f64,
    /// `None` disables jumps, and then `d_ν = 0`.
    pub measure: Option<StableJumpMeasure>,
    pub x0: f64,
    pub s: f64,
    pub u: f64,
    pub em_step: f64,
    pub delta: f64,
    pub compensation: Compensation,
    pub guard: f64,
}

impl SdeSpec {
    /// Defaults: `em_step = (u - s)/100`, `δ = 1e-3`, full-band compensation.
    pub fn new(drift: DriftModel, c: f64, measure: Option<StableJumpMeasure>, x0: f64, s: f64, u: f64) -> Self {
        SdeSpec {
            drift,
            c,
            measure,
            x0,
            s,
            u,
            em_step: (u - s) / 100.0,
            delta: DEFAULT_TRUNCATION,
            compensation: Compensation::FullBand,
            guard: DEFAULT_GUARD,
        }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let bad = |m: String| Err(SimError::Spec(m));
        if !(self.s < self.u) || !self.s.is_finite() || !self.u.is_finite() {
            return bad(format!("need s < u, got [{}, {}]", self.s, self.u));
        }
        if !(self.c >= 0.0 && self.c.is_finite()) {
            return bad(format!("c = {} must be non-negative", self.c));
        }
        if !self.x0.is_finite() {
            return bad("x0 must be finite".into());
        }
        let max_step = (self.u - self.s) / 100.0;
        if !(self.em_step > 0.0 && self.em_step <= max_step * (1.0 + 1e-12)) {
            return bad(format!("em_step = {} must lie in (0, (u-s)/100]", self.em_step));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return bad(format!("delta = {} must lie in (0, 1)", self.delta));
        }
        Ok(())
    }

    pub fn d_nu(&self) -> f64 {
        self.measure.map_or(0.0, |m| m.drift_constant())
    }

    /// Jump mean subtracted per unit time.
    pub fn compensator(&self) -> Result<f64, SimError> {
        Ok(match (self.measure, self.compensation) {
            (None, _) => 0.0,
            (Some(m), Compensation::FullBand) => m.drift_constant(),
            (Some(m), Compensation::SimulatedBand) => m.band_mean(self.delta, 1.0)?,
        })
    }

    pub fn jump_sampler(&self) -> Result<Option<SmallJumpSampler>, SimError> {
        self.measure
            .map(|m| SmallJumpSampler::new(m, self.delta, self.u - self.s))
            .transpose()
            .map_err(SimError::from)
    }

    /// The OM Lagrangian matching this SDE; needs `c > 0`.
    pub fn lagrangian(&self) -> Result<OmLagrangian, SimError> {
        Ok(OmLagrangian::new(self.drift.clone(), self.c, self.d_nu())?)
    }

    /// Number of EM steps when each of `intervals` grid intervals is
    /// subdivided evenly with steps no longer than `em_step`.
    fn steps_for(&self, intervals: usize) -> usize {
        let per = ((self.u - self.s) / intervals as f64 / self.em_step * (1.0 - 1e-12)).ceil().max(1.0) as usize;
        per * intervals
    }
}

struct Simulator<'a> {
    spec: &'a SdeSpec,
    sampler: Option<SmallJumpSampler>,
    comp: f64,
    steps: usize,
    h: f64,
}

impl<'a> Simulator<'a> {
    fn new(spec: &'a SdeSpec, steps: usize) -> Result<Self, SimError> {
        spec.validate()?;
        Ok(Simulator {
            spec,
            sampler: spec.jump_sampler()?,
            comp: spec.compensator()?,
            steps,
            h: (spec.u - spec.s) / steps as f64,
        })
    }

    /// Node values `X_0..X_steps` of path `index`.
    fn run(&self, seed: u64, index: u64, out: &mut Vec<f64>) -> Result<(), SimError> {
        let spec = self.spec;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index);
        let jumps = self.sampler.map(|s| s.sample_with(&mut rng)).unwrap_or_default();
        let mut next_jump = 0;
        let sqrt_h = self.h.sqrt();
        let mut x = spec.x0;
        out.clear();
        out.push(x);
        for k in 0..self.steps {
            let f = spec.drift.f(x).map_err(|_| SimError::Domain(x))?;
            let xi: f64 = StandardNormal.sample(&mut rng);
            let t_end = (k + 1) as f64 * self.h;
            let mut dj = 0.0;
            while next_jump < jumps.len() && (jumps[next_jump].0 < t_end || k + 1 == self.steps) {
                dj += jumps[next_jump].1;
                next_jump += 1;
            }
            x += f * self.h + spec.c * sqrt_h * xi + dj - self.comp * self.h;
            if !(x.abs() <= spec.guard) {
                return Err(SimError::Divergence(k + 1));
            }
            out.push(x);
        }
        Ok(())
    }
}

/// One Euler–Maruyama path on `ceil((u - s)/em_step)` uniform steps.
/// Equal to path 0 of every estimator run with the same seed and step count.
pub fn simulate_path(spec: &SdeSpec, seed: u64) -> Result<PathGrid, SimError> {
    let sim = Simulator::new(spec, spec.steps_for(1))?;
    let mut values = Vec::with_capacity(sim.steps + 1);
    sim.run(seed, 0, &mut values)?;
    Ok(PathGrid::new(spec.s, spec.u, values)?)
}

/// Number of simulated paths satisfying `predicate`, evaluated on the values at
/// the nodes of a uniform `intervals`-interval grid. Divergent paths count as
/// misses and are tallied separately.
pub fn estimate_probability<P>(
    spec: &SdeSpec,
    intervals: usize,
    n_paths: u64,
    seed: u64,
    predicate: P,
) -> Result<(u64, u64), SimError>
where
    P: Fn(&[f64]) -> bool + Sync,
{
    let counts = count_hits(spec, intervals, n_paths, seed, 1, |nodes, out| out[0] = predicate(nodes))?;
    Ok((counts.0[0], counts.1))
}

/// Shared driver: simulates each path once and lets `test` mark up to `k`
/// events on it.
fn count_hits<T>(
    spec: &SdeSpec,
    intervals: usize,
    n_paths: u64,
    seed: u64,
    k: usize,
    test: T,
) -> Result<(Vec<u64>, u64), SimError>
where
    T: Fn(&[f64], &mut [bool]) + Sync,
{
    if intervals == 0 {
        return Err(SimError::Spec("grid needs at least one interval".into()));
    }
    let sim = Simulator::new(spec, spec.steps_for(intervals))?;
    let stride = sim.steps / intervals;
    const CHUNK: u64 = 4096;
    let chunks: Vec<u64> = (0..n_paths.div_ceil(CHUNK)).collect();
    let partial = chunks
        .par_iter()
        .map(|&c| -> Result<(Vec<u64>, u64), SimError> {
            let mut hits = vec![0u64; k];
            let mut diverged = 0;
            let mut values = Vec::with_capacity(sim.steps + 1);
            let mut nodes = Vec::with_capacity(intervals + 1);
            let mut flags = vec![false; k];
            for i in c * CHUNK..((c + 1) * CHUNK).min(n_paths) {
                match sim.run(seed, i, &mut values) {
                    Ok(()) => {
                        nodes.clear();
                        nodes.extend(values.iter().step_by(stride).copied());
                        flags.iter_mut().for_each(|f| *f = false);
                        test(&nodes, &mut flags);
                        for (h, &f) in hits.iter_mut().zip(&flags) {
                            *h += f as u64;
                        }
                    }
                    Err(SimError::Divergence(_)) => diverged += 1,
                    Err(e) => return Err(e),
                }
            }
            Ok((hits, diverged))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut hits = vec![0u64; k];
    let mut diverged = 0;
    for (h, d) in partial {
        for (a, b) in hits.iter_mut().zip(h) {
            *a += b;
        }
        diverged += d;
    }
    Ok((hits, diverged))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TubeEstimate {
    pub reference: PathGrid,
    pub epsilon: f64,
    pub n_paths: u64,
    pub hits: u64,
    pub diverged: u64,
    pub p_hat: f64,
    pub ci95_halfwidth: f64,
}

impl TubeEstimate {
    fn new(reference: PathGrid, epsilon: f64, n_paths: u64, hits: u64, diverged: u64) -> Self {
        let p_hat = if n_paths == 0 { 0.0 } else { hits as f64 / n_paths as f64 };
        TubeEstimate {
            reference,
            epsilon,
            n_paths,
            hits,
            diverged,
            p_hat,
            ci95_halfwidth: wald_halfwidth(p_hat, n_paths),
        }
    }

    pub fn ci95(&self) -> (f64, f64) {
        (self.p_hat - self.ci95_halfwidth, self.p_hat + self.ci95_halfwidth)
    }
}

pub fn wald_halfwidth(p: f64, n: u64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    1.96 * (p * (1.0 - p) / n as f64).sqrt()
}

fn in_tube(x: &[f64], z: &[f64], epsilon: f64) -> bool {
    x.iter().zip(z).all(|(a, b)| (a - b).abs() <= epsilon)
}

fn check_reference(spec: &SdeSpec, z: &PathGrid) -> Result<(), SimError> {
    if z.s() != spec.s || z.u() != spec.u {
        return Err(SimError::Spec(format!(
            "reference path lives on [{}, {}], simulation on [{}, {}]",
            z.s(),
            z.u(),
            spec.s,
            spec.u
        )));
    }
    Ok(())
}

/// Fraction of simulated paths within sup-norm distance `epsilon` of `z` at
/// the nodes of `z`.
pub fn tube_probability(
    spec: &SdeSpec,
    z: &PathGrid,
    epsilon: f64,
    n_paths: u64,
    seed: u64,
) -> Result<TubeEstimate, SimError> {
    check_reference(spec, z)?;
    let zv = z.values();
    let (hits, diverged) = estimate_probability(spec, z.n(), n_paths, seed, |x| in_tube(x, zv, epsilon))?;
    Ok(TubeEstimate::new(z.clone(), epsilon, n_paths, hits, diverged))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankEntry {
    /// Position in the input list.
    pub index: usize,
    pub action: f64,
    pub estimate: TubeEstimate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankReport {
    /// Sorted by decreasing `p_hat`; ties keep input order.
    pub entries: Vec<RankEntry>,
    /// Spearman correlation between `-action` and `p_hat`.
    pub spearman: f64,
}

/// Tube probabilities of all candidates from one set of simulated paths.
pub fn rank_paths(
    spec: &SdeSpec,
    candidates: &[PathGrid],
    epsilon: f64,
    n_paths: u64,
    seed: u64,
) -> Result<RankReport, SimError> {
    let Some(first) = candidates.first() else {
        return Ok(RankReport { entries: Vec::new(), spearman: f64::NAN });
    };
    for c in candidates {
        check_reference(spec, c)?;
        if c.n() != first.n() {
            return Err(SimError::Spec("candidates must share one grid".into()));
        }
    }
    let l = spec.lagrangian()?;
    let actions = candidates
        .iter()
        .map(|c| om_action(&l, c).map_err(|e| SimError::Domain(e.z)))
        .collect::<Result<Vec<_>, _>>()?;
    let refs: Vec<&[f64]> = candidates.iter().map(|c| c.values()).collect();
    let (hits, diverged) = count_hits(spec, first.n(), n_paths, seed, candidates.len(), |x, out| {
        for (o, z) in out.iter_mut().zip(&refs) {
            *o = in_tube(x, z, epsilon);
        }
    })?;
    let mut entries: Vec<RankEntry> = candidates
        .iter()
        .zip(actions)
        .zip(hits)
        .enumerate()
        .map(|(index, ((c, action), h))| RankEntry {
            index,
            action,
            estimate: TubeEstimate::new(c.clone(), epsilon, n_paths, h, diverged),
        })
        .collect();
    let neg_action: Vec<f64> = entries.iter().map(|e| -e.action).collect();
    let p: Vec<f64> = entries.iter().map(|e| e.estimate.p_hat).collect();
    let spearman = spearman(&neg_action, &p);
    entries.sort_by(|a, b| b.estimate.p_hat.total_cmp(&a.estimate.p_hat));
    Ok(RankReport { entries, spearman })
}

/// Average ranks (1-based), ties sharing the mean of their positions.
fn ranks(x: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..x.len()).collect();
    idx.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let mut r = vec![0.0; x.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && x[idx[j + 1]] == x[idx[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            r[k] = avg;
        }
        i = j + 1;
    }
    r
}

/// Spearman rank correlation; `NaN` when either input is constant.
pub fn spearman(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len(), "length mismatch");
    let (rx, ry) = (ranks(x), ranks(y));
    let n = x.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / n, ry.iter().sum::<f64>() / n);
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in rx.iter().zip(&ry) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    sxy / (sxx * syy).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(src: &str, c: f64, m: Option<StableJumpMeasure>) -> SdeSpec {
        SdeSpec::new(DriftModel::parse(src).unwrap(), c, m, 1.0, 0.0, 1.0)
    }

    #[test]
    fn deterministic_limit_decays() {
        let mut s = spec("-z", 0.0, None);
        s.em_step = 1e-4;
        let p = simulate_path(&s, 7).unwrap();
        assert_eq!(p.n(), 10_000);
        assert!((p.values()[10_000] - (-1.0f64).exp()).abs() < 1e-4);
    }

    #[test]
    fn same_seed_same_path() {
        let s = spec("z - z^3", 0.5, Some(StableJumpMeasure::new(0.5, 0.5).unwrap()));
        assert_eq!(simulate_path(&s, 3).unwrap(), simulate_path(&s, 3).unwrap());
        assert_ne!(simulate_path(&s, 3).unwrap(), simulate_path(&s, 4).unwrap());
    }

    #[test]
    fn extreme_tubes() {
        let s = spec("-z", 1.0, Some(StableJumpMeasure::new(0.5, 0.3).unwrap()));
        let z = PathGrid::linear(0.0, 1.0, 1.0, 0.0, 100).unwrap();
        let all = tube_probability(&s, &z, 1e6, 500, 1).unwrap();
        assert_eq!(all.p_hat, 1.0);
        assert_eq!(all.ci95_halfwidth, 0.0);
        let none = tube_probability(&s, &z, 0.0, 500, 1).unwrap();
        assert_eq!(none.p_hat, 0.0);
    }

    #[test]
    fn validation() {
        let mut s = spec("-z", 1.0, None);
        s.em_step = 0.5;
        assert!(simulate_path(&s, 0).is_err());
        let mut s = spec("-z", 1.0, None);
        s.delta = 1.0;
        assert!(simulate_path(&s, 0).is_err());
    }

    #[test]
    fn compensation_modes() {
        let m = StableJumpMeasure::new(0.5, 1.0).unwrap();
        let mut s = spec("-z", 1.0, Some(m));
        let full = s.compensator().unwrap();
        s.compensation = Compensation::SimulatedBand;
        let band = s.compensator().unwrap();
        assert_eq!(full, m.drift_constant());
        assert!(band < full && band > 0.9 * full);
        assert_eq!(spec("-z", 1.0, None).compensator().unwrap(), 0.0);
    }

    #[test]
    fn spearman_basics() {
        assert_eq!(spearman(&[1.0, 2.0, 3.0], &[10.0, 20.0, 30.0]), 1.0);
        assert_eq!(spearman(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]), -1.0);
        assert_eq!(ranks(&[2.0, 1.0, 2.0]), vec![2.5, 1.0, 2.5]);
        assert!(spearman(&[1.0, 1.0], &[1.0, 2.0]).is_nan());
    }

    #[test]
    fn identical_candidates_tie() {
        let s = spec("-z", 1.0, Some(StableJumpMeasure::new(0.5, 0.5).unwrap()));
        let z = PathGrid::linear(0.0, 1.0, 1.0, 0.5, 50).unwrap();
        let r = rank_paths(&s, &[z.clone(), z], 0.5, 2000, 9).unwrap();
        assert_eq!(r.entries[0].estimate.hits, r.entries[1].estimate.hits);
    }
}
