//! Two-sided α-stable jump measure
//!
//! ```text
//! ν(dξ) = c1 |ξ|^(-1-α) 1{ξ>0} dξ + c2 |ξ|^(-1-α) 1{ξ<0} dξ
//! c1 = k_α (1+β)/2,  c2 = k_α (1-β)/2,  k_α = α(1-α) / (Γ(2-α) cos(πα/2))
//! ```
//!
//! restricted to `0 < α < 1`, where the small-jump mean `∫_{|ξ|<1} ξ ν(dξ)` is
//! finite, plus a compound-Poisson sampler for the band `δ ≤ |ξ| < 1`.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LevyError {
    #[error("stability index alpha = {0} must lie in (0, 1)")]
    Alpha(f64),
    #[error("skewness beta = {0} must lie in [-1, 1]")]
    Beta(f64),
    #[error("invalid band [{lo}, {hi}): need 0 < lo <= hi <= 1")]
    Band { lo: f64, hi: f64 },
    #[error("truncation delta = {0} must lie in (0, 1)")]
    Truncation(f64),
    #[error("horizon T = {0} must be non-negative and finite")]
    Horizon(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StableJumpMeasure {
    alpha: f64,
    beta: f64,
    k_alpha: f64,
    c1: f64,
    c2: f64,
}

impl StableJumpMeasure {
    pub fn new(alpha: f64, beta: f64) -> Result<Self, LevyError> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(LevyError::Alpha(alpha));
        }
        if !(-1.0..=1.0).contains(&beta) {
            return Err(LevyError::Beta(beta));
        }
        let k_alpha = alpha * (1.0 - alpha) / (gamma(2.0 - alpha) * (PI * alpha / 2.0).cos());
        Ok(StableJumpMeasure {
            alpha,
            beta,
            k_alpha,
            c1: k_alpha * (1.0 + beta) / 2.0,
            c2: k_alpha * (1.0 - beta) / 2.0,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn k_alpha(&self) -> f64 {
        self.k_alpha
    }

    /// Weight of positive jumps.
    pub fn c1(&self) -> f64 {
        self.c1
    }

    /// Weight of negative jumps.
    pub fn c2(&self) -> f64 {
        self.c2
    }

    /// Lebesgue density of ν at `xi != 0`.
    pub fn density(&self, xi: f64) -> f64 {
        let w = if xi > 0.0 { self.c1 } else { self.c2 };
        w * xi.abs().powf(-1.0 - self.alpha)
    }

    /// `d_ν = ∫_{|ξ|<1} ξ ν(dξ) = αβ / (Γ(2-α) cos(πα/2))`.
    pub fn drift_constant(&self) -> f64 {
        self.alpha * self.beta / (gamma(2.0 - self.alpha) * (PI * self.alpha / 2.0).cos())
    }

    /// `ν({lo ≤ |ξ| < hi})`.
    pub fn mass(&self, lo: f64, hi: f64) -> Result<f64, LevyError> {
        if !(lo > 0.0 && lo <= hi && hi <= 1.0) {
            return Err(LevyError::Band { lo, hi });
        }
        Ok((self.c1 + self.c2) * (lo.powf(-self.alpha) - hi.powf(-self.alpha)) / self.alpha)
    }

    /// `∫_{lo ≤ |ξ| < hi} ξ ν(dξ)`.
    pub fn band_mean(&self, lo: f64, hi: f64) -> Result<f64, LevyError> {
        if !(lo > 0.0 && lo <= hi && hi <= 1.0) {
            return Err(LevyError::Band { lo, hi });
        }
        let e = 1.0 - self.alpha;
        Ok((self.c1 - self.c2) * (hi.powf(e) - lo.powf(e)) / e)
    }
}

/// Free-function form of [`StableJumpMeasure::drift_constant`].
pub fn levy_drift_constant(m: &StableJumpMeasure) -> f64 {
    m.drift_constant()
}

/// Free-function form of [`StableJumpMeasure::mass`].
pub fn measure_mass(m: &StableJumpMeasure, lo: f64, hi: f64) -> Result<f64, LevyError> {
    m.mass(lo, hi)
}

/// Compound-Poisson sampler for the jumps of ν with `δ ≤ |ξ| < 1` on `[0, T]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmallJumpSampler {
    measure: StableJumpMeasure,
    delta: f64,
    horizon: f64,
    intensity: f64,
}

pub const DEFAULT_TRUNCATION: f64 = 1e-3;

impl SmallJumpSampler {
    pub fn new(measure: StableJumpMeasure, delta: f64, horizon: f64) -> Result<Self, LevyError> {
        if !(delta > 0.0 && delta < 1.0) {
            return Err(LevyError::Truncation(delta));
        }
        if !(horizon >= 0.0 && horizon.is_finite()) {
            return Err(LevyError::Horizon(horizon));
        }
        let intensity = measure.mass(delta, 1.0)?;
        Ok(SmallJumpSampler {
            measure,
            delta,
            horizon,
            intensity,
        })
    }

    pub fn measure(&self) -> &StableJumpMeasure {
        &self.measure
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    /// `λ_δ = ν({δ ≤ |ξ| < 1})`.
    pub fn intensity(&self) -> f64 {
        self.intensity
    }

    /// Inverse CDF of the magnitude law `∝ r^(-1-α)` on `[δ, 1)`.
    pub fn magnitude_quantile(&self, u: f64) -> f64 {
        let a = self.measure.alpha;
        let top = self.delta.powf(-a);
        (top - u * (top - 1.0)).powf(-1.0 / a)
    }

    /// CDF of the magnitude law, used by goodness-of-fit checks.
    pub fn magnitude_cdf(&self, r: f64) -> f64 {
        let a = self.measure.alpha;
        let top = self.delta.powf(-a);
        ((top - r.clamp(self.delta, 1.0).powf(-a)) / (top - 1.0)).clamp(0.0, 1.0)
    }

    /// Draws `(time, size)` pairs sorted by time.
    pub fn sample_with<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<(f64, f64)> {
        let mean = self.intensity * self.horizon;
        if mean <= 0.0 {
            return Vec::new();
        }
        let count = Poisson::new(mean).expect("positive Poisson mean").sample(rng) as usize;
        let p_pos = self.measure.c1 / (self.measure.c1 + self.measure.c2);
        let mut jumps: Vec<(f64, f64)> = (0..count)
            .map(|_| {
                let t = rng.random::<f64>() * self.horizon;
                let sign = if rng.random::<f64>() < p_pos { 1.0 } else { -1.0 };
                let r = self.magnitude_quantile(rng.random::<f64>());
                (t, sign * r)
            })
            .collect();
        jumps.sort_by(|a, b| a.0.total_cmp(&b.0));
        jumps
    }

    pub fn sample(&self, seed: u64) -> Vec<(f64, f64)> {
        self.sample_with(&mut ChaCha8Rng::seed_from_u64(seed))
    }
}

/// Free-function form of [`SmallJumpSampler::sample`].
pub fn sample_jumps(s: &SmallJumpSampler, rng_seed: u64) -> Vec<(f64, f64)> {
    s.sample(rng_seed)
}
