use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PathError {
    #[error("time window [{s}, {u}] must satisfy s < u")]
    Window { s: f64, u: f64 },
    #[error("a path grid needs at least 2 intervals, got {0}")]
    TooFewIntervals(usize),
    #[error("path value at node {0} is not finite")]
    NonFinite(usize),
    #[error("times are not uniformly spaced at row {0}")]
    NonUniform(usize),
}

/// Uniform discretization of a path `z(t)` on `[s, u]`: `n + 1` node values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathGrid {
    s: f64,
    u: f64,
    values: Vec<f64>,
}

impl PathGrid {
    pub fn new(s: f64, u: f64, values: Vec<f64>) -> Result<Self, PathError> {
        if !(s < u) || !s.is_finite() || !u.is_finite() {
            return Err(PathError::Window { s, u });
        }
        if values.len() < 3 {
            return Err(PathError::TooFewIntervals(values.len().saturating_sub(1)));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(PathError::NonFinite(i));
        }
        Ok(PathGrid { s, u, values })
    }

    /// Straight line from `x0` to `x1` on `n` intervals.
    pub fn linear(s: f64, u: f64, x0: f64, x1: f64, n: usize) -> Result<Self, PathError> {
        let values = (0..=n)
            .map(|i| {
                let w = i as f64 / n as f64;
                (1.0 - w) * x0 + w * x1
            })
            .collect();
        PathGrid::new(s, u, values)
    }

    /// Samples `z` at the `n + 1` grid nodes.
    pub fn from_fn(s: f64, u: f64, n: usize, z: impl Fn(f64) -> f64) -> Result<Self, PathError> {
        let dt = (u - s) / n as f64;
        let values = (0..=n)
            .map(|i| if i == n { z(u) } else { z(s + i as f64 * dt) })
            .collect();
        PathGrid::new(s, u, values)
    }

    /// Builds a grid from `(t, z)` samples, checking uniform spacing.
    pub fn from_samples(samples: &[(f64, f64)]) -> Result<Self, PathError> {
        if samples.len() < 3 {
            return Err(PathError::TooFewIntervals(samples.len().saturating_sub(1)));
        }
        let s = samples[0].0;
        let u = samples[samples.len() - 1].0;
        let n = samples.len() - 1;
        let dt = (u - s) / n as f64;
        for (i, &(t, _)) in samples.iter().enumerate() {
            if (t - (s + i as f64 * dt)).abs() > 1e-9 * (1.0 + t.abs()).max(dt) {
                return Err(PathError::NonUniform(i));
            }
        }
        PathGrid::new(s, u, samples.iter().map(|p| p.1).collect())
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn u(&self) -> f64 {
        self.u
    }

    /// Number of intervals.
    pub fn n(&self) -> usize {
        self.values.len() - 1
    }

    pub fn dt(&self) -> f64 {
        (self.u - self.s) / self.n() as f64
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn t(&self, i: usize) -> f64 {
        if i == self.n() {
            self.u
        } else {
            self.s + i as f64 * self.dt()
        }
    }

    pub fn times(&self) -> Vec<f64> {
        (0..=self.n()).map(|i| self.t(i)).collect()
    }

    /// Replaces the interior nodes, keeping the boundary values.
    pub fn with_interior(&self, interior: &[f64]) -> Result<Self, PathError> {
        assert_eq!(interior.len(), self.n() - 1, "interior length mismatch");
        let mut values = self.values.clone();
        values[1..self.n()].copy_from_slice(interior);
        PathGrid::new(self.s, self.u, values)
    }

    /// Max-norm distance to another grid on the same nodes.
    pub fn max_distance(&self, other: &PathGrid) -> f64 {
        assert_eq!(self.values.len(), other.values.len(), "grid size mismatch");
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Piecewise-linear interpolation.
    pub fn interpolate(&self, t: f64) -> f64 {
        let x = ((t - self.s) / self.dt()).clamp(0.0, self.n() as f64);
        let i = (x.floor() as usize).min(self.n() - 1);
        let w = x - i as f64;
        (1.0 - w) * self.values[i] + w * self.values[i + 1]
    }

    /// Resamples onto a coarser grid whose nodes coincide with ours.
    pub fn subsample(&self, n: usize) -> Option<PathGrid> {
        if n == 0 || self.n() % n != 0 {
            return None;
        }
        let stride = self.n() / n;
        let values = self.values.iter().step_by(stride).copied().collect();
        PathGrid::new(self.s, self.u, values).ok()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(PathGrid::new(1.0, 1.0, vec![0.0; 3]).is_err());
        assert!(PathGrid::new(0.0, 1.0, vec![0.0; 2]).is_err());
        assert!(PathGrid::new(0.0, 1.0, vec![0.0, f64::NAN, 0.0]).is_err());
        let g = PathGrid::linear(0.0, 2.0, -1.0, 1.0, 4).unwrap();
        assert_eq!(g.values(), &[-1.0, -0.5, 0.0, 0.5, 1.0]);
        assert_eq!(g.dt(), 0.5);
        assert_eq!(g.t(4), 2.0);
    }

    #[test]
    fn samples_must_be_uniform() {
        let ok = [(0.0, 1.0), (0.5, 2.0), (1.0, 3.0)];
        assert!(PathGrid::from_samples(&ok).is_ok());
        let bad = [(0.0, 1.0), (0.3, 2.0), (1.0, 3.0)];
        assert_eq!(PathGrid::from_samples(&bad), Err(PathError::NonUniform(1)));
    }

    #[test]
    fn subsample_and_interpolate() {
        let g = PathGrid::from_fn(0.0, 1.0, 100, |t| t * t).unwrap();
        let c = g.subsample(10).unwrap();
        assert_eq!(c.n(), 10);
        assert_eq!(c.values()[5], g.values()[50]);
        assert!(g.subsample(7).is_none());
        assert!((g.interpolate(0.505) - 0.505 * 0.505).abs() < 1e-4);
    }
}
