//! Symmetric tridiagonal matrices: LDLᵀ solves, Sturm counts, extreme eigenpairs.

#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiagonal {
    diag: Vec<f64>,
    off: Vec<f64>,
}

/// `A = L D Lᵀ` with unit lower-bidiagonal `L`.
#[derive(Debug, Clone)]
pub struct Ldl {
    d: Vec<f64>,
    l: Vec<f64>,
}

impl SymTridiagonal {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Self {
        assert_eq!(off.len() + 1, diag.len().max(1), "off-diagonal length");
        SymTridiagonal { diag, off }
    }

    /// `a` on the diagonal, `b` off it.
    pub fn constant(n: usize, a: f64, b: f64) -> Self {
        SymTridiagonal::new(vec![a; n], vec![b; n.saturating_sub(1)])
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn off(&self) -> &[f64] {
        &self.off
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        match i.abs_diff(j) {
            0 => self.diag[i],
            1 => self.off[i.min(j)],
            _ => 0.0,
        }
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let mut y = self.diag[i] * x[i];
                if i > 0 {
                    y += self.off[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    y += self.off[i] * x[i + 1];
                }
                y
            })
            .collect()
    }

    /// Factorization of `A - shift·I`. `None` on an exactly zero pivot.
    pub fn factor_shifted(&self, shift: f64) -> Option<Ldl> {
        let n = self.dim();
        let mut d = Vec::with_capacity(n);
        let mut l = Vec::with_capacity(n.saturating_sub(1));
        for i in 0..n {
            let mut di = self.diag[i] - shift;
            if i > 0 {
                let li = self.off[i - 1] / d[i - 1];
                di -= li * self.off[i - 1];
                l.push(li);
            }
            if di == 0.0 || !di.is_finite() {
                return None;
            }
            d.push(di);
        }
        Some(Ldl { d, l })
    }

    pub fn factor(&self) -> Option<Ldl> {
        self.factor_shifted(0.0)
    }

    /// Number of eigenvalues strictly below `x`.
    pub fn count_below(&self, x: f64) -> usize {
        let mut count = 0;
        let mut q = 1.0;
        for i in 0..self.dim() {
            let b2 = if i > 0 { self.off[i - 1].powi(2) } else { 0.0 };
            q = self.diag[i] - x - if i > 0 { b2 / q } else { 0.0 };
            if q == 0.0 {
                q = -f64::EPSILON * (self.diag[i].abs() + x.abs() + 1.0);
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn gershgorin(&self) -> (f64, f64) {
        let n = self.dim();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let r = if i > 0 { self.off[i - 1].abs() } else { 0.0 }
                + if i + 1 < n { self.off[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    /// Smallest eigenvalue by Sturm bisection.
    pub fn min_eigenvalue(&self) -> f64 {
        let (mut lo, mut hi) = self.gershgorin();
        let scale = lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE);
        while hi - lo > 4.0 * f64::EPSILON * scale {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) >= 1 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Smallest eigenpair; the eigenvector has unit Euclidean norm.
    pub fn min_eigenpair(&self) -> (f64, Vec<f64>) {
        let n = self.dim();
        let lambda = self.min_eigenvalue();
        let (lo, hi) = self.gershgorin();
        let mut eps = 1e-10 * (hi - lo).abs().max(1e-300);
        let ldl = loop {
            if let Some(f) = self.factor_shifted(lambda - eps) {
                break f;
            }
            eps *= 2.0;
        };
        let mut v: Vec<f64> = (0..n).map(|i| 1.0 + 0.01 * (i as f64).sin()).collect();
        for _ in 0..6 {
            v = ldl.solve(&v);
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            v.iter_mut().for_each(|x| *x /= norm);
        }
        (lambda, v)
    }
}

impl Ldl {
    pub fn pivots(&self) -> &[f64] {
        &self.d
    }

    pub fn negative_pivots(&self) -> usize {
        self.d.iter().filter(|&&d| d < 0.0).count()
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.d.len();
        let mut y = b.to_vec();
        for i in 1..n {
            y[i] -= self.l[i - 1] * y[i - 1];
        }
        for i in 0..n {
            y[i] /= self.d[i];
        }
        for i in (0..n.saturating_sub(1)).rev() {
            y[i] -= self.l[i] * y[i + 1];
        }
        y
    }
}
