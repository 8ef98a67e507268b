use num_complex::Complex64;

use crate::error::{Error, Result};

/// Smallest number of grid intervals accepted.
pub const MIN_INTERVALS: usize = 16;

/// Samples f(t_i), t_i = i·step, i = 0..=M, on a uniform grid.
///
/// The value at t_0 may be non-finite (a singular Riemann–Liouville
/// solution); every other node must be finite.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    step: f64,
    values: Vec<Complex64>,
}

impl GridFunction {
    pub fn new(mu_max: f64, values: Vec<Complex64>) -> Result<Self> {
        if !(mu_max > 0.0 && mu_max.is_finite()) {
            return Err(Error::InvalidInput(format!("grid end must be finite and > 0, got {mu_max}")));
        }
        if values.len() < MIN_INTERVALS + 1 {
            return Err(Error::InvalidInput(format!(
                "grid needs at least {} intervals, got {}",
                MIN_INTERVALS,
                values.len().saturating_sub(1)
            )));
        }
        if values[1..].iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::InvalidInput("grid values must be finite away from t = 0".into()));
        }
        let step = mu_max / (values.len() - 1) as f64;
        Ok(Self { step, values })
    }

    /// Samples `f` at the M + 1 nodes of [0, mu_max].
    pub fn from_fn(mu_max: f64, intervals: usize, mut f: impl FnMut(f64) -> Complex64) -> Result<Self> {
        let step = mu_max / intervals as f64;
        Self::new(mu_max, (0..=intervals).map(|i| f(i as f64 * step)).collect())
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    /// Number of intervals M.
    pub fn intervals(&self) -> usize {
        self.values.len() - 1
    }

    pub fn mu_max(&self) -> f64 {
        self.step * self.intervals() as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        i as f64 * self.step
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// Every second node, on a grid of twice the step.
    pub(super) fn coarsen(&self) -> Self {
        Self {
            step: 2.0 * self.step,
            values: self.values.iter().step_by(2).copied().collect(),
        }
    }

    pub(super) fn map(&self, f: impl Fn(usize, Complex64) -> Complex64) -> Self {
        Self {
            step: self.step,
            values: self.values.iter().enumerate().map(|(i, &v)| f(i, v)).collect(),
        }
    }

    pub(super) fn check_index(&self, i: usize, min: usize) -> Result<()> {
        if i < min || i > self.intervals() {
            return Err(Error::InvalidInput(format!(
                "node index {i} must lie in {min}..={}",
                self.intervals()
            )));
        }
        Ok(())
    }

    /// Cubic Lagrange interpolation from the four nodes nearest to t.
    pub(super) fn interpolate(&self, t: f64) -> Complex64 {
        let m = self.intervals();
        let pos = (t / self.step).clamp(0.0, m as f64);
        let cell = (pos.floor() as usize).min(m - 1);
        let start = cell.saturating_sub(1).min(m - 3);
        (start..start + 4)
            .map(|j| {
                let w: f64 = (start..start + 4)
                    .filter(|&k| k != j)
                    .map(|k| (pos - k as f64) / (j as f64 - k as f64))
                    .product();
                self.values[j] * w
            })
            .sum()
    }
}
