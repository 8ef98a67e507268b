use num_complex::Complex64;

use crate::error::{Error, Result};

/// Forcing g(μ) on the right-hand side.
#[derive(Debug, Clone, PartialEq)]
pub enum Forcing {
    Constant(Complex64),
    /// amplitude · e^{iνμ}
    ExpInu { amplitude: Complex64, nu: f64 },
    /// Σ_j c_j μ^j
    Polynomial(Vec<Complex64>),
    Sampled(SampledForcing),
}

impl Forcing {
    pub fn zero() -> Self {
        Self::Constant(Complex64::new(0.0, 0.0))
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Self::Constant(c) => *c == Complex64::new(0.0, 0.0),
            Self::ExpInu { amplitude, .. } => *amplitude == Complex64::new(0.0, 0.0),
            Self::Polynomial(c) => c.iter().all(|v| *v == Complex64::new(0.0, 0.0)),
            Self::Sampled(s) => s.values.iter().all(|v| *v == Complex64::new(0.0, 0.0)),
        }
    }

    /// g(t). Sampled forcings are interpolated and must cover t.
    pub fn value(&self, t: f64) -> Result<Complex64> {
        Ok(match self {
            Self::Constant(c) => *c,
            Self::ExpInu { amplitude, nu } => amplitude * Complex64::new(0.0, nu * t).exp(),
            Self::Polynomial(c) => c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &cj| acc * t + cj),
            Self::Sampled(s) => {
                s.check_covers(t)?;
                s.interpolate(t)
            }
        })
    }

    /// Laplace transform G(s) for the analytic families; `None` for sampled data.
    pub fn laplace(&self, s: Complex64) -> Option<Complex64> {
        match self {
            Self::Constant(c) => Some(c / s),
            Self::ExpInu { amplitude, nu } => Some(amplitude / (s - Complex64::new(0.0, *nu))),
            Self::Polynomial(c) => {
                let mut factorial = 1.0;
                let mut power = s;
                let mut acc = Complex64::new(0.0, 0.0);
                for (j, &cj) in c.iter().enumerate() {
                    if j > 0 {
                        factorial *= j as f64;
                        power *= s;
                    }
                    acc += cj * factorial / power;
                }
                Some(acc)
            }
            Self::Sampled(_) => None,
        }
    }

    pub(crate) fn check_covers(&self, mu: f64) -> Result<()> {
        match self {
            Self::Sampled(s) => s.check_covers(mu).and_then(|_| s.check_covers(0.0)),
            _ => Ok(()),
        }
    }
}

/// Forcing known on a strictly increasing grid, interpolated by local cubics.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledForcing {
    times: Vec<f64>,
    values: Vec<Complex64>,
}

impl SampledForcing {
    pub fn new(times: Vec<f64>, values: Vec<Complex64>) -> Result<Self> {
        if times.len() != values.len() || times.len() < 2 {
            return Err(Error::InvalidInput(format!(
                "sampled forcing needs matching time/value arrays of length >= 2, got {} and {}",
                times.len(),
                values.len()
            )));
        }
        if times.iter().any(|t| !t.is_finite()) || values.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::InvalidInput("sampled forcing contains non-finite entries".into()));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidInput("sampled forcing times must be strictly increasing".into()));
        }
        Ok(Self { times, values })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    fn check_covers(&self, t: f64) -> Result<()> {
        let slack = 1e-12 * (1.0 + t.abs());
        let (lo, hi) = (self.times[0], self.times[self.times.len() - 1]);
        if t < lo - slack || t > hi + slack {
            return Err(Error::InvalidInput(format!(
                "sampled forcing covers [{lo}, {hi}] but is needed at {t}"
            )));
        }
        Ok(())
    }

    fn interpolate(&self, t: f64) -> Complex64 {
        let n = self.times.len();
        let width = n.min(4);
        let i = self.times.partition_point(|&x| x <= t);
        let start = i.saturating_sub(width / 2).min(n - width);
        let nodes = start..start + width;
        nodes
            .clone()
            .map(|j| {
                let weight: f64 = nodes
                    .clone()
                    .filter(|&m| m != j)
                    .map(|m| (t - self.times[m]) / (self.times[j] - self.times[m]))
                    .product();
                self.values[j] * weight
            })
            .sum()
    }
}
