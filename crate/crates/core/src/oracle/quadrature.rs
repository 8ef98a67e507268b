//! Quadrature rules used only by the verification routines.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;

use crate::error::Result;

/// Four-point Gauss–Legendre rule on [−1, 1].
pub(super) const GL4_NODES: [f64; 4] = [
    -0.861_136_311_594_052_6,
    -0.339_981_043_584_856_3,
    0.339_981_043_584_856_3,
    0.861_136_311_594_052_6,
];
pub(super) const GL4_WEIGHTS: [f64; 4] = [
    0.347_854_845_137_453_9,
    0.652_145_154_862_546_1,
    0.652_145_154_862_546_1,
    0.347_854_845_137_453_9,
];

const TANH_SINH_RANGE: f64 = 6.0;
const TANH_SINH_MAX_LEVEL: u32 = 9;

#[derive(Debug, Clone, Copy)]
pub(super) struct Estimate {
    pub value: Complex64,
    pub error: f64,
}

/// Double-exponential quadrature over [lo, hi]. The integrand receives the
/// abscissa together with its exact distances to both endpoints, so
/// endpoint singularities can be evaluated without cancellation. Refinement
/// stops once successive levels agree to max(rel_tol·|I|, abs_tol).
pub(super) fn tanh_sinh<F>(mut f: F, lo: f64, hi: f64, rel_tol: f64, abs_tol: f64) -> Result<Estimate>
where
    F: FnMut(f64, f64, f64) -> Result<Complex64>,
{
    let half = 0.5 * (hi - lo);
    let mut sample = |tau: f64| -> Result<Complex64> {
        let u = FRAC_PI_2 * tau.sinh();
        let from_lo = 2.0 * half / (1.0 + (-2.0 * u).exp());
        let from_hi = 2.0 * half / (1.0 + (2.0 * u).exp());
        if from_lo <= 0.0 || from_hi <= 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let weight = half * FRAC_PI_2 * tau.cosh() / u.cosh().powi(2);
        if weight == 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let x = if tau <= 0.0 { lo + from_lo } else { hi - from_hi };
        Ok(f(x, from_lo, from_hi)? * weight)
    };
    let mut step = 1.0;
    let mut sum = sample(0.0)?;
    let mut k = 1;
    while k as f64 * step <= TANH_SINH_RANGE {
        let t = k as f64 * step;
        sum += sample(t)? + sample(-t)?;
        k += 1;
    }
    let mut value = sum * step;
    let mut error = f64::INFINITY;
    for _ in 0..TANH_SINH_MAX_LEVEL {
        step *= 0.5;
        let mut k = 1;
        while k as f64 * step <= TANH_SINH_RANGE {
            let t = k as f64 * step;
            sum += sample(t)? + sample(-t)?;
            k += 2;
        }
        let next = sum * step;
        error = (next - value).norm();
        value = next;
        if error <= (rel_tol * value.norm()).max(abs_tol) {
            break;
        }
    }
    Ok(Estimate { value, error })
}

/// Fixed tanh-sinh rule on [0, 1] with the given step: (abscissa, weight)
/// pairs, the abscissae computed as distances from 0.
pub(super) fn tanh_sinh_rule(step: f64) -> Vec<(f64, f64)> {
    let count = (TANH_SINH_RANGE / step) as i64;
    (-count..=count)
        .filter_map(|k| {
            let tau = k as f64 * step;
            let u = FRAC_PI_2 * tau.sinh();
            let x = 1.0 / (1.0 + (-2.0 * u).exp());
            let w = 0.5 * step * FRAC_PI_2 * tau.cosh() / u.cosh().powi(2);
            (x > 0.0 && x < 1.0 && w > 0.0).then_some((x, w))
        })
        .collect()
}
