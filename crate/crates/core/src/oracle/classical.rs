use std::f64::consts::PI;

use num_complex::Complex64;

use super::GridFunction;
use crate::error::{Error, Result};

/// Trapezoidal integration of the classical FEL equation
///
/// ```text
/// h′(μ) = −iπg₀ ∫_0^μ ψ e^{iνψ} h(μ − ψ) dψ,  h(0) = 1
/// ```
///
/// on `steps` uniform intervals of [0, mu_max]. The memory integral is a
/// trapezoid sum, and since the kernel vanishes at ψ = 0 it only involves
/// earlier nodes, so the trapezoidal step for h stays explicit. Second order.
pub fn classical_fel_trapezoid(g0: f64, nu: f64, mu_max: f64, steps: usize) -> Result<GridFunction> {
    if !(g0.is_finite() && nu.is_finite()) {
        return Err(Error::InvalidInput("g0 and nu must be finite".into()));
    }
    if !(mu_max > 0.0 && mu_max.is_finite()) || steps == 0 {
        return Err(Error::InvalidInput("need mu_max > 0 and at least one step".into()));
    }
    let dt = mu_max / steps as f64;
    let coupling = Complex64::new(0.0, -PI * g0);
    let kernel: Vec<Complex64> = (0..=steps)
        .map(|j| {
            let psi = j as f64 * dt;
            Complex64::new(0.0, nu * psi).exp() * psi
        })
        .collect();
    let mut h = vec![Complex64::new(1.0, 0.0)];
    let mut slope = vec![Complex64::new(0.0, 0.0)];
    for i in 1..=steps {
        let memory: Complex64 = (1..i).map(|j| kernel[j] * h[i - j]).sum::<Complex64>() + kernel[i] * h[0] * 0.5;
        let next_slope = coupling * memory * dt;
        h.push(h[i - 1] + (slope[i - 1] + next_slope) * (0.5 * dt));
        slope.push(next_slope);
    }
    GridFunction::new(mu_max, h)
}

/// Richardson-extrapolated trapezoid solution (steps and 2·steps) on the
/// `steps`-interval grid of [0, mu_max].
pub fn classical_fel_reference(g0: f64, nu: f64, mu_max: f64, steps: usize) -> Result<GridFunction> {
    let coarse = classical_fel_trapezoid(g0, nu, mu_max, steps)?;
    let fine = classical_fel_trapezoid(g0, nu, mu_max, 2 * steps)?;
    let values = coarse
        .values()
        .iter()
        .zip(fine.values().iter().step_by(2))
        .map(|(&c, &f)| (f * 4.0 - c) / 3.0)
        .collect();
    GridFunction::new(mu_max, values)
}
