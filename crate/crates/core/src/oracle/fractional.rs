//! Grünwald–Letnikov and L1 discretisations of fractional derivatives on
//! uniform grids.

use num_complex::Complex64;

use super::GridFunction;
use crate::error::{domain, Error, Result};
use crate::special::gamma;

/// Smallest node index at which the derivative schemes are evaluated.
pub const MIN_NODE: usize = 4;

fn check_order(func: &'static str, a: f64) -> Result<()> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(domain(func, format!("order must be finite and > 0, got {a}")));
    }
    Ok(())
}

/// w_j = (−1)^j binom(a, j).
pub(super) fn gl_weights(a: f64, len: usize) -> Vec<f64> {
    let mut w = Vec::with_capacity(len);
    let mut cur = 1.0;
    for j in 0..len {
        if j > 0 {
            cur *= 1.0 - (a + 1.0) / j as f64;
        }
        w.push(cur);
    }
    w
}

/// h^{−a} Σ_{j≤i} w_j v_{i−j}; a non-finite v_0 counts as zero.
pub(super) fn gl_apply(values: &[Complex64], step: f64, a: f64, weights: &[f64], i: usize) -> Complex64 {
    let sum: Complex64 = (0..=i)
        .map(|j| {
            let v = values[i - j];
            if v.re.is_finite() && v.im.is_finite() {
                v * weights[j]
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .sum();
    sum * step.powf(-a)
}

/// b_j = (j+1)^{1−α} − j^{1−α}.
pub(super) fn l1_weights(alpha: f64, len: usize) -> Vec<f64> {
    (0..len)
        .map(|j| match j {
            0 => 1.0,
            _ => ((j + 1) as f64).powf(1.0 - alpha) - (j as f64).powf(1.0 - alpha),
        })
        .collect()
}

/// L1 approximation of the Caputo derivative of order α ∈ (0, 1] at node i.
pub(super) fn l1_apply(values: &[Complex64], step: f64, alpha: f64, weights: &[f64], i: usize) -> Complex64 {
    let sum: Complex64 = (0..i).map(|j| (values[i - j] - values[i - j - 1]) * weights[j]).sum();
    sum * step.powf(-alpha) / gamma(2.0 - alpha).expect("2 − α lies in [1, 2)")
}

/// Values on which the L1 scheme acts: f itself (order ≤ 1) with f_0 replaced
/// by `start[0]`, or difference-quotient derivatives (1 < order ≤ 2) with
/// f′(0) replaced by `start[1]`.
pub(super) fn caputo_samples(values: &[Complex64], step: f64, a: f64, start: &[Complex64]) -> Vec<Complex64> {
    let mut f = values.to_vec();
    f[0] = start[0];
    if a <= 1.0 {
        return f;
    }
    let m = f.len() - 1;
    (0..=m)
        .map(|j| match j {
            0 => start[1],
            _ if j < m => (f[j + 1] - f[j - 1]) / (2.0 * step),
            _ => (f[j] * 3.0 - f[j - 1] * 4.0 + f[j - 2]) / (2.0 * step),
        })
        .collect()
}

/// Order of the L1 operator applied to [`caputo_samples`].
pub(super) fn l1_order(a: f64) -> f64 {
    if a <= 1.0 {
        a
    } else {
        a - 1.0
    }
}

/// Riemann–Liouville derivative of order a at node `index` by the
/// Grünwald–Letnikov sum (first order in the step). A non-finite value at
/// t = 0 is treated as zero.
pub fn rl_fractional_derivative(f: &GridFunction, a: f64, index: usize) -> Result<Complex64> {
    check_order("rl_fractional_derivative", a)?;
    f.check_index(index, MIN_NODE)?;
    let w = gl_weights(a, index + 1);
    Ok(gl_apply(f.values(), f.step(), a, &w, index))
}

/// Caputo derivative of order a ≤ 2 at node `index` by the L1 scheme (order
/// 2 − a for a < 1). For 1 < a ≤ 2 the scheme acts on difference-quotient
/// derivatives, with f′(0) taken from a one-sided second-order difference.
pub fn caputo_fractional_derivative(f: &GridFunction, a: f64, index: usize) -> Result<Complex64> {
    check_order("caputo_fractional_derivative", a)?;
    if a > 2.0 {
        return Err(Error::Unsupported(format!("Caputo scheme supports orders up to 2, got {a}")));
    }
    f.check_index(index, MIN_NODE)?;
    let v = f.values();
    if !(v[0].re.is_finite() && v[0].im.is_finite()) {
        return Err(Error::InvalidInput("Caputo derivative needs a finite value at t = 0".into()));
    }
    let h = f.step();
    let slope = (v[1] * 4.0 - v[0] * 3.0 - v[2]) / (2.0 * h);
    let samples = caputo_samples(v, h, a, &[v[0], slope]);
    let alpha = l1_order(a);
    let w = l1_weights(alpha, index + 1);
    Ok(l1_apply(&samples, h, alpha, &w, index))
}
