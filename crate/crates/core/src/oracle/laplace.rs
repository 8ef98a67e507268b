use std::f64::consts::PI;

use num_complex::Complex64;

use super::quadrature::tanh_sinh;
use crate::error::{domain, evaluation, Result};

const SEGMENT_TOL: f64 = 1e-13;
const SEGMENT_FLOOR: f64 = 1e-15;
const TAIL_RATIO: f64 = 1e-14;
const MAX_SEGMENTS: usize = 64;

/// Truncated Laplace integral with an estimate of what was left out.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaplaceEstimate {
    pub value: Complex64,
    /// Magnitude of the last segment added; bounds the neglected tail for
    /// integrands of at most exponential growth below ℜ(s).
    pub tail_bound: f64,
    /// Summed quadrature error estimates of the segments.
    pub quadrature_error: f64,
    /// End of the integration range actually used.
    pub horizon: f64,
}

/// F(s) = ∫_0^∞ e^{−st} f(t) dt, integrated over [0, T₀], [T₀, 2T₀],
/// [2T₀, 4T₀], ... until a segment adds less than 1e-14 of the total.
/// Each segment is resolved to 1e-13 of itself or 1e-15 of the running
/// total, whichever is looser.
pub fn numerical_laplace<F>(mut f: F, s: Complex64) -> Result<LaplaceEstimate>
where
    F: FnMut(f64) -> Result<Complex64>,
{
    if !(s.re > 0.0 && s.re.is_finite() && s.im.is_finite()) {
        return Err(domain("numerical_laplace", format!("need Re(s) > 0, got {s}")));
    }
    let first = 1.0 / s.re;
    let mut lo = 0.0;
    let mut hi = first;
    let mut total = Complex64::new(0.0, 0.0);
    let mut quadrature_error = 0.0;
    for _ in 0..MAX_SEGMENTS {
        let floor = SEGMENT_FLOOR * total.norm();
        let est = tanh_sinh(|t, _, _| Ok((-s * t).exp() * f(t)?), lo, hi, SEGMENT_TOL, floor)?;
        let seg = est.value;
        total += seg;
        quadrature_error += est.error;
        if seg.norm() <= TAIL_RATIO * total.norm() {
            return Ok(LaplaceEstimate {
                value: total,
                tail_bound: seg.norm(),
                quadrature_error,
                horizon: hi,
            });
        }
        lo = hi;
        hi *= 2.0;
    }
    Err(evaluation("numerical_laplace", format!("integral not settled by t = {lo}")))
}

/// Fixed-Talbot inversion of F at t > 0 with `nodes` contour points.
pub fn talbot_invert<F>(f: F, t: f64, nodes: usize) -> Result<Complex64>
where
    F: Fn(Complex64) -> Complex64,
{
    if !(t > 0.0 && t.is_finite()) {
        return Err(domain("talbot_invert", format!("t must be finite and > 0, got {t}")));
    }
    if nodes < 2 {
        return Err(domain("talbot_invert", "need at least two contour nodes"));
    }
    let m = nodes as f64;
    let r = 2.0 * m / (5.0 * t);
    let mut acc = 0.5 * (r * t).exp() * f(Complex64::new(r, 0.0));
    for k in 1..nodes {
        let theta = k as f64 * PI / m;
        let cot = theta.cos() / theta.sin();
        let sk = Complex64::new(r * theta * cot, r * theta);
        let sigma = theta + (theta * cot - 1.0) * cot;
        let up = (sk * t).exp() * f(sk) * Complex64::new(1.0, sigma);
        let down = (sk.conj() * t).exp() * f(sk.conj()) * Complex64::new(1.0, -sigma);
        acc += 0.5 * (up + down);
    }
    let out = acc * (r / m);
    if !(out.re.is_finite() && out.im.is_finite()) {
        return Err(evaluation("talbot_invert", "non-finite value on the contour"));
    }
    Ok(out)
}
