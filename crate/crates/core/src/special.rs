//! Scalar building blocks: log-gamma, complete and incomplete gamma
//! functions, and the complete Pochhammer symbol.
//!
//! Everything that can overflow is available in logarithmic form. The
//! incomplete gamma functions switch between the power series (x < s + 1)
//! and the Legendre continued fraction (x ≥ s + 1); for very small `s`
//! with small `x` a cancellation-free expansion of Γ(s) − x^s/s is used.

use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::error::{domain, evaluation, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Number of ζ(k) − 1 values used by the expansion of ln Γ(1 + ε).
const ZETA_TERMS: usize = 48;

const SERIES_MAX_ITER: usize = 100_000;
const CF_MAX_ITER: usize = 20_000;
const FPMIN: f64 = 1e-300;

/// Magnitude of a (possibly huge) gamma-function product kept in log form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaRatio {
    pub log_magnitude: f64,
    pub sign: f64,
}

impl GammaRatio {
    pub fn positive(log_magnitude: f64) -> Self {
        Self {
            log_magnitude,
            sign: 1.0,
        }
    }

    /// The represented value; overflows to ±inf / underflows to 0 when unrepresentable.
    pub fn value(&self) -> f64 {
        self.sign * self.log_magnitude.exp()
    }
}

fn check_shape(func: &'static str, s: f64) -> Result<()> {
    if !s.is_finite() || s <= 0.0 {
        return Err(domain(func, format!("shape parameter must be finite and > 0, got {s}")));
    }
    Ok(())
}

fn check_cutoff(func: &'static str, x: f64) -> Result<()> {
    if !x.is_finite() || x < 0.0 {
        return Err(domain(func, format!("cutoff must be finite and >= 0, got {x}")));
    }
    Ok(())
}

/// ζ(k) − 1 for k = 0..ZETA_TERMS (entries 0 and 1 unused), via
/// Euler–Maclaurin summation with sixteen explicit terms.
fn zeta_minus_one() -> &'static [f64; ZETA_TERMS] {
    static TABLE: OnceLock<[f64; ZETA_TERMS]> = OnceLock::new();
    TABLE.get_or_init(|| {
        // B_2j / (2j)!
        const BERNOULLI_OVER_FACT: [f64; 5] = [
            1.0 / 12.0,
            -1.0 / 720.0,
            1.0 / 30240.0,
            -1.0 / 1209600.0,
            1.0 / 47900160.0,
        ];
        let n_cut = 16.0_f64;
        let mut table = [0.0; ZETA_TERMS];
        for (k, slot) in table.iter_mut().enumerate().skip(2) {
            let kf = k as f64;
            let mut acc = 0.0;
            for n in (2..16).rev() {
                acc += (n as f64).powf(-kf);
            }
            acc += n_cut.powf(1.0 - kf) / (kf - 1.0) + 0.5 * n_cut.powf(-kf);
            // rising factorial k (k+1) ... (k + 2j - 2)
            let mut rising = kf;
            for (j, b) in BERNOULLI_OVER_FACT.iter().enumerate() {
                if j > 0 {
                    rising *= (kf + 2.0 * j as f64 - 1.0) * (kf + 2.0 * j as f64);
                }
                acc += b * rising * n_cut.powf(-kf - 2.0 * j as f64 - 1.0);
            }
            *slot = acc;
        }
        table
    })
}

/// ln Γ(2 + ε) for |ε| ≤ 0.5, accurate in the relative sense near ε = 0.
fn ln_gamma_2p(eps: f64) -> f64 {
    let z = zeta_minus_one();
    let mut sum = 0.0;
    let mut pow = eps;
    for (k, zk) in z.iter().enumerate().skip(2) {
        pow *= eps;
        let term = zk * pow / k as f64;
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
        if term.abs() < 1e-18 * sum.abs().max(1e-300) {
            break;
        }
    }
    eps * (1.0 - EULER_GAMMA) + sum
}

/// ln Γ(1 + ε) for |ε| ≤ 0.5.
fn ln_gamma_1p(eps: f64) -> f64 {
    ln_gamma_2p(eps) - eps.ln_1p()
}

fn ln_gamma_stirling(s: f64) -> f64 {
    const C: [f64; 7] = [
        1.0 / 12.0,
        -1.0 / 360.0,
        1.0 / 1260.0,
        -1.0 / 1680.0,
        1.0 / 1188.0,
        -691.0 / 360360.0,
        1.0 / 156.0,
    ];
    let inv = 1.0 / s;
    let inv2 = inv * inv;
    let mut corr = 0.0;
    let mut p = inv;
    for c in C {
        corr += c * p;
        p *= inv2;
    }
    (s - 0.5) * s.ln() - s + LN_SQRT_2PI + corr
}

fn ln_gamma_unchecked(s: f64) -> f64 {
    if s < 0.5 {
        ln_gamma_1p(s) - s.ln()
    } else if s < 1.5 {
        ln_gamma_1p(s - 1.0)
    } else if s < 2.5 {
        ln_gamma_2p(s - 2.0)
    } else if s < 10.0 {
        let mut y = s;
        let mut prod = 1.0;
        while y >= 2.5 {
            y -= 1.0;
            prod *= y;
        }
        prod.ln() + ln_gamma_2p(y - 2.0)
    } else {
        ln_gamma_stirling(s)
    }
}

/// Natural logarithm of Γ(s) for s > 0.
pub fn ln_gamma(s: f64) -> Result<f64> {
    check_shape("ln_gamma", s)?;
    Ok(ln_gamma_unchecked(s))
}

/// Γ(s) for s > 0 (overflows to +inf beyond s ≈ 171.6).
pub fn gamma(s: f64) -> Result<f64> {
    Ok(ln_gamma(s)?.exp())
}

/// 1/Γ(s) for any real s, zero at the poles s = 0, −1, −2, ...
pub fn recip_gamma(s: f64) -> f64 {
    if s > 0.0 {
        return (-ln_gamma_unchecked(s)).exp();
    }
    if s == s.floor() {
        return 0.0;
    }
    // reflection: 1/Γ(s) = Γ(1 - s) sin(πs) / π
    (ln_gamma_unchecked(1.0 - s)).exp() * (PI * s).sin() / PI
}

/// Σ_{k≥0} x^k / ((s+1)(s+2)...(s+k)); γ(s,x) = x^s e^{-x} / s times this sum.
fn lower_series_sum(s: f64, x: f64) -> Result<f64> {
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..SERIES_MAX_ITER {
        term *= x / (s + k as f64);
        sum += term;
        if term < sum * 1e-17 {
            return Ok(sum);
        }
    }
    Err(evaluation("incomplete gamma series", format!("no convergence for s={s}, x={x}")))
}

/// Modified Lentz evaluation of the continued fraction with Γ(s,x) = e^{-x} x^s · cf.
fn upper_continued_fraction(s: f64, x: f64) -> Result<f64> {
    let mut b = x + 1.0 - s;
    let mut c = 1.0 / FPMIN;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..CF_MAX_ITER {
        let an = -(i as f64) * (i as f64 - s);
        b += 2.0;
        d = an * d + b;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = b + an / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < 1e-16 {
            return Ok(h);
        }
    }
    Err(evaluation(
        "incomplete gamma continued fraction",
        format!("no convergence for s={s}, x={x}"),
    ))
}

/// Γ(s,x) for small s and x < 1/4, written as
/// (Γ(1+s) − 1)/s − (x^s − 1)/s − x^s Σ_{k≥1} (−x)^k / (k!(s+k)).
fn upper_small_shape(s: f64, x: f64) -> f64 {
    let gamma_1p_m1 = ln_gamma_1p(s).exp_m1();
    let lnx = x.ln();
    let head = gamma_1p_m1 / s - (s * lnx).exp_m1() / s;
    let mut tail = 0.0;
    let mut pow = 1.0;
    for k in 1..200 {
        pow *= -x / k as f64;
        let term = pow / (s + k as f64);
        tail += term;
        if term.abs() < 1e-18 * tail.abs() {
            break;
        }
    }
    head - (s * lnx).exp() * tail
}

/// ln Γ(s, x), the log of the upper incomplete gamma function.
pub fn ln_upper_incomplete_gamma(s: f64, x: f64) -> Result<f64> {
    check_shape("upper_incomplete_gamma", s)?;
    check_cutoff("upper_incomplete_gamma", x)?;
    if x == 0.0 {
        return Ok(ln_gamma_unchecked(s));
    }
    if x >= s + 1.0 {
        let cf = upper_continued_fraction(s, x)?;
        return Ok(-x + s * x.ln() + cf.ln());
    }
    let lg = ln_gamma_unchecked(s);
    let ln_lower = s * x.ln() - x - s.ln() + lower_series_sum(s, x)?.ln();
    let p = (ln_lower - lg).exp();
    if p <= 0.9 {
        Ok(lg + (-p).ln_1p())
    } else if x >= 0.25 {
        let cf = upper_continued_fraction(s, x)?;
        Ok(-x + s * x.ln() + cf.ln())
    } else {
        Ok(upper_small_shape(s, x).ln())
    }
}

/// ln γ(s, x), the log of the lower incomplete gamma function (−inf at x = 0).
pub fn ln_lower_incomplete_gamma(s: f64, x: f64) -> Result<f64> {
    check_shape("lower_incomplete_gamma", s)?;
    check_cutoff("lower_incomplete_gamma", x)?;
    if x == 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    if x < s + 1.0 {
        return Ok(s * x.ln() - x - s.ln() + lower_series_sum(s, x)?.ln());
    }
    let lg = ln_gamma_unchecked(s);
    let cf = upper_continued_fraction(s, x)?;
    let q = (-x + s * x.ln() + cf.ln() - lg).exp();
    Ok(lg + (-q).ln_1p())
}

/// Γ(s, x) = ∫_x^∞ t^{s−1} e^{−t} dt.
pub fn upper_incomplete_gamma(s: f64, x: f64) -> Result<f64> {
    Ok(ln_upper_incomplete_gamma(s, x)?.exp())
}

/// γ(s, x) = ∫_0^x t^{s−1} e^{−t} dt.
pub fn lower_incomplete_gamma(s: f64, x: f64) -> Result<f64> {
    Ok(ln_lower_incomplete_gamma(s, x)?.exp())
}

/// Regularized upper incomplete gamma Q(s, x) = Γ(s, x)/Γ(s).
pub fn gamma_q(s: f64, x: f64) -> Result<f64> {
    Ok((ln_upper_incomplete_gamma(s, x)? - ln_gamma_unchecked(s)).exp())
}

/// Regularized lower incomplete gamma P(s, x) = γ(s, x)/Γ(s).
pub fn gamma_p(s: f64, x: f64) -> Result<f64> {
    Ok((ln_lower_incomplete_gamma(s, x)? - ln_gamma_unchecked(s)).exp())
}

/// Complete Pochhammer symbol (λ)_n = λ(λ+1)...(λ+n−1) as a finite product.
pub fn pochhammer(lambda: f64, n: usize) -> f64 {
    let mut p = 1.0;
    for j in 0..n {
        p *= lambda + j as f64;
    }
    p
}

/// Γ(λ + n, x) / Γ(λ) in log form; the upper incomplete Pochhammer symbol.
pub fn upper_pochhammer_ratio(lambda: f64, n: usize, x: f64) -> Result<GammaRatio> {
    check_shape("incomplete_pochhammer_upper", lambda)?;
    let num = ln_upper_incomplete_gamma(lambda + n as f64, x)?;
    Ok(GammaRatio::positive(num - ln_gamma_unchecked(lambda)))
}

/// γ(λ + n, x) / Γ(λ) in log form; the lower incomplete Pochhammer symbol.
pub fn lower_pochhammer_ratio(lambda: f64, n: usize, x: f64) -> Result<GammaRatio> {
    check_shape("incomplete_pochhammer_lower", lambda)?;
    let num = ln_lower_incomplete_gamma(lambda + n as f64, x)?;
    Ok(GammaRatio::positive(num - ln_gamma_unchecked(lambda)))
}
