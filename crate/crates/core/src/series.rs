//! Incomplete Pochhammer symbols and the series built on them: incomplete
//! Mittag-Leffler functions, the Prabhakar-type kernel series, and
//! incomplete Wright (Fox–Wright) functions.
//!
//! Every series is summed in the complex plane with a shared truncation
//! policy ([`TruncationControl`]) and returns a [`SeriesValue`] carrying an
//! error estimate. Terms are assembled in log space so that large gamma
//! factors in numerator and denominator cancel before exponentiation.

use num_complex::Complex64;

use crate::error::{domain, evaluation, Result};
use crate::special::{
    self, ln_gamma, ln_lower_incomplete_gamma, ln_upper_incomplete_gamma, GammaRatio,
};

/// Values with |value| below this are treated as zero by the convergence test.
pub const ABSOLUTE_FLOOR: f64 = 1e-300;

/// Truncation policy for the infinite series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationControl {
    pub rel_tol: f64,
    pub max_terms: usize,
    pub consecutive_small: usize,
}

impl Default for TruncationControl {
    fn default() -> Self {
        Self {
            rel_tol: 1e-12,
            max_terms: 500,
            consecutive_small: 3,
        }
    }
}

impl TruncationControl {
    pub fn new(rel_tol: f64, max_terms: usize, consecutive_small: usize) -> Result<Self> {
        let ctl = Self {
            rel_tol,
            max_terms,
            consecutive_small,
        };
        ctl.validate()?;
        Ok(ctl)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol.is_finite()) {
            return Err(domain("TruncationControl", format!("rel_tol must be > 0, got {}", self.rel_tol)));
        }
        if self.max_terms == 0 || self.consecutive_small == 0 {
            return Err(domain("TruncationControl", "max_terms and consecutive_small must be >= 1"));
        }
        Ok(())
    }

    /// Same policy with `max_terms` doubled.
    pub fn doubled(&self) -> Self {
        Self {
            max_terms: self.max_terms * 2,
            ..*self
        }
    }

    /// Policy for a nested inner series: tolerance tightened tenfold.
    pub fn inner(&self) -> Self {
        Self {
            rel_tol: self.rel_tol / 10.0,
            ..*self
        }
    }
}

/// A truncated series value with its diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesValue {
    pub value: Complex64,
    pub err_estimate: f64,
    pub terms_used: usize,
    pub converged: bool,
}

impl SeriesValue {
    pub fn exact(value: Complex64) -> Self {
        Self {
            value,
            err_estimate: 0.0,
            terms_used: 1,
            converged: true,
        }
    }
}

/// Sums `term(k)` for k = 0, 1, ... under `ctl`.
///
/// The closure returns the term and an absolute error already attached to
/// it (non-zero when the term is itself a truncated series). Summation
/// stops once `consecutive_small` successive terms are each at most
/// `rel_tol · |partial sum|`; the error estimate is the magnitude of the
/// first omitted term plus accumulated rounding and inner errors.
pub(crate) fn sum_series<F>(func: &'static str, ctl: &TruncationControl, mut term: F) -> Result<SeriesValue>
where
    F: FnMut(usize) -> Result<(Complex64, f64)>,
{
    let mut sum = Complex64::new(0.0, 0.0);
    let mut abs_sum = 0.0;
    let mut attached = 0.0;
    let mut small_run = 0;
    let mut last = 0.0;
    for k in 0..ctl.max_terms {
        let (t, e) = term(k)?;
        if !(t.re.is_finite() && t.im.is_finite()) {
            return Err(evaluation(func, format!("non-finite term at index {k}")));
        }
        sum += t;
        abs_sum += t.norm();
        attached += e;
        last = t.norm();
        if last <= ctl.rel_tol * sum.norm() {
            small_run += 1;
        } else {
            small_run = 0;
        }
        if small_run >= ctl.consecutive_small {
            let omitted = match term(k + 1) {
                Ok((next, next_err)) if next.re.is_finite() && next.im.is_finite() => next.norm() + next_err,
                _ => last,
            };
            let err = omitted + f64::EPSILON * abs_sum + attached;
            let mag = sum.norm();
            return Ok(SeriesValue {
                value: sum,
                err_estimate: err,
                terms_used: k + 1,
                converged: err <= ctl.rel_tol * mag || mag < ABSOLUTE_FLOOR,
            });
        }
    }
    Ok(SeriesValue {
        value: sum,
        err_estimate: last + f64::EPSILON * abs_sum + attached,
        terms_used: ctl.max_terms,
        converged: false,
    })
}

pub(crate) fn polar(ln_mag: f64, phase: f64) -> Complex64 {
    if ln_mag == f64::NEG_INFINITY {
        return Complex64::new(0.0, 0.0);
    }
    Complex64::from_polar(ln_mag.exp(), phase)
}

fn positive(func: &'static str, name: &str, v: f64) -> Result<()> {
    if !(v > 0.0 && v.is_finite()) {
        return Err(domain(func, format!("{name} must be finite and > 0, got {v}")));
    }
    Ok(())
}

fn cutoff(func: &'static str, x: f64) -> Result<()> {
    if !(x >= 0.0 && x.is_finite()) {
        return Err(domain(func, format!("cutoff x must be finite and >= 0, got {x}")));
    }
    Ok(())
}

/// Upper incomplete Pochhammer symbol [λ; x]_n = Γ(λ+n, x)/Γ(λ).
pub fn incomplete_pochhammer_upper(lambda: f64, n: usize, x: f64) -> Result<f64> {
    Ok(special::upper_pochhammer_ratio(lambda, n, x)?.value())
}

/// Lower incomplete Pochhammer symbol (λ; x)_n = γ(λ+n, x)/Γ(λ).
pub fn incomplete_pochhammer_lower(lambda: f64, n: usize, x: f64) -> Result<f64> {
    Ok(special::lower_pochhammer_ratio(lambda, n, x)?.value())
}

/// Which incomplete gamma function replaces the complete one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IncompleteKind {
    Upper,
    Lower,
}

impl IncompleteKind {
    fn ln_gamma(self, s: f64, x: f64) -> Result<f64> {
        match self {
            Self::Upper => ln_upper_incomplete_gamma(s, x),
            Self::Lower => ln_lower_incomplete_gamma(s, x),
        }
    }

    fn pochhammer(self, lambda: f64, n: usize, x: f64) -> Result<GammaRatio> {
        match self {
            Self::Upper => special::upper_pochhammer_ratio(lambda, n, x),
            Self::Lower => special::lower_pochhammer_ratio(lambda, n, x),
        }
    }
}

fn incomplete_ml(
    func: &'static str,
    kind: IncompleteKind,
    a: f64,
    b: f64,
    delta: f64,
    x: f64,
    z: Complex64,
    ctl: &TruncationControl,
) -> Result<SeriesValue> {
    positive(func, "a", a)?;
    positive(func, "b", b)?;
    positive(func, "delta", delta)?;
    cutoff(func, x)?;
    ctl.validate()?;
    let ln_z = z.norm().ln();
    let arg = z.arg();
    sum_series(func, ctl, |k| {
        if k > 0 && z.norm() == 0.0 {
            return Ok((Complex64::new(0.0, 0.0), 0.0));
        }
        let kf = k as f64;
        let poch = kind.pochhammer(delta, k, x)?.log_magnitude;
        let zk = if k == 0 { 0.0 } else { kf * ln_z };
        let ln_mag = poch + zk - ln_gamma(a * kf + b)? - ln_gamma(kf + 1.0)?;
        Ok((polar(ln_mag, kf * arg), 0.0))
    })
}

/// Upper incomplete Mittag-Leffler function
/// E^{[δ,x]}_{a,b}(z) = Σ_k [δ; x]_k z^k / (Γ(ak+b) k!).
pub fn incomplete_ml_upper(
    a: f64,
    b: f64,
    delta: f64,
    x: f64,
    z: Complex64,
    ctl: &TruncationControl,
) -> Result<SeriesValue> {
    incomplete_ml("incomplete_ml_upper", IncompleteKind::Upper, a, b, delta, x, z, ctl)
}

/// Lower incomplete Mittag-Leffler function
/// E^{(δ,x)}_{a,b}(z) = Σ_k (δ; x)_k z^k / (Γ(ak+b) k!).
pub fn incomplete_ml_lower(
    a: f64,
    b: f64,
    delta: f64,
    x: f64,
    z: Complex64,
    ctl: &TruncationControl,
) -> Result<SeriesValue> {
    incomplete_ml("incomplete_ml_lower", IncompleteKind::Lower, a, b, delta, x, z, ctl)
}

/// Prabhakar-type kernel series Σ_n [λ; x]_n z^n / (n! Γ(ρn + β)).
///
/// `lambda = 0` follows the exponent-zero convention: the series collapses
/// to its n = 0 term 1/Γ(β).
pub fn incomplete_prabhakar_ml(
    lambda: f64,
    rho: f64,
    beta: f64,
    x: f64,
    z: Complex64,
    ctl: &TruncationControl,
) -> Result<SeriesValue> {
    const FUNC: &str = "incomplete_prabhakar_ml";
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(domain(FUNC, format!("lambda must be finite and >= 0, got {lambda}")));
    }
    positive(FUNC, "rho", rho)?;
    positive(FUNC, "beta", beta)?;
    cutoff(FUNC, x)?;
    ctl.validate()?;
    if lambda == 0.0 {
        return Ok(SeriesValue::exact(Complex64::new(special::recip_gamma(beta), 0.0)));
    }
    incomplete_ml(FUNC, IncompleteKind::Upper, rho, beta, lambda, x, z, ctl)
}

/// Parameters of an incomplete Fox–Wright function
/// Σ_k [Γ or γ](a_1+α_1k, x) Π_{i≥2} Γ(a_i+α_ik) / ([Γ or γ](b_1+β_1k, x) Π_{j≥2} Γ(b_j+β_jk)) · z^k/k!.
///
/// The incomplete cutoff, when present, applies to the first pair of its row.
#[derive(Debug, Clone, PartialEq)]
pub struct WrightSpec {
    pub numerator: Vec<(f64, f64)>,
    pub denominator: Vec<(f64, f64)>,
    pub numerator_cutoff: Option<f64>,
    pub denominator_cutoff: Option<f64>,
    pub kind: IncompleteKind,
}

impl WrightSpec {
    /// Σβ_j − Σα_i.
    pub fn entirety_margin(&self) -> f64 {
        let b: f64 = self.denominator.iter().map(|p| p.1).sum();
        let a: f64 = self.numerator.iter().map(|p| p.1).sum();
        b - a
    }

    /// Whether Σβ_j − Σα_i > 1 holds. Diagnostic only; evaluation never depends on it.
    pub fn satisfies_entirety_condition(&self) -> bool {
        self.entirety_margin() > 1.0
    }

    fn validate(&self, func: &'static str) -> Result<()> {
        for &(p, q) in self.numerator.iter().chain(&self.denominator) {
            if !(p.is_finite() && q.is_finite()) {
                return Err(domain(func, "Wright parameters must be finite"));
            }
        }
        if self.numerator_cutoff.is_some() && self.numerator.is_empty() {
            return Err(domain(func, "numerator cutoff given without a numerator pair"));
        }
        if self.denominator_cutoff.is_some() && self.denominator.is_empty() {
            return Err(domain(func, "denominator cutoff given without a denominator pair"));
        }
        for x in self.numerator_cutoff.iter().chain(&self.denominator_cutoff) {
            cutoff(func, *x)?;
        }
        Ok(())
    }

    fn ln_row(&self, func: &'static str, row: &[(f64, f64)], cut: Option<f64>, k: usize) -> Result<f64> {
        let kf = k as f64;
        let mut acc = 0.0;
        for (i, &(p, q)) in row.iter().enumerate() {
            let arg = p + q * kf;
            if arg <= 0.0 {
                return Err(domain(func, format!("gamma argument {arg} <= 0 at k = {k}")));
            }
            acc += match (i, cut) {
                (0, Some(x)) => self.kind.ln_gamma(arg, x)?,
                _ => ln_gamma(arg)?,
            };
        }
        Ok(acc)
    }
}

pub(crate) fn wright_series(
    spec: &WrightSpec,
    z: Complex64,
    ln_prefactor: f64,
    ctl: &TruncationControl,
) -> Result<SeriesValue> {
    const FUNC: &str = "incomplete_wright";
    spec.validate(FUNC)?;
    ctl.validate()?;
    let ln_z = z.norm().ln();
    let arg = z.arg();
    sum_series(FUNC, ctl, |k| {
        if k > 0 && z.norm() == 0.0 {
            return Ok((Complex64::new(0.0, 0.0), 0.0));
        }
        let num = spec.ln_row(FUNC, &spec.numerator, spec.numerator_cutoff, k)?;
        let den = spec.ln_row(FUNC, &spec.denominator, spec.denominator_cutoff, k)?;
        if den == f64::NEG_INFINITY {
            return Err(evaluation(FUNC, format!("zero denominator at k = {k}")));
        }
        let kf = k as f64;
        let zk = if k == 0 { 0.0 } else { kf * ln_z };
        let ln_mag = ln_prefactor + num - den + zk - ln_gamma(kf + 1.0)?;
        Ok((polar(ln_mag, kf * arg), 0.0))
    })
}

/// Incomplete Wright function evaluated by direct summation.
pub fn incomplete_wright(spec: &WrightSpec, z: Complex64, ctl: &TruncationControl) -> Result<SeriesValue> {
    wright_series(spec, z, 0.0, ctl)
}

/// How the incomplete cutoff enters the k-th power of the kernel symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum KernelCutoff {
    /// Cutoff stays x for every k.
    #[default]
    Fixed,
    /// Cutoff becomes x·k.
    ScaledByIndex,
}

impl KernelCutoff {
    pub fn apply(self, x: f64, k: usize) -> f64 {
        match self {
            Self::Fixed => x,
            Self::ScaledByIndex => x * k as f64,
        }
    }
}

/// Wright form of the k-th kernel series:
/// (1/Γ(ck)) · ₁Ψ̄₁[(ck, 1; cutoff); (β, ρ); z].
///
/// With [`KernelCutoff::Fixed`] this coincides with
/// `incomplete_prabhakar_ml(c·k, ρ, β, x, z)`.
#[allow(clippy::too_many_arguments)]
pub fn wright_form_of_kernel(
    c: f64,
    k: usize,
    x: f64,
    rule: KernelCutoff,
    rho: f64,
    beta: f64,
    z: Complex64,
    ctl: &TruncationControl,
) -> Result<SeriesValue> {
    const FUNC: &str = "wright_form_of_kernel";
    let lambda = c * k as f64;
    positive(FUNC, "c·k", lambda)?;
    positive(FUNC, "rho", rho)?;
    positive(FUNC, "beta", beta)?;
    cutoff(FUNC, x)?;
    let spec = WrightSpec {
        numerator: vec![(lambda, 1.0)],
        denominator: vec![(beta, rho)],
        numerator_cutoff: Some(rule.apply(x, k)),
        denominator_cutoff: None,
        kind: IncompleteKind::Upper,
    };
    wright_series(&spec, z, -ln_gamma(lambda)?, ctl)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{E, LN_2};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol * b.norm().max(1e-300)
    }

    #[test]
    fn pochhammer_examples() {
        assert!((incomplete_pochhammer_upper(1.0, 0, 0.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((incomplete_pochhammer_upper(1.0, 0, LN_2).unwrap() - 0.5).abs() < 1e-15);
        assert!((incomplete_pochhammer_upper(2.0, 1, 1.0).unwrap() - 5.0 / E).abs() < 1e-14);
        assert_eq!(incomplete_pochhammer_lower(1.0, 0, 0.0).unwrap(), 0.0);
        assert!((incomplete_pochhammer_lower(1.0, 0, LN_2).unwrap() - 0.5).abs() < 1e-15);
        assert!((incomplete_pochhammer_lower(3.0, 2, 700.0).unwrap() - 12.0).abs() < 12e-12);
        assert!(incomplete_pochhammer_upper(0.0, 1, 1.0).is_err());
        assert!(incomplete_pochhammer_lower(-1.0, 1, 1.0).is_err());
    }

    #[test]
    fn ml_upper_examples() {
        let ctl = TruncationControl::default();
        let v = incomplete_ml_upper(1.0, 1.0, 1.0, 0.0, c(1.0, 0.0), &ctl).unwrap();
        assert!(v.converged);
        assert!(close(v.value, c(E, 0.0), 1e-13));
        let v = incomplete_ml_upper(0.7, 2.5, 1.3, 0.0, c(0.0, 0.0), &ctl).unwrap();
        assert!(close(v.value, c(1.0 / special::gamma(2.5).unwrap(), 0.0), 1e-14));
        let v = incomplete_ml_upper(1.0, 1.0, 2.0, 0.0, c(0.5, 0.0), &ctl).unwrap();
        assert!(close(v.value, c(1.5 * 0.5f64.exp(), 0.0), 1e-13));
    }

    #[test]
    fn ml_lower_examples() {
        let ctl = TruncationControl::default();
        let v = incomplete_ml_lower(0.5, 2.0, 1.5, 0.0, c(1.0, 0.0), &ctl).unwrap();
        assert_eq!(v.value, c(0.0, 0.0));
        assert!(v.converged);
        let v = incomplete_ml_lower(1.0, 1.0, 1.0, 700.0, c(1.0, 0.0), &ctl).unwrap();
        assert!(close(v.value, c(E, 0.0), 1e-12));
        let v = incomplete_ml_lower(1.0, 1.0, 1.0, LN_2, c(0.0, 0.0), &ctl).unwrap();
        assert!(close(v.value, c(0.5, 0.0), 1e-14));
    }

    #[test]
    fn ml_rejects_bad_parameters() {
        let ctl = TruncationControl::default();
        assert!(incomplete_ml_upper(0.0, 1.0, 1.0, 0.0, c(1.0, 0.0), &ctl).is_err());
        assert!(incomplete_ml_upper(1.0, -1.0, 1.0, 0.0, c(1.0, 0.0), &ctl).is_err());
        assert!(incomplete_ml_lower(1.0, 1.0, 1.0, -0.1, c(1.0, 0.0), &ctl).is_err());
        let bad = TruncationControl {
            rel_tol: 0.0,
            ..TruncationControl::default()
        };
        assert!(incomplete_ml_upper(1.0, 1.0, 1.0, 0.0, c(1.0, 0.0), &bad).is_err());
    }

    #[test]
    fn non_convergence_is_flagged() {
        let ctl = TruncationControl {
            max_terms: 5,
            ..TruncationControl::default()
        };
        let v = incomplete_ml_upper(1.0, 1.0, 1.0, 0.0, c(3.0, 0.0), &ctl).unwrap();
        assert!(!v.converged);
        assert_eq!(v.terms_used, 5);
        assert!(v.err_estimate > 0.0);
    }

    #[test]
    fn prabhakar_examples() {
        let ctl = TruncationControl::default();
        let v = incomplete_prabhakar_ml(0.0, 1.0, 2.0, 0.3, c(5.0, -2.0), &ctl).unwrap();
        assert_eq!(v.value, c(1.0, 0.0));
        let v = incomplete_prabhakar_ml(1.0, 1.0, 1.0, 0.0, c(1.0, 0.0), &ctl).unwrap();
        assert!(close(v.value, c(E, 0.0), 1e-13));
        let v = incomplete_prabhakar_ml(2.0, 1.0, 1.0, 1.0, c(0.0, 0.0), &ctl).unwrap();
        assert!(close(v.value, c(2.0 / E, 0.0), 1e-13));
        assert!(incomplete_prabhakar_ml(-1.0, 1.0, 1.0, 0.0, c(1.0, 0.0), &ctl).is_err());
    }

    #[test]
    fn wright_examples() {
        let ctl = TruncationControl::default();
        let spec = WrightSpec {
            numerator: vec![(1.0, 1.0)],
            denominator: vec![(1.0, 1.0)],
            numerator_cutoff: Some(0.0),
            denominator_cutoff: None,
            kind: IncompleteKind::Upper,
        };
        let v = incomplete_wright(&spec, c(1.0, 0.0), &ctl).unwrap();
        assert!(close(v.value, c(E, 0.0), 1e-13));
        assert_eq!(spec.entirety_margin(), 0.0);
        assert!(!spec.satisfies_entirety_condition());

        let spec = WrightSpec {
            numerator: vec![(2.0, 1.0)],
            ..spec
        };
        let v = incomplete_wright(&spec, c(0.0, 0.0), &ctl).unwrap();
        assert!(close(v.value, c(1.0, 0.0), 1e-14));
    }

    #[test]
    fn wright_zero_denominator_is_reported() {
        let ctl = TruncationControl::default();
        let spec = WrightSpec {
            numerator: vec![(1.0, 1.0)],
            denominator: vec![(1.0, 1.0)],
            numerator_cutoff: None,
            denominator_cutoff: Some(0.0),
            kind: IncompleteKind::Lower,
        };
        let err = incomplete_wright(&spec, c(1.0, 0.0), &ctl).unwrap_err();
        assert!(err.to_string().contains("k = 0"), "{err}");
    }

    #[test]
    fn wright_negative_gamma_argument_is_domain_error() {
        let ctl = TruncationControl::default();
        let spec = WrightSpec {
            numerator: vec![(0.5, -1.0)],
            denominator: vec![(1.0, 1.0)],
            numerator_cutoff: None,
            denominator_cutoff: None,
            kind: IncompleteKind::Upper,
        };
        assert!(incomplete_wright(&spec, c(0.1, 0.0), &ctl).is_err());
    }

    #[test]
    fn wright_kernel_examples() {
        let ctl = TruncationControl::default();
        let v = wright_form_of_kernel(1.0, 1, 0.0, KernelCutoff::ScaledByIndex, 1.0, 1.0, c(1.0, 0.0), &ctl).unwrap();
        assert!(close(v.value, c(E, 0.0), 1e-13));
        let v = wright_form_of_kernel(2.0, 1, 0.0, KernelCutoff::ScaledByIndex, 1.0, 1.0, c(0.5, 0.0), &ctl).unwrap();
        assert!(close(v.value, c(1.5 * 0.5f64.exp(), 0.0), 1e-13));
        // z = 0: Γ(ck, xk)/(Γ(ck)Γ(β)) with c=1.5, k=2, x=0.4, β=2.5
        let v = wright_form_of_kernel(1.5, 2, 0.4, KernelCutoff::ScaledByIndex, 0.7, 2.5, c(0.0, 0.0), &ctl).unwrap();
        let want = special::gamma_q(3.0, 0.8).unwrap() / special::gamma(2.5).unwrap();
        assert!(close(v.value, c(want, 0.0), 1e-13));
        assert!(wright_form_of_kernel(1.0, 0, 0.0, KernelCutoff::Fixed, 1.0, 1.0, c(1.0, 0.0), &ctl).is_err());
    }

    #[test]
    fn wright_kernel_fixed_cutoff_matches_prabhakar() {
        let ctl = TruncationControl::default();
        for &(cc, k, x, rho, beta, z) in &[
            (1.0, 1usize, 0.5, 1.0, 2.0, c(0.3, 1.2)),
            (0.8, 3, 1.2, 0.5, 1.5, c(-1.0, 0.5)),
            (2.0, 2, 0.1, 1.5, 3.25, c(0.0, 2.0)),
        ] {
            let w = wright_form_of_kernel(cc, k, x, KernelCutoff::Fixed, rho, beta, z, &ctl).unwrap();
            let p = incomplete_prabhakar_ml(cc * k as f64, rho, beta, x, z, &ctl).unwrap();
            assert!(close(w.value, p.value, 1e-10), "{w:?} vs {p:?}");
        }
    }
}
