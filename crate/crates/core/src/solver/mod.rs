//! Series solution of the generalized FEL equation
//!
//! ```text
//! D^a h(μ) = ω ∫_0^μ t^{b-1} E^{[c;x]}_{ρ,b}(iζ t^ρ) h(μ - t) dt + δ g(μ)
//! ```
//!
//! for Riemann–Liouville data D^{a−r}h(0) = b_r (r = 1..n) or Caputo data
//! h^{(r)}(0) = a_r (r = 0..n−1), n = ⌈a⌉. The solution is
//!
//! ```text
//! h(μ) = Σ_r b_r y_r(μ) + δ ∫_0^μ ℵ(μ − t) g(t) dt
//! ```
//!
//! where y_r and the resolvent kernel ℵ are double series in (k, n) built
//! from powers of the kernel's Laplace symbol s^{−b} P(iζ s^{−ρ}),
//! P(w) = Σ_n [c;x]_n w^n / n!.

mod forcing;
mod quadrature;
mod tables;

use num_complex::Complex64;

pub use forcing::{Forcing, SampledForcing};

use crate::error::{domain, Error, Result};
use crate::series::{KernelCutoff, SeriesValue, TruncationControl};
use tables::Tables;

const CONVOLUTION_ABS_TOL: f64 = 1e-13;
const CONVOLUTION_REL_TOL: f64 = 1e-11;
const CONVOLUTION_MAX_PANELS: usize = 400;

/// Parameters of the equation. Real except for the coupling ω and the forcing weight δ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FelParameters {
    /// Fractional order a > 0.
    pub a: f64,
    /// Kernel exponent b > 0.
    pub b_kernel: f64,
    /// Incomplete parameter c ≥ 0.
    pub c: f64,
    pub rho: f64,
    pub zeta: f64,
    pub omega: Complex64,
    pub delta: Complex64,
    /// Incomplete cutoff x ≥ 0.
    pub x_cut: f64,
}

impl FelParameters {
    /// The classical FEL equation h′ = −iπg₀ ∫_0^μ ψ e^{iνψ} h(μ−ψ) dψ.
    pub fn classical(g0: f64, nu: f64) -> Self {
        Self {
            a: 1.0,
            b_kernel: 2.0,
            c: 2.0,
            rho: 1.0,
            zeta: nu,
            omega: Complex64::new(0.0, -std::f64::consts::PI * g0),
            delta: Complex64::new(0.0, 0.0),
            x_cut: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        const FUNC: &str = "FelParameters";
        let positive = [("a", self.a), ("b_kernel", self.b_kernel), ("rho", self.rho)];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(domain(FUNC, format!("{name} must be finite and > 0, got {v}")));
            }
        }
        for (name, v) in [("c", self.c), ("x_cut", self.x_cut)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(domain(FUNC, format!("{name} must be finite and >= 0, got {v}")));
            }
        }
        let finite = |z: Complex64| z.re.is_finite() && z.im.is_finite();
        if !self.zeta.is_finite() || !finite(self.omega) || !finite(self.delta) {
            return Err(domain(FUNC, "zeta, omega and delta must be finite"));
        }
        Ok(())
    }

    /// n = ⌈a⌉, the number of initial values.
    pub fn order(&self) -> usize {
        self.a.ceil() as usize
    }
}

/// Initial data: Riemann–Liouville values b_1..b_n or Caputo values a_0..a_{n−1}.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialData {
    RiemannLiouville(Vec<Complex64>),
    Caputo(Vec<Complex64>),
}

impl InitialData {
    pub fn coefficients(&self) -> &[Complex64] {
        match self {
            Self::RiemannLiouville(c) | Self::Caputo(c) => c,
        }
    }

    fn check(&self, n: usize) -> Result<()> {
        let c = self.coefficients();
        if c.len() != n {
            return Err(Error::InvalidInput(format!(
                "expected {n} initial values for order {n}, got {}",
                c.len()
            )));
        }
        if c.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::InvalidInput("initial values must be finite".into()));
        }
        Ok(())
    }
}

/// How the k-th power of the kernel symbol P(w) is formed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum KernelPower {
    /// Exact k-fold Cauchy power of the coefficients [c;x]_n / n!.
    #[default]
    Convolution,
    /// Coefficients [ck; x_k]_n / n!, with x_k chosen by the cutoff rule.
    /// Agrees with `Convolution` only when x = 0.
    ScaledParameter(KernelCutoff),
}

/// One sample of the solution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolutionEvaluation {
    pub mu: f64,
    pub h: Complex64,
    pub err_estimate: f64,
    pub outer_terms_used: usize,
    pub converged: bool,
}

/// Evaluator for one parameter set. Immutable apart from an internal
/// coefficient cache; safe to share across threads.
#[derive(Debug)]
pub struct FelSolver {
    params: FelParameters,
    ctl: TruncationControl,
    power: KernelPower,
    tables: Tables,
}

impl FelSolver {
    pub fn new(params: FelParameters, ctl: TruncationControl) -> Result<Self> {
        Self::with_kernel_power(params, ctl, KernelPower::default())
    }

    pub fn with_kernel_power(params: FelParameters, ctl: TruncationControl, power: KernelPower) -> Result<Self> {
        params.validate()?;
        ctl.validate()?;
        Ok(Self {
            params,
            ctl,
            power,
            tables: Tables::new(params, power, ctl),
        })
    }

    pub fn params(&self) -> &FelParameters {
        &self.params
    }

    pub fn control(&self) -> &TruncationControl {
        &self.ctl
    }

    pub fn kernel_power(&self) -> KernelPower {
        self.power
    }

    /// y_r for Riemann–Liouville data, r = 1..n.
    pub fn y_r_rl(&self, r: usize, mu: f64) -> Result<SeriesValue> {
        let n = self.params.order();
        if r == 0 || r > n {
            return Err(domain("y_r_rl", format!("r must lie in 1..={n}, got {r}")));
        }
        self.tables.time_series(self.params.a - r as f64, mu)
    }

    /// y_r for Caputo data, r = 0..n−1.
    pub fn y_r_caputo(&self, r: usize, mu: f64) -> Result<SeriesValue> {
        let n = self.params.order();
        if r >= n {
            return Err(domain("y_r_caputo", format!("r must lie in 0..{n}, got {r}")));
        }
        self.tables.time_series(r as f64, mu)
    }

    /// Resolvent kernel ℵ(u), shared by both kinds of initial data.
    pub fn kernel_aleph(&self, u: f64) -> Result<SeriesValue> {
        if !(u > 0.0 && u.is_finite()) {
            return Err(domain("kernel_aleph", format!("u must be finite and > 0, got {u}")));
        }
        self.tables.time_series(self.params.a - 1.0, u)
    }

    /// s^{−b} P(iζ s^{−ρ}), the Laplace transform of the kernel t^{b−1}E^{[c;x]}_{ρ,b}(iζt^ρ).
    pub fn kernel_laplace_symbol(&self, s: Complex64) -> Result<SeriesValue> {
        self.tables.kernel_symbol(s)
    }

    /// Laplace image H(s) of the solution, for a forcing with transform `forcing_image`.
    pub fn h_laplace_image(
        &self,
        init: &InitialData,
        forcing_image: impl Fn(Complex64) -> Complex64,
        s: Complex64,
    ) -> Result<SeriesValue> {
        let p = &self.params;
        init.check(p.order())?;
        let geometric = self.tables.laplace_series(s)?;
        let ln_s = s.ln();
        let pow = |e: f64| (ln_s * e).exp();
        let mut prefactor: Complex64 = match init {
            InitialData::RiemannLiouville(b) => b
                .iter()
                .enumerate()
                .map(|(i, &br)| br * pow(i as f64 - p.a))
                .sum(),
            InitialData::Caputo(a) => a.iter().enumerate().map(|(r, &ar)| ar * pow(-(r as f64) - 1.0)).sum(),
        };
        if p.delta != Complex64::new(0.0, 0.0) {
            prefactor += p.delta * forcing_image(s) * pow(-p.a);
        }
        Ok(SeriesValue {
            value: prefactor * geometric.value,
            err_estimate: prefactor.norm() * geometric.err_estimate,
            ..geometric
        })
    }

    /// δ ∫_0^μ ℵ(u) g(μ − u) du. Constant and polynomial forcings are summed
    /// exactly; otherwise by quadrature, with the u^{a−1} singularity removed
    /// by u = μ v^{1/a} when a < 1.
    pub fn forcing_convolution(&self, forcing: &Forcing, mu: f64) -> Result<SeriesValue> {
        if !(mu >= 0.0 && mu.is_finite()) {
            return Err(domain("forcing_convolution", format!("mu must be finite and >= 0, got {mu}")));
        }
        let delta = self.params.delta;
        if mu == 0.0 || delta == Complex64::new(0.0, 0.0) || forcing.is_zero() {
            return Ok(SeriesValue::exact(Complex64::new(0.0, 0.0)));
        }
        forcing.check_covers(mu)?;
        let a = self.params.a;
        let polynomial = match forcing {
            Forcing::Constant(c) => Some(std::slice::from_ref(c)),
            Forcing::Polynomial(c) => Some(c.as_slice()),
            _ => None,
        };
        if let Some(coefs) = polynomial {
            return self.polynomial_convolution(coefs, mu);
        }
        let mut series_ok = true;
        let mut terms = 0;
        let mut sample = |u: f64, jacobian: f64| -> Result<(Complex64, f64)> {
            if u <= 0.0 {
                return Ok((Complex64::new(0.0, 0.0), 0.0));
            }
            let k = self.kernel_aleph(u)?;
            series_ok &= k.converged;
            terms = terms.max(k.terms_used);
            let g = forcing.value((mu - u).max(0.0))?;
            Ok((k.value * g * jacobian, k.err_estimate * g.norm() * jacobian))
        };
        let q = if a < 1.0 {
            quadrature::integrate(
                |v| sample(mu * v.powf(1.0 / a), mu / a * v.powf(1.0 / a - 1.0)),
                0.0,
                1.0,
                CONVOLUTION_ABS_TOL,
                CONVOLUTION_REL_TOL,
                CONVOLUTION_MAX_PANELS,
            )?
        } else {
            quadrature::integrate(
                |u| sample(u, 1.0),
                0.0,
                mu,
                CONVOLUTION_ABS_TOL,
                CONVOLUTION_REL_TOL,
                CONVOLUTION_MAX_PANELS,
            )?
        };
        Ok(SeriesValue {
            value: delta * q.value,
            err_estimate: delta.norm() * (q.error + q.attached),
            terms_used: terms,
            converged: series_ok && q.converged,
        })
    }

    /// ∫_0^μ ℵ(u) (μ − u)^m du = m! · (series with leading exponent a + m).
    fn polynomial_convolution(&self, coefs: &[Complex64], mu: f64) -> Result<SeriesValue> {
        let delta = self.params.delta;
        let mut out = SeriesValue::exact(Complex64::new(0.0, 0.0));
        let mut factorial = 1.0;
        for (m, &cm) in coefs.iter().enumerate() {
            if m > 0 {
                factorial *= m as f64;
            }
            if cm == Complex64::new(0.0, 0.0) {
                continue;
            }
            let y = self.tables.time_series(self.params.a + m as f64, mu)?;
            let scale = delta * cm * factorial;
            out.value += scale * y.value;
            out.err_estimate += scale.norm() * y.err_estimate;
            out.terms_used = out.terms_used.max(y.terms_used);
            out.converged &= y.converged;
        }
        Ok(out)
    }

    /// h(μ) at one point.
    pub fn evaluate(&self, init: &InitialData, forcing: &Forcing, mu: f64) -> Result<SolutionEvaluation> {
        let n = self.params.order();
        init.check(n)?;
        let mut out = SolutionEvaluation {
            mu,
            h: Complex64::new(0.0, 0.0),
            err_estimate: 0.0,
            outer_terms_used: 0,
            converged: true,
        };
        let mut add = |coef: Complex64, y: SeriesValue| {
            out.h += coef * y.value;
            out.err_estimate += coef.norm() * y.err_estimate;
            out.outer_terms_used = out.outer_terms_used.max(y.terms_used);
            out.converged &= y.converged;
        };
        for (i, &coef) in init.coefficients().iter().enumerate() {
            if coef == Complex64::new(0.0, 0.0) {
                continue;
            }
            let y = match init {
                InitialData::RiemannLiouville(_) => self.y_r_rl(i + 1, mu)?,
                InitialData::Caputo(_) => self.y_r_caputo(i, mu)?,
            };
            add(coef, y);
        }
        add(Complex64::new(1.0, 0.0), self.forcing_convolution(forcing, mu)?);
        Ok(out)
    }

    /// Theorem-1 solution (Riemann–Liouville data) on a grid of μ values.
    pub fn solve_rl(&self, init: &InitialData, forcing: &Forcing, mu_grid: &[f64]) -> Result<Vec<SolutionEvaluation>> {
        if !matches!(init, InitialData::RiemannLiouville(_)) {
            return Err(Error::InvalidInput("solve_rl needs Riemann-Liouville initial data".into()));
        }
        mu_grid.iter().map(|&mu| self.evaluate(init, forcing, mu)).collect()
    }

    /// Theorem-2 solution (Caputo data) on a grid of μ values.
    pub fn solve_caputo(&self, init: &InitialData, forcing: &Forcing, mu_grid: &[f64]) -> Result<Vec<SolutionEvaluation>> {
        if !matches!(init, InitialData::Caputo(_)) {
            return Err(Error::InvalidInput("solve_caputo needs Caputo initial data".into()));
        }
        mu_grid.iter().map(|&mu| self.evaluate(init, forcing, mu)).collect()
    }
}
