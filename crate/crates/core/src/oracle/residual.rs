//! Residuals of the integro-differential equation for a sampled solution.
//!
//! The left side is a Grünwald–Letnikov (Riemann–Liouville data) or L1
//! (Caputo data) derivative, Richardson-extrapolated from the grid and its
//! every-other-node subgrid. Initial data enter the schemes directly:
//! the singular part Σ b_r t^{a−r}/Γ(a−r+1), which the Riemann–Liouville
//! derivative annihilates, is split off analytically, and the Caputo scheme
//! uses the prescribed a_0 (and a_1) at t = 0. The right side is a product
//! quadrature of the Volterra convolution with the kernel evaluated by the
//! incomplete Prabhakar series.

use num_complex::Complex64;

use super::fractional::{caputo_samples, gl_apply, gl_weights, l1_apply, l1_order, l1_weights};
use super::quadrature::{tanh_sinh, tanh_sinh_rule, GL4_NODES, GL4_WEIGHTS};
use super::GridFunction;
use crate::error::{domain, Error, Result};
use crate::series::{incomplete_prabhakar_ml, TruncationControl};
use crate::solver::{FelParameters, Forcing, InitialData};
use crate::special::{gamma, recip_gamma};

/// Residual checks start at node index max(16, M/16), i.e. at μ_max/16 on
/// grids of 256 or more intervals; earlier nodes are dominated by the
/// start-up error of the schemes, and a start fixed in μ makes residuals of
/// refined grids comparable.
pub const FIRST_CHECK_NODE: usize = 16;
const FIRST_CHECK_FRACTION: usize = 16;
/// Spacing of the residual check nodes.
pub const CHECK_STRIDE: usize = 4;

const SINGULAR_PART_TOL: f64 = 1e-11;
const FIRST_CELL_STEP: f64 = 1.0 / 16.0;

/// Residual of the equation on the check nodes of a solution grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualReport {
    pub mu_points: Vec<f64>,
    /// Extrapolated fractional derivative D^a h.
    pub lhs: Vec<Complex64>,
    /// Volterra right-hand side ω∫K h + δg.
    pub rhs: Vec<Complex64>,
    pub max_abs_residual: f64,
    /// Worst initial-condition mismatch, relative to the solution scale.
    pub initial_residual: f64,
    /// max(equation residual relative to the larger side, initial residual).
    pub rel_residual: f64,
}

/// K(t) = t^{b−1} E^{[c;x]}_{ρ,b}(iζ t^ρ) without the power, i.e. the series factor.
fn kernel_series(p: &FelParameters, t: f64, ctl: &TruncationControl) -> Result<Complex64> {
    let z = Complex64::new(0.0, p.zeta * t.powf(p.rho));
    let v = incomplete_prabhakar_ml(p.c, p.rho, p.b_kernel, p.x_cut, z, ctl)?;
    if !v.converged {
        return Err(domain("volterra_rhs", format!("kernel series did not converge at t = {t}")));
    }
    Ok(v.value)
}

/// Quadrature points and kernel-weighted weights for every grid cell, so
/// that ∫_{cell j} K(t) F(t) dt ≈ Σ weight · F(point). The first cell,
/// where t^{b−1} may be singular, uses a tanh-sinh rule; the others use
/// four-point Gauss–Legendre.
struct KernelRule {
    cells: Vec<Vec<(f64, Complex64)>>,
}

impl KernelRule {
    fn new(p: &FelParameters, step: f64, cells: usize, ctl: &TruncationControl) -> Result<Self> {
        let b = p.b_kernel;
        let mut out = Vec::with_capacity(cells);
        if cells > 0 {
            let first = tanh_sinh_rule(FIRST_CELL_STEP)
                .into_iter()
                .map(|(v, w)| {
                    let t = step * v;
                    Ok((t, kernel_series(p, t, ctl)? * (w * step * t.powf(b - 1.0))))
                })
                .collect::<Result<_>>()?;
            out.push(first);
        }
        for j in 1..cells {
            let rule = GL4_NODES
                .iter()
                .zip(&GL4_WEIGHTS)
                .map(|(&x, &w)| {
                    let t = step * (j as f64 + 0.5 * (x + 1.0));
                    Ok((t, kernel_series(p, t, ctl)? * (0.5 * w * step * t.powf(b - 1.0))))
                })
                .collect::<Result<_>>()?;
            out.push(rule);
        }
        Ok(Self { cells: out })
    }

    /// ∫_0^{t_i} K(t) f(t_i − t) dt with f interpolated from the grid.
    fn convolve(&self, f: &GridFunction, i: usize) -> Complex64 {
        let mu = f.node(i);
        self.cells[..i]
            .iter()
            .flatten()
            .map(|&(t, w)| f.interpolate(mu - t) * w)
            .sum()
    }
}

/// Right-hand side ω ∫_0^μ K(t) h(μ − t) dt + δ g(μ) at node `index`.
pub fn volterra_rhs(
    params: &FelParameters,
    h: &GridFunction,
    g: &Forcing,
    index: usize,
    ctl: &TruncationControl,
) -> Result<Complex64> {
    params.validate()?;
    h.check_index(index, 0)?;
    let h0 = h.values()[0];
    if !(h0.re.is_finite() && h0.im.is_finite()) {
        return Err(Error::InvalidInput("volterra_rhs needs a finite value at t = 0".into()));
    }
    let rule = KernelRule::new(params, h.step(), index, ctl)?;
    Ok(params.omega * rule.convolve(h, index) + params.delta * g.value(h.node(index))?)
}

/// Σ_r b_r u^{a−r}/Γ(a−r+1), the part of a Riemann–Liouville solution fixed
/// by its initial data.
struct SingularPart<'a> {
    a: f64,
    coefficients: &'a [Complex64],
}

impl SingularPart<'_> {
    fn value(&self, u: f64) -> Complex64 {
        self.coefficients
            .iter()
            .enumerate()
            .filter(|(_, b)| **b != Complex64::new(0.0, 0.0))
            .map(|(i, &b)| {
                let e = self.a - (i + 1) as f64;
                if e == 0.0 {
                    b
                } else {
                    b * u.powf(e) * recip_gamma(e + 1.0)
                }
            })
            .sum()
    }

    /// Limit at u = 0, or `None` when it diverges.
    fn at_zero(&self) -> Option<Complex64> {
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, &b) in self.coefficients.iter().enumerate() {
            let e = self.a - (i + 1) as f64;
            if b == Complex64::new(0.0, 0.0) || e > 0.0 {
                continue;
            }
            if e < 0.0 {
                return None;
            }
            acc += b;
        }
        Some(acc)
    }

    fn is_zero(&self) -> bool {
        self.coefficients.iter().all(|b| *b == Complex64::new(0.0, 0.0))
    }

    /// ∫_0^μ K(t) S(μ − t) dt.
    fn convolve(&self, p: &FelParameters, mu: f64, ctl: &TruncationControl) -> Result<Complex64> {
        if self.is_zero() {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let est = tanh_sinh(
            |_, t, rest| Ok(kernel_series(p, t, ctl)? * t.powf(p.b_kernel - 1.0) * self.value(rest)),
            0.0,
            mu,
            SINGULAR_PART_TOL,
            0.0,
        )?;
        Ok(est.value)
    }
}

fn check_nodes(m: usize) -> Vec<usize> {
    let first = FIRST_CHECK_NODE.max(m.div_ceil(FIRST_CHECK_FRACTION));
    let first = first.div_ceil(CHECK_STRIDE) * CHECK_STRIDE;
    (first..=m).step_by(CHECK_STRIDE).collect()
}

fn check_solution(params: &FelParameters, init: &InitialData, solution: &GridFunction) -> Result<usize> {
    params.validate()?;
    let n = params.order();
    if init.coefficients().len() != n {
        return Err(Error::InvalidInput(format!(
            "expected {n} initial values, got {}",
            init.coefficients().len()
        )));
    }
    if !solution.intervals().is_multiple_of(2) {
        return Err(Error::InvalidInput("residual grids need an even number of intervals".into()));
    }
    Ok(n)
}

fn one_sided_slope(v: &[Complex64], step: f64) -> Complex64 {
    (v[1] * 4.0 - v[0] * 3.0 - v[2]) / (2.0 * step)
}

fn finish(
    nodes: &[usize],
    solution: &GridFunction,
    lhs: Vec<Complex64>,
    rhs: Vec<Complex64>,
    initial: &[(Complex64, Complex64)],
) -> ResidualReport {
    let max_abs = lhs.iter().zip(&rhs).map(|(l, r)| (l - r).norm()).fold(0.0, f64::max);
    let side = |v: &[Complex64]| v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let scale = side(&lhs).max(side(&rhs));
    let eq_rel = match (max_abs, scale) {
        (0.0, _) => 0.0,
        (_, 0.0) => f64::INFINITY,
        (m, s) => m / s,
    };
    let h_scale = nodes.iter().map(|&i| solution.values()[i].norm()).fold(0.0, f64::max);
    let initial_residual = initial
        .iter()
        .map(|&(got, want)| {
            let diff = (got - want).norm();
            if diff == 0.0 {
                0.0
            } else if !diff.is_finite() {
                f64::INFINITY
            } else {
                diff / want.norm().max(h_scale).max(f64::MIN_POSITIVE)
            }
        })
        .fold(0.0, f64::max);
    ResidualReport {
        mu_points: nodes.iter().map(|&i| solution.node(i)).collect(),
        lhs,
        rhs,
        max_abs_residual: max_abs,
        initial_residual,
        rel_residual: eq_rel.max(initial_residual),
    }
}

/// Residual of the equation with Riemann–Liouville data D^{a−r}h(0) = b_r.
pub fn residual_rl(
    params: &FelParameters,
    init: &InitialData,
    forcing: &Forcing,
    solution: &GridFunction,
) -> Result<ResidualReport> {
    let n = check_solution(params, init, solution)?;
    if !matches!(init, InitialData::RiemannLiouville(_)) {
        return Err(Error::InvalidInput("residual_rl needs Riemann-Liouville initial data".into()));
    }
    let ctl = TruncationControl::default();
    let a = params.a;
    let b = init.coefficients();
    let singular = SingularPart { a, coefficients: b };
    let v = solution.values();
    let h0_reg = match (singular.at_zero(), v[0].re.is_finite() && v[0].im.is_finite()) {
        (Some(s0), true) => v[0] - s0,
        _ => Complex64::new(0.0, 0.0),
    };
    let regular = solution.map(|i, h| if i == 0 { h0_reg } else { h - singular.value(solution.node(i)) });
    let coarse = regular.coarsen();
    let m = solution.intervals();
    let weights = gl_weights(a, m + 1);
    let rule = KernelRule::new(params, solution.step(), m, &ctl)?;
    let nodes = check_nodes(m);
    let mut lhs = Vec::with_capacity(nodes.len());
    let mut rhs = Vec::with_capacity(nodes.len());
    for &i in &nodes {
        let fine = gl_apply(regular.values(), regular.step(), a, &weights, i);
        let rough = gl_apply(coarse.values(), coarse.step(), a, &weights, i / 2);
        lhs.push(fine * 2.0 - rough);
        let mu = solution.node(i);
        let conv = rule.convolve(&regular, i) + singular.convolve(params, mu, &ctl)?;
        rhs.push(params.omega * conv + params.delta * forcing.value(mu)?);
    }
    let step = solution.step();
    let mut initial = Vec::new();
    if a == n as f64 {
        // Integer order: D^{a−n}h(0) = h(0), D^{a−n+1}h(0) = h′(0).
        initial.push((v[0], b[n - 1]));
        if n >= 2 {
            initial.push((one_sided_slope(v, step), b[n - 2]));
        }
    } else {
        // Leading singular coefficient, Γ(a−n+1) t^{n−a} h(t) → b_n, extrapolated to t = 0.
        let lead = |i: usize| v[i] * solution.node(i).powf(n as f64 - a) * gamma(a - n as f64 + 1.0).unwrap_or(f64::NAN);
        initial.push((lead(1) * 2.0 - lead(2), b[n - 1]));
    }
    Ok(finish(&nodes, solution, lhs, rhs, &initial))
}

/// Residual of the equation with Caputo data h^{(r)}(0) = a_r.
pub fn residual_caputo(
    params: &FelParameters,
    init: &InitialData,
    forcing: &Forcing,
    solution: &GridFunction,
) -> Result<ResidualReport> {
    let n = check_solution(params, init, solution)?;
    if !matches!(init, InitialData::Caputo(_)) {
        return Err(Error::InvalidInput("residual_caputo needs Caputo initial data".into()));
    }
    let a = params.a;
    if a > 2.0 {
        return Err(Error::Unsupported(format!("Caputo residual supports orders up to 2, got {a}")));
    }
    let ctl = TruncationControl::default();
    let start = init.coefficients();
    let v = solution.values();
    let m = solution.intervals();
    let step = solution.step();
    let coarse = solution.coarsen();
    let fine_samples = caputo_samples(v, step, a, start);
    let coarse_samples = caputo_samples(coarse.values(), coarse.step(), a, start);
    let alpha = l1_order(a);
    let weights = l1_weights(alpha, m + 1);
    let gain = 2f64.powf(2.0 - alpha);
    let embedded = solution.map(|i, h| if i == 0 { start[0] } else { h });
    let rule = KernelRule::new(params, step, m, &ctl)?;
    let nodes = check_nodes(m);
    let mut lhs = Vec::with_capacity(nodes.len());
    let mut rhs = Vec::with_capacity(nodes.len());
    for &i in &nodes {
        let fine = l1_apply(&fine_samples, step, alpha, &weights, i);
        let rough = l1_apply(&coarse_samples, coarse.step(), alpha, &weights, i / 2);
        lhs.push((fine * gain - rough) / (gain - 1.0));
        let mu = solution.node(i);
        rhs.push(params.omega * rule.convolve(&embedded, i) + params.delta * forcing.value(mu)?);
    }
    let mut initial = vec![(v[0], start[0])];
    if n == 2 && a == 2.0 {
        initial.push((one_sided_slope(v, step), start[1]));
    }
    Ok(finish(&nodes, solution, lhs, rhs, &initial))
}
