//! Cached coefficient tables for the double series of the solution.
//!
//! `powers[k][n]` holds ln q^{(k)}_n, the coefficients of the k-th power of
//! the kernel symbol in w = iζs^{−ρ}. A series family with leading exponent
//! e0 stores ln d_{kn} = ln q^{(k)}_n − ln Γ(ρn + e0 + (a+b)k + 1), so that
//!
//! ```text
//! term_{kn}(μ) = ω^k μ^{e0+(a+b)k} d_{kn} (iζμ^ρ)^n.
//! ```
//!
//! Rows are built lazily and widened on demand, up to `max_terms + 1`.

use std::collections::HashMap;
use std::f64::consts::FRAC_PI_2;
use std::sync::RwLock;

use num_complex::Complex64;

use super::{FelParameters, KernelPower};
use crate::error::{domain, evaluation, Result};
use crate::series::{polar, sum_series, SeriesValue, TruncationControl};
use crate::special::{ln_gamma, ln_upper_incomplete_gamma};

const INITIAL_WIDTH: usize = 48;
const ROW_CHUNK: usize = 8;

#[derive(Debug, Default)]
struct Store {
    width: usize,
    powers: Vec<Vec<f64>>,
    families: HashMap<u64, Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum RowSet {
    Powers,
    Family(f64),
}

#[derive(Debug, Default, Clone, Copy)]
struct Need {
    rows: usize,
    width: usize,
}

impl Need {
    fn any(&self) -> bool {
        self.rows > 0 || self.width > 0
    }
}

/// Geometry of one double series Σ_k Σ_n:
/// outer factor exp(base0 + k·base_step) e^{ik·arg_step} ω^k, inner variable z.
#[derive(Debug, Clone, Copy)]
struct Geometry {
    base0: f64,
    base_step: f64,
    arg_step: f64,
    ln_z: f64,
    arg_z: f64,
}

fn scaled(k: usize, ln: f64) -> f64 {
    if k == 0 {
        0.0
    } else {
        k as f64 * ln
    }
}

#[derive(Debug)]
pub(super) struct Tables {
    params: FelParameters,
    power: KernelPower,
    ctl: TruncationControl,
    store: RwLock<Store>,
}

impl Tables {
    pub(super) fn new(params: FelParameters, power: KernelPower, ctl: TruncationControl) -> Self {
        Self {
            params,
            power,
            ctl,
            store: RwLock::new(Store {
                width: INITIAL_WIDTH.min(ctl.max_terms + 1),
                ..Store::default()
            }),
        }
    }

    fn limit(&self) -> usize {
        self.ctl.max_terms + 1
    }

    fn delta_row(width: usize) -> Vec<f64> {
        let mut row = vec![f64::NEG_INFINITY; width];
        row[0] = 0.0;
        row
    }

    /// ln([λ; x]_n / n!) for n < width.
    fn symbol_row(lambda: f64, x: f64, width: usize) -> Result<Vec<f64>> {
        let norm = ln_gamma(lambda)?;
        (0..width)
            .map(|n| Ok(ln_upper_incomplete_gamma(lambda + n as f64, x)? - norm - ln_gamma(n as f64 + 1.0)?))
            .collect()
    }

    /// Cauchy product of two coefficient rows, in log space.
    fn convolve(a: &[f64], b: &[f64]) -> Vec<f64> {
        (0..a.len())
            .map(|n| {
                let logs = (0..=n).map(|j| a[j] + b[n - j]);
                let peak = logs.clone().fold(f64::NEG_INFINITY, f64::max);
                if peak == f64::NEG_INFINITY {
                    return peak;
                }
                peak + logs.map(|l| (l - peak).exp()).sum::<f64>().ln()
            })
            .collect()
    }

    fn power_row(&self, store: &Store, k: usize) -> Result<Vec<f64>> {
        let (c, x, width) = (self.params.c, self.params.x_cut, store.width);
        if k == 0 || c == 0.0 {
            return Ok(Self::delta_row(width));
        }
        match self.power {
            KernelPower::Convolution if k == 1 => Self::symbol_row(c, x, width),
            KernelPower::Convolution => Ok(Self::convolve(&store.powers[k - 1], &store.powers[1])),
            KernelPower::ScaledParameter(rule) => Self::symbol_row(c * k as f64, rule.apply(x, k), width),
        }
    }

    fn family_row(&self, powers: &[f64], e0: f64, k: usize) -> Result<Vec<f64>> {
        let p = &self.params;
        let shift = e0 + (p.a + p.b_kernel) * k as f64 + 1.0;
        powers
            .iter()
            .enumerate()
            .map(|(n, &q)| {
                if q == f64::NEG_INFINITY {
                    Ok(q)
                } else {
                    Ok(q - ln_gamma(p.rho * n as f64 + shift)?)
                }
            })
            .collect()
    }

    fn grow(&self, set: RowSet, need: Need) -> Result<()> {
        let mut store = self.store.write().map_err(|_| evaluation("FelSolver", "coefficient cache poisoned"))?;
        if need.width > store.width {
            let width = (store.width * 2).max(need.width).min(self.limit());
            *store = Store {
                width,
                ..Store::default()
            };
        }
        let have = match set {
            RowSet::Powers => store.powers.len(),
            RowSet::Family(e0) => store.families.get(&e0.to_bits()).map_or(0, Vec::len),
        };
        let rows = need.rows.max(have).max(ROW_CHUNK).min(self.limit());
        while store.powers.len() < rows {
            let row = self.power_row(&store, store.powers.len())?;
            store.powers.push(row);
        }
        if let RowSet::Family(e0) = set {
            let mut family = store.families.remove(&e0.to_bits()).unwrap_or_default();
            while family.len() < rows {
                family.push(self.family_row(&store.powers[family.len()], e0, family.len())?);
            }
            store.families.insert(e0.to_bits(), family);
        }
        Ok(())
    }

    /// Runs `f` against the rows of `set`, widening the tables and retrying
    /// whenever `f` reports that it ran past them.
    fn with_rows<T>(&self, set: RowSet, mut f: impl FnMut(&[Vec<f64>], &mut Need) -> Result<T>) -> Result<T> {
        loop {
            let mut need = Need::default();
            let out = {
                let store = self.store.read().map_err(|_| evaluation("FelSolver", "coefficient cache poisoned"))?;
                let rows: &[Vec<f64>] = match set {
                    RowSet::Powers => &store.powers,
                    RowSet::Family(e0) => store.families.get(&e0.to_bits()).map_or(&[], Vec::as_slice),
                };
                f(rows, &mut need)
            };
            if !need.any() {
                return out;
            }
            self.grow(set, need)?;
        }
    }

    fn double_series(&self, set: RowSet, g: Geometry) -> Result<SeriesValue> {
        const FUNC: &str = "FelSolver";
        let limit = self.limit();
        let inner_ctl = self.ctl.inner();
        let ln_omega = self.params.omega.norm().ln();
        let arg_omega = self.params.omega.arg();
        self.with_rows(set, |rows, need| {
            let mut inner_converged = true;
            let outer = sum_series(FUNC, &self.ctl, |k| {
                let Some(row) = rows.get(k) else {
                    if k < limit {
                        need.rows = need.rows.max(k + 1);
                    }
                    return Err(evaluation(FUNC, "coefficient rows exhausted"));
                };
                let head = g.base0 + scaled(k, ln_omega) + scaled(k, g.base_step);
                let phase = scaled(k, arg_omega + g.arg_step);
                if head == f64::NEG_INFINITY {
                    return Ok((Complex64::new(0.0, 0.0), 0.0));
                }
                let inner = sum_series(FUNC, &inner_ctl, |n| {
                    let Some(&d) = row.get(n) else {
                        if n < limit {
                            need.width = need.width.max(n + 1);
                        }
                        return Err(evaluation(FUNC, "coefficient columns exhausted"));
                    };
                    if d == f64::NEG_INFINITY {
                        return Ok((Complex64::new(0.0, 0.0), 0.0));
                    }
                    Ok((polar(head + d + scaled(n, g.ln_z), phase + scaled(n, g.arg_z)), 0.0))
                })?;
                inner_converged &= inner.converged;
                Ok((inner.value, inner.err_estimate))
            })?;
            Ok(SeriesValue {
                converged: outer.converged && inner_converged,
                ..outer
            })
        })
    }

    fn zeta_phase(&self) -> f64 {
        FRAC_PI_2.copysign(self.params.zeta)
    }

    /// Σ_k ω^k μ^{e0+(a+b)k} Σ_n q^{(k)}_n (iζμ^ρ)^n / Γ(ρn + e0 + (a+b)k + 1).
    pub(super) fn time_series(&self, e0: f64, mu: f64) -> Result<SeriesValue> {
        if !(mu >= 0.0 && mu.is_finite()) {
            return Err(domain("FelSolver", format!("mu must be finite and >= 0, got {mu}")));
        }
        if mu == 0.0 {
            return match e0 {
                0.0 => Ok(SeriesValue::exact(Complex64::new(1.0, 0.0))),
                e if e > 0.0 => Ok(SeriesValue::exact(Complex64::new(0.0, 0.0))),
                _ => Err(domain("FelSolver", format!("series is singular at mu = 0 (leading exponent {e0})"))),
            };
        }
        let p = &self.params;
        let ln_mu = mu.ln();
        self.double_series(
            RowSet::Family(e0),
            Geometry {
                base0: e0 * ln_mu,
                base_step: (p.a + p.b_kernel) * ln_mu,
                arg_step: 0.0,
                ln_z: p.zeta.abs().ln() + p.rho * ln_mu,
                arg_z: self.zeta_phase(),
            },
        )
    }

    fn check_s(s: Complex64) -> Result<()> {
        if !(s.re.is_finite() && s.im.is_finite()) || s.norm() == 0.0 {
            return Err(domain("FelSolver", format!("s must be finite and non-zero, got {s}")));
        }
        Ok(())
    }

    /// Σ_k (ω s^{−a−b})^k Σ_n q^{(k)}_n (iζ s^{−ρ})^n.
    pub(super) fn laplace_series(&self, s: Complex64) -> Result<SeriesValue> {
        Self::check_s(s)?;
        let p = &self.params;
        let (ln_s, arg_s) = (s.norm().ln(), s.arg());
        let step = p.a + p.b_kernel;
        self.double_series(
            RowSet::Powers,
            Geometry {
                base0: 0.0,
                base_step: -step * ln_s,
                arg_step: -step * arg_s,
                ln_z: p.zeta.abs().ln() - p.rho * ln_s,
                arg_z: self.zeta_phase() - p.rho * arg_s,
            },
        )
    }

    /// s^{−b} Σ_n q^{(1)}_n (iζ s^{−ρ})^n.
    pub(super) fn kernel_symbol(&self, s: Complex64) -> Result<SeriesValue> {
        const FUNC: &str = "kernel_laplace_symbol";
        Self::check_s(s)?;
        let p = &self.params;
        let (ln_s, arg_s) = (s.norm().ln(), s.arg());
        let limit = self.limit();
        let (ln_z, arg_z) = (p.zeta.abs().ln() - p.rho * ln_s, self.zeta_phase() - p.rho * arg_s);
        let head = -p.b_kernel * ln_s;
        let phase = -p.b_kernel * arg_s;
        self.with_rows(RowSet::Powers, |rows, need| {
            let Some(row) = rows.get(1) else {
                need.rows = 2;
                return Err(evaluation(FUNC, "coefficient rows exhausted"));
            };
            sum_series(FUNC, &self.ctl, |n| {
                let Some(&q) = row.get(n) else {
                    if n < limit {
                        need.width = need.width.max(n + 1);
                    }
                    return Err(evaluation(FUNC, "coefficient columns exhausted"));
                };
                Ok((polar(head + q + scaled(n, ln_z), phase + scaled(n, arg_z)), 0.0))
            })
        })
    }
}
