//! Acceptance suite: nine criteria, one PASS/FAIL line each.
//!
//! Run with `cargo test -p felkit --test acceptance -- --nocapture`.

use std::time::{Duration, Instant};

use felkit::oracle::{
    classical_fel_reference, numerical_laplace, residual_caputo, residual_rl, GridFunction, ResidualReport,
};
use felkit::series::{incomplete_ml_lower, incomplete_ml_upper, incomplete_pochhammer_lower, incomplete_pochhammer_upper, incomplete_prabhakar_ml};
use felkit::solver::{FelParameters, FelSolver, Forcing, InitialData};
use felkit::special::{ln_gamma, pochhammer};
use felkit::{Complex64, Result, SeriesValue, TruncationControl};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// A series output together with a way to recompute it under another policy.
struct Probe {
    label: String,
    value: SeriesValue,
    recompute: Box<dyn Fn(&TruncationControl) -> Result<SeriesValue>>,
}

#[derive(Default)]
struct Probes(Vec<Probe>);

impl Probes {
    fn record(
        &mut self,
        label: impl Into<String>,
        f: impl Fn(&TruncationControl) -> Result<SeriesValue> + 'static,
    ) -> Result<SeriesValue> {
        let value = f(&TruncationControl::default())?;
        self.0.push(Probe { label: label.into(), value, recompute: Box::new(f) });
        Ok(value)
    }
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn report(id: usize, name: &str, limit: Duration, run: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let out = run();
    let elapsed = start.elapsed();
    let in_time = elapsed <= limit;
    let pass = out.pass && in_time;
    let timing = if in_time { String::new() } else { format!(", over the {limit:?} limit") };
    println!(
        "[{}] criterion {id}: {name}: {} ({:.2} s{timing})",
        if pass { "PASS" } else { "FAIL" },
        out.detail,
        elapsed.as_secs_f64()
    );
    pass
}

fn rel_err(got: Complex64, want: Complex64) -> f64 {
    (got - want).norm() / want.norm().max(f64::MIN_POSITIVE)
}

// ---------------------------------------------------------------- 1

fn decomposition() -> Outcome {
    let mut worst = 0.0f64;
    let mut failures = 0;
    for lambda in [0.5, 1.0, 2.5, 10.0] {
        for x in [0.0, 0.5, 1.0, 5.0, 50.0] {
            for n in 0..=30 {
                let upper = incomplete_pochhammer_upper(lambda, n, x).unwrap();
                let lower = incomplete_pochhammer_lower(lambda, n, x).unwrap();
                let full = pochhammer(lambda, n);
                let e = ((upper + lower) - full).abs() / full.abs();
                worst = worst.max(e);
                failures += usize::from(!(e <= 1e-10));
            }
        }
    }
    Outcome { pass: failures == 0, detail: format!("620 cases, max rel err {worst:.1e}, {failures} above 1e-10") }
}

// ---------------------------------------------------------------- 2

fn ml_decomposition(probes: &mut Probes) -> Outcome {
    let zs = [c(0.5, 0.0), c(0.0, 2.0), c(-1.0, 1.0)];
    let mut worst = 0.0f64;
    let mut cases = 0;
    let mut failures = 0;
    for a in [0.5, 1.0, 2.0] {
        for b in [0.5, 1.0, 2.5] {
            for delta in [0.5, 1.0, 3.0] {
                for z in zs {
                    let full = incomplete_ml_upper(a, b, delta, 0.0, z, &TruncationControl::default()).unwrap();
                    for x in [0.5, 3.0] {
                        let tag = format!("ml a={a} b={b} delta={delta} x={x} z={z}");
                        let up = probes
                            .record(format!("upper {tag}"), move |ctl| incomplete_ml_upper(a, b, delta, x, z, ctl))
                            .unwrap();
                        let lo = probes
                            .record(format!("lower {tag}"), move |ctl| incomplete_ml_lower(a, b, delta, x, z, ctl))
                            .unwrap();
                        let e = rel_err(up.value + lo.value, full.value);
                        worst = worst.max(e);
                        cases += 1;
                        failures += usize::from(!(e <= 1e-9));
                    }
                }
            }
        }
    }
    Outcome {
        pass: failures == 0,
        detail: format!("{cases} cases on the 3x3x3 grid, max rel err {worst:.1e}, {failures} above 1e-9"),
    }
}

// ---------------------------------------------------------------- 3

fn kernel_params(b: f64, rho: f64, cc: f64, zeta: f64, x: f64) -> FelParameters {
    FelParameters { a: 1.0, b_kernel: b, c: cc, rho, zeta, omega: c(0.0, 0.0), delta: c(0.0, 0.0), x_cut: x }
}

fn kernel_transform(probes: &mut Probes) -> Outcome {
    let mut worst = 0.0f64;
    let mut failures = 0;
    for (b, rho, cc, zeta, x) in [(2.0, 1.0, 2.0, 1.0, 0.0), (1.5, 1.0, 1.0, 0.5, 1.0), (2.0, 0.5, 1.5, 1.0, 0.3)] {
        let p = kernel_params(b, rho, cc, zeta, x);
        let ctl = TruncationControl::default();
        for s in [2.0, 4.0, 8.0] {
            let sv = c(s, 0.0);
            let symbol = probes
                .record(format!("kernel symbol {p:?} s={s}"), move |ctl| {
                    FelSolver::new(p, *ctl)?.kernel_laplace_symbol(sv)
                })
                .unwrap();
            let mut count = 0usize;
            let numeric = numerical_laplace(
                |t| {
                    let z = c(0.0, zeta) * t.powf(rho);
                    let e = incomplete_prabhakar_ml(cc, rho, b, x, z, &ctl)?;
                    if count.is_multiple_of(40) {
                        probes.record(format!("kernel series t={t} {p:?}"), move |ctl| {
                            incomplete_prabhakar_ml(cc, rho, b, x, z, ctl)
                        })?;
                    }
                    count += 1;
                    Ok(t.powf(b - 1.0) * e.value)
                },
                sv,
            )
            .unwrap();
            let e = rel_err(symbol.value, numeric.value);
            worst = worst.max(e);
            failures += usize::from(!(e <= 1e-6));
        }
    }
    Outcome { pass: failures == 0, detail: format!("9 cases, max rel err {worst:.1e}, {failures} above 1e-6") }
}

// ---------------------------------------------------------------- 4, 5, 8

struct ResidualSet {
    name: &'static str,
    params: FelParameters,
    data: Vec<Complex64>,
    nu: f64,
}

impl ResidualSet {
    fn forcing(&self) -> Forcing {
        Forcing::ExpInu { amplitude: c(1.0, 0.0), nu: self.nu }
    }
}

fn residual_sets() -> Vec<ResidualSet> {
    let p = |a, b, cc, rho, zeta, omega, delta, x| FelParameters {
        a,
        b_kernel: b,
        c: cc,
        rho,
        zeta,
        omega,
        delta,
        x_cut: x,
    };
    vec![
        ResidualSet {
            name: "A",
            params: p(0.5, 1.5, 1.0, 1.0, 1.0, c(0.3, 0.0), c(1.0, 0.0), 0.5),
            data: vec![c(1.0, 0.0)],
            nu: 2.0,
        },
        ResidualSet {
            name: "B",
            params: p(1.5, 2.0, 1.5, 1.0, -1.0, c(-0.1, 0.2), c(0.5, 0.0), 0.0),
            data: vec![c(1.0, 0.0), c(0.5, 0.0)],
            nu: 1.0,
        },
        ResidualSet {
            name: "C",
            params: p(0.75, 1.0, 2.0, 0.5, 2.0, c(-0.4, 0.0), c(1.0, 0.0), 1.0),
            data: vec![c(0.0, 0.5)],
            nu: -1.0,
        },
        ResidualSet {
            name: "D",
            params: p(1.8, 1.2, 2.0, 1.0, 1.0, c(0.0, 0.5), c(1.0, 0.0), 0.3),
            data: vec![c(1.0, 0.0), c(-0.5, 0.0)],
            nu: 1.0,
        },
        ResidualSet {
            name: "E",
            params: p(1.25, 1.5, 0.5, 1.5, 1.0, c(0.5, 0.0), c(0.0, -1.0), 2.0),
            data: vec![c(0.2, 0.0), c(1.0, 0.0)],
            nu: 3.0,
        },
    ]
}

#[derive(Clone, Copy, PartialEq)]
enum Data {
    Rl,
    Caputo,
}

impl Data {
    fn init(self, coefs: &[Complex64]) -> InitialData {
        match self {
            Self::Rl => InitialData::RiemannLiouville(coefs.to_vec()),
            Self::Caputo => InitialData::Caputo(coefs.to_vec()),
        }
    }

    fn residual(self, set: &ResidualSet, init: &InitialData, h: &GridFunction) -> ResidualReport {
        self.residual_of(&set.params, init, &set.forcing(), h)
    }

    fn residual_of(self, p: &FelParameters, init: &InitialData, g: &Forcing, h: &GridFunction) -> ResidualReport {
        match self {
            Self::Rl => residual_rl(p, init, g, h).unwrap(),
            Self::Caputo => residual_caputo(p, init, g, h).unwrap(),
        }
    }
}

/// The solver output on the (m+1)-point grid of [0, 1]; a singular value at
/// μ = 0 is stored as infinity.
fn solve_on_grid(solver: &FelSolver, data: Data, init: &InitialData, g: &Forcing, m: usize) -> GridFunction {
    let mus: Vec<f64> = (1..=m).map(|i| i as f64 / m as f64).collect();
    let rest = match data {
        Data::Rl => solver.solve_rl(init, g, &mus),
        Data::Caputo => solver.solve_caputo(init, g, &mus),
    }
    .unwrap();
    let at_zero = solver.evaluate(init, g, 0.0).map(|e| e.h).unwrap_or(c(f64::INFINITY, 0.0));
    let values = std::iter::once(at_zero).chain(rest.iter().map(|e| e.h)).collect();
    GridFunction::new(1.0, values).unwrap()
}

fn corrupted(h: &GridFunction) -> GridFunction {
    let values = h.values().iter().map(|&v| if v.re.is_finite() { v + 0.01 } else { v }).collect();
    GridFunction::new(h.mu_max(), values).unwrap()
}

/// Caputo initial value recovered from h(1e-3) and h(1e-4).
///
/// The parts of h fixed directly by the data, a_1 μ and δ I^a g, are removed
/// first; the remainder is a_0 plus the memory term ω I^{a+b}(K*h), which
/// vanishes like μ^{a+b}, and is extrapolated with that exponent.
fn extrapolated_initial_value(solver: &FelSolver, set: &ResidualSet, init: &InitialData) -> Complex64 {
    let p = &set.params;
    let data = init.coefficients();
    let known = |mu: f64| {
        let mut v = data.get(1).map_or(c(0.0, 0.0), |&a1| a1 * mu);
        // I^a e^{iνt} at μ: μ^a Σ_k (iνμ)^k / Γ(a+k+1).
        let mut series = c(0.0, 0.0);
        let mut zk = c(1.0, 0.0);
        for k in 0..40 {
            series += zk * (-ln_gamma(p.a + k as f64 + 1.0).unwrap()).exp();
            zk *= c(0.0, set.nu * mu);
        }
        v += p.delta * mu.powf(p.a) * series;
        v
    };
    let remainder = |mu: f64| solver.evaluate(init, &set.forcing(), mu).unwrap().h - known(mu);
    let (m1, m2) = (1e-3, 1e-4);
    let e = p.a + p.b_kernel;
    let (w1, w2) = (f64::powf(m1, e), f64::powf(m2, e));
    (remainder(m2) * w1 - remainder(m1) * w2) / (w1 - w2)
}

struct ResidualRun {
    set: &'static str,
    fine: ResidualReport,
    coarse: ResidualReport,
    data: Data,
    params: FelParameters,
    init: InitialData,
    forcing: Forcing,
    solution: GridFunction,
    initial_value_error: Option<f64>,
}

fn residual_suite(data: Data, probes: &mut Probes) -> Vec<ResidualRun> {
    residual_sets()
        .into_iter()
        .map(|set| {
            let solver = FelSolver::new(set.params, TruncationControl::default()).unwrap();
            let init = data.init(&set.data);
            let g = set.forcing();
            let coarse = data.residual(&set, &init, &solve_on_grid(&solver, data, &init, &g, 256));
            let h = solve_on_grid(&solver, data, &init, &g, 512);
            let fine = data.residual(&set, &init, &h);
            let initial_value_error = (data == Data::Caputo)
                .then(|| (extrapolated_initial_value(&solver, &set, &init) - set.data[0]).norm());
            let p = set.params;
            for mu in [0.1, 0.5, 1.0] {
                for r in 0..set.data.len() {
                    match data {
                        Data::Rl => probes.record(format!("y_{} rl set {} mu={mu}", r + 1, set.name), move |ctl| {
                            FelSolver::new(p, *ctl)?.y_r_rl(r + 1, mu)
                        }),
                        Data::Caputo => probes.record(format!("y_{r} caputo set {} mu={mu}", set.name), move |ctl| {
                            FelSolver::new(p, *ctl)?.y_r_caputo(r, mu)
                        }),
                    }
                    .unwrap();
                }
                if data == Data::Rl {
                    probes
                        .record(format!("aleph set {} u={mu}", set.name), move |ctl| {
                            FelSolver::new(p, *ctl)?.kernel_aleph(mu)
                        })
                        .unwrap();
                    let g = set.forcing();
                    probes
                        .record(format!("forcing convolution set {} mu={mu}", set.name), move |ctl| {
                            FelSolver::new(p, *ctl)?.forcing_convolution(&g, mu)
                        })
                        .unwrap();
                }
            }
            ResidualRun {
                set: set.name,
                fine,
                coarse,
                data,
                params: set.params,
                init,
                forcing: g,
                solution: h,
                initial_value_error,
            }
        })
        .collect()
}

fn residual_outcome(runs: &[ResidualRun]) -> Outcome {
    let mut pass = true;
    let parts: Vec<String> = runs
        .iter()
        .map(|r| {
            let ok_level = r.fine.rel_residual <= 1e-3;
            let ok_refine = r.fine.rel_residual < r.coarse.rel_residual;
            let ok_ic = r.initial_value_error.is_none_or(|e| e <= 1e-6);
            pass &= ok_level && ok_refine && ok_ic;
            let ic = r.initial_value_error.map(|e| format!(", |h(0)-a0| {e:.1e}")).unwrap_or_default();
            format!("{} {:.1e} -> {:.1e}{ic}", r.set, r.coarse.rel_residual, r.fine.rel_residual)
        })
        .collect();
    Outcome { pass, detail: format!("rel_residual M=256 -> M=512: {}", parts.join("; ")) }
}

fn sensitivity_outcome(runs: &[&ResidualRun]) -> Outcome {
    let rel: Vec<f64> = runs
        .iter()
        .map(|r| r.data.residual_of(&r.params, &r.init, &r.forcing, &corrupted(&r.solution)).rel_residual)
        .collect();
    let worst = rel.iter().copied().fold(f64::INFINITY, f64::min);
    let failures = rel.iter().filter(|&&v| !(v > 1e-2)).count();
    Outcome {
        pass: failures == 0,
        detail: format!(
            "{} corrupted solutions, smallest rel_residual {worst:.2e}, {failures} at or below 1e-2",
            runs.len()
        ),
    }
}

// ---------------------------------------------------------------- 6

fn classical_reduction() -> Outcome {
    let mut worst = 0.0f64;
    let init = InitialData::RiemannLiouville(vec![c(1.0, 0.0)]);
    for (g0, nu) in [(0.05, 0.0), (0.1, 1.0), (0.2, 2.0)] {
        let solver = FelSolver::new(FelParameters::classical(g0, nu), TruncationControl::default()).unwrap();
        let reference = classical_fel_reference(g0, nu, 1.0, 400).unwrap();
        let mus = [0.25, 0.5, 1.0];
        let got = solver.solve_rl(&init, &Forcing::zero(), &mus).unwrap();
        for (e, mu) in got.iter().zip(mus) {
            let want = reference.values()[(mu * 400.0).round() as usize];
            worst = worst.max((e.h - want).norm());
        }
    }
    Outcome { pass: worst <= 1e-5, detail: format!("9 cases, max abs err {worst:.1e}") }
}

// ---------------------------------------------------------------- 7

fn laplace_coherence(probes: &mut Probes) -> Outcome {
    let classical = FelParameters { omega: c(0.0, -std::f64::consts::PI * 0.1), ..FelParameters::classical(0.1, 1.0) };
    let fractional = residual_sets().remove(0);
    let cases = [
        (classical, InitialData::RiemannLiouville(vec![c(1.0, 0.0)]), Forcing::zero()),
        (
            fractional.params,
            InitialData::Caputo(fractional.data.clone()),
            Forcing::Polynomial(vec![c(1.0, 0.0), c(0.0, -0.5)]),
        ),
    ];
    let mut worst = 0.0f64;
    let mut failures = 0;
    for (p, init, g) in cases {
        let solver = FelSolver::new(p, TruncationControl::default()).unwrap();
        for s in [2.0, 3.0, 4.0, 6.0, 8.0] {
            let sv = c(s, 0.0);
            let (init2, g2) = (init.clone(), g.clone());
            let image = probes
                .record(format!("h image s={s} {p:?}"), move |ctl| {
                    let g3 = g2.clone();
                    FelSolver::new(p, *ctl)?.h_laplace_image(&init2, move |z| g3.laplace(z).unwrap(), sv)
                })
                .unwrap();
            let numeric = numerical_laplace(|t| Ok(solver.evaluate(&init, &g, t)?.h), sv).unwrap();
            let e = rel_err(image.value, numeric.value);
            worst = worst.max(e);
            failures += usize::from(!(e <= 1e-6));
        }
    }
    Outcome { pass: failures == 0, detail: format!("10 cases, max rel err {worst:.1e}, {failures} above 1e-6") }
}

// ---------------------------------------------------------------- 9

fn honesty(probes: &Probes) -> Outcome {
    let doubled = TruncationControl::default().doubled();
    let tight = TruncationControl { rel_tol: 1e-15, ..TruncationControl::default().doubled() };
    let converged: Vec<&Probe> = probes.0.iter().filter(|p| p.value.converged).collect();
    let within = |ctl: &TruncationControl| {
        converged
            .iter()
            .filter(|p| {
                let again = (p.recompute)(ctl).unwrap();
                let ok = (again.value - p.value.value).norm() <= 10.0 * p.value.err_estimate;
                if !ok {
                    eprintln!("  estimate exceeded ({:?}): {}", ctl, p.label);
                }
                ok
            })
            .count()
    };
    let n = converged.len();
    let ok_doubled = within(&doubled);
    let ok_tight = within(&tight);
    let frac = |k: usize| k as f64 / n.max(1) as f64;
    Outcome {
        pass: n > 0 && frac(ok_doubled) >= 0.99,
        detail: format!(
            "{n} converged outputs; doubled max_terms within 10 err: {:.1}%; rel_tol 1e-15 within 10 err: {:.1}%",
            100.0 * frac(ok_doubled),
            100.0 * frac(ok_tight)
        ),
    }
}

#[test]
fn acceptance() {
    let secs = Duration::from_secs;
    let mut probes = Probes::default();
    let mut results = Vec::new();

    results.push(report(1, "Pochhammer decomposition", secs(1), decomposition));
    results.push(report(2, "Mittag-Leffler decomposition", secs(5), || ml_decomposition(&mut probes)));
    results.push(report(3, "kernel transform identity", secs(30), || kernel_transform(&mut probes)));

    let mut rl_runs = Vec::new();
    results.push(report(4, "Riemann-Liouville residual", secs(120), || {
        rl_runs = residual_suite(Data::Rl, &mut probes);
        residual_outcome(&rl_runs)
    }));
    let mut caputo_runs = Vec::new();
    results.push(report(5, "Caputo residual and initial value", secs(120), || {
        caputo_runs = residual_suite(Data::Caputo, &mut probes);
        residual_outcome(&caputo_runs)
    }));
    results.push(report(6, "classical FEL reduction", secs(60), classical_reduction));
    results.push(report(7, "Laplace coherence", secs(60), || laplace_coherence(&mut probes)));
    let accepted: Vec<&ResidualRun> = rl_runs
        .iter()
        .chain(&caputo_runs)
        .filter(|r| r.fine.rel_residual <= 1e-3)
        .collect();
    results.push(report(8, "oracle sensitivity", secs(30), || sensitivity_outcome(&accepted)));
    results.push(report(9, "error-estimate honesty", secs(300), || honesty(&probes)));

    let failed: Vec<usize> = results.iter().enumerate().filter(|(_, ok)| !**ok).map(|(i, _)| i + 1).collect();
    assert!(failed.is_empty(), "criteria failed: {failed:?}");
}
