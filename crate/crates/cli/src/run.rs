use rayon::prelude::*;
use serde_json::{Map, Value};

use felkit::oracle::{residual_caputo, residual_rl, GridFunction};
use felkit::series::{incomplete_ml_lower, incomplete_ml_upper, incomplete_wright, IncompleteKind};
use felkit::solver::{FelSolver, SolutionEvaluation};
use felkit::{Complex64, Error, SeriesValue, TruncationControl};

use crate::config::{FelJob, Format, Job, MlJob, RunConfig, Variant, WrightJob};
use crate::error::CliError;
use crate::output::{render, write, Cell, Table};

const SOLUTION_COLUMNS: [&str; 5] = ["mu", "re_h", "im_h", "abs_h", "err_estimate"];
const SWEEP_COLUMNS: [&str; 12] = [
    "point", "a", "bkernel", "c", "rho", "zeta", "x", "re_omega", "im_omega", "re_delta", "im_delta", "variant_caputo",
];

/// Runs the job and returns the process exit code.
pub fn run(cfg: &RunConfig) -> Result<i32, CliError> {
    let (table, summary, unconverged, verdict) = match &cfg.job {
        Job::EvalMl(job) => {
            let (t, bad) = eval_ml(job, &cfg.ctl)?;
            (t, None, bad, 0)
        }
        Job::EvalWright(job) => {
            let (t, bad) = eval_wright(job, &cfg.ctl)?;
            (t, None, bad, 0)
        }
        Job::Solve(job) => {
            warn_domain(job);
            let samples = solve(job, &cfg.ctl)?;
            let bad = count_unconverged(&samples);
            (solution_table(&samples), None, bad, 0)
        }
        Job::Verify { job, tol_residual } => {
            warn_domain(job);
            let samples = solve(job, &cfg.ctl)?;
            let bad = count_unconverged(&samples);
            let (summary, passed) = verify(job, &samples, *tol_residual)?;
            if cfg.format == Format::Csv {
                let line: Vec<String> = summary.iter().map(|(k, v)| format!("{k}={v}")).collect();
                eprintln!("{}", line.join(" "));
            }
            (solution_table(&samples), Some(summary), bad, if passed { 0 } else { 1 })
        }
        Job::Sweep(jobs) => {
            if let Some(job) = jobs.first() {
                warn_domain(job);
            }
            let results: Vec<Vec<Sample>> = jobs.par_iter().map(|job| solve(job, &cfg.ctl)).collect::<Result<_, _>>()?;
            let bad = results.iter().map(|s| count_unconverged(s)).sum();
            (sweep_table(jobs, &results), None, bad, 0)
        }
    };
    write(&render(&table, cfg.format, summary), cfg.output.as_deref())?;
    if cfg.strict && unconverged > 0 {
        return Err(CliError::NotConverged(unconverged));
    }
    Ok(verdict)
}

fn warn_domain(job: &FelJob) {
    if job.grid.max > 1.0 {
        eprintln!(
            "warning: grid extends to mu = {} > 1; the series lose accuracy as mu grows, check err_estimate",
            job.grid.max
        );
    }
}

/// One grid point; `None` where the solution is singular (μ = 0 with a
/// negative leading exponent).
type Sample = (f64, Option<SolutionEvaluation>);

fn solve(job: &FelJob, ctl: &TruncationControl) -> Result<Vec<Sample>, CliError> {
    let solver = FelSolver::with_kernel_power(job.params, *ctl, job.power)?;
    job.grid
        .values()
        .into_iter()
        .map(|mu| match solver.evaluate(&job.init, &job.forcing, mu) {
            Ok(e) => Ok((mu, Some(e))),
            Err(Error::Domain { .. }) if mu == 0.0 => Ok((mu, None)),
            Err(e) => Err(e.into()),
        })
        .collect()
}

fn count_unconverged(samples: &[Sample]) -> usize {
    samples.iter().filter(|(_, e)| e.is_some_and(|e| !e.converged)).count()
}

fn solution_cells(&(mu, e): &Sample) -> Vec<Cell> {
    let (h, err) = match e {
        Some(e) => (e.h, e.err_estimate),
        None => (Complex64::new(f64::INFINITY, 0.0), f64::INFINITY),
    };
    vec![Cell::Num(mu), Cell::Num(h.re), Cell::Num(h.im), Cell::Num(h.norm()), Cell::Num(err)]
}

fn solution_table(samples: &[Sample]) -> Table {
    let mut t = Table::new(SOLUTION_COLUMNS.to_vec());
    t.rows = samples.iter().map(solution_cells).collect();
    t
}

fn sweep_table(jobs: &[FelJob], results: &[Vec<Sample>]) -> Table {
    let mut t = Table::new(SWEEP_COLUMNS.iter().chain(&SOLUTION_COLUMNS).copied().collect());
    for (i, (job, samples)) in jobs.iter().zip(results).enumerate() {
        let p = &job.params;
        let prefix = [
            Cell::Int(i),
            Cell::Num(p.a),
            Cell::Num(p.b_kernel),
            Cell::Num(p.c),
            Cell::Num(p.rho),
            Cell::Num(p.zeta),
            Cell::Num(p.x_cut),
            Cell::Num(p.omega.re),
            Cell::Num(p.omega.im),
            Cell::Num(p.delta.re),
            Cell::Num(p.delta.im),
            Cell::Bool(job.variant == Variant::Caputo),
        ];
        for s in samples {
            t.rows.push(prefix.iter().copied().chain(solution_cells(s)).collect());
        }
    }
    t
}

fn verify(job: &FelJob, samples: &[Sample], tol: f64) -> Result<(Map<String, Value>, bool), CliError> {
    if job.grid.min != 0.0 {
        return Err(CliError::Usage("verify needs a grid starting at mu = 0".into()));
    }
    let values = samples
        .iter()
        .map(|(_, e)| e.map_or(Complex64::new(f64::INFINITY, 0.0), |e| e.h))
        .collect();
    let h = GridFunction::new(job.grid.max, values)?;
    let report = match job.variant {
        Variant::RiemannLiouville => residual_rl(&job.params, &job.init, &job.forcing, &h)?,
        Variant::Caputo => residual_caputo(&job.params, &job.init, &job.forcing, &h)?,
    };
    let passed = report.rel_residual <= tol;
    let mut m = Map::new();
    m.insert("max_abs_residual".into(), Value::from(report.max_abs_residual));
    m.insert("rel_residual".into(), Value::from(report.rel_residual));
    m.insert("initial_residual".into(), Value::from(report.initial_residual));
    m.insert("tol_residual".into(), Value::from(tol));
    m.insert("passed".into(), Value::from(passed));
    Ok((m, passed))
}

const EVAL_COLUMNS: [&str; 8] = ["re_z", "im_z", "re", "im", "abs", "err_estimate", "terms_used", "converged"];

fn eval_table(points: impl IntoIterator<Item = (Complex64, SeriesValue)>) -> (Table, usize) {
    let mut t = Table::new(EVAL_COLUMNS.to_vec());
    let mut bad = 0;
    for (z, v) in points {
        bad += usize::from(!v.converged);
        t.rows.push(vec![
            Cell::Num(z.re),
            Cell::Num(z.im),
            Cell::Num(v.value.re),
            Cell::Num(v.value.im),
            Cell::Num(v.value.norm()),
            Cell::Num(v.err_estimate),
            Cell::Int(v.terms_used),
            Cell::Bool(v.converged),
        ]);
    }
    (t, bad)
}

fn eval_ml(job: &MlJob, ctl: &TruncationControl) -> Result<(Table, usize), CliError> {
    let f = match job.kind {
        IncompleteKind::Upper => incomplete_ml_upper,
        IncompleteKind::Lower => incomplete_ml_lower,
    };
    let values = job
        .z
        .iter()
        .map(|&z| Ok((z, f(job.a, job.b, job.delta, job.x, z, ctl)?)))
        .collect::<Result<Vec<_>, Error>>()?;
    Ok(eval_table(values))
}

fn eval_wright(job: &WrightJob, ctl: &TruncationControl) -> Result<(Table, usize), CliError> {
    if !job.spec.satisfies_entirety_condition() {
        eprintln!(
            "warning: sum(beta) - sum(alpha) = {} does not exceed 1; the series is not guaranteed to converge",
            job.spec.entirety_margin()
        );
    }
    let values = job
        .z
        .iter()
        .map(|&z| Ok((z, incomplete_wright(&job.spec, z, ctl)?)))
        .collect::<Result<Vec<_>, Error>>()?;
    Ok(eval_table(values))
}
