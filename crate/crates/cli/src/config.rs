//! Typed run configuration built from the merged key map.

use std::collections::BTreeMap;
use std::path::PathBuf;

use felkit::series::{IncompleteKind, KernelCutoff, WrightSpec};
use felkit::solver::{FelParameters, Forcing, InitialData, KernelPower, SampledForcing};
use felkit::{Complex64, TruncationControl};

use crate::args::Invocation;
use crate::error::{usage, CliError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    RiemannLiouville,
    Caputo,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl Grid {
    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.min];
        }
        let step = (self.max - self.min) / (self.points - 1) as f64;
        (0..self.points)
            .map(|i| if i + 1 == self.points { self.max } else { self.min + step * i as f64 })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FelJob {
    pub variant: Variant,
    pub params: FelParameters,
    pub init: InitialData,
    pub forcing: Forcing,
    pub grid: Grid,
    pub power: KernelPower,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MlJob {
    pub kind: IncompleteKind,
    pub a: f64,
    pub b: f64,
    pub delta: f64,
    pub x: f64,
    pub z: Vec<Complex64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WrightJob {
    pub spec: WrightSpec,
    pub z: Vec<Complex64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Job {
    EvalMl(MlJob),
    EvalWright(WrightJob),
    Solve(FelJob),
    Verify { job: FelJob, tol_residual: f64 },
    /// One job per parameter point, in output order.
    Sweep(Vec<FelJob>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub job: Job,
    pub format: Format,
    pub output: Option<PathBuf>,
    pub strict: bool,
    pub ctl: TruncationControl,
}

/// re, re+imi, re-imi, imi, i, -i.
pub fn parse_complex(s: &str) -> Result<Complex64, CliError> {
    let bad = || usage(format!("cannot parse complex number `{s}` (expected re+imi)"));
    let t = s.trim();
    let number = |v: &str| -> Result<f64, CliError> {
        let x: f64 = v.parse().map_err(|_| bad())?;
        if x.is_finite() {
            Ok(x)
        } else {
            Err(bad())
        }
    };
    let Some(body) = t.strip_suffix('i') else {
        return Ok(Complex64::new(number(t)?, 0.0));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&j| matches!(bytes[j], b'+' | b'-') && !matches!(bytes[j - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(j) => (number(&body[..j])?, &body[j..]),
        None => (0.0, body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        v => number(v)?,
    };
    Ok(Complex64::new(re, im))
}

fn parse_real(key: &str, s: &str) -> Result<f64, CliError> {
    match s.trim().parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(usage(format!("--{key}: cannot parse `{s}` as a finite number"))),
    }
}

fn list<T>(s: &str, f: impl Fn(&str) -> Result<T, CliError>) -> Result<Vec<T>, CliError> {
    s.split(',').map(|p| f(p.trim())).collect()
}

pub fn parse_grid(s: &str) -> Result<Grid, CliError> {
    let bad = |why: &str| usage(format!("--grid `{s}`: {why}"));
    let parts: Vec<&str> = s.split(':').collect();
    let [min, max, points] = parts.as_slice() else {
        return Err(bad("expected MIN:MAX:POINTS"));
    };
    let min = parse_real("grid", min)?;
    let max = parse_real("grid", max)?;
    let points: usize = points.trim().parse().map_err(|_| bad("POINTS must be a positive integer"))?;
    if points == 0 || min < 0.0 || max < min || (points > 1 && max == min) {
        return Err(bad("need 0 <= MIN < MAX and POINTS >= 1"));
    }
    Ok(Grid { min, max, points })
}

/// Typed view of the key map that remembers which keys were consumed.
struct Values<'a> {
    map: &'a BTreeMap<String, String>,
}

impl<'a> Values<'a> {
    fn get(&self, key: &str) -> Option<&'a str> {
        self.map.get(key).map(String::as_str)
    }

    fn required(&self, key: &str) -> Result<&'a str, CliError> {
        self.get(key).ok_or_else(|| usage(format!("missing required --{key}")))
    }

    fn real(&self, key: &str) -> Result<f64, CliError> {
        parse_real(key, self.required(key)?)
    }

    fn real_or(&self, key: &str, default: f64) -> Result<f64, CliError> {
        self.get(key).map_or(Ok(default), |v| parse_real(key, v))
    }

    fn complex_or(&self, key: &str, default: Option<Complex64>) -> Result<Complex64, CliError> {
        match (self.get(key), default) {
            (Some(v), _) => parse_complex(v),
            (None, Some(d)) => Ok(d),
            (None, None) => Err(usage(format!("missing required --{key}"))),
        }
    }

    fn choice<T: Copy>(&self, key: &str, options: &[(&str, T)], default: T) -> Result<T, CliError> {
        let Some(v) = self.get(key) else { return Ok(default) };
        options.iter().find(|o| o.0 == v).map(|o| o.1).ok_or_else(|| {
            let names: Vec<&str> = options.iter().map(|o| o.0).collect();
            usage(format!("--{key}: `{v}` is not one of {}", names.join(", ")))
        })
    }

    fn flag(&self, key: &str) -> Result<bool, CliError> {
        self.choice(key, &[("true", true), ("false", false)], false)
    }

    fn usize_or(&self, key: &str, default: usize) -> Result<usize, CliError> {
        self.get(key).map_or(Ok(default), |v| {
            v.trim().parse().map_err(|_| usage(format!("--{key}: `{v}` is not a non-negative integer")))
        })
    }
}

pub fn build(inv: &Invocation) -> Result<RunConfig, CliError> {
    let v = Values { map: &inv.values };
    let defaults = TruncationControl::default();
    let ctl = TruncationControl::new(
        v.real_or("rel-tol", defaults.rel_tol)?,
        v.usize_or("max-terms", defaults.max_terms)?,
        v.usize_or("consecutive-small", defaults.consecutive_small)?,
    )
    .map_err(|e| usage(e.to_string()))?;
    let job = match inv.command {
        "eval-ml" => Job::EvalMl(ml_job(&v)?),
        "eval-wright" => Job::EvalWright(wright_job(&v)?),
        "solve" => Job::Solve(fel_job(&v, fel_params(&v)?)?),
        "verify" => {
            let tol_residual = v.real_or("tol-residual", 1e-3)?;
            if !(tol_residual > 0.0) {
                return Err(usage("--tol-residual must be > 0"));
            }
            Job::Verify { job: fel_job(&v, fel_params(&v)?)?, tol_residual }
        }
        "sweep" => Job::Sweep(sweep_jobs(&v)?),
        other => return Err(usage(format!("unknown command {other}"))),
    };
    Ok(RunConfig {
        job,
        format: v.choice("format", &[("csv", Format::Csv), ("json", Format::Json)], Format::Csv)?,
        output: v.get("output").map(PathBuf::from),
        strict: v.flag("strict")?,
        ctl,
    })
}

fn kind(v: &Values) -> Result<IncompleteKind, CliError> {
    v.choice("kind", &[("upper", IncompleteKind::Upper), ("lower", IncompleteKind::Lower)], IncompleteKind::Upper)
}

fn ml_job(v: &Values) -> Result<MlJob, CliError> {
    Ok(MlJob {
        kind: kind(v)?,
        a: v.real("a")?,
        b: v.real("b")?,
        delta: v.real("delta")?,
        x: v.real("x")?,
        z: list(v.required("z")?, parse_complex)?,
    })
}

fn pairs(key: &str, s: &str) -> Result<Vec<(f64, f64)>, CliError> {
    list(s, |p| {
        let (a, b) = p
            .split_once(':')
            .ok_or_else(|| usage(format!("--{key}: `{p}` is not a pair value:scale")))?;
        Ok((parse_real(key, a)?, parse_real(key, b)?))
    })
}

fn wright_job(v: &Values) -> Result<WrightJob, CliError> {
    let cutoff = |key: &str| v.get(key).map(|s| parse_real(key, s)).transpose();
    Ok(WrightJob {
        spec: WrightSpec {
            numerator: pairs("numerator", v.required("numerator")?)?,
            denominator: pairs("denominator", v.required("denominator")?)?,
            numerator_cutoff: cutoff("numerator-cutoff")?,
            denominator_cutoff: cutoff("denominator-cutoff")?,
            kind: kind(v)?,
        },
        z: list(v.required("z")?, parse_complex)?,
    })
}

fn fel_params(v: &Values) -> Result<FelParameters, CliError> {
    Ok(FelParameters {
        a: v.real("a")?,
        b_kernel: v.real("bkernel")?,
        c: v.real("c")?,
        rho: v.real_or("rho", 1.0)?,
        zeta: v.real("zeta")?,
        omega: v.complex_or("omega", None)?,
        delta: v.complex_or("delta", Some(Complex64::new(0.0, 0.0)))?,
        x_cut: v.real_or("x", 0.0)?,
    })
}

fn forcing(v: &Values) -> Result<Forcing, CliError> {
    let amplitude = || v.complex_or("g", Some(Complex64::new(1.0, 0.0)));
    let kind = v.get("forcing").unwrap_or("none");
    let unused = |keys: &[&str]| match keys.iter().find(|k| v.get(k).is_some()) {
        Some(k) => Err(usage(format!("--{k} does not apply to --forcing {kind}"))),
        None => Ok(()),
    };
    Ok(match kind {
        "none" => {
            unused(&["g", "nu", "g-coefs", "g-file"])?;
            Forcing::zero()
        }
        "const" => {
            unused(&["nu", "g-coefs", "g-file"])?;
            Forcing::Constant(amplitude()?)
        }
        "exp" => {
            unused(&["g-coefs", "g-file"])?;
            Forcing::ExpInu { amplitude: amplitude()?, nu: v.real("nu")? }
        }
        "poly" => {
            unused(&["g", "nu", "g-file"])?;
            Forcing::Polynomial(list(v.required("g-coefs")?, parse_complex)?)
        }
        "file" => {
            unused(&["g", "nu", "g-coefs"])?;
            Forcing::Sampled(read_samples(v.required("g-file")?)?)
        }
        other => return Err(usage(format!("--forcing: `{other}` is not one of none, const, exp, poly, file"))),
    })
}

/// Lines `t,re,im`; a first line that does not parse is taken as a header.
fn read_samples(path: &str) -> Result<SampledForcing, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("cannot read {path}: {e}")))?;
    let mut times = Vec::new();
    let mut values = Vec::new();
    for (i, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let cols: Vec<&str> = line.split(',').map(str::trim).collect();
        let parsed = match cols.as_slice() {
            [t, re, im] => (|| Some((t.parse().ok()?, re.parse().ok()?, im.parse().ok()?)))(),
            _ => None,
        };
        match parsed {
            Some((t, re, im)) => {
                times.push(t);
                values.push(Complex64::new(re, im));
            }
            None if i == 0 => {}
            None => return Err(usage(format!("{path} line {}: expected t,re,im", i + 1))),
        }
    }
    SampledForcing::new(times, values).map_err(|e| usage(format!("{path}: {e}")))
}

fn fel_job(v: &Values, params: FelParameters) -> Result<FelJob, CliError> {
    let variant = v.choice(
        "variant",
        &[("rl", Variant::RiemannLiouville), ("caputo", Variant::Caputo)],
        Variant::RiemannLiouville,
    )?;
    let coefs = list(v.required("init")?, parse_complex)?;
    let init = match variant {
        Variant::RiemannLiouville => InitialData::RiemannLiouville(coefs),
        Variant::Caputo => InitialData::Caputo(coefs),
    };
    let power = v.choice(
        "kernel-power",
        &[
            ("convolution", KernelPower::Convolution),
            ("scaled-fixed", KernelPower::ScaledParameter(KernelCutoff::Fixed)),
            ("scaled-index", KernelPower::ScaledParameter(KernelCutoff::ScaledByIndex)),
        ],
        KernelPower::Convolution,
    )?;
    params.validate()?;
    if init.coefficients().len() != params.order() {
        return Err(usage(format!(
            "--init: a = {} needs {} initial value(s), got {}",
            params.a,
            params.order(),
            init.coefficients().len()
        )));
    }
    Ok(FelJob {
        variant,
        params,
        init,
        forcing: forcing(v)?,
        grid: parse_grid(v.get("grid").unwrap_or("0:1:101"))?,
        power,
    })
}

const SWEPT: &[&str] = &["a", "bkernel", "c", "rho", "zeta", "x", "omega", "delta"];

fn sweep_jobs(v: &Values) -> Result<Vec<FelJob>, CliError> {
    match v.get("preset") {
        Some("classical") => classical_sweep(v),
        Some(other) => Err(usage(format!("--preset: `{other}` is not one of classical"))),
        None => {
            if v.get("g0").is_some() {
                return Err(usage("--g0 needs --preset classical"));
            }
            general_sweep(v)
        }
    }
}

fn classical_sweep(v: &Values) -> Result<Vec<FelJob>, CliError> {
    let fixed = ["variant", "init", "forcing", "g", "g-coefs", "g-file", "kernel-power"];
    if let Some(k) = SWEPT.iter().chain(&fixed).find(|k| v.get(k).is_some()) {
        return Err(usage(format!("--{k} conflicts with --preset classical")));
    }
    let g0s = list(v.required("g0")?, |s| parse_real("g0", s))?;
    let nus = list(v.get("nu").unwrap_or("0"), |s| parse_real("nu", s))?;
    let grid = parse_grid(v.get("grid").unwrap_or("0:1:101"))?;
    let mut jobs = Vec::new();
    for &g0 in &g0s {
        for &nu in &nus {
            jobs.push(FelJob {
                variant: Variant::RiemannLiouville,
                params: FelParameters::classical(g0, nu),
                init: InitialData::RiemannLiouville(vec![Complex64::new(1.0, 0.0)]),
                forcing: Forcing::zero(),
                grid,
                power: KernelPower::Convolution,
            });
        }
    }
    Ok(jobs)
}

fn general_sweep(v: &Values) -> Result<Vec<FelJob>, CliError> {
    let reals = |key: &str, default: Option<f64>| -> Result<Vec<f64>, CliError> {
        match (v.get(key), default) {
            (Some(s), _) => list(s, |p| parse_real(key, p)),
            (None, Some(d)) => Ok(vec![d]),
            (None, None) => Err(usage(format!("missing required --{key}"))),
        }
    };
    let complexes = |key: &str, default: Option<Complex64>| -> Result<Vec<Complex64>, CliError> {
        match (v.get(key), default) {
            (Some(s), _) => list(s, parse_complex),
            (None, Some(d)) => Ok(vec![d]),
            (None, None) => Err(usage(format!("missing required --{key}"))),
        }
    };
    let (a, bk, c, rho, zeta, x) = (
        reals("a", None)?,
        reals("bkernel", None)?,
        reals("c", None)?,
        reals("rho", Some(1.0))?,
        reals("zeta", None)?,
        reals("x", Some(0.0))?,
    );
    let omega = complexes("omega", None)?;
    let delta = complexes("delta", Some(Complex64::new(0.0, 0.0)))?;
    let mut jobs = Vec::new();
    for &a in &a {
        for &b_kernel in &bk {
            for &c in &c {
                for &rho in &rho {
                    for &zeta in &zeta {
                        for &x_cut in &x {
                            for &omega in &omega {
                                for &delta in &delta {
                                    let p = FelParameters { a, b_kernel, c, rho, zeta, omega, delta, x_cut };
                                    jobs.push(fel_job(v, p)?);
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(jobs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::args::parse;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn complex_forms() {
        assert_eq!(parse_complex("0.2-0.3i").unwrap(), c(0.2, -0.3));
        assert_eq!(parse_complex("0.2+0i").unwrap(), c(0.2, 0.0));
        assert_eq!(parse_complex("-1.5").unwrap(), c(-1.5, 0.0));
        assert_eq!(parse_complex("2i").unwrap(), c(0.0, 2.0));
        assert_eq!(parse_complex("-i").unwrap(), c(0.0, -1.0));
        assert_eq!(parse_complex("1e-3+2E+1i").unwrap(), c(1e-3, 20.0));
        assert_eq!(parse_complex("-1e-3-i").unwrap(), c(-1e-3, -1.0));
        for bad in ["", "i1", "1+2", "1+xi", "nan", "1+infi", "0.2 - 0.3 i"] {
            assert!(parse_complex(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn grid_forms() {
        let g = parse_grid("0:1:101").unwrap();
        let v = g.values();
        assert_eq!((v.len(), v[0], v[100]), (101, 0.0, 1.0));
        assert!((v[50] - 0.5).abs() < 1e-16);
        assert_eq!(parse_grid("0.5:0.5:1").unwrap().values(), vec![0.5]);
        for bad in ["0:1", "1:0:5", "0:1:0", "-1:1:3", "0:0:3", "a:1:3"] {
            assert!(parse_grid(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn solve_example_maps_to_caputo_job() {
        let argv = "felkit solve --variant caputo --a 0.75 --bkernel 1.5 --c 1 --rho 1 --zeta 2 --x 1 \
                    --omega 0.2+0i --delta 0 --init 1 --grid 0:1:101";
        let cfg = build(&parse(argv.split_whitespace()).unwrap().unwrap()).unwrap();
        let Job::Solve(job) = cfg.job else { panic!("not a solve job") };
        assert_eq!(job.variant, Variant::Caputo);
        assert_eq!(job.init, InitialData::Caputo(vec![c(1.0, 0.0)]));
        assert_eq!(job.params.omega, c(0.2, 0.0));
        assert_eq!((job.params.a, job.params.x_cut, job.params.zeta), (0.75, 1.0, 2.0));
        assert_eq!(job.grid, Grid { min: 0.0, max: 1.0, points: 101 });
        assert_eq!(cfg.format, Format::Csv);
    }

    #[test]
    fn usage_errors() {
        let err = |argv: &str| build(&parse(argv.split_whitespace()).unwrap().unwrap()).unwrap_err();
        let e = err("felkit solve --bkernel 1.5 --c 1 --zeta 2 --omega 0 --init 1");
        assert!(e.to_string().contains("--a"), "{e}");
        assert_eq!(e.exit_code(), 2);
        let e = err("felkit solve --a 1.5 --bkernel 1.5 --c 1 --zeta 2 --omega 0 --init 1");
        assert!(e.to_string().contains("--init"), "{e}");
        let e = err("felkit solve --a -1 --bkernel 1.5 --c 1 --zeta 2 --omega 0 --init 1");
        assert_eq!(e.exit_code(), 2);
        let e = err("felkit sweep --preset classical --g0 0.1 --a 1");
        assert!(e.to_string().contains("conflicts"), "{e}");
        let e = err("felkit solve --a 1 --bkernel 2 --c 1 --zeta 1 --omega 0 --init 1 --nu 2");
        assert!(e.to_string().contains("--nu"), "{e}");
    }

    #[test]
    fn general_sweep_is_cartesian() {
        let argv = "felkit sweep --a 0.5,1 --bkernel 2 --c 1 --zeta 1,2,3 --omega 0.1 --init 1";
        let cfg = build(&parse(argv.split_whitespace()).unwrap().unwrap()).unwrap();
        let Job::Sweep(jobs) = cfg.job else { panic!() };
        let points: Vec<(f64, f64)> = jobs.iter().map(|j| (j.params.a, j.params.zeta)).collect();
        assert_eq!(points, [(0.5, 1.0), (0.5, 2.0), (0.5, 3.0), (1.0, 1.0), (1.0, 2.0), (1.0, 3.0)]);
    }
}
