//! Command line and config file: both reduce to one key → value map per run.

use std::collections::BTreeMap;
use std::path::Path;

use clap::parser::ValueSource;
use clap::{Arg, ArgAction, Command};

use crate::error::{usage, CliError};

pub struct Key {
    pub name: &'static str,
    pub help: &'static str,
    pub switch: bool,
}

const fn key(name: &'static str, help: &'static str) -> Key {
    Key { name, help, switch: false }
}

const COMMON: &[Key] = &[
    key("format", "Output format: csv or json [default: csv]"),
    key("output", "Output file [default: stdout]"),
    Key { name: "strict", help: "Exit 3 if any series fails to converge", switch: true },
    key("rel-tol", "Series truncation tolerance [default: 1e-12]"),
    key("max-terms", "Series term budget [default: 500]"),
    key("consecutive-small", "Small terms required before stopping [default: 3]"),
];

const FEL: &[Key] = &[
    key("variant", "Initial data: rl (Riemann-Liouville) or caputo [default: rl]"),
    key("a", "Derivative order a > 0 (required)"),
    key("bkernel", "Kernel power b > 0 (required)"),
    key("c", "Kernel Pochhammer parameter c >= 0 (required)"),
    key("rho", "Kernel Mittag-Leffler order rho > 0 [default: 1]"),
    key("zeta", "Kernel argument scale zeta (required)"),
    key("x", "Incomplete cutoff x >= 0 [default: 0]"),
    key("omega", "Memory coefficient, complex re+imi (required)"),
    key("delta", "Forcing coefficient, complex [default: 0]"),
    key("init", "Initial data b_1..b_n or a_0..a_(n-1), comma separated complex (required)"),
    key("forcing", "Forcing g: none, const, exp, poly or file [default: none]"),
    key("g", "Amplitude of const / exp forcing, complex [default: 1]"),
    key("nu", "Frequency of exp forcing g = amplitude * exp(i nu mu)"),
    key("g-coefs", "Coefficients c_0,c_1,... of poly forcing, complex"),
    key("g-file", "CSV file of t,re,im samples for file forcing"),
    key("grid", "mu grid MIN:MAX:POINTS [default: 0:1:101]"),
    key("kernel-power", "Kernel powers: convolution, scaled-fixed or scaled-index [default: convolution]"),
];

const ML: &[Key] = &[
    key("kind", "upper or lower [default: upper]"),
    key("a", "Order a > 0 (required)"),
    key("b", "Order b > 0 (required)"),
    key("delta", "Pochhammer parameter delta > 0 (required)"),
    key("x", "Incomplete cutoff x >= 0 (required)"),
    key("z", "Arguments, comma separated complex (required)"),
];

const WRIGHT: &[Key] = &[
    key("kind", "upper or lower [default: upper]"),
    key("numerator", "Numerator pairs a:alpha, comma separated (required)"),
    key("denominator", "Denominator pairs b:beta, comma separated (required)"),
    key("numerator-cutoff", "Cutoff on the first numerator gamma"),
    key("denominator-cutoff", "Cutoff on the first denominator gamma"),
    key("z", "Arguments, comma separated complex (required)"),
];

const VERIFY: &[Key] = &[key("tol-residual", "Pass threshold on rel_residual [default: 1e-3]")];

const SWEEP: &[Key] = &[
    key("preset", "classical: a=1, b=2, c=2, rho=1, x=0, zeta=nu, omega=-i pi g0, delta=0, b_1=1"),
    key("g0", "Gain values for the classical preset, comma separated"),
];

pub const COMMANDS: &[(&str, &str)] = &[
    ("eval-ml", "Evaluate incomplete Mittag-Leffler functions"),
    ("eval-wright", "Evaluate incomplete Fox-Wright functions"),
    ("solve", "Evaluate the series solution on a mu grid"),
    ("verify", "Solve, then check the equation residual with independent numerics"),
    ("sweep", "Solve over a cartesian grid of parameters (comma separated lists)"),
];

pub fn keys(command: &str) -> Vec<&'static Key> {
    let groups: &[&[Key]] = match command {
        "eval-ml" => &[ML, COMMON],
        "eval-wright" => &[WRIGHT, COMMON],
        "solve" => &[FEL, COMMON],
        "verify" => &[FEL, VERIFY, COMMON],
        "sweep" => &[FEL, SWEEP, COMMON],
        _ => &[],
    };
    groups.iter().flat_map(|g| g.iter()).collect()
}

fn cli() -> Command {
    let subcommands = COMMANDS.iter().map(|&(name, about)| {
        let config = Arg::new("config")
            .long("config")
            .value_name("PATH")
            .help("key = value file; command-line flags override it");
        keys(name).into_iter().fold(Command::new(name).about(about).arg(config), |cmd, k| {
            let arg = Arg::new(k.name).long(k.name).help(k.help);
            cmd.arg(if k.switch { arg.action(ArgAction::SetTrue) } else { arg.value_name("VALUE").allow_hyphen_values(true) })
        })
    });
    Command::new("felkit")
        .about("Incomplete Mittag-Leffler / Wright evaluation and FEL series solutions")
        .version(env!("CARGO_PKG_VERSION"))
        .subcommand_required(true)
        .args_override_self(true)
        .subcommands(subcommands)
}

pub struct Invocation {
    pub command: &'static str,
    pub values: BTreeMap<String, String>,
}

/// Parses argv. `Ok(None)` means help or version text was printed.
pub fn parse<I, T>(argv: I) -> Result<Option<Invocation>, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let matches = match cli().try_get_matches_from(argv) {
        Ok(m) => m,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return Ok(None);
        }
        Err(e) => return Err(usage(e.to_string().trim_end())),
    };
    let (name, sub) = matches.subcommand().expect("a subcommand is required");
    let command = COMMANDS.iter().map(|c| c.0).find(|&c| c == name).expect("known subcommand");
    let mut values = match sub.get_one::<String>("config") {
        Some(path) => read_config(Path::new(path), command)?,
        None => BTreeMap::new(),
    };
    for k in keys(command) {
        if sub.value_source(k.name) != Some(ValueSource::CommandLine) {
            continue;
        }
        let v = if k.switch { "true".to_string() } else { sub.get_one::<String>(k.name).expect("value").clone() };
        values.insert(k.name.to_string(), v);
    }
    Ok(Some(Invocation { command, values }))
}

fn read_config(path: &Path, command: &str) -> Result<BTreeMap<String, String>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read config {}: {e}", path.display())))?;
    parse_config(&text, command)
}

/// `key = value` lines; `#` starts a comment.
pub fn parse_config(text: &str, command: &str) -> Result<BTreeMap<String, String>, CliError> {
    let known = keys(command);
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(usage(format!("config line {}: expected `key = value`", i + 1)));
        };
        let (k, v) = (k.trim(), v.trim());
        if !known.iter().any(|key| key.name == k) {
            return Err(usage(format!("config line {}: unknown key `{k}` for {command}", i + 1)));
        }
        if let Some(prev) = out.insert(k.to_string(), v.to_string()) {
            if prev != v {
                return Err(usage(format!("config line {}: `{k}` set twice ({prev} and {v})", i + 1)));
            }
        }
    }
    Ok(out)
}
