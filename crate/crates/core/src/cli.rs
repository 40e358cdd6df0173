//! Command-line front end. The `landau` binary only forwards to [`main_with_args`].
//!
//! Exit codes: 0 success, 1 a check or computation failed, 2 usage error.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::analysis::{
    audit_paper_table, emit, error_table_capped, BpesFitReport, FloatStyle, OutputFormat,
    PaperTable,
};
use crate::approximations::ApproxSpec;
use crate::boubaker::{
    derivative_sum_at_zero, minimal_positive_root_with, zero_sum_property, BoubakerFamily,
    RootConfig, DEFAULT_MAX_ORDER, DEFAULT_PRECISION_DIGITS, DEFAULT_ROOT_TOL,
};
use crate::bpes_fit::{bpes_pipeline_with, fit_direct, FitMethod, FALALEEV_SEED};
use crate::error::{Error, Result};
use crate::exact_landau::{landau_constant, DEFAULT_N_CAP};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Decimals printed for a Boubaker root.
pub const ROOT_DECIMALS: usize = 14;

#[derive(Parser, Debug)]
#[command(
    name = "landau",
    version,
    about = "Landau constants, Boubaker polynomials, and fits of the logarithmic law"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Default, Clone)]
pub struct GlobalArgs {
    /// Significant digits for root polishing and default decimal output (>= 15)
    #[arg(long, global = true, value_parser = clap::value_parser!(u32).range(15..))]
    pub precision_digits: Option<u32>,
    /// Root bracket width and residual bound
    #[arg(long, global = true, value_parser = parse_positive)]
    pub root_tol: Option<f64>,
    /// Largest n accepted by exact computations
    #[arg(long, global = true)]
    pub n_cap: Option<u64>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// key=value file supplying defaults for the flags above
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Write output here instead of standard output
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Print CSV floats with 8 decimals
    #[arg(long, global = true)]
    pub paper_compat: bool,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
        }
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Print G_n as a rounded decimal
    Exact {
        #[arg(long)]
        n: u64,
        /// Decimal places; defaults to the precision setting
        #[arg(long)]
        digits: Option<usize>,
    },
    /// Exact values against closed-form approximations
    Table {
        #[arg(long, default_value_t = 19)]
        n_max: u64,
        #[arg(long, value_delimiter = ',', default_value = "falaleev,brutman,fitted")]
        approx: Vec<ApproxKind>,
        /// a,b,c for the fitted form; fitted on 0:200 when omitted
        #[arg(long, value_parser = parse_triple)]
        params: Option<[f64; 3]>,
        /// Offset of the brutman form
        #[arg(long)]
        brutman_offset: Option<f64>,
    },
    /// Fit the three-parameter form
    Fit {
        /// Inclusive range lo:hi with lo < hi
        #[arg(long, default_value = "0:200", value_parser = parse_range)]
        range: (u64, u64),
        #[arg(long, value_enum, default_value_t = MethodArg::Direct)]
        method: MethodArg,
        /// a,b,c starting point for the direct fit
        #[arg(long, value_parser = parse_triple)]
        seed: Option<[f64; 3]>,
        /// Number of basis polynomials for the bpes method
        #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u64).range(1..=100))]
        n0: u64,
    },
    /// Check the relationships between the columns of the published table
    Audit {
        /// Table in the embedded CSV layout; the embedded copy when omitted
        #[arg(long)]
        table: Option<PathBuf>,
    },
    /// Boubaker polynomial toolkit
    Boubaker {
        #[arg(long)]
        order: usize,
        #[arg(long, value_enum, default_value_t = Action::Coeffs)]
        action: Action,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum ApproxKind {
    Falaleev,
    Brutman,
    Fitted,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Direct,
    Bpes,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Action {
    /// Coefficients, constant term first
    Coeffs,
    /// Minimal positive root
    Root,
    /// Sums of B_4k(0) and B'_4k(0) for k = 1..order/4
    Identities,
    /// CSV of order, root, residual for orders 4, 8, .., order
    RootTable,
}

fn parse_positive(s: &str) -> std::result::Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        _ => Err(format!("{s:?} is not a positive finite number")),
    }
}

fn parse_range(s: &str) -> std::result::Result<(u64, u64), String> {
    let (lo, hi) = s
        .split_once(':')
        .ok_or_else(|| format!("{s:?} is not of the form lo:hi"))?;
    let lo: u64 = lo.trim().parse().map_err(|e| format!("lower bound: {e}"))?;
    let hi: u64 = hi.trim().parse().map_err(|e| format!("upper bound: {e}"))?;
    if lo >= hi {
        return Err(format!("range {lo}:{hi} needs lo < hi"));
    }
    Ok((lo, hi))
}

fn parse_triple(s: &str) -> std::result::Result<[f64; 3], String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err(format!("{s:?} is not a,b,c"));
    }
    let mut out = [0.0; 3];
    for (slot, p) in out.iter_mut().zip(parts) {
        let v: f64 = p.trim().parse().map_err(|e| format!("{p:?}: {e}"))?;
        if !v.is_finite() {
            return Err(format!("{p:?} is not finite"));
        }
        *slot = v;
    }
    Ok(out)
}

/// Settings after merging flags over the config file over defaults.
#[derive(Clone, Debug, PartialEq)]
pub struct CliConfig {
    pub precision_digits: u32,
    pub root_tol: f64,
    pub n_cap: u64,
    pub format: OutputFormat,
    pub float_style: FloatStyle,
}

impl Default for CliConfig {
    fn default() -> Self {
        Self {
            precision_digits: DEFAULT_PRECISION_DIGITS,
            root_tol: DEFAULT_ROOT_TOL,
            n_cap: DEFAULT_N_CAP,
            format: OutputFormat::Csv,
            float_style: FloatStyle::Machine,
        }
    }
}

/// Invalid flags or configuration; reported with [`EXIT_USAGE`].
#[derive(Debug)]
pub struct UsageError(pub String);

impl CliConfig {
    /// Reads `key=value` lines; `#` starts a comment. Keys: `precision_digits`,
    /// `root_tol`, `n_cap`, `format`, `paper_compat`.
    pub fn parse_file(text: &str) -> std::result::Result<BTreeMap<String, String>, UsageError> {
        let mut map = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| UsageError(format!("config line {}: expected key=value", i + 1)))?;
            map.insert(k.trim().to_string(), v.trim().to_string());
        }
        Ok(map)
    }

    pub fn resolve(global: &GlobalArgs) -> std::result::Result<Self, UsageError> {
        let mut cfg = CliConfig::default();
        if let Some(path) = &global.config {
            let text = std::fs::read_to_string(path)
                .map_err(|e| UsageError(format!("config {}: {e}", path.display())))?;
            for (key, value) in Self::parse_file(&text)? {
                let bad = |what: &str| UsageError(format!("config {key}={value}: {what}"));
                match key.as_str() {
                    "precision_digits" => {
                        cfg.precision_digits = value.parse().map_err(|_| bad("not an integer"))?;
                        if cfg.precision_digits < 15 {
                            return Err(bad("must be at least 15"));
                        }
                    }
                    "root_tol" => cfg.root_tol = parse_positive(&value).map_err(|e| bad(&e))?,
                    "n_cap" => cfg.n_cap = value.parse().map_err(|_| bad("not an integer"))?,
                    "format" => {
                        cfg.format = value.parse().map_err(|_| bad("expected csv or json"))?
                    }
                    "paper_compat" => {
                        let on: bool = value.parse().map_err(|_| bad("expected true or false"))?;
                        cfg.float_style = if on {
                            FloatStyle::PaperCompat
                        } else {
                            FloatStyle::Machine
                        };
                    }
                    _ => return Err(bad("unknown key")),
                }
            }
        }
        if let Some(p) = global.precision_digits {
            cfg.precision_digits = p;
        }
        if let Some(t) = global.root_tol {
            cfg.root_tol = t;
        }
        if let Some(n) = global.n_cap {
            cfg.n_cap = n;
        }
        if let Some(f) = global.format {
            cfg.format = f.into();
        }
        if global.paper_compat {
            cfg.float_style = FloatStyle::PaperCompat;
        }
        Ok(cfg)
    }

    fn root_config(&self) -> RootConfig {
        RootConfig {
            tol: self.root_tol,
            precision_digits: self.precision_digits,
            ..RootConfig::default()
        }
    }
}

/// What a command produced.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: Vec<u8>,
    pub exit_code: i32,
}

impl Outcome {
    fn ok(stdout: impl Into<Vec<u8>>) -> Self {
        Self {
            stdout: stdout.into(),
            exit_code: EXIT_OK,
        }
    }
}

fn line(s: impl Into<String>) -> Vec<u8> {
    let mut s = s.into();
    s.push('\n');
    s.into_bytes()
}

/// Runs a parsed command and returns its output without touching stdout.
pub fn execute(cli: &Cli, cfg: &CliConfig) -> Result<Outcome> {
    match &cli.command {
        Command::Exact { n, digits } => {
            if *n > cfg.n_cap {
                return Err(Error::ResourceLimit {
                    what: "n",
                    requested: *n,
                    cap: cfg.n_cap,
                });
            }
            let digits = digits.unwrap_or(cfg.precision_digits as usize);
            Ok(Outcome::ok(line(landau_constant(*n).to_decimal(digits))))
        }
        Command::Table {
            n_max,
            approx,
            params,
            brutman_offset,
        } => {
            let mut specs = Vec::with_capacity(approx.len());
            for kind in approx {
                specs.push(match kind {
                    ApproxKind::Falaleev => ApproxSpec::Falaleev,
                    ApproxKind::Brutman => match brutman_offset {
                        Some(offset) => ApproxSpec::Brutman { offset: *offset },
                        None => ApproxSpec::brutman_default(),
                    },
                    ApproxKind::Fitted => {
                        let [a, b, c] = match params {
                            Some(p) => *p,
                            None => fit_direct(0, 200, FALALEEV_SEED)?.params(),
                        };
                        ApproxSpec::fitted(a, b, c)?
                    }
                });
            }
            let mut report = error_table_capped(*n_max, &specs, cfg.n_cap)?;
            report.metadata.working_precision_digits = cfg.precision_digits;
            Ok(Outcome::ok(emit(&report, cfg.format, cfg.float_style)))
        }
        Command::Fit {
            range: (lo, hi),
            method,
            seed,
            n0,
        } => match method {
            MethodArg::Direct => {
                let fit = fit_direct(*lo, *hi, seed.unwrap_or(FALALEEV_SEED))?;
                Ok(Outcome::ok(emit(&fit, cfg.format, cfg.float_style)))
            }
            MethodArg::Bpes => {
                let run = bpes_pipeline_with(*n0 as usize, &cfg.root_config())?;
                let fit = run.to_fit_result(*lo, *hi)?;
                debug_assert_eq!(fit.method, FitMethod::Bpes);
                let report = BpesFitReport::new(&run, fit);
                Ok(Outcome::ok(emit(&report, cfg.format, cfg.float_style)))
            }
        },
        Command::Audit { table } => {
            let table = match table {
                Some(path) => PaperTable::from_path(path)?,
                None => PaperTable::embedded(),
            };
            let report = audit_paper_table(&table)?;
            Ok(Outcome {
                stdout: emit(&report, cfg.format, cfg.float_style),
                exit_code: if report.passed() {
                    EXIT_OK
                } else {
                    EXIT_FAILURE
                },
            })
        }
        Command::Boubaker { order, action } => boubaker(*order, *action, cfg),
    }
}

fn boubaker(order: usize, action: Action, cfg: &CliConfig) -> Result<Outcome> {
    let family = BoubakerFamily::new(DEFAULT_MAX_ORDER);
    let quarter = || {
        if order < 4 || !order.is_multiple_of(4) {
            Err(Error::Domain(format!(
                "order {order} is not a positive multiple of 4"
            )))
        } else {
            Ok(order / 4)
        }
    };
    match action {
        Action::Coeffs => Ok(Outcome::ok(line(family.get(order)?.to_string()))),
        Action::Root => {
            family.get(order)?;
            let rec = minimal_positive_root_with(order, &cfg.root_config())?;
            Ok(Outcome::ok(line(rec.root.to_decimal(ROOT_DECIMALS))))
        }
        Action::Identities => {
            let n = quarter()?;
            Ok(Outcome::ok(line(format!(
                "{}, {}",
                zero_sum_property(n)?,
                derivative_sum_at_zero(n)?
            ))))
        }
        Action::RootTable => {
            let n = quarter()?;
            family.get(order)?;
            let mut out = String::from("order,root,residual\n");
            for k in 1..=n {
                let rec = minimal_positive_root_with(4 * k, &cfg.root_config())?;
                let _ = writeln!(
                    out,
                    "{},{},{}",
                    4 * k,
                    rec.root.to_decimal(ROOT_DECIMALS),
                    cfg.float_style.format(rec.residual)
                );
            }
            Ok(Outcome::ok(out))
        }
    }
}

/// Exit code for a library error: bad input is a usage error, anything
/// else is a failure.
pub fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::ResourceLimit { .. }
        | Error::Domain(_)
        | Error::UnsupportedFormat(_)
        | Error::MalformedTable(_) => EXIT_USAGE,
        Error::NoRoot { .. } | Error::DegenerateBasis(_) | Error::Io(_) | Error::Csv(_) => {
            EXIT_FAILURE
        }
    }
}

fn write_output(bytes: &[u8], out: Option<&Path>) -> std::io::Result<()> {
    match out {
        Some(path) => std::fs::write(path, bytes),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(bytes)?;
            stdout.flush()
        }
    }
}

/// Parses `args` (program name first), runs the command, writes its output,
/// and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let cfg = match CliConfig::resolve(&cli.global) {
        Ok(cfg) => cfg,
        Err(UsageError(msg)) => {
            eprintln!("error: {msg}");
            return EXIT_USAGE;
        }
    };
    match execute(&cli, &cfg) {
        Ok(outcome) => {
            if let Err(e) = write_output(&outcome.stdout, cli.global.out.as_deref()) {
                eprintln!("error: {e}");
                return EXIT_FAILURE;
            }
            outcome.exit_code
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}
