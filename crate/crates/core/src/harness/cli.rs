//! `complex-ou` command line. Exit codes: 0 all applicable checks pass,
//! 1 a check failed, 2 configuration or precondition error.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use super::config::Config;
use super::suite::{run_selected, test_function, Selection};
use crate::error::{Error, Result};
use crate::fields::{write_csv, GridField};
use crate::kernel::convolution_kernel;
use crate::resolvent::{resolve_with_plan, LaplaceQuadSpec};
use crate::semigroup::SemigroupPlan;
use crate::spectral::eigenstructure;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "complex-ou", version, about = "Verification suites for complex Ornstein-Uhlenbeck operators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Structural assumptions, spectral constants and gamma_A.
    Certify(Common),
    /// Kernel moment identities and the |K| moment bound.
    KernelCheck(Common),
    /// Semigroup law, strong continuity and the generator quotient.
    SemigroupCheck(Common),
    /// Resolvent residuals, Lp estimates and the dissipativity probe.
    ResolventCheck(Common),
    /// Every suite the configuration enables.
    Suite(Common),
    /// Write a kernel or field sample as CSV.
    Dump(DumpArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DumpKind {
    /// `K(psi, t)` on the grid, entries row-major as components.
    Kernel,
    /// The suite's test function.
    Sample,
    /// `T(t)` applied to the test function.
    Semigroup,
    /// `R(lambda)` applied to the test function, first configured lambda.
    Resolvent,
}

#[derive(Debug, Args)]
struct Common {
    /// Config file; the bundled names (identity-2d.json, a4-violator.json, ...) also resolve.
    #[arg(long, value_name = "PATH", default_value = "identity-2d.json")]
    config: PathBuf,
    /// Write the output here instead of stdout.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "table")]
    format: Format,
    /// Seed for the gamma_A multistart.
    #[arg(long, value_name = "U64")]
    seed: Option<u64>,
    /// Grid override as `n,L`.
    #[arg(long, value_name = "n,L")]
    grid: Option<String>,
    /// Exponent p override.
    #[arg(long, value_name = "FLOAT")]
    p: Option<f64>,
    /// Single resolvent parameter `RE,IM`, replacing the configured list.
    #[arg(long, value_name = "RE,IM", allow_hyphen_values = true)]
    lambda: Option<String>,
}

#[derive(Debug, Args)]
struct DumpArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, value_enum, default_value = "kernel")]
    what: DumpKind,
    /// Time for kernel and semigroup dumps.
    #[arg(long, default_value_t = 0.5)]
    time: f64,
}

fn parse_pair(field: &str, text: &str) -> Result<(f64, f64)> {
    let bad = || Error::Config {
        field: field.into(),
        message: format!("expected two comma-separated numbers, got `{text}`"),
    };
    let (a, b) = text.split_once(',').ok_or_else(bad)?;
    Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
}

fn load(common: &Common) -> Result<Config> {
    let mut cfg = Config::load(&common.config)?;
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(grid) = &common.grid {
        let (n, l) = parse_pair("--grid", grid)?;
        if n.fract() != 0.0 || n < 1.0 {
            return Err(Error::Config {
                field: "--grid".into(),
                message: format!("n must be a positive integer, got {n}"),
            });
        }
        cfg.grid.n = n as usize;
        cfg.grid.half_extent = l;
    }
    if let Some(p) = common.p {
        cfg.exponent = p;
    }
    if let Some(lambda) = &common.lambda {
        let (re, im) = parse_pair("--lambda", lambda)?;
        cfg.suites.lambdas = vec![[re, im]];
    }
    cfg.validate()?;
    Ok(cfg)
}

fn emit(common: &Common, text: &str, stdout: &mut dyn Write) -> Result<()> {
    match &common.out {
        Some(path) => std::fs::write(path, text)?,
        None => stdout.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn dump(args: &DumpArgs, stdout: &mut dyn Write) -> Result<()> {
    let cfg = load(&args.common)?;
    let problem = cfg.problem()?;
    let spec = cfg.grid_spec()?;
    let eig = eigenstructure(problem.a(), problem.b())?;
    let n = problem.size();
    let field = match args.what {
        DumpKind::Kernel => {
            let mut values = Vec::with_capacity(spec.len() * n * n);
            for flat in 0..spec.len() {
                let k = convolution_kernel(&problem, &eig, &spec.point(flat), args.time)?;
                values.extend((0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| k[(i, j)]));
            }
            GridField::from_values(spec, n * n, values)?
        }
        DumpKind::Sample => test_function(spec.d, n, 1.0)?.sample(&spec)?,
        DumpKind::Semigroup => {
            let plan = SemigroupPlan::with_eigenstructure(&problem, eig, spec)?;
            plan.apply(&test_function(spec.d, n, 1.0)?.sample(&spec)?, args.time)?
        }
        DumpKind::Resolvent => {
            let plan = SemigroupPlan::with_eigenstructure(&problem, eig, spec)?;
            let lambda = cfg.lambdas().first().copied().unwrap_or(Complex64::new(1.0, 0.0));
            let quad = LaplaceQuadSpec::for_plan(&plan, lambda, cfg.quadrature.tail_tol)?;
            resolve_with_plan(&plan, &test_function(spec.d, n, 1.0)?.sample(&spec)?, lambda, &quad)?.v
        }
    };
    let mut buf = Vec::new();
    write_csv(&field, &mut buf)?;
    emit(&args.common, &String::from_utf8(buf).expect("CSV is UTF-8"), stdout)
}

fn report(common: &Common, sel: Selection, stdout: &mut dyn Write) -> Result<bool> {
    let cfg = load(common)?;
    let report = run_selected(&cfg, sel)?;
    let text = match common.format {
        Format::Json => report.to_json() + "\n",
        Format::Table => report.to_table(),
    };
    emit(common, &text, stdout)?;
    Ok(report.passed())
}

/// Runs the CLI on `argv` (including the program name) and returns the exit code.
pub fn run_with<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_PASS };
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    let none = Selection::CERTIFY;
    let outcome = match &cli.command {
        Command::Certify(c) => report(c, none, stdout),
        Command::KernelCheck(c) => report(c, Selection { kernel: true, ..none }, stdout),
        Command::SemigroupCheck(c) => report(c, Selection { semigroup: true, ..none }, stdout),
        Command::ResolventCheck(c) => report(c, Selection { resolvent: true, lemma: true, ..none }, stdout),
        Command::Suite(c) => load(c).and_then(|cfg| report(c, Selection::from_config(&cfg), stdout)),
        Command::Dump(args) => dump(args, stdout).map(|_| true),
    };
    match outcome {
        Ok(true) => EXIT_PASS,
        Ok(false) => EXIT_FAIL,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_ERROR
        }
    }
}

/// Process entry point: reads `std::env::args_os`.
pub fn run() -> i32 {
    run_with(std::env::args_os(), &mut std::io::stdout(), &mut std::io::stderr())
}
