//! The `polyharm` command line.
//!
//! Exit codes: 0 on success, 1 on check violations or runtime failures (reports are
//! still written), 2 on usage or validation errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::error::{Error, Result};
use crate::kernels::geometry::BallGeometry;
use crate::kernels::{green, KernelParams};
use crate::ode1d::{bounded_solution_scan, integrate, tensor_grid, Nonlinearity1D, ODEState};
use crate::quadrature::QuadratureSpec;
use crate::report::Report;
use crate::representation::{default_schedule, gaussian_dipole, halfspace_representation};
use crate::semilinear::{picard_solve_with, write_history_csv, GreenOperator, GridFunction, PicardConfig};
use crate::suites::{default_lattice, run_suite, SuiteConfig, SuiteName};

pub const OUT_DIR_ENV: &str = "POLYHARM_OUT_DIR";

/// A comma-separated list of decimals.
#[derive(Debug, Clone, PartialEq)]
pub struct Coords(pub Vec<f64>);

impl FromStr for Coords {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        s.split(',')
            .map(|c| c.trim().parse::<f64>().map_err(|e| format!("bad coordinate {c:?}: {e}")))
            .collect::<std::result::Result<Vec<_>, _>>()
            .map(Coords)
    }
}

#[derive(Debug, Parser)]
#[command(name = "polyharm", version, about = "Polyharmonic Green functions and verification suites")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate a Green function at one pair of points.
    KernelEval(KernelEvalArgs),
    /// Run verification suites and write JSON reports.
    Verify(VerifyArgs),
    /// Picard iteration for the semilinear integral equation on the unit ball.
    SolveBall(SolveBallArgs),
    /// Truncated half-space representation with tail bounds.
    HalfspaceRepr(HalfspaceArgs),
    /// Integrate the one-dimensional reduction and write the trajectory.
    OdeRun(OdeRunArgs),
    /// Classify a grid of initial data as bounded or blowing up.
    OdeScan(OdeScanArgs),
    /// Check the blow-up rescaling exponents.
    RescaleCheck(RescaleArgs),
}

#[derive(Debug, Clone, Args)]
pub struct ParamArgs {
    /// Polyharmonic order.
    #[arg(long)]
    pub m: usize,
    /// Spatial dimension.
    #[arg(long = "N", value_name = "N")]
    pub n: usize,
    /// Exponent of the nonlinearity.
    #[arg(long, default_value_t = 2.0)]
    pub q: f64,
}

impl ParamArgs {
    fn params(&self) -> Result<KernelParams> {
        KernelParams::new(self.n, self.m, self.q)
    }
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Output file; defaults to a file in the output directory, else standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Default output directory.
    #[arg(long, env = OUT_DIR_ENV)]
    pub out_dir: Option<PathBuf>,
}

impl OutputArgs {
    fn target(&self, default_name: &str) -> Option<PathBuf> {
        self.out
            .clone()
            .or_else(|| self.out_dir.as_ref().map(|d| d.join(default_name)))
    }

    fn emit(&self, default_name: &str, contents: &[u8]) -> Result<()> {
        match self.target(default_name) {
            Some(path) => write_file(&path, contents),
            None => {
                std::io::stdout().write_all(contents)?;
                Ok(())
            }
        }
    }
}

fn write_file(path: &Path, contents: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(path, contents)?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Domain {
    Ball,
    ShiftedBall,
    HalfSpace,
}

#[derive(Debug, Clone, Args)]
pub struct KernelEvalArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long, value_enum, default_value_t = Domain::Ball)]
    pub domain: Domain,
    /// Radius of the (shifted) ball.
    #[arg(long = "R", value_name = "R", default_value_t = 1.0)]
    pub radius: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub x: Coords,
    #[arg(long, allow_hyphen_values = true)]
    pub y: Coords,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SuiteChoice {
    Kernels,
    Conformal,
    Representation,
    Halfspace,
    Reflection,
    Caps,
    Picard,
    Ode,
    Rescale,
    Averages,
    All,
}

impl SuiteChoice {
    fn suites(self) -> Vec<SuiteName> {
        let one = match self {
            SuiteChoice::All => return SuiteName::ALL.to_vec(),
            SuiteChoice::Kernels => SuiteName::Kernels,
            SuiteChoice::Conformal => SuiteName::Conformal,
            SuiteChoice::Representation => SuiteName::Representation,
            SuiteChoice::Halfspace => SuiteName::Halfspace,
            SuiteChoice::Reflection => SuiteName::Reflection,
            SuiteChoice::Caps => SuiteName::Caps,
            SuiteChoice::Picard => SuiteName::Picard,
            SuiteChoice::Ode => SuiteName::Ode,
            SuiteChoice::Rescale => SuiteName::Rescale,
            SuiteChoice::Averages => SuiteName::Averages,
        };
        vec![one]
    }
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long, value_enum)]
    pub suite: SuiteChoice,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Overrides each suite's default sample count.
    #[arg(long)]
    pub samples: Option<usize>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SolveBallArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    /// Constant initial iterate.
    #[arg(long, default_value_t = 1e-2)]
    pub delta: f64,
    /// Contraction tolerance.
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    #[arg(long, default_value_t = 200)]
    pub max_iters: usize,
    #[arg(long, default_value_t = 1.0)]
    pub damping: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum HalfspaceSource {
    /// `e^{-|y - 1.5 e_1|^2}` with no boundary data.
    Gaussian,
    /// The Gaussian dipole about `{y_1 = 0}` (N = 3, m = 1), with its exact solution.
    Dipole,
}

#[derive(Debug, Clone, Args)]
pub struct HalfspaceArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long, value_enum)]
    pub source: HalfspaceSource,
    #[arg(long, allow_hyphen_values = true)]
    pub x: Coords,
    /// Width of the boundary layer in the tail bound.
    #[arg(long, default_value_t = 1.0)]
    pub delta: f64,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct OdeRunArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    /// Free initial derivatives `u^(m)(0), ..., u^(2m-1)(0)`.
    #[arg(long, allow_hyphen_values = true)]
    pub free: Coords,
    #[arg(long, default_value_t = 10.0)]
    pub t_end: f64,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct OdeScanArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    /// Values for each free derivative; the grid is their m-fold product.
    #[arg(long, default_value = "-0.5,0,0.5", allow_hyphen_values = true)]
    pub values: Coords,
    #[arg(long, default_value_t = 10.0)]
    pub t_end: f64,
    #[arg(long, default_value_t = 1e6)]
    pub cap: f64,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct RescaleArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

/// Failure of a command, mapped onto an exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Runtime(Error),
    #[error("{0} check(s) failed")]
    Violations(usize),
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Runtime(e.into())
    }
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Runtime(_) | CliError::Violations(_) => 1,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter(_)
            | Error::DimensionMismatch { .. }
            | Error::OutsideDomain { .. }
            | Error::CoincidentPoints
            | Error::PoleSingularity
            | Error::InfiniteProfile { .. }
            | Error::DegenerateCap(_)
            | Error::ScheduleTooSmall(_) => CliError::Usage(e.to_string()),
            other => CliError::Runtime(other),
        }
    }
}

fn point(coords: &Coords, n: usize, flag: &str) -> std::result::Result<Vec<f64>, CliError> {
    if coords.0.len() != n {
        return Err(CliError::Usage(format!(
            "--{flag} has {} coordinates but --N is {n}",
            coords.0.len()
        )));
    }
    Ok(coords.0.clone())
}

fn geometry(domain: Domain, radius: f64) -> Result<BallGeometry> {
    match domain {
        Domain::Ball => BallGeometry::ball(radius),
        Domain::ShiftedBall => BallGeometry::shifted_ball(radius),
        Domain::HalfSpace => Ok(BallGeometry::half_space()),
    }
}

pub fn execute(cli: &Cli) -> std::result::Result<(), CliError> {
    match &cli.command {
        Command::KernelEval(a) => {
            let p = a.params.params()?;
            let x = point(&a.x, p.dim(), "x")?;
            let y = point(&a.y, p.dim(), "y")?;
            let g = green(&p, &geometry(a.domain, a.radius)?, &x, &y)?;
            println!("{g}");
            Ok(())
        }
        Command::Verify(a) => {
            let params = a.params.params()?;
            let cfg = SuiteConfig {
                params,
                seed: a.seed,
                samples: a.samples,
            };
            let suites = a.suite.suites();
            let mut failed = 0;
            for name in &suites {
                let report = run_suite(*name, &cfg)?;
                failed += report.summary.failed;
                eprintln!(
                    "{}: {}/{} passed",
                    report.suite, report.summary.passed, report.summary.total
                );
                let file = format!("report-{name}.json");
                let body = report.to_json()? + "\n";
                match (&a.output.out, suites.len()) {
                    (Some(dir), n) if n > 1 => write_file(&dir.join(&file), body.as_bytes())?,
                    _ => a.output.emit(&file, body.as_bytes())?,
                }
            }
            if failed > 0 {
                Err(CliError::Violations(failed))
            } else {
                Ok(())
            }
        }
        Command::SolveBall(a) => {
            let p = a.params.params()?;
            let pc = PicardConfig {
                max_iters: a.max_iters,
                contraction_tol: a.tol,
                damping: a.damping,
                ..PicardConfig::default()
            };
            pc.validate()?;
            let lattice = Arc::new(default_lattice(p.dim())?);
            let op = GreenOperator::new(Arc::clone(&lattice), p)?;
            let v0 = GridFunction::constant(lattice, p, a.delta)?;
            let outcome = picard_solve_with(&op, &v0, &pc)?;
            let mut buf = Vec::new();
            write_history_csv(&outcome.history, &mut buf)?;
            a.output.emit("picard_history.csv", &buf)?;
            eprintln!(
                "{:?} after {} iterations, sup norm {:e}",
                outcome.verdict,
                outcome.history.len(),
                outcome.iterate.sup_norm()
            );
            Ok(())
        }
        Command::HalfspaceRepr(a) => {
            let p = a.params.params()?;
            let x = point(&a.x, p.dim(), "x")?;
            let spec = QuadratureSpec::with_tolerance(a.tol);
            let schedule = default_schedule(x[0]);
            let (rep, exact) = match a.source {
                HalfspaceSource::Gaussian => {
                    let source = |y: &[f64]| {
                        let d: f64 = y
                            .iter()
                            .enumerate()
                            .map(|(i, c)| if i == 0 { (c - 1.5).powi(2) } else { c * c })
                            .sum();
                        (-d).exp()
                    };
                    (halfspace_representation(&p, source, None, &x, &schedule, a.delta, &spec)?, None)
                }
                HalfspaceSource::Dipole => {
                    if p.dim() != 3 || p.order() != 1 {
                        return Err(CliError::Usage("the dipole source needs --N 3 --m 1".into()));
                    }
                    let ms = gaussian_dipole(1.5)?;
                    let rep = halfspace_representation(
                        &p,
                        |y: &[f64]| ms.source(y),
                        Some(&ms),
                        &x,
                        &schedule,
                        a.delta,
                        &spec,
                    )?;
                    (rep, Some(ms.value(&x)))
                }
            };
            let body = serde_json::to_string_pretty(&json!({
                "schema_version": 1,
                "x": x,
                "exact": exact,
                "representation": rep,
            }))? + "\n";
            a.output.emit("halfspace.json", body.as_bytes())?;
            Ok(())
        }
        Command::OdeRun(a) => {
            let p = a.params.params()?;
            let m = p.order();
            let free = point(&a.free, m, "free")?;
            let nl = Nonlinearity1D::power(p.exponent())?;
            let traj = integrate(&ODEState::dirichlet(&free, &nl, m)?, &nl, m, a.t_end, a.tol)?;
            let mut buf = Vec::new();
            traj.write_csv(&mut buf)?;
            a.output.emit("trajectory.csv", &buf)?;
            eprintln!("max |H - H(0)| = {:e}", traj.max_drift());
            Ok(())
        }
        Command::OdeScan(a) => {
            let p = a.params.params()?;
            let nl = Nonlinearity1D::power(p.exponent())?;
            let grid = tensor_grid(&a.values.0, p.order());
            let report = bounded_solution_scan(&nl, p.order(), &grid, a.t_end, a.cap, a.tol)?;
            let body = serde_json::to_string_pretty(&report)? + "\n";
            a.output.emit("ode_scan.json", body.as_bytes())?;
            Ok(())
        }
        Command::RescaleCheck(a) => {
            let report: Report = run_suite(SuiteName::Rescale, &SuiteConfig::new(a.params.params()?, a.seed))?;
            a.output.emit("report-rescale.json", (report.to_json()? + "\n").as_bytes())?;
            if report.all_passed() {
                Ok(())
            } else {
                Err(CliError::Violations(report.summary.failed))
            }
        }
    }
}

/// Parses `argv` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(argv: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code() as u8;
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn main() -> ExitCode {
    ExitCode::from(run(std::env::args_os()))
}
