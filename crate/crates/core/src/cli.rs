//! The `spacelike` command line.
//!
//! Exit codes: `0` success, `1` a verification check failed, `2` invalid input,
//! `3` the solver did not converge. Messages go to standard error; machine output
//! goes to `--out` (standard output when omitted).

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::discretization::{build_grid, io, read_field, DiscretizationError, Domain, RadialBoundary, StarDomain2D};
use crate::geometry::{curvature_bundle_with, GeometryError};
use crate::hyperboloid::{HyperboloidCap, HyperboloidError};
use crate::solver::{
    self, rigidity_scan, solution_bundle, solve_dirichlet, solve_radial, ResidualForm, SolverConfig, SolverError,
};
use crate::verifier::{
    self, all_pass, convergence_study, reports_to_csv, reports_to_json, CaseDescriptor, FieldCase, Tolerances,
    VerificationReport, VerifierError, VerifyContext,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFICATION: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NON_CONVERGENCE: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    NonConvergence(String),
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::NonConvergence(_) => EXIT_NON_CONVERGENCE,
            _ => EXIT_INPUT,
        }
    }
}

macro_rules! input_error {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Input(e.to_string())
            }
        }
    )*};
}
input_error!(DiscretizationError, GeometryError, HyperboloidError, VerifierError);

impl From<SolverError> for CliError {
    fn from(e: SolverError) -> Self {
        match e {
            SolverError::NonConvergence { .. } => CliError::NonConvergence(e.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "spacelike",
    version,
    about = "Spacelike graphs of constant H_k in Minkowski space"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sample a hyperboloid cap on its disk and write u, θ, P and H_k.
    Hyperboloid(HyperboloidArgs),
    /// Curvature bundle (metric, normal, shape operator, σ_k, θ, P) of a field file.
    Curvature(CurvatureArgs),
    /// Run every residual check on a sampled cap or a field file.
    Verify(VerifyArgs),
    /// Solve σ_k(A[u]) = C(2,k)·H_k in Ω with u = c on ∂Ω.
    Solve(SolveArgs),
    /// Radially symmetric solution over a ball in R^n.
    RadialSolve(RadialArgs),
    /// Boundary-angle spread of solutions over a family of domains.
    RigidityScan(ScanArgs),
    /// Observed orders of the discrete checks under grid doubling.
    Convergence(ConvergenceArgs),
}

#[derive(Debug, Clone, Args)]
struct GridArgs {
    /// Radial cells across the mapped radius s ∈ (0, 1)
    #[arg(long, default_value_t = 64)]
    nr: usize,
    /// Angular nodes per ring
    #[arg(long, default_value_t = 128)]
    nphi: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DomainKind {
    Disk,
    Ellipse,
    Perturbed,
}

#[derive(Debug, Clone, Args)]
struct DomainArgs {
    /// Domain shape
    #[arg(long, value_enum, default_value_t = DomainKind::Disk)]
    domain: DomainKind,
    /// Disk radius, or base radius R of the perturbed disk [length]
    #[arg(long, default_value_t = 1.0)]
    radius: f64,
    /// Ellipse semi-axis along x₁ [length]
    #[arg(long = "semi-a", default_value_t = 1.0)]
    semi_a: f64,
    /// Ellipse semi-axis along x₂ [length]
    #[arg(long = "semi-b", default_value_t = 0.8)]
    semi_b: f64,
    /// Relative amplitude ε in ρ = R(1 + ε cos(mφ)) [dimensionless]
    #[arg(long, default_value_t = 0.1)]
    amplitude: f64,
    /// Angular mode m of the perturbed disk
    #[arg(long, default_value_t = 3)]
    mode: usize,
    /// Fourier modes used to fit an ellipse boundary
    #[arg(long, default_value_t = 32)]
    modes: usize,
    /// Domain centre x₁ x₂ [length]
    #[arg(long, num_args = 2, value_names = ["X1", "X2"], default_values_t = [0.0, 0.0], allow_negative_numbers = true)]
    center: Vec<f64>,
}

impl DomainArgs {
    fn build(&self) -> Result<StarDomain2D, CliError> {
        let c = [self.center[0], self.center[1]];
        let d = match self.domain {
            DomainKind::Disk => StarDomain2D::disk(c, self.radius)?,
            DomainKind::Ellipse => StarDomain2D::ellipse(c, self.semi_a, self.semi_b, self.modes)?,
            DomainKind::Perturbed => StarDomain2D::perturbed_disk(c, self.radius, self.amplitude, self.mode)?,
        };
        Ok(d)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
struct HyperboloidArgs {
    /// Boundary angle θ₀ = ⟨N, E₃⟩ on ∂Ω, at most −1 [dimensionless]
    #[arg(
        long,
        allow_negative_numbers = true,
        required_unless_present = "radius",
        conflicts_with = "radius"
    )]
    theta0: Option<f64>,
    /// Cap radius R; sets θ₀ = −√(1 + R²) [length]
    #[arg(long)]
    radius: Option<f64>,
    /// Boundary height c [length]
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    c: f64,
    /// Index k of the H_k field
    #[arg(long, default_value_t = 1)]
    k: usize,
    #[command(flatten)]
    grid: GridArgs,
    /// Output field file [default: standard output]
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CurvatureArgs {
    /// Input field file
    #[arg(long)]
    input: PathBuf,
    /// Index k of the Newton tensor and H_k
    #[arg(long, default_value_t = 1)]
    k: usize,
    /// Impose u = C at s = 1 in the radial stencils [length; default: extrapolate]
    #[arg(long, value_name = "C", allow_negative_numbers = true)]
    dirichlet: Option<f64>,
    /// Output bundle file [default: standard output]
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum VerifyCase {
    Hyperboloid,
    Field,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// What to verify
    #[arg(long, value_enum, default_value_t = VerifyCase::Hyperboloid)]
    case: VerifyCase,
    /// Cap boundary angle θ₀ ≤ −1 [dimensionless]
    #[arg(long, default_value_t = -std::f64::consts::SQRT_2, allow_negative_numbers = true)]
    theta0: f64,
    /// Cap boundary height c [length]
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    c: f64,
    /// Index k
    #[arg(long, default_value_t = 1)]
    k: usize,
    #[command(flatten)]
    grid: GridArgs,
    /// Field file, for --case field
    #[arg(long)]
    input: Option<PathBuf>,
    /// For --case field: impose u = C at s = 1 and use C as the boundary height
    /// [length; default: extrapolate, boundary mean]
    #[arg(long, value_name = "C", allow_negative_numbers = true)]
    dirichlet: Option<f64>,
    /// Coefficient C of the discrete tolerance C·h², h = 1/nr
    #[arg(long, default_value_t = 10.0)]
    discrete_tolerance: f64,
    /// Report format
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Report file [default: standard output]
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormArg {
    Assembled,
    Generic,
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[command(flatten)]
    domain: DomainArgs,
    /// Index k ∈ {1, 2}
    #[arg(long, default_value_t = 1)]
    k: usize,
    /// Target H_k > 0 [length^−k]
    #[arg(long, default_value_t = 1.0)]
    hk: f64,
    /// Boundary height c [length]
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    c: f64,
    #[command(flatten)]
    grid: GridArgs,
    /// Newton stops when the max-norm residual is at most this [length^−k]
    #[arg(long, default_value_t = 1e-10)]
    tolerance: f64,
    /// Newton iteration limit
    #[arg(long, default_value_t = 50)]
    max_iterations: usize,
    /// Residual assembly
    #[arg(long, value_enum, default_value_t = FormArg::Assembled)]
    residual_form: FormArg,
    /// Solution field file [default: standard output]
    #[arg(long)]
    out: Option<PathBuf>,
    /// Solve summary (JSON: residual history, angle statistics) [default: not written]
    #[arg(long)]
    summary: Option<PathBuf>,
    /// Verification report of the solution (JSON) [default: not written]
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct RadialArgs {
    /// Dimension n of the ball
    #[arg(long, default_value_t = 2)]
    n: usize,
    /// Index 1 ≤ k ≤ n
    #[arg(long, default_value_t = 1)]
    k: usize,
    /// Target H_k > 0 [length^−k]
    #[arg(long, default_value_t = 1.0)]
    hk: f64,
    /// Ball radius R [length]
    #[arg(long, default_value_t = 1.0)]
    radius: f64,
    /// Boundary height c [length]
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    c: f64,
    /// Profile file (JSON) [default: standard output]
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Family {
    /// Ellipses with semi-axes 1 and 1/aspect; values are aspects
    Ellipse,
    /// Disks; values are radii
    Disk,
    /// ρ = 1 + ε cos(mφ); values are amplitudes ε
    Perturbed,
}

#[derive(Debug, Args)]
struct ScanArgs {
    /// Domain family
    #[arg(long, value_enum, default_value_t = Family::Ellipse)]
    family: Family,
    /// Family parameters, comma separated [dimensionless, or length for disks]
    #[arg(long, value_delimiter = ',', default_values_t = [1.0, 1.1, 1.2, 1.3, 1.4, 1.5])]
    values: Vec<f64>,
    /// Angular mode m of the perturbed family
    #[arg(long, default_value_t = 3)]
    mode: usize,
    /// Fourier modes used to fit ellipse boundaries
    #[arg(long, default_value_t = 32)]
    modes: usize,
    /// Index k ∈ {1, 2}
    #[arg(long, default_value_t = 1)]
    k: usize,
    /// Target H_k > 0 [length^−k]
    #[arg(long, default_value_t = 1.0)]
    hk: f64,
    /// Boundary height c [length]
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    c: f64,
    #[command(flatten)]
    grid: GridArgs,
    /// Table file (CSV) [default: standard output]
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StudyCase {
    /// Hyperboloid cap on its own disk
    Cap,
    /// u = a·sin x₁·sin x₂ on the unit disk
    Sines,
}

#[derive(Debug, Args)]
struct ConvergenceArgs {
    /// Field to refine
    #[arg(long, value_enum, default_value_t = StudyCase::Cap)]
    case: StudyCase,
    /// Cap boundary angle θ₀ ≤ −1 [dimensionless]
    #[arg(long, default_value_t = -std::f64::consts::SQRT_2, allow_negative_numbers = true)]
    theta0: f64,
    /// Cap boundary height c [length]
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    c: f64,
    /// Amplitude a of the sines case [length]
    #[arg(long, default_value_t = 0.2)]
    amplitude: f64,
    /// Index k
    #[arg(long, default_value_t = 1)]
    k: usize,
    /// Grid sequence NRxNPHI, comma separated, doubling in both counts
    #[arg(long, value_delimiter = ',', value_parser = parse_size, default_value = "16x32,32x64,64x128")]
    sizes: Vec<(usize, usize)>,
    /// Table file (CSV) [default: standard output]
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_size(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s
        .split_once('x')
        .ok_or_else(|| format!("expected NRxNPHI, got {s:?}"))?;
    let parse = |v: &str| v.trim().parse::<usize>().map_err(|e| format!("{s:?}: {e}"));
    Ok((parse(a)?, parse(b)?))
}

/// Parses `argv` (program name first), runs the subcommand and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(command: Command) -> Result<i32, CliError> {
    match command {
        Command::Hyperboloid(a) => hyperboloid(a),
        Command::Curvature(a) => curvature(a),
        Command::Verify(a) => verify(a),
        Command::Solve(a) => solve(a),
        Command::RadialSolve(a) => radial(a),
        Command::RigidityScan(a) => scan(a),
        Command::Convergence(a) => convergence(a),
    }
}

fn write_output(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, text).map_err(|source| CliError::Write {
            path: p.to_path_buf(),
            source,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Writes reports as JSON (keys sorted) or CSV to `path`, or to standard output.
pub fn emit_report(reports: &[VerificationReport], format: Format, path: Option<&Path>) -> Result<(), CliError> {
    let text = match format {
        Format::Json => reports_to_json(reports),
        Format::Csv => reports_to_csv(reports),
    };
    write_output(path, &text)
}

fn hyperboloid(a: HyperboloidArgs) -> Result<i32, CliError> {
    let cap = match (a.theta0, a.radius) {
        (Some(t), _) => HyperboloidCap::from_angle(2, a.c, t, &[0.0, 0.0])?,
        (None, Some(r)) => HyperboloidCap::from_radius(2, a.c, r, &[0.0, 0.0])?,
        (None, None) => return Err(CliError::Input("one of --theta0 or --radius is required".into())),
    };
    let grid = Arc::new(build_grid(&Domain::Star(cap.disk_domain()?), a.grid.nr, a.grid.nphi)?);
    let field = cap.sample_to_grid(&grid)?;
    let bundle = curvature_bundle_with(&field, a.k, RadialBoundary::Extrapolate)?;
    let text = io::fields_to_string(
        &grid,
        &[
            ("u", field.values().to_vec()),
            ("theta", bundle.theta().into_values()),
            ("p", bundle.p_function().into_values()),
            ("hk", bundle.hk_field().into_values()),
        ],
    );
    write_output(a.out.as_deref(), &text)?;
    eprintln!(
        "cap: c = {}, theta0 = {}, radius = {}, P = {}",
        cap.c(),
        cap.theta0(),
        cap.radius(),
        cap.p_value()
    );
    Ok(EXIT_OK)
}

fn curvature(a: CurvatureArgs) -> Result<i32, CliError> {
    let field = read_field(&a.input)?;
    let trace = a.dirichlet.map(|c| vec![c; field.grid().nphi()]);
    let boundary = match &trace {
        Some(t) => RadialBoundary::Dirichlet(t),
        None => RadialBoundary::Extrapolate,
    };
    let bundle = curvature_bundle_with(&field, a.k, boundary)?;
    write_output(a.out.as_deref(), &bundle.to_json())?;
    Ok(EXIT_OK)
}

fn verify(a: VerifyArgs) -> Result<i32, CliError> {
    let tolerances = Tolerances {
        discrete: a.discrete_tolerance,
        ..Tolerances::default()
    };
    let (bundle, ctx) = match a.case {
        VerifyCase::Hyperboloid => {
            let cap = HyperboloidCap::from_angle(2, a.c, a.theta0, &[0.0, 0.0])?;
            let grid = Arc::new(build_grid(&Domain::Star(cap.disk_domain()?), a.grid.nr, a.grid.nphi)?);
            let bundle = curvature_bundle_with(&cap.sample_to_grid(&grid)?, a.k, RadialBoundary::Extrapolate)?;
            let ctx = VerifyContext {
                c: a.c,
                theta0: a.theta0,
                cap: Some(cap),
                tolerances,
            };
            (bundle, ctx)
        }
        VerifyCase::Field => {
            let path = a
                .input
                .as_ref()
                .ok_or_else(|| CliError::Input("--case field needs --input".into()))?;
            let field = read_field(path)?;
            let bundle = match a.dirichlet {
                Some(c) => {
                    let trace = vec![c; field.grid().nphi()];
                    curvature_bundle_with(&field, a.k, RadialBoundary::Dirichlet(&trace))?
                }
                None => curvature_bundle_with(&field, a.k, RadialBoundary::Extrapolate)?,
            };
            let mut ctx = VerifyContext::from_boundary(&bundle, tolerances);
            if let Some(c) = a.dirichlet {
                ctx.c = c;
            }
            (bundle, ctx)
        }
    };
    let reports = verifier::verify_bundle(&bundle, &ctx);
    emit_report(&reports, a.format, a.out.as_deref())?;
    for r in reports.iter().filter(|r| !r.pass) {
        eprintln!("FAIL {}: {:e} > {:e}", r.check, r.residual_max, r.tolerance);
    }
    Ok(if all_pass(&reports) { EXIT_OK } else { EXIT_VERIFICATION })
}

fn solve(a: SolveArgs) -> Result<i32, CliError> {
    let mut config =
        SolverConfig::new(Domain::Star(a.domain.build()?), a.k, a.hk, a.c).with_grid(a.grid.nr, a.grid.nphi);
    config.tolerance = a.tolerance;
    config.max_iterations = a.max_iterations;
    config.residual_form = match a.residual_form {
        FormArg::Assembled => ResidualForm::Assembled,
        FormArg::Generic => ResidualForm::Generic,
    };
    let result = match solve_dirichlet(&config) {
        Ok(r) => r,
        Err(SolverError::NonConvergence {
            iterations,
            history,
            reason,
        }) => {
            if let Some(path) = &a.summary {
                let doc = json!({"converged": false, "iterations": iterations, "history": history, "reason": reason});
                write_output(
                    Some(path),
                    &(serde_json::to_string_pretty(&doc).expect("plain JSON") + "\n"),
                )?;
            }
            return Err(CliError::NonConvergence(format!(
                "no convergence after {iterations} iterations: {reason}"
            )));
        }
        Err(e) => return Err(e.into()),
    };
    write_output(a.out.as_deref(), &io::field_to_string(&result.solution))?;
    if let Some(path) = &a.summary {
        let doc = json!({
            "converged": true,
            "iterations": result.iterations,
            "history": result.history,
            "residual": result.residual,
            "center_value": result.solution.center_value(),
            "u_min": result.solution.min(),
            "cone_margin": result.cone_margin,
            "initial_guess": result.initial_guess,
            "angle": result.angle,
            "grid": {"nr": config.nr, "nphi": config.nphi},
        });
        write_output(
            Some(path),
            &(serde_json::to_string_pretty(&doc).expect("plain JSON") + "\n"),
        )?;
    }
    eprintln!(
        "converged in {} iterations, residual {:e}, u(centre) = {}, theta mean {} spread {:e}",
        result.iterations,
        result.residual,
        result.solution.center_value(),
        result.angle.mean,
        result.angle.spread
    );
    if let Some(path) = &a.report {
        let bundle = solution_bundle(&result)?;
        let mut ctx = VerifyContext::from_boundary(&bundle, Tolerances::default());
        ctx.c = result.c;
        let reports = verifier::verify_bundle(&bundle, &ctx);
        emit_report(&reports, Format::Json, Some(path))?;
        if !all_pass(&reports) {
            return Ok(EXIT_VERIFICATION);
        }
    }
    Ok(EXIT_OK)
}

fn radial(a: RadialArgs) -> Result<i32, CliError> {
    let profile = solve_radial(a.n, a.k, a.hk, a.radius, a.c)?;
    let text = serde_json::to_string_pretty(&profile).expect("plain JSON") + "\n";
    write_output(a.out.as_deref(), &text)?;
    eprintln!("u(0) = {}, residual = {:e}", profile.center_value(), profile.residual);
    Ok(EXIT_OK)
}

fn scan(a: ScanArgs) -> Result<i32, CliError> {
    let domains: Vec<StarDomain2D> = match a.family {
        Family::Ellipse => solver::ellipse_family(&a.values, a.modes)?,
        Family::Disk => a
            .values
            .iter()
            .map(|r| StarDomain2D::disk([0.0, 0.0], *r))
            .collect::<Result<_, _>>()?,
        Family::Perturbed => a
            .values
            .iter()
            .map(|e| StarDomain2D::perturbed_disk([0.0, 0.0], 1.0, *e, a.mode))
            .collect::<Result<_, _>>()?,
    };
    let base = SolverConfig::new(Domain::Star(domains[0].clone()), a.k, a.hk, a.c).with_grid(a.grid.nr, a.grid.nphi);
    base.validate()?;
    let table = rigidity_scan(&domains, &base);
    write_output(a.out.as_deref(), &table.to_csv())?;
    for r in table.rows.iter().filter(|r| !r.converged) {
        eprintln!("asymmetry {}: {}", r.asymmetry, r.message);
    }
    eprintln!("{}", table.trend());
    Ok(EXIT_OK)
}

fn convergence(a: ConvergenceArgs) -> Result<i32, CliError> {
    let case = match a.case {
        StudyCase::Cap => CaseDescriptor::cap(a.c, a.theta0, a.k)?,
        StudyCase::Sines => CaseDescriptor {
            domain: StarDomain2D::disk([0.0, 0.0], 1.0)?,
            field: FieldCase::Sines { amplitude: a.amplitude },
            k: a.k,
            tolerances: Tolerances::default(),
        },
    };
    let table = convergence_study(&case, &a.sizes)?;
    write_output(a.out.as_deref(), &table.to_csv())?;
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn command_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn every_flag_is_documented() {
        let cmd = Cli::command();
        for sub in cmd.get_subcommands() {
            for arg in sub.get_arguments() {
                assert!(arg.get_help().is_some(), "{} --{}", sub.get_name(), arg.get_id());
            }
        }
    }

    #[test]
    fn grid_sizes_parse() {
        assert_eq!(parse_size("16x32"), Ok((16, 32)));
        assert!(parse_size("16").is_err());
    }

    #[test]
    fn bad_flags_exit_with_input_code() {
        assert_eq!(run(["spacelike", "solve", "--k", "x"]), EXIT_INPUT);
        assert_eq!(run(["spacelike", "hyperboloid"]), EXIT_INPUT);
    }
}
