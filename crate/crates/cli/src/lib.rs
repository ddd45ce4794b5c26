//! Command-line front end: single runs, the cross-scheme comparison and the
//! temporal self-convergence study.

pub mod output;

use std::ffi::OsString;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use nlheat::{
    compare_schemes_parallel, convergence_study, run_simulation, validate_config, Coupling,
    ErrorKind, LinearSolverKind, SimulationConfig,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_NON_CONVERGENCE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "nlheat",
    version,
    about = "1D nonlinear heat conduction under four coupling strategies"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one simulation and write its profiles
    Run(RunArgs),
    /// Run every scheme at every timestep and compare against full coupling
    Compare(CompareArgs),
    /// Estimate the observed temporal order on a geometric dt ladder
    Convergence(ConvergenceArgs),
}

#[derive(Debug, Clone, Args)]
pub struct ProblemArgs {
    /// Total node count including both boundary nodes
    #[arg(long, default_value_t = 200)]
    pub nodes: usize,
    /// Temperature at x = 0
    #[arg(long, default_value_t = 0.1)]
    pub tl: f64,
    /// Temperature at x = 1 (also the initial temperature)
    #[arg(long, default_value_t = 2.0)]
    pub tr: f64,
    /// Diffusivity prefactor
    #[arg(long, default_value_t = 1.0)]
    pub gamma: f64,
    /// Diffusivity exponent
    #[arg(long, default_value_t = 3.0)]
    pub a: f64,
    /// Target time
    #[arg(long = "t-end", default_value_t = 0.5)]
    pub t_end: f64,
    /// Comma-separated snapshot times (t = 0 and t_end are always recorded)
    #[arg(long, value_delimiter = ',')]
    pub snapshots: Vec<f64>,
    #[arg(long = "newton-tol", default_value_t = 1e-6)]
    pub newton_tol: f64,
    #[arg(long = "newton-max-iters", default_value_t = 50)]
    pub newton_max_iters: usize,
    #[arg(long = "fixed-point-tol", default_value_t = 1e-6)]
    pub fixed_point_tol: f64,
    #[arg(long = "fixed-point-max-iters", default_value_t = 100)]
    pub fixed_point_max_iters: usize,
    /// Linear solver: thomas or bicgstab
    #[arg(long, default_value = "thomas", value_parser = parse_solver)]
    pub solver: LinearSolverKind,
    /// Relative residual tolerance for BiCGSTAB
    #[arg(long = "solver-tol", default_value_t = 1e-7)]
    pub solver_tol: f64,
    /// Output directory
    #[arg(long = "out-dir", default_value = "out")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// one-way, explicit, implicit or full
    #[arg(long, default_value = "full", value_parser = parse_scheme)]
    pub scheme: Coupling,
    #[arg(long, default_value_t = 0.001)]
    pub dt: f64,
    #[command(flatten)]
    pub problem: ProblemArgs,
}

#[derive(Debug, Clone, Args)]
pub struct CompareArgs {
    #[arg(
        long = "dt-list",
        value_delimiter = ',',
        default_value = "0.001,0.005,0.01"
    )]
    pub dt_list: Vec<f64>,
    #[arg(
        long = "scheme-list",
        value_delimiter = ',',
        default_value = "one-way,explicit,implicit,full",
        value_parser = parse_scheme
    )]
    pub scheme_list: Vec<Coupling>,
    #[command(flatten)]
    pub problem: ProblemArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ConvergenceArgs {
    #[arg(long, default_value = "full", value_parser = parse_scheme)]
    pub scheme: Coupling,
    /// Geometric ladder of timesteps, at least three values
    #[arg(
        long = "dt-ladder",
        value_delimiter = ',',
        default_value = "0.01,0.005,0.0025,0.00125"
    )]
    pub dt_ladder: Vec<f64>,
    #[command(flatten)]
    pub problem: ProblemArgs,
}

fn parse_scheme(s: &str) -> Result<Coupling, String> {
    s.parse().map_err(|e: nlheat::Error| e.to_string())
}

fn parse_solver(s: &str) -> Result<LinearSolverKind, String> {
    match s.to_ascii_lowercase().as_str() {
        "thomas" => Ok(LinearSolverKind::Thomas),
        "bicgstab" => Ok(LinearSolverKind::BiCgStab),
        other => Err(format!("unknown solver '{other}' (thomas or bicgstab)")),
    }
}

impl ProblemArgs {
    pub fn config(&self, scheme: Coupling, dt: f64) -> SimulationConfig {
        SimulationConfig {
            nodes: self.nodes,
            t_left: self.tl,
            t_right: self.tr,
            gamma: self.gamma,
            exponent_a: self.a,
            dt,
            t_end: self.t_end,
            scheme,
            newton_tol: self.newton_tol,
            newton_max_iters: self.newton_max_iters,
            linear_solver: self.solver,
            bicgstab_tol: self.solver_tol,
            fixed_point_tol: self.fixed_point_tol,
            fixed_point_max_iters: self.fixed_point_max_iters,
            snapshot_times: self.snapshots.clone(),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Solver(#[from] nlheat::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Solver(e) if e.kind() == ErrorKind::Solver => EXIT_NON_CONVERGENCE,
            _ => EXIT_VALIDATION,
        }
    }
}

fn write(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn prepare_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|source| CliError::Io {
        path: dir.to_path_buf(),
        source,
    })
}

pub fn cmd_run(args: &RunArgs) -> Result<(), CliError> {
    let config = validate_config(args.problem.config(args.scheme, args.dt))?;
    let report = run_simulation(&config)?;
    let dir = &args.problem.out_dir;
    prepare_dir(dir)?;
    let paths = output::write_profiles(dir, &report).map_err(|source| CliError::Io {
        path: dir.clone(),
        source,
    })?;
    write(
        &dir.join("summary.txt"),
        &output::format_run_summary(&report),
    )?;
    println!(
        "{}: {} steps, {} Newton / {} fixed-point / {} linear iterations, {:.3} s",
        config.scheme,
        report.totals.steps,
        report.totals.newton_iterations,
        report.totals.fixed_point_iterations,
        report.totals.linear_iterations,
        report.wall_time_secs
    );
    for p in paths {
        println!("wrote {}", p.display());
    }
    Ok(())
}

pub fn cmd_compare(args: &CompareArgs) -> Result<(), CliError> {
    let base = args.problem.config(
        Coupling::FullCoupling,
        args.dt_list.first().copied().unwrap_or(f64::NAN),
    );
    let report = compare_schemes_parallel(&base, &args.dt_list, &args.scheme_list)?;
    let dir = &args.problem.out_dir;
    prepare_dir(dir)?;
    for run in &report.runs {
        output::write_profiles(dir, &run.report).map_err(|source| CliError::Io {
            path: dir.clone(),
            source,
        })?;
    }
    write(
        &dir.join("comparison.csv"),
        &output::format_comparison_table(&report),
    )?;
    write(
        &dir.join("summary.txt"),
        &output::format_comparison_summary(&report),
    )?;
    print!("{}", output::format_comparison_table(&report));
    for c in &report.checks {
        println!("{} {}", c.status, c.name);
    }
    Ok(())
}

pub fn cmd_convergence(args: &ConvergenceArgs) -> Result<(), CliError> {
    let base = args.problem.config(
        args.scheme,
        args.dt_ladder.first().copied().unwrap_or(f64::NAN),
    );
    let study = convergence_study(&base, &args.dt_ladder)?;
    let dir = &args.problem.out_dir;
    prepare_dir(dir)?;
    let text = output::format_convergence(&study);
    write(
        &dir.join(format!("convergence_{}.csv", args.scheme.slug())),
        &text,
    )?;
    print!("{text}");
    Ok(())
}

/// Parse `args` (program name first) and execute; returns the process exit code.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                EXIT_VALIDATION
            } else {
                EXIT_OK
            };
        }
    };
    let result = match &cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Compare(a) => cmd_compare(a),
        Command::Convergence(a) => cmd_convergence(a),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
