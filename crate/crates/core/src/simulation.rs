//! Problem definition, validation and the time loop.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::diffusivity::{self, DiffusivityLaw};
use crate::error::{Error, Result};
use crate::grid::{Grid1D, TemperatureField};
use crate::linalg::{LinearSolverKind, Norms};
use crate::schemes::{self, FrozenDiffusivity, SolverSettings, StepParams};

/// Relative tolerance on `t_end / dt` being an integer.
pub const STEP_COUNT_TOLERANCE: f64 = 1e-9;
/// Snapshot times must sit within this many `dt` of a step boundary.
pub const SNAPSHOT_ALIGNMENT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Coupling {
    OneWay,
    ExplicitSequential,
    ImplicitSequential,
    FullCoupling,
}

impl Coupling {
    pub const ALL: [Coupling; 4] = [
        Coupling::OneWay,
        Coupling::ExplicitSequential,
        Coupling::ImplicitSequential,
        Coupling::FullCoupling,
    ];

    /// Short name used on the command line and in file names.
    pub fn slug(&self) -> &'static str {
        match self {
            Coupling::OneWay => "one-way",
            Coupling::ExplicitSequential => "explicit",
            Coupling::ImplicitSequential => "implicit",
            Coupling::FullCoupling => "full",
        }
    }
}

impl fmt::Display for Coupling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.slug())
    }
}

impl FromStr for Coupling {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "one-way" | "oneway" => Ok(Coupling::OneWay),
            "explicit" | "explicit-sequential" => Ok(Coupling::ExplicitSequential),
            "implicit" | "implicit-sequential" => Ok(Coupling::ImplicitSequential),
            "full" | "full-coupling" => Ok(Coupling::FullCoupling),
            other => Err(Error::Validation(format!("unknown scheme '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationConfig {
    pub nodes: usize,
    pub t_left: f64,
    pub t_right: f64,
    pub gamma: f64,
    pub exponent_a: f64,
    pub dt: f64,
    pub t_end: f64,
    pub scheme: Coupling,
    pub newton_tol: f64,
    pub newton_max_iters: usize,
    pub linear_solver: LinearSolverKind,
    pub bicgstab_tol: f64,
    pub fixed_point_tol: f64,
    pub fixed_point_max_iters: usize,
    pub snapshot_times: Vec<f64>,
}

impl Default for SimulationConfig {
    /// The radiative heat-wave problem: 200 nodes, `T_l = 0.1`, `T_r = 2`,
    /// `a = 3`, `dt = 0.001`, run to `t = 0.5`.
    fn default() -> Self {
        let solver = SolverSettings::default();
        Self {
            nodes: 200,
            t_left: 0.1,
            t_right: 2.0,
            gamma: 1.0,
            exponent_a: 3.0,
            dt: 0.001,
            t_end: 0.5,
            scheme: Coupling::FullCoupling,
            newton_tol: solver.newton_tol,
            newton_max_iters: solver.newton_max_iters,
            linear_solver: solver.linear_solver,
            bicgstab_tol: solver.bicgstab_tol,
            fixed_point_tol: solver.fixed_point_tol,
            fixed_point_max_iters: solver.fixed_point_max_iters,
            snapshot_times: Vec::new(),
        }
    }
}

impl SimulationConfig {
    pub fn with_scheme(&self, scheme: Coupling) -> Self {
        Self {
            scheme,
            ..self.clone()
        }
    }

    pub fn with_dt(&self, dt: f64) -> Self {
        Self { dt, ..self.clone() }
    }

    pub fn law(&self) -> Result<DiffusivityLaw> {
        DiffusivityLaw::new(self.gamma, self.exponent_a)
    }

    pub fn solver_settings(&self) -> SolverSettings {
        SolverSettings {
            linear_solver: self.linear_solver,
            bicgstab_tol: self.bicgstab_tol,
            newton_tol: self.newton_tol,
            newton_max_iters: self.newton_max_iters,
            fixed_point_tol: self.fixed_point_tol,
            fixed_point_max_iters: self.fixed_point_max_iters,
        }
    }

    /// Number of timesteps, `t_end / dt` rounded. Only meaningful after validation.
    pub fn step_count(&self) -> usize {
        (self.t_end / self.dt).round() as usize
    }

    /// Step indices at which snapshots are recorded: 0, every requested time,
    /// and the final step, sorted and deduplicated.
    pub fn snapshot_steps(&self) -> Vec<(usize, f64)> {
        let mut steps: Vec<(usize, f64)> = std::iter::once((0, 0.0))
            .chain(
                self.snapshot_times
                    .iter()
                    .map(|&t| ((t / self.dt).round() as usize, t)),
            )
            .chain(std::iter::once((self.step_count(), self.t_end)))
            .collect();
        steps.sort_by_key(|&(s, _)| s);
        steps.dedup_by_key(|&mut (s, _)| s);
        steps
    }
}

fn positive(name: &str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::Validation(format!(
            "{name} must be > 0, got {value}"
        )))
    }
}

pub fn validate_config(config: SimulationConfig) -> Result<SimulationConfig> {
    if config.nodes < 3 {
        return Err(Error::Validation(format!(
            "nodes must be >= 3, got {}",
            config.nodes
        )));
    }
    positive("t_left", config.t_left)?;
    positive("t_right", config.t_right)?;
    positive("gamma", config.gamma)?;
    if !config.exponent_a.is_finite() {
        return Err(Error::Validation("exponent a must be finite".into()));
    }
    positive("dt", config.dt)?;
    positive("t_end", config.t_end)?;
    positive("newton_tol", config.newton_tol)?;
    positive("bicgstab_tol", config.bicgstab_tol)?;
    positive("fixed_point_tol", config.fixed_point_tol)?;
    if config.newton_max_iters == 0 || config.fixed_point_max_iters == 0 {
        return Err(Error::Validation("iteration caps must be positive".into()));
    }

    let ratio = config.t_end / config.dt;
    if (ratio - ratio.round()).abs() > STEP_COUNT_TOLERANCE * ratio || ratio.round() < 1.0 {
        return Err(Error::Validation(format!(
            "t_end not an integer multiple of dt (t_end / dt = {ratio})"
        )));
    }
    for &t in &config.snapshot_times {
        let in_range =
            t.is_finite() && t >= 0.0 && t <= config.t_end * (1.0 + STEP_COUNT_TOLERANCE);
        if !in_range {
            return Err(Error::Validation(format!(
                "snapshot time {t} outside [0, {}]",
                config.t_end
            )));
        }
        let steps = t / config.dt;
        if (steps - steps.round()).abs() > SNAPSHOT_ALIGNMENT_TOLERANCE {
            return Err(Error::Validation(format!(
                "snapshot time {t} is not on a step boundary of dt = {}",
                config.dt
            )));
        }
    }
    Ok(config)
}

/// Uniform `T_r` everywhere except node 0, which carries `T_l`.
pub fn initialize_field(config: &SimulationConfig, grid: &Grid1D) -> TemperatureField {
    let mut values = vec![config.t_right; grid.nodes()];
    values[0] = config.t_left;
    TemperatureField::new(values).expect("validated config yields finite values")
}

/// Solver statistics summed over a span of steps.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct StepStats {
    pub steps: usize,
    pub newton_iterations: usize,
    pub max_newton_iterations: usize,
    pub fixed_point_iterations: usize,
    pub max_fixed_point_iterations: usize,
    pub linear_iterations: usize,
    /// Newton residual and relative-change norms of the most recent step.
    pub last_residual: Option<Norms>,
    pub last_change: Option<Norms>,
}

impl StepStats {
    fn absorb(&mut self, other: &StepStats) {
        self.steps += other.steps;
        self.newton_iterations += other.newton_iterations;
        self.max_newton_iterations = self.max_newton_iterations.max(other.max_newton_iterations);
        self.fixed_point_iterations += other.fixed_point_iterations;
        self.max_fixed_point_iterations = self
            .max_fixed_point_iterations
            .max(other.max_fixed_point_iterations);
        self.linear_iterations += other.linear_iterations;
        if other.last_residual.is_some() {
            self.last_residual = other.last_residual;
            self.last_change = other.last_change;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub step: usize,
    pub time: f64,
    pub temperatures: TemperatureField,
    pub diffusivities: Vec<f64>,
    /// Accumulated since the previous snapshot.
    pub step_stats: StepStats,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub config: SimulationConfig,
    pub snapshots: Vec<Snapshot>,
    pub wall_time_secs: f64,
    pub totals: StepStats,
}

impl RunReport {
    pub fn final_snapshot(&self) -> &Snapshot {
        self.snapshots.last().expect("a run always records t = 0")
    }

    pub fn total_newton_iterations(&self) -> usize {
        self.totals.newton_iterations
    }

    pub fn total_linear_iterations(&self) -> usize {
        self.totals.linear_iterations
    }
}

/// A run in progress: the current field plus everything needed to advance it.
#[derive(Debug, Clone)]
pub struct Stepper {
    scheme: Coupling,
    params: StepParams,
    settings: SolverSettings,
    frozen: Option<FrozenDiffusivity>,
    field: TemperatureField,
    step: usize,
}

impl Stepper {
    pub fn new(config: &SimulationConfig) -> Result<Self> {
        let config = validate_config(config.clone())?;
        let grid = Grid1D::new(config.nodes)?;
        let law = config.law()?;
        let params = StepParams::new(config.dt, grid.dx(), law, config.t_left, config.t_right)?;
        // one-way: diffusivity fixed once from the initial state and never fed back
        let frozen = match config.scheme {
            Coupling::OneWay => Some(FrozenDiffusivity::from_initial_state(&law, config.t_right)?),
            _ => None,
        };
        Ok(Self {
            scheme: config.scheme,
            params,
            settings: config.solver_settings(),
            frozen,
            field: initialize_field(&config, &grid),
            step: 0,
        })
    }

    pub fn field(&self) -> &TemperatureField {
        &self.field
    }

    pub fn params(&self) -> &StepParams {
        &self.params
    }

    pub fn settings(&self) -> &SolverSettings {
        &self.settings
    }

    pub fn step_index(&self) -> usize {
        self.step
    }

    pub fn time(&self) -> f64 {
        self.step as f64 * self.params.dt
    }

    pub fn advance(&mut self) -> Result<StepStats> {
        let index = self.step + 1;
        self.advance_inner()
            .map_err(|e| e.at_step(index, index as f64 * self.params.dt))
    }

    fn advance_inner(&mut self) -> Result<StepStats> {
        let p = &self.params;
        let s = &self.settings;
        let mut stats = StepStats {
            steps: 1,
            ..StepStats::default()
        };
        let next = match self.scheme {
            Coupling::OneWay => {
                let frozen = self
                    .frozen
                    .expect("one-way stepper carries a frozen diffusivity");
                let (field, linear) = schemes::step_one_way(&self.field, frozen, p, s)?;
                stats.linear_iterations = linear;
                field
            }
            Coupling::ExplicitSequential => {
                let (field, linear) = schemes::step_explicit_sequential(&self.field, p, s)?;
                stats.linear_iterations = linear;
                field
            }
            Coupling::ImplicitSequential => {
                let out = schemes::step_implicit_sequential(&self.field, p, s)?;
                stats.fixed_point_iterations = out.outer_iterations;
                stats.max_fixed_point_iterations = out.outer_iterations;
                stats.linear_iterations = out.linear_iterations;
                out.field
            }
            Coupling::FullCoupling => {
                let (field, newton) = schemes::step_full(&self.field, p, s)?;
                stats.newton_iterations = newton.iterations;
                stats.max_newton_iterations = newton.iterations;
                stats.linear_iterations = newton.linear_iterations;
                stats.last_residual = Some(newton.residual);
                stats.last_change = Some(newton.change);
                field
            }
        };
        self.field = next;
        self.step += 1;
        Ok(stats)
    }
}

pub fn run_simulation(config: &SimulationConfig) -> Result<RunReport> {
    run_simulation_with(config, |_, _| {})
}

/// Like [`run_simulation`], calling `observe(step, field)` after every step.
pub fn run_simulation_with<F>(config: &SimulationConfig, mut observe: F) -> Result<RunReport>
where
    F: FnMut(usize, &TemperatureField),
{
    let started = clock::start();
    let config = validate_config(config.clone())?;
    let law = config.law()?;
    let mut stepper = Stepper::new(&config)?;
    let record =
        |step: usize, time: f64, field: &TemperatureField, stats: StepStats| -> Result<Snapshot> {
            Ok(Snapshot {
                step,
                time,
                temperatures: field.clone(),
                diffusivities: diffusivity::profile(&law, field.values())?,
                step_stats: stats,
            })
        };

    let targets = config.snapshot_steps();
    let mut snapshots = Vec::with_capacity(targets.len());
    let mut totals = StepStats::default();
    let mut pending = StepStats::default();
    for &(target, time) in &targets {
        while stepper.step_index() < target {
            let stats = stepper.advance()?;
            pending.absorb(&stats);
            observe(stepper.step_index(), stepper.field());
        }
        totals.absorb(&pending);
        snapshots.push(record(target, time, stepper.field(), pending)?);
        pending = StepStats::default();
    }

    Ok(RunReport {
        config,
        snapshots,
        wall_time_secs: clock::elapsed_secs(started),
        totals,
    })
}

// `Instant` is unavailable on wasm32-unknown-unknown; timings read zero there.
mod clock {
    #[cfg(not(target_arch = "wasm32"))]
    pub type Start = std::time::Instant;
    #[cfg(target_arch = "wasm32")]
    #[derive(Clone, Copy)]
    pub struct Start;

    #[cfg(not(target_arch = "wasm32"))]
    pub fn start() -> Start {
        std::time::Instant::now()
    }

    #[cfg(target_arch = "wasm32")]
    pub fn start() -> Start {
        Start
    }

    #[cfg(not(target_arch = "wasm32"))]
    pub fn elapsed_secs(start: Start) -> f64 {
        start.elapsed().as_secs_f64()
    }

    #[cfg(target_arch = "wasm32")]
    pub fn elapsed_secs(_: Start) -> f64 {
        0.0
    }
}
