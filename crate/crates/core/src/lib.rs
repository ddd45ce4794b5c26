//! One-dimensional nonlinear heat conduction, `T_t = (D(T) T_x)_x` with
//! `D(T) = gamma T^a`, solved by backward Euler finite differences under four
//! ways of coupling the temperature and diffusivity updates.

pub mod compare;
pub mod convergence;
pub mod diffusivity;
pub mod error;
pub mod grid;
pub mod linalg;
pub mod schemes;
pub mod simulation;

#[cfg(not(target_arch = "wasm32"))]
pub use compare::compare_schemes_parallel;
pub use compare::{compare_schemes, CheckStatus, ComparisonReport};
pub use convergence::{convergence_study, ConvergenceStudy};
pub use diffusivity::DiffusivityLaw;
pub use error::{Error, ErrorKind, Result};
pub use grid::{Grid1D, TemperatureField};
pub use linalg::{LinearSolverKind, NormKind, Norms, TridiagonalSystem};
pub use schemes::{SolverSettings, StepParams};
pub use simulation::{
    initialize_field, run_simulation, run_simulation_with, validate_config, Coupling, RunReport,
    SimulationConfig, Snapshot, StepStats, Stepper,
};
