//! Single-step update rules for the four coupling strategies.
//!
//! Unknowns are always the `N - 2` interior temperatures. Boundary values enter
//! the stencils as known data and are never solved for.

use serde::{Deserialize, Serialize};

use crate::diffusivity::DiffusivityLaw;
use crate::error::{Error, Result};
use crate::grid::TemperatureField;
use crate::linalg::{self, LinearSolverKind, NormKind, Norms, TridiagonalSystem};

/// Fixed data for one timestep of one run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepParams {
    pub dt: f64,
    pub dx: f64,
    pub law: DiffusivityLaw,
    pub t_left: f64,
    pub t_right: f64,
}

impl StepParams {
    pub fn new(dt: f64, dx: f64, law: DiffusivityLaw, t_left: f64, t_right: f64) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::Validation(format!("dt must be > 0, got {dt}")));
        }
        if !(dx.is_finite() && dx > 0.0) {
            return Err(Error::Validation(format!("dx must be > 0, got {dx}")));
        }
        Ok(Self {
            dt,
            dx,
            law,
            t_left,
            t_right,
        })
    }

    /// `gamma * dt / (2 dx^2)`, the factor in front of every flux bracket.
    pub fn beta(&self) -> f64 {
        self.law.gamma() * self.dt / (2.0 * self.dx * self.dx)
    }

    /// `D * dt / dx^2` for a constant diffusivity `D`.
    pub fn lambda(&self, diffusivity: f64) -> f64 {
        diffusivity * self.dt / (self.dx * self.dx)
    }

    /// Mirror image of the problem: boundary roles swapped.
    pub fn mirrored(&self) -> Self {
        Self {
            t_left: self.t_right,
            t_right: self.t_left,
            ..*self
        }
    }

    fn pinned(&self, field: &TemperatureField) -> Vec<f64> {
        field
            .with_boundaries(self.t_left, self.t_right)
            .into_values()
    }
}

/// Tolerances and backends shared by every step of a run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverSettings {
    pub linear_solver: LinearSolverKind,
    pub bicgstab_tol: f64,
    pub newton_tol: f64,
    pub newton_max_iters: usize,
    pub fixed_point_tol: f64,
    pub fixed_point_max_iters: usize,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            linear_solver: LinearSolverKind::Thomas,
            bicgstab_tol: 1e-7,
            newton_tol: 1e-6,
            newton_max_iters: 50,
            fixed_point_tol: 1e-6,
            fixed_point_max_iters: 100,
        }
    }
}

impl SolverSettings {
    fn solve(
        &self,
        system: &TridiagonalSystem,
        rhs: &[f64],
        x0: &[f64],
    ) -> Result<(Vec<f64>, usize)> {
        linalg::solve(self.linear_solver, system, rhs, x0, self.bicgstab_tol)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct NewtonStats {
    /// Linear solves performed, including the one that certified convergence.
    pub iterations: usize,
    pub linear_iterations: usize,
    /// Residual norms at the returned iterate.
    pub residual: Norms,
    /// Norms of the last update relative to the returned iterate.
    pub change: Norms,
}

/// Scalar diffusivity held fixed for a whole one-way run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrozenDiffusivity(f64);

impl FrozenDiffusivity {
    pub fn new(diffusivity: f64) -> Result<Self> {
        if !(diffusivity.is_finite() && diffusivity >= 0.0) {
            return Err(Error::Validation(format!(
                "frozen diffusivity must be finite and >= 0, got {diffusivity}"
            )));
        }
        Ok(Self(diffusivity))
    }

    /// Diffusivity of the uniform initial state, `gamma * T_r^a`.
    pub fn from_initial_state(law: &DiffusivityLaw, t_initial: f64) -> Result<Self> {
        Self::new(law.nodal(t_initial)?)
    }

    pub fn value(&self) -> f64 {
        self.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FixedPointOutcome {
    pub field: TemperatureField,
    pub outer_iterations: usize,
    pub linear_iterations: usize,
    /// Relative infinity-norm change of the last outer iteration.
    pub change: f64,
}

fn check_lengths(a: &TemperatureField, b: &TemperatureField) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::Dimension(format!(
            "fields have {} and {} nodes",
            a.len(),
            b.len()
        )));
    }
    Ok(())
}

/// Residual of the fully coupled scheme at the interior nodes.
pub fn residual_full(
    t_new: &TemperatureField,
    t_old: &TemperatureField,
    p: &StepParams,
) -> Result<Vec<f64>> {
    check_lengths(t_new, t_old)?;
    let u = p.pinned(t_new);
    let old = t_old.values();
    let pa = p.law.powers(&u)?;
    let beta = p.beta();
    Ok((1..u.len() - 1)
        .map(|k| {
            let bracket = u[k + 1] * pa[k + 1] - pa[k + 1] * u[k] + pa[k] * u[k + 1]
                - 2.0 * u[k] * pa[k]
                + pa[k] * u[k - 1]
                - pa[k - 1] * u[k]
                + u[k - 1] * pa[k - 1];
            u[k] - old[k] - beta * bracket
        })
        .collect())
}

/// Analytic Jacobian of [`residual_full`] with respect to the interior unknowns.
pub fn jacobian_full(t_new: &TemperatureField, p: &StepParams) -> Result<TridiagonalSystem> {
    let u = p.pinned(t_new);
    let a = p.law.exponent();
    let pa = p.law.powers(&u)?;
    // a * T^(a-1); identically zero in the linear case
    let dpa: Vec<f64> = if a == 0.0 {
        vec![0.0; u.len()]
    } else {
        p.law
            .powers_with(&u, a - 1.0)?
            .into_iter()
            .map(|x| a * x)
            .collect()
    };
    let beta = p.beta();
    let m = u.len() - 2;

    let mut lower = Vec::with_capacity(m - 1);
    let mut diag = Vec::with_capacity(m);
    let mut upper = Vec::with_capacity(m - 1);
    for i in 0..m {
        let k = i + 1;
        if i > 0 {
            lower.push(-beta * (pa[k] - dpa[k - 1] * u[k] + (a + 1.0) * pa[k - 1]));
        }
        diag.push(
            1.0 - beta
                * (-pa[k + 1] + dpa[k] * u[k + 1] - 2.0 * (a + 1.0) * pa[k] + dpa[k] * u[k - 1]
                    - pa[k - 1]),
        );
        if i + 1 < m {
            upper.push(-beta * (pa[k] - dpa[k + 1] * u[k] + (a + 1.0) * pa[k + 1]));
        }
    }
    TridiagonalSystem::new(lower, diag, upper)
}

/// One fully coupled step: Newton-Raphson on [`residual_full`], warm-started
/// from `t_old`.
///
/// Exits once all three norms of the residual and of the relative update are
/// below `newton_tol`.
pub fn step_full(
    t_old: &TemperatureField,
    p: &StepParams,
    settings: &SolverSettings,
) -> Result<(TemperatureField, NewtonStats)> {
    let old = TemperatureField::from_interior(t_old.interior(), p.t_left, p.t_right);
    let mut current = old.clone();
    let mut residual = residual_full(&current, &old, p)?;
    let mut stats = NewtonStats::default();

    for iteration in 1..=settings.newton_max_iters {
        let jacobian = jacobian_full(&current, p)?;
        let rhs: Vec<f64> = residual.iter().map(|f| -f).collect();
        let zero = vec![0.0; rhs.len()];
        let (delta, linear_iterations) = settings.solve(&jacobian, &rhs, &zero)?;

        let updated: Vec<f64> = current
            .interior()
            .iter()
            .zip(&delta)
            .map(|(t, d)| t + d)
            .collect();
        current = TemperatureField::from_interior(&updated, p.t_left, p.t_right);
        residual = residual_full(&current, &old, p)?;

        let step = Norms::of(&delta);
        let size = Norms::of(&updated);
        stats = NewtonStats {
            iterations: iteration,
            linear_iterations: stats.linear_iterations + linear_iterations,
            residual: Norms::of(&residual),
            change: Norms {
                one: step.one / size.one.max(1e-300),
                two: step.two / size.two.max(1e-300),
                inf: step.inf / size.inf.max(1e-300),
            },
        };
        if stats.residual.all_below(settings.newton_tol)
            && stats.change.all_below(settings.newton_tol)
        {
            return Ok((current, stats));
        }
    }
    Err(Error::NewtonNonConvergence {
        iterations: settings.newton_max_iters,
        residual: stats.residual,
        change: stats.change,
    })
}

/// Linear system with diffusivities taken from `lagged` and right-hand side
/// from `t_old`. The explicit sequential scheme uses `lagged = t_old`.
pub fn assemble_lagged(
    lagged: &TemperatureField,
    t_old: &TemperatureField,
    p: &StepParams,
) -> Result<(TridiagonalSystem, Vec<f64>)> {
    check_lengths(lagged, t_old)?;
    let lag = p.pinned(lagged);
    let pa = p.law.powers(&lag)?;
    let beta = p.beta();
    let old = t_old.values();
    let m = lag.len() - 2;

    let mut lower = Vec::with_capacity(m - 1);
    let mut diag = Vec::with_capacity(m);
    let mut upper = Vec::with_capacity(m - 1);
    let mut rhs = Vec::with_capacity(m);
    for i in 0..m {
        let k = i + 1;
        let west = beta * (pa[k - 1] + pa[k]);
        let east = beta * (pa[k + 1] + pa[k]);
        diag.push(1.0 + beta * (pa[k + 1] + 2.0 * pa[k] + pa[k - 1]));
        let mut b = old[k];
        if i > 0 {
            lower.push(-west);
        } else {
            b += west * p.t_left;
        }
        if i + 1 < m {
            upper.push(-east);
        } else {
            b += east * p.t_right;
        }
        rhs.push(b);
    }
    Ok((TridiagonalSystem::new(lower, diag, upper)?, rhs))
}

/// Explicit sequential system: diffusivity lagged one full timestep.
pub fn assemble_explicit(
    t_old: &TemperatureField,
    p: &StepParams,
) -> Result<(TridiagonalSystem, Vec<f64>)> {
    assemble_lagged(t_old, t_old, p)
}

/// One explicit sequential step. Returns the new field and the Krylov
/// iterations spent (zero under Thomas).
pub fn step_explicit_sequential(
    t_old: &TemperatureField,
    p: &StepParams,
    settings: &SolverSettings,
) -> Result<(TemperatureField, usize)> {
    let (system, rhs) = assemble_explicit(t_old, p)?;
    let (x, iterations) = settings.solve(&system, &rhs, t_old.interior())?;
    Ok((
        TemperatureField::from_interior(&x, p.t_left, p.t_right),
        iterations,
    ))
}

/// Constant-coefficient backward Euler system for a frozen diffusivity.
pub fn assemble_one_way(
    t_old: &TemperatureField,
    frozen: FrozenDiffusivity,
    p: &StepParams,
) -> Result<(TridiagonalSystem, Vec<f64>)> {
    let lambda = p.lambda(frozen.value());
    let old = t_old.values();
    let m = old.len() - 2;
    let mut rhs = old[1..=m].to_vec();
    rhs[0] += lambda * p.t_left;
    rhs[m - 1] += lambda * p.t_right;
    let system = TridiagonalSystem::new(
        vec![-lambda; m - 1],
        vec![1.0 + 2.0 * lambda; m],
        vec![-lambda; m - 1],
    )?;
    Ok((system, rhs))
}

/// One one-way step with the diffusivity frozen for the whole run.
pub fn step_one_way(
    t_old: &TemperatureField,
    frozen: FrozenDiffusivity,
    p: &StepParams,
    settings: &SolverSettings,
) -> Result<(TemperatureField, usize)> {
    let (system, rhs) = assemble_one_way(t_old, frozen, p)?;
    let (x, iterations) = settings.solve(&system, &rhs, t_old.interior())?;
    Ok((
        TemperatureField::from_interior(&x, p.t_left, p.t_right),
        iterations,
    ))
}

/// One implicit sequential step: Picard iteration on the lagged-diffusivity
/// system until the temperature stops changing.
pub fn step_implicit_sequential(
    t_old: &TemperatureField,
    p: &StepParams,
    settings: &SolverSettings,
) -> Result<FixedPointOutcome> {
    let old = TemperatureField::from_interior(t_old.interior(), p.t_left, p.t_right);
    let mut lagged = old.clone();
    let mut linear_iterations = 0;
    let mut change = f64::INFINITY;

    for outer in 1..=settings.fixed_point_max_iters {
        let (system, rhs) = assemble_lagged(&lagged, &old, p)?;
        let (x, iterations) = settings.solve(&system, &rhs, lagged.interior())?;
        linear_iterations += iterations;
        let next = TemperatureField::from_interior(&x, p.t_left, p.t_right);
        change = linalg::vector_norm(&next.diff(&lagged), NormKind::Infinity)
            / linalg::vector_norm(next.values(), NormKind::Infinity).max(1e-300);
        lagged = next;
        if change < settings.fixed_point_tol {
            return Ok(FixedPointOutcome {
                field: lagged,
                outer_iterations: outer,
                linear_iterations,
                change,
            });
        }
    }
    Err(Error::FixedPointNonConvergence {
        iterations: settings.fixed_point_max_iters,
        change,
    })
}
