//! Cross-scheme accuracy comparison over a sweep of timesteps.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::TemperatureField;
use crate::linalg::Norms;
use crate::simulation::{run_simulation, Coupling, RunReport, SimulationConfig, StepStats};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemeRun {
    pub scheme: Coupling,
    pub dt: f64,
    pub report: RunReport,
}

impl SchemeRun {
    pub fn final_field(&self) -> &TemperatureField {
        &self.report.final_snapshot().temperatures
    }
}

/// Nodal 1-, 2- and infinity-norm discrepancies of a final profile against the
/// reference profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiscrepancyRow {
    pub scheme: Coupling,
    pub dt: f64,
    pub discrepancy: Norms,
}

/// Largest infinity-norm difference between the final profiles of one scheme
/// across every pair of timesteps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossDtSpread {
    pub scheme: Coupling,
    pub linf: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CheckStatus {
    Pass,
    Fail,
    Skipped,
}

impl fmt::Display for CheckStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CheckStatus::Pass => "PASS",
            CheckStatus::Fail => "FAIL",
            CheckStatus::Skipped => "SKIPPED",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderingCheck {
    pub name: &'static str,
    pub status: CheckStatus,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub reference_dt: f64,
    /// In input order: schemes outer, timesteps inner.
    pub rows: Vec<DiscrepancyRow>,
    pub spreads: Vec<CrossDtSpread>,
    pub checks: Vec<OrderingCheck>,
    pub runs: Vec<SchemeRun>,
    pub totals: StepStats,
}

impl ComparisonReport {
    pub fn row(&self, scheme: Coupling, dt: f64) -> Option<&DiscrepancyRow> {
        self.rows.iter().find(|r| r.scheme == scheme && r.dt == dt)
    }

    pub fn spread(&self, scheme: Coupling) -> Option<f64> {
        self.spreads
            .iter()
            .find(|s| s.scheme == scheme)
            .map(|s| s.linf)
    }

    pub fn check(&self, name: &str) -> Option<&OrderingCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

pub const CHECK_EXPLICIT_MONOTONE: &str = "explicit-sequential discrepancy increases with dt";
pub const CHECK_ONE_WAY_WORST: &str = "one-way discrepancy largest at every dt";
pub const CHECK_FULL_STEADIEST: &str = "full-coupling cross-dt spread smallest";

/// Run every scheme at every timestep on the calling thread.
pub fn compare_schemes(
    base: &SimulationConfig,
    dt_values: &[f64],
    schemes: &[Coupling],
) -> Result<ComparisonReport> {
    compare_with(base, dt_values, schemes, |jobs| {
        jobs.iter().map(run_simulation).collect()
    })
}

/// Same as [`compare_schemes`] with one worker thread per run.
#[cfg(not(target_arch = "wasm32"))]
pub fn compare_schemes_parallel(
    base: &SimulationConfig,
    dt_values: &[f64],
    schemes: &[Coupling],
) -> Result<ComparisonReport> {
    compare_with(base, dt_values, schemes, |jobs| {
        std::thread::scope(|scope| {
            let handles: Vec<_> = jobs
                .iter()
                .map(|job| scope.spawn(move || run_simulation(job)))
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("simulation thread panicked"))
                .collect()
        })
    })
}

fn label(scheme: Coupling, dt: f64) -> String {
    format!("scheme {scheme}, dt {dt}")
}

fn compare_with<R>(
    base: &SimulationConfig,
    dt_values: &[f64],
    schemes: &[Coupling],
    run_all: R,
) -> Result<ComparisonReport>
where
    R: FnOnce(&[SimulationConfig]) -> Vec<Result<RunReport>>,
{
    if dt_values.is_empty() {
        return Err(Error::Validation("dt list is empty".into()));
    }
    if schemes.is_empty() {
        return Err(Error::Validation("scheme list is empty".into()));
    }
    let reference_dt = dt_values.iter().copied().fold(f64::INFINITY, f64::min);

    let mut keys: Vec<(Coupling, f64)> = schemes
        .iter()
        .flat_map(|&s| dt_values.iter().map(move |&dt| (s, dt)))
        .collect();
    let reference_listed = keys.contains(&(Coupling::FullCoupling, reference_dt));
    if !reference_listed {
        keys.push((Coupling::FullCoupling, reference_dt));
    }
    let jobs: Vec<SimulationConfig> = keys
        .iter()
        .map(|&(s, dt)| base.with_scheme(s).with_dt(dt))
        .collect();

    let mut runs = Vec::with_capacity(jobs.len());
    for (&(scheme, dt), result) in keys.iter().zip(run_all(&jobs)) {
        let report = result.map_err(|e| e.labeled(label(scheme, dt)))?;
        runs.push(SchemeRun { scheme, dt, report });
    }
    let reference = runs
        .iter()
        .find(|r| r.scheme == Coupling::FullCoupling && r.dt == reference_dt)
        .expect("reference run is always scheduled")
        .final_field()
        .clone();
    if !reference_listed {
        runs.pop();
    }

    let rows: Vec<DiscrepancyRow> = runs
        .iter()
        .map(|r| DiscrepancyRow {
            scheme: r.scheme,
            dt: r.dt,
            discrepancy: Norms::of(&r.final_field().diff(&reference)),
        })
        .collect();

    let spreads = schemes
        .iter()
        .map(|&scheme| {
            let finals: Vec<&TemperatureField> = runs
                .iter()
                .filter(|r| r.scheme == scheme)
                .map(SchemeRun::final_field)
                .collect();
            let mut linf: f64 = 0.0;
            for (i, a) in finals.iter().enumerate() {
                for b in &finals[i + 1..] {
                    linf = linf.max(a.max_abs_diff(b));
                }
            }
            CrossDtSpread { scheme, linf }
        })
        .collect::<Vec<_>>();

    let mut totals = StepStats::default();
    for r in &runs {
        let t = &r.report.totals;
        totals.steps += t.steps;
        totals.newton_iterations += t.newton_iterations;
        totals.fixed_point_iterations += t.fixed_point_iterations;
        totals.linear_iterations += t.linear_iterations;
        totals.max_newton_iterations = totals.max_newton_iterations.max(t.max_newton_iterations);
        totals.max_fixed_point_iterations = totals
            .max_fixed_point_iterations
            .max(t.max_fixed_point_iterations);
    }

    let checks = ordering_checks(&rows, &spreads, dt_values, schemes);
    Ok(ComparisonReport {
        reference_dt,
        rows,
        spreads,
        checks,
        runs,
        totals,
    })
}

fn linf_at(rows: &[DiscrepancyRow], scheme: Coupling, dt: f64) -> f64 {
    rows.iter()
        .find(|r| r.scheme == scheme && r.dt == dt)
        .map(|r| r.discrepancy.inf)
        .expect("every (scheme, dt) pair has a row")
}

fn ordering_checks(
    rows: &[DiscrepancyRow],
    spreads: &[CrossDtSpread],
    dt_values: &[f64],
    schemes: &[Coupling],
) -> Vec<OrderingCheck> {
    let has = |s: Coupling| schemes.contains(&s);
    let mut sorted_dts = dt_values.to_vec();
    sorted_dts.sort_by(f64::total_cmp);
    sorted_dts.dedup();
    let skipped = |name, why: &str| OrderingCheck {
        name,
        status: CheckStatus::Skipped,
        detail: why.to_string(),
    };
    let verdict = |ok: bool| {
        if ok {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail
        }
    };

    let mut checks = Vec::with_capacity(3);

    checks.push(if !has(Coupling::ExplicitSequential) {
        skipped(
            CHECK_EXPLICIT_MONOTONE,
            "explicit sequential not in scheme list",
        )
    } else if sorted_dts.len() < 2 {
        skipped(CHECK_EXPLICIT_MONOTONE, "needs at least two timesteps")
    } else {
        let values: Vec<f64> = sorted_dts
            .iter()
            .map(|&dt| linf_at(rows, Coupling::ExplicitSequential, dt))
            .collect();
        OrderingCheck {
            name: CHECK_EXPLICIT_MONOTONE,
            status: verdict(values.windows(2).all(|w| w[1] > w[0])),
            detail: format!(
                "linf by increasing dt: {}",
                values
                    .iter()
                    .map(|v| format!("{v:e}"))
                    .collect::<Vec<_>>()
                    .join(", ")
            ),
        }
    });

    let others: Vec<Coupling> = schemes
        .iter()
        .copied()
        .filter(|&s| s != Coupling::OneWay)
        .collect();
    checks.push(if !has(Coupling::OneWay) {
        skipped(CHECK_ONE_WAY_WORST, "one-way not in scheme list")
    } else if others.is_empty() {
        skipped(CHECK_ONE_WAY_WORST, "no other scheme to compare against")
    } else {
        let mut ok = true;
        let mut detail = Vec::new();
        for &dt in &sorted_dts {
            let one_way = linf_at(rows, Coupling::OneWay, dt);
            let worst_other = others
                .iter()
                .map(|&s| linf_at(rows, s, dt))
                .fold(f64::NEG_INFINITY, f64::max);
            ok &= one_way > worst_other;
            detail.push(format!(
                "dt {dt}: one-way {one_way:e} vs next {worst_other:e}"
            ));
        }
        OrderingCheck {
            name: CHECK_ONE_WAY_WORST,
            status: verdict(ok),
            detail: detail.join("; "),
        }
    });

    let spread_of = |s: Coupling| spreads.iter().find(|x| x.scheme == s).map(|x| x.linf);
    checks.push(match spread_of(Coupling::FullCoupling) {
        None => skipped(CHECK_FULL_STEADIEST, "full coupling not in scheme list"),
        Some(_) if sorted_dts.len() < 2 => {
            skipped(CHECK_FULL_STEADIEST, "needs at least two timesteps")
        }
        Some(_) if spreads.len() < 2 => {
            skipped(CHECK_FULL_STEADIEST, "no other scheme to compare against")
        }
        Some(full) => {
            let others: Vec<&CrossDtSpread> = spreads
                .iter()
                .filter(|s| s.scheme != Coupling::FullCoupling)
                .collect();
            OrderingCheck {
                name: CHECK_FULL_STEADIEST,
                status: verdict(others.iter().all(|s| full < s.linf)),
                detail: std::iter::once(format!("full {full:e}"))
                    .chain(others.iter().map(|s| format!("{} {:e}", s.scheme, s.linf)))
                    .collect::<Vec<_>>()
                    .join(", "),
            }
        }
    });
    checks
}
