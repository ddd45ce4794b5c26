//! WebAssembly bindings for the browser demo.
//!
//! Each operation has a plain Rust entry point (`simulate`, `compare`,
//! `convergence`) taking typed parameters, and a thin `#[wasm_bindgen]`
//! wrapper that exchanges JSON strings with the page.

use nlheat::compare::{compare_schemes, CheckStatus};
use nlheat::convergence::convergence_study;
use nlheat::{run_simulation, Coupling, Error, Grid1D, Result, SimulationConfig};
use serde::{Deserialize, Serialize};
use wasm_bindgen::prelude::*;

/// Keeps a single click from freezing the tab.
pub const MAX_STEPS_PER_RUN: usize = 50_000;
pub const MAX_NODES: usize = 2_000;

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default)]
pub struct DemoParams {
    pub nodes: usize,
    pub t_left: f64,
    pub t_right: f64,
    pub gamma: f64,
    pub exponent_a: f64,
    pub t_end: f64,
    pub dt: f64,
    pub scheme: Coupling,
    /// Number of evenly spaced snapshots after t = 0.
    pub snapshots: usize,
}

impl Default for DemoParams {
    fn default() -> Self {
        let c = SimulationConfig::default();
        Self {
            nodes: c.nodes,
            t_left: c.t_left,
            t_right: c.t_right,
            gamma: c.gamma,
            exponent_a: c.exponent_a,
            t_end: c.t_end,
            dt: c.dt,
            scheme: c.scheme,
            snapshots: 5,
        }
    }
}

impl DemoParams {
    fn config(&self) -> Result<SimulationConfig> {
        if self.nodes > MAX_NODES {
            return Err(Error::Validation(format!(
                "demo allows at most {MAX_NODES} nodes"
            )));
        }
        let mut config = SimulationConfig {
            nodes: self.nodes,
            t_left: self.t_left,
            t_right: self.t_right,
            gamma: self.gamma,
            exponent_a: self.exponent_a,
            t_end: self.t_end,
            dt: self.dt,
            scheme: self.scheme,
            ..SimulationConfig::default()
        };
        let config_checked = nlheat::validate_config(config.clone())?;
        let steps = config_checked.step_count();
        if steps > MAX_STEPS_PER_RUN {
            return Err(Error::Validation(format!(
                "{steps} steps requested; demo allows at most {MAX_STEPS_PER_RUN}"
            )));
        }
        let k = self.snapshots.clamp(1, steps);
        config.snapshot_times = (1..=k).map(|i| (i * steps / k) as f64 * self.dt).collect();
        config.snapshot_times.dedup();
        Ok(config)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Profile {
    pub time: f64,
    pub temperatures: Vec<f64>,
    pub diffusivities: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationView {
    pub scheme: String,
    pub x: Vec<f64>,
    pub profiles: Vec<Profile>,
    pub steps: usize,
    pub newton_iterations: usize,
    pub fixed_point_iterations: usize,
    pub linear_solves: usize,
}

pub fn simulate(params: &DemoParams) -> Result<SimulationView> {
    let config = params.config()?;
    let report = run_simulation(&config)?;
    let t = report.totals;
    Ok(SimulationView {
        scheme: config.scheme.to_string(),
        x: Grid1D::new(config.nodes)?.positions(),
        profiles: report
            .snapshots
            .into_iter()
            .map(|s| Profile {
                time: s.time,
                temperatures: s.temperatures.into_values(),
                diffusivities: s.diffusivities,
            })
            .collect(),
        steps: t.steps,
        newton_iterations: t.newton_iterations,
        fixed_point_iterations: t.fixed_point_iterations,
        linear_solves: t.linear_iterations,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Curve {
    pub scheme: String,
    pub dt: f64,
    pub temperatures: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Discrepancy {
    pub scheme: String,
    pub dt: f64,
    pub l1: f64,
    pub l2: f64,
    pub linf: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub status: String,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonView {
    pub x: Vec<f64>,
    pub reference_dt: f64,
    pub curves: Vec<Curve>,
    pub discrepancies: Vec<Discrepancy>,
    pub spreads: Vec<(String, f64)>,
    pub checks: Vec<Check>,
}

/// Final profiles of every scheme at every timestep, measured against full
/// coupling at the smallest timestep.
pub fn compare(params: &DemoParams, dts: &[f64]) -> Result<ComparisonView> {
    if dts.is_empty() {
        return Err(Error::Validation("at least one dt is required".into()));
    }
    for &dt in dts {
        DemoParams {
            dt,
            ..params.clone()
        }
        .config()?;
    }
    let mut base = params.config()?;
    base.snapshot_times.clear();
    let report = compare_schemes(&base, dts, &Coupling::ALL)?;
    Ok(ComparisonView {
        x: Grid1D::new(base.nodes)?.positions(),
        reference_dt: report.reference_dt,
        curves: report
            .runs
            .iter()
            .map(|r| Curve {
                scheme: r.scheme.to_string(),
                dt: r.dt,
                temperatures: r.final_field().values().to_vec(),
            })
            .collect(),
        discrepancies: report
            .rows
            .iter()
            .map(|r| Discrepancy {
                scheme: r.scheme.to_string(),
                dt: r.dt,
                l1: r.discrepancy.one,
                l2: r.discrepancy.two,
                linf: r.discrepancy.inf,
            })
            .collect(),
        spreads: report
            .spreads
            .iter()
            .map(|s| (s.scheme.to_string(), s.linf))
            .collect(),
        checks: report
            .checks
            .iter()
            .map(|c| Check {
                name: c.name.to_string(),
                status: match c.status {
                    CheckStatus::Pass => "PASS",
                    CheckStatus::Fail => "FAIL",
                    CheckStatus::Skipped => "SKIPPED",
                }
                .to_string(),
                detail: c.detail.clone(),
            })
            .collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderView {
    pub dt_fine: f64,
    pub coarse_gap: f64,
    pub fine_gap: f64,
    pub order: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceView {
    pub scheme: String,
    pub dts: Vec<f64>,
    pub ratio: f64,
    pub estimates: Vec<OrderView>,
}

/// Observed temporal order of `params.scheme` on a geometric dt ladder.
pub fn convergence(params: &DemoParams, dts: &[f64]) -> Result<ConvergenceView> {
    for &dt in dts {
        DemoParams {
            dt,
            ..params.clone()
        }
        .config()?;
    }
    let mut base = params.config()?;
    base.snapshot_times.clear();
    let study = convergence_study(&base, dts)?;
    Ok(ConvergenceView {
        scheme: base.scheme.to_string(),
        dts: study.dts,
        ratio: study.ratio,
        estimates: study
            .estimates
            .iter()
            .map(|e| OrderView {
                dt_fine: e.dt_fine,
                coarse_gap: e.coarse_gap,
                fine_gap: e.fine_gap,
                order: e.order,
            })
            .collect(),
    })
}

fn parse(params_json: &str) -> std::result::Result<DemoParams, JsError> {
    serde_json::from_str(params_json).map_err(|e| JsError::new(&format!("bad parameters: {e}")))
}

fn to_json<T: Serialize>(
    value: std::result::Result<T, Error>,
) -> std::result::Result<String, JsError> {
    let value = value.map_err(|e| JsError::new(&e.to_string()))?;
    serde_json::to_string(&value).map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen(js_name = simulate)]
pub fn simulate_js(params_json: &str) -> std::result::Result<String, JsError> {
    to_json(simulate(&parse(params_json)?))
}

#[wasm_bindgen(js_name = compareSchemes)]
pub fn compare_js(params_json: &str, dts: Vec<f64>) -> std::result::Result<String, JsError> {
    to_json(compare(&parse(params_json)?, &dts))
}

#[wasm_bindgen(js_name = convergenceOrder)]
pub fn convergence_js(params_json: &str, dts: Vec<f64>) -> std::result::Result<String, JsError> {
    to_json(convergence(&parse(params_json)?, &dts))
}
