//! Observed temporal order from a geometric ladder of timesteps.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::TemperatureField;
use crate::simulation::{run_simulation, SimulationConfig};

/// One Richardson triplet `(h, r h, r^2 h)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrderEstimate {
    /// Smallest timestep of the triplet.
    pub dt_fine: f64,
    pub coarse_gap: f64,
    pub fine_gap: f64,
    pub order: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceStudy {
    /// Timesteps from coarsest to finest.
    pub dts: Vec<f64>,
    pub ratio: f64,
    pub estimates: Vec<OrderEstimate>,
    pub finals: Vec<TemperatureField>,
}

/// `log_ratio(||T_mid - T_coarse||_inf / ||T_fine - T_mid||_inf)`.
pub fn richardson_order(
    coarse: &TemperatureField,
    mid: &TemperatureField,
    fine: &TemperatureField,
    ratio: f64,
) -> OrderEstimate {
    let coarse_gap = mid.max_abs_diff(coarse);
    let fine_gap = fine.max_abs_diff(mid);
    OrderEstimate {
        dt_fine: f64::NAN,
        coarse_gap,
        fine_gap,
        order: (coarse_gap / fine_gap).ln() / ratio.ln(),
    }
}

/// Check that `dts` holds at least three values forming a geometric ladder and
/// return them coarsest first together with the refinement ratio.
pub fn ladder(dts: &[f64]) -> Result<(Vec<f64>, f64)> {
    if dts.len() < 3 {
        return Err(Error::Validation(format!(
            "need >= 3 dt values for an order estimate, got {}",
            dts.len()
        )));
    }
    let mut sorted = dts.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let ratio = sorted[0] / sorted[1];
    if !(ratio.is_finite() && ratio > 1.0) {
        return Err(Error::Validation(
            "dt ladder values must be distinct and positive".into(),
        ));
    }
    for w in sorted.windows(2) {
        let r = w[0] / w[1];
        if (r - ratio).abs() > 1e-9 * ratio {
            return Err(Error::Validation(format!(
                "dt ladder is not geometric: ratios {ratio} and {r}"
            )));
        }
    }
    Ok((sorted, ratio))
}

pub fn convergence_study(base: &SimulationConfig, dts: &[f64]) -> Result<ConvergenceStudy> {
    let (dts, ratio) = ladder(dts)?;
    let finals = dts
        .iter()
        .map(|&dt| {
            run_simulation(&base.with_dt(dt))
                .map(|r| r.final_snapshot().temperatures.clone())
                .map_err(|e| e.labeled(format!("scheme {}, dt {dt}", base.scheme)))
        })
        .collect::<Result<Vec<_>>>()?;
    let estimates = finals
        .windows(3)
        .zip(dts.windows(3))
        .map(|(f, h)| OrderEstimate {
            dt_fine: h[2],
            ..richardson_order(&f[0], &f[1], &f[2], ratio)
        })
        .collect();
    Ok(ConvergenceStudy {
        dts,
        ratio,
        estimates,
        finals,
    })
}
