//! Temperature-dependent diffusivity `D(T) = gamma * T^a` and the internodal
//! averaging rule shared by every scheme.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest integer exponent evaluated by repeated multiplication.
const MAX_INTEGER_FAST_PATH: f64 = 16.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiffusivityLaw {
    gamma: f64,
    exponent: f64,
}

impl DiffusivityLaw {
    pub fn new(gamma: f64, exponent: f64) -> Result<Self> {
        if !(gamma.is_finite() && gamma > 0.0) {
            return Err(Error::Validation(format!("gamma must be > 0, got {gamma}")));
        }
        if !exponent.is_finite() {
            return Err(Error::Validation(format!(
                "exponent must be finite, got {exponent}"
            )));
        }
        Ok(Self { gamma, exponent })
    }

    /// Radiation-transfer law, `gamma = 1`, `a = 3`.
    pub fn radiative() -> Self {
        Self {
            gamma: 1.0,
            exponent: 3.0,
        }
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn exponent(&self) -> f64 {
        self.exponent
    }

    pub fn is_linear(&self) -> bool {
        self.exponent == 0.0
    }

    /// `gamma * T^a`.
    pub fn nodal(&self, temperature: f64) -> Result<f64> {
        Ok(self.gamma
            * power(temperature, self.exponent).ok_or(Error::Domain {
                node: 0,
                temperature,
                exponent: self.exponent,
            })?)
    }

    /// `T^a` for every value, without the prefactor.
    pub fn powers(&self, temperatures: &[f64]) -> Result<Vec<f64>> {
        self.powers_with(temperatures, self.exponent)
    }

    /// `T^e` for every value, for an arbitrary exponent `e` (used for `T^(a-1)`).
    pub(crate) fn powers_with(&self, temperatures: &[f64], exponent: f64) -> Result<Vec<f64>> {
        temperatures
            .iter()
            .enumerate()
            .map(|(node, &t)| {
                power(t, exponent).ok_or(Error::Domain {
                    node,
                    temperature: t,
                    exponent,
                })
            })
            .collect()
    }
}

impl Default for DiffusivityLaw {
    fn default() -> Self {
        Self::radiative()
    }
}

/// `t^exponent`, or `None` where the power is not real-valued and finite.
///
/// Small integer exponents use repeated multiplication; everything else goes
/// through `exp(a ln t)`, which requires `t > 0`.
pub fn power(t: f64, exponent: f64) -> Option<f64> {
    if !t.is_finite() {
        return None;
    }
    let integral = exponent.fract() == 0.0 && exponent.abs() <= MAX_INTEGER_FAST_PATH;
    let value = if integral {
        if exponent < 0.0 && t == 0.0 {
            return None;
        }
        t.powi(exponent as i32)
    } else {
        if t <= 0.0 {
            return None;
        }
        power_general(t, exponent)
    };
    value.is_finite().then_some(value)
}

/// `exp(a ln t)` for `t > 0`.
pub fn power_general(t: f64, exponent: f64) -> f64 {
    (exponent * t.ln()).exp()
}

/// Arithmetic mean of two nodal diffusivities.
#[inline]
pub fn internodal(d_left: f64, d_right: f64) -> f64 {
    0.5 * (d_left + d_right)
}

/// Nodal diffusivity of every entry of `temperatures`.
pub fn profile(law: &DiffusivityLaw, temperatures: &[f64]) -> Result<Vec<f64>> {
    Ok(law
        .powers(temperatures)?
        .into_iter()
        .map(|p| law.gamma * p)
        .collect())
}
