use std::ops::Index;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform grid on `[0, 1]` with both boundary nodes included.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid1D {
    nodes: usize,
    dx: f64,
}

impl Grid1D {
    pub fn new(nodes: usize) -> Result<Self> {
        if nodes < 3 {
            return Err(Error::Validation(format!(
                "nodes must be >= 3, got {nodes}"
            )));
        }
        Ok(Self {
            nodes,
            dx: 1.0 / (nodes - 1) as f64,
        })
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn interior(&self) -> usize {
        self.nodes - 2
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    /// Node position; the last node is exactly 1.
    pub fn position(&self, k: usize) -> f64 {
        assert!(k < self.nodes, "node {k} out of range");
        if k == self.nodes - 1 {
            1.0
        } else {
            k as f64 * self.dx
        }
    }

    pub fn positions(&self) -> Vec<f64> {
        (0..self.nodes).map(|k| self.position(k)).collect()
    }
}

/// Nodal temperatures at one time level, boundary nodes included.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TemperatureField(Vec<f64>);

impl TemperatureField {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 3 {
            return Err(Error::Dimension(format!(
                "a field needs at least 3 nodes, got {}",
                values.len()
            )));
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Validation(format!(
                "temperature at node {k} is not finite"
            )));
        }
        Ok(Self(values))
    }

    pub fn uniform(nodes: usize, value: f64) -> Result<Self> {
        Self::new(vec![value; nodes])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn interior(&self) -> &[f64] {
        &self.0[1..self.0.len() - 1]
    }

    pub fn into_values(self) -> Vec<f64> {
        self.0
    }

    /// Build a field from interior values and the two boundary temperatures.
    pub(crate) fn from_interior(interior: &[f64], left: f64, right: f64) -> Self {
        let mut v = Vec::with_capacity(interior.len() + 2);
        v.push(left);
        v.extend_from_slice(interior);
        v.push(right);
        Self(v)
    }

    /// Same values with the end nodes overwritten.
    pub fn with_boundaries(&self, left: f64, right: f64) -> Self {
        Self::from_interior(self.interior(), left, right)
    }

    /// Node order reversed, `k -> N - 1 - k`.
    pub fn mirrored(&self) -> Self {
        Self(self.0.iter().rev().copied().collect())
    }

    pub fn min(&self) -> f64 {
        self.0.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.0.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn max_abs_diff(&self, other: &TemperatureField) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    pub fn diff(&self, other: &TemperatureField) -> Vec<f64> {
        self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect()
    }
}

impl Index<usize> for TemperatureField {
    type Output = f64;

    fn index(&self, k: usize) -> &f64 {
        &self.0[k]
    }
}
