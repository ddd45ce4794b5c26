use std::fmt;

use crate::linalg::Norms;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Validation(String),

    #[error("diffusivity undefined at node {node}: T = {temperature} with exponent {exponent}")]
    Domain {
        node: usize,
        temperature: f64,
        exponent: f64,
    },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("singular tridiagonal system: pivot {pivot:e} at row {row}")]
    Singular { row: usize, pivot: f64 },

    #[error("BiCGSTAB breakdown at iteration {iteration}: {quantity} vanished")]
    Breakdown {
        iteration: usize,
        quantity: &'static str,
    },

    #[error(
        "BiCGSTAB did not converge in {iterations} iterations (relative residual {residual:e})"
    )]
    LinearNonConvergence { iterations: usize, residual: f64 },

    #[error(
        "Newton did not converge in {iterations} iterations (residual {residual}, relative change {change})"
    )]
    NewtonNonConvergence {
        iterations: usize,
        residual: Norms,
        change: Norms,
    },

    #[error("fixed-point iteration did not converge in {iterations} iterations (relative change {change:e})")]
    FixedPointNonConvergence { iterations: usize, change: f64 },

    #[error("step {step} (t = {time}): {source}")]
    AtStep {
        step: usize,
        time: f64,
        source: Box<Error>,
    },

    #[error("{label}: {source}")]
    Labeled { label: String, source: Box<Error> },
}

/// Coarse classification used for process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Validation,
    Solver,
}

impl Error {
    pub fn at_step(self, step: usize, time: f64) -> Self {
        Error::AtStep {
            step,
            time,
            source: Box::new(self),
        }
    }

    pub fn labeled(self, label: impl fmt::Display) -> Self {
        Error::Labeled {
            label: label.to_string(),
            source: Box::new(self),
        }
    }

    /// Innermost error with step/label wrappers removed.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtStep { source, .. } | Error::Labeled { source, .. } => source.root(),
            other => other,
        }
    }

    pub fn kind(&self) -> ErrorKind {
        match self.root() {
            Error::Validation(_) | Error::Dimension(_) => ErrorKind::Validation,
            _ => ErrorKind::Solver,
        }
    }
}
