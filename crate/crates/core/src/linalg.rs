//! Tridiagonal systems, the Thomas and BiCGSTAB solvers, and vector norms.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Magnitude below which a pivot or Krylov scalar counts as zero.
pub const BREAKDOWN_THRESHOLD: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NormKind {
    One,
    Two,
    Infinity,
}

impl NormKind {
    pub const ALL: [NormKind; 3] = [NormKind::One, NormKind::Two, NormKind::Infinity];
}

pub fn vector_norm(v: &[f64], kind: NormKind) -> f64 {
    match kind {
        NormKind::One => v.iter().map(|x| x.abs()).sum(),
        NormKind::Two => v.iter().map(|x| x * x).sum::<f64>().sqrt(),
        NormKind::Infinity => v.iter().fold(0.0, |m, x| m.max(x.abs())),
    }
}

/// The 1-, 2- and infinity-norms of one vector.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Norms {
    pub one: f64,
    pub two: f64,
    pub inf: f64,
}

impl Norms {
    pub fn of(v: &[f64]) -> Self {
        Self {
            one: vector_norm(v, NormKind::One),
            two: vector_norm(v, NormKind::Two),
            inf: vector_norm(v, NormKind::Infinity),
        }
    }

    pub fn get(&self, kind: NormKind) -> f64 {
        match kind {
            NormKind::One => self.one,
            NormKind::Two => self.two,
            NormKind::Infinity => self.inf,
        }
    }

    /// True when every norm is strictly below `tol`.
    pub fn all_below(&self, tol: f64) -> bool {
        self.one < tol && self.two < tol && self.inf < tol
    }
}

impl fmt::Display for Norms {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[1: {:e}, 2: {:e}, inf: {:e}]",
            self.one, self.two, self.inf
        )
    }
}

/// Square tridiagonal matrix stored by bands.
///
/// `lower[i]` sits at `(i + 1, i)` and `upper[i]` at `(i, i + 1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TridiagonalSystem {
    lower: Vec<f64>,
    diag: Vec<f64>,
    upper: Vec<f64>,
}

impl TridiagonalSystem {
    pub fn new(lower: Vec<f64>, diag: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        let m = diag.len();
        if m == 0 {
            return Err(Error::Dimension(
                "tridiagonal system must be non-empty".into(),
            ));
        }
        if lower.len() != m - 1 || upper.len() != m - 1 {
            return Err(Error::Dimension(format!(
                "bands of size {m} system must have length {}, got lower {} and upper {}",
                m - 1,
                lower.len(),
                upper.len()
            )));
        }
        if !lower
            .iter()
            .chain(&diag)
            .chain(&upper)
            .all(|x| x.is_finite())
        {
            return Err(Error::Dimension(
                "tridiagonal entries must be finite".into(),
            ));
        }
        Ok(Self { lower, diag, upper })
    }

    pub fn identity(m: usize) -> Self {
        assert!(m > 0, "identity of size 0");
        Self {
            lower: vec![0.0; m - 1],
            diag: vec![1.0; m],
            upper: vec![0.0; m - 1],
        }
    }

    pub fn size(&self) -> usize {
        self.diag.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    /// Entry `(row, col)`, zero outside the three bands.
    pub fn get(&self, row: usize, col: usize) -> f64 {
        if row == col {
            self.diag[row]
        } else if row == col + 1 {
            self.lower[col]
        } else if col == row + 1 {
            self.upper[row]
        } else {
            0.0
        }
    }

    /// Strict row-wise diagonal dominance.
    pub fn is_strictly_diagonally_dominant(&self) -> bool {
        (0..self.size()).all(|i| {
            let mut off = 0.0;
            if i > 0 {
                off += self.lower[i - 1].abs();
            }
            if i + 1 < self.size() {
                off += self.upper[i].abs();
            }
            self.diag[i].abs() > off
        })
    }

    /// Positive diagonal, non-positive off-diagonals and strict dominance.
    pub fn is_m_matrix_structured(&self) -> bool {
        self.diag.iter().all(|&d| d > 0.0)
            && self.lower.iter().chain(&self.upper).all(|&o| o <= 0.0)
            && self.is_strictly_diagonally_dominant()
    }

    fn check_len(&self, v: &[f64], what: &str) -> Result<()> {
        if v.len() != self.size() {
            return Err(Error::Dimension(format!(
                "{what} has length {}, system size is {}",
                v.len(),
                self.size()
            )));
        }
        Ok(())
    }
}

pub fn tridiagonal_matvec(system: &TridiagonalSystem, v: &[f64]) -> Result<Vec<f64>> {
    system.check_len(v, "vector")?;
    let mut out = vec![0.0; v.len()];
    matvec_into(system, v, &mut out);
    Ok(out)
}

fn matvec_into(a: &TridiagonalSystem, v: &[f64], out: &mut [f64]) {
    let m = a.size();
    for i in 0..m {
        let mut s = a.diag[i] * v[i];
        if i > 0 {
            s += a.lower[i - 1] * v[i - 1];
        }
        if i + 1 < m {
            s += a.upper[i] * v[i + 1];
        }
        out[i] = s;
    }
}

/// Thomas algorithm (tridiagonal Gaussian elimination without pivoting).
pub fn thomas_solve(system: &TridiagonalSystem, rhs: &[f64]) -> Result<Vec<f64>> {
    system.check_len(rhs, "right-hand side")?;
    let m = system.size();
    let (a, b, c) = (&system.lower, &system.diag, &system.upper);

    let mut c_star = vec![0.0; m];
    let mut x = vec![0.0; m];

    let mut pivot = b[0];
    if pivot.abs() < BREAKDOWN_THRESHOLD {
        return Err(Error::Singular { row: 0, pivot });
    }
    if m > 1 {
        c_star[0] = c[0] / pivot;
    }
    x[0] = rhs[0] / pivot;
    for i in 1..m {
        pivot = b[i] - a[i - 1] * c_star[i - 1];
        if pivot.abs() < BREAKDOWN_THRESHOLD {
            return Err(Error::Singular { row: i, pivot });
        }
        if i + 1 < m {
            c_star[i] = c[i] / pivot;
        }
        x[i] = (rhs[i] - a[i - 1] * x[i - 1]) / pivot;
    }
    for i in (0..m - 1).rev() {
        x[i] -= c_star[i] * x[i + 1];
    }
    Ok(x)
}

#[derive(Debug, Clone, PartialEq)]
pub struct KrylovSolution {
    pub solution: Vec<f64>,
    pub iterations: usize,
    /// Final relative (or absolute, for a zero right-hand side) residual.
    pub residual: f64,
}

fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

/// Unpreconditioned BiCGSTAB.
///
/// Converged when `||rhs - A x||_2 / ||rhs||_2 <= tol`, or when the absolute
/// residual is `<= tol` for a zero right-hand side. `max_iters` defaults to
/// ten times the system size.
pub fn bicgstab_solve(
    system: &TridiagonalSystem,
    rhs: &[f64],
    x0: &[f64],
    tol: f64,
    max_iters: Option<usize>,
) -> Result<KrylovSolution> {
    system.check_len(rhs, "right-hand side")?;
    system.check_len(x0, "initial guess")?;
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::Validation(format!(
            "BiCGSTAB tolerance must be > 0, got {tol}"
        )));
    }
    let m = system.size();
    let max_iters = max_iters.unwrap_or(10 * m);

    let rhs_norm = vector_norm(rhs, NormKind::Two);
    let scale = if rhs_norm > 0.0 { rhs_norm } else { 1.0 };

    let mut x = x0.to_vec();
    let mut r = vec![0.0; m];
    matvec_into(system, &x, &mut r);
    for (ri, bi) in r.iter_mut().zip(rhs) {
        *ri = bi - *ri;
    }
    let mut residual = vector_norm(&r, NormKind::Two) / scale;
    if residual <= tol {
        return Ok(KrylovSolution {
            solution: x,
            iterations: 0,
            residual,
        });
    }

    let r_hat = r.clone();
    let mut p = vec![0.0; m];
    let mut v = vec![0.0; m];
    let mut s = vec![0.0; m];
    let mut t = vec![0.0; m];
    let (mut rho, mut alpha, mut omega) = (1.0, 1.0, 1.0);

    for iteration in 1..=max_iters {
        let rho_next = dot(&r_hat, &r);
        if rho_next.abs() < BREAKDOWN_THRESHOLD {
            return Err(Error::Breakdown {
                iteration,
                quantity: "rho",
            });
        }
        let beta = (rho_next / rho) * (alpha / omega);
        rho = rho_next;
        for i in 0..m {
            p[i] = r[i] + beta * (p[i] - omega * v[i]);
        }
        matvec_into(system, &p, &mut v);
        let denom = dot(&r_hat, &v);
        if denom.abs() < BREAKDOWN_THRESHOLD {
            return Err(Error::Breakdown {
                iteration,
                quantity: "<r_hat, v>",
            });
        }
        alpha = rho / denom;
        for i in 0..m {
            s[i] = r[i] - alpha * v[i];
        }
        let s_norm = vector_norm(&s, NormKind::Two) / scale;
        if s_norm <= tol {
            for i in 0..m {
                x[i] += alpha * p[i];
            }
            return Ok(KrylovSolution {
                solution: x,
                iterations: iteration,
                residual: s_norm,
            });
        }
        matvec_into(system, &s, &mut t);
        let tt = dot(&t, &t);
        if tt < BREAKDOWN_THRESHOLD {
            return Err(Error::Breakdown {
                iteration,
                quantity: "<t, t>",
            });
        }
        omega = dot(&t, &s) / tt;
        for i in 0..m {
            x[i] += alpha * p[i] + omega * s[i];
            r[i] = s[i] - omega * t[i];
        }
        residual = vector_norm(&r, NormKind::Two) / scale;
        if residual <= tol {
            return Ok(KrylovSolution {
                solution: x,
                iterations: iteration,
                residual,
            });
        }
        if omega.abs() < BREAKDOWN_THRESHOLD {
            return Err(Error::Breakdown {
                iteration,
                quantity: "omega",
            });
        }
    }
    Err(Error::LinearNonConvergence {
        iterations: max_iters,
        residual,
    })
}

/// Which linear solver backs every tridiagonal solve of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum LinearSolverKind {
    #[default]
    Thomas,
    BiCgStab,
}

impl LinearSolverKind {
    pub fn name(&self) -> &'static str {
        match self {
            LinearSolverKind::Thomas => "thomas",
            LinearSolverKind::BiCgStab => "bicgstab",
        }
    }
}

/// Solve with the selected backend, returning the solution and the number of
/// Krylov iterations (zero for Thomas).
pub fn solve(
    kind: LinearSolverKind,
    system: &TridiagonalSystem,
    rhs: &[f64],
    x0: &[f64],
    bicgstab_tol: f64,
) -> Result<(Vec<f64>, usize)> {
    match kind {
        LinearSolverKind::Thomas => thomas_solve(system, rhs).map(|x| (x, 0)),
        LinearSolverKind::BiCgStab => {
            bicgstab_solve(system, rhs, x0, bicgstab_tol, None).map(|s| (s.solution, s.iterations))
        }
    }
}
