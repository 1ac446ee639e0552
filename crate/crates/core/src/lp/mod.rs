//! Linear programming backend: problem container, an embedded revised
//! simplex solver returning primal and dual values, KKT verification and an
//! MPS writer for cross-checking with external solvers.

mod kkt;
mod lu;
mod mps;
mod problem;
mod simplex;

pub use kkt::{check_kkt, KktReport};
pub use mps::{to_mps_string, write_mps, MpsStyle};
pub use problem::{LpProblem, Row, RowId, Sense, VarId, VarIndex};
pub use simplex::RevisedSimplex;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LpError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
    #[error("simplex stalled after {iterations} iterations")]
    Stalled { iterations: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Optimal,
    Infeasible,
    Unbounded,
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Status::Optimal => "optimal",
            Status::Infeasible => "infeasible",
            Status::Unbounded => "unbounded",
        })
    }
}

/// Primal/dual solution of an [`LpProblem`].
///
/// Duals follow the minimization convention `c_j = Σ_i a_ij y_i + d_j`:
/// a binding `>=` row has `y_i >= 0`, a binding `<=` row `y_i <= 0`, and
/// `y_i` is the objective change per unit increase of the row's rhs.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub status: Status,
    pub objective: f64,
    pub primal: Vec<f64>,
    pub dual: Vec<f64>,
    pub reduced_costs: Vec<f64>,
    pub iterations: usize,
}

impl Solution {
    pub fn is_optimal(&self) -> bool {
        self.status == Status::Optimal
    }

    pub fn value(&self, var: VarId) -> f64 {
        self.primal[var.0]
    }

    pub fn row_dual(&self, row: RowId) -> f64 {
        self.dual[row.0]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverOptions {
    /// Primal feasibility tolerance, relative to `1 + |bound|`.
    pub feas_tol: f64,
    /// Dual feasibility tolerance, relative to the largest cost coefficient.
    pub opt_tol: f64,
    /// Pivots between fresh LU factorizations.
    pub refactor_interval: usize,
    /// Consecutive degenerate pivots before switching to Bland's rule.
    pub degenerate_limit: usize,
    /// Hard iteration cap; `None` derives one from the problem size.
    pub max_iterations: Option<usize>,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            feas_tol: 1e-7,
            opt_tol: 1e-8,
            refactor_interval: 100,
            degenerate_limit: 200,
            max_iterations: None,
        }
    }
}

/// Pluggable LP solver. The embedded [`RevisedSimplex`] is the reference
/// implementation; external solvers can be slotted in behind this trait.
pub trait LpSolver: Send + Sync {
    fn solve(&self, problem: &LpProblem) -> Result<Solution, LpError>;
}

/// Solves `problem` with the embedded revised simplex.
pub fn solve(problem: &LpProblem, feas_tol: f64, opt_tol: f64) -> Result<Solution, LpError> {
    let opts = SolverOptions {
        feas_tol,
        opt_tol,
        ..SolverOptions::default()
    };
    RevisedSimplex::new(opts).solve(problem)
}
