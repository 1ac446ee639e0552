//! Capacity-expansion and dispatch LP for studying storage cycling under
//! renewable-share constraints.
//!
//! [`model`] holds the scenario types, [`formulation`] turns a scenario into
//! an LP, [`lp`] solves it, [`analysis`] inspects the solution and
//! [`harness`] runs the experiment structure (sweeps, calibration, factor
//! separation, oracles). [`io`] reads configs and writes result files.

pub mod analysis;
pub mod error;
pub mod formulation;
pub mod harness;
pub mod io;
pub mod lp;
pub mod model;

pub use error::{Error, Result};
pub use formulation::{build_lp, solve_scenario, ModelRun, VarLayout};
pub use lp::{LpProblem, Solution, SolverOptions, Status};
pub use model::{PolicyKind, PolicySpec, Scenario, Slcr, Storage, TechClass, Technology, Variant};
