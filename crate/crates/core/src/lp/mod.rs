//! LP data model, the simplex solver, problem builders and test oracles.

pub mod alternates;
pub mod builders;
pub mod distance;
pub mod energy;
pub mod graph;
pub mod model;
pub mod oracle;
pub mod simplex;

pub use alternates::enumerate_alternate_optima;
pub use builders::{build_assignment_lp, build_shortest_path_lp, to_matrix};
pub use distance::{round_code, shd};
pub use energy::{build_energy_lp, EnergyLayout, EnergyParams, EnergyProfiles, EnergySummary};
pub use graph::{Edge, Graph};
pub use model::{dot, Bounds, LinearProgram, Sense, Solution, Status, INTEGRALITY_TOL, TAU_FEAS, TAU_OPT};
pub use oracle::{brute_force_assignment, brute_force_paths};
pub use simplex::solve;

use crate::error::{Error, Result};

/// Anything that returns `x*(w)` for an LP.
pub trait LinearSolver: Send + Sync {
    fn name(&self) -> &str;
    fn solve(&self, lp: &LinearProgram) -> Result<Solution>;
}

/// The dense simplex in [`simplex`].
#[derive(Clone, Copy, Debug, Default)]
pub struct SimplexSolver;

impl LinearSolver for SimplexSolver {
    fn name(&self) -> &str {
        "simplex"
    }

    fn solve(&self, lp: &LinearProgram) -> Result<Solution> {
        solve(lp)
    }
}

/// Reads `w` as a square row-major assignment matrix and enumerates
/// permutations. Ignores the LP's rows, so only use it on assignment LPs.
#[derive(Clone, Copy, Debug, Default)]
pub struct AssignmentEnumerator;

impl LinearSolver for AssignmentEnumerator {
    fn name(&self) -> &str {
        "assignment-enumerator"
    }

    fn solve(&self, lp: &LinearProgram) -> Result<Solution> {
        let k = lp.num_vars();
        let n = (k as f64).sqrt().round() as usize;
        if n * n != k {
            return Err(Error::config(format!("{k} variables do not form a square assignment matrix")));
        }
        brute_force_assignment(&to_matrix(&lp.w, n), lp.sense)
    }
}
