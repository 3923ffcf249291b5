//! Hidden confounder attacks on linear programs.
//!
//! The crate is organized bottom-up:
//!
//! - [`scm`]: semi-Markovian structural causal models, seeded sampling and the
//!   per-unit confounder projection an adversary uses.
//! - [`lp`]: the LP data model, a dense two-phase simplex solver, problem
//!   builders (assignment, shortest path, household energy), enumeration
//!   oracles, alternate-optimum enumeration and solution distances.
//! - [`dpo`]: the perturbed (smoothed) argmax and its gradient estimators.
//! - [`hca`]: integral parameterizations, confounder lifts, the attack loop,
//!   assumption diagnostics and existence witnesses.
//! - [`scenarios`]: bundled end-to-end runs, selected by name through
//!   [`scenarios::Registry`].

pub mod dpo;
pub mod error;
pub mod hca;
pub mod io;
pub mod lp;
pub mod rng;
pub mod scenarios;
pub mod scm;

pub use error::{Error, Result};

/// Crate version, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
