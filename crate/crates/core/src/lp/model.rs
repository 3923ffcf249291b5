use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Feasibility tolerance on constraint residuals.
pub const TAU_FEAS: f64 = 1e-8;
/// Optimality tolerance on reduced costs.
pub const TAU_OPT: f64 = 1e-8;
/// Distance from {0, 1} accepted when reading a solution as a binary code.
pub const INTEGRALITY_TOL: f64 = 1e-7;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sense {
    Maximize,
    Minimize,
}

/// Variable bounds; `None` is unbounded on that side.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub lower: Option<f64>,
    pub upper: Option<f64>,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds { lower: Some(0.0), upper: None }
    }
}

impl Bounds {
    pub fn new(lower: f64, upper: f64) -> Self {
        Bounds { lower: Some(lower), upper: Some(upper) }
    }

    pub fn lo(&self) -> f64 {
        self.lower.unwrap_or(f64::NEG_INFINITY)
    }

    pub fn hi(&self) -> f64 {
        self.upper.unwrap_or(f64::INFINITY)
    }
}

/// `opt <w, x>` subject to `A_ub x <= b_ub`, `A_eq x = b_eq` and per-variable bounds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearProgram {
    pub sense: Sense,
    pub w: Vec<f64>,
    #[serde(default)]
    pub a_ub: Vec<Vec<f64>>,
    #[serde(default)]
    pub b_ub: Vec<f64>,
    #[serde(default)]
    pub a_eq: Vec<Vec<f64>>,
    #[serde(default)]
    pub b_eq: Vec<f64>,
    #[serde(default)]
    pub bounds: Vec<Bounds>,
    #[serde(default)]
    pub labels: Vec<String>,
}

impl LinearProgram {
    /// An LP with `k` variables at default bounds `[0, inf)` and no rows.
    pub fn new(sense: Sense, w: Vec<f64>) -> Self {
        let k = w.len();
        LinearProgram {
            sense,
            w,
            a_ub: Vec::new(),
            b_ub: Vec::new(),
            a_eq: Vec::new(),
            b_eq: Vec::new(),
            bounds: vec![Bounds::default(); k],
            labels: (0..k).map(|j| format!("x[{j}]")).collect(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.w.len()
    }

    pub fn add_le(&mut self, row: Vec<f64>, rhs: f64) {
        self.a_ub.push(row);
        self.b_ub.push(rhs);
    }

    pub fn add_eq(&mut self, row: Vec<f64>, rhs: f64) {
        self.a_eq.push(row);
        self.b_eq.push(rhs);
    }

    /// Same constraints, different cost vector.
    pub fn with_costs(&self, w: Vec<f64>) -> Result<Self> {
        if w.len() != self.num_vars() {
            return Err(Error::config(format!(
                "cost vector has length {}, LP has {} variables",
                w.len(),
                self.num_vars()
            )));
        }
        Ok(LinearProgram { w, ..self.clone() })
    }

    pub fn validate(&self) -> Result<()> {
        let k = self.num_vars();
        if k == 0 {
            return Err(Error::config("LP has no variables"));
        }
        if self.w.iter().any(|v| !v.is_finite()) {
            return Err(Error::config("cost vector contains non-finite entries"));
        }
        for (name, rows, rhs) in [("A_ub", &self.a_ub, &self.b_ub), ("A_eq", &self.a_eq, &self.b_eq)] {
            if rows.len() != rhs.len() {
                return Err(Error::config(format!(
                    "{name} has {} rows but its right-hand side has {}",
                    rows.len(),
                    rhs.len()
                )));
            }
            for (i, row) in rows.iter().enumerate() {
                if row.len() != k {
                    return Err(Error::config(format!("{name} row {i} has width {}, expected {k}", row.len())));
                }
                if row.iter().any(|v| !v.is_finite()) || !rhs[i].is_finite() {
                    return Err(Error::config(format!("{name} row {i} contains non-finite entries")));
                }
            }
        }
        if self.bounds.len() != k {
            return Err(Error::config(format!("{} bounds for {k} variables", self.bounds.len())));
        }
        for (j, b) in self.bounds.iter().enumerate() {
            if b.lower.is_some_and(|v| !v.is_finite()) || b.upper.is_some_and(|v| !v.is_finite()) {
                return Err(Error::config(format!("bounds of variable {j} must be finite or null")));
            }
            if b.lo() > b.hi() {
                return Err(Error::config(format!("variable {j}: lower bound exceeds upper bound")));
            }
        }
        if !self.labels.is_empty() && self.labels.len() != k {
            return Err(Error::config(format!("{} labels for {k} variables", self.labels.len())));
        }
        Ok(())
    }

    pub fn objective(&self, x: &[f64]) -> f64 {
        dot(&self.w, x)
    }

    /// Largest constraint or bound violation of `x` (0 when feasible).
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for (row, b) in self.a_eq.iter().zip(&self.b_eq) {
            worst = worst.max((dot(row, x) - b).abs());
        }
        for (row, b) in self.a_ub.iter().zip(&self.b_ub) {
            worst = worst.max(dot(row, x) - b);
        }
        for (xj, bj) in x.iter().zip(&self.bounds) {
            worst = worst.max(bj.lo() - xj).max(xj - bj.hi());
        }
        worst
    }

    pub fn label(&self, j: usize) -> String {
        self.labels.get(j).cloned().unwrap_or_else(|| format!("x[{j}]"))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let lp: LinearProgram = serde_json::from_str(text)?;
        let lp = lp.with_default_bounds();
        lp.validate()?;
        Ok(lp)
    }

    pub fn load(path: &Path) -> Result<Self> {
        LinearProgram::from_json(&std::fs::read_to_string(path)?)
    }

    fn with_default_bounds(mut self) -> Self {
        if self.bounds.is_empty() {
            self.bounds = vec![Bounds::default(); self.w.len()];
        }
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub status: Status,
    pub x: Vec<f64>,
    pub objective: f64,
    /// Reduced costs of the original variables at the returned basis, in the
    /// sense of the LP: non-positive at a maximum, non-negative at a minimum.
    /// Empty when the solution comes from an enumeration oracle.
    #[serde(default)]
    pub reduced_costs: Vec<f64>,
    /// Original variables that are basic at the returned vertex.
    #[serde(default)]
    pub basis: Vec<usize>,
}

impl Solution {
    pub fn is_optimal(&self) -> bool {
        self.status == Status::Optimal
    }

    pub(crate) fn non_optimal(status: Status, k: usize) -> Self {
        Solution { status, x: vec![0.0; k], objective: f64::NAN, reduced_costs: Vec::new(), basis: Vec::new() }
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
