//! The attack engine: integral parameterizations, confounder lifts, the
//! FGSM-style cost attack, assumption checks and end-to-end witnesses.

mod assumptions;
mod attack;
mod witness;

pub use assumptions::{verify_assumptions, AssumptionDiagnostics, Finding};
pub use attack::{attack, attack_with, AttackConfig, AttackReport, Direction, StepRule};
pub use witness::{hca_witness, ScenarioBundle, WitnessOutcome};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lp::{build_assignment_lp, build_shortest_path_lp, round_code, to_matrix, Graph, LinearProgram, Sense};
use crate::scm::{AdversaryView, DataSet, HEALTH, PRIORITY, WEALTH};

const INVERSE_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProblemFamily {
    LinearAssignment,
    ShortestPath,
    /// Hand-written lift for an arbitrary LP.
    Generic,
}

/// Unit-level decomposition of a cost vector.
///
/// Unit `i` owns the cost indices `index_sets[i]`. Its record is recovered
/// from that slice of `w` through a per-dataset table. `active_sets[i]` are
/// the indices whose selection in a 0/1 code means unit `i` is served.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegralParamMap {
    pub family: ProblemFamily,
    pub dim: usize,
    pub fields: Vec<String>,
    pub index_sets: Vec<Vec<usize>>,
    pub active_sets: Vec<Vec<usize>>,
    /// `(slice, record)` per unit.
    pub inverse: Vec<(Vec<f64>, Vec<f64>)>,
}

impl IntegralParamMap {
    pub fn num_units(&self) -> usize {
        self.index_sets.len()
    }

    pub fn slice(&self, unit: usize, w: &[f64]) -> Vec<f64> {
        self.index_sets[unit].iter().map(|&j| w[j]).collect()
    }

    /// The record of `unit`, if `slice` is the slice it was built from.
    pub fn invert(&self, unit: usize, slice: &[f64]) -> Option<&[f64]> {
        let (stored, record) = self.inverse.get(unit)?;
        let same = stored.len() == slice.len() && stored.iter().zip(slice).all(|(a, b)| (a - b).abs() <= INVERSE_TOL);
        same.then_some(record.as_slice())
    }

    pub fn is_disjoint(&self) -> bool {
        let mut owner = vec![false; self.dim];
        for set in &self.index_sets {
            for &j in set {
                if j >= self.dim || owner[j] {
                    return false;
                }
                owner[j] = true;
            }
        }
        true
    }
}

/// A rule `phi` turning a dataset into an LP cost vector.
pub trait Parameterization: Send + Sync {
    fn family(&self) -> ProblemFamily;
    /// Dataset fields the rule reads.
    fn input_fields(&self) -> Vec<String>;
    fn parameterize(&self, dataset: &DataSet) -> Result<(Vec<f64>, IntegralParamMap)>;
    /// The LP whose costs are `w`.
    fn build_lp(&self, w: &[f64]) -> Result<LinearProgram>;
}

pub fn parameterize(dataset: &DataSet, policy: &dyn Parameterization) -> Result<(Vec<f64>, IntegralParamMap)> {
    if dataset.is_empty() {
        return Err(Error::config("cannot parameterize an empty dataset"));
    }
    policy.parameterize(dataset)
}

fn records(dataset: &DataSet, fields: &[String]) -> Result<Vec<Vec<f64>>> {
    let idx: Vec<usize> = fields.iter().map(|f| dataset.field_index(f)).collect::<Result<_>>()?;
    Ok(dataset.units.iter().map(|u| idx.iter().map(|&j| u.values[j]).collect()).collect())
}

/// Vaccine allocation: worker `i` is a person, job `b` a vaccination spot.
/// Suitability `alpha (1 - h) + beta p` (plus `wealth_weight * W` when set) on
/// real spots and 0 on the dummy spots that square the matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VaccinationPolicy {
    pub alpha: f64,
    pub beta: f64,
    pub wealth_weight: Option<f64>,
    pub n_spots: usize,
}

impl Default for VaccinationPolicy {
    fn default() -> Self {
        VaccinationPolicy { alpha: 1.0, beta: 1.0, wealth_weight: None, n_spots: 10 }
    }
}

impl VaccinationPolicy {
    /// Suitability of a record laid out as [`Parameterization::input_fields`].
    pub fn score(&self, record: &[f64]) -> f64 {
        let base = self.alpha * (1.0 - record[0]) + self.beta * record[1];
        match self.wealth_weight {
            Some(g) => base + g * record[2],
            None => base,
        }
    }
}

impl Parameterization for VaccinationPolicy {
    fn family(&self) -> ProblemFamily {
        ProblemFamily::LinearAssignment
    }

    fn input_fields(&self) -> Vec<String> {
        let mut f = vec![HEALTH.to_string(), PRIORITY.to_string()];
        if self.wealth_weight.is_some() {
            f.push(WEALTH.to_string());
        }
        f
    }

    fn parameterize(&self, dataset: &DataSet) -> Result<(Vec<f64>, IntegralParamMap)> {
        let n = dataset.len();
        if self.n_spots == 0 || self.n_spots > n {
            return Err(Error::config(format!("n_spots must lie in 1..={n} (people), got {}", self.n_spots)));
        }
        let fields = self.input_fields();
        let recs = records(dataset, &fields)?;
        let mut w = vec![0.0; n * n];
        let mut index_sets = Vec::with_capacity(n);
        let mut active_sets = Vec::with_capacity(n);
        let mut inverse = Vec::with_capacity(n);
        for (i, rec) in recs.into_iter().enumerate() {
            let s = self.score(&rec);
            w[i * n..i * n + self.n_spots].iter_mut().for_each(|v| *v = s);
            index_sets.push((i * n..(i + 1) * n).collect());
            active_sets.push((i * n..i * n + self.n_spots).collect());
            inverse.push((w[i * n..(i + 1) * n].to_vec(), rec));
        }
        let map = IntegralParamMap {
            family: ProblemFamily::LinearAssignment,
            dim: n * n,
            fields,
            index_sets,
            active_sets,
            inverse,
        };
        Ok((w, map))
    }

    fn build_lp(&self, w: &[f64]) -> Result<LinearProgram> {
        let n = (w.len() as f64).sqrt().round() as usize;
        if n * n != w.len() {
            return Err(Error::config(format!("{} costs do not form a square matrix", w.len())));
        }
        Ok(build_assignment_lp(&to_matrix(w, n), Sense::Maximize, true)?.0)
    }
}

/// Shortest path where unit `j` is edge `j` and its cost field is the edge cost.
#[derive(Clone, Debug, PartialEq)]
pub struct EdgeCostPolicy {
    pub graph: Graph,
    pub source: String,
    pub target: String,
    pub cost_field: String,
}

impl Parameterization for EdgeCostPolicy {
    fn family(&self) -> ProblemFamily {
        ProblemFamily::ShortestPath
    }

    fn input_fields(&self) -> Vec<String> {
        vec![self.cost_field.clone()]
    }

    fn parameterize(&self, dataset: &DataSet) -> Result<(Vec<f64>, IntegralParamMap)> {
        let k = self.graph.edges.len();
        if dataset.len() != k {
            return Err(Error::config(format!("dataset has {} units, graph has {k} edges", dataset.len())));
        }
        let fields = self.input_fields();
        let recs = records(dataset, &fields)?;
        let w: Vec<f64> = recs.iter().map(|r| r[0]).collect();
        let map = IntegralParamMap {
            family: ProblemFamily::ShortestPath,
            dim: k,
            fields,
            index_sets: (0..k).map(|j| vec![j]).collect(),
            active_sets: (0..k).map(|j| vec![j]).collect(),
            inverse: recs.into_iter().map(|r| (vec![r[0]], r)).collect(),
        };
        Ok((w, map))
    }

    fn build_lp(&self, w: &[f64]) -> Result<LinearProgram> {
        Ok(build_shortest_path_lp(&self.graph.with_costs(w)?, &self.source, &self.target)?.0)
    }
}

/// Index sets pairwise disjoint and every unit's record recovered from its slice of `w`.
pub fn check_integral(map: &IntegralParamMap, dataset: &DataSet, w: &[f64]) -> bool {
    if w.len() != map.dim || map.num_units() != dataset.len() || !map.is_disjoint() {
        return false;
    }
    let Ok(recs) = records(dataset, &map.fields) else {
        return false;
    };
    recs.iter().enumerate().all(|(i, rec)| {
        map.invert(i, &map.slice(i, w))
            .is_some_and(|r| r.len() == rec.len() && r.iter().zip(rec).all(|(a, b)| (a - b).abs() <= INVERSE_TOL))
    })
}

/// Vector `c` with `<c, x>` equal to the summed confounder of the units served by code `x`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConfounderLift {
    pub confounder: String,
    pub family: ProblemFamily,
    pub c: Vec<f64>,
}

pub fn lift_confounder(view: &AdversaryView, map: &IntegralParamMap, family: ProblemFamily) -> Result<ConfounderLift> {
    if family != map.family {
        return Err(Error::config(format!("map was built for {:?}, lift requested for {family:?}", map.family)));
    }
    if view.values.len() != map.num_units() {
        return Err(Error::config(format!("view has {} units, map has {}", view.values.len(), map.num_units())));
    }
    let mut c = vec![0.0; map.dim];
    for (active, &value) in map.active_sets.iter().zip(&view.values) {
        for &j in active {
            c[j] = value;
        }
    }
    Ok(ConfounderLift { confounder: view.confounder.clone(), family, c })
}

/// `f(<c, round(x)>)`.
pub fn evaluate_h(x: &[f64], lift: &ConfounderLift, f: impl Fn(f64) -> f64) -> Result<f64> {
    if x.len() != lift.c.len() {
        return Err(Error::config(format!("code has length {}, lift has {}", x.len(), lift.c.len())));
    }
    let code = round_code(x)?;
    Ok(f(code.iter().zip(&lift.c).filter(|(b, _)| **b == 1).map(|(_, c)| c).sum()))
}

pub fn evaluate_h_sum(x: &[f64], lift: &ConfounderLift) -> Result<f64> {
    evaluate_h(x, lift, |v| v)
}
