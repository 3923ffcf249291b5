//! Semi-Markovian structural causal models.
//!
//! An [`Scm`] holds exogenous noise variables with their distributions and one
//! linear-plus-clamp structural equation per endogenous variable. Noise that
//! feeds two or more endogenous variables is a hidden confounder.
//!
//! Sampling records every unit's noise draws next to its observed values so
//! that an adversary holding a richer model can recover the exact per-unit
//! confounder value afterwards (see [`adversary_view`]).

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use rand::Rng;
use rand_distr::{Distribution as _, LogNormal, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;

/// Sampling distribution of a noise variable. Parameters are unitless unless
/// the scenario says otherwise.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NoiseDistribution {
    Constant {
        value: f64,
    },
    Uniform {
        low: f64,
        high: f64,
    },
    Normal {
        mean: f64,
        std_dev: f64,
    },
    /// `exp(N(mu, sigma))`.
    LogNormal {
        mu: f64,
        sigma: f64,
    },
}

impl NoiseDistribution {
    fn validate(&self, name: &str) -> Result<()> {
        let finite = |v: f64, what: &str| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::config(format!("noise `{name}`: {what} must be finite")))
            }
        };
        match *self {
            NoiseDistribution::Constant { value } => finite(value, "value"),
            NoiseDistribution::Uniform { low, high } => {
                finite(low, "low")?;
                finite(high, "high")?;
                if low > high {
                    return Err(Error::config(format!("noise `{name}`: low > high")));
                }
                Ok(())
            }
            NoiseDistribution::Normal { mean, std_dev } => {
                finite(mean, "mean")?;
                finite(std_dev, "std_dev")?;
                if std_dev < 0.0 {
                    return Err(Error::config(format!("noise `{name}`: negative std_dev")));
                }
                Ok(())
            }
            NoiseDistribution::LogNormal { mu, sigma } => {
                finite(mu, "mu")?;
                finite(sigma, "sigma")?;
                if sigma < 0.0 {
                    return Err(Error::config(format!("noise `{name}`: negative sigma")));
                }
                Ok(())
            }
        }
    }

    fn draw<R: Rng>(&self, rng: &mut R) -> f64 {
        match *self {
            NoiseDistribution::Constant { value } => value,
            NoiseDistribution::Uniform { low, high } => {
                if low == high {
                    low
                } else {
                    rng.gen_range(low..high)
                }
            }
            // Parameters are validated up front, so construction cannot fail.
            NoiseDistribution::Normal { mean, std_dev } => {
                Normal::new(mean, std_dev).expect("validated normal").sample(rng)
            }
            NoiseDistribution::LogNormal { mu, sigma } => {
                LogNormal::new(mu, sigma).expect("validated log-normal").sample(rng)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseVar {
    pub name: String,
    pub distribution: NoiseDistribution,
}

/// Elementwise transform applied to an equation input before weighting.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Transform {
    #[default]
    Identity,
    Log,
    Exp,
}

impl Transform {
    fn apply(self, v: f64) -> Option<f64> {
        match self {
            Transform::Identity => Some(v),
            Transform::Log if v > 0.0 => Some(v.ln()),
            Transform::Log => None,
            Transform::Exp => Some(v.exp()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Input {
    Parent(String),
    Noise(String),
}

/// One weighted input of a structural equation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Term {
    #[serde(flatten)]
    pub input: Input,
    pub coef: f64,
    #[serde(default)]
    pub transform: Transform,
}

impl Term {
    pub fn parent(name: &str, coef: f64) -> Self {
        Term { input: Input::Parent(name.to_string()), coef, transform: Transform::Identity }
    }

    pub fn noise(name: &str, coef: f64) -> Self {
        Term { input: Input::Noise(name.to_string()), coef, transform: Transform::Identity }
    }

    pub fn with_transform(mut self, transform: Transform) -> Self {
        self.transform = transform;
        self
    }
}

/// `v = clamp(intercept + sum(coef * transform(input)), lo, hi)`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Equation {
    #[serde(default)]
    pub intercept: f64,
    #[serde(default)]
    pub terms: Vec<Term>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clamp: Option<(f64, f64)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Variable {
    pub name: String,
    #[serde(default = "default_true")]
    pub observed: bool,
    pub equation: Equation,
}

fn default_true() -> bool {
    true
}

/// Raw, unvalidated SCM document (the JSON file schema).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScmSpec {
    pub name: String,
    pub noise: Vec<NoiseVar>,
    pub variables: Vec<Variable>,
}

/// A validated structural causal model.
///
/// Invariants hold by construction: the parent relation is acyclic, each
/// endogenous variable has exactly one equation, and every referenced noise
/// variable exists.
#[derive(Clone, Debug, PartialEq)]
pub struct Scm {
    spec: ScmSpec,
    order: Vec<usize>,
}

impl Scm {
    pub fn new(spec: ScmSpec) -> Result<Self> {
        let mut noise_names = BTreeSet::new();
        for noise in &spec.noise {
            if !noise_names.insert(noise.name.as_str()) {
                return Err(Error::Structural(format!("duplicate noise variable `{}`", noise.name)));
            }
            noise.distribution.validate(&noise.name)?;
        }
        let mut index = BTreeMap::new();
        for (i, var) in spec.variables.iter().enumerate() {
            if noise_names.contains(var.name.as_str()) {
                return Err(Error::Structural(format!(
                    "`{}` is declared both as noise and as endogenous variable",
                    var.name
                )));
            }
            if index.insert(var.name.as_str(), i).is_some() {
                return Err(Error::Structural(format!(
                    "endogenous variable `{}` has more than one equation",
                    var.name
                )));
            }
        }
        for var in &spec.variables {
            if let Some((lo, hi)) = var.equation.clamp {
                if lo.is_nan() || hi.is_nan() || lo > hi {
                    return Err(Error::config(format!("variable `{}`: clamp low > high", var.name)));
                }
            }
            for term in &var.equation.terms {
                if !term.coef.is_finite() {
                    return Err(Error::config(format!("variable `{}`: non-finite coefficient", var.name)));
                }
                match &term.input {
                    Input::Parent(p) if !index.contains_key(p.as_str()) => {
                        return Err(Error::Structural(format!(
                            "variable `{}` references unknown parent `{p}`",
                            var.name
                        )))
                    }
                    Input::Noise(u) if !noise_names.contains(u.as_str()) => {
                        return Err(Error::Structural(format!(
                            "variable `{}` references unknown noise `{u}`",
                            var.name
                        )))
                    }
                    _ => {}
                }
            }
        }

        // Kahn's algorithm, always releasing the lowest declaration index first.
        let n = spec.variables.len();
        let mut indegree = vec![0usize; n];
        let mut children = vec![Vec::new(); n];
        for (i, var) in spec.variables.iter().enumerate() {
            let parents: BTreeSet<usize> = var
                .equation
                .terms
                .iter()
                .filter_map(|t| match &t.input {
                    Input::Parent(p) => Some(index[p.as_str()]),
                    Input::Noise(_) => None,
                })
                .collect();
            indegree[i] = parents.len();
            for p in parents {
                children[p].push(i);
            }
        }
        let mut ready: BTreeSet<usize> = (0..n).filter(|&i| indegree[i] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(i) = ready.pop_first() {
            order.push(i);
            for &c in &children[i] {
                indegree[c] -= 1;
                if indegree[c] == 0 {
                    ready.insert(c);
                }
            }
        }
        if order.len() != n {
            return Err(Error::Structural(format!("cycle detected in SCM `{}`", spec.name)));
        }
        Ok(Scm { spec, order })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Scm::new(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Scm::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.spec)?)
    }

    pub fn name(&self) -> &str {
        &self.spec.name
    }

    pub fn spec(&self) -> &ScmSpec {
        &self.spec
    }

    pub fn variables(&self) -> &[Variable] {
        &self.spec.variables
    }

    pub fn noise(&self) -> &[NoiseVar] {
        &self.spec.noise
    }

    pub fn observed_fields(&self) -> Vec<String> {
        self.spec.variables.iter().filter(|v| v.observed).map(|v| v.name.clone()).collect()
    }

    pub fn is_endogenous(&self, name: &str) -> bool {
        self.spec.variables.iter().any(|v| v.name == name)
    }

    pub fn is_noise(&self, name: &str) -> bool {
        self.spec.noise.iter().any(|u| u.name == name)
    }

    /// Endogenous parents of `var`, in declaration order of the terms.
    pub fn parents(&self, var: &str) -> Vec<String> {
        self.attached(var, |input| match input {
            Input::Parent(p) => Some(p.clone()),
            Input::Noise(_) => None,
        })
    }

    /// Noise variables attached to `var`.
    pub fn attached_noise(&self, var: &str) -> Vec<String> {
        self.attached(var, |input| match input {
            Input::Noise(u) => Some(u.clone()),
            Input::Parent(_) => None,
        })
    }

    fn attached(&self, var: &str, pick: impl Fn(&Input) -> Option<String>) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        if let Some(v) = self.spec.variables.iter().find(|v| v.name == var) {
            for term in &v.equation.terms {
                if let Some(name) = pick(&term.input) {
                    if !out.contains(&name) {
                        out.push(name);
                    }
                }
            }
        }
        out
    }

    /// Returns a copy with the observability flag of `var` replaced.
    pub fn with_observed(&self, var: &str, observed: bool) -> Result<Scm> {
        let mut spec = self.spec.clone();
        let v = spec
            .variables
            .iter_mut()
            .find(|v| v.name == var)
            .ok_or_else(|| Error::config(format!("unknown variable `{var}`")))?;
        v.observed = observed;
        Scm::new(spec)
    }

    /// Evaluates all endogenous variables for one set of noise values.
    /// Returns values in declaration order.
    pub fn evaluate(&self, noise: &BTreeMap<String, f64>) -> Result<Vec<f64>> {
        let vars = &self.spec.variables;
        let mut values = vec![f64::NAN; vars.len()];
        let position: BTreeMap<&str, usize> = vars.iter().enumerate().map(|(i, v)| (v.name.as_str(), i)).collect();
        for &i in &self.order {
            let eq = &vars[i].equation;
            let mut acc = eq.intercept;
            for term in &eq.terms {
                let raw = match &term.input {
                    Input::Parent(p) => values[position[p.as_str()]],
                    Input::Noise(u) => {
                        *noise.get(u).ok_or_else(|| Error::Provenance(format!("no draw recorded for noise `{u}`")))?
                    }
                };
                let x = term.transform.apply(raw).ok_or_else(|| {
                    Error::config(format!("variable `{}`: log of non-positive input {raw}", vars[i].name))
                })?;
                acc += term.coef * x;
            }
            if let Some((lo, hi)) = eq.clamp {
                acc = acc.clamp(lo, hi);
            }
            values[i] = acc;
        }
        Ok(values)
    }
}

/// One sampled unit: observed values aligned with [`DataSet::fields`] and the
/// noise draws that produced them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Unit {
    pub values: Vec<f64>,
    pub noise: BTreeMap<String, f64>,
}

/// Observed records `D ~ p^M`, one per unit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DataSet {
    pub fields: Vec<String>,
    pub units: Vec<Unit>,
    pub seed: u64,
    /// Name of the generating SCM (or fixture).
    pub source: String,
}

impl DataSet {
    /// Builds a dataset from explicit records, checking the shared field set.
    pub fn from_units(fields: Vec<String>, units: Vec<Unit>, seed: u64, source: &str) -> Result<Self> {
        if units.is_empty() {
            return Err(Error::config("dataset must contain at least one unit"));
        }
        if let Some(bad) = units.iter().position(|u| u.values.len() != fields.len()) {
            return Err(Error::config(format!(
                "unit {bad} has {} values, expected {}",
                units[bad].values.len(),
                fields.len()
            )));
        }
        Ok(DataSet { fields, units, seed, source: source.to_string() })
    }

    pub fn len(&self) -> usize {
        self.units.len()
    }

    pub fn is_empty(&self) -> bool {
        self.units.is_empty()
    }

    pub fn field_index(&self, field: &str) -> Result<usize> {
        self.fields
            .iter()
            .position(|f| f == field)
            .ok_or_else(|| Error::config(format!("dataset has no field `{field}`")))
    }

    /// Column of values for `field`.
    pub fn column(&self, field: &str) -> Result<Vec<f64>> {
        let j = self.field_index(field)?;
        Ok(self.units.iter().map(|u| u.values[j]).collect())
    }

    /// CSV export: `unit_id` followed by one column per observed field.
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut writer = csv::Writer::from_writer(out);
        let mut header = vec!["unit_id".to_string()];
        header.extend(self.fields.iter().cloned());
        writer.write_record(&header)?;
        for (i, unit) in self.units.iter().enumerate() {
            let mut row = vec![i.to_string()];
            row.extend(unit.values.iter().map(|v| v.to_string()));
            writer.write_record(&row)?;
        }
        writer.flush()?;
        Ok(())
    }
}

/// Per-unit values of a confounder, aligned with a [`DataSet`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdversaryView {
    pub confounder: String,
    pub values: Vec<f64>,
}

/// Draws `n` units. Noise `u` of unit `i` comes from the stream keyed by
/// `(seed, u's name, i)`, so two models sharing noise names share draws.
pub fn sample(scm: &Scm, n: usize, seed: u64) -> Result<DataSet> {
    if n == 0 {
        return Err(Error::config("sample size must be at least 1"));
    }
    let observed: Vec<usize> = scm.variables().iter().enumerate().filter(|(_, v)| v.observed).map(|(i, _)| i).collect();
    let noise_seeds: Vec<(String, u64, &NoiseDistribution)> =
        scm.noise().iter().map(|u| (u.name.clone(), rng::derive_seed(seed, &u.name), &u.distribution)).collect();

    let mut units = Vec::with_capacity(n);
    for i in 0..n {
        let mut noise = BTreeMap::new();
        for (name, noise_seed, dist) in &noise_seeds {
            let mut stream = rng::stream(*noise_seed, i as u64);
            noise.insert(name.clone(), dist.draw(&mut stream));
        }
        let all = scm.evaluate(&noise)?;
        units.push(Unit { values: observed.iter().map(|&j| all[j]).collect(), noise });
    }
    DataSet::from_units(scm.observed_fields(), units, seed, scm.name())
}

/// Noise variables attached to at least two distinct endogenous variables.
pub fn hidden_confounders(scm: &Scm) -> BTreeSet<String> {
    let mut fan_out: BTreeMap<String, usize> = BTreeMap::new();
    for var in scm.variables() {
        for u in scm.attached_noise(&var.name) {
            *fan_out.entry(u).or_default() += 1;
        }
    }
    fan_out.into_iter().filter(|(_, k)| *k >= 2).map(|(u, _)| u).collect()
}

pub fn is_causally_sufficient(scm: &Scm) -> bool {
    hidden_confounders(scm).is_empty()
}

/// Projects each unit of `dataset` onto the named confounder of `scm_true`.
///
/// `confounder` may be an endogenous variable or a noise variable of the true
/// model. The true model is re-evaluated on the recorded noise draws; it must
/// reproduce every observed field of the dataset, otherwise the dataset was not
/// generated by a sub-model of `scm_true` and a provenance error is returned.
pub fn adversary_view(scm_true: &Scm, dataset: &DataSet, confounder: &str) -> Result<AdversaryView> {
    let endo = scm_true.variables().iter().position(|v| v.name == confounder);
    if endo.is_none() && !scm_true.is_noise(confounder) {
        return Err(Error::config(format!("`{confounder}` is not a variable of SCM `{}`", scm_true.name())));
    }
    let field_pos: Vec<(usize, usize)> = dataset
        .fields
        .iter()
        .enumerate()
        .map(|(j, f)| {
            scm_true.variables().iter().position(|v| &v.name == f).map(|k| (j, k)).ok_or_else(|| {
                Error::Provenance(format!("observed field `{f}` is not modelled by SCM `{}`", scm_true.name()))
            })
        })
        .collect::<Result<_>>()?;

    let mut values = Vec::with_capacity(dataset.len());
    for (i, unit) in dataset.units.iter().enumerate() {
        let all = scm_true.evaluate(&unit.noise)?;
        for &(j, k) in &field_pos {
            let recorded = unit.values[j];
            if (all[k] - recorded).abs() > 1e-9 * (1.0 + recorded.abs()) {
                return Err(Error::Provenance(format!(
                    "unit {i}: SCM `{}` yields {} = {} but dataset `{}` (seed {}) recorded {}",
                    scm_true.name(),
                    dataset.fields[j],
                    all[k],
                    dataset.source,
                    dataset.seed,
                    recorded
                )));
            }
        }
        let value = match endo {
            Some(k) => all[k],
            None => unit.noise[confounder],
        };
        values.push(value);
    }
    Ok(AdversaryView { confounder: confounder.to_string(), values })
}

/// Pearson correlation of two equally long samples.
pub fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
    }
    sab / (saa.sqrt() * sbb.sqrt())
}

/// Coefficients of the vaccination model.
///
/// Wealth `W ~ exp(N(0, wealth_log_sigma))`,
/// `H = clamp(h_intercept + h_log_wealth * ln W + U_H, 0, 1)`,
/// `P = clamp(p_intercept + p_health * H + p_log_wealth * ln W + U_P, 0, 1)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VaccinationScmParams {
    pub wealth_log_sigma: f64,
    pub h_intercept: f64,
    pub h_log_wealth: f64,
    pub h_noise_sd: f64,
    pub p_intercept: f64,
    pub p_health: f64,
    pub p_log_wealth: f64,
    pub p_noise_sd: f64,
}

impl Default for VaccinationScmParams {
    fn default() -> Self {
        VaccinationScmParams {
            wealth_log_sigma: 0.5,
            h_intercept: 0.5,
            h_log_wealth: 0.3,
            h_noise_sd: 0.15,
            p_intercept: 0.9,
            p_health: -0.8,
            p_log_wealth: 0.2,
            p_noise_sd: 0.1,
        }
    }
}

/// Noise shared by both vaccination models; the wealth draw is `U_C`.
pub const WEALTH_NOISE: &str = "U_C";
pub const WEALTH: &str = "W";
pub const HEALTH: &str = "H";
pub const PRIORITY: &str = "P";

fn vaccination_noise(p: &VaccinationScmParams) -> Vec<NoiseVar> {
    vec![
        NoiseVar {
            name: WEALTH_NOISE.into(),
            distribution: NoiseDistribution::LogNormal { mu: 0.0, sigma: p.wealth_log_sigma },
        },
        NoiseVar { name: "U_H".into(), distribution: NoiseDistribution::Normal { mean: 0.0, std_dev: p.h_noise_sd } },
        NoiseVar { name: "U_P".into(), distribution: NoiseDistribution::Normal { mean: 0.0, std_dev: p.p_noise_sd } },
    ]
}

/// The modeller's model: wealth is the hidden confounder `U_C` of `H` and `P`.
pub fn vaccination_observed(p: &VaccinationScmParams) -> Result<Scm> {
    let wealth = || Term::noise(WEALTH_NOISE, 0.0).with_transform(Transform::Log);
    Scm::new(ScmSpec {
        name: "vaccination-observed".into(),
        noise: vaccination_noise(p),
        variables: vec![
            Variable {
                name: HEALTH.into(),
                observed: true,
                equation: Equation {
                    intercept: p.h_intercept,
                    terms: vec![Term { coef: p.h_log_wealth, ..wealth() }, Term::noise("U_H", 1.0)],
                    clamp: Some((0.0, 1.0)),
                },
            },
            Variable {
                name: PRIORITY.into(),
                observed: true,
                equation: Equation {
                    intercept: p.p_intercept,
                    terms: vec![
                        Term::parent(HEALTH, p.p_health),
                        Term { coef: p.p_log_wealth, ..wealth() },
                        Term::noise("U_P", 1.0),
                    ],
                    clamp: Some((0.0, 1.0)),
                },
            },
        ],
    })
}

/// The true model: wealth `W` is endogenous. `observe_wealth` controls
/// whether it appears in sampled records.
pub fn vaccination_true(p: &VaccinationScmParams, observe_wealth: bool) -> Result<Scm> {
    let log_w = |coef| Term::parent(WEALTH, coef).with_transform(Transform::Log);
    Scm::new(ScmSpec {
        name: if observe_wealth { "vaccination-true-observed-wealth" } else { "vaccination-true" }.into(),
        noise: vaccination_noise(p),
        variables: vec![
            Variable {
                name: WEALTH.into(),
                observed: observe_wealth,
                equation: Equation { intercept: 0.0, terms: vec![Term::noise(WEALTH_NOISE, 1.0)], clamp: None },
            },
            Variable {
                name: HEALTH.into(),
                observed: true,
                equation: Equation {
                    intercept: p.h_intercept,
                    terms: vec![log_w(p.h_log_wealth), Term::noise("U_H", 1.0)],
                    clamp: Some((0.0, 1.0)),
                },
            },
            Variable {
                name: PRIORITY.into(),
                observed: true,
                equation: Equation {
                    intercept: p.p_intercept,
                    terms: vec![Term::parent(HEALTH, p.p_health), log_w(p.p_log_wealth), Term::noise("U_P", 1.0)],
                    clamp: Some((0.0, 1.0)),
                },
            },
        ],
    })
}

/// Road-segment model used by the shortest-path scenario.
///
/// The emission factor `U_E` drives both segment length and toll. In the true
/// model it is the endogenous `CO2` (kg per traversal).
pub const CO2: &str = "CO2";
pub const EMISSION_NOISE: &str = "U_E";
pub const TOLL: &str = "toll";
pub const LENGTH: &str = "length";
pub const LENGTH_PER_CO2: f64 = 0.5;
pub const TOLL_PER_CO2: f64 = 0.01;

fn road_noise() -> Vec<NoiseVar> {
    vec![
        NoiseVar { name: EMISSION_NOISE.into(), distribution: NoiseDistribution::Uniform { low: 20.0, high: 100.0 } },
        NoiseVar { name: "U_L".into(), distribution: NoiseDistribution::Uniform { low: 100.0, high: 400.0 } },
        NoiseVar { name: "U_T".into(), distribution: NoiseDistribution::Uniform { low: 5.0, high: 40.0 } },
    ]
}

pub fn road_observed() -> Result<Scm> {
    Scm::new(ScmSpec {
        name: "roads-observed".into(),
        noise: road_noise(),
        variables: vec![
            Variable {
                name: LENGTH.into(),
                observed: true,
                equation: Equation {
                    intercept: 0.0,
                    terms: vec![Term::noise("U_L", 1.0), Term::noise(EMISSION_NOISE, LENGTH_PER_CO2)],
                    clamp: None,
                },
            },
            Variable {
                name: TOLL.into(),
                observed: true,
                equation: Equation {
                    intercept: 0.0,
                    terms: vec![Term::noise("U_T", 1.0), Term::noise(EMISSION_NOISE, TOLL_PER_CO2)],
                    clamp: None,
                },
            },
        ],
    })
}

pub fn road_true() -> Result<Scm> {
    Scm::new(ScmSpec {
        name: "roads-true".into(),
        noise: road_noise(),
        variables: vec![
            Variable {
                name: CO2.into(),
                observed: false,
                equation: Equation { intercept: 0.0, terms: vec![Term::noise(EMISSION_NOISE, 1.0)], clamp: None },
            },
            Variable {
                name: LENGTH.into(),
                observed: true,
                equation: Equation {
                    intercept: 0.0,
                    terms: vec![Term::noise("U_L", 1.0), Term::parent(CO2, LENGTH_PER_CO2)],
                    clamp: None,
                },
            },
            Variable {
                name: TOLL.into(),
                observed: true,
                equation: Equation {
                    intercept: 0.0,
                    terms: vec![Term::noise("U_T", 1.0), Term::parent(CO2, TOLL_PER_CO2)],
                    clamp: None,
                },
            },
        ],
    })
}
