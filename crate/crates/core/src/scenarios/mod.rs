//! Bundled end-to-end scenarios, looked up by name at run time.

mod energy;
mod roads;
mod vaccination;

pub use energy::{EnergyConfig, EnergyScenario, REFERENCE_ROWS};
pub use roads::{na_fixture, path_nodes, road_dataset, RoadBundle, ShortestPathConfig, ShortestPathScenario};
pub use vaccination::{VaccinationBundle, VaccinationConfig, VaccinationScenario};

use std::collections::BTreeMap;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::hca::AttackReport;
use crate::io;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioResult {
    pub scenario: String,
    pub seed: Option<u64>,
    /// Resolved configuration, defaults included.
    pub config: Value,
    /// Files written next to `result.json`.
    pub files: Vec<String>,
    pub report: Option<AttackReport>,
    pub summary: Value,
    /// Kept out of `result.json` so reruns are byte-identical.
    #[serde(skip)]
    pub wall_clock_seconds: f64,
}

pub trait Scenario: Send + Sync {
    fn name(&self) -> &'static str;
    fn description(&self) -> &'static str;
    /// Applies defaults and validates. The returned value echoes every field.
    fn resolve(&self, config: &Value) -> Result<Value>;
    /// Runs with a resolved config and writes data files into `out_dir`.
    fn run(&self, config: &Value, out_dir: &Path) -> Result<ScenarioResult>;
}

pub struct Registry {
    scenarios: BTreeMap<&'static str, Box<dyn Scenario>>,
}

impl Registry {
    pub fn empty() -> Self {
        Registry { scenarios: BTreeMap::new() }
    }

    pub fn builtin() -> Self {
        let mut r = Registry::empty();
        r.register(Box::new(VaccinationScenario));
        r.register(Box::new(ShortestPathScenario));
        r.register(Box::new(EnergyScenario));
        r
    }

    pub fn register(&mut self, scenario: Box<dyn Scenario>) {
        self.scenarios.insert(scenario.name(), scenario);
    }

    pub fn get(&self, name: &str) -> Option<&dyn Scenario> {
        self.scenarios.get(name).map(|s| s.as_ref())
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.scenarios.keys().copied().collect()
    }
}

/// Record of one run, written as `manifest.json`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub scenario: Option<String>,
    pub config_path: Option<String>,
    pub resolved_config: Value,
    pub output_dir: String,
    pub versions: BTreeMap<String, String>,
    pub wall_clock_seconds: f64,
}

/// Reads a scenario config. A run manifest is accepted too, in which case its
/// resolved config is returned.
pub fn load_config(path: &Path) -> Result<Value> {
    let text = std::fs::read_to_string(path)?;
    let value: Value = serde_json::from_str(&text)?;
    Ok(match value.get("resolved_config") {
        Some(inner) => inner.clone(),
        None => value,
    })
}

/// Deserializes a config section, reporting the failing field path.
pub fn parse_config<T: DeserializeOwned>(value: &Value) -> Result<T> {
    serde_path_to_error::deserialize(value).map_err(|e| Error::config(format!("{}: {}", e.path(), e.inner())))
}

/// Resolves `config`, runs the scenario and writes `result.json`.
pub fn run_scenario(scenario: &dyn Scenario, config: &Value, out_dir: &Path) -> Result<ScenarioResult> {
    let resolved = scenario.resolve(config)?;
    let start = std::time::Instant::now();
    let mut result = scenario.run(&resolved, out_dir)?;
    result.files.push("result.json".into());
    io::write_json(&out_dir.join("result.json"), &result)?;
    result.wall_clock_seconds = start.elapsed().as_secs_f64();
    Ok(result)
}

/// `unit_id,confounder_value,matched_base,matched_adv`
pub(crate) fn write_skew_csv(path: &Path, rows: &[(String, f64, bool, bool)]) -> Result<()> {
    io::write_csv_with(path, |buf| {
        let mut w = csv::Writer::from_writer(buf);
        w.write_record(["unit_id", "confounder_value", "matched_base", "matched_adv"])?;
        for (id, value, base, adv) in rows {
            w.write_record([id.clone(), value.to_string(), u8::from(*base).to_string(), u8::from(*adv).to_string()])?;
        }
        w.flush()?;
        Ok(())
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_lists_builtins() {
        let r = Registry::builtin();
        assert_eq!(r.names(), vec!["energy", "shortest-path", "vaccination"]);
        assert!(r.get("vaccination").is_some());
        assert!(r.get("nope").is_none());
    }

    #[test]
    fn config_errors_carry_the_field_path() {
        let err = VaccinationScenario.resolve(&serde_json::json!({"attack": {"epsilon": "x"}})).unwrap_err();
        assert!(err.to_string().contains("attack.epsilon"), "{err}");
        let err = VaccinationScenario.resolve(&serde_json::json!({"attack": {"epsilon": -1.0}})).unwrap_err();
        assert!(err.to_string().contains("attack.epsilon"), "{err}");
        assert!(VaccinationScenario.resolve(&serde_json::json!({"typo": 1})).is_err());
    }
}
