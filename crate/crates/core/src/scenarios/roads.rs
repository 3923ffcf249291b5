use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::dpo::NoiseSpec;
use crate::error::{Error, Result};
use crate::hca::{
    attack_with, check_integral, lift_confounder, parameterize, AttackConfig, EdgeCostPolicy, Parameterization,
    ScenarioBundle,
};
use crate::io;
use crate::lp::{dot, Graph, SimplexSolver};
use crate::scm::{
    adversary_view, road_observed, road_true, DataSet, Scm, Unit, CO2, EMISSION_NOISE, LENGTH_PER_CO2, TOLL,
    TOLL_PER_CO2,
};

use super::{parse_config, write_skew_csv, Scenario, ScenarioResult};

/// Stylized North American road graph. Tolls in EUR, CO2 in kg.
///
/// NYC-PIT-CHI-OMA-DEN-SLC-SF costs 60 in tolls and emits 265 kg;
/// NYC-MTL-TOR-WPG-CAL-VAN-SF costs 60.02 and emits 440 kg. The eight
/// cross-border links are expensive enough that no mixed route comes close.
const NA_ROADS: &str = include_str!("data/na_roads.csv");

/// Base segment length (km) of the fixture; length is not read by the policy.
const FIXTURE_BASE_LENGTH: f64 = 200.0;

pub fn na_fixture() -> Graph {
    Graph::read_csv(NA_ROADS.as_bytes()).expect("bundled fixture parses")
}

/// One unit per edge, realized from the observed road model with noise set
/// so that each unit's toll is the edge cost and its emission factor is the
/// edge's confounder value.
pub fn road_dataset(graph: &Graph, source: &str) -> Result<DataSet> {
    let scm = road_observed()?;
    let mut units = Vec::with_capacity(graph.edges.len());
    for (j, e) in graph.edges.iter().enumerate() {
        let co2 = e
            .confounder
            .ok_or_else(|| Error::config(format!("edge {} has no confounder_value (CO2)", graph.edge_name(j))))?;
        let noise = BTreeMap::from([
            (EMISSION_NOISE.to_string(), co2),
            ("U_L".to_string(), FIXTURE_BASE_LENGTH),
            ("U_T".to_string(), e.cost - TOLL_PER_CO2 * co2),
        ]);
        let values = scm.evaluate(&noise)?;
        debug_assert!((values[0] - FIXTURE_BASE_LENGTH - LENGTH_PER_CO2 * co2).abs() < 1e-9);
        units.push(Unit { values, noise });
    }
    DataSet::from_units(scm.observed_fields(), units, 0, source)
}

/// Node sequence of the 0/1 path code `x` starting at `s`.
pub fn path_nodes(graph: &Graph, x: &[f64], s: &str) -> Vec<String> {
    let mut nodes = vec![s.to_string()];
    let Some(mut cur) = graph.node(s) else { return nodes };
    for _ in 0..graph.edges.len() {
        let next = graph.edges.iter().enumerate().find(|(j, e)| e.src == cur && x[*j] > 0.5);
        match next {
            Some((_, e)) => {
                cur = e.dst;
                nodes.push(graph.nodes[cur].clone());
            }
            None => break,
        }
    }
    nodes
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ShortestPathConfig {
    pub seed: u64,
    /// Edge list `src,dst,cost,confounder_value`; the bundled fixture when absent.
    pub graph_file: Option<String>,
    pub source: String,
    pub target: String,
    pub attack: AttackConfig,
}

impl Default for ShortestPathConfig {
    fn default() -> Self {
        ShortestPathConfig {
            seed: 0,
            graph_file: None,
            source: "NYC".into(),
            target: "SF".into(),
            attack: AttackConfig {
                epsilon: 0.01,
                noise: NoiseSpec { sigma: 0.25, n_samples: 20, ..NoiseSpec::default() },
                ..AttackConfig::default()
            },
        }
    }
}

impl ShortestPathConfig {
    pub fn graph(&self) -> Result<Graph> {
        match &self.graph_file {
            Some(p) => Graph::load(Path::new(p)),
            None => Ok(na_fixture()),
        }
    }

    pub fn bundle(&self) -> Result<RoadBundle> {
        let graph = self.graph()?;
        if graph.node(&self.source).is_none() || graph.node(&self.target).is_none() {
            return Err(Error::config(format!("source/target `{}`/`{}` not in graph", self.source, self.target)));
        }
        let source = self.graph_file.clone().unwrap_or_else(|| "na-fixture".into());
        Ok(RoadBundle {
            source,
            policy: EdgeCostPolicy {
                graph,
                source: self.source.clone(),
                target: self.target.clone(),
                cost_field: TOLL.into(),
            },
        })
    }
}

pub struct RoadBundle {
    pub source: String,
    pub policy: EdgeCostPolicy,
}

impl ScenarioBundle for RoadBundle {
    fn name(&self) -> &str {
        "shortest-path"
    }

    fn confounder(&self) -> &str {
        CO2
    }

    fn policy(&self) -> &dyn Parameterization {
        &self.policy
    }

    /// The road data is a fixed realization; `seed` only drives the attack noise.
    fn dataset(&self, _scm_observed: &Scm, _seed: u64) -> Result<DataSet> {
        road_dataset(&self.policy.graph, &self.source)
    }
}

pub struct ShortestPathScenario;

impl Scenario for ShortestPathScenario {
    fn name(&self) -> &'static str {
        "shortest-path"
    }

    fn description(&self) -> &'static str {
        "toll-minimal route with CO2 as hidden confounder (shortest path)"
    }

    fn resolve(&self, config: &Value) -> Result<Value> {
        let mut cfg: ShortestPathConfig = parse_config(config)?;
        cfg.attack.validate()?;
        cfg.attack.noise.seed = cfg.seed;
        Ok(serde_json::to_value(cfg)?)
    }

    fn run(&self, config: &Value, out_dir: &Path) -> Result<ScenarioResult> {
        let cfg: ShortestPathConfig = parse_config(config)?;
        let bundle = cfg.bundle()?;
        let observed = road_observed()?;
        let ds = bundle.dataset(&observed, cfg.seed)?;
        let (w, map) = parameterize(&ds, &bundle.policy)?;
        if !check_integral(&map, &ds, &w) {
            return Err(Error::Precondition("edge-cost parameterization is not integral".into()));
        }
        let view = adversary_view(&road_true()?, &ds, CO2)?;
        let lift = lift_confounder(&view, &map, bundle.policy.family())?;
        let lp = bundle.policy.build_lp(&w)?;
        let attack_cfg = AttackConfig { noise: NoiseSpec { seed: cfg.seed, ..cfg.attack.noise.clone() }, ..cfg.attack };
        let report = attack_with(&SimplexSolver, &lp, &lift, &attack_cfg, Some(&map.active_sets))?;

        let graph = &bundle.policy.graph;
        let toll_base = dot(&w, &report.x_base);
        let toll_adv = dot(&w, &report.x_adv);
        let summary = json!({
            "path_base": path_nodes(graph, &report.x_base, &cfg.source),
            "path_adv": path_nodes(graph, &report.x_adv, &cfg.source),
            "toll_base": toll_base,
            "toll_adv": toll_adv,
            "toll_gap": toll_adv - toll_base,
            "rel_toll_gap": (toll_adv - toll_base).abs() / toll_base.abs().max(1e-9),
            "co2_base": report.h_base,
            "co2_adv": report.h_adv,
            "co2_gap": report.delta_h,
        });
        let rows: Vec<(String, f64, bool, bool)> = (0..graph.edges.len())
            .map(|j| (j.to_string(), view.values[j], report.x_base[j] > 0.5, report.x_adv[j] > 0.5))
            .collect();
        io::write_csv_with(&out_dir.join("dataset.csv"), |buf| ds.write_csv(buf))?;
        write_skew_csv(&out_dir.join("skew.csv"), &rows)?;
        Ok(ScenarioResult {
            scenario: self.name().into(),
            seed: Some(cfg.seed),
            config: config.clone(),
            files: vec!["dataset.csv".into(), "skew.csv".into()],
            report: Some(report),
            summary,
            wall_clock_seconds: 0.0,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::{brute_force_paths, build_shortest_path_lp, solve};

    #[test]
    fn fixture_shape() {
        let g = na_fixture();
        assert_eq!((g.nodes.len(), g.edges.len()), (12, 20));
        let sol = solve(&build_shortest_path_lp(&g, "NYC", "SF").unwrap().0).unwrap();
        assert_eq!(path_nodes(&g, &sol.x, "NYC"), ["NYC", "PIT", "CHI", "OMA", "DEN", "SLC", "SF"]);
        assert!((sol.objective - 60.0).abs() < 1e-9);
        assert_eq!(brute_force_paths(&g, "NYC", "SF").unwrap().x, sol.x);
    }

    #[test]
    fn dataset_reproduces_tolls() {
        let g = na_fixture();
        let ds = road_dataset(&g, "na-fixture").unwrap();
        let tolls = ds.column(TOLL).unwrap();
        for (t, e) in tolls.iter().zip(&g.edges) {
            assert!((t - e.cost).abs() < 1e-12);
        }
        let view = adversary_view(&road_true().unwrap(), &ds, CO2).unwrap();
        assert_eq!(view.values[0], 60.0);
    }
}
