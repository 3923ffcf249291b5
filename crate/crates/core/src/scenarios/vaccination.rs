use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::dpo::NoiseSpec;
use crate::error::{Error, Result};
use crate::hca::{
    attack_with, check_integral, lift_confounder, parameterize, AttackConfig, Parameterization, ScenarioBundle,
    VaccinationPolicy,
};
use crate::io;
use crate::lp::SimplexSolver;
use crate::scm::{
    adversary_view, hidden_confounders, sample, vaccination_observed, vaccination_true, DataSet, Scm,
    VaccinationScmParams, WEALTH,
};

use super::{parse_config, write_skew_csv, Scenario, ScenarioResult};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VaccinationConfig {
    pub seed: u64,
    pub n_people: usize,
    pub n_spots: usize,
    pub alpha: f64,
    pub beta: f64,
    pub scm: VaccinationScmParams,
    pub attack: AttackConfig,
}

impl Default for VaccinationConfig {
    fn default() -> Self {
        VaccinationConfig {
            seed: 0,
            n_people: 25,
            n_spots: 10,
            alpha: 1.0,
            beta: 1.0,
            scm: VaccinationScmParams::default(),
            attack: AttackConfig {
                epsilon: 0.01,
                noise: NoiseSpec { sigma: 0.5, n_samples: 15, ..NoiseSpec::default() },
                ..AttackConfig::default()
            },
        }
    }
}

impl VaccinationConfig {
    pub fn policy(&self) -> VaccinationPolicy {
        VaccinationPolicy { alpha: self.alpha, beta: self.beta, wealth_weight: None, n_spots: self.n_spots }
    }

    /// The attack config with its noise seed tied to the run seed.
    pub fn attack_config(&self) -> AttackConfig {
        AttackConfig { noise: NoiseSpec { seed: self.seed, ..self.attack.noise.clone() }, ..self.attack.clone() }
    }

    fn validate(&self) -> Result<()> {
        if self.n_people == 0 {
            return Err(Error::config("n_people: must be at least 1"));
        }
        if self.n_spots == 0 || self.n_spots > self.n_people {
            return Err(Error::config(format!("n_spots: must lie in 1..={}", self.n_people)));
        }
        self.attack.validate()
    }
}

/// People sampled from the observed vaccination model, allocated by `policy`.
pub struct VaccinationBundle {
    pub n_people: usize,
    pub policy: VaccinationPolicy,
}

impl ScenarioBundle for VaccinationBundle {
    fn name(&self) -> &str {
        "vaccination"
    }

    fn confounder(&self) -> &str {
        WEALTH
    }

    fn policy(&self) -> &dyn Parameterization {
        &self.policy
    }

    fn dataset(&self, scm_observed: &Scm, seed: u64) -> Result<DataSet> {
        sample(scm_observed, self.n_people, seed)
    }
}

type SkewRow = (String, f64, bool, bool);

pub struct VaccinationScenario;

impl Scenario for VaccinationScenario {
    fn name(&self) -> &'static str {
        "vaccination"
    }

    fn description(&self) -> &'static str {
        "vaccine spot allocation with wealth as hidden confounder (linear assignment)"
    }

    fn resolve(&self, config: &Value) -> Result<Value> {
        let mut cfg: VaccinationConfig = parse_config(config)?;
        cfg.validate()?;
        cfg.attack.noise.seed = cfg.seed;
        Ok(serde_json::to_value(cfg)?)
    }

    fn run(&self, config: &Value, out_dir: &Path) -> Result<ScenarioResult> {
        let cfg: VaccinationConfig = parse_config(config)?;
        cfg.validate()?;
        let observed = vaccination_observed(&cfg.scm)?;
        let truth = vaccination_true(&cfg.scm, false)?;
        let policy = cfg.policy();

        let ds = sample(&observed, cfg.n_people, cfg.seed)?;
        let (w, map) = parameterize(&ds, &policy)?;
        if !check_integral(&map, &ds, &w) {
            return Err(Error::Precondition("vaccination parameterization is not integral".into()));
        }
        let view = adversary_view(&truth, &ds, WEALTH)?;
        let lift = lift_confounder(&view, &map, policy.family())?;
        let lp = policy.build_lp(&w)?;
        let report = attack_with(&SimplexSolver, &lp, &lift, &cfg.attack_config(), Some(&map.active_sets))?;

        let served = |x: &[f64], i: usize| map.active_sets[i].iter().any(|&j| x[j] > 0.5);
        let rows: Vec<SkewRow> = (0..ds.len())
            .map(|i| (i.to_string(), view.values[i], served(&report.x_base, i), served(&report.x_adv, i)))
            .collect();
        let mean_of = |pick: &dyn Fn(&SkewRow) -> bool| {
            let v: Vec<f64> = rows.iter().filter(|r| pick(r)).map(|r| r.1).collect();
            if v.is_empty() {
                0.0
            } else {
                v.iter().sum::<f64>() / v.len() as f64
            }
        };
        let summary = json!({
            "hidden_confounders": hidden_confounders(&observed),
            "matched_base": rows.iter().filter(|r| r.2).count(),
            "matched_adv": rows.iter().filter(|r| r.3).count(),
            "mean_wealth_all": mean_of(&|_| true),
            "mean_wealth_matched_base": mean_of(&|r| r.2),
            "mean_wealth_matched_adv": mean_of(&|r| r.3),
        });

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
