use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::io;
use crate::lp::energy::write_comparison_csv;
use crate::lp::{build_energy_lp, solve, EnergyParams, EnergyProfiles, EnergySummary};

use super::{parse_config, Scenario, ScenarioResult};

/// Published household results for `w_PV = 0.005` and `0.001`, shown next to
/// ours for orientation only: the demand series behind them is not available.
pub const REFERENCE_ROWS: [EnergySummary; 2] = [
    EnergySummary {
        cap_pv: 1.76,
        cap_bat: 2.45,
        self_gen: 0.42,
        totex: 597.41,
        capex: 161.64,
        con_gas: 1.70,
        con_ele: 1743.06,
        w_pv: 0.005,
    },
    EnergySummary {
        cap_pv: 7.15,
        cap_bat: 4.78,
        self_gen: 0.66,
        totex: 468.24,
        capex: 214.87,
        con_gas: 1.95,
        con_ele: 1013.49,
        w_pv: 0.001,
    },
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnergyConfig {
    pub hours: usize,
    pub params: EnergyParams,
    /// CSV `t,demand_kwh,avail_pv`; synthesized when absent.
    pub profiles_file: Option<String>,
    /// PV prices to compare; every other price stays at `params`.
    pub price_variants: Vec<f64>,
}

impl Default for EnergyConfig {
    fn default() -> Self {
        EnergyConfig {
            hours: 168,
            params: EnergyParams::default(),
            profiles_file: None,
            price_variants: vec![0.005, 0.001],
        }
    }
}

impl EnergyConfig {
    fn validate(&self) -> Result<()> {
        if self.hours == 0 {
            return Err(Error::config("hours: must be at least 1"));
        }
        if self.price_variants.is_empty() {
            return Err(Error::config("price_variants: at least one price is needed"));
        }
        if let Some(p) = self.price_variants.iter().find(|p| !p.is_finite() || **p < 0.0) {
            return Err(Error::config(format!("price_variants: {p} is not a valid price")));
        }
        self.params.validate()
    }

    pub fn profiles(&self) -> Result<EnergyProfiles> {
        let profiles = match &self.profiles_file {
            Some(p) => EnergyProfiles::load(Path::new(p))?,
            None => EnergyProfiles::synthetic(self.hours, self.params.annual_demand),
        };
        if profiles.hours() != self.hours {
            return Err(Error::config(format!(
                "hours: config says {}, profiles cover {}",
                self.hours,
                profiles.hours()
            )));
        }
        Ok(profiles)
    }

    /// Solves one LP per PV price.
    pub fn solve_variants(&self) -> Result<Vec<(EnergySummary, f64)>> {
        let profiles = self.profiles()?;
        self.price_variants
            .iter()
            .map(|&c_pv| {
                let params = EnergyParams { c_pv, ..self.params.clone() };
                let (lp, layout) = build_energy_lp(&params, &profiles)?;
                let sol = solve(&lp)?;
                if !sol.is_optimal() {
                    return Err(Error::Solver(format!("energy LP with c_pv = {c_pv} is {:?}", sol.status)));
                }
                let balance = (0..layout.hours)
                    .map(|t| {
                        let x = &sol.x;
                        (x[layout.p_ele(t)] + x[layout.p_pv(t)] + x[layout.p_out(t)] - x[layout.p_in(t)]
                            + x[layout.p_gas(t)]
                            - profiles.demand[t])
                            .abs()
                    })
                    .fold(0.0, f64::max);
                Ok((EnergySummary::from_solution(&params, &layout, &sol), balance))
            })
            .collect()
    }
}

pub struct EnergyScenario;

impl Scenario for EnergyScenario {
    fn name(&self) -> &'static str {
        "energy"
    }

    fn description(&self) -> &'static str {
        "household PV/battery/grid/gas LP under PV price perturbations"
    }

    fn resolve(&self, config: &Value) -> Result<Value> {
        let cfg: EnergyConfig = parse_config(config)?;
        cfg.validate()?;
        Ok(serde_json::to_value(cfg)?)
    }

    fn run(&self, config: &Value, out_dir: &Path) -> Result<ScenarioResult> {
        let cfg: EnergyConfig = parse_config(config)?;
        cfg.validate()?;
        let solved = cfg.solve_variants()?;
        let rows: Vec<EnergySummary> = solved.iter().map(|(s, _)| s.clone()).collect();
        let max_balance_residual = solved.iter().map(|(_, r)| *r).fold(0.0, f64::max);
        io::write_csv_with(&out_dir.join("comparison.csv"), |buf| write_comparison_csv(&rows, buf))?;
        let summary = json!({
            "rows": rows,
            "max_balance_residual": max_balance_residual,
            "reference_rows": REFERENCE_ROWS,
        });
        Ok(ScenarioResult {
            scenario: self.name().into(),
            seed: None,
            config: config.clone(),
            files: vec!["comparison.csv".into()],
            report: None,
            summary,
            wall_clock_seconds: 0.0,
        })
    }
}
