//! Single-household energy portfolio LP (PV, battery, grid electricity, gas),
//! unrolled hour by hour.
//!
//! Variables: `Cap_PV` (kW), `Cap_Bat` (kWh), then per hour `t = 1..=T` the
//! block `p_Ele, p_PV, p_in_Bat, p_out_Bat, p_S_Bat, p_Gas` (kWh).
//!
//! Constraints per hour:
//! - balance `p_Ele + p_PV + p_out - p_in + p_Gas = D(t)`
//! - storage `p_S(t) = p_S(t-1) + p_in(t) - p_out(t)`, `p_S(0) = 0`
//! - `p_PV(t) <= Cap_PV * avail_PV(t) * dt` with `dt = 1 h`
//! - `p_in(t), p_out(t), p_S(t) <= Cap_Bat`
//! - `0 <= p_Gas(t) <= U_Gas`

use std::f64::consts::PI;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lp::model::{Bounds, LinearProgram, Sense, Solution};

pub const HOURS_PER_YEAR: usize = 8760;
const DT_HOURS: f64 = 1.0;
const BLOCK: usize = 6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnergyParams {
    /// EUR per kW of PV capacity.
    pub c_pv: f64,
    /// EUR per kWh of battery capacity.
    pub c_bat: f64,
    /// EUR per kWh of grid electricity.
    pub c_ele: f64,
    /// EUR per kWh of gas.
    pub c_gas: f64,
    /// Gas limit per hour (kWh).
    pub u_gas: f64,
    /// Total demand over the horizon (kWh).
    pub annual_demand: f64,
}

impl Default for EnergyParams {
    /// First parameter row of the reference study; `u_gas` is not part of it.
    fn default() -> Self {
        EnergyParams { c_pv: 0.005, c_bat: 300.0, c_ele: 0.25, c_gas: 0.25, u_gas: 0.1, annual_demand: 3000.0 }
    }
}

impl EnergyParams {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("c_pv", self.c_pv),
            ("c_bat", self.c_bat),
            ("c_ele", self.c_ele),
            ("c_gas", self.c_gas),
            ("u_gas", self.u_gas),
            ("annual_demand", self.annual_demand),
        ];
        for (name, v) in fields {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::config(format!("energy.{name}: must be finite and non-negative, got {v}")));
            }
        }
        Ok(())
    }
}

/// Hourly demand (kWh) and PV availability in `[0, 1]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyProfiles {
    pub demand: Vec<f64>,
    pub avail_pv: Vec<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
struct ProfileRecord {
    t: usize,
    demand_kwh: f64,
    avail_pv: f64,
}

impl EnergyProfiles {
    /// Synthetic profiles: a daily demand wave peaking in the evening,
    /// scaled to sum to `total`, and half-sine PV availability between 06:00
    /// and 18:00.
    pub fn synthetic(hours: usize, total: f64) -> Self {
        let shape: Vec<f64> = (0..hours)
            .map(|t| {
                let h = (t % 24) as f64;
                1.0 + 0.35 * (2.0 * PI * (h - 13.0) / 24.0).sin() + 0.15 * (4.0 * PI * h / 24.0).cos()
            })
            .collect();
        let sum: f64 = shape.iter().sum();
        let demand = shape.iter().map(|s| total * s / sum).collect();
        let avail_pv = (0..hours)
            .map(|t| {
                let h = (t % 24) as f64;
                if (6.0..=18.0).contains(&h) {
                    (PI * (h - 6.0) / 12.0).sin().max(0.0)
                } else {
                    0.0
                }
            })
            .collect();
        EnergyProfiles { demand, avail_pv }
    }

    pub fn hours(&self) -> usize {
        self.demand.len()
    }

    pub fn validate(&self, total: f64) -> Result<()> {
        let t = self.demand.len();
        if t == 0 {
            return Err(Error::config("energy profiles must cover at least one hour"));
        }
        if self.avail_pv.len() != t {
            return Err(Error::config(format!("demand has {t} hours but PV availability has {}", self.avail_pv.len())));
        }
        if self.demand.iter().any(|d| !d.is_finite() || *d < 0.0) {
            return Err(Error::config("hourly demand must be finite and non-negative"));
        }
        if self.avail_pv.iter().any(|a| !(0.0..=1.0).contains(a)) {
            return Err(Error::config("PV availability must lie in [0, 1]"));
        }
        let sum: f64 = self.demand.iter().sum();
        if (sum - total).abs() > 1e-6 * total.abs().max(1e-12) {
            return Err(Error::config(format!("hourly demand sums to {sum}, configured total is {total}")));
        }
        Ok(())
    }

    /// Reads `t,demand_kwh,avail_pv` rows; `t` must run 1, 2, ...
    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let mut demand = Vec::new();
        let mut avail_pv = Vec::new();
        for (i, rec) in rdr.deserialize::<ProfileRecord>().enumerate() {
            let rec = rec?;
            if rec.t != i + 1 {
                return Err(Error::config(format!("profile row {}: expected t = {}, got {}", i + 1, i + 1, rec.t)));
            }
            demand.push(rec.demand_kwh);
            avail_pv.push(rec.avail_pv);
        }
        Ok(EnergyProfiles { demand, avail_pv })
    }

    pub fn load(path: &Path) -> Result<Self> {
        EnergyProfiles::read_csv(std::fs::File::open(path)?)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for (i, (d, a)) in self.demand.iter().zip(&self.avail_pv).enumerate() {
            w.serialize(ProfileRecord { t: i + 1, demand_kwh: *d, avail_pv: *a })?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Variable layout of an energy LP.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EnergyLayout {
    pub hours: usize,
}

impl EnergyLayout {
    pub const CAP_PV: usize = 0;
    pub const CAP_BAT: usize = 1;

    fn at(&self, t: usize, offset: usize) -> usize {
        debug_assert!(t < self.hours);
        2 + BLOCK * t + offset
    }

    /// Hour `t` is zero-based here; labels are one-based.
    pub fn p_ele(&self, t: usize) -> usize {
        self.at(t, 0)
    }
    pub fn p_pv(&self, t: usize) -> usize {
        self.at(t, 1)
    }
    pub fn p_in(&self, t: usize) -> usize {
        self.at(t, 2)
    }
    pub fn p_out(&self, t: usize) -> usize {
        self.at(t, 3)
    }
    pub fn p_store(&self, t: usize) -> usize {
        self.at(t, 4)
    }
    pub fn p_gas(&self, t: usize) -> usize {
        self.at(t, 5)
    }
    pub fn num_vars(&self) -> usize {
        2 + BLOCK * self.hours
    }
}

pub fn build_energy_lp(params: &EnergyParams, profiles: &EnergyProfiles) -> Result<(LinearProgram, EnergyLayout)> {
    params.validate()?;
    profiles.validate(params.annual_demand)?;
    let layout = EnergyLayout { hours: profiles.hours() };
    let k = layout.num_vars();

    let mut w = vec![0.0; k];
    w[EnergyLayout::CAP_PV] = params.c_pv;
    w[EnergyLayout::CAP_BAT] = params.c_bat;
    let mut labels = vec!["Cap_PV".to_string(), "Cap_Bat".to_string()];
    for t in 0..layout.hours {
        w[layout.p_ele(t)] = params.c_ele;
        w[layout.p_gas(t)] = params.c_gas;
        for name in ["p_Ele", "p_PV", "p_in_Bat", "p_out_Bat", "p_S_Bat", "p_Gas"] {
            labels.push(format!("{name}[t={}]", t + 1));
        }
    }
    let mut lp = LinearProgram::new(Sense::Minimize, w);
    lp.labels = labels;

    for t in 0..layout.hours {
        let mut row = vec![0.0; k];
        row[layout.p_ele(t)] = 1.0;
        row[layout.p_pv(t)] = 1.0;
        row[layout.p_out(t)] = 1.0;
        row[layout.p_in(t)] = -1.0;
        row[layout.p_gas(t)] = 1.0;
        lp.add_eq(row, profiles.demand[t]);

        let mut row = vec![0.0; k];
        row[layout.p_store(t)] = 1.0;
        if t > 0 {
            row[layout.p_store(t - 1)] = -1.0;
        }
        row[layout.p_in(t)] = -1.0;
        row[layout.p_out(t)] = 1.0;
        lp.add_eq(row, 0.0);

        let mut row = vec![0.0; k];
        row[layout.p_pv(t)] = 1.0;
        row[EnergyLayout::CAP_PV] = -profiles.avail_pv[t] * DT_HOURS;
        lp.add_le(row, 0.0);

        for var in [layout.p_in(t), layout.p_out(t), layout.p_store(t)] {
            let mut row = vec![0.0; k];
            row[var] = 1.0;
            row[EnergyLayout::CAP_BAT] = -1.0;
            lp.add_le(row, 0.0);
        }
        lp.bounds[layout.p_gas(t)] = Bounds::new(0.0, params.u_gas);
    }
    Ok((lp, layout))
}

/// One row of the technology comparison table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergySummary {
    pub cap_pv: f64,
    pub cap_bat: f64,
    /// Share of demand covered by PV generation.
    pub self_gen: f64,
    pub totex: f64,
    pub capex: f64,
    pub con_gas: f64,
    pub con_ele: f64,
    pub w_pv: f64,
}

impl EnergySummary {
    pub fn from_solution(params: &EnergyParams, layout: &EnergyLayout, sol: &Solution) -> Self {
        let x = &sol.x;
        let sum = |f: fn(&EnergyLayout, usize) -> usize| (0..layout.hours).map(|t| x[f(layout, t)]).sum::<f64>();
        let cap_pv = x[EnergyLayout::CAP_PV];
        let cap_bat = x[EnergyLayout::CAP_BAT];
        let pv = sum(EnergyLayout::p_pv);
        let con_ele = sum(EnergyLayout::p_ele);
        let con_gas = sum(EnergyLayout::p_gas);
        let capex = params.c_pv * cap_pv + params.c_bat * cap_bat;
        EnergySummary {
            cap_pv,
            cap_bat,
            self_gen: if params.annual_demand > 0.0 { pv / params.annual_demand } else { 0.0 },
            totex: sol.objective,
            capex,
            con_gas,
            con_ele,
            w_pv: params.c_pv,
        }
    }
}

/// Column order of the comparison table.
pub const COMPARISON_HEADER: [&str; 8] =
    ["Cap_PV", "Cap_Bat", "Self-Gen", "TOTEX", "CAPEX", "Con_Gas", "Con_Ele", "w_PV"];

pub fn write_comparison_csv<W: Write>(rows: &[EnergySummary], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(COMPARISON_HEADER)?;
    for r in rows {
        w.write_record(
            [r.cap_pv, r.cap_bat, r.self_gen, r.totex, r.capex, r.con_gas, r.con_ele, r.w_pv].map(|v| v.to_string()),
        )?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::simplex::solve;
    use approx::assert_abs_diff_eq;

    #[test]
    fn single_hour_grid_only() {
        let params = EnergyParams { u_gas: 0.0, annual_demand: 1.0, ..EnergyParams::default() };
        let profiles = EnergyProfiles { demand: vec![1.0], avail_pv: vec![0.0] };
        let (lp, layout) = build_energy_lp(&params, &profiles).unwrap();
        let sol = solve(&lp).unwrap();
        assert!(sol.is_optimal());
        assert_abs_diff_eq!(sol.x[layout.p_ele(0)], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(sol.objective, params.c_ele, epsilon = 1e-12);
    }

    #[test]
    fn table_row_builds() {
        let params = EnergyParams::default();
        let profiles = EnergyProfiles::synthetic(24, params.annual_demand);
        let (lp, layout) = build_energy_lp(&params, &profiles).unwrap();
        assert_eq!(lp.num_vars(), layout.num_vars());
        assert_eq!(lp.label(layout.p_ele(16)), "p_Ele[t=17]");
    }

    #[test]
    fn rejects_bad_inputs() {
        let profiles = EnergyProfiles::synthetic(24, 3000.0);
        let neg = EnergyParams { c_ele: -1.0, ..EnergyParams::default() };
        assert!(build_energy_lp(&neg, &profiles).is_err());
        let wrong_total = EnergyParams { annual_demand: 10.0, ..EnergyParams::default() };
        assert!(build_energy_lp(&wrong_total, &profiles).is_err());
    }

    #[test]
    fn synthetic_profiles_sum_to_total() {
        let p = EnergyProfiles::synthetic(168, 3000.0);
        assert_abs_diff_eq!(p.demand.iter().sum::<f64>(), 3000.0, epsilon = 1e-9);
        assert!(p.avail_pv.iter().all(|a| (0.0..=1.0).contains(a)));
        let mut buf = Vec::new();
        p.write_csv(&mut buf).unwrap();
        assert_eq!(EnergyProfiles::read_csv(buf.as_slice()).unwrap(), p);
    }
}
