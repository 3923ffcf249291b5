use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hca::{attack_with, check_integral, lift_confounder, AttackConfig, AttackReport, Parameterization};
use crate::lp::SimplexSolver;
use crate::scm::{adversary_view, hidden_confounders, DataSet, Scm};

/// Everything `hca_witness` needs to run one scenario end to end.
pub trait ScenarioBundle: Send + Sync {
    fn name(&self) -> &str;
    /// Confounder of the true model that the adversary reads.
    fn confounder(&self) -> &str;
    fn policy(&self) -> &dyn Parameterization;
    fn dataset(&self, scm_observed: &Scm, seed: u64) -> Result<DataSet>;
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum WitnessOutcome {
    Witness {
        seed: u64,
        report: Box<AttackReport>,
    },
    /// The observed model has no hidden confounder, so there is nothing to lift.
    NoAttackCertificate {
        scm: String,
    },
    NotFound {
        seeds_tried: Vec<u64>,
    },
}

/// Runs sample, parameterize, lift and attack over `seeds` and returns the
/// successful report with the lowest seed.
pub fn hca_witness(
    scm_true: &Scm,
    scm_observed: &Scm,
    bundle: &dyn ScenarioBundle,
    seeds: &[u64],
    cfg: &AttackConfig,
) -> Result<WitnessOutcome> {
    cfg.validate()?;
    let policy = bundle.policy();
    let integral = |seed: u64| -> Result<_> {
        let ds = bundle.dataset(scm_observed, seed)?;
        let (w, map) = crate::hca::parameterize(&ds, policy)?;
        if !check_integral(&map, &ds, &w) {
            return Err(Error::Precondition(format!(
                "parameterization of `{}` is not integral (seed {seed})",
                bundle.name()
            )));
        }
        Ok((ds, w, map))
    };

    if hidden_confounders(scm_observed).is_empty() {
        if let Some(&seed) = seeds.first() {
            integral(seed)?;
        }
        return Ok(WitnessOutcome::NoAttackCertificate { scm: scm_observed.name().to_string() });
    }

    let first = seeds.par_iter().find_map_first(|&seed| {
        let run = || -> Result<Option<AttackReport>> {
            let (ds, w, map) = integral(seed)?;
            let view = adversary_view(scm_true, &ds, bundle.confounder())?;
            let lift = lift_confounder(&view, &map, policy.family())?;
            let lp = policy.build_lp(&w)?;
            let cfg = AttackConfig { noise: crate::dpo::NoiseSpec { seed, ..cfg.noise.clone() }, ..cfg.clone() };
            let report = attack_with(&SimplexSolver, &lp, &lift, &cfg, Some(&map.active_sets))?;
            Ok(report.success.then_some(report))
        };
        match run() {
            Ok(Some(report)) => Some(Ok((seed, report))),
            Ok(None) => None,
            Err(e) => Some(Err(e)),
        }
    });
    match first {
        Some(Ok((seed, report))) => Ok(WitnessOutcome::Witness { seed, report: Box::new(report) }),
        Some(Err(e)) => Err(e),
        None => Ok(WitnessOutcome::NotFound { seeds_tried: seeds.to_vec() }),
    }
}
