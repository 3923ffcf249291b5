use serde::{Deserialize, Serialize};

use crate::dpo::{grad_linear_functional_with, NoiseSpec};
use crate::error::{Error, Result};
use crate::hca::{evaluate_h_sum, ConfounderLift};
use crate::lp::{dot, shd, LinearProgram, LinearSolver, SimplexSolver, Solution, Status};
use crate::rng;

/// Denominator floor of the relative cost gap.
const GAP_FLOOR: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepRule {
    /// `w <- w + eps * sign(g)`
    Sign,
    /// `w <- w + eps * g`
    RawGradient,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    MaximizeH,
    MinimizeH,
}

impl Direction {
    fn sign(self) -> f64 {
        match self {
            Direction::MaximizeH => 1.0,
            Direction::MinimizeH => -1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AttackConfig {
    pub epsilon: f64,
    pub steps: usize,
    pub step_rule: StepRule,
    pub direction: Direction,
    pub noise: NoiseSpec,
    pub cost_gap_budget: f64,
    pub stop_on_success: bool,
}

impl Default for AttackConfig {
    fn default() -> Self {
        AttackConfig {
            epsilon: 0.01,
            steps: 50,
            step_rule: StepRule::Sign,
            direction: Direction::MaximizeH,
            noise: NoiseSpec::default(),
            cost_gap_budget: 0.05,
            stop_on_success: true,
        }
    }
}

impl AttackConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon.is_finite() && self.epsilon >= 0.0) {
            return Err(Error::config(format!("attack.epsilon: must be finite and >= 0, got {}", self.epsilon)));
        }
        if !(self.cost_gap_budget.is_finite() && self.cost_gap_budget >= 0.0) {
            return Err(Error::config(format!(
                "attack.cost_gap_budget: must be finite and >= 0, got {}",
                self.cost_gap_budget
            )));
        }
        self.noise.validate().map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("attack.{m}")),
            other => other,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AttackReport {
    pub w: Vec<f64>,
    pub w_hat: Vec<f64>,
    pub x_base: Vec<f64>,
    pub x_adv: Vec<f64>,
    /// Solver status on the perturbed costs.
    pub adv_status: Status,
    /// `<w, x_base>`
    pub cost_base: f64,
    /// `<w_hat, x_adv>`
    pub cost_adv: f64,
    /// `<w, x_adv>`: the adversarial solution priced at the original costs.
    pub cost_adv_at_w: f64,
    pub rel_cost_gap: f64,
    /// `None` when the perturbed LP had no optimal vertex.
    pub shd_codes: Option<usize>,
    pub h_base: f64,
    pub h_adv: f64,
    pub delta_h: f64,
    pub success: bool,
    pub perturbation_norm: f64,
    pub steps_taken: usize,
    pub config: AttackConfig,
}

pub fn attack(lp: &LinearProgram, lift: &ConfounderLift, cfg: &AttackConfig) -> Result<AttackReport> {
    attack_with(&SimplexSolver, lp, lift, cfg, None)
}

/// Iterated sign (or raw) gradient steps on the cost vector, pushing the
/// smoothed `<c, x>` in the configured direction.
///
/// With `groups`, each group of cost indices moves as one parameter (by the
/// step of its summed gradient) and indices outside every group stay fixed.
/// Passing a map's index sets keeps `w_hat` inside the parameterization's
/// image. Without `groups` every coordinate moves on its own.
pub fn attack_with(
    solver: &dyn LinearSolver,
    lp: &LinearProgram,
    lift: &ConfounderLift,
    cfg: &AttackConfig,
    groups: Option<&[Vec<usize>]>,
) -> Result<AttackReport> {
    cfg.validate()?;
    if lift.c.len() != lp.num_vars() {
        return Err(Error::config(format!("lift has length {}, LP has {} variables", lift.c.len(), lp.num_vars())));
    }
    if let Some(groups) = groups {
        if groups.iter().flatten().any(|&j| j >= lp.num_vars()) {
            return Err(Error::config("attack group index out of range"));
        }
    }
    let base = solver.solve(lp)?;
    if !base.is_optimal() {
        return Err(Error::Solver(format!("base LP is {:?}", base.status)));
    }
    let h_base = evaluate_h_sum(&base.x, lift)?;
    let dir = cfg.direction.sign();

    let mut w_hat = lp.w.clone();
    let mut adv = base.clone();
    let mut steps_taken = 0;
    if cfg.epsilon > 0.0 {
        for step in 0..cfg.steps {
            let noise = NoiseSpec {
                seed: rng::derive_seed(cfg.noise.seed, &format!("attack-step-{step}")),
                ..cfg.noise.clone()
            };
            let g = grad_linear_functional_with(solver, &lp.with_costs(w_hat.clone())?, &lift.c, &noise)?;
            let step_of = |v: f64| match cfg.step_rule {
                StepRule::Sign => sign(v),
                StepRule::RawGradient => v,
            };
            match groups {
                None => {
                    for (wj, gj) in w_hat.iter_mut().zip(&g) {
                        *wj += cfg.epsilon * dir * step_of(*gj);
                    }
                }
                Some(groups) => {
                    for group in groups {
                        let delta = step_of(group.iter().map(|&j| g[j]).sum());
                        for &j in group {
                            w_hat[j] += cfg.epsilon * dir * delta;
                        }
                    }
                }
            }
            steps_taken = step + 1;
            adv = solver.solve(&lp.with_costs(w_hat.clone())?)?;
            if cfg.stop_on_success && report(lp, lift, cfg, &base, h_base, &w_hat, &adv, steps_taken)?.success {
                break;
            }
        }
    }
    report(lp, lift, cfg, &base, h_base, &w_hat, &adv, steps_taken)
}

fn sign(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

#[allow(clippy::too_many_arguments)]
fn report(
    lp: &LinearProgram,
    lift: &ConfounderLift,
    cfg: &AttackConfig,
    base: &Solution,
    h_base: f64,
    w_hat: &[f64],
    adv: &Solution,
    steps_taken: usize,
) -> Result<AttackReport> {
    let cost_base = dot(&lp.w, &base.x);
    let optimal = adv.is_optimal();
    let x_adv = if optimal { adv.x.clone() } else { vec![0.0; lp.num_vars()] };
    let cost_adv = if optimal { dot(w_hat, &x_adv) } else { f64::NAN };
    let cost_adv_at_w = if optimal { dot(&lp.w, &x_adv) } else { f64::NAN };
    let rel_cost_gap = (cost_adv - cost_base).abs() / cost_base.abs().max(GAP_FLOOR);
    let (shd_codes, h_adv) =
        if optimal { (Some(shd(&base.x, &x_adv)?), evaluate_h_sum(&x_adv, lift)?) } else { (None, h_base) };
    let delta_h = h_adv - h_base;
    let success =
        shd_codes.is_some_and(|d| d > 0) && cfg.direction.sign() * delta_h > 0.0 && rel_cost_gap <= cfg.cost_gap_budget;
    let perturbation_norm = lp.w.iter().zip(w_hat).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    Ok(AttackReport {
        w: lp.w.clone(),
        w_hat: w_hat.to_vec(),
        x_base: base.x.clone(),
        x_adv,
        adv_status: adv.status,
        cost_base,
        cost_adv,
        cost_adv_at_w,
        rel_cost_gap,
        shd_codes,
        h_base,
        h_adv,
        delta_h,
        success,
        perturbation_norm,
        steps_taken,
        config: cfg.clone(),
    })
}
