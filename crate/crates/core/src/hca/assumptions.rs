use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lp::{dot, enumerate_alternate_optima, solve, LinearProgram, Sense, Solution, INTEGRALITY_TOL};
use crate::rng;

/// A witness, or the lack of one within the search budget.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Finding {
    pub found: bool,
    /// Which candidate produced the witness.
    pub source: Option<String>,
    pub w_hat: Option<Vec<f64>>,
}

impl Finding {
    fn witness(source: String, w_hat: &[f64]) -> Self {
        Finding { found: true, source: Some(source), w_hat: Some(w_hat.to_vec()) }
    }
}

/// Outcome of the bounded search around `w`. `found = false` means only
/// that nothing turned up within the budget.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AssumptionDiagnostics {
    pub radius: f64,
    pub trials: usize,
    pub seed: u64,
    /// Some cost in the ball has several optimal vertices.
    pub multiple_optima: Finding,
    /// Some cost in the ball makes the solver return a different vertex.
    pub solution_change: Finding,
    pub candidates_checked: usize,
}

fn has_alternates(lp: &LinearProgram, sol: &Solution) -> Result<bool> {
    Ok(sol.is_optimal() && enumerate_alternate_optima(lp, sol, 2)?.len() > 1)
}

fn differs(a: &[f64], b: &[f64]) -> bool {
    a.iter().zip(b).any(|(p, q)| (p - q).abs() > INTEGRALITY_TOL)
}

/// Searches the sup-norm ball of `radius` around `lp.w`: first `w` itself,
/// then the corner that penalizes the current solution, then `trials`
/// uniform draws. Whenever a candidate changes the solution, the point on the
/// segment where both vertices tie is tested for multiple optima too.
pub fn verify_assumptions(lp: &LinearProgram, radius: f64, trials: usize, seed: u64) -> Result<AssumptionDiagnostics> {
    if !(radius.is_finite() && radius > 0.0) {
        return Err(Error::config(format!("radius must be positive, got {radius}")));
    }
    let base = solve(lp)?;
    if !base.is_optimal() {
        return Err(Error::Solver(format!("base LP is {:?}", base.status)));
    }
    let mut diag = AssumptionDiagnostics {
        radius,
        trials,
        seed,
        multiple_optima: Finding::default(),
        solution_change: Finding::default(),
        candidates_checked: 1,
    };
    if has_alternates(lp, &base)? {
        diag.multiple_optima = Finding::witness("w".into(), &lp.w);
    }

    let worse = match lp.sense {
        Sense::Maximize => -radius,
        Sense::Minimize => radius,
    };
    let corner: Vec<f64> =
        lp.w.iter().zip(&base.x).map(|(w, x)| if *x > 0.5 { w + worse } else { w - worse }).collect();
    let trial_seed = rng::derive_seed(seed, "verify-assumptions");
    let candidates = std::iter::once(("corner".to_string(), corner)).chain((0..trials).map(|t| {
        let mut r = rng::stream(trial_seed, t as u64);
        let w: Vec<f64> = lp.w.iter().map(|w| w + radius * r.gen_range(-1.0..=1.0)).collect();
        (format!("trial {t}"), w)
    }));

    for (label, w_hat) in candidates {
        if diag.multiple_optima.found && diag.solution_change.found {
            break;
        }
        diag.candidates_checked += 1;
        let lp_hat = lp.with_costs(w_hat.clone())?;
        let sol = solve(&lp_hat)?;
        if !sol.is_optimal() {
            continue;
        }
        let changed = differs(&sol.x, &base.x);
        if changed && !diag.solution_change.found {
            diag.solution_change = Finding::witness(label.clone(), &w_hat);
        }
        if diag.multiple_optima.found {
            continue;
        }
        if has_alternates(&lp_hat, &sol)? {
            diag.multiple_optima = Finding::witness(label, &w_hat);
        } else if changed {
            // <w(l), x_base - x_hat> is linear in l; its root is the tie point.
            let d: Vec<f64> = base.x.iter().zip(&sol.x).map(|(a, b)| a - b).collect();
            let (a, b) = (dot(&lp.w, &d), dot(&w_hat, &d));
            if a != b {
                let l = (a / (a - b)).clamp(0.0, 1.0);
                let w_mid: Vec<f64> = lp.w.iter().zip(&w_hat).map(|(p, q)| p + l * (q - p)).collect();
                let lp_mid = lp.with_costs(w_mid.clone())?;
                if has_alternates(&lp_mid, &solve(&lp_mid)?)? {
                    diag.multiple_optima = Finding::witness(format!("tie point of {label}"), &w_mid);
                }
            }
        }
    }
    Ok(diag)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::{build_assignment_lp, build_shortest_path_lp, Graph};

    #[test]
    fn equal_costs_witness_at_w() {
        let (lp, _) = build_assignment_lp(&vec![vec![1.0; 3]; 3], Sense::Maximize, true).unwrap();
        let d = verify_assumptions(&lp, 0.01, 10, 1).unwrap();
        assert!(d.multiple_optima.found);
        assert_eq!(d.multiple_optima.source.as_deref(), Some("w"));
    }

    #[test]
    fn small_gap_flips_the_path() {
        let mut g = Graph::new();
        g.add_edge("s", "a", 1.0, None);
        g.add_edge("a", "t", 1.0, None);
        g.add_edge("s", "b", 1.0, None);
        g.add_edge("b", "t", 1.005, None);
        let (lp, _) = build_shortest_path_lp(&g, "s", "t").unwrap();
        let d = verify_assumptions(&lp, 0.01, 20, 2).unwrap();
        assert!(d.solution_change.found);
        assert!(d.multiple_optima.found);
        let w_hat = d.solution_change.w_hat.unwrap();
        assert!(w_hat.iter().zip(&lp.w).all(|(a, b)| (a - b).abs() <= 0.01 + 1e-15));
    }
}
