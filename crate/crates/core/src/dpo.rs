//! Perturbed optimizer: Monte-Carlo smoothing of `x*(w)` under cost noise and
//! score-function gradients of linear functionals of the smoothed solution.

use rand::Rng;
use rand_distr::{Distribution, Gumbel, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lp::{dot, LinearProgram, LinearSolver, SimplexSolver, Solution};
use crate::rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseFamily {
    StandardNormal,
    Gumbel,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseSpec {
    pub family: NoiseFamily,
    /// Temperature, in cost units.
    pub sigma: f64,
    pub n_samples: usize,
    pub seed: u64,
}

impl Default for NoiseSpec {
    fn default() -> Self {
        NoiseSpec { family: NoiseFamily::StandardNormal, sigma: 0.5, n_samples: 15, seed: 0 }
    }
}

impl NoiseSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma.is_finite() && self.sigma > 0.0) {
            return Err(Error::config(format!("noise.sigma: must be positive, got {}", self.sigma)));
        }
        if self.n_samples == 0 {
            return Err(Error::config("noise.n_samples: must be at least 1"));
        }
        Ok(())
    }

    /// Noise vector `z_k` of length `dim`, drawn from stream `k`.
    pub fn draw(&self, k: usize, dim: usize) -> Vec<f64> {
        let mut rng = rng::stream(self.seed, k as u64);
        match self.family {
            NoiseFamily::StandardNormal => (0..dim).map(|_| rng.sample(StandardNormal)).collect(),
            NoiseFamily::Gumbel => {
                let g = Gumbel::new(0.0, 1.0).expect("unit Gumbel");
                (0..dim).map(|_| g.sample(&mut rng)).collect()
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PerturbedSolution {
    /// Mean of the vertices returned for `w + sigma z_k` over successful samples.
    pub mean_x: Vec<f64>,
    /// Vertex of each successful sample, in sample order.
    pub samples: Vec<Vec<f64>>,
    pub seed: u64,
    /// Samples whose perturbed LP was not solved to optimality.
    pub failed: usize,
}

fn perturbed(lp: &LinearProgram, w_shift: &[f64], z: &[f64], sigma: f64) -> LinearProgram {
    let w = lp.w.iter().zip(w_shift).zip(z).map(|((w, d), z)| w + d + sigma * z).collect();
    LinearProgram { w, ..lp.clone() }
}

/// Solves every perturbed instance, returning per-sample noise and solution in
/// sample order (`None` where the instance was not optimal).
fn solve_samples(
    solver: &dyn LinearSolver,
    lp: &LinearProgram,
    noise: &NoiseSpec,
) -> Result<Vec<(Vec<f64>, Option<Solution>)>> {
    noise.validate()?;
    lp.validate()?;
    let zero = vec![0.0; lp.num_vars()];
    (0..noise.n_samples)
        .into_par_iter()
        .map(|k| {
            let z = noise.draw(k, lp.num_vars());
            let sol = solver.solve(&perturbed(lp, &zero, &z, noise.sigma))?;
            Ok((z, sol.is_optimal().then_some(sol)))
        })
        .collect()
}

pub fn perturbed_argmax(lp: &LinearProgram, noise: &NoiseSpec) -> Result<PerturbedSolution> {
    perturbed_argmax_with(&SimplexSolver, lp, noise)
}

pub fn perturbed_argmax_with(
    solver: &dyn LinearSolver,
    lp: &LinearProgram,
    noise: &NoiseSpec,
) -> Result<PerturbedSolution> {
    let runs = solve_samples(solver, lp, noise)?;
    let samples: Vec<Vec<f64>> = runs.into_iter().filter_map(|(_, s)| s.map(|s| s.x)).collect();
    let failed = noise.n_samples - samples.len();
    if failed > 0 {
        log::warn!("{failed} of {} perturbed instances were not optimal", noise.n_samples);
    }
    if samples.is_empty() {
        return Err(Error::Solver("no perturbed instance was solved to optimality".into()));
    }
    let mut mean_x = vec![0.0; lp.num_vars()];
    for x in &samples {
        for (m, v) in mean_x.iter_mut().zip(x) {
            *m += v;
        }
    }
    let n = samples.len() as f64;
    mean_x.iter_mut().for_each(|m| *m /= n);
    Ok(PerturbedSolution { mean_x, samples, seed: noise.seed, failed })
}

/// Score-function estimate of `grad_w E[<c, x*(w + sigma z)>]`:
/// `g = 1/(N sigma) sum_k (<c, x_k> - beta) z_k` with `beta = <c, x*(w)>`.
pub fn grad_linear_functional(lp: &LinearProgram, c: &[f64], noise: &NoiseSpec) -> Result<Vec<f64>> {
    grad_linear_functional_with(&SimplexSolver, lp, c, noise)
}

pub fn grad_linear_functional_with(
    solver: &dyn LinearSolver,
    lp: &LinearProgram,
    c: &[f64],
    noise: &NoiseSpec,
) -> Result<Vec<f64>> {
    if noise.family != NoiseFamily::StandardNormal {
        return Err(Error::UnsupportedEstimator("the score-function gradient needs standard-normal noise".into()));
    }
    check_len(lp, c)?;
    let base = solver.solve(lp)?;
    if !base.is_optimal() {
        return Err(Error::Solver(format!("base LP is {:?}", base.status)));
    }
    let beta = dot(c, &base.x);
    let runs = solve_samples(solver, lp, noise)?;
    let mut g = vec![0.0; lp.num_vars()];
    let mut used = 0usize;
    for (z, sol) in runs {
        let Some(sol) = sol else { continue };
        used += 1;
        let weight = dot(c, &sol.x) - beta;
        if weight != 0.0 {
            for (gj, zj) in g.iter_mut().zip(&z) {
                *gj += weight * zj;
            }
        }
    }
    if used == 0 {
        return Err(Error::Solver("no perturbed instance was solved to optimality".into()));
    }
    let scale = 1.0 / (used as f64 * noise.sigma);
    g.iter_mut().for_each(|v| *v *= scale);
    Ok(g)
}

/// Central differences of the smoothed functional with common random numbers:
/// the same `z_k` is used at `w + h e_j` and `w - h e_j`.
pub fn finite_diff_grad(lp: &LinearProgram, c: &[f64], noise: &NoiseSpec, h: f64) -> Result<Vec<f64>> {
    finite_diff_grad_with(&SimplexSolver, lp, c, noise, h)
}

pub fn finite_diff_grad_with(
    solver: &dyn LinearSolver,
    lp: &LinearProgram,
    c: &[f64],
    noise: &NoiseSpec,
    h: f64,
) -> Result<Vec<f64>> {
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::config(format!("finite-difference step must be positive, got {h}")));
    }
    noise.validate()?;
    check_len(lp, c)?;
    let k = lp.num_vars();
    let per_sample: Vec<Vec<f64>> = (0..noise.n_samples)
        .into_par_iter()
        .map(|s| {
            let z = noise.draw(s, k);
            let mut shift = vec![0.0; k];
            let mut diff = vec![0.0; k];
            for j in 0..k {
                shift[j] = h;
                let plus = solver.solve(&perturbed(lp, &shift, &z, noise.sigma))?;
                shift[j] = -h;
                let minus = solver.solve(&perturbed(lp, &shift, &z, noise.sigma))?;
                shift[j] = 0.0;
                if !(plus.is_optimal() && minus.is_optimal()) {
                    return Err(Error::Solver(format!("perturbed instance {s} is not optimal")));
                }
                diff[j] = dot(c, &plus.x) - dot(c, &minus.x);
            }
            Ok(diff)
        })
        .collect::<Result<_>>()?;
    let mut g = vec![0.0; k];
    for diff in &per_sample {
        for (gj, d) in g.iter_mut().zip(diff) {
            *gj += d;
        }
    }
    let scale = 1.0 / (noise.n_samples as f64 * 2.0 * h);
    g.iter_mut().for_each(|v| *v *= scale);
    Ok(g)
}

fn check_len(lp: &LinearProgram, c: &[f64]) -> Result<()> {
    if c.len() != lp.num_vars() {
        return Err(Error::config(format!("functional has length {}, LP has {} variables", c.len(), lp.num_vars())));
    }
    Ok(())
}

pub fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let na = dot(a, a).sqrt();
    let nb = dot(b, b).sqrt();
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    dot(a, b) / (na * nb)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::{build_assignment_lp, solve, AssignmentEnumerator, Bounds, Sense};
    use approx::assert_abs_diff_eq;

    fn spec(sigma: f64, n: usize) -> NoiseSpec {
        NoiseSpec { sigma, n_samples: n, seed: 11, ..NoiseSpec::default() }
    }

    #[test]
    fn zero_temperature_limit() {
        let cost = vec![vec![3.0, 1.0, 0.5], vec![0.2, 2.0, 1.0], vec![1.0, 0.1, 4.0]];
        let (lp, _) = build_assignment_lp(&cost, Sense::Maximize, true).unwrap();
        let mean = perturbed_argmax(&lp, &spec(1e-12, 20)).unwrap().mean_x;
        let x = solve(&lp).unwrap().x;
        for (a, b) in mean.iter().zip(&x) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-6);
        }
    }

    #[test]
    fn symmetric_assignment_mean_is_half() {
        let (lp, _) = build_assignment_lp(&[vec![1.0, 1.0], vec![1.0, 1.0]], Sense::Maximize, true).unwrap();
        let mean = perturbed_argmax(&lp, &spec(1.0, 10_000)).unwrap().mean_x;
        for m in mean {
            assert!((m - 0.5).abs() <= 0.02, "{m}");
        }
    }

    #[test]
    fn zero_functional_and_gumbel() {
        let (lp, _) = build_assignment_lp(&[vec![1.0, 2.0], vec![2.0, 1.0]], Sense::Maximize, true).unwrap();
        let g = grad_linear_functional(&lp, &[0.0; 4], &spec(0.5, 50)).unwrap();
        assert_eq!(g, vec![0.0; 4]);
        assert_eq!(finite_diff_grad(&lp, &[0.0; 4], &spec(0.5, 10), 0.01).unwrap(), vec![0.0; 4]);
        let gumbel = NoiseSpec { family: NoiseFamily::Gumbel, ..spec(0.5, 10) };
        assert!(matches!(grad_linear_functional(&lp, &[1.0; 4], &gumbel), Err(Error::UnsupportedEstimator(_))));
        assert!(perturbed_argmax(&lp, &gumbel).is_ok());
    }

    #[test]
    fn gradient_is_linear_in_c() {
        let (lp, _) = build_assignment_lp(&[vec![1.0, 1.2], vec![1.1, 1.0]], Sense::Maximize, true).unwrap();
        let c = [1.0, 0.0, 0.0, 2.0];
        let g = grad_linear_functional(&lp, &c, &spec(0.5, 500)).unwrap();
        let c3: Vec<f64> = c.iter().map(|v| 3.0 * v).collect();
        let g3 = grad_linear_functional(&lp, &c3, &spec(0.5, 500)).unwrap();
        for (a, b) in g.iter().zip(&g3) {
            assert_abs_diff_eq!(3.0 * a, b, epsilon = 1e-12);
        }
    }

    #[test]
    fn one_variable_finite_difference_matches_density() {
        // max w x, 0 <= x <= 1: E[x] = Phi(w / sigma), derivative phi(w / sigma) / sigma.
        let mut lp = LinearProgram::new(Sense::Maximize, vec![0.3]);
        lp.bounds = vec![Bounds::new(0.0, 1.0)];
        let sigma = 1.0;
        let fd = finite_diff_grad(&lp, &[1.0], &spec(sigma, 200_000), 0.05).unwrap()[0];
        let t: f64 = 0.3 / sigma;
        let exact = (-0.5 * t * t).exp() / (2.0 * std::f64::consts::PI).sqrt() / sigma;
        assert!((fd - exact).abs() < 0.02, "fd {fd} exact {exact}");
    }

    #[test]
    fn pluggable_solver_agrees() {
        let cost = vec![vec![0.3, 0.1, 0.9], vec![0.5, 0.4, 0.2], vec![0.8, 0.6, 0.1]];
        let (lp, _) = build_assignment_lp(&cost, Sense::Maximize, true).unwrap();
        let a = perturbed_argmax(&lp, &spec(0.3, 200)).unwrap();
        let b = perturbed_argmax_with(&AssignmentEnumerator, &lp, &spec(0.3, 200)).unwrap();
        for (p, q) in a.mean_x.iter().zip(&b.mean_x) {
            assert_abs_diff_eq!(p, q, epsilon = 1e-9);
        }
    }
}
