use std::collections::BTreeSet;

use hca_core::dpo::{cosine, finite_diff_grad_with, grad_linear_functional, NoiseSpec};
use hca_core::hca::{
    evaluate_h_sum, hca_witness, lift_confounder, parameterize, verify_assumptions, Parameterization, ProblemFamily,
    VaccinationPolicy, WitnessOutcome,
};
use hca_core::lp::{
    build_assignment_lp, build_energy_lp, dot, enumerate_alternate_optima, shd, solve, AssignmentEnumerator,
    EnergyLayout, EnergyParams, EnergyProfiles, Sense, TAU_FEAS,
};
use hca_core::scenarios::{run_scenario, Registry, ShortestPathConfig};
use hca_core::scm::{
    adversary_view, is_causally_sufficient, road_observed, road_true, sample, vaccination_observed, vaccination_true,
    VaccinationScmParams, WEALTH,
};
use proptest::prelude::*;
use serde_json::json;

/// Optimal permutations of a small matrix, found by trying all of them.
fn optimal_permutations(cost: &[Vec<f64>]) -> (f64, f64, BTreeSet<Vec<usize>>) {
    let n = cost.len();
    let mut perms = vec![vec![0usize]];
    for k in 1..n {
        perms = perms
            .into_iter()
            .flat_map(|p| {
                (0..=k).map(move |pos| {
                    let mut q = p.clone();
                    q.insert(pos, k);
                    q
                })
            })
            .collect();
    }
    let mut scored: Vec<(f64, Vec<usize>)> =
        perms.into_iter().map(|p| (p.iter().enumerate().map(|(i, &j)| cost[i][j]).sum(), p)).collect();
    scored.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    let best = scored[0].0;
    let second = scored.iter().map(|s| s.0).find(|v| best - v > 1e-9).unwrap_or(f64::NEG_INFINITY);
    let optimal = scored.into_iter().filter(|s| best - s.0 <= 1e-9).map(|s| s.1).collect();
    (best, second, optimal)
}

fn as_perm(x: &[f64], n: usize) -> Vec<usize> {
    (0..n).map(|i| (0..n).find(|&j| x[i * n + j] > 0.5).unwrap()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 40, ..ProptestConfig::default() })]

    // Small integer costs produce plenty of ties.
    #[test]
    fn alternate_optima_match_enumeration(cost in prop::collection::vec(prop::collection::vec(0u8..3, 4), 4)) {
        let cost: Vec<Vec<f64>> = cost.iter().map(|r| r.iter().map(|&v| v as f64).collect()).collect();
        let (lp, _) = build_assignment_lp(&cost, Sense::Maximize, true).unwrap();
        let sol = solve(&lp).unwrap();
        let (_, _, optimal) = optimal_permutations(&cost);
        let found = enumerate_alternate_optima(&lp, &sol, 24).unwrap();
        let perms: BTreeSet<Vec<usize>> = found.iter().map(|s| as_perm(&s.x, 4)).collect();
        prop_assert_eq!(perms.len(), found.len());
        prop_assert_eq!(perms, optimal);
        prop_assert_eq!(&found[0].x, &sol.x);
    }

    #[test]
    fn unique_optimum_has_one_vertex(cost in prop::collection::vec(prop::collection::vec(0.0..10.0f64, 4), 4)) {
        let (_, second, optimal) = optimal_permutations(&cost);
        prop_assume!(optimal.len() == 1 && second.is_finite());
        let (lp, _) = build_assignment_lp(&cost, Sense::Maximize, true).unwrap();
        let sol = solve(&lp).unwrap();
        prop_assert_eq!(enumerate_alternate_optima(&lp, &sol, 10).unwrap().len(), 1);
    }

    // Two permutations differ on at most 2n entries, so a sup-norm ball of
    // radius r moves their objective gap by at most 2nr.
    #[test]
    fn wide_margin_means_no_witness(cost in prop::collection::vec(prop::collection::vec(0.0..10.0f64, 4), 4),
                                    seed in any::<u64>()) {
        let (_, second, _) = optimal_permutations(&cost);
        let (lp, _) = build_assignment_lp(&cost, Sense::Maximize, true).unwrap();
        let best = solve(&lp).unwrap().objective;
        let margin = best - second;
        prop_assume!(margin > 1e-3);
        let radius = 0.9 * margin / (2.0 * 2.0 * 4.0);
        let d = verify_assumptions(&lp, radius, 50, seed).unwrap();
        prop_assert!(!d.solution_change.found);
        prop_assert!(!d.multiple_optima.found);
    }
}

#[test]
fn diamond_ties_have_two_optima() {
    let mut g = hca_core::lp::Graph::new();
    g.add_edge("s", "a", 1.0, None);
    g.add_edge("a", "t", 1.0, None);
    g.add_edge("s", "b", 1.0, None);
    g.add_edge("b", "t", 1.0, None);
    let (lp, _) = hca_core::lp::build_shortest_path_lp(&g, "s", "t").unwrap();
    let sol = solve(&lp).unwrap();
    let found = enumerate_alternate_optima(&lp, &sol, 10).unwrap();
    assert_eq!(found.len(), 2);
    assert_eq!(shd(&found[0].x, &found[1].x).unwrap(), 4);
}

#[test]
fn score_gradient_agrees_with_finite_differences_small() {
    // 2x2 assignment, k = 4.
    let cost = vec![vec![1.0, 0.8], vec![0.7, 1.2]];
    let (lp, _) = build_assignment_lp(&cost, Sense::Maximize, true).unwrap();
    let c = vec![0.0, 3.0, 1.0, 0.0];
    let noise = NoiseSpec { sigma: 0.5, n_samples: 100_000, seed: 17, ..NoiseSpec::default() };
    let g = grad_linear_functional(&lp, &c, &noise).unwrap();
    let fd = finite_diff_grad_with(&AssignmentEnumerator, &lp, &c, &noise, 1e-2).unwrap();
    let cos = cosine(&g, &fd);
    assert!(cos >= 0.8, "cosine {cos}, g {g:?}, fd {fd:?}");
}

#[test]
fn wealth_lift_is_linear_in_the_matched_set() {
    let params = VaccinationScmParams::default();
    let n = 6;
    let ds = sample(&vaccination_observed(&params).unwrap(), n, 5).unwrap();
    let policy = VaccinationPolicy { n_spots: 3, ..VaccinationPolicy::default() };
    let (_, map) = parameterize(&ds, &policy).unwrap();
    let view = adversary_view(&vaccination_true(&params, false).unwrap(), &ds, WEALTH).unwrap();
    let lift = lift_confounder(&view, &map, ProblemFamily::LinearAssignment).unwrap();

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|a, b| view.values[*b].partial_cmp(&view.values[*a]).unwrap());
    // People in `order` take spots 0..n in that order; the first three are real.
    let code = |order: &[usize]| {
        let mut x = vec![0.0; n * n];
        for (spot, &i) in order.iter().enumerate() {
            x[i * n + spot] = 1.0;
        }
        x
    };
    let rich = code(&order);
    let poor = code(&order.iter().rev().copied().collect::<Vec<_>>());
    let rich_sum: f64 = order[..3].iter().map(|&i| view.values[i]).sum();
    let poor_sum: f64 = order[3..].iter().map(|&i| view.values[i]).sum();
    let diff = evaluate_h_sum(&rich, &lift).unwrap() - evaluate_h_sum(&poor, &lift).unwrap();
    assert!((diff - (rich_sum - poor_sum)).abs() < 1e-12);
    assert!(diff > 0.0);
    assert_eq!(evaluate_h_sum(&vec![0.0; n * n], &lift).unwrap(), 0.0);
}

#[test]
fn everyone_matched_means_no_attack() {
    let dir = tempfile::tempdir().unwrap();
    let reg = Registry::builtin();
    let cfg = json!({"seed": 3, "n_people": 8, "n_spots": 8});
    let res = run_scenario(reg.get("vaccination").unwrap(), &cfg, dir.path()).unwrap();
    let r = res.report.unwrap();
    assert_eq!(r.h_base, r.h_adv);
    assert!(!r.success);
}

#[test]
fn single_path_graph_cannot_be_attacked() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("line.csv");
    std::fs::write(&graph, "src,dst,cost,confounder_value\nA,B,3,10\nB,C,4,20\n").unwrap();
    let cfg = json!({"graph_file": graph.to_str().unwrap(), "source": "A", "target": "C"});
    let res = run_scenario(Registry::builtin().get("shortest-path").unwrap(), &cfg, &dir.path().join("o")).unwrap();
    let r = res.report.unwrap();
    assert!(!r.success);
    assert_eq!(r.x_base, r.x_adv);
    assert_eq!(r.h_base, 30.0);
}

#[test]
fn vaccination_defaults_are_echoed() {
    let resolved = Registry::builtin().get("vaccination").unwrap().resolve(&json!({})).unwrap();
    assert_eq!(resolved["attack"]["noise"]["n_samples"], 15);
    assert_eq!(resolved["attack"]["noise"]["sigma"], 0.5);
    assert_eq!(resolved["attack"]["epsilon"], 0.01);
    assert_eq!(resolved["n_people"], 25);
    assert_eq!(resolved["n_spots"], 10);
}

#[test]
fn built_in_models_are_insufficient() {
    let p = VaccinationScmParams::default();
    assert!(!is_causally_sufficient(&vaccination_observed(&p).unwrap()));
    assert!(!is_causally_sufficient(&road_observed().unwrap()));
    assert!(is_causally_sufficient(&vaccination_true(&p, true).unwrap()));
}

#[test]
fn road_witness_raises_co2_at_equal_toll() {
    let bundle = ShortestPathConfig::default().bundle().unwrap();
    let cfg = ShortestPathConfig::default().attack;
    let out = hca_witness(&road_true().unwrap(), &road_observed().unwrap(), &bundle, &[0], &cfg).unwrap();
    let WitnessOutcome::Witness { report, .. } = out else { panic!("no witness: {out:?}") };
    assert!(report.h_adv > report.h_base);
    assert!(report.rel_cost_gap <= cfg.cost_gap_budget);
    // Each route has 6 edges and they share none.
    assert_eq!(report.shd_codes, Some(12));
    let toll = |x: &[f64]| dot(&bundle.policy.graph.costs(), x);
    assert!((toll(&report.x_adv) - toll(&report.x_base)).abs() / toll(&report.x_base) <= 0.05);
}

#[test]
fn witness_requires_the_map_family() {
    let p = VaccinationScmParams::default();
    let policy = VaccinationPolicy::default();
    assert_eq!(policy.family(), ProblemFamily::LinearAssignment);
    let ds = sample(&vaccination_observed(&p).unwrap(), 12, 0).unwrap();
    let (_, map) = parameterize(&ds, &policy).unwrap();
    let view = adversary_view(&vaccination_true(&p, false).unwrap(), &ds, WEALTH).unwrap();
    assert!(lift_confounder(&view, &map, ProblemFamily::ShortestPath).is_err());
}

#[test]
fn energy_grid_only_and_totex() {
    let demand = vec![1.0, 2.0, 0.5, 1.5];
    let total: f64 = demand.iter().sum();
    let params = EnergyParams { u_gas: 0.0, annual_demand: total, ..EnergyParams::default() };
    let profiles = EnergyProfiles { demand: demand.clone(), avail_pv: vec![0.0; 4] };
    let (lp, layout) = build_energy_lp(&params, &profiles).unwrap();
    let sol = solve(&lp).unwrap();
    let con_ele: f64 = (0..4).map(|t| sol.x[layout.p_ele(t)]).sum();
    assert!((con_ele - total).abs() <= TAU_FEAS);
    assert!((sol.objective - params.c_ele * total).abs() <= 1e-9);

    let params = EnergyParams::default();
    let profiles = EnergyProfiles::synthetic(168, params.annual_demand);
    let (lp, layout) = build_energy_lp(&params, &profiles).unwrap();
    let sol = solve(&lp).unwrap();
    let x = &sol.x;
    let mut totex = params.c_pv * x[EnergyLayout::CAP_PV] + params.c_bat * x[EnergyLayout::CAP_BAT];
    for t in 0..168 {
        totex += params.c_ele * x[layout.p_ele(t)] + params.c_gas * x[layout.p_gas(t)];
    }
    let summary = hca_core::lp::EnergySummary::from_solution(&params, &layout, &sol);
    assert!((summary.totex - totex).abs() <= 1e-6 * totex.abs());
}
