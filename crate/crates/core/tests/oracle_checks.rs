mod common;

use common::{baseline, scenario};
use proptest::prelude::*;
use transship_core::model::{DemandMoments, Market, ScenarioConfig};
use transship_core::oracle::*;
use transship_core::policy::*;

fn with_cv(cfg: ScenarioConfig, cv1: f64, cv2: f64) -> ScenarioConfig {
    let mut out = cfg;
    out.demand.primary.std = cv1 * out.demand.primary.mean;
    out.demand.secondary.std = cv2 * out.demand.secondary.mean;
    out
}

fn agreement(cfg: &ScenarioConfig, market: Market, branch: Branch) -> Result<(), TestCaseError> {
    let closed = match (market, branch) {
        (Market::Primary, Branch::Hat) => primary_hat_quantity(cfg),
        (Market::Primary, Branch::Tilde) => primary_tilde_quantity(cfg),
        (Market::Secondary, Branch::Hat) => secondary_hat_quantity(cfg),
        (Market::Secondary, Branch::Tilde) => secondary_tilde_quantity(cfg),
    }
    .unwrap();
    let step = cfg.moments(market).std / 40.0;
    let found = adaptive_optimal_quantity(cfg, market, branch, &OracleOptions::with_step(step)).unwrap();
    prop_assert!(
        (found.quantity - closed).abs() <= step,
        "{market:?}/{branch:?}: oracle {} closed {closed} step {step}",
        found.quantity
    );
    Ok(())
}

fn transshipping(cfg: &ScenarioConfig) -> bool {
    transship_condition(cfg) && secondary_tilde_ratio(cfg).is_ok() && primary_tilde_ratio(cfg).is_ok()
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 50,
        max_global_rejects: 100_000,
        ..ProptestConfig::default()
    })]

    #[test]
    fn primary_hat_agrees(cfg in scenario(), cv1 in 0.05..0.8f64) {
        agreement(&with_cv(cfg, cv1, 0.1), Market::Primary, Branch::Hat)?;
    }

    #[test]
    fn secondary_hat_agrees(cfg in scenario(), cv2 in 0.05..0.8f64) {
        agreement(&with_cv(cfg, 0.1, cv2), Market::Secondary, Branch::Hat)?;
    }

    #[test]
    fn primary_tilde_agrees(cfg in scenario(), cv1 in 0.05..0.8f64) {
        prop_assume!(transshipping(&cfg));
        agreement(&with_cv(cfg, cv1, 0.1), Market::Primary, Branch::Tilde)?;
    }

    #[test]
    fn secondary_tilde_agrees(cfg in scenario(), cv2 in 0.05..0.8f64) {
        prop_assume!(transshipping(&cfg));
        agreement(&with_cv(cfg, 0.1, cv2), Market::Secondary, Branch::Tilde)?;
    }

    #[test]
    fn worst_case_is_basic_with_zero_gap(
        mean in 10.0..1000.0f64,
        cv in 0.01..1.5f64,
        knots in prop::collection::vec((0.0..1.0f64, -5.0..5.0f64), 1..5),
    ) {
        let moments = DemandMoments::new(mean, cv * mean);
        let grid = SupportGrid::for_moments(&moments, 201).unwrap();
        let upper = grid.upper();
        let problem = MomentProblem::univariate(&grid, &moments);
        let objective = problem.kernel_values(|d, _| {
            knots.iter().map(|&(at, slope)| slope * (d - at * upper).max(0.0)).sum()
        });
        let mut solver = problem.solver().unwrap();
        for sense in [Sense::Minimize, Sense::Maximize] {
            let sol = solver.solve(&objective, sense).unwrap();
            prop_assert!(sol.atoms.len() <= problem.constraint_count());
            let scale = 1.0 + sol.value.abs();
            prop_assert!(sol.duality_gap() <= 1e-8 * scale, "gap {}", sol.duality_gap());
            let m = sol.expect(|d, _| d);
            let s = sol.expect(|d, _| d * d);
            prop_assert!((m - mean).abs() <= 1e-6 * mean);
            prop_assert!((s - moments.second_moment()).abs() <= 1e-6 * moments.second_moment());
        }
    }
}

#[test]
fn refining_the_support_barely_moves_the_tail() {
    let m = baseline().demand.secondary;
    let value = |n: usize| {
        let grid = SupportGrid::for_moments(&m, n).unwrap();
        let lp = MomentLp::univariate(&grid, &m, |d| (d - 699.0).max(0.0), Sense::Maximize);
        solve_moment_lp(&lp).unwrap().value
    };
    let coarse = value(301);
    let fine = value(601);
    assert!((coarse - fine).abs() / fine < 1e-2, "{coarse} vs {fine}");
}

#[test]
fn joint_check_with_independent_cross_matches_marginals() {
    let cfg = common::figure_scenario();
    let options = OracleOptions::with_step(2.0);
    let u1 = adaptive_optimal_quantity(&cfg, Market::Primary, Branch::Tilde, &options).unwrap();
    let u2 = adaptive_optimal_quantity(&cfg, Market::Secondary, Branch::Hat, &options).unwrap();
    let g1 = SupportGrid::uniform(u1.support_upper, 31).unwrap();
    let g2 = SupportGrid::uniform(u2.support_upper, 31).unwrap();
    let cross = cfg.demand.primary.mean * cfg.demand.secondary.mean;
    let best = joint_dro_check(&cfg, g1.points(), g2.points(), &[cross], (&g1, &g2)).unwrap();
    assert!((best[0].q1 - u1.quantity).abs() <= g1.max_step(), "{best:?}");
    assert!((best[0].q2 - u2.quantity).abs() <= g2.max_step(), "{best:?}");
}

#[test]
fn joint_check_point_mass() {
    let mut cfg = common::figure_scenario();
    cfg.demand.primary.std = 0.0;
    cfg.demand.secondary.std = 0.0;
    let g1 = SupportGrid::uniform(1000.0, 11).unwrap();
    let g2 = SupportGrid::uniform(1000.0, 21).unwrap();
    let best = joint_dro_check(&cfg, g1.points(), g2.points(), &[800.0 * 600.0], (&g1, &g2)).unwrap();
    assert_eq!((best[0].q1, best[0].q2), (800.0, 600.0));
}
