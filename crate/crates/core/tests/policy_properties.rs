mod common;

use common::scenario;
use proptest::prelude::*;
use transship_core::model::{ExchangeRate, JointMoments, Regime, ScenarioConfig};
use transship_core::policy::*;
use transship_core::Error;

fn transshipping(cfg: &ScenarioConfig) -> bool {
    transship_condition(cfg)
        && secondary_tilde_ratio(cfg).is_ok()
        && primary_tilde_ratio(cfg).is_ok()
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 1000,
        max_global_rejects: 100_000,
        ..ProptestConfig::default()
    })]

    #[test]
    fn tilde_primary_at_least_hat(cfg in scenario()) {
        prop_assume!(transshipping(&cfg));
        let hat = primary_hat_quantity(&cfg).unwrap();
        let tilde = primary_tilde_quantity(&cfg).unwrap();
        prop_assert!(tilde >= hat, "{tilde} < {hat}");
    }

    #[test]
    fn hat_secondary_at_most_tilde(cfg in scenario()) {
        prop_assume!(transshipping(&cfg));
        let hat = secondary_hat_quantity(&cfg).unwrap();
        let tilde = secondary_tilde_quantity(&cfg).unwrap();
        prop_assume!(hat > 0.0 && tilde > 0.0);
        prop_assert!(hat <= tilde, "{hat} > {tilde}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 256,
        max_global_rejects: 100_000,
        ..ProptestConfig::default()
    })]

    #[test]
    fn secondary_decision_monotone_in_leftover(cfg in scenario()) {
        prop_assume!(!transship_condition(&cfg) || transshipping(&cfg));
        let top = 2.0 * (cfg.demand.secondary.mean + 6.0 * cfg.demand.secondary.std) + 1.0;
        let mut prev: Option<SecondaryDecision> = None;
        for i in 0..=400 {
            let x = top * i as f64 / 400.0;
            let d = secondary_policy(&cfg, x).unwrap();
            prop_assert!(d.transship <= x + 1e-12);
            prop_assert!(d.transship <= d.q2 + 1e-12);
            if let Some(p) = prev {
                prop_assert!(d.transship >= p.transship);
                prop_assert!(d.q2 >= p.q2);
                prop_assert!(d.production() <= p.production() + 1e-9);
            }
            prev = Some(d);
        }
    }

    #[test]
    fn hat_quantities_ignore_exchange_rate(cfg in scenario(), theta in 0.5..50.0f64, rel in -0.4..2.0f64) {
        let mut moved = cfg;
        moved.fx = ExchangeRate::new(theta, rel * theta);
        prop_assert_eq!(
            primary_hat_quantity(&cfg).unwrap().to_bits(),
            primary_hat_quantity(&moved).unwrap().to_bits()
        );
        prop_assert_eq!(
            secondary_hat_quantity(&cfg).unwrap().to_bits(),
            secondary_hat_quantity(&moved).unwrap().to_bits()
        );
    }

    #[test]
    fn tilde_quantities_ignore_theta_without_fluctuation(cfg in scenario(), theta in 0.5..50.0f64) {
        let mut a = cfg;
        a.fx = ExchangeRate::new(6.7, 0.0);
        let mut b = cfg;
        b.fx = ExchangeRate::new(theta, 0.0);
        let pa = primary_tilde_quantity(&a).map(f64::to_bits);
        let pb = primary_tilde_quantity(&b).map(f64::to_bits);
        prop_assert_eq!(pa, pb);
        let sa = secondary_tilde_quantity(&a).map(f64::to_bits);
        let sb = secondary_tilde_quantity(&b).map(f64::to_bits);
        prop_assert_eq!(sa, sb);
    }

    #[test]
    fn tilde_quantities_nonincreasing_in_fluctuation(cfg in scenario(), lo in -0.4..0.9f64, width in 0.01..0.5f64) {
        let theta = cfg.fx.theta;
        let mut a = cfg;
        a.fx = ExchangeRate::new(theta, lo * theta);
        let mut b = cfg;
        b.fx = ExchangeRate::new(theta, (lo + width) * theta);
        if let (Ok(qa), Ok(qb)) = (primary_tilde_quantity(&a), primary_tilde_quantity(&b)) {
            prop_assert!(qb <= qa, "primary {qa} -> {qb}");
        }
        if let (Ok(qa), Ok(qb)) = (secondary_tilde_quantity(&a), secondary_tilde_quantity(&b)) {
            prop_assert!(qb <= qa, "secondary {qa} -> {qb}");
        }
    }

    #[test]
    fn plan_ignores_cross_moment(cfg in scenario(), rho in -1.0..1.0f64) {
        prop_assume!(!transship_condition(&cfg) || transshipping(&cfg));
        let cross = JointMoments::cross_for_correlation(&cfg.demand.primary, &cfg.demand.secondary, rho);
        let mut correlated = cfg;
        correlated.demand = cfg.demand.with_cross(cross);
        prop_assume!(correlated.demand.validate().is_ok());
        let a = correlated_policy(&cfg).unwrap();
        let b = correlated_policy(&correlated).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn validation_is_idempotent(cfg in scenario()) {
        let once = transship_core::validate_scenario(cfg).unwrap();
        prop_assert_eq!(once, transship_core::validate_scenario(once).unwrap());
    }

    #[test]
    fn secondary_profit_continuous_in_leftover(cfg in scenario()) {
        prop_assume!(transshipping(&cfg));
        let hat = secondary_hat_quantity(&cfg).unwrap();
        let tilde = secondary_tilde_quantity(&cfg).unwrap();
        let f = cfg.fx.factor();
        let m2 = &cfg.secondary;
        let lipschitz = (m2.price + m2.shortage + m2.cost) * f + cfg.transship_cost + cfg.primary.salvage;
        for b in [hat, tilde] {
            let h = 1e-7 * (1.0 + b);
            let below = worst_case_profit_secondary(&cfg, (b - h).max(0.0)).unwrap();
            let above = worst_case_profit_secondary(&cfg, b + h).unwrap();
            let gap = (below - above).abs();
            prop_assert!(gap <= 2.0 * h * lipschitz + 1e-9 * below.abs(), "{b}: {below} vs {above}");
        }
    }
}

#[test]
fn regime_labels_follow_breakpoints() {
    let cfg = common::figure_scenario();
    let hat = secondary_hat_quantity(&cfg).unwrap();
    let tilde = secondary_tilde_quantity(&cfg).unwrap();
    assert_eq!(secondary_policy(&cfg, hat.next_down()).unwrap().regime, Regime::TransshipPartialProduce);
    assert_eq!(secondary_policy(&cfg, hat).unwrap().regime, Regime::TransshipAll);
    assert_eq!(secondary_policy(&cfg, tilde.next_down()).unwrap().regime, Regime::TransshipAll);
    assert_eq!(secondary_policy(&cfg, tilde).unwrap().regime, Regime::TransshipCapped);
}

#[test]
fn invalid_cross_is_rejected() {
    let mut cfg = common::baseline();
    cfg.demand.cross = Some(800.0 * 600.0 + 1.01 * 100.0 * 80.0);
    assert!(matches!(correlated_policy(&cfg), Err(Error::MomentsNotPsd { .. })));
}
