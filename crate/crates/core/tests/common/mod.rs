#![allow(dead_code)]

use proptest::prelude::*;
use transship_core::model::{
    DemandMoments, ExchangeRate, JointMoments, MarketParams, ScenarioConfig,
};

pub fn baseline() -> ScenarioConfig {
    let market = MarketParams::new(15.0, 6.0, 5.0, 3.0);
    ScenarioConfig {
        primary: market,
        secondary: market,
        transship_cost: 2.0,
        fx: ExchangeRate::new(6.70, 0.30),
        demand: JointMoments::independent(
            DemandMoments::new(800.0, 100.0),
            DemandMoments::new(600.0, 80.0),
        ),
    }
}

pub fn figure_scenario() -> ScenarioConfig {
    ScenarioConfig {
        primary: MarketParams::new(10.0, 6.0, 5.0, 2.0),
        secondary: MarketParams::new(10.0, 6.0, 6.0, 2.0),
        transship_cost: 1.0,
        fx: ExchangeRate::new(6.70, 0.30),
        demand: JointMoments::independent(
            DemandMoments::new(800.0, 100.0),
            DemandMoments::new(600.0, 80.0),
        ),
    }
}

fn market(floor_shortage: f64) -> impl Strategy<Value = MarketParams> {
    (0.0..5.0f64, 0.5..5.0f64, 0.0..5.0f64, 0.0..10.0f64).prop_map(move |(v, dc, dg, dp)| {
        let c = v + dc;
        let g = c.max(floor_shortage) + dg;
        MarketParams::new(g + dp, g, c, v)
    })
}

fn moments() -> impl Strategy<Value = DemandMoments> {
    (50.0..1000.0f64, 0.0..0.8f64).prop_map(|(mean, cv)| DemandMoments::new(mean, mean * cv))
}

/// Valid scenarios with the ordering and cross-market constraints built in.
pub fn scenario() -> impl Strategy<Value = ScenarioConfig> {
    market(0.0)
        .prop_flat_map(|secondary| (market(secondary.cost), Just(secondary)))
        .prop_flat_map(|(primary, secondary)| {
            (
                Just(primary),
                Just(secondary),
                0.0..3.0f64,
                1.0..10.0f64,
                -0.3..0.3f64,
                moments(),
                moments(),
            )
        })
        .prop_map(|(primary, secondary, c, theta, rel, m1, m2)| ScenarioConfig {
            primary,
            secondary,
            transship_cost: c,
            fx: ExchangeRate::new(theta, rel * theta),
            demand: JointMoments::independent(m1, m2),
        })
}
