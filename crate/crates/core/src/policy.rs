//! Closed-form robust production and transshipment policies.
//!
//! Every quantity here maximizes worst-case expected profit over all demand
//! distributions sharing the given mean and standard deviation. Each market
//! reduces to a Scarf-type newsvendor whose ratio depends on whether shipping
//! primary leftovers beats producing in the secondary market.
//!
//! Boundary conventions: the transshipment test `c2 * f >= C + v1` and the
//! production test `std < sqrt(ratio) * mean` both put ties on the side the
//! inequalities print, so a tie ships and a tie does not produce.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{DemandMoments, MarketParams, OperationPlan, Regime, ScenarioConfig};

/// True when the Scarf rule orders a positive quantity.
///
/// Written as `std < sqrt(ratio) * mean` so that a zero mean never produces
/// and a zero standard deviation with a positive mean always does.
pub fn scarf_produces(moments: &DemandMoments, ratio: f64) -> bool {
    moments.std < ratio.sqrt() * moments.mean
}

/// Scarf's distribution-free order quantity for the ratio
/// `(p + g - c) / (c - v)` (or an effective version of it).
pub fn scarf_quantity(moments: &DemandMoments, ratio: f64) -> Result<f64> {
    if !(ratio.is_finite() && ratio > 0.0) {
        return Err(Error::NonpositiveRatio(ratio));
    }
    if moments.std == 0.0 {
        return Ok(moments.mean);
    }
    if !scarf_produces(moments, ratio) {
        return Ok(0.0);
    }
    let root = ratio.sqrt();
    Ok(moments.mean + 0.5 * moments.std * (root - 1.0 / root))
}

/// Tight upper bound on `E(D - q)^+` over all distributions with the given
/// mean and standard deviation.
pub fn worst_case_tail(q: f64, moments: &DemandMoments) -> f64 {
    let d = q - moments.mean;
    let r = moments.std.hypot(d);
    if d > 0.0 {
        // Same value, without cancellation when q is far above the mean.
        moments.std * moments.std / (2.0 * (r + d))
    } else {
        0.5 * (r - d)
    }
}

/// Worst-case expectation of `p min(D,q) - g (D-q)^+ + v (q-D)^+`.
pub fn worst_case_sales_value(market: &MarketParams, q: f64, moments: &DemandMoments) -> f64 {
    let MarketParams {
        price: p,
        shortage: g,
        salvage: v,
        ..
    } = *market;
    p * moments.mean + v * (q - moments.mean) - (p + g - v) * worst_case_tail(q, moments)
}

/// True when shipping a primary leftover is at least as cheap as producing
/// in the secondary market: `c2 * f >= C + v1`.
pub fn transship_condition(cfg: &ScenarioConfig) -> bool {
    cfg.secondary.cost * cfg.fx.factor() >= cfg.transship_cost + cfg.primary.salvage
}

/// Ratio for the secondary market without transshipment.
pub fn secondary_hat_ratio(cfg: &ScenarioConfig) -> f64 {
    cfg.secondary.newsvendor_ratio()
}

/// Ratio for the secondary market when stock comes from the primary market:
/// `K = ((p2 + g2) f - C - v1) / (C + v1 - v2 f)`.
pub fn secondary_tilde_ratio(cfg: &ScenarioConfig) -> Result<f64> {
    let f = cfg.fx.factor();
    let landed = cfg.transship_cost + cfg.primary.salvage;
    let numerator = (cfg.secondary.price + cfg.secondary.shortage) * f - landed;
    let denominator = landed - cfg.secondary.salvage * f;
    if denominator <= 0.0 {
        return Err(Error::UnboundedTransship { denominator });
    }
    if numerator <= 0.0 {
        return Err(Error::NonpositiveRatio(numerator / denominator));
    }
    Ok(numerator / denominator)
}

/// Ratio for the primary market without transshipment.
pub fn primary_hat_ratio(cfg: &ScenarioConfig) -> f64 {
    cfg.primary.newsvendor_ratio()
}

/// Ratio for the primary market when leftovers are shipped:
/// `K_bar = (p1 + g1 - c1) / (c1 + C - c2 f)`.
pub fn primary_tilde_ratio(cfg: &ScenarioConfig) -> Result<f64> {
    let numerator = cfg.primary.price + cfg.primary.shortage - cfg.primary.cost;
    let denominator =
        cfg.primary.cost + cfg.transship_cost - cfg.secondary.cost * cfg.fx.factor();
    if denominator <= 0.0 {
        return Err(Error::UnboundedProduction { denominator });
    }
    if numerator <= 0.0 {
        return Err(Error::NonpositiveRatio(numerator / denominator));
    }
    Ok(numerator / denominator)
}

pub fn secondary_hat_quantity(cfg: &ScenarioConfig) -> Result<f64> {
    scarf_quantity(&cfg.demand.secondary, secondary_hat_ratio(cfg))
}

pub fn secondary_tilde_quantity(cfg: &ScenarioConfig) -> Result<f64> {
    scarf_quantity(&cfg.demand.secondary, secondary_tilde_ratio(cfg)?)
}

pub fn primary_hat_quantity(cfg: &ScenarioConfig) -> Result<f64> {
    scarf_quantity(&cfg.demand.primary, primary_hat_ratio(cfg))
}

pub fn primary_tilde_quantity(cfg: &ScenarioConfig) -> Result<f64> {
    scarf_quantity(&cfg.demand.primary, primary_tilde_ratio(cfg)?)
}

/// The four newsvendor ratios of a scenario.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EffectiveRatios {
    pub k2_hat: f64,
    pub k2_tilde: f64,
    pub k1_hat: f64,
    pub k1_tilde: f64,
}

impl EffectiveRatios {
    /// Fails unless all four ratios are positive and finite.
    pub fn compute(cfg: &ScenarioConfig) -> Result<Self> {
        let ratios = Self {
            k2_hat: secondary_hat_ratio(cfg),
            k2_tilde: secondary_tilde_ratio(cfg)?,
            k1_hat: primary_hat_ratio(cfg),
            k1_tilde: primary_tilde_ratio(cfg)?,
        };
        for k in [ratios.k2_hat, ratios.k1_hat] {
            if !(k.is_finite() && k > 0.0) {
                return Err(Error::NonpositiveRatio(k));
            }
        }
        Ok(ratios)
    }
}

/// Thresholds deciding whether the secondary production center produces
/// when transshipment is uneconomical. Each threshold is the value of one
/// parameter at which `std / mean = sqrt(k2_hat)`, all others held fixed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdReport {
    pub c2_ddot: f64,
    pub p2_ddot: f64,
    pub g2_ddot: f64,
    pub v2_ddot: f64,
    pub sigma_ddot: f64,
    pub mean_ddot: f64,
    pub produce: bool,
}

pub fn production_thresholds(cfg: &ScenarioConfig) -> Result<ThresholdReport> {
    if transship_condition(cfg) {
        return Err(Error::WrongRegime);
    }
    let MarketParams {
        price: p,
        shortage: g,
        cost: c,
        salvage: v,
    } = cfg.secondary;
    let m = &cfg.demand.secondary;
    let (mean2, var) = (m.mean * m.mean, m.std * m.std);
    let ratio = secondary_hat_ratio(cfg);
    let root = ratio.sqrt();
    Ok(ThresholdReport {
        c2_ddot: ((p + g) * mean2 + v * var) / (var + mean2),
        p2_ddot: (c - v) * var / mean2 + c - g,
        g2_ddot: (c - v) * var / mean2 + c - p,
        v2_ddot: c - (p + g - c) * mean2 / var,
        sigma_ddot: root * m.mean,
        mean_ddot: m.std / root,
        produce: scarf_produces(m, ratio),
    })
}

/// Secondary-market inventory target and shipment for a realized primary
/// leftover `x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SecondaryDecision {
    pub q2: f64,
    pub transship: f64,
    pub regime: Regime,
}

impl SecondaryDecision {
    pub fn production(&self) -> f64 {
        self.q2 - self.transship
    }
}

/// Secondary inventory and transshipment given leftover `x`:
/// no shipping when it is uneconomical, otherwise ship everything up to the
/// larger target and produce only to reach the smaller one.
pub fn secondary_policy(cfg: &ScenarioConfig, x: f64) -> Result<SecondaryDecision> {
    if !(x.is_finite() && x >= 0.0) {
        return Err(Error::InvalidLeftover(x));
    }
    let q_hat = secondary_hat_quantity(cfg)?;
    if !transship_condition(cfg) {
        return Ok(SecondaryDecision {
            q2: q_hat,
            transship: 0.0,
            regime: Regime::NoTransship,
        });
    }
    let q_tilde = secondary_tilde_quantity(cfg)?;
    let decision = if x < q_hat {
        SecondaryDecision {
            q2: q_hat,
            transship: x,
            regime: Regime::TransshipPartialProduce,
        }
    } else if x < q_tilde {
        SecondaryDecision {
            q2: x,
            transship: x,
            regime: Regime::TransshipAll,
        }
    } else {
        SecondaryDecision {
            q2: q_tilde,
            transship: q_tilde,
            regime: Regime::TransshipCapped,
        }
    };
    Ok(decision)
}

/// Primary production quantity: the plain Scarf quantity, or the larger
/// one valuing leftovers at `c2 f - C` when they will be shipped.
pub fn primary_policy(cfg: &ScenarioConfig) -> Result<f64> {
    if transship_condition(cfg) {
        primary_tilde_quantity(cfg)
    } else {
        primary_hat_quantity(cfg)
    }
}

/// Worst-case expected secondary profit in primary currency, including the
/// value of the primary leftover `x` (salvaged or shipped).
pub fn worst_case_profit_secondary(cfg: &ScenarioConfig, x: f64) -> Result<f64> {
    let decision = secondary_policy(cfg, x)?;
    let f = cfg.fx.factor();
    let c2 = cfg.secondary.cost;
    let ship = cfg.transship_cost;
    let v1 = cfg.primary.salvage;
    let m2 = &cfg.demand.secondary;
    let value = |q: f64| worst_case_sales_value(&cfg.secondary, q, m2);
    let q2 = decision.q2;
    let pi = match decision.regime {
        Regime::NoTransship => (value(q2) - c2 * q2) * f + v1 * x,
        Regime::TransshipPartialProduce => (value(q2) - c2 * q2) * f + c2 * f * x - ship * x,
        Regime::TransshipAll => value(x) * f - ship * x,
        Regime::TransshipCapped => value(q2) * f - (ship + v1) * q2 + v1 * x,
    };
    Ok(pi)
}

/// Worst-case expected primary sales margin `p1 min(D1,q1) - g1 (D1-q1)^+ - c1 q1`.
/// Leftover units are valued in [`worst_case_profit_secondary`], not here.
pub fn worst_case_profit_primary(cfg: &ScenarioConfig, q1: f64) -> f64 {
    let MarketParams {
        price: p,
        shortage: g,
        cost: c,
        ..
    } = cfg.primary;
    let m1 = &cfg.demand.primary;
    p * m1.mean - (p + g) * worst_case_tail(q1, m1) - c * q1
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfitReport {
    pub pi2_worst: f64,
    pub pi1_worst: f64,
    pub regime: Regime,
}

/// Which leftover feeds the secondary decision.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum LeftoverMode {
    /// A realized leftover.
    Realized(f64),
    /// The planning leftover `(q1 - E(D1))^+`.
    Expected,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlanReport {
    pub plan: OperationPlan,
    pub profit: ProfitReport,
    /// Leftover the secondary decision was based on.
    pub leftover: f64,
}

/// Plan and worst-case profits in one call.
pub fn build_plan(cfg: &ScenarioConfig, mode: LeftoverMode) -> Result<PlanReport> {
    cfg.validate()?;
    let q1 = primary_policy(cfg)?;
    let leftover = match mode {
        LeftoverMode::Realized(x) => x,
        LeftoverMode::Expected => (q1 - cfg.demand.primary.mean).max(0.0),
    };
    let decision = secondary_policy(cfg, leftover)?;
    let plan = OperationPlan {
        q1,
        q2: decision.q2,
        transship: decision.transship,
        q2_production: decision.production(),
        regime: decision.regime,
    };
    let profit = ProfitReport {
        pi2_worst: worst_case_profit_secondary(cfg, leftover)?,
        pi1_worst: worst_case_profit_primary(cfg, q1),
        regime: decision.regime,
    };
    Ok(PlanReport {
        plan,
        profit,
        leftover,
    })
}

/// Plan under correlated demands. The cross moment is validated (the
/// moments matrix must be PSD) and otherwise plays no role: the result is
/// the independent-demand plan with shipments `min((q1 - E(D1))^+, q2)`.
pub fn correlated_policy(cfg: &ScenarioConfig) -> Result<OperationPlan> {
    Ok(build_plan(cfg, LeftoverMode::Expected)?.plan)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ExchangeRate, JointMoments};

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    fn baseline() -> ScenarioConfig {
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

    fn exchange_rate_case() -> ScenarioConfig {
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

    #[test]
    fn scarf_examples() {
        let q = scarf_quantity(&DemandMoments::new(600.0, 80.0), 8.0).unwrap();
        // 600 + 40 * (sqrt 8 - 1/sqrt 8) = 600 + 40 * 2.474873734...
        assert!(close(q, 698.994_949_366_116_7, 1e-9), "{q}");
        assert_eq!(scarf_quantity(&DemandMoments::new(321.0, 0.0), 8.0), Ok(321.0));
        assert_eq!(scarf_quantity(&DemandMoments::new(100.0, 300.0), 8.0), Ok(0.0));
        assert_eq!(scarf_quantity(&DemandMoments::new(0.0, 5.0), 8.0), Ok(0.0));
        assert_eq!(scarf_quantity(&DemandMoments::new(0.0, 0.0), 8.0), Ok(0.0));
        assert_eq!(scarf_quantity(&DemandMoments::new(55.5, 20.0), 1.0), Ok(55.5));
        assert_eq!(
            scarf_quantity(&DemandMoments::new(1.0, 1.0), 0.0),
            Err(Error::NonpositiveRatio(0.0))
        );
        assert!(scarf_quantity(&DemandMoments::new(1.0, 1.0), -2.0).is_err());
    }

    #[test]
    fn scarf_tie_does_not_produce() {
        // std / mean = 3 = sqrt(9)
        assert_eq!(scarf_quantity(&DemandMoments::new(100.0, 300.0), 9.0), Ok(0.0));
    }

    #[test]
    fn transship_condition_examples() {
        assert!(!transship_condition(&baseline()));
        assert!(transship_condition(&exchange_rate_case()));
        // c2 * f = 4 * 1 = 4 = C + v1
        let mut cfg = baseline();
        cfg.fx = ExchangeRate::new(2.0, 0.0);
        cfg.secondary = MarketParams::new(15.0, 6.0, 4.0, 3.0);
        cfg.transship_cost = 1.0;
        assert!(transship_condition(&cfg));
    }

    #[test]
    fn thresholds_on_baseline() {
        let t = production_thresholds(&baseline()).unwrap();
        assert!(close(t.sigma_ddot, 8f64.sqrt() * 600.0, 1e-9));
        assert!(close(t.sigma_ddot, 1697.056_274_847_714, 1e-9));
        assert!(close(t.mean_ddot, 80.0 / 8f64.sqrt(), 1e-12));
        assert!(close(t.mean_ddot, 28.284_271_247_461_9, 1e-9));
        assert!(t.produce);
        assert_eq!(
            production_thresholds(&exchange_rate_case()),
            Err(Error::WrongRegime)
        );
    }

    #[test]
    fn sigma_at_threshold_does_not_produce() {
        let mut cfg = baseline();
        let t = production_thresholds(&cfg).unwrap();
        cfg.demand.secondary.std = t.sigma_ddot;
        let t = production_thresholds(&cfg).unwrap();
        assert!(!t.produce);
        assert_eq!(secondary_hat_quantity(&cfg), Ok(0.0));
    }

    #[test]
    fn cost_at_threshold_does_not_produce() {
        // p=g=6, v=2, E=100, std=300: c2_ddot = (12e4 + 18e4) / 1e5 = 3 exactly.
        let mut cfg = baseline();
        cfg.secondary = MarketParams::new(6.0, 6.0, 4.0, 2.0);
        cfg.demand.secondary = DemandMoments::new(100.0, 300.0);
        let t = production_thresholds(&cfg).unwrap();
        assert_eq!(t.c2_ddot, 3.0);
        cfg.secondary.cost = t.c2_ddot;
        assert!(!transship_condition(&cfg));
        let t = production_thresholds(&cfg).unwrap();
        assert!(!t.produce);
        assert!(!(cfg.secondary.cost < t.c2_ddot));
    }

    #[test]
    fn secondary_policy_cases() {
        let cfg = exchange_rate_case();
        let q_hat = secondary_hat_quantity(&cfg).unwrap();
        let q_tilde = secondary_tilde_quantity(&cfg).unwrap();
        assert!(close(q_hat, 637.947_331_922_020_5, 1e-6), "{q_hat}");
        let k = secondary_tilde_ratio(&cfg).unwrap();
        assert!(close(k, 11.342_105_263_157_9, 1e-9), "{k}");
        assert!(close(q_tilde, 722.834_8, 1e-3), "{q_tilde}");

        let d = secondary_policy(&cfg, 500.0).unwrap();
        assert_eq!(d.regime, Regime::TransshipPartialProduce);
        assert_eq!((d.q2, d.transship), (q_hat, 500.0));
        assert!(close(d.production(), 137.947_331_922, 1e-6));

        let d = secondary_policy(&cfg, 0.0).unwrap();
        assert_eq!((d.q2, d.transship, d.production()), (q_hat, 0.0, q_hat));

        let d = secondary_policy(&cfg, 700.0).unwrap();
        assert_eq!(d.regime, Regime::TransshipAll);
        assert_eq!((d.q2, d.transship), (700.0, 700.0));

        let d = secondary_policy(&cfg, 10_000.0).unwrap();
        assert_eq!(d.regime, Regime::TransshipCapped);
        assert_eq!((d.q2, d.transship, d.production()), (q_tilde, q_tilde, 0.0));

        assert!(secondary_policy(&cfg, -1.0).is_err());
    }

    #[test]
    fn no_transship_ignores_leftover() {
        let cfg = baseline();
        for x in [0.0, 100.0, 5000.0] {
            let d = secondary_policy(&cfg, x).unwrap();
            assert_eq!(d.regime, Regime::NoTransship);
            assert_eq!(d.transship, 0.0);
            assert!(close(d.q2, 698.994_949_366, 1e-6));
        }
    }

    #[test]
    fn unbounded_transship_is_reported() {
        // C + v1 - v2 f <= 0: salvage in market 2 exceeds the landed cost.
        let mut cfg = exchange_rate_case();
        cfg.primary = MarketParams::new(10.0, 6.0, 5.0, 0.5);
        cfg.transship_cost = 0.0;
        cfg.secondary = MarketParams::new(10.0, 6.0, 6.0, 1.0);
        cfg.fx = ExchangeRate::new(1.0, 0.0);
        assert!(transship_condition(&cfg));
        assert!(matches!(
            secondary_policy(&cfg, 10.0),
            Err(Error::UnboundedTransship { .. })
        ));
    }

    #[test]
    fn unbounded_production_is_reported() {
        // c1 + C - c2 f <= 0
        let mut cfg = exchange_rate_case();
        cfg.secondary = MarketParams::new(10.0, 6.0, 6.0, 2.0);
        cfg.primary = MarketParams::new(10.0, 6.0, 4.0, 2.0);
        cfg.transship_cost = 1.0;
        cfg.fx = ExchangeRate::new(1.0, 0.0);
        assert!(matches!(
            primary_policy(&cfg),
            Err(Error::UnboundedProduction { .. })
        ));
    }

    #[test]
    fn primary_policy_examples() {
        let q = primary_policy(&baseline()).unwrap();
        assert!(close(q, 923.743_686_707_645_9, 1e-6), "{q}");
        let cfg = exchange_rate_case();
        let k = primary_tilde_ratio(&cfg).unwrap();
        assert!(close(k, 42.777_777_777_8, 1e-6), "{k}");
        let q = primary_policy(&cfg).unwrap();
        assert!(close(q, 1119.379, 1e-2), "{q}");

        for mut cfg in [baseline(), exchange_rate_case()] {
            cfg.demand.primary.std = 0.0;
            assert_eq!(primary_policy(&cfg), Ok(800.0));
        }
    }

    #[test]
    fn tail_examples() {
        let m = DemandMoments::new(600.0, 80.0);
        assert_eq!(worst_case_tail(600.0, &m), 40.0);
        let t = worst_case_tail(699.0, &m);
        assert!(close(t, (16201f64.sqrt() - 99.0) / 2.0, 1e-12));
        assert!(close(t, 14.141_5, 1e-3));
        assert_eq!(worst_case_tail(700.0, &DemandMoments::new(600.0, 0.0)), 0.0);
        assert_eq!(worst_case_tail(500.0, &DemandMoments::new(600.0, 0.0)), 100.0);
    }

    #[test]
    fn secondary_profit_examples() {
        let cfg = baseline();
        let f = cfg.fx.factor();
        let q = secondary_hat_quantity(&cfg).unwrap();
        let ew = 15.0 * 600.0 + 3.0 * (q - 600.0) - 18.0 * worst_case_tail(q, &cfg.demand.secondary);
        assert!(close(ew, 9042.4, 0.1), "{ew}");
        let pi0 = worst_case_profit_secondary(&cfg, 0.0).unwrap();
        assert!(close(pi0, (ew - 5.0 * q) * f, 1e-9));
        assert!(close(pi0, 5309.5, 0.5), "{pi0}");
        let pi100 = worst_case_profit_secondary(&cfg, 100.0).unwrap();
        assert!(close(pi100 - pi0, 300.0, 1e-9));

        let cfg = exchange_rate_case();
        let f = cfg.fx.factor();
        let ew = worst_case_sales_value(&cfg.secondary, 700.0, &cfg.demand.secondary);
        let pi = worst_case_profit_secondary(&cfg, 700.0).unwrap();
        assert!(close(pi, ew * f - 700.0, 1e-9));
    }

    #[test]
    fn secondary_profit_is_continuous_at_breakpoints() {
        let cfg = exchange_rate_case();
        for b in [
            secondary_hat_quantity(&cfg).unwrap(),
            secondary_tilde_quantity(&cfg).unwrap(),
        ] {
            let left = worst_case_profit_secondary(&cfg, b - 1e-7).unwrap();
            let right = worst_case_profit_secondary(&cfg, b).unwrap();
            assert!(close(left, right, 1e-5), "{left} vs {right}");
        }
    }

    #[test]
    fn build_plan_examples() {
        let r = build_plan(&baseline(), LeftoverMode::Realized(0.0)).unwrap();
        assert!(close(r.plan.q1, 923.74, 5e-3));
        assert!(close(r.plan.q2, 698.99, 5e-3));
        assert_eq!(r.plan.transship, 0.0);
        assert_eq!(r.plan.regime, Regime::NoTransship);

        let r = build_plan(&exchange_rate_case(), LeftoverMode::Expected).unwrap();
        assert!(close(r.leftover, 319.379, 1e-2));
        assert_eq!(r.plan.regime, Regime::TransshipPartialProduce);
        assert_eq!(r.plan.transship, r.leftover);
        assert!(close(r.plan.q2, 637.947, 1e-3));

        let mut cfg = exchange_rate_case();
        cfg.demand.primary.std = 0.0;
        cfg.demand.secondary.std = 0.0;
        let r = build_plan(&cfg, LeftoverMode::Expected).unwrap();
        assert_eq!((r.plan.q1, r.plan.q2, r.plan.transship), (800.0, 600.0, 0.0));
    }

    #[test]
    fn correlation_does_not_change_the_plan() {
        let cfg = exchange_rate_case();
        let independent = correlated_policy(&cfg).unwrap();
        for rho in [-1.0, -0.5, 0.0, 0.3, 0.5, 1.0] {
            let mut c = cfg;
            c.demand = cfg.demand.with_cross(JointMoments::cross_for_correlation(
                &cfg.demand.primary,
                &cfg.demand.secondary,
                rho,
            ));
            assert_eq!(correlated_policy(&c).unwrap(), independent);
        }
        let mut c = cfg;
        c.demand = cfg.demand.with_cross(1.0e9);
        assert_eq!(correlated_policy(&c).unwrap_err().name(), "MomentsNotPSD");
    }

    #[test]
    fn effective_ratios() {
        let r = EffectiveRatios::compute(&exchange_rate_case()).unwrap();
        assert_eq!(r.k2_hat, 2.5);
        assert!(r.k2_tilde >= r.k2_hat && r.k1_tilde >= r.k1_hat);
    }
}
