//! Domain types shared by every other module: market economics, the
//! exchange-rate convention, demand moments and the decision triple.
//!
//! Monetary values of the secondary market are quoted in its own currency
//! and converted to primary-market currency with [`ExchangeRate::factor`].
//! All policy outputs are expressed in primary-market currency.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on the principal minors of the normalized moments matrix.
pub const PSD_TOLERANCE: f64 = 1e-9;

/// Tolerance on the total mass of a [`DiscreteDist`].
pub const MASS_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Market {
    Primary,
    Secondary,
}

impl fmt::Display for Market {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Market::Primary => f.write_str("primary"),
            Market::Secondary => f.write_str("secondary"),
        }
    }
}

/// Per-unit economics of one market, in that market's currency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarketParams {
    /// Selling price `p`.
    pub price: f64,
    /// Shortage (lost-sales) cost `g`.
    pub shortage: f64,
    /// Production cost `c`.
    pub cost: f64,
    /// Salvage value `v`.
    pub salvage: f64,
}

impl MarketParams {
    pub fn new(price: f64, shortage: f64, cost: f64, salvage: f64) -> Self {
        Self {
            price,
            shortage,
            cost,
            salvage,
        }
    }

    /// Checks `p >= g >= c >= v >= 0` and `c > v`.
    pub fn validate(&self, market: Market) -> Result<()> {
        for (field, value) in [
            ("p", self.price),
            ("g", self.shortage),
            ("c", self.cost),
            ("v", self.salvage),
        ] {
            if !value.is_finite() {
                return Err(Error::NonFinite {
                    market,
                    field,
                    value,
                });
            }
        }
        let ordered = self.price >= self.shortage
            && self.shortage >= self.cost
            && self.cost >= self.salvage
            && self.salvage >= 0.0;
        if !ordered {
            return Err(Error::OrderingViolation {
                market,
                price: self.price,
                shortage: self.shortage,
                cost: self.cost,
                salvage: self.salvage,
            });
        }
        if self.cost == self.salvage {
            return Err(Error::DegenerateSalvage {
                market,
                cost: self.cost,
            });
        }
        Ok(())
    }

    /// Scarf ratio `(p + g - c) / (c - v)`.
    pub fn newsvendor_ratio(&self) -> f64 {
        (self.price + self.shortage - self.cost) / (self.cost - self.salvage)
    }

    /// Classical critical fractile `(p + g - c) / (p + g - v)`.
    pub fn critical_fractile(&self) -> f64 {
        (self.price + self.shortage - self.cost) / (self.price + self.shortage - self.salvage)
    }
}

/// Real exchange rate `theta` (primary units per secondary unit) and the
/// anticipated fluctuation `delta_theta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExchangeRate {
    pub theta: f64,
    pub delta_theta: f64,
}

impl ExchangeRate {
    pub fn new(theta: f64, delta_theta: f64) -> Self {
        Self { theta, delta_theta }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.theta.is_finite()
            && self.delta_theta.is_finite()
            && self.theta > 0.0
            && self.theta + self.delta_theta > 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::FxInvalid {
                theta: self.theta,
                delta_theta: self.delta_theta,
            })
        }
    }

    /// Conversion factor `theta / (theta + delta_theta)` applied to
    /// secondary-market cash flows. Assumes a validated rate; see
    /// [`fx_factor`] for the checked version.
    pub fn factor(&self) -> f64 {
        if self.delta_theta == 0.0 {
            return 1.0;
        }
        self.theta / (self.theta + self.delta_theta)
    }
}

/// Checked conversion factor.
pub fn fx_factor(fx: &ExchangeRate) -> Result<f64> {
    fx.validate()?;
    Ok(fx.factor())
}

/// Mean and standard deviation of one market's demand.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DemandMoments {
    pub mean: f64,
    pub std: f64,
}

impl DemandMoments {
    pub fn new(mean: f64, std: f64) -> Self {
        Self { mean, std }
    }

    pub fn validate(&self, market: Market) -> Result<()> {
        let ok =
            self.mean.is_finite() && self.std.is_finite() && self.mean >= 0.0 && self.std >= 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidMoments {
                market,
                mean: self.mean,
                std: self.std,
            })
        }
    }

    /// `E(D^2) = mean^2 + std^2`.
    pub fn second_moment(&self) -> f64 {
        self.mean * self.mean + self.std * self.std
    }

    /// Coefficient of variation; `None` when the mean is zero.
    pub fn cv(&self) -> Option<f64> {
        (self.mean > 0.0).then(|| self.std / self.mean)
    }
}

/// Moments of both markets plus the optional cross moment `E(D1 D2)`.
/// A missing cross moment means independent demands.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JointMoments {
    pub primary: DemandMoments,
    pub secondary: DemandMoments,
    pub cross: Option<f64>,
}

impl JointMoments {
    pub fn independent(primary: DemandMoments, secondary: DemandMoments) -> Self {
        Self {
            primary,
            secondary,
            cross: None,
        }
    }

    /// Cross moment for a given correlation coefficient.
    pub fn cross_for_correlation(
        primary: &DemandMoments,
        secondary: &DemandMoments,
        rho: f64,
    ) -> f64 {
        primary.mean * secondary.mean + rho * primary.std * secondary.std
    }

    pub fn with_cross(mut self, cross: f64) -> Self {
        self.cross = Some(cross);
        self
    }

    /// `E(D1 D2)`, falling back to the product of means.
    pub fn cross_moment(&self) -> f64 {
        self.cross
            .unwrap_or(self.primary.mean * self.secondary.mean)
    }

    /// The 3x3 moments matrix.
    pub fn moment_matrix(&self) -> [[f64; 3]; 3] {
        let m1 = self.primary.mean;
        let m2 = self.secondary.mean;
        let cross = self.cross_moment();
        [
            [self.primary.second_moment(), cross, m1],
            [cross, self.secondary.second_moment(), m2],
            [m1, m2, 1.0],
        ]
    }

    /// Smallest principal minor of the diagonally normalized moments matrix.
    pub fn min_principal_minor(&self) -> f64 {
        let raw = self.moment_matrix();
        let scale: [f64; 3] =
            std::array::from_fn(|i| if raw[i][i] > 0.0 { raw[i][i].sqrt() } else { 1.0 });
        let m: [[f64; 3]; 3] = std::array::from_fn(|i| {
            std::array::from_fn(|j| raw[i][j] / (scale[i] * scale[j]))
        });
        let minor2 = |i: usize, j: usize| m[i][i] * m[j][j] - m[i][j] * m[j][i];
        let det3 = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
        [
            m[0][0],
            m[1][1],
            m[2][2],
            minor2(0, 1),
            minor2(0, 2),
            minor2(1, 2),
            det3,
        ]
        .into_iter()
        .fold(f64::INFINITY, f64::min)
    }

    pub fn validate(&self) -> Result<()> {
        self.primary.validate(Market::Primary)?;
        self.secondary.validate(Market::Secondary)?;
        if let Some(cross) = self.cross {
            if !cross.is_finite() {
                return Err(Error::MomentsNotPsd { min_minor: cross });
            }
        }
        let min_minor = self.min_principal_minor();
        if min_minor < -PSD_TOLERANCE {
            return Err(Error::MomentsNotPsd { min_minor });
        }
        Ok(())
    }
}

/// Everything needed to evaluate the policies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub primary: MarketParams,
    pub secondary: MarketParams,
    /// Unit transshipment cost `C`, primary currency.
    pub transship_cost: f64,
    pub fx: ExchangeRate,
    pub demand: JointMoments,
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        self.primary.validate(Market::Primary)?;
        self.secondary.validate(Market::Secondary)?;
        if !(self.transship_cost.is_finite() && self.transship_cost >= 0.0) {
            return Err(Error::InvalidTransshipCost(self.transship_cost));
        }
        self.fx.validate()?;
        if self.primary.shortage < self.secondary.cost {
            return Err(Error::CrossMarketViolation {
                g1: self.primary.shortage,
                c2: self.secondary.cost,
            });
        }
        self.demand.validate()
    }

    pub fn moments(&self, market: Market) -> &DemandMoments {
        match market {
            Market::Primary => &self.demand.primary,
            Market::Secondary => &self.demand.secondary,
        }
    }

    pub fn market(&self, market: Market) -> &MarketParams {
        match market {
            Market::Primary => &self.primary,
            Market::Secondary => &self.secondary,
        }
    }
}

/// Returns the config unchanged iff every invariant holds.
pub fn validate_scenario(cfg: ScenarioConfig) -> Result<ScenarioConfig> {
    cfg.validate()?;
    Ok(cfg)
}

/// Branch of the secondary-market policy that produced a plan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Regime {
    /// Producing locally is cheaper than shipping leftovers.
    NoTransship,
    /// All leftovers are shipped and the shortfall to the target is produced.
    TransshipPartialProduce,
    /// All leftovers are shipped and nothing is produced.
    TransshipAll,
    /// Shipments are capped at the transshipment target.
    TransshipCapped,
}

impl Regime {
    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::NoTransship => "NoTransship",
            Regime::TransshipPartialProduce => "TransshipPartialProduce",
            Regime::TransshipAll => "TransshipAll",
            Regime::TransshipCapped => "TransshipCapped",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Decision triple `(q1, q2, s)` with the derived secondary production.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OperationPlan {
    /// Primary production quantity.
    pub q1: f64,
    /// Planned secondary inventory.
    pub q2: f64,
    /// Units shipped from the primary market.
    pub transship: f64,
    /// Secondary production, `q2 - s`.
    pub q2_production: f64,
    pub regime: Regime,
}

/// Finite-support demand distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteDist {
    values: Vec<f64>,
    probs: Vec<f64>,
}

impl DiscreteDist {
    /// Values must be finite, nonnegative and ascending; probabilities
    /// nonnegative and summing to one within [`MASS_TOLERANCE`].
    pub fn new(values: Vec<f64>, probs: Vec<f64>) -> Result<Self> {
        if values.is_empty() || values.len() != probs.len() {
            return Err(Error::InvalidDistribution(format!(
                "{} values vs {} probabilities",
                values.len(),
                probs.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidDistribution(
                "values must be finite and nonnegative".into(),
            ));
        }
        if values.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidDistribution(
                "values must be sorted ascending".into(),
            ));
        }
        if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::InvalidDistribution(
                "probabilities must be nonnegative".into(),
            ));
        }
        let mass: f64 = probs.iter().sum();
        if (mass - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::InvalidDistribution(format!(
                "probabilities sum to {mass}"
            )));
        }
        Ok(Self { values, probs })
    }

    pub fn point_mass(value: f64) -> Result<Self> {
        Self::new(vec![value], vec![1.0])
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.values.iter().copied().zip(self.probs.iter().copied())
    }

    /// `E[f(D)]`.
    pub fn expect(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.iter().map(|(d, p)| p * f(d)).sum()
    }
}
