use thiserror::Error;

use crate::model::Market;

/// Errors raised while validating inputs or evaluating policies.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{market} market: {field} must be finite, got {value}")]
    NonFinite {
        market: Market,
        field: &'static str,
        value: f64,
    },
    #[error("{market} market: cost {cost} equals salvage value; the Scarf ratio is undefined")]
    DegenerateSalvage { market: Market, cost: f64 },
    #[error("{market} market: require p >= g >= c >= v >= 0, got p={price} g={shortage} c={cost} v={salvage}")]
    OrderingViolation {
        market: Market,
        price: f64,
        shortage: f64,
        cost: f64,
        salvage: f64,
    },
    #[error("primary shortage cost g1={g1} is below secondary production cost c2={c2}")]
    CrossMarketViolation { g1: f64, c2: f64 },
    #[error("invalid exchange rate: theta={theta}, delta_theta={delta_theta} (need theta > 0 and theta + delta_theta > 0)")]
    FxInvalid { theta: f64, delta_theta: f64 },
    #[error("transshipment cost must be finite and nonnegative, got {0}")]
    InvalidTransshipCost(f64),
    #[error("{market} market: demand moments must be finite and nonnegative, got mean={mean} std={std}")]
    InvalidMoments { market: Market, mean: f64, std: f64 },
    #[error("moments matrix is not positive semidefinite (smallest principal minor {min_minor:e})")]
    MomentsNotPsd { min_minor: f64 },
    #[error("newsvendor ratio must be positive and finite, got {0}")]
    NonpositiveRatio(f64),
    #[error("production thresholds apply only when transshipment is uneconomical")]
    WrongRegime,
    #[error("transshipment quantity is unbounded: C + v1 - v2*f = {denominator} <= 0")]
    UnboundedTransship { denominator: f64 },
    #[error("primary production is unbounded: c1 + C - c2*f = {denominator} <= 0")]
    UnboundedProduction { denominator: f64 },
    #[error("leftover inventory must be finite and nonnegative, got {0}")]
    InvalidLeftover(f64),
    #[error("moment problem is infeasible on the support grid")]
    Infeasible,
    #[error("linear program is unbounded")]
    Unbounded,
    #[error("simplex iteration limit reached")]
    IterationLimit,
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("critical fractile {0} is outside (0, 1)")]
    FractileOutOfRange(f64),
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("invalid experiment configuration: {0}")]
    InvalidExperiment(String),
}

impl Error {
    /// Stable identifier used in CLI messages.
    pub fn name(&self) -> &'static str {
        match self {
            Error::NonFinite { .. } => "NonFinite",
            Error::DegenerateSalvage { .. } => "DegenerateSalvage",
            Error::OrderingViolation { .. } => "OrderingViolation",
            Error::CrossMarketViolation { .. } => "CrossMarketViolation",
            Error::FxInvalid { .. } => "FxInvalid",
            Error::InvalidTransshipCost(_) => "InvalidTransshipCost",
            Error::InvalidMoments { .. } => "InvalidMoments",
            Error::MomentsNotPsd { .. } => "MomentsNotPSD",
            Error::NonpositiveRatio(_) => "NonpositiveRatio",
            Error::WrongRegime => "WrongRegime",
            Error::UnboundedTransship { .. } => "UnboundedTransship",
            Error::UnboundedProduction { .. } => "UnboundedProduction",
            Error::InvalidLeftover(_) => "InvalidLeftover",
            Error::Infeasible => "Infeasible",
            Error::Unbounded => "Unbounded",
            Error::IterationLimit => "IterationLimit",
            Error::InvalidGrid(_) => "InvalidGrid",
            Error::FractileOutOfRange(_) => "FractileOutOfRange",
            Error::InvalidDistribution(_) => "InvalidDistribution",
            Error::InvalidExperiment(_) => "InvalidExperiment",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
