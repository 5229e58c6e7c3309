//! Robust production and transshipment planning for an enterprise serving
//! a primary and a secondary market when only the first two moments of
//! demand are known and the secondary currency may move.
//!
//! * [`model`]: validated inputs and the decision triple.
//! * [`policy`]: closed-form worst-case optimal quantities and profits.
//! * [`oracle`]: brute-force checks via moment linear programs.
//! * [`montecarlo`]: sampled-distribution comparison against the
//!   complete-information optimum.

pub mod error;
pub mod model;
pub mod montecarlo;
pub mod oracle;
pub mod policy;

pub use error::{Error, Result};
pub use model::{
    fx_factor, validate_scenario, DemandMoments, DiscreteDist, ExchangeRate, JointMoments,
    Market, MarketParams, OperationPlan, Regime, ScenarioConfig,
};
