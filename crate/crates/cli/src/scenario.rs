//! Scenario files: strict JSON mapped one-to-one onto [`ScenarioConfig`].

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use transship_core::model::{
    DemandMoments, ExchangeRate, JointMoments, MarketParams, ScenarioConfig,
};
use transship_core::montecarlo::Benchmark;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarketSection {
    pub p: f64,
    pub g: f64,
    pub c: f64,
    pub v: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransshipSection {
    #[serde(rename = "C")]
    pub cost: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FxSection {
    pub theta: f64,
    pub delta_theta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DemandSection {
    pub mean1: f64,
    pub std1: f64,
    pub mean2: f64,
    pub std2: f64,
    /// Cross moment `E[D1 D2]`; absent means independent demands.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cross: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSection {
    pub trials: Option<usize>,
    pub n: Option<usize>,
    pub multiplier: Option<f64>,
    pub price_from: Option<f64>,
    pub price_to: Option<f64>,
    pub price_steps: Option<usize>,
    pub benchmark: Option<Benchmark>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub param: String,
    pub from: f64,
    pub to: f64,
    pub steps: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleSection {
    pub grid_step: Option<f64>,
    pub support_spacing: Option<f64>,
    pub joint_points: Option<usize>,
    pub cross_values: Option<Vec<f64>>,
    pub correlations: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub market1: MarketSection,
    pub market2: MarketSection,
    pub transship: TransshipSection,
    pub fx: FxSection,
    pub demand: DemandSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub experiment: Option<ExperimentSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleSection>,
}

impl ScenarioFile {
    pub fn from_config(cfg: &ScenarioConfig) -> Self {
        let market = |m: &MarketParams| MarketSection {
            p: m.price,
            g: m.shortage,
            c: m.cost,
            v: m.salvage,
        };
        Self {
            market1: market(&cfg.primary),
            market2: market(&cfg.secondary),
            transship: TransshipSection {
                cost: cfg.transship_cost,
            },
            fx: FxSection {
                theta: cfg.fx.theta,
                delta_theta: cfg.fx.delta_theta,
            },
            demand: DemandSection {
                mean1: cfg.demand.primary.mean,
                std1: cfg.demand.primary.std,
                mean2: cfg.demand.secondary.mean,
                std2: cfg.demand.secondary.std,
                cross: cfg.demand.cross,
            },
            experiment: None,
            sweep: None,
            oracle: None,
        }
    }

    /// The model inputs, unvalidated.
    pub fn config(&self) -> ScenarioConfig {
        let market = |m: &MarketSection| MarketParams::new(m.p, m.g, m.c, m.v);
        let d = &self.demand;
        ScenarioConfig {
            primary: market(&self.market1),
            secondary: market(&self.market2),
            transship_cost: self.transship.cost,
            fx: ExchangeRate::new(self.fx.theta, self.fx.delta_theta),
            demand: JointMoments {
                primary: DemandMoments::new(d.mean1, d.std1),
                secondary: DemandMoments::new(d.mean2, d.std2),
                cross: d.cross,
            },
        }
    }
}

/// A parsed scenario together with the digest of its source bytes.
#[derive(Debug, Clone)]
pub struct LoadedScenario {
    pub file: ScenarioFile,
    pub config: ScenarioConfig,
    pub sha256: String,
}

pub fn parse_scenario(bytes: &[u8]) -> Result<LoadedScenario, CliError> {
    let file: ScenarioFile = serde_json::from_slice(bytes)
        .map_err(|e| CliError::validation("MalformedScenario", e.to_string()))?;
    let config = transship_core::validate_scenario(file.config())?;
    Ok(LoadedScenario {
        file,
        config,
        sha256: hex_digest(bytes),
    })
}

pub fn load_scenario(path: &Path) -> Result<LoadedScenario, CliError> {
    let bytes = std::fs::read(path).map_err(|e| CliError::io(&path.display().to_string(), e))?;
    parse_scenario(&bytes)
}

fn hex_digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// A sweepable input. `Leftover` is the realized primary leftover fed to
/// the secondary decision.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    Price(usize),
    Shortage(usize),
    Cost(usize),
    Salvage(usize),
    TransshipCost,
    Theta,
    DeltaTheta,
    Mean(usize),
    Std(usize),
    Cross,
    Leftover,
}

impl SweepParam {
    pub fn parse(path: &str) -> Result<Self, CliError> {
        let param = match path {
            "market1.p" => Self::Price(1),
            "market2.p" => Self::Price(2),
            "market1.g" => Self::Shortage(1),
            "market2.g" => Self::Shortage(2),
            "market1.c" => Self::Cost(1),
            "market2.c" => Self::Cost(2),
            "market1.v" => Self::Salvage(1),
            "market2.v" => Self::Salvage(2),
            "transship.C" => Self::TransshipCost,
            "fx.theta" => Self::Theta,
            "fx.delta_theta" => Self::DeltaTheta,
            "demand.mean1" => Self::Mean(1),
            "demand.mean2" => Self::Mean(2),
            "demand.std1" => Self::Std(1),
            "demand.std2" => Self::Std(2),
            "demand.cross" => Self::Cross,
            "x" | "leftover" => Self::Leftover,
            other => {
                return Err(CliError::validation(
                    "InvalidSweepPath",
                    format!("unknown parameter path '{other}'"),
                ))
            }
        };
        Ok(param)
    }

    /// Writes `value` into `cfg`; `Leftover` leaves it untouched.
    pub fn apply(&self, cfg: &mut ScenarioConfig, value: f64) {
        let (m1, m2) = (&mut cfg.primary, &mut cfg.secondary);
        match *self {
            Self::Price(1) => m1.price = value,
            Self::Price(_) => m2.price = value,
            Self::Shortage(1) => m1.shortage = value,
            Self::Shortage(_) => m2.shortage = value,
            Self::Cost(1) => m1.cost = value,
            Self::Cost(_) => m2.cost = value,
            Self::Salvage(1) => m1.salvage = value,
            Self::Salvage(_) => m2.salvage = value,
            Self::TransshipCost => cfg.transship_cost = value,
            Self::Theta => cfg.fx.theta = value,
            Self::DeltaTheta => cfg.fx.delta_theta = value,
            Self::Mean(1) => cfg.demand.primary.mean = value,
            Self::Mean(_) => cfg.demand.secondary.mean = value,
            Self::Std(1) => cfg.demand.primary.std = value,
            Self::Std(_) => cfg.demand.secondary.std = value,
            Self::Cross => cfg.demand.cross = Some(value),
            Self::Leftover => {}
        }
    }
}

/// Evenly spaced sweep over one parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub path: String,
    pub param: SweepParam,
    pub from: f64,
    pub to: f64,
    pub steps: usize,
}

impl SweepSpec {
    pub fn new(path: &str, from: f64, to: f64, steps: usize) -> Result<Self, CliError> {
        let param = SweepParam::parse(path)?;
        if steps < 2 {
            return Err(CliError::validation("InvalidSweep", format!("steps must be at least 2, got {steps}")));
        }
        if !(from.is_finite() && to.is_finite() && from < to) {
            return Err(CliError::validation("InvalidSweep", format!("need from < to, got {from} and {to}")));
        }
        Ok(Self {
            path: path.to_string(),
            param,
            from,
            to,
            steps,
        })
    }

    /// Sweep points; the last is `to` exactly.
    pub fn values(&self) -> Vec<f64> {
        let h = (self.to - self.from) / (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| {
                if i + 1 == self.steps {
                    self.to
                } else {
                    self.from + h * i as f64
                }
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASELINE: &str = r#"{
        "market1": {"p": 15, "g": 6, "c": 5, "v": 3},
        "market2": {"p": 15, "g": 6, "c": 5, "v": 3},
        "transship": {"C": 2},
        "fx": {"theta": 6.7, "delta_theta": 0.3},
        "demand": {"mean1": 800, "std1": 100, "mean2": 600, "std2": 80}
    }"#;

    #[test]
    fn parses_and_validates() {
        let s = parse_scenario(BASELINE.as_bytes()).unwrap();
        assert_eq!(s.config.primary.price, 15.0);
        assert_eq!(s.config.demand.cross, None);
        assert_eq!(s.sha256.len(), 64);
        let again = ScenarioFile::from_config(&s.config);
        assert_eq!(again, s.file);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = BASELINE.replace("\"v\": 3}", "\"v\": 3, \"w\": 1}");
        let err = parse_scenario(text.as_bytes()).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("unknown field"));
    }

    #[test]
    fn invariant_violations_are_named() {
        let text = BASELINE.replace("\"c\": 5, \"v\": 3", "\"c\": 3, \"v\": 3");
        let err = parse_scenario(text.as_bytes()).unwrap_err();
        assert!(err.to_string().starts_with("DegenerateSalvage"), "{err}");
    }

    #[test]
    fn sweep_paths() {
        assert_eq!(SweepParam::parse("demand.std1").unwrap(), SweepParam::Std(1));
        assert!(SweepParam::parse("demand.sigma").is_err());
        assert!(SweepSpec::new("x", 0.0, 1000.0, 1).is_err());
        assert!(SweepSpec::new("x", 5.0, 1.0, 3).is_err());
        let spec = SweepSpec::new("x", 0.0, 1000.0, 101).unwrap();
        let v = spec.values();
        assert_eq!((v.len(), v[1], v[100]), (101, 10.0, 1000.0));
    }
}
