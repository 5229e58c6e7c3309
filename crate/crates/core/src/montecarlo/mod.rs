//! Sampled-distribution robustness experiment.
//!
//! Each trial draws a random finite-support demand distribution per market,
//! plans with the robust closed forms using only its mean and standard
//! deviation, and compares the plan with the quantities a planner who knew
//! the distribution would choose.
//!
//! Randomness comes from ChaCha8 (`rand_chacha`). Trial `t` uses a
//! generator seeded with `seed_from_u64(seed)` on stream `t`, so results do
//! not depend on thread scheduling.

pub mod normal;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{DemandMoments, DiscreteDist, Market, ScenarioConfig};
use crate::oracle::{Branch, NewsvendorKernel};
use crate::policy::{build_plan, transship_condition, LeftoverMode};

pub use normal::inverse_normal_cdf;

/// Marginal demand law with the two loss functions the expected profit
/// needs.
pub trait Marginal {
    fn mean(&self) -> f64;
    /// `E[(D - q)^+]`.
    fn shortfall(&self, q: f64) -> f64;
    /// `E[(q - D)^+]`.
    fn leftover(&self, q: f64) -> f64;
    /// Smallest `q` with `P(D <= q) >= fractile`.
    fn quantile(&self, fractile: f64) -> f64;
    /// A level above which demand is negligible.
    fn upper(&self) -> f64;
}

/// Normal demand with the given moments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalMarginal(pub DemandMoments);

impl Marginal for NormalMarginal {
    fn mean(&self) -> f64 {
        self.0.mean
    }

    fn shortfall(&self, q: f64) -> f64 {
        normal::shortfall(self.0.mean, self.0.std, q)
    }

    fn leftover(&self, q: f64) -> f64 {
        normal::leftover(self.0.mean, self.0.std, q)
    }

    fn quantile(&self, fractile: f64) -> f64 {
        (self.0.mean + self.0.std * inverse_normal_cdf(fractile)).max(0.0)
    }

    fn upper(&self) -> f64 {
        self.0.mean + 6.0 * self.0.std
    }
}

impl Marginal for DiscreteDist {
    fn mean(&self) -> f64 {
        self.expect(|d| d)
    }

    fn shortfall(&self, q: f64) -> f64 {
        self.expect(|d| (d - q).max(0.0))
    }

    fn leftover(&self, q: f64) -> f64 {
        self.expect(|d| (q - d).max(0.0))
    }

    fn quantile(&self, fractile: f64) -> f64 {
        let mut cumulative = 0.0;
        for (d, p) in self.iter() {
            cumulative += p;
            if cumulative >= fractile - 1e-12 {
                return d;
            }
        }
        *self.values().last().expect("distribution is never empty")
    }

    fn upper(&self) -> f64 {
        *self.values().last().expect("distribution is never empty")
    }
}

/// `n` distinct uniform values on `[0, upper)` sorted ascending, with
/// probabilities from `n` further uniform draws normalized to sum one.
pub fn sample_distribution(rng: &mut impl Rng, n: usize, upper: f64) -> Result<DiscreteDist> {
    if !(upper.is_finite() && upper > 0.0) || n == 0 {
        return Err(Error::InvalidExperiment(format!("n={n} upper={upper}")));
    }
    let mut values: Vec<f64> = Vec::with_capacity(n);
    while values.len() < n {
        let v = rng.random::<f64>() * upper;
        if !values.contains(&v) {
            values.push(v);
        }
    }
    values.sort_by(f64::total_cmp);
    let weights: Vec<f64> = loop {
        let w: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        if w.iter().sum::<f64>() > 0.0 {
            break w;
        }
    };
    let total: f64 = weights.iter().sum();
    DiscreteDist::new(values, weights.iter().map(|w| w / total).collect())
}

/// Mean and standard deviation of a finite distribution.
pub fn moments_of(dist: &DiscreteDist) -> DemandMoments {
    let mean = dist.expect(|d| d);
    let variance = dist.expect(|d| (d - mean) * (d - mean));
    DemandMoments::new(mean, variance.max(0.0).sqrt())
}

fn kernel_expectation(kernel: &NewsvendorKernel, m: &dyn Marginal, q: f64) -> f64 {
    let short = m.shortfall(q);
    kernel.price * (m.mean() - short) - kernel.shortage * short + kernel.salvage * m.leftover(q)
        - kernel.cost * q
}

/// Expected two-market profit of `(q1, q2)` when primary leftovers are
/// shipped whenever that pays, `s = min((q1 - D1)^+, q2)`. The payoff is a
/// sum of one-market terms, so only the marginals matter.
pub fn expected_joint_profit(
    cfg: &ScenarioConfig,
    primary: &dyn Marginal,
    secondary: &dyn Marginal,
    q1: f64,
    q2: f64,
) -> f64 {
    let f = cfg.fx.factor();
    let k1 = NewsvendorKernel::for_branch(cfg, Market::Primary, Branch::Hat);
    let k2 = NewsvendorKernel::for_branch(cfg, Market::Secondary, Branch::Hat);
    let margin = (cfg.secondary.cost * f - cfg.transship_cost - cfg.primary.salvage).max(0.0);
    let shipped = if margin > 0.0 {
        primary.leftover(q1) - primary.leftover(q1 - q2)
    } else {
        0.0
    };
    kernel_expectation(&k1, primary, q1) + kernel_expectation(&k2, secondary, q2) + margin * shipped
}

fn fractile(cfg: &ScenarioConfig, market: Market) -> Result<f64> {
    let phi = cfg.market(market).critical_fractile();
    if phi > 0.0 && phi < 1.0 {
        Ok(phi)
    } else {
        Err(Error::FractileOutOfRange(phi))
    }
}

const SEARCH_POINTS: usize = 64;
const REFINE_POINTS: usize = 16;
const REFINE_LEVELS: usize = 8;

/// Quantities a planner knowing both demand laws would choose.
///
/// Without profitable shipping each market is a classical newsvendor at
/// its critical fractile. Otherwise the expected joint profit is maximized
/// by a coarse-to-fine grid search.
pub fn complete_info_optimum(
    cfg: &ScenarioConfig,
    primary: &dyn Marginal,
    secondary: &dyn Marginal,
) -> Result<(f64, f64)> {
    let phi1 = fractile(cfg, Market::Primary)?;
    let phi2 = fractile(cfg, Market::Secondary)?;
    if !transship_condition(cfg) {
        return Ok((primary.quantile(phi1), secondary.quantile(phi2)));
    }
    let objective = |q1: f64, q2: f64| expected_joint_profit(cfg, primary, secondary, q1, q2);
    let mut lo = [0.0, 0.0];
    let mut hi = [primary.upper().max(0.0), secondary.upper().max(0.0)];
    let mut best = (0.0, 0.0, objective(0.0, 0.0));
    let mut points = SEARCH_POINTS;
    for _ in 0..=REFINE_LEVELS {
        let step = [(hi[0] - lo[0]) / points as f64, (hi[1] - lo[1]) / points as f64];
        for i in 0..=points {
            let q1 = lo[0] + step[0] * i as f64;
            for j in 0..=points {
                let q2 = lo[1] + step[1] * j as f64;
                let v = objective(q1, q2);
                if v > best.2 {
                    best = (q1, q2, v);
                }
            }
        }
        lo = [(best.0 - 2.0 * step[0]).max(0.0), (best.1 - 2.0 * step[1]).max(0.0)];
        hi = [best.0 + 2.0 * step[0], best.1 + 2.0 * step[1]];
        points = REFINE_POINTS;
    }
    Ok((best.0, best.1))
}

/// Which law the complete-information planner optimizes against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Benchmark {
    /// Normal demand with the sampled moments.
    #[default]
    Normal,
    /// The sampled distribution itself.
    Sampled,
}

/// Evenly spaced prices; each point sets `p1 = p2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PriceSweep {
    pub from: f64,
    pub to: f64,
    pub steps: usize,
}

impl PriceSweep {
    pub fn points(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.from];
        }
        let h = (self.to - self.from) / (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| if i + 1 == self.steps { self.to } else { self.from + h * i as f64 })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub trials: usize,
    /// Support size of each sampled distribution.
    pub n: usize,
    /// Support is drawn on `[0, multiplier * q]` with `q` the robust
    /// quantity under the baseline moments at the swept price.
    pub multiplier: f64,
    pub seed: u64,
    pub prices: PriceSweep,
    pub benchmark: Benchmark,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            trials: 10_000,
            n: 10,
            multiplier: 3.0,
            seed: 0,
            prices: PriceSweep {
                from: 8.0,
                to: 30.0,
                steps: 23,
            },
            benchmark: Benchmark::Normal,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidExperiment("trials must be at least 1".into()));
        }
        if self.n < 2 {
            return Err(Error::InvalidExperiment("n must be at least 2".into()));
        }
        if !(self.multiplier.is_finite() && self.multiplier > 0.0) {
            return Err(Error::InvalidExperiment(format!(
                "multiplier must be positive, got {}",
                self.multiplier
            )));
        }
        let s = &self.prices;
        if s.steps == 0 || !(s.from.is_finite() && s.to.is_finite()) || (s.steps > 1 && s.from >= s.to) {
            return Err(Error::InvalidExperiment(format!(
                "price sweep from={} to={} steps={}",
                s.from, s.to, s.steps
            )));
        }
        Ok(())
    }
}

/// Trial averages at one swept price. Index 0 is the primary market.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub price: f64,
    pub q_robust: [f64; 2],
    pub q_complete: [f64; 2],
    /// Mean of `q_robust - q_complete`.
    pub difference: [f64; 2],
    /// Mean of `|q_robust - q_complete| / q_complete` over trials with a
    /// positive benchmark quantity.
    pub relative_gap: [f64; 2],
    /// Worst-case profit the robust plan guarantees under the sampled
    /// moments.
    pub worst_case_profit: f64,
    /// Expected profit of the robust plan under the sampled distributions.
    pub realized_profit: f64,
    /// Expected profit of the benchmark plan under the sampled
    /// distributions.
    pub complete_profit: f64,
}

struct Trial {
    q_robust: [f64; 2],
    q_complete: [f64; 2],
    worst_case: f64,
    realized: f64,
    complete: f64,
}

/// Generator for trial `trial`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

fn with_price(cfg: &ScenarioConfig, price: f64) -> ScenarioConfig {
    let mut out = *cfg;
    out.primary.price = price;
    out.secondary.price = price;
    out
}

fn run_trial(
    cfg: &ScenarioConfig,
    exp: &ExperimentConfig,
    uppers: [f64; 2],
    trial: u64,
) -> Result<Trial> {
    let mut rng = trial_rng(exp.seed, trial);
    let d2 = sample_distribution(&mut rng, exp.n, uppers[1])?;
    let d1 = sample_distribution(&mut rng, exp.n, uppers[0])?;
    let mut sampled = *cfg;
    sampled.demand.primary = moments_of(&d1);
    sampled.demand.secondary = moments_of(&d2);
    sampled.demand.cross = None;
    let report = build_plan(&sampled, LeftoverMode::Expected)?;
    let (q1, q2) = (report.plan.q1, report.plan.q2);
    let (c1, c2) = match exp.benchmark {
        Benchmark::Normal => complete_info_optimum(
            &sampled,
            &NormalMarginal(sampled.demand.primary),
            &NormalMarginal(sampled.demand.secondary),
        )?,
        Benchmark::Sampled => complete_info_optimum(&sampled, &d1, &d2)?,
    };
    Ok(Trial {
        q_robust: [q1, q2],
        q_complete: [c1, c2],
        worst_case: report.profit.pi1_worst + report.profit.pi2_worst,
        realized: expected_joint_profit(&sampled, &d1, &d2, q1, q2),
        complete: expected_joint_profit(&sampled, &d1, &d2, c1, c2),
    })
}

fn summarize(price: f64, trials: &[Trial]) -> ComparisonRow {
    let n = trials.len() as f64;
    let mean = |f: &dyn Fn(&Trial) -> f64| trials.iter().map(f).sum::<f64>() / n;
    let gap = |k: usize| {
        let (sum, count) = trials
            .iter()
            .filter(|t| t.q_complete[k] > 0.0)
            .fold((0.0, 0usize), |(s, c), t| {
                (s + (t.q_robust[k] - t.q_complete[k]).abs() / t.q_complete[k], c + 1)
            });
        if count == 0 {
            0.0
        } else {
            sum / count as f64
        }
    };
    ComparisonRow {
        price,
        q_robust: [mean(&|t| t.q_robust[0]), mean(&|t| t.q_robust[1])],
        q_complete: [mean(&|t| t.q_complete[0]), mean(&|t| t.q_complete[1])],
        difference: [
            mean(&|t| t.q_robust[0] - t.q_complete[0]),
            mean(&|t| t.q_robust[1] - t.q_complete[1]),
        ],
        relative_gap: [gap(0), gap(1)],
        worst_case_profit: mean(&|t| t.worst_case),
        realized_profit: mean(&|t| t.realized),
        complete_profit: mean(&|t| t.complete),
    }
}

/// Runs every trial at every swept price. Trial `t` reuses the same
/// generator stream at each price.
pub fn run_experiment(cfg: &ScenarioConfig, exp: &ExperimentConfig) -> Result<Vec<ComparisonRow>> {
    cfg.validate()?;
    exp.validate()?;
    exp.prices
        .points()
        .into_iter()
        .map(|price| {
            let priced = with_price(cfg, price);
            priced.validate()?;
            let baseline = build_plan(&priced, LeftoverMode::Expected)?.plan;
            let uppers = [exp.multiplier * baseline.q1, exp.multiplier * baseline.q2];
            if uppers.iter().any(|u| !(*u > 0.0)) {
                return Err(Error::InvalidExperiment(format!(
                    "robust quantity at price {price} is zero; no sampling range"
                )));
            }
            let trials: Vec<Trial> = (0..exp.trials as u64)
                .into_par_iter()
                .map(|t| run_trial(&priced, exp, uppers, t))
                .collect::<Result<_>>()?;
            Ok(summarize(price, &trials))
        })
        .collect()
}
