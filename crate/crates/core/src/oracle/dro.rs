//! Brute-force distributionally robust optimization: for every candidate
//! quantity solve the inner worst-case moment LP, then scan for the best
//! quantity. This shares nothing with the closed forms in `policy` beyond
//! the scenario itself.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{JointMoments, Market, ScenarioConfig};

use super::moment::{MomentProblem, Sense, SupportGrid};

/// Support resolution per market for the bivariate check.
pub const DEFAULT_JOINT_SUPPORT_POINTS: usize = 61;

/// Which economics a market's quantity is optimized under.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Branch {
    /// No transshipment: the market's own production cost and salvage value.
    Hat,
    /// Transshipment active. Primary leftovers are worth `c2 f - C`; the
    /// secondary market is stocked at the landed cost `C + v1`.
    Tilde,
}

/// Single-period payoff `p min(d,q) - g (d-q)^+ + v (q-d)^+ - c q`, all in
/// primary currency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NewsvendorKernel {
    pub price: f64,
    pub shortage: f64,
    pub cost: f64,
    pub salvage: f64,
}

impl NewsvendorKernel {
    pub fn for_branch(cfg: &ScenarioConfig, market: Market, branch: Branch) -> Self {
        let f = cfg.fx.factor();
        let (m1, m2) = (&cfg.primary, &cfg.secondary);
        match (market, branch) {
            (Market::Primary, Branch::Hat) => Self {
                price: m1.price,
                shortage: m1.shortage,
                cost: m1.cost,
                salvage: m1.salvage,
            },
            (Market::Primary, Branch::Tilde) => Self {
                price: m1.price,
                shortage: m1.shortage,
                cost: m1.cost,
                salvage: m2.cost * f - cfg.transship_cost,
            },
            (Market::Secondary, Branch::Hat) => Self {
                price: m2.price * f,
                shortage: m2.shortage * f,
                cost: m2.cost * f,
                salvage: m2.salvage * f,
            },
            (Market::Secondary, Branch::Tilde) => Self {
                price: m2.price * f,
                shortage: m2.shortage * f,
                cost: cfg.transship_cost + m1.salvage,
                salvage: m2.salvage * f,
            },
        }
    }

    /// Demand-dependent part of the payoff (everything except `-c q`).
    pub fn revenue(&self, demand: f64, q: f64) -> f64 {
        self.price * demand.min(q) - self.shortage * (demand - q).max(0.0)
            + self.salvage * (q - demand).max(0.0)
    }

    pub fn payoff(&self, demand: f64, q: f64) -> f64 {
        self.revenue(demand, q) - self.cost * q
    }
}

/// `0, step, 2 step, ...` up to the first point at or beyond `upper`.
pub fn quantity_grid(upper: f64, step: f64) -> Result<Vec<f64>> {
    if !(step.is_finite() && step > 0.0 && upper.is_finite() && upper >= 0.0) {
        return Err(Error::InvalidGrid(format!("upper={upper} step={step}")));
    }
    let n = (upper / step).ceil() as usize;
    Ok((0..=n).map(|i| i as f64 * step).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleArgmax {
    pub quantity: f64,
    /// Worst-case expected payoff at `quantity`.
    pub value: f64,
    /// Probability the worst case at `quantity` puts on the largest support
    /// point. Positive mass there means the support cap is binding.
    pub edge_mass: f64,
    /// Largest support point used.
    pub support_upper: f64,
}

impl OracleArgmax {
    /// True when either the support cap or the end of the quantity grid
    /// constrains the result.
    pub fn truncated(&self, q_grid_upper: f64) -> bool {
        self.edge_mass > 1e-9 || self.quantity >= q_grid_upper
    }
}

/// Resolution and span controls for [`adaptive_optimal_quantity`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleOptions {
    /// Quantity grid step.
    pub q_step: f64,
    /// Support grid spacing.
    pub support_spacing: f64,
    /// How many times the span may be doubled when truncation binds.
    pub max_extensions: usize,
}

impl OracleOptions {
    /// Support spacing twice the quantity step.
    pub fn with_step(q_step: f64) -> Self {
        Self {
            q_step,
            support_spacing: 2.0 * q_step,
            max_extensions: 4,
        }
    }
}

fn check_quantity_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidGrid("empty quantity grid".into()));
    }
    if grid.iter().any(|q| !q.is_finite() || *q < 0.0) {
        return Err(Error::InvalidGrid("quantities must be finite and nonnegative".into()));
    }
    Ok(())
}

/// Quantities solved in sequence from one warm basis. Fixed so results do
/// not depend on the thread count.
const WARM_CHUNK: usize = 64;

/// Worst-case expected payoff of `kernel` at every quantity in `q_grid`.
pub fn worst_case_payoffs(
    kernel: &NewsvendorKernel,
    problem: &MomentProblem,
    q_grid: &[f64],
) -> Result<Vec<f64>> {
    let parts: Vec<Result<Vec<f64>>> = q_grid
        .par_chunks(WARM_CHUNK)
        .map(|qs| {
            let mut solver = problem.solver()?;
            qs.iter()
                .map(|&q| {
                    let objective = problem.kernel_values(|d, _| kernel.revenue(d, q));
                    let inner = solver.solve(&objective, Sense::Minimize)?;
                    Ok(inner.value - kernel.cost * q)
                })
                .collect()
        })
        .collect();
    let mut values = Vec::with_capacity(q_grid.len());
    for part in parts {
        values.extend(part?);
    }
    Ok(values)
}

/// Grid point with the largest worst-case expected payoff; ties go to the
/// smaller quantity.
pub fn dro_optimal_quantity(
    cfg: &ScenarioConfig,
    market: Market,
    branch: Branch,
    q_grid: &[f64],
    support: &SupportGrid,
) -> Result<OracleArgmax> {
    check_quantity_grid(q_grid)?;
    let kernel = NewsvendorKernel::for_branch(cfg, market, branch);
    let problem = MomentProblem::univariate(support, cfg.moments(market));
    let values = worst_case_payoffs(&kernel, &problem, q_grid)?;
    let (best, value) = values
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, &v)| {
            if v > acc.1 {
                (i, v)
            } else {
                acc
            }
        });
    let quantity = q_grid[best];
    let objective = problem.kernel_values(|d, _| kernel.revenue(d, quantity));
    let worst = problem.solver()?.solve(&objective, Sense::Minimize)?;
    let upper = support.upper();
    let edge_mass = worst
        .atoms
        .iter()
        .filter(|a| a.0 == upper)
        .map(|a| a.2)
        .sum();
    Ok(OracleArgmax {
        quantity,
        value,
        edge_mass,
        support_upper: upper,
    })
}

/// Runs [`dro_optimal_quantity`] on `[0, mean + 6 std]` and doubles the
/// distance above the mean while the support cap or the quantity grid end
/// binds.
pub fn adaptive_optimal_quantity(
    cfg: &ScenarioConfig,
    market: Market,
    branch: Branch,
    options: &OracleOptions,
) -> Result<OracleArgmax> {
    let moments = cfg.moments(market);
    if !(options.support_spacing > 0.0 && options.q_step > 0.0) {
        return Err(Error::InvalidGrid("spacing and step must be positive".into()));
    }
    let mut reach = super::moment::SPAN_STDS * moments.std;
    let mut extensions = 0;
    loop {
        let upper = moments.mean + reach;
        let points = (upper / options.support_spacing).ceil() as usize + 1;
        let support = SupportGrid::uniform(upper, points.max(2))?;
        let q_grid = quantity_grid(upper, options.q_step)?;
        let q_upper = *q_grid.last().expect("quantity grid is never empty");
        let result = dro_optimal_quantity(cfg, market, branch, &q_grid, &support)?;
        if !result.truncated(q_upper) || extensions >= options.max_extensions || reach == 0.0 {
            return Ok(result);
        }
        reach *= 2.0;
        extensions += 1;
    }
}

/// Realized two-market profit for planned `(q1, q2)` when leftovers of the
/// primary season are shipped whenever that pays: `s = min((q1-d1)^+, q2)`.
pub fn joint_payoff(cfg: &ScenarioConfig, d1: f64, d2: f64, q1: f64, q2: f64) -> f64 {
    let f = cfg.fx.factor();
    let primary = NewsvendorKernel::for_branch(cfg, Market::Primary, Branch::Hat);
    let secondary = NewsvendorKernel::for_branch(cfg, Market::Secondary, Branch::Hat);
    let margin = (cfg.secondary.cost * f - cfg.transship_cost - cfg.primary.salvage).max(0.0);
    primary.payoff(d1, q1) + secondary.payoff(d2, q2) + margin * (q1 - d1).max(0.0).min(q2)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JointArgmax {
    pub cross: f64,
    pub q1: f64,
    pub q2: f64,
    pub value: f64,
}

/// Joint worst-case argmax over `q1_grid x q2_grid` for each cross moment.
pub fn joint_dro_check(
    cfg: &ScenarioConfig,
    q1_grid: &[f64],
    q2_grid: &[f64],
    cross_values: &[f64],
    support: (&SupportGrid, &SupportGrid),
) -> Result<Vec<JointArgmax>> {
    check_quantity_grid(q1_grid)?;
    check_quantity_grid(q2_grid)?;
    cross_values
        .iter()
        .map(|&cross| {
            let joint = JointMoments {
                cross: Some(cross),
                ..cfg.demand
            };
            joint.validate()?;
            let mut scenario = *cfg;
            scenario.demand = joint;
            let problem = MomentProblem::bivariate(support.0, support.1, &joint);
            let rows: Vec<Result<(usize, f64)>> = q1_grid
                .par_iter()
                .map(|&q1| {
                    let mut solver = problem.solver()?;
                    let mut best = (0, f64::NEG_INFINITY);
                    for (j, &q2) in q2_grid.iter().enumerate() {
                        let objective =
                            problem.kernel_values(|d1, d2| joint_payoff(&scenario, d1, d2, q1, q2));
                        let v = solver.solve(&objective, Sense::Minimize)?.value;
                        if v > best.1 {
                            best = (j, v);
                        }
                    }
                    Ok(best)
                })
                .collect();
            let mut best = JointArgmax {
                cross,
                q1: f64::NAN,
                q2: f64::NAN,
                value: f64::NEG_INFINITY,
            };
            for (i, row) in rows.into_iter().enumerate() {
                let (j, v) = row?;
                if v > best.value {
                    best = JointArgmax {
                        cross,
                        q1: q1_grid[i],
                        q2: q2_grid[j],
                        value: v,
                    };
                }
            }
            Ok(best)
        })
        .collect()
}
