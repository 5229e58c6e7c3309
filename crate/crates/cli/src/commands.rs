use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use transship_core::model::{JointMoments, Market, ScenarioConfig};
use transship_core::montecarlo::{self, Benchmark, ExperimentConfig, PriceSweep};
use transship_core::oracle::{
    adaptive_optimal_quantity, joint_dro_check, Branch, OracleOptions, SupportGrid,
    DEFAULT_JOINT_SUPPORT_POINTS,
};
use transship_core::policy::{self, build_plan, LeftoverMode};

use crate::error::CliError;
use crate::format::sig;
use crate::scenario::{load_scenario, LoadedScenario, SweepParam, SweepSpec};

pub const TOOL: &str = concat!("transship ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, Args)]
pub struct PolicyArgs {
    /// Scenario file (JSON).
    pub scenario: PathBuf,
    /// Realized primary leftover fed to the secondary decision.
    #[arg(long, allow_negative_numbers = true, conflicts_with = "expected_leftover")]
    pub leftover: Option<f64>,
    /// Use the planning leftover (q1 - E[D1])^+ (default).
    #[arg(long)]
    pub expected_leftover: bool,
    /// Significant digits in printed numbers.
    #[arg(long, default_value_t = 6)]
    pub precision: usize,
    /// Also write the plan as a one-row CSV.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    pub scenario: PathBuf,
    /// Parameter path such as demand.std1, fx.delta_theta, market1.p or x.
    #[arg(long)]
    pub param: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    pub from: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub to: Option<f64>,
    #[arg(long)]
    pub steps: Option<usize>,
    /// Fixed realized leftover for sweeps over other parameters.
    #[arg(long, allow_negative_numbers = true)]
    pub leftover: Option<f64>,
    #[arg(long, default_value_t = 6)]
    pub precision: usize,
    /// CSV destination; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    pub scenario: PathBuf,
    /// Quantity grid step of the univariate oracle.
    #[arg(long)]
    pub grid_step: Option<f64>,
    /// Support spacing of the univariate oracle (default: twice the step).
    #[arg(long)]
    pub support_spacing: Option<f64>,
    /// Support points per market in the joint check.
    #[arg(long)]
    pub joint_points: Option<usize>,
    /// Cross moments E[D1 D2] for the joint check.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub cross_values: Option<Vec<f64>>,
    /// Correlations converted to cross moments (default -0.5,0,0.5).
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, conflicts_with = "cross_values")]
    pub correlations: Option<Vec<f64>>,
    /// Skip the joint check.
    #[arg(long)]
    pub skip_joint: bool,
    #[arg(long, default_value_t = 6)]
    pub precision: usize,
    /// Adds an offset to every closed-form quantity before comparing.
    #[arg(long, hide = true, allow_negative_numbers = true)]
    pub perturb_closed_form: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BenchmarkArg {
    Normal,
    Sampled,
}

impl From<BenchmarkArg> for Benchmark {
    fn from(b: BenchmarkArg) -> Self {
        match b {
            BenchmarkArg::Normal => Benchmark::Normal,
            BenchmarkArg::Sampled => Benchmark::Sampled,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct RobustnessArgs {
    pub scenario: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub trials: Option<usize>,
    /// Support size of each sampled distribution.
    #[arg(long)]
    pub n: Option<usize>,
    /// Sampling range multiplier on the robust quantity.
    #[arg(long)]
    pub multiplier: Option<f64>,
    #[arg(long)]
    pub price_from: Option<f64>,
    #[arg(long)]
    pub price_to: Option<f64>,
    #[arg(long)]
    pub price_steps: Option<usize>,
    #[arg(long, value_enum)]
    pub benchmark: Option<BenchmarkArg>,
    #[arg(long, default_value_t = 6)]
    pub precision: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn write_output(path: Option<&Path>, bytes: &[u8], stdout: &mut dyn Write) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, bytes).map_err(|e| CliError::io(&p.display().to_string(), e)),
        None => stdout.write_all(bytes).map_err(|e| CliError::io("stdout", e)),
    }
}

fn csv_bytes(comment: &str, header: &[&str], rows: &[Vec<String>]) -> Result<Vec<u8>, CliError> {
    let mut buf = format!("# {comment}\n").into_bytes();
    {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(&mut buf);
        w.write_record(header).map_err(|e| CliError::io("csv", e))?;
        for row in rows {
            w.write_record(row).map_err(|e| CliError::io("csv", e))?;
        }
        w.flush().map_err(|e| CliError::io("csv", e))?;
    }
    Ok(buf)
}

fn provenance(s: &LoadedScenario) -> String {
    format!("scenario_sha256={} tool={TOOL}", s.sha256)
}

fn io_err(e: std::io::Error) -> CliError {
    CliError::io("stdout", e)
}

const PLAN_HEADER: [&str; 13] = [
    "value",
    "q1",
    "q2",
    "s",
    "q2_production",
    "regime",
    "pi2_worst",
    "pi1_worst",
    "leftover",
    "q1_hat",
    "q1_tilde",
    "q2_hat",
    "q2_tilde",
];

fn plan_row(cfg: &ScenarioConfig, value: String, mode: LeftoverMode, digits: usize) -> Result<Vec<String>, CliError> {
    let report = build_plan(cfg, mode)?;
    let p = &report.plan;
    let opt = |r: transship_core::Result<f64>| r.map(|q| sig(q, digits)).unwrap_or_default();
    Ok(vec![
        value,
        sig(p.q1, digits),
        sig(p.q2, digits),
        sig(p.transship, digits),
        sig(p.q2_production, digits),
        p.regime.to_string(),
        sig(report.profit.pi2_worst, digits),
        sig(report.profit.pi1_worst, digits),
        sig(report.leftover, digits),
        opt(policy::primary_hat_quantity(cfg)),
        opt(policy::primary_tilde_quantity(cfg)),
        opt(policy::secondary_hat_quantity(cfg)),
        opt(policy::secondary_tilde_quantity(cfg)),
    ])
}

pub fn cmd_policy(args: &PolicyArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let scenario = load_scenario(&args.scenario)?;
    let cfg = &scenario.config;
    let d = args.precision;
    let mode = match args.leftover {
        Some(x) => LeftoverMode::Realized(x),
        None => LeftoverMode::Expected,
    };
    let report = build_plan(cfg, mode)?;
    let plan = &report.plan;
    let source = match mode {
        LeftoverMode::Realized(_) => "realized",
        LeftoverMode::Expected => "expected",
    };
    let mut text = String::new();
    text.push_str(&format!("scenario: {} ({})\n", args.scenario.display(), scenario.sha256));
    text.push_str(&format!("regime: {}\n", plan.regime));
    text.push_str(&format!("leftover: {} ({source})\n", sig(report.leftover, d)));
    text.push_str("plan:\n");
    for (name, v) in [
        ("q1", plan.q1),
        ("q2", plan.q2),
        ("s", plan.transship),
        ("q2_production", plan.q2_production),
    ] {
        text.push_str(&format!("  {name}: {}\n", sig(v, d)));
    }
    match policy::production_thresholds(cfg) {
        Ok(t) => {
            text.push_str("thresholds:\n");
            for (name, v) in [
                ("c2", t.c2_ddot),
                ("p2", t.p2_ddot),
                ("g2", t.g2_ddot),
                ("v2", t.v2_ddot),
                ("std2", t.sigma_ddot),
                ("mean2", t.mean_ddot),
            ] {
                text.push_str(&format!("  {name}: {}\n", sig(v, d)));
            }
            text.push_str(&format!("  produce: {}\n", if t.produce { "yes" } else { "no" }));
        }
        Err(_) => text.push_str("thresholds: not applicable while shipping pays\n"),
    }
    text.push_str("profit:\n");
    text.push_str(&format!("  pi2_worst: {}\n", sig(report.profit.pi2_worst, d)));
    text.push_str(&format!("  pi1_worst: {}\n", sig(report.profit.pi1_worst, d)));
    stdout.write_all(text.as_bytes()).map_err(io_err)?;
    if let Some(path) = &args.out {
        let row = plan_row(cfg, sig(report.leftover, d), mode, d)?;
        let bytes = csv_bytes(&provenance(&scenario), &PLAN_HEADER, &[row])?;
        write_output(Some(path), &bytes, stdout)?;
    }
    Ok(())
}

fn sweep_spec(args: &SweepArgs, scenario: &LoadedScenario) -> Result<SweepSpec, CliError> {
    let section = scenario.file.sweep.as_ref();
    let missing = |what: &str| CliError::validation("InvalidSweep", format!("missing {what}"));
    let param = args
        .param
        .clone()
        .or_else(|| section.map(|s| s.param.clone()))
        .ok_or_else(|| missing("--param"))?;
    let from = args.from.or(section.map(|s| s.from)).ok_or_else(|| missing("--from"))?;
    let to = args.to.or(section.map(|s| s.to)).ok_or_else(|| missing("--to"))?;
    let steps = args.steps.or(section.map(|s| s.steps)).ok_or_else(|| missing("--steps"))?;
    SweepSpec::new(&param, from, to, steps)
}

pub fn cmd_sweep(args: &SweepArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let scenario = load_scenario(&args.scenario)?;
    let spec = sweep_spec(args, &scenario)?;
    let d = args.precision;
    let rows = spec
        .values()
        .into_iter()
        .map(|value| {
            let mut cfg = scenario.config;
            spec.param.apply(&mut cfg, value);
            let mode = match (spec.param, args.leftover) {
                (SweepParam::Leftover, _) => LeftoverMode::Realized(value),
                (_, Some(x)) => LeftoverMode::Realized(x),
                (_, None) => LeftoverMode::Expected,
            };
            plan_row(&cfg, sig(value, d), mode, d).map_err(|e| match e {
                CliError::Validation { name, message } => CliError::Validation {
                    name,
                    message: format!("{} = {value}: {message}", spec.path),
                },
                other => other,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let comment = format!("{} param={}", provenance(&scenario), spec.path);
    let bytes = csv_bytes(&comment, &PLAN_HEADER, &rows)?;
    write_output(args.out.as_deref(), &bytes, stdout)
}

/// One closed form versus oracle comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchCheck {
    pub market: Market,
    pub branch: Branch,
    pub closed_form: f64,
    pub oracle: f64,
    pub tolerance: f64,
    pub support_upper: f64,
}

impl BranchCheck {
    pub fn passed(&self) -> bool {
        (self.closed_form - self.oracle).abs() <= self.tolerance
    }
}

fn closed_form(cfg: &ScenarioConfig, market: Market, branch: Branch) -> transship_core::Result<f64> {
    match (market, branch) {
        (Market::Primary, Branch::Hat) => policy::primary_hat_quantity(cfg),
        (Market::Primary, Branch::Tilde) => policy::primary_tilde_quantity(cfg),
        (Market::Secondary, Branch::Hat) => policy::secondary_hat_quantity(cfg),
        (Market::Secondary, Branch::Tilde) => policy::secondary_tilde_quantity(cfg),
    }
}

/// Branches whose closed forms the plan of `cfg` depends on.
pub fn applicable_branches(cfg: &ScenarioConfig) -> Vec<(Market, Branch)> {
    let mut out = vec![(Market::Primary, Branch::Hat), (Market::Secondary, Branch::Hat)];
    if policy::transship_condition(cfg) {
        out.push((Market::Primary, Branch::Tilde));
        out.push((Market::Secondary, Branch::Tilde));
    }
    out
}

pub fn check_branch(
    cfg: &ScenarioConfig,
    market: Market,
    branch: Branch,
    options: &OracleOptions,
    perturb: f64,
) -> Result<BranchCheck, CliError> {
    let closed = closed_form(cfg, market, branch)? + perturb;
    let found = adaptive_optimal_quantity(cfg, market, branch, options)?;
    Ok(BranchCheck {
        market,
        branch,
        closed_form: closed,
        oracle: found.quantity,
        tolerance: options.q_step,
        support_upper: found.support_upper,
    })
}

fn label(market: Market, branch: Branch) -> String {
    let m = match market {
        Market::Primary => "primary",
        Market::Secondary => "secondary",
    };
    let b = match branch {
        Branch::Hat => "hat",
        Branch::Tilde => "tilde",
    };
    format!("{m}/{b}")
}

fn pass(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

pub fn cmd_verify(args: &VerifyArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let scenario = load_scenario(&args.scenario)?;
    let cfg = scenario.config;
    let section = scenario.file.oracle.clone().unwrap_or_default();
    let d = args.precision;
    let step = args.grid_step.or(section.grid_step).unwrap_or(0.5);
    if !(step.is_finite() && step > 0.0) {
        return Err(CliError::validation("InvalidGrid", format!("grid step {step}")));
    }
    let mut options = OracleOptions::with_step(step);
    if let Some(spacing) = args.support_spacing.or(section.support_spacing) {
        options.support_spacing = spacing;
    }
    let perturb = args.perturb_closed_form.unwrap_or(0.0);
    let mut failures = 0usize;
    let mut out = String::new();
    out.push_str(&format!(
        "scenario: {} ({})\noracle: grid step {}, support spacing {}\n",
        args.scenario.display(),
        scenario.sha256,
        sig(step, d),
        sig(options.support_spacing, d)
    ));
    let mut spans = [0.0f64; 2];
    for (market, branch) in applicable_branches(&cfg) {
        let check = check_branch(&cfg, market, branch, &options, perturb)?;
        let k = if market == Market::Primary { 0 } else { 1 };
        spans[k] = spans[k].max(check.support_upper);
        if !check.passed() {
            failures += 1;
        }
        out.push_str(&format!(
            "{} {:<16} closed={} oracle={} diff={} tol={} support=[0, {}]\n",
            pass(check.passed()),
            label(market, branch),
            sig(check.closed_form, d),
            sig(check.oracle, d),
            sig(check.oracle - check.closed_form, d),
            sig(check.tolerance, d),
            sig(check.support_upper, d)
        ));
    }
    stdout.write_all(out.as_bytes()).map_err(io_err)?;
    if !args.skip_joint {
        let crosses = cross_values(args, &section, &cfg);
        let points = args.joint_points.or(section.joint_points).unwrap_or(DEFAULT_JOINT_SUPPORT_POINTS);
        failures += joint_report(&cfg, &crosses, spans, points, d, stdout)?;
    }
    if failures > 0 {
        writeln!(stdout, "{failures} check(s) failed").map_err(io_err)?;
        return Err(CliError::Verification(format!("{failures} check(s) failed")));
    }
    writeln!(stdout, "all checks passed").map_err(io_err)?;
    Ok(())
}

fn cross_values(args: &VerifyArgs, section: &crate::scenario::OracleSection, cfg: &ScenarioConfig) -> Vec<f64> {
    if let Some(c) = args.cross_values.clone().or(section.cross_values.clone()) {
        return c;
    }
    let rhos = args
        .correlations
        .clone()
        .or(section.correlations.clone())
        .unwrap_or_else(|| vec![-0.5, 0.0, 0.5]);
    rhos.iter()
        .map(|&r| JointMoments::cross_for_correlation(&cfg.demand.primary, &cfg.demand.secondary, r))
        .collect()
}

/// Runs the joint check and prints it; returns the number of failed checks.
pub fn joint_report(
    cfg: &ScenarioConfig,
    crosses: &[f64],
    spans: [f64; 2],
    points: usize,
    digits: usize,
    stdout: &mut dyn Write,
) -> Result<usize, CliError> {
    let d = digits;
    let g1 = SupportGrid::uniform(spans[0], points)?;
    let g2 = SupportGrid::uniform(spans[1], points)?;
    let results = joint_dro_check(cfg, g1.points(), g2.points(), crosses, (&g1, &g2))?;
    let mut text = format!(
        "joint: {}x{} support on [0, {}] x [0, {}]\n",
        g1.len(),
        g2.len(),
        sig(spans[0], d),
        sig(spans[1], d)
    );
    let baseline_plan = policy::correlated_policy(cfg)?;
    let mut plans_equal = true;
    for r in &results {
        let mut correlated = *cfg;
        correlated.demand.cross = Some(r.cross);
        plans_equal &= policy::correlated_policy(&correlated)? == baseline_plan;
        text.push_str(&format!(
            "  cross={} argmax=({}, {}) value={}\n",
            sig(r.cross, d),
            sig(r.q1, d),
            sig(r.q2, d),
            sig(r.value, d)
        ));
    }
    let spread = |f: fn(&transship_core::oracle::JointArgmax) -> f64| {
        let lo = results.iter().map(f).fold(f64::INFINITY, f64::min);
        let hi = results.iter().map(f).fold(f64::NEG_INFINITY, f64::max);
        hi - lo
    };
    let (s1, s2) = (spread(|r| r.q1), spread(|r| r.q2));
    let stable = s1 <= g1.max_step() && s2 <= g2.max_step();
    text.push_str(&format!(
        "{} joint argmax spread q1={} q2={} (steps {} and {})\n",
        pass(stable),
        sig(s1, d),
        sig(s2, d),
        sig(g1.max_step(), d),
        sig(g2.max_step(), d)
    ));
    text.push_str(&format!("{} plan identical across cross moments\n", pass(plans_equal)));
    stdout.write_all(text.as_bytes()).map_err(io_err)?;
    Ok(usize::from(!stable) + usize::from(!plans_equal))
}

pub fn experiment_config(args: &RobustnessArgs, scenario: &LoadedScenario) -> ExperimentConfig {
    let base = ExperimentConfig::default();
    let s = scenario.file.experiment.clone().unwrap_or_default();
    ExperimentConfig {
        trials: args.trials.or(s.trials).unwrap_or(base.trials),
        n: args.n.or(s.n).unwrap_or(base.n),
        multiplier: args.multiplier.or(s.multiplier).unwrap_or(base.multiplier),
        seed: args.seed,
        prices: PriceSweep {
            from: args.price_from.or(s.price_from).unwrap_or(base.prices.from),
            to: args.price_to.or(s.price_to).unwrap_or(base.prices.to),
            steps: args.price_steps.or(s.price_steps).unwrap_or(base.prices.steps),
        },
        benchmark: args
            .benchmark
            .map(Benchmark::from)
            .or(s.benchmark)
            .unwrap_or(base.benchmark),
    }
}

pub fn cmd_robustness(args: &RobustnessArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let scenario = load_scenario(&args.scenario)?;
    let exp = experiment_config(args, &scenario);
    let rows = montecarlo::run_experiment(&scenario.config, &exp)?;
    let d = args.precision;
    let header = [
        "price",
        "q1_robust",
        "q2_robust",
        "q1_complete",
        "q2_complete",
        "q1_diff",
        "q2_diff",
        "q1_gap",
        "q2_gap",
        "worst_case_profit",
        "realized_profit",
        "complete_profit",
    ];
    let records: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            [
                r.price,
                r.q_robust[0],
                r.q_robust[1],
                r.q_complete[0],
                r.q_complete[1],
                r.difference[0],
                r.difference[1],
                r.relative_gap[0],
                r.relative_gap[1],
                r.worst_case_profit,
                r.realized_profit,
                r.complete_profit,
            ]
            .iter()
            .map(|v| sig(*v, d))
            .collect()
        })
        .collect();
    let benchmark = match exp.benchmark {
        Benchmark::Normal => "normal",
        Benchmark::Sampled => "sampled",
    };
    let comment = format!(
        "{} seed={} trials={} n={} multiplier={} benchmark={benchmark}",
        provenance(&scenario),
        exp.seed,
        exp.trials,
        exp.n,
        exp.multiplier
    );
    let bytes = csv_bytes(&comment, &header, &records)?;
    if let Some(path) = &args.out {
        write_output(Some(path), &bytes, stdout)?;
        let summary = summary(&rows, d);
        stdout.write_all(summary.as_bytes()).map_err(io_err)?;
    } else {
        write_output(None, &bytes, stdout)?;
    }
    Ok(())
}

fn summary(rows: &[montecarlo::ComparisonRow], d: usize) -> String {
    let n = rows.len() as f64;
    let gap = |k: usize| rows.iter().map(|r| r.relative_gap[k]).sum::<f64>() / n;
    let mut text = format!(
        "mean relative gap: q1 {} q2 {}\n",
        sig(gap(0), d),
        sig(gap(1), d)
    );
    let crossings: Vec<String> = rows
        .windows(2)
        .filter(|w| (w[0].difference[0] < 0.0) != (w[1].difference[0] < 0.0))
        .map(|w| format!("({}, {}]", sig(w[0].price, d), sig(w[1].price, d)))
        .collect();
    if crossings.is_empty() {
        text.push_str("q1 difference keeps its sign over the sweep\n");
    } else {
        text.push_str(&format!("q1 difference changes sign in {}\n", crossings.join(" ")));
    }
    text
}
