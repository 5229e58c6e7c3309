//! Worst-case expectations over all distributions on a finite support grid
//! that match prescribed moments, solved as linear programs.
//!
//! Moment rows are written in centered and scaled coordinates
//! `z = (d - mean) / scale`, a linear recombination of the raw rows
//! `E[1], E[D], E[D^2]` (and the cross moment in the bivariate case) that
//! keeps every coefficient of order one.

use crate::error::{Error, Result};
use crate::model::{DemandMoments, DiscreteDist, JointMoments};

use super::simplex::{LpProblem, LpSolution, WarmSimplex};

/// Support points used when the caller does not pick a resolution.
pub const DEFAULT_SUPPORT_POINTS: usize = 301;

/// Support spans `[0, mean + SPAN_STDS * std]`.
pub const SPAN_STDS: f64 = 6.0;

/// Ascending demand levels starting at zero.
#[derive(Debug, Clone, PartialEq)]
pub struct SupportGrid {
    points: Vec<f64>,
}

impl SupportGrid {
    /// `n` evenly spaced points on `[0, upper]`; the last point is `upper`
    /// exactly. A zero `upper` gives the single point `0`.
    pub fn uniform(upper: f64, n: usize) -> Result<Self> {
        if !(upper.is_finite() && upper >= 0.0) {
            return Err(Error::InvalidGrid(format!("upper bound {upper}")));
        }
        if upper == 0.0 {
            return Ok(Self { points: vec![0.0] });
        }
        if n < 2 {
            return Err(Error::InvalidGrid(format!("{n} points")));
        }
        let step = upper / (n - 1) as f64;
        let mut points: Vec<f64> = (0..n).map(|i| i as f64 * step).collect();
        points[n - 1] = upper;
        Ok(Self { points })
    }

    /// `n` points on `[0, mean + 6 std]`.
    pub fn for_moments(moments: &DemandMoments, n: usize) -> Result<Self> {
        Self::uniform(moments.mean + SPAN_STDS * moments.std, n)
    }

    /// Builds a grid from arbitrary points; they are sorted and deduplicated
    /// and must include zero.
    pub fn from_points(mut points: Vec<f64>) -> Result<Self> {
        if points.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::InvalidGrid("points must be finite and nonnegative".into()));
        }
        points.sort_by(f64::total_cmp);
        points.dedup();
        if points.first() != Some(&0.0) {
            return Err(Error::InvalidGrid("first point must be 0".into()));
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn upper(&self) -> f64 {
        *self.points.last().expect("grid is never empty")
    }

    /// Largest gap between neighbouring points.
    pub fn max_step(&self) -> f64 {
        self.points
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone)]
enum Support {
    Univariate(Vec<f64>),
    Bivariate(Vec<f64>, Vec<f64>),
}

/// Moment constraints over a support grid; objectives are supplied later.
#[derive(Debug, Clone)]
pub struct MomentProblem {
    lp: LpProblem,
    support: Support,
}

fn coordinate_scale(grid: &SupportGrid) -> f64 {
    let half = 0.5 * grid.upper();
    if half > 0.0 {
        half
    } else {
        1.0
    }
}

impl MomentProblem {
    /// Mass one, the given mean and the given second moment.
    pub fn univariate(grid: &SupportGrid, moments: &DemandMoments) -> Self {
        let scale = coordinate_scale(grid);
        let var = (moments.std / scale).powi(2);
        let mut lp = LpProblem::new(vec![1.0, 0.0, var]);
        for &d in grid.points() {
            let z = (d - moments.mean) / scale;
            lp.push_column(&[1.0, z, z * z]);
        }
        Self {
            lp,
            support: Support::Univariate(grid.points().to_vec()),
        }
    }

    /// Both marginal means and second moments plus `E(D1 D2)`, over the
    /// product grid.
    pub fn bivariate(grid1: &SupportGrid, grid2: &SupportGrid, joint: &JointMoments) -> Self {
        let (m1, m2) = (&joint.primary, &joint.secondary);
        let (s1, s2) = (coordinate_scale(grid1), coordinate_scale(grid2));
        let cov = joint.cross_moment() - m1.mean * m2.mean;
        let mut lp = LpProblem::new(vec![
            1.0,
            0.0,
            0.0,
            (m1.std / s1).powi(2),
            (m2.std / s2).powi(2),
            cov / (s1 * s2),
        ]);
        for &d1 in grid1.points() {
            let z1 = (d1 - m1.mean) / s1;
            for &d2 in grid2.points() {
                let z2 = (d2 - m2.mean) / s2;
                lp.push_column(&[1.0, z1, z2, z1 * z1, z2 * z2, z1 * z2]);
            }
        }
        Self {
            lp,
            support: Support::Bivariate(grid1.points().to_vec(), grid2.points().to_vec()),
        }
    }

    /// Number of support atoms (LP columns).
    pub fn len(&self) -> usize {
        self.lp.cols()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn constraint_count(&self) -> usize {
        self.lp.rows()
    }

    /// Demand levels of atom `k`; the second coordinate is zero for a
    /// univariate problem.
    pub fn atom(&self, k: usize) -> (f64, f64) {
        match &self.support {
            Support::Univariate(points) => (points[k], 0.0),
            Support::Bivariate(p1, p2) => (p1[k / p2.len()], p2[k % p2.len()]),
        }
    }

    pub fn is_univariate(&self) -> bool {
        matches!(self.support, Support::Univariate(_))
    }

    /// Evaluates `kernel` at every atom.
    pub fn kernel_values(&self, kernel: impl Fn(f64, f64) -> f64) -> Vec<f64> {
        (0..self.len())
            .map(|k| {
                let (d1, d2) = self.atom(k);
                kernel(d1, d2)
            })
            .collect()
    }

    pub fn solver(&self) -> Result<MomentSolver<'_>> {
        Ok(MomentSolver {
            problem: self,
            simplex: WarmSimplex::new(&self.lp)?,
        })
    }
}

/// A moment problem paired with one objective.
#[derive(Debug, Clone)]
pub struct MomentLp {
    pub problem: MomentProblem,
    pub objective: Vec<f64>,
    pub sense: Sense,
}

impl MomentLp {
    pub fn univariate(
        grid: &SupportGrid,
        moments: &DemandMoments,
        kernel: impl Fn(f64) -> f64,
        sense: Sense,
    ) -> Self {
        let problem = MomentProblem::univariate(grid, moments);
        let objective = problem.kernel_values(|d, _| kernel(d));
        Self {
            problem,
            objective,
            sense,
        }
    }

    pub fn bivariate(
        grid1: &SupportGrid,
        grid2: &SupportGrid,
        joint: &JointMoments,
        kernel: impl Fn(f64, f64) -> f64,
        sense: Sense,
    ) -> Self {
        let problem = MomentProblem::bivariate(grid1, grid2, joint);
        let objective = problem.kernel_values(kernel);
        Self {
            problem,
            objective,
            sense,
        }
    }
}

/// Optimal value and an optimal (basic) distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentSolution {
    /// Extremal expectation of the kernel.
    pub value: f64,
    /// Dual objective at the final basis, in the caller's sense.
    pub dual_bound: f64,
    /// Largest reduced-cost violation at termination.
    pub dual_infeasibility: f64,
    /// Atoms with positive mass as `(d1, d2, probability)`.
    pub atoms: Vec<(f64, f64, f64)>,
}

impl MomentSolution {
    pub fn duality_gap(&self) -> f64 {
        (self.value - self.dual_bound).abs()
    }

    /// The optimal distribution of a univariate problem (first coordinate).
    pub fn distribution(&self) -> Result<DiscreteDist> {
        let mut atoms: Vec<(f64, f64)> = self.atoms.iter().map(|&(d, _, p)| (d, p)).collect();
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mass: f64 = atoms.iter().map(|a| a.1).sum();
        let (values, probs) = atoms.into_iter().map(|(d, p)| (d, p / mass)).unzip();
        DiscreteDist::new(values, probs)
    }

    /// `sum p * f(atom)` for an arbitrary function.
    pub fn expect(&self, f: impl Fn(f64, f64) -> f64) -> f64 {
        self.atoms.iter().map(|&(d1, d2, p)| p * f(d1, d2)).sum()
    }
}

/// Reuses the optimal basis across objectives on the same constraints.
#[derive(Debug, Clone)]
pub struct MomentSolver<'a> {
    problem: &'a MomentProblem,
    simplex: WarmSimplex<'a>,
}

impl MomentSolver<'_> {
    pub fn solve(&mut self, objective: &[f64], sense: Sense) -> Result<MomentSolution> {
        let raw = match sense {
            Sense::Minimize => self.simplex.minimize(objective)?,
            Sense::Maximize => {
                let negated: Vec<f64> = objective.iter().map(|c| -c).collect();
                let mut sol = self.simplex.minimize(&negated)?;
                sol.objective = -sol.objective;
                sol.dual_objective = -sol.dual_objective;
                sol
            }
        };
        Ok(self.package(raw))
    }

    fn package(&self, raw: LpSolution) -> MomentSolution {
        let atoms = raw
            .x
            .iter()
            .map(|&(k, p)| {
                let (d1, d2) = self.problem.atom(k);
                (d1, d2, p)
            })
            .collect();
        MomentSolution {
            value: raw.objective,
            dual_bound: raw.dual_objective,
            dual_infeasibility: raw.dual_infeasibility,
            atoms,
        }
    }
}

/// Solves one moment LP from scratch.
pub fn solve_moment_lp(lp: &MomentLp) -> Result<MomentSolution> {
    lp.problem.solver()?.solve(&lp.objective, lp.sense)
}
