//! Independent verification of the closed-form policies.
//!
//! The inner worst case over a moment ambiguity set is discretized onto a
//! support grid and solved exactly as a small linear program; the outer
//! maximization is a plain scan over a quantity grid.

pub mod dro;
pub mod moment;
pub mod simplex;

pub use dro::{
    adaptive_optimal_quantity, dro_optimal_quantity, joint_dro_check, joint_payoff, quantity_grid, Branch, JointArgmax,
    NewsvendorKernel, OracleArgmax, OracleOptions, DEFAULT_JOINT_SUPPORT_POINTS,
};
pub use moment::{
    solve_moment_lp, MomentLp, MomentProblem, MomentSolution, MomentSolver, Sense, SupportGrid,
    DEFAULT_SUPPORT_POINTS,
};
