//! Inverse robust optimization: instead of fixing an uncertainty set and
//! asking for the best worst-case decision, fix a performance budget and ask
//! for the largest scenario set some decision can cover.
//!
//! An instance is built from objectives f_i(x, u) and constraints g_j(x, u)
//! over a decision box and an uncertainty box, a nominal objective value with
//! a budget eps, a parametric coverage family d -> W(d) (interval, box, ball,
//! or scaled polytope), and a set measure V. The solver searches for a
//! decision x and design d maximizing V(W(d)) subject to
//!
//!   f_i(x, u) <= f_i* + eps_i   for all u in W(d),
//!   g_j(x, u) <= 0              for all u in W(d),
//!   every nominal scenario inside W(d),
//!
//! by an exchange scheme: solve a relaxation carrying only finitely many
//! witness scenarios, check the full semi-infinite system, and fold violated
//! witnesses back in until the check passes. Scenario selectors generalize
//! the quantifier from "all of W(d)" to problem-specific subsets.
//!
//! Robustness radii (stability, resilience, and the feasibility radius of a
//! linear program) are thin wrappers that encode a radius question as a
//! coverage question over balls or scaled sets.

pub mod bicriteria;
pub mod cli;
pub mod design;
pub mod error;
pub mod expr;
pub mod geometry;
pub mod measures;
pub mod model;
pub mod normal;
pub mod radii;
pub mod search;
pub mod solver;
pub mod specfile;

pub use design::{DesignFamily, DesignPoint};
pub use error::{Error, Result};
pub use measures::{BadSet, MeasureSpec};
pub use model::{
    BudgetSpec, Curvature, EpsilonSpec, FeasibilityReport, ProblemFunction, ScenarioSelector,
    UncertainProblem,
};
pub use radii::{
    feasibility_radius, resilience_radius, stability_radius, LinearFeasibility, RadiusResult,
    StabilityInstance,
};
pub use solver::{
    solve, solve_grid, verify, CoverageProblem, SolveResult, SolverConfig, DEFAULT_AUDIT_GRID,
};
pub use specfile::SpecFile;
