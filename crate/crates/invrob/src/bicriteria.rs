//! A fully analyzed reference instance: two scalar objectives f1 = -x + u and
//! f2 = 2x - u with one convex constraint g = x(u - 1) + exp(u) - 1 under
//! standard-normal uncertainty, nominal scenario 0 and nominal value (-2, 4).
//! The coverage question reduces to three rows on (x, d1, d2), which this
//! module exposes directly so solver output can be cross-checked against an
//! independent coarse search and closed-form identities.

use crate::design::DesignFamily;
use crate::error::{Error, Result};
use crate::expr::parse;
use crate::geometry::AxisBox;
use crate::measures::MeasureSpec;
use crate::model::{
    BudgetSpec, Curvature, EpsilonSpec, ProblemFunction, ScenarioSelector, UncertainProblem,
};
use crate::normal::std_normal_cdf;
use crate::solver::CoverageProblem;

/// Name under which the CLI exposes this instance.
pub const BUILTIN_NAME: &str = "bicriteria-normal";

pub(crate) const F1_SRC: &str = "-x[0] + u[0]";
pub(crate) const F2_SRC: &str = "2*x[0] - u[0]";
pub(crate) const G_SRC: &str = "x[0]*(u[0] - 1) + exp(u[0]) - 1";

/// Builds the instance at budget (eps1, eps2). The scenario and decision
/// spaces are unbounded; both get synthetic bounds at `margin` (in standard
/// deviations of the scenario distribution).
pub fn coverage_problem(eps1: f64, eps2: f64, margin: f64) -> Result<CoverageProblem> {
    let objectives = vec![
        ProblemFunction::from_expr("f1", Curvature::MonotoneInU, parse(F1_SRC, 1, 1)?),
        ProblemFunction::from_expr("f2", Curvature::MonotoneInU, parse(F2_SRC, 1, 1)?),
    ];
    let constraints = vec![ProblemFunction::from_expr(
        "g",
        Curvature::ConvexInU,
        parse(G_SRC, 1, 1)?,
    )];
    let uncertainty_box = AxisBox::from_bounds(&[(None, None)], margin, &[0.0], &[1.0])?;
    let decision_box = AxisBox::from_bounds(&[(None, None)], margin, &[0.0], &[1.0])?;
    let problem = UncertainProblem::new(
        objectives,
        constraints,
        uncertainty_box,
        decision_box,
        vec![vec![0.0]],
    )?;
    let budget =
        BudgetSpec::new(vec![-2.0, 4.0], EpsilonSpec::Constant(vec![eps1, eps2]))?;
    CoverageProblem::new(
        problem,
        budget,
        ScenarioSelector::Identity,
        ScenarioSelector::Identity,
        DesignFamily::interval1d(),
        MeasureSpec::gaussian(vec![0.0], vec![1.0])?,
    )
}

/// Smallest decision that keeps the constraint row satisfied up to right end
/// d2: g(x, u) <= 0 on [d1, d2] with d1 <= 0 <= d2 < 1 holds exactly for
/// x >= (exp(d2) - 1)/(1 - d2).
pub fn required_decision(d2: f64) -> f64 {
    if d2 == 0.0 {
        // limit of the quotient at 0; avoids 0/1 rounding noise
        return 0.0;
    }
    (d2.exp() - 1.0) / (1.0 - d2)
}

/// Largest right end in [0, 1) a decision x >= 0 can sustain against the
/// constraint row: the inverse of [`required_decision`], by bisection.
pub fn attainable_right_end(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    // required_decision diverges as d2 -> 1, so x is always reachable
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if required_decision(mid) <= x {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 {
            break;
        }
    }
    lo
}

/// Coverage can never exceed the scenario mass left of 1: the constraint row
/// pins every right end below 1 regardless of budget.
pub fn coverage_cap() -> f64 {
    std_normal_cdf(1.0)
}

/// Decision forced once the second budget row is active at left end d1.
pub fn left_end_decision(d1: f64, eps2: f64) -> f64 {
    (d1 + eps2) / 2.0 + 2.0
}

/// The instance with the coverage quantifiers resolved: three finite rows on
/// (x, d1, d2) plus the sign conditions on d, equivalent to the full problem
/// because both objectives are monotone and the constraint is convex in u.
#[derive(Debug, Clone, Copy)]
pub struct ReducedProblem {
    pub eps1: f64,
    pub eps2: f64,
}

impl ReducedProblem {
    pub fn new(eps1: f64, eps2: f64) -> Result<Self> {
        if !(eps1.is_finite() && eps2.is_finite() && eps1 >= 0.0 && eps2 >= 0.0) {
            return Err(Error::Usage(format!(
                "budget must be finite and nonnegative, got ({eps1}, {eps2})"
            )));
        }
        Ok(ReducedProblem { eps1, eps2 })
    }

    /// Row values, all feasible at <= 0: first budget row at the right end,
    /// second budget row at the left end, constraint row at the right end,
    /// then the two sign conditions d1 <= 0 <= d2.
    pub fn rows(&self, x: f64, d1: f64, d2: f64) -> [f64; 5] {
        [
            -x + d2 + 2.0 - self.eps1,
            2.0 * x - d1 - 4.0 - self.eps2,
            x * (d2 - 1.0) + d2.exp() - 1.0,
            d1,
            -d2,
        ]
    }

    pub fn max_violation(&self, x: f64, d1: f64, d2: f64) -> f64 {
        self.rows(x, d1, d2).into_iter().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn objective(&self, d1: f64, d2: f64) -> f64 {
        std_normal_cdf(d2) - std_normal_cdf(d1)
    }

    /// A closed-form feasible point for any nonnegative budget; also a lower
    /// bound certificate for the optimal coverage.
    pub fn feasible_point(&self) -> (f64, f64, f64) {
        let x = self.eps2 / 4.0 + 2.0;
        let d1 = -self.eps2 / 2.0;
        let d2 = (self.eps2 / 4.0 + self.eps1).min(attainable_right_end(x));
        (x, d1, d2)
    }

    /// A box certain to contain every optimal (x, d1, d2).
    pub fn bounds(&self) -> ([f64; 2], [f64; 2], [f64; 2]) {
        let x = [(2.0 - self.eps1).max(0.0), 2.0 + self.eps2 / 2.0];
        let d1 = [-4.0 - self.eps2, 0.0];
        let d2 = [0.0, (self.eps2 / 2.0 + self.eps1).min(1.0 - 1e-12)];
        (x, d1, d2)
    }

    /// Independent coarse-grid optimum: scans (d1, d2) over the bound box,
    /// derives x from the active second budget row, keeps the best feasible
    /// point, then refines around it. A deliberately different route from the
    /// expansion solver, for cross-checking.
    pub fn grid_optimum(&self, grid_n: usize) -> (f64, f64, f64, f64) {
        let n = grid_n.max(2);
        let (_, d1b, d2b) = self.bounds();
        let mut best = (2.0, 0.0, 0.0, f64::NEG_INFINITY);
        self.scan_window(n, &mut best, d1b[0], d1b[1], d2b[0], d2b[1]);
        // refine twice around the incumbent, one grid cell in each direction
        for _ in 0..2 {
            let (_, d1, d2, _) = best;
            let c1 = (d1b[1] - d1b[0]) / (n - 1) as f64;
            let c2 = (d2b[1] - d2b[0]) / (n - 1) as f64;
            self.scan_window(
                n,
                &mut best,
                (d1 - c1).max(d1b[0]),
                (d1 + c1).min(d1b[1]),
                (d2 - c2).max(d2b[0]),
                (d2 + c2).min(d2b[1]),
            );
        }
        best
    }

    #[allow(clippy::too_many_arguments)]
    fn scan_window(
        &self,
        n: usize,
        best: &mut (f64, f64, f64, f64),
        d1_lo: f64,
        d1_hi: f64,
        d2_lo: f64,
        d2_hi: f64,
    ) {
        for i in 0..n {
            let d1 = d1_lo + (d1_hi - d1_lo) * i as f64 / (n - 1) as f64;
            for j in 0..n {
                let d2 = d2_lo + (d2_hi - d2_lo) * j as f64 / (n - 1) as f64;
                let x = left_end_decision(d1, self.eps2);
                if self.max_violation(x, d1, d2) > 1e-12 {
                    continue;
                }
                let v = self.objective(d1, d2);
                if v > best.3 {
                    *best = (x, d1, d2, v);
                }
            }
        }
    }
}
