//! Robustness radii as coverage questions. Stability asks how far scenarios
//! may stray before a frozen decision loses more than a budget against the
//! best adaptive decision; resilience asks how far they may stray before no
//! decision keeps the objective under a fixed level; the feasibility radius
//! asks how large a data perturbation a linear constraint system survives.
//! The latter two reuse the coverage solver with ball and scaled-set
//! families; stability runs its own bisection because its gap function nests
//! a minimization no pointwise row can express.

use crate::design::{self, DesignFamily, DesignPoint};
use crate::error::{Error, Result};
use crate::geometry::AxisBox;
use crate::measures::MeasureSpec;
use crate::model::{
    BudgetSpec, Curvature, EpsilonSpec, ProblemFunction, ScenarioSelector, UncertainProblem,
};
use crate::search::{self, DescentConfig, Score};
use crate::solver::{solve, CoverageProblem, SolverConfig};

/// Fixed level for the dummy objective in the feasibility-radius encoding;
/// far above anything a finite instance produces, so the budget row is inert.
pub const FEASIBILITY_LEVEL: f64 = 1e12;

/// Absolute tolerance of the stability-radius bisection.
pub const RADIUS_TOL: f64 = 1e-6;

#[derive(Debug, Clone, serde::Serialize)]
pub struct RadiusResult {
    pub radius: f64,
    /// The radius pressed against a synthetic bound; the true value may be
    /// larger (or infinite).
    pub truncated: bool,
    /// Witness decision for the radius, where the encoding produces one.
    pub decision: Option<Vec<f64>>,
}

/// Stability of a frozen decision: the largest rho such that for every
/// scenario within rho of the nominal one, the frozen decision's objective
/// stays within `epsilon` of the best decision for that scenario.
pub struct StabilityInstance {
    pub objective: ProblemFunction,
    /// The frozen decision under scrutiny.
    pub decision: Vec<f64>,
    /// Decisions it is compared against, scenario by scenario.
    pub decision_box: AxisBox,
    pub uncertainty_box: AxisBox,
    pub nominal: Vec<f64>,
    pub epsilon: f64,
}

pub fn stability_radius(inst: &StabilityInstance, cfg: &SolverConfig) -> Result<RadiusResult> {
    if !(inst.epsilon.is_finite() && inst.epsilon >= 0.0) {
        return Err(Error::Usage(format!(
            "stability budget must be finite and nonnegative, got {}",
            inst.epsilon
        )));
    }
    if inst.decision.len() != inst.decision_box.dim() {
        return Err(Error::Usage(format!(
            "frozen decision has dimension {}, comparison box {}",
            inst.decision.len(),
            inst.decision_box.dim()
        )));
    }
    if inst.nominal.len() != inst.uncertainty_box.dim() {
        return Err(Error::Usage(format!(
            "nominal scenario has dimension {}, uncertainty box {}",
            inst.nominal.len(),
            inst.uncertainty_box.dim()
        )));
    }
    if !inst.uncertainty_box.contains(&inst.nominal) {
        return Err(Error::Domain("nominal scenario lies outside the uncertainty box".into()));
    }
    let fam = DesignFamily::ball(inst.nominal.clone())?;
    let dbox = fam.design_box(&inst.uncertainty_box)?;
    let rho_max = dbox.hi()[0];
    let dcfg = DescentConfig {
        starts_per_axis: cfg.multistart_grid,
        step_frac: cfg.step_frac,
        step_shrink: cfg.step_shrink,
        min_step: cfg.min_step,
        tol: cfg.feasibility_tol,
    };
    // gap(u): how much the frozen decision loses against the best decision
    let gap = |u: &[f64]| -> Result<f64> {
        let frozen = inst.objective.eval(&inst.decision, u)?;
        let (_, s) = search::multistart_descent(&inst.decision_box, &dcfg, &mut |x| {
            Ok(Score { violation: 0.0, value: -inst.objective.eval(x, u)? })
        })?;
        Ok(frozen + s.value - inst.epsilon)
    };
    let holds = |rho: f64| -> Result<bool> {
        let d = DesignPoint(vec![rho]);
        let (worst, _) =
            design::inner_max_result(&fam, &d, &gap, Curvature::General, &inst.uncertainty_box)?;
        Ok(worst <= 0.0)
    };
    if !holds(0.0)? {
        return Ok(RadiusResult { radius: 0.0, truncated: false, decision: None });
    }
    if holds(rho_max)? {
        return Ok(RadiusResult {
            radius: rho_max,
            truncated: dbox.is_synthetic(0),
            decision: None,
        });
    }
    let (mut lo, mut hi) = (0.0_f64, rho_max);
    while hi - lo > RADIUS_TOL {
        let mid = 0.5 * (lo + hi);
        if holds(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(RadiusResult { radius: lo, truncated: false, decision: None })
}

/// Resilience of a problem under a hard level: the largest rho such that one
/// decision keeps every objective under its level for all scenarios within
/// rho of the nominal set. Encoded as ball coverage with a fixed-level
/// budget; the witness decision comes back with the radius.
pub fn resilience_radius(
    problem: &UncertainProblem,
    levels: &[f64],
    cfg: &SolverConfig,
) -> Result<RadiusResult> {
    let center = problem.nominal_scenarios[0].clone();
    let budget = BudgetSpec::new(
        vec![0.0; levels.len()],
        EpsilonSpec::FixedLevel(levels.to_vec()),
    )?;
    let cp = CoverageProblem::new(
        problem.clone(),
        budget,
        ScenarioSelector::Identity,
        ScenarioSelector::Identity,
        DesignFamily::ball(center)?,
        MeasureSpec::Volume,
    )?;
    let r = solve(&cp, cfg)?;
    Ok(RadiusResult {
        radius: r.d_star.0[0],
        truncated: r.truncated,
        decision: Some(r.x_star),
    })
}

/// A linear constraint system a_j . x <= b_j whose rows are subject to a
/// common data perturbation (delta_a, delta_b) drawn from a scaled shape.
pub struct LinearFeasibility {
    pub rows_a: Vec<Vec<f64>>,
    pub rows_b: Vec<f64>,
    pub decision_box: AxisBox,
    /// Perturbation shape Z in dimension n + 1 (coefficients then right-hand
    /// side); must contain the origin.
    pub shape_vertices: Vec<Vec<f64>>,
}

/// Radius of feasibility: the largest alpha such that some decision satisfies
/// every row under every perturbation in alpha * Z. Each row quantifies over
/// its own perturbation, which equals quantifying all rows over a shared one.
pub fn feasibility_radius(
    inst: &LinearFeasibility,
    margin: f64,
    cfg: &SolverConfig,
) -> Result<RadiusResult> {
    if inst.rows_a.is_empty() || inst.rows_a.len() != inst.rows_b.len() {
        return Err(Error::Usage("need matching nonempty coefficient rows and right-hand sides".into()));
    }
    let n = inst.decision_box.dim();
    if inst.rows_a.iter().any(|a| a.len() != n) {
        return Err(Error::Usage(format!("every coefficient row must have {n} entries")));
    }
    if n + 1 > 3 {
        return Err(Error::Unsupported(
            "feasibility radius supports up to two decision variables (perturbation dimension three)".into(),
        ));
    }
    let m = n + 1;
    let constraints: Vec<ProblemFunction> = inst
        .rows_a
        .iter()
        .zip(&inst.rows_b)
        .enumerate()
        .map(|(j, (a, b))| {
            let (a, b) = (a.clone(), *b);
            ProblemFunction::native(format!("row{j}"), Curvature::ConvexInU, move |x, u| {
                let mut v = -b - u[a.len()];
                for (k, ak) in a.iter().enumerate() {
                    v += (ak + u[k]) * x[k];
                }
                v
            })
        })
        .collect();
    let objective = ProblemFunction::native("level", Curvature::MonotoneInU, |_, _| 0.0);
    let ubox =
        AxisBox::from_bounds(&vec![(None, None); m], margin, &vec![0.0; m], &vec![1.0; m])?;
    let problem = UncertainProblem::new(
        vec![objective],
        constraints,
        ubox,
        inst.decision_box.clone(),
        vec![vec![0.0; m]],
    )?;
    let budget =
        BudgetSpec::new(vec![0.0], EpsilonSpec::FixedLevel(vec![FEASIBILITY_LEVEL]))?;
    let cp = CoverageProblem::new(
        problem,
        budget,
        ScenarioSelector::Identity,
        ScenarioSelector::Identity,
        DesignFamily::scaled_set(vec![0.0; m], &inst.shape_vertices)?,
        MeasureSpec::Volume,
    )?;
    let r = solve(&cp, cfg)?;
    debug_assert!(
        r.active_set.iter().all(|a| !a.row.starts_with("budget")),
        "the inert level row must never bind"
    );
    Ok(RadiusResult {
        radius: r.d_star.0[0],
        truncated: r.truncated,
        decision: Some(r.x_star),
    })
}
