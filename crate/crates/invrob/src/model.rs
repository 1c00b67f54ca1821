//! Problem data: objectives, constraints, budget, scenario selectors, and the
//! pointwise feasibility check used both by the solver and by `verify`.

use crate::design::{self, DesignFamily, DesignPoint};
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::geometry::AxisBox;
use std::fmt;
use std::sync::Arc;

/// Decision vector, dimension fixed per problem.
pub type Decision = Vec<f64>;
/// Scenario (uncertainty) vector, dimension fixed per problem.
pub type Scenario = Vec<f64>;

/// Declared shape of a function in the scenario argument. `ConvexInU` and
/// `MonotoneInU` allow exact inner maximization at box endpoints or polytope
/// vertices; `General` falls back to grid plus local refinement.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Curvature {
    ConvexInU,
    MonotoneInU,
    General,
}

#[derive(Clone)]
enum FnBody {
    Parsed(Expr),
    Native(Arc<dyn Fn(&[f64], &[f64]) -> f64 + Send + Sync>),
}

/// A scalar function of (x, u) with a label for error reports and a declared
/// curvature class.
#[derive(Clone)]
pub struct ProblemFunction {
    pub label: String,
    pub curvature: Curvature,
    body: FnBody,
}

impl fmt::Debug for ProblemFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.body {
            FnBody::Parsed(e) => write!(f, "{}[{:?}]: {}", self.label, self.curvature, e),
            FnBody::Native(_) => write!(f, "{}[{:?}]: <native>", self.label, self.curvature),
        }
    }
}

impl ProblemFunction {
    pub fn from_expr(label: impl Into<String>, curvature: Curvature, expr: Expr) -> Self {
        ProblemFunction { label: label.into(), curvature, body: FnBody::Parsed(expr) }
    }

    pub fn native(
        label: impl Into<String>,
        curvature: Curvature,
        f: impl Fn(&[f64], &[f64]) -> f64 + Send + Sync + 'static,
    ) -> Self {
        ProblemFunction { label: label.into(), curvature, body: FnBody::Native(Arc::new(f)) }
    }

    /// Expression source if this function was parsed from text.
    pub fn source(&self) -> Option<String> {
        match &self.body {
            FnBody::Parsed(e) => Some(e.to_string()),
            FnBody::Native(_) => None,
        }
    }

    /// Raw evaluation; non-finite values propagate.
    pub fn eval_raw(&self, x: &[f64], u: &[f64]) -> f64 {
        match &self.body {
            FnBody::Parsed(e) => e.eval(x, u),
            FnBody::Native(f) => f(x, u),
        }
    }

    /// Evaluation with a finiteness check.
    pub fn eval(&self, x: &[f64], u: &[f64]) -> Result<f64> {
        let v = self.eval_raw(x, u);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Evaluation {
                which: self.label.clone(),
                value: v,
                x: x.to_vec(),
                u: u.to_vec(),
            })
        }
    }
}

/// The parametric problem family: minimize each objective subject to the
/// constraints, all depending on a scenario u from the uncertainty box.
#[derive(Clone)]
pub struct UncertainProblem {
    pub objectives: Vec<ProblemFunction>,
    pub constraints: Vec<ProblemFunction>,
    pub uncertainty_box: AxisBox,
    pub decision_box: AxisBox,
    pub nominal_scenarios: Vec<Scenario>,
}

impl UncertainProblem {
    pub fn new(
        objectives: Vec<ProblemFunction>,
        constraints: Vec<ProblemFunction>,
        uncertainty_box: AxisBox,
        decision_box: AxisBox,
        nominal_scenarios: Vec<Scenario>,
    ) -> Result<Self> {
        if objectives.is_empty() {
            return Err(Error::Usage("at least one objective is required".into()));
        }
        if decision_box.dim() == 0 || uncertainty_box.dim() == 0 {
            return Err(Error::Usage("decision and scenario dimensions must be positive".into()));
        }
        if nominal_scenarios.is_empty() {
            return Err(Error::Usage("at least one nominal scenario is required".into()));
        }
        for s in &nominal_scenarios {
            if s.len() != uncertainty_box.dim() {
                return Err(Error::Usage(format!(
                    "nominal scenario {s:?} has dimension {}, expected {}",
                    s.len(),
                    uncertainty_box.dim()
                )));
            }
            if s.iter().any(|v| !v.is_finite()) {
                return Err(Error::Usage(format!("nominal scenario {s:?} is not finite")));
            }
            if !uncertainty_box.contains(s) {
                return Err(Error::Usage(format!(
                    "nominal scenario {s:?} lies outside the uncertainty box"
                )));
            }
        }
        Ok(UncertainProblem {
            objectives,
            constraints,
            uncertainty_box,
            decision_box,
            nominal_scenarios,
        })
    }

    pub fn decision_dim(&self) -> usize {
        self.decision_box.dim()
    }

    pub fn scenario_dim(&self) -> usize {
        self.uncertainty_box.dim()
    }

    pub fn n_objectives(&self) -> usize {
        self.objectives.len()
    }

    pub fn n_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn validate_decision(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.decision_dim() {
            return Err(Error::Usage(format!(
                "decision has dimension {}, expected {}",
                x.len(),
                self.decision_dim()
            )));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::Usage(format!("decision {x:?} is not finite")));
        }
        Ok(())
    }

    pub fn validate_scenario(&self, u: &[f64]) -> Result<()> {
        if u.len() != self.scenario_dim() {
            return Err(Error::Usage(format!(
                "scenario has dimension {}, expected {}",
                u.len(),
                self.scenario_dim()
            )));
        }
        if u.iter().any(|v| !v.is_finite()) {
            return Err(Error::Usage(format!("scenario {u:?} is not finite")));
        }
        Ok(())
    }

    pub fn evaluate_objective(&self, i: usize, x: &[f64], u: &[f64]) -> Result<f64> {
        if i >= self.objectives.len() {
            return Err(Error::Usage(format!("objective index {i} out of range")));
        }
        self.validate_decision(x)?;
        self.validate_scenario(u)?;
        self.objectives[i].eval(x, u)
    }

    pub fn evaluate_constraint(&self, j: usize, x: &[f64], u: &[f64]) -> Result<f64> {
        if j >= self.constraints.len() {
            return Err(Error::Usage(format!("constraint index {j} out of range")));
        }
        self.validate_decision(x)?;
        self.validate_scenario(u)?;
        self.constraints[j].eval(x, u)
    }
}

/// The budget right-hand side. `Constant` and `PerScenario` are additive over
/// the nominal value; `FixedLevel` is an absolute level that ignores it.
#[derive(Clone)]
pub enum EpsilonSpec {
    Constant(Vec<f64>),
    PerScenario(Arc<dyn Fn(&[f64], &[f64]) -> Vec<f64> + Send + Sync>),
    FixedLevel(Vec<f64>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BudgetMode {
    Additive,
    FixedLevel,
}

#[derive(Clone)]
pub struct BudgetSpec {
    pub nominal_value: Vec<f64>,
    pub epsilon: EpsilonSpec,
}

impl BudgetSpec {
    pub fn new(nominal_value: Vec<f64>, epsilon: EpsilonSpec) -> Result<Self> {
        if nominal_value.iter().any(|v| !v.is_finite()) {
            return Err(Error::Usage(format!("nominal value {nominal_value:?} is not finite")));
        }
        match &epsilon {
            EpsilonSpec::Constant(e) => {
                if e.len() != nominal_value.len() {
                    return Err(Error::Usage(format!(
                        "budget has {} components, nominal value has {}",
                        e.len(),
                        nominal_value.len()
                    )));
                }
                if e.iter().any(|v| !v.is_finite() || *v < 0.0) {
                    return Err(Error::Usage(format!(
                        "budget components must be finite and nonnegative, got {e:?}"
                    )));
                }
            }
            EpsilonSpec::FixedLevel(b) => {
                if b.len() != nominal_value.len() {
                    return Err(Error::Usage(format!(
                        "fixed level has {} components, nominal value has {}",
                        b.len(),
                        nominal_value.len()
                    )));
                }
                if b.iter().any(|v| !v.is_finite()) {
                    return Err(Error::Usage(format!("fixed level {b:?} is not finite")));
                }
            }
            EpsilonSpec::PerScenario(_) => {}
        }
        Ok(BudgetSpec { nominal_value, epsilon })
    }

    /// Shorthand for a scalar additive budget.
    pub fn additive_scalar(f_star: f64, eps: f64) -> Result<Self> {
        BudgetSpec::new(vec![f_star], EpsilonSpec::Constant(vec![eps]))
    }

    pub fn mode(&self) -> BudgetMode {
        match self.epsilon {
            EpsilonSpec::FixedLevel(_) => BudgetMode::FixedLevel,
            _ => BudgetMode::Additive,
        }
    }

    pub fn len(&self) -> usize {
        self.nominal_value.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nominal_value.is_empty()
    }

    /// Whether the right-hand side varies with u (forces the general inner
    /// maximizer for budget rows).
    pub fn scenario_dependent(&self) -> bool {
        matches!(self.epsilon, EpsilonSpec::PerScenario(_))
    }

    /// Right-hand side of budget row i at (x, u): nominal + slack in additive
    /// mode, the absolute level in fixed-level mode.
    pub fn rhs(&self, i: usize, x: &[f64], u: &[f64]) -> Result<f64> {
        if i >= self.nominal_value.len() {
            return Err(Error::Usage(format!("budget index {i} out of range")));
        }
        match &self.epsilon {
            EpsilonSpec::Constant(e) => Ok(self.nominal_value[i] + e[i]),
            EpsilonSpec::FixedLevel(b) => Ok(b[i]),
            EpsilonSpec::PerScenario(f) => {
                let e = f(x, u);
                if e.len() != self.nominal_value.len() {
                    return Err(Error::Contract(format!(
                        "budget function returned {} components, expected {}",
                        e.len(),
                        self.nominal_value.len()
                    )));
                }
                let ei = e[i];
                if !ei.is_finite() || ei < 0.0 {
                    return Err(Error::Contract(format!(
                        "budget function returned {ei} for component {i} at x={x:?}, u={u:?}"
                    )));
                }
                Ok(self.nominal_value[i] + ei)
            }
        }
    }
}

/// Free-function form of [`BudgetSpec::rhs`].
pub fn budget_rhs(budget: &BudgetSpec, i: usize, x: &[f64], u: &[f64]) -> Result<f64> {
    budget.rhs(i, x, u)
}

/// What a custom selector hands back: either a finite scenario list or the
/// whole input set.
#[derive(Clone, Debug)]
pub enum Selection {
    Scenarios(Vec<Scenario>),
    Whole,
}

/// Maps (x, W) to the subset of scenarios a constraint class quantifies over.
/// Built-ins: the nominal set only, or the whole set. Custom selectors must be
/// pure and satisfy closure (output inside input) and transitivity (monotone
/// in the input set).
#[derive(Clone)]
pub enum ScenarioSelector {
    NominalOnly,
    Identity,
    Custom(Arc<dyn Fn(&[f64], &DesignFamily, &DesignPoint) -> Selection + Send + Sync>),
}

impl ScenarioSelector {
    pub fn select(&self, x: &[f64], fam: &DesignFamily, d: &DesignPoint, nominal: &[Scenario]) -> Selection {
        match self {
            ScenarioSelector::NominalOnly => Selection::Scenarios(nominal.to_vec()),
            ScenarioSelector::Identity => Selection::Whole,
            ScenarioSelector::Custom(f) => f(x, fam, d),
        }
    }
}

/// Which family of rows a check belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum RowClass {
    /// Budget row i over the first selector's scenarios.
    BudgetSelected,
    /// Constraint row j over the second selector's scenarios.
    FeasibilitySelected,
    /// Budget row i at nominal scenario k (index encodes i * n_nominal + k).
    BudgetNominal,
    /// Constraint row j at nominal scenario k.
    FeasibilityNominal,
    /// Nominal scenario k must belong to the coverage set.
    Membership,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct ConstraintCheck {
    pub class: RowClass,
    pub index: usize,
    pub label: String,
    /// Maximal violation found; negative means slack.
    pub violation: f64,
    pub witness: Scenario,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct FeasibilityReport {
    pub checks: Vec<ConstraintCheck>,
    pub tol: f64,
}

impl FeasibilityReport {
    pub fn max_violation(&self) -> f64 {
        self.checks.iter().map(|c| c.violation).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn is_feasible(&self) -> bool {
        self.checks.iter().all(|c| c.violation <= self.tol)
    }

    pub fn worst(&self) -> Option<&ConstraintCheck> {
        self.checks
            .iter()
            .max_by(|a, b| a.violation.partial_cmp(&b.violation).unwrap())
    }
}

/// Checks a decision x against every row class induced by the coverage set
/// W(d): budget rows over the first selector, constraints over the second,
/// both row families over the nominal set, and nominal membership in W(d).
/// Reports the maximal violation and witness per row.
#[allow(clippy::too_many_arguments)]
pub fn check_point_feasible(
    prob: &UncertainProblem,
    budget: &BudgetSpec,
    phi1: &ScenarioSelector,
    phi2: &ScenarioSelector,
    x: &[f64],
    fam: &DesignFamily,
    d: &DesignPoint,
    tol: f64,
) -> Result<FeasibilityReport> {
    point_feasible_impl(prob, budget, phi1, phi2, x, fam, d, tol, None)
}

/// [`check_point_feasible`] with curvature declarations ignored: whole-set
/// rows run the general maximizer at `audit_grid` points per axis. Used to
/// cross-check solver output independently of the declared function classes.
#[allow(clippy::too_many_arguments)]
pub fn audit_point_feasible(
    prob: &UncertainProblem,
    budget: &BudgetSpec,
    phi1: &ScenarioSelector,
    phi2: &ScenarioSelector,
    x: &[f64],
    fam: &DesignFamily,
    d: &DesignPoint,
    tol: f64,
    audit_grid: usize,
) -> Result<FeasibilityReport> {
    point_feasible_impl(prob, budget, phi1, phi2, x, fam, d, tol, Some(audit_grid))
}

#[allow(clippy::too_many_arguments)]
fn point_feasible_impl(
    prob: &UncertainProblem,
    budget: &BudgetSpec,
    phi1: &ScenarioSelector,
    phi2: &ScenarioSelector,
    x: &[f64],
    fam: &DesignFamily,
    d: &DesignPoint,
    tol: f64,
    audit: Option<usize>,
) -> Result<FeasibilityReport> {
    if tol <= 0.0 {
        return Err(Error::Usage(format!("tolerance must be positive, got {tol}")));
    }
    prob.validate_decision(x)?;
    if budget.len() != prob.n_objectives() {
        return Err(Error::Usage(format!(
            "budget has {} components, problem has {} objectives",
            budget.len(),
            prob.n_objectives()
        )));
    }
    fam.validate_point(d)?;
    let mut checks = Vec::new();

    let sel1 = phi1.select(x, fam, d, &prob.nominal_scenarios);
    for i in 0..prob.n_objectives() {
        let flag = if budget.scenario_dependent() {
            Curvature::General
        } else {
            prob.objectives[i].curvature
        };
        let label = format!("budget[{i}]");
        let row = |u: &[f64]| -> Result<f64> {
            Ok(prob.objectives[i].eval(x, u)? - budget.rhs(i, x, u)?)
        };
        let (violation, witness) =
            max_over_selection(&sel1, fam, d, flag, &row, &prob.uncertainty_box, audit)?;
        checks.push(ConstraintCheck { class: RowClass::BudgetSelected, index: i, label, violation, witness });
    }

    let sel2 = phi2.select(x, fam, d, &prob.nominal_scenarios);
    for j in 0..prob.n_constraints() {
        let label = format!("constraint[{j}]");
        let flag = prob.constraints[j].curvature;
        let row = |u: &[f64]| -> Result<f64> { prob.constraints[j].eval(x, u) };
        let (violation, witness) =
            max_over_selection(&sel2, fam, d, flag, &row, &prob.uncertainty_box, audit)?;
        checks.push(ConstraintCheck { class: RowClass::FeasibilitySelected, index: j, label, violation, witness });
    }

    let nn = prob.nominal_scenarios.len();
    for (k, s) in prob.nominal_scenarios.iter().enumerate() {
        for i in 0..prob.n_objectives() {
            let v = prob.objectives[i].eval(x, s)? - budget.rhs(i, x, s)?;
            checks.push(ConstraintCheck {
                class: RowClass::BudgetNominal,
                index: i * nn + k,
                label: format!("budget[{i}] at nominal[{k}]"),
                violation: v,
                witness: s.clone(),
            });
        }
        for j in 0..prob.n_constraints() {
            let v = prob.constraints[j].eval(x, s)?;
            checks.push(ConstraintCheck {
                class: RowClass::FeasibilityNominal,
                index: j * nn + k,
                label: format!("constraint[{j}] at nominal[{k}]"),
                violation: v,
                witness: s.clone(),
            });
        }
        checks.push(ConstraintCheck {
            class: RowClass::Membership,
            index: k,
            label: format!("nominal[{k}] in coverage set"),
            violation: fam.membership_violation(d, s),
            witness: s.clone(),
        });
    }

    Ok(FeasibilityReport { checks, tol })
}

fn max_over_selection(
    sel: &Selection,
    fam: &DesignFamily,
    d: &DesignPoint,
    flag: Curvature,
    row: &dyn Fn(&[f64]) -> Result<f64>,
    ubox: &AxisBox,
    audit: Option<usize>,
) -> Result<(f64, Vec<f64>)> {
    match sel {
        Selection::Scenarios(list) => {
            if list.is_empty() {
                return Err(Error::Contract("selector returned an empty scenario set".into()));
            }
            let mut best = f64::NEG_INFINITY;
            let mut witness = list[0].clone();
            for s in list {
                // closure property: selected scenarios must lie in W(d)
                if fam.membership_violation(d, s) > 1e-9 {
                    return Err(Error::Contract(format!(
                        "selector produced scenario {s:?} outside the coverage set"
                    )));
                }
                let v = row(s)?;
                if v > best {
                    best = v;
                    witness = s.clone();
                }
            }
            Ok((best, witness))
        }
        Selection::Whole => match audit {
            Some(grid_n) => design::inner_max_audit(fam, d, row, ubox, grid_n),
            None => design::inner_max_result(fam, d, row, flag, ubox),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn pf(label: &str, curvature: Curvature, src: &str) -> ProblemFunction {
        ProblemFunction::from_expr(label, curvature, parse(src, 1, 1).unwrap())
    }

    fn toy_problem() -> UncertainProblem {
        UncertainProblem::new(
            vec![
                pf("f1", Curvature::MonotoneInU, "-x[0] + u[0]"),
                pf("f2", Curvature::MonotoneInU, "2*x[0] - u[0]"),
            ],
            vec![pf("g", Curvature::ConvexInU, "x[0]*(u[0] - 1) + exp(u[0]) - 1")],
            AxisBox::from_pairs(&[(-12.0, 1.0)]).unwrap(),
            AxisBox::from_pairs(&[(-20.0, 20.0)]).unwrap(),
            vec![vec![0.0]],
        )
        .unwrap()
    }

    #[test]
    fn objective_values() {
        let p = toy_problem();
        assert_eq!(p.evaluate_objective(0, &[2.0], &[0.0]).unwrap(), -2.0);
        assert_eq!(p.evaluate_objective(1, &[2.0], &[0.0]).unwrap(), 4.0);
        assert_eq!(p.evaluate_objective(0, &[0.0], &[0.0]).unwrap(), 0.0);
        assert!(p.evaluate_objective(2, &[0.0], &[0.0]).is_err());
        assert!(p.evaluate_objective(0, &[0.0, 1.0], &[0.0]).is_err());
    }

    #[test]
    fn constraint_values() {
        let p = toy_problem();
        assert_eq!(p.evaluate_constraint(0, &[2.0], &[0.0]).unwrap(), -2.0);
        assert_eq!(p.evaluate_constraint(0, &[0.0], &[0.0]).unwrap(), 0.0);
        let v = p.evaluate_constraint(0, &[0.0], &[1.0]).unwrap();
        assert!((v - (std::f64::consts::E - 1.0)).abs() < 1e-15);
    }

    #[test]
    fn nonfinite_evaluation_is_reported() {
        let p = UncertainProblem::new(
            vec![ProblemFunction::native("blow", Curvature::General, |x, _| 1.0 / x[0])],
            vec![],
            AxisBox::from_pairs(&[(0.0, 1.0)]).unwrap(),
            AxisBox::from_pairs(&[(-1.0, 1.0)]).unwrap(),
            vec![vec![0.5]],
        )
        .unwrap();
        match p.evaluate_objective(0, &[0.0], &[0.5]) {
            Err(Error::Evaluation { which, .. }) => assert_eq!(which, "blow"),
            other => panic!("expected evaluation error, got {other:?}"),
        }
    }

    #[test]
    fn budget_rhs_modes() {
        let add = BudgetSpec::new(vec![-2.0, 4.0], EpsilonSpec::Constant(vec![0.0, 0.0])).unwrap();
        assert_eq!(add.rhs(0, &[], &[]).unwrap(), -2.0);
        let add2 = BudgetSpec::new(vec![-2.0, 4.0], EpsilonSpec::Constant(vec![1.0, 2.0])).unwrap();
        assert_eq!(add2.rhs(1, &[], &[]).unwrap(), 6.0);
        let fixed = BudgetSpec::new(vec![-2.0], EpsilonSpec::FixedLevel(vec![5.0])).unwrap();
        assert_eq!(fixed.rhs(0, &[9.0], &[9.0]).unwrap(), 5.0);
        assert_eq!(fixed.mode(), BudgetMode::FixedLevel);
        assert!(fixed.rhs(1, &[], &[]).is_err());
    }

    #[test]
    fn budget_rejects_negative_components() {
        assert!(BudgetSpec::new(vec![0.0], EpsilonSpec::Constant(vec![-0.1])).is_err());
        let f = BudgetSpec::new(
            vec![0.0],
            EpsilonSpec::PerScenario(Arc::new(|_, u: &[f64]| vec![u[0]])),
        )
        .unwrap();
        assert!(f.rhs(0, &[0.0], &[1.0]).is_ok());
        match f.rhs(0, &[0.0], &[-1.0]) {
            Err(Error::Contract(_)) => {}
            other => panic!("expected contract error, got {other:?}"),
        }
    }

    #[test]
    fn additive_rhs_is_affine_in_the_budget() {
        let f_star = vec![1.25, -3.0];
        let e1 = vec![0.5, 2.0];
        let e2 = vec![0.75, 0.25];
        let sum: Vec<f64> = e1.iter().zip(&e2).map(|(a, b)| a + b).collect();
        let b1 = BudgetSpec::new(f_star.clone(), EpsilonSpec::Constant(e1)).unwrap();
        let bs = BudgetSpec::new(f_star, EpsilonSpec::Constant(sum)).unwrap();
        for i in 0..2 {
            let d = bs.rhs(i, &[], &[]).unwrap() - b1.rhs(i, &[], &[]).unwrap();
            assert_eq!(d, e2[i]);
        }
    }

    #[test]
    fn feasibility_at_degenerate_interval() {
        let p = toy_problem();
        let budget = BudgetSpec::new(vec![-2.0, 4.0], EpsilonSpec::Constant(vec![0.0, 0.0])).unwrap();
        let fam = DesignFamily::interval1d();
        let d = DesignPoint(vec![0.0, 0.0]);
        let rep = check_point_feasible(
            &p,
            &budget,
            &ScenarioSelector::Identity,
            &ScenarioSelector::Identity,
            &[2.0],
            &fam,
            &d,
            1e-8,
        )
        .unwrap();
        assert!(rep.is_feasible(), "{rep:?}");
        assert!(rep.max_violation() <= 1e-12);
    }

    #[test]
    fn budget_violation_at_right_endpoint() {
        let p = toy_problem();
        let budget = BudgetSpec::new(vec![-2.0, 4.0], EpsilonSpec::Constant(vec![0.0, 0.0])).unwrap();
        let fam = DesignFamily::interval1d();
        let d = DesignPoint(vec![0.0, 0.5]);
        let rep = check_point_feasible(
            &p,
            &budget,
            &ScenarioSelector::Identity,
            &ScenarioSelector::Identity,
            &[2.0],
            &fam,
            &d,
            1e-8,
        )
        .unwrap();
        assert!(!rep.is_feasible());
        let worst = rep.worst().unwrap();
        assert_eq!(worst.class, RowClass::BudgetSelected);
        assert_eq!(worst.index, 0);
        assert!((worst.violation - 0.5).abs() < 1e-12);
        assert!((worst.witness[0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn nominal_singleton_cover_is_feasible() {
        let p = toy_problem();
        let budget = BudgetSpec::new(vec![-2.0, 4.0], EpsilonSpec::Constant(vec![0.0, 0.0])).unwrap();
        let fam = DesignFamily::interval1d();
        let d = DesignPoint(vec![0.0, 0.0]);
        let rep = check_point_feasible(
            &p,
            &budget,
            &ScenarioSelector::NominalOnly,
            &ScenarioSelector::NominalOnly,
            &[2.0],
            &fam,
            &d,
            1e-8,
        )
        .unwrap();
        assert!(rep.is_feasible());
    }

    #[test]
    fn nominal_only_matches_pointwise_evaluation_exactly() {
        let p = toy_problem();
        let budget = BudgetSpec::new(vec![-2.0, 4.0], EpsilonSpec::Constant(vec![0.25, 0.5])).unwrap();
        let fam = DesignFamily::interval1d();
        let d = DesignPoint(vec![-1.0, 0.75]);
        let x = [1.7];
        let rep = check_point_feasible(
            &p,
            &budget,
            &ScenarioSelector::NominalOnly,
            &ScenarioSelector::NominalOnly,
            &x,
            &fam,
            &d,
            1e-8,
        )
        .unwrap();
        let u_bar = &p.nominal_scenarios[0];
        for c in &rep.checks {
            match c.class {
                RowClass::BudgetSelected | RowClass::BudgetNominal => {
                    let direct = p.objectives[c.index % 2].eval_raw(&x, u_bar)
                        - budget.rhs(c.index % 2, &x, u_bar).unwrap();
                    // selected rows reduce to the identical pointwise value
                    if c.class == RowClass::BudgetSelected {
                        assert_eq!(c.violation.to_bits(), direct.to_bits());
                    }
                }
                _ => {}
            }
        }
    }

    #[test]
    fn membership_row_flags_excluded_nominal() {
        let p = toy_problem();
        let budget = BudgetSpec::new(vec![-2.0, 4.0], EpsilonSpec::Constant(vec![5.0, 5.0])).unwrap();
        let fam = DesignFamily::interval1d();
        // interval [0.25, 0.5] leaves the nominal scenario 0 outside
        let d = DesignPoint(vec![0.25, 0.5]);
        let rep = check_point_feasible(
            &p,
            &budget,
            &ScenarioSelector::Identity,
            &ScenarioSelector::Identity,
            &[2.0],
            &fam,
            &d,
            1e-8,
        )
        .unwrap();
        let mem = rep
            .checks
            .iter()
            .find(|c| c.class == RowClass::Membership)
            .unwrap();
        assert!((mem.violation - 0.25).abs() < 1e-12);
        assert!(!rep.is_feasible());
    }

    #[test]
    fn custom_selector_closure_is_enforced() {
        let p = toy_problem();
        let budget = BudgetSpec::new(vec![-2.0, 4.0], EpsilonSpec::Constant(vec![5.0, 5.0])).unwrap();
        let fam = DesignFamily::interval1d();
        let d = DesignPoint(vec![0.0, 0.5]);
        let bad = ScenarioSelector::Custom(Arc::new(|_, _, _| {
            Selection::Scenarios(vec![vec![0.9]])
        }));
        let out = check_point_feasible(
            &p,
            &budget,
            &bad,
            &ScenarioSelector::Identity,
            &[2.0],
            &fam,
            &d,
            1e-8,
        );
        match out {
            Err(Error::Contract(_)) => {}
            other => panic!("expected closure violation, got {other:?}"),
        }
    }
}
