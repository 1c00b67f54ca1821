//! JSON problem files. A file describes the decision and scenario spaces,
//! the objective and constraint expressions, the budget, the coverage family,
//! the set measure, and optionally a radius question. Unknown keys are
//! rejected so typos fail loudly instead of silently changing the instance.
//!
//! Selectors are not part of the format: files always quantify constraints
//! over the whole coverage set. Custom selectors need the library API.

use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::bicriteria;
use crate::design::DesignFamily;
use crate::error::{Error, Result};
use crate::expr;
use crate::geometry::AxisBox;
use crate::measures::{BadSet, MeasureSpec};
use crate::model::{
    BudgetSpec, Curvature, EpsilonSpec, ProblemFunction, ScenarioSelector, UncertainProblem,
};
use crate::radii::{
    self, LinearFeasibility, RadiusResult, StabilityInstance,
};
use crate::solver::{CoverageProblem, SolverConfig};

/// The only schema this build reads and writes.
pub const SCHEMA_VERSION: u32 = 1;

/// Open-ended sides are `null` and get a synthetic bound at the margin.
pub type Bounds = Vec<(Option<f64>, Option<f64>)>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecFile {
    pub schema: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub decision: SpaceSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scenario: Option<ScenarioSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub objectives: Vec<FunctionSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub constraints: Vec<FunctionSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<BudgetJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coverage: Option<CoverageJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measure: Option<MeasureJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<RadiusJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceSpec {
    pub bounds: Bounds,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    pub bounds: Bounds,
    pub nominal: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurvatureJson {
    Monotone,
    Convex,
    #[default]
    General,
}

impl From<CurvatureJson> for Curvature {
    fn from(c: CurvatureJson) -> Curvature {
        match c {
            CurvatureJson::Monotone => Curvature::MonotoneInU,
            CurvatureJson::Convex => Curvature::ConvexInU,
            CurvatureJson::General => Curvature::General,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionSpec {
    pub expr: String,
    #[serde(default)]
    pub curvature: CurvatureJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

impl FunctionSpec {
    fn build(&self, default_label: String, n_x: usize, n_u: usize) -> Result<ProblemFunction> {
        let label = self.label.clone().unwrap_or(default_label);
        let parsed = expr::parse(&self.expr, n_x, n_u)?;
        Ok(ProblemFunction::from_expr(label, self.curvature.into(), parsed))
    }
}

/// Either literal budget components or one expression per component in the
/// decision and scenario variables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EpsOrExpr {
    Values(Vec<f64>),
    Exprs(Vec<String>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BudgetJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f_star: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<EpsOrExpr>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub level: Option<Vec<f64>>,
}

impl BudgetJson {
    fn build(&self, n_obj: usize, n_x: usize, n_u: usize) -> Result<BudgetSpec> {
        let spec = match (&self.eps, &self.level) {
            (Some(_), Some(_)) => {
                return Err(Error::Spec("budget takes either eps or level, not both".into()))
            }
            (None, None) => {
                return Err(Error::Spec("budget needs either eps or level".into()))
            }
            (None, Some(level)) => {
                let nominal = self.f_star.clone().unwrap_or_else(|| vec![0.0; level.len()]);
                BudgetSpec::new(nominal, EpsilonSpec::FixedLevel(level.clone()))?
            }
            (Some(eps), None) => {
                let nominal = self.f_star.clone().ok_or_else(|| {
                    Error::Spec("an eps budget needs f_star (the nominal objective value)".into())
                })?;
                match eps {
                    EpsOrExpr::Values(v) => {
                        BudgetSpec::new(nominal, EpsilonSpec::Constant(v.clone()))?
                    }
                    EpsOrExpr::Exprs(srcs) => {
                        if srcs.len() != nominal.len() {
                            return Err(Error::Spec(format!(
                                "budget has {} expressions, f_star has {} components",
                                srcs.len(),
                                nominal.len()
                            )));
                        }
                        let parsed = srcs
                            .iter()
                            .map(|s| expr::parse(s, n_x, n_u))
                            .collect::<Result<Vec<_>>>()?;
                        let f = move |x: &[f64], u: &[f64]| {
                            parsed.iter().map(|e| e.eval(x, u)).collect::<Vec<f64>>()
                        };
                        BudgetSpec::new(nominal, EpsilonSpec::PerScenario(Arc::new(f)))?
                    }
                }
            }
        };
        if spec.len() != n_obj {
            return Err(Error::Spec(format!(
                "budget has {} components for {} objectives",
                spec.len(),
                n_obj
            )));
        }
        Ok(spec)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    Interval,
    Box,
    Ball,
    Scaled,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoverageJson {
    pub family: FamilyKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub anchor: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertices: Option<Vec<Vec<f64>>>,
}

impl CoverageJson {
    fn build(&self, n_u: usize, nominal: &[Vec<f64>]) -> Result<DesignFamily> {
        let no_center = || -> Result<()> {
            if self.center.is_some() {
                return Err(Error::Spec("center is only meaningful for the ball family".into()));
            }
            Ok(())
        };
        let no_shape = || -> Result<()> {
            if self.anchor.is_some() || self.vertices.is_some() {
                return Err(Error::Spec(
                    "anchor and vertices are only meaningful for the scaled family".into(),
                ));
            }
            Ok(())
        };
        match self.family {
            FamilyKind::Interval => {
                no_center()?;
                no_shape()?;
                if n_u != 1 {
                    return Err(Error::Spec(format!(
                        "the interval family needs a one-dimensional scenario space, got {n_u}"
                    )));
                }
                Ok(DesignFamily::interval1d())
            }
            FamilyKind::Box => {
                no_center()?;
                no_shape()?;
                DesignFamily::box_family(n_u)
            }
            FamilyKind::Ball => {
                no_shape()?;
                let center = match &self.center {
                    Some(c) => c.clone(),
                    None => nominal
                        .first()
                        .cloned()
                        .ok_or_else(|| Error::Spec("ball family needs a center or a nominal scenario".into()))?,
                };
                DesignFamily::ball(center)
            }
            FamilyKind::Scaled => {
                no_center()?;
                let vertices = self
                    .vertices
                    .as_ref()
                    .ok_or_else(|| Error::Spec("scaled family needs vertices".into()))?;
                let anchor = self.anchor.clone().unwrap_or_else(|| vec![0.0; n_u]);
                DesignFamily::scaled_set(anchor, vertices)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasureKind {
    Volume,
    Gaussian,
    MinDist,
    MaxDist,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureJson {
    pub kind: MeasureKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mean: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bad_points: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bad_box: Option<Vec<(f64, f64)>>,
}

impl MeasureJson {
    fn build(&self, n_u: usize) -> Result<MeasureSpec> {
        let bad = || -> Result<BadSet> {
            match (&self.bad_points, &self.bad_box) {
                (Some(_), Some(_)) => {
                    Err(Error::Spec("give either bad_points or bad_box, not both".into()))
                }
                (Some(pts), None) => {
                    if pts.is_empty() || pts.iter().any(|p| p.len() != n_u) {
                        return Err(Error::Spec(format!(
                            "bad_points must be nonempty points of dimension {n_u}"
                        )));
                    }
                    Ok(BadSet::Points(pts.clone()))
                }
                (None, Some(pairs)) => {
                    if pairs.len() != n_u {
                        return Err(Error::Spec(format!(
                            "bad_box must have {n_u} axis ranges"
                        )));
                    }
                    Ok(BadSet::Box(AxisBox::from_pairs(pairs)?))
                }
                (None, None) => {
                    Err(Error::Spec("distance measures need bad_points or bad_box".into()))
                }
            }
        };
        let no_gauss = || -> Result<()> {
            if self.mean.is_some() || self.sigma.is_some() {
                return Err(Error::Spec(
                    "mean and sigma are only meaningful for the gaussian measure".into(),
                ));
            }
            Ok(())
        };
        let no_bad = || -> Result<()> {
            if self.bad_points.is_some() || self.bad_box.is_some() {
                return Err(Error::Spec(
                    "bad_points and bad_box are only meaningful for distance measures".into(),
                ));
            }
            Ok(())
        };
        match self.kind {
            MeasureKind::Volume => {
                no_gauss()?;
                no_bad()?;
                Ok(MeasureSpec::Volume)
            }
            MeasureKind::Gaussian => {
                no_bad()?;
                let mean = self
                    .mean
                    .clone()
                    .ok_or_else(|| Error::Spec("gaussian measure needs mean".into()))?;
                let sigma = self
                    .sigma
                    .clone()
                    .ok_or_else(|| Error::Spec("gaussian measure needs sigma".into()))?;
                if mean.len() != n_u || sigma.len() != n_u {
                    return Err(Error::Spec(format!(
                        "gaussian mean and sigma must have dimension {n_u}"
                    )));
                }
                MeasureSpec::gaussian(mean, sigma)
            }
            MeasureKind::MinDist => {
                no_gauss()?;
                MeasureSpec::min_dist(bad()?)
            }
            MeasureKind::MaxDist => {
                no_gauss()?;
                MeasureSpec::max_dist(bad()?)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RadiusKind {
    Stability,
    Resilience,
    Feasibility,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RadiusJson {
    pub kind: RadiusKind,
    /// Stability: the frozen decision under scrutiny.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decision: Option<Vec<f64>>,
    /// Stability: the performance budget.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    /// Resilience: hard levels, one per objective.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub level: Option<Vec<f64>>,
    /// Feasibility: coefficient rows of the linear system.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rows_a: Option<Vec<Vec<f64>>>,
    /// Feasibility: right-hand sides.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rows_b: Option<Vec<f64>>,
    /// Feasibility: perturbation shape in dimension n + 1.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shape_vertices: Option<Vec<Vec<f64>>>,
}

fn space_box(bounds: &Bounds, margin: f64, center: &[f64]) -> Result<AxisBox> {
    AxisBox::from_bounds(bounds, margin, center, &vec![1.0; bounds.len()])
}

fn nominal_center(nominal: &[Vec<f64>], n_u: usize) -> Vec<f64> {
    let mut c = vec![0.0; n_u];
    if nominal.is_empty() {
        return c;
    }
    for s in nominal {
        for (k, v) in s.iter().enumerate().take(n_u) {
            c[k] += v;
        }
    }
    for v in &mut c {
        *v /= nominal.len() as f64;
    }
    c
}

impl SpecFile {
    pub fn from_str(s: &str) -> Result<SpecFile> {
        let spec: SpecFile =
            serde_json::from_str(s).map_err(|e| Error::Spec(format!("problem file: {e}")))?;
        if spec.schema != SCHEMA_VERSION {
            return Err(Error::Spec(format!(
                "unsupported schema {}; this build reads schema {SCHEMA_VERSION}",
                spec.schema
            )));
        }
        Ok(spec)
    }

    pub fn from_path(path: &Path) -> Result<SpecFile> {
        let s = std::fs::read_to_string(path).map_err(Error::Io)?;
        SpecFile::from_str(&s)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("spec serializes");
        s.push('\n');
        s
    }

    fn scenario_block(&self) -> Result<&ScenarioSpec> {
        self.scenario
            .as_ref()
            .ok_or_else(|| Error::Spec("file has no scenario block".into()))
    }

    /// The objective/constraint system without budget or coverage choices.
    pub fn problem(&self, margin: f64) -> Result<UncertainProblem> {
        let scenario = self.scenario_block()?;
        if self.objectives.is_empty() {
            return Err(Error::Spec("file declares no objectives".into()));
        }
        let n_x = self.decision.bounds.len();
        let n_u = scenario.bounds.len();
        let objectives = self
            .objectives
            .iter()
            .enumerate()
            .map(|(i, f)| f.build(format!("f{i}"), n_x, n_u))
            .collect::<Result<Vec<_>>>()?;
        let constraints = self
            .constraints
            .iter()
            .enumerate()
            .map(|(j, g)| g.build(format!("g{j}"), n_x, n_u))
            .collect::<Result<Vec<_>>>()?;
        let ubox = space_box(
            &scenario.bounds,
            margin,
            &nominal_center(&scenario.nominal, n_u),
        )?;
        let xbox = space_box(&self.decision.bounds, margin, &vec![0.0; n_x])?;
        UncertainProblem::new(objectives, constraints, ubox, xbox, scenario.nominal.clone())
    }

    /// The full coverage instance the solver runs on.
    pub fn coverage_problem(&self, margin: f64) -> Result<CoverageProblem> {
        let problem = self.problem(margin)?;
        let budget = self
            .budget
            .as_ref()
            .ok_or_else(|| Error::Spec("file has no budget block".into()))?
            .build(
                problem.n_objectives(),
                problem.decision_dim(),
                problem.scenario_dim(),
            )?;
        let family = self
            .coverage
            .as_ref()
            .ok_or_else(|| Error::Spec("file has no coverage block".into()))?
            .build(problem.scenario_dim(), &problem.nominal_scenarios)?;
        let measure = self
            .measure
            .as_ref()
            .ok_or_else(|| Error::Spec("file has no measure block".into()))?
            .build(problem.scenario_dim())?;
        CoverageProblem::new(
            problem,
            budget,
            ScenarioSelector::Identity,
            ScenarioSelector::Identity,
            family,
            measure,
        )
    }

    /// Answers the file's radius block.
    pub fn radius_result(&self, margin: f64, cfg: &SolverConfig) -> Result<RadiusResult> {
        let r = self
            .radius
            .as_ref()
            .ok_or_else(|| Error::Spec("file has no radius block".into()))?;
        match r.kind {
            RadiusKind::Stability => {
                let scenario = self.scenario_block()?;
                if self.objectives.len() != 1 {
                    return Err(Error::Spec(
                        "the stability radius needs exactly one objective".into(),
                    ));
                }
                if scenario.nominal.len() != 1 {
                    return Err(Error::Spec(
                        "the stability radius needs exactly one nominal scenario".into(),
                    ));
                }
                let n_x = self.decision.bounds.len();
                let n_u = scenario.bounds.len();
                let decision = r.decision.clone().ok_or_else(|| {
                    Error::Spec("the stability radius needs the frozen decision".into())
                })?;
                let epsilon = r.epsilon.ok_or_else(|| {
                    Error::Spec("the stability radius needs epsilon".into())
                })?;
                let inst = StabilityInstance {
                    objective: self.objectives[0].build("f0".into(), n_x, n_u)?,
                    decision,
                    decision_box: space_box(&self.decision.bounds, margin, &vec![0.0; n_x])?,
                    uncertainty_box: space_box(
                        &scenario.bounds,
                        margin,
                        &nominal_center(&scenario.nominal, n_u),
                    )?,
                    nominal: scenario.nominal[0].clone(),
                    epsilon,
                };
                radii::stability_radius(&inst, cfg)
            }
            RadiusKind::Resilience => {
                let level = r.level.clone().ok_or_else(|| {
                    Error::Spec("the resilience radius needs level".into())
                })?;
                let problem = self.problem(margin)?;
                radii::resilience_radius(&problem, &level, cfg)
            }
            RadiusKind::Feasibility => {
                let rows_a = r.rows_a.clone().ok_or_else(|| {
                    Error::Spec("the feasibility radius needs rows_a".into())
                })?;
                let rows_b = r.rows_b.clone().ok_or_else(|| {
                    Error::Spec("the feasibility radius needs rows_b".into())
                })?;
                let shape_vertices = r.shape_vertices.clone().ok_or_else(|| {
                    Error::Spec("the feasibility radius needs shape_vertices".into())
                })?;
                let n_x = self.decision.bounds.len();
                let inst = LinearFeasibility {
                    rows_a,
                    rows_b,
                    decision_box: space_box(&self.decision.bounds, margin, &vec![0.0; n_x])?,
                    shape_vertices,
                };
                radii::feasibility_radius(&inst, margin, cfg)
            }
        }
    }
}

/// Built-in instances addressable by name instead of a file.
pub fn builtin(name: &str) -> Result<SpecFile> {
    if name != bicriteria::BUILTIN_NAME {
        return Err(Error::Usage(format!(
            "unknown builtin '{name}'; available: {}",
            bicriteria::BUILTIN_NAME
        )));
    }
    Ok(SpecFile {
        schema: SCHEMA_VERSION,
        name: Some(bicriteria::BUILTIN_NAME.into()),
        decision: SpaceSpec { bounds: vec![(None, None)] },
        scenario: Some(ScenarioSpec {
            bounds: vec![(None, None)],
            nominal: vec![vec![0.0]],
        }),
        objectives: vec![
            FunctionSpec {
                expr: bicriteria::F1_SRC.into(),
                curvature: CurvatureJson::Monotone,
                label: Some("f1".into()),
            },
            FunctionSpec {
                expr: bicriteria::F2_SRC.into(),
                curvature: CurvatureJson::Monotone,
                label: Some("f2".into()),
            },
        ],
        constraints: vec![FunctionSpec {
            expr: bicriteria::G_SRC.into(),
            curvature: CurvatureJson::Convex,
            label: Some("g".into()),
        }],
        budget: Some(BudgetJson {
            f_star: Some(vec![-2.0, 4.0]),
            eps: Some(EpsOrExpr::Values(vec![0.0, 0.0])),
            level: None,
        }),
        coverage: Some(CoverageJson {
            family: FamilyKind::Interval,
            center: None,
            anchor: None,
            vertices: None,
        }),
        measure: Some(MeasureJson {
            kind: MeasureKind::Gaussian,
            mean: Some(vec![0.0]),
            sigma: Some(vec![1.0]),
            bad_points: None,
            bad_box: None,
        }),
        radius: None,
    })
}
