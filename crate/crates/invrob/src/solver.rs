//! Coverage maximization by exchange: alternate a relaxed solve (decision
//! search over pointwise nominal rows plus a pool of witness cuts, with the
//! coverage set pushed outward to the cut boundary) against an exact
//! separation check of the full semi-infinite constraint system, adding the
//! violated witnesses back into the pool until the check passes.

use crate::design::{self, DesignFamily, DesignPoint};
use crate::error::{Error, Result};
use crate::geometry::AxisBox;
use crate::measures::{self, MeasureSpec};
use crate::model::{
    self, BudgetSpec, Curvature, EpsilonSpec, FeasibilityReport, ScenarioSelector, Selection,
    UncertainProblem,
};
use crate::search::{self, DescentConfig, Score};
use std::collections::HashMap;

/// Grid density per axis for the independent feasibility audit; a multiple of
/// the solver's own density so audit points do not just replay solver points.
pub const DEFAULT_AUDIT_GRID: usize = 4 * design::GRID_N;

/// A full instance: problem data, budget, the two scenario selectors (budget
/// rows quantify over the first, feasibility rows over the second), the
/// coverage family, and the set measure to maximize.
#[derive(Clone)]
pub struct CoverageProblem {
    pub problem: UncertainProblem,
    pub budget: BudgetSpec,
    pub phi1: ScenarioSelector,
    pub phi2: ScenarioSelector,
    pub family: DesignFamily,
    pub measure: MeasureSpec,
}

impl CoverageProblem {
    pub fn new(
        problem: UncertainProblem,
        budget: BudgetSpec,
        phi1: ScenarioSelector,
        phi2: ScenarioSelector,
        family: DesignFamily,
        measure: MeasureSpec,
    ) -> Result<Self> {
        if budget.len() != problem.n_objectives() {
            return Err(Error::Usage(format!(
                "budget has {} components, problem has {} objectives",
                budget.len(),
                problem.n_objectives()
            )));
        }
        if family.scenario_dim() != problem.scenario_dim() {
            return Err(Error::Usage(format!(
                "coverage family lives in dimension {}, problem scenarios in {}",
                family.scenario_dim(),
                problem.scenario_dim()
            )));
        }
        if let MeasureSpec::Gaussian { mean, .. } = &measure {
            if mean.len() != problem.scenario_dim() {
                return Err(Error::Usage(format!(
                    "gaussian measure has dimension {}, problem scenarios {}",
                    mean.len(),
                    problem.scenario_dim()
                )));
            }
        }
        Ok(CoverageProblem { problem, budget, phi1, phi2, family, measure })
    }

    /// Same instance with a different constant budget vector.
    pub fn with_eps(&self, eps: &[f64]) -> Result<Self> {
        let mut cp = self.clone();
        cp.budget = BudgetSpec::new(
            self.budget.nominal_value.clone(),
            EpsilonSpec::Constant(eps.to_vec()),
        )?;
        Ok(cp)
    }
}

#[derive(Debug, Clone)]
pub struct SolverConfig {
    /// Row violations at or below this count as feasible.
    pub feasibility_tol: f64,
    /// Exchange rounds before giving up.
    pub exchange_max_rounds: u32,
    /// Starts per decision axis for the relaxed solve.
    pub multistart_grid: usize,
    /// Initial decision step as a fraction of each axis range.
    pub step_frac: f64,
    /// Step multiplier after a sweep without improvement.
    pub step_shrink: f64,
    /// Absolute step size where the decision search stops.
    pub min_step: f64,
    /// Witness cuts kept; least-binding cuts are evicted beyond this.
    pub scenario_pool_cap: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            feasibility_tol: 1e-8,
            exchange_max_rounds: 50,
            multistart_grid: 9,
            step_frac: 0.25,
            step_shrink: 0.5,
            min_step: 1e-9,
            scenario_pool_cap: 512,
        }
    }
}

impl SolverConfig {
    fn validate(&self) -> Result<()> {
        if !(self.feasibility_tol > 0.0) {
            return Err(Error::Usage(format!(
                "feasibility tolerance must be positive, got {}",
                self.feasibility_tol
            )));
        }
        if self.exchange_max_rounds == 0 || self.multistart_grid == 0 {
            return Err(Error::Usage("rounds and multistart grid must be positive".into()));
        }
        if !(self.step_frac > 0.0) || !(self.step_shrink > 0.0 && self.step_shrink < 1.0) {
            return Err(Error::Usage("step fraction and shrink must be in (0, 1)".into()));
        }
        if !(self.min_step > 0.0) || self.scenario_pool_cap == 0 {
            return Err(Error::Usage("min step and pool capacity must be positive".into()));
        }
        Ok(())
    }
}

/// A row at (or near) its bound in the final check.
#[derive(Debug, Clone, serde::Serialize)]
pub struct ActiveRow {
    pub row: String,
    pub witness: Vec<f64>,
    /// Nonnegative slack up to round-off; negative-of-violation.
    pub slack: f64,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct TraceRound {
    pub round: u32,
    pub x: Vec<f64>,
    pub d: Vec<f64>,
    pub v: f64,
    pub max_violation: f64,
    pub pool: usize,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct SolveResult {
    pub x_star: Vec<f64>,
    pub d_star: DesignPoint,
    pub v_star: f64,
    pub rounds: u32,
    pub max_violation: f64,
    pub active_set: Vec<ActiveRow>,
    pub trace: Vec<TraceRound>,
    /// True when every declared curvature admits exact inner maximization and
    /// the budget is scenario-independent, so the final check is not a
    /// heuristic.
    pub attainment_certified: bool,
    /// True when the optimal design presses against a synthetic bound (an
    /// unbounded direction cut off at a finite cap).
    pub truncated: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum CutClass {
    Budget(usize),
    Constraint(usize),
}

#[derive(Debug, Clone)]
enum CutPoint {
    /// Reference coordinates; the enforced scenario moves with d.
    Moving(Vec<f64>),
    /// A fixed scenario from a finite selection; does not move with d.
    Fixed(Vec<f64>),
}

#[derive(Debug, Clone)]
struct PoolCut {
    class: CutClass,
    point: CutPoint,
}

struct SolveCtx<'a> {
    cp: &'a CoverageProblem,
    cfg: &'a SolverConfig,
    seed: DesignPoint,
    dbox: AxisBox,
    expansion: bool,
}

impl<'a> SolveCtx<'a> {
    fn descent_cfg(&self) -> DescentConfig {
        DescentConfig {
            starts_per_axis: self.cfg.multistart_grid,
            step_frac: self.cfg.step_frac,
            step_shrink: self.cfg.step_shrink,
            min_step: self.cfg.min_step,
            tol: self.cfg.feasibility_tol,
        }
    }

    /// Worst violation among the always-enforced pointwise rows at the
    /// nominal scenarios. Independent of d.
    fn nominal_violation(&self, x: &[f64]) -> Result<f64> {
        let p = &self.cp.problem;
        let mut worst = f64::NEG_INFINITY;
        for s in &p.nominal_scenarios {
            for i in 0..p.n_objectives() {
                let v = p.objectives[i].eval(x, s)? - self.cp.budget.rhs(i, x, s)?;
                worst = worst.max(v);
            }
            for j in 0..p.n_constraints() {
                worst = worst.max(p.constraints[j].eval(x, s)?);
            }
        }
        Ok(worst)
    }

    /// Scenario a cut enforces at (x, d), or None when the cut has left the
    /// selector's current scenario set and is not enforced there.
    fn cut_scenario(
        &self,
        cut: &PoolCut,
        x: &[f64],
        d: &DesignPoint,
    ) -> Result<Option<Vec<f64>>> {
        let fam = &self.cp.family;
        let ubox = &self.cp.problem.uncertainty_box;
        let u = match &cut.point {
            // a reference point is a member of the current set by
            // construction; roundoff may push it an ulp past the box, so
            // clamp instead of dropping the cut
            CutPoint::Moving(w) => ubox.clamped(&fam.to_scenario(d, w)),
            CutPoint::Fixed(u) => {
                if !ubox.contains(u) {
                    return Ok(None);
                }
                u.clone()
            }
        };
        let selector = match cut.class {
            CutClass::Budget(_) => &self.cp.phi1,
            CutClass::Constraint(_) => &self.cp.phi2,
        };
        match selector.select(x, fam, d, &self.cp.problem.nominal_scenarios) {
            Selection::Whole => match &cut.point {
                // moving cuts live in reference coordinates, inside by map
                CutPoint::Moving(_) => Ok(Some(u)),
                CutPoint::Fixed(_) => {
                    if fam.contains(d, &u)? {
                        Ok(Some(u))
                    } else {
                        Ok(None)
                    }
                }
            },
            Selection::Scenarios(list) => {
                let close = list.iter().any(|s| {
                    s.iter().zip(&u).all(|(a, b)| (a - b).abs() <= 1e-9 * b.abs().max(1.0))
                });
                Ok(if close { Some(u) } else { None })
            }
        }
    }

    fn cut_value(&self, cut: &PoolCut, x: &[f64], u: &[f64]) -> Result<f64> {
        let p = &self.cp.problem;
        match cut.class {
            CutClass::Budget(i) => {
                Ok(p.objectives[i].eval(x, u)? - self.cp.budget.rhs(i, x, u)?)
            }
            CutClass::Constraint(j) => p.constraints[j].eval(x, u),
        }
    }

    /// Worst cut value at (x, d) over the applicable pool.
    fn pool_violation(&self, pool: &[PoolCut], x: &[f64], d: &DesignPoint) -> Result<f64> {
        let mut worst = f64::NEG_INFINITY;
        for cut in pool {
            if let Some(u) = self.cut_scenario(cut, x, d)? {
                worst = worst.max(self.cut_value(cut, x, &u)?);
            }
        }
        Ok(worst)
    }

    /// Expands d outward from the seed, axis by axis, to the boundary where
    /// some pool cut becomes active. Assumes the pool is satisfied at the
    /// seed. Round-robin passes repeat until the point stops moving.
    fn push_design(&self, pool: &[PoolCut], x: &[f64]) -> Result<DesignPoint> {
        let fam = &self.cp.family;
        let n = fam.design_dim();
        let max_range =
            (0..n).map(|k| self.dbox.range(k)).fold(0.0_f64, f64::max).max(1.0);
        let mut d = self.seed.clone();
        for _pass in 0..20 {
            let mut moved: f64 = 0.0;
            for axis in 0..n {
                let dir = fam.expand_direction(axis);
                let (lo, hi) = fam.axis_interval(&d, axis, &self.dbox);
                let target = if dir > 0.0 { hi } else { lo };
                let t0 = d.0[axis];
                if (target - t0) * dir <= 0.0 {
                    continue;
                }
                let ok = |t: f64, d: &mut DesignPoint| -> Result<bool> {
                    let prev = d.0[axis];
                    d.0[axis] = t;
                    let v = self.pool_violation(pool, x, d);
                    d.0[axis] = prev;
                    Ok(v? <= 0.0)
                };
                let t_new = if ok(target, &mut d)? {
                    target
                } else {
                    let (mut feas, mut infeas) = (t0, target);
                    for _ in 0..60 {
                        let mid = 0.5 * (feas + infeas);
                        if mid == feas || mid == infeas {
                            break;
                        }
                        if ok(mid, &mut d)? {
                            feas = mid;
                        } else {
                            infeas = mid;
                        }
                    }
                    feas
                };
                moved = moved.max((t_new - t0).abs());
                d.0[axis] = t_new;
            }
            if moved <= 1e-12 * max_range {
                break;
            }
        }
        Ok(d)
    }

    /// Relaxed objective at a candidate decision: the design maximally
    /// expanded against the pool (or the seed for a shrink-favoring measure),
    /// scored by (violation, measure).
    fn relaxed_eval(&self, pool: &[PoolCut], x: &[f64]) -> Result<(Score, DesignPoint)> {
        let ubox = &self.cp.problem.uncertainty_box;
        let nominal = self.nominal_violation(x)?;
        let seed_cut = self.pool_violation(pool, x, &self.seed)?;
        if !self.expansion || seed_cut > 0.0 {
            let v = measures::measure(&self.cp.measure, &self.cp.family, &self.seed, ubox)?;
            let violation = nominal.max(seed_cut).max(0.0);
            return Ok((Score { violation, value: v }, self.seed.clone()));
        }
        let d = self.push_design(pool, x)?;
        let v = measures::measure(&self.cp.measure, &self.cp.family, &d, ubox)?;
        Ok((Score { violation: nominal.max(0.0), value: v }, d))
    }
}

fn close_points(a: &[f64], b: &[f64]) -> bool {
    a.len() == b.len()
        && a.iter().zip(b).all(|(p, q)| (p - q).abs() <= 1e-9 * q.abs().max(1.0))
}

/// Maximizes the coverage measure subject to budget and feasibility over the
/// whole coverage set. See the crate docs for the model.
pub fn solve(cp: &CoverageProblem, cfg: &SolverConfig) -> Result<SolveResult> {
    cfg.validate()?;
    let tol = cfg.feasibility_tol;
    let fam = &cp.family;
    let ubox = &cp.problem.uncertainty_box;
    let seed = fam.seed_point(&cp.problem.nominal_scenarios, ubox)?;
    let dbox = fam.design_box(ubox)?;
    for k in 0..fam.design_dim() {
        if seed.0[k] < dbox.lo()[k] - 1e-9 * dbox.range(k).max(1.0)
            || seed.0[k] > dbox.hi()[k] + 1e-9 * dbox.range(k).max(1.0)
        {
            return Err(Error::Domain(format!(
                "nominal scenarios need design coordinate {k} = {}, outside the feasible range [{}, {}]",
                seed.0[k],
                dbox.lo()[k],
                dbox.hi()[k]
            )));
        }
    }
    let ctx = SolveCtx {
        cp,
        cfg,
        seed: seed.clone(),
        dbox,
        expansion: cp.measure.expansion_monotone(),
    };

    // no decision keeps even the minimal coverage feasible: report which row
    let dcfg = ctx.descent_cfg();
    let (x0, s0) = search::multistart_descent(&cp.problem.decision_box, &dcfg, &mut |x| {
        let rep = model::check_point_feasible(
            &cp.problem, &cp.budget, &cp.phi1, &cp.phi2, x, fam, &seed, tol,
        )?;
        let v = rep.max_violation();
        Ok(Score { violation: v.max(0.0), value: -v })
    })?;
    if s0.violation > tol {
        let rep = model::check_point_feasible(
            &cp.problem, &cp.budget, &cp.phi1, &cp.phi2, &x0, fam, &seed, tol,
        )?;
        let worst = rep.worst().expect("report has rows");
        return Err(Error::Infeasible {
            x: x0,
            row: worst.label.clone(),
            violation: worst.violation,
        });
    }

    let mut pool: Vec<PoolCut> = Vec::new();
    let mut trace: Vec<TraceRound> = Vec::new();
    let mut incumbent: Option<(Vec<f64>, DesignPoint, f64, FeasibilityReport)> = None;
    let mut last_violation = f64::INFINITY;
    for round in 1..=cfg.exchange_max_rounds {
        let mut memo: HashMap<Vec<u64>, (Score, DesignPoint)> = HashMap::new();
        let (xh, _) = search::multistart_descent(&cp.problem.decision_box, &dcfg, &mut |x| {
            let key: Vec<u64> = x.iter().map(|v| v.to_bits()).collect();
            if let Some((s, _)) = memo.get(&key) {
                return Ok(*s);
            }
            let (s, d) = ctx.relaxed_eval(&pool, x)?;
            memo.insert(key, (s, d));
            Ok(s)
        })?;
        let key: Vec<u64> = xh.iter().map(|v| v.to_bits()).collect();
        let dh = memo.get(&key).expect("winner was evaluated").1.clone();
        let v = measures::measure(&cp.measure, fam, &dh, ubox)?;

        let rep = model::check_point_feasible(
            &cp.problem, &cp.budget, &cp.phi1, &cp.phi2, &xh, fam, &dh, tol,
        )?;
        let max_violation = rep.max_violation();
        trace.push(TraceRound {
            round,
            x: xh.clone(),
            d: dh.0.clone(),
            v,
            max_violation,
            pool: pool.len(),
        });
        let better = match &incumbent {
            None => true,
            Some((_, _, iv, irep)) => {
                let a = Score { violation: max_violation.max(0.0), value: v };
                let b = Score { violation: irep.max_violation().max(0.0), value: *iv };
                a.better_than(&b, tol)
            }
        };
        if better {
            incumbent = Some((xh.clone(), dh.clone(), v, rep.clone()));
        }
        last_violation = max_violation;
        if max_violation <= tol {
            return Ok(build_result(&ctx, xh, dh, v, round, max_violation, rep, trace));
        }

        // separation produced violated rows: fold their witnesses into the
        // pool as cuts
        let mut added = false;
        for check in &rep.checks {
            if check.violation <= tol {
                continue;
            }
            let (class, selector) = match check.class {
                model::RowClass::BudgetSelected => (CutClass::Budget(check.index), &cp.phi1),
                model::RowClass::FeasibilitySelected => {
                    (CutClass::Constraint(check.index), &cp.phi2)
                }
                // nominal and membership rows are enforced directly in the
                // relaxed solve; a cut cannot tighten them further
                _ => continue,
            };
            let point = match selector.select(&xh, fam, &dh, &cp.problem.nominal_scenarios) {
                Selection::Whole => CutPoint::Moving(fam.to_reference(&dh, &check.witness)),
                Selection::Scenarios(_) => CutPoint::Fixed(check.witness.clone()),
            };
            let duplicate = pool.iter().any(|c| {
                c.class == class
                    && match (&c.point, &point) {
                        (CutPoint::Moving(a), CutPoint::Moving(b)) => close_points(a, b),
                        (CutPoint::Fixed(a), CutPoint::Fixed(b)) => close_points(a, b),
                        _ => false,
                    }
            });
            if !duplicate {
                pool.push(PoolCut { class, point });
                added = true;
            }
        }
        if !added {
            // the relaxed solve already respects every witness the check can
            // produce; another round would repeat this one
            break;
        }
        while pool.len() > cfg.scenario_pool_cap {
            let mut slackest = 0;
            let mut slackest_value = f64::INFINITY;
            for (idx, cut) in pool.iter().enumerate() {
                let value = match ctx.cut_scenario(cut, &xh, &dh)? {
                    Some(u) => ctx.cut_value(cut, &xh, &u)?,
                    None => f64::NEG_INFINITY,
                };
                if value < slackest_value {
                    slackest_value = value;
                    slackest = idx;
                }
            }
            pool.remove(slackest);
        }
    }

    let (xi, di, vi, repi) = incumbent.expect("at least one round ran");
    let max_violation = repi.max_violation();
    let rounds = trace.len() as u32;
    let incumbent_result =
        build_result(&ctx, xi, di, vi, rounds, max_violation, repi, trace);
    Err(Error::Nonconverged {
        rounds,
        violation: last_violation,
        incumbent: Box::new(incumbent_result),
    })
}

#[allow(clippy::too_many_arguments)]
fn build_result(
    ctx: &SolveCtx,
    x: Vec<f64>,
    d: DesignPoint,
    v: f64,
    rounds: u32,
    max_violation: f64,
    rep: FeasibilityReport,
    mut trace: Vec<TraceRound>,
) -> SolveResult {
    let cp = ctx.cp;
    let tol = ctx.cfg.feasibility_tol;
    if let Some(last) = trace.last_mut() {
        last.v = v;
    }
    let active_set: Vec<ActiveRow> = rep
        .checks
        .iter()
        .filter(|c| c.violation >= -10.0 * tol)
        .map(|c| ActiveRow { row: c.label.clone(), witness: c.witness.clone(), slack: -c.violation })
        .collect();
    let mut certified = !cp.budget.scenario_dependent();
    for f in cp.problem.objectives.iter().chain(cp.problem.constraints.iter()) {
        certified &= f.curvature != Curvature::General;
    }
    let fam = &cp.family;
    let mut truncated = false;
    for k in 0..fam.design_dim() {
        if !ctx.dbox.is_synthetic(k) {
            continue;
        }
        let bound =
            if fam.expand_direction(k) > 0.0 { ctx.dbox.hi()[k] } else { ctx.dbox.lo()[k] };
        if (d.0[k] - bound).abs() <= 1e-9 * ctx.dbox.range(k).max(1.0) {
            truncated = true;
        }
    }
    SolveResult {
        x_star: x,
        d_star: d,
        v_star: v,
        rounds,
        max_violation,
        active_set,
        trace,
        attainment_certified: certified,
        truncated,
    }
}

/// Solves one instance per budget vector, on `workers` threads, preserving
/// input order. Per-cell failures land in the cell, not the whole call.
pub fn solve_grid(
    cp: &CoverageProblem,
    cfg: &SolverConfig,
    eps_grid: &[Vec<f64>],
    workers: usize,
) -> Vec<(Vec<f64>, Result<SolveResult>)> {
    let n = eps_grid.len();
    if n == 0 {
        return Vec::new();
    }
    let w = workers.max(1).min(n);
    let (tx, rx) = std::sync::mpsc::channel::<(usize, Result<SolveResult>)>();
    std::thread::scope(|scope| {
        for t in 0..w {
            let tx = tx.clone();
            scope.spawn(move || {
                let mut i = t;
                while i < n {
                    let res = cp.with_eps(&eps_grid[i]).and_then(|cell| solve(&cell, cfg));
                    if tx.send((i, res)).is_err() {
                        return;
                    }
                    i += w;
                }
            });
        }
    });
    drop(tx);
    let mut cells: Vec<Option<Result<SolveResult>>> = (0..n).map(|_| None).collect();
    for (i, res) in rx {
        cells[i] = Some(res);
    }
    cells
        .into_iter()
        .enumerate()
        .map(|(i, res)| (eps_grid[i].clone(), res.expect("every cell solved")))
        .collect()
}

/// Independent audit of a claimed solution: every row re-checked with the
/// curvature declarations ignored and a finer scan, at tolerance `tol`.
pub fn verify(
    cp: &CoverageProblem,
    x: &[f64],
    d: &DesignPoint,
    tol: f64,
    audit_grid: usize,
) -> Result<FeasibilityReport> {
    model::audit_point_feasible(
        &cp.problem, &cp.budget, &cp.phi1, &cp.phi2, x, &cp.family, d, tol, audit_grid,
    )
}
