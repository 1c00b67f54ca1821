//! Command-line front end. Instances come from JSON problem files or a
//! builtin name; results leave as JSON (or CSV for scalar-decision interval
//! sweeps), written to stdout or atomically to a file. Exit codes: 0 success,
//! 1 solver breakdown, 2 proven infeasibility, 3 bad input.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::bicriteria;
use crate::design::{DesignFamily, DesignPoint};
use crate::error::{Error, Result};
use crate::geometry::AxisBox;
use crate::solver::{self, CoverageProblem, SolveResult, SolverConfig};
use crate::specfile::{self, SpecFile};

#[derive(Parser)]
#[command(
    name = "invrob",
    version,
    about = "Inverse robust optimization: trade performance budgets for maximal scenario coverage"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one coverage instance
    Solve(SolveArgs),
    /// Sweep budgets over a grid, one row per cell
    Grid(GridArgs),
    /// Answer the radius question in a problem file
    Radius(RadiusArgs),
    /// Solve the built-in bi-criteria instance at one budget
    Example(ExampleArgs),
    /// Re-check a solution with a finer, curvature-agnostic audit
    Verify(VerifyArgs),
    /// Work with problem files themselves
    Spec(SpecArgs),
}

#[derive(Args)]
struct InputArgs {
    /// Problem file (JSON)
    #[arg(long, value_name = "PATH", conflicts_with = "builtin")]
    file: Option<PathBuf>,
    /// Built-in instance name (see `spec dump`)
    #[arg(long, value_name = "NAME")]
    builtin: Option<String>,
}

impl InputArgs {
    fn load(&self) -> Result<SpecFile> {
        match (&self.file, &self.builtin) {
            (Some(p), None) => SpecFile::from_path(p),
            (None, Some(n)) => specfile::builtin(n),
            _ => Err(Error::Usage("give exactly one of --file or --builtin".into())),
        }
    }
}

#[derive(Args)]
struct OutArgs {
    /// Write here (atomically) instead of stdout
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct MarginArgs {
    /// Synthetic bound for unbounded axes, in center-relative units;
    /// overrides the INVROB_MARGIN environment variable
    #[arg(long)]
    margin: Option<f64>,
}

impl MarginArgs {
    fn effective(&self) -> Result<f64> {
        let m = match self.margin {
            Some(m) => m,
            None => match std::env::var("INVROB_MARGIN") {
                Ok(s) => s.trim().parse::<f64>().map_err(|_| {
                    Error::Usage(format!("INVROB_MARGIN is not a number: {s:?}"))
                })?,
                Err(std::env::VarError::NotPresent) => AxisBox::DEFAULT_MARGIN,
                Err(e) => return Err(Error::Usage(format!("INVROB_MARGIN: {e}"))),
            },
        };
        if !(m.is_finite() && m > 0.0) {
            return Err(Error::Usage(format!("margin must be finite and positive, got {m}")));
        }
        Ok(m)
    }
}

#[derive(Args)]
struct SolverFlags {
    /// Feasibility tolerance
    #[arg(long)]
    tol: Option<f64>,
    /// Exchange round limit
    #[arg(long)]
    max_rounds: Option<u32>,
    /// Starts per decision axis in the relaxed solve
    #[arg(long)]
    starts: Option<usize>,
    /// Witness-cut pool capacity
    #[arg(long)]
    pool_cap: Option<usize>,
}

impl SolverFlags {
    fn config(&self) -> SolverConfig {
        let mut cfg = SolverConfig::default();
        if let Some(t) = self.tol {
            cfg.feasibility_tol = t;
        }
        if let Some(r) = self.max_rounds {
            cfg.exchange_max_rounds = r;
        }
        if let Some(s) = self.starts {
            cfg.multistart_grid = s;
        }
        if let Some(c) = self.pool_cap {
            cfg.scenario_pool_cap = c;
        }
        cfg
    }
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Override the budget components, comma separated
    #[arg(long, value_delimiter = ',', value_name = "E1,E2,...", allow_negative_numbers = true)]
    eps: Option<Vec<f64>>,
    #[command(flatten)]
    margin: MarginArgs,
    #[command(flatten)]
    out: OutArgs,
    #[command(flatten)]
    solver: SolverFlags,
}

#[derive(Args)]
struct GridArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Budget grid: one lo:hi:step range (or single value) per component,
    /// comma separated, first component outermost
    #[arg(long, value_name = "SPEC", allow_negative_numbers = true)]
    grid: String,
    /// Worker threads
    #[arg(long, default_value_t = 1)]
    workers: usize,
    #[command(flatten)]
    margin: MarginArgs,
    #[command(flatten)]
    out: OutArgs,
    #[command(flatten)]
    solver: SolverFlags,
}

#[derive(Args)]
struct RadiusArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    margin: MarginArgs,
    #[command(flatten)]
    out: OutArgs,
    #[command(flatten)]
    solver: SolverFlags,
}

#[derive(Args)]
struct ExampleArgs {
    /// Budget components, comma separated
    #[arg(
        long,
        value_delimiter = ',',
        value_name = "E1,E2",
        default_value = "0,0",
        allow_negative_numbers = true
    )]
    eps: Vec<f64>,
    #[command(flatten)]
    margin: MarginArgs,
    #[command(flatten)]
    out: OutArgs,
    #[command(flatten)]
    solver: SolverFlags,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Solution to check: JSON with x_star and d_star (solve output works)
    #[arg(long, value_name = "PATH")]
    solution: PathBuf,
    /// Override the budget components, comma separated
    #[arg(long, value_delimiter = ',', value_name = "E1,E2,...", allow_negative_numbers = true)]
    eps: Option<Vec<f64>>,
    /// Audit grid density per axis
    #[arg(long, default_value_t = solver::DEFAULT_AUDIT_GRID)]
    audit_grid: usize,
    /// Feasibility tolerance
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[command(flatten)]
    margin: MarginArgs,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct SpecArgs {
    #[command(subcommand)]
    cmd: SpecCmd,
}

#[derive(Subcommand)]
enum SpecCmd {
    /// Print a builtin instance as a problem file
    Dump {
        /// Builtin name
        name: String,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Parse a problem file and summarize what it contains
    Check {
        /// Problem file path
        file: PathBuf,
        #[command(flatten)]
        margin: MarginArgs,
        #[command(flatten)]
        out: OutArgs,
    },
}

pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 3,
            };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("invrob: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cmd: Command) -> Result<()> {
    match cmd {
        Command::Solve(a) => run_solve(a),
        Command::Grid(a) => run_grid(a),
        Command::Radius(a) => run_radius(a),
        Command::Example(a) => run_example(a),
        Command::Verify(a) => run_verify(a),
        Command::Spec(a) => match a.cmd {
            SpecCmd::Dump { name, out } => emit(&out.out, &specfile::builtin(&name)?.to_json()),
            SpecCmd::Check { file, margin, out } => run_check(&file, &margin, &out),
        },
    }
}

fn instance(input: &InputArgs, margin: &MarginArgs, eps: &Option<Vec<f64>>) -> Result<CoverageProblem> {
    let cp = input.load()?.coverage_problem(margin.effective()?)?;
    match eps {
        Some(e) => cp.with_eps(e),
        None => Ok(cp),
    }
}

fn run_solve(a: SolveArgs) -> Result<()> {
    let cp = instance(&a.input, &a.margin, &a.eps)?;
    let r = solver::solve(&cp, &a.solver.config())?;
    emit(&a.out.out, &json_pretty(&r))
}

fn run_example(a: ExampleArgs) -> Result<()> {
    if a.eps.len() != 2 {
        return Err(Error::Usage(format!(
            "the example takes two budget components, got {}",
            a.eps.len()
        )));
    }
    let cp = bicriteria::coverage_problem(a.eps[0], a.eps[1], a.margin.effective()?)?;
    let r = solver::solve(&cp, &a.solver.config())?;
    emit(&a.out.out, &json_pretty(&r))
}

fn run_grid(a: GridArgs) -> Result<()> {
    if a.workers == 0 {
        return Err(Error::Usage("workers must be at least 1".into()));
    }
    let cp = instance(&a.input, &a.margin, &None)?;
    let eps_grid = parse_grid(&a.grid)?;
    if eps_grid[0].len() != cp.budget.len() {
        return Err(Error::Usage(format!(
            "grid has {} budget components, instance has {}",
            eps_grid[0].len(),
            cp.budget.len()
        )));
    }
    let cells = solver::solve_grid(&cp, &a.solver.config(), &eps_grid, a.workers);
    let mut solved = Vec::with_capacity(cells.len());
    for (eps, res) in cells {
        match res {
            Ok(r) => solved.push((eps, r)),
            Err(e) => {
                eprintln!("invrob: grid cell eps={eps:?} failed");
                return Err(e);
            }
        }
    }
    // scalar decision over an interval family fits a flat table; everything
    // else keeps structure as JSON
    let csv_shape = cp.budget.len() == 2
        && cp.problem.decision_dim() == 1
        && matches!(cp.family, DesignFamily::Interval1d);
    let text = if csv_shape { grid_csv(&solved) } else { grid_json(&solved) };
    emit(&a.out.out, &text)
}

fn run_radius(a: RadiusArgs) -> Result<()> {
    let spec = a.input.load()?;
    let r = spec.radius_result(a.margin.effective()?, &a.solver.config())?;
    emit(&a.out.out, &json_pretty(&r))
}

#[derive(serde::Deserialize)]
struct SolutionIn {
    x_star: Vec<f64>,
    d_star: Vec<f64>,
}

#[derive(serde::Serialize)]
struct VerifyOut {
    feasible: bool,
    max_violation: f64,
    tol: f64,
    audit_grid: usize,
    report: crate::model::FeasibilityReport,
}

fn run_verify(a: VerifyArgs) -> Result<()> {
    let cp = instance(&a.input, &a.margin, &a.eps)?;
    let text = std::fs::read_to_string(&a.solution).map_err(Error::Io)?;
    let sol: SolutionIn = serde_json::from_str(&text)
        .map_err(|e| Error::Usage(format!("solution file: {e}")))?;
    let d = DesignPoint(sol.d_star);
    let report = solver::verify(&cp, &sol.x_star, &d, a.tol, a.audit_grid)?;
    let out = VerifyOut {
        feasible: report.is_feasible(),
        max_violation: report.max_violation(),
        tol: a.tol,
        audit_grid: a.audit_grid,
        report,
    };
    emit(&a.out.out, &json_pretty(&out))?;
    if !out.feasible {
        let worst = out.report.worst().expect("nonempty report");
        return Err(Error::Infeasible {
            x: sol.x_star,
            row: worst.label.clone(),
            violation: worst.violation,
        });
    }
    Ok(())
}

#[derive(serde::Serialize)]
struct SpecSummary {
    name: Option<String>,
    decision_dim: usize,
    scenario_dim: Option<usize>,
    objectives: usize,
    constraints: usize,
    /// "ok" when the file builds a solvable coverage instance, else the error
    coverage_instance: String,
    radius_kind: Option<String>,
}

fn run_check(file: &Path, margin: &MarginArgs, out: &OutArgs) -> Result<()> {
    let spec = SpecFile::from_path(file)?;
    let coverage_instance = match spec.coverage_problem(margin.effective()?) {
        Ok(_) => "ok".to_string(),
        Err(e) => e.to_string(),
    };
    let summary = SpecSummary {
        name: spec.name.clone(),
        decision_dim: spec.decision.bounds.len(),
        scenario_dim: spec.scenario.as_ref().map(|s| s.bounds.len()),
        objectives: spec.objectives.len(),
        constraints: spec.constraints.len(),
        coverage_instance,
        radius_kind: spec.radius.as_ref().map(|r| {
            match r.kind {
                specfile::RadiusKind::Stability => "stability",
                specfile::RadiusKind::Resilience => "resilience",
                specfile::RadiusKind::Feasibility => "feasibility",
            }
            .to_string()
        }),
    };
    emit(&out.out, &json_pretty(&summary))
}

fn json_pretty<T: serde::Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("result serializes");
    s.push('\n');
    s
}

#[derive(serde::Serialize)]
struct GridCell {
    eps: Vec<f64>,
    x_star: Vec<f64>,
    d_star: Vec<f64>,
    v_star: f64,
    rounds: u32,
    max_violation: f64,
    attainment_certified: bool,
    truncated: bool,
}

fn grid_json(cells: &[(Vec<f64>, SolveResult)]) -> String {
    let rows: Vec<GridCell> = cells
        .iter()
        .map(|(eps, r)| GridCell {
            eps: eps.clone(),
            x_star: r.x_star.clone(),
            d_star: r.d_star.0.clone(),
            v_star: r.v_star,
            rounds: r.rounds,
            max_violation: r.max_violation,
            attainment_certified: r.attainment_certified,
            truncated: r.truncated,
        })
        .collect();
    json_pretty(&rows)
}

fn grid_csv(cells: &[(Vec<f64>, SolveResult)]) -> String {
    let mut s = String::from("eps1,eps2,x_star,d1_star,d2_star,V_star,rounds,max_violation\n");
    for (eps, r) in cells {
        s.push_str(&format!(
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{},{:.16e}\n",
            eps[0],
            eps[1],
            r.x_star[0],
            r.d_star.0[0],
            r.d_star.0[1],
            r.v_star,
            r.rounds,
            r.max_violation
        ));
    }
    s
}

/// One grid axis: a single value or lo:hi:step inclusive of both ends when
/// the step divides the span.
fn parse_axis(s: &str) -> Result<Vec<f64>> {
    let num = |t: &str| -> Result<f64> {
        t.trim()
            .parse::<f64>()
            .map_err(|_| Error::Usage(format!("grid entry is not a number: {t:?}")))
    };
    let parts: Vec<&str> = s.split(':').collect();
    match parts.len() {
        1 => Ok(vec![num(parts[0])?]),
        3 => {
            let (lo, hi, step) = (num(parts[0])?, num(parts[1])?, num(parts[2])?);
            if !(step > 0.0 && step.is_finite()) {
                return Err(Error::Usage(format!("grid step must be positive, got {step}")));
            }
            if hi < lo {
                return Err(Error::Usage(format!("grid range runs backwards: {lo}:{hi}")));
            }
            let n = ((hi - lo) / step + 1e-9).floor() as usize;
            Ok((0..=n).map(|i| lo + i as f64 * step).collect())
        }
        _ => Err(Error::Usage(format!(
            "bad grid axis {s:?}, expected lo:hi:step or a single number"
        ))),
    }
}

/// Cartesian product of the axes, first axis outermost.
fn parse_grid(s: &str) -> Result<Vec<Vec<f64>>> {
    let axes = s
        .split(',')
        .map(parse_axis)
        .collect::<Result<Vec<Vec<f64>>>>()?;
    if axes.is_empty() || axes.iter().any(|a| a.is_empty()) {
        return Err(Error::Usage("empty grid".into()));
    }
    let mut rows: Vec<Vec<f64>> = vec![Vec::new()];
    for axis in &axes {
        let mut next = Vec::with_capacity(rows.len() * axis.len());
        for r in &rows {
            for v in axis {
                let mut rr = r.clone();
                rr.push(*v);
                next.push(rr);
            }
        }
        rows = next;
    }
    Ok(rows)
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(p) => write_atomic(p, text.as_bytes()),
        None => {
            std::io::stdout().write_all(text.as_bytes()).map_err(Error::Io)?;
            Ok(())
        }
    }
}

/// Readers of the target path never see a partial file: the content lands in
/// a sibling temporary first and is renamed over the target.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(Error::Io)?;
    tmp.write_all(bytes).map_err(Error::Io)?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}
