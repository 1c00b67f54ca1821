//! Acceptance gate: one test per shipped guarantee, in order. Each test line
//! is the pass/fail verdict for its criterion; details print with
//! --nocapture. Reference numbers come from independent oracles computed
//! here or in the bicriteria module's reduced-form grid search.

use std::process::Command;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use invrob::bicriteria::{self, ReducedProblem};
use invrob::design::{DesignFamily, DesignPoint};
use invrob::geometry::AxisBox;
use invrob::measures::MeasureSpec;
use invrob::model::{Curvature, ProblemFunction, ScenarioSelector, Selection, UncertainProblem};
use invrob::normal::std_normal_cdf;
use invrob::radii::{self, LinearFeasibility};
use invrob::specfile::SpecFile;
use invrob::{
    solve, solve_grid, verify, BudgetSpec, CoverageProblem, SolveResult, SolverConfig,
    DEFAULT_AUDIT_GRID,
};

const MARGIN: f64 = AxisBox::DEFAULT_MARGIN;

fn eps_axis() -> Vec<f64> {
    (0..=10).map(|i| i as f64 * 0.5).collect()
}

struct Sweep {
    cells: Vec<(Vec<f64>, SolveResult)>,
    elapsed: Duration,
}

/// The full budget sweep, solved once and shared by the grid criteria.
fn sweep() -> &'static Sweep {
    static S: OnceLock<Sweep> = OnceLock::new();
    S.get_or_init(|| {
        let cp = bicriteria::coverage_problem(0.0, 0.0, MARGIN).expect("instance builds");
        let axis = eps_axis();
        let grid: Vec<Vec<f64>> = axis
            .iter()
            .flat_map(|&e1| axis.iter().map(move |&e2| vec![e1, e2]))
            .collect();
        let t0 = Instant::now();
        let cells = solve_grid(&cp, &SolverConfig::default(), &grid, 4);
        let elapsed = t0.elapsed();
        let cells = cells
            .into_iter()
            .map(|(e, r)| {
                let r = r.unwrap_or_else(|err| panic!("cell eps={e:?} failed: {err}"));
                (e, r)
            })
            .collect();
        Sweep { cells, elapsed }
    })
}

fn cell(e1: f64, e2: f64) -> &'static SolveResult {
    sweep()
        .cells
        .iter()
        .find(|(e, _)| e[0] == e1 && e[1] == e2)
        .map(|(_, r)| r)
        .unwrap_or_else(|| panic!("no cell at ({e1}, {e2})"))
}

fn spec_path(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../specs")
        .join(name)
}

#[test]
fn c01_zero_budget_pins_the_nominal_solution() {
    let t0 = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_invrob"))
        .args(["example", "--eps", "0,0"])
        .output()
        .expect("binary runs");
    let dt = t0.elapsed();
    assert!(
        out.status.success(),
        "exit {:?}, stderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).expect("json output");
    let x = v["x_star"][0].as_f64().unwrap();
    let d1 = v["d_star"][0].as_f64().unwrap();
    let d2 = v["d_star"][1].as_f64().unwrap();
    let vol = v["v_star"].as_f64().unwrap();
    assert!((x - 2.0).abs() <= 1e-6, "x* = {x}");
    assert!(d1.abs() <= 1e-6, "d1* = {d1}");
    assert!(d2.abs() <= 1e-6, "d2* = {d2}");
    assert!(vol.abs() <= 1e-6, "V* = {vol}");
    assert!(dt < Duration::from_secs(1), "took {dt:?}");
    println!("criterion 1: PASS  x*={x:.9} d*=({d1:.2e},{d2:.2e}) V*={vol:.2e} in {dt:?}");
}

#[test]
fn c02_coverage_stays_below_the_distribution_cap() {
    let s = sweep();
    let cap = 0.8414;
    for (e, r) in &s.cells {
        assert!(
            r.v_star < cap,
            "V* = {} at eps = {e:?} reaches the cap {cap}",
            r.v_star
        );
    }
    assert!(
        s.elapsed < Duration::from_secs(60),
        "sweep took {:?}",
        s.elapsed
    );
    let vmax = s.cells.iter().map(|(_, r)| r.v_star).fold(f64::MIN, f64::max);
    println!(
        "criterion 2: PASS  121 cells in {:?}, max V* = {vmax:.6} < {cap}",
        s.elapsed
    );
}

#[test]
fn c03_budget_row_two_is_active_everywhere() {
    let mut worst = 0.0_f64;
    for (e, r) in &sweep().cells {
        let gap = (2.0 * r.x_star[0] - r.d_star.0[0] - (4.0 + e[1])).abs();
        worst = worst.max(gap);
        assert!(gap <= 1e-6, "identity gap {gap} at eps = {e:?}");
    }
    println!("criterion 3: PASS  max identity gap {worst:.2e} over 121 cells");
}

#[test]
fn c04_first_budget_plateaus_by_three() {
    let mut worst = 0.0_f64;
    for &e2 in &eps_axis() {
        let gap = (cell(3.0, e2).v_star - cell(5.0, e2).v_star).abs();
        worst = worst.max(gap);
        assert!(gap <= 1e-6, "plateau gap {gap} at eps2 = {e2}");
    }
    println!("criterion 4: PASS  max plateau gap {worst:.2e} across 11 columns");
}

#[test]
fn c05_coverage_surface_is_monotone_and_matches_the_reduced_oracle() {
    let axis = eps_axis();
    let mut comparisons = 0;
    for i in 0..axis.len() {
        for j in 0..axis.len() {
            if i + 1 < axis.len() {
                let (a, b) = (cell(axis[i], axis[j]), cell(axis[i + 1], axis[j]));
                assert!(
                    b.v_star >= a.v_star - 1e-8,
                    "V* drops along axis 1 at ({}, {})",
                    axis[i + 1],
                    axis[j]
                );
                comparisons += 1;
            }
            if j + 1 < axis.len() {
                let (a, b) = (cell(axis[i], axis[j]), cell(axis[i], axis[j + 1]));
                assert!(
                    b.v_star >= a.v_star - 1e-8,
                    "V* drops along axis 2 at ({}, {})",
                    axis[i],
                    axis[j + 1]
                );
                comparisons += 1;
            }
        }
    }
    assert_eq!(comparisons, 220);
    let corner = cell(5.0, 5.0).v_star;
    assert!(
        (0.75..=0.8414).contains(&corner),
        "corner coverage {corner} outside [0.75, 0.8414]"
    );
    let mut worst = 0.0_f64;
    for (e, r) in &sweep().cells {
        let oracle = ReducedProblem::new(e[0], e[1]).unwrap().grid_optimum(401).3;
        let gap = (r.v_star - oracle).abs();
        worst = worst.max(gap);
        assert!(gap <= 1e-3, "V* = {} vs oracle {oracle} at eps = {e:?}", r.v_star);
    }
    println!(
        "criterion 5: PASS  220 monotone comparisons, corner V* = {corner:.6}, max oracle gap {worst:.2e}"
    );
}

#[test]
fn c06_solver_matches_the_dense_reduced_oracle_at_random_budgets() {
    let cp = bicriteria::coverage_problem(0.0, 0.0, MARGIN).unwrap();
    let cfg = SolverConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(61);
    let mut worst = 0.0_f64;
    for _ in 0..25 {
        let e1 = rng.random_range(0.0..6.0);
        let e2 = rng.random_range(0.0..6.0);
        let r = solve(&cp.with_eps(&[e1, e2]).unwrap(), &cfg).unwrap();
        let oracle = ReducedProblem::new(e1, e2).unwrap().grid_optimum(2000).3;
        let gap = (r.v_star - oracle).abs();
        worst = worst.max(gap);
        assert!(
            gap <= 1e-3,
            "V* = {} vs oracle {oracle} at eps = ({e1}, {e2})",
            r.v_star
        );
    }
    println!("criterion 6: PASS  25 random budgets, max oracle gap {worst:.2e}");
}

#[test]
fn c07_unbounded_second_budget_drives_the_limits() {
    let cp = bicriteria::coverage_problem(0.0, 0.0, MARGIN).unwrap();
    let cfg = SolverConfig::default();
    let runs: Vec<(f64, SolveResult)> = [0.0, 5.0, 10.0, 20.0]
        .iter()
        .map(|&e2| (e2, solve(&cp.with_eps(&[0.0, e2]).unwrap(), &cfg).unwrap()))
        .collect();
    let mut fails = Vec::new();
    for w in runs.windows(2) {
        let ((ea, a), (eb, b)) = (&w[0], &w[1]);
        if !(b.d_star.0[1] > a.d_star.0[1]) {
            fails.push(format!(
                "d2* not strictly increasing: {} at eps2={ea}, {} at eps2={eb}",
                a.d_star.0[1], b.d_star.0[1]
            ));
        }
        if !(b.d_star.0[0] < a.d_star.0[0]) {
            fails.push(format!(
                "d1* not strictly decreasing: {} at eps2={ea}, {} at eps2={eb}",
                a.d_star.0[0], b.d_star.0[0]
            ));
        }
        if !(b.x_star[0] > a.x_star[0]) {
            fails.push(format!(
                "x* not strictly increasing: {} at eps2={ea}, {} at eps2={eb}",
                a.x_star[0], b.x_star[0]
            ));
        }
    }
    let d2_final = runs.last().unwrap().1.d_star.0[1];
    if !(d2_final >= 0.9) {
        fails.push(format!(
            "d2* at eps2=20 is {d2_final:.6}, required >= 0.9; with the first budget at zero \
             the feasible right ends stop at about 0.8818, and the measure-optimal one sits \
             near 0.8662, so this bound is not attainable"
        ));
    }
    let line: Vec<String> = runs
        .iter()
        .map(|(e2, r)| {
            format!(
                "eps2={e2}: x*={:.4} d1*={:.4} d2*={:.4}",
                r.x_star[0], r.d_star.0[0], r.d_star.0[1]
            )
        })
        .collect();
    println!("criterion 7 trajectory: {}", line.join("; "));
    assert!(fails.is_empty(), "criterion 7: {}", fails.join(" | "));
    println!("criterion 7: PASS");
}

#[test]
fn c08_normal_cdf_matches_a_fresh_integration_oracle() {
    // Simpson integration of the density on [0, 1], written without touching
    // the library's erf path
    let n = 2000;
    let h = 1.0 / n as f64;
    let density = |t: f64| (-0.5 * t * t).exp();
    let mut acc = density(0.0) + density(1.0);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * density(i as f64 * h);
    }
    let integral = acc * h / 3.0;
    let oracle = 0.5 + integral / (2.0 * std::f64::consts::PI).sqrt();
    let got = std_normal_cdf(1.0);
    assert!((got - oracle).abs() <= 1e-9, "cdf(1) = {got}, oracle {oracle}");
    assert!((got - 0.841344746).abs() <= 1e-9, "cdf(1) = {got}");
    assert_eq!(std_normal_cdf(0.0), 0.5, "cdf(0) must be exactly one half");
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst = 0.0_f64;
    for _ in 0..100 {
        let t = rng.random_range(-6.0..6.0);
        let gap = (std_normal_cdf(t) + std_normal_cdf(-t) - 1.0).abs();
        worst = worst.max(gap);
        assert!(gap <= 1e-12, "reflection gap {gap} at t = {t}");
    }
    println!(
        "criterion 8: PASS  cdf(1) = {got:.12}, oracle gap {:.2e}, worst reflection {worst:.2e}",
        (got - oracle).abs()
    );
}

#[test]
fn c09_radii_match_dense_brute_force_on_the_shipped_toys() {
    let cfg = SolverConfig::default();

    // stability on the shipped quadratic tracking toy
    let stab = SpecFile::from_path(&spec_path("stability_quadratic.json"))
        .unwrap()
        .radius_result(MARGIN, &cfg)
        .unwrap();
    let stab_bf = {
        // largest |u| such that every scenario inside loses at most 1 against
        // the best decision on a dense grid
        let xs: Vec<f64> = (0..=4000).map(|i| -3.0 + i as f64 * (6.0 / 4000.0)).collect();
        let mut best = 0.0_f64;
        let mut r = f64::INFINITY;
        for i in 0..=8000 {
            let u = i as f64 * (2.0 / 8000.0);
            let adaptive = xs
                .iter()
                .map(|x| (x - u) * (x - u))
                .fold(f64::INFINITY, f64::min);
            let gap = u * u - adaptive - 1.0;
            if gap > 1e-9 {
                r = u;
                break;
            }
            best = u;
        }
        if r.is_finite() {
            0.5 * (best + r)
        } else {
            best
        }
    };
    assert!(
        (stab.radius - stab_bf).abs() <= 1e-3,
        "stability {} vs brute force {stab_bf}",
        stab.radius
    );

    // resilience on the shipped toy under level 1
    let res = SpecFile::from_path(&spec_path("resilience_quadratic.json"))
        .unwrap()
        .radius_result(MARGIN, &cfg)
        .unwrap();
    let res_bf = {
        let xs: Vec<f64> = (0..=400).map(|i| -4.0 + i as f64 * (8.0 / 400.0)).collect();
        let mut best = 0.0_f64;
        for i in 0..=3000 {
            let rho = i as f64 * (3.0 / 3000.0);
            let feasible = xs.iter().any(|x| {
                (0..=200).all(|j| {
                    let u = -rho + j as f64 * (2.0 * rho / 200.0);
                    (x - u) * (x - u) <= 1.0 + 1e-9
                })
            });
            if feasible {
                best = rho;
            } else {
                break;
            }
        }
        best
    };
    assert!(
        (res.radius - res_bf).abs() <= 1e-3,
        "resilience {} vs brute force {res_bf}",
        res.radius
    );

    // feasibility radius on the shipped strip
    let strip = SpecFile::from_path(&spec_path("feasibility_strip.json")).unwrap();
    let rrf = strip.radius_result(MARGIN, &cfg).unwrap();
    let rrf_bf = {
        let xs: Vec<f64> = (0..=40).map(|i| -2.0 + i as f64 * (4.0 / 40.0)).collect();
        let mut best = 0.0_f64;
        for i in 0..=3000 {
            let alpha = i as f64 * (3.0 / 3000.0);
            let feasible = xs.iter().any(|x| {
                let mut ok = true;
                'grid: for p in 0..=40 {
                    for q in 0..=40 {
                        let da = -alpha + p as f64 * (2.0 * alpha / 40.0);
                        let db = -alpha + q as f64 * (2.0 * alpha / 40.0);
                        if (1.0 + da) * x - (1.0 + db) > 1e-9
                            || (-1.0 + da) * x - (1.0 + db) > 1e-9
                        {
                            ok = false;
                            break 'grid;
                        }
                    }
                }
                ok
            });
            if feasible {
                best = alpha;
            } else {
                break;
            }
        }
        best
    };
    assert!(
        (rrf.radius - rrf_bf).abs() <= 1e-3,
        "feasibility radius {} vs brute force {rrf_bf}",
        rrf.radius
    );

    // doubling the perturbation shape halves the radius
    let r = strip.radius.as_ref().unwrap();
    let doubled = LinearFeasibility {
        rows_a: r.rows_a.clone().unwrap(),
        rows_b: r.rows_b.clone().unwrap(),
        decision_box: AxisBox::from_pairs(&[(-5.0, 5.0)]).unwrap(),
        shape_vertices: r
            .shape_vertices
            .clone()
            .unwrap()
            .into_iter()
            .map(|v| v.into_iter().map(|c| 2.0 * c).collect())
            .collect(),
    };
    let rrf2 = radii::feasibility_radius(&doubled, MARGIN, &cfg).unwrap();
    assert!(
        (rrf2.radius - 0.5 * rrf.radius).abs() <= 1e-6,
        "doubled shape gives {}, expected half of {}",
        rrf2.radius,
        rrf.radius
    );

    // re-choosing the decision can only extend the stability reach: the two
    // shipped quadratic toys are matched (level = nominal value + budget)
    assert!(
        res.radius >= stab.radius - 1e-6,
        "resilience {} below stability {}",
        res.radius,
        stab.radius
    );

    println!(
        "criterion 9: PASS  stability {:.6} (bf {stab_bf:.6}), resilience {:.6} (bf {res_bf:.6}), \
         feasibility {:.6} (bf {rrf_bf:.6}), doubled shape {:.6}",
        stab.radius, res.radius, rrf.radius, rrf2.radius
    );
}

#[test]
fn c10_no_finite_subset_beats_its_hull_interval() {
    let cfg = SolverConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut worst_over = f64::MIN;
    for inst in 0..20 {
        let a = rng.random_range(-1.0..1.0);
        let b = rng.random_range(-1.0..1.0);
        let c = rng.random_range(0.0..1.0);
        let b2 = rng.random_range(-1.0..1.0);
        let c2 = rng.random_range(0.0..1.0);
        let xc = rng.random_range(-0.5..0.5);
        let eps = rng.random_range(0.5..2.0);
        let f = {
            move |x: &[f64], u: &[f64]| (x[0] - a) * (x[0] - a) + b * u[0] + c * u[0] * u[0]
        };
        let g = {
            move |x: &[f64], u: &[f64]| (b2 + xc * x[0]) * u[0] + c2 * u[0] * u[0] - 1.0
        };
        let problem = UncertainProblem::new(
            vec![ProblemFunction::native("f", Curvature::ConvexInU, f)],
            vec![ProblemFunction::native("g", Curvature::ConvexInU, g)],
            AxisBox::from_pairs(&[(-3.0, 3.0)]).unwrap(),
            AxisBox::from_pairs(&[(-3.0, 3.0)]).unwrap(),
            vec![vec![0.0]],
        )
        .unwrap();
        let cp = CoverageProblem::new(
            problem,
            BudgetSpec::additive_scalar(0.0, eps).unwrap(),
            ScenarioSelector::Identity,
            ScenarioSelector::Identity,
            DesignFamily::interval1d(),
            MeasureSpec::Volume,
        )
        .unwrap();
        let r = solve(&cp, &cfg).unwrap();

        // a candidate decision makes a hull interval count when both rows
        // hold at both endpoints; convexity carries that to the interior
        let hull_value = |lo: f64, hi: f64, candidates: &[f64]| -> Option<f64> {
            let feasible = |x: f64| {
                [lo, hi].iter().all(|&u| {
                    f(&[x], &[u]) - eps <= 1e-7 && g(&[x], &[u]) <= 1e-7
                })
            };
            candidates.iter().copied().find(|&x| feasible(x)).map(|_| hi - lo)
        };
        let xgrid: Vec<f64> = (0..=200).map(|i| -3.0 + i as f64 * (6.0 / 200.0)).collect();
        let mut best_subset = f64::MIN;
        for _ in 0..500 {
            let k = rng.random_range(2..=6);
            let mut pts: Vec<f64> = (0..k).map(|_| rng.random_range(-3.0..3.0)).collect();
            pts.push(0.0);
            let lo = pts.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = pts.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            if let Some(v) = hull_value(lo, hi, &xgrid) {
                best_subset = best_subset.max(v);
                worst_over = worst_over.max(v - r.v_star);
                assert!(
                    v <= r.v_star + 1e-6,
                    "instance {inst}: subset hull [{lo}, {hi}] gives {v} > V* = {}",
                    r.v_star
                );
            }
        }
        // the solved endpoints themselves form one admissible subset, so the
        // best subset value reaches V* from below as well
        let planted = hull_value(r.d_star.0[0], r.d_star.0[1], &[r.x_star[0]])
            .expect("solution endpoints admit the solved decision");
        best_subset = best_subset.max(planted);
        assert!(
            best_subset >= r.v_star - 1e-6,
            "instance {inst}: best subset {best_subset} falls short of V* = {}",
            r.v_star
        );
    }
    println!(
        "criterion 10: PASS  20 instances x 500 subsets, worst overshoot {worst_over:.2e}"
    );
}

#[test]
fn c11_determinism_audit_and_byte_stability_hold() {
    let cfg = SolverConfig::default();

    // bit-identical reruns
    let cp = bicriteria::coverage_problem(1.0, 2.0, MARGIN).unwrap();
    let a = serde_json::to_string(&solve(&cp, &cfg).unwrap()).unwrap();
    let b = serde_json::to_string(&solve(&cp, &cfg).unwrap()).unwrap();
    assert_eq!(a, b, "two identical solves differ");

    // the curvature-agnostic audit confirms solver feasibility within 2x tol
    for (e1, e2) in [(0.0, 0.0), (2.5, 2.5), (5.0, 5.0)] {
        let r = cell(e1, e2);
        let report = verify(
            &cp.with_eps(&[e1, e2]).unwrap(),
            &r.x_star,
            &r.d_star,
            cfg.feasibility_tol,
            DEFAULT_AUDIT_GRID,
        )
        .unwrap();
        assert!(
            report.max_violation() <= 2.0 * cfg.feasibility_tol,
            "audit violation {} at eps = ({e1}, {e2})",
            report.max_violation()
        );
    }

    // byte-identical sweep output from the binary
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_invrob"))
            .args([
                "grid",
                "--builtin",
                "bicriteria-normal",
                "--grid",
                "0:1:0.5,0:1:0.5",
                "--workers",
                "2",
            ])
            .output()
            .expect("binary runs")
    };
    let (o1, o2) = (run(), run());
    assert!(o1.status.success() && o2.status.success());
    assert_eq!(o1.stdout, o2.stdout, "grid output bytes differ between runs");

    // a custom selector stays inside the set it is given
    let half = ScenarioSelector::Custom(std::sync::Arc::new(
        |_x: &[f64], fam: &DesignFamily, d: &DesignPoint| {
            let (lo, hi) = (d.0[0], d.0[1]);
            let mid = 0.5 * (lo + hi);
            let _ = fam;
            Selection::Scenarios(vec![vec![mid], vec![hi]])
        },
    ));
    let fam = DesignFamily::interval1d();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..200 {
        let lo = rng.random_range(-3.0..0.0);
        let hi = rng.random_range(0.0..3.0);
        let d = DesignPoint(vec![lo, hi]);
        match half.select(&[0.0], &fam, &d, &[vec![0.0]]) {
            Selection::Scenarios(pts) => {
                for p in pts {
                    assert!(fam.contains(&d, &p).unwrap(), "selector left the set");
                }
            }
            Selection::Whole => {}
        }
    }
    println!("criterion 11: PASS  determinism, audit soundness, byte stability, selector closure");
}
