//! Deterministic derivative-free maximization over a box: a grid of starts,
//! coordinate descent with shrinking steps, and lexicographic ranking that
//! puts feasibility (violation at or below tolerance) before objective value.

use crate::error::Result;
use crate::geometry::AxisBox;

/// Ranking key for a candidate: worst constraint violation and objective
/// value. Violations at or below the tolerance count as feasible and tie.
#[derive(Debug, Clone, Copy)]
pub struct Score {
    pub violation: f64,
    pub value: f64,
}

impl Score {
    pub fn better_than(&self, other: &Score, tol: f64) -> bool {
        let a = if self.violation <= tol { 0.0 } else { self.violation };
        let b = if other.violation <= tol { 0.0 } else { other.violation };
        if a.is_nan() || self.value.is_nan() {
            return false;
        }
        if b.is_nan() || other.value.is_nan() {
            return true;
        }
        if a < b {
            return true;
        }
        if a > b {
            return false;
        }
        self.value > other.value
    }
}

#[derive(Debug, Clone, Copy)]
pub struct DescentConfig {
    /// Starts per axis of the multistart grid.
    pub starts_per_axis: usize,
    /// Initial step as a fraction of each axis range.
    pub step_frac: f64,
    /// Step multiplier after a sweep without improvement.
    pub step_shrink: f64,
    /// Stop once every axis step is below this absolute size.
    pub min_step: f64,
    /// Feasibility tolerance for the lexicographic ranking.
    pub tol: f64,
}

/// Maximizes `evaluate` over the box. Returns the best point and its score;
/// fully deterministic for a given configuration.
pub fn multistart_descent(
    sbox: &AxisBox,
    cfg: &DescentConfig,
    evaluate: &mut dyn FnMut(&[f64]) -> Result<Score>,
) -> Result<(Vec<f64>, Score)> {
    let starts = start_grid(sbox, cfg.starts_per_axis);
    let mut best: Option<(Vec<f64>, Score)> = None;
    for start in starts {
        let (x, s) = descend(sbox, start, cfg, evaluate)?;
        let replace = match &best {
            None => true,
            Some((_, bs)) => s.better_than(bs, cfg.tol),
        };
        if replace {
            best = Some((x, s));
        }
    }
    Ok(best.expect("at least one start"))
}

/// Tensor grid of starting points, thinned so the total stays below 1024.
fn start_grid(sbox: &AxisBox, per_axis: usize) -> Vec<Vec<f64>> {
    let n = sbox.dim();
    let mut s = per_axis.max(1);
    while s > 2 && (s as f64).powi(n as i32) > 1024.0 {
        s -= 1;
    }
    let axis_points: Vec<Vec<f64>> = (0..n)
        .map(|k| {
            let (lo, hi) = (sbox.lo()[k], sbox.hi()[k]);
            if hi <= lo || s == 1 {
                vec![0.5 * (lo + hi)]
            } else {
                (0..s).map(|i| lo + (hi - lo) * i as f64 / (s - 1) as f64).collect()
            }
        })
        .collect();
    let mut out = Vec::new();
    let mut idx = vec![0usize; n];
    loop {
        out.push((0..n).map(|k| axis_points[k][idx[k]]).collect());
        let mut k = 0;
        loop {
            if k == n {
                return out;
            }
            idx[k] += 1;
            if idx[k] < axis_points[k].len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

fn descend(
    sbox: &AxisBox,
    start: Vec<f64>,
    cfg: &DescentConfig,
    evaluate: &mut dyn FnMut(&[f64]) -> Result<Score>,
) -> Result<(Vec<f64>, Score)> {
    let n = sbox.dim();
    let ranges: Vec<f64> = (0..n).map(|k| sbox.range(k)).collect();
    let max_range = ranges.iter().cloned().fold(0.0_f64, f64::max);
    let mut x = start;
    let mut score = evaluate(&x)?;
    if max_range == 0.0 {
        return Ok((x, score));
    }
    let mut frac = cfg.step_frac;
    for _sweep in 0..100_000 {
        let mut improved = false;
        for k in 0..n {
            if ranges[k] == 0.0 {
                continue;
            }
            let step = frac * ranges[k];
            for dir in [1.0, -1.0] {
                let cand = (x[k] + dir * step).clamp(sbox.lo()[k], sbox.hi()[k]);
                if cand == x[k] {
                    continue;
                }
                let mut y = x.clone();
                y[k] = cand;
                let sy = evaluate(&y)?;
                if sy.better_than(&score, cfg.tol) {
                    x = y;
                    score = sy;
                    improved = true;
                    break;
                }
            }
        }
        if !improved {
            frac *= cfg.step_shrink;
            if frac * max_range < cfg.min_step {
                break;
            }
        }
    }
    Ok((x, score))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> DescentConfig {
        DescentConfig {
            starts_per_axis: 9,
            step_frac: 0.25,
            step_shrink: 0.5,
            min_step: 1e-9,
            tol: 1e-8,
        }
    }

    #[test]
    fn finds_interior_maximum() {
        let b = AxisBox::from_pairs(&[(-1.0, 1.0)]).unwrap();
        let (x, s) = multistart_descent(&b, &cfg(), &mut |x| {
            Ok(Score { violation: 0.0, value: -(x[0] - 0.3) * (x[0] - 0.3) })
        })
        .unwrap();
        assert!((x[0] - 0.3).abs() < 1e-6, "{x:?}");
        assert!(s.value > -1e-12);
    }

    #[test]
    fn feasibility_outranks_value() {
        // value grows to the left but x >= 0.5 is required
        let b = AxisBox::from_pairs(&[(-1.0, 1.0)]).unwrap();
        let (x, s) = multistart_descent(&b, &cfg(), &mut |x| {
            Ok(Score { violation: 0.5 - x[0], value: -x[0] })
        })
        .unwrap();
        assert!(s.violation <= 1e-8);
        assert!((x[0] - 0.5).abs() < 1e-6, "{x:?}");
    }

    #[test]
    fn two_dimensional_peak() {
        let b = AxisBox::from_pairs(&[(-2.0, 2.0), (-2.0, 2.0)]).unwrap();
        let (x, _) = multistart_descent(&b, &cfg(), &mut |x| {
            Ok(Score {
                violation: 0.0,
                value: -(x[0] - 0.25) * (x[0] - 0.25) - (x[1] + 0.4) * (x[1] + 0.4),
            })
        })
        .unwrap();
        assert!((x[0] - 0.25).abs() < 1e-6);
        assert!((x[1] + 0.4).abs() < 1e-6);
    }

    #[test]
    fn scores_rank_lexicographically() {
        let tol = 1e-8;
        let feas_low = Score { violation: 0.0, value: 1.0 };
        let feas_high = Score { violation: 1e-9, value: 2.0 };
        let infeas = Score { violation: 0.5, value: 100.0 };
        assert!(feas_high.better_than(&feas_low, tol));
        assert!(feas_low.better_than(&infeas, tol));
        assert!(!infeas.better_than(&feas_low, tol));
        let nan = Score { violation: 0.0, value: f64::NAN };
        assert!(!nan.better_than(&feas_low, tol));
        assert!(feas_low.better_than(&nan, tol));
    }

    #[test]
    fn degenerate_box_returns_center() {
        let b = AxisBox::from_pairs(&[(2.0, 2.0)]).unwrap();
        let (x, _) = multistart_descent(&b, &cfg(), &mut |x| {
            Ok(Score { violation: 0.0, value: x[0] })
        })
        .unwrap();
        assert_eq!(x, vec![2.0]);
    }
}
