//! Parametric coverage-set families d ↦ W(d): 1-D intervals, axis boxes,
//! Euclidean balls around a center, and scaled polytopes anchor + α·Z.
//! Each family provides exact membership, inner maximization of a scalar
//! function over W(d) ∩ uncertainty box, reference-coordinate maps (scenarios
//! expressed in set-relative coordinates so cached witnesses move with d),
//! and the bound/seed geometry the solver's design search needs.

use crate::error::{Error, Result};
use crate::geometry::{norm, AxisBox, Polytope};
use crate::model::Curvature;

/// Synthetic upper bound for unbounded scale/radius searches.
pub const SCALE_CAP: f64 = 1e12;

/// Grid density per axis for the general-flag inner maximizer.
pub const GRID_N: usize = 64;

const REFINE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct DesignPoint(pub Vec<f64>);

impl DesignPoint {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

#[derive(Debug, Clone)]
pub enum DesignFamily {
    /// d = (d1, d2), W(d) = [d1, d2] in a 1-D scenario space.
    Interval1d,
    /// d = (lo_0..lo_{m-1}, hi_0..hi_{m-1}), W(d) the axis box.
    Box { dim: usize },
    /// d = (rho,), W(d) the Euclidean ball around `center`.
    Ball { center: Vec<f64> },
    /// d = (alpha,), W(d) = anchor + alpha * Z with Z a vertex polytope.
    ScaledSet { anchor: Vec<f64>, shape: Polytope },
}

impl DesignFamily {
    pub fn interval1d() -> Self {
        DesignFamily::Interval1d
    }

    pub fn box_family(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Usage("box family needs dimension >= 1".into()));
        }
        Ok(DesignFamily::Box { dim })
    }

    pub fn ball(center: Vec<f64>) -> Result<Self> {
        if center.is_empty() || center.iter().any(|c| !c.is_finite()) {
            return Err(Error::Usage(format!("ball center {center:?} must be finite and nonempty")));
        }
        Ok(DesignFamily::Ball { center })
    }

    pub fn scaled_set(anchor: Vec<f64>, vertices: &[Vec<f64>]) -> Result<Self> {
        if anchor.is_empty() || anchor.iter().any(|c| !c.is_finite()) {
            return Err(Error::Usage(format!("anchor {anchor:?} must be finite and nonempty")));
        }
        let shape = Polytope::from_vertices(anchor.len(), vertices)?;
        // scaling is only set-monotone when the shape contains its own
        // origin; seed bisection and boundary pushes rely on that
        if shape.membership(&vec![0.0; anchor.len()]) > 1e-12 {
            return Err(Error::Unsupported(
                "scaled-set shape must contain the origin of its reference frame".into(),
            ));
        }
        Ok(DesignFamily::ScaledSet { anchor, shape })
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            DesignFamily::Interval1d => "interval1d",
            DesignFamily::Box { .. } => "box",
            DesignFamily::Ball { .. } => "ball",
            DesignFamily::ScaledSet { .. } => "scaled-set",
        }
    }

    pub fn scenario_dim(&self) -> usize {
        match self {
            DesignFamily::Interval1d => 1,
            DesignFamily::Box { dim } => *dim,
            DesignFamily::Ball { center } => center.len(),
            DesignFamily::ScaledSet { anchor, .. } => anchor.len(),
        }
    }

    pub fn design_dim(&self) -> usize {
        match self {
            DesignFamily::Interval1d => 2,
            DesignFamily::Box { dim } => 2 * dim,
            DesignFamily::Ball { .. } | DesignFamily::ScaledSet { .. } => 1,
        }
    }

    /// Human-readable names for the design coordinates, in vector order.
    pub fn axis_names(&self) -> Vec<String> {
        match self {
            DesignFamily::Interval1d => vec!["d1".into(), "d2".into()],
            DesignFamily::Box { dim } => {
                let mut names: Vec<String> = (0..*dim).map(|k| format!("lo{k}")).collect();
                names.extend((0..*dim).map(|k| format!("hi{k}")));
                names
            }
            DesignFamily::Ball { .. } => vec!["rho".into()],
            DesignFamily::ScaledSet { .. } => vec!["alpha".into()],
        }
    }

    pub fn validate_point(&self, d: &DesignPoint) -> Result<()> {
        let v = &d.0;
        if v.len() != self.design_dim() {
            return Err(Error::Usage(format!(
                "design point has {} coordinates, {} expects {}",
                v.len(),
                self.kind_name(),
                self.design_dim()
            )));
        }
        if v.iter().any(|c| !c.is_finite()) {
            return Err(Error::Usage(format!("design point {v:?} is not finite")));
        }
        match self {
            DesignFamily::Interval1d => {
                if v[0] > v[1] {
                    return Err(Error::Usage(format!("interval [{}, {}] is empty", v[0], v[1])));
                }
            }
            DesignFamily::Box { dim } => {
                for k in 0..*dim {
                    if v[k] > v[dim + k] {
                        return Err(Error::Usage(format!(
                            "box axis {k} has lo {} > hi {}",
                            v[k],
                            v[dim + k]
                        )));
                    }
                }
            }
            DesignFamily::Ball { .. } | DesignFamily::ScaledSet { .. } => {
                if v[0] < 0.0 {
                    return Err(Error::Usage(format!(
                        "{} design value must be nonnegative, got {}",
                        self.kind_name(),
                        v[0]
                    )));
                }
            }
        }
        Ok(())
    }

    /// Signed membership residual of u in W(d): <= 0 inside, in scenario
    /// units. No input validation; hot path.
    pub fn membership_violation(&self, d: &DesignPoint, u: &[f64]) -> f64 {
        let v = &d.0;
        match self {
            DesignFamily::Interval1d => (v[0] - u[0]).max(u[0] - v[1]),
            DesignFamily::Box { dim } => (0..*dim)
                .map(|k| (v[k] - u[k]).max(u[k] - v[dim + k]))
                .fold(f64::NEG_INFINITY, f64::max),
            DesignFamily::Ball { center } => {
                let diff: Vec<f64> = u.iter().zip(center).map(|(a, b)| a - b).collect();
                norm(&diff) - v[0]
            }
            DesignFamily::ScaledSet { anchor, shape } => {
                let alpha = v[0];
                if shape.is_point() {
                    let p: Vec<f64> = anchor
                        .iter()
                        .zip(&shape.vertices[0])
                        .map(|(a, z)| a + alpha * z)
                        .collect();
                    let diff: Vec<f64> = u.iter().zip(&p).map(|(a, b)| a - b).collect();
                    return norm(&diff);
                }
                if alpha == 0.0 {
                    let diff: Vec<f64> = u.iter().zip(anchor).map(|(a, b)| a - b).collect();
                    return norm(&diff);
                }
                let w: Vec<f64> = u.iter().zip(anchor).map(|(a, b)| (a - b) / alpha).collect();
                alpha * shape.membership(&w)
            }
        }
    }

    fn boundary_slack(&self, d: &DesignPoint) -> f64 {
        match self {
            // interval and box membership is exact comparison
            DesignFamily::Interval1d | DesignFamily::Box { .. } => 0.0,
            DesignFamily::Ball { center } => {
                let scale = d.0[0].abs().max(center.iter().fold(1.0_f64, |m, c| m.max(c.abs())));
                1e-12 * scale
            }
            DesignFamily::ScaledSet { anchor, shape } => {
                let mut scale = d.0[0].abs().max(1.0);
                for c in anchor {
                    scale = scale.max(c.abs());
                }
                for v in &shape.vertices {
                    for c in v {
                        scale = scale.max(d.0[0].abs() * c.abs());
                    }
                }
                1e-12 * scale
            }
        }
    }

    /// Exact membership test. Interval and box compare coordinates directly;
    /// ball and scaled-set allow a relative 1e-12 slack for the boundary
    /// arithmetic of norms and face residuals.
    pub fn contains(&self, d: &DesignPoint, u: &[f64]) -> Result<bool> {
        self.validate_point(d)?;
        if u.len() != self.scenario_dim() {
            return Err(Error::Usage(format!(
                "scenario has dimension {}, family expects {}",
                u.len(),
                self.scenario_dim()
            )));
        }
        Ok(self.membership_violation(d, u) <= self.boundary_slack(d))
    }

    /// Restricts W(d) to the uncertainty box. Interval and box clip exactly;
    /// ball and scaled-set keep d and report whether the box truncates them.
    pub fn clip_to_box(&self, d: &DesignPoint, ubox: &AxisBox) -> Result<(DesignPoint, bool)> {
        self.validate_point(d)?;
        match self {
            DesignFamily::Interval1d => {
                let lo = d.0[0].max(ubox.lo()[0]);
                let hi = d.0[1].min(ubox.hi()[0]);
                if lo > hi {
                    return Err(Error::Domain(format!(
                        "interval [{}, {}] does not meet the uncertainty box",
                        d.0[0], d.0[1]
                    )));
                }
                Ok((DesignPoint(vec![lo, hi]), false))
            }
            DesignFamily::Box { dim } => {
                let mut v = Vec::with_capacity(2 * dim);
                for k in 0..*dim {
                    v.push(d.0[k].max(ubox.lo()[k]));
                }
                for k in 0..*dim {
                    let hi = d.0[dim + k].min(ubox.hi()[k]);
                    if v[k] > hi {
                        return Err(Error::Domain(format!(
                            "box axis {k} does not meet the uncertainty box"
                        )));
                    }
                    v.push(hi);
                }
                Ok((DesignPoint(v), false))
            }
            DesignFamily::Ball { center } => {
                let rho = d.0[0];
                let mut truncated = false;
                for k in 0..center.len() {
                    if center[k] - rho < ubox.lo()[k] || center[k] + rho > ubox.hi()[k] {
                        truncated = true;
                    }
                }
                Ok((d.clone(), truncated))
            }
            DesignFamily::ScaledSet { anchor, shape } => {
                let alpha = d.0[0];
                let mut truncated = false;
                for z in &shape.vertices {
                    for k in 0..anchor.len() {
                        let c = anchor[k] + alpha * z[k];
                        if c < ubox.lo()[k] || c > ubox.hi()[k] {
                            truncated = true;
                        }
                    }
                }
                Ok((d.clone(), truncated))
            }
        }
    }

    /// Maps reference coordinates w to a scenario in W(d). Interval/box use
    /// the unit cube, ball the unit ball, scaled-set the shape polytope Z.
    pub fn to_scenario(&self, d: &DesignPoint, w: &[f64]) -> Vec<f64> {
        let v = &d.0;
        // endpoints must map exactly: v0 + w*(v1 - v0) can overshoot v1 by an
        // ulp at w = 1, which would place a boundary point outside the set
        let lerp = |a: f64, b: f64, t: f64| (1.0 - t) * a + t * b;
        match self {
            DesignFamily::Interval1d => vec![lerp(v[0], v[1], w[0])],
            DesignFamily::Box { dim } => {
                (0..*dim).map(|k| lerp(v[k], v[dim + k], w[k])).collect()
            }
            DesignFamily::Ball { center } => {
                center.iter().zip(w).map(|(c, wk)| c + v[0] * wk).collect()
            }
            DesignFamily::ScaledSet { anchor, .. } => {
                anchor.iter().zip(w).map(|(a, wk)| a + v[0] * wk).collect()
            }
        }
    }

    /// Inverse of [`Self::to_scenario`]; degenerate directions map to 0 (or the
    /// shape's first vertex for a point polytope).
    pub fn to_reference(&self, d: &DesignPoint, u: &[f64]) -> Vec<f64> {
        let v = &d.0;
        match self {
            DesignFamily::Interval1d => {
                let range = v[1] - v[0];
                vec![if range > 0.0 { ((u[0] - v[0]) / range).clamp(0.0, 1.0) } else { 0.0 }]
            }
            DesignFamily::Box { dim } => (0..*dim)
                .map(|k| {
                    let range = v[dim + k] - v[k];
                    if range > 0.0 {
                        ((u[k] - v[k]) / range).clamp(0.0, 1.0)
                    } else {
                        0.0
                    }
                })
                .collect(),
            DesignFamily::Ball { center } => {
                if v[0] == 0.0 {
                    return vec![0.0; center.len()];
                }
                let mut w: Vec<f64> =
                    u.iter().zip(center).map(|(a, c)| (a - c) / v[0]).collect();
                let n = norm(&w);
                if n > 1.0 {
                    for t in &mut w {
                        *t /= n;
                    }
                }
                w
            }
            DesignFamily::ScaledSet { anchor, shape } => {
                if v[0] == 0.0 {
                    return if shape.is_point() {
                        shape.vertices[0].clone()
                    } else {
                        vec![0.0; anchor.len()]
                    };
                }
                u.iter().zip(anchor).map(|(a, b)| (a - b) / v[0]).collect()
            }
        }
    }

    /// Search box for the design coordinates, with synthetic flags where a
    /// bound comes from a synthetic uncertainty-box side or the scale cap.
    pub fn design_box(&self, ubox: &AxisBox) -> Result<AxisBox> {
        if ubox.dim() != self.scenario_dim() {
            return Err(Error::Usage(format!(
                "uncertainty box has dimension {}, family expects {}",
                ubox.dim(),
                self.scenario_dim()
            )));
        }
        match self {
            DesignFamily::Interval1d => {
                let (lo, hi) = (ubox.lo()[0], ubox.hi()[0]);
                let syn = ubox.is_synthetic(0);
                AxisBox::from_parts(vec![lo, lo], vec![hi, hi], vec![syn, syn])
            }
            DesignFamily::Box { dim } => {
                let mut lo = Vec::new();
                let mut hi = Vec::new();
                let mut syn = Vec::new();
                for k in 0..*dim {
                    lo.push(ubox.lo()[k]);
                    hi.push(ubox.hi()[k]);
                    syn.push(ubox.is_synthetic(k));
                }
                let lo2 = lo.clone();
                let hi2 = hi.clone();
                let syn2 = syn.clone();
                lo.extend(lo2);
                hi.extend(hi2);
                syn.extend(syn2);
                AxisBox::from_parts(lo, hi, syn)
            }
            DesignFamily::Ball { center } => {
                let mut sides = Vec::with_capacity(2 * center.len());
                for k in 0..center.len() {
                    sides.push((center[k] - ubox.lo()[k], ubox.is_synthetic(k)));
                    sides.push((ubox.hi()[k] - center[k], ubox.is_synthetic(k)));
                }
                if sides.iter().any(|s| s.0 < 0.0) {
                    return Err(Error::Domain(
                        "ball center lies outside the uncertainty box".into(),
                    ));
                }
                let rho_max = sides.iter().map(|s| s.0).fold(f64::INFINITY, f64::min);
                let tol = 1e-9 * rho_max.max(1.0);
                let binding_synthetic =
                    sides.iter().filter(|s| s.0 <= rho_max + tol).all(|s| s.1);
                AxisBox::from_parts(vec![0.0], vec![rho_max], vec![binding_synthetic])
            }
            DesignFamily::ScaledSet { anchor, shape } => {
                let mut alpha_max = SCALE_CAP;
                let mut binding_synthetic = true;
                for z in &shape.vertices {
                    for k in 0..anchor.len() {
                        let (limit, is_syn) = if z[k] > 0.0 {
                            ((ubox.hi()[k] - anchor[k]) / z[k], ubox.is_synthetic(k))
                        } else if z[k] < 0.0 {
                            ((ubox.lo()[k] - anchor[k]) / z[k], ubox.is_synthetic(k))
                        } else {
                            continue;
                        };
                        if limit < 0.0 {
                            return Err(Error::Domain(
                                "anchor lies outside the uncertainty box".into(),
                            ));
                        }
                        if limit < alpha_max {
                            alpha_max = limit;
                            binding_synthetic = is_syn;
                        }
                    }
                }
                AxisBox::from_parts(vec![0.0], vec![alpha_max], vec![binding_synthetic])
            }
        }
    }

    /// Feasible range of one design coordinate with the others held fixed
    /// (keeps lo <= hi pairs consistent for interval/box).
    pub fn axis_interval(&self, d: &DesignPoint, axis: usize, dbox: &AxisBox) -> (f64, f64) {
        match self {
            DesignFamily::Interval1d => {
                if axis == 0 {
                    (dbox.lo()[0], d.0[1])
                } else {
                    (d.0[0], dbox.hi()[1])
                }
            }
            DesignFamily::Box { dim } => {
                if axis < *dim {
                    (dbox.lo()[axis], d.0[dim + axis])
                } else {
                    (d.0[axis - dim], dbox.hi()[axis])
                }
            }
            DesignFamily::Ball { .. } | DesignFamily::ScaledSet { .. } => {
                (dbox.lo()[0], dbox.hi()[0])
            }
        }
    }

    /// +1 if growing this coordinate grows the set, -1 if shrinking it does.
    pub fn expand_direction(&self, axis: usize) -> f64 {
        match self {
            DesignFamily::Interval1d => {
                if axis == 0 {
                    -1.0
                } else {
                    1.0
                }
            }
            DesignFamily::Box { dim } => {
                if axis < *dim {
                    -1.0
                } else {
                    1.0
                }
            }
            DesignFamily::Ball { .. } | DesignFamily::ScaledSet { .. } => 1.0,
        }
    }

    /// Smallest design point whose set covers every nominal scenario; the
    /// anchored start of the solver's design expansion.
    pub fn seed_point(&self, nominal: &[Vec<f64>], ubox: &AxisBox) -> Result<DesignPoint> {
        if nominal.is_empty() {
            return Err(Error::Usage("seed needs at least one nominal scenario".into()));
        }
        match self {
            DesignFamily::Interval1d => {
                let lo = nominal.iter().map(|s| s[0]).fold(f64::INFINITY, f64::min);
                let hi = nominal.iter().map(|s| s[0]).fold(f64::NEG_INFINITY, f64::max);
                Ok(DesignPoint(vec![lo, hi]))
            }
            DesignFamily::Box { dim } => {
                let mut v = Vec::with_capacity(2 * dim);
                for k in 0..*dim {
                    v.push(nominal.iter().map(|s| s[k]).fold(f64::INFINITY, f64::min));
                }
                for k in 0..*dim {
                    v.push(nominal.iter().map(|s| s[k]).fold(f64::NEG_INFINITY, f64::max));
                }
                Ok(DesignPoint(v))
            }
            DesignFamily::Ball { center } => {
                let mut rho: f64 = 0.0;
                for s in nominal {
                    let diff: Vec<f64> = s.iter().zip(center).map(|(a, b)| a - b).collect();
                    rho = rho.max(norm(&diff));
                }
                Ok(DesignPoint(vec![rho]))
            }
            DesignFamily::ScaledSet { .. } => {
                let dbox = self.design_box(ubox)?;
                let mut alpha: f64 = 0.0;
                for s in nominal {
                    alpha = alpha.max(self.covering_scale(s, dbox.hi()[0])?);
                }
                Ok(DesignPoint(vec![alpha]))
            }
        }
    }

    /// Minimal alpha with u in anchor + alpha*Z, by bisection on membership.
    fn covering_scale(&self, u: &[f64], alpha_cap: f64) -> Result<f64> {
        let feasible = |alpha: f64| self.membership_violation(&DesignPoint(vec![alpha]), u) <= 1e-14;
        if feasible(0.0) {
            return Ok(0.0);
        }
        if !feasible(alpha_cap) {
            return Err(Error::Domain(format!(
                "scenario {u:?} cannot be covered by any feasible scale"
            )));
        }
        let (mut lo, mut hi) = (0.0, alpha_cap);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if feasible(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo <= 1e-14 * hi.max(1.0) {
                break;
            }
        }
        Ok(hi)
    }
}

/// Maximizes phi over W(d) ∩ ubox. Convex/monotone flags evaluate extreme
/// points exactly where the family admits them; the general flag runs a
/// deterministic grid plus golden-section refinement. Returns the value and
/// an attaining scenario.
pub fn inner_max(
    fam: &DesignFamily,
    d: &DesignPoint,
    phi: &dyn Fn(&[f64]) -> f64,
    flag: Curvature,
    ubox: &AxisBox,
) -> Result<(f64, Vec<f64>)> {
    inner_max_result(fam, d, &|u| Ok(phi(u)), flag, ubox)
}

/// [`inner_max`] for fallible functions; evaluation errors propagate.
pub fn inner_max_result(
    fam: &DesignFamily,
    d: &DesignPoint,
    phi: &dyn Fn(&[f64]) -> Result<f64>,
    flag: Curvature,
    ubox: &AxisBox,
) -> Result<(f64, Vec<f64>)> {
    inner_max_impl(fam, d, phi, flag, ubox, GRID_N)
}

/// Audit-grade maximizer: ignores curvature flags and runs the general path
/// at a caller-chosen grid density, as an independent cross-check.
pub fn inner_max_audit(
    fam: &DesignFamily,
    d: &DesignPoint,
    phi: &dyn Fn(&[f64]) -> Result<f64>,
    ubox: &AxisBox,
    grid_n: usize,
) -> Result<(f64, Vec<f64>)> {
    inner_max_impl(fam, d, phi, Curvature::General, ubox, grid_n.max(2))
}

fn inner_max_impl(
    fam: &DesignFamily,
    d: &DesignPoint,
    phi: &dyn Fn(&[f64]) -> Result<f64>,
    flag: Curvature,
    ubox: &AxisBox,
    grid_n: usize,
) -> Result<(f64, Vec<f64>)> {
    fam.validate_point(d)?;
    if ubox.dim() != fam.scenario_dim() {
        return Err(Error::Usage(format!(
            "uncertainty box has dimension {}, family expects {}",
            ubox.dim(),
            fam.scenario_dim()
        )));
    }
    match fam {
        DesignFamily::Interval1d => {
            let lo = d.0[0].max(ubox.lo()[0]);
            let hi = d.0[1].min(ubox.hi()[0]);
            if lo > hi {
                return Err(Error::Domain("coverage interval misses the uncertainty box".into()));
            }
            max_over_box(&[lo], &[hi], phi, flag, grid_n)
        }
        DesignFamily::Box { dim } => {
            let mut lo = Vec::with_capacity(*dim);
            let mut hi = Vec::with_capacity(*dim);
            for k in 0..*dim {
                let l = d.0[k].max(ubox.lo()[k]);
                let h = d.0[dim + k].min(ubox.hi()[k]);
                if l > h {
                    return Err(Error::Domain(format!(
                        "coverage box axis {k} misses the uncertainty box"
                    )));
                }
                lo.push(l);
                hi.push(h);
            }
            max_over_box(&lo, &hi, phi, flag, grid_n)
        }
        DesignFamily::Ball { center } => {
            if !ubox.contains(center) {
                return Err(Error::Domain("ball center lies outside the uncertainty box".into()));
            }
            if center.len() == 1 {
                let lo = (center[0] - d.0[0]).max(ubox.lo()[0]);
                let hi = (center[0] + d.0[0]).min(ubox.hi()[0]);
                return max_over_box(&[lo], &[hi], phi, flag, grid_n);
            }
            max_over_ball(center, d.0[0], phi, flag, ubox, grid_n)
        }
        DesignFamily::ScaledSet { anchor, shape } => {
            max_over_scaled(fam, anchor, shape, d, phi, flag, ubox, grid_n)
        }
    }
}

fn max_over_box(
    lo: &[f64],
    hi: &[f64],
    phi: &dyn Fn(&[f64]) -> Result<f64>,
    flag: Curvature,
    grid_n: usize,
) -> Result<(f64, Vec<f64>)> {
    let m = lo.len();
    match flag {
        Curvature::ConvexInU | Curvature::MonotoneInU => {
            // exact: the maximum sits at a corner
            let mut best = f64::NEG_INFINITY;
            let mut witness = lo.to_vec();
            for mask in 0..(1usize << m) {
                let corner: Vec<f64> = (0..m)
                    .map(|k| if mask & (1 << k) != 0 { hi[k] } else { lo[k] })
                    .collect();
                let v = phi(&corner)?;
                if v > best {
                    best = v;
                    witness = corner;
                }
            }
            Ok((best, witness))
        }
        Curvature::General => {
            if m > 3 {
                return Err(Error::Unsupported(
                    "general-flag inner maximization supports up to 3 scenario dimensions".into(),
                ));
            }
            let axes: Vec<Vec<f64>> = (0..m)
                .map(|k| {
                    if hi[k] - lo[k] <= 0.0 {
                        vec![lo[k]]
                    } else {
                        (0..grid_n)
                            .map(|i| lo[k] + (hi[k] - lo[k]) * i as f64 / (grid_n - 1) as f64)
                            .collect()
                    }
                })
                .collect();
            let mut best = f64::NEG_INFINITY;
            let mut witness = lo.to_vec();
            let mut idx = vec![0usize; m];
            loop {
                let point: Vec<f64> = (0..m).map(|k| axes[k][idx[k]]).collect();
                let v = phi(&point)?;
                if v > best {
                    best = v;
                    witness = point;
                }
                let mut k = 0;
                loop {
                    if k == m {
                        break;
                    }
                    idx[k] += 1;
                    if idx[k] < axes[k].len() {
                        break;
                    }
                    idx[k] = 0;
                    k += 1;
                }
                if k == m {
                    break;
                }
            }
            // refine around the best cell, one golden-section pass per axis,
            // swept until the point stops moving
            let cell: Vec<f64> = (0..m)
                .map(|k| {
                    if axes[k].len() > 1 {
                        (hi[k] - lo[k]) / (grid_n - 1) as f64
                    } else {
                        0.0
                    }
                })
                .collect();
            let mut point = witness.clone();
            for _ in 0..6 {
                let mut moved: f64 = 0.0;
                for k in 0..m {
                    if cell[k] == 0.0 {
                        continue;
                    }
                    let a = (point[k] - cell[k]).max(lo[k]);
                    let b = (point[k] + cell[k]).min(hi[k]);
                    let mut line = |t: f64| -> Result<f64> {
                        let mut p = point.clone();
                        p[k] = t;
                        phi(&p)
                    };
                    let (v, t) = golden_max(a, b, &mut line, REFINE_TOL)?;
                    if v > best {
                        best = v;
                        moved = moved.max((t - point[k]).abs());
                        point[k] = t;
                        witness = point.clone();
                    }
                }
                if moved <= REFINE_TOL {
                    break;
                }
            }
            Ok((best, witness))
        }
    }
}

fn golden_max(
    mut a: f64,
    mut b: f64,
    g: &mut dyn FnMut(f64) -> Result<f64>,
    tol: f64,
) -> Result<(f64, f64)> {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    if b <= a {
        return Ok((g(a)?, a));
    }
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut gc = g(c)?;
    let mut gd = g(d)?;
    while b - a > tol {
        if gc >= gd {
            b = d;
            d = c;
            gd = gc;
            c = b - INV_PHI * (b - a);
            gc = g(c)?;
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + INV_PHI * (b - a);
            gd = g(d)?;
        }
    }
    let mid = 0.5 * (a + b);
    let gm = g(mid)?;
    if gc >= gd && gc >= gm {
        Ok((gc, c))
    } else if gd >= gm {
        Ok((gd, d))
    } else {
        Ok((gm, mid))
    }
}

/// Ball maximizer for scenario dimension 2 or 3: a deterministic grid on the
/// sphere parametrization (points clamped into the box, which stays inside
/// the ball because the center is in the box), golden refinement in the
/// angles, and, for the general flag, an interior check at the center.
fn max_over_ball(
    center: &[f64],
    rho: f64,
    phi: &dyn Fn(&[f64]) -> Result<f64>,
    flag: Curvature,
    ubox: &AxisBox,
    grid_n: usize,
) -> Result<(f64, Vec<f64>)> {
    let m = center.len();
    if m > 3 {
        return Err(Error::Unsupported(
            "ball inner maximization supports up to 3 scenario dimensions".into(),
        ));
    }
    // stay fractionally inside the sphere so witnesses pass membership
    let r = rho * (1.0 - 1e-13);
    let point_at = |angles: &[f64]| -> Vec<f64> {
        let dir: Vec<f64> = match m {
            2 => vec![angles[0].cos(), angles[0].sin()],
            _ => vec![
                angles[0].sin() * angles[1].cos(),
                angles[0].sin() * angles[1].sin(),
                angles[0].cos(),
            ],
        };
        let u: Vec<f64> = center.iter().zip(&dir).map(|(c, s)| c + r * s).collect();
        ubox.clamped(&u)
    };
    let n_angles = if m == 2 { 1 } else { 2 };
    let spans: Vec<(f64, f64)> = if m == 2 {
        vec![(0.0, 2.0 * std::f64::consts::PI)]
    } else {
        vec![(0.0, std::f64::consts::PI), (0.0, 2.0 * std::f64::consts::PI)]
    };
    let mut best = f64::NEG_INFINITY;
    let mut best_angles = vec![0.0; n_angles];
    let mut idx = vec![0usize; n_angles];
    loop {
        let angles: Vec<f64> = (0..n_angles)
            .map(|k| spans[k].0 + (spans[k].1 - spans[k].0) * idx[k] as f64 / grid_n as f64)
            .collect();
        let v = phi(&point_at(&angles))?;
        if v > best {
            best = v;
            best_angles = angles;
        }
        let mut k = 0;
        loop {
            if k == n_angles {
                break;
            }
            idx[k] += 1;
            if idx[k] < grid_n {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
        if k == n_angles {
            break;
        }
    }
    let angle_tol = REFINE_TOL / rho.max(1e-30);
    let mut angles = best_angles.clone();
    for _ in 0..6 {
        let mut moved: f64 = 0.0;
        for k in 0..n_angles {
            let cell = (spans[k].1 - spans[k].0) / grid_n as f64;
            let a = angles[k] - cell;
            let b = angles[k] + cell;
            let mut line = |t: f64| -> Result<f64> {
                let mut ang = angles.clone();
                ang[k] = t;
                phi(&point_at(&ang))
            };
            let (v, t) = golden_max(a, b, &mut line, angle_tol)?;
            if v > best {
                best = v;
                moved = moved.max((t - angles[k]).abs());
                angles[k] = t;
            }
        }
        if moved <= angle_tol {
            break;
        }
    }
    let mut witness = point_at(&angles);
    if flag == Curvature::General {
        let c = ubox.clamped(center);
        let v = phi(&c)?;
        if v > best {
            best = v;
            witness = c;
        }
    }
    Ok((best, witness))
}

/// Scaled-set maximizer. Convex/monotone evaluate the mapped polytope
/// vertices exactly when they all lie in the box, otherwise fall back to the
/// general path: a grid over the shape's bounding box filtered by membership,
/// then per-axis golden refinement inside the feasible segment (the set is
/// convex, so each axis section is an interval).
fn max_over_scaled(
    fam: &DesignFamily,
    anchor: &[f64],
    shape: &Polytope,
    d: &DesignPoint,
    phi: &dyn Fn(&[f64]) -> Result<f64>,
    flag: Curvature,
    ubox: &AxisBox,
    grid_n: usize,
) -> Result<(f64, Vec<f64>)> {
    let m = anchor.len();
    let alpha = d.0[0];
    if shape.is_point() || alpha == 0.0 {
        let z0 = if shape.is_point() { shape.vertices[0].clone() } else { vec![0.0; m] };
        let u: Vec<f64> = anchor.iter().zip(&z0).map(|(a, z)| a + alpha * z).collect();
        if !ubox.contains(&u) {
            return Err(Error::Domain("scaled point lies outside the uncertainty box".into()));
        }
        let v = phi(&u)?;
        return Ok((v, u));
    }
    if m == 1 {
        let z_lo = shape.vertices.iter().map(|z| z[0]).fold(f64::INFINITY, f64::min);
        let z_hi = shape.vertices.iter().map(|z| z[0]).fold(f64::NEG_INFINITY, f64::max);
        let lo = (anchor[0] + alpha * z_lo).max(ubox.lo()[0]);
        let hi = (anchor[0] + alpha * z_hi).min(ubox.hi()[0]);
        if lo > hi {
            return Err(Error::Domain("scaled interval misses the uncertainty box".into()));
        }
        return max_over_box(&[lo], &[hi], phi, flag, grid_n);
    }
    if matches!(flag, Curvature::ConvexInU | Curvature::MonotoneInU) {
        let mapped: Vec<Vec<f64>> = shape
            .vertices
            .iter()
            .map(|z| anchor.iter().zip(z).map(|(a, zk)| a + alpha * zk).collect())
            .collect();
        if mapped.iter().all(|u| ubox.contains(u)) {
            let mut best = f64::NEG_INFINITY;
            let mut witness = mapped[0].clone();
            for u in mapped {
                let v = phi(&u)?;
                if v > best {
                    best = v;
                    witness = u;
                }
            }
            return Ok((best, witness));
        }
        // vertices poke out of the box; exact vertex evaluation no longer
        // covers the clipped set
    }
    let mut lo = vec![f64::INFINITY; m];
    let mut hi = vec![f64::NEG_INFINITY; m];
    for z in &shape.vertices {
        for k in 0..m {
            let c = anchor[k] + alpha * z[k];
            lo[k] = lo[k].min(c);
            hi[k] = hi[k].max(c);
        }
    }
    for k in 0..m {
        lo[k] = lo[k].max(ubox.lo()[k]);
        hi[k] = hi[k].min(ubox.hi()[k]);
        if lo[k] > hi[k] {
            return Err(Error::Domain("scaled set misses the uncertainty box".into()));
        }
    }
    let slack = 1e-12 * alpha.max(1.0);
    let inside = |u: &[f64]| fam.membership_violation(d, u) <= slack && ubox.contains(u);
    let mut best = f64::NEG_INFINITY;
    let mut witness: Option<Vec<f64>> = None;
    let mut seeds: Vec<Vec<f64>> = Vec::new();
    for z in &shape.vertices {
        seeds.push(anchor.iter().zip(z).map(|(a, zk)| a + alpha * zk).collect());
    }
    seeds.push(anchor.to_vec());
    let mut idx = vec![0usize; m];
    loop {
        let point: Vec<f64> = (0..m)
            .map(|k| lo[k] + (hi[k] - lo[k]) * idx[k] as f64 / (grid_n - 1) as f64)
            .collect();
        seeds.push(point);
        let mut k = 0;
        loop {
            if k == m {
                break;
            }
            idx[k] += 1;
            if idx[k] < grid_n {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
        if k == m {
            break;
        }
    }
    for u in &seeds {
        if !inside(u) {
            continue;
        }
        let v = phi(u)?;
        if v > best {
            best = v;
            witness = Some(u.clone());
        }
    }
    let mut point = match witness {
        Some(w) => w,
        None => return Err(Error::Domain("scaled set misses the uncertainty box".into())),
    };
    for _ in 0..6 {
        let mut moved: f64 = 0.0;
        for k in 0..m {
            let (t_lo, t_hi) = feasible_segment(&point, k, &inside, lo[k], hi[k]);
            let cell = (hi[k] - lo[k]) / (grid_n - 1) as f64;
            let a = (point[k] - cell).max(t_lo);
            let b = (point[k] + cell).min(t_hi);
            if b <= a {
                continue;
            }
            let mut line = |t: f64| -> Result<f64> {
                let mut p = point.clone();
                p[k] = t;
                phi(&p)
            };
            let (v, t) = golden_max(a, b, &mut line, REFINE_TOL)?;
            if v > best {
                best = v;
                moved = moved.max((t - point[k]).abs());
                point[k] = t;
            }
        }
        if moved <= REFINE_TOL {
            break;
        }
    }
    Ok((best, point))
}

/// Feasible parameter range of `point + t*e_axis` inside a convex set, found
/// by bisection from the known-feasible t = 0.
fn feasible_segment(
    point: &[f64],
    axis: usize,
    inside: &dyn Fn(&[f64]) -> bool,
    lo: f64,
    hi: f64,
) -> (f64, f64) {
    let probe = |t: f64| {
        let mut p = point.to_vec();
        p[axis] = t;
        inside(&p)
    };
    let t0 = point[axis];
    let mut t_hi = t0;
    if probe(hi) {
        t_hi = hi;
    } else {
        let (mut a, mut b) = (t0, hi);
        for _ in 0..60 {
            let mid = 0.5 * (a + b);
            if probe(mid) {
                a = mid;
            } else {
                b = mid;
            }
        }
        t_hi = t_hi.max(a);
    }
    let mut t_lo = t0;
    if probe(lo) {
        t_lo = lo;
    } else {
        let (mut a, mut b) = (lo, t0);
        for _ in 0..60 {
            let mid = 0.5 * (a + b);
            if probe(mid) {
                b = mid;
            } else {
                a = mid;
            }
        }
        t_lo = t_lo.min(b);
    }
    (t_lo, t_hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ubox1(lo: f64, hi: f64) -> AxisBox {
        AxisBox::from_pairs(&[(lo, hi)]).unwrap()
    }

    #[test]
    fn interval_membership() {
        let fam = DesignFamily::interval1d();
        assert!(fam.contains(&DesignPoint(vec![0.0, 0.0]), &[0.0]).unwrap());
        assert!(!fam.contains(&DesignPoint(vec![-0.5, 0.25]), &[0.3]).unwrap());
        assert!(fam.contains(&DesignPoint(vec![-0.5, 0.25]), &[0.25]).unwrap());
        assert!(fam.validate_point(&DesignPoint(vec![1.0, 0.0])).is_err());
    }

    #[test]
    fn ball_membership_boundary() {
        let fam = DesignFamily::ball(vec![0.0, 0.0]).unwrap();
        let d = DesignPoint(vec![1.0]);
        assert!(fam.contains(&d, &[0.6, 0.8]).unwrap());
        assert!(fam.contains(&d, &[0.0, 0.0]).unwrap());
        assert!(!fam.contains(&d, &[0.8, 0.8]).unwrap());
        assert!(fam.validate_point(&DesignPoint(vec![-0.1])).is_err());
    }

    #[test]
    fn linear_inner_max_hits_endpoints_exactly() {
        let fam = DesignFamily::interval1d();
        let d = DesignPoint(vec![-1.0, 0.5]);
        let ub = ubox1(-12.0, 12.0);
        let x = 2.0;
        let (v, w) =
            inner_max(&fam, &d, &|u| -x + u[0], Curvature::MonotoneInU, &ub).unwrap();
        assert_eq!(v, -1.5);
        assert_eq!(w, vec![0.5]);
        let (v, w) = inner_max(&fam, &d, &|u| 2.0 * x - u[0], Curvature::MonotoneInU, &ub).unwrap();
        assert_eq!(v, 5.0);
        assert_eq!(w, vec![-1.0]);
        let (_, w) = inner_max(
            &fam,
            &d,
            &|u| x * (u[0] - 1.0) + u[0].exp() - 1.0,
            Curvature::ConvexInU,
            &ub,
        )
        .unwrap();
        assert_eq!(w, vec![0.5]);
    }

    #[test]
    fn general_grid_finds_interior_peak() {
        let fam = DesignFamily::interval1d();
        let d = DesignPoint(vec![-1.0, 1.0]);
        let ub = ubox1(-12.0, 12.0);
        for c in [-0.7311, -0.25, 0.0, 0.3121, 0.9] {
            let (v, w) =
                inner_max(&fam, &d, &|u| -(u[0] - c) * (u[0] - c), Curvature::General, &ub)
                    .unwrap();
            assert!(v > -1e-8, "c={c}, v={v}");
            assert!((w[0] - c).abs() < 1e-5, "c={c}, w={}", w[0]);
        }
    }

    #[test]
    fn clip_examples() {
        let fam = DesignFamily::interval1d();
        let ub = ubox1(-12.0, 12.0);
        let (c, t) = fam.clip_to_box(&DesignPoint(vec![-20.0, 0.5]), &ub).unwrap();
        assert_eq!(c.0, vec![-12.0, 0.5]);
        assert!(!t);
        let (c, _) = fam.clip_to_box(&DesignPoint(vec![-1.0, 0.5]), &ub).unwrap();
        assert_eq!(c.0, vec![-1.0, 0.5]);
        let bf = DesignFamily::box_family(2).unwrap();
        let ub2 = AxisBox::from_pairs(&[(-12.0, 12.0), (-12.0, 12.0)]).unwrap();
        let (c, _) = bf
            .clip_to_box(&DesignPoint(vec![-20.0, 0.0, 1.0, 2.0]), &ub2)
            .unwrap();
        assert_eq!(c.0, vec![-12.0, 0.0, 1.0, 2.0]);
    }

    #[test]
    fn empty_intersection_is_a_domain_error() {
        let fam = DesignFamily::interval1d();
        let ub = ubox1(0.0, 1.0);
        let out = inner_max(&fam, &DesignPoint(vec![5.0, 6.0]), &|u| u[0], Curvature::General, &ub);
        assert!(matches!(out, Err(Error::Domain(_))));
    }

    #[test]
    fn ball_linear_max_points_along_gradient() {
        let fam = DesignFamily::ball(vec![0.0, 0.0]).unwrap();
        let d = DesignPoint(vec![2.0]);
        let ub = AxisBox::from_pairs(&[(-12.0, 12.0), (-12.0, 12.0)]).unwrap();
        let (v, w) =
            inner_max(&fam, &d, &|u| 3.0 * u[0] + 4.0 * u[1], Curvature::ConvexInU, &ub).unwrap();
        // max of 3u0+4u1 over the radius-2 ball is 2*5
        assert!((v - 10.0).abs() < 1e-7, "v={v}");
        assert!((w[0] - 1.2).abs() < 1e-4);
        assert!((w[1] - 1.6).abs() < 1e-4);
        assert!(fam.contains(&d, &w).unwrap());
    }

    #[test]
    fn ball_3d_general_checks_center() {
        let fam = DesignFamily::ball(vec![0.5, 0.0, 0.0]).unwrap();
        let d = DesignPoint(vec![1.0]);
        let ub =
            AxisBox::from_pairs(&[(-12.0, 12.0), (-12.0, 12.0), (-12.0, 12.0)]).unwrap();
        // peak at the center, nowhere on the boundary
        let (v, w) = inner_max(
            &fam,
            &d,
            &|u| -((u[0] - 0.5) * (u[0] - 0.5) + u[1] * u[1] + u[2] * u[2]),
            Curvature::General,
            &ub,
        )
        .unwrap();
        assert_eq!(v, 0.0);
        assert_eq!(w, vec![0.5, 0.0, 0.0]);
    }

    #[test]
    fn scaled_square_vertex_max_is_exact() {
        let square = vec![
            vec![-1.0, -1.0],
            vec![1.0, -1.0],
            vec![1.0, 1.0],
            vec![-1.0, 1.0],
        ];
        let fam = DesignFamily::scaled_set(vec![0.0, 0.0], &square).unwrap();
        let d = DesignPoint(vec![2.0]);
        let ub = AxisBox::from_pairs(&[(-12.0, 12.0), (-12.0, 12.0)]).unwrap();
        let (v, w) = inner_max(&fam, &d, &|u| u[0] + u[1], Curvature::ConvexInU, &ub).unwrap();
        assert_eq!(v, 4.0);
        assert_eq!(w, vec![2.0, 2.0]);
        let (v, _) = inner_max(
            &fam,
            &d,
            &|u| -(u[0] - 0.3) * (u[0] - 0.3) - u[1] * u[1],
            Curvature::General,
            &ub,
        )
        .unwrap();
        assert!(v > -1e-8);
    }

    #[test]
    fn point_shape_behaves_as_a_point() {
        let fam = DesignFamily::scaled_set(vec![1.0], &[vec![0.0]]).unwrap();
        let d = DesignPoint(vec![7.0]);
        assert!(fam.contains(&d, &[1.0]).unwrap());
        assert!(!fam.contains(&d, &[1.5]).unwrap());
        let ub = ubox1(-12.0, 12.0);
        let (v, w) = inner_max(&fam, &d, &|u| u[0] * u[0], Curvature::General, &ub).unwrap();
        assert_eq!(v, 1.0);
        assert_eq!(w, vec![1.0]);
    }

    #[test]
    fn reference_round_trip() {
        let fam = DesignFamily::interval1d();
        let d = DesignPoint(vec![-2.0, 3.0]);
        let u = fam.to_scenario(&d, &[0.25]);
        assert!((u[0] + 0.75).abs() < 1e-12);
        let w = fam.to_reference(&d, &u);
        assert!((w[0] - 0.25).abs() < 1e-12);

        let ball = DesignFamily::ball(vec![1.0, -1.0]).unwrap();
        let db = DesignPoint(vec![2.0]);
        let u = ball.to_scenario(&db, &[0.6, 0.8]);
        let w = ball.to_reference(&db, &u);
        assert!((w[0] - 0.6).abs() < 1e-12 && (w[1] - 0.8).abs() < 1e-12);

        // degenerate interval maps everything to w = 0
        let dd = DesignPoint(vec![1.0, 1.0]);
        assert_eq!(fam.to_reference(&dd, &[1.0]), vec![0.0]);
        assert_eq!(fam.to_scenario(&dd, &[0.0]), vec![1.0]);
    }

    #[test]
    fn design_box_and_seeds() {
        let fam = DesignFamily::interval1d();
        let ub = ubox1(-12.0, 1.0);
        let db = fam.design_box(&ub).unwrap();
        assert_eq!(db.lo(), &[-12.0, -12.0]);
        assert_eq!(db.hi(), &[1.0, 1.0]);
        let seed = fam.seed_point(&[vec![0.0], vec![-0.5]], &ub).unwrap();
        assert_eq!(seed.0, vec![-0.5, 0.0]);

        let ball = DesignFamily::ball(vec![0.0, 0.0]).unwrap();
        let ub2 = AxisBox::from_pairs(&[(-2.0, 5.0), (-3.0, 4.0)]).unwrap();
        let db = ball.design_box(&ub2).unwrap();
        assert_eq!(db.lo(), &[0.0]);
        assert_eq!(db.hi(), &[2.0]);
        let seed = ball.seed_point(&[vec![0.6, 0.8], vec![0.0, 0.0]], &ub2).unwrap();
        assert!((seed.0[0] - 1.0).abs() < 1e-12);

        let square = vec![
            vec![-1.0, -1.0],
            vec![1.0, -1.0],
            vec![1.0, 1.0],
            vec![-1.0, 1.0],
        ];
        let sc = DesignFamily::scaled_set(vec![0.0, 0.0], &square).unwrap();
        let db = sc.design_box(&ub2).unwrap();
        assert_eq!(db.hi(), &[2.0]);
        let seed = sc.seed_point(&[vec![0.5, -0.25]], &ub2).unwrap();
        assert!((seed.0[0] - 0.5).abs() < 1e-9, "seed {}", seed.0[0]);
    }

    #[test]
    fn expansion_monotone_nesting() {
        let fam = DesignFamily::interval1d();
        let ub = ubox1(-12.0, 12.0);
        let phis: Vec<Box<dyn Fn(&[f64]) -> f64>> = vec![
            Box::new(|u: &[f64]| u[0].sin() + 0.3 * u[0]),
            Box::new(|u: &[f64]| -(u[0] - 0.2) * (u[0] - 0.2)),
            Box::new(|u: &[f64]| u[0].exp()),
        ];
        for phi in &phis {
            let (small, _) =
                inner_max(&fam, &DesignPoint(vec![-0.5, 0.5]), phi.as_ref(), Curvature::General, &ub)
                    .unwrap();
            let (large, _) =
                inner_max(&fam, &DesignPoint(vec![-1.0, 2.0]), phi.as_ref(), Curvature::General, &ub)
                    .unwrap();
            assert!(large >= small - 1e-12);
        }
    }

    #[test]
    fn witnesses_satisfy_membership() {
        let ub2 = AxisBox::from_pairs(&[(-12.0, 12.0), (-12.0, 12.0)]).unwrap();
        let ball = DesignFamily::ball(vec![0.3, -0.4]).unwrap();
        let d = DesignPoint(vec![1.7]);
        for flag in [Curvature::ConvexInU, Curvature::General] {
            let (_, w) =
                inner_max(&ball, &d, &|u| u[0] - 2.0 * u[1] + (u[0] * u[1]).cos(), flag, &ub2)
                    .unwrap();
            assert!(ball.contains(&d, &w).unwrap(), "flag {flag:?}, witness {w:?}");
        }
    }

    #[test]
    fn shape_must_contain_origin() {
        // whole square offset from the origin: scaling is not monotone
        let shifted = vec![
            vec![1.0, 1.0],
            vec![2.0, 1.0],
            vec![2.0, 2.0],
            vec![1.0, 2.0],
        ];
        assert!(matches!(
            DesignFamily::scaled_set(vec![0.0, 0.0], &shifted),
            Err(Error::Unsupported(_))
        ));
        assert!(DesignFamily::scaled_set(vec![3.0], &[vec![1.5]]).is_err());
        assert!(DesignFamily::scaled_set(vec![3.0], &[vec![0.0]]).is_ok());
    }

    #[test]
    fn audit_agrees_with_exact_route() {
        let fam = DesignFamily::interval1d();
        let d = DesignPoint(vec![-1.0, 0.5]);
        let ub = ubox1(-12.0, 12.0);
        let phi = |u: &[f64]| Ok(3.0 * u[0] - 1.0);
        let (exact, _) =
            inner_max_result(&fam, &d, &phi, Curvature::MonotoneInU, &ub).unwrap();
        let (audit, w) = inner_max_audit(&fam, &d, &phi, &ub, 256).unwrap();
        assert!((audit - exact).abs() <= 1e-8, "audit {audit} vs exact {exact}");
        assert!(fam.contains(&d, &w).unwrap());
    }
}
