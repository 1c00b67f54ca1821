//! Axis-aligned boxes, vertex polytopes, and quadrature nodes.
//!
//! The polytope type backs the scaled-set design family: vertices in, then a
//! halfspace representation, a simplex decomposition, and the volume are
//! precomputed once (dimensions 1 to 3).

use crate::error::{Error, Result};

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Axis-aligned box with finite bounds. Axes whose input bounds were
/// unbounded get synthetic bounds at `center ± margin * scale` and are
/// remembered as such so searches that run into them can be flagged
/// as truncated.
#[derive(Debug, Clone, PartialEq)]
pub struct AxisBox {
    lo: Vec<f64>,
    hi: Vec<f64>,
    synthetic: Vec<bool>,
}

impl AxisBox {
    pub fn from_finite(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() || lo.is_empty() {
            return Err(Error::Usage("box bounds must be nonempty and same length".into()));
        }
        for k in 0..lo.len() {
            if !lo[k].is_finite() || !hi[k].is_finite() || lo[k] > hi[k] {
                return Err(Error::Usage(format!(
                    "box axis {k} has invalid bounds [{}, {}]",
                    lo[k], hi[k]
                )));
            }
        }
        let n = lo.len();
        Ok(AxisBox { lo, hi, synthetic: vec![false; n] })
    }

    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<Self> {
        Self::from_finite(pairs.iter().map(|p| p.0).collect(), pairs.iter().map(|p| p.1).collect())
    }

    /// Finite bounds with explicit synthetic flags.
    pub fn from_parts(lo: Vec<f64>, hi: Vec<f64>, synthetic: Vec<bool>) -> Result<Self> {
        let mut b = Self::from_finite(lo, hi)?;
        if synthetic.len() != b.lo.len() {
            return Err(Error::Usage("synthetic flag length mismatch".into()));
        }
        b.synthetic = synthetic;
        Ok(b)
    }

    /// Build from per-axis optional bounds. A missing side is replaced by
    /// `center[k] - margin * scale[k]` (resp. `+`); those axes are marked
    /// synthetic.
    /// Default synthetic margin for unbounded axes, in scale units. Twelve
    /// standard deviations leave a standard normal with mass below 1e-30
    /// outside, so truncation there is invisible at double precision.
    pub const DEFAULT_MARGIN: f64 = 12.0;

    pub fn from_bounds(
        bounds: &[(Option<f64>, Option<f64>)],
        margin: f64,
        center: &[f64],
        scale: &[f64],
    ) -> Result<Self> {
        if bounds.is_empty() {
            return Err(Error::Usage("box needs at least one axis".into()));
        }
        if !(margin.is_finite() && margin > 0.0) {
            return Err(Error::Usage(format!("margin must be positive and finite, got {margin}")));
        }
        if center.len() != bounds.len() || scale.len() != bounds.len() {
            return Err(Error::Usage("margin center/scale length mismatch".into()));
        }
        let mut lo = Vec::with_capacity(bounds.len());
        let mut hi = Vec::with_capacity(bounds.len());
        let mut synthetic = Vec::with_capacity(bounds.len());
        for (k, (l, h)) in bounds.iter().enumerate() {
            let s = match (l, h) {
                (Some(_), Some(_)) => false,
                _ => true,
            };
            let l = l.unwrap_or(center[k] - margin * scale[k]);
            let h = h.unwrap_or(center[k] + margin * scale[k]);
            if !l.is_finite() || !h.is_finite() || l > h {
                return Err(Error::Usage(format!("box axis {k} has invalid bounds [{l}, {h}]")));
            }
            lo.push(l);
            hi.push(h);
            synthetic.push(s);
        }
        Ok(AxisBox { lo, hi, synthetic })
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[f64] {
        &self.lo
    }

    pub fn hi(&self) -> &[f64] {
        &self.hi
    }

    pub fn range(&self, k: usize) -> f64 {
        self.hi[k] - self.lo[k]
    }

    pub fn is_synthetic(&self, k: usize) -> bool {
        self.synthetic[k]
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x.iter()
                .zip(self.lo.iter().zip(&self.hi))
                .all(|(v, (l, h))| *v >= *l && *v <= *h)
    }

    pub fn clamp(&self, x: &mut [f64]) {
        for k in 0..self.dim() {
            x[k] = x[k].clamp(self.lo[k], self.hi[k]);
        }
    }

    pub fn clamped(&self, x: &[f64]) -> Vec<f64> {
        let mut y = x.to_vec();
        self.clamp(&mut y);
        y
    }

    pub fn center(&self) -> Vec<f64> {
        self.lo.iter().zip(&self.hi).map(|(l, h)| 0.5 * (l + h)).collect()
    }
}

/// One face inequality `normal · w <= offset` of a polytope.
#[derive(Debug, Clone)]
pub struct Halfspace {
    pub normal: Vec<f64>,
    pub offset: f64,
}

/// Convex polytope given by vertices, with precomputed halfspaces, a simplex
/// decomposition, and the volume. Dimensions 1..=3. A single repeated vertex
/// is allowed (a point, volume zero, no halfspaces); any other degenerate
/// (lower-dimensional) vertex set is rejected.
#[derive(Debug, Clone)]
pub struct Polytope {
    pub dim: usize,
    pub vertices: Vec<Vec<f64>>,
    pub halfspaces: Vec<Halfspace>,
    /// Simplices as index lists into `points` (dim+1 indices each).
    pub simplices: Vec<Vec<usize>>,
    /// Vertices plus any auxiliary points (interior centroid) the simplices use.
    pub points: Vec<Vec<f64>>,
    pub volume: f64,
}

impl Polytope {
    pub fn from_vertices(dim: usize, raw: &[Vec<f64>]) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::Unsupported(format!(
                "vertex polytopes support dimensions 1..=3, got {dim}"
            )));
        }
        if raw.is_empty() {
            return Err(Error::Usage("polytope needs at least one vertex".into()));
        }
        let mut scale: f64 = 1.0;
        for v in raw {
            if v.len() != dim {
                return Err(Error::Usage("polytope vertex has wrong dimension".into()));
            }
            for c in v {
                if !c.is_finite() {
                    return Err(Error::Usage("polytope vertex has non-finite coordinate".into()));
                }
                scale = scale.max(c.abs());
            }
        }
        let eps = 1e-9 * scale;
        let mut vertices: Vec<Vec<f64>> = Vec::new();
        for v in raw {
            if !vertices.iter().any(|w| close(w, v, eps)) {
                vertices.push(v.clone());
            }
        }
        if vertices.len() == 1 {
            let points = vertices.clone();
            return Ok(Polytope {
                dim,
                vertices,
                halfspaces: Vec::new(),
                simplices: Vec::new(),
                points,
                volume: 0.0,
            });
        }
        match dim {
            1 => Self::build_1d(vertices),
            2 => Self::build_2d(vertices, eps),
            3 => Self::build_3d(vertices, eps),
            _ => unreachable!(),
        }
    }

    fn build_1d(vertices: Vec<Vec<f64>>) -> Result<Self> {
        let lo = vertices.iter().map(|v| v[0]).fold(f64::INFINITY, f64::min);
        let hi = vertices.iter().map(|v| v[0]).fold(f64::NEG_INFINITY, f64::max);
        let points = vec![vec![lo], vec![hi]];
        Ok(Polytope {
            dim: 1,
            vertices: points.clone(),
            halfspaces: vec![
                Halfspace { normal: vec![1.0], offset: hi },
                Halfspace { normal: vec![-1.0], offset: -lo },
            ],
            simplices: vec![vec![0, 1]],
            points,
            volume: hi - lo,
        })
    }

    fn build_2d(vertices: Vec<Vec<f64>>, eps: f64) -> Result<Self> {
        let hull = hull_2d(&vertices, eps);
        if hull.len() < 3 {
            return Err(Error::Unsupported(
                "polytope vertices are collinear; only full-dimensional sets or a single point are supported".into(),
            ));
        }
        let pts: Vec<Vec<f64>> = hull.clone();
        let mut halfspaces = Vec::new();
        let n = pts.len();
        for i in 0..n {
            let a = &pts[i];
            let b = &pts[(i + 1) % n];
            // outward normal for a counterclockwise ring
            let nx = b[1] - a[1];
            let ny = a[0] - b[0];
            let len = (nx * nx + ny * ny).sqrt();
            let normal = vec![nx / len, ny / len];
            let offset = dot(&normal, a);
            halfspaces.push(Halfspace { normal, offset });
        }
        let mut simplices = Vec::new();
        let mut volume = 0.0;
        for i in 1..n - 1 {
            simplices.push(vec![0, i, i + 1]);
            let ax = pts[i][0] - pts[0][0];
            let ay = pts[i][1] - pts[0][1];
            let bx = pts[i + 1][0] - pts[0][0];
            let by = pts[i + 1][1] - pts[0][1];
            volume += 0.5 * (ax * by - ay * bx).abs();
        }
        Ok(Polytope { dim: 2, vertices: pts.clone(), halfspaces, simplices, points: pts, volume })
    }

    fn build_3d(vertices: Vec<Vec<f64>>, eps: f64) -> Result<Self> {
        if vertices.len() > 64 {
            return Err(Error::Unsupported("3-D polytopes support up to 64 vertices".into()));
        }
        let planes = supporting_planes_3d(&vertices, eps)?;
        if planes.is_empty() {
            return Err(Error::Unsupported(
                "polytope vertices are coplanar; only full-dimensional sets or a single point are supported".into(),
            ));
        }
        let centroid: Vec<f64> = (0..3)
            .map(|k| vertices.iter().map(|v| v[k]).sum::<f64>() / vertices.len() as f64)
            .collect();
        let mut points = vertices.clone();
        points.push(centroid.clone());
        let c_idx = points.len() - 1;
        let mut simplices = Vec::new();
        let mut volume = 0.0;
        let mut halfspaces = Vec::new();
        for plane in &planes {
            halfspaces.push(Halfspace { normal: plane.normal.clone(), offset: plane.offset });
            // face polygon: vertices on the plane, ordered around the face centroid
            let ring = order_face_ring(&vertices, &plane.on_face, &plane.normal);
            for i in 1..ring.len() - 1 {
                let tet = vec![ring[0], ring[i], ring[i + 1], c_idx];
                let v = tet_volume(&points[tet[0]], &points[tet[1]], &points[tet[2]], &points[tet[3]]);
                volume += v;
                simplices.push(tet);
            }
        }
        Ok(Polytope { dim: 3, vertices, halfspaces, simplices, points, volume })
    }

    /// Single-point polytope?
    pub fn is_point(&self) -> bool {
        self.vertices.len() == 1
    }

    /// Signed membership residual: max over faces of `normal·w - offset`
    /// (distance-like, <= 0 inside). For a point polytope, the distance to it.
    pub fn membership(&self, w: &[f64]) -> f64 {
        if self.is_point() {
            let d: f64 = w
                .iter()
                .zip(&self.vertices[0])
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            return d;
        }
        self.halfspaces
            .iter()
            .map(|h| dot(&h.normal, w) - h.offset)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

fn close(a: &[f64], b: &[f64], eps: f64) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).abs() <= eps)
}

/// Andrew monotone chain; returns the hull ring counterclockwise.
fn hull_2d(points: &[Vec<f64>], eps: f64) -> Vec<Vec<f64>> {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a[0].partial_cmp(&b[0]).unwrap().then(a[1].partial_cmp(&b[1]).unwrap()));
    let cross =
        |o: &[f64], a: &[f64], b: &[f64]| (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
    let mut lower: Vec<Vec<f64>> = Vec::new();
    for p in &pts {
        while lower.len() >= 2 && cross(&lower[lower.len() - 2], &lower[lower.len() - 1], p) <= eps {
            lower.pop();
        }
        lower.push(p.clone());
    }
    let mut upper: Vec<Vec<f64>> = Vec::new();
    for p in pts.iter().rev() {
        while upper.len() >= 2 && cross(&upper[upper.len() - 2], &upper[upper.len() - 1], p) <= eps {
            upper.pop();
        }
        upper.push(p.clone());
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

struct SupportingPlane {
    normal: Vec<f64>,
    offset: f64,
    on_face: Vec<usize>,
}

/// Enumerate supporting planes of the hull by checking every vertex triple.
/// Quadratic-ish but fine for the small vertex counts allowed.
fn supporting_planes_3d(vertices: &[Vec<f64>], eps: f64) -> Result<Vec<SupportingPlane>> {
    let n = vertices.len();
    let mut planes: Vec<SupportingPlane> = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let a = &vertices[i];
                let b = &vertices[j];
                let c = &vertices[k];
                let u = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
                let v = [c[0] - a[0], c[1] - a[1], c[2] - a[2]];
                let mut nrm = [
                    u[1] * v[2] - u[2] * v[1],
                    u[2] * v[0] - u[0] * v[2],
                    u[0] * v[1] - u[1] * v[0],
                ];
                let len = (nrm[0] * nrm[0] + nrm[1] * nrm[1] + nrm[2] * nrm[2]).sqrt();
                if len < eps * eps {
                    continue;
                }
                for t in &mut nrm {
                    *t /= len;
                }
                let d0 = dot(&nrm, a);
                let side_eps = eps.max(1e-12);
                let mut above = false;
                let mut below = false;
                for p in vertices {
                    let s = dot(&nrm, p) - d0;
                    if s > side_eps {
                        above = true;
                    } else if s < -side_eps {
                        below = true;
                    }
                }
                let sign = if !above {
                    1.0
                } else if !below {
                    -1.0
                } else {
                    continue;
                };
                let normal: Vec<f64> = nrm.iter().map(|t| t * sign).collect();
                let offset = d0 * sign;
                if planes
                    .iter()
                    .any(|p| close(&p.normal, &normal, 1e-7) && (p.offset - offset).abs() <= side_eps.max(1e-7 * offset.abs()))
                {
                    continue;
                }
                let on_face: Vec<usize> = (0..n)
                    .filter(|&l| (dot(&normal, &vertices[l]) - offset).abs() <= side_eps)
                    .collect();
                planes.push(SupportingPlane { normal, offset, on_face });
            }
        }
    }
    Ok(planes)
}

/// Order the vertex indices of one face counterclockwise around the face
/// centroid, viewed along the outward normal.
fn order_face_ring(vertices: &[Vec<f64>], on_face: &[usize], normal: &[f64]) -> Vec<usize> {
    let m = on_face.len() as f64;
    let centroid: Vec<f64> =
        (0..3).map(|k| on_face.iter().map(|&i| vertices[i][k]).sum::<f64>() / m).collect();
    // build an in-plane orthonormal basis (e1, e2)
    let pick = if normal[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let mut e1 = [
        pick[1] * normal[2] - pick[2] * normal[1],
        pick[2] * normal[0] - pick[0] * normal[2],
        pick[0] * normal[1] - pick[1] * normal[0],
    ];
    let l1 = (e1[0] * e1[0] + e1[1] * e1[1] + e1[2] * e1[2]).sqrt();
    for t in &mut e1 {
        *t /= l1;
    }
    let e2 = [
        normal[1] * e1[2] - normal[2] * e1[1],
        normal[2] * e1[0] - normal[0] * e1[2],
        normal[0] * e1[1] - normal[1] * e1[0],
    ];
    let mut ring: Vec<usize> = on_face.to_vec();
    ring.sort_by(|&a, &b| {
        let pa: Vec<f64> = (0..3).map(|k| vertices[a][k] - centroid[k]).collect();
        let pb: Vec<f64> = (0..3).map(|k| vertices[b][k] - centroid[k]).collect();
        let ta = dot(&pa, &e2).atan2(dot(&pa, &e1));
        let tb = dot(&pb, &e2).atan2(dot(&pb, &e1));
        ta.partial_cmp(&tb).unwrap()
    });
    ring
}

fn tet_volume(a: &[f64], b: &[f64], c: &[f64], d: &[f64]) -> f64 {
    let u = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
    let v = [c[0] - a[0], c[1] - a[1], c[2] - a[2]];
    let w = [d[0] - a[0], d[1] - a[1], d[2] - a[2]];
    let det = u[0] * (v[1] * w[2] - v[2] * w[1]) - u[1] * (v[0] * w[2] - v[2] * w[0])
        + u[2] * (v[0] * w[1] - v[1] * w[0]);
    det.abs() / 6.0
}

/// Gauss-Legendre nodes and weights on [-1, 1], computed by Newton iteration
/// on the Legendre recurrence. Deterministic for a given n.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi initial guess
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// Value and derivative of the Legendre polynomial P_n at x.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let pk = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = pk;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn box_margin_substitution() {
        let b = AxisBox::from_bounds(&[(None, Some(1.0)), (None, None)], 12.0, &[0.0, 1.0], &[1.0, 2.0])
            .unwrap();
        assert_eq!(b.lo(), &[-12.0, -23.0]);
        assert_eq!(b.hi(), &[1.0, 25.0]);
        assert!(b.is_synthetic(0) && b.is_synthetic(1));
        let c = AxisBox::from_finite(vec![0.0], vec![2.0]).unwrap();
        assert!(!c.is_synthetic(0));
    }

    #[test]
    fn box_clamp_and_contains() {
        let b = AxisBox::from_finite(vec![-1.0, 0.0], vec![1.0, 2.0]).unwrap();
        assert!(b.contains(&[0.0, 1.0]));
        assert!(!b.contains(&[1.5, 1.0]));
        assert_eq!(b.clamped(&[3.0, -1.0]), vec![1.0, 0.0]);
    }

    #[test]
    fn interval_polytope() {
        let p = Polytope::from_vertices(1, &[vec![2.0], vec![-1.0], vec![0.5]]).unwrap();
        assert_eq!(p.volume, 3.0);
        assert!(p.membership(&[0.0]) <= 0.0);
        assert!(p.membership(&[2.5]) > 0.0);
    }

    #[test]
    fn square_polytope() {
        let v = vec![vec![-1.0, -1.0], vec![1.0, -1.0], vec![1.0, 1.0], vec![-1.0, 1.0]];
        let p = Polytope::from_vertices(2, &v).unwrap();
        assert!((p.volume - 4.0).abs() < 1e-12);
        assert_eq!(p.halfspaces.len(), 4);
        assert!(p.membership(&[0.9, -0.9]) <= 1e-12);
        assert!(p.membership(&[1.1, 0.0]) > 0.05);
    }

    #[test]
    fn triangle_with_interior_point_dropped() {
        let v = vec![vec![0.0, 0.0], vec![2.0, 0.0], vec![0.0, 2.0], vec![0.5, 0.5]];
        let p = Polytope::from_vertices(2, &v).unwrap();
        assert!((p.volume - 2.0).abs() < 1e-12);
        assert_eq!(p.halfspaces.len(), 3);
    }

    #[test]
    fn cube_polytope() {
        let mut v = Vec::new();
        for &x in &[-1.0, 1.0] {
            for &y in &[-1.0, 1.0] {
                for &z in &[-1.0, 1.0] {
                    v.push(vec![x, y, z]);
                }
            }
        }
        let p = Polytope::from_vertices(3, &v).unwrap();
        assert!((p.volume - 8.0).abs() < 1e-9, "volume {}", p.volume);
        assert_eq!(p.halfspaces.len(), 6);
        assert!(p.membership(&[0.99, 0.0, -0.99]) <= 1e-9);
        assert!(p.membership(&[0.0, 1.2, 0.0]) > 0.1);
    }

    #[test]
    fn tetrahedron_volume() {
        let v = vec![vec![0.0, 0.0, 0.0], vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]];
        let p = Polytope::from_vertices(3, &v).unwrap();
        assert!((p.volume - 1.0 / 6.0).abs() < 1e-12);
        assert_eq!(p.halfspaces.len(), 4);
    }

    #[test]
    fn degenerate_point_allowed_segment_rejected() {
        let p = Polytope::from_vertices(2, &[vec![0.0, 0.0], vec![0.0, 0.0]]).unwrap();
        assert!(p.is_point());
        assert_eq!(p.volume, 0.0);
        assert!(Polytope::from_vertices(2, &[vec![0.0, 0.0], vec![1.0, 1.0]]).is_err());
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(8);
        // exact for degree <= 15: check x^6 over [-1,1] = 2/7
        let s: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(6)).sum();
        assert!((s - 2.0 / 7.0).abs() < 1e-13);
        let total: f64 = w.iter().sum();
        assert!((total - 2.0).abs() < 1e-13);
    }
}
