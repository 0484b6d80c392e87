//! Phase-plane primitives: points, windows, polylines, and the critical geometry
//! of the map (critical lines, critical-value rays, image cone, circle C, square Q).

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{ParamPoint, TAU_GEO};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct PlanePoint {
    pub x: f64,
    pub y: f64,
}

impl PlanePoint {
    pub const ORIGIN: PlanePoint = PlanePoint { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    /// Reflection `R(x, y) = (y, x)`.
    pub fn reflect(self) -> Self {
        Self::new(self.y, self.x)
    }

    pub fn dist(self, other: Self) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn lerp(self, other: Self, t: f64) -> Self {
        Self::new(self.x + t * (other.x - self.x), self.y + t * (other.y - self.y))
    }
}

impl From<[f64; 2]> for PlanePoint {
    fn from([x, y]: [f64; 2]) -> Self {
        Self { x, y }
    }
}

impl From<PlanePoint> for [f64; 2] {
    fn from(p: PlanePoint) -> Self {
        [p.x, p.y]
    }
}

impl From<(f64, f64)> for PlanePoint {
    fn from((x, y): (f64, f64)) -> Self {
        Self { x, y }
    }
}

/// Axis-aligned plane window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Rect {
    pub fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64) -> Result<Self> {
        let r = Self { x_min, x_max, y_min, y_max };
        if !(x_min.is_finite() && x_max.is_finite() && y_min.is_finite() && y_max.is_finite()) {
            return Err(Error::InvalidArgument("window bounds must be finite".into()));
        }
        if r.width() <= 0.0 || r.height() <= 0.0 {
            return Err(Error::InvalidArgument("window must have positive area".into()));
        }
        Ok(r)
    }

    /// The unit square `Q = [0,1] x [0,1]`.
    pub fn unit_square() -> Self {
        Self { x_min: 0.0, x_max: 1.0, y_min: 0.0, y_max: 1.0 }
    }

    pub fn width(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn height(&self) -> f64 {
        self.y_max - self.y_min
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn contains(&self, p: PlanePoint) -> bool {
        p.x >= self.x_min && p.x <= self.x_max && p.y >= self.y_min && p.y <= self.y_max
    }
}

/// Ordered sampled curve. Consecutive vertices are distinct; a closed curve does not
/// repeat its first vertex at the end.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polyline {
    vertices: Vec<PlanePoint>,
    closed: bool,
}

impl Polyline {
    pub fn new(vertices: Vec<PlanePoint>, closed: bool) -> Self {
        let mut out: Vec<PlanePoint> = Vec::with_capacity(vertices.len());
        for v in vertices {
            if out.last() != Some(&v) {
                out.push(v);
            }
        }
        if closed {
            while out.len() > 1 && out.first() == out.last() {
                out.pop();
            }
        }
        Self { vertices: out, closed }
    }

    pub fn open(vertices: Vec<PlanePoint>) -> Self {
        Self::new(vertices, false)
    }

    pub fn closed(vertices: Vec<PlanePoint>) -> Self {
        Self::new(vertices, true)
    }

    pub fn vertices(&self) -> &[PlanePoint] {
        &self.vertices
    }

    pub fn into_vertices(self) -> Vec<PlanePoint> {
        self.vertices
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn first(&self) -> Option<PlanePoint> {
        self.vertices.first().copied()
    }

    pub fn last(&self) -> Option<PlanePoint> {
        self.vertices.last().copied()
    }

    /// Segments in traversal order, including the closing segment of a closed curve.
    pub fn segments(&self) -> impl Iterator<Item = (PlanePoint, PlanePoint)> + '_ {
        let n = self.vertices.len();
        let count = match (self.closed, n) {
            (_, 0 | 1) => 0,
            (true, _) => n,
            (false, _) => n - 1,
        };
        (0..count).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    pub fn length(&self) -> f64 {
        self.segments().map(|(a, b)| a.dist(b)).sum()
    }

    pub fn reversed(&self) -> Self {
        let mut v = self.vertices.clone();
        v.reverse();
        Self { vertices: v, closed: self.closed }
    }

    pub fn map(&self, f: impl Fn(PlanePoint) -> PlanePoint) -> Self {
        Self::new(self.vertices.iter().map(|&p| f(p)).collect(), self.closed)
    }

    /// Resamples to `n` vertices equally spaced in chord length (piecewise linear).
    /// For a closed curve the spacing wraps around the closing segment.
    pub fn resample(&self, n: usize) -> Self {
        if self.vertices.len() < 2 || n < 2 {
            return self.clone();
        }
        let pts: Vec<PlanePoint> = if self.closed {
            let mut v = self.vertices.clone();
            v.push(self.vertices[0]);
            v
        } else {
            self.vertices.clone()
        };
        let mut cum = Vec::with_capacity(pts.len());
        cum.push(0.0);
        for w in pts.windows(2) {
            cum.push(cum.last().unwrap() + w[0].dist(w[1]));
        }
        let total = *cum.last().unwrap();
        if total == 0.0 {
            return self.clone();
        }
        let steps = if self.closed { n } else { n - 1 };
        let mut out = Vec::with_capacity(n);
        let mut seg = 0;
        for i in 0..n {
            let s = total * i as f64 / steps as f64;
            while seg + 2 < cum.len() && cum[seg + 1] < s {
                seg += 1;
            }
            let len = cum[seg + 1] - cum[seg];
            let t = if len > 0.0 { ((s - cum[seg]) / len).clamp(0.0, 1.0) } else { 0.0 };
            out.push(pts[seg].lerp(pts[seg + 1], t));
        }
        if !self.closed {
            *out.last_mut().unwrap() = *pts.last().unwrap();
        }
        Self::new(out, self.closed)
    }

    /// Even-odd point-in-polygon test treating the curve as closed.
    pub fn encloses(&self, p: PlanePoint) -> bool {
        let n = self.vertices.len();
        if n < 3 {
            return false;
        }
        let mut inside = false;
        let mut j = n - 1;
        for i in 0..n {
            let (a, b) = (self.vertices[i], self.vertices[j]);
            if (a.y > p.y) != (b.y > p.y) {
                let x = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
                if p.x < x {
                    inside = !inside;
                }
            }
            j = i;
        }
        inside
    }
}

pub fn point_segment_distance(p: PlanePoint, a: PlanePoint, b: PlanePoint) -> f64 {
    let (dx, dy) = (b.x - a.x, b.y - a.y);
    let len2 = dx * dx + dy * dy;
    if len2 == 0.0 {
        return p.dist(a);
    }
    let t = (((p.x - a.x) * dx + (p.y - a.y) * dy) / len2).clamp(0.0, 1.0);
    p.dist(a.lerp(b, t))
}

/// Uniform-grid bucket index over a set of segments for nearest-distance queries.
pub struct SegmentIndex {
    segments: Vec<(PlanePoint, PlanePoint)>,
    cell: f64,
    buckets: HashMap<(i64, i64), Vec<usize>>,
}

impl SegmentIndex {
    pub fn new(curves: &[Polyline]) -> Self {
        let segments: Vec<_> = curves
            .iter()
            .flat_map(|c| {
                let mut s: Vec<_> = c.segments().collect();
                if c.len() == 1 {
                    s.push((c.vertices()[0], c.vertices()[0]));
                }
                s
            })
            .collect();
        let total: f64 = segments.iter().map(|(a, b)| a.dist(*b)).sum();
        let cell = if segments.is_empty() {
            1.0
        } else {
            (4.0 * total / segments.len() as f64).max(1e-9)
        };
        let mut buckets: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
        for (i, (a, b)) in segments.iter().enumerate() {
            let (x0, x1) = (a.x.min(b.x), a.x.max(b.x));
            let (y0, y1) = (a.y.min(b.y), a.y.max(b.y));
            let (i0, i1) = ((x0 / cell).floor() as i64, (x1 / cell).floor() as i64);
            let (j0, j1) = ((y0 / cell).floor() as i64, (y1 / cell).floor() as i64);
            for bi in i0..=i1 {
                for bj in j0..=j1 {
                    buckets.entry((bi, bj)).or_default().push(i);
                }
            }
        }
        Self { segments, cell, buckets }
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    /// Distance from `p` to the nearest indexed segment (infinite if the index is empty).
    pub fn distance(&self, p: PlanePoint) -> f64 {
        if self.segments.is_empty() {
            return f64::INFINITY;
        }
        let (ci, cj) = ((p.x / self.cell).floor() as i64, (p.y / self.cell).floor() as i64);
        let mut best = f64::INFINITY;
        let max_ring = 1 << 20;
        let mut ring = 0i64;
        loop {
            for bi in (ci - ring)..=(ci + ring) {
                for bj in (cj - ring)..=(cj + ring) {
                    if (bi - ci).abs() != ring && (bj - cj).abs() != ring {
                        continue;
                    }
                    if let Some(list) = self.buckets.get(&(bi, bj)) {
                        for &s in list {
                            let (a, b) = self.segments[s];
                            best = best.min(point_segment_distance(p, a, b));
                        }
                    }
                }
            }
            // Everything outside the searched square is at least `ring * cell` away.
            if best <= ring as f64 * self.cell || ring > max_ring {
                return best;
            }
            ring += 1;
            if ring > 64 && best.is_infinite() {
                // sparse index far from p: fall back to brute force
                return self
                    .segments
                    .iter()
                    .map(|&(a, b)| point_segment_distance(p, a, b))
                    .fold(f64::INFINITY, f64::min);
            }
        }
    }
}

/// `sup_{a in from} dist(a, to)` with `to` treated as a union of polylines.
pub fn directed_hausdorff(from: &[PlanePoint], to: &[Polyline]) -> f64 {
    use rayon::prelude::*;
    let index = SegmentIndex::new(to);
    from.par_iter().map(|&p| index.distance(p)).reduce(|| 0.0, f64::max)
}

/// Symmetric Hausdorff distance between two unions of polylines, sampled at their vertices.
pub fn hausdorff(a: &[Polyline], b: &[Polyline]) -> f64 {
    let va: Vec<PlanePoint> = a.iter().flat_map(|c| c.vertices().iter().copied()).collect();
    let vb: Vec<PlanePoint> = b.iter().flat_map(|c| c.vertices().iter().copied()).collect();
    directed_hausdorff(&va, b).max(directed_hausdorff(&vb, a))
}

/// Which side of the boundary of the image cone a point lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConeRegion {
    Interior,
    OnL1,
    OnL2,
    Vertex,
    Outside,
}

/// Half-line `vertex + s * direction`, `s >= 0`, lying on `y = slope * x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Ray {
    pub slope: f64,
    pub intercept: f64,
    pub vertex: PlanePoint,
    /// Unit vector pointing away from the vertex.
    pub direction: PlanePoint,
}

impl Ray {
    pub fn point_at(&self, s: f64) -> PlanePoint {
        PlanePoint::new(self.vertex.x + s * self.direction.x, self.vertex.y + s * self.direction.y)
    }

    /// True when `x` lies in the projection of the ray on the horizontal axis.
    pub fn covers_x(&self, x: f64) -> bool {
        if self.direction.x < 0.0 {
            x <= self.vertex.x
        } else {
            x >= self.vertex.x
        }
    }

    pub fn distance(&self, p: PlanePoint) -> f64 {
        let far = self.point_at(1e6);
        point_segment_distance(p, self.vertex, far)
    }
}

/// Critical lines, critical-value rays, cone, circle C, square Q.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PlaneGeometry {
    /// Vertical critical line `x = 1/2`.
    pub l1_x: f64,
    /// Horizontal critical line `y = 1/2`.
    pub l2_y: f64,
    /// Image of the vertical critical line.
    pub ray_l1: Ray,
    /// Image of the horizontal critical line.
    pub ray_l2: Ray,
    pub cone_vertex: PlanePoint,
    pub circle_center: PlanePoint,
    pub circle_radius: f64,
    pub square_q: Rect,
    /// Abscissa where L1 meets the horizontal axis.
    pub q_intercept: f64,
    // inward unit normals of the two boundary lines
    #[serde(skip)]
    n1: PlanePoint,
    #[serde(skip)]
    n2: PlanePoint,
}

impl PlaneGeometry {
    pub fn new(p: &ParamPoint) -> Self {
        let (mu, e) = (p.mu(), p.epsilon());
        let vertex = PlanePoint::new(mu / 4.0, mu / 4.0);
        // F(1/2, y) = vertex - s (e, 1-e), F(x, 1/2) = vertex - s (1-e, e), s >= 0
        let unit = |x: f64, y: f64| {
            let n = x.hypot(y);
            PlanePoint::new(x / n, y / n)
        };
        let d1 = unit(-e, -(1.0 - e));
        let d2 = unit(-(1.0 - e), -e);
        let ray_l1 = Ray {
            slope: (1.0 - e) / e,
            intercept: -(1.0 - 2.0 * e) * mu / (4.0 * e),
            vertex,
            direction: d1,
        };
        let ray_l2 = Ray {
            slope: e / (1.0 - e),
            intercept: (1.0 - 2.0 * e) * mu / (4.0 * (1.0 - e)),
            vertex,
            direction: d2,
        };
        // normal to d1 oriented towards d2, and vice versa
        let orient = |d: PlanePoint, other: PlanePoint| {
            let n = PlanePoint::new(-d.y, d.x);
            if n.x * other.x + n.y * other.y >= 0.0 {
                n
            } else {
                PlanePoint::new(-n.x, -n.y)
            }
        };
        Self {
            l1_x: 0.5,
            l2_y: 0.5,
            ray_l1,
            ray_l2,
            cone_vertex: vertex,
            circle_center: PlanePoint::new(0.5, 0.5),
            circle_radius: 0.5f64.sqrt(),
            square_q: Rect::unit_square(),
            q_intercept: (1.0 - 2.0 * e) * mu / (4.0 * (1.0 - e)),
            n1: orient(d1, d2),
            n2: orient(d2, d1),
        }
    }

    /// Signed distances to the lines carrying L1 and L2, positive towards the cone.
    pub fn signed_distances(&self, z: PlanePoint) -> (f64, f64) {
        let v = self.cone_vertex;
        let (dx, dy) = (z.x - v.x, z.y - v.y);
        (self.n1.x * dx + self.n1.y * dy, self.n2.x * dx + self.n2.y * dy)
    }

    /// Geometric classification against the two rays with tolerance `TAU_GEO`.
    pub fn cone_membership(&self, z: PlanePoint) -> ConeRegion {
        let (d1, d2) = self.signed_distances(z);
        if d1 < -TAU_GEO || d2 < -TAU_GEO {
            return ConeRegion::Outside;
        }
        match (d1.abs() <= TAU_GEO, d2.abs() <= TAU_GEO) {
            (true, true) => ConeRegion::Vertex,
            (true, false) => ConeRegion::OnL1,
            (false, true) => ConeRegion::OnL2,
            (false, false) => ConeRegion::Interior,
        }
    }

    /// Points on the circle C: `x^2 + y^2 = x + y`.
    pub fn circle_c(&self, n: usize) -> Polyline {
        let pts = (0..n)
            .map(|i| {
                // start at O and run counterclockwise through S, S1, S2
                let th = -0.75 * std::f64::consts::PI + std::f64::consts::TAU * i as f64 / n as f64;
                PlanePoint::new(
                    self.circle_center.x + self.circle_radius * th.cos(),
                    self.circle_center.y + self.circle_radius * th.sin(),
                )
            })
            .collect();
        Polyline::closed(pts)
    }

    /// Boundary of Q traversed O, S, S1, S2 with `n` vertices in total.
    pub fn boundary_q(&self, n: usize) -> Polyline {
        let n = n.max(4);
        let corners = [
            PlanePoint::new(0.0, 0.0),
            PlanePoint::new(1.0, 0.0),
            PlanePoint::new(1.0, 1.0),
            PlanePoint::new(0.0, 1.0),
        ];
        let per = n / 4;
        let mut pts = Vec::with_capacity(per * 4);
        for k in 0..4 {
            let (a, b) = (corners[k], corners[(k + 1) % 4]);
            for i in 0..per {
                pts.push(a.lerp(b, i as f64 / per as f64));
            }
        }
        Polyline::closed(pts)
    }
}

/// Cell grid over a window. Row 0 is the top row (largest `y`), matching image layout.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub window: Rect,
    pub width: usize,
    pub height: usize,
}

impl Grid {
    pub fn new(window: Rect, width: usize, height: usize) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidArgument("grid resolution must be positive".into()));
        }
        Ok(Self { window, width, height })
    }

    pub fn len(&self) -> usize {
        self.width * self.height
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dx(&self) -> f64 {
        self.window.width() / self.width as f64
    }

    pub fn dy(&self) -> f64 {
        self.window.height() / self.height as f64
    }

    pub fn cell_area(&self) -> f64 {
        self.dx() * self.dy()
    }

    /// Center of cell `(col, row)`.
    pub fn center(&self, col: usize, row: usize) -> PlanePoint {
        PlanePoint::new(
            self.window.x_min + (col as f64 + 0.5) * self.dx(),
            self.window.y_max - (row as f64 + 0.5) * self.dy(),
        )
    }

    pub fn center_of_index(&self, idx: usize) -> PlanePoint {
        self.center(idx % self.width, idx / self.width)
    }

    /// `(col, row)` of the cell containing `z`, if inside the window.
    pub fn cell_of(&self, z: PlanePoint) -> Option<(usize, usize)> {
        let fx = (z.x - self.window.x_min) / self.dx();
        let fy = (self.window.y_max - z.y) / self.dy();
        if !(fx >= 0.0 && fy >= 0.0) {
            return None;
        }
        let (c, r) = (fx as usize, fy as usize);
        // the closed far edges belong to the last cell
        let c = if c == self.width && z.x <= self.window.x_max { c - 1 } else { c };
        let r = if r == self.height && z.y >= self.window.y_min { r - 1 } else { r };
        (c < self.width && r < self.height).then_some((c, r))
    }

    pub fn index_of(&self, z: PlanePoint) -> Option<usize> {
        self.cell_of(z).map(|(c, r)| r * self.width + c)
    }
}

/// `x^2 + y^2 <= x + y`, the closed disk bounded by C.
pub fn in_closed_disk(z: PlanePoint) -> bool {
    z.x * z.x + z.y * z.y <= z.x + z.y
}

#[cfg(test)]
mod tests {
    use super::*;

    fn geo(mu: f64, e: f64) -> PlaneGeometry {
        PlaneGeometry::new(&ParamPoint::new(mu, e).unwrap())
    }

    #[test]
    fn rays_pass_through_vertex() {
        for (mu, e) in [(2.0, 0.25), (3.0, 0.1), (2.8, -1.0), (5.0, -0.3)] {
            let g = geo(mu, e);
            for r in [g.ray_l1, g.ray_l2] {
                let v = g.cone_vertex;
                assert!((r.slope * v.x + r.intercept - v.y).abs() < 1e-12);
                let far = r.point_at(3.0);
                assert!((r.slope * far.x + r.intercept - far.y).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn ray_formulas() {
        let g = geo(2.0, 0.25);
        assert!((g.ray_l1.slope - 3.0).abs() < 1e-15);
        assert!((g.ray_l1.intercept + 1.0).abs() < 1e-15);
        assert!((g.ray_l2.slope - 1.0 / 3.0).abs() < 1e-15);
        assert!((g.ray_l2.intercept - 1.0 / 3.0).abs() < 1e-15);
        assert!((g.q_intercept - 1.0 / 3.0).abs() < 1e-15);
        // L1 meets the horizontal axis at q
        assert!((g.ray_l1.slope * g.q_intercept + g.ray_l1.intercept).abs() < 1e-15);
    }

    #[test]
    fn ray_x_domain() {
        let small = geo(2.0, 0.25);
        assert!(small.ray_l1.covers_x(0.0) && !small.ray_l1.covers_x(0.6));
        assert!(small.ray_l2.covers_x(0.0) && !small.ray_l2.covers_x(0.6));
        // with negative coupling L1 runs to the right of the vertex
        let large = geo(2.8, -1.0);
        assert!(large.ray_l1.covers_x(1.0) && !large.ray_l1.covers_x(0.0));
        assert!(large.ray_l2.covers_x(0.0));
    }

    #[test]
    fn cone_classification_basics() {
        let g = geo(2.0, 0.25);
        assert_eq!(g.cone_membership(g.cone_vertex), ConeRegion::Vertex);
        assert_eq!(g.cone_membership(PlanePoint::ORIGIN), ConeRegion::Interior);
        assert_eq!(g.cone_membership(PlanePoint::new(0.5 + 1.0, 0.0)), ConeRegion::Outside);
        assert_eq!(g.cone_membership(g.ray_l1.point_at(0.7)), ConeRegion::OnL1);
        assert_eq!(g.cone_membership(g.ray_l2.point_at(0.7)), ConeRegion::OnL2);
    }

    #[test]
    fn circle_c_satisfies_equation() {
        let c = geo(2.0, 0.25).circle_c(64);
        assert_eq!(c.len(), 64);
        assert!(c.is_closed());
        assert!(c.vertices()[0].dist(PlanePoint::ORIGIN) < 1e-15);
        for v in c.vertices() {
            assert!((v.x * v.x + v.y * v.y - v.x - v.y).abs() < 1e-14);
        }
    }

    #[test]
    fn polyline_resample_endpoints_and_spacing() {
        let p = Polyline::open(vec![
            PlanePoint::new(0.0, 0.0),
            PlanePoint::new(1.0, 0.0),
            PlanePoint::new(1.0, 2.0),
        ]);
        let r = p.resample(7);
        assert_eq!(r.len(), 7);
        assert_eq!(r.first(), p.first());
        assert_eq!(r.last(), p.last());
        let gaps: Vec<f64> = r.segments().map(|(a, b)| a.dist(b)).collect();
        for g in &gaps {
            // a corner shortens the chord of the segment straddling it
            assert!(*g <= 0.5 + 1e-12 && *g > 0.3);
        }
    }

    #[test]
    fn polyline_drops_repeats() {
        let a = PlanePoint::new(0.0, 0.0);
        let b = PlanePoint::new(1.0, 0.0);
        let p = Polyline::closed(vec![a, a, b, b, a]);
        assert_eq!(p.vertices(), &[a, b]);
    }

    #[test]
    fn hausdorff_of_shifted_square() {
        let g = geo(2.0, 0.25);
        let q = g.boundary_q(400);
        let shifted = q.map(|p| PlanePoint::new(p.x + 0.01, p.y));
        let h = hausdorff(&[q.clone()], &[shifted]);
        assert!((h - 0.01).abs() < 1e-9, "{h}");
        assert!(q.encloses(PlanePoint::new(0.5, 0.5)));
        assert!(!q.encloses(PlanePoint::new(1.5, 0.5)));
    }

    #[test]
    fn grid_cell_round_trip() {
        let g = Grid::new(Rect::new(-1.0, 2.0, 0.0, 1.0).unwrap(), 30, 10).unwrap();
        for idx in 0..g.len() {
            assert_eq!(g.index_of(g.center_of_index(idx)), Some(idx));
        }
        assert_eq!(g.cell_of(PlanePoint::new(2.0, 0.0)), Some((29, 9)));
        assert_eq!(g.cell_of(PlanePoint::new(-1.0, 1.0)), Some((0, 0)));
        assert_eq!(g.cell_of(PlanePoint::new(2.1, 0.5)), None);
        assert_eq!(g.cell_of(PlanePoint::new(f64::NAN, 0.5)), None);
    }
}
