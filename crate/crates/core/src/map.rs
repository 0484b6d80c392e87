//! Map evaluation, Jacobian, inverse branches and fixed points.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::geometry::{ConeRegion, PlaneGeometry, PlanePoint};
use crate::params::{ParamPoint, TAU_EIG, TAU_GEO};

#[inline]
pub fn logistic(t: f64, mu: f64) -> f64 {
    mu * t * (1.0 - t)
}

#[inline]
pub fn logistic_derivative(t: f64, mu: f64) -> f64 {
    mu * (1.0 - 2.0 * t)
}

/// One application of the coupled map.
///
/// Written as `a + eps (b - a)` so that diagonal points stay exactly diagonal
/// and swapping the inputs swaps the outputs bit for bit.
#[inline]
pub fn map_eval(p: &ParamPoint, z: PlanePoint) -> PlanePoint {
    let (mu, e) = (p.mu(), p.epsilon());
    let a = logistic(z.x, mu);
    let b = logistic(z.y, mu);
    PlanePoint::new(a + e * (b - a), b + e * (a - b))
}

/// Real 2x2 matrix stored row-major.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mat2(pub [[f64; 2]; 2]);

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2([[1.0, 0.0], [0.0, 1.0]]);

    pub fn det(&self) -> f64 {
        let m = &self.0;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    pub fn trace(&self) -> f64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn mul(&self, o: &Mat2) -> Mat2 {
        let (a, b) = (&self.0, &o.0);
        let mut r = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                r[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Mat2(r)
    }

    pub fn apply(&self, v: PlanePoint) -> PlanePoint {
        let m = &self.0;
        PlanePoint::new(m[0][0] * v.x + m[0][1] * v.y, m[1][0] * v.x + m[1][1] * v.y)
    }

    /// Solves `self * v = rhs`; `None` when singular.
    pub fn solve(&self, rhs: PlanePoint) -> Option<PlanePoint> {
        let d = self.det();
        if d == 0.0 || !d.is_finite() {
            return None;
        }
        let m = &self.0;
        Some(PlanePoint::new(
            (m[1][1] * rhs.x - m[0][1] * rhs.y) / d,
            (m[0][0] * rhs.y - m[1][0] * rhs.x) / d,
        ))
    }

    /// Eigenvalues from the characteristic polynomial, larger modulus first.
    pub fn eigenvalues(&self) -> [Complex64; 2] {
        let (tr, det) = (self.trace(), self.det());
        let disc = tr * tr / 4.0 - det;
        let half = tr / 2.0;
        let (l1, l2) = if disc >= 0.0 {
            let s = disc.sqrt();
            // avoid cancellation in the smaller root
            let big = if half >= 0.0 { half + s } else { half - s };
            let small = if big != 0.0 { det / big } else { half - s };
            (Complex64::new(big, 0.0), Complex64::new(small, 0.0))
        } else {
            let s = (-disc).sqrt();
            (Complex64::new(half, s), Complex64::new(half, -s))
        };
        if l1.norm() >= l2.norm() {
            [l1, l2]
        } else {
            [l2, l1]
        }
    }
}

pub fn jacobian(p: &ParamPoint, z: PlanePoint) -> Mat2 {
    let (mu, e) = (p.mu(), p.epsilon());
    let (dx, dy) = (logistic_derivative(z.x, mu), logistic_derivative(z.y, mu));
    Mat2([[(1.0 - e) * dx, e * dy], [e * dx, (1.0 - e) * dy]])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Classification {
    Repeller,
    Saddle,
    Attractor,
    NonHyperbolic,
}

/// Classifies a pair of eigenvalues against the unit circle with band `TAU_EIG`.
pub fn classify(eigenvalues: &[Complex64; 2]) -> Classification {
    let m = [eigenvalues[0].norm(), eigenvalues[1].norm()];
    if m.iter().any(|v| (v - 1.0).abs() <= TAU_EIG) {
        return Classification::NonHyperbolic;
    }
    match (m[0] < 1.0, m[1] < 1.0) {
        (true, true) => Classification::Attractor,
        (false, false) => Classification::Repeller,
        _ => Classification::Saddle,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FixedPointLabel {
    /// The origin.
    O,
    /// The diagonal point `((mu-1)/mu, (mu-1)/mu)`.
    Pmu,
    /// Off-diagonal point with `x < y`.
    PmuEps,
    /// Its reflection.
    RPmuEps,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FixedPointInfo {
    pub location: PlanePoint,
    #[serde(serialize_with = "ser_eigs")]
    pub eigenvalues: [Complex64; 2],
    pub classification: Classification,
    pub label: FixedPointLabel,
}

pub(crate) fn ser_eigs<S: serde::Serializer>(e: &[Complex64; 2], s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(2))?;
    for v in e {
        seq.serialize_element(&[v.re, v.im])?;
    }
    seq.end()
}

fn diagonal_info(p: &ParamPoint, x: f64, label: FixedPointLabel) -> FixedPointInfo {
    let d = logistic_derivative(x, p.mu());
    let along = Complex64::new(d, 0.0);
    let across = Complex64::new((1.0 - 2.0 * p.epsilon()) * d, 0.0);
    let eigenvalues = if along.norm() >= across.norm() { [along, across] } else { [across, along] };
    FixedPointInfo {
        location: PlanePoint::new(x, x),
        eigenvalues,
        classification: classify(&eigenvalues),
        label,
    }
}

/// Coordinates `(p-, p+)` of the off-diagonal fixed point, when it exists.
pub fn off_diagonal_fixed_point(p: &ParamPoint) -> Option<(f64, f64)> {
    let disc = p.off_diagonal_discriminant();
    if disc < 0.0 {
        return None;
    }
    let (mu, k) = (p.mu(), p.k());
    let s = disc.max(0.0).sqrt();
    Some(((k * mu - s) / (2.0 * mu), (k * mu + s) / (2.0 * mu)))
}

/// O, the diagonal point, and the off-diagonal pair when present.
pub fn fixed_points(p: &ParamPoint) -> Vec<FixedPointInfo> {
    let mu = p.mu();
    let mut out = vec![
        diagonal_info(p, 0.0, FixedPointLabel::O),
        diagonal_info(p, (mu - 1.0) / mu, FixedPointLabel::Pmu),
    ];
    if let Some((lo, hi)) = off_diagonal_fixed_point(p) {
        for (z, label) in [
            (PlanePoint::new(lo, hi), FixedPointLabel::PmuEps),
            (PlanePoint::new(hi, lo), FixedPointLabel::RPmuEps),
        ] {
            let eigenvalues = jacobian(p, z).eigenvalues();
            out.push(FixedPointInfo {
                location: z,
                eigenvalues,
                classification: classify(&eigenvalues),
                label,
            });
        }
    }
    out
}

/// Complements `1 - r` of the two radicands at `z`; both are linear in `z`.
#[inline]
pub fn radicand_complements(p: &ParamPoint, z: PlanePoint) -> (f64, f64) {
    let (mu, e) = (p.mu(), p.epsilon());
    let c = 4.0 / (mu * (1.0 - 2.0 * e));
    (c * ((1.0 - e) * z.x - e * z.y), c * ((1.0 - e) * z.y - e * z.x))
}

/// Radicands of the inverse branches at `z`. Both are affine in `z`.
#[inline]
pub fn radicands(p: &ParamPoint, z: PlanePoint) -> (f64, f64) {
    let (sx, sy) = radicand_complements(p, z);
    (1.0 - sx, 1.0 - sy)
}

/// `(1 - sqrt(1 - s)) / 2` written without cancellation for small `s`.
#[inline]
pub fn lower_root(s: f64) -> f64 {
    s / (2.0 * (1.0 + (1.0 - s).max(0.0).sqrt()))
}

/// Solution of `f(t) = v` on the side selected by `sign`, given `s = 4 v / mu`.
#[inline]
pub fn branch_root(s: f64, sign: f64) -> f64 {
    let m = lower_root(s);
    if sign < 0.0 {
        m
    } else {
        1.0 - m
    }
}

/// Branch signs `(sx, sy)` in the fixed order (--), (-+), (+-), (++).
pub const BRANCHES: [(f64, f64); 4] = [(-1.0, -1.0), (-1.0, 1.0), (1.0, -1.0), (1.0, 1.0)];

/// Image of `z` under one inverse branch; `None` if a radicand is negative.
#[inline]
pub fn inverse_branch(p: &ParamPoint, z: PlanePoint, branch: (f64, f64)) -> Option<PlanePoint> {
    let (sx, sy) = radicand_complements(p, z);
    if sx > 1.0 || sy > 1.0 {
        return None;
    }
    Some(PlanePoint::new(branch_root(sx, branch.0), branch_root(sy, branch.1)))
}

/// All real preimages of `z`, coincident pairs merged within `TAU_GEO`.
pub fn preimages(p: &ParamPoint, z: PlanePoint) -> Vec<PlanePoint> {
    let geo = PlaneGeometry::new(p);
    let region = geo.cone_membership(z);
    if region == ConeRegion::Outside {
        return Vec::new();
    }
    let (sx, sy) = radicand_complements(p, z);
    // on a boundary ray the matching radicand is zero up to rounding; snap it so the
    // coincident branches merge instead of splitting by sqrt(rounding error)
    let sx = if matches!(region, ConeRegion::OnL1 | ConeRegion::Vertex) { 1.0 } else { sx.min(1.0) };
    let sy = if matches!(region, ConeRegion::OnL2 | ConeRegion::Vertex) { 1.0 } else { sy.min(1.0) };
    let mut out: Vec<PlanePoint> = Vec::with_capacity(4);
    for (bx, by) in BRANCHES {
        let w = PlanePoint::new(branch_root(sx, bx), branch_root(sy, by));
        if !out.iter().any(|q| q.dist(w) < TAU_GEO) {
            out.push(w);
        }
    }
    out
}

/// Cone classification by the geometric test; see [`PlaneGeometry::cone_membership`].
pub fn cone_membership(p: &ParamPoint, z: PlanePoint) -> ConeRegion {
    PlaneGeometry::new(p).cone_membership(z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::TAU_FIX;

    fn pp(mu: f64, e: f64) -> ParamPoint {
        ParamPoint::new(mu, e).unwrap()
    }

    #[test]
    fn logistic_values() {
        assert_eq!(logistic(0.0, 3.7), 0.0);
        assert_eq!(logistic(0.5, 4.0), 1.0);
        assert!((logistic(0.3, 2.0) - 0.42).abs() < 1e-15);
    }

    #[test]
    fn map_examples() {
        let p = pp(2.0, 0.25);
        assert_eq!(map_eval(&p, PlanePoint::ORIGIN), PlanePoint::ORIGIN);
        let w = map_eval(&p, PlanePoint::new(0.3, 0.7));
        assert!((w.x - 0.42).abs() < 1e-15 && (w.y - 0.42).abs() < 1e-15);
        for e in [0.1, -0.7, 0.3, 2.0] {
            let q = map_eval(&pp(2.0, e), PlanePoint::new(0.5, 0.5));
            assert_eq!(q, PlanePoint::new(0.5, 0.5));
        }
    }

    #[test]
    fn jacobian_at_origin() {
        let j = jacobian(&pp(3.0, 0.2), PlanePoint::ORIGIN);
        let want = [[2.4, 0.6], [0.6, 2.4]];
        for i in 0..2 {
            for k in 0..2 {
                assert!((j.0[i][k] - want[i][k]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn jacobian_singular_on_critical_line() {
        let p = pp(3.3, -0.4);
        assert!(jacobian(&p, PlanePoint::new(0.5, 0.17)).det().abs() < 1e-15);
        assert!(jacobian(&p, PlanePoint::new(0.9, 0.5)).det().abs() < 1e-15);
    }

    #[test]
    fn eigenvalues_closed_form() {
        let m = Mat2([[0.0, -2.0], [2.0, 0.0]]);
        let [a, b] = m.eigenvalues();
        assert!((a.norm() - 2.0).abs() < 1e-15 && (b.norm() - 2.0).abs() < 1e-15);
        assert!((a.im.abs() - 2.0).abs() < 1e-15);
        let m = Mat2([[2.4, 0.6], [0.6, 2.4]]);
        let [a, b] = m.eigenvalues();
        assert!((a.re - 3.0).abs() < 1e-14 && (b.re - 1.8).abs() < 1e-14);
    }

    #[test]
    fn origin_classification_examples() {
        let fp = fixed_points(&pp(3.0, 0.2));
        let o = fp.iter().find(|f| f.label == FixedPointLabel::O).unwrap();
        assert!((o.eigenvalues[0].re - 3.0).abs() < 1e-14);
        assert!((o.eigenvalues[1].re - 1.8).abs() < 1e-14);
        assert_eq!(o.classification, Classification::Repeller);

        let fp = fixed_points(&pp(1.5, 0.2));
        assert_eq!(fp[0].classification, Classification::Saddle);

        let fp = fixed_points(&pp(2.0, -0.5));
        let pm = fp.iter().find(|f| f.label == FixedPointLabel::Pmu).unwrap();
        assert_eq!(pm.location, PlanePoint::new(0.5, 0.5));
        assert_eq!(pm.classification, Classification::Attractor);
    }

    #[test]
    fn fixed_points_are_fixed() {
        for (mu, e) in [(3.0, 0.2), (2.7, -0.9), (3.9, 0.1), (5.0, -0.3)] {
            let p = pp(mu, e);
            let fps = fixed_points(&p);
            assert_eq!(fps.len(), 4, "({mu}, {e})");
            for f in fps {
                assert!(map_eval(&p, f.location).dist(f.location) <= TAU_FIX, "{f:?}");
            }
        }
        // below the pitchfork the pair is absent
        assert_eq!(fixed_points(&pp(1.5, 0.2)).len(), 2);
    }

    #[test]
    fn preimages_of_origin() {
        let p = pp(2.7, 0.3);
        let pre = preimages(&p, PlanePoint::ORIGIN);
        let want = [(0.0, 0.0), (0.0, 1.0), (1.0, 0.0), (1.0, 1.0)];
        assert_eq!(pre.len(), 4);
        for (w, (x, y)) in pre.iter().zip(want) {
            assert!((w.x - x).abs() < 1e-15 && (w.y - y).abs() < 1e-15);
        }
    }

    #[test]
    fn preimages_outside_cone_empty() {
        let p = pp(2.0, 0.25);
        assert!(preimages(&p, PlanePoint::new(0.5 + 1.0, 0.0)).is_empty());
    }

    #[test]
    fn boundary_preimages_deduplicate() {
        let p = pp(3.0, 0.2);
        let g = PlaneGeometry::new(&p);
        // exact image of a point on x = 1/2 lies on L1
        let z = map_eval(&p, PlanePoint::new(0.5, 0.2));
        assert_eq!(g.cone_membership(z), ConeRegion::OnL1);
        let pre = preimages(&p, z);
        assert_eq!(pre.len(), 2);
        assert_eq!(preimages(&p, g.cone_vertex).len(), 1);
    }

    #[test]
    fn radicand_sign_agrees_with_geometry() {
        let p = pp(3.4, -0.6);
        let g = PlaneGeometry::new(&p);
        for i in 0..40 {
            for j in 0..40 {
                let z = PlanePoint::new(-1.0 + 0.1 * i as f64, -1.0 + 0.1 * j as f64);
                let (rx, ry) = radicands(&p, z);
                let region = g.cone_membership(z);
                if rx > 1e-8 && ry > 1e-8 {
                    assert_eq!(region, ConeRegion::Interior);
                }
                if rx < -1e-8 || ry < -1e-8 {
                    assert_eq!(region, ConeRegion::Outside);
                }
            }
        }
    }
}
