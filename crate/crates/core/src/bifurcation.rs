//! Periodic orbits by Newton's method, Hopf brackets by continuation in `mu`,
//! pitchfork checks and the parameter-plane loci diagram.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::PlanePoint;
use crate::map::{jacobian, map_eval, off_diagonal_fixed_point, Mat2};
use crate::params::{loci, strength_of, ParamPoint, Strength, TAU_FIX};

pub const NEWTON_MAX_ITERS: usize = 100;
/// Step halvings tried when a Newton step increases the residual.
pub const NEWTON_MAX_HALVINGS: usize = 30;
/// `F^q(z0) = z0` within this distance for a proper divisor `q` rejects the orbit as lower period.
pub const MINIMALITY_TOL: f64 = 1e-9;
/// Imaginary parts below this count as real eigenvalues.
pub const COMPLEX_TOL: f64 = 1e-12;
pub const DEFAULT_CONTINUATION_STEPS: usize = 200;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PeriodicOrbit {
    pub points: Vec<PlanePoint>,
    pub period: usize,
    #[serde(serialize_with = "crate::map::ser_eigs")]
    pub cycle_eigenvalues: [Complex64; 2],
    pub residual: f64,
}

impl PeriodicOrbit {
    pub fn max_modulus(&self) -> f64 {
        self.cycle_eigenvalues[0].norm().max(self.cycle_eigenvalues[1].norm())
    }

    /// Both cycle eigenvalues form a non-real conjugate pair.
    pub fn has_complex_pair(&self) -> bool {
        self.cycle_eigenvalues[0].im.abs() > COMPLEX_TOL
    }

    pub fn is_attracting(&self) -> bool {
        self.max_modulus() < 1.0
    }
}

fn iterate(p: &ParamPoint, z: PlanePoint, n: usize) -> PlanePoint {
    (0..n).fold(z, |z, _| map_eval(p, z))
}

/// `F^n(z)` and the Jacobian of `F^n` at `z`.
fn iterate_with_jacobian(p: &ParamPoint, z: PlanePoint, n: usize) -> (PlanePoint, Mat2) {
    let mut m = Mat2::IDENTITY;
    let mut w = z;
    for _ in 0..n {
        m = jacobian(p, w).mul(&m);
        w = map_eval(p, w);
    }
    (w, m)
}

/// Product of Jacobians around the cycle starting at `z`.
pub fn cycle_jacobian(p: &ParamPoint, z: PlanePoint, period: usize) -> Mat2 {
    iterate_with_jacobian(p, z, period).1
}

fn cycle_residual(p: &ParamPoint, points: &[PlanePoint]) -> f64 {
    (0..points.len())
        .map(|i| map_eval(p, points[i]).dist(points[(i + 1) % points.len()]))
        .fold(0.0, f64::max)
}

/// Solves `F^period(z) = z` by damped Newton iteration from `guess`.
pub fn find_periodic_orbit(p: &ParamPoint, period: usize, guess: PlanePoint) -> Result<PeriodicOrbit> {
    if period == 0 {
        return Err(Error::InvalidArgument("period must be at least 1".into()));
    }
    let g = |z: PlanePoint| {
        let w = iterate(p, z, period);
        PlanePoint::new(w.x - z.x, w.y - z.y)
    };
    let mut z = guess;
    let mut res = g(z).norm();
    let mut iterations = 0;
    while iterations < NEWTON_MAX_ITERS && !(res <= TAU_FIX * 0.1) {
        iterations += 1;
        let (w, m) = iterate_with_jacobian(p, z, period);
        let rhs = PlanePoint::new(z.x - w.x, z.y - w.y);
        let jm = Mat2([[m.0[0][0] - 1.0, m.0[0][1]], [m.0[1][0], m.0[1][1] - 1.0]]);
        let Some(step) = jm.solve(rhs) else { break };
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..NEWTON_MAX_HALVINGS {
            let cand = PlanePoint::new(z.x + lambda * step.x, z.y + lambda * step.y);
            let r = g(cand).norm();
            if r.is_finite() && r <= res {
                z = cand;
                res = r;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    let mut points = Vec::with_capacity(period);
    let mut w = z;
    for _ in 0..period {
        points.push(w);
        w = map_eval(p, w);
    }
    let residual = cycle_residual(p, &points);
    if !(residual <= TAU_FIX) || !z.is_finite() {
        return Err(Error::NoConvergence { iterations, residual: if residual.is_nan() { f64::INFINITY } else { residual } });
    }
    for q in (1..period).filter(|q| period % q == 0) {
        if iterate(p, z, q).dist(z) <= MINIMALITY_TOL {
            return Err(Error::ConvergedToLowerPeriod { period: q });
        }
    }
    Ok(PeriodicOrbit { points, period, cycle_eigenvalues: cycle_jacobian(p, z, period).eigenvalues(), residual })
}

/// Closest-return guess for a period-`period` orbit: after `transient` steps from `z0`,
/// the iterate minimizing `|F^period(z) - z|` over the next `window` steps.
pub fn closest_return_guess(p: &ParamPoint, z0: PlanePoint, period: usize, transient: usize, window: usize) -> Option<PlanePoint> {
    let mut z = iterate(p, z0, transient);
    let mut best: Option<(f64, PlanePoint)> = None;
    for _ in 0..window.max(1) {
        let d = iterate(p, z, period).dist(z);
        if !d.is_finite() || !z.is_finite() {
            return None;
        }
        if best.is_none_or(|(b, _)| d < b) {
            best = Some((d, z));
        }
        z = map_eval(p, z);
    }
    best.map(|(_, z)| z)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContinuationStep {
    pub mu: f64,
    pub orbit: PeriodicOrbit,
}

/// Follows the orbit through `steps` equal increments from `mu_start` to `mu_end`,
/// each Newton solve starting from the previous solution. Stops early at the first
/// failure, returning the path so far and the `mu` where the orbit was lost.
pub fn continue_orbit(
    epsilon: f64,
    period: usize,
    mu_start: f64,
    mu_end: f64,
    steps: usize,
    seed: PlanePoint,
) -> Result<(Vec<ContinuationStep>, Option<f64>)> {
    let steps = steps.max(1);
    let mut path = Vec::with_capacity(steps + 1);
    let mut guess = seed;
    for i in 0..=steps {
        let mu = mu_start + (mu_end - mu_start) * i as f64 / steps as f64;
        let p = ParamPoint::new(mu, epsilon)?;
        match find_periodic_orbit(&p, period, guess) {
            Ok(orbit) => {
                guess = orbit.points[0];
                path.push(ContinuationStep { mu, orbit });
            }
            Err(e) if i == 0 => return Err(e),
            Err(_) => return Ok((path, Some(mu))),
        }
    }
    Ok((path, None))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HopfBracket {
    pub epsilon: f64,
    pub period: usize,
    pub mu_lo: f64,
    pub mu_hi: f64,
    pub orbit_at_lo: PeriodicOrbit,
    pub modulus_lo: f64,
    /// `None` when the orbit could not be found at `mu_hi`.
    pub modulus_hi: Option<f64>,
    pub orbit_lost: bool,
    /// False when the requested width left nothing to bisect.
    pub refined: bool,
}

/// Brackets the `mu` where the cycle's complex eigenvalue pair crosses the unit circle.
pub fn hopf_bracket(
    epsilon: f64,
    period: usize,
    mu_start: f64,
    mu_end: f64,
    width: f64,
    seed_guess: PlanePoint,
) -> Result<HopfBracket> {
    if !(mu_start < mu_end) || !(width > 0.0) {
        return Err(Error::InvalidArgument("need mu_start < mu_end and width > 0".into()));
    }
    let p0 = ParamPoint::new(mu_start, epsilon)?;
    let start = find_periodic_orbit(&p0, period, seed_guess)?;
    if width >= mu_end - mu_start {
        let modulus_hi = ParamPoint::new(mu_end, epsilon)
            .and_then(|p| find_periodic_orbit(&p, period, start.points[0]))
            .ok()
            .map(|o| o.max_modulus());
        return Ok(HopfBracket {
            epsilon,
            period,
            mu_lo: mu_start,
            mu_hi: mu_end,
            modulus_lo: start.max_modulus(),
            modulus_hi,
            orbit_lost: modulus_hi.is_none(),
            orbit_at_lo: start,
            refined: false,
        });
    }

    let (path, lost_at) = continue_orbit(epsilon, period, mu_start, mu_end, DEFAULT_CONTINUATION_STEPS, start.points[0])?;
    let mut seen_complex = false;
    let mut lo: Option<&ContinuationStep> = None;
    let mut hi: Option<(f64, Option<PeriodicOrbit>)> = None;
    for step in &path {
        if step.orbit.has_complex_pair() {
            seen_complex = true;
            if step.orbit.is_attracting() {
                lo = Some(step);
            } else if lo.is_some() {
                hi = Some((step.mu, Some(step.orbit.clone())));
                break;
            }
        } else if lo.is_some() {
            // pair went real before crossing; not a Hopf event
            lo = None;
        }
    }
    if hi.is_none() {
        if let (Some(mu), Some(_)) = (lost_at, lo) {
            hi = Some((mu, None));
        }
    }
    let (Some(lo), Some(hi)) = (lo, hi) else {
        return Err(if seen_complex {
            Error::Domain("no unit-circle crossing of a complex pair in the range".into())
        } else {
            Error::NoComplexPair
        });
    };

    let (mut mu_lo, mut orbit_lo) = (lo.mu, lo.orbit.clone());
    let (mut mu_hi, mut orbit_hi) = hi;
    while mu_hi - mu_lo > width {
        let mid = 0.5 * (mu_lo + mu_hi);
        if mid <= mu_lo || mid >= mu_hi {
            break;
        }
        let p = ParamPoint::new(mid, epsilon)?;
        match find_periodic_orbit(&p, period, orbit_lo.points[0]) {
            Ok(o) if o.has_complex_pair() && o.is_attracting() => {
                mu_lo = mid;
                orbit_lo = o;
            }
            Ok(o) => {
                mu_hi = mid;
                orbit_hi = Some(o);
            }
            Err(_) => {
                mu_hi = mid;
                orbit_hi = None;
            }
        }
    }
    Ok(HopfBracket {
        epsilon,
        period,
        mu_lo,
        mu_hi,
        modulus_lo: orbit_lo.max_modulus(),
        modulus_hi: orbit_hi.as_ref().map(PeriodicOrbit::max_modulus),
        orbit_lost: orbit_hi.is_none(),
        orbit_at_lo: orbit_lo,
        refined: true,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PitchforkSample {
    pub mu: f64,
    pub exists: bool,
    /// Distance from the off-diagonal fixed point to its parent diagonal point.
    pub distance: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PitchforkReport {
    pub epsilon: f64,
    /// `mu0` for small strength, `mu0'` for large strength.
    pub locus: f64,
    pub discriminant_at_locus: f64,
    pub flip_ok: bool,
    pub samples: Vec<PitchforkSample>,
    /// Least-squares slope of `log distance` against `log |mu - locus|`.
    pub exponent: f64,
    pub exponent_ok: bool,
    pub passed: bool,
}

/// Checks that the off-diagonal pair is born at the pitchfork locus with square-root growth.
pub fn pitchfork_check(epsilon: f64, n_samples: usize) -> Result<PitchforkReport> {
    let l = loci(epsilon);
    let small = strength_of(epsilon) == Strength::Small;
    let locus = match strength_of(epsilon) {
        Strength::Small => l.mu0.unwrap_or(f64::NAN),
        Strength::Large => l.mu0_prime.unwrap_or(f64::NAN),
        Strength::Other => return Err(Error::Domain("pitchfork loci exist only for epsilon < 0 or 0 < epsilon < 1/2".into())),
    };
    let exists = |mu: f64| -> Result<Option<f64>> {
        let p = ParamPoint::new(mu, epsilon)?;
        Ok(off_diagonal_fixed_point(&p).map(|(a, b)| {
            // O for small strength, the diagonal point (mu-1)/mu for large
            let c = if small { 0.0 } else { (mu - 1.0) / mu };
            PlanePoint::new(a, b).dist(PlanePoint::new(c, c))
        }))
    };
    let discriminant_at_locus = ParamPoint::new(locus, epsilon)?.off_diagonal_discriminant();
    let below = exists(locus - 1e-8)?.is_some();
    let above = exists(locus + 1e-8)?.is_some();
    let flip_ok = below != above && discriminant_at_locus.abs() <= 1e-8;
    let side = if above { 1.0 } else { -1.0 };

    let n = n_samples.max(2);
    let mut samples = Vec::with_capacity(2 * n);
    let mut fit = Vec::new();
    for i in 0..n {
        // offsets from 1e-2 down to 1e-6, on both sides
        let delta = 10f64.powf(-2.0 - 4.0 * i as f64 / (n - 1) as f64);
        for s in [side, -side] {
            let mu = locus + s * delta;
            let d = exists(mu)?;
            if s == side {
                if let Some(d) = d.filter(|&d| d > 0.0) {
                    fit.push((delta.ln(), d.ln()));
                }
            }
            samples.push(PitchforkSample { mu, exists: d.is_some(), distance: d });
        }
    }
    let exponent = slope(&fit);
    let exponent_ok = (exponent - 0.5).abs() <= 0.1;
    let sides_ok = samples.iter().all(|s| s.exists == ((s.mu - locus) * side > 0.0));
    Ok(PitchforkReport {
        epsilon,
        locus,
        discriminant_at_locus,
        flip_ok,
        samples,
        exponent,
        exponent_ok,
        passed: flip_ok && exponent_ok && sides_ok,
    })
}

fn slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    if pts.len() < 2 {
        return f64::NAN;
    }
    let (mx, my) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x / n, b + y / n));
    let (sxy, sxx) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + (x - mx) * (y - my), b + (x - mx) * (x - mx)));
    sxy / sxx
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Locus {
    Mu0,
    Mu1,
    MuPrime,
    Mu0Prime,
    Mu2,
}

impl Locus {
    pub const ALL: [Locus; 5] = [Locus::Mu0, Locus::Mu1, Locus::MuPrime, Locus::Mu0Prime, Locus::Mu2];

    pub fn bit(self) -> u8 {
        1 << self as u8
    }

    pub fn eval(self, epsilon: f64) -> Option<f64> {
        let l = loci(epsilon);
        match self {
            Locus::Mu0 => l.mu0,
            Locus::Mu1 => l.mu1,
            Locus::MuPrime => l.mu_prime,
            Locus::Mu0Prime => l.mu0_prime,
            Locus::Mu2 => l.mu2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LocusCurve {
    pub locus: Locus,
    /// `(epsilon, mu)` samples, one per column where the curve is defined and in range.
    pub points: Vec<(f64, f64)>,
}

/// Parameter plane with epsilon on the horizontal axis and mu on the vertical one.
/// Each cell holds a bit mask of the curves crossing it ([`Locus::bit`]); row 0 is the largest mu.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LociDiagram {
    pub epsilon_range: (f64, f64),
    pub mu_range: (f64, f64),
    pub width: usize,
    pub height: usize,
    pub cells: Vec<u8>,
    pub curves: Vec<LocusCurve>,
}

impl LociDiagram {
    pub fn curve(&self, locus: Locus) -> Option<&LocusCurve> {
        self.curves.iter().find(|c| c.locus == locus)
    }
}

pub fn loci_diagram(epsilon_range: (f64, f64), mu_range: (f64, f64), resolution: (usize, usize)) -> LociDiagram {
    let (w, h) = resolution;
    let empty = !(epsilon_range.0 < epsilon_range.1) || !(mu_range.0 < mu_range.1) || w == 0 || h == 0;
    if empty {
        return LociDiagram { epsilon_range, mu_range, width: 0, height: 0, cells: Vec::new(), curves: Vec::new() };
    }
    let de = (epsilon_range.1 - epsilon_range.0) / w as f64;
    let dm = (mu_range.1 - mu_range.0) / h as f64;
    let mut cells = vec![0u8; w * h];
    let mut curves = Vec::new();
    for locus in Locus::ALL {
        let mut points = Vec::new();
        // rows spanned between consecutive columns are filled so steep curves stay connected
        let mut prev_row: Option<usize> = None;
        for col in 0..w {
            let eps = epsilon_range.0 + (col as f64 + 0.5) * de;
            let Some(mu) = locus.eval(eps).filter(|m| *m >= mu_range.0 && *m <= mu_range.1) else {
                prev_row = None;
                continue;
            };
            points.push((eps, mu));
            let row = (((mu_range.1 - mu) / dm) as usize).min(h - 1);
            let (a, b) = prev_row.map_or((row, row), |r| (r.min(row), r.max(row)));
            for r in a..=b {
                cells[r * w + col] |= locus.bit();
            }
            prev_row = Some(row);
        }
        if !points.is_empty() {
            curves.push(LocusCurve { locus, points });
        }
    }
    LociDiagram { epsilon_range, mu_range, width: w, height: h, cells, curves }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pp(mu: f64, e: f64) -> ParamPoint {
        ParamPoint::new(mu, e).unwrap()
    }

    #[test]
    fn origin_eigenvalues() {
        let p = pp(3.3, 0.2);
        let o = find_periodic_orbit(&p, 1, PlanePoint::new(1e-3, -2e-3)).unwrap();
        assert!(o.points[0].norm() < 1e-12);
        let mut m: Vec<f64> = o.cycle_eigenvalues.iter().map(|e| e.re).collect();
        m.sort_by(f64::total_cmp);
        // oracle: mu along the diagonal, (1 - 2 eps) mu across it
        assert!((m[0] - 0.6 * 3.3).abs() < 1e-12 && (m[1] - 3.3).abs() < 1e-12);
    }

    #[test]
    fn diagonal_point_eigenvalues() {
        let p = pp(2.6, -0.3);
        let c = 1.6 / 2.6;
        let o = find_periodic_orbit(&p, 1, PlanePoint::new(c + 0.01, c - 0.02)).unwrap();
        assert!(o.points[0].dist(PlanePoint::new(c, c)) < 1e-12);
        let mut m: Vec<f64> = o.cycle_eigenvalues.iter().map(|e| e.re).collect();
        m.sort_by(f64::total_cmp);
        let (a, b) = (2.0 - 2.6, 1.6 * (2.0 - 2.6));
        assert!((m[0] - b).abs() < 1e-12 && (m[1] - a).abs() < 1e-12, "{m:?}");
    }

    #[test]
    fn lower_period_is_rejected() {
        let p = pp(3.3, 0.2);
        let r = find_periodic_orbit(&p, 2, PlanePoint::new(1e-4, 1e-4));
        assert!(matches!(r, Err(Error::ConvergedToLowerPeriod { period: 1 })), "{r:?}");
    }

    #[test]
    fn zero_period_is_invalid() {
        assert!(find_periodic_orbit(&pp(3.0, 0.2), 0, PlanePoint::ORIGIN).is_err());
    }

    #[test]
    fn degenerate_width_returns_unrefined_range() {
        let p = pp(2.37, -0.9);
        let g = closest_return_guess(&p, PlanePoint::new(0.3, 0.6), 2, 5000, 200).unwrap();
        let b = hopf_bracket(-0.9, 2, 2.37, 2.38, 1.0, g).unwrap();
        assert!(!b.refined);
        assert_eq!((b.mu_lo, b.mu_hi), (2.37, 2.38));
    }

    #[test]
    fn loci_diagram_empty_range() {
        let d = loci_diagram((0.3, 0.3), (1.0, 2.0), (10, 10));
        assert!(d.cells.is_empty() && d.curves.is_empty());
    }

    #[test]
    fn slope_of_square_root() {
        let pts: Vec<_> = (1..6).map(|i| ((i as f64).ln(), 0.5 * (i as f64).ln() + 2.0)).collect();
        assert!((slope(&pts) - 0.5).abs() < 1e-12);
    }
}
