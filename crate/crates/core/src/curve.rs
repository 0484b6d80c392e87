//! Invariant curves through the four preimages of the origin: graph operators on
//! symmetric Lipschitz functions, the four-piece collage, and the stage sequence
//! used past the locus where S enters the cone.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{directed_hausdorff, hausdorff, PlaneGeometry, PlanePoint, Polyline, SegmentIndex};
use crate::map::{lower_root, map_eval};
use crate::params::{ParamPoint, Strength, TAU_GEO};
use crate::preimage::{polyline_preimage_with, PreimageOptions};

/// Slack on the discrete Lipschitz bound.
pub const TAU_LIP: f64 = 1e-6;
pub const DEFAULT_GRID: usize = 4096;
pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_ITERS: usize = 100_000;
/// Steps a witness orbit must stay bounded.
pub const WITNESS_STEPS: u64 = 10_000;

/// Samples `h(t_i)`, `t_i = i/N`, of a function with `h(0) = h(1) = 0` and `h(t) = h(1-t)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LipGraph {
    values: Vec<f64>,
}

impl LipGraph {
    /// Symmetrizes and pins the endpoints. `values.len() - 1` must be even and at least 2.
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        let n = values.len().saturating_sub(1);
        if n < 2 || n % 2 != 0 {
            return Err(Error::InvalidArgument("grid size must be even and at least 2".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("graph values must be finite".into()));
        }
        for i in 0..n / 2 {
            let m = 0.5 * (values[i] + values[n - i]);
            values[i] = m;
            values[n - i] = m;
        }
        values[0] = 0.0;
        values[n] = 0.0;
        Ok(Self { values })
    }

    pub fn zero(n: usize) -> Result<Self> {
        Self::new(vec![0.0; n + 1])
    }

    /// Lower arc of the circle `x^2 + y^2 = x + y` between O and S.
    pub fn circle_arc(n: usize) -> Result<Self> {
        Self::from_fn(n, |t| 0.5 - (0.5 - (t - 0.5) * (t - 0.5)).sqrt())
    }

    /// `min(t, 1 - t)`.
    pub fn tent(n: usize) -> Result<Self> {
        Self::from_fn(n, |t| t.min(1.0 - t))
    }

    pub fn from_fn(n: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new((0..=n).map(|i| f(i as f64 / n as f64)).collect())
    }

    pub fn n(&self) -> usize {
        self.values.len() - 1
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn t(&self, i: usize) -> f64 {
        i as f64 / self.n() as f64
    }

    /// Piecewise-linear evaluation on `[0, 1]`.
    pub fn eval(&self, t: f64) -> f64 {
        let n = self.n();
        let f = (t.clamp(0.0, 1.0) * n as f64).min(n as f64);
        let i = (f as usize).min(n - 1);
        let w = f - i as f64;
        self.values[i] * (1.0 - w) + self.values[i + 1] * w
    }

    pub fn lipschitz_constant(&self) -> f64 {
        let n = self.n() as f64;
        self.values.windows(2).map(|w| (w[1] - w[0]).abs() * n).fold(0.0, f64::max)
    }

    pub fn sup_distance(&self, other: &LipGraph) -> f64 {
        self.values.iter().zip(&other.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    /// `0 <= h(t) <= min(t, 1 - t)` up to `tol`.
    pub fn in_triangle(&self, tol: f64) -> bool {
        (0..=self.n()).all(|i| {
            let (t, h) = (self.t(i), self.values[i]);
            h >= -tol && h <= t.min(1.0 - t) + tol
        })
    }

    /// Non-positive values with the graph inside the closed disk bounded by C.
    pub fn in_lower_disk(&self, tol: f64) -> bool {
        (0..=self.n()).all(|i| {
            let (t, h) = (self.t(i), self.values[i]);
            h <= tol && t * t + h * h <= t + h + tol
        })
    }

    /// Checks symmetry, endpoints, Lipschitz bound and the strength-specific region.
    pub fn check_invariants(&self, strength: Strength) -> std::result::Result<(), String> {
        let n = self.n();
        if self.values[0] != 0.0 || self.values[n] != 0.0 {
            return Err("endpoint values must be zero".into());
        }
        if (0..=n).any(|i| self.values[i] != self.values[n - i]) {
            return Err("graph is not symmetric".into());
        }
        let lip = self.lipschitz_constant();
        if lip > 1.0 + TAU_LIP {
            return Err(format!("Lipschitz constant {lip} exceeds 1"));
        }
        let ok = match strength {
            Strength::Small => self.in_lower_disk(1e-12),
            Strength::Large => self.in_triangle(1e-12),
            Strength::Other => true,
        };
        if !ok {
            return Err("graph leaves its admissible region".into());
        }
        Ok(())
    }

    /// Graph as an open polyline from O to S.
    pub fn polyline(&self) -> Polyline {
        Polyline::open((0..=self.n()).map(|i| PlanePoint::new(self.t(i), self.values[i])).collect())
    }
}

fn require(p: &ParamPoint, strength: Strength) -> Result<()> {
    if p.strength_class() != strength {
        return Err(Error::Domain(format!("operator requires {strength:?} strength")));
    }
    Ok(())
}

/// Lower half of the preimage of the graph, computed node by node.
///
/// Along a graph with slopes in `[-1, 1]` the first radicand decreases strictly, so for
/// each target abscissa `x_i <= 1/2` the graph point whose `x-` preimage equals `x_i` is
/// found by one linear solve inside a bracketing segment.
pub fn lower_preimage_graph(p: &ParamPoint, h: &LipGraph) -> Result<LipGraph> {
    let (mu, e) = (p.mu(), p.epsilon());
    let c = 4.0 / (mu * (1.0 - 2.0 * e));
    let n = h.n();
    let s: Vec<f64> = (0..=n).map(|i| c * ((1.0 - e) * h.t(i) - e * h.values[i])).collect();
    if s[n] < 1.0 {
        return Err(Error::NoL1Intersection);
    }
    let mut out = vec![0.0; n + 1];
    for (i, slot) in out.iter_mut().enumerate().take(n / 2 + 1) {
        let x = i as f64 / n as f64;
        let target = 4.0 * x * (1.0 - x);
        // first node with s >= target
        let j = s.partition_point(|&v| v < target).clamp(1, n);
        let (s0, s1) = (s[j - 1], s[j]);
        let w = if s1 > s0 { ((target - s0) / (s1 - s0)).clamp(0.0, 1.0) } else { 1.0 };
        let tt = h.t(j - 1) + w * (h.t(j) - h.t(j - 1));
        let hh = h.values[j - 1] + w * (h.values[j] - h.values[j - 1]);
        *slot = lower_root(c * ((1.0 - e) * hh - e * tt));
    }
    for i in n / 2 + 1..=n {
        out[i] = out[n - i];
    }
    LipGraph::new(out)
}

/// Samples an x-monotone polyline at the grid abscissas.
fn sample_graph(poly: &Polyline, n: usize) -> Vec<f64> {
    let v = poly.vertices();
    (0..=n)
        .map(|i| {
            let x = i as f64 / n as f64;
            let j = v.partition_point(|q| q.x < x).clamp(1, v.len() - 1);
            let (a, b) = (v[j - 1], v[j]);
            let w = if b.x > a.x { ((x - a.x) / (b.x - a.x)).clamp(0.0, 1.0) } else { 1.0 };
            a.y + w * (b.y - a.y)
        })
        .collect()
}

/// Small-strength operator: preimage of the graph as curves, keeping the lower graph.
pub fn small_strength_operator(p: &ParamPoint, g: &LipGraph) -> Result<LipGraph> {
    require(p, Strength::Small)?;
    let opts = PreimageOptions { resample: 0, max_spacing: 0.25 / g.n() as f64 };
    let pieces = polyline_preimage_with(p, &g.polyline(), opts)?;
    if pieces.len() != 2 {
        return Err(Error::BranchTopology { found: pieces.len() });
    }
    let lower = pieces
        .iter()
        .find(|c| c.first().is_some_and(|z| z.dist(PlanePoint::ORIGIN) < 1e-9))
        .ok_or(Error::BranchTopology { found: pieces.len() })?;
    LipGraph::new(sample_graph(lower, g.n()))
}

/// Large-strength operator on `Lip1` graphs inside the triangle.
pub fn large_strength_operator(p: &ParamPoint, h: &LipGraph) -> Result<LipGraph> {
    require(p, Strength::Large)?;
    lower_preimage_graph(p, h)
}

/// The four pieces of the curve and their closed assembly O -> S -> S1 -> S2 -> O.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GammaCurve {
    pub bottom: Polyline,
    pub top: Polyline,
    pub left: Polyline,
    pub right: Polyline,
    pub assembled: Polyline,
}

impl GammaCurve {
    /// Collage of a symmetric graph `g`: bottom `(t, g)`, top `(t, 1-g)`, left `(g, t)`,
    /// right `(1-g, t)`.
    pub fn from_graph(g: &LipGraph) -> Self {
        let pts = |f: &dyn Fn(f64, f64) -> PlanePoint| -> Polyline {
            Polyline::open((0..=g.n()).map(|i| f(g.t(i), g.values()[i])).collect())
        };
        let bottom = pts(&|t, v| PlanePoint::new(t, v));
        let top = pts(&|t, v| PlanePoint::new(t, 1.0 - v));
        let left = pts(&|t, v| PlanePoint::new(v, t));
        let right = pts(&|t, v| PlanePoint::new(1.0 - v, t));
        let assembled = assemble(&bottom, &right, &top, &left);
        Self { bottom, top, left, right, assembled }
    }

    pub fn pieces(&self) -> [&Polyline; 4] {
        [&self.bottom, &self.top, &self.left, &self.right]
    }
}

/// Joins bottom (O->S), right (S->S1), top (S2->S1) and left (O->S2) into a closed curve.
fn assemble(bottom: &Polyline, right: &Polyline, top: &Polyline, left: &Polyline) -> Polyline {
    let mut v: Vec<PlanePoint> = bottom.vertices().to_vec();
    v.extend(right.vertices().iter().skip(1));
    v.extend(top.vertices().iter().rev().skip(1));
    v.extend(left.vertices().iter().rev().skip(1));
    Polyline::closed(v)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// Small strength above the pitchfork locus.
    Contraction,
    /// Small strength at or below the pitchfork locus.
    Monotone,
    /// Negative coupling, iterating from the null function.
    LargeStrength,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GammaReport {
    pub regime: Regime,
    pub iterations: usize,
    pub last_change: f64,
}

/// Iterates `op` from `seed` until the sup-norm change drops below `tol`.
/// `on_step(previous, next)` sees every pair of consecutive iterates.
pub fn iterate_operator(
    seed: LipGraph,
    max_iters: usize,
    tol: f64,
    op: impl Fn(&LipGraph) -> Result<LipGraph>,
    mut on_step: impl FnMut(&LipGraph, &LipGraph),
) -> Result<(LipGraph, usize, f64)> {
    let mut g = seed;
    let mut change = f64::INFINITY;
    for it in 1..=max_iters {
        let next = op(&g)?;
        change = next.sup_distance(&g);
        on_step(&g, &next);
        g = next;
        if change < tol {
            return Ok((g, it, change));
        }
    }
    Err(Error::NotConverged { iterations: max_iters, last_change: change, last: Box::new(g) })
}

/// Converged invariant curve for `mu <= mu1(epsilon)`.
pub fn build_gamma(p: &ParamPoint, n: usize, max_iters: usize, tol: f64) -> Result<(GammaCurve, GammaReport)> {
    let loci = p.loci();
    let mu1 = loci.mu1.ok_or_else(|| Error::Domain("no invariant curve construction for this coupling".into()))?;
    if p.mu() > mu1 {
        return Err(Error::Domain(format!("mu = {} exceeds mu1 = {mu1}", p.mu())));
    }
    let (graph, regime, iterations, last_change) = match p.strength_class() {
        Strength::Small => {
            let regime = if p.mu() > loci.mu0.unwrap_or(f64::INFINITY) { Regime::Contraction } else { Regime::Monotone };
            let (g, it, ch) = iterate_operator(LipGraph::circle_arc(n)?, max_iters, tol, |g| small_strength_operator(p, g), |_, _| {})?;
            (g, regime, it, ch)
        }
        Strength::Large => {
            let (g, it, ch) = iterate_operator(LipGraph::zero(n)?, max_iters, tol, |h| large_strength_operator(p, h), |_, _| {})?;
            (g, Regime::LargeStrength, it, ch)
        }
        Strength::Other => unreachable!("mu1 is absent for other couplings"),
    };
    Ok((GammaCurve::from_graph(&graph), GammaReport { regime, iterations, last_change }))
}

/// One-sided invariance defect: how far the images of `samples` points of the curve
/// land from the curve itself.
pub fn invariance_defect(p: &ParamPoint, curve: &Polyline, samples: usize) -> f64 {
    let pts: Vec<PlanePoint> = curve.resample(samples).vertices().iter().map(|&z| map_eval(p, z)).collect();
    directed_hausdorff(&pts, std::slice::from_ref(curve))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GammaStage {
    pub index: usize,
    pub bottom: Polyline,
    pub top: Polyline,
    pub left: Polyline,
    pub right: Polyline,
    pub assembled: Polyline,
    /// First point of the right piece on L1, walking from S towards S1.
    pub q: PlanePoint,
    pub hausdorff_to_previous: Option<f64>,
    /// Preimage pieces other than the bottom and top arcs.
    pub extra_fragments: usize,
}

const S: PlanePoint = PlanePoint::new(1.0, 0.0);
const S1: PlanePoint = PlanePoint::new(1.0, 1.0);
const S2: PlanePoint = PlanePoint::new(0.0, 1.0);

/// Index of the segment holding the first L1 crossing of `right` and the crossing point.
fn first_l1_crossing(geo: &PlaneGeometry, right: &Polyline, stage: usize) -> Result<(usize, PlanePoint)> {
    let v = right.vertices();
    let on_ray = |z: PlanePoint| {
        let d = geo.ray_l1.direction;
        (z.x - geo.cone_vertex.x) * d.x + (z.y - geo.cone_vertex.y) * d.y >= -TAU_GEO
    };
    let dist = |z: PlanePoint| geo.signed_distances(z).0;
    for j in 1..v.len() {
        let (a, b) = (v[j - 1], v[j]);
        let (da, db) = (dist(a), dist(b));
        if da.abs() <= TAU_GEO && j > 1 && on_ray(a) {
            let before = dist(v[j - 2]);
            if before > TAU_GEO && db > TAU_GEO {
                return Err(Error::OrderAmbiguity { stage });
            }
        }
        if da > 0.0 && db <= 0.0 {
            let z = a.lerp(b, da / (da - db));
            if on_ray(z) {
                return Ok((j, z));
            }
        }
    }
    Err(Error::NoL1Intersection)
}

/// Stage sequence for negative coupling with `mu1 < mu < 4`.
pub fn build_gamma_sequence(p: &ParamPoint, n: usize, resample: usize) -> Result<Vec<GammaStage>> {
    require(p, Strength::Large)?;
    let mu1 = p.loci().mu1.unwrap();
    if !(p.mu() > mu1 && p.mu() < 4.0) {
        return Err(Error::Domain(format!("stage sequence needs mu1 = {mu1} < mu < 4")));
    }
    let resample = resample.max(16);
    let geo = PlaneGeometry::new(p);
    let opts = PreimageOptions::new(resample);
    let mut bottom = Polyline::open(vec![PlanePoint::ORIGIN, S]).resample(resample);
    let mut right = Polyline::open(vec![S, S1]).resample(resample);
    let mut previous: Option<Polyline> = None;
    let mut stages = Vec::with_capacity(n);
    for index in 1..=n {
        let (j, q) = first_l1_crossing(&geo, &right, index - 1)?;
        let mut arc: Vec<PlanePoint> = bottom.vertices().to_vec();
        arc.extend(right.vertices()[1..j].iter().copied());
        arc.push(q);
        let pieces = polyline_preimage_with(p, &Polyline::open(arc), opts)?;
        let touches = |c: &Polyline, a: PlanePoint, b: PlanePoint| {
            let (f, l) = (c.first().unwrap(), c.last().unwrap());
            if f.dist(a) < 1e-9 && l.dist(b) < 1e-9 {
                Some(c.clone())
            } else if f.dist(b) < 1e-9 && l.dist(a) < 1e-9 {
                Some(c.reversed())
            } else {
                None
            }
        };
        let new_bottom = pieces.iter().find_map(|c| touches(c, PlanePoint::ORIGIN, S));
        let new_top = pieces.iter().find_map(|c| touches(c, S2, S1));
        let (Some(b), Some(t)) = (new_bottom, new_top) else {
            return Err(Error::BranchTopology { found: pieces.len() });
        };
        let left = b.map(PlanePoint::reflect);
        let r = t.map(PlanePoint::reflect);
        let assembled = assemble(&b, &r, &t, &left);
        let hausdorff_to_previous = previous
            .as_ref()
            .map(|prev| hausdorff(std::slice::from_ref(prev), std::slice::from_ref(&assembled)));
        previous = Some(assembled.clone());
        stages.push(GammaStage {
            index,
            bottom: b.clone(),
            top: t,
            left,
            right: r.clone(),
            assembled,
            q,
            hausdorff_to_previous,
            extra_fragments: pieces.len() - 2,
        });
        bottom = b;
        right = r;
    }
    Ok(stages)
}

/// True when the x-coordinates along the polyline never decrease.
pub fn is_x_monotone(curve: &Polyline) -> bool {
    curve.vertices().windows(2).all(|w| w[1].x >= w[0].x)
}

/// Maximum preimage depth explored by [`exterior_bounded_witnesses`].
pub const WITNESS_MAX_DEPTH: usize = 64;
/// Default distance a witness must keep from the curve.
pub const WITNESS_MARGIN: f64 = 1e-2;
/// A forward orbit closer than this to O is taken to have landed on it.
pub const LANDING_TOL: f64 = 1e-6;

/// Points outside `gamma` (by more than `margin`) whose orbits are bounded.
///
/// The bounded set is measure zero past the L1 crossing regime, so candidates come from
/// backward iteration: the preimage tree of O, explored level by level until
/// `search_budget` points have been generated. Every such point lands on the fixed point
/// O, which is checked by iterating forward: the orbit must stay out of the escape
/// region for up to [`WITNESS_STEPS`] steps and come within [`LANDING_TOL`] of O, after
/// which it is bounded forever.
pub fn exterior_bounded_witnesses(p: &ParamPoint, gamma: &Polyline, search_budget: usize, margin: f64) -> Vec<PlanePoint> {
    use rayon::prelude::*;
    if search_budget == 0 || gamma.len() < 3 {
        return Vec::new();
    }
    let tree = crate::preimage::preimage_tree(p, PlanePoint::ORIGIN, WITNESS_MAX_DEPTH, search_budget, None);
    let index = SegmentIndex::new(std::slice::from_ref(gamma));
    let strength = p.strength_class();
    let lands_on_origin = |z: PlanePoint| {
        let mut w = z;
        for _ in 0..WITNESS_STEPS {
            if w.norm() <= LANDING_TOL {
                return true;
            }
            if crate::orbit::has_escaped(strength, w) {
                return false;
            }
            w = map_eval(p, w);
        }
        false
    };
    let points: Vec<PlanePoint> = tree.points().collect();
    let mut found: Vec<PlanePoint> = points
        .into_par_iter()
        .filter(|&z| !gamma.encloses(z) && index.distance(z) > margin && lands_on_origin(z))
        .collect();
    found.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    found.dedup();
    found
}
