//! Backward dynamics: preimage trees, mixed forward/backward clouds, and preimages
//! of polylines under the map.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{PlaneGeometry, PlanePoint, Polyline, Rect};
use crate::map::{branch_root, lower_root, map_eval, preimages, radicand_complements, BRANCHES};
use crate::orbit::has_escaped;
use crate::params::{ParamPoint, TAU_GEO};

pub const DEFAULT_POINT_BUDGET: usize = 10_000_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PreimageTree {
    pub root: PlanePoint,
    /// `levels[0] = [root]`, `levels[n]` holds the n-th preimages kept.
    pub levels: Vec<Vec<PlanePoint>>,
    pub budget_exhausted: bool,
}

impl PreimageTree {
    pub fn total_points(&self) -> usize {
        self.levels.iter().map(Vec::len).sum()
    }

    pub fn points(&self) -> impl Iterator<Item = PlanePoint> + '_ {
        self.levels.iter().flatten().copied()
    }
}

/// Breadth-first expansion of `root` through all inverse branches.
pub fn preimage_tree(p: &ParamPoint, root: PlanePoint, depth: usize, point_budget: usize, clip: Option<Rect>) -> PreimageTree {
    let mut levels = vec![vec![root]];
    let mut total = 1usize;
    let mut exhausted = false;
    for _ in 0..depth {
        if total >= point_budget {
            exhausted = true;
            break;
        }
        let prev = levels.last().unwrap();
        if prev.is_empty() {
            levels.push(Vec::new());
            continue;
        }
        let mut next: Vec<PlanePoint> = prev
            .par_iter()
            .flat_map_iter(|&z| preimages(p, z))
            .filter(|w| clip.is_none_or(|c| c.contains(*w)))
            .collect();
        let room = point_budget - total;
        if next.len() > room {
            next.truncate(room);
            exhausted = true;
        }
        total += next.len();
        levels.push(next);
        if exhausted {
            break;
        }
    }
    PreimageTree { root, levels, budget_exhausted: exhausted }
}

/// Union of the preimage trees of `F^j(seed)` for `j = 0..=n_forward`, sharing one budget.
pub fn mixed_cloud(p: &ParamPoint, seed: PlanePoint, n_forward: usize, depth_back: usize, budget: usize) -> Result<Vec<PlanePoint>> {
    if n_forward + depth_back == 0 {
        return Err(Error::InvalidArgument("n_forward + depth_back must be positive".into()));
    }
    let s = p.strength_class();
    let mut z = seed;
    let mut out = Vec::new();
    for j in 0..=n_forward {
        if has_escaped(s, z) {
            return Err(Error::Escaped { step: j as u64 });
        }
        let remaining = budget.saturating_sub(out.len());
        if remaining == 0 {
            break;
        }
        let tree = preimage_tree(p, z, depth_back, remaining, None);
        out.extend(tree.points());
        z = map_eval(p, z);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum End {
    /// Endpoint of an open input curve strictly inside the cone.
    Free,
    OnL1,
    OnL2,
    Vertex,
}

/// A curve point with the complements `s = 1 - r` of its two radicands.
#[derive(Debug, Clone, Copy)]
struct Node {
    z: PlanePoint,
    sx: f64,
    sy: f64,
}

impl Node {
    fn new(p: &ParamPoint, z: PlanePoint) -> Self {
        let (sx, sy) = radicand_complements(p, z);
        Self { z, sx: snap(sx), sy: snap(sy) }
    }

    fn rx(&self) -> f64 {
        1.0 - self.sx
    }

    fn ry(&self) -> f64 {
        1.0 - self.sy
    }

    fn inside(&self) -> bool {
        self.sx <= 1.0 && self.sy <= 1.0
    }

    fn end_kind(&self) -> End {
        match (self.sx == 1.0, self.sy == 1.0) {
            (true, true) => End::Vertex,
            (true, false) => End::OnL1,
            (false, true) => End::OnL2,
            (false, false) => End::Free,
        }
    }

    fn lerp(&self, o: &Node, t: f64) -> Node {
        Node {
            z: self.z.lerp(o.z, t),
            sx: self.sx + t * (o.sx - self.sx),
            sy: self.sy + t * (o.sy - self.sy),
        }
    }

    fn image(&self, branch: (f64, f64)) -> PlanePoint {
        PlanePoint::new(branch_root(self.sx, branch.0), branch_root(self.sy, branch.1))
    }

    /// Distance between the images of two nodes under any single branch.
    fn image_gap(&self, o: &Node) -> f64 {
        let dx = lower_root(self.sx.min(1.0)) - lower_root(o.sx.min(1.0));
        let dy = lower_root(self.sy.min(1.0)) - lower_root(o.sy.min(1.0));
        dx.hypot(dy)
    }
}

/// Radicands within rounding of zero are treated as exactly on the boundary.
fn snap(s: f64) -> f64 {
    if (1.0 - s).abs() <= 1e-13 {
        1.0
    } else {
        s
    }
}

/// Parameter interval of the segment `a -> b` inside the cone, if any.
fn inside_interval(a: &Node, b: &Node) -> Option<(f64, f64)> {
    let mut lo: f64 = 0.0;
    let mut hi: f64 = 1.0;
    for (ra, rb) in [(a.rx(), b.rx()), (a.ry(), b.ry())] {
        match (ra >= 0.0, rb >= 0.0) {
            (true, true) => {}
            (false, false) => return None,
            (true, false) => hi = hi.min(ra / (ra - rb)),
            (false, true) => lo = lo.max(ra / (ra - rb)),
        }
    }
    (lo <= hi).then_some((lo, hi))
}

/// Point where the segment meets the cone boundary at parameter `t`; the binding
/// radicands are set to exactly zero.
fn boundary_node(p: &ParamPoint, a: &Node, b: &Node, t: f64) -> Node {
    if t == 0.0 {
        return *a;
    }
    if t == 1.0 {
        return *b;
    }
    let mut n = a.lerp(b, t);
    let geo = PlaneGeometry::new(p);
    if n.z.dist(geo.cone_vertex) <= TAU_GEO {
        return Node { z: geo.cone_vertex, sx: 1.0, sy: 1.0 };
    }
    if n.rx().abs() <= 1e-12 {
        n.sx = 1.0;
    }
    if n.ry().abs() <= 1e-12 {
        n.sy = 1.0;
    }
    if n.sx != 1.0 && n.sy != 1.0 {
        // t came from one of the two radicands; pin the nearer one
        if n.rx().abs() < n.ry().abs() {
            n.sx = 1.0;
        } else {
            n.sy = 1.0;
        }
    }
    n
}

#[derive(Debug, Clone)]
struct Run {
    nodes: Vec<Node>,
    start: End,
    end: End,
    closed: bool,
}

/// Splits the curve into maximal pieces inside the cone.
fn split_runs(p: &ParamPoint, curve: &Polyline) -> Vec<Run> {
    let nodes: Vec<Node> = curve.vertices().iter().map(|&z| Node::new(p, z)).collect();
    let n = nodes.len();
    let seg_count = if curve.is_closed() { n } else { n - 1 };
    let mut runs: Vec<Run> = Vec::new();
    let mut current: Option<Vec<Node>> = None;
    let mut current_start = End::Free;
    // index in `runs` of the run that began at vertex 0 of a closed curve
    let mut wraps_from_start = false;

    if nodes[0].inside() {
        current = Some(vec![nodes[0]]);
        current_start = nodes[0].end_kind();
        wraps_from_start = curve.is_closed();
    }

    for i in 0..seg_count {
        let (a, b) = (nodes[i], nodes[(i + 1) % n]);
        let interval = inside_interval(&a, &b);
        match (current.as_mut(), interval) {
            (Some(run), Some((_, hi))) if hi >= 1.0 => run.push(b),
            (Some(run), iv) => {
                let hi = iv.map_or(0.0, |(_, h)| h);
                let exit = boundary_node(p, &a, &b, hi);
                if exit.z != run.last().unwrap().z {
                    run.push(exit);
                }
                let end = exit.end_kind();
                let nodes = current.take().unwrap();
                runs.push(Run { nodes, start: current_start, end, closed: false });
                // the segment may re-enter later on; not possible for a straight
                // segment against a convex cone, so continue
            }
            (None, Some((lo, hi))) => {
                let entry = boundary_node(p, &a, &b, lo);
                if hi >= 1.0 {
                    current = Some(vec![entry, b]);
                    current_start = entry.end_kind();
                } else {
                    let exit = boundary_node(p, &a, &b, hi);
                    runs.push(Run {
                        nodes: vec![entry, exit],
                        start: entry.end_kind(),
                        end: exit.end_kind(),
                        closed: false,
                    });
                }
            }
            (None, None) => {}
        }
    }

    if let Some(mut run) = current.take() {
        if curve.is_closed() {
            // the closing segment returned to vertex 0
            if wraps_from_start && runs.is_empty() {
                run.pop();
                runs.push(Run { nodes: run, start: End::Free, end: End::Free, closed: true });
            } else if wraps_from_start {
                let first = runs.remove(0);
                run.pop();
                run.extend(first.nodes);
                runs.insert(0, Run { nodes: run, start: current_start, end: first.end, closed: false });
            } else {
                runs.push(Run { end: run.last().unwrap().end_kind(), nodes: run, start: current_start, closed: false });
            }
        } else {
            let end = run.last().unwrap().end_kind();
            runs.push(Run { nodes: run, start: current_start, end, closed: false });
        }
    }
    runs.retain(|r| r.nodes.len() >= 2 && r.nodes.iter().any(|n| n.z != r.nodes[0].z));
    runs
}

/// Inserts nodes along each segment until every branch image gap is at most `h`.
fn refine(nodes: &[Node], closed: bool, h: f64) -> Vec<Node> {
    fn split(a: &Node, b: &Node, h: f64, depth: u32, out: &mut Vec<Node>) {
        if depth < 48 && a.image_gap(b) > h {
            let m = a.lerp(b, 0.5);
            split(a, &m, h, depth + 1, out);
            split(&m, b, h, depth + 1, out);
        } else {
            out.push(*b);
        }
    }
    let mut out = vec![nodes[0]];
    for w in nodes.windows(2) {
        split(&w[0], &w[1], h, 0, &mut out);
    }
    if closed {
        split(nodes.last().unwrap(), &nodes[0], h, 0, &mut out);
        out.pop();
    }
    out
}

/// Options for [`polyline_preimage_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PreimageOptions {
    /// Output vertices per curve; 0 keeps the raw refined vertices.
    pub resample: usize,
    /// Maximum spacing between consecutive preimage vertices before resampling.
    pub max_spacing: f64,
}

impl PreimageOptions {
    pub fn new(resample: usize) -> Self {
        let max_spacing = if resample == 0 { 1e-3 } else { (0.5 / resample as f64).min(1e-3) };
        Self { resample, max_spacing }
    }
}

/// Preimage of a polyline: all connected branches, each resampled to `resample` vertices.
pub fn polyline_preimage(p: &ParamPoint, curve: &Polyline, resample: usize) -> Result<Vec<Polyline>> {
    polyline_preimage_with(p, curve, PreimageOptions::new(resample))
}

pub fn polyline_preimage_with(p: &ParamPoint, curve: &Polyline, opts: PreimageOptions) -> Result<Vec<Polyline>> {
    if curve.len() < 2 {
        return Err(Error::DegenerateInput(format!("{} vertices", curve.len())));
    }
    let runs = split_runs(p, curve);
    let mut out = Vec::new();
    for run in runs {
        let nodes = refine(&run.nodes, run.closed, opts.max_spacing);
        let chains: Vec<Vec<PlanePoint>> = BRANCHES
            .par_iter()
            .map(|&b| nodes.iter().map(|n| n.image(b)).collect())
            .collect();
        for (verts, closed) in glue(chains, run.start, run.end, run.closed) {
            let poly = Polyline::new(verts, closed);
            if poly.len() < 2 {
                continue;
            }
            out.push(if opts.resample > 0 { poly.resample(opts.resample) } else { poly });
        }
    }
    Ok(out)
}

/// Joins the four branch chains of one run at its boundary endpoints.
///
/// On L1 the branches `(-, s)` and `(+, s)` meet; on L2 `(s, -)` and `(s, +)`. Chains
/// ending at the cone vertex are not joined to each other.
fn glue(chains: Vec<Vec<PlanePoint>>, start: End, end: End, closed: bool) -> Vec<(Vec<PlanePoint>, bool)> {
    if closed {
        return chains.into_iter().map(|c| (c, true)).collect();
    }
    // partner[(chain, side)] with side 0 = start, 1 = end
    let partner_at = |kind: End, b: usize| -> Option<usize> {
        match kind {
            End::OnL1 => Some(b ^ 2),
            End::OnL2 => Some(b ^ 1),
            End::Free | End::Vertex => None,
        }
    };
    let partner = |b: usize, side: usize| partner_at(if side == 0 { start } else { end }, b);
    let mut used = [false; 4];
    let mut result = Vec::new();

    let walk = |b0: usize, side0: usize, used: &mut [bool; 4]| {
        let mut verts: Vec<PlanePoint> = Vec::new();
        let (mut b, mut side) = (b0, side0);
        loop {
            used[b] = true;
            let c = &chains[b];
            if side == 0 {
                verts.extend(c.iter().skip(usize::from(!verts.is_empty())));
            } else {
                verts.extend(c.iter().rev().skip(usize::from(!verts.is_empty())));
            }
            let exit_side = 1 - side;
            match partner(b, exit_side) {
                Some(nb) if !used[nb] => {
                    b = nb;
                    side = exit_side;
                }
                Some(_) => return (verts, true),
                None => return (verts, false),
            }
        }
    };

    // open paths first, starting from free ends in branch order
    for b in 0..4 {
        for side in 0..2 {
            if !used[b] && partner(b, side).is_none() {
                result.push(walk(b, side, &mut used));
            }
        }
    }
    for b in 0..4 {
        if !used[b] {
            result.push(walk(b, 0, &mut used));
        }
    }
    result
        .into_iter()
        .map(|(mut v, closed)| {
            let ends_meet = v.len() > 2 && v[0].dist(*v.last().unwrap()) <= 1e-12;
            if ends_meet || closed {
                if ends_meet {
                    v.pop();
                }
                (v, true)
            } else {
                (v, false)
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeedCurve {
    /// The circle `x^2 + y^2 = x + y`.
    CircleC,
    /// The boundary of the unit square.
    BoundaryQ,
}

impl SeedCurve {
    pub fn polyline(self, p: &ParamPoint, n: usize) -> Polyline {
        let g = PlaneGeometry::new(p);
        match self {
            SeedCurve::CircleC => g.circle_c(n),
            SeedCurve::BoundaryQ => g.boundary_q(n),
        }
    }
}

/// Applies [`polyline_preimage`] `n` times starting from a seed curve.
pub fn iterated_curve_preimage(p: &ParamPoint, seed: SeedCurve, n: usize, resample: usize) -> Result<Vec<Polyline>> {
    let mut curves = vec![seed.polyline(p, resample.max(4))];
    for _ in 0..n {
        let mut next = Vec::new();
        for c in &curves {
            next.extend(polyline_preimage(p, c, resample)?);
        }
        curves = next;
    }
    Ok(curves)
}
