//! Escape-time rasters, basin rasters, connected components and the annulus taxonomy.

use std::sync::atomic::{AtomicBool, Ordering};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Grid, PlaneGeometry, PlanePoint, Rect};
use crate::map::map_eval;
use crate::orbit::{escape_time, estimate_attractor, has_escaped, AttractorEstimate};
use crate::params::ParamPoint;

pub const DEFAULT_N_MAX: u64 = 2000;
/// Escape cap for component pictures. The bounded set is often measure zero past
/// `mu = 4`, so components are read from the sets escaping within a few steps, which
/// are bounded by the first few preimages of the escape boundary.
pub const COMPONENT_DEPTH: u64 = 4;
/// Components below this plane area are treated as raster noise when counting.
pub const MIN_COMPONENT_AREA: f64 = 2e-3;
/// Share of a component's mapped cell centers that must land in one component for
/// [`ComponentReport::maps_into`] to be set.
pub const IMAGE_SHARE: f64 = 0.9;
/// Consecutive iterates inside the dilated attractor cells needed to call a cell captured.
pub const CAPTURE_STREAK: u32 = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BasinClass {
    ThisAttractor,
    OtherBounded,
    Escaped,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Cell {
    /// Not rendered (cancelled or past the deadline).
    Unset,
    Escaped(u32),
    Bounded,
    Basin(BasinClass),
}

impl Cell {
    pub fn is_bounded(self) -> bool {
        matches!(self, Cell::Bounded | Cell::Basin(BasinClass::ThisAttractor | BasinClass::OtherBounded))
    }

    pub fn is_escaped(self) -> bool {
        matches!(self, Cell::Escaped(_) | Cell::Basin(BasinClass::Escaped))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RasterMeta {
    pub params: ParamPoint,
    pub n_max: u64,
    pub supersample: u32,
    /// Some rows were skipped because the render was cancelled or timed out.
    pub partial: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Raster {
    pub grid: Grid,
    pub cells: Vec<Cell>,
    pub meta: RasterMeta,
}

impl Raster {
    pub fn width(&self) -> usize {
        self.grid.width
    }

    pub fn height(&self) -> usize {
        self.grid.height
    }

    pub fn at(&self, col: usize, row: usize) -> Cell {
        self.cells[row * self.grid.width + col]
    }

    pub fn count(&self, pred: impl Fn(Cell) -> bool) -> usize {
        self.cells.iter().filter(|&&c| pred(c)).count()
    }
}

/// Cancellation flag and optional deadline checked before each row.
#[derive(Debug, Default)]
pub struct RenderControl {
    pub cancel: AtomicBool,
    pub deadline: Option<Instant>,
}

impl RenderControl {
    pub fn with_deadline(deadline: Instant) -> Self {
        Self { cancel: AtomicBool::new(false), deadline: Some(deadline) }
    }

    pub fn stopped(&self) -> bool {
        self.cancel.load(Ordering::Relaxed) || self.deadline.is_some_and(|d| Instant::now() >= d)
    }
}

fn check_resolution(resolution: (usize, usize)) -> Result<()> {
    if resolution.0 < 2 || resolution.1 < 2 {
        return Err(Error::InvalidArgument("resolution must be at least 2x2".into()));
    }
    Ok(())
}

/// Renders rows in parallel; rows skipped after a stop request stay [`Cell::Unset`].
fn render_rows(grid: &Grid, control: &RenderControl, cell: impl Fn(usize, usize) -> Cell + Sync) -> (Vec<Cell>, bool) {
    let rows: Vec<Option<Vec<Cell>>> = (0..grid.height)
        .into_par_iter()
        .map(|row| {
            if control.stopped() {
                return None;
            }
            Some((0..grid.width).map(|col| cell(col, row)).collect())
        })
        .collect();
    let partial = rows.iter().any(Option::is_none);
    let cells = rows
        .into_iter()
        .flat_map(|r| r.unwrap_or_else(|| vec![Cell::Unset; grid.width]))
        .collect();
    (cells, partial)
}

/// Per-cell escape time at the cell center.
pub fn render_escape(p: &ParamPoint, window: Rect, resolution: (usize, usize), n_max: u64) -> Result<Raster> {
    render_escape_with(p, window, resolution, n_max, 1, &RenderControl::default())
}

/// As [`render_escape`] with `s x s` supersampling (a cell is bounded if any sample is)
/// and a cancellation control.
pub fn render_escape_with(
    p: &ParamPoint,
    window: Rect,
    resolution: (usize, usize),
    n_max: u64,
    supersample: u32,
    control: &RenderControl,
) -> Result<Raster> {
    check_resolution(resolution)?;
    let grid = Grid::new(window, resolution.0, resolution.1)?;
    let s = supersample.max(1);
    let (dx, dy) = (grid.dx(), grid.dy());
    let (cells, partial) = render_rows(&grid, control, |col, row| {
        if s == 1 {
            return match escape_time(p, grid.center(col, row), n_max) {
                Some(k) => Cell::Escaped(k as u32),
                None => Cell::Bounded,
            };
        }
        let c = grid.center(col, row);
        let mut worst = 0u64;
        for i in 0..s {
            for j in 0..s {
                let z = PlanePoint::new(
                    c.x + dx * ((i as f64 + 0.5) / s as f64 - 0.5),
                    c.y + dy * ((j as f64 + 0.5) / s as f64 - 0.5),
                );
                match escape_time(p, z, n_max) {
                    None => return Cell::Bounded,
                    Some(k) => worst = worst.max(k),
                }
            }
        }
        Cell::Escaped(worst as u32)
    });
    Ok(Raster { grid, cells, meta: RasterMeta { params: *p, n_max, supersample: s, partial } })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    Bounded,
    Escaped,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Topology {
    Disk,
    Annulus,
    Other,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AnnulusClass {
    /// Both boundary circles meet both rays.
    Large,
    /// Exactly one boundary circle meets both rays.
    Singular,
    /// Neither boundary circle meets both rays.
    Small,
}

/// Whether a boundary curve meets the thick rasterizations of L1 and L2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct RayContact {
    pub l1: bool,
    pub l2: bool,
}

impl RayContact {
    pub fn both(&self) -> bool {
        self.l1 && self.l2
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComponentReport {
    pub label: u32,
    pub cell_count: usize,
    /// Area in plane units.
    pub area: f64,
    /// Bounding box `(col_min, row_min, col_max, row_max)`.
    pub bbox: (usize, usize, usize, usize),
    pub touches_border: bool,
    #[serde(rename = "touchesL1")]
    pub touches_l1: bool,
    #[serde(rename = "touchesL2")]
    pub touches_l2: bool,
    pub holes: usize,
    pub topology: Topology,
    pub outer_boundary: RayContact,
    /// Present for annuli.
    pub inner_boundary: Option<RayContact>,
    pub annulus_class: Option<AnnulusClass>,
    /// Label of the component receiving the images of this component's cells, when one
    /// receives at least [`IMAGE_SHARE`] of them.
    pub maps_into: Option<u32>,
}

impl ComponentReport {
    pub fn is_significant(&self) -> bool {
        self.area >= MIN_COMPONENT_AREA
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Labeling {
    pub width: usize,
    pub height: usize,
    /// 0 for background, otherwise `label`.
    pub labels: Vec<u32>,
    pub components: Vec<ComponentReport>,
}

impl Labeling {
    pub fn component(&self, label: u32) -> Option<&ComponentReport> {
        label.checked_sub(1).and_then(|i| self.components.get(i as usize))
    }

    pub fn label_at(&self, col: usize, row: usize) -> u32 {
        self.labels[row * self.width + col]
    }

    /// Significant components that do not touch the window border.
    pub fn interior_significant(&self) -> impl Iterator<Item = &ComponentReport> {
        self.components.iter().filter(|c| !c.touches_border && c.is_significant())
    }

    /// Components whose images land in component `label`.
    pub fn preimages_of(&self, label: u32) -> impl Iterator<Item = &ComponentReport> {
        self.components.iter().filter(move |c| c.label != label && c.maps_into == Some(label))
    }
}

struct UnionFind {
    parent: Vec<u32>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self { parent: (0..n as u32).collect() }
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let p = self.parent[x as usize];
            self.parent[x as usize] = self.parent[p as usize];
            x = p;
        }
        x
    }

    fn union(&mut self, a: u32, b: u32) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi as usize] = lo;
        }
    }
}

/// Labels connected regions of a boolean mask with union-find. `eight` selects
/// 8-connectivity instead of 4. Labels are consecutive from 1 in raster order.
pub fn label_mask(mask: &[bool], width: usize, height: usize, eight: bool) -> (Vec<u32>, usize) {
    let mut uf = UnionFind::new(mask.len());
    for r in 0..height {
        for c in 0..width {
            let i = r * width + c;
            if !mask[i] {
                continue;
            }
            if c > 0 && mask[i - 1] {
                uf.union(i as u32, (i - 1) as u32);
            }
            if r > 0 {
                if mask[i - width] {
                    uf.union(i as u32, (i - width) as u32);
                }
                if eight && c > 0 && mask[i - width - 1] {
                    uf.union(i as u32, (i - width - 1) as u32);
                }
                if eight && c + 1 < width && mask[i - width + 1] {
                    uf.union(i as u32, (i - width + 1) as u32);
                }
            }
        }
    }
    let mut remap = vec![0u32; mask.len()];
    let mut labels = vec![0u32; mask.len()];
    let mut next = 0u32;
    for i in 0..mask.len() {
        if mask[i] {
            let root = uf.find(i as u32) as usize;
            if remap[root] == 0 {
                next += 1;
                remap[root] = next;
            }
            labels[i] = remap[root];
        }
    }
    (labels, next as usize)
}

/// Cells whose centers lie within 1.5 cells of each ray.
fn ray_masks(r: &Raster) -> (Vec<bool>, Vec<bool>) {
    let geo = PlaneGeometry::new(&r.meta.params);
    let thick = 1.5 * r.grid.dx().max(r.grid.dy());
    let mut m1 = vec![false; r.grid.len()];
    let mut m2 = vec![false; r.grid.len()];
    for i in 0..r.grid.len() {
        let z = r.grid.center_of_index(i);
        m1[i] = geo.ray_l1.distance(z) <= thick;
        m2[i] = geo.ray_l2.distance(z) <= thick;
    }
    (m1, m2)
}

/// For each label, the label that receives at least [`IMAGE_SHARE`] of its mapped cell centers.
fn image_labels(r: &Raster, labels: &[u32], n: usize) -> Vec<Option<u32>> {
    let p = r.meta.params;
    let pairs: Vec<(u32, u32)> = (0..labels.len())
        .into_par_iter()
        .filter(|&i| labels[i] > 0)
        .map(|i| {
            let z = map_eval(&p, r.grid.center_of_index(i));
            (labels[i], r.grid.index_of(z).map_or(0, |j| labels[j]))
        })
        .collect();
    let mut counts: Vec<std::collections::HashMap<u32, usize>> = vec![Default::default(); n + 1];
    let mut totals = vec![0usize; n + 1];
    for (from, to) in pairs {
        totals[from as usize] += 1;
        if to > 0 {
            *counts[from as usize].entry(to).or_default() += 1;
        }
    }
    (0..=n)
        .map(|l| {
            counts[l]
                .iter()
                .max_by_key(|(to, c)| (**c, std::cmp::Reverse(**to)))
                .filter(|(_, &c)| c as f64 >= IMAGE_SHARE * totals[l] as f64 && totals[l] > 0)
                .map(|(&to, _)| to)
        })
        .collect()
}

/// 4-connected components of the target cells with hole counts and ray contacts.
pub fn label_components(r: &Raster, target: Target) -> Labeling {
    let (w, h) = (r.width(), r.height());
    let mask: Vec<bool> = r
        .cells
        .iter()
        .map(|&c| match target {
            Target::Bounded => c.is_bounded(),
            Target::Escaped => c.is_escaped(),
        })
        .collect();
    let (labels, n) = label_mask(&mask, w, h, false);
    let (l1, l2) = ray_masks(r);

    let mut bbox = vec![(usize::MAX, usize::MAX, 0usize, 0usize); n + 1];
    let mut count = vec![0usize; n + 1];
    for row in 0..h {
        for col in 0..w {
            let l = labels[row * w + col] as usize;
            if l > 0 {
                count[l] += 1;
                let b = &mut bbox[l];
                b.0 = b.0.min(col);
                b.1 = b.1.min(row);
                b.2 = b.2.max(col);
                b.3 = b.3.max(row);
            }
        }
    }

    let images = image_labels(r, &labels, n);
    let components = (1..=n)
        .into_par_iter()
        .map(|l| {
            let (c0, r0, c1, r1) = bbox[l];
            // complement of the component inside the bbox padded by one cell
            let (pw, ph) = (c1 - c0 + 3, r1 - r0 + 3);
            let mut comp = vec![false; pw * ph];
            for rr in 0..ph {
                for cc in 0..pw {
                    let (col, row) = ((cc + c0) as isize - 1, (rr + r0) as isize - 1);
                    let inside = col >= 0
                        && row >= 0
                        && (col as usize) < w
                        && (row as usize) < h
                        && labels[row as usize * w + col as usize] as usize == l;
                    comp[rr * pw + cc] = !inside;
                }
            }
            // 8-connected background is the dual of a 4-connected foreground
            let (bg, nbg) = label_mask(&comp, pw, ph, true);
            let outer_label = bg[0];
            let holes = nbg - 1;
            let mut outer = RayContact::default();
            let mut inner = RayContact::default();
            let mut touches = (false, false);
            let mut touches_border = false;
            for rr in 1..ph - 1 {
                for cc in 1..pw - 1 {
                    if comp[rr * pw + cc] {
                        continue;
                    }
                    let (col, row) = (cc + c0 - 1, rr + r0 - 1);
                    let gi = row * w + col;
                    touches.0 |= l1[gi];
                    touches.1 |= l2[gi];
                    if col == 0 || row == 0 || col == w - 1 || row == h - 1 {
                        touches_border = true;
                    }
                    for (dc, dr) in [(1isize, 0isize), (-1, 0), (0, 1), (0, -1)] {
                        let ni = (rr as isize + dr) as usize * pw + (cc as isize + dc) as usize;
                        if comp[ni] {
                            let contact = if bg[ni] == outer_label { &mut outer } else { &mut inner };
                            contact.l1 |= l1[gi];
                            contact.l2 |= l2[gi];
                        }
                    }
                }
            }
            let topology = match holes {
                0 => Topology::Disk,
                1 => Topology::Annulus,
                _ => Topology::Other,
            };
            let annulus_class = (topology == Topology::Annulus).then(|| match (outer.both(), inner.both()) {
                (true, true) => AnnulusClass::Large,
                (false, false) => AnnulusClass::Small,
                _ => AnnulusClass::Singular,
            });
            ComponentReport {
                label: l as u32,
                cell_count: count[l],
                area: count[l] as f64 * r.grid.cell_area(),
                bbox: bbox[l],
                touches_border,
                touches_l1: touches.0,
                touches_l2: touches.1,
                holes,
                topology,
                outer_boundary: outer,
                inner_boundary: (topology == Topology::Annulus).then_some(inner),
                annulus_class,
                maps_into: images[l],
            }
        })
        .collect();
    Labeling { width: w, height: h, labels, components }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BasinOptions {
    pub n_max: u64,
    pub attractor_transient: u64,
    pub attractor_total: u64,
}

impl Default for BasinOptions {
    fn default() -> Self {
        Self { n_max: DEFAULT_N_MAX, attractor_transient: 10_000, attractor_total: 1_000_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BasinRaster {
    pub raster: Raster,
    pub attractor: AttractorEstimate,
    /// Bounded cells that never settled on the attractor within `n_max`.
    pub residue: usize,
}

/// Classifies each cell by whether its orbit settles on the attractor reached from
/// `attractor_seed`: [`CAPTURE_STREAK`] consecutive iterates inside the attractor's
/// occupied cells dilated by one cell.
pub fn render_basin_of_attractor(
    p: &ParamPoint,
    attractor_seed: PlanePoint,
    window: Rect,
    resolution: (usize, usize),
    opts: BasinOptions,
    control: &RenderControl,
) -> Result<BasinRaster> {
    check_resolution(resolution)?;
    let attractor = estimate_attractor(p, attractor_seed, opts.attractor_total, opts.attractor_transient, window, resolution)?;
    let grid = attractor.grid;
    let mut target = vec![false; grid.len()];
    for &c in &attractor.occupied_cells {
        let (col, row) = (c as usize % grid.width, c as usize / grid.width);
        for dr in -1isize..=1 {
            for dc in -1isize..=1 {
                let (cc, rr) = (col as isize + dc, row as isize + dr);
                if cc >= 0 && rr >= 0 && (cc as usize) < grid.width && (rr as usize) < grid.height {
                    target[rr as usize * grid.width + cc as usize] = true;
                }
            }
        }
    }
    let s = p.strength_class();
    let (cells, partial) = render_rows(&grid, control, |col, row| {
        let mut z = grid.center(col, row);
        let mut streak = 0u32;
        for _ in 0..=opts.n_max {
            if has_escaped(s, z) {
                return Cell::Basin(BasinClass::Escaped);
            }
            if grid.index_of(z).is_some_and(|i| target[i]) {
                streak += 1;
                if streak >= CAPTURE_STREAK {
                    return Cell::Basin(BasinClass::ThisAttractor);
                }
            } else {
                streak = 0;
            }
            z = map_eval(p, z);
        }
        Cell::Basin(BasinClass::OtherBounded)
    });
    let residue = cells.iter().filter(|&&c| c == Cell::Basin(BasinClass::OtherBounded)).count();
    let raster = Raster { grid, cells, meta: RasterMeta { params: *p, n_max: opts.n_max, supersample: 1, partial } };
    Ok(BasinRaster { raster, attractor, residue })
}
