//! Forward dynamics: iteration with escape detection, synchronization, attractor
//! sampling with period detection, diagonal Cantor-set membership and itineraries.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{in_closed_disk, Grid, PlanePoint, Rect};
use crate::map::{logistic, map_eval};
use crate::params::{ParamPoint, Strength, TAU_GEO};

/// Iterates with a norm beyond this are treated as escaped.
pub const NORM_GUARD: f64 = 1e8;
/// Maximum number of samples retained by [`iterate_forward`].
pub const MAX_SAMPLES: usize = 1_000_000;
/// Largest period reported by [`estimate_attractor`].
pub const MAX_PERIOD: usize = 64;
/// Fraction of cells allowed to be shared between residue classes.
pub const PERIOD_OVERLAP_SLACK: f64 = 0.02;
/// Attractors with fewer occupied cells are not called fat.
pub const FAT_MIN_CELLS: usize = 10;

pub const DEFAULT_TRANSIENT: u64 = 10_000;
pub const DEFAULT_TOTAL: u64 = 10_000_000;
pub const DEFAULT_SYNC_TOL: f64 = 1e-8;

/// Escape test for the strength class.
///
/// Small strength uses the exterior of the circle `x^2 + y^2 = x + y`, large strength
/// the exterior of the unit square. Other couplings only use the norm guard.
#[inline]
pub fn has_escaped(strength: Strength, z: PlanePoint) -> bool {
    if !(z.x.abs() < NORM_GUARD && z.y.abs() < NORM_GUARD) {
        return true;
    }
    match strength {
        Strength::Small => !in_closed_disk(z),
        Strength::Large => !(0.0..=1.0).contains(&z.x) || !(0.0..=1.0).contains(&z.y),
        Strength::Other => z.norm() > NORM_GUARD,
    }
}

/// First step at which the orbit of `z0` is flagged escaped, or `None` within `n_max`.
#[inline]
pub fn escape_time(p: &ParamPoint, z0: PlanePoint, n_max: u64) -> Option<u64> {
    let s = p.strength_class();
    let mut z = z0;
    for k in 0..=n_max {
        if has_escaped(s, z) {
            return Some(k);
        }
        if k < n_max {
            z = map_eval(p, z);
        }
    }
    None
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Verdict {
    Escaped { step: u64 },
    #[serde(rename = "bounded")]
    BoundedSoFar { steps: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrbitResult {
    /// Iterates `z_0, z_s, z_2s, ...` with stride `s`; includes the escaping iterate.
    pub samples: Vec<PlanePoint>,
    pub stride: u64,
    pub verdict: Verdict,
    /// `|x - y|` at each sample.
    pub sync_gap: Vec<f64>,
}

fn stride_for(n_max: u64) -> u64 {
    (n_max + 1).div_ceil(MAX_SAMPLES as u64).max(1)
}

pub fn iterate_forward(p: &ParamPoint, z0: PlanePoint, n_max: u64) -> OrbitResult {
    let s = p.strength_class();
    let stride = stride_for(n_max);
    let mut samples = Vec::with_capacity(((n_max / stride) as usize + 2).min(MAX_SAMPLES + 1));
    let mut z = z0;
    let mut verdict = Verdict::BoundedSoFar { steps: n_max };
    for k in 0..=n_max {
        let esc = has_escaped(s, z);
        if k % stride == 0 || esc {
            samples.push(z);
        }
        if esc {
            verdict = Verdict::Escaped { step: k };
            break;
        }
        if k < n_max {
            z = map_eval(p, z);
        }
    }
    let sync_gap = samples.iter().map(|z| (z.x - z.y).abs()).collect();
    OrbitResult { samples, stride, verdict, sync_gap }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SyncVerdict {
    pub synchronized: bool,
    pub final_gap: f64,
}

/// True when the trailing 10% of sampled gaps all fall below `tol`.
pub fn synchronization_verdict(p: &ParamPoint, z0: PlanePoint, n_max: u64, tol: f64) -> Result<SyncVerdict> {
    let orbit = iterate_forward(p, z0, n_max);
    if let Verdict::Escaped { step } = orbit.verdict {
        return Err(Error::NotBounded { step });
    }
    let gaps = &orbit.sync_gap;
    let tail = (gaps.len() / 10).max(1);
    let synchronized = gaps[gaps.len() - tail..].iter().all(|&g| g < tol);
    Ok(SyncVerdict { synchronized, final_gap: *gaps.last().unwrap() })
}

/// Raster evidence of an attracting set reached from one seed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AttractorEstimate {
    pub grid: Grid,
    /// Sorted indices of occupied cells (row-major, row 0 at the top).
    pub occupied_cells: Vec<u32>,
    pub period: Option<usize>,
    pub area_estimate: f64,
    pub transient_discarded: u64,
    /// Cells visited by each residue class `k mod period` (when a period is found).
    pub pieces: Vec<Vec<u32>>,
    /// Iterates that fell outside the window after the transient.
    pub outside_window: u64,
}

impl AttractorEstimate {
    pub fn cell_count(&self) -> usize {
        self.occupied_cells.len()
    }

    pub fn contains_cell(&self, idx: u32) -> bool {
        self.occupied_cells.binary_search(&idx).is_ok()
    }

    /// Heuristic: positive area means at least [`FAT_MIN_CELLS`] occupied cells.
    pub fn is_fat(&self) -> bool {
        self.cell_count() >= FAT_MIN_CELLS
    }

    /// Number of occupied cells shared with another estimate on the same grid.
    pub fn overlap(&self, other: &AttractorEstimate) -> usize {
        let (mut i, mut j, mut n) = (0, 0, 0);
        let (a, b) = (&self.occupied_cells, &other.occupied_cells);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    n += 1;
                    i += 1;
                    j += 1;
                }
            }
        }
        n
    }
}

/// Trailing window used for the period test.
const PERIOD_WINDOW: usize = 1 << 20;

/// Fraction of occupied cells visited by more than one residue class mod `period`.
/// `cells[i]` is the cell of step `first_step + i`.
fn residue_overlap(cells: &[u32], first_step: u64, period: usize, masks: &mut [u128], touched: &mut Vec<u32>) -> f64 {
    touched.clear();
    for (i, &c) in cells.iter().enumerate() {
        if c == u32::MAX {
            continue;
        }
        let r = ((first_step + i as u64) % period as u64) as u32;
        let m = &mut masks[c as usize];
        if *m == 0 {
            touched.push(c);
        }
        *m |= 1u128 << r;
    }
    let shared = touched.iter().filter(|&&c| masks[c as usize].count_ones() > 1).count();
    for &c in touched.iter() {
        masks[c as usize] = 0;
    }
    if touched.is_empty() {
        0.0
    } else {
        shared as f64 / touched.len() as f64
    }
}

/// Largest `p <= MAX_PERIOD` whose residue classes occupy disjoint cells (up to the
/// slack) while those of `2p` do not.
fn detect_period(cells: &[u32], first_step: u64, n_cells: usize) -> Option<usize> {
    let mut masks = vec![0u128; n_cells];
    let mut touched = Vec::new();
    let passes: Vec<bool> = (0..=2 * MAX_PERIOD)
        .map(|q| q >= 1 && residue_overlap(cells, first_step, q, &mut masks, &mut touched) <= PERIOD_OVERLAP_SLACK)
        .collect();
    (1..=MAX_PERIOD).rev().find(|&q| passes[q] && !passes[2 * q])
}

/// Rasterizes iterates `n_transient..n_total` of `z0` and tests for periodic structure.
pub fn estimate_attractor(
    p: &ParamPoint,
    z0: PlanePoint,
    n_total: u64,
    n_transient: u64,
    window: Rect,
    resolution: (usize, usize),
) -> Result<AttractorEstimate> {
    if n_total <= n_transient {
        return Err(Error::InvalidArgument("n_total must exceed n_transient".into()));
    }
    let grid = Grid::new(window, resolution.0, resolution.1)?;
    let s = p.strength_class();
    let mut z = z0;
    for k in 0..n_transient {
        if has_escaped(s, z) {
            return Err(Error::NotBounded { step: k });
        }
        z = map_eval(p, z);
    }
    let mut occupied = vec![false; grid.len()];
    let keep = ((n_total - n_transient) as usize).min(PERIOD_WINDOW);
    let keep_from = n_total - keep as u64;
    let mut trailing = Vec::with_capacity(keep);
    let mut outside = 0u64;
    for k in n_transient..n_total {
        if has_escaped(s, z) {
            return Err(Error::NotBounded { step: k });
        }
        let cell = grid.index_of(z);
        match cell {
            Some(c) => occupied[c] = true,
            None => outside += 1,
        }
        if k >= keep_from {
            trailing.push(cell.map_or(u32::MAX, |c| c as u32));
        }
        z = map_eval(p, z);
    }
    let occupied_cells: Vec<u32> = occupied
        .iter()
        .enumerate()
        .filter_map(|(i, &o)| o.then_some(i as u32))
        .collect();
    if occupied_cells.is_empty() {
        return Err(Error::EmptyWindow);
    }
    let period = detect_period(&trailing, keep_from, grid.len());
    let pieces = match period {
        Some(q) if q > 1 => {
            let mut sets = vec![Vec::new(); q];
            for (i, &c) in trailing.iter().enumerate() {
                if c != u32::MAX {
                    sets[((keep_from + i as u64) % q as u64) as usize].push(c);
                }
            }
            for s in sets.iter_mut() {
                s.sort_unstable();
                s.dedup();
            }
            sets
        }
        _ => vec![occupied_cells.clone()],
    };
    Ok(AttractorEstimate {
        grid,
        area_estimate: occupied_cells.len() as f64 * grid.cell_area(),
        occupied_cells,
        period,
        transient_discarded: n_transient,
        pieces,
        outside_window: outside,
    })
}

/// Whether the logistic orbit of `x` stays in `[0, 1]` for `n_max` steps (`mu > 4` only).
///
/// Rounding errors grow like `mu^n` on the Cantor set, so beyond roughly
/// `36 / log10(mu)` steps the answer reflects rounding rather than the true orbit.
pub fn diagonal_cantor_member(p: &ParamPoint, x: f64, n_max: u64) -> Result<bool> {
    if p.mu() <= 4.0 {
        return Err(Error::Domain("diagonal Cantor set requires mu > 4".into()));
    }
    let mut t = x;
    for _ in 0..=n_max {
        if !(0.0..=1.0).contains(&t) {
            return Ok(false);
        }
        t = logistic(t, p.mu());
    }
    Ok(true)
}

/// Component of the preimage of the square holding `z`, indexed by branch signs
/// in the order (--), (-+), (+-), (++).
pub fn square_component(z: PlanePoint) -> Option<u8> {
    if (z.x - 0.5).abs() <= TAU_GEO || (z.y - 0.5).abs() <= TAU_GEO {
        return None;
    }
    Some(2 * u8::from(z.x > 0.5) + u8::from(z.y > 0.5))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Itinerary {
    pub symbols: Vec<u8>,
    /// Step at which the orbit left the square, if it did.
    pub escaped_at: Option<usize>,
}

/// Symbols of iterates `0..=n` over the four components; stops at the first exit from Q.
pub fn quadrant_itinerary(p: &ParamPoint, z0: PlanePoint, n: usize) -> Result<Itinerary> {
    if p.strength_class() != Strength::Large || p.mu() <= 4.0 {
        return Err(Error::Domain("itineraries require large strength and mu > 4".into()));
    }
    let q = Rect::unit_square();
    let mut z = z0;
    let mut symbols = Vec::with_capacity(n + 1);
    for k in 0..=n {
        if !q.contains(z) {
            return Ok(Itinerary { symbols, escaped_at: Some(k) });
        }
        symbols.push(square_component(z).ok_or(Error::AmbiguousComponent { step: k })?);
        z = map_eval(p, z);
    }
    Ok(Itinerary { symbols, escaped_at: None })
}
