//! Executes a [`RunConfig`]: runs the engine, writes artifacts and the JSON manifest.

use std::fmt::Write as _;
use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use coupled_logistic::bifurcation::{closest_return_guess, continue_orbit, hopf_bracket, loci_diagram, pitchfork_check, Locus};
use coupled_logistic::curve::{build_gamma, build_gamma_sequence, exterior_bounded_witnesses, invariance_defect, is_x_monotone, WITNESS_MARGIN};
use coupled_logistic::export::{
    draw_polyline, label_color, labels_image, raster_image, write_continuation_csv, write_curve_csv, save_image, write_json, RasterSidecar,
    SCHEMA_VERSION,
};
use coupled_logistic::geometry::Grid;
use coupled_logistic::orbit::{estimate_attractor, iterate_forward, synchronization_verdict, Verdict, DEFAULT_SYNC_TOL};
use coupled_logistic::preimage::{iterated_curve_preimage, mixed_cloud, preimage_tree};
use coupled_logistic::raster::{label_components, render_basin_of_attractor, render_escape_with, BasinClass, BasinOptions, Cell, RenderControl, Topology};
use coupled_logistic::{fixed_points, loci, Classification, FixedPointLabel, ParamPoint, PlanePoint, Polyline};
use image::{Rgb, RgbImage};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::*;
use crate::error::{LabError, LabResult};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Manifest {
    pub schema: u32,
    pub command: String,
    pub config: RunConfig,
    /// Paths relative to the output directory.
    pub outputs: Vec<String>,
    pub result: Value,
}

#[derive(Debug, Clone)]
pub struct Report {
    pub manifest: Manifest,
    pub manifest_path: PathBuf,
    /// Human-readable lines for stdout.
    pub summary: Vec<String>,
}

pub const MANIFEST_NAME: &str = "manifest.json";

struct Outputs {
    dir: PathBuf,
    format: ImageFormat,
    files: Vec<String>,
}

impl Outputs {
    fn new(dir: &Path, format: ImageFormat) -> LabResult<Self> {
        std::fs::create_dir_all(dir)?;
        Ok(Self { dir: dir.to_path_buf(), format, files: Vec::new() })
    }

    fn path(&mut self, name: String) -> PathBuf {
        let p = self.dir.join(&name);
        self.files.push(name);
        p
    }

    fn image(&mut self, stem: &str, img: &RgbImage) -> LabResult<()> {
        let path = self.path(format!("{stem}.{}", self.format.extension()));
        Ok(save_image(img, &path)?)
    }

    fn json(&mut self, name: &str, value: &impl Serialize) -> LabResult<()> {
        let path = self.path(name.to_string());
        write_json(value, BufWriter::new(File::create(path)?))?;
        Ok(())
    }

    fn text(&mut self, name: &str, body: &str) -> LabResult<()> {
        let path = self.path(name.to_string());
        std::fs::write(path, body)?;
        Ok(())
    }

    fn create(&mut self, name: &str) -> LabResult<BufWriter<File>> {
        let path = self.path(name.to_string());
        Ok(BufWriter::new(File::create(path)?))
    }
}

/// Deterministic point in the unit square drawn from `seed`.
pub fn seeded_point(seed: u64) -> PlanePoint {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    PlanePoint::new(rng.gen::<f64>(), rng.gen::<f64>())
}

fn point_or_seeded(z: Option<[f64; 2]>, seed: u64) -> PlanePoint {
    z.map(PlanePoint::from).unwrap_or_else(|| seeded_point(seed))
}

fn grid_for(window: [f64; 4], resolution: [usize; 2]) -> LabResult<Grid> {
    let rect = window_rect(window, "--window")?;
    if resolution[0] < 2 || resolution[1] < 2 {
        return Err(LabError::usage("--resolution", "must be at least 2x2"));
    }
    Ok(Grid::new(rect, resolution[0], resolution[1])?)
}

/// Black points on white.
pub fn points_image(grid: &Grid, points: impl IntoIterator<Item = PlanePoint>) -> RgbImage {
    let mut img = RgbImage::from_pixel(grid.width as u32, grid.height as u32, Rgb([255, 255, 255]));
    for z in points {
        if let Some((c, r)) = grid.cell_of(z) {
            img.put_pixel(c as u32, r as u32, Rgb([0, 0, 0]));
        }
    }
    img
}

fn fmt_point(z: PlanePoint) -> String {
    format!("({:.6}, {:.6})", z.x, z.y)
}

fn label_name(l: FixedPointLabel) -> &'static str {
    match l {
        FixedPointLabel::O => "O",
        FixedPointLabel::Pmu => "P_mu",
        FixedPointLabel::PmuEps => "P_mu_eps",
        FixedPointLabel::RPmuEps => "R(P_mu_eps)",
    }
}

fn class_name(c: Classification) -> String {
    format!("{c:?}").to_lowercase()
}

/// Runs the configured job and writes `manifest.json` into the output directory.
pub fn execute(cfg: &RunConfig) -> LabResult<Report> {
    cfg.validate()?;
    let mut out = Outputs::new(&cfg.run.out_dir(), cfg.run.format)?;
    let mut summary = Vec::new();
    let seed = cfg.run.seed;
    let result = match &cfg.job {
        Job::FixedPoints(j) => run_fixed_points(j, &mut summary)?,
        Job::Loci(j) => run_loci(j, &mut out, &mut summary)?,
        Job::Orbit(j) => run_orbit(j, seed, &mut out, &mut summary)?,
        Job::Preimages(j) => run_preimages(j, &mut out, &mut summary)?,
        Job::Cloud(j) => run_cloud(j, seed, &mut out, &mut summary)?,
        Job::CurvePreimage(j) => run_curve_preimage(j, &mut out, &mut summary)?,
        Job::Gamma(j) => run_gamma(j, &mut out, &mut summary)?,
        Job::GammaSeq(j) => run_gamma_seq(j, &mut out, &mut summary)?,
        Job::Basin(j) => run_basin(j, &mut out, &mut summary)?,
        Job::Attractor(j) => run_attractor(j, seed, &mut out, &mut summary)?,
        Job::Components(j) => run_components(j, &mut out, &mut summary)?,
        Job::Hopf(j) => run_hopf(j, &mut out, &mut summary)?,
        Job::Pitchfork(j) => run_pitchfork(j, &mut summary)?,
        Job::Serve(_) => return Err(LabError::usage("serve", "the server is started by the cli, not as a batch job")),
    };
    let manifest = Manifest {
        schema: SCHEMA_VERSION,
        command: cfg.job.command().to_string(),
        config: cfg.clone(),
        outputs: out.files.clone(),
        result,
    };
    let manifest_path = out.dir.join(MANIFEST_NAME);
    write_json(&manifest, BufWriter::new(File::create(&manifest_path)?))?;
    Ok(Report { manifest, manifest_path, summary })
}

fn run_fixed_points(j: &FixedPointsJob, summary: &mut Vec<String>) -> LabResult<Value> {
    let p = param_point(j.mu, j.epsilon)?;
    let fps = fixed_points(&p);
    for f in &fps {
        let eig: Vec<String> = f
            .eigenvalues
            .iter()
            .map(|v| if v.im == 0.0 { format!("{:.6}", v.re) } else { format!("{:.6}{:+.6}i", v.re, v.im) })
            .collect();
        summary.push(format!(
            "{:<12} {}  {:<9} eigenvalues {}",
            label_name(f.label),
            fmt_point(f.location),
            class_name(f.classification),
            eig.join(", ")
        ));
    }
    Ok(json!({ "params": p, "loci": p.loci(), "fixedPoints": fps }))
}

fn run_loci(j: &LociJob, out: &mut Outputs, summary: &mut Vec<String>) -> LabResult<Value> {
    if j.epsilon.is_none() && j.eps_range.is_none() {
        return Err(LabError::usage("--eps", "give a coupling or an --eps-range for the diagram"));
    }
    let mut result = json!({});
    if let Some(e) = j.epsilon {
        let e = epsilon_of(Some(e))?;
        let l = loci(e);
        for locus in Locus::ALL {
            if let Some(v) = locus.eval(e) {
                summary.push(format!("{:<9} {v:.10}", serde_json::to_value(locus).unwrap().as_str().unwrap_or("")));
            }
        }
        result["epsilon"] = json!(e);
        result["loci"] = json!(l);
    }
    if let Some(eps) = j.eps_range {
        let mu = j.mu_range.ok_or_else(|| LabError::usage("--mu-range", "required with --eps-range"))?;
        let [w, h] = j.resolution;
        if w < 2 || h < 2 {
            return Err(LabError::usage("--resolution", "must be at least 2x2"));
        }
        let d = loci_diagram((eps[0], eps[1]), (mu[0], mu[1]), (w, h));
        let mut img = RgbImage::from_pixel(w as u32, h as u32, Rgb([255, 255, 255]));
        for (i, bits) in d.cells.iter().enumerate() {
            if let Some(l) = Locus::ALL.iter().find(|l| bits & l.bit() != 0) {
                img.put_pixel((i % w) as u32, (i / w) as u32, label_color(*l as u32 + 1));
            }
        }
        out.image("loci", &img)?;
        let mut csv = String::from("locus,epsilon,mu\n");
        for c in &d.curves {
            let name = serde_json::to_value(c.locus).unwrap();
            for (e, m) in &c.points {
                writeln!(csv, "{},{e},{m}", name.as_str().unwrap_or("")).unwrap();
            }
        }
        out.text("loci.csv", &csv)?;
        let present: Vec<Locus> = d.curves.iter().filter(|c| !c.points.is_empty()).map(|c| c.locus).collect();
        summary.push(format!("diagram: {} curves in range", present.len()));
        result["diagram"] = json!({ "epsilonRange": eps, "muRange": mu, "curves": present });
    }
    Ok(result)
}

fn run_orbit(j: &OrbitJob, seed: u64, out: &mut Outputs, summary: &mut Vec<String>) -> LabResult<Value> {
    let p = param_point(j.mu, j.epsilon)?;
    let grid = grid_for(j.window, j.resolution)?;
    let z0 = point_or_seeded(j.z0, seed);
    let orbit = iterate_forward(&p, z0, j.n_max);
    let mut csv = String::from("step,x,y,gap\n");
    for (i, (z, g)) in orbit.samples.iter().zip(&orbit.sync_gap).enumerate() {
        writeln!(csv, "{},{},{},{}", i as u64 * orbit.stride, z.x, z.y, g).unwrap();
    }
    out.text("orbit.csv", &csv)?;
    let shown = orbit.samples.iter().enumerate().filter(|(i, _)| *i as u64 * orbit.stride >= j.transient).map(|(_, z)| *z);
    out.image("orbit", &points_image(&grid, shown))?;
    let sync = synchronization_verdict(&p, z0, j.n_max, DEFAULT_SYNC_TOL).ok();
    summary.push(format!("z0 {}", fmt_point(z0)));
    summary.push(match orbit.verdict {
        Verdict::Escaped { step } => format!("escaped at step {step}"),
        Verdict::BoundedSoFar { steps } => format!("bounded for {steps} steps"),
    });
    if let Some(s) = sync {
        summary.push(format!("synchronized: {} (final gap {:e})", s.synchronized, s.final_gap));
    }
    Ok(json!({
        "params": p,
        "z0": z0,
        "verdict": orbit.verdict,
        "stride": orbit.stride,
        "samples": orbit.samples.len(),
        "last": orbit.samples.last(),
        "sync": sync,
    }))
}

fn run_preimages(j: &PreimagesJob, out: &mut Outputs, summary: &mut Vec<String>) -> LabResult<Value> {
    let p = param_point(j.mu, j.epsilon)?;
    let grid = grid_for(j.window, j.resolution)?;
    let clip = j.clip.map(|c| window_rect(c, "--clip")).transpose()?;
    let tree = preimage_tree(&p, j.root.into(), j.depth, j.budget, clip);
    out.image("preimages", &points_image(&grid, tree.points()))?;
    if j.points_csv {
        let mut w = out.create("preimages.csv")?;
        use std::io::Write;
        writeln!(w, "level,x,y")?;
        for (n, level) in tree.levels.iter().enumerate() {
            for z in level {
                writeln!(w, "{n},{},{}", z.x, z.y)?;
            }
        }
    }
    let counts: Vec<usize> = tree.levels.iter().map(Vec::len).collect();
    summary.push(format!("{} points over {} levels{}", tree.total_points(), counts.len() - 1, if tree.budget_exhausted { " (budget exhausted)" } else { "" }));
    Ok(json!({
        "params": p,
        "root": tree.root,
        "levelCounts": counts,
        "totalPoints": tree.total_points(),
        "budgetExhausted": tree.budget_exhausted,
    }))
}

fn run_cloud(j: &CloudJob, seed: u64, out: &mut Outputs, summary: &mut Vec<String>) -> LabResult<Value> {
    let p = param_point(j.mu, j.epsilon)?;
    let grid = grid_for(j.window, j.resolution)?;
    let z0 = point_or_seeded(j.z0, seed);
    let cloud = mixed_cloud(&p, z0, j.n_forward, j.depth, j.budget)?;
    out.image("cloud", &points_image(&grid, cloud.iter().copied()))?;
    summary.push(format!("z0 {}: {} points", fmt_point(z0), cloud.len()));
    Ok(json!({ "params": p, "z0": z0, "points": cloud.len() }))
}

fn stage_image(grid: &Grid, stages: &[Vec<Polyline>]) -> RgbImage {
    let mut img = RgbImage::from_pixel(grid.width as u32, grid.height as u32, Rgb([255, 255, 255]));
    for (k, curves) in stages.iter().enumerate() {
        for c in curves {
            draw_polyline(&mut img, grid, c, label_color(k as u32 + 1));
        }
    }
    img
}

fn run_curve_preimage(j: &CurvePreimageJob, out: &mut Outputs, summary: &mut Vec<String>) -> LabResult<Value> {
    let p = param_point(j.mu, j.epsilon)?;
    let grid = grid_for(j.window, j.resolution)?;
    let stages: Vec<Vec<Polyline>> = (0..=j.stages).map(|n| iterated_curve_preimage(&p, j.curve, n, j.resample)).collect::<Result<_, _>>()?;
    out.image("curve_preimage", &stage_image(&grid, &stages))?;
    let mut csv = String::from("stage,branch,x,y\n");
    for (k, curves) in stages.iter().enumerate() {
        for (b, c) in curves.iter().enumerate() {
            for z in c.vertices() {
                writeln!(csv, "{k},{b},{},{}", z.x, z.y).unwrap();
            }
        }
    }
    out.text("curve_preimage.csv", &csv)?;
    let branches: Vec<usize> = stages.iter().map(Vec::len).collect();
    summary.push(format!("branches per stage: {branches:?}"));
    Ok(json!({ "params": p, "curve": j.curve, "branchesPerStage": branches }))
}

fn escape_background(p: &ParamPoint, grid: &Grid, n_max: u64) -> LabResult<RgbImage> {
    let r = render_escape_with(p, grid.window, (grid.width, grid.height), n_max, 1, &RenderControl::default())?;
    Ok(raster_image(&r))
}

const CURVE_COLOR: Rgb<u8> = Rgb([220, 30, 30]);

fn run_gamma(j: &GammaJob, out: &mut Outputs, summary: &mut Vec<String>) -> LabResult<Value> {
    let p = param_point(j.mu, j.epsilon)?;
    let grid = grid_for(j.window, j.resolution)?;
    let (gamma, report) = build_gamma(&p, j.grid, j.max_iters, j.tol)?;
    write_curve_csv(&gamma.assembled, out.create("gamma.csv")?)?;
    let mut img = escape_background(&p, &grid, j.n_max)?;
    draw_polyline(&mut img, &grid, &gamma.assembled, CURVE_COLOR);
    out.image("gamma", &img)?;
    let defect = invariance_defect(&p, &gamma.assembled, 2000);
    summary.push(format!("{:?} regime, {} iterations, last change {:e}", report.regime, report.iterations, report.last_change));
    summary.push(format!("invariance defect {defect:e}"));
    Ok(json!({ "params": p, "report": report, "invarianceDefect": defect, "vertices": gamma.assembled.len() }))
}

fn run_gamma_seq(j: &GammaSeqJob, out: &mut Outputs, summary: &mut Vec<String>) -> LabResult<Value> {
    let p = param_point(j.mu, j.epsilon)?;
    let grid = grid_for(j.window, j.resolution)?;
    let stages = build_gamma_sequence(&p, j.stages, j.resample)?;
    let mut csv = String::from("stage,x,y\n");
    for s in &stages {
        for z in s.assembled.vertices() {
            writeln!(csv, "{},{},{}", s.index, z.x, z.y).unwrap();
        }
    }
    out.text("gamma_seq.csv", &csv)?;
    let drawn: Vec<Vec<Polyline>> = stages.iter().map(|s| vec![s.assembled.clone()]).collect();
    out.image("gamma_seq", &stage_image(&grid, &drawn))?;
    let info: Vec<Value> = stages
        .iter()
        .map(|s| {
            summary.push(format!(
                "stage {}: q {}, bottom is a graph: {}, distance to previous: {}",
                s.index,
                fmt_point(s.q),
                is_x_monotone(&s.bottom),
                s.hausdorff_to_previous.map_or("-".into(), |d| format!("{d:.3e}"))
            ));
            json!({
                "index": s.index,
                "q": s.q,
                "bottomIsGraph": is_x_monotone(&s.bottom),
                "hausdorffToPrevious": s.hausdorff_to_previous,
                "extraFragments": s.extra_fragments,
            })
        })
        .collect();
    let mut witnesses = Vec::new();
    if j.witness_budget > 0 {
        let stage = match j.witness_stage {
            Some(k) => stages.iter().find(|s| s.index == k).ok_or_else(|| LabError::usage("--witness-stage", format!("no stage {k}")))?,
            None => stages.last().ok_or_else(|| LabError::usage("--stages", "must be positive"))?,
        };
        witnesses = exterior_bounded_witnesses(&p, &stage.assembled, j.witness_budget, WITNESS_MARGIN);
        summary.push(format!("{} bounded points outside stage {}", witnesses.len(), stage.index));
    }
    Ok(json!({ "params": p, "stages": info, "witnesses": witnesses }))
}

fn run_basin(j: &BasinJob, out: &mut Outputs, summary: &mut Vec<String>) -> LabResult<Value> {
    let p = param_point(j.mu, j.epsilon)?;
    let grid = grid_for(j.window, j.resolution)?;
    let res = (grid.width, grid.height);
    if j.supersample == 0 {
        return Err(LabError::usage("--supersample", "must be at least 1"));
    }
    if j.attractor_seeds.is_empty() {
        let r = render_escape_with(&p, grid.window, res, j.n_max, j.supersample, &RenderControl::default())?;
        let mut img = raster_image(&r);
        let mut gamma_drawn = false;
        if j.overlay_gamma {
            if let Ok((g, _)) = build_gamma(&p, 2048, coupled_logistic::curve::DEFAULT_MAX_ITERS, 1e-12) {
                draw_polyline(&mut img, &grid, &g.assembled, CURVE_COLOR);
                gamma_drawn = true;
            }
        }
        out.image("basin", &img)?;
        out.json("basin.json", &RasterSidecar::new(&r, None))?;
        let bounded = r.count(Cell::is_bounded);
        summary.push(format!("{bounded} of {} cells bounded after {} steps", r.cells.len(), j.n_max));
        return Ok(json!({ "params": p, "boundedCells": bounded, "cells": r.cells.len(), "gammaOverlay": gamma_drawn }));
    }
    let opts = BasinOptions { n_max: j.n_max, attractor_transient: j.attractor_transient, attractor_total: j.attractor_total };
    let mut basins = Vec::new();
    for (i, s) in j.attractor_seeds.iter().enumerate() {
        let b = render_basin_of_attractor(&p, (*s).into(), grid.window, res, opts, &RenderControl::default())?;
        let stem = format!("basin_{i}");
        out.image(&stem, &raster_image(&b.raster))?;
        out.json(&format!("{stem}.json"), &RasterSidecar::new(&b.raster, None))?;
        let own = b.raster.count(|c| c == Cell::Basin(BasinClass::ThisAttractor));
        summary.push(format!(
            "seed {}: period {:?}, {} attractor cells, basin {} cells",
            fmt_point((*s).into()),
            b.attractor.period,
            b.attractor.cell_count(),
            own
        ));
        basins.push(json!({
            "seed": s,
            "period": b.attractor.period,
            "attractorCells": b.attractor.cell_count(),
            "basinCells": own,
            "residue": b.residue,
        }));
    }
    Ok(json!({ "params": p, "basins": basins }))
}

fn run_attractor(j: &AttractorJob, seed: u64, out: &mut Outputs, summary: &mut Vec<String>) -> LabResult<Value> {
    let p = param_point(j.mu, j.epsilon)?;
    let grid = grid_for(j.window, j.resolution)?;
    let z0 = point_or_seeded(j.z0, seed);
    let a = estimate_attractor(&p, z0, j.n_total, j.n_transient, grid.window, (grid.width, grid.height))?;
    let mut img = RgbImage::from_pixel(grid.width as u32, grid.height as u32, Rgb([255, 255, 255]));
    let paint = |img: &mut RgbImage, cells: &[u32], color| {
        for &c in cells {
            img.put_pixel(c % grid.width as u32, c / grid.width as u32, color);
        }
    };
    if a.pieces.is_empty() {
        paint(&mut img, &a.occupied_cells, Rgb([0, 0, 0]));
    } else {
        for (k, piece) in a.pieces.iter().enumerate() {
            paint(&mut img, piece, label_color(k as u32 + 1));
        }
    }
    out.image("attractor", &img)?;
    summary.push(format!("z0 {}", fmt_point(z0)));
    summary.push(match a.period {
        Some(q) => format!("period {q}"),
        None => "no period detected".into(),
    });
    summary.push(format!("{} cells, area {:.4e}, fat: {}", a.cell_count(), a.area_estimate, a.is_fat()));
    Ok(json!({
        "params": p,
        "z0": z0,
        "period": a.period,
        "fat": a.is_fat(),
        "cells": a.cell_count(),
        "areaEstimate": a.area_estimate,
        "outsideWindow": a.outside_window,
    }))
}

fn run_components(j: &ComponentsJob, out: &mut Outputs, summary: &mut Vec<String>) -> LabResult<Value> {
    let p = param_point(j.mu, j.epsilon)?;
    let grid = grid_for(j.window, j.resolution)?;
    let r = render_escape_with(&p, grid.window, (grid.width, grid.height), j.n_max, 1, &RenderControl::default())?;
    let lab = label_components(&r, j.target);
    out.image("components", &labels_image(&lab))?;
    out.json("components.json", &RasterSidecar::new(&r, Some(&lab)))?;
    let interior: Vec<_> = lab.interior_significant().collect();
    let annuli: Vec<Value> = interior
        .iter()
        .filter(|c| c.topology == Topology::Annulus)
        .map(|c| json!({ "label": c.label, "class": c.annulus_class }))
        .collect();
    summary.push(format!("{} components, {} significant interior, {} annuli", lab.components.len(), interior.len(), annuli.len()));
    for c in &interior {
        summary.push(format!("  #{} {:?} area {:.4e}{}", c.label, c.topology, c.area, c.annulus_class.map_or(String::new(), |a| format!(" {a:?}"))));
    }
    Ok(json!({
        "params": p,
        "target": j.target,
        "components": lab.components.len(),
        "interiorSignificant": interior.len(),
        "annuli": annuli,
    }))
}

fn run_hopf(j: &HopfJob, out: &mut Outputs, summary: &mut Vec<String>) -> LabResult<Value> {
    let start = param_point(j.mu, j.epsilon)?;
    let mu_end = j.mu_end.ok_or_else(|| LabError::usage("--mu-end", "required (flag or config)"))?;
    if mu_end <= start.mu() {
        return Err(LabError::usage("--mu-end", "must exceed --mu"));
    }
    param_point(Some(mu_end), j.epsilon)?;
    let seed = closest_return_guess(&start, j.z0.into(), j.period, j.transient, 4000)
        .ok_or(coupled_logistic::Error::NoConvergence { iterations: j.transient, residual: f64::NAN })?;
    let e = start.epsilon();
    let b = hopf_bracket(e, j.period, start.mu(), mu_end, j.width, seed)?;
    let (path, lost) = continue_orbit(e, j.period, start.mu(), b.mu_lo, j.steps, seed)?;
    write_continuation_csv(&path, out.create("continuation.csv")?)?;
    out.json("bracket.json", &b)?;
    summary.push(format!("crossing in [{:.8}, {:.8}], modulus {:.6} -> {:?}", b.mu_lo, b.mu_hi, b.modulus_lo, b.modulus_hi));
    Ok(json!({ "params": start, "muEnd": mu_end, "bracket": b, "continuationSteps": path.len(), "lostAt": lost }))
}

fn run_pitchfork(j: &PitchforkJob, summary: &mut Vec<String>) -> LabResult<Value> {
    let e = epsilon_of(j.epsilon)?;
    let r = pitchfork_check(e, j.samples)?;
    summary.push(format!("locus {:.10}, branch exponent {:.4}, flip {}, passed {}", r.locus, r.exponent, r.flip_ok, r.passed));
    Ok(serde_json::to_value(&r).expect("report serializes"))
}
