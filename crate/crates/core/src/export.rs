//! Image, CSV and JSON writers for rasters, curves and continuation paths.

use std::io::Write;
use std::path::Path;

use image::{ImageFormat, Rgb, RgbImage};
use serde::Serialize;

use crate::bifurcation::ContinuationStep;
use crate::error::{Error, Result};
use crate::geometry::{Grid, PlanePoint, Polyline, Rect};
use crate::params::ParamPoint;
use crate::raster::{BasinClass, Cell, ComponentReport, Labeling, Raster};

pub const SCHEMA_VERSION: u32 = 1;

pub const BOUNDED: Rgb<u8> = Rgb([0, 0, 0]);
pub const UNSET: Rgb<u8> = Rgb([128, 128, 128]);
pub const THIS_ATTRACTOR: Rgb<u8> = Rgb([230, 120, 20]);
pub const OTHER_BOUNDED: Rgb<u8> = Rgb([20, 140, 150]);
pub const ESCAPED_BASIN: Rgb<u8> = Rgb([250, 250, 250]);

impl From<image::ImageError> for Error {
    fn from(e: image::ImageError) -> Self {
        Error::Io(std::io::Error::other(e))
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(std::io::Error::other(e))
    }
}

/// Escape-time gradient: fast escapes are pale, slow ones saturate toward deep blue.
pub fn escape_color(k: u32, n_max: u64) -> Rgb<u8> {
    let t = ((1.0 + k as f64).ln() / (2.0 + n_max as f64).ln()).clamp(0.0, 1.0);
    let lerp = |a: f64, b: f64| (a + (b - a) * t).round() as u8;
    Rgb([lerp(255.0, 10.0), lerp(250.0, 40.0), lerp(235.0, 160.0)])
}

/// Distinct, deterministic color per component label; label 0 is black.
pub fn label_color(label: u32) -> Rgb<u8> {
    if label == 0 {
        return BOUNDED;
    }
    // golden-ratio hue walk
    let h = (label as f64 * 0.618_033_988_749_895).fract() * 6.0;
    let x = 1.0 - (h % 2.0 - 1.0).abs();
    let (r, g, b) = match h as u32 {
        0 => (1.0, x, 0.0),
        1 => (x, 1.0, 0.0),
        2 => (0.0, 1.0, x),
        3 => (0.0, x, 1.0),
        4 => (x, 0.0, 1.0),
        _ => (1.0, 0.0, x),
    };
    let c = |v: f64| (60.0 + 180.0 * v) as u8;
    Rgb([c(r), c(g), c(b)])
}

pub fn cell_color(cell: Cell, n_max: u64) -> Rgb<u8> {
    match cell {
        Cell::Unset => UNSET,
        Cell::Bounded => BOUNDED,
        Cell::Escaped(k) => escape_color(k, n_max),
        Cell::Basin(BasinClass::ThisAttractor) => THIS_ATTRACTOR,
        Cell::Basin(BasinClass::OtherBounded) => OTHER_BOUNDED,
        Cell::Basin(BasinClass::Escaped) => ESCAPED_BASIN,
    }
}

pub fn raster_image(r: &Raster) -> RgbImage {
    RgbImage::from_fn(r.width() as u32, r.height() as u32, |c, row| cell_color(r.at(c as usize, row as usize), r.meta.n_max))
}

pub fn labels_image(lab: &Labeling) -> RgbImage {
    RgbImage::from_fn(lab.width as u32, lab.height as u32, |c, row| label_color(lab.label_at(c as usize, row as usize)))
}

/// Draws a polyline overlay onto an image rendered over `grid`.
pub fn draw_polyline(img: &mut RgbImage, grid: &Grid, curve: &Polyline, color: Rgb<u8>) {
    let to_px = |z: PlanePoint| {
        let w = grid.window;
        ((z.x - w.x_min) / grid.dx(), (w.y_max - z.y) / grid.dy())
    };
    for (a, b) in curve.segments() {
        let (pa, pb) = (to_px(a), to_px(b));
        let steps = ((pb.0 - pa.0).abs().max((pb.1 - pa.1).abs()).ceil() as usize).max(1);
        for i in 0..=steps {
            let t = i as f64 / steps as f64;
            let (x, y) = (pa.0 + (pb.0 - pa.0) * t, pa.1 + (pb.1 - pa.1) * t);
            if x >= 0.0 && y >= 0.0 && (x as u32) < img.width() && (y as u32) < img.height() {
                img.put_pixel(x as u32, y as u32, color);
            }
        }
    }
}

/// Binary portable pixmap.
pub fn write_ppm(img: &RgbImage, mut w: impl Write) -> Result<()> {
    write!(w, "P6\n{} {}\n255\n", img.width(), img.height())?;
    w.write_all(img.as_raw())?;
    Ok(())
}

pub fn encode_png(img: &RgbImage) -> Result<Vec<u8>> {
    let mut buf = std::io::Cursor::new(Vec::new());
    img.write_to(&mut buf, ImageFormat::Png)?;
    Ok(buf.into_inner())
}

/// Writes PNG or PPM by file extension (`.ppm` selects PPM, anything else PNG).
pub fn save_image(img: &RgbImage, path: &Path) -> Result<()> {
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("ppm")) {
        let f = std::fs::File::create(path)?;
        write_ppm(img, std::io::BufWriter::new(f))
    } else {
        std::fs::write(path, encode_png(img)?)?;
        Ok(())
    }
}

/// Metadata written next to a raster image.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RasterSidecar {
    pub schema: u32,
    pub params: ParamPoint,
    pub window: Rect,
    pub width: usize,
    pub height: usize,
    pub n_max: u64,
    pub supersample: u32,
    pub partial: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub components: Option<Vec<ComponentReport>>,
}

impl RasterSidecar {
    pub fn new(r: &Raster, components: Option<&Labeling>) -> Self {
        Self {
            schema: SCHEMA_VERSION,
            params: r.meta.params,
            window: r.grid.window,
            width: r.width(),
            height: r.height(),
            n_max: r.meta.n_max,
            supersample: r.meta.supersample,
            partial: r.meta.partial,
            components: components.map(|l| l.components.clone()),
        }
    }
}

pub fn write_json<T: Serialize>(value: &T, w: impl Write) -> Result<()> {
    serde_json::to_writer_pretty(w, value).map_err(|e| Error::Io(e.into()))
}

/// Curve vertices as `t,x,y` rows, `t` the normalized chord length from the first vertex.
pub fn write_curve_csv(curve: &Polyline, w: impl Write) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["t", "x", "y"])?;
    let total = curve.vertices().windows(2).map(|s| s[0].dist(s[1])).sum::<f64>();
    let mut acc = 0.0;
    for (i, z) in curve.vertices().iter().enumerate() {
        if i > 0 {
            acc += curve.vertices()[i - 1].dist(*z);
        }
        let t = if total > 0.0 { acc / total } else { 0.0 };
        out.serialize((t, z.x, z.y))?;
    }
    out.flush()?;
    Ok(())
}

/// One row per continuation step: `mu`, orbit points, eigenvalue parts and moduli.
pub fn write_continuation_csv(steps: &[ContinuationStep], w: impl Write) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    let period = steps.first().map_or(0, |s| s.orbit.period);
    let mut header = vec!["mu".to_string()];
    for i in 0..period {
        header.push(format!("x{i}"));
        header.push(format!("y{i}"));
    }
    header.extend(["re0", "im0", "re1", "im1", "modulus0", "modulus1"].map(String::from));
    out.write_record(&header)?;
    for s in steps {
        let mut row = vec![s.mu];
        row.extend(s.orbit.points.iter().flat_map(|z| [z.x, z.y]));
        let [a, b] = s.orbit.cycle_eigenvalues;
        row.extend([a.re, a.im, b.re, b.im, a.norm(), b.norm()]);
        out.serialize(row)?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::raster::render_escape;

    #[test]
    fn ppm_header_and_size() {
        let img = RgbImage::from_pixel(3, 2, Rgb([1, 2, 3]));
        let mut buf = Vec::new();
        write_ppm(&img, &mut buf).unwrap();
        assert!(buf.starts_with(b"P6\n3 2\n255\n"));
        assert_eq!(buf.len(), b"P6\n3 2\n255\n".len() + 18);
    }

    #[test]
    fn png_round_trip() {
        let p = ParamPoint::new(1.6, 0.2).unwrap();
        let r = render_escape(&p, Rect::unit_square(), (20, 10), 50).unwrap();
        let img = raster_image(&r);
        let back = image::load_from_memory(&encode_png(&img).unwrap()).unwrap().to_rgb8();
        assert_eq!(back, img);
    }

    #[test]
    fn bounded_is_black() {
        assert_eq!(cell_color(Cell::Bounded, 100), BOUNDED);
        assert_ne!(escape_color(0, 100), escape_color(99, 100));
    }

    #[test]
    fn curve_csv_rows() {
        let c = Polyline::open(vec![PlanePoint::new(0.0, 0.0), PlanePoint::new(1.0, 0.0), PlanePoint::new(1.0, 1.0)]);
        let mut buf = Vec::new();
        write_curve_csv(&c, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "t,x,y\n0.0,0.0,0.0\n0.5,1.0,0.0\n1.0,1.0,1.0\n");
    }
}
