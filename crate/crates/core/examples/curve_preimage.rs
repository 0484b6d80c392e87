//! Iterated preimages of the circle C and of the boundary of the unit square.

use std::path::PathBuf;

use coupled_logistic::export::{draw_polyline, save_image};
use coupled_logistic::geometry::Grid;
use coupled_logistic::preimage::{iterated_curve_preimage, SeedCurve};
use coupled_logistic::{ParamPoint, Rect};
use image::{Rgb, RgbImage};

fn main() -> coupled_logistic::Result<()> {
    let out = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "out".into()));
    std::fs::create_dir_all(&out)?;
    let grid = Grid::new(Rect::new(-0.25, 1.25, -0.25, 1.25)?, 600, 600)?;

    for (mu, e, seed, n, name) in [
        (1.6, 0.2, SeedCurve::CircleC, 6, "circle_preimages.png"),
        (4.0, -1.0, SeedCurve::BoundaryQ, 1, "square_preimage.png"),
    ] {
        let p = ParamPoint::new(mu, e)?;
        let mut img = RgbImage::from_pixel(600, 600, Rgb([255, 255, 255]));
        for k in 0..=n {
            let curves = iterated_curve_preimage(&p, seed, k, 2000)?;
            let shade = (200 - 200 * k / n.max(1)) as u8;
            for c in &curves {
                draw_polyline(&mut img, &grid, c, Rgb([shade, shade, 255]));
            }
            println!("({mu}, {e}) stage {k}: {} curves", curves.len());
        }
        save_image(&img, &out.join(name))?;
    }
    Ok(())
}
