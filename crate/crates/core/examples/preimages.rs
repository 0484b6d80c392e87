//! Backward iteration: preimage trees of the origin and a mixed forward/backward cloud.

use std::path::PathBuf;

use coupled_logistic::export::save_image;
use coupled_logistic::geometry::Grid;
use coupled_logistic::preimage::{mixed_cloud, preimage_tree};
use coupled_logistic::{ParamPoint, PlanePoint, Rect};
use image::{Rgb, RgbImage};

fn plot(points: &[PlanePoint], grid: &Grid) -> RgbImage {
    let mut img = RgbImage::from_pixel(grid.width as u32, grid.height as u32, Rgb([255, 255, 255]));
    for z in points {
        if let Some((c, r)) = grid.cell_of(*z) {
            img.put_pixel(c as u32, r as u32, Rgb([0, 0, 0]));
        }
    }
    img
}

fn main() -> coupled_logistic::Result<()> {
    let out = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "out".into()));
    std::fs::create_dir_all(&out)?;
    let grid = Grid::new(Rect::new(-0.25, 1.25, -0.25, 1.25)?, 600, 600)?;

    // beyond mu1 the point S enters the cone and the tree of O branches
    let p = ParamPoint::new(2.82, -1.0)?;
    let tree = preimage_tree(&p, PlanePoint::ORIGIN, 14, 2_000_000, None);
    let sizes: Vec<usize> = tree.levels.iter().map(Vec::len).collect();
    println!("tree of O at (2.82, -1): level sizes {sizes:?}, budget exhausted {}", tree.budget_exhausted);
    let pts: Vec<PlanePoint> = tree.points().collect();
    save_image(&plot(&pts, &grid), &out.join("preimage_tree.png"))?;

    let p = ParamPoint::new(3.694, 0.01)?;
    let cloud = mixed_cloud(&p, PlanePoint::new(0.1, 0.0), 20, 6, 500_000)?;
    println!("mixed cloud at (3.694, 0.01): {} points", cloud.len());
    save_image(&plot(&cloud, &grid), &out.join("mixed_cloud.png"))?;
    Ok(())
}
