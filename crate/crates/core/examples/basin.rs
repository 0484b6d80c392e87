//! Basins of the two coexisting fat attractors.

use std::path::PathBuf;

use coupled_logistic::export::{raster_image, save_image};
use coupled_logistic::raster::{render_basin_of_attractor, BasinClass, BasinOptions, Cell, RenderControl};
use coupled_logistic::{ParamPoint, PlanePoint, Rect};

fn main() -> coupled_logistic::Result<()> {
    let out = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "out".into()));
    std::fs::create_dir_all(&out)?;
    let p = ParamPoint::new(3.67, 0.01)?;
    for (i, seed) in [PlanePoint::new(0.301, 0.031), PlanePoint::new(0.866, 0.473)].into_iter().enumerate() {
        let b = render_basin_of_attractor(&p, seed, Rect::unit_square(), (400, 400), BasinOptions::default(), &RenderControl::default())?;
        let this = b.raster.count(|c| c == Cell::Basin(BasinClass::ThisAttractor));
        let other = b.raster.count(|c| c == Cell::Basin(BasinClass::OtherBounded));
        println!("seed {seed:?}: period {:?}, basin {this} cells, other bounded {other}", b.attractor.period);
        save_image(&raster_image(&b.raster), &out.join(format!("basin_{i}.png")))?;
    }
    Ok(())
}
