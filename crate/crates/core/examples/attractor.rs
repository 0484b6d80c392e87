//! Attractor detection: period and area of the orbit's attracting set.

use coupled_logistic::orbit::estimate_attractor;
use coupled_logistic::{ParamPoint, PlanePoint, Rect};

fn main() -> coupled_logistic::Result<()> {
    for (mu, e, seed) in [(2.0, -0.5, (0.3, 0.4)), (3.694, 0.01, (0.3, 0.6)), (3.67, 0.01, (0.301, 0.031)), (3.67, 0.01, (0.866, 0.473))] {
        let p = ParamPoint::new(mu, e)?;
        let est = estimate_attractor(&p, PlanePoint::new(seed.0, seed.1), 2_000_000, 10_000, Rect::unit_square(), (512, 512))?;
        println!(
            "({mu}, {e}) from {seed:?}: period {:?}, {} cells, area {:.4}, fat: {}",
            est.period,
            est.cell_count(),
            est.area_estimate,
            est.is_fat()
        );
    }
    Ok(())
}
