//! The invariant curve bounding the immediate basin of infinity, for both signs of coupling.

use std::fs::File;
use std::path::PathBuf;

use coupled_logistic::curve::{build_gamma, invariance_defect, DEFAULT_GRID, DEFAULT_MAX_ITERS, DEFAULT_TOL};
use coupled_logistic::export::write_curve_csv;
use coupled_logistic::ParamPoint;

fn main() -> coupled_logistic::Result<()> {
    let out = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "out".into()));
    std::fs::create_dir_all(&out)?;
    for (mu, e) in [(1.6, 0.2), (3.0, 0.3), (1.3, -0.5), (2.71, -0.9)] {
        let p = ParamPoint::new(mu, e)?;
        let (gamma, report) = build_gamma(&p, DEFAULT_GRID, DEFAULT_MAX_ITERS, DEFAULT_TOL)?;
        let defect = invariance_defect(&p, &gamma.assembled, 10_000);
        println!(
            "({mu}, {e}): {:?}, {} iterations, last change {:e}, F(curve) within {defect:e} of the curve",
            report.regime, report.iterations, report.last_change
        );
        write_curve_csv(&gamma.assembled, File::create(out.join(format!("gamma_{mu}_{e}.csv")))?)?;
    }
    Ok(())
}
