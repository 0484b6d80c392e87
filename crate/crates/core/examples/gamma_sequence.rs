//! Beyond mu1 at negative coupling: the stage curves and bounded orbits outside them.

use coupled_logistic::curve::{build_gamma_sequence, exterior_bounded_witnesses, is_x_monotone, WITNESS_MARGIN};
use coupled_logistic::ParamPoint;

fn main() -> coupled_logistic::Result<()> {
    let p = ParamPoint::new(2.82, -1.0)?;
    let stages = build_gamma_sequence(&p, 6, 1500)?;
    for s in &stages {
        println!(
            "stage {}: q = ({:.5}, {:.5}), bottom is a graph: {}, distance to previous: {:?}",
            s.index,
            s.q.x,
            s.q.y,
            is_x_monotone(&s.bottom),
            s.hausdorff_to_previous
        );
    }
    let witnesses = exterior_bounded_witnesses(&p, &stages[3].assembled, 20_000, WITNESS_MARGIN);
    println!("{} bounded points outside stage 4", witnesses.len());
    for w in witnesses.iter().take(5) {
        println!("  {w:?}");
    }
    Ok(())
}
