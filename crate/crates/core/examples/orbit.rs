//! Forward orbits: escape verdicts, synchronization and square itineraries.

use coupled_logistic::orbit::{iterate_forward, quadrant_itinerary, synchronization_verdict, DEFAULT_SYNC_TOL};
use coupled_logistic::{ParamPoint, PlanePoint};

fn main() -> coupled_logistic::Result<()> {
    let p = ParamPoint::new(2.0, -0.5)?;
    let z0 = PlanePoint::new(0.67, 0.59);
    let orbit = iterate_forward(&p, z0, 2000);
    println!("{:?}, last sample {:?}", orbit.verdict, orbit.samples.last().unwrap());
    let sync = synchronization_verdict(&p, z0, 2000, DEFAULT_SYNC_TOL)?;
    println!("synchronized: {} (final gap {:e})", sync.synchronized, sync.final_gap);

    let weak = ParamPoint::new(3.0, 0.2)?;
    println!("(2, 2) under weak coupling: {:?}", iterate_forward(&weak, PlanePoint::new(2.0, 2.0), 10).verdict);

    let cantor = ParamPoint::new(6.0, -1.0)?;
    for z in [PlanePoint::ORIGIN, PlanePoint::new(0.05, 0.95), PlanePoint::new(0.3, 0.2)] {
        let it = quadrant_itinerary(&cantor, z, 12)?;
        println!("itinerary of {z:?}: {:?} (left the square at {:?})", it.symbols, it.escaped_at);
    }
    Ok(())
}
