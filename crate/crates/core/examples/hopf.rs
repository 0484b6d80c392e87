//! Continuation of a 2-cycle and bracketing of its Hopf bifurcation.

use std::fs::File;
use std::path::PathBuf;

use coupled_logistic::bifurcation::{closest_return_guess, continue_orbit, hopf_bracket};
use coupled_logistic::export::write_continuation_csv;
use coupled_logistic::{ParamPoint, PlanePoint};

fn main() -> coupled_logistic::Result<()> {
    let out = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "out".into()));
    std::fs::create_dir_all(&out)?;
    for (e, lo, hi, width) in [(0.14, 4.0, 4.01, 1e-5), (-0.9, 2.4, 2.6, 1e-3)] {
        let start = ParamPoint::new(lo, e)?;
        let seed = closest_return_guess(&start, PlanePoint::new(0.3, 0.6), 2, 20_000, 4000)
            .ok_or_else(|| coupled_logistic::Error::InvalidArgument("no close return".into()))?;
        let b = hopf_bracket(e, 2, lo, hi, width, seed)?;
        println!(
            "epsilon {e}: crossing in [{:.7}, {:.7}], modulus {:.5} -> {:?}",
            b.mu_lo, b.mu_hi, b.modulus_lo, b.modulus_hi
        );
        let (path, lost) = continue_orbit(e, 2, lo, b.mu_lo, 50, seed)?;
        if let Some(mu) = lost {
            println!("  orbit lost at {mu}");
        }
        write_continuation_csv(&path, File::create(out.join(format!("continuation_{e}.csv")))?)?;
    }
    Ok(())
}
