//! Fixed points, their spectra and the bifurcation loci at a few couplings.

use coupled_logistic::{fixed_points, loci, ParamPoint};

fn main() -> coupled_logistic::Result<()> {
    for (mu, e) in [(3.0, 0.2), (1.5, 0.2), (2.0, -0.5), (2.71, -0.9)] {
        let p = ParamPoint::new(mu, e)?;
        println!("mu = {mu}, epsilon = {e} ({:?} coupling)", p.strength_class());
        for f in fixed_points(&p) {
            let [a, b] = f.eigenvalues;
            println!(
                "  {:<8} ({:+.6}, {:+.6})  eigenvalues {a:.4}, {b:.4}  {:?}",
                format!("{:?}", f.label),
                f.location.x,
                f.location.y,
                f.classification
            );
        }
        println!("  loci: {}", serde_json::to_string(&loci(e)).unwrap());
    }
    Ok(())
}
