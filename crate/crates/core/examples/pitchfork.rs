//! Birth of the off-diagonal fixed points and the parameter-plane diagram of the loci.

use std::path::PathBuf;

use coupled_logistic::bifurcation::{loci_diagram, pitchfork_check, Locus};
use coupled_logistic::export::{label_color, save_image};
use image::{Rgb, RgbImage};

fn main() -> coupled_logistic::Result<()> {
    let out = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "out".into()));
    std::fs::create_dir_all(&out)?;
    for e in [0.2, -0.5] {
        let r = pitchfork_check(e, 12)?;
        println!("epsilon {e}: locus {:.6}, branch exponent {:.3}, passed {}", r.locus, r.exponent, r.passed);
    }
    for (name, eps, mu) in [("loci_small.png", (0.0, 0.5), (1.0, 20.0)), ("loci_large.png", (-0.55, 0.0), (0.0, 6.0))] {
        let d = loci_diagram(eps, mu, (500, 500));
        let mut img = RgbImage::from_pixel(d.width as u32, d.height as u32, Rgb([255, 255, 255]));
        for (i, bits) in d.cells.iter().enumerate() {
            if let Some(l) = Locus::ALL.iter().find(|l| bits & l.bit() != 0) {
                img.put_pixel((i % d.width) as u32, (i / d.width) as u32, label_color(*l as u32 + 1));
            }
        }
        save_image(&img, &out.join(name))?;
        println!("{name}: {} curves", d.curves.iter().filter(|c| !c.points.is_empty()).count());
    }
    Ok(())
}
