//! Escape-time raster, component labeling and the annulus taxonomy.

use std::fs::File;
use std::path::PathBuf;

use coupled_logistic::export::{labels_image, raster_image, save_image, write_json, RasterSidecar};
use coupled_logistic::raster::{label_components, render_escape, Target, COMPONENT_DEPTH};
use coupled_logistic::{ParamPoint, Rect};

fn main() -> coupled_logistic::Result<()> {
    let out = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "out".into()));
    std::fs::create_dir_all(&out)?;
    let window = Rect::new(-0.25, 1.25, -0.25, 1.25)?;

    let p = ParamPoint::new(1.6, 0.2)?;
    let r = render_escape(&p, window, (512, 512), 2000)?;
    save_image(&raster_image(&r), &out.join("escape_1.6_0.2.png"))?;

    for (mu, e) in [(4.16, 0.38), (4.03, 0.394)] {
        let p = ParamPoint::new(mu, e)?;
        let r = render_escape(&p, window, (512, 512), COMPONENT_DEPTH)?;
        let lab = label_components(&r, Target::Escaped);
        println!("({mu}, {e}): {} interior escaped components", lab.interior_significant().count());
        for c in lab.components.iter().filter(|c| c.is_significant() && c.annulus_class.is_some()) {
            println!("  component {} is a {:?} annulus ({} cells)", c.label, c.annulus_class.unwrap(), c.cell_count);
        }
        save_image(&labels_image(&lab), &out.join(format!("components_{mu}_{e}.png")))?;
        write_json(&RasterSidecar::new(&r, Some(&lab)), File::create(out.join(format!("components_{mu}_{e}.json")))?)?;
    }
    Ok(())
}
