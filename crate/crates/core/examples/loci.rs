//! Parameter-plane diagram of the bifurcation loci, printed as a coarse character plot.

use coupled_logistic::bifurcation::loci_diagram;

fn main() {
    let d = loci_diagram((0.0, 0.5), (1.0, 20.0), (72, 36));
    for c in &d.curves {
        println!("{:?}: {} samples", c.locus, c.points.len());
    }
    for row in d.cells.chunks(d.width) {
        let line: String = row.iter().map(|&m| if m == 0 { ' ' } else { '*' }).collect();
        println!("|{line}|");
    }
}
