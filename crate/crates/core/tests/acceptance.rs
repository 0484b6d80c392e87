//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits non-zero on any failure.
//!
//! Run with `cargo test -p coupled-logistic --test acceptance`.

use std::time::{Duration, Instant};

use coupled_logistic::bifurcation::{closest_return_guess, hopf_bracket};
use coupled_logistic::curve::{
    build_gamma, build_gamma_sequence, exterior_bounded_witnesses, iterate_operator, large_strength_operator, LipGraph,
    WITNESS_MARGIN,
};
use coupled_logistic::geometry::{directed_hausdorff, hausdorff};
use coupled_logistic::orbit::{estimate_attractor, quadrant_itinerary};
use coupled_logistic::preimage::preimage_tree;
use coupled_logistic::raster::{
    label_components, render_basin_of_attractor, render_escape, AnnulusClass, BasinClass, BasinOptions, Cell,
    RenderControl, Target, COMPONENT_DEPTH,
};
use coupled_logistic::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn random_params(rng: &mut ChaCha8Rng, n: usize) -> Vec<ParamPoint> {
    (0..n)
        .map(|i| {
            let mu = rng.gen_range(1.05..8.0);
            let eps = if i % 2 == 0 { rng.gen_range(0.05..0.45) } else { rng.gen_range(-1.0..-0.05) };
            ParamPoint::new(mu, eps).unwrap()
        })
        .collect()
}

fn round_trip_inverse() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let params = random_params(&mut rng, 20);
    let (mut points, mut worst) = (0usize, 0.0f64);
    for p in &params {
        let v = p.mu() / 4.0;
        let mut kept = 0;
        while kept < 5_000 {
            let z = PlanePoint::new(rng.gen_range(v - 3.0..v + 3.0), rng.gen_range(v - 3.0..v + 3.0));
            if cone_membership(p, z) != ConeRegion::Interior {
                continue;
            }
            kept += 1;
            for w in preimages(p, z) {
                worst = worst.max(map_eval(p, w).dist(z));
            }
        }
        points += kept;
    }
    outcome(worst <= 1e-12, format!("{points} cone-interior points over 20 parameter pairs, worst |F(w) - z| = {worst:.2e}"))
}

/// Zeros of F by Newton's method from a dense grid.
fn brute_force_zeros(p: &ParamPoint) -> Vec<PlanePoint> {
    let mut roots: Vec<PlanePoint> = Vec::new();
    for i in 0..=150 {
        for j in 0..=150 {
            let mut z = PlanePoint::new(-1.0 + 0.02 * i as f64, -1.0 + 0.02 * j as f64);
            if map_eval(p, z).norm() > 0.5 {
                continue;
            }
            for _ in 0..60 {
                let f = map_eval(p, z);
                let Some(step) = jacobian(p, z).solve(f) else { break };
                z = PlanePoint::new(z.x - step.x, z.y - step.y);
            }
            if map_eval(p, z).norm() < 1e-14 && roots.iter().all(|r| r.dist(z) > 1e-9) {
                roots.push(z);
            }
        }
    }
    roots
}

fn preimages_of_origin() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let expected = [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0)].map(|(x, y)| PlanePoint::new(x, y));
    let mut bad = Vec::new();
    for p in random_params(&mut rng, 20) {
        let pre = preimages(&p, PlanePoint::ORIGIN);
        let oracle = brute_force_zeros(&p);
        let matches = |set: &[PlanePoint]| set.len() == 4 && expected.iter().all(|e| set.iter().any(|z| z.dist(*e) <= 1e-12));
        if !matches(&pre) || !matches(&oracle) {
            bad.push(format!("({}, {}): {} preimages, {} oracle roots", p.mu(), p.epsilon(), pre.len(), oracle.len()));
        }
    }
    outcome(bad.is_empty(), if bad.is_empty() { "20 parameter pairs agree with the grid+Newton oracle".into() } else { bad.join("; ") })
}

fn classification_sweep() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut checked, mut skipped, mut wrong) = (0, 0, Vec::new());
    let near = |a: f64, b: f64| (a - b).abs() <= 1e-8 * b.abs().max(1.0);
    for _ in 0..100 {
        let eps = rng.gen_range(-1.5..-0.01);
        let mu = rng.gen_range(1.01..5.0);
        let p = ParamPoint::new(mu, eps).unwrap();
        let l = p.loci();
        let (m0, m2) = (l.mu0_prime.unwrap(), l.mu2.unwrap());
        if near(mu, m0) || near(mu, m2) || near(mu, 3.0) {
            skipped += 1;
            continue;
        }
        let want_p = if mu < m0 {
            Classification::Saddle
        } else if mu < m2 {
            Classification::Attractor
        } else if mu < 3.0 {
            Classification::Saddle
        } else {
            Classification::Repeller
        };
        let fps = fixed_points(&p);
        let o = fps.iter().find(|f| f.label == FixedPointLabel::O).unwrap();
        let pm = fps.iter().find(|f| f.label == FixedPointLabel::Pmu).unwrap();
        checked += 1;
        if o.classification != Classification::Repeller || pm.classification != want_p {
            wrong.push(format!("({mu}, {eps}): O {:?}, P {:?} (want {want_p:?})", o.classification, pm.classification));
        }
    }
    for _ in 0..100 {
        let eps = rng.gen_range(0.01..0.49);
        let m0 = 1.0 / (1.0 - 2.0 * eps);
        let mu = rng.gen_range(1.01..2.0 * m0);
        if near(mu, m0) {
            skipped += 1;
            continue;
        }
        let p = ParamPoint::new(mu, eps).unwrap();
        let o = fixed_points(&p).into_iter().find(|f| f.label == FixedPointLabel::O).unwrap();
        let want = if mu < m0 { Classification::Saddle } else { Classification::Repeller };
        checked += 1;
        if o.classification != want {
            wrong.push(format!("({mu}, {eps}): O {:?} (want {want:?})", o.classification));
        }
    }
    outcome(wrong.is_empty(), format!("{checked} samples checked, {skipped} inside tolerance bands, {} misclassified {}", wrong.len(), wrong.join("; ")))
}

fn invariant_curve() -> Outcome {
    let n = 4096;
    let tol = 4.0 / n as f64;
    let mut pass = true;
    let mut notes = Vec::new();
    for (mu, eps) in [(1.6, 0.2), (2.71, -0.9)] {
        let p = ParamPoint::new(mu, eps).unwrap();
        let t0 = Instant::now();
        let Ok((g, rep)) = build_gamma(&p, n, 100_000, 1e-10) else {
            pass = false;
            notes.push(format!("({mu}, {eps}) did not converge"));
            continue;
        };
        let elapsed = t0.elapsed();
        let gamma = &g.assembled;
        let image = gamma.resample(4 * n).map(|z| map_eval(&p, z));
        let directed = directed_hausdorff(image.vertices(), std::slice::from_ref(gamma));
        let symmetric = hausdorff(std::slice::from_ref(&image), std::slice::from_ref(gamma));
        pass &= directed <= tol && elapsed <= Duration::from_secs(60);
        let mut note = format!("({mu}, {eps}): {} iterations in {elapsed:.1?}, d(F(G) -> G) = {directed:.2e}, symmetric {symmetric:.2e}", rep.iterations);
        if eps < 0.0 {
            let off: Vec<_> = fixed_points(&p)
                .into_iter()
                .filter(|f| matches!(f.label, FixedPointLabel::PmuEps | FixedPointLabel::RPmuEps))
                .map(|f| f.location)
                .collect();
            let d = directed_hausdorff(&off, std::slice::from_ref(gamma));
            pass &= off.len() == 2 && d <= tol;
            note += &format!(", off-diagonal fixed points at {d:.2e}");
        }
        notes.push(note);
    }
    outcome(pass, notes.join("; "))
}

fn monotonicity() -> Outcome {
    let n = 4096;
    let mut pass = true;
    let mut notes = Vec::new();
    for (mu, eps) in [(2.71, -0.9), (2.0, -0.5), (2.5, -0.3), (1.8, -1.0), (2.2, -0.1)] {
        let p = ParamPoint::new(mu, eps).unwrap();
        let mut violations = 0usize;
        let r = iterate_operator(LipGraph::zero(n).unwrap(), 100_000, 1e-10, |h| large_strength_operator(&p, h), |prev, next| {
            let (a, b) = (prev.values(), next.values());
            violations += (1..n).filter(|&i| !(b[i] > a[i])).count();
        });
        let ok = r.is_ok() && violations == 0;
        pass &= ok;
        notes.push(format!("({mu}, {eps}): {} iterations, {violations} non-strict nodes", r.map(|x| x.1).unwrap_or(0)));
    }
    let p = ParamPoint::new(1.3, -0.5).unwrap();
    let limit = iterate_operator(LipGraph::zero(n).unwrap(), 100_000, 1e-10, |h| large_strength_operator(&p, h), |_, _| {});
    let tent = LipGraph::tent(n).unwrap();
    let d = limit.as_ref().map(|(g, _, _)| g.sup_distance(&tent)).unwrap_or(f64::INFINITY);
    pass &= d <= 2.0 / n as f64;
    notes.push(format!("(1.3, -0.5): |limit - min(t, 1-t)| = {d:.2e}"));
    outcome(pass, notes.join("; "))
}

fn hopf(eps: f64, range: (f64, f64), width: f64, accept: impl Fn(f64, f64, f64) -> bool) -> Outcome {
    let t0 = Instant::now();
    let p = ParamPoint::new(range.0, eps).unwrap();
    let Some(guess) = closest_return_guess(&p, PlanePoint::new(0.3, 0.6), 2, 20_000, 500) else {
        return outcome(false, "seed orbit escaped");
    };
    match hopf_bracket(eps, 2, range.0, range.1, width, guess) {
        Ok(b) => {
            let elapsed = t0.elapsed();
            let ok = accept(b.mu_lo, b.mu_hi, b.modulus_lo) && b.mu_hi - b.mu_lo <= width && elapsed <= Duration::from_secs(60);
            outcome(ok, format!("bracket [{:.7}, {:.7}], modulus {:.6} -> {:?}, {elapsed:.1?}", b.mu_lo, b.mu_hi, b.modulus_lo, b.modulus_hi))
        }
        Err(e) => outcome(false, e.to_string()),
    }
}

fn fat_attractors() -> Outcome {
    let window = Rect::new(-0.25, 1.25, -0.25, 1.25).unwrap();
    let res = (512, 512);
    let t0 = Instant::now();
    let p = ParamPoint::new(3.694, 0.01).unwrap();
    let single = estimate_attractor(&p, PlanePoint::new(0.3, 0.1), 10_000_000, 10_000, window, res);
    let (single_ok, single_note) = match &single {
        Ok(a) => (a.period == Some(2) && a.area_estimate > 0.0, format!("(3.694, 0.01): period {:?}, area {:.4} in {:.1?}", a.period, a.area_estimate, t0.elapsed())),
        Err(e) => (false, e.to_string()),
    };
    let t0 = Instant::now();
    let p = ParamPoint::new(3.67, 0.01).unwrap();
    let opts = BasinOptions { n_max: 2000, attractor_transient: 10_000, attractor_total: 10_000_000 };
    let ctl = RenderControl::default();
    let (a, b) = match (
        render_basin_of_attractor(&p, PlanePoint::new(0.301, 0.031), window, res, opts, &ctl),
        render_basin_of_attractor(&p, PlanePoint::new(0.866, 0.473), window, res, opts, &ctl),
    ) {
        (Ok(a), Ok(b)) => (a, b),
        _ => return outcome(false, "basin rendering failed"),
    };
    let (mut bounded, mut exclusive) = (0usize, 0usize);
    for (x, y) in a.raster.cells.iter().zip(&b.raster.cells) {
        if x.is_escaped() || y.is_escaped() {
            continue;
        }
        bounded += 1;
        let this = Cell::Basin(BasinClass::ThisAttractor);
        exclusive += usize::from((*x == this) != (*y == this));
    }
    let share = exclusive as f64 / bounded.max(1) as f64;
    let pair_ok = a.attractor.period == Some(2) && b.attractor.period == Some(2) && a.attractor.overlap(&b.attractor) == 0 && share >= 0.99;
    let elapsed = t0.elapsed();
    outcome(
        single_ok && pair_ok && elapsed <= Duration::from_secs(300),
        format!(
            "{single_note}; (3.67, 0.01): periods {:?}/{:?}, shared cells {}, complementary on {:.2}% of {bounded} bounded cells in {elapsed:.1?}",
            a.attractor.period,
            b.attractor.period,
            a.attractor.overlap(&b.attractor),
            100.0 * share
        ),
    )
}

fn component_structure() -> Outcome {
    let window = Rect::new(-0.25, 1.25, -0.25, 1.25).unwrap();
    let center = PlanePoint::new(0.5, 0.5);
    let mut notes = Vec::new();
    let mut pass = true;

    let p = ParamPoint::new(4.16, 0.38).unwrap();
    let mut counts = Vec::new();
    for res in [512, 1024] {
        let r = render_escape(&p, window, (res, res), COMPONENT_DEPTH).unwrap();
        let lab = label_components(&r, Target::Escaped);
        let interior = lab.interior_significant().count();
        let (col, row) = r.grid.cell_of(center).unwrap();
        let central = lab.component(lab.label_at(col, row)).unwrap();
        let disks: Vec<_> = lab.preimages_of(central.label).filter(|c| c.is_significant() && !c.touches_border).collect();
        let ok = interior >= 4 && !central.touches_border && disks.len() == 4;
        pass &= ok;
        counts.push(interior);
        notes.push(format!("(4.16, 0.38) {res}^2: {interior} interior components, {} disks map onto the central one", disks.len()));
    }
    pass &= counts[0] == counts[1];

    let p = ParamPoint::new(4.03, 0.394).unwrap();
    for res in [512, 1024] {
        let r = render_escape(&p, window, (res, res), COMPONENT_DEPTH).unwrap();
        let lab = label_components(&r, Target::Escaped);
        let singular = lab.components.iter().filter(|c| c.is_significant() && c.annulus_class == Some(AnnulusClass::Singular)).count();
        pass &= singular >= 1;
        notes.push(format!("(4.03, 0.394) {res}^2: {singular} singular annuli"));
    }
    outcome(pass, notes.join("; "))
}

fn itineraries() -> Outcome {
    let p = ParamPoint::new(6.0, -1.0).unwrap();
    let c = 5.0 / 6.0;
    let tree = preimage_tree(&p, PlanePoint::new(c, c), 8, 1_000_000, None);
    let pool = tree.levels.last().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let n = 12;
    let mut failures = 0;
    for _ in 0..100 {
        let z = pool[rng.gen_range(0..pool.len())];
        let ok = match (quadrant_itinerary(&p, z, n), quadrant_itinerary(&p, map_eval(&p, z), n - 1), quadrant_itinerary(&p, z, n - 1)) {
            (Ok(a), Ok(b), Ok(prefix)) => {
                a.escaped_at.is_none() && b.symbols[..] == a.symbols[1..] && prefix.symbols[..] == a.symbols[..n]
            }
            _ => false,
        };
        failures += usize::from(!ok);
    }
    let r = render_escape(&p, Rect::unit_square(), (1024, 1024), COMPONENT_DEPTH).unwrap();
    let lab = label_components(&r, Target::Bounded);
    let largest = lab.components.iter().map(|c| c.cell_count).max().unwrap_or(0);
    let deep = render_escape(&p, Rect::unit_square(), (1024, 1024), 2000).unwrap();
    let pass = failures == 0 && largest <= 4 && lab.components.len() > 1;
    outcome(
        pass,
        format!(
            "100 seeds from level-8 preimages of the diagonal fixed point, {failures} shift/nesting failures; depth-{COMPONENT_DEPTH} raster: {} bounded components, largest {largest} cells; {} bounded cells at n_max 2000",
            lab.components.len(),
            deep.count(|c| c.is_bounded())
        ),
    )
}

fn beyond_mu1() -> Outcome {
    let p = ParamPoint::new(2.82, -1.0).unwrap();
    let stages = match build_gamma_sequence(&p, 4, 4096) {
        Ok(s) => s,
        Err(e) => return outcome(false, e.to_string()),
    };
    let w = exterior_bounded_witnesses(&p, &stages.last().unwrap().assembled, 20_000, WITNESS_MARGIN);
    let q = ParamPoint::new(2.71, -0.9).unwrap();
    let (g, _) = build_gamma(&q, 4096, 100_000, 1e-10).unwrap();
    let v = exterior_bounded_witnesses(&q, &g.assembled, 20_000, WITNESS_MARGIN);
    let first = w.first().map(|z| format!(" (first at ({:.4}, {:.4}))", z.x, z.y)).unwrap_or_default();
    outcome(!w.is_empty() && v.is_empty(), format!("(2.82, -1): {} witnesses{first}; (2.71, -0.9): {} witnesses", w.len(), v.len()))
}

fn main() {
    let criteria: Vec<(&str, fn() -> Outcome)> = vec![
        ("round-trip inverse", round_trip_inverse),
        ("preimages of the origin", preimages_of_origin),
        ("fixed-point classification sweep", classification_sweep),
        ("invariant curve", invariant_curve),
        ("large-strength monotonicity", monotonicity),
        ("Hopf bracket, small strength", || hopf(0.14, (4.0, 4.01), 1e-5, |lo, hi, _| lo >= 4.0041 && hi <= 4.0042)),
        ("Hopf bracket, large strength", || hopf(-0.9, (2.4, 2.6), 1e-3, |lo, hi, m| lo >= 2.525 && hi <= 2.53 && m < 1.0)),
        ("fat-attractor periodicity", fat_attractors),
        ("component structure", component_structure),
        ("itinerary shift and Cantor raster", itineraries),
        ("beyond-mu1 evidence", beyond_mu1),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let t0 = Instant::now();
        let o = run();
        failed += usize::from(!o.pass);
        println!("{} {name} [{:.1?}]: {}", if o.pass { "PASS" } else { "FAIL" }, t0.elapsed(), o.detail);
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all acceptance criteria passed");
}
