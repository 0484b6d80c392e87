use coupled_logistic::geometry::{directed_hausdorff, SegmentIndex};
use coupled_logistic::params::TAU_ROUND;
use coupled_logistic::preimage::*;
use coupled_logistic::*;
use proptest::prelude::*;

fn params() -> impl Strategy<Value = ParamPoint> {
    (1.0..5.0f64, prop_oneof![-1.2..-0.05f64, 0.05..0.45f64]).prop_map(|(mu, e)| ParamPoint::new(mu, e).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn tree_levels_map_into_previous_level(p in params(), x in 0.0..1.0f64, y in 0.0..1.0f64) {
        let tree = preimage_tree(&p, PlanePoint::new(x, y), 6, 20_000, None);
        for n in 1..tree.levels.len() {
            prop_assert!(tree.levels[n].len() <= 4 * tree.levels[n - 1].len());
            for w in &tree.levels[n] {
                let img = map_eval(&p, *w);
                let best = tree.levels[n - 1].iter().map(|q| q.dist(img)).fold(f64::INFINITY, f64::min);
                let scale = img.norm().max(1.0);
                prop_assert!(best <= TAU_ROUND * scale, "level {n}: {best:e}");
            }
        }
    }

    #[test]
    fn preimage_of_symmetric_curve_is_symmetric(mu in 1.2..3.5f64, e in 0.05..0.45f64, resample in 200usize..600) {
        let p = ParamPoint::new(mu, e).unwrap();
        let circle = PlaneGeometry::new(&p).circle_c(400);
        let out = polyline_preimage(&p, &circle, resample).unwrap();
        prop_assume!(!out.is_empty());
        let mirrored: Vec<PlanePoint> = out.iter().flat_map(|c| c.vertices().iter().map(|z| z.reflect())).collect();
        let spacing = out.iter().map(|c| c.length() / c.len() as f64).fold(0.0, f64::max);
        let d = directed_hausdorff(&mirrored, &out);
        prop_assert!(d <= 2.0 * spacing, "{d:e} vs spacing {spacing:e}");
    }

    #[test]
    fn output_branches_are_continuous(p in params(), r in 0.05..0.7f64) {
        // a circle around the critical point c = (1/2, 1/2), inside and partly outside the cone
        let seed = Polyline::closed(
            (0..300)
                .map(|i| {
                    let a = std::f64::consts::TAU * i as f64 / 300.0;
                    PlanePoint::new(0.3 + r * a.cos(), 0.3 + r * a.sin())
                })
                .collect(),
        );
        let resample = 400;
        let out = polyline_preimage(&p, &seed, resample).unwrap();
        let index = SegmentIndex::new(std::slice::from_ref(&seed));
        let seed_spacing = seed.length() / seed.len() as f64;
        for curve in &out {
            let v = curve.vertices();
            let step = curve.length() / (v.len().max(2) - 1) as f64;
            for (a, b) in curve.segments() {
                // no jumps inside a branch: vertices are evenly spaced after resampling
                prop_assert!(a.dist(b) <= 1.01 * step + 1e-12);
                // images of consecutive vertices are consecutive points of the input
                let (fa, fb) = (map_eval(&p, a), map_eval(&p, b));
                prop_assert!(index.distance(fa) <= 1e-3, "image off the input curve: {:e}", index.distance(fa));
                prop_assert!(fa.dist(fb) <= 2.0 * seed_spacing.max(1e-3) + jacobian(&p, a).0.iter().flatten().map(|v| v.abs()).sum::<f64>() * step);
            }
        }
    }
}

#[test]
fn curve_outside_cone_has_no_preimage() {
    let p = ParamPoint::new(3.0, 0.2).unwrap();
    let x = p.mu() / 4.0 + 1.0;
    let c = Polyline::open(vec![PlanePoint::new(x, 0.0), PlanePoint::new(x + 0.5, 0.3)]);
    assert!(polyline_preimage(&p, &c, 100).unwrap().is_empty());
}

#[test]
fn circle_preimage_stages_contract() {
    let p = ParamPoint::new(1.6, 0.2).unwrap();
    let stages: Vec<Vec<Polyline>> = (0..6).map(|n| iterated_curve_preimage(&p, SeedCurve::CircleC, n, 1500).unwrap()).collect();
    let gaps: Vec<f64> = stages.windows(2).map(|w| coupled_logistic::geometry::hausdorff(&w[0], &w[1])).collect();
    for w in gaps.windows(2).skip(1) {
        assert!(w[1] < w[0], "{gaps:?}");
    }
}
