use coupled_logistic::map::radicands;
use coupled_logistic::params::{Strength, TAU_GEO, TAU_ROUND};
use coupled_logistic::*;
use proptest::prelude::*;

fn valid_epsilon() -> impl Strategy<Value = f64> {
    prop_oneof![-1.5..-0.01f64, 0.01..0.49f64, 0.51..0.99f64]
}

fn params() -> impl Strategy<Value = ParamPoint> {
    (0.5..6.0f64, valid_epsilon()).prop_map(|(mu, e)| ParamPoint::new(mu, e).unwrap())
}

fn point() -> impl Strategy<Value = PlanePoint> {
    (-1.0..2.0f64, -1.0..2.0f64).prop_map(|(x, y)| PlanePoint::new(x, y))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn diagonal_is_invariant_exactly(p in params(), x in -1.0..2.0f64) {
        let w = map_eval(&p, PlanePoint::new(x, x));
        let fx = logistic(x, p.mu());
        prop_assert_eq!(w.x, fx);
        prop_assert_eq!(w.y, fx);
    }

    #[test]
    fn reflection_commutes_with_map(p in params(), z in point()) {
        prop_assert_eq!(map_eval(&p, z.reflect()), map_eval(&p, z).reflect());
    }

    #[test]
    fn jacobian_matches_central_differences(p in params(), z in point()) {
        let h = 1e-6;
        let j = jacobian(&p, z);
        let dx = {
            let (a, b) = (map_eval(&p, PlanePoint::new(z.x + h, z.y)), map_eval(&p, PlanePoint::new(z.x - h, z.y)));
            ((a.x - b.x) / (2.0 * h), (a.y - b.y) / (2.0 * h))
        };
        let dy = {
            let (a, b) = (map_eval(&p, PlanePoint::new(z.x, z.y + h)), map_eval(&p, PlanePoint::new(z.x, z.y - h)));
            ((a.x - b.x) / (2.0 * h), (a.y - b.y) / (2.0 * h))
        };
        let m = j.0;
        for (got, want) in [(m[0][0], dx.0), (m[1][0], dx.1), (m[0][1], dy.0), (m[1][1], dy.1)] {
            prop_assert!((got - want).abs() <= 1e-6 * want.abs().max(1.0), "{got} vs {want}");
        }
    }

    #[test]
    fn interior_preimages_are_symmetric_about_critical_lines(p in params(), w in point()) {
        let z = map_eval(&p, w);
        prop_assume!(cone_membership(&p, z) == ConeRegion::Interior);
        let pre = preimages(&p, z);
        prop_assert_eq!(pre.len(), 4);
        for w in &pre {
            let mirrors = [PlanePoint::new(1.0 - w.x, w.y), PlanePoint::new(w.x, 1.0 - w.y)];
            for m in mirrors {
                prop_assert!(pre.iter().any(|q| q.dist(m) <= 1e-9), "{m:?} missing from {pre:?}");
            }
        }
    }

    #[test]
    fn preimages_round_trip(p in params(), z in point()) {
        for w in preimages(&p, z) {
            let back = map_eval(&p, w);
            let scale = 1.0f64.max(z.norm()).max(p.mu());
            prop_assert!(back.dist(z) <= TAU_ROUND * scale, "{back:?} vs {z:?}");
        }
    }

    #[test]
    fn cone_region_agrees_with_radicand_signs(p in params(), z in point()) {
        let (r1, r2) = radicands(&p, z);
        match cone_membership(&p, z) {
            ConeRegion::Interior => prop_assert!(r1 > -1e-9 && r2 > -1e-9),
            ConeRegion::Outside => prop_assert!(r1 < 1e-9 || r2 < 1e-9),
            _ => prop_assert!(r1.abs() < 1e-8 || r2.abs() < 1e-8, "boundary with radicands {r1}, {r2}"),
        }
    }

    #[test]
    fn off_diagonal_pair_exists_past_pitchfork(p in params()) {
        // below mu = 1 the family is conjugate to mu -> 2 - mu and not characterized here
        prop_assume!(p.mu() > 1.0);
        let l = p.loci();
        let threshold = match p.strength_class() {
            Strength::Small => l.mu0.unwrap(),
            Strength::Large => l.mu0_prime.unwrap(),
            Strength::Other => return Ok(()),
        };
        prop_assume!((p.mu() - threshold).abs() > TAU_GEO);
        let count = fixed_points(&p)
            .iter()
            .filter(|f| matches!(f.label, FixedPointLabel::PmuEps | FixedPointLabel::RPmuEps))
            .count();
        prop_assert_eq!(count, if p.mu() > threshold { 2 } else { 0 });
    }

    #[test]
    fn fixed_points_are_fixed(p in params()) {
        for f in fixed_points(&p) {
            let z = f.location;
            prop_assert!(map_eval(&p, z).dist(z) <= 1e-12 * p.mu().max(1.0) * 10.0);
        }
    }
}

#[test]
fn origin_switches_class_at_mu0() {
    for e in [0.05, 0.2, 0.3, 0.45] {
        let m0 = loci(e).mu0.unwrap();
        let class = |mu: f64| {
            fixed_points(&ParamPoint::new(mu, e).unwrap())
                .into_iter()
                .find(|f| f.label == FixedPointLabel::O)
                .unwrap()
                .classification
        };
        assert_eq!(class(m0 * (1.0 - 1e-6)), Classification::Saddle);
        assert_eq!(class(m0 * (1.0 + 1e-6)), Classification::Repeller);
        assert_eq!(class(m0), Classification::NonHyperbolic);
    }
}
