use coupled_logistic::bifurcation::*;
use coupled_logistic::params::TAU_FIX;
use coupled_logistic::*;
use num_complex::Complex64;
use proptest::prelude::*;

fn fd_cycle_jacobian(p: &ParamPoint, z: PlanePoint, period: usize) -> Mat2 {
    let h = 1e-7;
    let flow = |w: PlanePoint| (0..period).fold(w, |a, _| map_eval(p, a));
    let (xp, xm) = (flow(PlanePoint::new(z.x + h, z.y)), flow(PlanePoint::new(z.x - h, z.y)));
    let (yp, ym) = (flow(PlanePoint::new(z.x, z.y + h)), flow(PlanePoint::new(z.x, z.y - h)));
    Mat2([
        [(xp.x - xm.x) / (2.0 * h), (yp.x - ym.x) / (2.0 * h)],
        [(xp.y - xm.y) / (2.0 * h), (yp.y - ym.y) / (2.0 * h)],
    ])
}

fn eig_close(a: [Complex64; 2], b: [Complex64; 2], tol: f64) -> bool {
    let d = |x: Complex64, y: Complex64| (x - y).norm();
    (d(a[0], b[0]) <= tol && d(a[1], b[1]) <= tol) || (d(a[0], b[1]) <= tol && d(a[1], b[0]) <= tol)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn newton_orbits_meet_residual_and_eigenvalue_contracts(
        mu in 2.0..3.4f64,
        e in prop_oneof![-1.0..-0.3f64, 0.02..0.2f64],
        x in 0.05..0.95f64,
        y in 0.05..0.95f64,
        period in 1usize..=2,
    ) {
        let p = ParamPoint::new(mu, e).unwrap();
        if let Ok(orbit) = find_periodic_orbit(&p, period, PlanePoint::new(x, y)) {
            prop_assert!(orbit.residual <= TAU_FIX, "{:e}", orbit.residual);
            prop_assert_eq!(orbit.points.len(), period);
            let fd = fd_cycle_jacobian(&p, orbit.points[0], period).eigenvalues();
            prop_assert!(eig_close(orbit.cycle_eigenvalues, fd, 1e-5), "{:?} vs {:?}", orbit.cycle_eigenvalues, fd);
            if period == 2 {
                let back = map_eval(&p, orbit.points[0]);
                prop_assert!(back.dist(orbit.points[0]) > 1e-9, "minimality");
            }
        }
    }
}

#[test]
fn newton_finds_diagonal_fixed_points_with_expected_spectrum() {
    let (mu, e) = (2.6, 0.15);
    let p = ParamPoint::new(mu, e).unwrap();
    let o = find_periodic_orbit(&p, 1, PlanePoint::new(0.01, -0.01)).unwrap();
    assert!(o.points[0].norm() < 1e-12);
    let want = [Complex64::new(mu, 0.0), Complex64::new((1.0 - 2.0 * e) * mu, 0.0)];
    assert!(eig_close(o.cycle_eigenvalues, want, 1e-10));
    let x = (mu - 1.0) / mu;
    let pm = find_periodic_orbit(&p, 1, PlanePoint::new(x + 0.01, x - 0.01)).unwrap();
    assert!(pm.points[0].dist(PlanePoint::new(x, x)) < 1e-12);
    let want = [Complex64::new(2.0 - mu, 0.0), Complex64::new((1.0 - 2.0 * e) * (2.0 - mu), 0.0)];
    assert!(eig_close(pm.cycle_eigenvalues, want, 1e-10));
}

#[test]
fn period_two_attractor_at_large_strength() {
    let p = ParamPoint::new(2.37, -0.9).unwrap();
    let guess = closest_return_guess(&p, PlanePoint::new(0.3, 0.6), 2, 5000, 2000).unwrap();
    let orbit = find_periodic_orbit(&p, 2, guess).unwrap();
    assert!(orbit.is_attracting(), "{:?}", orbit.cycle_eigenvalues);
    assert!(orbit.max_modulus() < 1.0);
}

#[test]
fn continuation_never_jumps_branches() {
    let p = ParamPoint::new(2.4, -0.9).unwrap();
    let seed = closest_return_guess(&p, PlanePoint::new(0.3, 0.6), 2, 5000, 2000).unwrap();
    let steps = 100;
    let (path, lost) = continue_orbit(-0.9, 2, 2.4, 2.5, steps, seed).unwrap();
    assert!(lost.is_none());
    let dmu = 0.1 / steps as f64;
    let dists: Vec<f64> = path.windows(2).map(|w| w[0].orbit.points[0].dist(w[1].orbit.points[0])).collect();
    for (i, w) in path.windows(3).enumerate() {
        // secant estimate of |dz/dmu| from the neighbouring pair
        let slope = w[0].orbit.points[0].dist(w[1].orbit.points[0]).max(w[1].orbit.points[0].dist(w[2].orbit.points[0])) / dmu;
        assert!(dists[i + 1] < 10.0 * dmu * slope.max(1.0), "step {i}: {:e}", dists[i + 1]);
    }
    // every step is also small in absolute terms
    assert!(dists.iter().all(|&d| d < 0.05));
}

#[test]
fn hopf_brackets_satisfy_their_invariants() {
    for (e, lo, hi, width) in [(0.14, 4.0, 4.01, 1e-5), (-0.9, 2.4, 2.6, 1e-3)] {
        let start = ParamPoint::new(lo, e).unwrap();
        let seed = closest_return_guess(&start, PlanePoint::new(0.3, 0.6), 2, 20_000, 4000).unwrap();
        let b = hopf_bracket(e, 2, lo, hi, width, seed).unwrap();
        assert!(b.refined);
        assert!(b.mu_hi - b.mu_lo <= width * (1.0 + 1e-9));
        assert!(b.orbit_at_lo.has_complex_pair());
        assert!(b.modulus_lo < 1.0);
        match b.modulus_hi {
            Some(m) => assert!(m > 1.0),
            None => assert!(b.orbit_lost),
        }
    }
}

#[test]
fn degenerate_width_returns_the_full_range() {
    let start = ParamPoint::new(2.4, -0.9).unwrap();
    let seed = closest_return_guess(&start, PlanePoint::new(0.3, 0.6), 2, 5000, 2000).unwrap();
    let b = hopf_bracket(-0.9, 2, 2.4, 2.6, 1.0, seed).unwrap();
    assert!(!b.refined);
    assert_eq!((b.mu_lo, b.mu_hi), (2.4, 2.6));
}

#[test]
fn diagonal_point_classification_at_ten_negative_couplings() {
    for i in 0..10 {
        let e = -0.1 - 0.15 * i as f64;
        let l = loci(e);
        let (m0, m2) = (l.mu0_prime.unwrap(), l.mu2.unwrap());
        for k in 0..200 {
            let mu = 1.01 + 4.0 * k as f64 / 200.0;
            if [m0, m2, 3.0].iter().any(|b| (mu - b).abs() < 1e-6) {
                continue;
            }
            let fps = fixed_points(&ParamPoint::new(mu, e).unwrap());
            let class = |label| fps.iter().find(|f| f.label == label).unwrap().classification;
            let want = if mu < m0 {
                Classification::Saddle
            } else if mu < m2 {
                Classification::Attractor
            } else if mu < 3.0 {
                Classification::Saddle
            } else {
                Classification::Repeller
            };
            assert_eq!(class(FixedPointLabel::Pmu), want, "mu {mu}, e {e}");
            assert_eq!(class(FixedPointLabel::O), Classification::Repeller, "mu {mu}, e {e}");
        }
    }
}

#[test]
fn pitchfork_flips_at_the_loci() {
    for (e, locus) in [(0.2, 5.0 / 3.0), (-0.5, 1.5)] {
        let r = pitchfork_check(e, 12).unwrap();
        assert!((r.locus - locus).abs() < 1e-12);
        assert!(r.discriminant_at_locus.abs() <= 1e-8);
        assert!(r.flip_ok && r.exponent_ok && r.passed, "{r:?}");
        assert!((r.exponent - 0.5).abs() <= 0.1);
    }
}

#[test]
fn loci_diagram_layouts() {
    let small = loci_diagram((0.0, 0.5), (1.0, 20.0), (200, 200));
    let present: Vec<Locus> = Locus::ALL.into_iter().filter(|l| small.curve(*l).is_some_and(|c| !c.points.is_empty())).collect();
    assert_eq!(present, vec![Locus::Mu0, Locus::Mu1, Locus::MuPrime]);
    let prime = small.curve(Locus::MuPrime).unwrap();
    let last_eps = prime.points.iter().map(|p| p.0).fold(f64::MIN, f64::max);
    assert!(last_eps <= 0.375 + 1e-12 && last_eps > 0.37, "{last_eps}");

    let large = loci_diagram((-0.55, 0.0), (0.0, 6.0), (200, 200));
    let present: Vec<Locus> = Locus::ALL.into_iter().filter(|l| large.curve(*l).is_some_and(|c| !c.points.is_empty())).collect();
    assert_eq!(present, vec![Locus::Mu1, Locus::Mu0Prime, Locus::Mu2]);
    for i in 1..200 {
        let e = -0.55 * i as f64 / 200.0;
        let (a, b, c) = (Locus::Mu0Prime.eval(e).unwrap(), Locus::Mu2.eval(e).unwrap(), Locus::Mu1.eval(e).unwrap());
        assert!(a < b && b < c, "e {e}: {a} {b} {c}");
    }
}
