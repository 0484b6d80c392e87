use coupled_logistic::orbit::escape_time;
use coupled_logistic::raster::*;
use coupled_logistic::*;
use proptest::prelude::*;

fn window() -> Rect {
    Rect::new(-0.25, 1.25, -0.25, 1.25).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn rendering_is_deterministic(mu in 2.0..5.0f64, e in prop_oneof![-1.0..-0.1f64, 0.05..0.45f64]) {
        let p = ParamPoint::new(mu, e).unwrap();
        let a = render_escape(&p, window(), (96, 80), 300).unwrap();
        let b = render_escape(&p, window(), (96, 80), 300).unwrap();
        prop_assert_eq!(a.cells, b.cells);
    }

    #[test]
    fn raising_n_max_never_unescapes_a_cell(mu in 2.0..5.0f64, e in prop_oneof![-1.0..-0.1f64, 0.05..0.45f64], lo in 2u64..50) {
        let p = ParamPoint::new(mu, e).unwrap();
        let shallow = render_escape(&p, window(), (80, 80), lo).unwrap();
        let deep = render_escape(&p, window(), (80, 80), lo * 10).unwrap();
        for (s, d) in shallow.cells.iter().zip(&deep.cells) {
            if let Cell::Escaped(k) = s {
                prop_assert_eq!(d, &Cell::Escaped(*k));
            }
        }
    }

    #[test]
    fn escape_times_match_the_orbit_engine(mu in 2.0..5.0f64, e in prop_oneof![-1.0..-0.1f64, 0.05..0.45f64]) {
        let p = ParamPoint::new(mu, e).unwrap();
        let r = render_escape(&p, window(), (40, 40), 200).unwrap();
        for (i, c) in r.cells.iter().enumerate() {
            let z = r.grid.center_of_index(i);
            match c {
                Cell::Escaped(k) => prop_assert_eq!(escape_time(&p, z, 200), Some(*k as u64)),
                Cell::Bounded => prop_assert_eq!(escape_time(&p, z, 200), None),
                other => prop_assert!(false, "unexpected cell {other:?}"),
            }
        }
    }
}

#[test]
fn component_counts_are_stable_across_resolutions() {
    let win = window();
    for (mu, e) in [(4.16, 0.38), (4.03, 0.394)] {
        let p = ParamPoint::new(mu, e).unwrap();
        let count = |n: usize| {
            let r = render_escape(&p, win, (n, n), COMPONENT_DEPTH).unwrap();
            label_components(&r, Target::Escaped).interior_significant().count()
        };
        assert_eq!(count(512), count(1024), "({mu}, {e})");
    }
}

#[test]
fn partial_render_leaves_unset_rows() {
    let p = ParamPoint::new(3.0, 0.2).unwrap();
    let control = RenderControl::default();
    control.cancel.store(true, std::sync::atomic::Ordering::Relaxed);
    let r = render_escape_with(&p, window(), (32, 32), 100, 1, &control).unwrap();
    assert!(r.meta.partial);
    assert!(r.cells.iter().all(|c| *c == Cell::Unset));
}
