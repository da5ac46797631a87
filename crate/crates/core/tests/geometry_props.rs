use clt_bounds_core::geometry::{smooth_indicator, Offset, SmoothingProfile, SmoothingSign, TestSet};
use clt_bounds_core::montecarlo::gaussian_measure;
use clt_bounds_core::perimeter::{analytic_perimeter, PerimeterShape};
use proptest::prelude::*;

fn ball_2d() -> impl Strategy<Value = TestSet> {
    (-2.0..2.0f64, -2.0..2.0f64, 0.2..3.0f64).prop_map(|(a, b, r)| TestSet::ball(vec![a, b], r).unwrap())
}

fn half_space_2d() -> impl Strategy<Value = TestSet> {
    (0.0..std::f64::consts::TAU, -2.0..2.0f64)
        .prop_map(|(th, c)| TestSet::half_space(vec![th.cos(), th.sin()], c).unwrap())
}

/// Two or three intervals with gaps of at least 0.5.
fn interval_union() -> impl Strategy<Value = TestSet> {
    (-3.0..0.0f64, prop::collection::vec((0.3..2.0f64, 0.5..2.5f64), 2..=3)).prop_map(|(start, parts)| {
        let mut x = start;
        let mut ivs = Vec::new();
        for (len, gap) in parts {
            ivs.push([x, x + len]);
            x += len + gap;
        }
        let delta = ivs
            .windows(2)
            .map(|w| 0.5 * (w[1][0] + w[1][1] - w[0][0] - w[0][1]))
            .fold(f64::INFINITY, f64::min);
        TestSet::interval_union(ivs, delta).unwrap()
    })
}

fn any_set() -> impl Strategy<Value = TestSet> {
    prop_oneof![ball_2d(), half_space_2d(), interval_union()]
}

fn point_for(set: &TestSet, raw: [f64; 2]) -> Vec<f64> {
    raw[..set.dim()].to_vec()
}

fn in_offset(o: &Offset, x: &[f64]) -> bool {
    match o {
        Offset::Set(s) => s.contains(x),
        Offset::Empty => false,
        Offset::FullSpace => true,
    }
}

proptest! {
    #[test]
    fn offsets_are_monotone(set in any_set(), s in -0.4..0.4f64, dt in 0.0..0.4f64, x in prop::array::uniform2(-5.0..5.0f64)) {
        let x = point_for(&set, x);
        let small = set.offset(s);
        let large = set.offset(s + dt);
        prop_assert!(!in_offset(&small, &x) || in_offset(&large, &x));
    }

    #[test]
    fn offset_is_sublevel_set(set in any_set(), t in -0.4..0.4f64, x in prop::array::uniform2(-5.0..5.0f64)) {
        let x = point_for(&set, x);
        let r = set.rho(&x);
        // stay clear of the level set itself
        prop_assume!((r - t).abs() > 1e-9);
        prop_assert_eq!(in_offset(&set.offset(t), &x), r <= t, "rho = {}", r);
    }

    #[test]
    fn rho_sign_matches_membership(set in any_set(), x in prop::array::uniform2(-5.0..5.0f64)) {
        let x = point_for(&set, x);
        let r = set.rho(&x);
        prop_assume!(r.abs() > 1e-12);
        prop_assert_eq!(set.contains(&x), r < 0.0);
    }

    #[test]
    fn ball_rho_is_signed_distance(set in ball_2d(), x in prop::array::uniform2(-5.0..5.0f64)) {
        let TestSet::Ball { center, radius } = &set else { unreachable!() };
        // brute force over a dense boundary polygon
        let n = 20_000;
        let d = (0..n)
            .map(|k| {
                let th = std::f64::consts::TAU * k as f64 / n as f64;
                let p = [center[0] + radius * th.cos(), center[1] + radius * th.sin()];
                ((x[0] - p[0]).powi(2) + (x[1] - p[1]).powi(2)).sqrt()
            })
            .fold(f64::INFINITY, f64::min);
        let signed = if set.contains(&x) { -d } else { d };
        // nearest vertex is at most half an arc step from the nearest boundary point
        let tol = radius * std::f64::consts::PI / n as f64 + 1e-12;
        prop_assert!((set.rho(&x) - signed).abs() <= tol);
    }

    #[test]
    fn interval_rho_bounded_by_distance(set in interval_union(), x in -8.0..8.0f64) {
        let TestSet::IntervalUnion { intervals, .. } = &set else { unreachable!() };
        let dist = intervals
            .iter()
            .map(|iv| if x < iv[0] { iv[0] - x } else if x > iv[1] { x - iv[1] } else { 0.0 })
            .fold(f64::INFINITY, f64::min);
        let r = set.rho(&[x]);
        if dist > 0.0 {
            // outside: positive and never beyond the distance; equal off the hull
            prop_assert!(r > 0.0 && r <= dist + 1e-12);
            let lo = intervals[0][0];
            let hi = intervals[intervals.len() - 1][1];
            if x < lo || x > hi {
                prop_assert!((r - dist).abs() < 1e-12);
            }
        } else {
            prop_assert!(r <= 0.0);
        }
    }

    #[test]
    fn smooth_indicator_in_unit_interval(set in any_set(), eps in 0.05..1.0f64, outer in any::<bool>(), x in prop::array::uniform2(-5.0..5.0f64)) {
        let x = point_for(&set, x);
        let sign = if outer { SmoothingSign::Outer } else { SmoothingSign::Inner };
        let p = SmoothingProfile::new(set.clone(), eps, sign).unwrap();
        let v = smooth_indicator(&p, &x);
        prop_assert!((0.0..=1.0).contains(&v));
        // outer profile dominates the indicator, inner profile is dominated
        if outer && set.contains(&x) {
            prop_assert_eq!(v, 1.0);
        }
        if !outer && !set.contains(&x) {
            prop_assert_eq!(v, 0.0);
        }
    }
}

#[test]
fn ball_annulus_tends_to_perimeter() {
    for (d, r) in [(2u32, 1.0), (3, 1.5), (5, 2.0)] {
        let ball = TestSet::ball(vec![0.0; d as usize], r).unwrap();
        let eps = 1e-4;
        let grown = TestSet::ball(vec![0.0; d as usize], r + eps).unwrap();
        let inner = gaussian_measure(&ball, None, 1.0).unwrap().value;
        let outer = gaussian_measure(&grown, None, 1.0).unwrap().value;
        let exact = analytic_perimeter(PerimeterShape::Ball { radius: r }, d).unwrap();
        let ratio = (outer - inner) / eps / exact;
        assert!((ratio - 1.0).abs() < 0.01, "d={d}: {ratio}");
    }
}

#[test]
fn figure_one_offsets() {
    let fig = TestSet::figure_one();
    assert_eq!(fig.rho(&[-1.0]), -0.5);
    let Offset::Set(TestSet::IntervalUnion { intervals, .. }) = fig.offset(-0.45) else {
        panic!()
    };
    assert!((intervals[0][0] + 1.1).abs() < 1e-12 && (intervals[1][1] - 4.1).abs() < 1e-12);
    assert!(matches!(fig.offset(-1.0), Offset::Empty));
}
