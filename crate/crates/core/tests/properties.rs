use heislab::estimate::ks_two_sample;
use heislab::fmt::{fmt_sig, ROUND_TRIP_DIGITS};
use heislab::group::{distance, homogeneous_norm, left_translate, mul, translation_differential};
use heislab::sim::polygonal_lift;
use heislab::stats::{clopper_pearson, wilson_interval};
use heislab::{GroupElement, Side, SymplecticValue, TangentVector};
use proptest::prelude::*;

fn coord() -> impl Strategy<Value = f64> {
    -50.0f64..50.0
}

fn element() -> impl Strategy<Value = GroupElement> {
    (coord(), coord(), coord()).prop_map(|(x, y, z)| GroupElement::new(x, y, z))
}

proptest! {
    #[test]
    fn associativity(g in element(), h in element(), k in element()) {
        let a = mul(&mul(&g, &h), &k);
        let b = mul(&g, &mul(&h, &k));
        prop_assert!(a.max_abs_diff(&b) <= 1e-12 * a.scale().max(1.0));
    }

    #[test]
    fn distance_is_symmetric_and_left_invariant(k in element(), g1 in element(), g2 in element()) {
        let d = distance(&g1, &g2);
        prop_assert!((d - distance(&g2, &g1)).abs() <= 1e-12 * d.max(1.0));
        let scale = homogeneous_norm(&k) + homogeneous_norm(&g1) + homogeneous_norm(&g2);
        prop_assert!((distance(&(k * g1), &(k * g2)) - d).abs() <= 1e-12 * scale);
        prop_assert!(d <= homogeneous_norm(&g1) + homogeneous_norm(&g2) + 1e-12 * scale);
    }

    #[test]
    fn norm_is_homogeneous(g in element(), lambda in 1e-3f64..1e3) {
        let d = g.dilate(lambda).unwrap();
        let n = homogeneous_norm(&g) * lambda;
        prop_assert!((homogeneous_norm(&d) - n).abs() <= 1e-12 * n.max(f64::MIN_POSITIVE));
    }

    #[test]
    fn norm_survives_extreme_coordinates(x in -1e200f64..1e200, z in -1e300f64..1e300) {
        let n = homogeneous_norm(&GroupElement::new(x, x, z));
        prop_assert!(n.is_finite());
    }

    #[test]
    fn left_translation_composes(k in element(), j in element(), g in element()) {
        // L_{jk} = L_k ∘ L_j.
        let a = left_translate(&mul(&j, &k), &g);
        let b = left_translate(&k, &left_translate(&j, &g));
        prop_assert!(a.max_abs_diff(&b) <= 1e-12 * a.scale().max(1.0) * 10.0);
    }

    #[test]
    fn differential_preserves_horizontal_part(k in element(), p in element(), v in (coord(), coord(), coord())) {
        let t = TangentVector::new(p, v.0, v.1, v.2);
        for side in [Side::Left, Side::Right] {
            let w = translation_differential(&k, &t, side);
            prop_assert_eq!((w.v1, w.v2), (v.0, v.1));
        }
    }

    #[test]
    fn symplectic_form_is_antisymmetric(a in (coord(), coord()), b in (coord(), coord())) {
        let s = SymplecticValue::of([a.0, a.1], [b.0, b.1]).value()
            + SymplecticValue::of([b.0, b.1], [a.0, a.1]).value();
        prop_assert!(s.abs() <= 1e-15);
    }

    #[test]
    fn lift_is_horizontal(pts in prop::collection::vec((coord(), coord()), 2..40)) {
        let path = polygonal_lift(&pts).unwrap();
        let scale = path.vertices().iter().map(GroupElement::scale).fold(1.0, f64::max);
        prop_assert!(heislab::group::horizontality_defect(&path).unwrap() <= 1e-12 * scale);
    }

    #[test]
    fn formatted_floats_round_trip(x in any::<f64>().prop_filter("finite", |x| x.is_finite())) {
        let s = fmt_sig(x, ROUND_TRIP_DIGITS);
        prop_assert_eq!(s.parse::<f64>().unwrap(), x);
    }

    #[test]
    fn intervals_contain_estimate(k in 0u64..500, extra in 1u64..500) {
        let n = k + extra;
        let p = k as f64 / n as f64;
        let (lo, hi) = wilson_interval(p, n);
        prop_assert!(lo <= p + 1e-12 && p <= hi + 1e-12);
        prop_assert!((0.0..=1.0).contains(&lo) && (0.0..=1.0).contains(&hi));
        let (lo, hi) = clopper_pearson(k, n);
        prop_assert!(lo <= p + 1e-12 && p <= hi + 1e-12);
    }

    #[test]
    fn ks_statistic_is_symmetric(a in prop::collection::vec(-5.0f64..5.0, 1..60),
                                 b in prop::collection::vec(-5.0f64..5.0, 1..60)) {
        let r1 = ks_two_sample(&a, &b).unwrap();
        let r2 = ks_two_sample(&b, &a).unwrap();
        prop_assert_eq!(r1.statistic, r2.statistic);
        prop_assert!((0.0..=1.0).contains(&r1.statistic));
        prop_assert!((0.0..=1.0).contains(&r1.p_value));
        prop_assert_eq!(ks_two_sample(&a, &a).unwrap().statistic, 0.0);
    }
}
