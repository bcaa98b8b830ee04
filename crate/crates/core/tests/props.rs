//! Property tests for the geometric primitives.

use proptest::prelude::*;

use starsep_core::coord::{coord_from_str, coord_to_string, crd, frac};
use starsep_core::geom::{
    intersect_points, orient, points_segments_intersect, FrameMap, Point, SegmentIntersection,
};
use starsep_core::Direction;

fn pt() -> impl Strategy<Value = Point> {
    (-1000i64..1000, -1000i64..1000).prop_map(|(x, y)| Point::int(x, y))
}

proptest! {
    #[test]
    fn orient_antisymmetric(p in pt(), q in pt(), r in pt()) {
        prop_assert_eq!(orient(&p, &q, &r), -orient(&p, &r, &q));
    }

    #[test]
    fn orient_translation_invariant(p in pt(), q in pt(), r in pt(),
                                    tx in -500i64..500, ty in -500i64..500) {
        let t = |v: &Point| Point::new(&v.x + crd(tx), &v.y + crd(ty));
        prop_assert_eq!(orient(&p, &q, &r), orient(&t(&p), &t(&q), &t(&r)));
    }

    #[test]
    fn intersection_symmetric(a in pt(), b in pt(), c in pt(), d in pt()) {
        prop_assume!(a != b && c != d);
        prop_assert_eq!(intersect_points(&a, &b, &c, &d), intersect_points(&c, &d, &a, &b));
        prop_assert_eq!(
            points_segments_intersect(&a, &b, &c, &d),
            !matches!(intersect_points(&a, &b, &c, &d), SegmentIntersection::Empty)
        );
    }

    #[test]
    fn frame_map_invertible(p in pt(), dx in -9i64..9, dy in -9i64..9) {
        prop_assume!(dx != 0 || dy != 0);
        let m = FrameMap::for_direction(Direction::new(dx, dy).unwrap());
        prop_assert_eq!(m.invert(&m.apply(&p)), p);
    }

    #[test]
    fn frame_map_preserves_classification(
        a in pt(), b in pt(), c in pt(), d in pt(), dx in -9i64..9, dy in -9i64..9
    ) {
        prop_assume!(a != b && c != d && (dx != 0 || dy != 0));
        let m = FrameMap::for_direction(Direction::new(dx, dy).unwrap());
        let class = |i: &SegmentIntersection| match i {
            SegmentIntersection::Empty => 0u8,
            SegmentIntersection::Point(_) => 1,
            SegmentIntersection::Overlap(_, _) => 2,
        };
        let before = intersect_points(&a, &b, &c, &d);
        let after = intersect_points(&m.apply(&a), &m.apply(&b), &m.apply(&c), &m.apply(&d));
        prop_assert_eq!(class(&before), class(&after));
    }

    #[test]
    fn rational_string_roundtrip(n in -100_000i64..100_000, d in 1i64..10_000) {
        let c = frac(n, d);
        prop_assert_eq!(coord_from_str(&coord_to_string(&c)), Some(c));
    }
}
