use std::collections::BTreeSet;

use proptest::prelude::*;

use polycolor::geometry::{format_rational, parse_rational, rat, ConvexPolygon, Point2, PointSet};
use polycolor::mask::PointMask;
use polycolor::ranges::RangeSpace;

proptest! {
    #[test]
    fn rationals_round_trip(n in -1_000_000i64..1_000_000, d in 1i64..1_000_000) {
        let q = rat(n, d);
        prop_assert_eq!(parse_rational(&format_rational(&q)).unwrap(), q);
    }

    #[test]
    fn masks_behave_like_sets(a in prop::collection::btree_set(0usize..150, 0..40),
                              b in prop::collection::btree_set(0usize..150, 0..40)) {
        let av: Vec<usize> = a.iter().copied().collect();
        let bv: Vec<usize> = b.iter().copied().collect();
        let ma = PointMask::from_indices(150, &av);
        let mb = PointMask::from_indices(150, &bv);
        prop_assert_eq!(ma.to_vec(), av);
        prop_assert_eq!(ma.count(), a.len());
        prop_assert_eq!(ma.intersects(&mb), !a.is_disjoint(&b));
        prop_assert_eq!(ma.is_subset(&mb), a.is_subset(&b));
        let u: BTreeSet<usize> = a.union(&b).copied().collect();
        prop_assert_eq!(ma.union(&mb).to_vec(), u.into_iter().collect::<Vec<_>>());
    }

    /// Translating and scaling the points by a positive factor maps homothets
    /// to homothets, so the range family is unchanged.
    #[test]
    fn ranges_are_similarity_invariant(seed in 0u64..1000, k in 1i64..7, dx in -50i64..50, dy in -50i64..50) {
        let d = ConvexPolygon::triangle();
        let s = polycolor::generate::random_general_position(&d, 7, 1000, seed);
        let moved: Vec<Point2> = s.points().iter()
            .map(|p| Point2::new(&p.x * rat(k, 3) + rat(dx, 1), &p.y * rat(k, 3) + rat(dy, 1)))
            .collect();
        let t = PointSet::verified(&d, moved).unwrap();
        prop_assert_eq!(RangeSpace::build(&d, &s).unwrap().index_sets(), RangeSpace::build(&d, &t).unwrap().index_sets());
    }
}
