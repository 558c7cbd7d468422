//! Seeded random inputs for experiments and tests.

use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

use crate::geometry::{general_position_check, parallel_to_side, ConvexPolygon, Point2, PointSet, Violation};

/// `count` integer points in `[0, extent)^2` in general position with
/// respect to `d`. Candidates that create a parallel pair are skipped; if a
/// four-point boundary shows up at the end, the last point involved is
/// replaced and the check repeats.
pub fn random_general_position(d: &ConvexPolygon, count: usize, extent: i64, seed: u64) -> PointSet {
    assert!(extent >= 2, "extent too small");
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
    let mut points: Vec<Point2> = Vec::with_capacity(count);
    loop {
        while points.len() < count {
            let p = Point2::from_ints(rng.gen_range(0..extent), rng.gen_range(0..extent));
            if points.iter().all(|q| *q != p && parallel_to_side(d, q, &p).is_none()) {
                points.push(p);
            }
        }
        match general_position_check(d, &points) {
            Ok(()) => return PointSet::verified(d, points).expect("just checked"),
            Err(Violation::CommonBoundary { points: bad, .. }) => {
                let last = *bad.iter().max().expect("nonempty witness");
                points.remove(last);
            }
            Err(v) => unreachable!("pairs were filtered: {v}"),
        }
    }
}

/// Distinct random integer points in `[-extent, extent)^2` with no
/// general-position filtering.
pub fn random_points(count: usize, extent: i64, seed: u64) -> Vec<Point2> {
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
    let mut points: Vec<Point2> = Vec::with_capacity(count);
    while points.len() < count {
        let p = Point2::from_ints(rng.gen_range(-extent..extent), rng.gen_range(-extent..extent));
        if !points.contains(&p) {
            points.push(p);
        }
    }
    points
}
