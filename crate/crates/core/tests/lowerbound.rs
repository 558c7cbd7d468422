use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

use polycolor::geometry::{int, rat, Point2, Rational};
use polycolor::lowerbound::{
    build_h, check_unavoidable, hextant_embed, hextant_range_check, realize_unit_balls, realize_verified,
    verify_realization, Hextant, Rect, RecursiveHypergraph, Unavoidability,
};

fn n(k: usize, l: usize, m: usize) -> usize {
    match (k, l, m) {
        (0, _, _) | (_, 0, _) | (_, _, 0) => 0,
        (1, 1, 1) => 1,
        _ => n(k - 1, l, m) + n(k, l - 1, m) + n(k, l, m - 1) + 1,
    }
}

/// Family sizes: singletons when the family's parameter is 1, otherwise
/// the sum over the three children.
fn e(f: usize, p: [usize; 3]) -> usize {
    if p.contains(&0) {
        return 0;
    }
    if p[f] == 1 {
        return n(p[0], p[1], p[2]);
    }
    (0..3)
        .map(|c| {
            let mut q = p;
            q[c] -= 1;
            e(f, q)
        })
        .sum()
}

/// Direct check that `colors` puts no family-`i` edge entirely in color `i+1`.
fn avoids(h: &RecursiveHypergraph, colors: &[u32]) -> bool {
    h.edges().all(|(f, _, e)| !e.iter().all(|&v| colors[v] == f as u32 + 1))
}

#[test]
fn golden_counts() {
    assert_eq!(build_h(1, 1, 1).unwrap().n, 1);
    assert_eq!(build_h(2, 1, 1).unwrap().n, 2);
    assert_eq!(build_h(1, 2, 2).unwrap().n, 5);
    let h = build_h(2, 2, 2).unwrap();
    assert_eq!(h.n, 16);
    assert_eq!(h.families.each_ref().map(Vec::len), [11, 11, 11]);
    assert_eq!((n(2, 2, 2), e(0, [2, 2, 2]), e(1, [2, 2, 2]), e(2, [2, 2, 2])), (16, 11, 11, 11));
}

#[test]
fn sizes_and_counts_up_to_eight() {
    for k in 1..=6 {
        for l in 1..=6 {
            for m in 1..=6 {
                if k + l + m > 8 {
                    continue;
                }
                let h = build_h(k, l, m).unwrap();
                assert_eq!(h.n, n(k, l, m));
                for f in 0..3 {
                    assert_eq!(h.families[f].len(), e(f, [k, l, m]));
                    for edge in &h.families[f] {
                        assert_eq!(edge.len(), h.family_size(f), "({k},{l},{m}) family {f}");
                        assert!(edge.windows(2).all(|w| w[0] < w[1]));
                        assert!(edge.iter().all(|&v| v < h.n));
                    }
                }
            }
        }
    }
}

#[test]
fn unavoidable_up_to_six_and_at_two_two_two() {
    for k in 1..=4 {
        for l in 1..=4 {
            for m in 1..=4 {
                if k + l + m <= 6 || (k, l, m) == (2, 2, 2) {
                    let h = build_h(k, l, m).unwrap();
                    assert_eq!(check_unavoidable(&h).unwrap(), Unavoidability::Unavoidable, "({k},{l},{m})");
                }
            }
        }
    }
}

#[test]
fn deleting_an_edge_makes_it_avoidable() {
    let mut h = build_h(2, 2, 2).unwrap();
    h.families[0].remove(0);
    match check_unavoidable(&h).unwrap() {
        Unavoidability::Avoidable(c) => {
            assert_eq!(c.len(), 16);
            assert!(avoids(&h, &c));
        }
        Unavoidability::Unavoidable => panic!("expected a witness"),
    }
}

#[test]
fn realization_of_two_two_two() {
    let h = build_h(2, 2, 2).unwrap();
    let (r, rep) = realize_verified(&h, &rat(1, 8), 10).unwrap();
    assert_eq!(r.points.len(), 16);
    assert_eq!(r.balls.iter().map(Vec::len).sum::<usize>(), 33);
    assert_eq!(rep.pairs_checked, 16 * 33);
    assert!(rep.passed());
    // the incidence structure read back from the geometry is the hypergraph
    for (f, j, edge) in h.edges() {
        let inside: Vec<usize> = (0..16).filter(|&v| r.balls[f][j].contains(&r.points[v])).collect();
        assert_eq!(inside, edge);
    }
}

#[test]
fn realizations_pass_on_small_instances() {
    for (k, l, m) in [(2, 1, 1), (1, 2, 1), (1, 1, 2), (2, 2, 1), (1, 2, 2), (3, 1, 1), (2, 1, 2)] {
        let h = build_h(k, l, m).unwrap();
        let r = realize_unit_balls(k, l, m, &rat(1, 8)).unwrap();
        let rep = verify_realization(&r, &h).unwrap();
        assert!(rep.passed(), "({k},{l},{m}): {:?}", rep.violations);
    }
}

#[test]
fn moved_ball_is_reported() {
    let h = build_h(2, 2, 2).unwrap();
    let mut r = realize_unit_balls(2, 2, 2, &rat(1, 8)).unwrap();
    r.balls[1][3].center.x += int(1);
    let rep = verify_realization(&r, &h).unwrap();
    assert!(!rep.passed());
    assert!(rep.violations.iter().all(|v| v.family == 1 && v.edge == 3));
    assert!(rep.violations.iter().any(|v| v.expected_inside));
}

#[test]
fn hextants_match_rectangles() {
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(5);
    for _ in 0..20 {
        let pts: Vec<Point2> =
            (0..20).map(|_| Point2::from_ints(rng.gen_range(-50..50), rng.gen_range(-50..50))).collect();
        let image = hextant_embed(&pts);
        for _ in 0..50 {
            let hx = Hextant {
                x0: int(rng.gen_range(-60..60)),
                y0: int(rng.gen_range(-60..60)),
                z0: int(rng.gen_range(-60..60)),
                w0: int(rng.gen_range(-60..60)),
            };
            let rect = hx.trace();
            assert!(hextant_range_check(&pts, &rect, &hx).unwrap());
            assert_eq!(Hextant::from_rect(&rect), hx);
            // both sides evaluated from the definitions
            for (p, q) in pts.iter().zip(&image) {
                let in_rect = hx.x0 <= p.x && p.x <= -hx.y0.clone() && hx.z0 <= p.y && p.y <= -hx.w0.clone();
                let in_hx = q.x >= hx.x0 && q.y >= hx.y0 && q.z >= hx.z0 && q.w >= hx.w0;
                assert_eq!(in_rect, in_hx);
            }
        }
    }
    let far = Hextant { x0: int(-1000), y0: int(-1000), z0: int(-1000), w0: int(-1000) };
    let pts = [Point2::from_ints(1, 1), Point2::from_ints(-3, 7)];
    assert!(hextant_embed(&pts).iter().all(|q| far.contains(q)));
    let mismatched = Rect { u0: Rational::one(), u1: int(2), v0: int(0), v1: int(1) };
    assert!(hextant_range_check(&pts, &mismatched, &far).is_err());
}
