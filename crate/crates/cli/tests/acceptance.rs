//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

#[path = "../../core/tests/support/oracle.rs"]
mod oracle;

use std::collections::{BTreeSet, HashSet};
use std::time::Instant;

use num_traits::Signed;
use serde_json::Value;

use polycolor::delaunay::{build_dt_from_ranges, check_dt_with_ranges};
use polycolor::generate::{random_general_position, random_points};
use polycolor::geometry::{rat, ConvexPolygon, Point2, PointSet, Rational};
use polycolor::lowerbound::{
    build_h, check_unavoidable, hextant_embed, hextant_range_check, realize_unit_balls, realize_verified,
    verify_realization, Hextant, Unavoidability,
};
use polycolor::pathcolor::{poh_coloring, verify_path_property};
use polycolor::planar::{random_triangulation, RotationSystem};
use polycolor::ranges::{enumerate_ranges, RangeSpace};
use polycolor::recolor::{iterated_coloring, ColorOptions};

type Outcome = Result<String, String>;

fn cli(args: &[&str]) -> (i32, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = polycolor_cli::run(std::iter::once("polycolor").chain(args.iter().copied()), &mut out, &mut err);
    let text = if code == 0 { out } else { [out, err].concat() };
    (code, String::from_utf8(text).expect("utf8"))
}

fn criterion_1() -> Outcome {
    let dir = tempfile::TempDir::new().map_err(|e| e.to_string())?;
    let mut within = 0;
    let mut worst = 0;
    for (name, d) in [("square", ConvexPolygon::square()), ("triangle", ConvexPolygon::triangle())] {
        for seed in 0..10u64 {
            let s = random_general_position(&d, 40, 1_000_000, 1000 + seed);
            let doc = polycolor_cli::doc::InstanceDocument {
                polygon: None,
                points: s.points().iter().map(polycolor_cli::doc::pair).collect(),
                colors: None,
                parameters: Default::default(),
            };
            let path = dir.path().join(format!("{name}-{seed}.json"));
            std::fs::write(&path, serde_json::to_string(&doc).expect("json")).map_err(|e| e.to_string())?;
            let (code, out) = cli(&["color", "--polygon", name, "--points", path.to_str().expect("path")]);
            if code != 0 {
                return Err(format!("{name} seed {seed}: exit {code}: {out}"));
            }
            let v: Value = serde_json::from_str(&out).map_err(|e| e.to_string())?;
            let t = v["t"].as_u64().unwrap_or(0) as usize;
            let m = v["m_empirical"].as_u64().unwrap_or(0) as usize;
            if t != 4 * d.side_count() + 12 || v["lemma"]["passed"] != Value::Bool(true) {
                return Err(format!("{name} seed {seed}: t {t}, lemma {}", v["lemma"]));
            }
            // the final coloring, re-checked from scratch
            let colors: Vec<u32> = serde_json::from_value(v["colors"].clone()).map_err(|e| e.to_string())?;
            let space = RangeSpace::build(&d, &s).map_err(|e| e.to_string())?;
            let largest = space
                .masks()
                .iter()
                .filter(|r| r.iter().map(|p| colors[p]).collect::<HashSet<_>>().len() == 1)
                .map(|r| r.count())
                .max()
                .unwrap_or(0);
            if largest >= m {
                return Err(format!("{name} seed {seed}: monochromatic range of {largest} with m = {m}"));
            }
            if m <= 40 - 5 {
                within += 1;
            }
            worst = worst.max(m);
        }
    }
    if within >= 18 {
        Ok(format!("20 runs exit 0; m_empirical <= |S|-5 on {within}/20 (max {worst})"))
    } else {
        Err(format!("m_empirical <= |S|-5 on only {within}/20"))
    }
}

fn criterion_2() -> Outcome {
    let mut total = 0;
    for i in 0..25u64 {
        let d = if i % 2 == 0 { ConvexPolygon::square() } else { ConvexPolygon::triangle() };
        let n = 4 + (i as usize % 5);
        let s = random_general_position(&d, n, 60, 200 + i);
        let engine: BTreeSet<Vec<usize>> =
            enumerate_ranges(&d, &s).map_err(|e| e.to_string())?.index_sets().into_iter().collect();
        let sampled = oracle::sampled_ranges(&d, s.points(), 2, 8);
        if engine != sampled {
            let only_engine: Vec<_> = engine.difference(&sampled).collect();
            let only_oracle: Vec<_> = sampled.difference(&engine).collect();
            return Err(format!("instance {i}: engine-only {only_engine:?}, oracle-only {only_oracle:?}"));
        }
        total += engine.len();
    }
    Ok(format!("25 instances agree exactly ({total} ranges)"))
}

fn pentagon() -> ConvexPolygon {
    ConvexPolygon::from_int_vertices(&[(0, 0), (4, -1), (6, 2), (3, 5), (-1, 3)])
}

fn dt_instances() -> Vec<(ConvexPolygon, PointSet)> {
    (0..50u64)
        .map(|i| {
            let d = match i % 3 {
                0 => ConvexPolygon::square(),
                1 => ConvexPolygon::triangle(),
                _ => pentagon(),
            };
            let n = 5 + (i as usize * 7) % 26;
            let s = random_general_position(&d, n, 1_000_000, 300 + i);
            (d, s)
        })
        .collect()
}

fn criterion_3(dts: &mut Vec<RotationSystem>) -> Outcome {
    let mut ranges = 0;
    for (i, (d, s)) in dt_instances().iter().enumerate() {
        let space = RangeSpace::build(d, s).map_err(|e| e.to_string())?;
        let g = build_dt_from_ranges(s, &space).map_err(|e| e.to_string())?;
        let r = check_dt_with_ranges(&g, d, s, &space).map_err(|e| e.to_string())?;
        if !r.is_ok() {
            return Err(format!("instance {i}: {}", r.violations[0]));
        }
        ranges += r.ranges_checked;
        dts.push(g.rotation().clone());
    }
    Ok(format!("50 instances, {ranges} ranges checked, no violations"))
}

fn criterion_4(dts: &[RotationSystem]) -> Outcome {
    let mut graphs: Vec<RotationSystem> = (0..100u64).map(|i| random_triangulation(3 + (i as usize * 5) % 498, i)).collect();
    let largest = graphs.iter().map(RotationSystem::len).max().unwrap_or(0);
    graphs.extend(dts.iter().cloned());
    for (i, g) in graphs.iter().enumerate() {
        let c = poh_coloring(g).map_err(|e| format!("graph {i}: {e}"))?;
        if let Err(v) = verify_path_property(g, &c) {
            return Err(format!("graph {i}: {v:?}"));
        }
    }
    Ok(format!("100 triangulations (up to {largest} vertices) and {} DTs", dts.len()))
}

fn criterion_5() -> Outcome {
    let counts: Vec<usize> =
        [(1, 1, 1), (2, 1, 1), (1, 2, 2), (2, 2, 2)].iter().map(|&(k, l, m)| build_h(k, l, m).map(|h| h.n)).collect::<Result<_, _>>().map_err(|e| e.to_string())?;
    if counts != [1, 2, 5, 16] {
        return Err(format!("vertex counts {counts:?}"));
    }
    let h = build_h(2, 2, 2).map_err(|e| e.to_string())?;
    let fams: Vec<usize> = h.families.iter().map(Vec::len).collect();
    if fams != [11, 11, 11] {
        return Err(format!("|E_i(2,2,2)| = {fams:?}"));
    }
    let mut instances = 0;
    for k in 1..=6 {
        for l in 1..=6 {
            for m in 1..=6 {
                if k + l + m > 8 {
                    continue;
                }
                let h = build_h(k, l, m).map_err(|e| e.to_string())?;
                for f in 0..3 {
                    if let Some(e) = h.families[f].iter().find(|e| e.len() != [k, l, m][f]) {
                        return Err(format!("H({k},{l},{m}) family {f} edge {e:?}"));
                    }
                }
                instances += 1;
            }
        }
    }
    Ok(format!("N = 1, 2, 5, 16; |E_i(2,2,2)| = 11; edge sizes hold on {instances} instances"))
}

fn criterion_6() -> Outcome {
    let mut checked = 0;
    for k in 1..=4 {
        for l in 1..=4 {
            for m in 1..=4 {
                if k + l + m <= 6 || (k, l, m) == (2, 2, 2) {
                    let h = build_h(k, l, m).map_err(|e| e.to_string())?;
                    if check_unavoidable(&h).map_err(|e| e.to_string())? != Unavoidability::Unavoidable {
                        return Err(format!("H({k},{l},{m}) avoidable"));
                    }
                    checked += 1;
                }
            }
        }
    }
    let base = build_h(1, 1, 1).map_err(|e| e.to_string())?;
    for f in 0..3 {
        let mut h = base.clone();
        h.families[f].remove(0);
        match check_unavoidable(&h).map_err(|e| e.to_string())? {
            Unavoidability::Avoidable(c) if c == vec![f as u32 + 1] => {}
            other => return Err(format!("H(1,1,1) minus its E{} edge: {other:?}", f + 1)),
        }
    }
    Ok(format!("{checked} hypergraphs unavoidable; each single-edge deletion from H(1,1,1) avoidable"))
}

fn criterion_7() -> Outcome {
    let h = build_h(2, 2, 2).map_err(|e| e.to_string())?;
    let (r, rep) = realize_verified(&h, &rat(1, 8), 30).map_err(|e| e.to_string())?;
    let halvings = {
        let mut e = rat(1, 8);
        let mut a = 0;
        while e > r.epsilon {
            e /= Rational::from_integer(2.into());
            a += 1;
        }
        a
    };
    if !rep.passed() || !rep.min_margin.as_ref().is_some_and(|m| m.is_positive()) {
        return Err("H(2,2,2) margins not strictly positive".into());
    }
    let base = build_h(1, 1, 1).map_err(|e| e.to_string())?;
    let r1 = realize_unit_balls(1, 1, 1, &rat(1, 8)).map_err(|e| e.to_string())?;
    let rep1 = verify_realization(&r1, &base).map_err(|e| e.to_string())?;
    if !rep1.passed() {
        return Err("H(1,1,1) fails at 1/8".into());
    }
    let margin = rep.min_margin.expect("margin");
    let bits = margin.denom().bits() as i64 - margin.numer().abs().bits() as i64;
    Ok(format!(
        "H(2,2,2) verified at eps = 2^-{} after {halvings} halvings, {} pairs, min margin ~2^-{bits}; H(1,1,1) at 1/8",
        3 + halvings,
        rep.pairs_checked
    ))
}

fn criterion_8() -> Outcome {
    let mut cases = 0;
    for seed in 0..20u64 {
        let pts = random_points(20, 100, 500 + seed);
        let image = hextant_embed(&pts);
        let thresholds = random_points(100, 120, 900 + seed);
        for pair in thresholds.chunks(2) {
            let hx = Hextant { x0: pair[0].x.clone(), y0: pair[0].y.clone(), z0: pair[1].x.clone(), w0: pair[1].y.clone() };
            let rect = hx.trace();
            if !hextant_range_check(&pts, &rect, &hx).map_err(|e| e.to_string())? {
                return Err(format!("set {seed}: mismatch for {hx:?}"));
            }
            // both sides straight from the definitions
            let in_rect: Vec<usize> = (0..pts.len())
                .filter(|&i| {
                    let p: &Point2 = &pts[i];
                    hx.x0 <= p.x && p.x <= -hx.y0.clone() && hx.z0 <= p.y && p.y <= -hx.w0.clone()
                })
                .collect();
            let in_hx: Vec<usize> = (0..pts.len())
                .filter(|&i| {
                    let q = &image[i];
                    q.x >= hx.x0 && q.y >= hx.y0 && q.z >= hx.z0 && q.w >= hx.w0
                })
                .collect();
            if in_rect != in_hx {
                return Err(format!("set {seed}: {in_rect:?} vs {in_hx:?}"));
            }
            cases += 1;
        }
    }
    Ok(format!("{cases} rectangle/hextant pairs agree"))
}

fn criterion_9() -> Outcome {
    let d = ConvexPolygon::square();
    let mut notes = Vec::new();
    for seed in 0..3u64 {
        let s = random_general_position(&d, 60, 1_000_000, 700 + seed);
        let it = iterated_coloring(&d, &s, 2, &ColorOptions::default()).map_err(|e| e.to_string())?;
        let space = RangeSpace::build(&d, &s).map_err(|e| e.to_string())?;
        let mut fewest = usize::MAX;
        for r in space.masks() {
            if r.count() >= it.threshold {
                let distinct: HashSet<&Vec<u32>> = r.iter().map(|p| &it.tuples[p]).collect();
                fewest = fewest.min(distinct.len());
            }
        }
        if fewest < 4 {
            return Err(format!("seed {seed}: a range of size >= {} shows {fewest} colors", it.threshold));
        }
        notes.push(format!("{}", it.threshold));
    }
    Ok(format!("threshold {} on the three instances; every range at or above it shows >= 4 colors", notes.join("/")))
}

fn main() {
    let mut failed = 0;
    let mut dts = Vec::new();
    let mut report = |n: usize, f: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let r = f();
        let secs = start.elapsed().as_secs_f64();
        match r {
            Ok(msg) => println!("criterion {n}: PASS ({secs:.1}s) {msg}"),
            Err(msg) => {
                failed += 1;
                println!("criterion {n}: FAIL ({secs:.1}s) {msg}");
            }
        }
    };
    report(1, &mut criterion_1);
    report(2, &mut criterion_2);
    report(3, &mut || criterion_3(&mut dts));
    report(4, &mut || criterion_4(&dts));
    report(5, &mut criterion_5);
    report(6, &mut criterion_6);
    report(7, &mut criterion_7);
    report(8, &mut criterion_8);
    report(9, &mut criterion_9);
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
