//! The `polycolor` command line. Every subcommand reads JSON documents and
//! writes one JSON document to standard output.
//!
//! Exit codes: 0 success, 1 a verification failed, 2 invalid input or a
//! violated guard.

pub mod doc;
pub mod svg;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use polycolor::delaunay::{build_dt_from_ranges, check_dt_with_ranges};
use polycolor::error::{Error, Result};
use polycolor::generate::random_general_position;
use polycolor::geometry::{parse_rational, ConvexPolygon, PointSet};
use polycolor::lowerbound::{
    build_h, check_unavoidable, hextant_embed, realize_verified, RecursiveHypergraph, Unavoidability,
    REALIZE_MAX_DEPTH,
};
use polycolor::ranges::{RangeReport, RangeSpace};
use polycolor::recolor::{color_points, ensure_general_position, iterated_coloring, ColorOptions};

use doc::{homothet_doc, load_colors, load_instance, load_polygon, pair, polygon_from, InstanceDocument, Q};

#[derive(Parser, Debug)]
#[command(name = "polycolor", version, about = "Exact 3-colorings of points against homothets of a convex polygon")]
pub struct Cli {
    /// Worker threads for the parallel parts (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Input {
    /// Polygon file, or `square` / `triangle`. Defaults to the document's
    /// polygon, then the square.
    #[arg(long)]
    polygon: Option<String>,
    /// Instance document or a bare JSON array of points.
    #[arg(long)]
    points: PathBuf,
    /// Perturb inputs that violate general position by up to this amount.
    #[arg(long)]
    perturb: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum HypergraphAction {
    Build,
    Check,
    Realize,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generalized Delaunay graph, with its structural checks.
    Dt {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// 3-color the points and verify the result.
    Color {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        t: Option<usize>,
        /// The polygon constant, for reporting the formula bound.
        #[arg(long)]
        cd: Option<String>,
        /// Also recolor every class again, this many levels deep.
        #[arg(long)]
        levels: Option<u32>,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Largest monochromatic range of a given coloring.
    Verify {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        colors: Option<PathBuf>,
        /// Succeed iff the largest monochromatic range is smaller than this.
        #[arg(long)]
        m: Option<usize>,
    },
    /// Every realizable range, each with an exact witness homothet.
    Ranges {
        #[command(flatten)]
        input: Input,
    },
    /// The three-family hypergraph: listing, colorability check, or ball
    /// realization.
    Hypergraph {
        #[arg(value_enum)]
        action: HypergraphAction,
        k: usize,
        l: usize,
        m: usize,
        /// Starting epsilon for `realize`.
        #[arg(long, default_value = "1/8")]
        eps: String,
        /// How often `realize` may halve epsilon before giving up.
        #[arg(long, default_value_t = 20)]
        max_halvings: usize,
    },
    /// Map planar points to `(u, -u, v, -v)`.
    EmbedHextant {
        #[arg(long)]
        points: PathBuf,
    },
    /// SVG drawing of the points, their Delaunay graph, and optionally a
    /// homothet.
    Render {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        colors: Option<PathBuf>,
        /// Homothet to outline, as `cx,cy,s`.
        #[arg(long)]
        witness: Option<String>,
        /// Output file; standard output when absent.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Random points in general position.
    Generate {
        #[arg(long)]
        polygon: Option<String>,
        #[arg(long)]
        count: usize,
        #[arg(long, default_value_t = 1_000_000)]
        extent: i64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// What a subcommand produced: a document and whether its checks passed.
struct Outcome {
    doc: Value,
    ok: bool,
    /// Printed verbatim instead of `doc`.
    raw: Option<String>,
}

impl Outcome {
    fn new(doc: Value, ok: bool) -> Self {
        Outcome { doc, ok, raw: None }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Internal(_) | Error::Infeasible { .. } => 1,
        _ => 2,
    }
}

/// Parses `args` (program name first), runs the subcommand, and returns the
/// exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    let result = match cli.threads {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| dispatch(cli.command)),
            Err(e) => Err(Error::InvalidArgument(format!("thread pool: {e}"))),
        },
        None => dispatch(cli.command),
    };
    match result {
        Ok(o) => {
            let _ = match &o.raw {
                Some(text) => write!(out, "{text}"),
                None => writeln!(out, "{}", serde_json::to_string_pretty(&o.doc).expect("json")),
            };
            if o.ok {
                0
            } else {
                1
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

struct Loaded {
    polygon: ConvexPolygon,
    set: PointSet,
    doc: InstanceDocument,
    seed: u64,
    warnings: Vec<String>,
}

fn load(input: &Input) -> Result<Loaded> {
    let doc = load_instance(&input.points)?;
    let polygon = match (&input.polygon, &doc.polygon) {
        (Some(spec), _) => load_polygon(spec)?,
        (None, Some(vs)) => polygon_from(vs)?,
        (None, None) => ConvexPolygon::square(),
    };
    let raw = PointSet::new(doc.points.iter().map(doc::point).collect())?;
    let seed = input.seed.or(doc.parameters.seed).unwrap_or(0);
    let perturb = input.perturb.as_deref().map(parse_rational).transpose()?;
    let mut warnings = Vec::new();
    let set = ensure_general_position(&polygon, &raw, perturb.as_ref(), seed, &mut warnings)?;
    Ok(Loaded { polygon, set, doc, seed, warnings })
}

fn points_doc(set: &PointSet) -> Vec<doc::Pair> {
    set.points().iter().map(pair).collect()
}

fn polygon_doc(d: &ConvexPolygon) -> Vec<doc::Pair> {
    d.vertices().iter().map(pair).collect()
}

fn report_doc(r: &RangeReport) -> Value {
    json!({
        "size": r.interior.len(),
        "interior": r.interior,
        "boundary": r.boundary,
        "witness": homothet_doc(&r.witness),
    })
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))
}

fn dispatch(cmd: Command) -> Result<Outcome> {
    match cmd {
        Command::Dt { input, svg } => cmd_dt(&input, svg.as_deref()),
        Command::Color { input, t, cd, levels, svg } => cmd_color(&input, t, cd.as_deref(), levels, svg.as_deref()),
        Command::Verify { input, colors, m } => cmd_verify(&input, colors.as_deref(), m),
        Command::Ranges { input } => cmd_ranges(&input),
        Command::Hypergraph { action, k, l, m, eps, max_halvings } => {
            cmd_hypergraph(action, k, l, m, &eps, max_halvings)
        }
        Command::EmbedHextant { points } => cmd_embed(&points),
        Command::Render { input, colors, witness, svg } => {
            cmd_render(&input, colors.as_deref(), witness.as_deref(), svg.as_deref())
        }
        Command::Generate { polygon, count, extent, seed } => cmd_generate(polygon.as_deref(), count, extent, seed),
    }
}

fn cmd_dt(input: &Input, svg_path: Option<&Path>) -> Result<Outcome> {
    let l = load(input)?;
    let space = RangeSpace::build(&l.polygon, &l.set)?;
    let g = build_dt_from_ranges(&l.set, &space)?;
    let report = check_dt_with_ranges(&g, &l.polygon, &l.set, &space)?;
    let edges = g.edges();
    if let Some(path) = svg_path {
        let scene = svg::Scene { polygon: &l.polygon, points: l.set.points(), edges: &edges, colors: None, witness: None };
        write_file(path, &svg::render(&scene))?;
    }
    let violations: Vec<String> = report.violations.iter().map(ToString::to_string).collect();
    let doc = json!({
        "polygon": polygon_doc(&l.polygon),
        "points": points_doc(&l.set),
        "edges": edges,
        "faces": g.faces(),
        "outer_face": g.outer_face(),
        "checks": { "ranges_checked": report.ranges_checked, "violations": violations },
        "warnings": l.warnings,
    });
    Ok(Outcome::new(doc, report.is_ok()))
}

fn cmd_color(
    input: &Input,
    t: Option<usize>,
    cd: Option<&str>,
    levels: Option<u32>,
    svg_path: Option<&Path>,
) -> Result<Outcome> {
    let l = load(input)?;
    let c_d = match cd {
        Some(text) => Some(parse_rational(text)?),
        None => l.doc.parameters.c_d.as_ref().map(|q| q.0.clone()),
    };
    let opts = ColorOptions { t: t.or(l.doc.parameters.t), c_d, perturb: None, seed: l.seed };
    let r = color_points(&l.polygon, &l.set, &opts)?;
    let sections: Vec<Value> = r
        .sections
        .iter()
        .map(|s| {
            json!({
                "path": s.path_id,
                "vertices": s.vertices,
                "cutable": s.cutable,
                "witness": s.witness.as_ref().map(homothet_doc),
            })
        })
        .collect();
    let plan: Vec<Value> = r
        .plan
        .entries
        .iter()
        .map(|e| json!({ "point": e.point, "section": e.section, "old": e.old, "new": e.new }))
        .collect();
    let mut warnings = l.warnings.clone();
    warnings.extend(r.warnings.iter().cloned());
    let mut doc = json!({
        "polygon": polygon_doc(&l.polygon),
        "points": points_doc(&r.points),
        "colors": r.colors,
        "path_colors": r.path_colors,
        "parameters": { "t": r.params.t, "c_d": r.params.c_d.clone().map(Q), "seed": l.seed },
        "n_sides": r.params.n,
        "t": r.params.t,
        "m_empirical": r.params.m_empirical,
        "m_formula": r.params.m_formula.clone().map(Q),
        "R": r.plan.points(),
        "plan": plan,
        "sections": sections,
        "lemma": {
            "passed": r.lemma.passed(),
            "ranges_checked": r.lemma.ranges_checked,
            "condition_i": r.lemma.condition_i,
            "condition_ii": r.lemma.condition_ii,
        },
        "max_monochromatic": r.max_monochromatic.as_ref().map(report_doc),
        "verified": r.verified(),
        "warnings": warnings,
    });
    let mut ok = r.verified();
    if let Some(k) = levels {
        let it = iterated_coloring(&l.polygon, &r.points, k, &opts)?;
        let need = 1usize << k;
        let reached = it.min_colors_at_threshold.is_none_or(|c| c >= need);
        ok &= reached;
        doc["iterated"] = json!({
            "levels": k,
            "tuples": it.tuples,
            "colors": it.colors,
            "threshold": it.threshold,
            "largest_deficient": it.largest_deficient,
            "min_colors_at_threshold": it.min_colors_at_threshold,
        });
    }
    if let Some(path) = svg_path {
        let space = RangeSpace::build(&l.polygon, &r.points)?;
        let edges = build_dt_from_ranges(&r.points, &space)?.edges();
        let scene = svg::Scene {
            polygon: &l.polygon,
            points: r.points.points(),
            edges: &edges,
            colors: Some(&r.colors),
            witness: r.max_monochromatic.as_ref().map(|m| &m.witness),
        };
        write_file(path, &svg::render(&scene))?;
    }
    Ok(Outcome::new(doc, ok))
}

fn colors_for(l: &Loaded, path: Option<&Path>) -> Result<Vec<u32>> {
    let colors = match path {
        Some(p) => load_colors(p)?,
        None => l.doc.colors.clone().ok_or_else(|| Error::InvalidArgument("no colors given".into()))?,
    };
    if colors.len() != l.set.len() {
        return Err(Error::InvalidArgument(format!("{} colors for {} points", colors.len(), l.set.len())));
    }
    Ok(colors)
}

fn cmd_verify(input: &Input, colors: Option<&Path>, m: Option<usize>) -> Result<Outcome> {
    let l = load(input)?;
    let colors = colors_for(&l, colors)?;
    let space = RangeSpace::build(&l.polygon, &l.set)?;
    let (size, report) = match space.max_monochromatic(&colors) {
        Some(i) => (space.masks()[i].count(), Some(space.report(&l.polygon, l.set.points(), i)?)),
        None => (0, None),
    };
    let ok = m.is_none_or(|m| size < m);
    let doc = json!({
        "ranges_checked": space.len(),
        "max_monochromatic_size": size,
        "max_monochromatic": report.as_ref().map(report_doc),
        "m": m,
        "passed": ok,
        "warnings": l.warnings,
    });
    Ok(Outcome::new(doc, ok))
}

fn cmd_ranges(input: &Input) -> Result<Outcome> {
    let l = load(input)?;
    let space = RangeSpace::build(&l.polygon, &l.set)?;
    let witnesses = space.open_witnesses(&l.polygon, l.set.points())?;
    let ranges: Vec<Value> = space
        .index_sets()
        .into_iter()
        .zip(&witnesses)
        .map(|(set, h)| json!({ "points": set, "witness": homothet_doc(h) }))
        .collect();
    let doc = json!({ "count": ranges.len(), "ranges": ranges, "warnings": l.warnings });
    Ok(Outcome::new(doc, true))
}

fn hypergraph_doc(h: &RecursiveHypergraph) -> Value {
    json!({
        "k": h.k, "l": h.l, "m": h.m,
        "vertices": h.n,
        "E1": h.families[0], "E2": h.families[1], "E3": h.families[2],
    })
}

fn cmd_hypergraph(
    action: HypergraphAction,
    k: usize,
    l: usize,
    m: usize,
    eps: &str,
    max_halvings: usize,
) -> Result<Outcome> {
    let h = build_h(k, l, m)?;
    match action {
        HypergraphAction::Build => Ok(Outcome::new(hypergraph_doc(&h), true)),
        HypergraphAction::Check => {
            let (verdict, coloring) = match check_unavoidable(&h)? {
                Unavoidability::Unavoidable => ("unavoidable", None),
                Unavoidability::Avoidable(c) => ("avoidable", Some(c)),
            };
            let doc = json!({ "k": k, "l": l, "m": m, "vertices": h.n, "verdict": verdict, "coloring": coloring });
            Ok(Outcome::new(doc, coloring.is_none()))
        }
        HypergraphAction::Realize => {
            if k + l + m - 3 > REALIZE_MAX_DEPTH {
                return Err(Error::Guard(format!(
                    "realizing H({k},{l},{m}) needs depth {}, above the limit of {REALIZE_MAX_DEPTH}",
                    k + l + m - 3
                )));
            }
            let eps = parse_rational(eps)?;
            let (r, rep) = match realize_verified(&h, &eps, max_halvings) {
                Ok(x) => x,
                Err(Error::Precondition(msg)) => {
                    return Ok(Outcome::new(json!({ "passed": false, "reason": msg }), false))
                }
                Err(e) => return Err(e),
            };
            let point3 = |p: &polycolor::lowerbound::Point3| [Q(p.x.clone()), Q(p.y.clone()), Q(p.z.clone())];
            let balls: Vec<Vec<_>> = r.balls.iter().map(|fam| fam.iter().map(|b| point3(&b.center)).collect()).collect();
            let doc = json!({
                "k": k, "l": l, "m": m,
                "epsilon": Q(r.epsilon.clone()),
                "points": r.points.iter().map(point3).collect::<Vec<_>>(),
                "ball_centers": { "E1": balls[0], "E2": balls[1], "E3": balls[2] },
                "radius": "1",
                "pairs_checked": rep.pairs_checked,
                "min_margin": rep.min_margin.clone().map(Q),
                "passed": rep.passed(),
            });
            Ok(Outcome::new(doc, rep.passed()))
        }
    }
}

fn cmd_embed(points: &Path) -> Result<Outcome> {
    let doc = load_instance(points)?;
    let pts: Vec<_> = doc.points.iter().map(doc::point).collect();
    let image: Vec<[Q; 4]> = hextant_embed(&pts)
        .into_iter()
        .map(|p| [Q(p.x), Q(p.y), Q(p.z), Q(p.w)])
        .collect();
    Ok(Outcome::new(json!({ "points4": image }), true))
}

fn cmd_render(
    input: &Input,
    colors: Option<&Path>,
    witness: Option<&str>,
    svg_path: Option<&Path>,
) -> Result<Outcome> {
    let l = load(input)?;
    let colors = match (colors, &l.doc.colors) {
        (None, None) => None,
        (c, _) => Some(colors_for(&l, c)?),
    };
    let witness = witness.map(doc::parse_homothet).transpose()?;
    let space = RangeSpace::build(&l.polygon, &l.set)?;
    let edges = build_dt_from_ranges(&l.set, &space)?.edges();
    let scene = svg::Scene {
        polygon: &l.polygon,
        points: l.set.points(),
        edges: &edges,
        colors: colors.as_deref(),
        witness: witness.as_ref(),
    };
    let text = svg::render(&scene);
    match svg_path {
        Some(p) => {
            write_file(p, &text)?;
            Ok(Outcome::new(json!({ "svg": p.display().to_string(), "edges": edges.len() }), true))
        }
        None => Ok(Outcome { doc: Value::Null, ok: true, raw: Some(text) }),
    }
}

fn cmd_generate(polygon: Option<&str>, count: usize, extent: i64, seed: u64) -> Result<Outcome> {
    let d = load_polygon(polygon.unwrap_or("square"))?;
    if extent < 2 {
        return Err(Error::InvalidArgument("extent must be at least 2".into()));
    }
    let set = random_general_position(&d, count, extent, seed);
    let doc = InstanceDocument {
        polygon: Some(polygon_doc(&d)),
        points: points_doc(&set),
        colors: None,
        parameters: doc::Parameters { seed: Some(seed), ..Default::default() },
    };
    Ok(Outcome::new(serde_json::to_value(doc).expect("json"), true))
}
