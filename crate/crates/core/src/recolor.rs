//! The end-to-end 3-coloring: Delaunay graph, path coloring, sections,
//! cutable sections, one recolored point per cutable section.

use std::collections::{BTreeSet, HashMap};

use crate::delaunay::build_dt_from_ranges;
use crate::error::{Error, Result};
use crate::geometry::{extremal_points, perturb, ConvexPolygon, GeneralPosition, Homothet, PointSet, Rational};
use crate::mask::PointMask;
use crate::pathcolor::{poh_coloring, verify_path_property, Coloring};
use crate::planar::RotationSystem;
use crate::ranges::{RangeReport, RangeSpace};

#[derive(Clone, Debug, PartialEq)]
pub struct PipelineParams {
    /// Number of sides of the polygon.
    pub n: usize,
    /// Number of colors.
    pub c: u32,
    pub t: usize,
    pub c_d: Option<Rational>,
    /// `c_D·c·t·(t+3)` when `c_d` is given.
    pub m_formula: Option<Rational>,
    /// One more than the largest monochromatic range of the final coloring.
    pub m_empirical: usize,
}

impl PipelineParams {
    pub fn default_t(n: usize) -> usize {
        4 * n + 12
    }

    /// `t/4 ≥ n + 3`, needed for every cutable section to offer a point.
    pub fn check_t(n: usize, t: usize) -> Result<()> {
        if t < 4 * n + 12 {
            return Err(Error::Precondition(format!("t = {t} is below 4n+12 = {} for n = {n}", 4 * n + 12)));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Section {
    pub path_id: usize,
    pub vertices: Vec<usize>,
    pub cutable: bool,
    pub witness: Option<Homothet>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PlanEntry {
    pub point: usize,
    pub section: usize,
    pub old: u32,
    pub new: u32,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RecoloringPlan {
    pub entries: Vec<PlanEntry>,
}

impl RecoloringPlan {
    pub fn points(&self) -> Vec<usize> {
        self.entries.iter().map(|e| e.point).collect()
    }
}

/// Monochromatic components as vertex sequences, each read from its
/// lower-index endpoint, ordered by that endpoint.
pub fn monochromatic_paths(g: &RotationSystem, colors: &[u32]) -> Result<Vec<Vec<usize>>> {
    verify_path_property(g, colors).map_err(|v| Error::Precondition(format!("not a path coloring: {v}")))?;
    let same = |v: usize| g.neighbors(v).iter().copied().filter(move |&w| colors[w] == colors[v]);
    let mut seen = vec![false; g.len()];
    let mut paths = Vec::new();
    for s in 0..g.len() {
        if seen[s] || same(s).count() == 2 {
            continue;
        }
        // s is an endpoint; walk to the other end
        let mut path = vec![s];
        seen[s] = true;
        let mut prev = usize::MAX;
        let mut cur = s;
        while let Some(next) = same(cur).find(|&w| w != prev && !seen[w]) {
            path.push(next);
            seen[next] = true;
            prev = cur;
            cur = next;
        }
        paths.push(path);
    }
    Ok(paths)
}

/// Section sizes for a path of `len ≥ t` vertices: chunks of `⌊t/2⌋`, with
/// a short remainder absorbed by rebalancing. `None` when no split into
/// sizes within `[⌈t/4⌉, ⌊t/2⌋]` exists, which only happens for small `t`.
pub fn section_sizes(len: usize, t: usize) -> Option<Vec<usize>> {
    let hi = t / 2;
    let lo = t.div_ceil(4);
    let (q, r) = (len / hi, len % hi);
    let mut sizes = vec![hi; q];
    if r >= lo {
        sizes.push(r);
    } else if r > 0 {
        let last = hi + r;
        let (a, b) = (last.div_ceil(2), last / 2);
        if b >= lo {
            *sizes.last_mut().expect("len ≥ t gives a chunk") = a;
            sizes.push(b);
        } else {
            let k = len.div_ceil(hi);
            if k * lo > len {
                return None;
            }
            sizes = (0..k).map(|i| len / k + usize::from(i < len % k)).collect();
        }
    }
    Some(sizes)
}

pub fn extract_sections(g: &RotationSystem, colors: &[u32], t: usize) -> Result<Vec<Section>> {
    if t < 4 {
        return Err(Error::InvalidArgument(format!("t = {t} is below 4")));
    }
    let lo = t.div_ceil(4);
    let mut out = Vec::new();
    for (path_id, path) in monochromatic_paths(g, colors)?.into_iter().enumerate() {
        if path.len() < t {
            continue;
        }
        let mut start = 0;
        let sizes = section_sizes(path.len(), t)
            .ok_or_else(|| Error::InvalidArgument(format!("a path of {} vertices has no sections for t = {t}", path.len())))?;
        for size in sizes {
            if size < lo || size > t / 2 {
                return Err(Error::Internal(format!("section of size {size} for t = {t}")));
            }
            out.push(Section { path_id, vertices: path[start..start + size].to_vec(), cutable: false, witness: None });
            start += size;
        }
    }
    Ok(out)
}

/// A section is cutable when some monochromatic range contains all of it.
pub fn mark_cutable(
    d: &ConvexPolygon,
    set: &PointSet,
    space: &RangeSpace,
    colors: &[u32],
    sections: &mut [Section],
) -> Result<()> {
    set.require_verified()?;
    for s in sections.iter_mut() {
        match space.monochromatic_superrange(colors, &s.vertices) {
            Some(i) => {
                s.cutable = true;
                s.witness = Some(space.open_witness(d, set.points(), i)?);
            }
            None => {
                s.cutable = false;
                s.witness = None;
            }
        }
    }
    Ok(())
}

/// One point per cutable section: not a section endpoint, not extremal
/// within its section, not next to an earlier choice on its path.
pub fn select_r(
    d: &ConvexPolygon,
    set: &PointSet,
    colors: &[u32],
    sections: &[Section],
    t: usize,
) -> Result<RecoloringPlan> {
    PipelineParams::check_t(d.side_count(), t)?;
    // path neighbours, to rule out adjacent choices across sections
    let mut path_pos: HashMap<usize, (usize, usize)> = HashMap::new();
    let mut paths: HashMap<usize, Vec<usize>> = HashMap::new();
    for s in sections {
        paths.entry(s.path_id).or_default().extend(&s.vertices);
    }
    for (&id, p) in &paths {
        for (i, &v) in p.iter().enumerate() {
            path_pos.insert(v, (id, i));
        }
    }
    let mut chosen: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut plan = RecoloringPlan::default();
    for (si, s) in sections.iter().enumerate() {
        if !s.cutable {
            continue;
        }
        let pts: Vec<_> = s.vertices.iter().map(|&v| set.points()[v].clone()).collect();
        let extremal: BTreeSet<usize> = extremal_points(d, &pts)?.into_iter().map(|i| s.vertices[i]).collect();
        let last = s.vertices.len() - 1;
        let pick = s.vertices.iter().enumerate().find(|&(i, v)| {
            if i == 0 || i == last || extremal.contains(v) {
                return false;
            }
            let (id, pos) = path_pos[v];
            !chosen.contains(&(id, pos.wrapping_sub(1))) && !chosen.contains(&(id, pos + 1))
        });
        let Some((_, &v)) = pick else {
            return Err(Error::Infeasible { section: si });
        };
        chosen.insert(path_pos[&v]);
        let old = colors[v];
        plan.entries.push(PlanEntry { point: v, section: si, old, new: old % 3 + 1 });
    }
    Ok(plan)
}

pub fn recolor(colors: &[u32], plan: &RecoloringPlan) -> Coloring {
    let mut out = colors.to_vec();
    for e in &plan.entries {
        out[e.point] = e.new;
    }
    out
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LemmaReport {
    pub ranges_checked: usize,
    /// A monochromatic range of size at least `t` that avoids `R`.
    pub condition_i: Option<Vec<usize>>,
    /// A range with `t` equally colored points of `R` and no point outside
    /// `R` of that color.
    pub condition_ii: Option<Vec<usize>>,
}

impl LemmaReport {
    pub fn passed(&self) -> bool {
        self.condition_i.is_none() && self.condition_ii.is_none()
    }
}

/// Checks both conditions over every realizable range, for the coloring
/// before recoloring.
pub fn check_lemma_conditions(space: &RangeSpace, colors: &[u32], r: &[usize], t: usize) -> LemmaReport {
    let in_r = PointMask::from_indices(space.n_points(), r);
    let mut report = LemmaReport { ranges_checked: space.len(), ..Default::default() };
    for m in space.masks() {
        let members = m.to_vec();
        if report.condition_i.is_none() && members.len() >= t {
            let c0 = colors[members[0]];
            if members.iter().all(|&p| colors[p] == c0) && !m.intersects(&in_r) {
                report.condition_i = Some(members.clone());
            }
        }
        if report.condition_ii.is_none() {
            let mut per_color: HashMap<u32, (usize, bool)> = HashMap::new();
            for &p in &members {
                let e = per_color.entry(colors[p]).or_default();
                if in_r.contains(p) {
                    e.0 += 1;
                } else {
                    e.1 = true;
                }
            }
            if per_color.values().any(|&(in_r_count, other)| in_r_count >= t && !other) {
                report.condition_ii = Some(members);
            }
        }
        if !report.passed() {
            break;
        }
    }
    report
}

#[derive(Clone, Debug, Default)]
pub struct ColorOptions {
    pub t: Option<usize>,
    pub c_d: Option<Rational>,
    /// Magnitude for perturbing inputs that fail the general-position check.
    pub perturb: Option<Rational>,
    pub seed: u64,
}

#[derive(Clone, Debug)]
pub struct ColorResult {
    pub colors: Coloring,
    pub path_colors: Coloring,
    pub params: PipelineParams,
    pub sections: Vec<Section>,
    pub plan: RecoloringPlan,
    pub lemma: LemmaReport,
    pub max_monochromatic: Option<RangeReport>,
    /// The point set actually colored; differs from the input after a
    /// perturbation.
    pub points: PointSet,
    pub warnings: Vec<String>,
}

impl ColorResult {
    pub fn verified(&self) -> bool {
        let max = self.max_monochromatic.as_ref().map_or(0, |r| r.interior.len());
        self.lemma.passed() && max < self.params.m_empirical
    }
}

/// Verified copy of `set`, perturbing it when allowed and needed.
pub fn ensure_general_position(
    d: &ConvexPolygon,
    set: &PointSet,
    magnitude: Option<&Rational>,
    seed: u64,
    warnings: &mut Vec<String>,
) -> Result<PointSet> {
    let mut s = set.clone();
    if !s.is_verified() {
        s.check(d);
    }
    if let GeneralPosition::Violated(v) = s.status().clone() {
        let Some(mag) = magnitude else {
            return Err(Error::GeneralPosition(v));
        };
        warnings.push(format!("input violates general position ({v}); perturbing by up to {mag}"));
        for attempt in 0..16u64 {
            let mut p = perturb(set, mag, seed.wrapping_add(attempt))?;
            if p.check(d) == &GeneralPosition::Verified {
                return Ok(p);
            }
        }
        return Err(Error::GeneralPosition(v));
    }
    Ok(s)
}

pub fn color_points(d: &ConvexPolygon, set: &PointSet, opts: &ColorOptions) -> Result<ColorResult> {
    let n = d.side_count();
    let t = opts.t.unwrap_or_else(|| PipelineParams::default_t(n));
    PipelineParams::check_t(n, t)?;
    let mut warnings = Vec::new();
    let set = ensure_general_position(d, set, opts.perturb.as_ref(), opts.seed, &mut warnings)?;
    if set.is_empty() {
        return Err(Error::InvalidArgument("empty point set".into()));
    }
    let space = RangeSpace::build(d, &set)?;
    let g = build_dt_from_ranges(&set, &space)?;
    let path_colors = poh_coloring(g.rotation())?;
    let mut sections = extract_sections(g.rotation(), &path_colors, t)?;
    mark_cutable(d, &set, &space, &path_colors, &mut sections)?;
    let plan = select_r(d, &set, &path_colors, &sections, t)?;
    let colors = recolor(&path_colors, &plan);
    let lemma = check_lemma_conditions(&space, &path_colors, &plan.points(), t);
    let max = space.max_monochromatic(&colors);
    let max_monochromatic = max.map(|i| space.report(d, set.points(), i)).transpose()?;
    let m_empirical = 1 + max_monochromatic.as_ref().map_or(0, |r| r.interior.len());
    let m_formula = opts
        .c_d
        .as_ref()
        .map(|cd| cd * Rational::from_integer((3 * t * (t + 3)).into()));
    let params = PipelineParams { n, c: 3, t, c_d: opts.c_d.clone(), m_formula, m_empirical };
    Ok(ColorResult { colors, path_colors, params, sections, plan, lemma, max_monochromatic, points: set, warnings })
}

#[derive(Clone, Debug)]
pub struct IteratedResult {
    /// Color tuples, one entry per level.
    pub tuples: Vec<Vec<u32>>,
    /// Tuples numbered `1..`, by first appearance in index order.
    pub colors: Coloring,
    pub k: u32,
    /// Every range with at least this many points shows `2^k` colors.
    pub threshold: usize,
    /// Largest range showing fewer than `2^k` colors (0 if none).
    pub largest_deficient: usize,
    /// Fewest distinct colors over ranges of size at least `threshold`.
    pub min_colors_at_threshold: Option<usize>,
}

fn iterate(d: &ConvexPolygon, set: &PointSet, k: u32, opts: &ColorOptions) -> Result<Vec<Vec<u32>>> {
    let base = color_points(d, set, opts)?.colors;
    if k == 1 {
        return Ok(base.into_iter().map(|c| vec![c]).collect());
    }
    let mut out: Vec<Vec<u32>> = base.iter().map(|&c| vec![c]).collect();
    for c in 1..=3 {
        let class: Vec<usize> = (0..set.len()).filter(|&i| base[i] == c).collect();
        if class.is_empty() {
            continue;
        }
        let sub = iterate(d, &set.subset(&class), k - 1, opts)?;
        for (j, &i) in class.iter().enumerate() {
            out[i].extend(&sub[j]);
        }
    }
    Ok(out)
}

/// Colors each color class again, `k` levels deep, giving up to `3^k`
/// colors.
pub fn iterated_coloring(d: &ConvexPolygon, set: &PointSet, k: u32, opts: &ColorOptions) -> Result<IteratedResult> {
    if k < 1 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    set.require_verified()?;
    let tuples = iterate(d, set, k, opts)?;
    let mut ids: HashMap<&Vec<u32>, u32> = HashMap::new();
    let colors: Coloring = tuples
        .iter()
        .map(|tp| {
            let next = ids.len() as u32 + 1;
            *ids.entry(tp).or_insert(next)
        })
        .collect();
    let space = RangeSpace::build(d, set)?;
    let need = 1usize << k;
    let counts: Vec<(usize, usize)> = space
        .masks()
        .iter()
        .map(|m| {
            let distinct: BTreeSet<u32> = m.iter().map(|p| colors[p]).collect();
            (m.count(), distinct.len())
        })
        .collect();
    let largest_deficient = counts.iter().filter(|&&(_, c)| c < need).map(|&(s, _)| s).max().unwrap_or(0);
    let threshold = largest_deficient + 1;
    let min_colors_at_threshold = counts.iter().filter(|&&(s, _)| s >= threshold).map(|&(_, c)| c).min();
    Ok(IteratedResult { tuples, colors, k, threshold, largest_deficient, min_colors_at_threshold })
}
