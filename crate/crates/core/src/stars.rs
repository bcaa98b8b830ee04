//! Lifting a fragment separator to a star-based separator on the segments.
//!
//! Every separator fragment contributes its own segment as a star center;
//! internal fragments also contribute the two segments their piece connects.
//! Stars are made disjoint by first-claim sweeps (colors in order, claims in
//! sweep order), centers are never claimed, and the remaining segments land
//! in the part of their representative fragment.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::contact::{build_contact_graph, ContactError, EmbeddedPlanarGraph};
use crate::coord::Coord;
use crate::fragmenter::{
    compute_active_fragments, pick_representatives, FragmentError, FragmentKind, FragmentSet,
};
use crate::geom::{ColoredSegmentInstance, FrameMap};
use crate::planar_sep::{planar_separator, PlanarSepError, SeparatorResult};
use crate::sweep::SweepTree;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Star {
    pub center: usize,
    pub leaves: Vec<usize>,
}

impl Star {
    pub fn contains(&self, v: usize) -> bool {
        self.center == v || self.leaves.contains(&v)
    }

    pub fn len(&self) -> usize {
        1 + self.leaves.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StarSeparator {
    pub stars: Vec<Star>,
    pub part_a: Vec<usize>,
    pub part_b: Vec<usize>,
}

impl StarSeparator {
    pub fn size(&self) -> usize {
        self.stars.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StarError {
    DanglingConnects(usize),
    DuplicateCenter(usize),
    /// A non-star segment's representative sits in the fragment separator,
    /// which contradicts the lifting rules.
    RepresentativeInSeparator(usize),
    MissingRepresentative(usize),
}

impl fmt::Display for StarError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StarError::DanglingConnects(id) => {
                write!(f, "fragment {id} has a dangling connects reference")
            }
            StarError::DuplicateCenter(id) => write!(f, "duplicate star center {id}"),
            StarError::RepresentativeInSeparator(s) => {
                write!(f, "representative of non-star segment {s} is a separator node")
            }
            StarError::MissingRepresentative(s) => {
                write!(f, "segment {s} has no representative fragment")
            }
        }
    }
}

/// Star centers induced by a fragment separator: the segment of every
/// separator fragment, plus the connected pair for internal fragments.
pub fn lift_to_stars(
    sep: &SeparatorResult,
    contact: &EmbeddedPlanarGraph,
    fs: &FragmentSet,
) -> Result<Vec<usize>, StarError> {
    let mut centers: BTreeSet<usize> = BTreeSet::new();
    for &node in &sep.separator {
        let frag_id = contact.payload[node as usize];
        let f = &fs.fragments[frag_id];
        centers.insert(f.segment_id);
        if f.kind == FragmentKind::Internal {
            let (g, g2) = f.connects.ok_or(StarError::DanglingConnects(frag_id))?;
            for w in [g, g2] {
                let wf = fs.fragments.get(w).ok_or(StarError::DanglingConnects(frag_id))?;
                if !wf.is_active() {
                    return Err(StarError::DanglingConnects(frag_id));
                }
                centers.insert(wf.segment_id);
            }
        }
    }
    Ok(centers.into_iter().collect())
}

/// Builds the disjoint stars of the given centers by per-color-pair sweeps:
/// each non-center segment joins the star of the first center that reaches
/// it, and centers belong only to their own star.
pub fn materialize_stars(
    centers: &[usize],
    inst: &ColoredSegmentInstance,
) -> Result<Vec<Star>, StarError> {
    let n = inst.n();
    let mut is_center = alloc::vec![false; n];
    for &c in centers {
        if is_center[c] {
            return Err(StarError::DuplicateCenter(c));
        }
        is_center[c] = true;
    }
    let mut claimed_by: Vec<Option<usize>> = alloc::vec![None; n];

    let c = inst.c();
    let mut centers_by_color: Vec<Vec<usize>> = alloc::vec![Vec::new(); c];
    for &cid in centers {
        centers_by_color[inst.segments[cid].color].push(cid);
    }

    for color in 0..c {
        if centers_by_color[color].is_empty() {
            continue;
        }
        let map = FrameMap::for_direction(inst.colors[color]);
        for other in 0..c {
            if other == color {
                continue;
            }
            sweep_claims(inst, &map, &centers_by_color[color], other, &is_center, &mut claimed_by);
        }
    }

    let mut leaves: BTreeMap<usize, Vec<usize>> = centers.iter().map(|&c| (c, Vec::new())).collect();
    for (seg, claim) in claimed_by.iter().enumerate() {
        if let Some(center) = claim {
            leaves.get_mut(center).unwrap().push(seg);
        }
    }
    Ok(leaves.into_iter().map(|(center, leaves)| Star { center, leaves }).collect())
}

struct ClaimWall {
    seg: usize,
    top: crate::geom::Point,
    slope: Coord,
}

impl ClaimWall {
    fn x_at(&self, y: &Coord) -> Coord {
        &self.top.x + (&self.top.y - y) * &self.slope
    }
}

fn sweep_claims(
    inst: &ColoredSegmentInstance,
    map: &FrameMap,
    centers: &[usize],
    other_color: usize,
    is_center: &[bool],
    claimed_by: &mut [Option<usize>],
) {
    #[derive(PartialEq, Eq, PartialOrd, Ord, Clone, Copy)]
    enum Kind {
        Death = 0,
        Birth = 1,
        Center = 2,
    }
    struct Ev {
        y: Coord,
        x: Coord,
        kind: Kind,
        id: usize,
    }
    let mut events: Vec<Ev> = Vec::new();
    let mut walls: BTreeMap<usize, (crate::geom::Point, crate::geom::Point)> = BTreeMap::new();
    for s in &inst.segments {
        if s.color != other_color || claimed_by[s.id].is_some() {
            continue;
        }
        let rp = map.apply(&s.p);
        let rq = map.apply(&s.q);
        let (top, bot) = if rp.y > rq.y { (rp, rq) } else { (rq, rp) };
        events.push(Ev { y: top.y.clone(), x: top.x.clone(), kind: Kind::Birth, id: s.id });
        events.push(Ev { y: bot.y.clone(), x: bot.x.clone(), kind: Kind::Death, id: s.id });
        walls.insert(s.id, (top, bot));
    }
    for &cid in centers {
        let s = &inst.segments[cid];
        let rp = map.apply(&s.p);
        let rq = map.apply(&s.q);
        let x = if rp.x <= rq.x { rp.x.clone() } else { rq.x.clone() };
        events.push(Ev { y: rp.y, x, kind: Kind::Center, id: cid });
    }
    events.sort_by(|a, b| {
        b.y.cmp(&a.y)
            .then_with(|| a.kind.cmp(&b.kind))
            .then_with(|| a.x.cmp(&b.x))
            .then_with(|| a.id.cmp(&b.id))
    });

    let mut tree: SweepTree<ClaimWall> = SweepTree::new();
    let mut handle_of: BTreeMap<usize, crate::sweep::Handle> = BTreeMap::new();
    let mut dying: Vec<(Coord, usize)> = Vec::new();
    let mut dying_y: Option<Coord> = None;
    for ev in events {
        if dying_y.as_ref() != Some(&ev.y) {
            dying.clear();
            dying_y = Some(ev.y.clone());
        }
        match ev.kind {
            Kind::Birth => {
                let (top, bot) = walls[&ev.id].clone();
                let slope = (&bot.x - &top.x) / (&top.y - &bot.y);
                let wall = ClaimWall { seg: ev.id, top, slope };
                let h = tree.insert_by(wall, |new, old| {
                    let xo = old.x_at(&new.top.y);
                    new.top
                        .x
                        .cmp(&xo)
                        .then_with(|| new.slope.cmp(&old.slope))
                        .then(core::cmp::Ordering::Greater)
                });
                handle_of.insert(ev.id, h);
            }
            Kind::Death => {
                if let Some(h) = handle_of.remove(&ev.id) {
                    if tree.contains(h) {
                        tree.remove(h);
                        let (_, bot) = &walls[&ev.id];
                        dying.push((bot.x.clone(), ev.id));
                    }
                }
            }
            Kind::Center => {
                let s = &inst.segments[ev.id];
                let rp = map.apply(&s.p);
                let rq = map.apply(&s.q);
                let (x_lo, x_hi) = if rp.x <= rq.x { (&rp.x, &rq.x) } else { (&rq.x, &rp.x) };
                let y = &rp.y;
                let mut hit: Vec<crate::sweep::Handle> = Vec::new();
                tree.visit_between(
                    |w| w.x_at(y) < *x_lo,
                    |w| w.x_at(y) > *x_hi,
                    &mut |h, _| hit.push(h),
                );
                for h in hit {
                    let seg = tree.get(h).seg;
                    if !is_center[seg] && claimed_by[seg].is_none() {
                        claimed_by[seg] = Some(ev.id);
                    }
                    tree.remove(h);
                }
                // Walls that ended at this height still touch the center.
                for (x, seg) in &dying {
                    if *x >= *x_lo && *x <= *x_hi && !is_center[*seg] && claimed_by[*seg].is_none()
                    {
                        claimed_by[*seg] = Some(ev.id);
                    }
                }
            }
        }
    }
}

/// Sends every segment outside the stars to the part of its representative
/// fragment.
pub fn assign_parts(
    sep: &SeparatorResult,
    contact: &EmbeddedPlanarGraph,
    fs: &FragmentSet,
    stars: &[Star],
) -> Result<(Vec<usize>, Vec<usize>), StarError> {
    let n = fs.n_segments;
    let mut in_star = alloc::vec![false; n];
    for star in stars {
        in_star[star.center] = true;
        for &l in &star.leaves {
            in_star[l] = true;
        }
    }
    let mut node_of_fragment: BTreeMap<usize, u32> = BTreeMap::new();
    for (node, &frag) in contact.payload.iter().enumerate() {
        node_of_fragment.insert(frag, node as u32);
    }
    let mut side = alloc::vec![0u8; contact.n()];
    for &u in &sep.part_a {
        side[u as usize] = 1;
    }
    for &u in &sep.part_b {
        side[u as usize] = 2;
    }
    let mut part_a = Vec::new();
    let mut part_b = Vec::new();
    for seg in 0..n {
        if in_star[seg] {
            continue;
        }
        let rep = fs.representative[seg].ok_or(StarError::MissingRepresentative(seg))?;
        let node = node_of_fragment[&rep];
        match side[node as usize] {
            1 => part_a.push(seg),
            2 => part_b.push(seg),
            _ => return Err(StarError::RepresentativeInSeparator(seg)),
        }
    }
    Ok((part_a, part_b))
}

// ---------------------------------------------------------------------------
// Validation.

/// Adjacency test for the object set a separator lives on.
pub trait IntersectionOracle {
    fn len(&self) -> usize;
    fn intersects(&self, u: usize, v: usize) -> bool;
    fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

pub struct SegmentOracle<'a> {
    inst: &'a ColoredSegmentInstance,
    fast: crate::geom::FastPairs,
}

impl<'a> SegmentOracle<'a> {
    pub fn new(inst: &'a ColoredSegmentInstance) -> Self {
        SegmentOracle { inst, fast: crate::geom::FastPairs::new(inst) }
    }
}

impl<'a> IntersectionOracle for SegmentOracle<'a> {
    fn len(&self) -> usize {
        self.inst.n()
    }

    fn intersects(&self, u: usize, v: usize) -> bool {
        self.fast.intersects(self.inst, u, v)
    }
}

#[derive(Debug, Clone, Default)]
pub struct StarValidationReport {
    pub violations: Vec<String>,
    pub size: usize,
    pub n: usize,
    /// |S| / sqrt(n), rounded to milli-units.
    pub ratio_milli: u64,
}

impl StarValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks star disjointness, center uniqueness, leaf adjacency, balance
/// |A|,|B| <= floor(2n/3), the absence of A-B edges, and coverage.
pub fn validate_star_separator(
    oracle: &dyn IntersectionOracle,
    s: &StarSeparator,
) -> StarValidationReport {
    let n = oracle.len();
    let mut report = StarValidationReport {
        violations: Vec::new(),
        size: s.stars.len(),
        n,
        ratio_milli: ratio_milli(s.stars.len(), n),
    };
    let mut seen = alloc::vec![0u8; n];
    let mut centers: BTreeSet<usize> = BTreeSet::new();
    for star in &s.stars {
        if !centers.insert(star.center) {
            report.violations.push(format!("duplicate center {}", star.center));
        }
        for &v in core::iter::once(&star.center).chain(star.leaves.iter()) {
            if v >= n {
                report.violations.push(format!("node {v} out of range"));
                continue;
            }
            if seen[v] == 1 {
                report.violations.push(format!("node {v} appears in two stars"));
            }
            seen[v] = 1;
        }
        for &leaf in &star.leaves {
            if leaf < n && !oracle.intersects(star.center, leaf) {
                report
                    .violations
                    .push(format!("leaf {leaf} not adjacent to center {}", star.center));
            }
        }
    }
    for (&part, tag) in [(&s.part_a, 2u8), (&s.part_b, 3u8)].iter().map(|(p, t)| (p, *t)) {
        for &v in part.iter() {
            if v >= n {
                report.violations.push(format!("node {v} out of range"));
                continue;
            }
            if seen[v] != 0 {
                report.violations.push(format!("node {v} assigned twice"));
            }
            seen[v] = tag;
        }
    }
    if let Some(v) = seen.iter().position(|&t| t == 0) {
        report.violations.push(format!("node {v} not covered"));
    }
    let cap = 2 * n / 3;
    if s.part_a.len() > cap {
        report.violations.push(format!("|A| = {} exceeds {cap}", s.part_a.len()));
    }
    if s.part_b.len() > cap {
        report.violations.push(format!("|B| = {} exceeds {cap}", s.part_b.len()));
    }
    for &a in &s.part_a {
        for &b in &s.part_b {
            if a < n && b < n && oracle.intersects(a, b) {
                report.violations.push(format!("edge between parts: {a} and {b}"));
            }
        }
    }
    report
}

fn ratio_milli(size: usize, n: usize) -> u64 {
    if n == 0 {
        return 0;
    }
    let sqrt_n = libm::sqrt(n as f64);
    libm::round(size as f64 / sqrt_n * 1000.0) as u64
}

// ---------------------------------------------------------------------------
// The full pipeline for segment instances.

#[derive(Debug)]
pub struct PipelineOutput {
    pub fragments: FragmentSet,
    pub contact: EmbeddedPlanarGraph,
    pub fragment_separator: SeparatorResult,
    pub separator: StarSeparator,
}

#[derive(Debug)]
pub enum PipelineError {
    Fragmenter(FragmentError),
    Contact(ContactError),
    Planar(PlanarSepError),
    Stars(StarError),
}

impl fmt::Display for PipelineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PipelineError::Fragmenter(e) => write!(f, "fragmenter: {e}"),
            PipelineError::Contact(e) => write!(f, "contact graph: {e}"),
            PipelineError::Planar(e) => write!(f, "planar separator: {e}"),
            PipelineError::Stars(e) => write!(f, "star lifting: {e}"),
        }
    }
}

impl From<FragmentError> for PipelineError {
    fn from(e: FragmentError) -> Self {
        PipelineError::Fragmenter(e)
    }
}
impl From<ContactError> for PipelineError {
    fn from(e: ContactError) -> Self {
        PipelineError::Contact(e)
    }
}
impl From<PlanarSepError> for PipelineError {
    fn from(e: PlanarSepError) -> Self {
        PipelineError::Planar(e)
    }
}
impl From<StarError> for PipelineError {
    fn from(e: StarError) -> Self {
        PipelineError::Stars(e)
    }
}

/// Fragmentation, contact graph, planar separator, star lifting: the whole
/// construction for a segment instance in general position.
pub fn segment_star_separator(
    inst: &ColoredSegmentInstance,
) -> Result<PipelineOutput, PipelineError> {
    let mut fs = compute_active_fragments(inst)?;
    let weights: Vec<Coord> = inst.segments.iter().map(|s| s.weight.clone()).collect();
    pick_representatives(&mut fs, &weights)?;
    let contact = build_contact_graph(&fs)?;
    let fragment_separator = planar_separator(&contact)?;
    let centers = lift_to_stars(&fragment_separator, &contact, &fs)?;
    let stars = materialize_stars(&centers, inst)?;
    let (part_a, part_b) = assign_parts(&fragment_separator, &contact, &fs, &stars)?;
    let separator = StarSeparator { stars, part_a, part_b };
    Ok(PipelineOutput { fragments: fs, contact, fragment_separator, separator })
}

/// All intersecting pairs of the instance, via one sweep per color pair plus
/// a collinear-interval scan within each color (for degenerate inputs).
pub fn intersection_edges(inst: &ColoredSegmentInstance) -> Vec<(usize, usize)> {
    let c = inst.c();
    let mut edges: BTreeSet<(usize, usize)> = BTreeSet::new();

    for color in 0..c {
        let map = FrameMap::for_direction(inst.colors[color]);
        for other in (color + 1)..c {
            collect_cross_color(inst, &map, color, other, &mut edges);
        }
        // Same-color pairs only интersect when collinear and overlapping.
        collect_same_color(inst, &map, color, &mut edges);
    }
    edges.into_iter().collect()
}

fn collect_cross_color(
    inst: &ColoredSegmentInstance,
    map: &FrameMap,
    color: usize,
    other: usize,
    edges: &mut BTreeSet<(usize, usize)>,
) {
    #[derive(PartialEq, Eq, PartialOrd, Ord, Clone, Copy)]
    enum Kind {
        Death = 0,
        Birth = 1,
        Query = 2,
    }
    struct Ev {
        y: Coord,
        x: Coord,
        kind: Kind,
        id: usize,
    }
    let mut events: Vec<Ev> = Vec::new();
    let mut walls: BTreeMap<usize, (crate::geom::Point, crate::geom::Point)> = BTreeMap::new();
    for s in &inst.segments {
        if s.color == other {
            let rp = map.apply(&s.p);
            let rq = map.apply(&s.q);
            let (top, bot) = if rp.y > rq.y { (rp, rq) } else { (rq, rp) };
            events.push(Ev { y: top.y.clone(), x: top.x.clone(), kind: Kind::Birth, id: s.id });
            events.push(Ev { y: bot.y.clone(), x: bot.x.clone(), kind: Kind::Death, id: s.id });
            walls.insert(s.id, (top, bot));
        } else if s.color == color {
            let rp = map.apply(&s.p);
            let rq = map.apply(&s.q);
            let x = if rp.x <= rq.x { rp.x.clone() } else { rq.x.clone() };
            events.push(Ev { y: rp.y, x, kind: Kind::Query, id: s.id });
        }
    }
    events.sort_by(|a, b| {
        b.y.cmp(&a.y)
            .then_with(|| a.kind.cmp(&b.kind))
            .then_with(|| a.x.cmp(&b.x))
            .then_with(|| a.id.cmp(&b.id))
    });
    let mut tree: SweepTree<ClaimWall> = SweepTree::new();
    let mut handle_of: BTreeMap<usize, crate::sweep::Handle> = BTreeMap::new();
    let mut dying: Vec<(Coord, usize)> = Vec::new();
    let mut dying_y: Option<Coord> = None;
    for ev in events {
        if dying_y.as_ref() != Some(&ev.y) {
            dying.clear();
            dying_y = Some(ev.y.clone());
        }
        match ev.kind {
            Kind::Birth => {
                let (top, bot) = walls[&ev.id].clone();
                let slope = (&bot.x - &top.x) / (&top.y - &bot.y);
                let h = tree.insert_by(ClaimWall { seg: ev.id, top, slope }, |new, old| {
                    let xo = old.x_at(&new.top.y);
                    new.top
                        .x
                        .cmp(&xo)
                        .then_with(|| new.slope.cmp(&old.slope))
                        .then(core::cmp::Ordering::Greater)
                });
                handle_of.insert(ev.id, h);
            }
            Kind::Death => {
                if let Some(h) = handle_of.remove(&ev.id) {
                    tree.remove(h);
                    let (_, bot) = &walls[&ev.id];
                    dying.push((bot.x.clone(), ev.id));
                }
            }
            Kind::Query => {
                let s = &inst.segments[ev.id];
                let rp = map.apply(&s.p);
                let rq = map.apply(&s.q);
                let (x_lo, x_hi) = if rp.x <= rq.x { (&rp.x, &rq.x) } else { (&rq.x, &rp.x) };
                let y = &rp.y;
                tree.visit_between(
                    |w| w.x_at(y) < *x_lo,
                    |w| w.x_at(y) > *x_hi,
                    &mut |_, w| {
                        let key = (ev.id.min(w.seg), ev.id.max(w.seg));
                        edges.insert(key);
                    },
                );
                for (x, seg) in &dying {
                    if *x >= *x_lo && *x <= *x_hi {
                        let key = (ev.id.min(*seg), ev.id.max(*seg));
                        edges.insert(key);
                    }
                }
            }
        }
    }
}

fn collect_same_color(
    inst: &ColoredSegmentInstance,
    map: &FrameMap,
    color: usize,
    edges: &mut BTreeSet<(usize, usize)>,
) {
    // In the rotated frame the class is horizontal: group by y, sort by x
    // interval, and link overlapping or touching neighbors.
    let mut by_line: BTreeMap<Coord, Vec<(Coord, Coord, usize)>> = BTreeMap::new();
    for s in &inst.segments {
        if s.color != color {
            continue;
        }
        let rp = map.apply(&s.p);
        let rq = map.apply(&s.q);
        let (lo, hi) = if rp.x <= rq.x { (rp.x, rq.x) } else { (rq.x, rp.x) };
        by_line.entry(rp.y).or_default().push((lo, hi, s.id));
    }
    for (_, mut items) in by_line {
        items.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
        // Active set of intervals still open at the current left coordinate.
        let mut open: Vec<(Coord, usize)> = Vec::new();
        for (lo, hi, id) in items {
            open.retain(|(end, _)| *end >= lo);
            for (_, other) in &open {
                edges.insert((id.min(*other), id.max(*other)));
            }
            open.push((hi, id));
        }
    }
}
