//! Separators for c-oriented polygons, and the inflation path that turns
//! degenerate (overlapping) segment inputs into polygons.
//!
//! The polygon construction builds an auxiliary segment set: all polygon
//! sides, one vertical connecting segment per hole (topmost hole vertex up
//! to the boundary piece above it), and one vertical containment segment per
//! polygon (from an interior point up past the top boundary of everything
//! containing it). The segment pipeline runs on that set with the vertical
//! class first, and star centers lift back to polygons.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;
use core::fmt;

use num_traits::Zero;

use crate::coord::{crd, frac, half, zero, Coord};
use crate::geom::{
    intersect_points, orient, ColoredSegmentInstance, Direction, GeomError, Point, Segment,
    SegmentIntersection,
};
use crate::stars::{segment_star_separator, PipelineError, Star, StarSeparator};
use crate::sweep::PrefixMaxTree;

pub const MAX_POLYGON_EDGES: usize = 64;

#[derive(Debug, Clone)]
pub struct Polygon {
    pub id: usize,
    /// Counter-clockwise outer ring.
    pub outer: Vec<Point>,
    /// Clockwise holes, strictly inside the outer ring, pairwise disjoint.
    pub holes: Vec<Vec<Point>>,
    pub weight: Coord,
}

impl Polygon {
    pub fn edge_count(&self) -> usize {
        self.outer.len() + self.holes.iter().map(|h| h.len()).sum::<usize>()
    }

    /// All boundary edges as point pairs, outer ring first.
    pub fn edges(&self) -> Vec<(Point, Point)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for ring in core::iter::once(&self.outer).chain(self.holes.iter()) {
            for i in 0..ring.len() {
                out.push((ring[i].clone(), ring[(i + 1) % ring.len()].clone()));
            }
        }
        out
    }

    pub fn vertices(&self) -> impl Iterator<Item = &Point> + '_ {
        self.outer.iter().chain(self.holes.iter().flatten())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PolygonError {
    TooManyEdges(usize),
    RingTooSmall(usize),
    SelfIntersectingRing(usize),
    WrongOrientation(usize),
    HoleOutsideOuter(usize),
    HolesIntersect(usize),
    VerticalEdge(usize),
    CollinearConsecutiveEdges(usize),
    /// A vertical ray hit a vertex; the input needs perturbation.
    RayThroughVertex(usize),
    RayEscapes(usize),
    NonContiguousIds,
    /// A polygon's representative side landed nowhere consistent.
    InconsistentLift(usize),
    Geometry(GeomError),
    Pipeline(alloc::string::String),
}

impl fmt::Display for PolygonError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PolygonError::TooManyEdges(id) => {
                write!(f, "polygon {id} exceeds {MAX_POLYGON_EDGES} edges")
            }
            PolygonError::RingTooSmall(id) => write!(f, "polygon {id} has a ring with < 3 points"),
            PolygonError::SelfIntersectingRing(id) => {
                write!(f, "polygon {id} has a self-intersecting or touching ring")
            }
            PolygonError::WrongOrientation(id) => {
                write!(f, "polygon {id}: outer ring must be CCW, holes CW")
            }
            PolygonError::HoleOutsideOuter(id) => {
                write!(f, "polygon {id} has a hole outside its outer ring")
            }
            PolygonError::HolesIntersect(id) => write!(f, "polygon {id} has intersecting holes"),
            PolygonError::VerticalEdge(id) => write!(f, "polygon {id} has a vertical edge"),
            PolygonError::CollinearConsecutiveEdges(id) => {
                write!(f, "polygon {id} has consecutive collinear edges")
            }
            PolygonError::RayThroughVertex(id) => {
                write!(f, "vertical ray for polygon {id} passes through a vertex; perturb")
            }
            PolygonError::RayEscapes(id) => {
                write!(f, "connecting ray for polygon {id} escaped the outer ring")
            }
            PolygonError::NonContiguousIds => write!(f, "polygon ids must be 0..n-1 in order"),
            PolygonError::InconsistentLift(id) => {
                write!(f, "polygon {id}: representative side is in no part and no star")
            }
            PolygonError::Geometry(e) => write!(f, "{e}"),
            PolygonError::Pipeline(e) => write!(f, "{e}"),
        }
    }
}

impl From<GeomError> for PolygonError {
    fn from(e: GeomError) -> Self {
        PolygonError::Geometry(e)
    }
}

impl From<PipelineError> for PolygonError {
    fn from(e: PipelineError) -> Self {
        PolygonError::Pipeline(alloc::format!("{e}"))
    }
}

fn signed_area_doubled(ring: &[Point]) -> Coord {
    let mut acc = zero();
    for i in 0..ring.len() {
        let a = &ring[i];
        let b = &ring[(i + 1) % ring.len()];
        acc = acc + (&a.x * &b.y - &b.x * &a.y);
    }
    acc
}

fn ring_simple(ring: &[Point]) -> bool {
    let k = ring.len();
    for i in 0..k {
        let (a1, a2) = (&ring[i], &ring[(i + 1) % k]);
        if a1 == a2 {
            return false;
        }
        for j in (i + 1)..k {
            let (b1, b2) = (&ring[j], &ring[(j + 1) % k]);
            let adjacent = j == i + 1 || (i == 0 && j == k - 1);
            match intersect_points(a1, a2, b1, b2) {
                SegmentIntersection::Empty => {}
                SegmentIntersection::Overlap(_, _) => return false,
                SegmentIntersection::Point(p) => {
                    if !adjacent {
                        return false;
                    }
                    // Adjacent edges may only share their common endpoint.
                    let shared = if j == i + 1 { &ring[j] } else { &ring[0] };
                    if p != *shared {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// Even-odd test against one ring; boundary points count as outside here,
/// callers only use it for points off the boundary.
fn point_in_ring(pt: &Point, ring: &[Point]) -> bool {
    let mut inside = false;
    let k = ring.len();
    for i in 0..k {
        let a = &ring[i];
        let b = &ring[(i + 1) % k];
        let (lo, hi) = if a.x <= b.x { (a, b) } else { (b, a) };
        if lo.x <= pt.x && pt.x < hi.x {
            // Edge spans pt.x half-openly; count if the edge passes above.
            if orient(lo, hi, pt) < 0 {
                inside = !inside;
            }
        }
    }
    inside
}

/// Even-odd containment in a polygon with holes.
pub fn point_in_polygon(pt: &Point, p: &Polygon) -> bool {
    let mut inside = point_in_ring(pt, &p.outer);
    for h in &p.holes {
        if point_in_ring(pt, h) {
            inside = !inside;
        }
    }
    inside
}

/// Boundary crossing or containment, both directions: the independent
/// polygon-intersection oracle.
pub fn polygons_intersect(a: &Polygon, b: &Polygon) -> bool {
    let bbox = |p: &Polygon| {
        let mut it = p.vertices();
        let v = it.next().expect("nonempty polygon");
        let (mut x0, mut x1, mut y0, mut y1) = (v.x.clone(), v.x.clone(), v.y.clone(), v.y.clone());
        for v in it {
            if v.x < x0 {
                x0 = v.x.clone();
            } else if v.x > x1 {
                x1 = v.x.clone();
            }
            if v.y < y0 {
                y0 = v.y.clone();
            } else if v.y > y1 {
                y1 = v.y.clone();
            }
        }
        (x0, x1, y0, y1)
    };
    let (ax0, ax1, ay0, ay1) = bbox(a);
    let (bx0, bx1, by0, by1) = bbox(b);
    if ax0 > bx1 || bx0 > ax1 || ay0 > by1 || by0 > ay1 {
        return false;
    }
    for (p1, q1) in a.edges() {
        for (p2, q2) in b.edges() {
            if crate::geom::points_segments_intersect(&p1, &q1, &p2, &q2) {
                return true;
            }
        }
    }
    point_in_polygon(&a.outer[0], b) || point_in_polygon(&b.outer[0], a)
}

/// Per-polygon validation: ring sizes, simplicity, orientation, hole
/// containment and disjointness, registered non-vertical edge directions.
pub fn validate_polygon(p: &Polygon, allow_vertical: bool) -> Result<Vec<Direction>, PolygonError> {
    if p.edge_count() > MAX_POLYGON_EDGES {
        return Err(PolygonError::TooManyEdges(p.id));
    }
    let mut dirs: BTreeSet<Direction> = BTreeSet::new();
    for ring in core::iter::once(&p.outer).chain(p.holes.iter()) {
        if ring.len() < 3 {
            return Err(PolygonError::RingTooSmall(p.id));
        }
        if !ring_simple(ring) {
            return Err(PolygonError::SelfIntersectingRing(p.id));
        }
        let k = ring.len();
        for i in 0..k {
            let d = Direction::of(&ring[i], &ring[(i + 1) % k])?;
            if d.is_vertical() && !allow_vertical {
                return Err(PolygonError::VerticalEdge(p.id));
            }
            let next = Direction::of(&ring[(i + 1) % k], &ring[(i + 2) % k])?;
            if d == next {
                return Err(PolygonError::CollinearConsecutiveEdges(p.id));
            }
            dirs.insert(d);
        }
    }
    if signed_area_doubled(&p.outer) <= zero() {
        return Err(PolygonError::WrongOrientation(p.id));
    }
    for h in &p.holes {
        if signed_area_doubled(h) >= zero() {
            return Err(PolygonError::WrongOrientation(p.id));
        }
        if !h.iter().all(|v| point_in_ring(v, &p.outer)) {
            return Err(PolygonError::HoleOutsideOuter(p.id));
        }
    }
    for i in 0..p.holes.len() {
        for j in (i + 1)..p.holes.len() {
            if p.holes[i].iter().any(|v| point_in_ring(v, &p.holes[j]))
                || p.holes[j].iter().any(|v| point_in_ring(v, &p.holes[i]))
            {
                return Err(PolygonError::HolesIntersect(p.id));
            }
        }
    }
    Ok(dirs.into_iter().collect())
}

// ---------------------------------------------------------------------------
// Vertical decomposition.

#[derive(Debug, Clone)]
pub struct PolyTrapezoid {
    pub owner: usize,
    pub x_lo: Coord,
    pub x_hi: Coord,
    /// Bottom and top boundary edges as (point, point) with increasing x.
    pub bottom: (Point, Point),
    pub top: (Point, Point),
}

impl PolyTrapezoid {
    pub fn width(&self) -> Coord {
        &self.x_hi - &self.x_lo
    }

    fn edge_y_at(edge: &(Point, Point), x: &Coord) -> Coord {
        let (a, b) = edge;
        &a.y + (x - &a.x) * (&b.y - &a.y) / (&b.x - &a.x)
    }

    pub fn bottom_y_at(&self, x: &Coord) -> Coord {
        Self::edge_y_at(&self.bottom, x)
    }

    pub fn top_y_at(&self, x: &Coord) -> Coord {
        Self::edge_y_at(&self.top, x)
    }

    pub fn contains(&self, pt: &Point) -> bool {
        if pt.x < self.x_lo || pt.x > self.x_hi {
            return false;
        }
        pt.y >= self.bottom_y_at(&pt.x) && pt.y <= self.top_y_at(&pt.x)
    }

    /// Corner points (may repeat at degenerate sides).
    pub fn corners(&self) -> [Point; 4] {
        [
            Point::new(self.x_lo.clone(), self.bottom_y_at(&self.x_lo)),
            Point::new(self.x_hi.clone(), self.bottom_y_at(&self.x_hi)),
            Point::new(self.x_hi.clone(), self.top_y_at(&self.x_hi)),
            Point::new(self.x_lo.clone(), self.top_y_at(&self.x_lo)),
        ]
    }
}

/// Decomposes the polygon interior into trapezoids with vertical sides by
/// slab construction at every vertex x, merging slabs whose bounding edges
/// do not change.
pub fn vertical_decomposition(p: &Polygon) -> Vec<PolyTrapezoid> {
    let edges = p.edges();
    let mut xs: Vec<Coord> = p.vertices().map(|v| v.x.clone()).collect();
    xs.sort();
    xs.dedup();

    // Open trapezoids keyed by (bottom edge id, top edge id).
    let mut open: BTreeMap<(usize, usize), PolyTrapezoid> = BTreeMap::new();
    let mut done: Vec<PolyTrapezoid> = Vec::new();

    for w in xs.windows(2) {
        let (x1, x2) = (&w[0], &w[1]);
        let xm = half(&(x1 + x2));
        // Edges spanning the slab, sorted by height at the midpoint.
        let mut spanning: Vec<(Coord, usize)> = Vec::new();
        for (eid, (a, b)) in edges.iter().enumerate() {
            let (lo, hi) = if a.x <= b.x { (&a.x, &b.x) } else { (&b.x, &a.x) };
            if lo <= x1 && hi >= x2 {
                let y = PolyTrapezoid::edge_y_at(&(a.clone(), b.clone()), &xm);
                spanning.push((y, eid));
            }
        }
        spanning.sort_by(|l, r| l.0.cmp(&r.0).then_with(|| l.1.cmp(&r.1)));
        debug_assert!(spanning.len() % 2 == 0, "polygon slab has odd edge count");

        let mut next_open: BTreeMap<(usize, usize), PolyTrapezoid> = BTreeMap::new();
        for pair in spanning.chunks(2) {
            let (bot_id, top_id) = (pair[0].1, pair[1].1);
            let key = (bot_id, top_id);
            if let Some(mut t) = open.remove(&key) {
                t.x_hi = x2.clone();
                next_open.insert(key, t);
            } else {
                next_open.insert(
                    key,
                    PolyTrapezoid {
                        owner: p.id,
                        x_lo: x1.clone(),
                        x_hi: x2.clone(),
                        bottom: order_edge(&edges[bot_id]),
                        top: order_edge(&edges[top_id]),
                    },
                );
            }
        }
        done.extend(open.into_values());
        open = next_open;
    }
    done.extend(open.into_values());
    done.sort_by(|l, r| {
        l.x_lo
            .cmp(&r.x_lo)
            .then_with(|| l.bottom_y_at(&l.x_lo).cmp(&r.bottom_y_at(&r.x_lo)))
            .then_with(|| l.x_hi.cmp(&r.x_hi))
    });
    done
}

fn order_edge(e: &(Point, Point)) -> (Point, Point) {
    if e.0.x <= e.1.x {
        e.clone()
    } else {
        (e.1.clone(), e.0.clone())
    }
}

// ---------------------------------------------------------------------------
// Connecting and containment segments.

#[derive(Debug, Clone)]
pub struct ConnectingSegment {
    pub owner: usize,
    pub p: Point,
    pub q: Point,
}

/// One vertical segment per hole: from the hole's topmost vertex straight up
/// to the first hit on another hole or the outer ring.
pub fn connecting_segments(p: &Polygon) -> Result<Vec<ConnectingSegment>, PolygonError> {
    let mut out = Vec::new();
    for (hidx, hole) in p.holes.iter().enumerate() {
        let top = hole
            .iter()
            .max_by(|a, b| a.y.cmp(&b.y).then_with(|| b.x.cmp(&a.x)))
            .expect("nonempty ring");
        // First hit above, over all rings except this hole.
        let mut best: Option<Coord> = None;
        for (ridx, ring) in core::iter::once(&p.outer).chain(p.holes.iter()).enumerate() {
            if ridx == hidx + 1 {
                continue;
            }
            for i in 0..ring.len() {
                let (a, b) = (&ring[i], &ring[(i + 1) % ring.len()]);
                let (lo, hi) = if a.x <= b.x { (a, b) } else { (b, a) };
                if lo.x <= top.x && top.x <= hi.x {
                    if lo.x == top.x || hi.x == top.x {
                        return Err(PolygonError::RayThroughVertex(p.id));
                    }
                    let y = &lo.y + (&top.x - &lo.x) * (&hi.y - &lo.y) / (&hi.x - &lo.x);
                    if y > top.y && best.as_ref().map_or(true, |b| y < *b) {
                        best = Some(y);
                    }
                }
            }
        }
        let y = best.ok_or(PolygonError::RayEscapes(p.id))?;
        out.push(ConnectingSegment {
            owner: p.id,
            p: top.clone(),
            q: Point::new(top.x.clone(), y),
        });
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct ContainmentSegment {
    pub owner: usize,
    /// The polygon whose boundary provides the topmost exit point.
    pub target: usize,
    pub p: Point,
    pub q: Point,
}

/// Base points: the midpoint of each polygon's widest trapezoid, nudged so
/// all x-coordinates are distinct and avoid every vertex and connecting x.
fn pick_base_points(
    ps: &[Polygon],
    vds: &[Vec<PolyTrapezoid>],
    forbidden_x: &mut BTreeSet<Coord>,
) -> Vec<Point> {
    let n = ps.len();
    let mut out = Vec::with_capacity(n);
    for (i, vd) in vds.iter().enumerate() {
        let widest = vd
            .iter()
            .max_by(|l, r| {
                l.width()
                    .cmp(&r.width())
                    .then_with(|| r.x_lo.cmp(&l.x_lo))
            })
            .expect("polygon has a trapezoid");
        let step = widest.width() / crd(4 * (n as i64 + 1));
        let base = half(&(&widest.x_lo + &widest.x_hi));
        let mut k = 0i64;
        let x = loop {
            let cand = &base + crd(k) * &step;
            if !forbidden_x.contains(&cand) {
                break cand;
            }
            k += 1;
            assert!(k <= 4 * (n as i64 + 1), "base point nudging exhausted");
        };
        forbidden_x.insert(x.clone());
        let y = half(&(widest.bottom_y_at(&x) + widest.top_y_at(&x)));
        debug_assert!(point_in_polygon(&Point::new(x.clone(), y.clone()), &ps[i]));
        out.push(Point::new(x, y));
    }
    out
}

/// Containment segments for the whole collection: per trapezoid class (one
/// class per bottom/top orientation pair), a left-to-right sweep keeps the
/// alive trapezoids in a prefix-max structure over the skew frame, and each
/// base point queries the highest exit among trapezoids containing it.
pub fn containment_segments(
    ps: &[Polygon],
    vds: &[Vec<PolyTrapezoid>],
    base_points: &[Point],
) -> Result<Vec<ContainmentSegment>, PolygonError> {
    // Orientation index per edge direction.
    let mut orientations: BTreeSet<Direction> = BTreeSet::new();
    for p in ps {
        for (a, b) in p.edges() {
            orientations.insert(Direction::of(&a, &b)?);
        }
    }
    let orientations: Vec<Direction> = orientations.into_iter().collect();
    let dir_index = |d: &Direction| orientations.iter().position(|o| o == d).unwrap();
    let c = orientations.len();

    // alpha(point) for an orientation u: the upward normal coordinate.
    let alpha_of = |d: &Direction, pt: &Point| -> Coord {
        crd(-d.dy) * &pt.x + crd(d.dx) * &pt.y
    };

    // Flatten all trapezoids with their class.
    struct Entry {
        class: usize,
        alpha: Coord,
        beta: Coord,
        global: usize,
    }
    let mut all: Vec<&PolyTrapezoid> = Vec::new();
    let mut entries: Vec<Entry> = Vec::new();
    for vd in vds {
        for t in vd {
            let bd = Direction::of(&t.bottom.0, &t.bottom.1)?;
            let td = Direction::of(&t.top.0, &t.top.1)?;
            let class = dir_index(&bd) * c + dir_index(&td);
            entries.push(Entry {
                class,
                alpha: alpha_of(&bd, &t.bottom.0),
                beta: alpha_of(&td, &t.top.0),
                global: all.len(),
            });
            all.push(t);
        }
    }

    let mut best_exit: Vec<Option<(Coord, usize)>> = alloc::vec![None; ps.len()];

    for class in 0..c * c {
        let members: Vec<&Entry> = entries.iter().filter(|e| e.class == class).collect();
        if members.is_empty() {
            continue;
        }
        let (bo, to) = (class / c, class % c);
        let bot_dir = orientations[bo];
        let top_dir = orientations[to];

        // Compress alpha values.
        let mut alphas: Vec<Coord> = members.iter().map(|e| e.alpha.clone()).collect();
        alphas.sort();
        alphas.dedup();
        let pos_of = |a: &Coord| alphas.partition_point(|x| x <= a);

        #[derive(PartialEq, Eq, PartialOrd, Ord)]
        enum Kind {
            Insert = 0,
            Query = 1,
            Remove = 2,
        }
        struct Ev {
            x: Coord,
            kind: Kind,
            id: usize, // member index or base-point index
        }
        let mut events: Vec<Ev> = Vec::new();
        for (midx, e) in members.iter().enumerate() {
            let t = all[e.global];
            events.push(Ev { x: t.x_lo.clone(), kind: Kind::Insert, id: midx });
            events.push(Ev { x: t.x_hi.clone(), kind: Kind::Remove, id: midx });
        }
        for (pidx, pt) in base_points.iter().enumerate() {
            events.push(Ev { x: pt.x.clone(), kind: Kind::Query, id: pidx });
        }
        events.sort_by(|a, b| {
            a.x.cmp(&b.x).then_with(|| a.kind.cmp(&b.kind)).then_with(|| a.id.cmp(&b.id))
        });

        let mut tree: PrefixMaxTree<Coord> = PrefixMaxTree::new(alphas.len());
        for ev in events {
            match ev.kind {
                Kind::Insert => {
                    let e = members[ev.id];
                    let pos = pos_of(&e.alpha) - 1;
                    tree.insert(pos, e.beta.clone(), ev.id as u64);
                }
                Kind::Remove => {
                    let e = members[ev.id];
                    let pos = pos_of(&e.alpha) - 1;
                    tree.remove(pos, e.beta.clone(), ev.id as u64);
                }
                Kind::Query => {
                    let pt = &base_points[ev.id];
                    let a_star = alpha_of(&bot_dir, pt);
                    let pos = pos_of(&a_star);
                    if pos == 0 {
                        continue;
                    }
                    let Some((beta, tag)) = tree.prefix_max(pos - 1) else { continue };
                    let b_pt = alpha_of(&top_dir, pt);
                    if beta < b_pt {
                        continue;
                    }
                    // The winning trapezoid contains the point; exit through
                    // its top side at the point's x.
                    let t = all[members[tag as usize].global];
                    debug_assert!(t.contains(pt));
                    let exit_y = t.top_y_at(&pt.x);
                    let slot = &mut best_exit[ev.id];
                    if slot.as_ref().map_or(true, |(y, _)| exit_y > *y) {
                        *slot = Some((exit_y, t.owner));
                    }
                }
            }
        }
    }

    let mut out = Vec::with_capacity(ps.len());
    for (i, exit) in best_exit.iter().enumerate() {
        let (y, target) = exit.as_ref().expect("every base point is inside its own polygon");
        out.push(ContainmentSegment {
            owner: i,
            target: *target,
            p: base_points[i].clone(),
            q: Point::new(base_points[i].x.clone(), y.clone()),
        });
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// The polygon star separator.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SegmentRole {
    Side { polygon: usize, representative: bool },
    Connecting { polygon: usize },
    Containment { polygon: usize, target: usize },
}

#[derive(Debug)]
pub struct AuxiliarySegments {
    pub instance: ColoredSegmentInstance,
    pub roles: Vec<SegmentRole>,
}

/// Builds the auxiliary segment set: sides with the representative side
/// carrying the polygon weight, vertical connecting and containment
/// segments (class 0).
pub fn build_auxiliary_segments(ps: &[Polygon]) -> Result<AuxiliarySegments, PolygonError> {
    let vds: Vec<Vec<PolyTrapezoid>> = ps.iter().map(vertical_decomposition).collect();

    let mut connecting: Vec<ConnectingSegment> = Vec::new();
    for p in ps {
        connecting.extend(connecting_segments(p)?);
    }
    let mut forbidden_x: BTreeSet<Coord> = BTreeSet::new();
    for p in ps {
        for v in p.vertices() {
            forbidden_x.insert(v.x.clone());
        }
    }
    for cseg in &connecting {
        forbidden_x.insert(cseg.p.x.clone());
    }
    let base_points = pick_base_points(ps, &vds, &mut forbidden_x);
    let containment = containment_segments(ps, &vds, &base_points)?;

    // Color classes: vertical first, then edge orientations in sorted order.
    let mut orientations: BTreeSet<Direction> = BTreeSet::new();
    for p in ps {
        for (a, b) in p.edges() {
            orientations.insert(Direction::of(&a, &b)?);
        }
    }
    let vertical = Direction::new(0, 1).unwrap();
    let mut colors = alloc::vec![vertical];
    colors.extend(orientations.iter().copied());
    let color_of = |d: &Direction| colors.iter().position(|o| o == d).unwrap();

    let mut segments: Vec<Segment> = Vec::new();
    let mut roles: Vec<SegmentRole> = Vec::new();
    let push = |segments: &mut Vec<Segment>,
                    roles: &mut Vec<SegmentRole>,
                    p: Point,
                    q: Point,
                    color: usize,
                    weight: Coord,
                    role: SegmentRole| {
        let id = segments.len();
        segments.push(Segment { id, p, q, color, weight });
        roles.push(role);
    };

    for cseg in &connecting {
        push(
            &mut segments,
            &mut roles,
            cseg.p.clone(),
            cseg.q.clone(),
            0,
            zero(),
            SegmentRole::Connecting { polygon: cseg.owner },
        );
    }
    for cseg in &containment {
        push(
            &mut segments,
            &mut roles,
            cseg.p.clone(),
            cseg.q.clone(),
            0,
            zero(),
            SegmentRole::Containment { polygon: cseg.owner, target: cseg.target },
        );
    }
    for p in ps {
        // Representative side: the one whose lowest-then-leftmost endpoint is
        // minimal over all sides.
        let edges = p.edges();
        let key = |e: &(Point, Point)| {
            let a = (e.0.y.clone(), e.0.x.clone());
            let b = (e.1.y.clone(), e.1.x.clone());
            if a <= b {
                a
            } else {
                b
            }
        };
        let rep = edges
            .iter()
            .enumerate()
            .min_by(|(_, l), (_, r)| key(l).cmp(&key(r)))
            .map(|(i, _)| i)
            .unwrap();
        for (i, (a, b)) in edges.iter().enumerate() {
            let d = Direction::of(a, b)?;
            push(
                &mut segments,
                &mut roles,
                a.clone(),
                b.clone(),
                color_of(&d),
                if i == rep { p.weight.clone() } else { zero() },
                SegmentRole::Side { polygon: p.id, representative: i == rep },
            );
        }
    }

    // Per polygon: its sides, one connecting segment per hole (holes have
    // at least three edges), and one containment segment.
    let cap = ps.len() * (MAX_POLYGON_EDGES + MAX_POLYGON_EDGES / 3 + 1);
    assert!(segments.len() <= cap, "auxiliary segment count exceeds the linear bound");
    let instance = ColoredSegmentInstance::new(segments, colors)?;
    Ok(AuxiliarySegments { instance, roles })
}

#[derive(Debug)]
pub struct PolygonPipelineOutput {
    pub aux: AuxiliarySegments,
    pub segment_separator: StarSeparator,
    pub separator: StarSeparator,
}

/// Exact similarity maps that keep all coordinates rational while rotating
/// every direction off the vertical axis.
const PYTHAGOREAN_ROTATIONS: [(i64, i64); 6] =
    [(3, 4), (5, 12), (8, 15), (20, 21), (7, 24), (9, 40)];

fn rotate_polygons(ps: &[Polygon]) -> Result<Vec<Polygon>, PolygonError> {
    // Find a rotation (a, b): (x, y) -> (a x - b y, b x + a y) such that no
    // edge direction becomes vertical.
    let mut dirs: BTreeSet<Direction> = BTreeSet::new();
    for p in ps {
        for (s, t) in p.edges() {
            dirs.insert(Direction::of(&s, &t)?);
        }
    }
    let (a, b) = PYTHAGOREAN_ROTATIONS
        .iter()
        .copied()
        .find(|&(a, b)| {
            dirs.iter().all(|d| a * d.dx - b * d.dy != 0)
        })
        .expect("some rotation avoids all edge directions");
    let map = |pt: &Point| Point::new(
        crd(a) * &pt.x - crd(b) * &pt.y,
        crd(b) * &pt.x + crd(a) * &pt.y,
    );
    Ok(ps
        .iter()
        .map(|p| Polygon {
            id: p.id,
            outer: p.outer.iter().map(&map).collect(),
            holes: p.holes.iter().map(|h| h.iter().map(&map).collect()).collect(),
            weight: p.weight.clone(),
        })
        .collect())
}

/// The full polygon separator: auxiliary segments, the segment pipeline with
/// the vertical class first, lifting star centers to polygons, materializing
/// polygon stars through their vertical decompositions, and parts by
/// representative-side membership.
pub fn polygon_star_separator(ps: &[Polygon]) -> Result<PolygonPipelineOutput, PolygonError> {
    for (i, p) in ps.iter().enumerate() {
        if p.id != i {
            return Err(PolygonError::NonContiguousIds);
        }
        validate_polygon(p, true)?;
    }
    // Vertical edges (inflated inputs) get rotated away first.
    let has_vertical = ps.iter().any(|p| {
        p.edges()
            .iter()
            .any(|(a, b)| Direction::of(a, b).map(|d| d.is_vertical()).unwrap_or(false))
    });
    let rotated;
    let work: &[Polygon] = if has_vertical {
        rotated = rotate_polygons(ps)?;
        &rotated
    } else {
        ps
    };

    let aux = build_auxiliary_segments(work)?;
    let out = segment_star_separator(&aux.instance)?;
    let segment_separator = out.separator;

    // Lift centers to polygons.
    let mut centers: BTreeSet<usize> = BTreeSet::new();
    for star in &segment_separator.stars {
        match aux.roles[star.center] {
            SegmentRole::Side { polygon, .. } | SegmentRole::Connecting { polygon } => {
                centers.insert(polygon);
            }
            SegmentRole::Containment { target, .. } => {
                centers.insert(target);
            }
        }
    }
    let centers: Vec<usize> = centers.into_iter().collect();

    // Materialize polygon stars: first intersecting center (by id) claims a
    // polygon; intersection tested through the vertical decompositions.
    let vds: Vec<Vec<PolyTrapezoid>> = work.iter().map(vertical_decomposition).collect();
    let bboxes: Vec<(Coord, Coord, Coord, Coord)> = work
        .iter()
        .map(|p| {
            let mut it = p.vertices();
            let v0 = it.next().unwrap();
            let (mut x0, mut x1, mut y0, mut y1) =
                (v0.x.clone(), v0.x.clone(), v0.y.clone(), v0.y.clone());
            for v in it {
                if v.x < x0 {
                    x0 = v.x.clone();
                }
                if v.x > x1 {
                    x1 = v.x.clone();
                }
                if v.y < y0 {
                    y0 = v.y.clone();
                }
                if v.y > y1 {
                    y1 = v.y.clone();
                }
            }
            (x0, x1, y0, y1)
        })
        .collect();
    let bbox_overlap = |a: usize, b: usize| -> bool {
        let (ax0, ax1, ay0, ay1) = &bboxes[a];
        let (bx0, bx1, by0, by1) = &bboxes[b];
        ax0 <= bx1 && bx0 <= ax1 && ay0 <= by1 && by0 <= ay1
    };

    let is_center = {
        let mut v = alloc::vec![false; work.len()];
        for &c in &centers {
            v[c] = true;
        }
        v
    };
    let mut stars: BTreeMap<usize, Vec<usize>> = centers.iter().map(|&c| (c, Vec::new())).collect();
    for pj in 0..work.len() {
        if is_center[pj] {
            continue;
        }
        for &pi in &centers {
            if bbox_overlap(pi, pj) && trapezoids_intersect(&vds[pi], &vds[pj]) {
                stars.get_mut(&pi).unwrap().push(pj);
                break;
            }
        }
    }
    let stars: Vec<Star> =
        stars.into_iter().map(|(center, leaves)| Star { center, leaves }).collect();

    // Parts by representative side membership.
    let mut in_star = alloc::vec![false; work.len()];
    for s in &stars {
        in_star[s.center] = true;
        for &l in &s.leaves {
            in_star[l] = true;
        }
    }
    let mut rep_side_of = alloc::vec![usize::MAX; work.len()];
    for (sid, role) in aux.roles.iter().enumerate() {
        if let SegmentRole::Side { polygon, representative: true } = role {
            rep_side_of[*polygon] = sid;
        }
    }
    let in_a: BTreeSet<usize> = segment_separator.part_a.iter().copied().collect();
    let in_b: BTreeSet<usize> = segment_separator.part_b.iter().copied().collect();
    let mut part_a = Vec::new();
    let mut part_b = Vec::new();
    for p in 0..work.len() {
        if in_star[p] {
            continue;
        }
        let rep = rep_side_of[p];
        if in_a.contains(&rep) {
            part_a.push(p);
        } else if in_b.contains(&rep) {
            part_b.push(p);
        } else {
            return Err(PolygonError::InconsistentLift(p));
        }
    }

    Ok(PolygonPipelineOutput {
        aux,
        segment_separator,
        separator: StarSeparator { stars, part_a, part_b },
    })
}

/// Trapezoid-level intersection: edges crossing, or a corner of one inside
/// the other, in either direction.
fn trapezoids_intersect(a: &[PolyTrapezoid], b: &[PolyTrapezoid]) -> bool {
    for ta in a {
        for tb in b {
            if ta.x_lo > tb.x_hi || tb.x_lo > ta.x_hi {
                continue;
            }
            if trapezoid_pair_intersect(ta, tb) {
                return true;
            }
        }
    }
    false
}

fn trapezoid_pair_intersect(a: &PolyTrapezoid, b: &PolyTrapezoid) -> bool {
    let edges = |t: &PolyTrapezoid| -> Vec<(Point, Point)> {
        let c = t.corners();
        let mut out = Vec::new();
        for i in 0..4 {
            let (p, q) = (c[i].clone(), c[(i + 1) % 4].clone());
            if p != q {
                out.push((p, q));
            }
        }
        out
    };
    let ea = edges(a);
    let eb = edges(b);
    for (p1, q1) in &ea {
        for (p2, q2) in &eb {
            if crate::geom::points_segments_intersect(p1, q1, p2, q2) {
                return true;
            }
        }
    }
    a.corners().iter().any(|c| b.contains(c)) || b.corners().iter().any(|c| a.contains(c))
}

// ---------------------------------------------------------------------------
// Degenerate-input path: d_min and inflation.

/// Exact l-infinity distance from a point to a closed segment.
pub fn linf_point_segment(p: &Point, a: &Point, b: &Point) -> Coord {
    let v = (&b.x - &a.x, &b.y - &a.y);
    let u = (&p.x - &a.x, &p.y - &a.y);
    let eval = |t: &Coord| -> Coord {
        let dx = &u.0 - t * &v.0;
        let dy = &u.1 - t * &v.1;
        let (adx, ady) = (crate::coord::rabs(&dx), crate::coord::rabs(&dy));
        if adx >= ady {
            adx
        } else {
            ady
        }
    };
    let clamp = |t: Coord| -> Coord {
        if t < zero() {
            zero()
        } else if t > crate::coord::one() {
            crate::coord::one()
        } else {
            t
        }
    };
    let mut candidates = alloc::vec![zero(), crate::coord::one()];
    let denom_minus = &v.0 - &v.1;
    if !denom_minus.is_zero() {
        candidates.push(clamp((&u.0 - &u.1) / &denom_minus));
    }
    let denom_plus = &v.0 + &v.1;
    if !denom_plus.is_zero() {
        candidates.push(clamp((&u.0 + &u.1) / &denom_plus));
    }
    if !v.0.is_zero() {
        candidates.push(clamp(&u.0 / &v.0));
    }
    if !v.1.is_zero() {
        candidates.push(clamp(&u.1 / &v.1));
    }
    let mut best = eval(&candidates[0]);
    for t in &candidates[1..] {
        let d = eval(t);
        if d < best {
            best = d;
        }
    }
    best
}

/// Smallest l-infinity distance between two non-intersecting segments; None
/// when every pair intersects. Candidates are pruned per orientation class
/// by scanning line offsets outward from each endpoint; the O(n^2) oracle in
/// the tests cross-checks the result.
pub fn compute_d_min(segments: &[Segment]) -> Option<Coord> {
    let n = segments.len();
    if n < 2 {
        return None;
    }
    // Group segment indices by direction.
    let mut classes: BTreeMap<Direction, Vec<usize>> = BTreeMap::new();
    for (i, s) in segments.iter().enumerate() {
        let d = Direction::of(&s.p, &s.q).expect("positive-length segment");
        classes.entry(d).or_default().push(i);
    }
    let mut best: Option<Coord> = None;
    for (dir, members) in &classes {
        // Offset of each member segment's line, and the l-infinity scale of
        // the normal (dual l1 norm) for the line-distance lower bound.
        let nx = crd(-dir.dy);
        let ny = crd(dir.dx);
        let scale = crate::coord::rabs(&nx) + crate::coord::rabs(&ny);
        let mut offsets: Vec<(Coord, usize)> = members
            .iter()
            .map(|&i| {
                let s = &segments[i];
                (&nx * &s.p.x + &ny * &s.p.y, i)
            })
            .collect();
        offsets.sort_by(|l, r| l.0.cmp(&r.0).then_with(|| l.1.cmp(&r.1)));

        for (pi, p_seg) in segments.iter().enumerate() {
            for pt in [&p_seg.p, &p_seg.q] {
                let o_p = &nx * &pt.x + &ny * &pt.y;
                let start = offsets.partition_point(|(o, _)| *o < o_p);
                // Expand outwards until the line bound exceeds the best.
                let mut lo = start as isize - 1;
                let mut hi = start;
                loop {
                    let take_hi = match (lo >= 0, hi < offsets.len()) {
                        (false, false) => break,
                        (false, true) => true,
                        (true, false) => false,
                        (true, true) => {
                            let dl = crate::coord::rabs(&(&offsets[lo as usize].0 - &o_p));
                            let dh = crate::coord::rabs(&(&offsets[hi].0 - &o_p));
                            dh <= dl
                        }
                    };
                    let idx = if take_hi { hi } else { lo as usize };
                    let line_bound =
                        crate::coord::rabs(&(&offsets[idx].0 - &o_p)) / &scale;
                    if best.as_ref().map_or(false, |b| line_bound >= *b) {
                        break;
                    }
                    let si = offsets[idx].1;
                    if si != pi {
                        let s = &segments[si];
                        if !crate::geom::segments_intersect(p_seg, s) {
                            let d = linf_point_segment(pt, &s.p, &s.q);
                            if best.as_ref().map_or(true, |b| d < *b) {
                                best = Some(d);
                            }
                        }
                    }
                    if take_hi {
                        hi += 1;
                    } else {
                        lo -= 1;
                    }
                }
            }
        }
    }
    best
}

/// Inflates every segment into the l-infinity ball of radius eps_i around
/// it: eps_i = (d_min / 2) * (i + 1) / (2n + 2), all distinct and below
/// d_min / 2, so the intersection graph is preserved exactly.
pub fn inflate_segments(inst: &ColoredSegmentInstance) -> Vec<Polygon> {
    let n = inst.n();
    let base = match compute_d_min(&inst.segments) {
        Some(d) => half(&d),
        None => crate::coord::one(),
    };
    let mut out = Vec::with_capacity(n);
    for (i, s) in inst.segments.iter().enumerate() {
        let eps = &base * frac((i + 1) as i64, (2 * n + 2) as i64);
        let mut pts = Vec::with_capacity(8);
        for corner in [
            (eps.clone(), eps.clone()),
            (-eps.clone(), eps.clone()),
            (-eps.clone(), -eps.clone()),
            (eps.clone(), -eps.clone()),
        ] {
            for base_pt in [&s.p, &s.q] {
                pts.push(Point::new(&base_pt.x + &corner.0, &base_pt.y + &corner.1));
            }
        }
        out.push(Polygon {
            id: s.id,
            outer: convex_hull(pts),
            holes: Vec::new(),
            weight: s.weight.clone(),
        });
    }
    out
}

/// Monotone-chain hull, CCW, collinear points dropped.
fn convex_hull(mut pts: Vec<Point>) -> Vec<Point> {
    pts.sort_by(|a, b| a.x.cmp(&b.x).then_with(|| a.y.cmp(&b.y)));
    pts.dedup();
    if pts.len() <= 2 {
        return pts;
    }
    let mut hull: Vec<Point> = Vec::with_capacity(pts.len() * 2);
    for pass in 0..2 {
        let start = hull.len();
        let iter: Vec<&Point> = if pass == 0 {
            pts.iter().collect()
        } else {
            pts.iter().rev().collect()
        };
        for p in iter {
            while hull.len() >= start + 2
                && orient(&hull[hull.len() - 2], &hull[hull.len() - 1], p) <= 0
            {
                hull.pop();
            }
            hull.push(p.clone());
        }
        hull.pop();
    }
    hull
}
