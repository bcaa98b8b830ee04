//! Exact geometric primitives and the segment instance model.
//!
//! Input coordinates are integers (the file format enforces this), so every
//! derived point is a rational with bounded factors. Predicates take an i128
//! fast path when all coordinates are small integers and fall back to full
//! rational arithmetic otherwise; both routes are exact.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use num_integer::Integer;
use num_traits::Zero;

use crate::coord::{self, crd, sign, to_fast_i64, Coord};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Point {
    pub x: Coord,
    pub y: Coord,
}

impl Point {
    pub fn new(x: Coord, y: Coord) -> Self {
        Point { x, y }
    }

    pub fn int(x: i64, y: i64) -> Self {
        Point { x: crd(x), y: crd(y) }
    }

    fn as_fast(&self) -> Option<(i64, i64)> {
        Some((to_fast_i64(&self.x)?, to_fast_i64(&self.y)?))
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", coord::coord_to_string(&self.x), coord::coord_to_string(&self.y))
    }
}

/// A normalized orientation: gcd(|dx|,|dy|) = 1 and (dx > 0) or (dx = 0, dy > 0),
/// so parallel segments share one `Direction` value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Direction {
    pub dx: i64,
    pub dy: i64,
}

impl Direction {
    pub fn new(dx: i64, dy: i64) -> Result<Self, GeomError> {
        if dx == 0 && dy == 0 {
            return Err(GeomError::ZeroDirection);
        }
        let g = dx.abs().gcd(&dy.abs());
        let (mut dx, mut dy) = (dx / g, dy / g);
        if dx < 0 || (dx == 0 && dy < 0) {
            dx = -dx;
            dy = -dy;
        }
        Ok(Direction { dx, dy })
    }

    /// Direction of the vector q - p. Fails on p == q.
    pub fn of(p: &Point, q: &Point) -> Result<Self, GeomError> {
        let dx = &q.x - &p.x;
        let dy = &q.y - &p.y;
        if dx.is_zero() && dy.is_zero() {
            return Err(GeomError::ZeroDirection);
        }
        // Cross-multiply to an integer vector, then normalize. Directions in
        // practice come from i64 inputs, so the reduced vector fits i64.
        let a = dx.numer() * dy.denom();
        let b = dy.numer() * dx.denom();
        let g = a.gcd(&b);
        let (a, b) = if g.is_zero() { (a, b) } else { (a / &g, b / &g) };
        use num_traits::ToPrimitive;
        let dx = a.to_i64().ok_or(GeomError::DirectionOverflow)?;
        let dy = b.to_i64().ok_or(GeomError::DirectionOverflow)?;
        Direction::new(dx, dy)
    }

    pub fn is_vertical(&self) -> bool {
        self.dx == 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeomError {
    ZeroDirection,
    DirectionOverflow,
    ColorOutOfRange,
    DirectionMismatch,
    NonContiguousIds,
}

impl fmt::Display for GeomError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeomError::ZeroDirection => write!(f, "zero-length segment or zero direction"),
            GeomError::DirectionOverflow => write!(f, "direction components exceed i64"),
            GeomError::ColorOutOfRange => write!(f, "segment color exceeds the color count"),
            GeomError::DirectionMismatch => {
                write!(f, "segment direction does not match its color class")
            }
            GeomError::NonContiguousIds => {
                write!(f, "segment ids must be 0..n-1 in order")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segment {
    pub id: usize,
    pub p: Point,
    pub q: Point,
    pub color: usize,
    pub weight: Coord,
}

impl Segment {
    pub fn direction(&self) -> Result<Direction, GeomError> {
        Direction::of(&self.p, &self.q)
    }
}

/// n weighted segments partitioned into c orientation classes.
#[derive(Debug, Clone)]
pub struct ColoredSegmentInstance {
    pub segments: Vec<Segment>,
    pub colors: Vec<Direction>,
}

impl ColoredSegmentInstance {
    pub fn new(segments: Vec<Segment>, colors: Vec<Direction>) -> Result<Self, GeomError> {
        for (i, s) in segments.iter().enumerate() {
            if s.id != i {
                return Err(GeomError::NonContiguousIds);
            }
            if s.color >= colors.len() {
                return Err(GeomError::ColorOutOfRange);
            }
            if s.direction()? != colors[s.color] {
                return Err(GeomError::DirectionMismatch);
            }
        }
        Ok(ColoredSegmentInstance { segments, colors })
    }

    pub fn c(&self) -> usize {
        self.colors.len()
    }

    pub fn n(&self) -> usize {
        self.segments.len()
    }
}

/// Sign of the cross product (q - p) x (r - p), computed exactly.
pub fn orient(p: &Point, q: &Point, r: &Point) -> i8 {
    if let (Some((px, py)), Some((qx, qy)), Some((rx, ry))) =
        (p.as_fast(), q.as_fast(), r.as_fast())
    {
        let a = (qx - px) as i128 * (ry - py) as i128;
        let b = (qy - py) as i128 * (rx - px) as i128;
        return match a.cmp(&b) {
            Ordering::Greater => 1,
            Ordering::Less => -1,
            Ordering::Equal => 0,
        };
    }
    let a = (&q.x - &p.x) * (&r.y - &p.y);
    let b = (&q.y - &p.y) * (&r.x - &p.x);
    sign(&(a - b))
}

fn on_segment_collinear(p: &Point, a: &Point, b: &Point) -> bool {
    // Assumes p collinear with ab; checks p in [a, b] by bounding box.
    let (lo_x, hi_x) = if a.x <= b.x { (&a.x, &b.x) } else { (&b.x, &a.x) };
    let (lo_y, hi_y) = if a.y <= b.y { (&a.y, &b.y) } else { (&b.y, &a.y) };
    &p.x >= lo_x && &p.x <= hi_x && &p.y >= lo_y && &p.y <= hi_y
}

/// True if point `p` lies on the closed segment `ab`.
pub fn point_on_segment(p: &Point, a: &Point, b: &Point) -> bool {
    orient(a, b, p) == 0 && on_segment_collinear(p, a, b)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SegmentIntersection {
    Empty,
    Point(Point),
    Overlap(Point, Point),
}

/// Fast boolean form of `segment_intersection`: do the closed segments meet?
pub fn segments_intersect(a: &Segment, b: &Segment) -> bool {
    points_segments_intersect(&a.p, &a.q, &b.p, &b.q)
}

pub fn points_segments_intersect(p1: &Point, q1: &Point, p2: &Point, q2: &Point) -> bool {
    let d1 = orient(p2, q2, p1);
    let d2 = orient(p2, q2, q1);
    let d3 = orient(p1, q1, p2);
    let d4 = orient(p1, q1, q2);
    if ((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)) {
        return true;
    }
    (d1 == 0 && on_segment_collinear(p1, p2, q2))
        || (d2 == 0 && on_segment_collinear(q1, p2, q2))
        || (d3 == 0 && on_segment_collinear(p2, p1, q1))
        || (d4 == 0 && on_segment_collinear(q2, p1, q1))
}

/// Exact classification of the intersection of two closed segments.
pub fn segment_intersection(a: &Segment, b: &Segment) -> SegmentIntersection {
    intersect_points(&a.p, &a.q, &b.p, &b.q)
}

pub fn intersect_points(p1: &Point, q1: &Point, p2: &Point, q2: &Point) -> SegmentIntersection {
    let d1 = orient(p2, q2, p1);
    let d2 = orient(p2, q2, q1);
    let d3 = orient(p1, q1, p2);
    let d4 = orient(p1, q1, q2);

    if d1 == 0 && d2 == 0 {
        // Collinear (or second segment degenerate): overlap of two intervals.
        if d3 != 0 || d4 != 0 {
            return SegmentIntersection::Empty; // b not on a's line
        }
        let key = |p: &Point| (p.x.clone(), p.y.clone());
        let (mut a_lo, mut a_hi) = (p1.clone(), q1.clone());
        if key(&a_lo) > key(&a_hi) {
            core::mem::swap(&mut a_lo, &mut a_hi);
        }
        let (mut b_lo, mut b_hi) = (p2.clone(), q2.clone());
        if key(&b_lo) > key(&b_hi) {
            core::mem::swap(&mut b_lo, &mut b_hi);
        }
        let lo = if key(&a_lo) >= key(&b_lo) { a_lo } else { b_lo };
        let hi = if key(&a_hi) <= key(&b_hi) { a_hi } else { b_hi };
        return match key(&lo).cmp(&key(&hi)) {
            Ordering::Greater => SegmentIntersection::Empty,
            Ordering::Equal => SegmentIntersection::Point(lo),
            Ordering::Less => SegmentIntersection::Overlap(lo, hi),
        };
    }

    if !points_segments_intersect(p1, q1, p2, q2) {
        return SegmentIntersection::Empty;
    }

    // Proper or touching intersection of non-parallel supports: solve exactly.
    let r = (&q1.x - &p1.x, &q1.y - &p1.y);
    let s = (&q2.x - &p2.x, &q2.y - &p2.y);
    let denom = &r.0 * &s.1 - &r.1 * &s.0;
    if denom.is_zero() {
        // Parallel but not collinear, touching is impossible here.
        return SegmentIntersection::Empty;
    }
    let t = ((&p2.x - &p1.x) * &s.1 - (&p2.y - &p1.y) * &s.0) / &denom;
    let x = &p1.x + &t * &r.0;
    let y = &p1.y + &t * &r.1;
    SegmentIntersection::Point(Point::new(x, y))
}

/// Cached integer coordinates for hot pairwise intersection tests: one
/// extraction per segment instead of one per predicate call. Segments whose
/// coordinates fall outside the fast range go through the exact path.
pub struct FastPairs {
    coords: Vec<Option<[i64; 4]>>,
    bbox: Vec<Option<[i64; 4]>>,
}

impl FastPairs {
    pub fn new(inst: &ColoredSegmentInstance) -> Self {
        let coords: Vec<Option<[i64; 4]>> = inst
            .segments
            .iter()
            .map(|s| {
                Some([
                    to_fast_i64(&s.p.x)?,
                    to_fast_i64(&s.p.y)?,
                    to_fast_i64(&s.q.x)?,
                    to_fast_i64(&s.q.y)?,
                ])
            })
            .collect();
        let bbox = coords
            .iter()
            .map(|c| {
                c.map(|[px, py, qx, qy]| {
                    [px.min(qx), px.max(qx), py.min(qy), py.max(qy)]
                })
            })
            .collect();
        FastPairs { coords, bbox }
    }

    pub fn intersects(&self, inst: &ColoredSegmentInstance, u: usize, v: usize) -> bool {
        if let (Some(a), Some(b), Some(ba), Some(bb)) =
            (&self.coords[u], &self.coords[v], &self.bbox[u], &self.bbox[v])
        {
            if ba[0] > bb[1] || bb[0] > ba[1] || ba[2] > bb[3] || bb[2] > ba[3] {
                return false;
            }
            return fast_segments_intersect(a, b);
        }
        segments_intersect(&inst.segments[u], &inst.segments[v])
    }
}

pub fn fast_orient(px: i64, py: i64, qx: i64, qy: i64, rx: i64, ry: i64) -> i8 {
    let a = (qx - px) as i128 * (ry - py) as i128;
    let b = (qy - py) as i128 * (rx - px) as i128;
    match a.cmp(&b) {
        Ordering::Greater => 1,
        Ordering::Less => -1,
        Ordering::Equal => 0,
    }
}

fn fast_on_collinear(px: i64, py: i64, a: &[i64; 4]) -> bool {
    px >= a[0].min(a[2])
        && px <= a[0].max(a[2])
        && py >= a[1].min(a[3])
        && py <= a[1].max(a[3])
}

pub fn fast_segments_intersect(a: &[i64; 4], b: &[i64; 4]) -> bool {
    let d1 = fast_orient(b[0], b[1], b[2], b[3], a[0], a[1]);
    let d2 = fast_orient(b[0], b[1], b[2], b[3], a[2], a[3]);
    let d3 = fast_orient(a[0], a[1], a[2], a[3], b[0], b[1]);
    let d4 = fast_orient(a[0], a[1], a[2], a[3], b[2], b[3]);
    if ((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)) {
        return true;
    }
    (d1 == 0 && fast_on_collinear(a[0], a[1], b))
        || (d2 == 0 && fast_on_collinear(a[2], a[3], b))
        || (d3 == 0 && fast_on_collinear(b[0], b[1], a))
        || (d4 == 0 && fast_on_collinear(b[2], b[3], a))
}

/// Point-on-closed-segment over raw integers.
pub fn fast_point_on_segment(px: i64, py: i64, s: &[i64; 4]) -> bool {
    fast_orient(s[0], s[1], s[2], s[3], px, py) == 0 && fast_on_collinear(px, py, s)
}

/// The exact linear map M = [[dx, dy], [-dy, dx]] that makes the given color
/// class horizontal, together with its inverse. Incidences and crossings are
/// preserved exactly (the map is an invertible similarity up to scale).
#[derive(Debug, Clone)]
pub struct FrameMap {
    dx: i64,
    dy: i64,
}

impl FrameMap {
    pub fn for_direction(d: Direction) -> Self {
        FrameMap { dx: d.dx, dy: d.dy }
    }

    pub fn identity() -> Self {
        FrameMap { dx: 1, dy: 0 }
    }

    pub fn is_identity(&self) -> bool {
        self.dx == 1 && self.dy == 0
    }

    pub fn apply(&self, p: &Point) -> Point {
        if self.is_identity() {
            return p.clone();
        }
        let x = crd(self.dx) * &p.x + crd(self.dy) * &p.y;
        let y = crd(-self.dy) * &p.x + crd(self.dx) * &p.y;
        Point::new(x, y)
    }

    pub fn invert(&self, p: &Point) -> Point {
        if self.is_identity() {
            return p.clone();
        }
        let det = crd(self.dx * self.dx + self.dy * self.dy);
        let x = (crd(self.dx) * &p.x - crd(self.dy) * &p.y) / &det;
        let y = (crd(self.dy) * &p.x + crd(self.dx) * &p.y) / &det;
        Point::new(x, y)
    }
}

/// Maps the whole instance so that class `color` becomes horizontal.
pub fn rotate_frame(
    inst: &ColoredSegmentInstance,
    color: usize,
) -> Result<(FrameMap, ColoredSegmentInstance), GeomError> {
    if color >= inst.c() {
        return Err(GeomError::ColorOutOfRange);
    }
    let map = FrameMap::for_direction(inst.colors[color]);
    let segments = inst
        .segments
        .iter()
        .map(|s| Segment {
            id: s.id,
            p: map.apply(&s.p),
            q: map.apply(&s.q),
            color: s.color,
            weight: s.weight.clone(),
        })
        .collect::<Vec<_>>();
    let colors = inst
        .colors
        .iter()
        .map(|d| {
            Direction::new(
                map.dx * d.dx + map.dy * d.dy,
                -map.dy * d.dx + map.dx * d.dy,
            )
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok((map, ColoredSegmentInstance { segments, colors }))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// Two segments of the same color intersect.
    SameColorIntersection(usize, usize),
    /// Two collinear segments overlap in a sub-segment.
    Overlap(usize, usize),
    /// An endpoint of one segment lies on another segment.
    EndpointOnSegment { endpoint_of: usize, on: usize },
    /// Three segments pass through a common point.
    TriplePoint(usize, usize, usize),
    ZeroLength(usize),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::SameColorIntersection(a, b) => {
                write!(f, "segments {a} and {b} share a color and intersect")
            }
            Violation::Overlap(a, b) => write!(f, "segments {a} and {b} overlap"),
            Violation::EndpointOnSegment { endpoint_of, on } => {
                write!(f, "an endpoint of segment {endpoint_of} lies on segment {on}")
            }
            Violation::TriplePoint(a, b, c) => {
                write!(f, "segments {a}, {b} and {c} pass through one point")
            }
            Violation::ZeroLength(a) => write!(f, "segment {a} has zero length"),
        }
    }
}

/// Sweep-order coincidences that are handled deterministically rather than
/// rejected: two endpoints of different segments sharing a sweep coordinate
/// in some color frame.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TieNote {
    pub color_frame: usize,
    pub seg_a: usize,
    pub seg_b: usize,
    pub axis: char,
}

#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    pub ties: Vec<TieNote>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn describe(&self) -> String {
        let mut out = String::new();
        for v in &self.violations {
            out.push_str(&format!("violation: {v}\n"));
        }
        for t in &self.ties {
            out.push_str(&format!(
                "tie: frame {} axis {} segments {} {}\n",
                t.color_frame, t.axis, t.seg_a, t.seg_b
            ));
        }
        out
    }
}

/// Checks the general-position assumptions: same-color disjointness, no
/// overlaps, no endpoint on another segment, no three segments through a
/// point. Coordinate ties relevant to the sweeps are reported as notes.
pub fn validate_general_position(inst: &ColoredSegmentInstance) -> ValidationReport {
    let mut report = ValidationReport::default();
    let segs = &inst.segments;
    for s in segs {
        if s.p == s.q {
            report.violations.push(Violation::ZeroLength(s.id));
        }
    }

    // Pairwise checks; crossing points collected for the triple-point scan.
    let mut crossings: Vec<(Point, usize, usize)> = Vec::new();
    for i in 0..segs.len() {
        for j in (i + 1)..segs.len() {
            let (a, b) = (&segs[i], &segs[j]);
            match intersect_points(&a.p, &a.q, &b.p, &b.q) {
                SegmentIntersection::Empty => {}
                SegmentIntersection::Overlap(_, _) => {
                    report.violations.push(Violation::Overlap(a.id, b.id));
                    if a.color == b.color {
                        report.violations.push(Violation::SameColorIntersection(a.id, b.id));
                    }
                }
                SegmentIntersection::Point(p) => {
                    if a.color == b.color {
                        report.violations.push(Violation::SameColorIntersection(a.id, b.id));
                    }
                    if p == a.p || p == a.q {
                        report
                            .violations
                            .push(Violation::EndpointOnSegment { endpoint_of: a.id, on: b.id });
                    } else if p == b.p || p == b.q {
                        report
                            .violations
                            .push(Violation::EndpointOnSegment { endpoint_of: b.id, on: a.id });
                    } else {
                        crossings.push((p, a.id, b.id));
                    }
                }
            }
        }
    }

    crossings.sort_by(|l, r| (&l.0, l.1, l.2).cmp(&(&r.0, r.1, r.2)));
    for w in crossings.windows(2) {
        if w[0].0 == w[1].0 {
            let mut ids = [w[0].1, w[0].2, w[1].1, w[1].2];
            ids.sort_unstable();
            report.violations.push(Violation::TriplePoint(ids[0], ids[1], ids[3]));
        }
    }

    // Sweep-coordinate ties, per color frame, between endpoints of distinct
    // segments. Same-segment pairs are inherent (e.g. a vertical segment in a
    // horizontal frame) and not worth noting.
    for color in 0..inst.c() {
        let Ok((_, mapped)) = rotate_frame(inst, color) else { continue };
        let mut xs: Vec<(Coord, usize)> = Vec::new();
        let mut ys: Vec<(Coord, usize)> = Vec::new();
        for s in &mapped.segments {
            xs.push((s.p.x.clone(), s.id));
            xs.push((s.q.x.clone(), s.id));
            ys.push((s.p.y.clone(), s.id));
            ys.push((s.q.y.clone(), s.id));
        }
        for (list, axis) in [(&mut xs, 'x'), (&mut ys, 'y')] {
            list.sort_by(|l, r| (&l.0, l.1).cmp(&(&r.0, r.1)));
            for w in list.windows(2) {
                if w[0].0 == w[1].0 && w[0].1 != w[1].1 {
                    report.ties.push(TieNote {
                        color_frame: color,
                        seg_a: w[0].1,
                        seg_b: w[1].1,
                        axis,
                    });
                }
            }
        }
    }

    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coord::one;

    fn seg(id: usize, p: (i64, i64), q: (i64, i64), color: usize) -> Segment {
        Segment { id, p: Point::int(p.0, p.1), q: Point::int(q.0, q.1), color, weight: one() }
    }

    pub(crate) fn cross2() -> ColoredSegmentInstance {
        ColoredSegmentInstance::new(
            alloc::vec![seg(0, (0, 0), (4, 0), 0), seg(1, (2, -1), (2, 1), 1)],
            alloc::vec![Direction::new(1, 0).unwrap(), Direction::new(0, 1).unwrap()],
        )
        .unwrap()
    }

    #[test]
    fn orient_examples() {
        assert_eq!(orient(&Point::int(0, 0), &Point::int(1, 0), &Point::int(0, 1)), 1);
        assert_eq!(orient(&Point::int(0, 0), &Point::int(1, 1), &Point::int(2, 2)), 0);
        assert_eq!(orient(&Point::int(0, 0), &Point::int(1, 0), &Point::int(1, -1)), -1);
    }

    #[test]
    fn orient_antisymmetric_and_translation_invariant() {
        let p = Point::int(3, 7);
        let q = Point::int(-2, 5);
        let r = Point::int(10, -4);
        assert_eq!(orient(&p, &q, &r), -orient(&p, &r, &q));
        let t = |pt: &Point| Point::new(&pt.x + crd(11), &pt.y - crd(13));
        assert_eq!(orient(&p, &q, &r), orient(&t(&p), &t(&q), &t(&r)));
    }

    #[test]
    fn orient_big_coordinates_fall_back() {
        // Beyond the fast-path budget: exercised via the rational route.
        let big = 1i64 << 61;
        let p = Point::int(0, 0);
        let q = Point::int(big, 1);
        let r = Point::int(big, 2);
        assert_eq!(orient(&p, &q, &r), 1);
    }

    #[test]
    fn intersection_examples() {
        let a = seg(0, (0, 0), (4, 0), 0);
        let b = seg(1, (2, -1), (2, 1), 1);
        assert_eq!(segment_intersection(&a, &b), SegmentIntersection::Point(Point::int(2, 0)));

        let c = seg(2, (0, 1), (4, 1), 0);
        assert_eq!(segment_intersection(&a, &c), SegmentIntersection::Empty);

        let d = seg(3, (1, 0), (6, 0), 0);
        assert_eq!(
            segment_intersection(&a, &d),
            SegmentIntersection::Overlap(Point::int(1, 0), Point::int(4, 0))
        );
    }

    #[test]
    fn intersection_symmetric() {
        let a = seg(0, (0, 0), (4, 2), 0);
        let b = seg(1, (0, 2), (4, 0), 1);
        assert_eq!(segment_intersection(&a, &b), segment_intersection(&b, &a));
        assert_eq!(segment_intersection(&a, &b), SegmentIntersection::Point(Point::int(2, 1)));
    }

    #[test]
    fn validate_cross2_clean() {
        let report = validate_general_position(&cross2());
        assert!(report.is_clean(), "{}", report.describe());
        assert!(report.ties.is_empty());
    }

    #[test]
    fn validate_overlap_flagged() {
        let inst = ColoredSegmentInstance::new(
            alloc::vec![seg(0, (0, 0), (4, 0), 0), seg(1, (1, 0), (6, 0), 0)],
            alloc::vec![Direction::new(1, 0).unwrap()],
        )
        .unwrap();
        let report = validate_general_position(&inst);
        assert!(report.violations.contains(&Violation::Overlap(0, 1)));
    }

    #[test]
    fn validate_triple_point() {
        // Brute-force derivation: all three pairs cross at (0,0).
        let inst = ColoredSegmentInstance::new(
            alloc::vec![
                seg(0, (-2, 0), (2, 0), 0),
                seg(1, (0, -2), (0, 2), 1),
                seg(2, (-2, -2), (2, 2), 2),
            ],
            alloc::vec![
                Direction::new(1, 0).unwrap(),
                Direction::new(0, 1).unwrap(),
                Direction::new(1, 1).unwrap(),
            ],
        )
        .unwrap();
        let report = validate_general_position(&inst);
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::TriplePoint(0, 1, 2))));
    }

    #[test]
    fn rotate_frame_examples() {
        // Direction (1,0): identity.
        let inst = cross2();
        let (map, mapped) = rotate_frame(&inst, 0).unwrap();
        assert!(map.is_identity());
        assert_eq!(mapped.segments[0].p, Point::int(0, 0));

        // Direction (0,1): (2,5) -> (5,-2).
        let m = FrameMap::for_direction(Direction::new(0, 1).unwrap());
        assert_eq!(m.apply(&Point::int(2, 5)), Point::int(5, -2));
        assert_eq!(m.invert(&m.apply(&Point::int(2, 5))), Point::int(2, 5));

        // Direction (1,1): (0,0)-(1,1) maps to (0,0)-(2,0).
        let m = FrameMap::for_direction(Direction::new(1, 1).unwrap());
        assert_eq!(m.apply(&Point::int(1, 1)), Point::int(2, 0));
    }

    #[test]
    fn rotate_frame_preserves_intersections() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let dirs = [
            Direction::new(1, 0).unwrap(),
            Direction::new(0, 1).unwrap(),
            Direction::new(1, 1).unwrap(),
        ];
        for _ in 0..20 {
            let mut segs = Vec::new();
            for id in 0..30usize {
                let color = rng.gen_range(0..3);
                let d = dirs[color];
                let x = rng.gen_range(-50..50i64);
                let y = rng.gen_range(-50..50i64);
                let m = rng.gen_range(1..10i64);
                segs.push(Segment {
                    id,
                    p: Point::int(x, y),
                    q: Point::int(x + d.dx * m, y + d.dy * m),
                    color,
                    weight: one(),
                });
            }
            let inst = ColoredSegmentInstance::new(segs, dirs.to_vec()).unwrap();
            for color in 0..3 {
                let (_, mapped) = rotate_frame(&inst, color).unwrap();
                for i in 0..inst.n() {
                    for j in (i + 1)..inst.n() {
                        let before = segment_intersection(&inst.segments[i], &inst.segments[j]);
                        let after =
                            segment_intersection(&mapped.segments[i], &mapped.segments[j]);
                        let class = |si: &SegmentIntersection| match si {
                            SegmentIntersection::Empty => 0,
                            SegmentIntersection::Point(_) => 1,
                            SegmentIntersection::Overlap(_, _) => 2,
                        };
                        assert_eq!(class(&before), class(&after));
                    }
                }
            }
        }
    }
}
