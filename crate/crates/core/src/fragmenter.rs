//! Partitioning segments into fragments and selecting the active ones.
//!
//! Colors are processed in order. The first class becomes whole active end
//! fragments. For every later class the plane is decomposed by horizontal
//! extensions from the endpoints of everything seen so far (walls = earlier
//! active fragments, plus the remaining segment endpoints as zero-length
//! elements), and a top-to-bottom sweep activates one crossing piece per
//! bounded trapezoid: the first segment that fully crosses a trapezoid claims
//! it and the trapezoid is retired. Every other piece crossing the same
//! trapezoid stays inactive and records its active equivalent.
//!
//! Inputs that touch without crossing (polygon sides sharing a vertex,
//! auxiliary vertical segments ending on a side) are tolerated: touches never
//! cut a segment, they only produce contact bookkeeping, and a piece whose
//! span is interrupted by a touching wall is activated unconditionally.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use num_traits::Zero;

use crate::coord::{zero, Coord};
use crate::geom::{orient, ColoredSegmentInstance, FrameMap, GeomError, Point};
use crate::sweep::{Handle, SweepTree};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FragmentKind {
    End,
    Internal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FragmentStatus {
    Active,
    Inactive,
}

#[derive(Debug, Clone)]
pub struct Fragment {
    pub id: usize,
    pub segment_id: usize,
    pub color: usize,
    /// Sub-interval endpoints in original coordinates, ordered from the
    /// segment's `p` endpoint towards `q`.
    pub p: Point,
    pub q: Point,
    pub kind: FragmentKind,
    pub status: FragmentStatus,
    /// For internal fragments: the two active fragments the piece connects,
    /// as a canonical (min, max) id pair.
    pub connects: Option<(usize, usize)>,
    /// For inactive fragments: the active fragment claiming their trapezoid.
    pub equivalent_active: Option<usize>,
    /// Active fragment the `p` endpoint lies on (None: a segment endpoint).
    pub p_contact: Option<usize>,
    pub q_contact: Option<usize>,
}

impl Fragment {
    pub fn is_active(&self) -> bool {
        self.status == FragmentStatus::Active
    }
}

#[derive(Debug, Clone)]
pub struct FragmentSet {
    pub fragments: Vec<Fragment>,
    /// Active fragment ids per color (F_1..F_c).
    pub active_by_color: Vec<Vec<usize>>,
    pub inactive_by_color: Vec<Vec<usize>>,
    /// Representative end fragment per segment, set by `pick_representatives`.
    pub representative: Vec<Option<usize>>,
    /// Per-fragment weight, set by `pick_representatives` (zero before).
    pub weight: Vec<Coord>,
    /// Contact pairs from touching (non-crossing) incidences.
    pub touch_contacts: Vec<(usize, usize)>,
    pub touch_count: usize,
    pub n_segments: usize,
}

impl FragmentSet {
    pub fn active_ids(&self) -> impl Iterator<Item = usize> + '_ {
        self.fragments.iter().filter(|f| f.is_active()).map(|f| f.id)
    }

    pub fn active_count(&self) -> usize {
        self.fragments.iter().filter(|f| f.is_active()).count()
    }

    pub fn end_fragments_of(&self, segment_id: usize) -> impl Iterator<Item = &Fragment> + '_ {
        self.fragments
            .iter()
            .filter(move |f| f.segment_id == segment_id && f.kind == FragmentKind::End)
    }
}

/// A wall or zero-length point in the horizontal-decomposition input.
#[derive(Debug, Clone)]
pub struct HdElement {
    pub id: usize,
    pub p: Point,
    pub q: Point,
}

impl HdElement {
    pub fn is_point(&self) -> bool {
        self.p == self.q
    }
}

#[derive(Debug, Clone)]
pub struct Trapezoid {
    pub left: Option<usize>,
    pub right: Option<usize>,
    pub top: Option<Coord>,
    pub bottom: Option<Coord>,
}

impl Trapezoid {
    pub fn is_bounded(&self) -> bool {
        self.left.is_some() && self.right.is_some() && self.top.is_some() && self.bottom.is_some()
    }
}

#[derive(Debug, Clone)]
pub struct HorizontalDecomposition {
    pub trapezoids: Vec<Trapezoid>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FragmentError {
    CrossingInputs(usize, usize),
    HorizontalInput(usize),
    /// General position broke mid-sweep (e.g. two cuts at one point).
    DegenerateEvent(usize),
    MissingEndFragment(usize),
    ZeroTotalWeight,
    Geometry(GeomError),
}

impl fmt::Display for FragmentError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FragmentError::CrossingInputs(a, b) => {
                write!(f, "decomposition inputs {a} and {b} cross")
            }
            FragmentError::HorizontalInput(a) => {
                write!(f, "decomposition input {a} is horizontal in the sweep frame")
            }
            FragmentError::DegenerateEvent(s) => {
                write!(f, "degenerate event ordering at segment {s}; perturb the input")
            }
            FragmentError::MissingEndFragment(s) => {
                write!(f, "segment {s} has no end fragment")
            }
            FragmentError::ZeroTotalWeight => write!(f, "total weight is zero"),
            FragmentError::Geometry(e) => write!(f, "{e}"),
        }
    }
}

impl From<GeomError> for FragmentError {
    fn from(e: GeomError) -> Self {
        FragmentError::Geometry(e)
    }
}

// ---------------------------------------------------------------------------
// Sweep machinery shared by the public decomposition and the fragmenter.

#[derive(Debug, Clone)]
struct GapState {
    top: Option<Coord>,
    claimed: Option<usize>,
}

impl GapState {
    fn fresh(top: Option<Coord>) -> Self {
        GapState { top, claimed: None }
    }
}

#[derive(Debug)]
struct Wall {
    payload: usize,
    top: Point,
    bot: Point,
    /// x change per unit decrease in y.
    slope: Coord,
    /// State of the gap between this wall and its in-order predecessor.
    gap_left: GapState,
}

impl Wall {
    fn x_at(&self, y: &Coord) -> Coord {
        &self.top.x + (&self.top.y - y) * &self.slope
    }
}

struct HdSweep {
    tree: SweepTree<Wall>,
    rightmost: GapState,
    traps: Option<Vec<Trapezoid>>,
}

impl HdSweep {
    fn new(materialize: bool) -> Self {
        HdSweep {
            tree: SweepTree::new(),
            rightmost: GapState::fresh(None),
            traps: if materialize { Some(Vec::new()) } else { None },
        }
    }

    fn seal(
        &mut self,
        left: Option<Handle>,
        right: Option<Handle>,
        state: &GapState,
        bottom: Option<Coord>,
    ) {
        if self.traps.is_none() {
            return;
        }
        let l = left.map(|h| self.tree.get(h).payload);
        let r = right.map(|h| self.tree.get(h).payload);
        if let Some(traps) = self.traps.as_mut() {
            traps.push(Trapezoid { left: l, right: r, top: state.top.clone(), bottom });
        }
    }

    fn gap_right_of(&self, h: Option<Handle>) -> Option<Handle> {
        // Successor wall of the gap to the right of `h` (None = leftmost gap).
        match h {
            Some(h) => self.tree.successor(h),
            None => self.tree.min(),
        }
    }

    fn gap_state(&self, succ: Option<Handle>) -> &GapState {
        match succ {
            Some(h) => &self.tree.get(h).gap_left,
            None => &self.rightmost,
        }
    }

    fn set_gap_state(&mut self, succ: Option<Handle>, state: GapState) {
        match succ {
            Some(h) => self.tree.get_mut(h).gap_left = state,
            None => self.rightmost = state,
        }
    }

    fn insert_wall(&mut self, payload: usize, top: Point, bot: Point, y: &Coord) -> Handle {
        debug_assert!(top.y > bot.y);
        let slope = (&bot.x - &top.x) / (&top.y - &bot.y);
        let wall = Wall { payload, top, bot, slope, gap_left: GapState::fresh(Some(y.clone())) };
        let h = self.tree.insert_by(wall, |new, old| {
            let xn = new.top.x.clone();
            let xo = old.x_at(&new.top.y);
            match xn.cmp(&xo) {
                Ordering::Equal => match new.slope.cmp(&old.slope) {
                    // Larger slope drifts right as the sweep moves down.
                    Ordering::Equal => Ordering::Greater,
                    o => o,
                },
                o => o,
            }
        });
        let pred = self.tree.predecessor(h);
        let succ = self.tree.successor(h);
        // The old gap (pred, succ) got split by this wall.
        let old = self.gap_state(succ).clone();
        self.seal(pred, succ, &old, Some(y.clone()));
        self.set_gap_state(succ, GapState::fresh(Some(y.clone())));
        self.tree.get_mut(h).gap_left = GapState::fresh(Some(y.clone()));
        h
    }

    fn remove_wall(&mut self, h: Handle, y: &Coord) {
        let pred = self.tree.predecessor(h);
        let succ = self.tree.successor(h);
        let left_state = self.tree.get(h).gap_left.clone();
        self.seal(pred, Some(h), &left_state, Some(y.clone()));
        let right_state = self.gap_state(succ).clone();
        self.seal(Some(h), succ, &right_state, Some(y.clone()));
        self.tree.remove(h);
        self.set_gap_state(succ, GapState::fresh(Some(y.clone())));
    }

    fn point_event(&mut self, x: &Coord, y: &Coord) {
        // Strictly-left rule: walls passing exactly through the point count
        // as right neighbors; either assignment is valid for touch cases.
        let pred = self.tree.last_where(|w| w.x_at(y) < *x);
        let succ = self.gap_right_of(pred);
        let old = self.gap_state(succ).clone();
        self.seal(pred, succ, &old, Some(y.clone()));
        self.set_gap_state(succ, GapState::fresh(Some(y.clone())));
    }

    fn finish(&mut self) {
        debug_assert!(self.tree.is_empty());
        let state = self.rightmost.clone();
        self.seal(None, None, &state, None);
    }
}

fn properly_cross(p1: &Point, q1: &Point, p2: &Point, q2: &Point) -> bool {
    let d1 = orient(p2, q2, p1);
    let d2 = orient(p2, q2, q1);
    let d3 = orient(p1, q1, p2);
    let d4 = orient(p1, q1, q2);
    ((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum EventKind {
    // Deaths run first in a same-y batch: a newborn wall must never be
    // compared against a collinear twin that ends at the same point, or the
    // tree order can contradict a third wall through that point. Segment
    // events still see the dying walls through the per-batch stash.
    Death = 0,
    Birth = 1,
    Point = 2,
    Segment = 3,
}

struct Event {
    y: Coord,
    x: Coord,
    kind: EventKind,
    id: usize,
}

fn sort_events(events: &mut [Event]) {
    // Kind outranks x so that walls born at the sweep height are visible to
    // segment events whose line they touch (the polygon path needs those
    // touch contacts); for validated segment inputs the orders agree.
    events.sort_by(|a, b| {
        b.y.cmp(&a.y)
            .then_with(|| a.kind.cmp(&b.kind))
            .then_with(|| a.x.cmp(&b.x))
            .then_with(|| a.id.cmp(&b.id))
    });
}

/// Trapezoidation of the plane by horizontal extensions from every element
/// endpoint. Positive-length elements must be pairwise non-crossing and
/// non-horizontal; zero-length elements act as extension sources only.
pub fn build_horizontal_decomposition(
    elements: &[HdElement],
) -> Result<HorizontalDecomposition, FragmentError> {
    for e in elements {
        if !e.is_point() && e.p.y == e.q.y {
            return Err(FragmentError::HorizontalInput(e.id));
        }
    }
    if elements.len() <= 2048 {
        for i in 0..elements.len() {
            for j in (i + 1)..elements.len() {
                let (a, b) = (&elements[i], &elements[j]);
                if !a.is_point()
                    && !b.is_point()
                    && properly_cross(&a.p, &a.q, &b.p, &b.q)
                {
                    return Err(FragmentError::CrossingInputs(a.id, b.id));
                }
            }
        }
    }

    let mut sweep = HdSweep::new(true);
    let mut events = Vec::new();
    let mut walls: BTreeMap<usize, (Point, Point)> = BTreeMap::new();
    for (idx, e) in elements.iter().enumerate() {
        if e.is_point() {
            events.push(Event { y: e.p.y.clone(), x: e.p.x.clone(), kind: EventKind::Point, id: idx });
        } else {
            let (top, bot) =
                if e.p.y > e.q.y { (e.p.clone(), e.q.clone()) } else { (e.q.clone(), e.p.clone()) };
            events.push(Event { y: top.y.clone(), x: top.x.clone(), kind: EventKind::Birth, id: idx });
            events.push(Event { y: bot.y.clone(), x: bot.x.clone(), kind: EventKind::Death, id: idx });
            walls.insert(idx, (top, bot));
        }
    }
    sort_events(&mut events);

    let mut handle_of: BTreeMap<usize, Handle> = BTreeMap::new();
    for ev in &events {
        match ev.kind {
            EventKind::Birth => {
                let (top, bot) = walls[&ev.id].clone();
                let h = sweep.insert_wall(elements[ev.id].id, top, bot, &ev.y);
                handle_of.insert(ev.id, h);
            }
            EventKind::Death => {
                let h = handle_of[&ev.id];
                sweep.remove_wall(h, &ev.y);
            }
            EventKind::Point => sweep.point_event(&ev.x, &ev.y),
            EventKind::Segment => unreachable!(),
        }
    }
    sweep.finish();
    Ok(HorizontalDecomposition { trapezoids: sweep.traps.take().unwrap() })
}

// ---------------------------------------------------------------------------
// Fragment computation.

/// Runs the per-color sweeps and returns the full fragment partition.
pub fn compute_active_fragments(
    inst: &ColoredSegmentInstance,
) -> Result<FragmentSet, FragmentError> {
    let n = inst.n();
    let c = inst.c();
    let mut fragments: Vec<Fragment> = Vec::new();
    let mut active_by_color: Vec<Vec<usize>> = alloc::vec![Vec::new(); c];
    let mut inactive_by_color: Vec<Vec<usize>> = alloc::vec![Vec::new(); c];
    let mut touch_contacts: Vec<(usize, usize)> = Vec::new();
    let mut touch_count = 0usize;
    let mut slack_activations = 0usize;

    // F_1 := V_1, one whole active end fragment per first-class segment.
    for s in &inst.segments {
        if s.color == 0 {
            let id = fragments.len();
            fragments.push(Fragment {
                id,
                segment_id: s.id,
                color: 0,
                p: s.p.clone(),
                q: s.q.clone(),
                kind: FragmentKind::End,
                status: FragmentStatus::Active,
                connects: None,
                equivalent_active: None,
                p_contact: None,
                q_contact: None,
            });
            active_by_color[0].push(id);
        }
    }

    for color in 1..c {
        let prev_active: usize = active_by_color[..color].iter().map(|v| v.len()).sum();
        let map = FrameMap::for_direction(inst.colors[color]);

        // Wall records for all earlier active fragments, in the new frame.
        struct WallRec {
            frag: usize,
            top: Point,
            bot: Point,
        }
        let mut walls: Vec<WallRec> = Vec::new();
        for &fid in active_by_color[..color].iter().flatten() {
            let f = &fragments[fid];
            let rp = map.apply(&f.p);
            let rq = map.apply(&f.q);
            debug_assert!(rp.y != rq.y, "earlier-color fragment horizontal in frame");
            let (top, bot) = if rp.y > rq.y { (rp, rq) } else { (rq, rp) };
            walls.push(WallRec { frag: fid, top, bot });
        }

        // Point events: endpoints of all remaining segments, deduplicated.
        let mut points: BTreeMap<(Coord, Coord), usize> = BTreeMap::new();
        for s in &inst.segments {
            if s.color >= color {
                for pt in [&s.p, &s.q] {
                    let rp = map.apply(pt);
                    let next = points.len();
                    points.entry((rp.x, rp.y)).or_insert(next);
                }
            }
        }

        let mut events = Vec::new();
        for (widx, w) in walls.iter().enumerate() {
            events.push(Event {
                y: w.top.y.clone(),
                x: w.top.x.clone(),
                kind: EventKind::Birth,
                id: widx,
            });
            events.push(Event {
                y: w.bot.y.clone(),
                x: w.bot.x.clone(),
                kind: EventKind::Death,
                id: widx,
            });
        }
        for ((x, y), pid) in &points {
            events.push(Event { y: y.clone(), x: x.clone(), kind: EventKind::Point, id: *pid });
        }
        for s in &inst.segments {
            if s.color == color {
                let rp = map.apply(&s.p);
                let rq = map.apply(&s.q);
                debug_assert!(rp.y == rq.y);
                let x = if rp.x <= rq.x { rp.x.clone() } else { rq.x.clone() };
                events.push(Event { y: rp.y, x, kind: EventKind::Segment, id: s.id });
            }
        }
        sort_events(&mut events);

        let mut sweep = HdSweep::new(false);
        let mut handle_of: Vec<Option<Handle>> = alloc::vec![None; walls.len()];
        // Walls removed at the current y; segment events at the same height
        // still touch them.
        let mut dying: Vec<(Coord, usize)> = Vec::new();
        let mut dying_y: Option<Coord> = None;

        for ev in &events {
            if dying_y.as_ref() != Some(&ev.y) {
                dying.clear();
                dying_y = Some(ev.y.clone());
            }
            match ev.kind {
                EventKind::Birth => {
                    let w = &walls[ev.id];
                    let h = sweep.insert_wall(w.frag, w.top.clone(), w.bot.clone(), &ev.y);
                    handle_of[ev.id] = Some(h);
                }
                EventKind::Death => {
                    sweep.remove_wall(handle_of[ev.id].unwrap(), &ev.y);
                    let w = &walls[ev.id];
                    dying.push((w.bot.x.clone(), w.frag));
                }
                EventKind::Point => sweep.point_event(&ev.x, &ev.y),
                EventKind::Segment => {
                    let s = &inst.segments[ev.id];
                    process_segment(
                        s,
                        &map,
                        &ev.y,
                        &mut sweep,
                        &dying,
                        &mut fragments,
                        &mut active_by_color,
                        &mut inactive_by_color,
                        &mut touch_contacts,
                        &mut touch_count,
                        &mut slack_activations,
                        color,
                    )?;
                }
            }
        }

        let total_active: usize = active_by_color[..=color].iter().map(|v| v.len()).sum();
        assert!(
            total_active <= 4 * prev_active + 8 * n + 1 + slack_activations,
            "fragment recurrence violated at color {color}: {total_active} active"
        );
    }

    Ok(FragmentSet {
        active_by_color,
        inactive_by_color,
        representative: alloc::vec![None; n],
        weight: alloc::vec![zero(); fragments.len()],
        fragments,
        touch_contacts,
        touch_count,
        n_segments: n,
    })
}

#[allow(clippy::too_many_arguments)]
fn process_segment(
    s: &crate::geom::Segment,
    map: &FrameMap,
    y: &Coord,
    sweep: &mut HdSweep,
    dying: &[(Coord, usize)],
    fragments: &mut Vec<Fragment>,
    active_by_color: &mut [Vec<usize>],
    inactive_by_color: &mut [Vec<usize>],
    touch_contacts: &mut Vec<(usize, usize)>,
    touch_count: &mut usize,
    slack_activations: &mut usize,
    color: usize,
) -> Result<(), FragmentError> {
    let rp = map.apply(&s.p);
    let rq = map.apply(&s.q);
    let reversed = rp.x > rq.x;
    let (x_lo, x_hi) = if reversed { (&rq.x, &rp.x) } else { (&rp.x, &rq.x) };

    // All walls whose sweep-line position falls in the segment's closed span.
    let mut candidates: Vec<(Handle, Coord)> = Vec::new();
    sweep.tree.visit_between(
        |w| w.x_at(y) < *x_lo,
        |w| w.x_at(y) > *x_hi,
        &mut |h, w| candidates.push((h, w.x_at(y))),
    );

    let mut crossings: Vec<(Handle, Coord, usize)> = Vec::new();
    let mut touches: Vec<(Coord, usize)> = Vec::new();
    for (h, x) in candidates {
        let w = sweep.tree.get(h);
        let strict_x = x > *x_lo && x < *x_hi;
        let strict_y = w.top.y > *y && w.bot.y < *y;
        if strict_x && strict_y {
            crossings.push((h, x, w.payload));
        } else {
            touches.push((x, w.payload));
        }
    }
    for pair in crossings.windows(2) {
        if pair[0].1 == pair[1].1 {
            return Err(FragmentError::DegenerateEvent(s.id));
        }
    }
    // Walls removed earlier in this batch end exactly on the sweep line;
    // within the span they touch the segment.
    for (x, frag) in dying {
        if *x >= *x_lo && *x <= *x_hi {
            touches.push((x.clone(), *frag));
        }
    }
    *touch_count += touches.len();

    // Cut points in the original frame, ordered from s.p towards s.q.
    let mut cuts: Vec<(Point, usize, Coord)> = crossings
        .iter()
        .map(|(_, x, wf)| (map.invert(&Point::new(x.clone(), y.clone())), *wf, x.clone()))
        .collect();
    if reversed {
        cuts.reverse();
    }

    let mut piece_ids: Vec<usize> = Vec::new();
    let mut piece_spans: Vec<(Coord, Coord)> = Vec::new(); // rotated-x spans, lo <= hi

    let new_frag = |fragments: &mut Vec<Fragment>,
                    p: Point,
                    q: Point,
                    kind: FragmentKind,
                    p_contact: Option<usize>,
                    q_contact: Option<usize>| {
        let id = fragments.len();
        fragments.push(Fragment {
            id,
            segment_id: s.id,
            color,
            p,
            q,
            kind,
            status: FragmentStatus::Active,
            connects: None,
            equivalent_active: None,
            p_contact,
            q_contact,
        });
        id
    };

    if cuts.is_empty() {
        let id = new_frag(fragments, s.p.clone(), s.q.clone(), FragmentKind::End, None, None);
        active_by_color[color].push(id);
        piece_ids.push(id);
        piece_spans.push((x_lo.clone(), x_hi.clone()));
    } else {
        // Leading end piece.
        let id = new_frag(
            fragments,
            s.p.clone(),
            cuts[0].0.clone(),
            FragmentKind::End,
            None,
            Some(cuts[0].1),
        );
        active_by_color[color].push(id);
        piece_ids.push(id);
        let first_span = if reversed { (cuts[0].2.clone(), x_hi.clone()) } else { (x_lo.clone(), cuts[0].2.clone()) };
        piece_spans.push(first_span);

        // Internal pieces.
        for j in 0..cuts.len().saturating_sub(1) {
            let (cut_a, wall_a, xa) = &cuts[j];
            let (cut_b, wall_b, xb) = &cuts[j + 1];
            let span = if xa <= xb { (xa.clone(), xb.clone()) } else { (xb.clone(), xa.clone()) };
            let connects = if wall_a <= wall_b { (*wall_a, *wall_b) } else { (*wall_b, *wall_a) };

            let has_toucher_inside =
                touches.iter().any(|(tx, _)| *tx > span.0 && *tx < span.1);

            let id = new_frag(
                fragments,
                cut_a.clone(),
                cut_b.clone(),
                FragmentKind::Internal,
                Some(*wall_a),
                Some(*wall_b),
            );
            fragments[id].connects = Some(connects);

            // Locate the gap between the crossed walls. The crossings are
            // sweep-ordered, so in x order the pair is (left, right).
            let (h_left, h_right) = if reversed {
                (crossings[crossings.len() - 2 - j].0, crossings[crossings.len() - 1 - j].0)
            } else {
                (crossings[j].0, crossings[j + 1].0)
            };

            let claim = if has_toucher_inside {
                *slack_activations += 1;
                None // activate unconditionally, no gap involved
            } else {
                if sweep.tree.predecessor(h_right) != Some(h_left) {
                    return Err(FragmentError::DegenerateEvent(s.id));
                }
                Some(h_right)
            };

            match claim {
                None => {
                    active_by_color[color].push(id);
                }
                Some(h_right) => {
                    let gap = &mut sweep.tree.get_mut(h_right).gap_left;
                    match gap.claimed {
                        None => {
                            gap.claimed = Some(id);
                            active_by_color[color].push(id);
                        }
                        Some(active_id) => {
                            fragments[id].status = FragmentStatus::Inactive;
                            fragments[id].equivalent_active = Some(active_id);
                            debug_assert_eq!(fragments[active_id].connects, Some(connects));
                            inactive_by_color[color].push(id);
                        }
                    }
                }
            }
            piece_ids.push(id);
            piece_spans.push(span);
        }

        // Trailing end piece.
        let last = cuts.len() - 1;
        let id = new_frag(
            fragments,
            cuts[last].0.clone(),
            s.q.clone(),
            FragmentKind::End,
            Some(cuts[last].1),
            None,
        );
        active_by_color[color].push(id);
        piece_ids.push(id);
        let last_span = if reversed { (x_lo.clone(), cuts[last].2.clone()) } else { (cuts[last].2.clone(), x_hi.clone()) };
        piece_spans.push(last_span);
    }

    // Attach touch contacts to the piece containing each touch point.
    for (tx, wall_frag) in touches {
        let piece = piece_spans
            .iter()
            .position(|(lo, hi)| tx >= *lo && tx <= *hi)
            .expect("touch point inside segment span");
        touch_contacts.push((piece_ids[piece], wall_frag));
    }

    Ok(())
}

/// Marks one end fragment per segment as the weight carrier. The designated
/// endpoint is the lowest-then-leftmost endpoint of the segment; the
/// representative's weight is the segment weight over the total.
pub fn pick_representatives(
    fs: &mut FragmentSet,
    weights: &[Coord],
) -> Result<(), FragmentError> {
    debug_assert_eq!(weights.len(), fs.n_segments);
    let total: Coord = weights.iter().fold(zero(), |a, w| a + w);
    if total.is_zero() {
        return Err(FragmentError::ZeroTotalWeight);
    }
    for w in fs.weight.iter_mut() {
        *w = zero();
    }
    // Endpoints per segment: find each segment's fragments once.
    let mut seg_end_frags: Vec<Vec<usize>> = alloc::vec![Vec::new(); fs.n_segments];
    let mut seg_pts: Vec<Option<(Point, Point)>> = alloc::vec![None; fs.n_segments];
    for f in &fs.fragments {
        if f.kind == FragmentKind::End {
            seg_end_frags[f.segment_id].push(f.id);
        }
        let entry = &mut seg_pts[f.segment_id];
        match entry {
            None => *entry = Some((f.p.clone(), f.q.clone())),
            Some((p, q)) => {
                // Fragments are ordered from the segment's p endpoint; the
                // overall segment endpoints are the extremes seen.
                let _ = p;
                *q = f.q.clone();
            }
        }
    }
    for seg in 0..fs.n_segments {
        let Some((p, q)) = seg_pts[seg].clone() else {
            return Err(FragmentError::MissingEndFragment(seg));
        };
        let low = if (&p.y, &p.x) <= (&q.y, &q.x) { p } else { q };
        let rep = seg_end_frags[seg]
            .iter()
            .copied()
            .find(|&fid| fs.fragments[fid].p == low || fs.fragments[fid].q == low)
            .ok_or(FragmentError::MissingEndFragment(seg))?;
        fs.representative[seg] = Some(rep);
        fs.weight[rep] = &weights[seg] / &total;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coord::{crd, frac, one};
    use crate::geom::{ColoredSegmentInstance, Direction, Segment};

    fn seg(id: usize, p: (i64, i64), q: (i64, i64), color: usize) -> Segment {
        Segment { id, p: Point::int(p.0, p.1), q: Point::int(q.0, q.1), color, weight: one() }
    }

    fn cross2() -> ColoredSegmentInstance {
        ColoredSegmentInstance::new(
            alloc::vec![seg(0, (0, 0), (4, 0), 0), seg(1, (2, -1), (2, 1), 1)],
            alloc::vec![Direction::new(1, 0).unwrap(), Direction::new(0, 1).unwrap()],
        )
        .unwrap()
    }

    /// Two verticals, three horizontals crossing both.
    fn two_walls_three_crossers() -> ColoredSegmentInstance {
        ColoredSegmentInstance::new(
            alloc::vec![
                seg(0, (0, -2), (0, 2), 0),
                seg(1, (4, -2), (4, 2), 0),
                seg(2, (-1, 1), (5, 1), 1),
                seg(3, (-1, 0), (5, 0), 1),
                seg(4, (-1, -1), (5, -1), 1),
            ],
            alloc::vec![Direction::new(0, 1).unwrap(), Direction::new(1, 0).unwrap()],
        )
        .unwrap()
    }

    #[test]
    fn hd_single_vertical() {
        let hd = build_horizontal_decomposition(&[HdElement {
            id: 0,
            p: Point::int(0, 0),
            q: Point::int(0, 2),
        }])
        .unwrap();
        assert_eq!(hd.trapezoids.len(), 4);
        assert!(hd.trapezoids.iter().all(|t| !t.is_bounded()));
    }

    #[test]
    fn hd_empty() {
        let hd = build_horizontal_decomposition(&[]).unwrap();
        assert_eq!(hd.trapezoids.len(), 1);
        assert!(!hd.trapezoids[0].is_bounded());
    }

    #[test]
    fn hd_two_walls_one_bounded() {
        let hd = build_horizontal_decomposition(&[
            HdElement { id: 0, p: Point::int(0, -2), q: Point::int(0, 2) },
            HdElement { id: 1, p: Point::int(4, -2), q: Point::int(4, 2) },
        ])
        .unwrap();
        let bounded: Vec<_> = hd.trapezoids.iter().filter(|t| t.is_bounded()).collect();
        assert_eq!(bounded.len(), 1);
        let t = bounded[0];
        assert_eq!(t.left, Some(0));
        assert_eq!(t.right, Some(1));
        assert_eq!(t.top, Some(crd(2)));
        assert_eq!(t.bottom, Some(crd(-2)));
        assert!(hd.trapezoids.len() <= 3 * 2 + 1);
    }

    #[test]
    fn hd_crossing_inputs_rejected() {
        let err = build_horizontal_decomposition(&[
            HdElement { id: 0, p: Point::int(0, -2), q: Point::int(2, 2) },
            HdElement { id: 1, p: Point::int(2, -2), q: Point::int(0, 2) },
        ])
        .unwrap_err();
        assert_eq!(err, FragmentError::CrossingInputs(0, 1));
    }

    #[test]
    fn hd_size_bound_random() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            // Disjoint verticals plus free points.
            let mut elements = Vec::new();
            let mut id = 0;
            for _ in 0..30 {
                let x = rng.gen_range(-1000..1000i64) * 7 + id as i64; // distinct xs
                let y = rng.gen_range(-100..100i64);
                let len = rng.gen_range(1..40i64);
                elements.push(HdElement {
                    id,
                    p: Point::int(x, y),
                    q: Point::int(x, y + len),
                });
                id += 1;
            }
            for _ in 0..20 {
                let p = Point::int(rng.gen_range(-8000..8000i64), rng.gen_range(-200..200i64));
                elements.push(HdElement { id, p: p.clone(), q: p });
                id += 1;
            }
            let hd = build_horizontal_decomposition(&elements).unwrap();
            assert!(hd.trapezoids.len() <= 3 * elements.len() + 1);
        }
    }

    #[test]
    fn fragments_cross2() {
        let fs = compute_active_fragments(&cross2()).unwrap();
        assert_eq!(fs.fragments.len(), 3);
        assert_eq!(fs.active_count(), 3);
        assert!(fs.fragments.iter().all(|f| f.is_active()));
        // h stays whole; v splits at (2,0) into two end fragments.
        let v_frags: Vec<_> = fs.fragments.iter().filter(|f| f.segment_id == 1).collect();
        assert_eq!(v_frags.len(), 2);
        assert!(v_frags.iter().all(|f| f.kind == FragmentKind::End));
        assert!(v_frags.iter().any(|f| f.q == Point::int(2, 0) || f.p == Point::int(2, 0)));
    }

    #[test]
    fn fragments_shared_trapezoid() {
        let fs = compute_active_fragments(&two_walls_three_crossers()).unwrap();
        // 2 wall fragments + 6 end fragments + 3 internal pieces.
        assert_eq!(fs.fragments.len(), 11);
        let internals: Vec<_> =
            fs.fragments.iter().filter(|f| f.kind == FragmentKind::Internal).collect();
        assert_eq!(internals.len(), 3);
        let active_internals: Vec<_> = internals.iter().filter(|f| f.is_active()).collect();
        assert_eq!(active_internals.len(), 1);
        // Top-to-bottom sweep: the first crosser (y = 1, segment 2) wins.
        assert_eq!(active_internals[0].segment_id, 2);
        for f in internals.iter().filter(|f| !f.is_active()) {
            assert_eq!(f.equivalent_active, Some(active_internals[0].id));
            assert_eq!(f.connects, active_internals[0].connects);
        }
    }

    #[test]
    fn fragments_split_trapezoid() {
        // Same walls and crossers, plus a short color-0 segment between the
        // top two crossers; its endpoints split the trapezoid so two internal
        // pieces get activated.
        let inst = ColoredSegmentInstance::new(
            alloc::vec![
                seg(0, (0, -10), (0, 10), 0),
                seg(1, (20, -10), (20, 10), 0),
                seg(2, (10, 2), (10, 3), 0),
                seg(3, (-5, 5), (25, 5), 1),
                seg(4, (-5, 0), (25, 0), 1),
                seg(5, (-5, -5), (25, -5), 1),
            ],
            alloc::vec![Direction::new(0, 1).unwrap(), Direction::new(1, 0).unwrap()],
        )
        .unwrap();
        let fs = compute_active_fragments(&inst).unwrap();
        let internals: Vec<_> = fs
            .fragments
            .iter()
            .filter(|f| f.kind == FragmentKind::Internal && f.segment_id >= 3)
            .collect();
        assert_eq!(internals.len(), 3);
        let active: Vec<_> = internals.iter().filter(|f| f.is_active()).collect();
        assert_eq!(active.len(), 2);
        let mut active_segs: Vec<usize> = active.iter().map(|f| f.segment_id).collect();
        active_segs.sort_unstable();
        assert_eq!(active_segs, alloc::vec![3, 4]);
    }

    #[test]
    fn fragments_grid2() {
        // K_{2,2}: one of the two internal vertical pieces shares the bounded
        // trapezoid with the other, so 7 fragments are active in total.
        let inst = ColoredSegmentInstance::new(
            alloc::vec![
                seg(0, (0, 1), (3, 1), 0),
                seg(1, (0, 2), (3, 2), 0),
                seg(2, (1, 0), (1, 3), 1),
                seg(3, (2, 0), (2, 3), 1),
            ],
            alloc::vec![Direction::new(1, 0).unwrap(), Direction::new(0, 1).unwrap()],
        )
        .unwrap();
        let fs = compute_active_fragments(&inst).unwrap();
        assert_eq!(fs.fragments.len(), 8);
        assert_eq!(fs.active_count(), 7);
        let inactive: Vec<_> = fs.fragments.iter().filter(|f| !f.is_active()).collect();
        assert_eq!(inactive.len(), 1);
        assert_eq!(inactive[0].kind, FragmentKind::Internal);
    }

    #[test]
    fn fragment_union_covers_segment() {
        let fs = compute_active_fragments(&two_walls_three_crossers()).unwrap();
        let inst = two_walls_three_crossers();
        for s in &inst.segments {
            let mut frags: Vec<_> =
                fs.fragments.iter().filter(|f| f.segment_id == s.id).collect();
            frags.sort_by_key(|f| f.id);
            assert_eq!(frags.first().unwrap().p, s.p);
            assert_eq!(frags.last().unwrap().q, s.q);
            for w in frags.windows(2) {
                assert_eq!(w[0].q, w[1].p, "fragments of segment {} are contiguous", s.id);
            }
        }
    }

    #[test]
    fn representatives_cross2() {
        let mut fs = compute_active_fragments(&cross2()).unwrap();
        pick_representatives(&mut fs, &[one(), one()]).unwrap();
        let rep_h = fs.representative[0].unwrap();
        assert_eq!(fs.weight[rep_h], frac(1, 2));
        let rep_v = fs.representative[1].unwrap();
        // Lower endpoint of v is (2,-1); its end fragment carries the weight.
        let f = &fs.fragments[rep_v];
        assert!(f.p == Point::int(2, -1) || f.q == Point::int(2, -1));
        assert_eq!(fs.weight[rep_v], frac(1, 2));
        let total: Coord = fs.weight.iter().fold(zero(), |a, w| a + w);
        assert_eq!(total, one());
    }

    #[test]
    fn representatives_weighted() {
        let mut fs = compute_active_fragments(&cross2()).unwrap();
        pick_representatives(&mut fs, &[crd(3), crd(1)]).unwrap();
        assert_eq!(fs.weight[fs.representative[0].unwrap()], frac(3, 4));
        assert_eq!(fs.weight[fs.representative[1].unwrap()], frac(1, 4));
    }

    #[test]
    fn representative_single_segment() {
        let inst = ColoredSegmentInstance::new(
            alloc::vec![seg(0, (0, 0), (4, 0), 0)],
            alloc::vec![Direction::new(1, 0).unwrap()],
        )
        .unwrap();
        let mut fs = compute_active_fragments(&inst).unwrap();
        pick_representatives(&mut fs, &[one()]).unwrap();
        assert_eq!(fs.weight[fs.representative[0].unwrap()], one());
    }

    /// Def-1 style check: inactive pieces and their active equivalents bound
    /// an endpoint-free region together with the walls they connect.
    #[test]
    fn inactive_regions_endpoint_free() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for round in 0..30 {
            let inst = random_grid_like(&mut rng, 12 + round % 8);
            let report = crate::geom::validate_general_position(&inst);
            if !report.is_clean() {
                continue;
            }
            let fs = compute_active_fragments(&inst).unwrap();
            let endpoints: Vec<Point> = inst
                .segments
                .iter()
                .flat_map(|s| [s.p.clone(), s.q.clone()])
                .collect();
            for f in fs.fragments.iter().filter(|f| !f.is_active()) {
                let active = &fs.fragments[f.equivalent_active.unwrap()];
                assert_eq!(active.connects, f.connects);
                let quad = region_quad(f, active);
                for e in &endpoints {
                    assert!(
                        !strictly_inside_convex(&quad, e),
                        "endpoint {e} inside equivalence region (round {round})"
                    );
                }
            }
        }
    }

    fn region_quad(f: &Fragment, g: &Fragment) -> [Point; 4] {
        // Corners ordered so the sides are f, a wall piece, g, a wall piece.
        let (fa, fb) = (f.p.clone(), f.q.clone());
        // Match g's endpoints to f's by shared wall contact.
        let (ga, gb) = if f.p_contact == g.p_contact {
            (g.p.clone(), g.q.clone())
        } else {
            (g.q.clone(), g.p.clone())
        };
        [fa, fb, gb, ga]
    }

    fn strictly_inside_convex(quad: &[Point; 4], p: &Point) -> bool {
        let mut sign = 0i8;
        for i in 0..4 {
            let a = &quad[i];
            let b = &quad[(i + 1) % 4];
            if a == b {
                continue;
            }
            let o = orient(a, b, p);
            if o == 0 {
                return false;
            }
            if sign == 0 {
                sign = o;
            } else if o != sign {
                return false;
            }
        }
        sign != 0
    }

    fn random_grid_like(
        rng: &mut rand_chacha::ChaCha8Rng,
        n: usize,
    ) -> ColoredSegmentInstance {
        // Disjoint verticals and horizontals with odd/even coordinate parity
        // so no endpoint ever lies on another segment.
        use rand::Rng;
        let mut segs = Vec::new();
        let mut used_v: Vec<i64> = Vec::new();
        let mut used_h: Vec<i64> = Vec::new();
        let mut id = 0;
        while id < n {
            if rng.gen_bool(0.5) {
                let x = rng.gen_range(0..60i64) * 2; // even x
                if used_v.contains(&x) {
                    continue;
                }
                used_v.push(x);
                let y0 = rng.gen_range(-30..0i64) * 2 + 1;
                let y1 = rng.gen_range(1..30i64) * 2 + 1;
                segs.push(seg(id, (x, y0), (x, y1), 0));
            } else {
                let y = rng.gen_range(-30..30i64) * 2; // even y
                if used_h.contains(&y) {
                    continue;
                }
                used_h.push(y);
                let x0 = rng.gen_range(-30..0i64) * 2 + 1;
                let x1 = rng.gen_range(1..30i64) * 2 + 1;
                segs.push(seg(id, (x0, y), (x1, y), 1));
            }
            id += 1;
        }
        ColoredSegmentInstance::new(
            segs,
            alloc::vec![Direction::new(0, 1).unwrap(), Direction::new(1, 0).unwrap()],
        )
        .unwrap()
    }
}
