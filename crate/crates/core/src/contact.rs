//! The contact graph on active fragments.
//!
//! Active fragments never cross, so every contact is a single point where an
//! endpoint of one fragment lies on the other. The planar embedding comes
//! straight from the geometry: incident edges are ordered along the boundary
//! walk of the (infinitesimally thickened) fragment, which uses the contact
//! parameter along the fragment and the departure angle of the other
//! fragment at the contact point.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use num_traits::Zero;

use crate::coord::{zero, Coord};
use crate::fragmenter::FragmentSet;
use crate::geom::Point;

#[derive(Debug, Clone)]
pub struct EmbeddedPlanarGraph {
    /// Per-node weight; the total must stay at most one.
    pub weights: Vec<Coord>,
    /// Caller-defined node payload (fragment id, packed component id, ...).
    pub payload: Vec<usize>,
    /// Cyclic counter-clockwise neighbor order per node.
    pub rotation: Vec<Vec<u32>>,
    /// Canonical (min, max) edge list, sorted.
    pub edges: Vec<(u32, u32)>,
}

impl EmbeddedPlanarGraph {
    pub fn n(&self) -> usize {
        self.rotation.len()
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn total_weight(&self) -> Coord {
        self.weights.iter().fold(zero(), |a, w| a + w)
    }

    /// Builds an embedded graph from neighbor lists already in rotation
    /// order. Intended for synthetic test graphs and io.
    pub fn from_rotation(rotation: Vec<Vec<u32>>, weights: Vec<Coord>) -> Self {
        let mut edges = BTreeSet::new();
        for (u, nbrs) in rotation.iter().enumerate() {
            for &v in nbrs {
                let (a, b) = if (u as u32) < v { (u as u32, v) } else { (v, u as u32) };
                edges.insert((a, b));
            }
        }
        let payload = (0..rotation.len()).collect();
        EmbeddedPlanarGraph { weights, payload, rotation, edges: edges.into_iter().collect() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ContactError {
    /// Active fragments properly cross: upstream fragmenter bug.
    ActiveFragmentsCross(usize, usize),
    /// The geometric rotation is not a planar embedding; the input is
    /// degenerate (too many fragments through one point). Perturb the input.
    Degenerate,
    WeightsExceedOne,
}

impl fmt::Display for ContactError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ContactError::ActiveFragmentsCross(a, b) => {
                write!(f, "active fragments {a} and {b} cross")
            }
            ContactError::Degenerate => {
                write!(f, "contact graph embedding is degenerate; rerun with --perturb")
            }
            ContactError::WeightsExceedOne => write!(f, "fragment weights exceed one"),
        }
    }
}

/// Counter-clockwise angular order of `d1` vs `d2` starting just after the
/// reference direction `r` (exact, no trigonometry).
fn ccw_angle_cmp(r: (&Coord, &Coord), d1: (&Coord, &Coord), d2: (&Coord, &Coord)) -> Ordering {
    fn sector(r: (&Coord, &Coord), d: (&Coord, &Coord)) -> u8 {
        let cross = r.0 * d.1 - r.1 * d.0;
        if cross.is_zero() {
            let dot = r.0 * d.0 + r.1 * d.1;
            if dot > zero() {
                0 // aligned with the reference: first
            } else {
                2 // opposite: the half-turn mark
            }
        } else if cross > zero() {
            1
        } else {
            3
        }
    }
    let s1 = sector(r, d1);
    let s2 = sector(r, d2);
    s1.cmp(&s2).then_with(|| {
        let cross = d1.0 * d2.1 - d1.1 * d2.0;
        if cross > zero() {
            Ordering::Less
        } else if cross < zero() {
            Ordering::Greater
        } else {
            Ordering::Equal
        }
    })
}

#[derive(Debug)]
struct ContactEntry {
    zone: u8,           // 0 bottom, 1 q-tip, 2 top, 3 p-tip
    t: Coord,           // parameter along the fragment (dot product)
    dir: (Coord, Coord), // departure direction of the other fragment
    other: u32,
}

/// One node per active fragment; an edge wherever two active fragments of
/// different segments share a point. Node weights are the representative
/// weights. Fails if the geometric rotation does not trace a sphere (which
/// means the input was degenerate).
pub fn build_contact_graph(fs: &FragmentSet) -> Result<EmbeddedPlanarGraph, ContactError> {
    // Node numbering: active fragments by ascending fragment id.
    let mut node_of: BTreeMap<usize, u32> = BTreeMap::new();
    let mut payload = Vec::new();
    let mut weights = Vec::new();
    for f in fs.fragments.iter().filter(|f| f.is_active()) {
        node_of.insert(f.id, node_of.len() as u32);
        payload.push(f.id);
        weights.push(fs.weight[f.id].clone());
    }
    let n = payload.len();

    // Contact points: cut endpoints plus touch bookkeeping from the sweep.
    // Each contact is (fragment, wall, point).
    let mut contacts: Vec<(usize, usize, Point)> = Vec::new();
    for f in fs.fragments.iter().filter(|f| f.is_active()) {
        if let Some(w) = f.p_contact {
            contacts.push((f.id, w, f.p.clone()));
        }
        if let Some(w) = f.q_contact {
            contacts.push((f.id, w, f.q.clone()));
        }
    }
    for &(piece, wall) in &fs.touch_contacts {
        if !fs.fragments[piece].is_active() {
            continue;
        }
        // The touch point is the wall endpoint lying on the piece.
        let wf = &fs.fragments[wall];
        let pf = &fs.fragments[piece];
        let pt = if crate::geom::point_on_segment(&wf.p, &pf.p, &pf.q) {
            wf.p.clone()
        } else {
            wf.q.clone()
        };
        contacts.push((piece, wall, pt));
    }

    let mut per_node: Vec<Vec<ContactEntry>> = (0..n).map(|_| Vec::new()).collect();
    let mut edge_set: BTreeSet<(u32, u32)> = BTreeSet::new();
    for (a, b, pt) in &contacts {
        let (fa, fb) = (&fs.fragments[*a], &fs.fragments[*b]);
        if fa.segment_id == fb.segment_id {
            continue;
        }
        let (na, nb) = (node_of[a], node_of[b]);
        let key = if na < nb { (na, nb) } else { (nb, na) };
        if !edge_set.insert(key) {
            continue; // already recorded (e.g. cut contact doubling a touch)
        }
        per_node[na as usize].push(contact_entry(fa, fb, pt, nb));
        per_node[nb as usize].push(contact_entry(fb, fa, pt, na));
    }

    // The lens boundary walk: bottom side by ascending t, the far tip, top
    // side by descending t, the near tip.
    let mut rotation: Vec<Vec<u32>> = Vec::with_capacity(n);
    for (node, mut entries) in per_node.into_iter().enumerate() {
        let f = &fs.fragments[payload[node]];
        let fdir = (&f.q.x - &f.p.x, &f.q.y - &f.p.y);
        let neg = (-fdir.0.clone(), -fdir.1.clone());
        entries.sort_by(|l, r| {
            l.zone.cmp(&r.zone).then_with(|| match l.zone {
                0 => l.t.cmp(&r.t),
                2 => r.t.cmp(&l.t),
                1 => ccw_angle_cmp(
                    (&neg.0, &neg.1),
                    (&l.dir.0, &l.dir.1),
                    (&r.dir.0, &r.dir.1),
                ),
                _ => ccw_angle_cmp(
                    (&fdir.0, &fdir.1),
                    (&l.dir.0, &l.dir.1),
                    (&r.dir.0, &r.dir.1),
                ),
            })
            .then_with(|| l.other.cmp(&r.other))
        });
        rotation.push(entries.into_iter().map(|e| e.other).collect());
    }

    let graph = EmbeddedPlanarGraph {
        weights,
        payload,
        rotation,
        edges: edge_set.into_iter().collect(),
    };

    if graph.total_weight() > crate::coord::one() {
        return Err(ContactError::WeightsExceedOne);
    }
    if graph.n() >= 3 {
        assert!(graph.m() <= 3 * graph.n() - 6, "contact graph exceeds planar edge bound");
    }
    if !euler_check(&graph) {
        return Err(ContactError::Degenerate);
    }
    Ok(graph)
}

fn contact_entry(
    f: &crate::fragmenter::Fragment,
    g: &crate::fragmenter::Fragment,
    pt: &Point,
    other: u32,
) -> ContactEntry {
    let fdir = (&f.q.x - &f.p.x, &f.q.y - &f.p.y);
    // Departure of g from the contact point.
    let dir = if *pt == g.p {
        (&g.q.x - &g.p.x, &g.q.y - &g.p.y)
    } else if *pt == g.q {
        (&g.p.x - &g.q.x, &g.p.y - &g.q.y)
    } else {
        // g runs through f's tip; a single edge sits at the tip, any
        // deterministic direction works.
        (&g.q.x - &g.p.x, &g.q.y - &g.p.y)
    };
    if *pt == f.p {
        ContactEntry { zone: 3, t: zero(), dir, other }
    } else if *pt == f.q {
        ContactEntry { zone: 1, t: zero(), dir, other }
    } else {
        let rel = (&pt.x - &f.p.x, &pt.y - &f.p.y);
        let t = &fdir.0 * &rel.0 + &fdir.1 * &rel.1;
        let cross = &fdir.0 * &dir.1 - &fdir.1 * &dir.0;
        let zone = if cross < zero() { 0 } else { 2 };
        ContactEntry { zone, t, dir, other }
    }
}

/// Face-traces the rotation system and checks V - E + F = 2 on every
/// connected component.
pub fn euler_check(g: &EmbeddedPlanarGraph) -> bool {
    let n = g.n();
    // Dart = (node, index into its rotation list).
    let mut dart_ids: BTreeMap<(u32, u32), u32> = BTreeMap::new();
    let mut darts: Vec<(u32, u32)> = Vec::new();
    for (u, nbrs) in g.rotation.iter().enumerate() {
        for (i, _) in nbrs.iter().enumerate() {
            dart_ids.insert((u as u32, i as u32), darts.len() as u32);
            darts.push((u as u32, i as u32));
        }
    }
    // Position of neighbor u in rotation[v]; simple graphs only.
    let pos = |v: u32, u: u32| -> Option<u32> {
        g.rotation[v as usize].iter().position(|&w| w == u).map(|i| i as u32)
    };

    // Union-find for components.
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, x: usize) -> usize {
        let mut r = x;
        while parent[r] != r {
            r = parent[r];
        }
        let mut c = x;
        while parent[c] != r {
            let next = parent[c];
            parent[c] = r;
            c = next;
        }
        r
    }
    for &(u, v) in &g.edges {
        let (ru, rv) = (find(&mut parent, u as usize), find(&mut parent, v as usize));
        if ru != rv {
            parent[ru] = rv;
        }
    }

    // Count faces per component by orbit tracing.
    let mut face_count: BTreeMap<usize, usize> = BTreeMap::new();
    let mut visited = alloc::vec![false; darts.len()];
    for start in 0..darts.len() {
        if visited[start] {
            continue;
        }
        let comp = find(&mut parent, darts[start].0 as usize);
        *face_count.entry(comp).or_insert(0) += 1;
        let mut d = start as u32;
        loop {
            if visited[d as usize] {
                // A face must close at its start; revisiting mid-trace means
                // the map is inconsistent.
                if d as usize != start {
                    return false;
                }
                break;
            }
            visited[d as usize] = true;
            let (u, i) = darts[d as usize];
            let v = g.rotation[u as usize][i as usize];
            let Some(j) = pos(v, u) else { return false };
            let deg_v = g.rotation[v as usize].len() as u32;
            let next = (v, (j + 1) % deg_v);
            d = dart_ids[&next];
            if d as usize == start {
                break;
            }
        }
    }

    // Per-component V, E and isolated-node faces.
    let mut comp_v: BTreeMap<usize, i64> = BTreeMap::new();
    let mut comp_e: BTreeMap<usize, i64> = BTreeMap::new();
    for u in 0..n {
        let comp = find(&mut parent, u);
        *comp_v.entry(comp).or_insert(0) += 1;
        comp_e.entry(comp).or_insert(0);
        face_count.entry(comp).or_insert(1); // isolated node: one face
    }
    for &(u, _) in &g.edges {
        let comp = find(&mut parent, u as usize);
        *comp_e.entry(comp).or_insert(0) += 1;
    }
    for (comp, f) in &face_count {
        let v = comp_v[comp];
        let e = comp_e[comp];
        if v - e + (*f as i64) != 2 {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coord::{frac, one};
    use crate::fragmenter::{compute_active_fragments, pick_representatives};
    use crate::geom::{segments_intersect, ColoredSegmentInstance, Direction, Segment};

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

    fn pipeline_graph(inst: &ColoredSegmentInstance) -> (FragmentSet, EmbeddedPlanarGraph) {
        let mut fs = compute_active_fragments(inst).unwrap();
        let weights: Vec<Coord> = inst.segments.iter().map(|s| s.weight.clone()).collect();
        pick_representatives(&mut fs, &weights).unwrap();
        let g = build_contact_graph(&fs).unwrap();
        (fs, g)
    }

    #[test]
    fn cross2_contact_graph_is_path() {
        let (_, g) = pipeline_graph(&cross2());
        assert_eq!(g.n(), 3);
        assert_eq!(g.m(), 2);
        // The h node (fragment of segment 0) has degree 2.
        let mut degs: Vec<usize> = g.rotation.iter().map(|r| r.len()).collect();
        degs.sort_unstable();
        assert_eq!(degs, alloc::vec![1, 1, 2]);
        assert!(euler_check(&g));
    }

    #[test]
    fn single_segment_graph() {
        let inst = ColoredSegmentInstance::new(
            alloc::vec![seg(0, (0, 0), (4, 0), 0)],
            alloc::vec![Direction::new(1, 0).unwrap()],
        )
        .unwrap();
        let (_, g) = pipeline_graph(&inst);
        assert_eq!(g.n(), 1);
        assert_eq!(g.m(), 0);
        assert!(euler_check(&g));
    }

    #[test]
    fn grid2_contact_graph() {
        // K_{2,2} segments: 7 active fragments, 6 contact edges (one internal
        // piece stays inactive because it shares its trapezoid).
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
        let (fs, g) = pipeline_graph(&inst);
        assert_eq!(g.n(), 7);
        assert_eq!(g.m(), 6);
        assert!(euler_check(&g));

        // Oracle: edges equal brute-force touching pairs of active fragments
        // from different segments.
        let mut expected = BTreeSet::new();
        let actives: Vec<_> = fs.fragments.iter().filter(|f| f.is_active()).collect();
        for i in 0..actives.len() {
            for j in (i + 1)..actives.len() {
                let (a, b) = (actives[i], actives[j]);
                if a.segment_id == b.segment_id {
                    continue;
                }
                let sa = Segment { id: 0, p: a.p.clone(), q: a.q.clone(), color: 0, weight: one() };
                let sb = Segment { id: 1, p: b.p.clone(), q: b.q.clone(), color: 0, weight: one() };
                if segments_intersect(&sa, &sb) {
                    expected.insert((i.min(j), i.max(j)));
                }
            }
        }
        assert_eq!(g.m(), expected.len());
    }

    #[test]
    fn euler_on_synthetic_graphs() {
        // K4 with a planar rotation.
        let k4 = EmbeddedPlanarGraph::from_rotation(
            alloc::vec![
                alloc::vec![1, 2, 3],
                alloc::vec![2, 0, 3],
                alloc::vec![0, 1, 3],
                alloc::vec![0, 2, 1],
            ],
            alloc::vec![frac(1, 4); 4],
        );
        assert!(euler_check(&k4));

        // K5 cannot be planar under any rotation.
        let mut rot = Vec::new();
        for u in 0..5u32 {
            rot.push((0..5).filter(|&v| v != u).collect::<Vec<_>>());
        }
        let k5 = EmbeddedPlanarGraph::from_rotation(rot, alloc::vec![frac(1, 5); 5]);
        assert!(!euler_check(&k5));
    }

    #[test]
    fn random_instances_match_brute_force_and_stay_planar() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        for round in 0..25 {
            let target = if round == 0 { 200 } else { 40 };
            let mut segs = Vec::new();
            let mut used_v = alloc::vec::Vec::new();
            let mut used_h = alloc::vec::Vec::new();
            let mut id = 0;
            while id < target {
                if rng.gen_bool(0.5) {
                    let x = rng.gen_range(0..(4 * target as i64)) * 2;
                    if used_v.contains(&x) {
                        continue;
                    }
                    used_v.push(x);
                    segs.push(seg(
                        id,
                        (x, rng.gen_range(-40..0i64) * 2 + 1),
                        (x, rng.gen_range(1..40i64) * 2 + 1),
                        0,
                    ));
                } else {
                    let y = rng.gen_range(-40..40i64) * 2;
                    if used_h.contains(&y) {
                        continue;
                    }
                    used_h.push(y);
                    segs.push(seg(
                        id,
                        (rng.gen_range(-(2 * target as i64)..0) * 2 + 1, y),
                        (rng.gen_range(1..(2 * target as i64)) * 2 + 1, y),
                        1,
                    ));
                }
                id += 1;
            }
            let inst = ColoredSegmentInstance::new(
                segs,
                alloc::vec![Direction::new(0, 1).unwrap(), Direction::new(1, 0).unwrap()],
            )
            .unwrap();
            let (fs, g) = pipeline_graph(&inst);
            assert!(euler_check(&g));

            let actives: Vec<_> = fs.fragments.iter().filter(|f| f.is_active()).collect();
            let mut expected = 0usize;
            for i in 0..actives.len() {
                for j in (i + 1)..actives.len() {
                    let (a, b) = (actives[i], actives[j]);
                    if a.segment_id == b.segment_id {
                        continue;
                    }
                    let sa =
                        Segment { id: 0, p: a.p.clone(), q: a.q.clone(), color: 0, weight: one() };
                    let sb =
                        Segment { id: 1, p: b.p.clone(), q: b.q.clone(), color: 0, weight: one() };
                    if segments_intersect(&sa, &sb) {
                        expected += 1;
                    }
                }
            }
            assert_eq!(g.m(), expected);
            if g.n() >= 3 {
                assert!(g.m() <= 3 * g.n() - 6);
            }
        }
    }
}
