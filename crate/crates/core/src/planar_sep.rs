//! Weighted planar node separator.
//!
//! The full construction, not a levels-only heuristic: per heavy component,
//! BFS levels around the weighted median, two cheap bounding levels, the
//! middle band contracted/trimmed into a planar graph of small tree radius,
//! triangulation, and a fundamental-cycle scan that picks the non-tree edge
//! minimizing the heavier enclosed side. Pieces are packed greedily into the
//! two parts. Everything runs on exact rational weights.
//!
//! Inside weights for all fundamental cycles come from the interdigitating
//! dual tree: anchor every vertex at the dual-LCA of its incident faces; the
//! strictly-enclosed weight of the cycle of a non-tree edge is then the
//! anchored-weight sum of the dual subtree hanging under that edge.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;

use crate::contact::EmbeddedPlanarGraph;
use crate::coord::{frac, zero, Coord};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeparatorResult {
    pub separator: Vec<u32>,
    pub part_a: Vec<u32>,
    pub part_b: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PlanarSepError {
    Disconnected,
    NegativeWeight,
    WeightsExceedOne,
    NotPlanar,
    TriangulationStuck,
}

impl fmt::Display for PlanarSepError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlanarSepError::Disconnected => write!(f, "graph must be connected"),
            PlanarSepError::NegativeWeight => write!(f, "negative node weight"),
            PlanarSepError::WeightsExceedOne => write!(f, "node weights sum to more than one"),
            PlanarSepError::NotPlanar => write!(f, "rotation system is not planar"),
            PlanarSepError::TriangulationStuck => write!(f, "face admits no chord"),
        }
    }
}

// ---------------------------------------------------------------------------
// Dart-based embedding with surgery (deletion, contraction, chord insertion).

const NIL: u32 = u32::MAX;

#[derive(Debug, Clone)]
struct Emb {
    origin: Vec<u32>,
    rot_next: Vec<u32>,
    rot_prev: Vec<u32>,
    dart_alive: Vec<bool>,
    node_alive: Vec<bool>,
    any_dart: Vec<u32>,
    synthetic: Vec<bool>,
}

impl Emb {
    fn from_rotation(rotation: &[Vec<u32>]) -> Self {
        let n = rotation.len();
        let mut pair_of: BTreeMap<(u32, u32), u32> = BTreeMap::new();
        let mut next_edge = 0u32;
        for (u, nbrs) in rotation.iter().enumerate() {
            for &v in nbrs {
                let key = ((u as u32).min(v), (u as u32).max(v));
                pair_of.entry(key).or_insert_with(|| {
                    let e = next_edge;
                    next_edge += 1;
                    e
                });
            }
        }
        let darts = (next_edge as usize) * 2;
        let mut emb = Emb {
            origin: alloc::vec![NIL; darts],
            rot_next: alloc::vec![NIL; darts],
            rot_prev: alloc::vec![NIL; darts],
            dart_alive: alloc::vec![true; darts],
            node_alive: alloc::vec![true; n],
            any_dart: alloc::vec![NIL; n],
            synthetic: alloc::vec![false; next_edge as usize],
        };
        for (u, nbrs) in rotation.iter().enumerate() {
            let u = u as u32;
            let dart_list: Vec<u32> = nbrs
                .iter()
                .map(|&v| {
                    let e = pair_of[&(u.min(v), u.max(v))];
                    if u < v {
                        2 * e
                    } else {
                        2 * e + 1
                    }
                })
                .collect();
            for &d in &dart_list {
                emb.origin[d as usize] = u;
            }
            let k = dart_list.len();
            for i in 0..k {
                emb.rot_next[dart_list[i] as usize] = dart_list[(i + 1) % k];
                emb.rot_prev[dart_list[i] as usize] = dart_list[(i + k - 1) % k];
            }
            if k > 0 {
                emb.any_dart[u as usize] = dart_list[0];
            }
        }
        emb
    }

    fn twin(d: u32) -> u32 {
        d ^ 1
    }

    fn head(&self, d: u32) -> u32 {
        self.origin[Self::twin(d) as usize]
    }

    /// Next dart in the face orbit (rotation successor of the twin).
    fn face_next(&self, d: u32) -> u32 {
        self.rot_next[Self::twin(d) as usize]
    }

    fn unlink(&mut self, d: u32) {
        let u = self.origin[d as usize] as usize;
        let nxt = self.rot_next[d as usize];
        let prv = self.rot_prev[d as usize];
        if nxt == d {
            self.any_dart[u] = NIL;
        } else {
            self.rot_next[prv as usize] = nxt;
            self.rot_prev[nxt as usize] = prv;
            if self.any_dart[u] == d {
                self.any_dart[u] = nxt;
            }
        }
        self.dart_alive[d as usize] = false;
    }

    fn delete_edge(&mut self, d: u32) {
        self.unlink(d);
        self.unlink(Self::twin(d));
    }

    fn delete_node(&mut self, u: u32) {
        while self.any_dart[u as usize] != NIL {
            self.delete_edge(self.any_dart[u as usize]);
        }
        self.node_alive[u as usize] = false;
    }

    /// Contracts the edge behind dart `d`, merging its head into its origin.
    fn contract_edge(&mut self, d: u32) {
        let u = self.origin[d as usize];
        let v = self.head(d);
        debug_assert_ne!(u, v, "contracting a self-loop");
        let t = Self::twin(d);
        // Splice v's rotation (minus t) into u's at d's position.
        let v_first = self.rot_next[t as usize];
        if v_first == t {
            // v had only the contracted edge.
            self.unlink(d);
        } else {
            let v_last = self.rot_prev[t as usize];
            let u_prev = self.rot_prev[d as usize];
            let u_next = self.rot_next[d as usize];
            if u_next == d {
                // u had only the contracted edge: v's ring becomes u's.
                self.rot_next[v_last as usize] = v_first;
                self.rot_prev[v_first as usize] = v_last;
                self.any_dart[u as usize] = v_first;
            } else {
                self.rot_next[u_prev as usize] = v_first;
                self.rot_prev[v_first as usize] = u_prev;
                self.rot_next[v_last as usize] = u_next;
                self.rot_prev[u_next as usize] = v_last;
                if self.any_dart[u as usize] == d {
                    self.any_dart[u as usize] = u_next;
                }
            }
            self.dart_alive[d as usize] = false;
            let mut cur = v_first;
            loop {
                self.origin[cur as usize] = u;
                cur = self.rot_next[cur as usize];
                if cur == v_first {
                    break;
                }
            }
        }
        self.dart_alive[t as usize] = false;
        self.any_dart[v as usize] = NIL;
        self.node_alive[v as usize] = false;
    }

    /// Removes self-loops and duplicate parallel edges, keeping the
    /// smallest-id pair per neighbor set.
    fn simplify(&mut self) {
        let mut keep: BTreeMap<(u32, u32), u32> = BTreeMap::new();
        let mut drop: Vec<u32> = Vec::new();
        for e in 0..self.synthetic.len() as u32 {
            let d = 2 * e;
            if !self.dart_alive[d as usize] {
                continue;
            }
            let u = self.origin[d as usize];
            let v = self.head(d);
            if u == v {
                drop.push(d);
                continue;
            }
            let key = (u.min(v), u.max(v));
            if keep.contains_key(&key) {
                drop.push(d);
            } else {
                keep.insert(key, e);
            }
        }
        for d in drop {
            self.delete_edge(d);
        }
    }

    /// Inserts a chord; each dart lands right after its anchor dart in the
    /// anchor's rotation ring. Returns the first new dart.
    fn add_chord(&mut self, after_at_u: u32, after_at_v: u32) -> u32 {
        let e = self.synthetic.len() as u32;
        self.synthetic.push(true);
        let a = 2 * e;
        let b = 2 * e + 1;
        self.origin.extend_from_slice(&[NIL, NIL]);
        self.rot_next.extend_from_slice(&[NIL, NIL]);
        self.rot_prev.extend_from_slice(&[NIL, NIL]);
        self.dart_alive.extend_from_slice(&[true, true]);
        for (dart, anchor) in [(a, after_at_u), (b, after_at_v)] {
            let u = self.origin[anchor as usize];
            self.origin[dart as usize] = u;
            let nxt = self.rot_next[anchor as usize];
            self.rot_next[anchor as usize] = dart;
            self.rot_prev[dart as usize] = anchor;
            self.rot_next[dart as usize] = nxt;
            self.rot_prev[nxt as usize] = dart;
        }
        a
    }

    fn alive_nodes(&self) -> Vec<u32> {
        (0..self.node_alive.len() as u32).filter(|&u| self.node_alive[u as usize]).collect()
    }

    fn darts_of(&self, u: u32) -> Vec<u32> {
        let mut out = Vec::new();
        let first = self.any_dart[u as usize];
        if first == NIL {
            return out;
        }
        let mut cur = first;
        loop {
            out.push(cur);
            cur = self.rot_next[cur as usize];
            if cur == first {
                break;
            }
        }
        out
    }

    fn neighbors(&self, u: u32) -> Vec<u32> {
        self.darts_of(u).into_iter().map(|d| self.head(d)).collect()
    }

    fn to_rotation(&self) -> (Vec<Vec<u32>>, Vec<(u32, u32)>) {
        let n = self.node_alive.len();
        let mut rotation = Vec::with_capacity(n);
        let mut synth = Vec::new();
        for u in 0..n as u32 {
            rotation.push(self.neighbors(u));
        }
        for e in 0..self.synthetic.len() as u32 {
            if self.synthetic[e as usize] && self.dart_alive[(2 * e) as usize] {
                let u = self.origin[(2 * e) as usize];
                let v = self.head(2 * e);
                synth.push((u.min(v), u.max(v)));
            }
        }
        (rotation, synth)
    }

    /// Triangulates every face; assumes a connected alive subgraph on at
    /// least three nodes. New edges are marked synthetic.
    fn triangulate(&mut self) -> Result<(), PlanarSepError> {
        let mut stack: Vec<u32> = Vec::new();
        let mut seen = alloc::vec![false; self.origin.len()];
        for d in 0..self.origin.len() as u32 {
            if !self.dart_alive[d as usize] || seen[d as usize] {
                continue;
            }
            let mut cur = d;
            loop {
                seen[cur as usize] = true;
                cur = self.face_next(cur);
                if cur == d {
                    break;
                }
            }
            stack.push(d);
        }

        while let Some(start) = stack.pop() {
            if !self.dart_alive[start as usize] {
                continue;
            }
            let mut face: Vec<u32> = Vec::new();
            let mut cur = start;
            loop {
                face.push(cur);
                cur = self.face_next(cur);
                if cur == start {
                    break;
                }
            }
            let k = face.len();
            if k <= 3 {
                continue;
            }
            // A chord between two corners whose vertices differ and are not
            // yet adjacent; closest corners first.
            let mut found: Option<(usize, usize)> = None;
            'outer: for gap in 2..k - 1 {
                for i in 0..k {
                    let j = (i + gap) % k;
                    let (vi, vj) =
                        (self.origin[face[i] as usize], self.origin[face[j] as usize]);
                    if vi == vj {
                        continue;
                    }
                    if self.neighbors(vi).contains(&vj) {
                        continue;
                    }
                    found = Some((i, j));
                    break 'outer;
                }
            }
            let Some((i, j)) = found else {
                return Err(PlanarSepError::TriangulationStuck);
            };
            // The chord dart at a corner goes right after the twin of the
            // arriving face dart, which splits the orbit cleanly.
            let arrive_i = Self::twin(face[(i + k - 1) % k]);
            let arrive_j = Self::twin(face[(j + k - 1) % k]);
            let a = self.add_chord(arrive_i, arrive_j);
            stack.push(a);
            stack.push(Self::twin(a));
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Public triangulation.

#[derive(Debug, Clone)]
pub struct Triangulated {
    pub graph: EmbeddedPlanarGraph,
    pub added: Vec<(u32, u32)>,
}

/// Adds chords until every face (including the outer one) is a triangle.
/// Requires a connected planar embedding; graphs with fewer than three nodes
/// are returned unchanged.
pub fn triangulate_embedded(g: &EmbeddedPlanarGraph) -> Result<Triangulated, PlanarSepError> {
    if !is_connected(g) {
        return Err(PlanarSepError::Disconnected);
    }
    if !crate::contact::euler_check(g) {
        return Err(PlanarSepError::NotPlanar);
    }
    let mut emb = Emb::from_rotation(&g.rotation);
    if g.n() >= 3 {
        emb.triangulate()?;
    }
    let (rotation, added) = emb.to_rotation();
    let mut out = EmbeddedPlanarGraph::from_rotation(rotation, g.weights.clone());
    out.payload = g.payload.clone();
    Ok(Triangulated { graph: out, added })
}

fn is_connected(g: &EmbeddedPlanarGraph) -> bool {
    let n = g.n();
    if n == 0 {
        return true;
    }
    let mut seen = alloc::vec![false; n];
    let mut queue = alloc::collections::VecDeque::new();
    seen[0] = true;
    queue.push_back(0usize);
    let mut count = 1;
    while let Some(u) = queue.pop_front() {
        for &v in &g.rotation[u] {
            if !seen[v as usize] {
                seen[v as usize] = true;
                count += 1;
                queue.push_back(v as usize);
            }
        }
    }
    count == n
}

// ---------------------------------------------------------------------------
// The separator itself.

/// Partitions the nodes into a separator S and parts A, B with no A-B edge,
/// part weights at most 2/3, and |S| <= 4 ceil(sqrt(N)) + 10.
pub fn planar_separator(g: &EmbeddedPlanarGraph) -> Result<SeparatorResult, PlanarSepError> {
    for w in &g.weights {
        if *w < zero() {
            return Err(PlanarSepError::NegativeWeight);
        }
    }
    if g.total_weight() > crate::coord::one() {
        return Err(PlanarSepError::WeightsExceedOne);
    }

    // Connected components, nodes listed in ascending id order.
    let n = g.n();
    let mut comp = alloc::vec![usize::MAX; n];
    let mut comps: Vec<Vec<u32>> = Vec::new();
    for start in 0..n {
        if comp[start] != usize::MAX {
            continue;
        }
        let id = comps.len();
        let mut nodes = alloc::vec![start as u32];
        comp[start] = id;
        let mut head = 0;
        while head < nodes.len() {
            let u = nodes[head] as usize;
            head += 1;
            for &v in &g.rotation[u] {
                if comp[v as usize] == usize::MAX {
                    comp[v as usize] = id;
                    nodes.push(v);
                }
            }
        }
        nodes.sort_unstable();
        comps.push(nodes);
    }

    let two_thirds = frac(2, 3);
    let mut separator: Vec<u32> = Vec::new();
    let mut pieces: Vec<(Coord, Vec<u32>)> = Vec::new();

    for nodes in comps {
        let w: Coord = nodes.iter().fold(zero(), |a, &u| a + &g.weights[u as usize]);
        if w <= two_thirds {
            pieces.push((w, nodes));
        } else {
            let (s, mut ps) = split_component(g, &nodes)?;
            separator.extend(s);
            pieces.append(&mut ps);
        }
    }

    // Greedy packing: heaviest piece first, into the lighter side.
    pieces.sort_by(|l, r| r.0.cmp(&l.0).then_with(|| l.1.cmp(&r.1)));
    let mut part_a: Vec<u32> = Vec::new();
    let mut part_b: Vec<u32> = Vec::new();
    let (mut wa, mut wb) = (zero(), zero());
    for (w, nodes) in pieces {
        if wa <= wb {
            wa = wa + w;
            part_a.extend(nodes);
        } else {
            wb = wb + w;
            part_b.extend(nodes);
        }
    }
    separator.sort_unstable();
    part_a.sort_unstable();
    part_b.sort_unstable();

    let result = SeparatorResult { separator, part_a, part_b };
    debug_assert!(check_separator(g, &result).is_ok(), "separator failed self-check");
    Ok(result)
}

/// One application of the level/cycle construction to a heavy connected
/// component. Returns separator nodes and pieces of weight at most 2/3.
fn split_component(
    g: &EmbeddedPlanarGraph,
    nodes: &[u32],
) -> Result<(Vec<u32>, Vec<(Coord, Vec<u32>)>), PlanarSepError> {
    let local_of: BTreeMap<u32, u32> =
        nodes.iter().enumerate().map(|(i, &u)| (u, i as u32)).collect();
    let nl = nodes.len();
    let mut rotation: Vec<Vec<u32>> = Vec::with_capacity(nl);
    for &u in nodes {
        rotation.push(g.rotation[u as usize].iter().map(|v| local_of[v]).collect());
    }
    let weights: Vec<Coord> = nodes.iter().map(|&u| g.weights[u as usize].clone()).collect();
    let total: Coord = weights.iter().fold(zero(), |a, w| a + w);

    // BFS levels from local node 0 (the smallest global id).
    let mut level = alloc::vec![usize::MAX; nl];
    let mut order: Vec<u32> = alloc::vec![0];
    level[0] = 0;
    let mut head = 0;
    while head < order.len() {
        let u = order[head] as usize;
        head += 1;
        for &v in &rotation[u] {
            if level[v as usize] == usize::MAX {
                level[v as usize] = level[u] + 1;
                order.push(v);
            }
        }
    }
    let max_level = order.iter().map(|&u| level[u as usize]).max().unwrap();
    let mut level_nodes: Vec<Vec<u32>> = alloc::vec![Vec::new(); max_level + 1];
    let mut level_weight: Vec<Coord> = alloc::vec![zero(); max_level + 1];
    for u in 0..nl {
        level_nodes[level[u]].push(u as u32);
        level_weight[level[u]] = &level_weight[level[u]] + &weights[u];
    }

    // Weighted median level, then cheap bounding levels by node counts.
    let half = &total / crate::coord::two();
    let mut cum = zero();
    let mut l1 = max_level;
    for (l, w) in level_weight.iter().enumerate() {
        cum = cum + w;
        if cum >= half {
            l1 = l;
            break;
        }
    }
    let cost_down = |l: usize| -> usize { level_nodes[l].len() + 2 * (l1 - l) };
    let mut l0 = l1;
    for l in (0..=l1).rev() {
        if cost_down(l) < cost_down(l0) {
            l0 = l;
        }
    }
    // l2 ranges over (l1, max_level + 1]; the sentinel level is empty.
    let cost_up = |l: usize| -> usize {
        let cnt = if l <= max_level { level_nodes[l].len() } else { 0 };
        cnt + 2 * (l - l1 - 1)
    };
    let mut l2 = l1 + 1;
    for l in (l1 + 1)..=(max_level + 1) {
        if cost_up(l) < cost_up(l2) {
            l2 = l;
        }
    }

    let mut separator: Vec<u32> = Vec::new();
    let mut pieces: Vec<(Coord, Vec<u32>)> = Vec::new();
    for &u in &level_nodes[l0] {
        separator.push(nodes[u as usize]);
    }
    if l2 <= max_level {
        for &u in &level_nodes[l2] {
            separator.push(nodes[u as usize]);
        }
    }

    let push_piece =
        |pieces: &mut Vec<(Coord, Vec<u32>)>, weights: &[Coord], locals: Vec<u32>| {
            if locals.is_empty() {
                return;
            }
            let w: Coord = locals.iter().fold(zero(), |a, &u| a + &weights[u as usize]);
            pieces.push((w, locals.iter().map(|&u| nodes[u as usize]).collect()));
        };

    let below: Vec<u32> = (0..l0).flat_map(|l| level_nodes[l].iter().copied()).collect();
    let above: Vec<u32> =
        ((l2 + 1)..=max_level).flat_map(|l| level_nodes[l].iter().copied()).collect();
    push_piece(&mut pieces, &weights, above);

    let middle: Vec<u32> =
        ((l0 + 1)..l2.min(max_level + 1)).flat_map(|l| level_nodes[l].iter().copied()).collect();
    let w_mid: Coord = middle.iter().fold(zero(), |a, &u| a + &weights[u as usize]);
    let two_thirds = frac(2, 3);
    if w_mid <= two_thirds {
        push_piece(&mut pieces, &weights, middle);
        push_piece(&mut pieces, &weights, below);
        return Ok((separator, pieces));
    }

    // The below band's weight rides on the contracted supernode through the
    // cycle split.
    let w_below: Coord = below.iter().fold(zero(), |a, &u| a + &weights[u as usize]);

    // Shrunk embedding: contract levels <= l0 into the root, delete levels
    // >= l2, drop loops and parallels.
    let mut emb = Emb::from_rotation(&rotation);
    let mut parent = alloc::vec![NIL; nl];
    for &u in &order {
        for &v in &rotation[u as usize] {
            if level[v as usize] == level[u as usize] + 1 && parent[v as usize] == NIL {
                parent[v as usize] = u;
            }
        }
    }
    for l in (1..=l0).rev() {
        for &u in &level_nodes[l] {
            let p = {
                // After contractions every ancestor collapsed into local 0 or
                // an uncontracted node; the immediate parent still holds its
                // darts because deeper levels were contracted first.
                parent[u as usize]
            };
            let d = emb
                .darts_of(p)
                .into_iter()
                .find(|&d| emb.head(d) == u)
                .expect("tree edge dart survives until contraction");
            emb.contract_edge(d);
        }
    }
    for l in l2..=max_level {
        for &u in &level_nodes[l] {
            emb.delete_node(u);
        }
    }
    emb.simplify();

    let root = 0u32;
    let alive = emb.alive_nodes();
    if alive.len() <= 2 {
        for &u in &middle {
            separator.push(nodes[u as usize]);
        }
        push_piece(&mut pieces, &weights, below);
        return Ok((separator, pieces));
    }

    emb.triangulate()?;

    let scan_weight = |u: u32| -> Coord {
        if u == root {
            w_below.clone()
        } else {
            weights[u as usize].clone()
        }
    };
    let w_star = &w_mid + &w_below;

    let scan = CycleScan::build(&emb, root, &scan_weight)?;
    let Some(best) = scan.best_edge(&w_star) else {
        return Err(PlanarSepError::NotPlanar);
    };

    let (cycle_nodes, inside_flag) = scan.split(best);
    for &u in &cycle_nodes {
        if u != root {
            separator.push(nodes[u as usize]);
        }
    }
    let mut inside_piece: Vec<u32> = Vec::new();
    let mut outside_piece: Vec<u32> = Vec::new();
    let mut below_side: Option<bool> = None;
    for &u in &alive {
        if cycle_nodes.binary_search(&u).is_ok() {
            continue;
        }
        if u == root {
            below_side = Some(inside_flag[u as usize]);
            continue;
        }
        if inside_flag[u as usize] {
            inside_piece.push(u);
        } else {
            outside_piece.push(u);
        }
    }
    // The below band joins whichever side the supernode landed on; with the
    // supernode on the cycle the band stands alone.
    match below_side {
        Some(true) => inside_piece.extend(below),
        Some(false) => outside_piece.extend(below),
        None => push_piece(&mut pieces, &weights, below),
    }
    push_piece(&mut pieces, &weights, inside_piece);
    push_piece(&mut pieces, &weights, outside_piece);

    Ok((separator, pieces))
}

// ---------------------------------------------------------------------------
// Fundamental-cycle scan over the dual tree.

struct CycleScan {
    parent: Vec<u32>,
    depth: Vec<u32>,
    up: Vec<Vec<u32>>,
    path_weight: Vec<Coord>,
    node_weight: Vec<Coord>,
    /// Non-tree edges as (dart, u, v).
    nontree: Vec<(u32, u32, u32)>,
    #[cfg_attr(not(test), allow(dead_code))]
    face_of: Vec<u32>,
    tin: Vec<u32>,
    tout: Vec<u32>,
    subtree_weight: Vec<Coord>,
    anchor: Vec<u32>,
    child_face: Vec<u32>,
}

impl CycleScan {
    fn build(
        emb: &Emb,
        root: u32,
        weight: &dyn Fn(u32) -> Coord,
    ) -> Result<CycleScan, PlanarSepError> {
        let n_slots = emb.node_alive.len();
        let mut parent = alloc::vec![NIL; n_slots];
        let mut parent_dart = alloc::vec![NIL; n_slots];
        let mut depth = alloc::vec![0u32; n_slots];
        let mut path_weight: Vec<Coord> = alloc::vec![zero(); n_slots];
        let mut order = alloc::vec![root];
        let mut visited = alloc::vec![false; n_slots];
        visited[root as usize] = true;
        path_weight[root as usize] = weight(root);
        let mut head = 0;
        while head < order.len() {
            let u = order[head];
            head += 1;
            for d in emb.darts_of(u) {
                let v = emb.head(d);
                if !visited[v as usize] {
                    visited[v as usize] = true;
                    parent[v as usize] = u;
                    parent_dart[v as usize] = d;
                    depth[v as usize] = depth[u as usize] + 1;
                    path_weight[v as usize] = &path_weight[u as usize] + weight(v);
                    order.push(v);
                }
            }
        }

        let is_tree_dart = |d: u32| -> bool {
            let u = emb.origin[d as usize];
            let v = emb.head(d);
            parent_dart[v as usize] == d || parent_dart[u as usize] == Emb::twin(d)
        };

        // Faces.
        let mut face_of = alloc::vec![NIL; emb.origin.len()];
        let mut n_faces = 0u32;
        for d in 0..emb.origin.len() as u32 {
            if !emb.dart_alive[d as usize] || face_of[d as usize] != NIL {
                continue;
            }
            let f = n_faces;
            n_faces += 1;
            let mut cur = d;
            loop {
                face_of[cur as usize] = f;
                cur = emb.face_next(cur);
                if cur == d {
                    break;
                }
            }
        }

        // Dual adjacency through non-tree edges.
        let mut nontree: Vec<(u32, u32, u32)> = Vec::new();
        let mut dual_adj: Vec<Vec<(u32, u32)>> = alloc::vec![Vec::new(); n_faces as usize];
        for e in 0..(emb.origin.len() / 2) as u32 {
            let d = 2 * e;
            if !emb.dart_alive[d as usize] || is_tree_dart(d) {
                continue;
            }
            let u = emb.origin[d as usize];
            let v = emb.head(d);
            let idx = nontree.len() as u32;
            nontree.push((d, u, v));
            let (fa, fb) = (face_of[d as usize], face_of[Emb::twin(d) as usize]);
            dual_adj[fa as usize].push((fb, idx));
            dual_adj[fb as usize].push((fa, idx));
        }

        // Root the dual tree at face 0.
        let dual_root = 0u32;
        let mut dual_parent = alloc::vec![NIL; n_faces as usize];
        let mut dual_parent_edge = alloc::vec![NIL; n_faces as usize];
        let mut dual_order: Vec<u32> = alloc::vec![dual_root];
        let mut dual_seen = alloc::vec![false; n_faces as usize];
        dual_seen[dual_root as usize] = true;
        let mut head = 0;
        while head < dual_order.len() {
            let f = dual_order[head];
            head += 1;
            for &(g2, idx) in &dual_adj[f as usize] {
                if !dual_seen[g2 as usize] {
                    dual_seen[g2 as usize] = true;
                    dual_parent[g2 as usize] = f;
                    dual_parent_edge[g2 as usize] = idx;
                    dual_order.push(g2);
                }
            }
        }
        if dual_seen.iter().any(|s| !s) {
            return Err(PlanarSepError::NotPlanar);
        }

        // Euler-tour intervals, iteratively.
        let mut children: Vec<Vec<u32>> = alloc::vec![Vec::new(); n_faces as usize];
        for f in 0..n_faces {
            if dual_parent[f as usize] != NIL {
                children[dual_parent[f as usize] as usize].push(f);
            }
        }
        let mut tin = alloc::vec![0u32; n_faces as usize];
        let mut tout = alloc::vec![0u32; n_faces as usize];
        let mut clock = 0u32;
        let mut stack: Vec<(u32, usize)> = alloc::vec![(dual_root, 0)];
        while let Some(top) = stack.last_mut() {
            let (f, ci) = (top.0, top.1);
            if ci == 0 {
                tin[f as usize] = clock;
                clock += 1;
            }
            if ci < children[f as usize].len() {
                top.1 += 1;
                let c = children[f as usize][ci];
                stack.push((c, 0));
            } else {
                tout[f as usize] = clock;
                clock += 1;
                stack.pop();
            }
        }

        // Binary lifting for dual LCA.
        let logf = (usize::BITS - (n_faces as usize).leading_zeros()).max(1) as usize;
        let mut dual_up: Vec<Vec<u32>> = alloc::vec![alloc::vec![NIL; n_faces as usize]; logf];
        for f in 0..n_faces as usize {
            dual_up[0][f] = dual_parent[f];
        }
        for k in 1..logf {
            for f in 0..n_faces as usize {
                let mid = dual_up[k - 1][f];
                dual_up[k][f] = if mid == NIL { NIL } else { dual_up[k - 1][mid as usize] };
            }
        }
        let mut dual_depth = alloc::vec![0u32; n_faces as usize];
        for &f in &dual_order {
            if dual_parent[f as usize] != NIL {
                dual_depth[f as usize] = dual_depth[dual_parent[f as usize] as usize] + 1;
            }
        }
        let dual_lca = |mut a: u32, mut b: u32| -> u32 {
            if dual_depth[a as usize] < dual_depth[b as usize] {
                core::mem::swap(&mut a, &mut b);
            }
            let mut diff = dual_depth[a as usize] - dual_depth[b as usize];
            let mut k = 0;
            while diff > 0 {
                if diff & 1 == 1 {
                    a = dual_up[k][a as usize];
                }
                diff >>= 1;
                k += 1;
            }
            if a == b {
                return a;
            }
            for k in (0..logf).rev() {
                if dual_up[k][a as usize] != dual_up[k][b as usize] {
                    a = dual_up[k][a as usize];
                    b = dual_up[k][b as usize];
                }
            }
            dual_up[0][a as usize]
        };

        // Anchors and anchored subtree weights.
        let mut anchor = alloc::vec![NIL; n_slots];
        let mut anchored_weight: Vec<Coord> = alloc::vec![zero(); n_faces as usize];
        for u in emb.alive_nodes() {
            let mut a: Option<u32> = None;
            for d in emb.darts_of(u) {
                let f = face_of[d as usize];
                a = Some(match a {
                    None => f,
                    Some(prev) => dual_lca(prev, f),
                });
            }
            let a = a.expect("triangulated graph has no isolated nodes");
            anchor[u as usize] = a;
            anchored_weight[a as usize] = &anchored_weight[a as usize] + &weight(u);
        }
        let mut subtree_weight = anchored_weight;
        for &f in dual_order.iter().rev() {
            if dual_parent[f as usize] != NIL {
                let w = subtree_weight[f as usize].clone();
                let p = dual_parent[f as usize] as usize;
                subtree_weight[p] = &subtree_weight[p] + &w;
            }
        }

        let mut child_face = alloc::vec![NIL; nontree.len()];
        for f in 0..n_faces {
            let idx = dual_parent_edge[f as usize];
            if idx != NIL {
                child_face[idx as usize] = f;
            }
        }

        // Primal binary lifting for cycle paths.
        let logn = (usize::BITS - n_slots.leading_zeros()).max(1) as usize;
        let mut up: Vec<Vec<u32>> = alloc::vec![alloc::vec![NIL; n_slots]; logn];
        for u in 0..n_slots {
            up[0][u] = parent[u];
        }
        for k in 1..logn {
            for u in 0..n_slots {
                let mid = up[k - 1][u];
                up[k][u] = if mid == NIL { NIL } else { up[k - 1][mid as usize] };
            }
        }

        let node_weight = (0..n_slots as u32).map(weight).collect();
        Ok(CycleScan {
            parent,
            depth,
            up,
            path_weight,
            node_weight,
            nontree,
            face_of,
            tin,
            tout,
            subtree_weight,
            anchor,
            child_face,
        })
    }

    fn lca(&self, mut a: u32, mut b: u32) -> u32 {
        if self.depth[a as usize] < self.depth[b as usize] {
            core::mem::swap(&mut a, &mut b);
        }
        let mut diff = self.depth[a as usize] - self.depth[b as usize];
        let mut k = 0;
        while diff > 0 {
            if diff & 1 == 1 {
                a = self.up[k][a as usize];
            }
            diff >>= 1;
            k += 1;
        }
        if a == b {
            return a;
        }
        for k in (0..self.up.len()).rev() {
            if self.up[k][a as usize] != self.up[k][b as usize] {
                a = self.up[k][a as usize];
                b = self.up[k][b as usize];
            }
        }
        self.up[0][a as usize]
    }

    fn in_subtree(&self, idx: usize, face: u32) -> bool {
        let c = self.child_face[idx];
        self.tin[c as usize] <= self.tin[face as usize]
            && self.tin[face as usize] < self.tout[c as usize]
    }

    fn cycle_weight(&self, u: u32, v: u32) -> Coord {
        let l = self.lca(u, v);
        &self.path_weight[u as usize] + &self.path_weight[v as usize]
            - crate::coord::two() * &self.path_weight[l as usize]
            + &self.node_weight[l as usize]
    }

    /// The non-tree edge whose fundamental cycle minimizes the heavier side;
    /// only edges with both sides at most 2/3 of the scan weight qualify.
    fn best_edge(&self, w_star: &Coord) -> Option<usize> {
        let two_thirds = frac(2, 3) * w_star;
        let mut best: Option<(Coord, usize)> = None;
        for (idx, &(_, u, v)) in self.nontree.iter().enumerate() {
            let w_in = self.subtree_weight[self.child_face[idx] as usize].clone();
            let w_cycle = self.cycle_weight(u, v);
            let w_out = w_star - &w_in - &w_cycle;
            let m = if w_in >= w_out { w_in } else { w_out };
            if m > two_thirds {
                continue;
            }
            if best.as_ref().map_or(true, |(bm, _)| m < *bm) {
                best = Some((m, idx));
            }
        }
        best.map(|(_, idx)| idx)
    }

    /// Sorted cycle nodes of the chosen edge plus a per-slot flag for lying
    /// strictly inside it.
    fn split(&self, idx: usize) -> (Vec<u32>, Vec<bool>) {
        let (_, u, v) = self.nontree[idx];
        let l = self.lca(u, v);
        let mut cycle = Vec::new();
        let mut x = u;
        while x != l {
            cycle.push(x);
            x = self.parent[x as usize];
        }
        let mut y = v;
        while y != l {
            cycle.push(y);
            y = self.parent[y as usize];
        }
        cycle.push(l);
        cycle.sort_unstable();
        let inside: Vec<bool> = (0..self.anchor.len())
            .map(|x| {
                let a = self.anchor[x];
                a != NIL && self.in_subtree(idx, a)
            })
            .collect();
        (cycle, inside)
    }
}

// ---------------------------------------------------------------------------
// Independent validity checker.

/// Verifies set disjointness and coverage, the edge-cut condition by a full
/// edge scan, exact part weights, and the size bound.
pub fn check_separator(g: &EmbeddedPlanarGraph, r: &SeparatorResult) -> Result<(), &'static str> {
    let n = g.n();
    let mut tag = alloc::vec![0u8; n];
    let mut count = 0usize;
    for (set, code) in [(&r.separator, 1u8), (&r.part_a, 2), (&r.part_b, 3)] {
        for &u in set.iter() {
            if (u as usize) >= n {
                return Err("node id out of range");
            }
            if tag[u as usize] != 0 {
                return Err("sets are not disjoint");
            }
            tag[u as usize] = code;
            count += 1;
        }
    }
    if count != n {
        return Err("sets do not cover all nodes");
    }
    for &(u, v) in &g.edges {
        let (tu, tv) = (tag[u as usize], tag[v as usize]);
        if (tu == 2 && tv == 3) || (tu == 3 && tv == 2) {
            return Err("edge joins the two parts");
        }
    }
    let two_thirds = frac(2, 3);
    let wa: Coord = r.part_a.iter().fold(zero(), |a, &u| a + &g.weights[u as usize]);
    let wb: Coord = r.part_b.iter().fold(zero(), |a, &u| a + &g.weights[u as usize]);
    if wa > two_thirds || wb > two_thirds {
        return Err("part weight exceeds 2/3");
    }
    if r.separator.len() > separator_budget(n) {
        return Err("separator exceeds the size bound");
    }
    Ok(())
}

/// 4 ceil(sqrt(N)) + 10.
pub fn separator_budget(n: usize) -> usize {
    let mut s = 0usize;
    while s * s < n {
        s += 1;
    }
    4 * s + 10
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coord::{frac, one};

    fn cycle_graph(n: usize, weights: Vec<Coord>) -> EmbeddedPlanarGraph {
        let rot: Vec<Vec<u32>> = (0..n)
            .map(|u| alloc::vec![((u + 1) % n) as u32, ((u + n - 1) % n) as u32])
            .collect();
        EmbeddedPlanarGraph::from_rotation(rot, weights)
    }

    fn path_graph(n: usize, weights: Vec<Coord>) -> EmbeddedPlanarGraph {
        let mut rot: Vec<Vec<u32>> = alloc::vec![Vec::new(); n];
        for u in 0..n - 1 {
            rot[u].push((u + 1) as u32);
            rot[u + 1].push(u as u32);
        }
        EmbeddedPlanarGraph::from_rotation(rot, weights)
    }

    /// k x k grid with the planar rotation (right, down, left, up order is
    /// consistent CCW for the standard drawing).
    fn grid_graph(k: usize) -> EmbeddedPlanarGraph {
        let id = |r: usize, c: usize| (r * k + c) as u32;
        let mut rot: Vec<Vec<u32>> = alloc::vec![Vec::new(); k * k];
        for r in 0..k {
            for c in 0..k {
                let mut nbrs = Vec::new();
                if c + 1 < k {
                    nbrs.push(id(r, c + 1));
                }
                if r + 1 < k {
                    nbrs.push(id(r + 1, c));
                }
                if c > 0 {
                    nbrs.push(id(r, c - 1));
                }
                if r > 0 {
                    nbrs.push(id(r - 1, c));
                }
                rot[id(r, c) as usize] = nbrs;
            }
        }
        let w = frac(1, (k * k) as i64);
        EmbeddedPlanarGraph::from_rotation(rot, alloc::vec![w; k * k])
    }

    #[test]
    fn triangulate_examples() {
        let tri = cycle_graph(3, alloc::vec![frac(1, 3); 3]);
        let t = triangulate_embedded(&tri).unwrap();
        assert!(t.added.is_empty());
        assert_eq!(t.graph.m(), 3);

        // Both quadrilateral faces (inner and outer) need a chord, which
        // yields K4.
        let c4 = cycle_graph(4, alloc::vec![frac(1, 4); 4]);
        let t = triangulate_embedded(&c4).unwrap();
        assert_eq!(t.added.len(), 2);
        assert_eq!(t.graph.m(), 3 * t.graph.n() - 6);
        assert!(crate::contact::euler_check(&t.graph));

        let p3 = path_graph(3, alloc::vec![frac(1, 3); 3]);
        let t = triangulate_embedded(&p3).unwrap();
        assert_eq!(t.added.len(), 1);
        assert_eq!(t.graph.m(), 3);
        assert!(crate::contact::euler_check(&t.graph));
    }

    #[test]
    fn triangulate_grid_all_faces_three() {
        let g = grid_graph(5);
        let t = triangulate_embedded(&g).unwrap();
        assert!(crate::contact::euler_check(&t.graph));
        assert_eq!(t.graph.m(), 3 * t.graph.n() - 6);
    }

    #[test]
    fn separator_single_heavy_node() {
        let g = EmbeddedPlanarGraph::from_rotation(alloc::vec![Vec::new()], alloc::vec![one()]);
        let r = planar_separator(&g).unwrap();
        assert_eq!(r.separator, alloc::vec![0]);
        assert!(r.part_a.is_empty() && r.part_b.is_empty());
    }

    #[test]
    fn separator_path3_weighted() {
        let g = path_graph(3, alloc::vec![frac(1, 2), frac(0, 1), frac(1, 2)]);
        let r = planar_separator(&g).unwrap();
        check_separator(&g, &r).unwrap();
    }

    #[test]
    fn separator_nine_cycle() {
        let g = cycle_graph(9, alloc::vec![frac(1, 9); 9]);
        let r = planar_separator(&g).unwrap();
        check_separator(&g, &r).unwrap();
    }

    #[test]
    fn separator_grids() {
        for k in [3usize, 5, 8, 12, 20] {
            let g = grid_graph(k);
            let r = planar_separator(&g).unwrap();
            check_separator(&g, &r).unwrap();
            assert!(
                r.separator.len() <= separator_budget(g.n()),
                "grid {k}: |S| = {}",
                r.separator.len()
            );
        }
    }

    #[test]
    fn separator_heavy_node_forced_out_of_parts() {
        let mut weights = alloc::vec![frac(1, 100); 25];
        weights[12] = frac(3, 4);
        for w in weights.iter_mut().skip(13) {
            *w = frac(0, 1);
        }
        let g = {
            let grid = grid_graph(5);
            EmbeddedPlanarGraph::from_rotation(grid.rotation, weights)
        };
        let r = planar_separator(&g).unwrap();
        check_separator(&g, &r).unwrap();
    }

    #[test]
    fn separator_disconnected_packing() {
        let mut rot: Vec<Vec<u32>> = Vec::new();
        for t in 0..3u32 {
            let base = 3 * t;
            rot.push(alloc::vec![base + 1, base + 2]);
            rot.push(alloc::vec![base + 2, base]);
            rot.push(alloc::vec![base, base + 1]);
        }
        let g = EmbeddedPlanarGraph::from_rotation(rot, alloc::vec![frac(1, 9); 9]);
        let r = planar_separator(&g).unwrap();
        check_separator(&g, &r).unwrap();
        assert!(r.separator.is_empty());
        assert!(!r.part_a.is_empty() && !r.part_b.is_empty());
    }

    #[test]
    fn separator_deterministic() {
        let g = grid_graph(9);
        let r1 = planar_separator(&g).unwrap();
        let r2 = planar_separator(&g).unwrap();
        assert_eq!(r1, r2);
    }

    /// Independent oracle: the dual-subtree membership must match a dual
    /// BFS that avoids the chosen non-tree edge.
    #[test]
    fn cycle_scan_matches_dual_bfs_oracle() {
        for k in [4usize, 5, 6] {
            let g = grid_graph(k);
            let t = triangulate_embedded(&g).unwrap();
            let emb = Emb::from_rotation(&t.graph.rotation);
            let w = |u: u32| t.graph.weights[u as usize].clone();
            let scan = CycleScan::build(&emb, 0, &w).unwrap();

            for idx in 0..scan.nontree.len() {
                // Subtree sums equal the direct anchored recount.
                let inside_scan: Coord = (0..t.graph.n() as u32)
                    .filter(|&u| {
                        let a = scan.anchor[u as usize];
                        a != NIL && scan.in_subtree(idx, a)
                    })
                    .fold(crate::coord::zero(), |acc, u| acc + w(u));
                assert_eq!(
                    inside_scan,
                    scan.subtree_weight[scan.child_face[idx] as usize]
                );

                // Dual BFS avoiding edge idx: reachable faces are outside.
                let mut reach = alloc::vec![false; scan.tin.len()];
                let mut queue = alloc::collections::VecDeque::new();
                reach[0] = true;
                queue.push_back(0u32);
                while let Some(f) = queue.pop_front() {
                    for (jdx, &(d, _, _)) in scan.nontree.iter().enumerate() {
                        if jdx == idx {
                            continue;
                        }
                        let (fa, fb) =
                            (scan.face_of[d as usize], scan.face_of[Emb::twin(d) as usize]);
                        let other = if fa == f {
                            fb
                        } else if fb == f {
                            fa
                        } else {
                            continue;
                        };
                        if !reach[other as usize] {
                            reach[other as usize] = true;
                            queue.push_back(other);
                        }
                    }
                }
                for face in 0..scan.tin.len() as u32 {
                    let c = scan.child_face[idx];
                    let in_subtree = scan.tin[c as usize] <= scan.tin[face as usize]
                        && scan.tin[face as usize] < scan.tout[c as usize];
                    assert_eq!(in_subtree, !reach[face as usize], "k={k} edge {idx}");
                }
            }
        }
    }
}
