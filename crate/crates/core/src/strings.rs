//! Star-based separators for abstract string graphs.
//!
//! Two stages: greedily peel stars around nodes of degree at least
//! theta(n) = n^(1/3) / (log2 n)^(2/3), then run a node-separator strategy on
//! the residual graph and add its nodes as singleton stars. The default
//! strategy is BFS-level bisection with a local move-refinement pass; its
//! output is validity-checked, never trusted for size.

use alloc::vec::Vec;
use core::fmt;

use crate::planar_sep::SeparatorResult;
use crate::stars::{IntersectionOracle, Star, StarSeparator};

#[derive(Debug, Clone, Default)]
pub struct AbstractGraph {
    /// Sorted adjacency lists of a simple undirected graph.
    pub adj: Vec<Vec<u32>>,
    /// Set on residual graphs: nodes removed by the peeling stage.
    pub peeled: Vec<bool>,
}

impl AbstractGraph {
    pub fn new(n: usize) -> Self {
        AbstractGraph { adj: alloc::vec![Vec::new(); n], peeled: Vec::new() }
    }

    pub fn from_edges(n: usize, edges: &[(u32, u32)]) -> Result<Self, StringGraphError> {
        let mut g = AbstractGraph::new(n);
        for &(u, v) in edges {
            if u as usize >= n || v as usize >= n {
                return Err(StringGraphError::NodeOutOfRange);
            }
            if u == v {
                return Err(StringGraphError::SelfLoop(u));
            }
            g.adj[u as usize].push(v);
            g.adj[v as usize].push(u);
        }
        for list in &mut g.adj {
            list.sort_unstable();
            if list.windows(2).any(|w| w[0] == w[1]) {
                return Err(StringGraphError::ParallelEdge);
            }
        }
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn m(&self) -> usize {
        self.adj.iter().map(|a| a.len()).sum::<usize>() / 2
    }

    pub fn has_edge(&self, u: u32, v: u32) -> bool {
        self.adj[u as usize].binary_search(&v).is_ok()
    }

    pub fn edges(&self) -> Vec<(u32, u32)> {
        let mut out = Vec::new();
        for (u, nbrs) in self.adj.iter().enumerate() {
            for &v in nbrs {
                if (u as u32) < v {
                    out.push((u as u32, v));
                }
            }
        }
        out
    }

    /// Subgraph induced by `nodes` (sorted); returns it with the local-to-
    /// global mapping given by the node order.
    pub fn induced(&self, nodes: &[u32]) -> AbstractGraph {
        let mut local = alloc::collections::BTreeMap::new();
        for (i, &u) in nodes.iter().enumerate() {
            local.insert(u, i as u32);
        }
        let mut g = AbstractGraph::new(nodes.len());
        for (i, &u) in nodes.iter().enumerate() {
            for &v in &self.adj[u as usize] {
                if let Some(&lv) = local.get(&v) {
                    g.adj[i].push(lv);
                }
            }
            g.adj[i].sort_unstable();
        }
        g
    }
}

impl IntersectionOracle for AbstractGraph {
    fn len(&self) -> usize {
        self.n()
    }

    fn intersects(&self, u: usize, v: usize) -> bool {
        self.has_edge(u as u32, v as u32)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StringGraphError {
    NodeOutOfRange,
    SelfLoop(u32),
    ParallelEdge,
    TooLargeForBruteForce(usize),
    /// The plugged-in strategy returned an invalid separator.
    StrategyInvalid(&'static str),
}

impl fmt::Display for StringGraphError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StringGraphError::NodeOutOfRange => write!(f, "edge endpoint out of range"),
            StringGraphError::SelfLoop(u) => write!(f, "self-loop at node {u}"),
            StringGraphError::ParallelEdge => write!(f, "parallel edge"),
            StringGraphError::TooLargeForBruteForce(n) => {
                write!(f, "{n} nodes is too large for exhaustive search")
            }
            StringGraphError::StrategyInvalid(why) => {
                write!(f, "node separator strategy returned an invalid result: {why}")
            }
        }
    }
}

/// Peeling threshold: n^(1/3) / (log2 n)^(2/3) with the original n, fixed
/// for the whole run; 1 for n <= 2.
pub fn peel_threshold(n: usize) -> f64 {
    if n <= 2 {
        return 1.0;
    }
    let nf = n as f64;
    libm::cbrt(nf) / libm::pow(libm::log2(nf), 2.0 / 3.0)
}

/// Stage 1: repeatedly removes the star of a maximum-degree node while that
/// degree is at least the threshold. Ties break to the smallest id.
pub fn greedy_peel(g: &AbstractGraph) -> (Vec<Star>, AbstractGraph) {
    let n = g.n();
    let theta = peel_threshold(n);
    let mut alive = alloc::vec![true; n];
    let mut degree: Vec<usize> = g.adj.iter().map(|a| a.len()).collect();
    let mut stars = Vec::new();
    loop {
        let mut best: Option<(usize, usize)> = None; // (degree, node)
        for u in 0..n {
            if alive[u] && best.map_or(true, |(bd, _)| degree[u] > bd) {
                best = Some((degree[u], u));
            }
        }
        let Some((d, center)) = best else { break };
        if (d as f64) < theta {
            break;
        }
        let mut leaves = Vec::new();
        for &v in &g.adj[center] {
            if alive[v as usize] {
                leaves.push(v as usize);
            }
        }
        alive[center] = false;
        for &l in &leaves {
            alive[l] = false;
        }
        for &l in leaves.iter().chain(core::iter::once(&center)) {
            for &w in &g.adj[l] {
                if alive[w as usize] {
                    degree[w as usize] -= 1;
                }
            }
        }
        stars.push(Star { center, leaves });
    }

    // Residual graph keeps original node count; peeled nodes become isolated.
    let mut residual = AbstractGraph::new(n);
    for (u, nbrs) in g.adj.iter().enumerate() {
        if !alive[u] {
            continue;
        }
        for &v in nbrs {
            if alive[v as usize] {
                residual.adj[u].push(v);
            }
        }
    }
    // Mark peeled nodes so callers can distinguish them.
    let mut peeled = alloc::vec![false; n];
    for s in &stars {
        peeled[s.center] = true;
        for &l in &s.leaves {
            peeled[l] = true;
        }
    }
    residual.peeled = peeled;
    (stars, residual)
}

impl AbstractGraph {
    /// Nodes not removed by the peeling stage (all nodes on fresh graphs).
    pub fn live_nodes(&self) -> Vec<u32> {
        (0..self.n() as u32)
            .filter(|&u| !self.peeled.get(u as usize).copied().unwrap_or(false))
            .collect()
    }
}

/// A pluggable node-separator procedure for one connected subgraph. The
/// output is validity-checked by the caller; only the balance and cut
/// conditions are trusted, never the size.
pub type NodeSeparatorFn<'a> = &'a dyn Fn(&AbstractGraph) -> SeparatorResult;

#[derive(Clone, Copy)]
pub struct NodeSeparatorStrategy<'a> {
    pub name: &'a str,
    pub run: NodeSeparatorFn<'a>,
}

/// The default strategy: BFS levels from a far node, split at the count
/// median level, then a local pass that shrinks the separator by moving
/// nodes whose neighbors all sit on one side.
pub fn bfs_fm_separator(g: &AbstractGraph) -> SeparatorResult {
    let n = g.n();
    if n == 0 {
        return SeparatorResult { separator: Vec::new(), part_a: Vec::new(), part_b: Vec::new() };
    }
    // Double BFS for a pseudo-peripheral start.
    let far = |start: u32| -> u32 {
        let mut dist = alloc::vec![usize::MAX; n];
        let mut queue = alloc::collections::VecDeque::new();
        dist[start as usize] = 0;
        queue.push_back(start);
        let mut last = start;
        while let Some(u) = queue.pop_front() {
            last = u;
            for &v in &g.adj[u as usize] {
                if dist[v as usize] == usize::MAX {
                    dist[v as usize] = dist[u as usize] + 1;
                    queue.push_back(v);
                }
            }
        }
        last
    };
    let root = far(far(0));
    let mut level = alloc::vec![usize::MAX; n];
    let mut order = alloc::vec![root];
    level[root as usize] = 0;
    let mut head = 0;
    while head < order.len() {
        let u = order[head];
        head += 1;
        for &v in &g.adj[u as usize] {
            if level[v as usize] == usize::MAX {
                level[v as usize] = level[u as usize] + 1;
                order.push(v);
            }
        }
    }
    debug_assert_eq!(order.len(), n, "strategy input must be connected");
    let max_level = order.iter().map(|&u| level[u as usize]).max().unwrap();
    if max_level == 0 {
        // Complete-graph-like: single level. Put ceil(n/3) nodes in S.
        let s_count = n.div_ceil(3);
        let separator: Vec<u32> = (0..s_count as u32).collect();
        let rest: Vec<u32> = (s_count as u32..n as u32).collect();
        let split = rest.len() / 2;
        return SeparatorResult {
            separator,
            part_a: rest[..split].to_vec(),
            part_b: rest[split..].to_vec(),
        };
    }
    // Separator level: the first level where the prefix count passes n/2.
    let mut count_by_level = alloc::vec![0usize; max_level + 1];
    for u in 0..n {
        count_by_level[level[u]] += 1;
    }
    let mut cum = 0usize;
    let mut sep_level = max_level;
    for (l, c) in count_by_level.iter().enumerate() {
        cum += c;
        if cum >= n / 2 && l < max_level {
            sep_level = l + 1;
            break;
        }
    }
    let mut tag = alloc::vec![0u8; n]; // 1 = A, 2 = B, 3 = S
    for u in 0..n {
        tag[u] = match level[u].cmp(&sep_level) {
            core::cmp::Ordering::Less => 1,
            core::cmp::Ordering::Equal => 3,
            core::cmp::Ordering::Greater => 2,
        };
    }

    // Refinement: move separator nodes whose live neighborhood touches only
    // one part, as long as balance allows; a few deterministic passes.
    let cap = 2 * n / 3;
    let mut sizes = [0usize; 4];
    for &t in tag.iter() {
        sizes[t as usize] += 1;
    }
    for _ in 0..4 {
        let mut moved = false;
        for u in 0..n {
            if tag[u] != 3 {
                continue;
            }
            let mut touches_a = false;
            let mut touches_b = false;
            for &v in &g.adj[u] {
                match tag[v as usize] {
                    1 => touches_a = true,
                    2 => touches_b = true,
                    _ => {}
                }
            }
            let target = match (touches_a, touches_b) {
                (true, false) => 1,
                (false, true) => 2,
                (false, false) => {
                    if sizes[1] <= sizes[2] {
                        1
                    } else {
                        2
                    }
                }
                (true, true) => continue,
            };
            if sizes[target as usize] + 1 <= cap {
                tag[u] = target;
                sizes[3] -= 1;
                sizes[target as usize] += 1;
                moved = true;
            }
        }
        if !moved {
            break;
        }
    }

    SeparatorResult {
        separator: (0..n as u32).filter(|&u| tag[u as usize] == 3).collect(),
        part_a: (0..n as u32).filter(|&u| tag[u as usize] == 1).collect(),
        part_b: (0..n as u32).filter(|&u| tag[u as usize] == 2).collect(),
    }
}

/// Validity check for a strategy result on one subgraph: disjoint cover, no
/// cross edge, both parts at most 2n/3 by count.
fn check_strategy_result(g: &AbstractGraph, r: &SeparatorResult) -> Result<(), &'static str> {
    let n = g.n();
    let mut tag = alloc::vec![0u8; n];
    let mut count = 0;
    for (set, code) in [(&r.separator, 3u8), (&r.part_a, 1), (&r.part_b, 2)] {
        for &u in set.iter() {
            if u as usize >= n || tag[u as usize] != 0 {
                return Err("not a disjoint cover");
            }
            tag[u as usize] = code;
            count += 1;
        }
    }
    if count != n {
        return Err("not a disjoint cover");
    }
    for (u, nbrs) in g.adj.iter().enumerate() {
        for &v in nbrs {
            let (tu, tv) = (tag[u], tag[v as usize]);
            if (tu == 1 && tv == 2) || (tu == 2 && tv == 1) {
                return Err("edge between parts");
            }
        }
    }
    let cap = 2 * n / 3;
    if r.part_a.len() > cap || r.part_b.len() > cap {
        return Err("part exceeds 2n/3");
    }
    Ok(())
}

/// The two-stage star separator for a string graph: greedy peeling, then the
/// strategy on every residual component larger than 2n/3, singletons into
/// the separator, leftover components packed by size.
pub fn string_star_separator(
    g: &AbstractGraph,
    strategy: NodeSeparatorStrategy<'_>,
) -> Result<StarSeparator, StringGraphError> {
    let n = g.n();
    let (mut stars, residual) = greedy_peel(g);

    // Residual components.
    let mut comp = alloc::vec![usize::MAX; n];
    let mut comps: Vec<Vec<u32>> = Vec::new();
    for start in residual.live_nodes() {
        if comp[start as usize] != usize::MAX {
            continue;
        }
        let id = comps.len();
        let mut nodes = alloc::vec![start];
        comp[start as usize] = id;
        let mut head = 0;
        while head < nodes.len() {
            let u = nodes[head];
            head += 1;
            for &v in &residual.adj[u as usize] {
                if comp[v as usize] == usize::MAX {
                    comp[v as usize] = id;
                    nodes.push(v);
                }
            }
        }
        nodes.sort_unstable();
        comps.push(nodes);
    }

    let cap = 2 * n / 3;
    let mut pieces: Vec<Vec<u32>> = Vec::new();
    for nodes in comps {
        if nodes.len() <= cap {
            pieces.push(nodes);
            continue;
        }
        let sub = residual.induced(&nodes);
        let result = (strategy.run)(&sub);
        check_strategy_result(&sub, &result).map_err(StringGraphError::StrategyInvalid)?;
        for &u in &result.separator {
            stars.push(Star { center: nodes[u as usize] as usize, leaves: Vec::new() });
        }
        for part in [&result.part_a, &result.part_b] {
            if part.is_empty() {
                continue;
            }
            pieces.push(part.iter().map(|&u| nodes[u as usize]).collect());
        }
    }

    // Pack pieces by size, largest first into the smaller side.
    pieces.sort_by(|l, r| r.len().cmp(&l.len()).then_with(|| l.cmp(r)));
    let mut part_a: Vec<usize> = Vec::new();
    let mut part_b: Vec<usize> = Vec::new();
    for piece in pieces {
        let target = if part_a.len() <= part_b.len() { &mut part_a } else { &mut part_b };
        target.extend(piece.iter().map(|&u| u as usize));
    }
    part_a.sort_unstable();
    part_b.sort_unstable();
    stars.sort_by_key(|s| s.center);
    Ok(StarSeparator { stars, part_a, part_b })
}

/// Exhaustive minimum balanced node separator, for graphs of at most 14
/// nodes. A subset is valid when removing it leaves components of at most
/// 2n/3 nodes (they can always be packed into two balanced sides then).
pub fn brute_force_min_separator(g: &AbstractGraph) -> Result<SeparatorResult, StringGraphError> {
    let n = g.n();
    if n > 14 {
        return Err(StringGraphError::TooLargeForBruteForce(n));
    }
    let cap = 2 * n / 3;
    let mut subsets: Vec<u32> = (0..(1u32 << n)).collect();
    subsets.sort_by_key(|s| (s.count_ones(), *s));
    for mask in subsets {
        // Components of the remaining nodes.
        let mut seen = alloc::vec![false; n];
        let mut comps: Vec<Vec<u32>> = Vec::new();
        let mut ok = true;
        for start in 0..n {
            if seen[start] || mask & (1 << start) != 0 {
                continue;
            }
            let mut nodes = alloc::vec![start as u32];
            seen[start] = true;
            let mut head = 0;
            while head < nodes.len() {
                let u = nodes[head];
                head += 1;
                for &v in &g.adj[u as usize] {
                    if mask & (1 << v) == 0 && !seen[v as usize] {
                        seen[v as usize] = true;
                        nodes.push(v);
                    }
                }
            }
            if nodes.len() > cap {
                ok = false;
                break;
            }
            comps.push(nodes);
        }
        if !ok {
            continue;
        }
        // Pack components greedily; each is <= 2n/3 so this always balances.
        comps.sort_by(|l, r| r.len().cmp(&l.len()));
        let mut part_a: Vec<u32> = Vec::new();
        let mut part_b: Vec<u32> = Vec::new();
        for cpt in comps {
            if part_a.len() <= part_b.len() {
                part_a.extend(cpt);
            } else {
                part_b.extend(cpt);
            }
        }
        if part_a.len() > cap || part_b.len() > cap {
            continue;
        }
        part_a.sort_unstable();
        part_b.sort_unstable();
        return Ok(SeparatorResult {
            separator: (0..n as u32).filter(|&u| mask & (1 << u) != 0).collect(),
            part_a,
            part_b,
        });
    }
    unreachable!("the full node set is always a valid separator")
}
