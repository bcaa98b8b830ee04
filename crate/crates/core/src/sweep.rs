//! Ordered structures for the plane sweeps.
//!
//! `SweepTree` is a treap whose order is decided by a caller-supplied
//! comparator at insertion time (the usual sweep-status trick: the relative
//! order of non-crossing elements is constant while both are alive, so the
//! order frozen at insertion stays valid). Removal and neighbor queries work
//! through stable handles, so no comparator is needed once an element is in
//! the tree. Priorities come from a deterministic mix of the insertion
//! counter, keeping runs reproducible.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::cmp::Ordering;

const NIL: u32 = u32::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Handle(pub u32);

#[derive(Debug)]
struct Node<T> {
    item: T,
    prio: u64,
    left: u32,
    right: u32,
    parent: u32,
    in_tree: bool,
}

#[derive(Debug)]
pub struct SweepTree<T> {
    nodes: Vec<Node<T>>,
    root: u32,
    counter: u64,
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e3779b97f4a7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d049bb133111eb);
    x ^ (x >> 31)
}

impl<T> SweepTree<T> {
    pub fn new() -> Self {
        SweepTree { nodes: Vec::new(), root: NIL, counter: 0 }
    }

    pub fn is_empty(&self) -> bool {
        self.root == NIL
    }

    pub fn get(&self, h: Handle) -> &T {
        &self.nodes[h.0 as usize].item
    }

    pub fn get_mut(&mut self, h: Handle) -> &mut T {
        &mut self.nodes[h.0 as usize].item
    }

    pub fn contains(&self, h: Handle) -> bool {
        self.nodes[h.0 as usize].in_tree
    }

    /// Inserts `item`; `cmp(item, existing)` decides the descent. Equal
    /// results place the new item to the right of the existing one.
    pub fn insert_by<F>(&mut self, item: T, mut cmp: F) -> Handle
    where
        F: FnMut(&T, &T) -> Ordering,
    {
        let idx = self.nodes.len() as u32;
        self.counter += 1;
        let prio = splitmix64(self.counter);
        self.nodes.push(Node { item, prio, left: NIL, right: NIL, parent: NIL, in_tree: true });

        if self.root == NIL {
            self.root = idx;
            return Handle(idx);
        }
        let mut cur = self.root;
        loop {
            // The new node is always the last slot, so cur < idx.
            let go_left = {
                let (lo, hi) = self.nodes.split_at(idx as usize);
                cmp(&hi[0].item, &lo[cur as usize].item) == Ordering::Less
            };
            let next = if go_left { self.nodes[cur as usize].left } else { self.nodes[cur as usize].right };
            if next == NIL {
                if go_left {
                    self.nodes[cur as usize].left = idx;
                } else {
                    self.nodes[cur as usize].right = idx;
                }
                self.nodes[idx as usize].parent = cur;
                break;
            }
            cur = next;
        }
        self.bubble_up(idx);
        Handle(idx)
    }

    fn rotate_up(&mut self, n: u32) {
        let p = self.nodes[n as usize].parent;
        debug_assert!(p != NIL);
        let g = self.nodes[p as usize].parent;
        if self.nodes[p as usize].left == n {
            let b = self.nodes[n as usize].right;
            self.nodes[p as usize].left = b;
            if b != NIL {
                self.nodes[b as usize].parent = p;
            }
            self.nodes[n as usize].right = p;
        } else {
            let b = self.nodes[n as usize].left;
            self.nodes[p as usize].right = b;
            if b != NIL {
                self.nodes[b as usize].parent = p;
            }
            self.nodes[n as usize].left = p;
        }
        self.nodes[p as usize].parent = n;
        self.nodes[n as usize].parent = g;
        if g == NIL {
            self.root = n;
        } else if self.nodes[g as usize].left == p {
            self.nodes[g as usize].left = n;
        } else {
            self.nodes[g as usize].right = n;
        }
    }

    fn bubble_up(&mut self, n: u32) {
        while self.nodes[n as usize].parent != NIL
            && self.nodes[self.nodes[n as usize].parent as usize].prio > self.nodes[n as usize].prio
        {
            self.rotate_up(n);
        }
    }

    /// Removes the element behind `h`. The handle stays valid for `get`.
    pub fn remove(&mut self, h: Handle) {
        let n = h.0;
        debug_assert!(self.nodes[n as usize].in_tree);
        loop {
            let (l, r) = (self.nodes[n as usize].left, self.nodes[n as usize].right);
            if l == NIL && r == NIL {
                break;
            }
            let child = if l == NIL {
                r
            } else if r == NIL {
                l
            } else if self.nodes[l as usize].prio < self.nodes[r as usize].prio {
                l
            } else {
                r
            };
            self.rotate_up(child);
        }
        let p = self.nodes[n as usize].parent;
        if p == NIL {
            self.root = NIL;
        } else if self.nodes[p as usize].left == n {
            self.nodes[p as usize].left = NIL;
        } else {
            self.nodes[p as usize].right = NIL;
        }
        self.nodes[n as usize].parent = NIL;
        self.nodes[n as usize].in_tree = false;
    }

    pub fn predecessor(&self, h: Handle) -> Option<Handle> {
        let mut n = h.0;
        if self.nodes[n as usize].left != NIL {
            n = self.nodes[n as usize].left;
            while self.nodes[n as usize].right != NIL {
                n = self.nodes[n as usize].right;
            }
            return Some(Handle(n));
        }
        loop {
            let p = self.nodes[n as usize].parent;
            if p == NIL {
                return None;
            }
            if self.nodes[p as usize].right == n {
                return Some(Handle(p));
            }
            n = p;
        }
    }

    pub fn successor(&self, h: Handle) -> Option<Handle> {
        let mut n = h.0;
        if self.nodes[n as usize].right != NIL {
            n = self.nodes[n as usize].right;
            while self.nodes[n as usize].left != NIL {
                n = self.nodes[n as usize].left;
            }
            return Some(Handle(n));
        }
        loop {
            let p = self.nodes[n as usize].parent;
            if p == NIL {
                return None;
            }
            if self.nodes[p as usize].left == n {
                return Some(Handle(p));
            }
            n = p;
        }
    }

    pub fn min(&self) -> Option<Handle> {
        if self.root == NIL {
            return None;
        }
        let mut n = self.root;
        while self.nodes[n as usize].left != NIL {
            n = self.nodes[n as usize].left;
        }
        Some(Handle(n))
    }

    /// Rightmost element for which `left_of` holds; `left_of` must be
    /// monotone along the tree order (true on a prefix).
    pub fn last_where<F>(&self, mut left_of: F) -> Option<Handle>
    where
        F: FnMut(&T) -> bool,
    {
        let mut cur = self.root;
        let mut best = NIL;
        while cur != NIL {
            if left_of(&self.nodes[cur as usize].item) {
                best = cur;
                cur = self.nodes[cur as usize].right;
            } else {
                cur = self.nodes[cur as usize].left;
            }
        }
        if best == NIL {
            None
        } else {
            Some(Handle(best))
        }
    }

    /// In-order visit of all items with `!before_lo(item) && !after_hi(item)`,
    /// where `before_lo` is true on a prefix and `after_hi` on a suffix.
    pub fn visit_between<L, R, V>(&self, mut before_lo: L, mut after_hi: R, visit: &mut V)
    where
        L: FnMut(&T) -> bool,
        R: FnMut(&T) -> bool,
        V: FnMut(Handle, &T),
    {
        self.visit_rec(self.root, &mut before_lo, &mut after_hi, visit);
    }

    fn visit_rec<L, R, V>(&self, n: u32, before_lo: &mut L, after_hi: &mut R, visit: &mut V)
    where
        L: FnMut(&T) -> bool,
        R: FnMut(&T) -> bool,
        V: FnMut(Handle, &T),
    {
        if n == NIL {
            return;
        }
        let item = &self.nodes[n as usize].item;
        let lo_ok = !before_lo(item);
        let hi_ok = !after_hi(item);
        if lo_ok {
            self.visit_rec(self.nodes[n as usize].left, before_lo, after_hi, visit);
        }
        if lo_ok && hi_ok {
            visit(Handle(n), item);
        }
        if hi_ok {
            self.visit_rec(self.nodes[n as usize].right, before_lo, after_hi, visit);
        }
    }

    pub fn in_order(&self) -> Vec<Handle> {
        let mut out = Vec::new();
        self.visit_between(|_| false, |_| false, &mut |h, _| out.push(h));
        out
    }
}

impl<T> Default for SweepTree<T> {
    fn default() -> Self {
        Self::new()
    }
}

/// Segment tree over compressed key positions supporting point multiset
/// insert/remove and "maximum value over positions <= p" queries. Values are
/// ordered by `(V, tag)`, so ties resolve deterministically by tag.
#[derive(Debug)]
pub struct PrefixMaxTree<V: Ord + Clone> {
    size: usize,
    max: Vec<Option<(V, u64)>>,
    leaves: Vec<BTreeMap<(V, u64), u32>>,
}

impl<V: Ord + Clone> PrefixMaxTree<V> {
    pub fn new(positions: usize) -> Self {
        let size = positions.max(1).next_power_of_two();
        PrefixMaxTree {
            size,
            max: alloc::vec![None; 2 * size],
            leaves: alloc::vec![BTreeMap::new(); positions.max(1)],
        }
    }

    fn pull(&mut self, pos: usize) {
        let mut i = pos + self.size;
        self.max[i] = self.leaves[pos].last_key_value().map(|(k, _)| k.clone());
        i /= 2;
        while i >= 1 {
            self.max[i] = match (&self.max[2 * i], &self.max[2 * i + 1]) {
                (None, r) => r.clone(),
                (l, None) => l.clone(),
                (Some(l), Some(r)) => Some(if l >= r { l.clone() } else { r.clone() }),
            };
            i /= 2;
        }
    }

    pub fn insert(&mut self, pos: usize, value: V, tag: u64) {
        *self.leaves[pos].entry((value, tag)).or_insert(0) += 1;
        self.pull(pos);
    }

    pub fn remove(&mut self, pos: usize, value: V, tag: u64) {
        let k = (value, tag);
        if let Some(cnt) = self.leaves[pos].get_mut(&k) {
            if *cnt <= 1 {
                self.leaves[pos].remove(&k);
            } else {
                *cnt -= 1;
            }
            self.pull(pos);
        }
    }

    /// Maximum (value, tag) over positions `0..=pos`.
    pub fn prefix_max(&self, pos: usize) -> Option<(V, u64)> {
        let mut best: Option<(V, u64)> = None;
        let mut consider = |m: &Option<(V, u64)>| {
            if let Some(v) = m {
                if best.as_ref().map_or(true, |b| v > b) {
                    best = Some(v.clone());
                }
            }
        };
        let mut l = self.size;
        let mut r = self.size + pos.min(self.size - 1) + 1;
        while l < r {
            if l & 1 == 1 {
                consider(&self.max[l]);
                l += 1;
            }
            if r & 1 == 1 {
                r -= 1;
                consider(&self.max[r]);
            }
            l /= 2;
            r /= 2;
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn treap_ordered_ops() {
        let mut t: SweepTree<i64> = SweepTree::new();
        let mut handles = Vec::new();
        for v in [5i64, 1, 9, 3, 7, 2, 8] {
            handles.push((v, t.insert_by(v, |a, b| a.cmp(b))));
        }
        let order: Vec<i64> = t.in_order().into_iter().map(|h| *t.get(h)).collect();
        assert_eq!(order, alloc::vec![1, 2, 3, 5, 7, 8, 9]);

        let h5 = handles.iter().find(|(v, _)| *v == 5).unwrap().1;
        assert_eq!(t.predecessor(h5).map(|h| *t.get(h)), Some(3));
        assert_eq!(t.successor(h5).map(|h| *t.get(h)), Some(7));

        t.remove(h5);
        let order: Vec<i64> = t.in_order().into_iter().map(|h| *t.get(h)).collect();
        assert_eq!(order, alloc::vec![1, 2, 3, 7, 8, 9]);

        assert_eq!(t.last_where(|v| *v < 7).map(|h| *t.get(h)), Some(3));
        assert_eq!(t.last_where(|v| *v < 1), None);

        let mut seen = Vec::new();
        t.visit_between(|v| *v < 2, |v| *v > 8, &mut |_, v| seen.push(*v));
        assert_eq!(seen, alloc::vec![2, 3, 7, 8]);
    }

    #[test]
    fn treap_randomized_against_btree() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let mut t: SweepTree<(i64, u64)> = SweepTree::new();
        let mut reference: alloc::collections::BTreeSet<(i64, u64)> = Default::default();
        let mut live: Vec<((i64, u64), Handle)> = Vec::new();
        for step in 0..3000u64 {
            if live.is_empty() || rng.gen_bool(0.6) {
                let key = (rng.gen_range(-100..100i64), step);
                let h = t.insert_by(key, |a, b| a.cmp(b));
                reference.insert(key);
                live.push((key, h));
            } else {
                let i = rng.gen_range(0..live.len());
                let (key, h) = live.swap_remove(i);
                t.remove(h);
                reference.remove(&key);
            }
            if step % 64 == 0 {
                let order: Vec<(i64, u64)> = t.in_order().into_iter().map(|h| *t.get(h)).collect();
                let expect: Vec<(i64, u64)> = reference.iter().copied().collect();
                assert_eq!(order, expect);
            }
        }
    }

    #[test]
    fn prefix_max_tree() {
        let mut t: PrefixMaxTree<i64> = PrefixMaxTree::new(10);
        t.insert(3, 5, 1);
        t.insert(7, 9, 2);
        t.insert(0, 2, 3);
        assert_eq!(t.prefix_max(2), Some((2, 3)));
        assert_eq!(t.prefix_max(3), Some((5, 1)));
        assert_eq!(t.prefix_max(9), Some((9, 2)));
        t.remove(7, 9, 2);
        assert_eq!(t.prefix_max(9), Some((5, 1)));
        t.insert(3, 5, 9);
        assert_eq!(t.prefix_max(4), Some((5, 9)));
    }
}
