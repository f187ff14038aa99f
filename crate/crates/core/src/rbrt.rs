//! Rank-based range tree for one cone.
//!
//! Every level is a static complete binary tree over rank slots `0..N`
//! (heap numbering, root 1, leaf of rank `r` is `N + r`). A level-`d` node is
//! a tuple `(h_1, .., h_d)` of nodes, one per level, and
//! `R(v) = { q : leaf(rank_i(q)) lies below h_i for every i }`.
//! Only aggregates of nonempty nodes are stored. When every `h_i` is a right
//! child, `B(v) = R(v')` where `v'` replaces each `h_i` by its left sibling.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use rustc_hash::FxHashMap;

pub type NodeKey = [u32; 3];

/// Aggregates of a nonempty `R(v)`, by position in the axis list.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Agg {
    /// Point of `R(v)` with the smallest axis coordinate.
    pub rmin: u32,
    /// Point of `R(v)` with the largest axis coordinate.
    pub rmax: u32,
    pub count: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TargetChange {
    pub w: u32,
    pub old: Option<u32>,
    pub new: Option<u32>,
}

/// Change of the pair `(b(v), r(v))` of a node with nonempty `B(v)` and `R(v)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PairChange {
    pub node: NodeKey,
    pub old: Option<(u32, u32)>,
    pub new: Option<(u32, u32)>,
}

#[derive(Clone, Debug, Default)]
pub struct SwapReport {
    pub targets: Vec<TargetChange>,
    pub pairs: Vec<PairChange>,
    pub visits: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RbrtOptions {
    /// Compute the Semi-Yao target of every point.
    pub targets: bool,
    /// Keep the `(w, target)` entries of every canonical node and the per-point
    /// links, needed to repair targets under swaps.
    pub links: bool,
    /// Report `(b(v), r(v))` pair changes.
    pub pairs: bool,
}

impl RbrtOptions {
    pub const STATIC: RbrtOptions = RbrtOptions {
        targets: true,
        links: false,
        pairs: false,
    };
    pub const SEMI_YAO: RbrtOptions = RbrtOptions {
        targets: true,
        links: true,
        pairs: false,
    };
    pub const PAIRS: RbrtOptions = RbrtOptions {
        targets: false,
        links: false,
        pairs: true,
    };
}

#[derive(Clone, Debug)]
pub struct Rbrt {
    d: usize,
    n: usize,
    leaves: u32,
    order: Vec<Vec<u32>>,
    rank: Vec<Vec<u32>>,
    aggs: FxHashMap<NodeKey, Agg>,
    opts: RbrtOptions,
    target: Vec<Option<u32>>,
    links: Vec<Vec<NodeKey>>,
    entries: BTreeSet<(NodeKey, u32, u32)>,
    journal: FxHashMap<NodeKey, Option<Agg>>,
    visits: u64,
}

fn depth(h: u32) -> u32 {
    31 - h.leading_zeros()
}

fn is_ancestor(a: u32, h: u32) -> bool {
    let (da, dh) = (depth(a), depth(h));
    dh >= da && (h >> (dh - da)) == a
}

fn ancestors(h: u32) -> Vec<u32> {
    let mut out = Vec::with_capacity(depth(h) as usize + 1);
    let mut x = h;
    while x >= 1 {
        out.push(x);
        x >>= 1;
    }
    out
}

fn lca(a: u32, b: u32) -> u32 {
    let (mut a, mut b) = (a, b);
    while depth(a) > depth(b) {
        a >>= 1;
    }
    while depth(b) > depth(a) {
        b >>= 1;
    }
    while a != b {
        a >>= 1;
        b >>= 1;
    }
    a
}

/// Right siblings of the left-child ancestors of `leaf`: their subtrees
/// partition the slots to the right of `leaf`.
fn right_cover(leaf: u32) -> Vec<u32> {
    let mut out = Vec::new();
    let mut x = leaf;
    while x > 1 {
        if x & 1 == 0 {
            out.push(x + 1);
        }
        x >>= 1;
    }
    out
}

/// Calls `f` for every tuple of the cartesian product of `sets`.
fn for_each_tuple(sets: &[Vec<u32>], mut f: impl FnMut(NodeKey)) {
    let mut key = [0u32; 3];
    fn rec(sets: &[Vec<u32>], level: usize, key: &mut NodeKey, f: &mut dyn FnMut(NodeKey)) {
        if level == sets.len() {
            f(*key);
            return;
        }
        for &h in &sets[level] {
            key[level] = h;
            rec(sets, level + 1, key, f);
        }
    }
    if sets.iter().any(Vec::is_empty) {
        return;
    }
    rec(sets, 0, &mut key, &mut f);
}

fn with_last(prefix: &[u32], last: u32) -> NodeKey {
    let mut k = [0u32; 3];
    k[..prefix.len()].copy_from_slice(prefix);
    k[prefix.len()] = last;
    k
}

impl Rbrt {
    /// Builds from the `d + 1` sorted lists (`d` normals, then the axis); each
    /// list is a permutation of `0..n`.
    pub fn new(d: usize, order: Vec<Vec<u32>>, opts: RbrtOptions) -> Rbrt {
        assert!((1..=3).contains(&d), "levels must be 1..=3");
        assert_eq!(order.len(), d + 1);
        assert!(!opts.links || opts.targets, "links require targets");
        let n = order[0].len();
        let leaves = (n.max(1)).next_power_of_two() as u32;
        let mut rank = vec![vec![0u32; n]; d + 1];
        for (j, list) in order.iter().enumerate() {
            assert_eq!(list.len(), n);
            for (pos, &p) in list.iter().enumerate() {
                rank[j][p as usize] = pos as u32;
            }
        }
        let mut t = Rbrt {
            d,
            n,
            leaves,
            order,
            rank,
            aggs: FxHashMap::default(),
            opts,
            target: vec![None; n],
            links: vec![Vec::new(); n],
            entries: BTreeSet::new(),
            journal: FxHashMap::default(),
            visits: 0,
        };
        // Points are added in axis order so the first one seen is the minimum.
        let by_axis = t.order[d].clone();
        for q in by_axis {
            let sets: Vec<Vec<u32>> = (0..d).map(|j| ancestors(t.leaf_of(j, q))).collect();
            let aggs = &mut t.aggs;
            for_each_tuple(&sets, |v| {
                aggs.entry(v)
                    .and_modify(|a| {
                        a.rmax = q;
                        a.count += 1;
                    })
                    .or_insert(Agg {
                        rmin: q,
                        rmax: q,
                        count: 1,
                    });
            });
        }
        if opts.targets {
            for p in 0..n as u32 {
                let tgt = t.compute_target(p);
                t.target[p as usize] = tgt;
                if opts.links {
                    t.attach(p, tgt);
                }
            }
        }
        t.visits = 0;
        t
    }

    pub fn levels(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn leaf_slots(&self) -> u32 {
        self.leaves
    }

    pub fn options(&self) -> RbrtOptions {
        self.opts
    }

    /// Sorted list `j` (`j < d` normals, `j == d` axis).
    pub fn order(&self, j: usize) -> &[u32] {
        &self.order[j]
    }

    pub fn rank(&self, j: usize, p: u32) -> u32 {
        self.rank[j][p as usize]
    }

    pub fn visits(&self) -> u64 {
        self.visits
    }

    fn leaf_of(&self, j: usize, p: u32) -> u32 {
        self.leaves + self.rank[j][p as usize]
    }

    fn axis_less(&self, a: u32, b: u32) -> bool {
        self.rank[self.d][a as usize] < self.rank[self.d][b as usize]
    }

    pub fn agg(&self, v: &NodeKey) -> Option<&Agg> {
        self.aggs.get(v)
    }

    /// `r(v)`: the point of `R(v)` with the smallest axis coordinate.
    pub fn r(&self, v: &NodeKey) -> Option<u32> {
        self.aggs.get(v).map(|a| a.rmin)
    }

    /// The node whose `R` equals `B(v)`, if `v` is a valid pair node.
    pub fn b_node(&self, v: &NodeKey) -> Option<NodeKey> {
        let mut s = *v;
        for h in s.iter_mut().take(self.d) {
            if *h <= 1 || *h & 1 == 0 {
                return None;
            }
            *h -= 1;
        }
        Some(s)
    }

    /// `b(v)`: the point of `B(v)` with the largest axis coordinate.
    pub fn b(&self, v: &NodeKey) -> Option<u32> {
        self.b_node(v).and_then(|s| self.aggs.get(&s)).map(|a| a.rmax)
    }

    /// Whether `q` lies in the cone of `p` (rank dominance in all normal lists).
    pub fn dominates(&self, p: u32, q: u32) -> bool {
        (0..self.d).all(|j| self.rank[j][q as usize] > self.rank[j][p as usize])
    }

    /// All level-`d` nodes whose `B` contains `p`.
    pub fn canonical_all(&self, p: u32) -> Vec<NodeKey> {
        let sets: Vec<Vec<u32>> = (0..self.d).map(|j| right_cover(self.leaf_of(j, p))).collect();
        let mut out = Vec::new();
        for_each_tuple(&sets, |v| out.push(v));
        out
    }

    /// Canonical nodes of `p` with nonempty `R`; their `R` sets partition
    /// the points inside the cone of `p`.
    pub fn canonical_cone_nodes(&self, p: u32) -> Vec<NodeKey> {
        self.canonical_all(p)
            .into_iter()
            .filter(|v| self.aggs.contains_key(v))
            .collect()
    }

    fn compute_target(&mut self, p: u32) -> Option<u32> {
        let sets: Vec<Vec<u32>> = (0..self.d).map(|j| right_cover(self.leaf_of(j, p))).collect();
        let mut best: Option<u32> = None;
        let mut visits = 0;
        for_each_tuple(&sets, |v| {
            visits += 1;
            if let Some(a) = self.aggs.get(&v) {
                if best.is_none_or(|b| self.axis_less(a.rmin, b)) {
                    best = Some(a.rmin);
                }
            }
        });
        self.visits += visits;
        best
    }

    /// Current Semi-Yao target of `p` in this cone.
    pub fn target(&self, p: u32) -> Option<u32> {
        self.target[p as usize]
    }

    pub fn targets(&self) -> &[Option<u32>] {
        &self.target
    }

    /// Canonical nodes holding an entry for `w`.
    pub fn links(&self, w: u32) -> &[NodeKey] {
        &self.links[w as usize]
    }

    /// Entries `(w, p)` stored at `v`, i.e. points of `B(v)` whose target is `p`.
    pub fn pairs_with_target(&self, v: &NodeKey, p: u32) -> Vec<u32> {
        self.entries
            .range((*v, p, 0)..=(*v, p, u32::MAX))
            .map(|e| e.2)
            .collect()
    }

    /// All entries stored at `v` as `(w, target)`.
    pub fn entries_at(&self, v: &NodeKey) -> Vec<(u32, u32)> {
        self.entries
            .range((*v, 0, 0)..=(*v, u32::MAX, u32::MAX))
            .map(|e| (e.2, e.1))
            .collect()
    }

    fn attach(&mut self, w: u32, target: Option<u32>) {
        let Some(t) = target else {
            self.links[w as usize].clear();
            return;
        };
        let nodes = self.canonical_all(w);
        for v in &nodes {
            self.entries.insert((*v, t, w));
        }
        self.visits += nodes.len() as u64;
        self.links[w as usize] = nodes;
    }

    fn detach(&mut self, w: u32) {
        let Some(t) = self.target[w as usize] else {
            return;
        };
        let nodes = std::mem::take(&mut self.links[w as usize]);
        for v in &nodes {
            let removed = self.entries.remove(&(*v, t, w));
            debug_assert!(removed, "stale link");
        }
        self.visits += nodes.len() as u64;
    }

    fn retarget(&mut self, w: u32, old: u32, new: u32) {
        debug_assert_eq!(self.target[w as usize], Some(old));
        if old == new {
            return;
        }
        let nodes = std::mem::take(&mut self.links[w as usize]);
        for v in &nodes {
            let removed = self.entries.remove(&(*v, old, w));
            debug_assert!(removed, "stale link");
            self.entries.insert((*v, new, w));
        }
        self.visits += 2 * nodes.len() as u64;
        self.links[w as usize] = nodes;
        self.target[w as usize] = Some(new);
    }

    fn set_agg(&mut self, v: NodeKey, a: Option<Agg>) {
        self.visits += 1;
        let old = match a {
            Some(a) => self.aggs.insert(v, a),
            None => self.aggs.remove(&v),
        };
        if self.opts.pairs && old != a {
            self.journal.entry(v).or_insert(old);
        }
    }

    fn combine(&self, a: Option<Agg>, b: Option<Agg>) -> Option<Agg> {
        match (a, b) {
            (None, x) | (x, None) => x,
            (Some(a), Some(b)) => Some(Agg {
                rmin: if self.axis_less(a.rmin, b.rmin) { a.rmin } else { b.rmin },
                rmax: if self.axis_less(a.rmax, b.rmax) { b.rmax } else { a.rmax },
                count: a.count + b.count,
            }),
        }
    }

    /// Recomputes the last-level path from slot `slot` to the root inside the
    /// chain fixed by `prefix` (the first `d - 1` components).
    fn recompute_path(&mut self, prefix: &[u32], slot: u32) {
        let last = self.d - 1;
        let p = self.order[last][slot as usize];
        let inside = (0..last).all(|j| is_ancestor(prefix[j], self.leaf_of(j, p)));
        let mut h = self.leaves + slot;
        let leaf = inside.then_some(Agg {
            rmin: p,
            rmax: p,
            count: 1,
        });
        self.set_agg(with_last(prefix, h), leaf);
        while h > 1 {
            h >>= 1;
            let a = self.aggs.get(&with_last(prefix, 2 * h)).copied();
            let b = self.aggs.get(&with_last(prefix, 2 * h + 1)).copied();
            self.visits += 2;
            let c = self.combine(a, b);
            self.set_agg(with_last(prefix, h), c);
        }
    }

    /// Exchanges the points at `pos` and `pos + 1` of normal list `i`.
    pub fn swap_u(&mut self, i: usize, pos: usize) -> SwapReport {
        assert!(i < self.d, "not a normal list");
        assert!(pos + 1 < self.n, "swap outside the list");
        let start = self.visits;
        let a = self.order[i][pos];
        let b = self.order[i][pos + 1];
        let last = self.d - 1;
        let lo = self.leaves + pos as u32;
        let hi = lo + 1;
        let mut chains: BTreeSet<[u32; 2]> = BTreeSet::new();
        let slots: Vec<u32> = if i == last {
            for p in [a, b] {
                let sets: Vec<Vec<u32>> = (0..last).map(|j| ancestors(self.leaf_of(j, p))).collect();
                for_each_tuple(&sets, |v| {
                    chains.insert([v[0], v[1]]);
                });
            }
            vec![pos as u32, pos as u32 + 1]
        } else {
            let al = ancestors(lo);
            let ah = ancestors(hi);
            let sym: Vec<u32> = al
                .iter()
                .filter(|x| !ah.contains(x))
                .chain(ah.iter().filter(|x| !al.contains(x)))
                .copied()
                .collect();
            for p in [a, b] {
                let sets: Vec<Vec<u32>> = (0..last)
                    .map(|j| {
                        if j == i {
                            sym.clone()
                        } else {
                            ancestors(self.leaf_of(j, p))
                        }
                    })
                    .collect();
                for_each_tuple(&sets, |v| {
                    chains.insert([v[0], v[1]]);
                });
            }
            vec![self.rank[last][a as usize], self.rank[last][b as usize]]
        };
        if self.d == 1 {
            chains.insert([0, 0]);
        }
        self.order[i].swap(pos, pos + 1);
        self.rank[i][a as usize] = pos as u32 + 1;
        self.rank[i][b as usize] = pos as u32;
        for chain in &chains {
            for &s in &slots {
                self.recompute_path(&chain[..last], s);
            }
        }
        let mut report = SwapReport::default();
        if self.opts.targets {
            for p in [a, b] {
                let old = self.target[p as usize];
                if self.opts.links {
                    self.detach(p);
                }
                let new = self.compute_target(p);
                self.target[p as usize] = new;
                if self.opts.links {
                    self.attach(p, new);
                }
                if old != new {
                    report.targets.push(TargetChange { w: p, old, new });
                }
            }
        }
        report.pairs = self.drain_pairs();
        report.visits = self.visits - start;
        report
    }

    /// Exchanges the points at `pos` and `pos + 1` of the axis list.
    pub fn swap_x(&mut self, pos: usize) -> SwapReport {
        assert!(pos + 1 < self.n, "swap outside the list");
        let start = self.visits;
        let d = self.d;
        let p = self.order[d][pos];
        let q = self.order[d][pos + 1];
        // Step 0: aggregates of nodes holding both points.
        let sets: Vec<Vec<u32>> = (0..d)
            .map(|j| ancestors(lca(self.leaf_of(j, p), self.leaf_of(j, q))))
            .collect();
        let mut common = Vec::new();
        for_each_tuple(&sets, |v| common.push(v));
        for v in common {
            self.visits += 1;
            if let Some(&a) = self.aggs.get(&v) {
                let mut na = a;
                if a.rmin == p {
                    na.rmin = q;
                }
                if a.rmax == q {
                    na.rmax = p;
                }
                if na != a {
                    self.set_agg(v, Some(na));
                }
            }
        }
        self.order[d].swap(pos, pos + 1);
        self.rank[d][p as usize] = pos as u32 + 1;
        self.rank[d][q as usize] = pos as u32;
        let mut report = SwapReport::default();
        if self.opts.targets {
            assert!(self.opts.links, "kinetic target repair needs links");
            // Step 1: nodes whose minimum is now q.
            let sets: Vec<Vec<u32>> = (0..d).map(|j| ancestors(self.leaf_of(j, q))).collect();
            let mut nodes = Vec::new();
            for_each_tuple(&sets, |v| nodes.push(v));
            self.visits += nodes.len() as u64;
            // Step 2: sources whose target is p at those nodes.
            let mut sources = BTreeSet::new();
            for v in nodes {
                if self.aggs.get(&v).map(|a| a.rmin) == Some(q) {
                    sources.extend(self.pairs_with_target(&v, p));
                }
            }
            // Step 3: retarget through the links.
            for w in sources {
                debug_assert!(self.dominates(w, q));
                self.retarget(w, p, q);
                report.targets.push(TargetChange {
                    w,
                    old: Some(p),
                    new: Some(q),
                });
            }
        }
        report.pairs = self.drain_pairs();
        report.visits = self.visits - start;
        report
    }

    fn pair_at(&self, v: &NodeKey, old: bool) -> Option<(u32, u32)> {
        let s = self.b_node(v)?;
        let look = |k: &NodeKey| -> Option<Agg> {
            if old {
                if let Some(prev) = self.journal.get(k) {
                    return *prev;
                }
            }
            self.aggs.get(k).copied()
        };
        let r = look(v)?.rmin;
        let b = look(&s)?.rmax;
        Some((b, r))
    }

    fn drain_pairs(&mut self) -> Vec<PairChange> {
        if !self.opts.pairs {
            return Vec::new();
        }
        let mut nodes = BTreeSet::new();
        for k in self.journal.keys() {
            let comps = &k[..self.d];
            if comps.iter().all(|&h| h > 1 && h & 1 == 1) {
                nodes.insert(*k);
            }
            if comps.iter().all(|&h| h >= 2 && h & 1 == 0) {
                let mut v = *k;
                for h in v.iter_mut().take(self.d) {
                    *h += 1;
                }
                nodes.insert(v);
            }
        }
        let mut out = Vec::new();
        for v in nodes {
            let old = self.pair_at(&v, true);
            let new = self.pair_at(&v, false);
            if old != new {
                out.push(PairChange { node: v, old, new });
            }
        }
        self.journal.clear();
        out
    }

    /// Current pairs `(v, b(v), r(v))` over all nodes with nonempty `B` and `R`.
    pub fn pairs(&self) -> Vec<(NodeKey, u32, u32)> {
        let mut keys: Vec<NodeKey> = self.aggs.keys().copied().collect();
        keys.sort_unstable();
        keys.into_iter()
            .filter_map(|v| self.pair_at(&v, false).map(|(b, r)| (v, b, r)))
            .collect()
    }

    /// Number of stored nonempty nodes.
    pub fn node_count(&self) -> usize {
        self.aggs.len()
    }

    pub fn entry_count(&self) -> usize {
        self.entries.len()
    }

    /// Compares with a tree built from scratch on the current lists.
    pub fn audit(&self) -> Result<(), String> {
        let fresh = Rbrt::new(self.d, self.order.clone(), self.opts);
        if fresh.aggs.len() != self.aggs.len() {
            return Err(format!(
                "node count {} differs from rebuilt {}",
                self.aggs.len(),
                fresh.aggs.len()
            ));
        }
        let mut keys: Vec<&NodeKey> = fresh.aggs.keys().collect();
        keys.sort_unstable();
        for k in keys {
            let want = &fresh.aggs[k];
            match self.aggs.get(k) {
                Some(got) if got == want => {}
                got => return Err(format!("node {:?}: have {:?}, rebuilt {:?}", k, got, want)),
            }
        }
        if self.target != fresh.target {
            let p = (0..self.n).find(|&p| self.target[p] != fresh.target[p]).unwrap();
            return Err(format!(
                "target of {}: have {:?}, rebuilt {:?}",
                p, self.target[p], fresh.target[p]
            ));
        }
        if self.entries != fresh.entries {
            return Err("target entries differ from rebuilt".to_string());
        }
        if self.links != fresh.links {
            return Err("links differ from rebuilt".to_string());
        }
        Ok(())
    }

    /// Indented dump of stored nodes and their aggregates.
    pub fn dump(&self) -> String {
        let mut keys: Vec<&NodeKey> = self.aggs.keys().collect();
        keys.sort_unstable();
        let mut out = String::new();
        for k in keys {
            let a = &self.aggs[k];
            let comps = &k[..self.d];
            let indent = "  ".repeat(depth(comps[self.d - 1]) as usize);
            let _ = write!(out, "{}{:?} r={} max={} n={}", indent, comps, a.rmin, a.rmax, a.count);
            if let Some(b) = self.b(k) {
                let _ = write!(out, " b={}", b);
            }
            out.push('\n');
        }
        out
    }

    /// Injects a wrong aggregate; used to exercise the verification path.
    #[doc(hidden)]
    pub fn corrupt_aggregate(&mut self) -> bool {
        let mut keys: Vec<NodeKey> = self.aggs.keys().copied().collect();
        keys.sort_unstable();
        for k in keys {
            let a = self.aggs[&k];
            if a.count > 1 {
                self.aggs.insert(k, Agg { rmin: a.rmax, ..a });
                return true;
            }
        }
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lists(d: usize, perms: &[&[u32]]) -> Vec<Vec<u32>> {
        assert_eq!(perms.len(), d + 1);
        perms.iter().map(|p| p.to_vec()).collect()
    }

    #[test]
    fn single_point_has_no_pairs() {
        let t = Rbrt::new(2, lists(2, &[&[0], &[0], &[0]]), RbrtOptions::SEMI_YAO);
        assert!(t.pairs().is_empty());
        assert_eq!(t.target(0), None);
        assert!(t.canonical_cone_nodes(0).is_empty());
    }

    #[test]
    fn two_points_one_pair() {
        // 1 dominates 0 in both normal lists.
        let t = Rbrt::new(2, lists(2, &[&[0, 1], &[0, 1], &[1, 0]]), RbrtOptions::SEMI_YAO);
        assert_eq!(t.target(0), Some(1));
        assert_eq!(t.target(1), None);
        let nodes = t.canonical_cone_nodes(0);
        assert_eq!(nodes.len(), 1);
        assert_eq!(t.r(&nodes[0]), Some(1));
        assert_eq!(t.pairs_with_target(&nodes[0], 1), vec![0]);
    }

    #[test]
    fn double_swap_restores_state() {
        let mut t = Rbrt::new(
            2,
            lists(2, &[&[0, 1, 2, 3], &[2, 0, 3, 1], &[3, 1, 0, 2]]),
            RbrtOptions::SEMI_YAO,
        );
        let before = t.clone();
        t.swap_u(0, 1);
        t.audit().unwrap();
        t.swap_u(0, 1);
        t.audit().unwrap();
        assert_eq!(t.aggs, before.aggs);
        assert_eq!(t.target, before.target);
        t.swap_x(2);
        t.audit().unwrap();
        t.swap_x(2);
        assert_eq!(t.entries, before.entries);
    }
}
