//! Dynamic and kinetic tournament tree: the minimum of a changing set of
//! polynomial-valued elements over time.
//!
//! Elements sit at the leaves of a weight-balanced binary tree; each internal
//! node stores the winner of its two children and a certificate that the
//! winner stays below the loser.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::sync::Arc;

use crate::kinetic::{CertTag, EventKind, EventQueue, Owner, TieKey};
use crate::motion::{sign_after, MotionError, Polynomial, TimeInstant};

/// Heavier child may hold at most this share of a subtree (plus one).
const BALANCE: f64 = 0.75;

#[derive(Clone, Debug)]
enum Kind {
    Leaf {
        elem: u32,
        value: Arc<Polynomial>,
    },
    Internal {
        left: u32,
        right: u32,
        winner: u32,
        /// Child winners the current certificate was computed for.
        pair: (u32, u32),
        cert: Option<u64>,
    },
}

#[derive(Clone, Debug)]
struct Node {
    parent: Option<u32>,
    size: u32,
    kind: Kind,
}

#[derive(Clone, Debug)]
pub struct Dktt {
    owner: Owner,
    point: u32,
    point_id: u64,
    nodes: Vec<Node>,
    free: Vec<u32>,
    root: Option<u32>,
    leaf_of: BTreeMap<u32, u32>,
    visits: u64,
}

/// True when `a` beats `b` just after `t`; identical values go to the smaller element.
pub fn beats(a: (u32, &Polynomial), b: (u32, &Polynomial), t: &TimeInstant) -> bool {
    match sign_after(&(a.1 - b.1), t) {
        Ordering::Less => true,
        Ordering::Greater => false,
        Ordering::Equal => a.0 < b.0,
    }
}

impl Dktt {
    /// Empty tree; `point`/`point_id` only label certificates.
    pub fn new(owner: Owner, point: u32, point_id: u64) -> Self {
        Dktt {
            owner,
            point,
            point_id,
            nodes: Vec::new(),
            free: Vec::new(),
            root: None,
            leaf_of: BTreeMap::new(),
            visits: 0,
        }
    }

    /// Builds a balanced tree over `elements` at the queue's current time.
    pub fn build(
        owner: Owner,
        point: u32,
        point_id: u64,
        elements: Vec<(u32, Arc<Polynomial>)>,
        queue: &mut EventQueue,
    ) -> Result<Self, MotionError> {
        let mut t = Dktt::new(owner, point, point_id);
        let mut elements = elements;
        elements.sort_by_key(|e| e.0);
        let leaves: Vec<u32> = elements
            .into_iter()
            .map(|(elem, value)| {
                assert!(!t.leaf_of.contains_key(&elem), "duplicate element");
                let id = t.alloc(Node {
                    parent: None,
                    size: 1,
                    kind: Kind::Leaf { elem, value },
                });
                t.leaf_of.insert(elem, id);
                id
            })
            .collect();
        if !leaves.is_empty() {
            let root = t.build_balanced(&leaves, queue)?;
            t.nodes[root as usize].parent = None;
            t.root = Some(root);
        }
        Ok(t)
    }

    pub fn len(&self) -> usize {
        self.leaf_of.len()
    }

    pub fn is_empty(&self) -> bool {
        self.leaf_of.is_empty()
    }

    pub fn contains(&self, elem: u32) -> bool {
        self.leaf_of.contains_key(&elem)
    }

    pub fn visits(&self) -> u64 {
        self.visits
    }

    pub fn elements(&self) -> impl Iterator<Item = u32> + '_ {
        self.leaf_of.keys().copied()
    }

    pub fn value(&self, elem: u32) -> Option<&Arc<Polynomial>> {
        let id = *self.leaf_of.get(&elem)?;
        match &self.nodes[id as usize].kind {
            Kind::Leaf { value, .. } => Some(value),
            Kind::Internal { .. } => unreachable!(),
        }
    }

    pub fn height(&self) -> usize {
        fn h(t: &Dktt, x: u32) -> usize {
            match &t.nodes[x as usize].kind {
                Kind::Leaf { .. } => 0,
                Kind::Internal { left, right, .. } => 1 + h(t, *left).max(h(t, *right)),
            }
        }
        self.root.map_or(0, |r| h(self, r))
    }

    /// Current minimum element.
    pub fn winner(&self) -> Option<u32> {
        self.root.map(|r| self.leaf_elem(self.winner_leaf(r)))
    }

    fn winner_leaf(&self, x: u32) -> u32 {
        match &self.nodes[x as usize].kind {
            Kind::Leaf { .. } => x,
            Kind::Internal { winner, .. } => *winner,
        }
    }

    fn leaf_elem(&self, leaf: u32) -> u32 {
        match &self.nodes[leaf as usize].kind {
            Kind::Leaf { elem, .. } => *elem,
            Kind::Internal { .. } => unreachable!(),
        }
    }

    fn leaf_value(&self, leaf: u32) -> &Arc<Polynomial> {
        match &self.nodes[leaf as usize].kind {
            Kind::Leaf { value, .. } => value,
            Kind::Internal { .. } => unreachable!(),
        }
    }

    fn alloc(&mut self, node: Node) -> u32 {
        if let Some(id) = self.free.pop() {
            self.nodes[id as usize] = node;
            id
        } else {
            self.nodes.push(node);
            (self.nodes.len() - 1) as u32
        }
    }

    fn release(&mut self, x: u32, queue: &mut EventQueue) {
        if let Kind::Internal { cert: Some(h), .. } = self.nodes[x as usize].kind {
            queue.deschedule(h);
        }
        self.free.push(x);
    }

    fn tie_key(&self, node: u32) -> TieKey {
        TieKey {
            kind: EventKind::Tournament,
            cone: match self.owner {
                Owner::Nearest => 0,
                Owner::Approximate => 1,
            },
            axis: node,
            min_id: self.point_id,
            max_id: self.point_id,
        }
    }

    /// Recomputes the winner and certificate of internal node `x` if its
    /// child winners changed (or always, when `force`). Returns whether the
    /// winner changed.
    fn refresh(&mut self, x: u32, force: bool, queue: &mut EventQueue) -> Result<bool, MotionError> {
        let (left, right, old_winner, pair, cert) = match &self.nodes[x as usize].kind {
            Kind::Internal {
                left,
                right,
                winner,
                pair,
                cert,
            } => (*left, *right, *winner, *pair, *cert),
            Kind::Leaf { .. } => return Ok(false),
        };
        let wl = self.winner_leaf(left);
        let wr = self.winner_leaf(right);
        if !force && pair == (wl, wr) && cert.is_some() {
            return Ok(false);
        }
        self.visits += 1;
        if let Some(h) = cert {
            queue.deschedule(h);
        }
        let now = queue.now().clone();
        let (a, b) = (
            (self.leaf_elem(wl), self.leaf_value(wl).as_ref()),
            (self.leaf_elem(wr), self.leaf_value(wr).as_ref()),
        );
        let (winner, loser) = if beats(a, b, &now) { (wl, wr) } else { (wr, wl) };
        let poly = self.leaf_value(loser).as_ref() - self.leaf_value(winner).as_ref();
        let tag = CertTag::Tournament {
            owner: self.owner,
            point: self.point,
            node: x,
        };
        let h = queue.schedule(tag, self.tie_key(x), poly, true)?;
        self.nodes[x as usize].kind = Kind::Internal {
            left,
            right,
            winner,
            pair: (wl, wr),
            cert: Some(h),
        };
        Ok(winner != old_winner)
    }

    fn build_balanced(&mut self, leaves: &[u32], queue: &mut EventQueue) -> Result<u32, MotionError> {
        if leaves.len() == 1 {
            return Ok(leaves[0]);
        }
        let mid = leaves.len() / 2;
        let left = self.build_balanced(&leaves[..mid], queue)?;
        let right = self.build_balanced(&leaves[mid..], queue)?;
        let x = self.alloc(Node {
            parent: None,
            size: leaves.len() as u32,
            kind: Kind::Internal {
                left,
                right,
                winner: left,
                pair: (u32::MAX, u32::MAX),
                cert: None,
            },
        });
        self.nodes[left as usize].parent = Some(x);
        self.nodes[right as usize].parent = Some(x);
        self.refresh(x, true, queue)?;
        Ok(x)
    }

    fn children(&self, x: u32) -> Option<(u32, u32)> {
        match &self.nodes[x as usize].kind {
            Kind::Internal { left, right, .. } => Some((*left, *right)),
            Kind::Leaf { .. } => None,
        }
    }

    fn collect_leaves(&self, x: u32, out: &mut Vec<u32>, internals: &mut Vec<u32>) {
        match self.children(x) {
            None => out.push(x),
            Some((l, r)) => {
                internals.push(x);
                self.collect_leaves(l, out, internals);
                self.collect_leaves(r, out, internals);
            }
        }
    }

    /// Updates sizes and winners from `x` to the root, rebuilding the highest
    /// subtree that lost weight balance.
    fn fix_upward(&mut self, start: Option<u32>, queue: &mut EventQueue) -> Result<(), MotionError> {
        let mut path = Vec::new();
        let mut cur = start;
        while let Some(x) = cur {
            path.push(x);
            cur = self.nodes[x as usize].parent;
        }
        for &x in &path {
            if let Some((l, r)) = self.children(x) {
                self.nodes[x as usize].size = self.nodes[l as usize].size + self.nodes[r as usize].size;
            }
        }
        let unbalanced = path.iter().rev().copied().find(|&x| match self.children(x) {
            Some((l, r)) => {
                let heavy = self.nodes[l as usize].size.max(self.nodes[r as usize].size) as f64;
                heavy > BALANCE * self.nodes[x as usize].size as f64 + 1.0
            }
            None => false,
        });
        let mut from = start;
        if let Some(x) = unbalanced {
            let parent = self.nodes[x as usize].parent;
            let mut leaves = Vec::new();
            let mut internals = Vec::new();
            self.collect_leaves(x, &mut leaves, &mut internals);
            for i in internals {
                self.release(i, queue);
            }
            let sub = self.build_balanced(&leaves, queue)?;
            self.nodes[sub as usize].parent = parent;
            match parent {
                None => self.root = Some(sub),
                Some(p) => self.replace_child(p, x, sub),
            }
            self.visits += leaves.len() as u64;
            from = parent;
        }
        let mut cur = from;
        while let Some(x) = cur {
            self.visits += 1;
            self.refresh(x, false, queue)?;
            cur = self.nodes[x as usize].parent;
        }
        Ok(())
    }

    fn replace_child(&mut self, p: u32, old: u32, new: u32) {
        if let Kind::Internal { left, right, .. } = &mut self.nodes[p as usize].kind {
            if *left == old {
                *left = new;
            } else {
                debug_assert_eq!(*right, old);
                *right = new;
            }
        }
    }

    /// Adds an element; returns whether the overall winner changed.
    pub fn insert(&mut self, elem: u32, value: Arc<Polynomial>, queue: &mut EventQueue) -> Result<bool, MotionError> {
        assert!(!self.leaf_of.contains_key(&elem), "element already present");
        let before = self.winner();
        let leaf = self.alloc(Node {
            parent: None,
            size: 1,
            kind: Kind::Leaf { elem, value },
        });
        self.leaf_of.insert(elem, leaf);
        let Some(root) = self.root else {
            self.root = Some(leaf);
            return Ok(true);
        };
        let mut x = root;
        while let Some((l, r)) = self.children(x) {
            self.visits += 1;
            x = if self.nodes[l as usize].size <= self.nodes[r as usize].size {
                l
            } else {
                r
            };
        }
        let parent = self.nodes[x as usize].parent;
        let inner = self.alloc(Node {
            parent,
            size: 2,
            kind: Kind::Internal {
                left: x,
                right: leaf,
                winner: x,
                pair: (u32::MAX, u32::MAX),
                cert: None,
            },
        });
        match parent {
            None => self.root = Some(inner),
            Some(p) => self.replace_child(p, x, inner),
        }
        self.nodes[x as usize].parent = Some(inner);
        self.nodes[leaf as usize].parent = Some(inner);
        self.fix_upward(Some(inner), queue)?;
        Ok(self.winner() != before)
    }

    /// Removes an element; returns whether the overall winner changed.
    pub fn remove(&mut self, elem: u32, queue: &mut EventQueue) -> Result<bool, MotionError> {
        let leaf = self.leaf_of.remove(&elem).expect("element not present");
        let before = self.winner();
        let parent = self.nodes[leaf as usize].parent;
        self.free.push(leaf);
        let Some(p) = parent else {
            self.root = None;
            return Ok(true);
        };
        let (l, r) = self.children(p).unwrap();
        let sibling = if l == leaf { r } else { l };
        let grand = self.nodes[p as usize].parent;
        self.release(p, queue);
        self.nodes[sibling as usize].parent = grand;
        match grand {
            None => self.root = Some(sibling),
            Some(g) => self.replace_child(g, p, sibling),
        }
        self.fix_upward(grand, queue)?;
        Ok(self.winner() != before)
    }

    /// Replaces the value of an element.
    pub fn update(&mut self, elem: u32, value: Arc<Polynomial>, queue: &mut EventQueue) -> Result<bool, MotionError> {
        let before = self.winner();
        let leaf = *self.leaf_of.get(&elem).expect("element not present");
        self.nodes[leaf as usize].kind = Kind::Leaf { elem, value };
        let mut cur = self.nodes[leaf as usize].parent;
        while let Some(x) = cur {
            // Certificates not involving the leaf stay valid.
            let involved = matches!(
                self.nodes[x as usize].kind,
                Kind::Internal { pair, .. } if pair.0 == leaf || pair.1 == leaf
            );
            self.refresh(x, involved, queue)?;
            cur = self.nodes[x as usize].parent;
        }
        Ok(self.winner() != before)
    }

    /// Handles the failure of the certificate at `node`, which the queue has
    /// already consumed. Returns whether the overall winner changed.
    pub fn handle_event(&mut self, node: u32, queue: &mut EventQueue) -> Result<bool, MotionError> {
        let before = self.winner();
        if let Kind::Internal { cert, .. } = &mut self.nodes[node as usize].kind {
            *cert = None;
        } else {
            panic!("tournament event at a leaf");
        }
        self.refresh(node, true, queue)?;
        let mut cur = self.nodes[node as usize].parent;
        while let Some(x) = cur {
            self.visits += 1;
            if !self.refresh(x, false, queue)? {
                break;
            }
            cur = self.nodes[x as usize].parent;
        }
        Ok(self.winner() != before)
    }

    /// Checks every internal winner against its children just after `t`.
    pub fn audit(&self, t: &TimeInstant) -> Result<(), String> {
        let Some(root) = self.root else {
            return if self.leaf_of.is_empty() {
                Ok(())
            } else {
                Err("leaves without root".into())
            };
        };
        let mut stack = vec![root];
        let mut leaves = 0;
        while let Some(x) = stack.pop() {
            match &self.nodes[x as usize].kind {
                Kind::Leaf { .. } => leaves += 1,
                Kind::Internal {
                    left,
                    right,
                    winner,
                    cert,
                    ..
                } => {
                    if cert.is_none() {
                        return Err(format!("node {} has no certificate", x));
                    }
                    let wl = self.winner_leaf(*left);
                    let wr = self.winner_leaf(*right);
                    let a = (self.leaf_elem(wl), self.leaf_value(wl).as_ref());
                    let b = (self.leaf_elem(wr), self.leaf_value(wr).as_ref());
                    let want = if beats(a, b, t) { wl } else { wr };
                    if want != *winner {
                        return Err(format!("node {} stores a stale winner", x));
                    }
                    stack.push(*left);
                    stack.push(*right);
                }
            }
        }
        if leaves != self.leaf_of.len() {
            return Err("leaf count mismatch".into());
        }
        Ok(())
    }
}
