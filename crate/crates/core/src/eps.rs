//! All (1+eps)-nearest neighbours through the relative nearest neighbour
//! graph: for each cone and node `v`, the edge `(b(v), r(v))`.
//!
//! For every point `p` and cone `l`, `N_l(p)` collects the `r(v)` with
//! `b(v) = p`, ordered by axis position; its first element `n_l(p)` is a
//! candidate, and a small tournament per point picks the closest candidate.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use crate::dktt::Dktt;
use crate::forest::{ConeForest, OrderEvent};
use crate::kinetic::{EventKind, EventQueue, Owner};
use crate::motion::{squared_distance_poly, MotionError, Trajectory};

#[derive(Clone, Debug)]
pub struct EpsKds {
    points: Arc<Vec<Trajectory>>,
    epsilon: f64,
    /// `lists[l][p]`: axis rank -> (point, multiplicity).
    lists: Vec<Vec<BTreeMap<u32, (u32, u32)>>>,
    /// `member_of[l][r]`: owners `p` with `r` in `N_l(p)`, with multiplicity.
    member_of: Vec<Vec<BTreeMap<u32, u32>>>,
    /// `best[p][l] = n_l(p)`.
    best: Vec<Vec<Option<u32>>>,
    tours: Vec<Dktt>,
    visits: u64,
}

impl EpsKds {
    pub fn build(forest: &ConeForest, epsilon: f64, queue: &mut EventQueue) -> Result<EpsKds, MotionError> {
        let points: Arc<Vec<Trajectory>> = Arc::new(forest.points().to_vec());
        let n = points.len();
        let c = forest.family().len();
        let mut kds = EpsKds {
            tours: Vec::with_capacity(n),
            points,
            epsilon,
            lists: vec![vec![BTreeMap::new(); n]; c],
            member_of: vec![vec![BTreeMap::new(); n]; c],
            best: vec![vec![None; c]; n],
            visits: 0,
        };
        for (l, tree) in forest.trees().iter().enumerate() {
            let d = tree.levels();
            for (_, b, r) in tree.pairs() {
                kds.add(l, b, r, tree.rank(d, r));
            }
        }
        for p in 0..n {
            for l in 0..c {
                kds.best[p][l] = kds.lists[l][p].values().next().map(|e| e.0);
            }
            let elems = (0..c)
                .filter_map(|l| kds.best[p][l].map(|q| (l as u32, kds.distance(p as u32, q))))
                .collect();
            let pid = kds.points[p].point_id;
            kds.tours
                .push(Dktt::build(Owner::Approximate, p as u32, pid, elems, queue)?);
        }
        Ok(kds)
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    fn distance(&self, p: u32, q: u32) -> Arc<crate::motion::Polynomial> {
        Arc::new(squared_distance_poly(
            &self.points[p as usize],
            &self.points[q as usize],
        ))
    }

    fn add(&mut self, l: usize, b: u32, r: u32, rank: u32) {
        self.visits += 1;
        let e = self.lists[l][b as usize].entry(rank).or_insert((r, 0));
        debug_assert_eq!(e.0, r);
        e.1 += 1;
        *self.member_of[l][r as usize].entry(b).or_insert(0) += 1;
    }

    fn remove(&mut self, l: usize, b: u32, r: u32, rank: u32) {
        self.visits += 1;
        let list = &mut self.lists[l][b as usize];
        let e = list.get_mut(&rank).expect("candidate present");
        debug_assert_eq!(e.0, r);
        e.1 -= 1;
        if e.1 == 0 {
            list.remove(&rank);
        }
        let m = &mut self.member_of[l][r as usize];
        let c = m.get_mut(&b).expect("membership present");
        *c -= 1;
        if *c == 0 {
            m.remove(&b);
        }
    }

    /// Applies the list and pair changes of one order event. Returns points
    /// whose approximate neighbour changed.
    pub fn apply(
        &mut self,
        forest: &ConeForest,
        ev: &OrderEvent,
        queue: &mut EventQueue,
    ) -> Result<Vec<u32>, MotionError> {
        let l = ev.cone;
        let tree = forest.tree(l);
        let d = tree.levels();
        let mut touched = BTreeSet::new();
        if ev.kind == EventKind::OrderX {
            // a and b exchanged axis ranks; re-key their entries.
            let (a, b) = (ev.a, ev.b);
            let (ra, rb) = (tree.rank(d, a), tree.rank(d, b));
            let owners: BTreeSet<u32> = self.member_of[l][a as usize]
                .keys()
                .chain(self.member_of[l][b as usize].keys())
                .copied()
                .collect();
            for o in owners {
                let list = &mut self.lists[l][o as usize];
                let ea = list.remove(&rb);
                let eb = list.remove(&ra);
                if let Some(e) = ea {
                    debug_assert_eq!(e.0, a);
                    list.insert(ra, e);
                }
                if let Some(e) = eb {
                    debug_assert_eq!(e.0, b);
                    list.insert(rb, e);
                }
                self.visits += 2;
                touched.insert(o);
            }
        }
        for pc in &ev.report.pairs {
            if let Some((b, r)) = pc.old {
                self.remove(l, b, r, tree.rank(d, r));
                touched.insert(b);
            }
            if let Some((b, r)) = pc.new {
                self.add(l, b, r, tree.rank(d, r));
                touched.insert(b);
            }
        }
        let mut changed = Vec::new();
        for p in touched {
            let new = self.lists[l][p as usize].values().next().map(|e| e.0);
            let old = self.best[p as usize][l];
            if new == old {
                continue;
            }
            self.best[p as usize][l] = new;
            let tour = &mut self.tours[p as usize];
            let moved = match (old, new) {
                (Some(_), Some(q)) => {
                    let v = Arc::new(squared_distance_poly(
                        &self.points[p as usize],
                        &self.points[q as usize],
                    ));
                    tour.update(l as u32, v, queue)?
                }
                (Some(_), None) => tour.remove(l as u32, queue)?,
                (None, Some(q)) => {
                    let v = Arc::new(squared_distance_poly(
                        &self.points[p as usize],
                        &self.points[q as usize],
                    ));
                    tour.insert(l as u32, v, queue)?
                }
                (None, None) => false,
            };
            if moved || old.is_some() && new.is_some() {
                changed.push(p);
            }
        }
        Ok(changed)
    }

    pub fn handle_event(&mut self, point: u32, node: u32, queue: &mut EventQueue) -> Result<bool, MotionError> {
        self.tours[point as usize].handle_event(node, queue)
    }

    /// Current approximate nearest neighbour of `p`.
    pub fn eps_nearest(&self, p: u32) -> Option<u32> {
        let l = self.tours[p as usize].winner()?;
        self.best[p as usize][l as usize]
    }

    pub fn all_eps_nearest(&self) -> Vec<Option<u32>> {
        (0..self.points.len() as u32).map(|p| self.eps_nearest(p)).collect()
    }

    /// `n_l(p)` for every cone.
    pub fn candidates(&self, p: u32) -> &[Option<u32>] {
        &self.best[p as usize]
    }

    pub fn visits(&self) -> u64 {
        self.visits + self.tours.iter().map(Dktt::visits).sum::<u64>()
    }

    /// Compares the candidate lists with the pairs of `forest` recomputed from scratch.
    pub fn audit(&self, forest: &ConeForest, t: &crate::motion::TimeInstant) -> Result<(), String> {
        let n = self.points.len();
        for (l, tree) in forest.trees().iter().enumerate() {
            let d = tree.levels();
            let mut want: Vec<BTreeMap<u32, (u32, u32)>> = vec![BTreeMap::new(); n];
            for (_, b, r) in tree.pairs() {
                want[b as usize].entry(tree.rank(d, r)).or_insert((r, 0)).1 += 1;
            }
            for p in 0..n {
                if want[p] != self.lists[l][p] {
                    return Err(format!("candidate list of {} in cone {} differs", p, l));
                }
                let first = want[p].values().next().map(|e| e.0);
                if first != self.best[p][l] {
                    return Err(format!("n_{}({}) is stale", l, p));
                }
            }
        }
        for (p, tour) in self.tours.iter().enumerate() {
            tour.audit(t)
                .map_err(|e| format!("candidate tournament of {}: {}", p, e))?;
        }
        Ok(())
    }

    /// Distinct undirected edges of the relative nearest neighbour graph.
    pub fn rnn_edges(forest: &ConeForest) -> BTreeSet<(u32, u32)> {
        let mut out = BTreeSet::new();
        for tree in forest.trees() {
            for (_, b, r) in tree.pairs() {
                out.insert((b.min(r), b.max(r)));
            }
        }
        out
    }
}
