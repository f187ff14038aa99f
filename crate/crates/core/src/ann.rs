//! All nearest neighbours: one tournament per point over its incident
//! Semi-Yao edges.

use std::sync::Arc;

use rustc_hash::FxHashMap;

use crate::dktt::{beats, Dktt};
use crate::kinetic::{EventQueue, Owner};
use crate::motion::{sign_after, squared_distance_poly, MotionError, Polynomial, TimeInstant, Trajectory};
use crate::sygraph::{EdgeChange, EdgeChangeKind, SemiYaoGraph};

/// Nearest neighbour of every point at `t` from the Semi-Yao edges alone.
pub fn build_all(points: &[Trajectory], graph: &SemiYaoGraph, t: &TimeInstant) -> Vec<Option<u32>> {
    let mut best: Vec<Option<(u32, Polynomial)>> = vec![None; points.len()];
    for (a, b) in graph.edges() {
        let f = squared_distance_poly(&points[a as usize], &points[b as usize]);
        for (p, q) in [(a, b), (b, a)] {
            let slot = &mut best[p as usize];
            let take = match slot {
                None => true,
                Some((cur, g)) => beats((q, &f), (*cur, g), t),
            };
            if take {
                *slot = Some((q, f.clone()));
            }
        }
    }
    best.into_iter().map(|b| b.map(|(q, _)| q)).collect()
}

#[derive(Clone, Debug)]
pub struct AnnKds {
    points: Arc<Vec<Trajectory>>,
    tours: Vec<Dktt>,
    refcount: FxHashMap<(u32, u32), u32>,
    updates: Vec<u64>,
}

fn key(a: u32, b: u32) -> (u32, u32) {
    (a.min(b), a.max(b))
}

impl AnnKds {
    /// Builds all tournaments from a Semi-Yao snapshot at the queue's time.
    pub fn build(
        points: Arc<Vec<Trajectory>>,
        graph: &SemiYaoGraph,
        queue: &mut EventQueue,
    ) -> Result<AnnKds, MotionError> {
        let n = points.len();
        let mut refcount: FxHashMap<(u32, u32), u32> = FxHashMap::default();
        for (w, row) in graph.targets.iter().enumerate() {
            for t in row.iter().flatten() {
                *refcount.entry(key(w as u32, *t)).or_insert(0) += 1;
            }
        }
        let mut inc: Vec<Vec<u32>> = vec![Vec::new(); n];
        let mut edges: Vec<(u32, u32)> = refcount.keys().copied().collect();
        edges.sort_unstable();
        for (a, b) in edges {
            inc[a as usize].push(b);
            inc[b as usize].push(a);
        }
        let mut tours = Vec::with_capacity(n);
        for (p, nbrs) in inc.into_iter().enumerate() {
            let elems = nbrs
                .into_iter()
                .map(|q| (q, Arc::new(squared_distance_poly(&points[p], &points[q as usize]))))
                .collect();
            tours.push(Dktt::build(Owner::Nearest, p as u32, points[p].point_id, elems, queue)?);
        }
        Ok(AnnKds {
            points,
            tours,
            refcount,
            updates: vec![0; n],
        })
    }

    fn link(&mut self, a: u32, b: u32, queue: &mut EventQueue) -> Result<Vec<u32>, MotionError> {
        let mut changed = Vec::new();
        let value = Arc::new(squared_distance_poly(
            &self.points[a as usize],
            &self.points[b as usize],
        ));
        for (p, q) in [(a, b), (b, a)] {
            self.updates[p as usize] += 1;
            if self.tours[p as usize].insert(q, value.clone(), queue)? {
                changed.push(p);
            }
        }
        Ok(changed)
    }

    fn unlink(&mut self, a: u32, b: u32, queue: &mut EventQueue) -> Result<Vec<u32>, MotionError> {
        let mut changed = Vec::new();
        for (p, q) in [(a, b), (b, a)] {
            self.updates[p as usize] += 1;
            if self.tours[p as usize].remove(q, queue)? {
                changed.push(p);
            }
        }
        Ok(changed)
    }

    /// Applies one Semi-Yao edge change; returns points whose neighbour changed.
    pub fn on_edge_change(&mut self, ch: &EdgeChange, queue: &mut EventQueue) -> Result<Vec<u32>, MotionError> {
        let k = key(ch.w, ch.target);
        match ch.kind {
            EdgeChangeKind::Insert => {
                let c = self.refcount.entry(k).or_insert(0);
                *c += 1;
                if *c == 1 {
                    return self.link(k.0, k.1, queue);
                }
            }
            EdgeChangeKind::Delete => {
                let c = self.refcount.get_mut(&k).expect("deleting an absent edge");
                *c -= 1;
                if *c == 0 {
                    self.refcount.remove(&k);
                    return self.unlink(k.0, k.1, queue);
                }
            }
        }
        Ok(Vec::new())
    }

    /// Tournament certificate failure in the tree of `point`.
    pub fn handle_event(&mut self, point: u32, node: u32, queue: &mut EventQueue) -> Result<bool, MotionError> {
        self.tours[point as usize].handle_event(node, queue)
    }

    pub fn nearest(&self, p: u32) -> Option<u32> {
        self.tours[p as usize].winner()
    }

    pub fn all_nearest(&self) -> Vec<Option<u32>> {
        self.tours.iter().map(Dktt::winner).collect()
    }

    /// Incident neighbours of `p`, ascending.
    pub fn incidence(&self, p: u32) -> Vec<u32> {
        self.tours[p as usize].elements().collect()
    }

    pub fn incidence_total(&self) -> usize {
        self.tours.iter().map(Dktt::len).sum()
    }

    /// Number of insertions and deletions applied to the tournament of `p`.
    pub fn updates(&self, p: u32) -> u64 {
        self.updates[p as usize]
    }

    pub fn visits(&self) -> u64 {
        self.tours.iter().map(Dktt::visits).sum()
    }

    /// Closest pair at `t` from the neighbour table, ties by `(min, max)` index.
    pub fn closest_pair(&self, t: &TimeInstant) -> Option<(u32, u32)> {
        let mut best: Option<(u32, u32, Arc<Polynomial>)> = None;
        for (p, tour) in self.tours.iter().enumerate() {
            let Some(q) = tour.winner() else { continue };
            let (a, b) = key(p as u32, q);
            let v = tour.value(q).unwrap().clone();
            best = match best {
                None => Some((a, b, v)),
                Some((ba, bb, bv)) => {
                    let ord = sign_after(&(v.as_ref() - bv.as_ref()), t);
                    let take = ord.is_lt() || (ord.is_eq() && (a, b) < (ba, bb));
                    if take {
                        Some((a, b, v))
                    } else {
                        Some((ba, bb, bv))
                    }
                }
            };
        }
        best.map(|(a, b, _)| (a, b))
    }

    /// Checks incidence against `graph` and every tournament at `t`.
    pub fn audit(&self, graph: &SemiYaoGraph, t: &TimeInstant) -> Result<(), String> {
        let n = self.points.len();
        let mut inc: Vec<Vec<u32>> = vec![Vec::new(); n];
        for (a, b) in graph.edges() {
            inc[a as usize].push(b);
            inc[b as usize].push(a);
        }
        for (p, want) in inc.iter_mut().enumerate() {
            want.sort_unstable();
            if *want != self.incidence(p as u32) {
                return Err(format!("incidence of {} differs from the graph", p));
            }
            self.tours[p]
                .audit(t)
                .map_err(|e| format!("tournament of {}: {}", p, e))?;
            // The root winner must beat every element.
            if let Some(w) = self.nearest(p as u32) {
                let wv = self.tours[p].value(w).unwrap();
                for q in self.tours[p].elements() {
                    let qv = self.tours[p].value(q).unwrap();
                    if q != w && !beats((w, wv), (q, qv), t) {
                        return Err(format!("winner of {} is not minimal", p));
                    }
                }
            }
        }
        Ok(())
    }
}
