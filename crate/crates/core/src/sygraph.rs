//! The Semi-Yao graph: every point linked, in every cone, to the point of
//! that cone with the smallest coordinate along the cone axis.

use std::collections::BTreeSet;
use std::sync::Arc;

use crate::cones::ConeFamily;
use crate::forest::{ConeForest, OrderEvent};
use crate::kinetic::EventQueue;
use crate::motion::{MotionError, TimeInstant, Trajectory};
use crate::rbrt::{RbrtOptions, TargetChange};

/// Directed targets, indexed `[point][cone]` by point index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SemiYaoGraph {
    pub targets: Vec<Vec<Option<u32>>>,
}

impl SemiYaoGraph {
    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    /// Undirected edges `(min, max)` without repetition.
    pub fn edges(&self) -> BTreeSet<(u32, u32)> {
        let mut out = BTreeSet::new();
        for (w, row) in self.targets.iter().enumerate() {
            for t in row.iter().flatten() {
                let w = w as u32;
                out.insert((w.min(*t), w.max(*t)));
            }
        }
        out
    }

    pub fn directed_edge_count(&self) -> usize {
        self.targets.iter().map(|r| r.iter().flatten().count()).sum()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EdgeChangeKind {
    Insert,
    Delete,
}

/// Insertion or deletion of a directed edge `w -> target` in cone `cone`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EdgeChange {
    pub kind: EdgeChangeKind,
    pub w: u32,
    pub target: u32,
    pub cone: usize,
}

pub fn edge_changes(cone: usize, changes: &[TargetChange]) -> Vec<EdgeChange> {
    let mut out = Vec::new();
    for c in changes {
        if let Some(t) = c.old {
            out.push(EdgeChange {
                kind: EdgeChangeKind::Delete,
                w: c.w,
                target: t,
                cone,
            });
        }
        if let Some(t) = c.new {
            out.push(EdgeChange {
                kind: EdgeChangeKind::Insert,
                w: c.w,
                target: t,
                cone,
            });
        }
    }
    out
}

fn snapshot_of(forest: &ConeForest) -> SemiYaoGraph {
    let n = forest.points().len();
    let c = forest.family().len();
    let mut targets = vec![vec![None; c]; n];
    for (l, tree) in forest.trees().iter().enumerate() {
        for (p, t) in tree.targets().iter().enumerate() {
            targets[p][l] = *t;
        }
    }
    SemiYaoGraph { targets }
}

/// Static construction at time `t`. Points must be sorted by id.
pub fn build_static(points: Arc<Vec<Trajectory>>, family: Arc<ConeFamily>, t: &TimeInstant) -> SemiYaoGraph {
    let forest = ConeForest::build(family, points, t, RbrtOptions::STATIC);
    snapshot_of(&forest)
}

/// Kinetic Semi-Yao graph.
#[derive(Clone, Debug)]
pub struct SemiYaoKds {
    forest: ConeForest,
}

impl SemiYaoKds {
    /// Builds at the queue's current time and schedules all certificates.
    pub fn new(
        points: Arc<Vec<Trajectory>>,
        family: Arc<ConeFamily>,
        queue: &mut EventQueue,
    ) -> Result<SemiYaoKds, MotionError> {
        let mut forest = ConeForest::build(family, points, queue.now(), RbrtOptions::SEMI_YAO);
        forest.start(queue)?;
        Ok(SemiYaoKds { forest })
    }

    pub fn forest(&self) -> &ConeForest {
        &self.forest
    }

    #[doc(hidden)]
    pub fn forest_mut(&mut self) -> &mut ConeForest {
        &mut self.forest
    }

    pub fn snapshot(&self) -> SemiYaoGraph {
        snapshot_of(&self.forest)
    }

    /// Handles a failed order certificate; returns the event and its edge changes.
    pub fn handle(
        &mut self,
        cone: usize,
        list: usize,
        pos: usize,
        queue: &mut EventQueue,
    ) -> Result<(OrderEvent, Vec<EdgeChange>), MotionError> {
        let ev = self.forest.handle(cone, list, pos, queue)?;
        let changes = edge_changes(cone, &ev.report.targets);
        Ok((ev, changes))
    }
}
