//! Per-cone sorted lists of moving points with order certificates, each
//! feeding one rank-based range tree.

use std::cmp::Ordering;
use std::sync::Arc;

use crate::cones::ConeFamily;
use crate::kinetic::{CertTag, EventKind, EventQueue, Handle, TieKey};
use rustc_hash::FxHashMap;

use crate::motion::{int, sign_after, MotionError, Polynomial, Rational, TimeInstant, Trajectory};
use crate::rbrt::{Rbrt, RbrtOptions, SwapReport};

/// Sorts `0..n` along `axis` just after `t`, ties by the perturbation rule.
pub fn sort_along(family: &ConeFamily, points: &[Trajectory], axis: &[Rational], t: &TimeInstant) -> Vec<u32> {
    let mut idx: Vec<u32> = (0..points.len() as u32).collect();
    match t.as_exact() {
        Some(t0) => {
            // Derivatives at t0 order the points lexicographically just after t0.
            let keys: Vec<Vec<Rational>> = points
                .iter()
                .map(|p| {
                    let mut f = projection(p, axis);
                    let mut k = Vec::with_capacity(f.degree() + 1);
                    loop {
                        k.push(f.eval(t0));
                        if f.is_constant() {
                            break;
                        }
                        f = f.derivative();
                    }
                    k
                })
                .collect();
            idx.sort_by(|&a, &b| {
                let (ka, kb) = (&keys[a as usize], &keys[b as usize]);
                let len = ka.len().max(kb.len());
                let zero = int(0);
                for i in 0..len {
                    let x = ka.get(i).unwrap_or(&zero);
                    let y = kb.get(i).unwrap_or(&zero);
                    match x.cmp(y) {
                        Ordering::Equal => continue,
                        o => return o,
                    }
                }
                family.tie_order(points[b as usize].point_id, points[a as usize].point_id, axis)
            });
        }
        None => {
            idx.sort_by(|&a, &b| family.compare_at(&points[b as usize], &points[a as usize], axis, t));
        }
    }
    idx
}

fn projection(p: &Trajectory, axis: &[Rational]) -> Polynomial {
    let mut out = Polynomial::zero();
    for (c, w) in p.coords().iter().zip(axis) {
        out = &out + &c.scale(w);
    }
    out
}

/// What an order event did.
#[derive(Clone, Debug)]
pub struct OrderEvent {
    pub kind: EventKind,
    pub cone: usize,
    pub list: usize,
    /// The two points, in their order before the swap.
    pub a: u32,
    pub b: u32,
    pub report: SwapReport,
}

#[derive(Clone, Debug)]
pub struct ConeForest {
    family: Arc<ConeFamily>,
    points: Arc<Vec<Trajectory>>,
    trees: Vec<Rbrt>,
    certs: Vec<Vec<Vec<Option<Handle>>>>,
    cert_count: Vec<u32>,
    max_cert_count: u32,
    /// `proj[axis_slot[l][j]][p]`: position of `p` along axis `j` of cone `l`.
    axis_slot: Vec<Vec<usize>>,
    proj: Vec<Vec<Polynomial>>,
}

impl ConeForest {
    /// Sorts every list at `t` and builds the trees; no certificates yet.
    pub fn build(
        family: Arc<ConeFamily>,
        points: Arc<Vec<Trajectory>>,
        t: &TimeInstant,
        opts: RbrtOptions,
    ) -> ConeForest {
        let d = family.dim();
        let trees = (0..family.len())
            .map(|l| {
                let lists = (0..=d)
                    .map(|j| sort_along(&family, &points, family.axis_vector(l, j), t))
                    .collect();
                Rbrt::new(d, lists, opts)
            })
            .collect();
        let n = points.len();
        let mut slots: FxHashMap<&[Rational], usize> = FxHashMap::default();
        let mut proj = Vec::new();
        let axis_slot = (0..family.len())
            .map(|l| {
                (0..=d)
                    .map(|j| {
                        let axis = family.axis_vector(l, j);
                        *slots.entry(axis).or_insert_with(|| {
                            proj.push(points.iter().map(|p| projection(p, axis)).collect());
                            proj.len() - 1
                        })
                    })
                    .collect()
            })
            .collect();
        ConeForest {
            axis_slot,
            proj,
            certs: vec![vec![vec![None; n.saturating_sub(1)]; d + 1]; family.len()],
            family,
            points,
            trees,
            cert_count: vec![0; n],
            max_cert_count: 0,
        }
    }

    pub fn family(&self) -> &ConeFamily {
        &self.family
    }

    pub fn points(&self) -> &[Trajectory] {
        &self.points
    }

    pub fn tree(&self, l: usize) -> &Rbrt {
        &self.trees[l]
    }

    pub fn trees(&self) -> &[Rbrt] {
        &self.trees
    }

    #[doc(hidden)]
    pub fn tree_mut(&mut self, l: usize) -> &mut Rbrt {
        &mut self.trees[l]
    }

    /// Largest number of order certificates any point has been part of.
    pub fn max_cert_count(&self) -> u32 {
        self.max_cert_count
    }

    pub fn cert_count(&self, p: u32) -> u32 {
        self.cert_count[p as usize]
    }

    /// Schedules one certificate per adjacent pair of every list.
    pub fn start(&mut self, queue: &mut EventQueue) -> Result<(), MotionError> {
        for l in 0..self.trees.len() {
            for j in 0..=self.family.dim() {
                for pos in 0..self.points.len().saturating_sub(1) {
                    self.add_cert(l, j, pos, queue)?;
                }
            }
        }
        Ok(())
    }

    fn add_cert(&mut self, l: usize, j: usize, pos: usize, queue: &mut EventQueue) -> Result<(), MotionError> {
        debug_assert!(self.certs[l][j][pos].is_none());
        let order = self.trees[l].order(j);
        let (a, b) = (order[pos], order[pos + 1]);
        let (pa, pb) = (&self.points[a as usize], &self.points[b as usize]);
        let axis = self.family.axis_vector(l, j);
        let proj = &self.proj[self.axis_slot[l][j]];
        let f = &proj[b as usize] - &proj[a as usize];
        let valid = match sign_after(&f, queue.now()) {
            Ordering::Equal => self.family.tie_order(pa.point_id, pb.point_id, axis),
            s => s,
        } == Ordering::Greater;
        let tie = TieKey {
            kind: if j < self.family.dim() {
                EventKind::OrderU
            } else {
                EventKind::OrderX
            },
            cone: l as u32,
            axis: j as u32,
            min_id: pa.point_id.min(pb.point_id),
            max_id: pa.point_id.max(pb.point_id),
        };
        let tag = CertTag::Order {
            cone: l as u32,
            list: j as u32,
            pos: pos as u32,
        };
        let h = queue.schedule(tag, tie, f, valid)?;
        self.certs[l][j][pos] = Some(h);
        for p in [a, b] {
            let c = &mut self.cert_count[p as usize];
            *c += 1;
            self.max_cert_count = self.max_cert_count.max(*c);
        }
        Ok(())
    }

    fn drop_cert(&mut self, l: usize, j: usize, pos: usize, queue: Option<&mut EventQueue>) {
        if let Some(h) = self.certs[l][j][pos].take() {
            if let Some(q) = queue {
                q.deschedule(h);
            }
            let order = self.trees[l].order(j);
            for p in [order[pos], order[pos + 1]] {
                self.cert_count[p as usize] -= 1;
            }
        }
    }

    /// Handles the failure of the order certificate at `(l, j, pos)`; the
    /// queue has already consumed it.
    pub fn handle(
        &mut self,
        l: usize,
        j: usize,
        pos: usize,
        queue: &mut EventQueue,
    ) -> Result<OrderEvent, MotionError> {
        self.drop_cert(l, j, pos, None);
        let n = self.points.len();
        if pos > 0 {
            self.drop_cert(l, j, pos - 1, Some(queue));
        }
        if pos + 2 < n {
            self.drop_cert(l, j, pos + 1, Some(queue));
        }
        let order = self.trees[l].order(j);
        let (a, b) = (order[pos], order[pos + 1]);
        let d = self.family.dim();
        let (kind, report) = if j < d {
            (EventKind::OrderU, self.trees[l].swap_u(j, pos))
        } else {
            (EventKind::OrderX, self.trees[l].swap_x(pos))
        };
        if pos > 0 {
            self.add_cert(l, j, pos - 1, queue)?;
        }
        self.add_cert(l, j, pos, queue)?;
        if pos + 2 < n {
            self.add_cert(l, j, pos + 1, queue)?;
        }
        Ok(OrderEvent {
            kind,
            cone: l,
            list: j,
            a,
            b,
            report,
        })
    }

    /// Compares every list with a fresh sort at `t` and every tree with a
    /// rebuild.
    pub fn audit(&self, t: &TimeInstant) -> Result<(), String> {
        for (l, tree) in self.trees.iter().enumerate() {
            for j in 0..=self.family.dim() {
                let want = sort_along(&self.family, &self.points, self.family.axis_vector(l, j), t);
                if want != tree.order(j) {
                    return Err(format!("cone {} list {} is out of order", l, j));
                }
            }
            tree.audit().map_err(|e| format!("cone {}: {}", l, e))?;
        }
        Ok(())
    }
}
