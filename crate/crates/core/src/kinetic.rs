//! Certificates and the global event queue.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use rustc_hash::FxHashMap;

use crate::motion::{MotionError, Polynomial, RootCache, TimeInstant};

/// Which structure a tournament certificate belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Owner {
    /// Per-point tournament over Semi-Yao incident edges.
    Nearest,
    /// Per-point tournament over the cone candidates of the (1+eps) structure.
    Approximate,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CertTag {
    /// Adjacent pair at positions `pos`, `pos + 1` of a sorted list.
    Order { cone: u32, list: u32, pos: u32 },
    /// Internal node of the tournament tree of `point`.
    Tournament { owner: Owner, point: u32, node: u32 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EventKind {
    OrderU,
    OrderX,
    Tournament,
}

impl EventKind {
    pub fn name(self) -> &'static str {
        match self {
            EventKind::OrderU => "u-swap",
            EventKind::OrderX => "x-swap",
            EventKind::Tournament => "tournament",
        }
    }
}

/// Secondary key among certificates failing at the same instant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TieKey {
    pub kind: EventKind,
    pub cone: u32,
    pub axis: u32,
    pub min_id: u64,
    pub max_id: u64,
}

pub type Handle = u64;

#[derive(Clone, Debug)]
struct QueueKey {
    lo: f64,
    hi: f64,
    time: TimeInstant,
    tie: TieKey,
    handle: Handle,
}

impl QueueKey {
    fn new(time: TimeInstant, tie: TieKey, handle: Handle) -> Self {
        let (lo, hi) = {
            let v = time.to_f64();
            let w = match time.kind() {
                crate::motion::TimeKind::Exact => 0.0,
                crate::motion::TimeKind::Approximate(w) => w,
            };
            ((v - w).next_down().next_down(), (v + w).next_up().next_up())
        };
        QueueKey {
            lo,
            hi,
            time,
            tie,
            handle,
        }
    }
}

impl Ord for QueueKey {
    fn cmp(&self, other: &Self) -> Ordering {
        let t = if self.hi < other.lo {
            Ordering::Less
        } else if other.hi < self.lo {
            Ordering::Greater
        } else {
            self.time.cmp(&other.time)
        };
        t.then(self.tie.cmp(&other.tie)).then(self.handle.cmp(&other.handle))
    }
}

impl PartialOrd for QueueKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for QueueKey {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for QueueKey {}

#[derive(Clone, Debug)]
pub struct Certificate {
    pub tag: CertTag,
    pub tie: TieKey,
    pub failure_poly: Polynomial,
    pub failure_time: Option<TimeInstant>,
}

/// Priority queue of certificate failure times.
#[derive(Debug)]
pub struct EventQueue {
    now: TimeInstant,
    queue: BTreeSet<QueueKey>,
    certs: FxHashMap<Handle, Certificate>,
    next_handle: Handle,
    roots: RootCache,
}

impl EventQueue {
    pub fn new(start: TimeInstant) -> Self {
        EventQueue {
            now: start,
            queue: BTreeSet::new(),
            certs: FxHashMap::default(),
            next_handle: 0,
            roots: RootCache::new(),
        }
    }

    pub fn now(&self) -> &TimeInstant {
        &self.now
    }

    pub fn len(&self) -> usize {
        self.certs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.certs.is_empty()
    }

    pub fn scheduled(&self) -> usize {
        self.queue.len()
    }

    /// Queues a certificate whose failure function is `poly`. When `valid` is
    /// false the certified relation already fails just after `now`, so the
    /// certificate fires immediately.
    pub fn schedule(
        &mut self,
        tag: CertTag,
        tie: TieKey,
        poly: Polynomial,
        valid: bool,
    ) -> Result<Handle, MotionError> {
        let time = if valid {
            self.roots.next_sign_change(&poly, &self.now)?
        } else {
            Some(self.now.clone())
        };
        let handle = self.next_handle;
        self.next_handle += 1;
        if let Some(t) = &time {
            self.queue.insert(QueueKey::new(t.clone(), tie, handle));
        }
        self.certs.insert(
            handle,
            Certificate {
                tag,
                tie,
                failure_poly: poly,
                failure_time: time,
            },
        );
        Ok(handle)
    }

    pub fn deschedule(&mut self, handle: Handle) {
        let cert = self.certs.remove(&handle).expect("live certificate handle");
        if let Some(t) = cert.failure_time {
            let removed = self.queue.remove(&QueueKey::new(t, cert.tie, handle));
            debug_assert!(removed);
        }
    }

    pub fn get(&self, handle: Handle) -> Option<&Certificate> {
        self.certs.get(&handle)
    }

    pub fn peek_time(&self) -> Option<&TimeInstant> {
        self.queue.first().map(|k| &k.time)
    }

    /// Pops the earliest certificate if it fails no later than `limit`.
    /// The certificate is consumed; its handle becomes invalid.
    pub fn pop_until(&mut self, limit: &TimeInstant) -> Option<(TimeInstant, Handle, Certificate)> {
        let first = self.queue.first()?;
        if first.time > *limit {
            return None;
        }
        let key = self.queue.pop_first().unwrap();
        let cert = self.certs.remove(&key.handle).expect("queued certificate");
        debug_assert!(key.time >= self.now);
        self.now = key.time.clone();
        Some((key.time, key.handle, cert))
    }

    /// Moves the clock forward without processing anything.
    pub fn advance_clock(&mut self, t: TimeInstant) {
        debug_assert!(t >= self.now);
        if let Some(first) = self.queue.first() {
            debug_assert!(first.time >= t);
        }
        self.now = t;
    }

    /// Live certificates in handle order.
    pub fn certificates(&self) -> Vec<(Handle, &Certificate)> {
        let mut v: Vec<_> = self.certs.iter().map(|(h, c)| (*h, c)).collect();
        v.sort_by_key(|(h, _)| *h);
        v
    }
}

/// Counters accumulated over a run.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EventStats {
    pub u_swaps: u64,
    pub x_swaps: u64,
    pub nn_tournament_events: u64,
    pub eps_tournament_events: u64,
    pub edge_changes: u64,
    pub nn_changes: u64,
    pub eps_changes: u64,
    pub max_order_certs_per_point: u64,
    pub node_visits: u64,
    pub max_event_visits: u64,
}

impl EventStats {
    pub fn swap_events(&self) -> u64 {
        self.u_swaps + self.x_swaps
    }

    pub fn tournament_events(&self) -> u64 {
        self.nn_tournament_events + self.eps_tournament_events
    }

    pub fn total_events(&self) -> u64 {
        self.swap_events() + self.tournament_events()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tie(kind: EventKind, a: u64) -> TieKey {
        TieKey {
            kind,
            cone: 0,
            axis: 0,
            min_id: a,
            max_id: a + 1,
        }
    }

    fn tag(pos: u32) -> CertTag {
        CertTag::Order { cone: 0, list: 0, pos }
    }

    #[test]
    fn linear_certificate_pops_at_root() {
        let mut q = EventQueue::new(TimeInstant::zero());
        q.schedule(tag(0), tie(EventKind::OrderU, 0), Polynomial::from_i64(&[-1, 1]), true)
            .unwrap();
        let (t, _, c) = q.pop_until(&TimeInstant::from_i64(10)).unwrap();
        assert_eq!(t, TimeInstant::from_i64(1));
        assert_eq!(c.tag, tag(0));
        assert_eq!(*q.now(), TimeInstant::from_i64(1));
        assert!(q.pop_until(&TimeInstant::from_i64(10)).is_none());
    }

    #[test]
    fn parked_certificates_never_pop() {
        let mut q = EventQueue::new(TimeInstant::zero());
        let l = Polynomial::from_i64(&[-1, 1]);
        let h = q.schedule(tag(0), tie(EventKind::OrderU, 0), &l * &l, true).unwrap();
        assert_eq!(q.scheduled(), 0);
        assert!(q.pop_until(&TimeInstant::from_i64(100)).is_none());
        q.deschedule(h);
        assert!(q.is_empty());
    }

    #[test]
    fn simultaneous_failures_follow_tie_order() {
        let mut q = EventQueue::new(TimeInstant::zero());
        let f = Polynomial::from_i64(&[-2, 1]);
        q.schedule(tag(2), tie(EventKind::Tournament, 0), f.clone(), true)
            .unwrap();
        q.schedule(tag(1), tie(EventKind::OrderX, 5), f.clone(), true).unwrap();
        q.schedule(tag(0), tie(EventKind::OrderU, 9), f, true).unwrap();
        let limit = TimeInstant::from_i64(3);
        let order: Vec<CertTag> = std::iter::from_fn(|| q.pop_until(&limit).map(|e| e.2.tag)).collect();
        assert_eq!(order, vec![tag(0), tag(1), tag(2)]);
    }

    #[test]
    fn descheduled_certificates_do_not_fire() {
        let mut q = EventQueue::new(TimeInstant::zero());
        let h = q
            .schedule(tag(0), tie(EventKind::OrderU, 0), Polynomial::from_i64(&[-1, 1]), true)
            .unwrap();
        q.deschedule(h);
        assert!(q.pop_until(&TimeInstant::from_i64(5)).is_none());
    }

    #[test]
    fn invalid_certificate_fires_now() {
        let mut q = EventQueue::new(TimeInstant::from_i64(2));
        q.schedule(tag(0), tie(EventKind::OrderU, 0), Polynomial::from_i64(&[1]), false)
            .unwrap();
        let (t, _, _) = q.pop_until(&TimeInstant::from_i64(2)).unwrap();
        assert_eq!(t, TimeInstant::from_i64(2));
    }
}
