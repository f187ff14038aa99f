//! Helpers shared by the integration test targets.

#![allow(dead_code)]

use std::cmp::Ordering;
use std::sync::Arc;

use kinsy::dktt::Dktt;
use kinsy::kinetic::{CertTag, EventQueue, Owner};
use kinsy::motion::{int, rat, sign_after, Polynomial, TimeInstant};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Default)]
pub struct FuzzOutcome {
    pub ops: usize,
    pub events: usize,
    pub event_checks: usize,
    pub sample_checks: usize,
    pub mismatches: Vec<String>,
}

/// Linear-scan minimum just after `t`; equal values go to the smaller element.
pub fn argmin(elems: &[(u32, Arc<Polynomial>)], t: &TimeInstant) -> Option<u32> {
    let mut best: Option<&(u32, Arc<Polynomial>)> = None;
    for e in elems {
        best = match best {
            None => Some(e),
            Some(b) => match sign_after(&(e.1.as_ref() - b.1.as_ref()), t) {
                Ordering::Less => Some(e),
                Ordering::Equal if e.0 < b.0 => Some(e),
                _ => Some(b),
            },
        };
    }
    best.map(|e| e.0)
}

fn random_value(rng: &mut ChaCha8Rng, live: &[(u32, Arc<Polynomial>)]) -> Arc<Polynomial> {
    if !live.is_empty() && rng.gen_bool(0.1) {
        return live[rng.gen_range(0..live.len())].1.clone();
    }
    let degree = if rng.gen_bool(0.1) { 3 } else { rng.gen_range(0..=2) };
    let c: Vec<_> = (0..=degree).map(|_| rat(rng.gen_range(-64..=64), 8)).collect();
    Arc::new(Polynomial::new(c))
}

/// Random insert/delete/advance operations on one tournament over `[0, 8]`,
/// compared with [`argmin`] after every settled event and at `samples`
/// random times.
pub fn dktt_fuzz(seed: u64, ops: usize, samples: usize) -> FuzzOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let horizon = 8i64;
    let mut sample_times: Vec<TimeInstant> = (0..samples)
        .map(|_| TimeInstant::Exact(rat(rng.gen_range(1..horizon << 20), 1 << 20)))
        .collect();
    sample_times.sort();
    sample_times.reverse();
    let advances = ops / 3 + 1;
    let mut q = EventQueue::new(TimeInstant::zero());
    let mut t = Dktt::new(Owner::Nearest, 0, 0);
    let mut live: Vec<(u32, Arc<Polynomial>)> = Vec::new();
    let mut next_id = 0u32;
    let mut out = FuzzOutcome::default();
    let mut step = 0usize;

    let check = |t: &Dktt, live: &[(u32, Arc<Polynomial>)], now: &TimeInstant, what: &str, out: &mut FuzzOutcome| {
        let want = argmin(live, now);
        if t.winner() != want && out.mismatches.len() < 10 {
            out.mismatches
                .push(format!("{} at {}: tree {:?}, oracle {:?}", what, now, t.winner(), want));
        }
    };

    while out.ops < ops {
        out.ops += 1;
        let r: f64 = rng.gen();
        if r < 0.4 || live.len() < 2 {
            let v = random_value(&mut rng, &live);
            t.insert(next_id, v.clone(), &mut q).unwrap();
            live.push((next_id, v));
            next_id += 1;
        } else if r < 0.67 {
            let k = rng.gen_range(0..live.len());
            let (id, _) = live.swap_remove(k);
            t.remove(id, &mut q).unwrap();
        } else {
            step += 1;
            let target = TimeInstant::Exact(rat(
                (horizon << 20) * step.min(advances) as i64 / advances as i64,
                1 << 20,
            ));
            loop {
                let stop = match sample_times.last() {
                    Some(s) if *s <= target => s.clone(),
                    _ => target.clone(),
                };
                while let Some((_, _, cert)) = q.pop_until(&stop) {
                    if let CertTag::Tournament { node, .. } = cert.tag {
                        t.handle_event(node, &mut q).unwrap();
                        out.events += 1;
                    }
                    if q.peek_time() != Some(q.now()) {
                        out.event_checks += 1;
                        let now = q.now().clone();
                        check(&t, &live, &now, "event", &mut out);
                    }
                }
                if stop > *q.now() {
                    q.advance_clock(stop.clone());
                }
                if sample_times.last() == Some(&stop) {
                    sample_times.pop();
                    out.sample_checks += 1;
                    check(&t, &live, &stop, "sample", &mut out);
                }
                if stop == target {
                    break;
                }
            }
        }
        if out.ops % 500 == 0 {
            if let Err(e) = t.audit(q.now()) {
                out.mismatches.push(format!("audit after {} ops: {}", out.ops, e));
            }
        }
    }
    // Remaining samples beyond the last advance.
    let end = TimeInstant::Exact(int(horizon));
    while let Some(s) = sample_times.pop() {
        while let Some((_, _, cert)) = q.pop_until(&s) {
            if let CertTag::Tournament { node, .. } = cert.tag {
                t.handle_event(node, &mut q).unwrap();
                out.events += 1;
            }
        }
        if s > *q.now() {
            q.advance_clock(s.clone());
        }
        out.sample_checks += 1;
        check(&t, &live, &s, "sample", &mut out);
    }
    debug_assert!(*q.now() <= end);
    out
}
