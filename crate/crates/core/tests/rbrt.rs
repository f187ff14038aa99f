use std::collections::BTreeMap;

use kinsy::rbrt::{NodeKey, Rbrt, RbrtOptions};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_lists(rng: &mut ChaCha8Rng, d: usize, n: usize) -> Vec<Vec<u32>> {
    (0..=d)
        .map(|_| {
            let mut v: Vec<u32> = (0..n as u32).collect();
            v.shuffle(rng);
            v
        })
        .collect()
}

fn ranks(t: &Rbrt, d: usize, n: usize) -> Vec<Vec<u32>> {
    (0..=d).map(|j| (0..n as u32).map(|p| t.rank(j, p)).collect()).collect()
}

fn dominated(rank: &[Vec<u32>], d: usize, p: usize, q: usize) -> bool {
    (0..d).all(|j| rank[j][q] > rank[j][p])
}

/// Dominating point with the smallest axis rank.
fn target_oracle(rank: &[Vec<u32>], d: usize, p: usize) -> Option<u32> {
    let n = rank[0].len();
    (0..n)
        .filter(|&q| q != p && dominated(rank, d, p, q))
        .min_by_key(|&q| rank[d][q])
        .map(|q| q as u32)
}

/// `q` in `R(v)`: the leaf of each rank lies below the node of that level.
fn in_r(t: &Rbrt, rank: &[Vec<u32>], d: usize, v: &NodeKey, q: usize) -> bool {
    (0..d).all(|j| {
        let mut x = t.leaf_slots() + rank[j][q];
        while x > v[j] {
            x >>= 1;
        }
        x == v[j]
    })
}

fn check(t: &Rbrt, d: usize, n: usize, targets: bool) {
    t.audit().unwrap();
    let rank = ranks(t, d, n);
    for p in 0..n {
        if targets {
            assert_eq!(t.target(p as u32), target_oracle(&rank, d, p), "target of {}", p);
        }
        // Each dominating point lies in exactly one canonical node; others in none.
        let nodes = t.canonical_all(p as u32);
        for q in 0..n {
            let hits = nodes.iter().filter(|v| in_r(t, &rank, d, v, q)).count();
            let want = usize::from(q != p && dominated(&rank, d, p, q));
            assert_eq!(hits, want, "p={} q={}", p, q);
        }
    }
}

fn run_swaps(d: usize, n: usize, opts: RbrtOptions, swaps: usize, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = Rbrt::new(d, random_lists(&mut rng, d, n), opts);
    check(&t, d, n, opts.targets);
    for k in 0..swaps {
        let before_targets = t.targets().to_vec();
        let before_pairs: BTreeMap<NodeKey, (u32, u32)> = t.pairs().into_iter().map(|(v, b, r)| (v, (b, r))).collect();
        let i = rng.gen_range(0..=d);
        let pos = rng.gen_range(0..n - 1);
        let report = if i < d { t.swap_u(i, pos) } else { t.swap_x(pos) };
        if opts.targets {
            let mut replay = before_targets;
            for c in &report.targets {
                assert_eq!(replay[c.w as usize], c.old);
                replay[c.w as usize] = c.new;
            }
            assert_eq!(replay, t.targets());
        }
        if opts.pairs {
            let mut replay = before_pairs;
            for c in &report.pairs {
                assert_eq!(replay.get(&c.node).copied(), c.old);
                match c.new {
                    Some(x) => replay.insert(c.node, x),
                    None => replay.remove(&c.node),
                };
            }
            let now: BTreeMap<NodeKey, (u32, u32)> = t.pairs().into_iter().map(|(v, b, r)| (v, (b, r))).collect();
            assert_eq!(replay, now);
        }
        if k % 25 == 0 {
            check(&t, d, n, opts.targets);
        }
    }
    check(&t, d, n, opts.targets);
}

#[test]
fn planar_targets_under_swaps() {
    run_swaps(2, 40, RbrtOptions::SEMI_YAO, 800, 1);
}

#[test]
fn spatial_targets_under_swaps() {
    run_swaps(3, 24, RbrtOptions::SEMI_YAO, 400, 2);
}

#[test]
fn pairs_under_swaps() {
    run_swaps(2, 40, RbrtOptions::PAIRS, 800, 3);
    run_swaps(3, 20, RbrtOptions::PAIRS, 300, 4);
}

#[test]
fn pairs_separate_every_dominating_pair_once() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for d in [2, 3] {
        let n = 64;
        let t = Rbrt::new(d, random_lists(&mut rng, d, n), RbrtOptions::PAIRS);
        let rank = ranks(&t, d, n);
        // Every pair is (max-axis point of B(v), min-axis point of R(v)).
        for (v, b, r) in t.pairs() {
            let b_node = t.b_node(&v).unwrap();
            let rs: Vec<usize> = (0..n).filter(|&q| in_r(&t, &rank, d, &v, q)).collect();
            let bs: Vec<usize> = (0..n).filter(|&q| in_r(&t, &rank, d, &b_node, q)).collect();
            assert_eq!(Some(r as usize), rs.iter().copied().min_by_key(|&q| rank[d][q]));
            assert_eq!(Some(b as usize), bs.iter().copied().max_by_key(|&q| rank[d][q]));
            for &p in &bs {
                assert!(t.canonical_all(p as u32).contains(&v));
            }
        }
    }
}

#[test]
fn small_and_empty() {
    let t = Rbrt::new(2, vec![vec![], vec![], vec![]], RbrtOptions::SEMI_YAO);
    assert!(t.is_empty());
    t.audit().unwrap();
    let t = Rbrt::new(2, vec![vec![0], vec![0], vec![0]], RbrtOptions::SEMI_YAO);
    assert_eq!(t.target(0), None);
    t.audit().unwrap();
}
