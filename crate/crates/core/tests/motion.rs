use std::cmp::Ordering;

use kinsy::motion::{
    int, next_sign_change, rat, sign_after, sign_at, Polynomial, Rational, RootCache, TimeInstant, TimeKind,
    ROOT_TOLERANCE,
};
use proptest::prelude::*;

fn poly(c: &[i64]) -> Polynomial {
    Polynomial::from_i64(c)
}

/// Lower and upper rational bounds of an instant.
fn around(t: &TimeInstant) -> (Rational, Rational) {
    t.bounds()
}

#[test]
fn quadratic_example() {
    // t^2 - 3t + 2 after t = 1.5
    let r = next_sign_change(&poly(&[2, -3, 1]), &TimeInstant::Exact(rat(3, 2))).unwrap();
    assert_eq!(r, Some(TimeInstant::from_i64(2)));
}

#[test]
fn dense_grid_agrees_on_a_quartic() {
    // (3t - 1)(2t - 1)(4t - 3)(t + 2)
    let f = &(&(&poly(&[-1, 3]) * &poly(&[-1, 2])) * &poly(&[-3, 4])) * &poly(&[2, 1]);
    let mut t = TimeInstant::zero();
    let mut found = Vec::new();
    while let Some(r) = next_sign_change(&f, &t).unwrap() {
        found.push(r.to_f64());
        t = r;
    }
    assert_eq!(found.len(), 3);
    // Sign changes seen on a fine grid of [0, 2].
    let mut grid = Vec::new();
    let steps = 20000;
    let mut prev = f.sign_at(&int(0));
    for k in 1..=steps {
        let x = rat(2 * k, steps);
        let s = f.sign_at(&x);
        if s != Ordering::Equal && prev != Ordering::Equal && s != prev {
            grid.push(k as f64 * 2.0 / steps as f64);
        }
        if s != Ordering::Equal {
            prev = s;
        }
    }
    assert_eq!(grid.len(), found.len());
    for (a, b) in grid.iter().zip(&found) {
        assert!((a - b).abs() <= 4.0 / steps as f64, "grid {} root {}", a, b);
    }
}

fn coeffs() -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-20i64..=20, 1..=5)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn no_sign_change_before_the_reported_root(c in coeffs(), num in -8i64..=8) {
        let f = poly(&c);
        prop_assume!(!f.is_zero());
        let t0 = TimeInstant::Exact(rat(num, 4));
        let next = next_sign_change(&f, &t0).unwrap();
        let (_, start) = around(&t0);
        let end = match &next {
            Some(r) => around(r).0,
            None => int(64),
        };
        // Sample (t0, next) on a grid; the sign is constant where nonzero.
        let mut seen = None;
        for k in 1..200 {
            let x = &start + (&end - &start) * rat(k, 200);
            match (f.sign_at(&x), seen) {
                (Ordering::Equal, _) => {}
                (s, None) => seen = Some(s),
                (s, Some(p)) => prop_assert_eq!(s, p),
            }
        }
        if let Some(r) = next {
            prop_assert!(r > t0);
            if let TimeKind::Approximate(w) = r.kind() {
                prop_assert!(w <= ROOT_TOLERANCE);
            }
            prop_assert_eq!(sign_at(&f, &r), Ordering::Equal);
            // The sign differs just before and just after the root.
            let (lo, hi) = around(&r);
            let h = rat(1, 1 << 40);
            let before = f.sign_at(&(&lo - &h));
            let after = f.sign_at(&(&hi + &h));
            prop_assert_eq!(before.reverse(), after);
        }
    }

    #[test]
    fn sign_after_matches_a_nearby_sample(c in coeffs(), num in -40i64..=40) {
        let f = poly(&c);
        let t = rat(num, 8);
        let probe = &t + rat(1, 1 << 40);
        let s = f.sign_at(&probe);
        prop_assume!(s != Ordering::Equal || f.is_zero());
        prop_assert_eq!(sign_after(&f, &TimeInstant::Exact(t)), s);
    }

    #[test]
    fn cache_agrees_with_direct_isolation(c in coeffs(), steps in prop::collection::vec(1i64..=6, 1..8)) {
        let f = poly(&c);
        prop_assume!(!f.is_zero());
        let mut cache = RootCache::new();
        let mut t = TimeInstant::Exact(int(-3));
        for s in steps {
            let direct = next_sign_change(&f, &t).unwrap();
            prop_assert_eq!(cache.next_sign_change(&f, &t).unwrap(), direct.clone());
            prop_assert_eq!(cache.next_sign_change(&-f.clone(), &t).unwrap(), direct.clone());
            t = match direct {
                Some(r) if s % 2 == 0 => r,
                _ => TimeInstant::Exact(t.bounds().1 + rat(s, 4)),
            };
        }
    }
}
