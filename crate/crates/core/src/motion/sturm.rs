//! Sturm chains and exact real-root isolation over the rationals.

use std::cmp::Ordering;

use num_traits::Signed;

use super::polynomial::{int, rat, Polynomial, Rational};

/// Sturm chain `p, p', -rem(p, p'), ...`; each member is rescaled by a positive
/// constant, which leaves sign variations unchanged.
#[derive(Clone, Debug)]
pub struct SturmChain {
    seq: Vec<Polynomial>,
}

impl SturmChain {
    pub fn new(p: &Polynomial) -> Self {
        let mut seq = Vec::new();
        if p.is_zero() {
            return SturmChain { seq };
        }
        seq.push(normalize(p));
        let d = p.derivative();
        if d.is_zero() {
            return SturmChain { seq };
        }
        seq.push(normalize(&d));
        loop {
            let n = seq.len();
            let r = seq[n - 2].rem(&seq[n - 1]);
            if r.is_zero() {
                break;
            }
            seq.push(normalize(&-&r));
        }
        SturmChain { seq }
    }

    pub fn poly(&self) -> Option<&Polynomial> {
        self.seq.first()
    }

    pub fn variations(&self, x: &Rational) -> usize {
        let mut count = 0;
        let mut last = Ordering::Equal;
        for p in &self.seq {
            let s = p.sign_at(x);
            if s == Ordering::Equal {
                continue;
            }
            if last != Ordering::Equal && s != last {
                count += 1;
            }
            last = s;
        }
        count
    }

    /// Number of distinct real roots in the half-open interval `(a, b]`.
    pub fn count(&self, a: &Rational, b: &Rational) -> usize {
        if self.seq.is_empty() || a >= b {
            return 0;
        }
        self.variations(a).saturating_sub(self.variations(b))
    }
}

fn normalize(p: &Polynomial) -> Polynomial {
    match p.leading() {
        Some(lc) => p.scale(&(Rational::ONE / lc.abs())),
        None => p.clone(),
    }
}

/// Picks a point strictly inside `(lo, hi)` at which `p` is nonzero.
pub fn nonroot_split(p: &Polynomial, lo: &Rational, hi: &Rational) -> Rational {
    let width = hi - lo;
    for k in [4i64, 3, 5, 2, 6, 1, 7] {
        let m = lo + &width * rat(k, 8);
        if !p.sign_at(&m).is_eq() {
            return m;
        }
    }
    // At most deg(p) roots; a finer grid must contain a non-root.
    let mut denom = 16i64;
    loop {
        for k in 1..denom {
            let m = lo + &width * rat(k, denom);
            if !p.sign_at(&m).is_eq() {
                return m;
            }
        }
        denom *= 2;
    }
}

/// Isolating intervals `(lo, hi)` for every distinct root of `p` in `(a, b)`,
/// sorted ascending. Endpoints are non-roots of `p`; `a` and `b` must be too.
pub fn isolate(p: &Polynomial, a: &Rational, b: &Rational) -> Vec<(Rational, Rational)> {
    let chain = SturmChain::new(p);
    let mut out = Vec::new();
    let mut stack = vec![(a.clone(), b.clone())];
    while let Some((lo, hi)) = stack.pop() {
        let n = chain.count(&lo, &hi);
        if n == 0 {
            continue;
        }
        if n == 1 {
            out.push((lo, hi));
            continue;
        }
        let m = nonroot_split(p, &lo, &hi);
        // Left half is processed first so output stays sorted.
        stack.push((m.clone(), hi));
        stack.push((lo, m));
    }
    out
}

/// Finds `a'` in `(a, b]` such that the chain's polynomial has no root in `(a, a']`.
pub fn clear_right_of(chain: &SturmChain, a: &Rational, b: &Rational) -> Rational {
    let mut hi = b.clone();
    let two = int(2);
    loop {
        if chain.count(a, &hi) == 0 {
            return hi;
        }
        hi = (a + &hi) / &two;
        if (&hi - a).is_zero() {
            return hi;
        }
    }
}
