//! Exact time instants and sign queries on time polynomials.
//!
//! An instant is either a rational or a simple real root of a squarefree
//! polynomial, given by an isolating interval. All comparisons are exact; the
//! `f64` fields only feed fast filters and output.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use dashu_base::{SquareRoot, UnsignedAbs};
use num_traits::{Signed, Zero};
use rustc_hash::FxHashMap;

use super::polynomial::{int, rational_from_f64, to_f64, Polynomial, Rational};
use super::sturm::{clear_right_of, nonroot_split, SturmChain};
use super::MotionError;

/// Width to which irrational event times are refined before they are handed out.
pub const ROOT_TOLERANCE: f64 = 1e-12;

/// Whether an instant is known exactly or only by an isolating interval.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TimeKind {
    Exact,
    Approximate(f64),
}

#[derive(Clone)]
pub struct RootTime {
    poly: Arc<Polynomial>,
    lo: Rational,
    hi: Rational,
    lo_sign: Ordering,
    lo_f: f64,
    hi_f: f64,
}

impl RootTime {
    /// `poly` must be squarefree with exactly one root in `(lo, hi)` and a
    /// sign change across it.
    fn new(poly: Arc<Polynomial>, lo: Rational, hi: Rational) -> RootTime {
        let lo_sign = poly.sign_at(&lo);
        debug_assert!(lo_sign != Ordering::Equal);
        debug_assert!(poly.sign_at(&hi) == lo_sign.reverse());
        let lo_f = to_f64(&lo).next_down();
        let hi_f = to_f64(&hi).next_up();
        RootTime {
            poly,
            lo,
            hi,
            lo_sign,
            lo_f,
            hi_f,
        }
    }

    pub fn poly(&self) -> &Polynomial {
        &self.poly
    }

    pub fn bracket(&self) -> (&Rational, &Rational) {
        (&self.lo, &self.hi)
    }

    /// One bisection step; may land exactly on the root.
    fn bisect(&self) -> TimeInstant {
        let m = (&self.lo + &self.hi) / int(2);
        let s = self.poly.sign_at(&m);
        if s == Ordering::Equal {
            TimeInstant::Exact(m)
        } else if s == self.lo_sign {
            TimeInstant::Root(RootTime::new(self.poly.clone(), m, self.hi.clone()))
        } else {
            TimeInstant::Root(RootTime::new(self.poly.clone(), self.lo.clone(), m))
        }
    }

    fn cmp_rational(&self, x: &Rational) -> Ordering {
        if x <= &self.lo {
            return Ordering::Greater;
        }
        if x >= &self.hi {
            return Ordering::Less;
        }
        let s = self.poly.sign_at(x);
        if s == Ordering::Equal {
            Ordering::Equal
        } else if s == self.lo_sign {
            // Still on the lower side of the root.
            Ordering::Greater
        } else {
            Ordering::Less
        }
    }
}

#[derive(Clone)]
pub enum TimeInstant {
    Exact(Rational),
    Root(RootTime),
}

impl TimeInstant {
    pub fn zero() -> Self {
        TimeInstant::Exact(Rational::zero())
    }

    pub fn from_i64(v: i64) -> Self {
        TimeInstant::Exact(int(v))
    }

    /// The exact rational value of a finite float.
    pub fn from_f64(v: f64) -> Self {
        TimeInstant::Exact(rational_from_f64(v))
    }

    pub fn kind(&self) -> TimeKind {
        match self {
            TimeInstant::Exact(_) => TimeKind::Exact,
            TimeInstant::Root(r) => TimeKind::Approximate(to_f64(&(&r.hi - &r.lo))),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            TimeInstant::Exact(r) => to_f64(r),
            TimeInstant::Root(r) => to_f64(&((&r.lo + &r.hi) / int(2))),
        }
    }

    pub fn as_exact(&self) -> Option<&Rational> {
        match self {
            TimeInstant::Exact(r) => Some(r),
            TimeInstant::Root(_) => None,
        }
    }

    /// Rational bounds `lo <= self <= hi`.
    pub fn bounds(&self) -> (Rational, Rational) {
        match self {
            TimeInstant::Exact(r) => (r.clone(), r.clone()),
            TimeInstant::Root(r) => (r.lo.clone(), r.hi.clone()),
        }
    }
}

fn cmp_roots(a: &RootTime, b: &RootTime) -> Ordering {
    if a.hi_f < b.lo_f {
        return Ordering::Less;
    }
    if b.hi_f < a.lo_f {
        return Ordering::Greater;
    }
    if Arc::ptr_eq(&a.poly, &b.poly) && a.lo == b.lo && a.hi == b.hi {
        return Ordering::Equal;
    }
    if a.poly == b.poly {
        // Each bracket holds exactly one root of the same polynomial, so the
        // roots coincide iff the overlap still shows a sign change.
        let lo = if a.lo > b.lo { &a.lo } else { &b.lo };
        let hi = if a.hi < b.hi { &a.hi } else { &b.hi };
        if lo < hi && a.poly.sign_at(lo) != a.poly.sign_at(hi) {
            return Ordering::Equal;
        }
    }
    let g = a.poly.gcd(&b.poly);
    let chain = if g.degree() >= 1 {
        Some(SturmChain::new(&g))
    } else {
        None
    };
    let mut a = a.clone();
    let mut b = b.clone();
    loop {
        if a.hi <= b.lo {
            return Ordering::Less;
        }
        if b.hi <= a.lo {
            return Ordering::Greater;
        }
        if let Some(chain) = &chain {
            let lo = if a.lo > b.lo { &a.lo } else { &b.lo };
            let hi = if a.hi < b.hi { &a.hi } else { &b.hi };
            if chain.count(lo, hi) >= 1 {
                return Ordering::Equal;
            }
        }
        match a.bisect() {
            TimeInstant::Exact(x) => return b.cmp_rational(&x).reverse(),
            TimeInstant::Root(r) => a = r,
        }
        match b.bisect() {
            TimeInstant::Exact(x) => return a.cmp_rational(&x),
            TimeInstant::Root(r) => b = r,
        }
    }
}

impl Ord for TimeInstant {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (TimeInstant::Exact(x), TimeInstant::Exact(y)) => x.cmp(y),
            (TimeInstant::Exact(x), TimeInstant::Root(r)) => r.cmp_rational(x).reverse(),
            (TimeInstant::Root(r), TimeInstant::Exact(x)) => r.cmp_rational(x),
            (TimeInstant::Root(a), TimeInstant::Root(b)) => cmp_roots(a, b),
        }
    }
}

impl PartialOrd for TimeInstant {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for TimeInstant {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for TimeInstant {}

impl fmt::Debug for TimeInstant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TimeInstant::Exact(r) => write!(f, "Exact({})", r),
            TimeInstant::Root(r) => write!(f, "Root({} in ({}, {}))", r.poly, r.lo, r.hi),
        }
    }
}

impl fmt::Display for TimeInstant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.12}", self.to_f64())
    }
}

fn interval_sign(p: &Polynomial, lo: f64, hi: f64) -> Option<Ordering> {
    p.interval_sign(lo, hi)
}

/// Exact sign of `f` at `t`.
pub fn sign_at(f: &Polynomial, t: &TimeInstant) -> Ordering {
    if f.is_zero() {
        return Ordering::Equal;
    }
    let r = match t {
        TimeInstant::Exact(x) => return f.sign_at(x),
        TimeInstant::Root(r) => r,
    };
    if let Some(s) = interval_sign(f, r.lo_f, r.hi_f) {
        return s;
    }
    if f.degree() >= r.poly.degree() && f.rem(&r.poly).is_zero() {
        return Ordering::Equal;
    }
    let g = f.gcd(&r.poly);
    if g.degree() >= 1 && SturmChain::new(&g).count(&r.lo, &r.hi) >= 1 {
        return Ordering::Equal;
    }
    let chain = SturmChain::new(f);
    let mut cur = r.clone();
    loop {
        if chain.count(&cur.lo, &cur.hi) == 0 {
            return f.sign_at(&cur.hi);
        }
        match cur.bisect() {
            TimeInstant::Exact(x) => return f.sign_at(&x),
            TimeInstant::Root(next) => cur = next,
        }
        if let Some(s) = interval_sign(f, cur.lo_f, cur.hi_f) {
            return s;
        }
    }
}

/// Sign of `f` on an open interval immediately after `t`.
pub fn sign_after(f: &Polynomial, t: &TimeInstant) -> Ordering {
    let mut g = f.clone();
    loop {
        if g.is_zero() {
            return Ordering::Equal;
        }
        let s = sign_at(&g, t);
        if s != Ordering::Equal {
            return s;
        }
        g = g.derivative();
    }
}

const MAX_REFINE_STEPS: usize = 4096;

/// Refines an isolating interval of a simple root of squarefree `s` to width
/// at most `ROOT_TOLERANCE`.
fn refine_root(s: Arc<Polynomial>, lo: Rational, hi: Rational) -> Result<TimeInstant, MotionError> {
    let tol = rational_from_f64(ROOT_TOLERANCE);
    let lo_sign = s.sign_at(&lo);
    // Float bisection proposes a tight bracket that is then checked exactly.
    let cf = s.coeffs_f64();
    let eval = |x: f64| cf.iter().rev().fold(0.0, |acc, c| acc * x + c);
    let (mut a, mut b) = (to_f64(&lo), to_f64(&hi));
    let fa_pos = lo_sign == Ordering::Greater;
    for _ in 0..80 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        if (eval(m) > 0.0) == fa_pos {
            a = m;
        } else {
            b = m;
        }
    }
    let half = ROOT_TOLERANCE / 4.0;
    let mid = 0.5 * (a + b);
    let mut ca = rational_from_f64(mid - half);
    let mut cb = rational_from_f64(mid + half);
    if ca < lo {
        ca = lo.clone();
    }
    if cb > hi {
        cb = hi.clone();
    }
    if ca < cb {
        let sa = s.sign_at(&ca);
        let sb = s.sign_at(&cb);
        if sa == Ordering::Equal {
            return Ok(TimeInstant::Exact(ca));
        }
        if sb == Ordering::Equal {
            return Ok(TimeInstant::Exact(cb));
        }
        if sa == lo_sign && sb != lo_sign {
            return Ok(TimeInstant::Root(RootTime::new(s, ca, cb)));
        }
    }
    let mut cur = RootTime::new(s, lo, hi);
    for _ in 0..MAX_REFINE_STEPS {
        if &cur.hi - &cur.lo <= tol {
            return Ok(TimeInstant::Root(cur));
        }
        match cur.bisect() {
            TimeInstant::Exact(x) => return Ok(TimeInstant::Exact(x)),
            TimeInstant::Root(r) => cur = r,
        }
    }
    Err(MotionError::DegenerateRoot {
        lo: to_f64(&cur.lo),
        hi: to_f64(&cur.hi),
    })
}

/// Simple real roots of a quadratic in increasing order: exact when the
/// discriminant is a rational square, otherwise bracketed around the
/// floating-point roots. `None` when the brackets cannot be certified.
fn quadratic_roots(f: &Polynomial) -> Option<Vec<TimeInstant>> {
    let c = f.coeffs();
    let disc = &c[1] * &c[1] - int(4) * &c[2] * &c[0];
    if disc <= Rational::zero() {
        // No real root, or a double root that the sign never crosses.
        return Some(Vec::new());
    }
    let two_a = int(2) * &c[2];
    let n = disc.numerator().clone().unsigned_abs();
    let d = disc.denominator();
    let (sn, sd) = (n.sqrt(), d.sqrt());
    if sn.sqr() == n && &sd.sqr() == d {
        let root = Rational::from_parts(sn.into(), sd);
        let mut r = [(-&c[1] - &root) / &two_a, (-&c[1] + &root) / &two_a];
        r.sort();
        return Some(r.into_iter().map(TimeInstant::Exact).collect());
    }
    let (a, b, cc) = (to_f64(&c[2]), to_f64(&c[1]), to_f64(&c[0]));
    let sq = to_f64(&disc).sqrt();
    let q = -0.5 * (b + b.signum() * sq);
    let mut xs = [q / a, cc / q];
    if !xs.iter().all(|x| x.is_finite()) {
        return None;
    }
    xs.sort_by(f64::total_cmp);
    let p = Arc::new(f.monic());
    let mut out = Vec::with_capacity(2);
    let mut prev_hi: Option<Rational> = None;
    for x in xs {
        let delta = (ROOT_TOLERANCE / 4.0).max(x.abs() * 64.0 * f64::EPSILON);
        let lo = rational_from_f64(x - delta);
        let hi = rational_from_f64(x + delta);
        if prev_hi.as_ref().is_some_and(|h| &lo <= h) {
            return None;
        }
        let (sl, sh) = (p.sign_at(&lo), p.sign_at(&hi));
        if sl == Ordering::Equal || sh == Ordering::Equal || sl == sh {
            return None;
        }
        if &hi - &lo > rational_from_f64(ROOT_TOLERANCE) {
            return None;
        }
        prev_hi = Some(hi.clone());
        out.push(TimeInstant::Root(RootTime::new(p.clone(), lo, hi)));
    }
    Some(out)
}

/// First time strictly after `t0` at which `f` changes sign, i.e. its first
/// root of odd multiplicity there. Touching roots are skipped.
pub fn next_sign_change(f: &Polynomial, t0: &TimeInstant) -> Result<Option<TimeInstant>, MotionError> {
    Ok(sign_changes(f, t0, true)?.into_iter().next())
}

/// All sign changes of `f` strictly after `t0`, in increasing order.
pub fn sign_changes_after(f: &Polynomial, t0: &TimeInstant) -> Result<Vec<TimeInstant>, MotionError> {
    sign_changes(f, t0, false)
}

fn sign_changes(f: &Polynomial, t0: &TimeInstant, first: bool) -> Result<Vec<TimeInstant>, MotionError> {
    if f.degree() == 0 {
        return Ok(Vec::new());
    }
    if f.degree() == 1 {
        let c = f.coeffs();
        let root = TimeInstant::Exact(-(&c[0] / &c[1]));
        return Ok(if &root > t0 { vec![root] } else { Vec::new() });
    }
    if f.degree() == 2 {
        if let Some(roots) = quadratic_roots(f) {
            return Ok(roots.into_iter().filter(|r| r > t0).collect());
        }
    }
    let bound = f.root_bound();
    let chain = SturmChain::new(f);
    // Rational `a >= t0` with no root of f in (t0, a].
    let a = match t0 {
        TimeInstant::Exact(x) => {
            if x >= &bound {
                return Ok(Vec::new());
            }
            if f.sign_at(x) == Ordering::Equal {
                clear_right_of(&chain, x, &bound)
            } else {
                x.clone()
            }
        }
        TimeInstant::Root(r) => {
            let on_root = sign_at(f, t0) == Ordering::Equal;
            let want = usize::from(on_root);
            let mut cur = r.clone();
            loop {
                if chain.count(&cur.lo, &cur.hi) == want {
                    break cur.hi.clone();
                }
                match cur.bisect() {
                    TimeInstant::Exact(x) => {
                        return sign_changes(f, &TimeInstant::Exact(x), first);
                    }
                    TimeInstant::Root(next) => cur = next,
                }
            }
        }
    };
    let mut out = Vec::new();
    if a >= bound {
        return Ok(out);
    }
    let mut squarefree: Option<Arc<Polynomial>> = None;
    let mut stack = vec![(a, bound)];
    while let Some((lo, hi)) = stack.pop() {
        match chain.count(&lo, &hi) {
            0 => continue,
            1 => {
                if f.sign_at(&lo) != f.sign_at(&hi) {
                    let s = squarefree.get_or_insert_with(|| Arc::new(f.squarefree())).clone();
                    out.push(refine_root(s, lo, hi)?);
                    if first {
                        break;
                    }
                }
            }
            _ => {
                let m = nonroot_split(f, &lo, &hi);
                stack.push((m.clone(), hi));
                stack.push((lo, m));
            }
        }
    }
    Ok(out)
}

/// Memoised sign changes of certificate polynomials. Each polynomial is
/// solved once, from the time of its first query; later queries must not be
/// earlier than that.
#[derive(Debug, Default)]
pub struct RootCache {
    map: FxHashMap<Polynomial, (TimeInstant, Arc<[TimeInstant]>)>,
    hits: u64,
}

const ROOT_CACHE_LIMIT: usize = 1 << 20;

impl RootCache {
    pub fn new() -> Self {
        RootCache::default()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn hits(&self) -> u64 {
        self.hits
    }

    pub fn clear(&mut self) {
        self.map.clear();
    }

    /// Same answer as [`next_sign_change`].
    pub fn next_sign_change(&mut self, f: &Polynomial, t0: &TimeInstant) -> Result<Option<TimeInstant>, MotionError> {
        if f.degree() <= 1 {
            return next_sign_change(f, t0);
        }
        // f and -f change sign at the same times.
        let key = if f.leading().is_some_and(|c| c.is_negative()) {
            -f.clone()
        } else {
            f.clone()
        };
        if let Some((from, roots)) = self.map.get(&key) {
            if from <= t0 {
                self.hits += 1;
                let i = roots.partition_point(|r| r <= t0);
                return Ok(roots.get(i).cloned());
            }
        }
        let roots: Arc<[TimeInstant]> = sign_changes_after(f, t0)?.into();
        let next = roots.first().cloned();
        if self.map.len() >= ROOT_CACHE_LIMIT {
            self.map.clear();
        }
        self.map.insert(key, (t0.clone(), roots));
        Ok(next)
    }
}
