//! Brute-force reference answers, computed from the definitions at a single
//! instant. Floating-point evaluation with error bounds decides the easy
//! cases; anything within the bound falls back to exact arithmetic.
//!
//! Every comparison uses the same "just after t" convention as the kinetic
//! structures, so a structure that has processed all events at or before
//! `t` must agree exactly.

use std::cmp::Ordering;

use crate::cones::ConeFamily;
use crate::motion::{rational_from_f64, sign_after, squared_distance_poly, Polynomial, TimeInstant, Trajectory};
use crate::sygraph::SemiYaoGraph;

const U: f64 = f64::EPSILON * 0.5;

/// Positions of all points at one instant, each with an absolute error bound.
pub struct Frame<'a> {
    points: &'a [Trajectory],
    t: TimeInstant,
    pos: Vec<Vec<f64>>,
    err: Vec<f64>,
}

impl<'a> Frame<'a> {
    pub fn new(points: &'a [Trajectory], t: &TimeInstant) -> Frame<'a> {
        let (tf, dt) = match t {
            TimeInstant::Exact(_) => {
                let x = t.to_f64();
                (x, x.abs() * 2.0 * U)
            }
            TimeInstant::Root(_) => {
                let (lo, hi) = t.bounds();
                let (lo, hi) = (crate::motion::to_f64(&lo), crate::motion::to_f64(&hi));
                let mid = 0.5 * (lo + hi);
                (mid, (hi - lo) * 0.51 + mid.abs() * 4.0 * U)
            }
        };
        let big_t = tf.abs() + dt;
        let mut pos = Vec::with_capacity(points.len());
        let mut err = Vec::with_capacity(points.len());
        for p in points {
            let mut xs = Vec::with_capacity(p.dim());
            let mut e_max: f64 = 0.0;
            for c in p.coords() {
                let a = c.coeffs_f64();
                let v = a.iter().rev().fold(0.0, |acc, c| acc * tf + c);
                let mut s = 0.0;
                let mut dsum = 0.0;
                let mut pw = 1.0;
                for (k, ak) in a.iter().enumerate() {
                    s += ak.abs() * pw;
                    if k + 1 < a.len() {
                        dsum += (k + 1) as f64 * a[k + 1].abs() * pw;
                    }
                    pw *= big_t;
                }
                let e = 2.0 * (s * (2.0 * a.len() as f64 + 3.0) * U + dsum * dt);
                e_max = e_max.max(e);
                xs.push(v);
            }
            pos.push(xs);
            err.push(e_max);
        }
        Frame {
            points,
            t: t.clone(),
            pos,
            err,
        }
    }

    pub fn time(&self) -> &TimeInstant {
        &self.t
    }

    pub fn position(&self, p: usize) -> &[f64] {
        &self.pos[p]
    }

    /// Where `q` lies relative to `p` along `axis` (Greater: further), with
    /// the perturbation tie rule.
    pub fn compare(&self, family: &ConeFamily, p: usize, q: usize, l: usize, j: usize) -> Ordering {
        let u = family.axis_vector_f64(l, j);
        let (a, b) = (&self.pos[p], &self.pos[q]);
        let mut s = 0.0;
        let mut mag = 0.0;
        let mut un = 0.0;
        for i in 0..u.len() {
            s += (b[i] - a[i]) * u[i];
            mag += (a[i].abs() + b[i].abs()) * u[i].abs();
            un += u[i].abs();
        }
        let bound = 2.0 * (un * (self.err[p] + self.err[q]) + 6.0 * U * mag);
        if s > bound {
            return Ordering::Greater;
        }
        if s < -bound {
            return Ordering::Less;
        }
        family.compare_at(&self.points[p], &self.points[q], family.axis_vector(l, j), &self.t)
    }

    /// Whether `q` lies in cone `l` with apex `p`.
    pub fn in_cone(&self, family: &ConeFamily, l: usize, p: usize, q: usize) -> bool {
        (0..family.dim()).all(|j| self.compare(family, p, q, l, j) == Ordering::Greater)
    }

    fn sqdist(&self, p: usize, q: usize) -> (f64, f64) {
        let (a, b) = (&self.pos[p], &self.pos[q]);
        let e = self.err[p] + self.err[q];
        let mut d = 0.0;
        let mut err = 0.0;
        for i in 0..a.len() {
            let delta = b[i] - a[i];
            let ei = e + 2.0 * U * delta.abs();
            d += delta * delta;
            err += 2.0 * delta.abs() * ei + ei * ei;
        }
        (d, 2.0 * (err + 4.0 * U * d))
    }

    pub fn sqdist_f64(&self, p: usize, q: usize) -> f64 {
        self.sqdist(p, q).0
    }

    /// Compares `|p q|` with `|p r|` just after `t`; ties by index.
    pub fn closer(&self, p: usize, q: usize, r: usize) -> bool {
        let (dq, eq) = self.sqdist(p, q);
        let (dr, er) = self.sqdist(p, r);
        if dq + eq < dr - er {
            return true;
        }
        if dr + er < dq - eq {
            return false;
        }
        let f = &squared_distance_poly(&self.points[p], &self.points[q])
            - &squared_distance_poly(&self.points[p], &self.points[r]);
        match sign_after(&f, &self.t) {
            Ordering::Less => true,
            Ordering::Greater => false,
            Ordering::Equal => q < r,
        }
    }
}

/// The Semi-Yao graph at `t` from its definition, in O(n^2 c) time.
pub fn brute_semi_yao(points: &[Trajectory], family: &ConeFamily, t: &TimeInstant) -> SemiYaoGraph {
    let frame = Frame::new(points, t);
    semi_yao_in(&frame, family)
}

pub fn semi_yao_in(frame: &Frame, family: &ConeFamily) -> SemiYaoGraph {
    let n = frame.points.len();
    let c = family.len();
    let d = family.dim();
    let mut targets = vec![vec![None; c]; n];
    for p in 0..n {
        let row: &mut Vec<Option<u32>> = &mut targets[p];
        for q in 0..n {
            if q == p {
                continue;
            }
            let l = (0..c)
                .find(|&l| frame.in_cone(family, l, p, q))
                .expect("cones partition the space");
            row[l] = match row[l] {
                None => Some(q as u32),
                Some(b) if frame.compare(family, b as usize, q, l, d) == Ordering::Less => Some(q as u32),
                keep => keep,
            };
        }
    }
    SemiYaoGraph { targets }
}

/// Exact nearest neighbour of every point at `t`; ties by smaller index.
pub fn brute_all_nn(points: &[Trajectory], t: &TimeInstant) -> Vec<Option<u32>> {
    let frame = Frame::new(points, t);
    all_nn_in(&frame)
}

pub fn all_nn_in(frame: &Frame) -> Vec<Option<u32>> {
    let n = frame.points.len();
    (0..n)
        .map(|p| {
            let mut best: Option<usize> = None;
            for q in 0..n {
                if q == p {
                    continue;
                }
                best = match best {
                    Some(b) if !frame.closer(p, q, b) => Some(b),
                    _ => Some(q),
                };
            }
            best.map(|b| b as u32)
        })
        .collect()
}

/// Closest pair `(min, max)` at `t`; ties by the pair of indices.
pub fn brute_closest_pair(points: &[Trajectory], t: &TimeInstant) -> Option<(u32, u32)> {
    let frame = Frame::new(points, t);
    let nn = all_nn_in(&frame);
    let mut best: Option<(usize, usize)> = None;
    for (p, q) in nn.iter().enumerate() {
        let Some(q) = q else { continue };
        let (a, b) = (p.min(*q as usize), p.max(*q as usize));
        best = match best {
            None => Some((a, b)),
            Some((ba, bb)) => {
                let f = &squared_distance_poly(&frame.points[a], &frame.points[b])
                    - &squared_distance_poly(&frame.points[ba], &frame.points[bb]);
                match sign_after(&f, t) {
                    Ordering::Less => Some((a, b)),
                    Ordering::Equal if (a, b) < (ba, bb) => Some((a, b)),
                    _ => Some((ba, bb)),
                }
            }
        };
    }
    best.map(|(a, b)| (a as u32, b as u32))
}

/// Whether `|p e| <= (1 + eps) |p nn|` just after the frame's instant.
pub fn within_eps(frame: &Frame, p: usize, e: usize, nn: usize, eps: f64) -> bool {
    if e == nn {
        return true;
    }
    let k = (1.0 + eps) * (1.0 + eps);
    let (de, ee) = frame.sqdist(p, e);
    let (dn, en) = frame.sqdist(p, nn);
    if de + ee < k * (dn - en) * (1.0 - 4.0 * U) {
        return true;
    }
    if de - ee > k * (dn + en) * (1.0 + 4.0 * U) {
        return false;
    }
    let one_eps = rational_from_f64(1.0) + rational_from_f64(eps);
    let k = &one_eps * &one_eps;
    let f: Polynomial = &squared_distance_poly(&frame.points[p], &frame.points[nn]).scale(&k)
        - &squared_distance_poly(&frame.points[p], &frame.points[e]);
    sign_after(&f, &frame.t) != Ordering::Less
}

/// Result of comparing a snapshot of the kinetic structures with the oracle.
#[derive(Clone, Debug, Default)]
pub struct CheckReport {
    pub checked: usize,
    pub semi_yao_mismatches: usize,
    pub nn_mismatches: usize,
    pub eps_violations: usize,
    pub audit_failures: usize,
    /// Largest `|p e| / |p nn|` seen.
    pub max_ratio: f64,
    pub first_failure: Option<String>,
}

impl CheckReport {
    pub fn ok(&self) -> bool {
        self.semi_yao_mismatches == 0 && self.nn_mismatches == 0 && self.eps_violations == 0 && self.audit_failures == 0
    }

    pub fn fail(&mut self, msg: String) {
        if self.first_failure.is_none() {
            self.first_failure = Some(msg);
        }
    }

    pub fn merge(&mut self, other: CheckReport) {
        self.checked += other.checked;
        self.semi_yao_mismatches += other.semi_yao_mismatches;
        self.nn_mismatches += other.nn_mismatches;
        self.eps_violations += other.eps_violations;
        self.audit_failures += other.audit_failures;
        self.max_ratio = self.max_ratio.max(other.max_ratio);
        if self.first_failure.is_none() {
            self.first_failure = other.first_failure;
        }
    }
}

pub fn check_semi_yao(frame: &Frame, family: &ConeFamily, got: &SemiYaoGraph) -> CheckReport {
    let want = semi_yao_in(frame, family);
    let mut rep = CheckReport {
        checked: 1,
        ..Default::default()
    };
    for (p, (w, g)) in want.targets.iter().zip(&got.targets).enumerate() {
        for l in 0..w.len() {
            if w[l] != g[l] {
                rep.semi_yao_mismatches += 1;
                rep.fail(format!(
                    "t={}: point {} cone {}: expected target {:?}, structure has {:?}",
                    frame.t, p, l, w[l], g[l]
                ));
            }
        }
    }
    rep
}

pub fn check_nn(frame: &Frame, got: &[Option<u32>]) -> CheckReport {
    let want = all_nn_in(frame);
    let mut rep = CheckReport {
        checked: 1,
        ..Default::default()
    };
    for (p, (w, g)) in want.iter().zip(got).enumerate() {
        if w != g {
            rep.nn_mismatches += 1;
            rep.fail(format!(
                "t={}: point {}: expected nearest {:?}, structure has {:?}",
                frame.t, p, w, g
            ));
        }
    }
    rep
}

pub fn check_eps(frame: &Frame, got: &[Option<u32>], eps: f64) -> CheckReport {
    let nn = all_nn_in(frame);
    let mut rep = CheckReport {
        checked: 1,
        max_ratio: 1.0,
        ..Default::default()
    };
    for (p, (want, e)) in nn.iter().zip(got).enumerate() {
        match (want, e) {
            (None, None) => {}
            (Some(nn), Some(e)) => {
                let (nn, e) = (*nn as usize, *e as usize);
                let dn = frame.sqdist_f64(p, nn);
                let de = frame.sqdist_f64(p, e);
                if dn > 0.0 {
                    rep.max_ratio = rep.max_ratio.max((de / dn).sqrt());
                }
                if e == p || !within_eps(frame, p, e, nn, eps) {
                    rep.eps_violations += 1;
                    rep.fail(format!(
                        "t={}: point {}: approximate neighbour {} is not within 1+{} of {}",
                        frame.t, p, e, eps, nn
                    ));
                }
            }
            _ => {
                rep.eps_violations += 1;
                rep.fail(format!("t={}: point {}: neighbour presence differs", frame.t, p));
            }
        }
    }
    rep
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::motion::{int, rat};

    fn lin(id: u64, x: (i64, i64), y: (i64, i64)) -> Trajectory {
        Trajectory::new(
            id,
            vec![Polynomial::from_i64(&[x.0, x.1]), Polynomial::from_i64(&[y.0, y.1])],
        )
    }

    #[test]
    fn nearest_by_hand() {
        let pts = vec![
            Trajectory::stationary(0, &[int(0), int(0)]),
            Trajectory::stationary(1, &[int(3), int(0)]),
            Trajectory::stationary(2, &[int(0), int(5)]),
        ];
        assert_eq!(
            brute_all_nn(&pts, &TimeInstant::zero()),
            vec![Some(1), Some(0), Some(0)]
        );
        assert_eq!(brute_closest_pair(&pts, &TimeInstant::zero()), Some((0, 1)));
    }

    #[test]
    fn nearest_tie_uses_index_and_future() {
        // At t = 0 both neighbours are at distance 1; point 1 moves away.
        let pts = vec![
            Trajectory::stationary(0, &[int(0), int(0)]),
            lin(1, (1, 1), (0, 0)),
            Trajectory::stationary(2, &[int(-1), int(0)]),
        ];
        assert_eq!(brute_all_nn(&pts, &TimeInstant::zero())[0], Some(2));
        let pts2 = vec![
            pts[0].clone(),
            Trajectory::stationary(1, &[int(1), int(0)]),
            pts[2].clone(),
        ];
        assert_eq!(brute_all_nn(&pts2, &TimeInstant::zero())[0], Some(1));
    }

    #[test]
    fn semi_yao_of_a_square() {
        let fam = ConeFamily::build(2, std::f64::consts::FRAC_PI_3, true).unwrap();
        let pts = vec![
            Trajectory::stationary(0, &[int(0), int(0)]),
            Trajectory::stationary(1, &[int(1), int(0)]),
            Trajectory::stationary(2, &[int(0), int(1)]),
            Trajectory::stationary(3, &[int(1), int(1)]),
        ];
        let g = brute_semi_yao(&pts, &fam, &TimeInstant::zero());
        let at0: Vec<_> = pts.iter().map(|p| p.position(&int(0))).collect();
        for p in 0..4 {
            for l in 0..fam.len() {
                let members: Vec<usize> = (0..4)
                    .filter(|&q| q != p && fam.cone_of_static(&at0[p], p as u64, &at0[q], q as u64) == l)
                    .collect();
                let want = members.iter().copied().reduce(|a, b| {
                    let axis = fam.axis_vector(l, 2);
                    if fam.compare_static(&at0[a], a as u64, &at0[b], b as u64, axis) == Ordering::Less {
                        b
                    } else {
                        a
                    }
                });
                assert_eq!(g.targets[p][l], want.map(|q| q as u32), "apex {} cone {}", p, l);
            }
        }
        assert!(g.targets.iter().all(|r| r.iter().flatten().count() >= 2));
    }

    #[test]
    fn eps_bound_is_closed() {
        let pts = vec![
            Trajectory::stationary(0, &[int(0), int(0)]),
            Trajectory::stationary(1, &[int(2), int(0)]),
            Trajectory::stationary(2, &[int(3), int(0)]),
        ];
        let f = Frame::new(&pts, &TimeInstant::Exact(rat(1, 3)));
        assert!(within_eps(&f, 0, 2, 1, 0.5));
        assert!(!within_eps(&f, 0, 2, 1, 0.25));
    }
}
