//! Partition of directions around an apex into polyhedral cones.
//!
//! Every cone is the intersection of `d` half-spaces through the apex with
//! rational inward normals, so membership is decided exactly. Points on a
//! shared boundary (and coincident points) are assigned by perturbing the
//! point with the larger id by an infinitesimal step along a fixed generic
//! direction `g`; a comparison along any vector `u` that ties exactly is then
//! decided by `sign((id_q - id_p) * <g, u>)`.

use std::cmp::Ordering;
use std::f64::consts::PI;
use std::fmt::Write as _;

use num_traits::{Signed, Zero};

use crate::motion::{
    diff_along_axis, rat, rational_from_f64, sign, sign_after, to_f64, Rational, TimeInstant, Trajectory,
};

/// Largest denominator used when approximating irrational ray directions.
const MAX_DENOM: i64 = 1_000_000;

/// Slack allowed on the opening-angle bound to absorb rational rounding of
/// the boundary rays.
pub const ANGLE_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConeError {
    #[error("unsupported dimension {0}; expected 2 or 3")]
    Dimension(usize),
    #[error("cone angle {0} is out of range")]
    Angle(f64),
    #[error("cone angle {0} exceeds pi/3, too wide for nearest-neighbour use")]
    TooWideForNn(f64),
}

#[derive(Clone, Debug)]
pub struct Cone {
    pub index: usize,
    /// Inward normals `u_1..u_d`.
    pub normals: Vec<Vec<Rational>>,
    /// Interior direction `x_l`.
    pub axis: Vec<Rational>,
    /// Extreme rays (not normalised).
    pub rays: Vec<Vec<Rational>>,
    /// Per normal: the boundary plane belongs to this cone when the query
    /// point has the larger id.
    pub boundary_rule: Vec<bool>,
}

impl Cone {
    /// Largest angle between two extreme rays.
    pub fn opening_angle(&self) -> f64 {
        let mut best = 0.0f64;
        for (i, a) in self.rays.iter().enumerate() {
            for b in &self.rays[i + 1..] {
                best = best.max(angle_between(&to_f64s(a), &to_f64s(b)));
            }
        }
        best
    }
}

#[derive(Clone, Debug)]
pub struct ConeFamily {
    dim: usize,
    theta: f64,
    cones: Vec<Cone>,
    perturb: Vec<Rational>,
    /// `axes_f64[l][j]`, `j < d` normals, `j == d` the cone axis.
    axes_f64: Vec<Vec<Vec<f64>>>,
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    let mut acc = Rational::zero();
    for (x, y) in a.iter().zip(b) {
        acc += x * y;
    }
    acc
}

fn dot_f64(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn to_f64s(v: &[Rational]) -> Vec<f64> {
    v.iter().map(to_f64).collect()
}

fn norm(v: &[f64]) -> f64 {
    dot_f64(v, v).sqrt()
}

pub fn angle_between(a: &[f64], b: &[f64]) -> f64 {
    let c = dot_f64(a, b) / (norm(a) * norm(b));
    c.clamp(-1.0, 1.0).acos()
}

/// Best rational approximation with bounded denominator (continued fractions).
fn approx_rational(x: f64, max_den: i64) -> Rational {
    let (mut h0, mut h1) = (0i64, 1i64);
    let (mut k0, mut k1) = (1i64, 0i64);
    let mut v = x;
    for _ in 0..64 {
        let a = v.floor();
        let ai = a as i64;
        let k2 = ai.saturating_mul(k1).saturating_add(k0);
        if k2 > max_den || k2 <= 0 {
            break;
        }
        let h2 = ai * h1 + h0;
        h0 = h1;
        h1 = h2;
        k0 = k1;
        k1 = k2;
        let frac = v - a;
        if frac.abs() < 1e-15 {
            break;
        }
        v = 1.0 / frac;
    }
    rat(h1, k1)
}

/// Rational unit vector at angle `phi`, exact at multiples of `pi/2`.
fn rational_direction(phi: f64) -> Vec<Rational> {
    let mut phi = phi.rem_euclid(2.0 * PI);
    let mut flip = false;
    if phi > PI / 2.0 + 1e-12 && phi <= 3.0 * PI / 2.0 + 1e-12 {
        phi -= PI;
        flip = true;
    } else if phi > 3.0 * PI / 2.0 {
        phi -= 2.0 * PI;
    }
    // Tangent half-angle parametrisation keeps the vector exactly unit length.
    let m = approx_rational((phi / 2.0).tan(), MAX_DENOM);
    let one = Rational::ONE;
    let den = &one + &m * &m;
    let x = (&one - &m * &m) / &den;
    let y = (&m * rat(2, 1)) / &den;
    if flip {
        vec![-x, -y]
    } else {
        vec![x, y]
    }
}

fn cross(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    vec![
        &a[1] * &b[2] - &a[2] * &b[1],
        &a[2] * &b[0] - &a[0] * &b[2],
        &a[0] * &b[1] - &a[1] * &b[0],
    ]
}

fn planar_cones(theta: f64) -> Vec<Cone> {
    let c = (2.0 * PI / theta - 1e-9).ceil() as usize;
    let rays: Vec<Vec<Rational>> = (0..c)
        .map(|k| rational_direction(2.0 * PI * k as f64 / c as f64))
        .collect();
    (0..c)
        .map(|k| {
            let lo = rays[k].clone();
            let hi = rays[(k + 1) % c].clone();
            let n_lo = vec![-lo[1].clone(), lo[0].clone()];
            let n_hi = vec![hi[1].clone(), -hi[0].clone()];
            let axis = vec![&lo[0] + &hi[0], &lo[1] + &hi[1]];
            Cone {
                index: k,
                normals: vec![n_lo, n_hi],
                axis,
                rays: vec![lo, hi],
                boundary_rule: Vec::new(),
            }
        })
        .collect()
}

/// Triangles over a `k x k` subdivision of each cube face.
fn cube_triangles(k: usize) -> Vec<[Vec<Rational>; 3]> {
    let mut out = Vec::new();
    let coord = |i: usize| rat(2 * i as i64 - k as i64, k as i64);
    for axis in 0..3 {
        for side in [1i64, -1] {
            let (b, c) = ((axis + 1) % 3, (axis + 2) % 3);
            let point = |i: usize, j: usize| {
                let mut v = vec![Rational::zero(); 3];
                v[axis] = rat(side, 1);
                v[b] = coord(i);
                v[c] = coord(j);
                v
            };
            for i in 0..k {
                for j in 0..k {
                    let p00 = point(i, j);
                    let p10 = point(i + 1, j);
                    let p01 = point(i, j + 1);
                    let p11 = point(i + 1, j + 1);
                    let d1 = angle_between(&to_f64s(&p00), &to_f64s(&p11));
                    let d2 = angle_between(&to_f64s(&p10), &to_f64s(&p01));
                    if d1 <= d2 {
                        out.push([p00.clone(), p10, p11.clone()]);
                        out.push([p00, p01, p11]);
                    } else {
                        out.push([p10.clone(), p01.clone(), p00]);
                        out.push([p10, p01, p11]);
                    }
                }
            }
        }
    }
    out
}

fn max_triangle_angle(t: &[Vec<Rational>; 3]) -> f64 {
    let f: Vec<Vec<f64>> = t.iter().map(|v| to_f64s(v)).collect();
    angle_between(&f[0], &f[1])
        .max(angle_between(&f[1], &f[2]))
        .max(angle_between(&f[0], &f[2]))
}

/// Direction making equal angles with the three rays, if it lies inside the
/// cone; otherwise the normalised centroid.
fn spatial_axis(rays: &[Vec<Rational>; 3], normals: &[Vec<Rational>]) -> Vec<Rational> {
    let unit: Vec<Vec<f64>> = rays
        .iter()
        .map(|r| {
            let v = to_f64s(r);
            let n = norm(&v);
            v.iter().map(|x| x / n).collect()
        })
        .collect();
    let rationalise = |v: &[f64]| -> Vec<Rational> {
        let n = norm(v);
        v.iter()
            .map(|x| rational_from_f64((x / n * 1048576.0).round() / 1048576.0))
            .collect()
    };
    let interior = |x: &[Rational]| normals.iter().all(|u| dot(u, x).is_positive());
    if let Some(sol) = solve3(&unit, [1.0, 1.0, 1.0]) {
        let cand = rationalise(&sol);
        if interior(&cand) {
            return cand;
        }
    }
    let centroid: Vec<f64> = (0..3).map(|i| unit.iter().map(|u| u[i]).sum()).collect();
    rationalise(&centroid)
}

fn solve3(rows: &[Vec<f64>], rhs: [f64; 3]) -> Option<Vec<f64>> {
    let m = |i: usize, j: usize| rows[i][j];
    let det = m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) - m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0))
        + m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
    if det.abs() < 1e-12 {
        return None;
    }
    let mut out = vec![0.0; 3];
    for (col, slot) in out.iter_mut().enumerate() {
        let mm = |i: usize, j: usize| if j == col { rhs[i] } else { m(i, j) };
        let d = mm(0, 0) * (mm(1, 1) * mm(2, 2) - mm(1, 2) * mm(2, 1))
            - mm(0, 1) * (mm(1, 0) * mm(2, 2) - mm(1, 2) * mm(2, 0))
            + mm(0, 2) * (mm(1, 0) * mm(2, 1) - mm(1, 1) * mm(2, 0));
        *slot = d / det;
    }
    Some(out)
}

fn spatial_cones(theta: f64) -> Vec<Cone> {
    let mut k = 1;
    let tris = loop {
        let tris = cube_triangles(k);
        if tris.iter().all(|t| max_triangle_angle(t) <= theta + ANGLE_SLACK) {
            break tris;
        }
        k += 1;
    };
    tris.into_iter()
        .enumerate()
        .map(|(index, t)| {
            let mut normals = Vec::new();
            for (a, b, c) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
                let n = cross(&t[a], &t[b]);
                if dot(&n, &t[c]).is_negative() {
                    normals.push(n.into_iter().map(|x| -x).collect());
                } else {
                    normals.push(n);
                }
            }
            let axis = spatial_axis(&t, &normals);
            Cone {
                index,
                normals,
                axis,
                rays: t.to_vec(),
                boundary_rule: Vec::new(),
            }
        })
        .collect()
}

const PERTURB_CANDIDATES: [[i64; 6]; 4] = [
    [7919, 10007, 104729, 1000003, 3571, 15485863],
    [15013, 100003, 6761, 1000033, 48611, 7368787],
    [-2741, 10009, 98123, 1000037, 28657, 3010349],
    [13, 1000039, 1299709, 10000019, 3, 7],
];

impl ConeFamily {
    /// Builds the family; `for_nn` enforces the angle bound needed for
    /// nearest-neighbour maintenance.
    pub fn build(dim: usize, theta: f64, for_nn: bool) -> Result<ConeFamily, ConeError> {
        if dim != 2 && dim != 3 {
            return Err(ConeError::Dimension(dim));
        }
        if !(PI / 256.0..=PI / 2.0 + 1e-12).contains(&theta) {
            return Err(ConeError::Angle(theta));
        }
        if for_nn && theta > PI / 3.0 + 1e-12 {
            return Err(ConeError::TooWideForNn(theta));
        }
        let mut cones = if dim == 2 {
            planar_cones(theta)
        } else {
            spatial_cones(theta)
        };
        let perturb = PERTURB_CANDIDATES
            .iter()
            .map(|c| (0..dim).map(|i| rat(c[2 * i], c[2 * i + 1])).collect::<Vec<_>>())
            .find(|g| {
                cones.iter().all(|cone| {
                    cone.normals
                        .iter()
                        .chain(std::iter::once(&cone.axis))
                        .all(|u| !dot(g, u).is_zero())
                })
            })
            .expect("generic perturbation direction");
        for cone in &mut cones {
            cone.boundary_rule = cone.normals.iter().map(|u| dot(&perturb, u).is_positive()).collect();
        }
        let axes_f64 = cones
            .iter()
            .map(|c| {
                c.normals
                    .iter()
                    .chain(std::iter::once(&c.axis))
                    .map(|v| to_f64s(v))
                    .collect()
            })
            .collect();
        Ok(ConeFamily {
            dim,
            theta,
            cones,
            perturb,
            axes_f64,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn len(&self) -> usize {
        self.cones.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cones.is_empty()
    }

    pub fn cones(&self) -> &[Cone] {
        &self.cones
    }

    pub fn cone(&self, l: usize) -> &Cone {
        &self.cones[l]
    }

    pub fn perturbation(&self) -> &[Rational] {
        &self.perturb
    }

    /// Number of coordinate vectors per cone: the `d` normals then the axis.
    pub fn axes_per_cone(&self) -> usize {
        self.dim + 1
    }

    pub fn axis_vector(&self, l: usize, j: usize) -> &[Rational] {
        let cone = &self.cones[l];
        if j < self.dim {
            &cone.normals[j]
        } else {
            &cone.axis
        }
    }

    pub fn axis_vector_f64(&self, l: usize, j: usize) -> &[f64] {
        &self.axes_f64[l][j]
    }

    /// Order of two points whose projections on `axis` coincide.
    pub fn tie_order(&self, id_p: u64, id_q: u64, axis: &[Rational]) -> Ordering {
        let s = sign(&dot(&self.perturb, axis));
        match id_q.cmp(&id_p) {
            Ordering::Equal => Ordering::Equal,
            Ordering::Greater => s,
            Ordering::Less => s.reverse(),
        }
    }

    /// Where `q` lies relative to `p` along `axis` (Greater: q is further).
    pub fn compare_static(&self, p: &[Rational], id_p: u64, q: &[Rational], id_q: u64, axis: &[Rational]) -> Ordering {
        let diff: Vec<Rational> = q.iter().zip(p).map(|(a, b)| a - b).collect();
        match sign(&dot(&diff, axis)) {
            Ordering::Equal => self.tie_order(id_p, id_q, axis),
            s => s,
        }
    }

    /// Kinetic version of `compare_static`, evaluated just after `t`.
    pub fn compare_at(&self, p: &Trajectory, q: &Trajectory, axis: &[Rational], t: &TimeInstant) -> Ordering {
        let f = diff_along_axis(q, p, axis);
        match sign_after(&f, t) {
            Ordering::Equal => self.tie_order(p.point_id, q.point_id, axis),
            s => s,
        }
    }

    pub fn contains(&self, l: usize, apex: &[Rational], apex_id: u64, q: &[Rational], q_id: u64) -> bool {
        self.cones[l]
            .normals
            .iter()
            .all(|u| self.compare_static(apex, apex_id, q, q_id, u) == Ordering::Greater)
    }

    /// Whether `apex` lies in the reflection of cone `l` placed at `q`.
    pub fn reflected_contains(&self, l: usize, apex: &[Rational], apex_id: u64, q: &[Rational], q_id: u64) -> bool {
        self.contains(l, q, q_id, apex, apex_id)
    }

    pub fn cone_of_static(&self, apex: &[Rational], apex_id: u64, q: &[Rational], q_id: u64) -> usize {
        (0..self.len())
            .find(|&l| self.contains(l, apex, apex_id, q, q_id))
            .expect("cones partition the space")
    }

    pub fn contains_at(&self, l: usize, apex: &Trajectory, q: &Trajectory, t: &TimeInstant) -> bool {
        self.cones[l]
            .normals
            .iter()
            .all(|u| self.compare_at(apex, q, u, t) == Ordering::Greater)
    }

    pub fn cone_of(&self, apex: &Trajectory, q: &Trajectory, t: &TimeInstant) -> usize {
        (0..self.len())
            .find(|&l| self.contains_at(l, apex, q, t))
            .expect("cones partition the space")
    }

    /// One line per cone: index, normals, axis.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let fmt = |v: &[Rational]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
        for c in &self.cones {
            let _ = write!(out, "cone {}", c.index);
            for u in &c.normals {
                let _ = write!(out, " | n {}", fmt(u));
            }
            let _ = writeln!(out, " | x {}", fmt(&c.axis));
        }
        out
    }
}

/// Angle used for the (1+eps) structure: the widest `pi/k`, `k` in
/// 3, 4, 6, 8, 12, 16, ..., with `1 / (cos t - sin t) <= 1 + eps`.
pub fn theta_for_epsilon(eps: f64) -> Option<f64> {
    if !(eps > 0.0) || !eps.is_finite() {
        return None;
    }
    (0..24)
        .flat_map(|m| [3u64 << m, 4u64 << m])
        .map(|k| PI / k as f64)
        .find(|&t| {
            let d = t.cos() - t.sin();
            d > 0.0 && 1.0 / d <= 1.0 + eps
        })
}

/// Rational point from floats, for tests and generators.
pub fn point_from_f64(v: &[f64]) -> Vec<Rational> {
    v.iter().map(|&x| rational_from_f64(x)).collect()
}
