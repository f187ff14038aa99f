//! Moving points with polynomial coordinates.

use super::polynomial::{to_f64, Polynomial, Rational};
use super::time::TimeInstant;

/// A point whose `i`-th coordinate at time `t` is `coords[i](t)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub point_id: u64,
    coords: Vec<Polynomial>,
}

impl Trajectory {
    pub fn new(point_id: u64, coords: Vec<Polynomial>) -> Self {
        Trajectory { point_id, coords }
    }

    /// A point that never moves.
    pub fn stationary(point_id: u64, pos: &[Rational]) -> Self {
        Trajectory {
            point_id,
            coords: pos.iter().map(|c| Polynomial::constant(c.clone())).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[Polynomial] {
        &self.coords
    }

    pub fn degree(&self) -> usize {
        self.coords.iter().map(Polynomial::degree).max().unwrap_or(0)
    }

    pub fn position(&self, t: &Rational) -> Vec<Rational> {
        self.coords.iter().map(|c| c.eval(t)).collect()
    }

    /// Approximate position; exact instants go through the rational path.
    pub fn position_f64(&self, t: &TimeInstant) -> Vec<f64> {
        match t.as_exact() {
            Some(r) => self.position(r).iter().map(to_f64).collect(),
            None => {
                let x = t.to_f64();
                self.coords.iter().map(|c| c.eval_f64(x)).collect()
            }
        }
    }
}

/// `<a(t) - b(t), axis>`. The axis need not be normalised; only its
/// direction matters to the sign.
pub fn diff_along_axis(a: &Trajectory, b: &Trajectory, axis: &[Rational]) -> Polynomial {
    assert_eq!(a.dim(), b.dim(), "dimension mismatch");
    assert_eq!(a.dim(), axis.len(), "axis dimension mismatch");
    let mut out = Polynomial::zero();
    for ((pa, pb), w) in a.coords.iter().zip(&b.coords).zip(axis) {
        out = &out + &(pa - pb).scale(w);
    }
    out
}

/// `sum_i (a_i(t) - b_i(t))^2`
pub fn squared_distance_poly(a: &Trajectory, b: &Trajectory) -> Polynomial {
    assert_eq!(a.dim(), b.dim(), "dimension mismatch");
    let mut out = Polynomial::zero();
    for (pa, pb) in a.coords.iter().zip(&b.coords) {
        let d = pa - pb;
        out = &out + &(&d * &d);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::motion::polynomial::int;

    fn traj(id: u64, coords: &[&[i64]]) -> Trajectory {
        Trajectory::new(id, coords.iter().map(|c| Polynomial::from_i64(c)).collect())
    }

    #[test]
    fn axis_differences() {
        let x = [int(1), int(0)];
        let a = traj(0, &[&[1, 2], &[3]]);
        assert!(diff_along_axis(&a, &a, &x).is_zero());
        let a = traj(0, &[&[0, 1], &[0]]);
        let b = traj(1, &[&[1], &[0]]);
        assert_eq!(diff_along_axis(&a, &b, &x), Polynomial::from_i64(&[-1, 1]));
        let a = traj(0, &[&[0, 0, 1], &[0]]);
        let b = traj(1, &[&[0, 1], &[0]]);
        assert_eq!(diff_along_axis(&a, &b, &x), Polynomial::from_i64(&[0, -1, 1]));
    }

    #[test]
    fn squared_distances() {
        let a = traj(0, &[&[2, 1], &[5]]);
        assert!(squared_distance_poly(&a, &a).is_zero());
        let o = traj(0, &[&[0], &[0]]);
        let b = traj(1, &[&[0, 1], &[0]]);
        assert_eq!(squared_distance_poly(&o, &b), Polynomial::from_i64(&[0, 0, 1]));
        let c = traj(2, &[&[3], &[4]]);
        assert_eq!(squared_distance_poly(&o, &c), Polynomial::from_i64(&[25]));
    }
}
