//! Polynomial motion, exact time instants and certificate failure times.

mod polynomial;
mod sturm;
mod time;
mod trajectory;

pub use polynomial::{int, rat, rational_from_f64, sign, to_f64, Polynomial, Rational};
pub use sturm::{isolate, SturmChain};
pub use time::{
    next_sign_change, sign_after, sign_at, sign_changes_after, RootCache, TimeInstant, TimeKind, ROOT_TOLERANCE,
};
pub use trajectory::{diff_along_axis, squared_distance_poly, Trajectory};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MotionError {
    #[error("root isolation did not converge inside ({lo}, {hi})")]
    DegenerateRoot { lo: f64, hi: f64 },
}
