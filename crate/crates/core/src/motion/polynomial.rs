//! Univariate polynomials in time with exact rational coefficients.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use dashu_int::IBig;
use num_traits::{One, Signed, Zero};

pub type Rational = dashu_ratio::RBig;

/// Parse-free constructor for small rationals.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::from_parts_signed(IBig::from(num), IBig::from(den))
}

pub fn int(v: i64) -> Rational {
    Rational::from(v)
}

/// Exact rational value of a finite `f64`.
pub fn rational_from_f64(v: f64) -> Rational {
    Rational::try_from(v).expect("finite float")
}

/// Nearest `f64`.
pub fn to_f64(v: &Rational) -> f64 {
    v.to_f64().value()
}

/// A polynomial `c0 + c1 t + ... + ck t^k` kept in canonical form: the
/// coefficient vector never ends with a zero, so the zero polynomial is empty.
#[derive(Clone, Default)]
pub struct Polynomial {
    coeffs: Vec<Rational>,
    /// Nearest floats of `coeffs`, for filtered evaluation.
    approx: Vec<f64>,
}

impl PartialEq for Polynomial {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs
    }
}

impl Eq for Polynomial {}

impl std::hash::Hash for Polynomial {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.coeffs.hash(state);
    }
}

impl Polynomial {
    pub fn zero() -> Self {
        Polynomial::default()
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    /// Builds from coefficients, constant term first.
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        let approx = coeffs.iter().map(to_f64).collect();
        Polynomial { coeffs, approx }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| int(c)).collect())
    }

    /// `t - r`
    pub fn linear_root(r: Rational) -> Self {
        Self::new(vec![-r, Rational::one()])
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> Option<&Rational> {
        self.coeffs.last()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn eval(&self, t: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * t + c;
        }
        acc
    }

    pub fn sign_at(&self, t: &Rational) -> Ordering {
        let x = to_f64(t);
        if x.is_finite() {
            let dx = x.abs() * f64::EPSILON + f64::MIN_POSITIVE;
            if let Some(s) = self.interval_sign(x - dx, x + dx) {
                return s;
            }
        }
        sign(&self.eval(t))
    }

    /// Sign over all of `[lo, hi]` when interval Horner evaluation, with
    /// rounding slack, excludes zero.
    pub fn interval_sign(&self, lo: f64, hi: f64) -> Option<Ordering> {
        const REL: f64 = 4.0 * f64::EPSILON;
        let mut a = 0.0f64;
        let mut b = 0.0f64;
        for &cf in self.approx.iter().rev() {
            let prods = [a * lo, a * hi, b * lo, b * hi];
            let mut mn = prods.iter().cloned().fold(f64::INFINITY, f64::min);
            let mut mx = prods.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let mag = mn.abs().max(mx.abs()) + cf.abs();
            mn += cf;
            mx += cf;
            let slack = (mag + mn.abs().max(mx.abs())) * REL + f64::MIN_POSITIVE;
            a = mn - slack;
            b = mx + slack;
        }
        if !a.is_finite() || !b.is_finite() {
            return None;
        }
        if a > 0.0 {
            Some(Ordering::Greater)
        } else if b < 0.0 {
            Some(Ordering::Less)
        } else {
            None
        }
    }

    pub fn coeffs_f64(&self) -> Vec<f64> {
        self.approx.clone()
    }

    pub fn eval_f64(&self, t: f64) -> f64 {
        self.approx.iter().rev().fold(0.0, |acc, c| acc * t + c)
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * int(k as i64))
                .collect(),
        )
    }

    pub fn scale(&self, k: &Rational) -> Self {
        if k.is_zero() {
            return Self::zero();
        }
        Self::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    /// Divides by the leading coefficient. The zero polynomial stays zero.
    pub fn monic(&self) -> Self {
        match self.leading() {
            None => Self::zero(),
            Some(lc) => {
                let inv = Rational::ONE / lc;
                self.scale(&inv)
            }
        }
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, divisor: &Polynomial) -> (Polynomial, Polynomial) {
        assert!(!divisor.is_zero(), "polynomial division by zero");
        let dd = divisor.degree();
        let lc = divisor.leading().unwrap().clone();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Self::zero(), self.clone());
        }
        let mut quot = vec![Rational::zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = &rem[k + dd] / &lc;
            if !c.is_zero() {
                for (j, dc) in divisor.coeffs.iter().enumerate() {
                    rem[k + j] -= &c * dc;
                }
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        (Self::new(quot), Self::new(rem))
    }

    pub fn rem(&self, divisor: &Polynomial) -> Polynomial {
        self.div_rem(divisor).1
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &Polynomial) -> Polynomial {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            // Normalising keeps coefficient growth in check.
            b = r.monic();
        }
        a.monic()
    }

    /// Polynomial with the same distinct roots, all simple.
    pub fn squarefree(&self) -> Polynomial {
        if self.degree() <= 1 {
            return self.monic();
        }
        if self.degree() == 2 {
            let c = &self.coeffs;
            if &c[1] * &c[1] != int(4) * &c[2] * &c[0] {
                return self.monic();
            }
        }
        let g = self.gcd(&self.derivative());
        if g.degree() == 0 {
            self.monic()
        } else {
            self.div_rem(&g).0.monic()
        }
    }

    /// Bound `B` with every real root strictly inside `(-B, B)`.
    pub fn root_bound(&self) -> Rational {
        let lc = match self.leading() {
            Some(lc) => lc.abs(),
            None => return Rational::one(),
        };
        let mut max = Rational::zero();
        for c in &self.coeffs[..self.coeffs.len() - 1] {
            let r = c.abs() / &lc;
            if r > max {
                max = r;
            }
        }
        max + int(1)
    }

    /// Exact composition `self(t + shift)`.
    pub fn shift(&self, shift: &Rational) -> Polynomial {
        let mut out = Polynomial::zero();
        let lin = Polynomial::new(vec![shift.clone(), Rational::one()]);
        for c in self.coeffs.iter().rev() {
            out = &(&out * &lin) + &Polynomial::constant(c.clone());
        }
        out
    }
}

pub fn sign(v: &Rational) -> Ordering {
    if v.is_zero() {
        Ordering::Equal
    } else if v.is_positive() {
        Ordering::Greater
    } else {
        Ordering::Less
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polynomial({})", self)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{}", c)?,
                1 => write!(f, "{}*t", c)?,
                _ => write!(f, "{}*t^{}", c, k)?,
            }
        }
        Ok(())
    }
}

impl<'a> Add<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            let v = match (self.coeffs.get(k), rhs.coeffs.get(k)) {
                (Some(a), Some(b)) => a + b,
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => unreachable!(),
            };
            out.push(v);
        }
        Polynomial::new(out)
    }
}

impl<'a> Sub<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self + &(-rhs)
    }
}

impl<'a> Mul<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
            approx: self.approx.iter().map(|c| -c).collect(),
        }
    }
}

impl Add for Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: Polynomial) -> Polynomial {
        &self + &rhs
    }
}

impl Sub for Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: Polynomial) -> Polynomial {
        &self - &rhs
    }
}

impl Mul for Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: Polynomial) -> Polynomial {
        &self * &rhs
    }
}

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        -&self
    }
}
