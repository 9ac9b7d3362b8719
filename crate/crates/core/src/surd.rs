//! Exact arithmetic in a real quadratic field Q(√s).
//!
//! Modal coefficients of the bus model are always of the form `a + b√s`
//! with rational `a`, `b` and `s ∈ {2, 5}`. Keeping them exact lets
//! patterns be grouped by identical closed forms instead of by float
//! tolerance.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_rational::Ratio;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = Ratio<i64>;

/// `a + b·√radicand`. A value with `b = 0` is rational and compatible with
/// every radicand.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct QuadSurd {
    a: Rational,
    b: Rational,
    radicand: u32,
}

impl QuadSurd {
    pub fn new(a: Rational, b: Rational, radicand: u32) -> Self {
        assert!(radicand >= 2, "radicand must be a non-square >= 2");
        if b.is_zero() {
            Self::rational(a)
        } else {
            Self { a, b, radicand }
        }
    }

    pub fn rational(a: Rational) -> Self {
        Self {
            a,
            b: Rational::zero(),
            radicand: 0,
        }
    }

    pub fn int(a: i64) -> Self {
        Self::rational(Rational::from_integer(a))
    }

    /// `(a + b√s) / d` with integer parts, the layout used by the golden tables.
    pub fn from_parts(a: i64, b: i64, d: i64, radicand: u32) -> Self {
        Self::new(Rational::new(a, d), Rational::new(b, d), radicand)
    }

    pub fn sqrt(radicand: u32) -> Self {
        Self::new(Rational::zero(), Rational::one(), radicand)
    }

    pub fn rational_part(&self) -> Rational {
        self.a
    }

    pub fn surd_part(&self) -> Rational {
        self.b
    }

    pub fn radicand(&self) -> Option<u32> {
        (self.radicand != 0).then_some(self.radicand)
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn to_f64(&self) -> f64 {
        let a = self.a.to_f64().unwrap_or(f64::NAN);
        if self.b.is_zero() {
            return a;
        }
        a + self.b.to_f64().unwrap_or(f64::NAN) * f64::from(self.radicand).sqrt()
    }

    /// Galois conjugate `a − b√s`.
    pub fn conjugate(&self) -> Self {
        Self {
            a: self.a,
            b: -self.b,
            radicand: self.radicand,
        }
    }

    /// Field norm `a² − s·b²`, always rational.
    pub fn norm(&self) -> Rational {
        self.a * self.a - Rational::from_integer(i64::from(self.radicand)) * self.b * self.b
    }

    pub fn recip(&self) -> Self {
        assert!(!self.is_zero(), "reciprocal of zero");
        let n = self.norm();
        let c = self.conjugate();
        Self::new_with(c.a / n, c.b / n, self.radicand)
    }

    fn new_with(a: Rational, b: Rational, radicand: u32) -> Self {
        if b.is_zero() {
            Self::rational(a)
        } else {
            Self { a, b, radicand }
        }
    }

    fn common_radicand(&self, other: &Self) -> u32 {
        match (self.radicand, other.radicand) {
            (0, r) | (r, 0) => r,
            (r, q) if r == q => r,
            (r, q) => panic!("mixing Q(√{r}) and Q(√{q})"),
        }
    }

    /// Exact sign, decided without floating point.
    pub fn signum(&self) -> i32 {
        let sa = sign(self.a);
        let sb = sign(self.b);
        if sb == 0 {
            return sa;
        }
        if sa == 0 || sa == sb {
            return sb;
        }
        // opposite signs: compare a² with s·b²
        let lhs = self.a * self.a;
        let rhs = Rational::from_integer(i64::from(self.radicand)) * self.b * self.b;
        match lhs.cmp(&rhs) {
            Ordering::Greater => sa,
            Ordering::Less => sb,
            Ordering::Equal => 0,
        }
    }
}

fn sign(r: Rational) -> i32 {
    if r.is_positive() {
        1
    } else if r.is_negative() {
        -1
    } else {
        0
    }
}

impl Default for QuadSurd {
    fn default() -> Self {
        Self::int(0)
    }
}

impl PartialOrd for QuadSurd {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for QuadSurd {
    fn cmp(&self, other: &Self) -> Ordering {
        (*self - *other).signum().cmp(&0)
    }
}

impl Add for QuadSurd {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let r = self.common_radicand(&rhs);
        Self::new_with(self.a + rhs.a, self.b + rhs.b, r)
    }
}

impl Sub for QuadSurd {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Neg for QuadSurd {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            a: -self.a,
            b: -self.b,
            radicand: self.radicand,
        }
    }
}

impl Mul for QuadSurd {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let r = self.common_radicand(&rhs);
        let s = Rational::from_integer(i64::from(r));
        Self::new_with(
            self.a * rhs.a + s * self.b * rhs.b,
            self.a * rhs.b + self.b * rhs.a,
            r,
        )
    }
}

impl Div for QuadSurd {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        self * rhs.recip()
    }
}

impl From<i64> for QuadSurd {
    fn from(v: i64) -> Self {
        Self::int(v)
    }
}

impl fmt::Display for QuadSurd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            return write!(f, "{}", self.a);
        }
        let root = format!("√{}", self.radicand);
        let b = if self.b.abs().is_one() {
            root
        } else {
            format!("{}{}", self.b.abs(), root)
        };
        match (self.a.is_zero(), self.b.is_negative()) {
            (true, false) => write!(f, "{b}"),
            (true, true) => write!(f, "-{b}"),
            (false, false) => write!(f, "{}+{b}", self.a),
            (false, true) => write!(f, "{}-{b}", self.a),
        }
    }
}
