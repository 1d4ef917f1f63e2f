//! Exact half-integers, the value type of every index.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

/// A number in `½ℤ`, stored as twice its value.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct HalfInt {
    pub doubled: i64,
}

impl HalfInt {
    pub const ZERO: HalfInt = HalfInt { doubled: 0 };
    pub const HALF: HalfInt = HalfInt { doubled: 1 };
    pub const ONE: HalfInt = HalfInt { doubled: 2 };

    pub const fn from_doubled(doubled: i64) -> Self {
        HalfInt { doubled }
    }

    pub const fn from_int(k: i64) -> Self {
        HalfInt { doubled: 2 * k }
    }

    /// `k / 2`.
    pub const fn halves(k: i64) -> Self {
        HalfInt { doubled: k }
    }

    pub const fn is_integer(self) -> bool {
        self.doubled % 2 == 0
    }

    /// The integer value, if there is one.
    pub const fn to_int(self) -> Option<i64> {
        if self.is_integer() {
            Some(self.doubled / 2)
        } else {
            None
        }
    }

    pub fn to_f64(self) -> f64 {
        self.doubled as f64 / 2.0
    }

    /// Rounds `2x` to the nearest integer. Used once a signature sum is known
    /// to be half-integral by construction.
    pub fn round_from_f64(x: f64) -> Self {
        HalfInt { doubled: (2.0 * x).round() as i64 }
    }

    /// Parity of an integer value; `None` for proper half-integers.
    pub fn parity(self) -> Option<i64> {
        self.to_int().map(|k| k.rem_euclid(2))
    }
}

impl From<i64> for HalfInt {
    fn from(k: i64) -> Self {
        HalfInt::from_int(k)
    }
}

impl From<i32> for HalfInt {
    fn from(k: i32) -> Self {
        HalfInt::from_int(k as i64)
    }
}

impl Add for HalfInt {
    type Output = HalfInt;
    fn add(self, rhs: HalfInt) -> HalfInt {
        HalfInt { doubled: self.doubled + rhs.doubled }
    }
}

impl Sub for HalfInt {
    type Output = HalfInt;
    fn sub(self, rhs: HalfInt) -> HalfInt {
        HalfInt { doubled: self.doubled - rhs.doubled }
    }
}

impl Neg for HalfInt {
    type Output = HalfInt;
    fn neg(self) -> HalfInt {
        HalfInt { doubled: -self.doubled }
    }
}

impl Mul<i64> for HalfInt {
    type Output = HalfInt;
    fn mul(self, k: i64) -> HalfInt {
        HalfInt { doubled: self.doubled * k }
    }
}

impl AddAssign for HalfInt {
    fn add_assign(&mut self, rhs: HalfInt) {
        self.doubled += rhs.doubled;
    }
}

impl SubAssign for HalfInt {
    fn sub_assign(&mut self, rhs: HalfInt) {
        self.doubled -= rhs.doubled;
    }
}

impl Sum for HalfInt {
    fn sum<I: Iterator<Item = HalfInt>>(iter: I) -> HalfInt {
        iter.fold(HalfInt::ZERO, |a, b| a + b)
    }
}

impl<'a> Sum<&'a HalfInt> for HalfInt {
    fn sum<I: Iterator<Item = &'a HalfInt>>(iter: I) -> HalfInt {
        iter.fold(HalfInt::ZERO, |a, b| a + *b)
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.to_int() {
            Some(k) => write!(f, "{k}"),
            None => write!(f, "{}/2", self.doubled),
        }
    }
}
