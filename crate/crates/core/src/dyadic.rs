//! Exact dyadic rationals `num / 2^exp`.
//!
//! Every spectral quantity of a Boolean function on `n` bits is a dyadic
//! rational: coefficients have denominator `2^n`, squared coefficients and
//! influences `4^n`. Keeping them in this form makes the identity checks
//! exact integer comparisons.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::ser::{Serialize, SerializeStruct, Serializer};

use crate::render::round12;

/// `num / 2^exp`, always reduced (odd numerator, or zero with `exp == 0`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Dyadic {
    num: i128,
    exp: u32,
}

impl Dyadic {
    pub const ZERO: Dyadic = Dyadic { num: 0, exp: 0 };
    pub const ONE: Dyadic = Dyadic { num: 1, exp: 0 };

    pub fn new(num: i128, exp: u32) -> Self {
        Dyadic { num, exp }.reduced()
    }

    pub fn from_int(v: i128) -> Self {
        Dyadic { num: v, exp: 0 }
    }

    fn reduced(mut self) -> Self {
        if self.num == 0 {
            self.exp = 0;
            return self;
        }
        let tz = self.num.trailing_zeros().min(self.exp);
        self.num >>= tz;
        self.exp -= tz;
        self
    }

    pub fn numer(&self) -> i128 {
        self.num
    }

    /// log2 of the (reduced) denominator.
    pub fn denom_log2(&self) -> u32 {
        self.exp
    }

    pub fn denom(&self) -> u128 {
        1u128 << self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    /// Numerator when expressed over the denominator `2^exp` (exp must be at
    /// least the reduced exponent).
    pub fn numer_over(&self, exp: u32) -> i128 {
        assert!(exp >= self.exp, "denominator 2^{exp} too small for {self}");
        self.num << (exp - self.exp)
    }

    pub fn to_f64(&self) -> f64 {
        (self.num as f64) * (-(self.exp as f64)).exp2()
    }

    pub fn abs(&self) -> Self {
        Dyadic { num: self.num.abs(), exp: self.exp }
    }

    /// Exact halving (`self / 2^k`).
    pub fn shr(&self, k: u32) -> Self {
        Dyadic { num: self.num, exp: self.exp + k }.reduced()
    }
}

impl Default for Dyadic {
    fn default() -> Self {
        Dyadic::ZERO
    }
}

impl Add for Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: Dyadic) -> Dyadic {
        let exp = self.exp.max(rhs.exp);
        Dyadic::new(self.numer_over(exp) + rhs.numer_over(exp), exp)
    }
}

impl Sub for Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: Dyadic) -> Dyadic {
        self + (-rhs)
    }
}

impl Neg for Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic { num: -self.num, exp: self.exp }
    }
}

impl Mul for Dyadic {
    type Output = Dyadic;
    fn mul(self, rhs: Dyadic) -> Dyadic {
        Dyadic::new(self.num * rhs.num, self.exp + rhs.exp)
    }
}

impl std::iter::Sum for Dyadic {
    fn sum<I: Iterator<Item = Dyadic>>(iter: I) -> Dyadic {
        iter.fold(Dyadic::ZERO, |a, b| a + b)
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let exp = self.exp.max(other.exp);
        self.numer_over(exp).cmp(&other.numer_over(exp))
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.denom())
    }
}

impl Serialize for Dyadic {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Dyadic", 4)?;
        st.serialize_field("exact", &self.to_string())?;
        st.serialize_field("num", &self.num)?;
        st.serialize_field("den", &self.denom())?;
        st.serialize_field("decimal", &round12(self.to_f64()))?;
        st.end()
    }
}
