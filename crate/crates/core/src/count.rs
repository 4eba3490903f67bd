//! Number types for state counting.
//!
//! Microcanonical tables are computed over a [`Count`]: [`BigUint`] keeps them
//! exact, `f64` is available for quick cross-checks at small sizes.

use std::fmt::Debug;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

pub trait Count: Clone + Debug + PartialEq + Send + Sync {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add_assign_ref(&mut self, other: &Self);
    fn mul_u64(&self, k: u64) -> Self;
    fn mul_ref(&self, other: &Self) -> Self;
    /// Division by a small integer. Integer implementations require the
    /// division to be exact.
    fn div_u64(&self, d: u64) -> Self;
    /// `num / den` rounded to the nearest `f64`.
    fn ratio_f64(num: &Self, den: &Self) -> f64;
    /// Natural logarithm (`-inf` for zero).
    fn ln(&self) -> f64;
}

impl Count for BigUint {
    fn zero() -> Self {
        Zero::zero()
    }

    fn one() -> Self {
        One::one()
    }

    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }

    fn add_assign_ref(&mut self, other: &Self) {
        *self += other;
    }

    fn mul_u64(&self, k: u64) -> Self {
        self * k
    }

    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }

    fn div_u64(&self, d: u64) -> Self {
        let (q, r) = num_integer::Integer::div_rem(self, &BigUint::from(d));
        debug_assert!(Zero::is_zero(&r), "inexact integer division by {d}");
        q
    }

    fn ratio_f64(num: &Self, den: &Self) -> f64 {
        big_ratio(num, den).to_f64().unwrap_or(f64::NAN)
    }

    fn ln(&self) -> f64 {
        ln_big(self)
    }
}

impl Count for f64 {
    fn zero() -> Self {
        0.0
    }

    fn one() -> Self {
        1.0
    }

    fn is_zero(&self) -> bool {
        *self == 0.0
    }

    fn add_assign_ref(&mut self, other: &Self) {
        *self += *other;
    }

    fn mul_u64(&self, k: u64) -> Self {
        self * k as f64
    }

    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }

    fn div_u64(&self, d: u64) -> Self {
        self / d as f64
    }

    fn ratio_f64(num: &Self, den: &Self) -> f64 {
        num / den
    }

    fn ln(&self) -> f64 {
        f64::ln(*self)
    }
}

/// Exact `num / den` as a rational.
pub fn big_ratio(num: &BigUint, den: &BigUint) -> BigRational {
    BigRational::new(BigInt::from(num.clone()), BigInt::from(den.clone()))
}

/// `ln n` for arbitrarily large `n` without overflowing through `f64`.
pub fn ln_big(n: &BigUint) -> f64 {
    if Zero::is_zero(n) {
        return f64::NEG_INFINITY;
    }
    let bits = n.bits();
    if bits <= 1000 {
        return n.to_f64().expect("fits in f64").ln();
    }
    let shift = bits - 64;
    let top = (n >> shift).to_f64().expect("64-bit value");
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// Multiset coefficient `C(d + n - 1, d - 1)`: the number of ways to place
/// `n` identical bosons into `d` distinct modes.
pub fn multiset<C: Count>(d: u64, n: u64) -> C {
    if d == 0 {
        return if n == 0 { C::one() } else { C::zero() };
    }
    let mut acc = C::one();
    for j in 1..=n {
        acc = acc.mul_u64(d + j - 1).div_u64(j);
    }
    acc
}
