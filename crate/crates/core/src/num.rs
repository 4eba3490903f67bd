//! Scalar abstractions shared by the model, sampler, statistics and oracles.
//!
//! Everything that does floating point arithmetic is generic over [`Real`],
//! implemented for `f32` and `f64`. Exact combinatorial counts live behind
//! [`Count`](crate::count::Count) instead.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Floating point scalar used throughout the crate.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
    /// Lossy conversion from `f64`; used for literals and RNG output.
    #[inline]
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 is representable")
    }

    #[inline]
    fn of_usize(n: usize) -> Self {
        Self::from_usize(n).expect("usize is representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("finite real converts to f64")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Pairwise (cascade) summation, error growth O(log n) instead of O(n).
pub fn pairwise_sum<T: Real>(xs: &[T]) -> T {
    const LEAF: usize = 16;
    if xs.len() <= LEAF {
        return xs.iter().copied().fold(T::zero(), |a, b| a + b);
    }
    let (lo, hi) = xs.split_at(xs.len() / 2);
    pairwise_sum(lo) + pairwise_sum(hi)
}

/// `ln Σ exp(x_i)` with max-shift and pairwise accumulation.
///
/// Returns `-inf` for an empty slice or one containing only `-inf`.
pub fn log_sum_exp<T: Real>(xs: &[T]) -> T {
    let max = xs.iter().copied().fold(T::neg_infinity(), T::max);
    if max == T::neg_infinity() {
        return max;
    }
    if max == T::infinity() {
        return max;
    }
    let shifted: Vec<T> = xs.iter().map(|&x| (x - max).exp()).collect();
    max + pairwise_sum(&shifted).ln()
}

/// `ln(e^a + e^b)`.
#[inline]
pub fn log_add_exp<T: Real>(a: T, b: T) -> T {
    if a == T::neg_infinity() {
        return b;
    }
    if b == T::neg_infinity() {
        return a;
    }
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// Riemann zeta function for real `s > 1`.
///
/// Direct summation of the first terms followed by an Euler–Maclaurin tail;
/// relative accuracy is close to machine precision for `s >= 1.5`.
pub fn zeta(s: f64) -> f64 {
    assert!(s > 1.0, "zeta(s) requires s > 1, got {s}");
    const TERMS: u32 = 64;
    let head: f64 = (1..TERMS).map(|k| f64::from(k).powf(-s)).rev().sum();
    let a = f64::from(TERMS);
    // Euler–Maclaurin tail starting at `a`, Bernoulli terms B2..B10.
    let mut tail = a.powf(1.0 - s) / (s - 1.0) + 0.5 * a.powf(-s);
    let bernoulli = [1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0, 5.0 / 66.0];
    let mut rising = s; // s (s+1) ... (s+2k-2)
    let mut factorial = 2.0; // (2k)!
    let mut power = a.powf(-s - 1.0);
    for (k, b) in bernoulli.iter().enumerate() {
        tail += b / factorial * rising * power;
        let k2 = 2.0 * (k as f64 + 1.0);
        rising *= (s + k2 - 1.0) * (s + k2);
        factorial *= (k2 + 1.0) * (k2 + 2.0);
        power /= a * a;
    }
    head + tail
}
