//! Exact dyadic rationals `k / 2^n` in `[0, 1]`.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Deepest level a [`DyadicRational`] may carry.
pub const MAX_EXP: u32 = 63;

/// Deepest level whose values convert to `f64` without rounding.
pub const MAX_EXACT_EXP: u32 = 52;

/// `num / 2^exp` in `[0, 1]`, always in reduced form (`num` odd or `exp == 0`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DyadicRational {
    num: u64,
    exp: u32,
}

impl DyadicRational {
    pub const ZERO: DyadicRational = DyadicRational { num: 0, exp: 0 };
    pub const ONE: DyadicRational = DyadicRational { num: 1, exp: 0 };

    /// Builds and reduces `num / 2^exp`.
    pub fn new(num: u64, exp: u32) -> Result<Self> {
        if exp > MAX_EXP || u128::from(num) > (1u128 << exp) {
            return Err(Error::InvalidDyadic { num, exp });
        }
        Ok(Self::reduced(u128::from(num), exp))
    }

    fn reduced(mut num: u128, mut exp: u32) -> Self {
        if num == 0 {
            return Self::ZERO;
        }
        let shift = num.trailing_zeros().min(exp);
        num >>= shift;
        exp -= shift;
        DyadicRational { num: num as u64, exp }
    }

    pub fn num(&self) -> u64 {
        self.num
    }

    pub fn exp(&self) -> u32 {
        self.exp
    }

    /// Numerator over the common denominator `2^exp` (requires `exp >= self.exp`).
    pub fn scaled_num(&self, exp: u32) -> u128 {
        debug_assert!(exp >= self.exp);
        u128::from(self.num) << (exp - self.exp)
    }

    /// Exact midpoint, or `None` when it would need more than [`MAX_EXP`] levels.
    pub fn checked_midpoint(&self, other: &Self) -> Option<Self> {
        let common = self.exp.max(other.exp);
        let sum = self.scaled_num(common) + other.scaled_num(common);
        let out = Self::reduced(sum, common + 1);
        (out.exp <= MAX_EXP).then_some(out)
    }

    /// Exact `(self + other) / 2`.
    ///
    /// # Panics
    ///
    /// If the result is deeper than [`MAX_EXP`]; only reachable with inputs at
    /// depth 63.
    pub fn midpoint(&self, other: &Self) -> Self {
        self.checked_midpoint(other)
            .expect("dyadic midpoint deeper than MAX_EXP")
    }

    pub fn to_f64(&self) -> Result<f64> {
        if self.exp > MAX_EXACT_EXP {
            return Err(Error::DyadicTooDeep { exp: self.exp });
        }
        Ok(self.num as f64 / (1u64 << self.exp) as f64)
    }

    /// All `k / 2^depth` for `k = 0..=2^depth`, in increasing order.
    pub fn level(depth: u32) -> Result<impl Iterator<Item = DyadicRational>> {
        if depth > MAX_EXACT_EXP {
            return Err(Error::DyadicTooDeep { exp: depth });
        }
        Ok((0..=(1u64 << depth)).map(move |k| Self::reduced(u128::from(k), depth)))
    }
}

/// Free-function form of [`DyadicRational::midpoint`].
pub fn dyadic_midpoint(d1: DyadicRational, d2: DyadicRational) -> DyadicRational {
    d1.midpoint(&d2)
}

/// Free-function form of [`DyadicRational::to_f64`].
pub fn dyadic_to_real(d: DyadicRational) -> Result<f64> {
    d.to_f64()
}

impl Ord for DyadicRational {
    fn cmp(&self, other: &Self) -> Ordering {
        let common = self.exp.max(other.exp);
        self.scaled_num(common).cmp(&other.scaled_num(common))
    }
}

impl PartialOrd for DyadicRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for DyadicRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, 1u128 << self.exp)
    }
}
