use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A compact interval `[lo, hi]` with finite endpoints and `lo < hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawInterval")]
pub struct Interval {
    lo: f64,
    hi: f64,
}

#[derive(Deserialize)]
struct RawInterval {
    lo: f64,
    hi: f64,
}

impl TryFrom<RawInterval> for Interval {
    type Error = Error;

    fn try_from(raw: RawInterval) -> Result<Self> {
        Interval::new(raw.lo, raw.hi)
    }
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !lo.is_finite() || !hi.is_finite() {
            return Err(Error::InvalidInterval { lo, hi, reason: "endpoints must be finite" });
        }
        if lo >= hi {
            return Err(Error::InvalidInterval { lo, hi, reason: "need lo < hi" });
        }
        Ok(Interval { lo, hi })
    }

    /// The unit interval `[0, 1]`.
    pub fn unit() -> Self {
        Interval { lo: 0.0, hi: 1.0 }
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    /// Membership up to an absolute slack on both ends.
    pub fn contains_within(&self, x: f64, slack: f64) -> bool {
        self.lo - slack <= x && x <= self.hi + slack
    }

    pub fn clamp(&self, x: f64) -> f64 {
        x.clamp(self.lo, self.hi)
    }

    pub fn contains_interval(&self, other: &Interval, slack: f64) -> bool {
        self.contains_within(other.lo, slack) && self.contains_within(other.hi, slack)
    }

    /// `n` equally spaced points from `lo` to `hi` inclusive.
    pub fn grid(&self, n: usize) -> Result<Vec<f64>> {
        if n < 2 {
            return Err(Error::GridTooSmall(n));
        }
        let last = (n - 1) as f64;
        let mut points: Vec<f64> = (0..n)
            .map(|i| self.lo + self.width() * (i as f64 / last))
            .collect();
        points[n - 1] = self.hi;
        Ok(points)
    }

    /// Affine bijection `[0,1] → self`.
    pub fn lerp(&self, t: f64) -> f64 {
        self.lo + self.width() * t
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// Free-function form of [`Interval::grid`].
pub fn interval_grid(iv: &Interval, n: usize) -> Result<Vec<f64>> {
    iv.grid(n)
}
