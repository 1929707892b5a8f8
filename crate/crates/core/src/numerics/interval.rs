use serde::Serialize;

use crate::{Error, Result};

/// Interval of the extended real line. Infinite endpoints are always open.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub lo_open: bool,
    pub hi_open: bool,
}

/// Relative margin used for strict interior membership.
const INTERIOR_MARGIN: f64 = 1e-12;

impl Interval {
    pub fn new(lo: f64, hi: f64, lo_open: bool, hi_open: bool) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() || !(lo < hi) {
            return Err(Error::Domain(format!("empty interval ({lo}, {hi})")));
        }
        Ok(Self {
            lo,
            hi,
            lo_open: lo_open || lo.is_infinite(),
            hi_open: hi_open || hi.is_infinite(),
        })
    }

    /// Open interval; panics on `lo >= hi`, for use with literal bounds.
    pub fn open(lo: f64, hi: f64) -> Self {
        Self::new(lo, hi, true, true).expect("literal interval bounds")
    }

    pub fn closed(lo: f64, hi: f64) -> Self {
        Self::new(lo, hi, false, false).expect("literal interval bounds")
    }

    pub fn real_line() -> Self {
        Self::open(f64::NEG_INFINITY, f64::INFINITY)
    }

    pub fn positive() -> Self {
        Self::open(0.0, f64::INFINITY)
    }

    pub fn is_finite(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        let above = if self.lo_open { x > self.lo } else { x >= self.lo };
        let below = if self.hi_open { x < self.hi } else { x <= self.hi };
        above && below
    }

    /// Strict membership at a distance of at least `1e-12·max(1,|x|)` from finite endpoints.
    pub fn contains_interior(&self, x: f64) -> bool {
        if !x.is_finite() {
            return false;
        }
        let margin = INTERIOR_MARGIN * x.abs().max(1.0);
        x - self.lo > margin && self.hi - x > margin
    }

    pub fn distance_to_boundary(&self, x: f64) -> f64 {
        (x - self.lo).min(self.hi - x)
    }

    /// Shift both endpoints by `d`.
    pub fn shifted(&self, d: f64) -> Self {
        Self { lo: self.lo + d, hi: self.hi + d, ..*self }
    }

    pub fn scaled(&self, c: f64) -> Self {
        assert!(c > 0.0);
        Self { lo: self.lo * c, hi: self.hi * c, ..*self }
    }

    pub fn intersect(&self, other: &Interval) -> Option<Self> {
        let (lo, lo_open) = if self.lo > other.lo {
            (self.lo, self.lo_open)
        } else if other.lo > self.lo {
            (other.lo, other.lo_open)
        } else {
            (self.lo, self.lo_open || other.lo_open)
        };
        let (hi, hi_open) = if self.hi < other.hi {
            (self.hi, self.hi_open)
        } else if other.hi < self.hi {
            (other.hi, other.hi_open)
        } else {
            (self.hi, self.hi_open || other.hi_open)
        };
        Self::new(lo, hi, lo_open, hi_open).ok()
    }

    /// Default evaluation grid covering the central part of the interval.
    ///
    /// Finite intervals get uniform points on the central 80%; a half-line
    /// `(a, ∞)` gets offsets `a + 10^u`, `u ∈ [-1, 1]`, spaced logarithmically;
    /// the whole line gets uniform points on `[-5, 5]`.
    pub fn grid(&self, n: usize) -> Vec<f64> {
        let lin = |a: f64, b: f64| -> Vec<f64> {
            if n == 1 {
                return vec![0.5 * (a + b)];
            }
            (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
        };
        let logs = || -> Vec<f64> {
            lin(-1.0, 1.0).into_iter().map(|u| 10f64.powf(u)).collect()
        };
        match (self.lo.is_finite(), self.hi.is_finite()) {
            (true, true) => {
                let w = self.width();
                lin(self.lo + 0.1 * w, self.hi - 0.1 * w)
            }
            (true, false) => logs().into_iter().map(|d| self.lo + d).collect(),
            (false, true) => logs().into_iter().rev().map(|d| self.hi - d).collect(),
            (false, false) => lin(-5.0, 5.0),
        }
    }

    /// A representative interior point.
    pub fn center(&self) -> f64 {
        match (self.lo.is_finite(), self.hi.is_finite()) {
            (true, true) => 0.5 * (self.lo + self.hi),
            (true, false) => self.lo + 1.0,
            (false, true) => self.hi - 1.0,
            (false, false) => 0.0,
        }
    }
}

impl std::fmt::Display for Interval {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let l = if self.lo_open { '(' } else { '[' };
        let r = if self.hi_open { ')' } else { ']' };
        write!(f, "{l}{}, {}{r}", self.lo, self.hi)
    }
}
