//! Step functions and interval masks.
//!
//! The upper step function counts the discontinuity (`Θ↑(0) = 1`), the
//! lower one does not (`Θ↓(0) = 0`). A [`HeavisideMask`] multiplies a left
//! and a right step, so each endpoint of the window is independently closed
//! (upper) or open (lower).

use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::ModelError;
use crate::time::Time;

/// Upper step function: `1` for `z >= 0`.
pub fn upper<S: Signed + PartialOrd + Zero>(z: S) -> u8 {
    u8::from(z >= S::zero())
}

/// Lower step function: `1` for `z > 0`.
pub fn lower<S: Signed + PartialOrd + Zero>(z: S) -> u8 {
    u8::from(z > S::zero())
}

/// Kronecker delta.
pub fn kronecker<X: PartialEq>(x: X, y: X) -> u8 {
    u8::from(x == y)
}

/// Inclusion rule for one end of a window.
///
/// `Open < Closed`: an open endpoint never counts more than a closed one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EndpointMode {
    /// Lower step, the endpoint instant is excluded.
    Open,
    /// Upper step, the endpoint instant is included.
    Closed,
}

impl EndpointMode {
    /// `u` for the upper step, `d` for the lower one.
    pub fn from_code(c: char) -> Option<Self> {
        match c {
            'u' => Some(EndpointMode::Closed),
            'd' => Some(EndpointMode::Open),
            _ => None,
        }
    }

    pub fn code(self) -> char {
        match self {
            EndpointMode::Closed => 'u',
            EndpointMode::Open => 'd',
        }
    }
}

/// Integration window `[start, end]` with per-endpoint inclusion.
///
/// `end == None` is an unbounded window; the integral upper limit then alone
/// truncates the count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct HeavisideMask<T> {
    start: T,
    end: Option<T>,
    left: EndpointMode,
    right: EndpointMode,
}

impl<T: Time> HeavisideMask<T> {
    pub fn new(
        start: T,
        end: Option<T>,
        left: EndpointMode,
        right: EndpointMode,
    ) -> Result<Self, ModelError> {
        if let Some(e) = end {
            if e < start {
                return Err(ModelError::InvertedWindow {
                    start: start.as_u64(),
                    end: e.as_u64(),
                });
            }
        }
        Ok(Self {
            start,
            end,
            left,
            right,
        })
    }

    fn make(start: T, end: T, left: EndpointMode, right: EndpointMode) -> Self {
        assert!(start <= end, "mask start {start} after end {end}");
        Self {
            start,
            end: Some(end),
            left,
            right,
        }
    }

    /// `[start, end]`
    pub fn closed_closed(start: T, end: T) -> Self {
        Self::make(start, end, EndpointMode::Closed, EndpointMode::Closed)
    }

    /// `[start, end)`, the canonical analysis window.
    pub fn closed_open(start: T, end: T) -> Self {
        Self::make(start, end, EndpointMode::Closed, EndpointMode::Open)
    }

    /// `(start, end]`
    pub fn open_closed(start: T, end: T) -> Self {
        Self::make(start, end, EndpointMode::Open, EndpointMode::Closed)
    }

    /// `(start, end)`
    pub fn open_open(start: T, end: T) -> Self {
        Self::make(start, end, EndpointMode::Open, EndpointMode::Open)
    }

    /// `[start, ∞)` or `(start, ∞)`.
    pub fn unbounded(start: T, left: EndpointMode) -> Self {
        Self {
            start,
            end: None,
            left,
            right: EndpointMode::Open,
        }
    }

    pub fn start(&self) -> T {
        self.start
    }

    pub fn end(&self) -> Option<T> {
        self.end
    }

    pub fn left(&self) -> EndpointMode {
        self.left
    }

    pub fn right(&self) -> EndpointMode {
        self.right
    }

    /// Evaluates the mask at instant `x` (1 inside, 0 outside).
    pub fn at(&self, x: T) -> u8 {
        let xs = x.signed();
        let l = match self.left {
            EndpointMode::Closed => upper(xs - self.start.signed()),
            EndpointMode::Open => lower(xs - self.start.signed()),
        };
        let r = match (self.end, self.right) {
            (None, _) => 1,
            (Some(e), EndpointMode::Closed) => upper(e.signed() - xs),
            (Some(e), EndpointMode::Open) => lower(e.signed() - xs),
        };
        l * r
    }

    /// The closed integer range counted when the integral runs up to `t`.
    ///
    /// The upper integration limit `t` is always inclusive; once `t` reaches
    /// the mask end the right endpoint mode takes over.
    pub fn counted_range(&self, t: T) -> Option<TickRange<T>> {
        if t < self.start {
            return None;
        }
        let (hi, right) = match self.end {
            Some(e) if t >= e => (e, self.right),
            _ => (t, EndpointMode::Closed),
        };
        TickRange::from_modes(self.start, hi, self.left, right)
    }
}

impl<T: Time> fmt::Display for HeavisideMask<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let l = if self.left == EndpointMode::Closed {
            '['
        } else {
            '('
        };
        match self.end {
            Some(e) => {
                let r = if self.right == EndpointMode::Closed {
                    ']'
                } else {
                    ')'
                };
                write!(f, "{l}{}, {e}{r}", self.start)
            }
            None => write!(f, "{l}{}, inf)", self.start),
        }
    }
}

/// Non-empty closed range of integer instants `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TickRange<T> {
    pub lo: T,
    pub hi: T,
}

impl<T: Time> TickRange<T> {
    /// Converts endpoint modes into a closed integer range; `None` if empty.
    pub fn from_modes(lo: T, hi: T, left: EndpointMode, right: EndpointMode) -> Option<Self> {
        let lo = match left {
            EndpointMode::Closed => lo,
            EndpointMode::Open => lo.checked_add(&T::one())?,
        };
        let hi = match right {
            EndpointMode::Closed => hi,
            EndpointMode::Open => hi.checked_sub(&T::one())?,
        };
        (lo <= hi).then_some(Self { lo, hi })
    }

    /// `[lo, hi)`
    pub fn half_open(lo: T, hi: T) -> Option<Self> {
        Self::from_modes(lo, hi, EndpointMode::Closed, EndpointMode::Open)
    }

    pub fn contains(&self, x: T) -> bool {
        self.lo <= x && x <= self.hi
    }
}
