//! Integer time scalars.
//!
//! Every quantity in the analysis (release instants, execution demand,
//! deadlines, response times) is a whole number of time units. The core is
//! generic over the unsigned integer used to store them; [`crate::Tick`] is
//! the default.

use std::fmt::{Debug, Display};
use std::hash::Hash;
use std::iter::Sum;

use num_traits::{NumCast, PrimInt, Unsigned};

/// Unsigned integer type usable as a time value.
///
/// Implemented for `u16`, `u32` and `u64`. All of them widen losslessly into
/// `i128`/`u128`, which is where intermediate arithmetic happens.
pub trait Time:
    PrimInt
    + Unsigned
    + Hash
    + Debug
    + Display
    + Default
    + Sum
    + Send
    + Sync
    + Into<i128>
    + Into<u128>
    + 'static
{
    /// Converts a `u64`, returning `None` if it does not fit.
    fn from_u64(v: u64) -> Option<Self> {
        <Self as NumCast>::from(v)
    }

    /// Converts a `u128`, returning `None` if it does not fit.
    fn from_wide(v: u128) -> Option<Self> {
        <Self as NumCast>::from(v)
    }

    /// Converts a `u128`, clamping to `Self::max_value()`.
    fn saturate_wide(v: u128) -> Self {
        Self::from_wide(v).unwrap_or_else(Self::max_value)
    }

    fn wide(self) -> u128 {
        self.into()
    }

    fn signed(self) -> i128 {
        self.into()
    }

    fn as_u64(self) -> u64 {
        self.to_u64().expect("time values are at most 64 bits wide")
    }
}

impl Time for u16 {}
impl Time for u32 {}
impl Time for u64 {}

/// Accumulated execution demand. Wider than any [`Time`] so sums never wrap.
pub type Work = u128;

/// Number of impulses in an event tuple.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Count {
    Finite(u64),
    Infinite,
}

impl Count {
    pub fn is_infinite(self) -> bool {
        matches!(self, Count::Infinite)
    }

    /// Largest valid impulse index, `None` for an unbounded train.
    pub fn last_index(self) -> Option<u64> {
        match self {
            Count::Finite(k) => Some(k.saturating_sub(1)),
            Count::Infinite => None,
        }
    }
}

impl Display for Count {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Count::Finite(k) => write!(f, "{k}"),
            Count::Infinite => f.write_str("inf"),
        }
    }
}
