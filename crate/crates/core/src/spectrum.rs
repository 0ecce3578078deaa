//! Event densities: symbolic Dirac combs and their composition.
//!
//! An [`EventTuple`] `⟨p, a⟩_k` stands for the impulses `a + n·p` for
//! `n = 0..k`. An [`EventSpectrum`] is a list of tuples whose impulse
//! multisets add up. Infinite trains are never materialized; every query
//! works against a bounded window.

use serde::Serialize;

use crate::error::ModelError;
use crate::heaviside::{EndpointMode, TickRange};
use crate::time::{Count, Time};

/// One impulse train `⟨period, offset⟩_count`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct EventTuple<T> {
    offset: T,
    period: Option<T>,
    count: Count,
}

impl<T: Time> EventTuple<T> {
    /// Builds a tuple.
    ///
    /// A zero period with a finite count above one is accepted here because
    /// its impulse multiset is still finite; [`validate_spectrum`] reports it
    /// and tasks refuse it.
    pub fn new(offset: T, period: Option<T>, count: Count) -> Result<Self, ModelError> {
        if count == Count::Finite(0) {
            return Err(ModelError::EmptyTuple);
        }
        match (period, count) {
            (None, Count::Finite(1)) => {}
            (None, c) => {
                return Err(ModelError::OneShotCount {
                    count: c.to_string(),
                })
            }
            (Some(p), Count::Infinite) if p.is_zero() => {
                return Err(ModelError::InfiniteWithoutPeriod)
            }
            _ => {}
        }
        Ok(Self {
            offset,
            period,
            count,
        })
    }

    /// `⟨p, a⟩_∞`
    pub fn periodic(period: T, offset: T) -> Result<Self, ModelError> {
        Self::new(offset, Some(period), Count::Infinite)
    }

    /// A single impulse at `at`.
    pub fn once(at: T) -> Self {
        Self {
            offset: at,
            period: None,
            count: Count::Finite(1),
        }
    }

    pub fn offset(&self) -> T {
        self.offset
    }

    pub fn period(&self) -> Option<T> {
        self.period
    }

    pub fn count(&self) -> Count {
        self.count
    }

    pub fn is_infinite(&self) -> bool {
        self.count.is_infinite()
    }

    pub fn is_zero_period_burst(&self) -> bool {
        matches!((self.period, self.count), (Some(p), Count::Finite(k)) if p.is_zero() && k > 1)
    }

    /// Period used for stepping; `None` when all impulses coincide.
    fn step(&self) -> Option<u128> {
        self.period.map(T::wide).filter(|&p| p > 0)
    }

    /// Instant of the `n`-th impulse, `None` on overflow.
    pub fn instant(&self, n: u64) -> Option<T> {
        let base = self.offset.wide();
        let at = match self.step() {
            Some(p) => base.checked_add(p.checked_mul(n as u128)?)?,
            None => base,
        };
        T::from_wide(at)
    }

    /// Inclusive index range `[first, last]` of impulses inside `range`.
    pub fn index_range(&self, range: TickRange<T>) -> Option<(u64, u64)> {
        let (lo, hi, a) = (range.lo.wide(), range.hi.wide(), self.offset.wide());
        if a > hi {
            return None;
        }
        let (first, last) = match self.step() {
            None => {
                if a < lo {
                    return None;
                }
                (0, u128::from(self.count.last_index().unwrap_or(0)))
            }
            Some(p) => {
                let first = if a >= lo { 0 } else { (lo - a).div_ceil(p) };
                let last = (hi - a) / p;
                let last = match self.count.last_index() {
                    Some(k) => last.min(k as u128),
                    None => last,
                };
                (first, last)
            }
        };
        (first <= last).then_some((first as u64, last as u64))
    }

    /// Number of impulses inside `range`, computed in closed form.
    pub fn count_in(&self, range: TickRange<T>) -> u64 {
        self.index_range(range)
            .map_or(0, |(first, last)| last - first + 1)
    }

    /// The same train cut off at `horizon`: impulses at or after it are dropped.
    fn truncated(&self, horizon: T) -> Option<Self> {
        let range = TickRange::half_open(T::zero(), horizon)?;
        let (_, last) = self.index_range(range)?;
        match self.count {
            Count::Infinite => Some(Self {
                count: Count::Finite(last + 1),
                ..*self
            }),
            Count::Finite(_) => Some(*self),
        }
    }
}

/// Impulse multiset given as a list of tuples.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct EventSpectrum<T> {
    tuples: Vec<EventTuple<T>>,
}

impl<T: Time> EventSpectrum<T> {
    pub fn new(tuples: Vec<EventTuple<T>>) -> Self {
        Self { tuples }
    }

    /// A strictly periodic comb starting at `offset`.
    pub fn periodic(period: T, offset: T) -> Result<Self, ModelError> {
        Ok(Self::new(vec![EventTuple::periodic(period, offset)?]))
    }

    /// Periodic stream with release jitter: one impulse at 0 followed by a
    /// comb starting at `period - 2·jitter`.
    pub fn jittered(period: T, jitter: T) -> Result<Self, ModelError> {
        let two_j = jitter.checked_add(&jitter).ok_or(ModelError::Overflow)?;
        let offset = period
            .checked_sub(&two_j)
            .ok_or(ModelError::InvertedWindow {
                start: two_j.as_u64(),
                end: period.as_u64(),
            })?;
        Ok(Self::new(vec![
            EventTuple::once(T::zero()),
            EventTuple::periodic(period, offset)?,
        ]))
    }

    pub fn tuples(&self) -> &[EventTuple<T>] {
        &self.tuples
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn has_infinite(&self) -> bool {
        self.tuples.iter().any(EventTuple::is_infinite)
    }

    /// Impulse count inside `range`.
    pub fn count_in(&self, range: TickRange<T>) -> u64 {
        self.tuples.iter().map(|tp| tp.count_in(range)).sum()
    }

    /// Impulse count in `[0, x)`.
    pub fn count_before(&self, x: T) -> u64 {
        TickRange::half_open(T::zero(), x).map_or(0, |r| self.count_in(r))
    }

    /// Sorted multiset of impulse instants inside `[lo, hi]` with the given
    /// endpoint modes.
    pub fn impulses(&self, lo: T, hi: T, left: EndpointMode, right: EndpointMode) -> Vec<T> {
        let Some(range) = TickRange::from_modes(lo, hi, left, right) else {
            return Vec::new();
        };
        let mut out = Vec::new();
        for tp in &self.tuples {
            if let Some((first, last)) = tp.index_range(range) {
                // instants inside `range` are representable by construction
                out.extend((first..=last).map(|n| tp.instant(n).expect("impulse inside window")));
            }
        }
        out.sort_unstable();
        out
    }

    /// Drops every impulse at or after `horizon`, making all tuples finite.
    pub fn truncated(&self, horizon: T) -> Self {
        Self::new(
            self.tuples
                .iter()
                .filter_map(|tp| tp.truncated(horizon))
                .collect(),
        )
    }
}

/// Synchronized (hierarchical) composition of two densities.
///
/// Every impulse of one operand starts a shifted copy of the other: the
/// result holds `a_o + a_i + n·p_o + m·p_i` for all index pairs. The finite
/// side is unrolled into one tuple per impulse, so at least one tuple of
/// each pair must have a finite count.
pub fn compose<T: Time>(
    outer: &EventSpectrum<T>,
    inner: &EventSpectrum<T>,
) -> Result<EventSpectrum<T>, ModelError> {
    let mut out = Vec::new();
    for o in outer.tuples() {
        for i in inner.tuples() {
            let (unrolled, carried) = match (o.count, i.count) {
                (Count::Finite(_), _) => (o, i),
                (Count::Infinite, Count::Finite(_)) => (i, o),
                (Count::Infinite, Count::Infinite) => return Err(ModelError::CompositionUnbounded),
            };
            let Count::Finite(k) = unrolled.count else {
                unreachable!("unrolled side is finite")
            };
            for n in 0..k {
                let shift = unrolled.instant(n).ok_or(ModelError::Overflow)?;
                let offset = shift
                    .checked_add(&carried.offset)
                    .ok_or(ModelError::Overflow)?;
                out.push(EventTuple { offset, ..*carried });
            }
        }
    }
    Ok(EventSpectrum::new(out))
}

/// Composition of the two densities restricted to impulses before `horizon`.
///
/// Both operands are truncated first, so infinite trains on both sides are
/// allowed.
pub fn compose_within<T: Time>(
    outer: &EventSpectrum<T>,
    inner: &EventSpectrum<T>,
    horizon: T,
) -> Result<EventSpectrum<T>, ModelError> {
    let composed = compose(&outer.truncated(horizon), &inner.truncated(horizon))?;
    Ok(composed.truncated(horizon))
}

/// One finding of [`validate_spectrum`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    /// Tuple `tuple` has period 0 and more than one impulse.
    ZeroPeriodBurst { tuple: usize, count: u64 },
    /// `count[0, s+t) > count[0, s) + count[0, t)`; first witness in scan order.
    NotSubadditive {
        s: u64,
        t: u64,
        joint: u64,
        split: u64,
    },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::ZeroPeriodBurst { tuple, count } => {
                write!(f, "tuple {tuple}: zero period with k={count}>1")
            }
            Violation::NotSubadditive { s, t, joint, split } => write!(
                f,
                "not subadditive: count[0,{}) = {joint} > {split} = count[0,{s}) + count[0,{t})",
                s + t
            ),
        }
    }
}

/// Outcome of [`validate_spectrum`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub horizon: u64,
    pub subadditive: bool,
    pub superadditive: bool,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks a density over `[0, horizon]`.
///
/// The cumulative count `N(x) = count[0, x)` is scanned for all `s, t` with
/// `s + t <= horizon`. A density is accepted when `N` is subadditive or
/// superadditive; a stream that is neither gets the first subadditivity
/// witness as a violation. Zero-period bursts are always violations.
pub fn validate_spectrum<T: Time>(s: &EventSpectrum<T>, horizon: T) -> ValidationReport {
    let mut violations: Vec<Violation> = s
        .tuples()
        .iter()
        .enumerate()
        .filter(|(_, tp)| tp.is_zero_period_burst())
        .map(|(i, tp)| Violation::ZeroPeriodBurst {
            tuple: i,
            count: match tp.count() {
                Count::Finite(k) => k,
                Count::Infinite => u64::MAX,
            },
        })
        .collect();

    let h = horizon.as_u64();
    let cumulative: Vec<u64> = (0..=h)
        .map(|x| s.count_before(T::from_u64(x).expect("x <= horizon")))
        .collect();

    let mut sub_witness = None;
    let mut superadditive = true;
    for a in 0..=h {
        for b in a..=h - a {
            let joint = cumulative[(a + b) as usize];
            let split = cumulative[a as usize] + cumulative[b as usize];
            if joint > split && sub_witness.is_none() {
                sub_witness = Some(Violation::NotSubadditive {
                    s: a,
                    t: b,
                    joint,
                    split,
                });
            }
            if joint < split {
                superadditive = false;
            }
        }
    }
    let subadditive = sub_witness.is_none();
    if let (false, false, Some(w)) = (subadditive, superadditive, sub_witness) {
        violations.push(w);
    }
    ValidationReport {
        horizon: h,
        subadditive,
        superadditive,
        violations,
    }
}
