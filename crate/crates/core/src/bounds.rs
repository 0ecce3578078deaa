//! Event, request and demand bounds.
//!
//! All three are built on one counting primitive: the impulses of a
//! density that fall inside a [`HeavisideMask`] when the integral runs up
//! to `t`. Counts are evaluated in closed form per tuple.

use crate::heaviside::{HeavisideMask, TickRange};
use crate::spectrum::{EventSpectrum, EventTuple};
use crate::task::{Task, TaskSet};
use crate::time::{Time, Work};

/// Unified event bound: number of impulses of `s` counted by `mask` up to `t`.
pub fn ebf<T: Time>(s: &EventSpectrum<T>, t: T, mask: &HeavisideMask<T>) -> u64 {
    mask.counted_range(t).map_or(0, |r| s.count_in(r))
}

/// Traditional counts of a periodic stream: `(ceil(t/p), floor(t/p), floor(t/p + 1))`.
///
/// # Panics
/// If `p` is zero.
pub fn classic_counts(p: u64, t: u64) -> (u64, u64, u64) {
    assert!(p >= 1, "period must be at least 1");
    (t.div_ceil(p), t / p, t / p + 1)
}

/// Request bound: execution demand of the impulses `ebf` would count.
pub fn rbf<T: Time>(task: &Task<T>, t: T, mask: &HeavisideMask<T>) -> Work {
    mask.counted_range(t).map_or(0, |r| request_in(task, r))
}

/// Execution demand released by `task` inside `range`.
pub(crate) fn request_in<T: Time>(task: &Task<T>, range: TickRange<T>) -> Work {
    task.spectrum()
        .tuples()
        .iter()
        .filter_map(|tp| tp.index_range(range))
        .map(|(first, last)| cyclic_sum(task.wcet(), first, last))
        .sum()
}

/// `Σ v[n mod |v|]` for `n` in `first..=last`.
fn cyclic_sum<T: Time>(v: &[T], first: u64, last: u64) -> Work {
    let len = v.len() as u128;
    let cycle: Work = v.iter().map(|x| x.wide()).sum();
    let prefix = |n: u128| -> Work {
        let head: Work = v[..(n % len) as usize].iter().map(|x| x.wide()).sum();
        (n / len) * cycle + head
    };
    prefix(last as u128 + 1) - prefix(first as u128)
}

/// Demand bound of a set: execution of every job with absolute deadline `<= t`.
pub fn dbf<T: Time>(ts: &TaskSet<T>, t: T) -> Work {
    ts.tasks().iter().map(|task| task_dbf(task, t)).sum()
}

/// Demand bound of a single task.
pub fn task_dbf<T: Time>(task: &Task<T>, t: T) -> Work {
    let d_min = task.min_deadline();
    let Some(latest) = t.checked_sub(&d_min) else {
        return 0;
    };
    let range = TickRange {
        lo: T::zero(),
        hi: latest,
    };
    if task.has_scalar_deadline() {
        return request_in(task, range);
    }
    task.spectrum()
        .tuples()
        .iter()
        .map(|tp| enumerated_demand(task, tp, range, t))
        .sum()
}

fn enumerated_demand<T: Time>(
    task: &Task<T>,
    tp: &EventTuple<T>,
    range: TickRange<T>,
    t: T,
) -> Work {
    let Some((first, last)) = tp.index_range(range) else {
        return 0;
    };
    (first..=last)
        .filter(|&n| {
            let release = tp.instant(n).expect("release inside window").wide();
            release + task.deadline(n).wide() <= t.wide()
        })
        .map(|n| task.exec(n).wide())
        .sum()
}
