//! Scheduler predicates: which job may delay which.
//!
//! A predicate answers `interferes(victim, candidate)`: may the candidate
//! execute while the victim is pending? The built-in schedulers are
//! lexicographic comparisons over job attributes, each step written as
//! `Θ↓(v − c) + δ(v, c)·rest`.

use serde::{Deserialize, Serialize};

use crate::heaviside::{kronecker, lower, upper};
use crate::task::{Job, TaskSet};
use crate::time::{Time, Work};

/// Integer comparison realized with step functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relation {
    Eq,
    Le,
    Ge,
    Lt,
    Gt,
}

/// `1` iff `x r y`.
pub fn heaviside_rel(r: Relation, x: i64, y: i64) -> u8 {
    let (x, y) = (i128::from(x), i128::from(y));
    match r {
        Relation::Eq => upper(x - y) * upper(y - x),
        Relation::Le => upper(y - x),
        Relation::Ge => upper(x - y),
        Relation::Lt => lower(y - x),
        Relation::Gt => lower(x - y),
    }
}

/// Job attribute used in a tie-break chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Criterion {
    Priority,
    RelDeadline,
    AbsDeadline,
    Release,
    TaskOrder,
    Tuple,
    Instance,
}

impl Criterion {
    fn key<T: Time>(self, j: &Job<T>) -> i128 {
        match self {
            Criterion::Priority => j.priority.into(),
            Criterion::RelDeadline => j.rel_deadline.signed(),
            Criterion::AbsDeadline => j.abs_deadline.signed(),
            Criterion::Release => j.release.signed(),
            Criterion::TaskOrder => j.task as i128,
            Criterion::Tuple => j.tuple as i128,
            Criterion::Instance => j.instance.into(),
        }
    }
}

/// Built-in schedulers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchedulerPredicate {
    /// Fixed priorities, smaller number first.
    StaticPriority,
    /// Deadline monotonic: smaller relative deadline first.
    StaticDms,
    /// Earliest absolute deadline, ties to the earlier request.
    EdfFifo,
    /// Earliest absolute deadline where any tied job may go first.
    EdfFree,
    /// Fixed priority between levels, `EdfFifo` inside a level.
    Hierarchical,
}

const STATIC_CHAIN: [Criterion; 5] = [
    Criterion::Priority,
    Criterion::Release,
    Criterion::TaskOrder,
    Criterion::Tuple,
    Criterion::Instance,
];
const DMS_CHAIN: [Criterion; 5] = [
    Criterion::RelDeadline,
    Criterion::Release,
    Criterion::TaskOrder,
    Criterion::Tuple,
    Criterion::Instance,
];
const EDF_CHAIN: [Criterion; 5] = [
    Criterion::AbsDeadline,
    Criterion::Release,
    Criterion::TaskOrder,
    Criterion::Tuple,
    Criterion::Instance,
];
const HIER_CHAIN: [Criterion; 6] = [
    Criterion::Priority,
    Criterion::AbsDeadline,
    Criterion::Release,
    Criterion::TaskOrder,
    Criterion::Tuple,
    Criterion::Instance,
];

impl SchedulerPredicate {
    pub const ALL: [SchedulerPredicate; 5] = [
        SchedulerPredicate::StaticPriority,
        SchedulerPredicate::StaticDms,
        SchedulerPredicate::EdfFifo,
        SchedulerPredicate::EdfFree,
        SchedulerPredicate::Hierarchical,
    ];

    /// Ordered comparison keys; the first differing key decides.
    pub fn criteria(self) -> &'static [Criterion] {
        match self {
            SchedulerPredicate::StaticPriority => &STATIC_CHAIN,
            SchedulerPredicate::StaticDms => &DMS_CHAIN,
            SchedulerPredicate::EdfFifo => &EDF_CHAIN,
            SchedulerPredicate::EdfFree => &EDF_CHAIN[..1],
            SchedulerPredicate::Hierarchical => &HIER_CHAIN,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SchedulerPredicate::StaticPriority => "static",
            SchedulerPredicate::StaticDms => "dms",
            SchedulerPredicate::EdfFifo => "edf",
            SchedulerPredicate::EdfFree => "edf-free",
            SchedulerPredicate::Hierarchical => "hier",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|p| p.name() == name)
    }
}

impl std::fmt::Display for SchedulerPredicate {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Pairwise interference relation between jobs.
pub trait JobOrder<T> {
    /// May `candidate` run while `victim` is pending? Never true for the same job.
    fn interferes(&self, victim: &Job<T>, candidate: &Job<T>) -> bool;

    /// Whether the relation is a strict total order on distinct jobs.
    fn is_strict_order(&self) -> bool {
        true
    }
}

impl<T: Time> JobOrder<T> for SchedulerPredicate {
    fn interferes(&self, victim: &Job<T>, candidate: &Job<T>) -> bool {
        if victim.same_job(candidate) {
            return false;
        }
        if *self == SchedulerPredicate::EdfFree {
            let (v, c) = (
                victim.abs_deadline.signed(),
                candidate.abs_deadline.signed(),
            );
            return upper(v - c) == 1;
        }
        chain(self.criteria(), victim, candidate) == 1
    }

    fn is_strict_order(&self) -> bool {
        *self != SchedulerPredicate::EdfFree
    }
}

/// `Θ↓(v − c) + δ(v, c)·chain(rest)`: the candidate wins at the first key
/// where it is strictly smaller.
fn chain<T: Time>(criteria: &[Criterion], victim: &Job<T>, candidate: &Job<T>) -> u8 {
    let Some((&head, rest)) = criteria.split_first() else {
        return 0;
    };
    let (v, c) = (head.key(victim), head.key(candidate));
    lower(v - c) + kronecker(v, c) * chain(rest, victim, candidate)
}

/// Interference every job may exert: any other job.
#[derive(Debug, Clone, Copy, Default)]
pub struct AllJobs;

impl<T: Time> JobOrder<T> for AllJobs {
    fn interferes(&self, victim: &Job<T>, candidate: &Job<T>) -> bool {
        !victim.same_job(candidate)
    }

    fn is_strict_order(&self) -> bool {
        false
    }
}

/// Execution of jobs released in `[start, start + len)` that interfere with `victim`.
pub fn interference_rbf<T: Time, P: JobOrder<T> + ?Sized>(
    p: &P,
    victim: &Job<T>,
    ts: &TaskSet<T>,
    start: T,
    len: T,
) -> Work {
    let end = start.saturating_add(len);
    ts.jobs_between(start, end)
        .iter()
        .filter(|j| p.interferes(victim, j))
        .map(|j| j.exec.wide())
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::task::Task;

    fn three_tasks() -> TaskSet<u64> {
        TaskSet::new(vec![
            Task::periodic("tau1", 8, 2, 8, 1).unwrap(),
            Task::periodic("tau2", 16, 4, 16, 2).unwrap(),
            Task::periodic("tau3", 24, 12, 24, 3).unwrap(),
        ])
        .unwrap()
    }

    fn job(ts: &TaskSet<u64>, task: usize, release: u64) -> Job<u64> {
        *ts.jobs_in(200)
            .iter()
            .find(|j| j.task == task && j.release == release)
            .unwrap()
    }

    #[test]
    fn relation_examples() {
        assert_eq!(heaviside_rel(Relation::Ge, 5, 5), 1);
        assert_eq!(heaviside_rel(Relation::Gt, 5, 5), 0);
        assert_eq!(heaviside_rel(Relation::Eq, 3, 7), 0);
    }

    #[test]
    fn relations_match_native_comparison() {
        for x in -10..=10 {
            for y in -10..=10 {
                assert_eq!(heaviside_rel(Relation::Eq, x, y) == 1, x == y);
                assert_eq!(heaviside_rel(Relation::Le, x, y) == 1, x <= y);
                assert_eq!(heaviside_rel(Relation::Ge, x, y) == 1, x >= y);
                assert_eq!(heaviside_rel(Relation::Lt, x, y) == 1, x < y);
                assert_eq!(heaviside_rel(Relation::Gt, x, y) == 1, x > y);
            }
        }
    }

    #[test]
    fn interference_examples() {
        let ts = three_tasks();
        let j30 = job(&ts, 2, 0);
        let j12 = job(&ts, 0, 16);
        assert!(!SchedulerPredicate::EdfFifo.interferes(&j30, &j12));
        assert!(SchedulerPredicate::EdfFree.interferes(&j30, &j12));
        let j10 = job(&ts, 0, 0);
        assert!(SchedulerPredicate::StaticDms.interferes(&j30, &j10));
        for p in SchedulerPredicate::ALL {
            assert!(!p.interferes(&j30, &j30));
        }
    }

    #[test]
    fn interference_rbf_examples() {
        let ts = three_tasks();
        let j31 = job(&ts, 2, 24);
        assert_eq!(
            interference_rbf(&SchedulerPredicate::EdfFifo, &j31, &ts, 24, 18),
            4
        );
        for j in ts.jobs_in(48).iter().filter(|j| j.task == 0) {
            assert_eq!(
                interference_rbf(&SchedulerPredicate::StaticDms, j, &ts, j.release, 96),
                0
            );
        }
        assert_eq!(
            interference_rbf(&SchedulerPredicate::EdfFifo, &j31, &ts, 24, 0),
            0
        );
    }

    #[test]
    fn names_round_trip() {
        for p in SchedulerPredicate::ALL {
            assert_eq!(SchedulerPredicate::from_name(p.name()), Some(p));
        }
    }
}
