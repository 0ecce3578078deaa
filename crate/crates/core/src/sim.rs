//! Discrete-event preemptive uniprocessor simulator.
//!
//! The scheduler is driven only by a [`JobOrder`]: at each release and each
//! completion the pending job that interferes with every other pending job
//! takes the processor. Between those instants nothing changes, so the
//! event loop never steps tick by tick.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::SimError;
use crate::predicate::JobOrder;
use crate::task::{Job, TaskSet};
use crate::time::Time;

/// Maximal run of one job on the processor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Segment<T> {
    pub task: usize,
    pub job: u64,
    pub start: T,
    pub end: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Completion<T> {
    pub task: usize,
    pub job: u64,
    pub release: T,
    pub finish: T,
    pub response: T,
    pub abs_deadline: T,
}

/// A job that finished late, or is still pending at the horizon past its deadline.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Miss<T> {
    pub task: usize,
    pub job: u64,
    pub abs_deadline: T,
    /// `None` if the job had not finished by the horizon.
    pub finish: Option<T>,
}

/// A job still unfinished at the horizon.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pending<T> {
    pub task: usize,
    pub job: u64,
    pub release: T,
    pub remaining: T,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimTrace<T> {
    pub horizon: T,
    pub segments: Vec<Segment<T>>,
    /// In order of completion.
    pub completions: Vec<Completion<T>>,
    pub misses: Vec<Miss<T>>,
    pub idle: Vec<(T, T)>,
    pub pending: Vec<Pending<T>>,
}

impl<T: Time> SimTrace<T> {
    pub fn busy_time(&self) -> u128 {
        self.segments.iter().map(|s| (s.end - s.start).wide()).sum()
    }

    /// Response of job `job` of task `task`, if it completed.
    pub fn response_of(&self, task: usize, job: u64) -> Option<T> {
        self.completions
            .iter()
            .find(|c| c.task == task && c.job == job)
            .map(|c| c.response)
    }

    /// One row per segment: `task,job,start,end`.
    pub fn to_csv(&self, ts: &TaskSet<T>) -> String {
        let mut out = String::from("task,job,start,end\n");
        for s in &self.segments {
            let id = ts.tasks()[s.task].id();
            writeln!(out, "{id},{},{},{}", s.job, s.start, s.end).expect("writing to a String");
        }
        out
    }
}

/// Simulates every job released in `[0, horizon)` until `horizon`.
pub fn simulate<T: Time, P: JobOrder<T> + ?Sized>(
    ts: &TaskSet<T>,
    p: &P,
    horizon: T,
) -> Result<SimTrace<T>, SimError> {
    if horizon.is_zero() {
        return Err(SimError::ZeroHorizon);
    }
    if !p.is_strict_order() {
        return Err(SimError::NotStrictOrder);
    }
    let jobs = ts.jobs_in(horizon);
    let mut trace = SimTrace {
        horizon,
        segments: Vec::new(),
        completions: Vec::new(),
        misses: Vec::new(),
        idle: Vec::new(),
        pending: Vec::new(),
    };
    // (job position, remaining execution)
    let mut ready: Vec<(usize, T)> = Vec::new();
    let mut next = 0;
    let mut now = T::zero();
    while now < horizon {
        while next < jobs.len() && jobs[next].release == now {
            ready.push((next, jobs[next].exec));
            next += 1;
        }
        let next_release = jobs.get(next).map_or(horizon, |j| j.release);
        if ready.is_empty() {
            push_idle(&mut trace.idle, now, next_release);
            now = next_release;
            continue;
        }
        let slot = select(p, &jobs, &ready, now, ts)?;
        let (pos, left) = ready[slot];
        let job = &jobs[pos];
        let until = next_release.min(now.saturating_add(left));
        push_segment(&mut trace.segments, job, now, until);
        let left = left - (until - now);
        now = until;
        if left.is_zero() {
            ready.swap_remove(slot);
            trace.completions.push(Completion {
                task: job.task,
                job: job.index,
                release: job.release,
                finish: now,
                response: now - job.release,
                abs_deadline: job.abs_deadline,
            });
            if now > job.abs_deadline {
                trace.misses.push(Miss {
                    task: job.task,
                    job: job.index,
                    abs_deadline: job.abs_deadline,
                    finish: Some(now),
                });
            }
        } else {
            ready[slot].1 = left;
        }
    }
    ready.sort_by_key(|&(pos, _)| pos);
    for (pos, remaining) in ready {
        let job = &jobs[pos];
        trace.pending.push(Pending {
            task: job.task,
            job: job.index,
            release: job.release,
            remaining,
        });
        if job.abs_deadline <= horizon {
            trace.misses.push(Miss {
                task: job.task,
                job: job.index,
                abs_deadline: job.abs_deadline,
                finish: None,
            });
        }
    }
    Ok(trace)
}

/// Index into `ready` of the job every other ready job yields to.
fn select<T: Time, P: JobOrder<T> + ?Sized>(
    p: &P,
    jobs: &[Job<T>],
    ready: &[(usize, T)],
    now: T,
    ts: &TaskSet<T>,
) -> Result<usize, SimError> {
    let mut best = 0;
    for i in 1..ready.len() {
        if p.interferes(&jobs[ready[best].0], &jobs[ready[i].0]) {
            best = i;
        }
    }
    let winner = &jobs[ready[best].0];
    for (i, &(pos, _)) in ready.iter().enumerate() {
        let other = &jobs[pos];
        if i != best && (!p.interferes(other, winner) || p.interferes(winner, other)) {
            return Err(SimError::PredicateNotTotal {
                at: now.as_u64(),
                first: ts.job_label(winner),
                second: ts.job_label(other),
            });
        }
    }
    Ok(best)
}

fn push_segment<T: Time>(segments: &mut Vec<Segment<T>>, job: &Job<T>, start: T, end: T) {
    if let Some(last) = segments.last_mut() {
        if last.task == job.task && last.job == job.index && last.end == start {
            last.end = end;
            return;
        }
    }
    segments.push(Segment {
        task: job.task,
        job: job.index,
        start,
        end,
    });
}

fn push_idle<T: Time>(idle: &mut Vec<(T, T)>, start: T, end: T) {
    if start < end {
        idle.push((start, end));
    }
}

/// Measured responses of a finished trace.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Measured<T> {
    /// Keyed by `(task position, job index)`.
    pub jobs: BTreeMap<(usize, u64), T>,
    /// Largest response per task position.
    pub worst: BTreeMap<usize, T>,
}

/// Responses of all jobs in `trace`; fails if any job is still pending.
pub fn measured_responses<T: Time>(
    trace: &SimTrace<T>,
    ts: &TaskSet<T>,
) -> Result<Measured<T>, SimError> {
    if !trace.pending.is_empty() {
        let labels = trace
            .pending
            .iter()
            .map(|p| format!("{}#{}", ts.tasks()[p.task].id(), p.job))
            .collect();
        return Err(SimError::IncompleteJobs(labels));
    }
    let mut m = Measured::default();
    for c in &trace.completions {
        m.jobs.insert((c.task, c.job), c.response);
        let w = m.worst.entry(c.task).or_insert(c.response);
        *w = (*w).max(c.response);
    }
    Ok(m)
}
