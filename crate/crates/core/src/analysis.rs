//! Load, feasibility and response-time analysis.

use std::fmt;

use num_traits::{One, Zero};

use crate::error::ModelError;
use crate::predicate::{AllJobs, JobOrder, SchedulerPredicate};
use crate::task::{Job, TaskSet};
use crate::time::{Time, Work};
use crate::Rational;

/// Largest `A[s, t) − (t − s)` over the candidate start instants `s`, at least 0.
///
/// `arrivals` holds `(release, exec)` pairs sorted by release, all before `t`.
/// The scan starts at the latest arrival and walks backwards, so every
/// release instant and the earliest one are evaluated.
fn backlog_at<T: Time>(arrivals: &[(T, T)], t: T) -> Work {
    let mut best: i128 = 0;
    let mut sum: i128 = 0;
    for (i, &(s, c)) in arrivals.iter().enumerate().rev() {
        sum += c.signed();
        let group_start = i == 0 || arrivals[i - 1].0 != s;
        if group_start {
            best = best.max(sum - (t.signed() - s.signed()));
        }
    }
    best as Work
}

/// Work eligible to delay `victim` that is still unprocessed at `t`.
///
/// Maximizes `A[s, t) − (t − s)` over `s ∈ {0} ∪` interfering release instants,
/// with arrivals counted on `[s, t)`.
pub fn remaining_load<T: Time, P: JobOrder<T> + ?Sized>(
    p: &P,
    victim: &Job<T>,
    t: T,
    ts: &TaskSet<T>,
) -> Work {
    let arrivals: Vec<(T, T)> = ts
        .jobs_in(t)
        .iter()
        .filter(|j| p.interferes(victim, j))
        .map(|j| (j.release, j.exec))
        .collect();
    backlog_at(&arrivals, t)
}

/// Mean requested load over `[a, b)`: backlog at `a` plus everything released
/// in the window, divided by its length.
///
/// # Panics
/// If `a >= b`.
pub fn average_load<T: Time>(ts: &TaskSet<T>, a: T, b: T) -> Rational {
    assert!(a < b, "empty averaging window [{a}, {b})");
    let before: Vec<(T, T)> = ts.jobs_in(a).iter().map(|j| (j.release, j.exec)).collect();
    let carried = backlog_at(&before, a);
    let requested: Work = ts.jobs_between(a, b).iter().map(|j| j.exec.wide()).sum();
    Rational::new(carried + requested, (b - a).wide())
}

/// Long-run utilization: `Σ mean(wcet) / p` over all infinite tuples.
pub fn utilization<T: Time>(ts: &TaskSet<T>) -> Rational {
    let mut u = Rational::zero();
    for task in ts.tasks() {
        let cycle: Work = task.wcet().iter().map(|c| c.wide()).sum();
        let len = task.wcet().len() as u128;
        for tp in task
            .spectrum()
            .tuples()
            .iter()
            .filter(|tp| tp.is_infinite())
        {
            let p = tp.period().expect("infinite tuples are periodic").wide();
            u += Rational::new(cycle, len * p);
        }
    }
    u
}

/// Scheduling policy assumed by [`feasibility`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FeasibilityMode {
    Edf,
    FixedPriority,
    Dms,
    Hierarchical,
}

impl FeasibilityMode {
    pub const ALL: [FeasibilityMode; 4] = [
        FeasibilityMode::Edf,
        FeasibilityMode::FixedPriority,
        FeasibilityMode::Dms,
        FeasibilityMode::Hierarchical,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FeasibilityMode::Edf => "edf",
            FeasibilityMode::FixedPriority => "static",
            FeasibilityMode::Dms => "dms",
            FeasibilityMode::Hierarchical => "hier",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|m| m.name() == name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Feasible,
    Infeasible,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Feasible => "FEASIBLE",
            Verdict::Infeasible => "INFEASIBLE",
        })
    }
}

/// Why a set was declared infeasible.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness<T> {
    /// Long-run utilization above 1; no checkpoint was scanned.
    Overload,
    /// The jobs of `level` due by `at` need more than the time left to them.
    Demand {
        /// Task owning a job due at `at`.
        task: usize,
        level: Vec<usize>,
        at: T,
        demand: Work,
        supply: Work,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeasibilityReport<T> {
    pub mode: FeasibilityMode,
    pub verdict: Verdict,
    pub witness: Option<Witness<T>>,
    pub utilization: Rational,
    /// Largest checkpoint considered.
    pub bound: T,
    pub checkpoints: usize,
}

impl<T> FeasibilityReport<T> {
    pub fn is_feasible(&self) -> bool {
        self.verdict == Verdict::Feasible
    }
}

/// Tasks sharing one scheduling level and the tasks that may preempt them.
struct Level {
    members: Vec<usize>,
    higher: Vec<usize>,
}

fn levels<T: Time>(ts: &TaskSet<T>, mode: FeasibilityMode) -> Vec<Level> {
    let tasks = ts.tasks();
    let n = tasks.len();
    let mut order: Vec<usize> = (0..n).collect();
    match mode {
        FeasibilityMode::Edf => {
            return vec![Level {
                members: order,
                higher: Vec::new(),
            }]
        }
        FeasibilityMode::FixedPriority | FeasibilityMode::Hierarchical => {
            order.sort_by_key(|&i| tasks[i].priority())
        }
        FeasibilityMode::Dms => order.sort_by_key(|&i| tasks[i].min_deadline()),
    }
    if mode == FeasibilityMode::Hierarchical {
        let mut out: Vec<Level> = Vec::new();
        for &i in &order {
            let prio = tasks[i].priority();
            match out.last_mut() {
                Some(l) if tasks[l.members[0]].priority() == prio => l.members.push(i),
                _ => out.push(Level {
                    members: vec![i],
                    higher: (0..n).filter(|&j| tasks[j].priority() < prio).collect(),
                }),
            }
        }
        return out;
    }
    order
        .into_iter()
        .map(|i| {
            let higher = (0..n)
                .filter(|&j| j != i)
                .filter(|&j| match mode {
                    FeasibilityMode::Dms => tasks[j].min_deadline() <= tasks[i].max_deadline(),
                    _ => tasks[j].priority() <= tasks[i].priority(),
                })
                .collect();
            Level {
                members: vec![i],
                higher,
            }
        })
        .collect()
}

/// Demand test per scheduling level.
///
/// For every absolute deadline `D` of a level job up to the analysis
/// horizon plus the largest relative deadline, the level's demand due by
/// `D` must fit into the time the preempting tasks leave free in `[0, D]`:
/// `max_s (s − hp[0, s))` over their release instants `s ≤ D` and `s = D`.
/// With no preempting tasks this is the processor demand criterion.
/// Equal fixed priorities are counted as preempting each other, so the
/// static modes are sufficient tests.
pub fn feasibility<T: Time>(
    ts: &TaskSet<T>,
    mode: FeasibilityMode,
) -> Result<FeasibilityReport<T>, ModelError> {
    let utilization = utilization(ts);
    let bound = ts
        .analysis_horizon()?
        .checked_add(&ts.max_deadline())
        .ok_or(ModelError::Overflow)?;
    let mut report = FeasibilityReport {
        mode,
        verdict: Verdict::Feasible,
        witness: None,
        utilization,
        bound,
        checkpoints: 0,
    };
    if ts.is_empty() {
        return Ok(report);
    }
    if report.utilization > Rational::one() {
        report.verdict = Verdict::Infeasible;
        report.witness = Some(Witness::Overload);
        return Ok(report);
    }
    let jobs = ts.jobs_in(bound.saturating_add(T::one()));
    for level in levels(ts, mode) {
        let mut due: Vec<&Job<T>> = jobs
            .iter()
            .filter(|j| level.members.contains(&j.task) && j.abs_deadline <= bound)
            .collect();
        due.sort_by_key(|j| (j.abs_deadline, j.release, j.task));
        let hp: Vec<&Job<T>> = jobs
            .iter()
            .filter(|j| level.higher.contains(&j.task))
            .collect();

        let mut demand: Work = 0;
        let mut hp_next = 0;
        let mut hp_before: Work = 0;
        let mut free: i128 = 0;
        for (i, job) in due.iter().enumerate() {
            demand += job.exec.wide();
            let at = job.abs_deadline;
            if due.get(i + 1).is_some_and(|n| n.abs_deadline == at) {
                continue;
            }
            while hp_next < hp.len() && hp[hp_next].release < at {
                let s = hp[hp_next].release;
                free = free.max(s.signed() - hp_before as i128);
                while hp_next < hp.len() && hp[hp_next].release == s {
                    hp_before += hp[hp_next].exec.wide();
                    hp_next += 1;
                }
            }
            let supply = free.max(at.signed() - hp_before as i128).max(0) as Work;
            report.checkpoints += 1;
            if demand > supply {
                report.verdict = Verdict::Infeasible;
                report.witness = Some(Witness::Demand {
                    task: job.task,
                    level: level.members.clone(),
                    at,
                    demand,
                    supply,
                });
                return Ok(report);
            }
        }
    }
    Ok(report)
}

/// Response time of one job, or divergence of its busy window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Response<T> {
    Finite(T),
    Diverged,
}

impl<T: Copy> Response<T> {
    pub fn value(self) -> Option<T> {
        match self {
            Response::Finite(r) => Some(r),
            Response::Diverged => None,
        }
    }
}

impl<T: fmt::Display> fmt::Display for Response<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Response::Finite(r) => write!(f, "{r}"),
            Response::Diverged => f.write_str("diverged"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JobResponse<T> {
    pub job: Job<T>,
    pub remaining_load: Work,
    pub response: Response<T>,
    /// Finite response within the relative deadline.
    pub met: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaskResponse<T> {
    pub task: usize,
    /// Largest response over the task's jobs; `Diverged` if any job diverged.
    /// `None` when no job of the task was analyzed.
    pub worst: Option<Response<T>>,
    pub missed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RtaResult<T> {
    pub predicate: SchedulerPredicate,
    /// Jobs released in `[0, horizon)` were analyzed.
    pub horizon: T,
    /// Responses are upper bounds rather than exact values.
    pub upper_bound: bool,
    pub jobs: Vec<JobResponse<T>>,
    pub tasks: Vec<TaskResponse<T>>,
}

impl<T: Time> RtaResult<T> {
    pub fn worst(&self, task: usize) -> Option<Response<T>> {
        self.tasks[task].worst
    }

    pub fn all_met(&self) -> bool {
        self.jobs.iter().all(|j| j.met)
    }

    pub fn any_diverged(&self) -> bool {
        self.jobs.iter().any(|j| j.response == Response::Diverged)
    }
}

/// Busy-window solver over a precomputed, release-ordered job list.
struct Engine<'a, T, P: ?Sized> {
    p: &'a P,
    jobs: Vec<Job<T>>,
    /// For each job, index of the first job of the busy period it falls in.
    busy_start: Vec<usize>,
    limit: Work,
}

impl<'a, T: Time, P: JobOrder<T> + ?Sized> Engine<'a, T, P> {
    fn new(ts: &TaskSet<T>, p: &'a P, release_end: T, limit: T) -> Self {
        let jobs = ts.jobs_in(release_end);
        let mut busy_start = vec![0; jobs.len()];
        let mut backlog: Work = 0;
        let mut last = T::zero();
        let mut start = 0;
        let mut g = 0;
        while g < jobs.len() {
            let r = jobs[g].release;
            backlog = backlog.saturating_sub((r - last).wide());
            if backlog == 0 {
                start = g;
            }
            let mut e = g;
            while e < jobs.len() && jobs[e].release == r {
                backlog += jobs[e].exec.wide();
                busy_start[e] = start;
                e += 1;
            }
            last = r;
            g = e;
        }
        Self {
            p,
            jobs,
            busy_start,
            limit: limit.wide(),
        }
    }

    fn first_at_or_after(&self, t: T) -> usize {
        self.jobs.partition_point(|j| j.release < t)
    }

    /// Backlog of interfering work at the victim's release.
    ///
    /// Start instants before the current busy period never win: the
    /// backlog of any subset of jobs is zero wherever the total one is.
    fn remaining_load(&self, v: usize) -> Work {
        let victim = &self.jobs[v];
        let end = self.first_at_or_after(victim.release);
        let from = self.busy_start[v];
        let arrivals: Vec<(T, T)> = self.jobs[from..end]
            .iter()
            .filter(|j| self.p.interferes(victim, j))
            .map(|j| (j.release, j.exec))
            .collect();
        backlog_at(&arrivals, victim.release)
    }

    /// Least fixed point of `w = rl + c + I[r, r + w)`.
    fn solve(&self, v: usize) -> (Work, Response<T>) {
        let victim = &self.jobs[v];
        let rl = self.remaining_load(v);
        let base = rl + victim.exec.wide();
        let release = victim.release.wide();
        let mut next = self.first_at_or_after(victim.release);
        let mut interference: Work = 0;
        let mut w = base;
        loop {
            if w > self.limit {
                return (rl, Response::Diverged);
            }
            while next < self.jobs.len() && self.jobs[next].release.wide() < release + w {
                if self.p.interferes(victim, &self.jobs[next]) {
                    interference += self.jobs[next].exec.wide();
                }
                next += 1;
            }
            let grown = base + interference;
            if grown == w {
                let r = T::from_wide(w).expect("response below the divergence limit");
                return (rl, Response::Finite(r));
            }
            w = grown;
        }
    }
}

/// Divergence limit on a busy window: analysis horizon plus largest deadline.
fn divergence_limit<T: Time>(ts: &TaskSet<T>) -> Result<(T, T), ModelError> {
    let horizon = ts.analysis_horizon()?;
    let limit = horizon
        .checked_add(&ts.max_deadline())
        .ok_or(ModelError::Overflow)?;
    Ok((horizon, limit))
}

/// Response time of `victim` under `p`, with its remaining load.
pub fn response_time<T: Time, P: JobOrder<T> + ?Sized>(
    p: &P,
    victim: &Job<T>,
    ts: &TaskSet<T>,
) -> Result<(Work, Response<T>), ModelError> {
    let (_, limit) = divergence_limit(ts)?;
    let end = victim
        .release
        .checked_add(&limit)
        .and_then(|e| e.checked_add(&T::one()))
        .ok_or(ModelError::Overflow)?;
    let engine = Engine::new(ts, p, end, limit);
    let v = engine
        .jobs
        .iter()
        .position(|j| j.same_job(victim))
        .expect("victim is a job of the task set");
    Ok(engine.solve(v))
}

/// Response time of every job released in `[0, H)`, `H` the analysis horizon.
pub fn rta_all<T: Time>(
    ts: &TaskSet<T>,
    p: SchedulerPredicate,
) -> Result<RtaResult<T>, ModelError> {
    rta_with(ts, &p, p)
}

/// [`rta_all`] for an arbitrary interference relation; `label` names it in the result.
pub fn rta_with<T: Time, P: JobOrder<T> + ?Sized>(
    ts: &TaskSet<T>,
    p: &P,
    label: SchedulerPredicate,
) -> Result<RtaResult<T>, ModelError> {
    let (horizon, limit) = divergence_limit(ts)?;
    let end = horizon
        .checked_add(&limit)
        .and_then(|e| e.checked_add(&T::one()))
        .ok_or(ModelError::Overflow)?;
    let engine = Engine::new(ts, p, end, limit);
    let mut tasks: Vec<TaskResponse<T>> = (0..ts.len())
        .map(|task| TaskResponse {
            task,
            worst: None,
            missed: false,
        })
        .collect();
    let mut jobs = Vec::new();
    for v in 0..engine.jobs.len() {
        let job = engine.jobs[v];
        if job.release >= horizon {
            break;
        }
        let (remaining_load, response) = engine.solve(v);
        let met = matches!(response, Response::Finite(r) if r <= job.rel_deadline);
        let entry = &mut tasks[job.task];
        entry.worst = Some(entry.worst.map_or(response, |w| w.max(response)));
        entry.missed |= !met;
        jobs.push(JobResponse {
            job,
            remaining_load,
            response,
            met,
        });
    }
    Ok(RtaResult {
        predicate: label,
        horizon,
        upper_bound: !p.is_strict_order(),
        jobs,
        tasks,
    })
}

/// Per-task worst response under tie-broken and free-choice EDF.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdfComparison<T> {
    pub rows: Vec<EdfRow<T>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdfRow<T> {
    pub task: usize,
    pub fifo: Option<Response<T>>,
    pub free: Option<Response<T>>,
}

impl<T: Time> EdfRow<T> {
    /// Tie-broken response does not exceed the free-choice bound.
    pub fn dominated(&self) -> bool {
        self.fifo <= self.free
    }
}

impl<T: Time> EdfComparison<T> {
    pub fn holds(&self) -> bool {
        self.rows.iter().all(EdfRow::dominated)
    }
}

/// Runs [`rta_all`] under `EdfFifo` and `EdfFree` side by side.
pub fn compare_edf_bounds<T: Time>(ts: &TaskSet<T>) -> Result<EdfComparison<T>, ModelError> {
    let fifo = rta_all(ts, SchedulerPredicate::EdfFifo)?;
    let free = rta_all(ts, SchedulerPredicate::EdfFree)?;
    let rows = (0..ts.len())
        .map(|task| EdfRow {
            task,
            fifo: fifo.worst(task),
            free: free.worst(task),
        })
        .collect();
    Ok(EdfComparison { rows })
}

/// Backlog of all work at `t`, the carried term of [`average_load`].
pub fn total_backlog<T: Time>(ts: &TaskSet<T>, t: T) -> Work {
    let probe = Job {
        task: usize::MAX,
        tuple: 0,
        instance: 0,
        index: 0,
        release: t,
        exec: T::zero(),
        rel_deadline: T::zero(),
        abs_deadline: t,
        priority: 0,
    };
    remaining_load(&AllJobs, &probe, t, ts)
}
