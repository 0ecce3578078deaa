//! Tasks, task sets and the concrete jobs they release.

use num_integer::Integer;

use crate::error::ModelError;
use crate::heaviside::TickRange;
use crate::spectrum::{EventSpectrum, EventTuple};
use crate::time::{Count, Time};

/// A recurring activity: a release density plus per-job parameters.
///
/// Execution times and deadlines are vectors cycled by the impulse index
/// within its tuple (`wcet[n mod |wcet|]`). Smaller `priority` numbers are
/// more urgent.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Task<T> {
    id: String,
    spectrum: EventSpectrum<T>,
    wcet: Vec<T>,
    bcet: Vec<T>,
    deadlines: Vec<T>,
    priority: i64,
}

impl<T: Time> Task<T> {
    /// Builds a task; `bcet` defaults to `wcet`.
    pub fn new(
        id: impl Into<String>,
        spectrum: EventSpectrum<T>,
        wcet: Vec<T>,
        bcet: Option<Vec<T>>,
        deadlines: Vec<T>,
        priority: i64,
    ) -> Result<Self, ModelError> {
        let id = id.into();
        let invalid = |reason: &str| ModelError::InvalidTask {
            task: id.clone(),
            reason: reason.to_string(),
        };
        if spectrum.is_empty() {
            return Err(invalid("spectrum has no tuples"));
        }
        if let Some(tp) = spectrum
            .tuples()
            .iter()
            .find(|tp| tp.is_zero_period_burst())
        {
            let Count::Finite(count) = tp.count() else {
                unreachable!("bursts are finite")
            };
            return Err(ModelError::ZeroPeriodBurst { count });
        }
        if wcet.is_empty() {
            return Err(invalid("wcet vector is empty"));
        }
        if wcet.iter().any(|c| c.is_zero()) {
            return Err(invalid("every wcet entry must be at least 1"));
        }
        let bcet = bcet.unwrap_or_else(|| wcet.clone());
        if bcet.len() != wcet.len() {
            return Err(invalid("bcet and wcet vectors differ in length"));
        }
        if bcet.iter().zip(&wcet).any(|(b, w)| b > w) {
            return Err(invalid("bcet entry exceeds its wcet"));
        }
        if deadlines.is_empty() {
            return Err(invalid("deadline vector is empty"));
        }
        if deadlines.iter().any(|d| d.is_zero()) {
            return Err(invalid("every deadline entry must be at least 1"));
        }
        Ok(Self {
            id,
            spectrum,
            wcet,
            bcet,
            deadlines,
            priority,
        })
    }

    /// Strictly periodic task released at 0 with scalar parameters.
    pub fn periodic(
        id: impl Into<String>,
        period: T,
        wcet: T,
        deadline: T,
        priority: i64,
    ) -> Result<Self, ModelError> {
        let spectrum = EventSpectrum::periodic(period, T::zero())?;
        Self::new(id, spectrum, vec![wcet], None, vec![deadline], priority)
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn spectrum(&self) -> &EventSpectrum<T> {
        &self.spectrum
    }

    pub fn wcet(&self) -> &[T] {
        &self.wcet
    }

    pub fn bcet(&self) -> &[T] {
        &self.bcet
    }

    pub fn deadlines(&self) -> &[T] {
        &self.deadlines
    }

    pub fn priority(&self) -> i64 {
        self.priority
    }

    /// Same task with another priority.
    pub fn with_priority(&self, priority: i64) -> Self {
        Self {
            priority,
            ..self.clone()
        }
    }

    pub fn exec(&self, n: u64) -> T {
        self.wcet[(n % self.wcet.len() as u64) as usize]
    }

    pub fn deadline(&self, n: u64) -> T {
        self.deadlines[(n % self.deadlines.len() as u64) as usize]
    }

    pub fn min_deadline(&self) -> T {
        *self.deadlines.iter().min().expect("non-empty")
    }

    pub fn max_deadline(&self) -> T {
        *self.deadlines.iter().max().expect("non-empty")
    }

    pub fn has_scalar_deadline(&self) -> bool {
        self.deadlines.iter().all(|&d| d == self.deadlines[0])
    }
}

/// One released instance of a task.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Job<T> {
    /// Position of the task in its set.
    pub task: usize,
    /// Tuple of the spectrum that released the job.
    pub tuple: usize,
    /// Impulse index within the tuple; selects `wcet` and `deadline`.
    pub instance: u64,
    /// Sequence number among all jobs of the task, ordered by release.
    pub index: u64,
    pub release: T,
    pub exec: T,
    pub rel_deadline: T,
    /// `release + rel_deadline`, saturating at the largest tick.
    pub abs_deadline: T,
    pub priority: i64,
}

impl<T: Time> Job<T> {
    pub fn same_job(&self, other: &Self) -> bool {
        self.task == other.task && self.tuple == other.tuple && self.instance == other.instance
    }
}

/// Ordered collection of tasks with unique ids.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct TaskSet<T> {
    tasks: Vec<Task<T>>,
}

impl<T: Time> TaskSet<T> {
    pub fn new(tasks: Vec<Task<T>>) -> Result<Self, ModelError> {
        for (i, t) in tasks.iter().enumerate() {
            if tasks[..i].iter().any(|u| u.id == t.id) {
                return Err(ModelError::DuplicateTask(t.id.clone()));
            }
        }
        Ok(Self { tasks })
    }

    pub fn tasks(&self) -> &[Task<T>] {
        &self.tasks
    }

    pub fn len(&self) -> usize {
        self.tasks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tasks.is_empty()
    }

    pub fn position(&self, id: &str) -> Option<usize> {
        self.tasks.iter().position(|t| t.id == id)
    }

    /// Same set with every priority replaced by `f(position, task)`.
    pub fn map_priorities(&self, f: impl Fn(usize, &Task<T>) -> i64) -> Self {
        Self {
            tasks: self
                .tasks
                .iter()
                .enumerate()
                .map(|(i, t)| t.with_priority(f(i, t)))
                .collect(),
        }
    }

    /// Human-readable job label such as `tau3#1`.
    pub fn job_label(&self, job: &Job<T>) -> String {
        format!("{}#{}", self.tasks[job.task].id, job.index)
    }

    pub fn max_deadline(&self) -> T {
        self.tasks
            .iter()
            .map(Task::max_deadline)
            .max()
            .unwrap_or_else(T::zero)
    }

    /// Least common multiple of all infinite-tuple periods (1 if there are none).
    pub fn hyper_period(&self) -> Result<T, ModelError> {
        let mut h: u128 = 1;
        for tp in self.infinite_tuples() {
            let p = tp.period().expect("infinite tuples are periodic").wide();
            h = h.lcm(&p);
            if h > T::max_value().wide() {
                return Err(ModelError::Overflow);
            }
        }
        T::from_wide(h).ok_or(ModelError::Overflow)
    }

    /// Latest absolute deadline of any job released by a finite tuple.
    pub fn finite_horizon(&self) -> Result<T, ModelError> {
        let mut latest = T::zero();
        for task in &self.tasks {
            for tp in task.spectrum.tuples().iter().filter(|tp| !tp.is_infinite()) {
                let last = tp.count().last_index().expect("finite tuple");
                let release = tp.instant(last).ok_or(ModelError::Overflow)?;
                let end = release
                    .checked_add(&task.max_deadline())
                    .ok_or(ModelError::Overflow)?;
                latest = latest.max(end);
            }
        }
        Ok(latest)
    }

    /// Window that contains every job instance under test:
    /// `max(hyper_period, finite_horizon)`.
    pub fn analysis_horizon(&self) -> Result<T, ModelError> {
        Ok(self.hyper_period()?.max(self.finite_horizon()?))
    }

    fn infinite_tuples(&self) -> impl Iterator<Item = &EventTuple<T>> {
        self.tasks
            .iter()
            .flat_map(|t| t.spectrum.tuples())
            .filter(|tp| tp.is_infinite())
    }

    /// All jobs released in `[0, horizon)`, ordered by release then task position.
    pub fn jobs_in(&self, horizon: T) -> Vec<Job<T>> {
        self.jobs_between(T::zero(), horizon)
    }

    /// All jobs released in `[lo, hi)`, ordered by release then task position.
    pub fn jobs_between(&self, lo: T, hi: T) -> Vec<Job<T>> {
        let Some(range) = TickRange::half_open(lo, hi) else {
            return Vec::new();
        };
        let mut jobs = Vec::new();
        for (pos, task) in self.tasks.iter().enumerate() {
            let first = jobs.len();
            for (ti, tp) in task.spectrum.tuples().iter().enumerate() {
                let Some((n0, n1)) = tp.index_range(range) else {
                    continue;
                };
                for n in n0..=n1 {
                    let release = tp.instant(n).expect("release inside window");
                    let rel_deadline = task.deadline(n);
                    jobs.push(Job {
                        task: pos,
                        tuple: ti,
                        instance: n,
                        index: 0,
                        release,
                        exec: task.exec(n),
                        rel_deadline,
                        abs_deadline: release.saturating_add(rel_deadline),
                        priority: task.priority,
                    });
                }
            }
            let own = &mut jobs[first..];
            own.sort_by_key(|j| (j.release, j.tuple, j.instance));
            let base = task.spectrum.count_before(lo);
            for (i, j) in own.iter_mut().enumerate() {
                j.index = base + i as u64;
            }
        }
        jobs.sort_by_key(|j| (j.release, j.task, j.tuple, j.instance));
        jobs
    }
}
