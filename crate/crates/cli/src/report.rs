//! Serializable views of the analysis results, keyed by task id.

use std::fmt::Write as _;

use herta::analysis::{EdfComparison, FeasibilityReport, RtaResult, Witness};
use herta::sim::SimTrace;
use herta::spectrum::ValidationReport;
use herta::{Rational, Response, TaskSet, Tick, Work};
use serde::Serialize;

/// A response bound: a number, or the string `"diverged"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum Bound {
    Finite(Tick),
    Diverged(&'static str),
}

impl From<Response<Tick>> for Bound {
    fn from(r: Response<Tick>) -> Self {
        match r {
            Response::Finite(v) => Bound::Finite(v),
            Response::Diverged => Bound::Diverged("diverged"),
        }
    }
}

impl std::fmt::Display for Bound {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Bound::Finite(v) => write!(f, "{v}"),
            Bound::Diverged(s) => f.write_str(s),
        }
    }
}

fn rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

fn id(ts: &TaskSet<Tick>, task: usize) -> String {
    ts.tasks()[task].id().to_owned()
}

#[derive(Debug, Serialize)]
pub struct ValidationDoc {
    pub valid: bool,
    pub horizon: Tick,
    pub tasks: Vec<TaskValidation>,
}

#[derive(Debug, Serialize)]
pub struct TaskValidation {
    pub task: String,
    pub subadditive: bool,
    pub superadditive: bool,
    pub violations: Vec<String>,
}

impl TaskValidation {
    pub fn new(task: &str, r: &ValidationReport) -> Self {
        Self {
            task: task.to_owned(),
            subadditive: r.subadditive,
            superadditive: r.superadditive,
            violations: r.violations.iter().map(ToString::to_string).collect(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct FeasibilityDoc {
    pub mode: &'static str,
    pub verdict: String,
    pub utilization: String,
    pub checkpoint_bound: Tick,
    pub checkpoints: usize,
    pub witness: Option<WitnessDoc>,
}

#[derive(Debug, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum WitnessDoc {
    Overload,
    Demand {
        task: String,
        level: Vec<String>,
        at: Tick,
        demand: Work,
        supply: Work,
    },
}

impl FeasibilityDoc {
    pub fn new(ts: &TaskSet<Tick>, r: &FeasibilityReport<Tick>) -> Self {
        let witness = r.witness.as_ref().map(|w| match w {
            Witness::Overload => WitnessDoc::Overload,
            Witness::Demand {
                task,
                level,
                at,
                demand,
                supply,
            } => WitnessDoc::Demand {
                task: id(ts, *task),
                level: level.iter().map(|&i| id(ts, i)).collect(),
                at: *at,
                demand: *demand,
                supply: *supply,
            },
        });
        Self {
            mode: r.mode.name(),
            verdict: r.verdict.to_string(),
            utilization: rational(&r.utilization),
            checkpoint_bound: r.bound,
            checkpoints: r.checkpoints,
            witness,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct RtaDoc {
    pub scheduler: &'static str,
    pub horizon: Tick,
    /// The bounds over-approximate (non-strict order).
    pub upper_bound: bool,
    pub tasks: Vec<TaskRow>,
    pub jobs: Vec<JobRow>,
}

#[derive(Debug, Serialize)]
pub struct TaskRow {
    pub task: String,
    pub worst: Option<Bound>,
    pub missed: bool,
}

#[derive(Debug, Serialize)]
pub struct JobRow {
    pub task: String,
    pub job: u64,
    pub release: Tick,
    pub rl: Work,
    pub response: Bound,
    pub deadline: Tick,
    pub met: bool,
}

impl RtaDoc {
    pub fn new(ts: &TaskSet<Tick>, r: &RtaResult<Tick>) -> Self {
        Self {
            scheduler: r.predicate.name(),
            horizon: r.horizon,
            upper_bound: r.upper_bound,
            tasks: r
                .tasks
                .iter()
                .map(|t| TaskRow {
                    task: id(ts, t.task),
                    worst: t.worst.map(Bound::from),
                    missed: t.missed,
                })
                .collect(),
            jobs: r
                .jobs
                .iter()
                .map(|j| JobRow {
                    task: id(ts, j.job.task),
                    job: j.job.index,
                    release: j.job.release,
                    rl: j.remaining_load,
                    response: j.response.into(),
                    deadline: j.job.abs_deadline,
                    met: j.met,
                })
                .collect(),
        }
    }

    /// `task,job,release,rl,response,deadline,met`
    pub fn to_csv(&self) -> String {
        let mut out = String::from("task,job,release,rl,response,deadline,met\n");
        for j in &self.jobs {
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                j.task, j.job, j.release, j.rl, j.response, j.deadline, j.met
            )
            .expect("writing to a String");
        }
        out
    }
}

#[derive(Debug, Serialize)]
pub struct TraceDoc {
    pub horizon: Tick,
    pub segments: Vec<SegmentRow>,
    pub completions: Vec<CompletionRow>,
    pub misses: Vec<MissRow>,
    pub idle: Vec<(Tick, Tick)>,
}

#[derive(Debug, Serialize)]
pub struct SegmentRow {
    pub task: String,
    pub job: u64,
    pub start: Tick,
    pub end: Tick,
}

#[derive(Debug, Serialize)]
pub struct CompletionRow {
    pub task: String,
    pub job: u64,
    pub release: Tick,
    pub finish: Tick,
    pub response: Tick,
}

#[derive(Debug, Serialize)]
pub struct MissRow {
    pub task: String,
    pub job: u64,
    pub deadline: Tick,
    pub finish: Option<Tick>,
}

impl TraceDoc {
    pub fn new(ts: &TaskSet<Tick>, t: &SimTrace<Tick>) -> Self {
        Self {
            horizon: t.horizon,
            segments: t
                .segments
                .iter()
                .map(|s| SegmentRow {
                    task: id(ts, s.task),
                    job: s.job,
                    start: s.start,
                    end: s.end,
                })
                .collect(),
            completions: t
                .completions
                .iter()
                .map(|c| CompletionRow {
                    task: id(ts, c.task),
                    job: c.job,
                    release: c.release,
                    finish: c.finish,
                    response: c.response,
                })
                .collect(),
            misses: t
                .misses
                .iter()
                .map(|m| MissRow {
                    task: id(ts, m.task),
                    job: m.job,
                    deadline: m.abs_deadline,
                    finish: m.finish,
                })
                .collect(),
            idle: t.idle.clone(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct CompareDoc {
    /// Every free-choice bound is at least the tie-broken one.
    pub holds: bool,
    pub tasks: Vec<CompareRow>,
}

#[derive(Debug, Serialize)]
pub struct CompareRow {
    pub task: String,
    pub fifo: Option<Bound>,
    pub free: Option<Bound>,
    pub dominated: bool,
}

impl CompareDoc {
    pub fn new(ts: &TaskSet<Tick>, c: &EdfComparison<Tick>) -> Self {
        Self {
            holds: c.holds(),
            tasks: c
                .rows
                .iter()
                .map(|r| CompareRow {
                    task: id(ts, r.task),
                    fifo: r.fifo.map(Bound::from),
                    free: r.free.map(Bound::from),
                    dominated: r.dominated(),
                })
                .collect(),
        }
    }

    /// `task,fifo,free`; tasks without jobs get empty cells.
    pub fn to_csv(&self) -> String {
        let cell = |b: Option<Bound>| b.map(|b| b.to_string()).unwrap_or_default();
        let mut out = String::from("task,fifo,free\n");
        for r in &self.tasks {
            writeln!(out, "{},{},{}", r.task, cell(r.fifo), cell(r.free))
                .expect("writing to a String");
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CurvePoint {
    pub t: Tick,
    pub value: Work,
}
