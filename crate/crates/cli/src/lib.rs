//! Command dispatch for the `herta` binary.
//!
//! [`run_command`] does all the work and returns the text to print plus the
//! exit code, so the binary is a thin wrapper and tests need no subprocess.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use herta::analysis::{self, FeasibilityMode};
use herta::bounds;
use herta::io::{parse_taskset, IoError};
use herta::sim;
use herta::spectrum::validate_spectrum;
use herta::{EndpointMode, HeavisideMask, ModelError, SchedulerPredicate, SimError, TaskSet, Tick};
use thiserror::Error;

mod report;

pub use report::*;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_DIVERGED: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "herta",
    version,
    about = "Schedulability analysis for real-time task sets"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Check release densities and task parameters.
    Validate {
        #[command(flatten)]
        common: Common,
        /// Scan window for the additivity check (default: twice the
        /// analysis horizon).
        #[arg(long)]
        horizon: Option<Tick>,
    },
    /// Demand-based feasibility test.
    Feasibility {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_parser = ["edf", "static", "dms", "hier"])]
        scheduler: String,
    },
    /// Response time of every job in the analysis horizon.
    Rta {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_parser = scheduler_names())]
        scheduler: String,
    },
    /// Simulated schedule.
    Simulate {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_parser = scheduler_names())]
        scheduler: String,
        /// Jobs released before this instant are simulated up to it
        /// (default: analysis horizon).
        #[arg(long)]
        horizon: Option<Tick>,
    },
    /// Worst responses under tie-broken and free-choice EDF.
    Compare {
        #[command(flatten)]
        common: Common,
    },
    /// Breakpoints of a bound as a step function of t.
    Curves {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        function: CurveFunction,
        /// Endpoint modes, left then right: `u` closed, `d` open.
        #[arg(long, default_value = "ud", value_parser = parse_mask)]
        mask: (EndpointMode, EndpointMode),
        /// Restrict to one task (default: the whole set).
        #[arg(long)]
        task: Option<String>,
        /// Mask start and first evaluated instant.
        #[arg(long, default_value_t = 0)]
        from: Tick,
        /// Mask end; t runs over [from, to) (default: analysis horizon).
        #[arg(long)]
        to: Option<Tick>,
        /// Let the mask end follow t, i.e. evaluate over [from, t].
        #[arg(long)]
        sliding: bool,
    },
}

#[derive(Debug, Clone, clap::Args)]
pub struct Common {
    /// Task-set JSON document.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CurveFunction {
    Ebf,
    Rbf,
    Dbf,
}

fn scheduler_names() -> [&'static str; 5] {
    SchedulerPredicate::ALL.map(SchedulerPredicate::name)
}

fn parse_mask(s: &str) -> Result<(EndpointMode, EndpointMode), String> {
    let mut chars = s.chars();
    match (
        chars.next().and_then(EndpointMode::from_code),
        chars.next().and_then(EndpointMode::from_code),
        chars.next(),
    ) {
        (Some(l), Some(r), None) => Ok((l, r)),
        _ => Err(format!("mask must be two of u/d, e.g. `ud`, got `{s}`")),
    }
}

/// Text and exit code produced by one command.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Debug, Error)]
enum Failure {
    #[error("cannot read {path}: {source}")]
    Read {
        path: String,
        source: std::io::Error,
    },
    #[error(transparent)]
    Input(#[from] IoError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("{0}")]
    Usage(String),
}

/// Runs one command to completion.
pub fn run_command(cmd: &Command) -> Outcome {
    match dispatch(cmd) {
        Ok(o) => o,
        Err(e) => Outcome {
            code: EXIT_INPUT,
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}

fn load(common: &Common) -> Result<(TaskSet<Tick>, Vec<String>), Failure> {
    let text = std::fs::read_to_string(&common.input).map_err(|source| Failure::Read {
        path: common.input.display().to_string(),
        source,
    })?;
    let parsed = parse_taskset(&text)?;
    Ok((parsed.taskset, parsed.warnings))
}

fn dispatch(cmd: &Command) -> Result<Outcome, Failure> {
    match cmd {
        Command::Validate { common, horizon } => validate(common, *horizon),
        Command::Feasibility { common, scheduler } => feasibility(common, scheduler),
        Command::Rta { common, scheduler } => rta(common, scheduler),
        Command::Simulate {
            common,
            scheduler,
            horizon,
        } => simulate(common, scheduler, *horizon),
        Command::Compare { common } => compare(common),
        Command::Curves {
            common,
            function,
            mask,
            task,
            from,
            to,
            sliding,
        } => curves(
            common,
            *function,
            *mask,
            task.as_deref(),
            *from,
            *to,
            *sliding,
        ),
    }
}

fn predicate(name: &str) -> Result<SchedulerPredicate, Failure> {
    SchedulerPredicate::from_name(name)
        .ok_or_else(|| Failure::Usage(format!("unknown scheduler `{name}`")))
}

fn json<S: serde::Serialize>(value: &S) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports always serialize");
    s.push('\n');
    s
}

fn with_warnings(code: i32, stdout: String, warnings: &[String]) -> Outcome {
    let stderr = warnings.iter().map(|w| format!("warning: {w}\n")).collect();
    Outcome {
        code,
        stdout,
        stderr,
    }
}

fn validate(common: &Common, horizon: Option<Tick>) -> Result<Outcome, Failure> {
    let (ts, _) = load(common)?;
    let horizon = match horizon {
        Some(h) => h,
        None => ts
            .analysis_horizon()?
            .checked_mul(2)
            .ok_or(ModelError::Overflow)?,
    };
    if horizon == 0 {
        return Err(Failure::Usage(
            "validation horizon must be at least 1".into(),
        ));
    }
    let tasks: Vec<TaskValidation> = ts
        .tasks()
        .iter()
        .map(|t| TaskValidation::new(t.id(), &validate_spectrum(t.spectrum(), horizon)))
        .collect();
    let valid = tasks.iter().all(|t| t.violations.is_empty());
    let report = ValidationDoc {
        valid,
        horizon,
        tasks,
    };
    let code = if valid { EXIT_OK } else { EXIT_FAIL };
    Ok(with_warnings(code, json(&report), &[]))
}

fn feasibility(common: &Common, scheduler: &str) -> Result<Outcome, Failure> {
    let (ts, warnings) = load(common)?;
    let mode = FeasibilityMode::from_name(scheduler)
        .ok_or_else(|| Failure::Usage(format!("unknown feasibility mode `{scheduler}`")))?;
    let r = analysis::feasibility(&ts, mode)?;
    let code = if r.is_feasible() { EXIT_OK } else { EXIT_FAIL };
    Ok(with_warnings(
        code,
        json(&FeasibilityDoc::new(&ts, &r)),
        &warnings,
    ))
}

fn rta(common: &Common, scheduler: &str) -> Result<Outcome, Failure> {
    let (ts, warnings) = load(common)?;
    let r = analysis::rta_all(&ts, predicate(scheduler)?)?;
    let code = if r.any_diverged() {
        EXIT_DIVERGED
    } else if r.all_met() {
        EXIT_OK
    } else {
        EXIT_FAIL
    };
    let doc = RtaDoc::new(&ts, &r);
    let out = match common.format.unwrap_or(Format::Json) {
        Format::Json => json(&doc),
        Format::Csv => doc.to_csv(),
    };
    Ok(with_warnings(code, out, &warnings))
}

fn simulate(common: &Common, scheduler: &str, horizon: Option<Tick>) -> Result<Outcome, Failure> {
    let (ts, warnings) = load(common)?;
    let horizon = match horizon {
        Some(h) => h,
        None => ts.analysis_horizon()?,
    };
    let trace = sim::simulate(&ts, &predicate(scheduler)?, horizon)?;
    let code = if trace.misses.is_empty() {
        EXIT_OK
    } else {
        EXIT_FAIL
    };
    let out = match common.format.unwrap_or(Format::Csv) {
        Format::Csv => trace.to_csv(&ts),
        Format::Json => json(&TraceDoc::new(&ts, &trace)),
    };
    Ok(with_warnings(code, out, &warnings))
}

fn compare(common: &Common) -> Result<Outcome, Failure> {
    let (ts, warnings) = load(common)?;
    let c = analysis::compare_edf_bounds(&ts)?;
    let doc = CompareDoc::new(&ts, &c);
    let diverged = c
        .rows
        .iter()
        .any(|r| [r.fifo, r.free].contains(&Some(herta::Response::Diverged)));
    let code = if diverged {
        EXIT_DIVERGED
    } else if c.holds() {
        EXIT_OK
    } else {
        EXIT_FAIL
    };
    let out = match common.format.unwrap_or(Format::Json) {
        Format::Json => json(&doc),
        Format::Csv => doc.to_csv(),
    };
    Ok(with_warnings(code, out, &warnings))
}

fn curves(
    common: &Common,
    function: CurveFunction,
    (left, right): (EndpointMode, EndpointMode),
    task: Option<&str>,
    from: Tick,
    to: Option<Tick>,
    sliding: bool,
) -> Result<Outcome, Failure> {
    let (ts, warnings) = load(common)?;
    let to = match to {
        Some(t) => t,
        None => ts.analysis_horizon()?,
    };
    if to < from {
        return Err(Failure::Usage(format!("window [{from}, {to}) is inverted")));
    }
    let selected: Vec<usize> = match task {
        Some(id) => vec![ts
            .position(id)
            .ok_or_else(|| Failure::Usage(format!("no task `{id}`")))?],
        None => (0..ts.len()).collect(),
    };
    let value = |t: Tick| -> Result<u128, Failure> {
        let end = if sliding { t } else { to };
        let mask = HeavisideMask::new(from, Some(end), left, right)?;
        let tasks = selected.iter().map(|&i| &ts.tasks()[i]);
        Ok(match function {
            CurveFunction::Ebf => tasks
                .map(|k| u128::from(bounds::ebf(k.spectrum(), t, &mask)))
                .sum(),
            CurveFunction::Rbf => tasks.map(|k| bounds::rbf(k, t, &mask)).sum(),
            CurveFunction::Dbf => tasks.map(|k| bounds::task_dbf(k, t)).sum(),
        })
    };
    let mut points: Vec<CurvePoint> = Vec::new();
    for t in from..to {
        let v = value(t)?;
        if points.last().is_none_or(|p| p.value != v) {
            points.push(CurvePoint { t, value: v });
        }
    }
    let out = match common.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut s = String::from("t,value\n");
            for p in &points {
                writeln!(s, "{},{}", p.t, p.value).expect("writing to a String");
            }
            s
        }
        Format::Json => json(&points),
    };
    Ok(with_warnings(EXIT_OK, out, &warnings))
}
