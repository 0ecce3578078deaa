//! JSON task-set documents.
//!
//! ```json
//! {
//!   "version": "1",
//!   "priority_polarity": "smaller_is_higher",
//!   "tasks": [
//!     {"id": "tau1", "tuples": [{"offset": 0, "period": 8, "count": "inf"}],
//!      "wcet": [2], "deadline": [8], "priority": 1}
//!   ]
//! }
//! ```
//!
//! `bcet` is optional and defaults to `wcet`. A `larger_is_higher` polarity
//! is normalized on load by negating every priority.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::ModelError;
use crate::spectrum::{validate_spectrum, EventSpectrum, EventTuple};
use crate::task::{Task, TaskSet};
use crate::time::{Count, Time};

/// Longest window scanned for the additivity warnings attached on load.
pub const WARNING_SCAN_LIMIT: u64 = 1024;

pub const DOCUMENT_VERSION: &str = "1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Polarity {
    #[default]
    SmallerIsHigher,
    LargerIsHigher,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskSetDocument {
    pub version: String,
    #[serde(default)]
    pub priority_polarity: Polarity,
    pub tasks: Vec<TaskDocument>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskDocument {
    pub id: String,
    pub tuples: Vec<TupleDocument>,
    pub wcet: Vec<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bcet: Option<Vec<u64>>,
    pub deadline: Vec<u64>,
    pub priority: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TupleDocument {
    pub offset: u64,
    pub period: Option<u64>,
    #[serde(with = "count_repr")]
    pub count: Count,
}

mod count_repr {
    use serde::de::Error;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use crate::time::Count;

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Finite(u64),
        Word(String),
    }

    pub fn serialize<S: Serializer>(c: &Count, s: S) -> Result<S::Ok, S::Error> {
        match c {
            Count::Finite(k) => Repr::Finite(*k),
            Count::Infinite => Repr::Word("inf".into()),
        }
        .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Count, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Finite(k) => Ok(Count::Finite(k)),
            Repr::Word(w) if w == "inf" => Ok(Count::Infinite),
            Repr::Word(w) => Err(D::Error::custom(format!(
                "count must be a positive integer or \"inf\", got \"{w}\""
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IoError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{field}: {message}")]
    Semantic { field: String, message: String },
}

impl IoError {
    fn semantic(field: impl Into<String>, e: impl ToString) -> Self {
        IoError::Semantic {
            field: field.into(),
            message: e.to_string(),
        }
    }
}

/// A loaded task set with non-fatal findings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Parsed<T> {
    pub taskset: TaskSet<T>,
    pub warnings: Vec<String>,
}

/// Parses and validates a task-set document.
pub fn parse_taskset<T: Time>(text: &str) -> Result<Parsed<T>, IoError> {
    let doc: TaskSetDocument = serde_json::from_str(text).map_err(|e| IoError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    from_document(&doc)
}

/// Converts a document into a validated task set.
pub fn from_document<T: Time>(doc: &TaskSetDocument) -> Result<Parsed<T>, IoError> {
    if doc.version != DOCUMENT_VERSION {
        return Err(IoError::semantic(
            "version",
            format!("unsupported version \"{}\"", doc.version),
        ));
    }
    let mut tasks = Vec::with_capacity(doc.tasks.len());
    for (i, td) in doc.tasks.iter().enumerate() {
        let field = |name: &str| format!("tasks[{i}].{name}");
        let tick = |name: String, v: u64| {
            T::from_u64(v).ok_or_else(|| IoError::semantic(name, ModelError::Overflow))
        };
        let mut tuples = Vec::with_capacity(td.tuples.len());
        for (k, tp) in td.tuples.iter().enumerate() {
            let at = field(&format!("tuples[{k}]"));
            let offset = tick(at.clone(), tp.offset)?;
            let period = tp.period.map(|p| tick(at.clone(), p)).transpose()?;
            tuples.push(
                EventTuple::new(offset, period, tp.count).map_err(|e| IoError::semantic(at, e))?,
            );
        }
        let ticks = |name: &str, v: &[u64]| -> Result<Vec<T>, IoError> {
            v.iter().map(|&x| tick(field(name), x)).collect()
        };
        let wcet = ticks("wcet", &td.wcet)?;
        let bcet = td.bcet.as_deref().map(|b| ticks("bcet", b)).transpose()?;
        let deadlines = ticks("deadline", &td.deadline)?;
        let priority = match doc.priority_polarity {
            Polarity::SmallerIsHigher => Some(td.priority),
            Polarity::LargerIsHigher => td.priority.checked_neg(),
        }
        .ok_or_else(|| IoError::semantic(field("priority"), "priority out of range"))?;
        let task = Task::new(
            td.id.clone(),
            EventSpectrum::new(tuples),
            wcet,
            bcet,
            deadlines,
            priority,
        )
        .map_err(|e| IoError::semantic(format!("tasks[{i}]"), e))?;
        tasks.push(task);
    }
    let taskset = TaskSet::new(tasks).map_err(|e| IoError::semantic("tasks", e))?;
    let warnings = warnings(&taskset);
    Ok(Parsed { taskset, warnings })
}

fn warnings<T: Time>(ts: &TaskSet<T>) -> Vec<String> {
    let horizon = match ts.analysis_horizon() {
        Ok(h) => h.as_u64().min(WARNING_SCAN_LIMIT),
        Err(e) => return vec![format!("analysis horizon: {e}")],
    };
    let horizon = T::from_u64(horizon).expect("below an existing tick value");
    let mut out = Vec::new();
    for task in ts.tasks() {
        let report = validate_spectrum(task.spectrum(), horizon);
        out.extend(
            report
                .violations
                .iter()
                .map(|v| format!("task `{}`: {v}", task.id())),
        );
        if report.superadditive && !report.subadditive {
            out.push(format!(
                "task `{}`: superadditive release density",
                task.id()
            ));
        }
    }
    out
}

/// Document for `ts` with the internal smaller-is-higher polarity.
pub fn to_document<T: Time>(ts: &TaskSet<T>) -> TaskSetDocument {
    let ticks = |v: &[T]| v.iter().map(|x| x.as_u64()).collect::<Vec<_>>();
    TaskSetDocument {
        version: DOCUMENT_VERSION.to_string(),
        priority_polarity: Polarity::SmallerIsHigher,
        tasks: ts
            .tasks()
            .iter()
            .map(|t| TaskDocument {
                id: t.id().to_string(),
                tuples: t
                    .spectrum()
                    .tuples()
                    .iter()
                    .map(|tp| TupleDocument {
                        offset: tp.offset().as_u64(),
                        period: tp.period().map(Time::as_u64),
                        count: tp.count(),
                    })
                    .collect(),
                wcet: ticks(t.wcet()),
                bcet: (t.bcet() != t.wcet()).then(|| ticks(t.bcet())),
                deadline: ticks(t.deadlines()),
                priority: t.priority(),
            })
            .collect(),
    }
}

/// Pretty-printed JSON document for `ts`.
pub fn serialize_taskset<T: Time>(ts: &TaskSet<T>) -> String {
    serde_json::to_string_pretty(&to_document(ts)).expect("documents always serialize")
}
