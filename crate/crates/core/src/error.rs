use thiserror::Error;

/// Errors raised while building or transforming the task model.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("event tuple count must be at least 1")]
    EmptyTuple,
    #[error("a tuple without period must have count 1, got {count}")]
    OneShotCount { count: String },
    #[error("an infinite impulse train needs a period of at least 1")]
    InfiniteWithoutPeriod,
    #[error("zero period with count {count} is an unbounded-density burst")]
    ZeroPeriodBurst { count: u64 },
    #[error("window start {start} lies after its end {end}")]
    InvertedWindow { start: u64, end: u64 },
    #[error("composing two infinite impulse trains has unbounded density")]
    CompositionUnbounded,
    #[error("instant exceeds the representable tick range")]
    Overflow,
    #[error("task `{task}`: {reason}")]
    InvalidTask { task: String, reason: String },
    #[error("duplicate task id `{0}`")]
    DuplicateTask(String),
}

/// Errors raised by the discrete-event simulator.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimError {
    #[error("simulation horizon must be at least 1")]
    ZeroHorizon,
    #[error("the predicate is not a strict order and cannot drive a scheduler")]
    NotStrictOrder,
    #[error("no unique highest-priority job at t={at}: {first} vs {second}")]
    PredicateNotTotal {
        at: u64,
        first: String,
        second: String,
    },
    #[error("{} job(s) still pending at the horizon: {}", .0.len(), .0.join(", "))]
    IncompleteJobs(Vec<String>),
}
