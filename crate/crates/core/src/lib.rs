//! Schedulability analysis for event-driven real-time task sets.
//!
//! Release instants are described as sums of impulse trains
//! ([`EventSpectrum`]). A single counting primitive over masked windows
//! ([`bounds::ebf`]) yields request and demand bounds, which drive
//! feasibility tests and per-job response-time analysis for fixed-priority,
//! EDF and hierarchical schedulers. A discrete-event simulator ([`sim`])
//! provides the reference schedule.
//!
//! The model is generic over an unsigned integer [`Time`]; [`Tick`] is the
//! default.
//!
//! ```
//! use herta::{analysis, SchedulerPredicate, Task, TaskSet};
//!
//! let ts = TaskSet::new(vec![
//!     Task::periodic("tau1", 8u64, 2, 8, 1)?,
//!     Task::periodic("tau2", 16, 4, 16, 2)?,
//!     Task::periodic("tau3", 24, 12, 24, 3)?,
//! ])?;
//! let rta = analysis::rta_all(&ts, SchedulerPredicate::StaticDms)?;
//! assert!(!rta.all_met());
//! # Ok::<(), herta::ModelError>(())
//! ```

pub mod analysis;
pub mod bounds;
pub mod error;
pub mod generate;
pub mod heaviside;
pub mod io;
pub mod predicate;
pub mod sim;
pub mod spectrum;
pub mod task;
pub mod time;

pub use analysis::{FeasibilityMode, Response, RtaResult, Verdict};
pub use error::{ModelError, SimError};
pub use heaviside::{EndpointMode, HeavisideMask};
pub use predicate::{JobOrder, SchedulerPredicate};
pub use spectrum::{EventSpectrum, EventTuple};
pub use task::{Job, Task, TaskSet};
pub use time::{Count, Time, Work};

/// Default time scalar.
pub type Tick = u64;

/// Exact ratio used for loads and utilizations.
pub type Rational = num_rational::Ratio<u128>;
