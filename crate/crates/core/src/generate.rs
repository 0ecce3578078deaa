//! Random task sets for property tests and benchmarks.

use num_integer::Integer;
use num_traits::One;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::analysis::utilization;
use crate::task::{Task, TaskSet};
use crate::Rational;

/// Environment variable overriding the default seed.
pub const SEED_VAR: &str = "HERTA_SEED";

const DEFAULT_SEED: u64 = 0x4845_5254_4121;

/// Seed from `HERTA_SEED`, or a fixed default when unset or unparsable.
pub fn seed_from_env() -> u64 {
    std::env::var(SEED_VAR)
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_SEED)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Shape of generated task sets.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorConfig {
    pub max_tasks: usize,
    pub min_period: u64,
    pub max_period: u64,
    pub max_hyper_period: u64,
    /// Target utilization is drawn uniformly from this range before rounding.
    pub utilization: (f64, f64),
    pub max_priority: i64,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        Self {
            max_tasks: 5,
            min_period: 2,
            max_period: 50,
            max_hyper_period: 10_000,
            utilization: (0.2, 1.0),
            max_priority: 3,
        }
    }
}

/// Splits `total` into `n` utilizations that are uniform on the simplex.
pub fn uunifast<R: Rng + ?Sized>(rng: &mut R, n: usize, total: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n);
    let mut sum = total;
    for i in 1..n {
        let next = sum * rng.gen::<f64>().powf(1.0 / (n - i) as f64);
        out.push(sum - next);
        sum = next;
    }
    out.push(sum);
    out
}

/// Synchronous periodic task set with `U <= 1` and `d <= p`.
///
/// Sets whose hyper-period exceeds the configured bound, or whose integer
/// execution times push the utilization above 1, are redrawn.
pub fn random_taskset<R: Rng + ?Sized>(rng: &mut R, cfg: &GeneratorConfig) -> TaskSet<u64> {
    loop {
        if let Some(ts) = attempt(rng, cfg) {
            return ts;
        }
    }
}

fn attempt<R: Rng + ?Sized>(rng: &mut R, cfg: &GeneratorConfig) -> Option<TaskSet<u64>> {
    let n = rng.gen_range(1..=cfg.max_tasks);
    let periods: Vec<u64> = (0..n)
        .map(|_| rng.gen_range(cfg.min_period..=cfg.max_period))
        .collect();
    let hyper = periods.iter().fold(1u64, |h, &p| h.lcm(&p));
    if hyper > cfg.max_hyper_period {
        return None;
    }
    let target = rng.gen_range(cfg.utilization.0..=cfg.utilization.1);
    let shares = uunifast(rng, n, target);
    let mut tasks = Vec::with_capacity(n);
    for (i, (&p, u)) in periods.iter().zip(shares).enumerate() {
        let c = ((u * p as f64).floor() as u64).clamp(1, p);
        let d = if rng.gen_bool(0.5) {
            p
        } else {
            rng.gen_range(c..=p)
        };
        let priority = rng.gen_range(1..=cfg.max_priority);
        tasks.push(Task::periodic(format!("t{}", i + 1), p, c, d, priority).ok()?);
    }
    let ts = TaskSet::new(tasks).ok()?;
    (utilization(&ts) <= Rational::one()).then_some(ts)
}

/// Random pairs of finite spectra for composition checks: up to three
/// tuples each, offsets and periods below 30, counts up to 4.
pub fn random_finite_spectrum<R: Rng + ?Sized>(rng: &mut R) -> crate::EventSpectrum<u64> {
    use crate::spectrum::EventTuple;
    use crate::time::Count;
    let len = rng.gen_range(1..=3);
    let tuples = (0..len)
        .map(|_| {
            let offset = rng.gen_range(0..30);
            if rng.gen_bool(0.25) {
                EventTuple::once(offset)
            } else {
                let period = rng.gen_range(1..30);
                let count = rng.gen_range(1..=4);
                EventTuple::new(offset, Some(period), Count::Finite(count))
                    .expect("valid finite tuple")
            }
        })
        .collect();
    crate::EventSpectrum::new(tuples)
}
