//! Acceptance criteria, one PASS/FAIL line each.
//!
//! Runs without the libtest harness so the report is always printed. The
//! process exits non-zero if any criterion fails.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::Parser;
use herta::analysis::{average_load, compare_edf_bounds, feasibility, rta_all, Response, Witness};
use herta::bounds::{dbf, ebf};
use herta::generate::{
    random_finite_spectrum, random_taskset, rng, seed_from_env, GeneratorConfig,
};
use herta::sim::simulate;
use herta::spectrum::{compose, EventSpectrum};
use herta::{
    Count, EndpointMode, FeasibilityMode, HeavisideMask, Rational, SchedulerPredicate, Task,
    TaskSet, Tick,
};
use herta_cli::{run_command, Cli};

const RANDOM_SETS: usize = 500;
const SPECTRUM_PAIRS: usize = 100;

const LIMIT_COUNTS: Duration = Duration::from_secs(1);
const LIMIT_THREE_TASKS: Duration = Duration::from_secs(1);
const LIMIT_EQUIVALENCE: Duration = Duration::from_secs(60);
const LIMIT_COMPOSE: Duration = Duration::from_secs(5);

/// Response printed in the literature for τ2 under tie-broken EDF.
const PRINTED_TAU2_EDF: Tick = 10;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(
    failures: &[String],
    elapsed: Duration,
    limit: Option<Duration>,
    summary: String,
) -> Outcome {
    let slow = limit.is_some_and(|l| elapsed >= l);
    let timing = match limit {
        Some(l) => format!("{:.3}s < {:.0}s", elapsed.as_secs_f64(), l.as_secs_f64()),
        None => format!("{:.3}s", elapsed.as_secs_f64()),
    };
    let mut detail = format!("{summary}; {timing}");
    if slow {
        detail.push_str("; too slow");
    }
    if let Some(first) = failures.first() {
        detail.push_str(&format!("; {} failure(s), first: {first}", failures.len()));
    }
    Outcome {
        pass: failures.is_empty() && !slow,
        detail,
    }
}

fn three_tasks() -> TaskSet<Tick> {
    TaskSet::new(vec![
        Task::periodic("tau1", 8, 2, 8, 1).unwrap(),
        Task::periodic("tau2", 16, 4, 16, 2).unwrap(),
        Task::periodic("tau3", 24, 12, 24, 3).unwrap(),
    ])
    .unwrap()
}

fn worst(ts: &TaskSet<Tick>, p: SchedulerPredicate) -> Vec<Option<Tick>> {
    let r = rta_all(ts, p).unwrap();
    (0..ts.len())
        .map(|i| r.worst(i).and_then(Response::value))
        .collect()
}

fn list(v: &[Option<Tick>]) -> String {
    let cells: Vec<String> = v
        .iter()
        .map(|x| x.map_or("-".into(), |x| x.to_string()))
        .collect();
    format!("({})", cells.join(", "))
}

fn check(failures: &mut Vec<String>, ok: bool, what: impl FnOnce() -> String) {
    if !ok {
        failures.push(what());
    }
}

/// ebf with the three mask shapes against the classic interval counts.
fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut cases = 0;
    for p in 1..=12u64 {
        let s = EventSpectrum::periodic(p, 0).unwrap();
        for t in 0..=4 * p {
            cases += 1;
            let closed_open = ebf(&s, t, &HeavisideMask::closed_open(0, t));
            let open_closed = ebf(&s, t, &HeavisideMask::open_closed(0, t));
            let closed_closed = ebf(&s, t, &HeavisideMask::closed_closed(0, t));
            let expected = (t.div_ceil(p), t / p, t / p + 1);
            check(
                &mut failures,
                (closed_open, open_closed, closed_closed) == expected,
                || {
                    format!(
                        "p={p} t={t}: got {:?}, want {expected:?}",
                        (closed_open, open_closed, closed_closed)
                    )
                },
            );
        }
    }
    let summary = format!(
        "{cases} (p, t) points x 3 masks = {} checks, exact",
        3 * cases
    );
    outcome(&failures, start.elapsed(), Some(LIMIT_COUNTS), summary)
}

/// Golden values of the three-task example.
fn criterion_2() -> Outcome {
    let start = Instant::now();
    let ts = three_tasks();
    let mut failures = Vec::new();

    // a
    let load = average_load(&ts, 0, 48);
    check(&mut failures, load == Rational::from_integer(1), || {
        format!("a: average load {load}")
    });

    // b
    let edf = feasibility(&ts, FeasibilityMode::Edf).unwrap();
    check(&mut failures, edf.is_feasible(), || {
        "b: EDF not feasible".into()
    });
    check(&mut failures, dbf(&ts, 48) == 48, || {
        format!("b: dbf(48) = {}", dbf(&ts, 48))
    });
    for mode in [FeasibilityMode::FixedPriority, FeasibilityMode::Dms] {
        let r = feasibility(&ts, mode).unwrap();
        let witness_tau3 = matches!(r.witness, Some(Witness::Demand { task: 2, .. }));
        check(&mut failures, !r.is_feasible() && witness_tau3, || {
            format!("b: {} gave {} with {:?}", mode.name(), r.verdict, r.witness)
        });
    }

    // c
    let dms = rta_all(&ts, SchedulerPredicate::StaticDms).unwrap();
    let dms_worst: Vec<_> = (0..3)
        .map(|i| dms.worst(i).and_then(Response::value))
        .collect();
    check(
        &mut failures,
        dms_worst == [Some(2), Some(6), Some(28)],
        || format!("c: DMS worst {dms_worst:?}"),
    );
    check(
        &mut failures,
        dms.tasks[2].missed && !dms.tasks[0].missed && !dms.tasks[1].missed,
        || "c: miss flags".into(),
    );

    // d
    let fifo = worst(&ts, SchedulerPredicate::EdfFifo);
    let trace = simulate(&ts, &SchedulerPredicate::EdfFifo, 96).unwrap();
    let simulated_tau2 = (0..3).filter_map(|j| trace.response_of(1, j)).max();
    check(
        &mut failures,
        fifo[0] == Some(8) && fifo[2] == Some(20),
        || format!("d: EDF worst {fifo:?}"),
    );
    check(&mut failures, fifo[1] == simulated_tau2, || {
        format!(
            "d: τ2 analysis {:?} vs simulation {simulated_tau2:?}",
            fifo[1]
        )
    });

    // e
    let cmp = compare_edf_bounds(&ts).unwrap();
    let free: Vec<_> = cmp
        .rows
        .iter()
        .map(|r| r.free.and_then(Response::value))
        .collect();
    check(&mut failures, free == [Some(8), Some(16), Some(24)], || {
        format!("e: free-choice {free:?}")
    });
    check(&mut failures, cmp.holds(), || {
        "e: tie-broken exceeds free-choice".into()
    });

    let summary = format!(
        "DMS {}, EDF {}, free {}; τ2 under EDF: simulator {}, printed {PRINTED_TAU2_EDF}",
        list(&dms_worst),
        list(&fifo),
        list(&free),
        simulated_tau2.map_or("-".into(), |v| v.to_string())
    );
    outcome(&failures, start.elapsed(), Some(LIMIT_THREE_TASKS), summary)
}

fn random_sets() -> Vec<TaskSet<Tick>> {
    let mut r = rng(seed_from_env());
    let cfg = GeneratorConfig::default();
    (0..RANDOM_SETS)
        .map(|_| random_taskset(&mut r, &cfg))
        .collect()
}

const COMPARED: [SchedulerPredicate; 4] = [
    SchedulerPredicate::StaticPriority,
    SchedulerPredicate::StaticDms,
    SchedulerPredicate::EdfFifo,
    SchedulerPredicate::Hierarchical,
];

/// Analysis equals simulation for every job released before H.
fn criterion_3(sets: &[TaskSet<Tick>]) -> Outcome {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut jobs = 0usize;
    for (n, ts) in sets.iter().enumerate() {
        for p in COMPARED {
            let rta = rta_all(ts, p).unwrap();
            let trace = simulate(ts, &p, 2 * rta.horizon).unwrap();
            for j in &rta.jobs {
                jobs += 1;
                let simulated = trace.response_of(j.job.task, j.job.index);
                check(&mut failures, j.response.value() == simulated, || {
                    format!(
                        "set {n} {p} job {}: {} vs {simulated:?}",
                        ts.job_label(&j.job),
                        j.response
                    )
                });
            }
        }
    }
    outcome(
        &failures,
        start.elapsed(),
        Some(LIMIT_EQUIVALENCE),
        format!(
            "{} sets x {} schedulers, {jobs} jobs, zero tolerance",
            sets.len(),
            COMPARED.len()
        ),
    )
}

/// Hierarchical collapses to EDF with equal and to static with distinct priorities.
fn criterion_4(sets: &[TaskSet<Tick>]) -> Outcome {
    let start = Instant::now();
    let mut failures = Vec::new();
    for (n, ts) in sets.iter().enumerate() {
        let equal = ts.map_priorities(|_, _| 0);
        let hier = rta_all(&equal, SchedulerPredicate::Hierarchical).unwrap();
        let edf = rta_all(&equal, SchedulerPredicate::EdfFifo).unwrap();
        check(&mut failures, hier.jobs == edf.jobs, || {
            format!("set {n}: equal priorities")
        });

        let distinct = ts.map_priorities(|i, _| i as i64);
        let hier = rta_all(&distinct, SchedulerPredicate::Hierarchical).unwrap();
        let fp = rta_all(&distinct, SchedulerPredicate::StaticPriority).unwrap();
        check(&mut failures, hier.jobs == fp.jobs, || {
            format!("set {n}: distinct priorities")
        });
    }
    outcome(
        &failures,
        start.elapsed(),
        None,
        format!("{} sets, job for job", sets.len()),
    )
}

/// Every pairwise sum of impulse instants, sorted.
fn double_sum(a: &EventSpectrum<Tick>, b: &EventSpectrum<Tick>) -> Vec<Tick> {
    let expand = |s: &EventSpectrum<Tick>| -> Vec<Tick> {
        let mut v = Vec::new();
        for tuple in s.tuples() {
            let Count::Finite(k) = tuple.count() else {
                panic!("finite spectra only")
            };
            for n in 0..k {
                v.push(tuple.offset() + n * tuple.period().unwrap_or(0));
            }
        }
        v
    };
    let (xs, ys) = (expand(a), expand(b));
    let mut out: Vec<Tick> = xs
        .iter()
        .flat_map(|x| ys.iter().map(move |y| x + y))
        .collect();
    out.sort_unstable();
    out
}

fn all_impulses(s: &EventSpectrum<Tick>, hi: Tick) -> Vec<Tick> {
    let mut v = s.impulses(0, hi, EndpointMode::Closed, EndpointMode::Closed);
    v.sort_unstable();
    v
}

/// Composition against the brute-force expansion, both operand orders.
fn criterion_5() -> Outcome {
    let start = Instant::now();
    let mut r = rng(seed_from_env());
    let mut failures = Vec::new();
    for n in 0..SPECTRUM_PAIRS {
        let a = random_finite_spectrum(&mut r);
        let b = random_finite_spectrum(&mut r);
        let expected = double_sum(&a, &b);
        let hi = expected.last().copied().unwrap_or(0);
        let ab = all_impulses(&compose(&a, &b).unwrap(), hi);
        let ba = all_impulses(&compose(&b, &a).unwrap(), hi);
        check(&mut failures, ab == expected, || {
            format!("pair {n}: {ab:?} vs {expected:?}")
        });
        check(&mut failures, ab == ba, || {
            format!("pair {n}: not commutative")
        });
    }
    outcome(
        &failures,
        start.elapsed(),
        Some(LIMIT_COMPOSE),
        format!("{SPECTRUM_PAIRS} pairs, multiset equality"),
    )
}

/// EDF-feasible sets show no miss over two hyper-periods.
fn criterion_6(sets: &[TaskSet<Tick>]) -> Outcome {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut feasible = 0;
    for (n, ts) in sets.iter().enumerate() {
        if feasibility(ts, FeasibilityMode::Edf).unwrap().is_feasible() {
            feasible += 1;
            let h = ts.hyper_period().unwrap();
            let trace = simulate(ts, &SchedulerPredicate::EdfFifo, 2 * h).unwrap();
            check(&mut failures, trace.misses.is_empty(), || {
                format!("set {n}: {} miss(es)", trace.misses.len())
            });
        }
    }
    outcome(
        &failures,
        start.elapsed(),
        None,
        format!("{feasible} of {} sets EDF-feasible", sets.len()),
    )
}

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

/// Every command on every fixture, run twice, byte for byte.
fn criterion_7() -> Outcome {
    let start = Instant::now();
    let fixtures = [
        "three_tasks.json",
        "saturated.json",
        "offset.json",
        "overload.json",
        "malformed.json",
        "zero_wcet.json",
    ];
    let mut commands: Vec<Vec<String>> = Vec::new();
    for f in fixtures {
        let input = fixture(f).display().to_string();
        let mut add = |args: &[&str]| {
            let mut v: Vec<String> = vec!["herta".into()];
            v.extend(args.iter().map(|s| s.to_string()));
            v.extend(["--input".to_string(), input.clone()]);
            commands.push(v);
        };
        add(&["validate"]);
        for mode in FeasibilityMode::ALL {
            add(&["feasibility", "--scheduler", mode.name()]);
        }
        for p in SchedulerPredicate::ALL {
            for format in ["json", "csv"] {
                add(&["rta", "--scheduler", p.name(), "--format", format]);
                add(&["simulate", "--scheduler", p.name(), "--format", format]);
            }
        }
        for format in ["json", "csv"] {
            add(&["compare", "--format", format]);
        }
        for function in ["ebf", "rbf", "dbf"] {
            for mask in ["uu", "ud", "du", "dd"] {
                add(&["curves", "--function", function, "--mask", mask]);
                add(&[
                    "curves",
                    "--function",
                    function,
                    "--mask",
                    mask,
                    "--sliding",
                ]);
            }
        }
    }
    let mut failures = Vec::new();
    for args in &commands {
        let cli = Cli::try_parse_from(args).unwrap();
        let first = run_command(&cli.command);
        let second = run_command(&cli.command);
        check(&mut failures, first == second, || args[1..].join(" "));
    }
    outcome(
        &failures,
        start.elapsed(),
        None,
        format!(
            "{} invocations on {} fixtures, byte-identical",
            commands.len(),
            fixtures.len()
        ),
    )
}

fn main() -> ExitCode {
    println!("acceptance (seed {})", seed_from_env());
    let sets = random_sets();
    let results = [
        ("1 interval counts", criterion_1()),
        ("2 golden example", criterion_2()),
        ("3 analysis = simulation", criterion_3(&sets)),
        ("4 hierarchical reductions", criterion_4(&sets)),
        ("5 composition oracle", criterion_5()),
        ("6 EDF feasibility vs simulation", criterion_6(&sets)),
        ("7 determinism", criterion_7()),
    ];
    let mut all = true;
    for (name, o) in &results {
        all &= o.pass;
        println!(
            "{} criterion {name}: {}",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
