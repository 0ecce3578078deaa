use std::path::PathBuf;
use std::process::Command as Process;

use clap::Parser;
use herta_cli::{run_command, Cli, Outcome, EXIT_DIVERGED, EXIT_FAIL, EXIT_INPUT, EXIT_OK};

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
        .display()
        .to_string()
}

fn run(args: &str, file: &str) -> Outcome {
    let mut argv: Vec<String> = vec!["herta".into()];
    argv.extend(args.split_whitespace().map(str::to_owned));
    argv.extend(["--input".into(), fixture(file)]);
    run_command(&Cli::try_parse_from(argv).unwrap().command)
}

fn json(o: &Outcome) -> serde_json::Value {
    serde_json::from_str(&o.stdout).unwrap()
}

#[test]
fn ebf_breakpoints_for_the_fastest_task() {
    let o = run(
        "curves --function ebf --mask ud --task tau1 --to 48",
        "three_tasks.json",
    );
    assert_eq!(o.code, EXIT_OK);
    assert_eq!(o.stdout, "t,value\n0,1\n8,2\n16,3\n24,4\n32,5\n40,6\n");
}

#[test]
fn sliding_masks_give_interval_counts() {
    let o = run(
        "curves --function ebf --mask ud --task tau1 --to 17 --sliding",
        "three_tasks.json",
    );
    assert_eq!(o.stdout, "t,value\n0,0\n1,1\n9,2\n");
    let o = run(
        "curves --function ebf --mask uu --task tau1 --to 17 --sliding",
        "three_tasks.json",
    );
    assert_eq!(o.stdout, "t,value\n0,1\n8,2\n16,3\n");
    let o = run(
        "curves --function ebf --mask du --task tau1 --to 17 --sliding",
        "three_tasks.json",
    );
    assert_eq!(o.stdout, "t,value\n0,0\n8,1\n16,2\n");
}

#[test]
fn dbf_curve_of_the_whole_set() {
    let o = run("curves --function dbf --format json", "three_tasks.json");
    let points = json(&o);
    let at = |t: u64| {
        points
            .as_array()
            .unwrap()
            .iter()
            .take_while(|p| p["t"].as_u64().unwrap() <= t)
            .last()
            .unwrap()["value"]
            .as_u64()
            .unwrap()
    };
    assert_eq!(at(7), 0);
    assert_eq!(at(24), 22);
    assert_eq!(at(47), 30);
}

#[test]
fn feasibility_verdicts() {
    let edf = run("feasibility --scheduler edf", "three_tasks.json");
    assert_eq!(edf.code, EXIT_OK);
    assert_eq!(json(&edf)["verdict"], "FEASIBLE");
    assert_eq!(json(&edf)["utilization"], "1/1");

    let dms = run("feasibility --scheduler dms", "three_tasks.json");
    assert_eq!(dms.code, EXIT_FAIL);
    let w = &json(&dms)["witness"];
    assert_eq!(w["kind"], "demand");
    assert_eq!(w["task"], "tau3");
    assert_eq!(w["at"], 24);

    let over = run("feasibility --scheduler edf", "overload.json");
    assert_eq!(over.code, EXIT_FAIL);
    assert_eq!(json(&over)["witness"]["kind"], "overload");
    assert_eq!(json(&over)["utilization"], "5/4");
}

#[test]
fn rta_reports_misses_and_divergence() {
    let dms = run("rta --scheduler dms", "three_tasks.json");
    assert_eq!(dms.code, EXIT_FAIL);
    let worst: Vec<_> = json(&dms)["tasks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|t| t["worst"].as_u64().unwrap())
        .collect();
    assert_eq!(worst, [2, 6, 28]);

    assert_eq!(run("rta --scheduler edf", "three_tasks.json").code, EXIT_OK);

    let sat = run("rta --scheduler static --format csv", "saturated.json");
    assert_eq!(sat.code, EXIT_DIVERGED);
    assert!(sat.stdout.contains("starved,0,0,0,diverged,4,false"));
}

#[test]
fn rta_csv_layout() {
    let o = run("rta --scheduler dms --format csv", "three_tasks.json");
    let mut lines = o.stdout.lines();
    assert_eq!(
        lines.next(),
        Some("task,job,release,rl,response,deadline,met")
    );
    assert!(o.stdout.contains("tau3,1,24,2,24,48,true"));
    assert_eq!(o.stdout.lines().count(), 12);
}

#[test]
fn compare_table() {
    let o = run("compare --format csv", "three_tasks.json");
    assert_eq!(o.code, EXIT_OK);
    assert_eq!(
        o.stdout,
        "task,fifo,free\ntau1,8,8\ntau2,14,16\ntau3,20,24\n"
    );
}

#[test]
fn simulation_trace() {
    let o = run("simulate --scheduler edf --horizon 48", "three_tasks.json");
    assert_eq!(o.code, EXIT_OK);
    assert!(o
        .stdout
        .starts_with("task,job,start,end\ntau1,0,0,2\ntau2,0,2,6\n"));
    let j = json(&run(
        "simulate --scheduler dms --horizon 48 --format json",
        "three_tasks.json",
    ));
    assert_eq!(j["misses"][0]["task"], "tau3");
    assert_eq!(j["misses"][0]["finish"], 28);
}

#[test]
fn free_choice_cannot_be_simulated() {
    let o = run("simulate --scheduler edf-free", "three_tasks.json");
    assert_eq!(o.code, EXIT_INPUT);
    assert!(o.stdout.is_empty());
}

#[test]
fn validation() {
    let ok = run("validate", "three_tasks.json");
    assert_eq!(ok.code, EXIT_OK);
    assert_eq!(json(&ok)["valid"], true);

    let bad = run("validate", "offset.json");
    assert_eq!(bad.code, EXIT_FAIL);
    let j = json(&bad);
    assert_eq!(j["tasks"][1]["task"], "shifted");
    assert_eq!(j["tasks"][1]["violations"].as_array().unwrap().len(), 1);
}

#[test]
fn offset_streams_warn_but_analyse() {
    let o = run("rta --scheduler dms", "offset.json");
    assert_eq!(o.code, EXIT_OK);
    assert!(o.stderr.contains("warning: task `shifted`"));
}

#[test]
fn input_errors() {
    let o = run("rta --scheduler edf", "malformed.json");
    assert_eq!(o.code, EXIT_INPUT);
    assert!(o.stderr.contains("line 5"));
    assert_eq!(
        run("rta --scheduler edf", "zero_wcet.json").code,
        EXIT_INPUT
    );
    assert_eq!(run("rta --scheduler edf", "missing.json").code, EXIT_INPUT);
    assert_eq!(
        run("curves --function rbf --task nobody", "three_tasks.json").code,
        EXIT_INPUT
    );
}

#[test]
fn bad_flags_are_rejected_by_the_parser() {
    assert!(Cli::try_parse_from(["herta", "rta", "--input", "x", "--scheduler", "rm"]).is_err());
    assert!(Cli::try_parse_from([
        "herta",
        "feasibility",
        "--input",
        "x",
        "--scheduler",
        "edf-free"
    ])
    .is_err());
    assert!(Cli::try_parse_from([
        "herta",
        "curves",
        "--input",
        "x",
        "--function",
        "ebf",
        "--mask",
        "ux"
    ])
    .is_err());
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_herta");
    for (args, code) in [
        (vec!["rta", "--scheduler", "edf"], EXIT_OK),
        (vec!["rta", "--scheduler", "dms"], EXIT_FAIL),
    ] {
        let out = Process::new(bin)
            .args(&args)
            .args(["--input", &fixture("three_tasks.json")])
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(code), "{args:?}");
    }
    let out = Process::new(bin)
        .args([
            "rta",
            "--scheduler",
            "static",
            "--input",
            &fixture("saturated.json"),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(EXIT_DIVERGED));
    let out = Process::new(bin)
        .args([
            "rta",
            "--scheduler",
            "static",
            "--input",
            &fixture("malformed.json"),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(EXIT_INPUT));
}
