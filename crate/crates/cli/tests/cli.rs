// SPDX-License-Identifier: Apache-2.0

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

use bgpmv_core::config::print_network;
use bgpmv_core::model::{Edge, MatchClause, Term};
use bgpmv_core::{parse_network, VerificationReport};

fn fixture(name: &str) -> String {
    format!(
        "{}/../core/fixtures/{name}.json",
        env!("CARGO_MANIFEST_DIR")
    )
}

fn bgpmv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bgpmv"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn verify_args<'a>(net: &'a str, spec: &'a str) -> Vec<&'a str> {
    vec!["verify", "--network", net, "--spec", spec]
}

/// Parses stdout as JSON and checks it against the shipped schema.
fn schema_checked(o: &Output) -> Value {
    let schema_path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../docs/report.schema.json");
    let schema: Value =
        serde_json::from_str(&std::fs::read_to_string(schema_path).unwrap()).unwrap();
    let v: Value = serde_json::from_str(&stdout(o)).expect("stdout is JSON");
    let validator = jsonschema::validator_for(&schema).expect("schema compiles");
    let errors: Vec<String> = validator.iter_errors(&v).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "schema violations: {errors:?}");
    v
}

#[test]
fn verify_running_example_passes() {
    let (n, s) = (fixture("running_example"), fixture("running_example_spec"));
    let o = bgpmv(&verify_args(&n, &s));
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains("28/28 obligations passed"));
}

#[test]
fn verify_university_initial_fails_on_border_exports() {
    let (n, s) = (fixture("university"), fixture("university_spec_initial"));
    let mut args = verify_args(&n, &s);
    args.extend(["--format", "json"]);
    let o = bgpmv(&args);
    assert_eq!(code(&o), 1);
    let v = schema_checked(&o);
    let mut failed: Vec<String> = v["results"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|r| r["verdict"] == "fail")
        .map(|r| {
            r["id"]
                .as_str()
                .unwrap()
                .rsplit_once(':')
                .unwrap()
                .0
                .to_string()
        })
        .collect();
    failed.sort();
    assert_eq!(failed, ["export:B1->ISP1", "export:B2->ISP2"]);
}

#[test]
fn input_errors_exit_2() {
    let n = fixture("running_example");
    let o = bgpmv(&verify_args(&n, "/definitely/missing/spec.json"));
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("cannot read"));

    // A spec written for a different network names unknown locations.
    let o = bgpmv(&verify_args(&n, &fixture("university_spec_initial")));
    assert_eq!(code(&o), 2);

    assert_eq!(code(&bgpmv(&["verify", "--network", &n])), 2);
    assert_eq!(code(&bgpmv(&["frobnicate"])), 2);
    let s = fixture("running_example_spec");
    let mut args = verify_args(&n, &s);
    args.extend(["--jobs", "0"]);
    assert_eq!(code(&bgpmv(&args)), 2);
}

#[test]
fn oracle_verdicts() {
    let s = fixture("running_example_spec");
    let o = bgpmv(&[
        "oracle",
        "--network",
        &fixture("running_example"),
        "--spec",
        &s,
    ]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("holds"));

    let o = bgpmv(&[
        "oracle",
        "--network",
        &fixture("running_example_no_filter"),
        "--spec",
        &s,
        "--format",
        "json",
    ]);
    assert_eq!(code(&o), 1);
    let v = schema_checked(&o);
    assert_eq!(v["verdict"], "violated");
    assert_eq!(v["witness"]["ghosts"]["FromISP1"], true);
}

#[test]
fn oracle_dump() {
    let dir = TempDir::new().unwrap();
    let dump = dir.path().join("fp.json");
    let o = bgpmv(&[
        "oracle",
        "--network",
        &fixture("running_example"),
        "--spec",
        &fixture("running_example_spec"),
        "--dump",
        dump.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_str(&std::fs::read_to_string(dump).unwrap()).unwrap();
    // 3 routers and 12 directed edges.
    assert_eq!(v["locations"].as_array().unwrap().len(), 15);
    assert!(v["locations"][0]["stats"].is_object());
}

#[test]
fn oracle_traces_agree() {
    let s = fixture("running_example_spec");
    let n = fixture("running_example");
    let o = bgpmv(&["oracle", "--network", &n, "--spec", &s, "--traces"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let out = stdout(&o);
    assert!(
        out.contains("agreement with the fixpoint: confirmed"),
        "{out}"
    );
    assert!(out.contains("valid traces of at most 5 events:"), "{out}");

    let o = bgpmv(&[
        "oracle",
        "--network",
        &n,
        "--spec",
        &s,
        "--traces",
        "--format",
        "json",
    ]);
    let v = schema_checked(&o);
    assert_eq!(v["traces"]["agreement"], true);
    assert!(v["traces"]["trace_count"].as_u64().unwrap() > 0);
    assert!(v["traces"]["events"].as_u64().unwrap() > 0);

    // The university network has 7 nodes, beyond the trace explorer's limit.
    let o = bgpmv(&[
        "oracle",
        "--network",
        &fixture("university"),
        "--spec",
        &fixture("university_spec_refined"),
        "--traces",
    ]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("too large"));
}

#[test]
fn oracle_traces_with_seed_file() {
    let dir = TempDir::new().unwrap();
    let seeds = dir.path().join("seeds.json");
    std::fs::write(
        &seeds,
        r#"[{"prefix": "10.0.0.0/8", "communities": ["100:1"]}, {"prefix": "192.0.2.0/24", "as_path": [65001]}]"#,
    )
    .unwrap();
    let o = bgpmv(&[
        "oracle",
        "--network",
        &fixture("running_example"),
        "--spec",
        &fixture("running_example_spec"),
        "--traces",
        "--seeds",
        seeds.to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let v = schema_checked(&o);
    assert_eq!(v["traces"]["seeds"], 2);
    assert_eq!(v["traces"]["violations"], 0);
}

fn gen_into(dir: &Path, n: usize, seed: u64) -> (PathBuf, PathBuf, Output) {
    let net = dir.join(format!("n{n}s{seed}.network.json"));
    let spec = dir.join(format!("n{n}s{seed}.spec.json"));
    let o = bgpmv(&[
        "gen",
        "--n",
        &n.to_string(),
        "--seed",
        &seed.to_string(),
        "--network",
        net.to_str().unwrap(),
        "--spec",
        spec.to_str().unwrap(),
        "--format",
        "json",
    ]);
    (net, spec, o)
}

#[test]
fn gen_counts_and_determinism() {
    let dir = TempDir::new().unwrap();
    let (net, spec, o) = gen_into(dir.path(), 10, 3);
    assert_eq!(code(&o), 0);
    let v = schema_checked(&o);
    assert_eq!(v["routers"], 10);
    assert_eq!(v["externals"], 10);
    assert_eq!(v["edges"], 90 + 20);
    assert_eq!(v["obligations"], 3 * 100 + 1);

    let other = TempDir::new().unwrap();
    let (net2, spec2, _) = gen_into(other.path(), 10, 3);
    assert_eq!(std::fs::read(&net).unwrap(), std::fs::read(&net2).unwrap());
    assert_eq!(
        std::fs::read(&spec).unwrap(),
        std::fs::read(&spec2).unwrap()
    );

    assert_eq!(code(&bgpmv(&["gen", "--n", "1"])), 2);
}

#[test]
fn gen_minimal_mesh_verifies() {
    let dir = TempDir::new().unwrap();
    let (net, spec, _) = gen_into(dir.path(), 2, 0);
    let o = bgpmv(&verify_args(net.to_str().unwrap(), spec.to_str().unwrap()));
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains("13/13"));
}

fn report_json(net: &Path, spec: &Path, dir: &Path, name: &str) -> PathBuf {
    let mut args = verify_args(net.to_str().unwrap(), spec.to_str().unwrap());
    args.extend(["--format", "json"]);
    let o = bgpmv(&args);
    schema_checked(&o);
    let p = dir.join(name);
    std::fs::write(&p, &o.stdout).unwrap();
    p
}

fn incremental(net: &Path, spec: &Path, prev: &Path, prev_net: &Path, json: bool) -> Output {
    let mut args = vec![
        "incremental",
        "--network",
        net.to_str().unwrap(),
        "--spec",
        spec.to_str().unwrap(),
        "--prev-report",
        prev.to_str().unwrap(),
        "--prev-network",
        prev_net.to_str().unwrap(),
    ];
    if json {
        args.extend(["--format", "json"]);
    }
    bgpmv(&args)
}

#[test]
fn incremental_unchanged_rechecks_nothing() {
    let dir = TempDir::new().unwrap();
    let (net, spec, _) = gen_into(dir.path(), 4, 1);
    let prev = report_json(&net, &spec, dir.path(), "prev.json");
    let o = incremental(&net, &spec, &prev, &net, false);
    assert_eq!(code(&o), 0);
    assert!(
        stdout(&o).contains("0 obligations re-checked"),
        "{}",
        stdout(&o)
    );
}

#[test]
fn incremental_single_router_edit() {
    let dir = TempDir::new().unwrap();
    let (net, spec, _) = gen_into(dir.path(), 30, 5);
    let prev = report_json(&net, &spec, dir.path(), "prev.json");

    let mut edited = parse_network(&std::fs::read_to_string(&net).unwrap()).unwrap();
    let e = Edge::new("R7", "R8");
    let tag = "65000:3".parse().unwrap();
    edited
        .policy
        .export_maps
        .get_mut(&e)
        .unwrap()
        .terms
        .insert(0, Term::deny(vec![MatchClause::CommunityPresent(tag)]));
    let new_net = dir.path().join("edited.network.json");
    std::fs::write(&new_net, print_network(&edited)).unwrap();

    let o = incremental(&new_net, &spec, &prev, &net, true);
    assert!(code(&o) <= 1);
    schema_checked(&o);
    let inc = VerificationReport::from_json(&stdout(&o)).unwrap();
    let incident = edited
        .topology
        .edges
        .iter()
        .filter(|x| x.touches("R7"))
        .count();
    assert!(inc.rechecked >= 1);
    assert!(
        inc.rechecked <= 3 * incident + 1,
        "{} > bound for {incident} edges",
        inc.rechecked
    );

    let full = report_json(&new_net, &spec, dir.path(), "full.json");
    let full = VerificationReport::from_json(&std::fs::read_to_string(full).unwrap()).unwrap();
    assert_eq!(inc.outcome(), full.outcome());
}

#[test]
fn incremental_stale_report_falls_back() {
    let dir = TempDir::new().unwrap();
    let (net_a, spec_a, _) = gen_into(dir.path(), 3, 1);
    let (net_b, spec_b, _) = gen_into(dir.path(), 3, 2);
    // A report for a different network: its obligations do not line up.
    let stale = report_json(&net_b, &spec_b, dir.path(), "stale.json");
    let o = incremental(&net_a, &spec_a, &stale, &net_a, true);
    let inc = VerificationReport::from_json(&stdout(&o)).unwrap();
    let full = VerificationReport::from_json(
        &std::fs::read_to_string(report_json(&net_a, &spec_a, dir.path(), "a.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(inc.outcome(), full.outcome());
    assert_eq!(code(&o), if full.passed() { 0 } else { 1 });
}
