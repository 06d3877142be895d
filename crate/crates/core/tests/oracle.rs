// SPDX-License-Identifier: Apache-2.0

use bgpmv_core::checker::verify;
use bgpmv_core::model::{Edge, Location, Prefix};
use bgpmv_core::oracle::{
    apply_failures, check_property_fixpoint, compute_fixpoint, compute_fixpoint_with,
    enumerate_valid_traces, reachable_events, strongest_invariants, EventKind, FixpointOptions,
    PropertyVerdict, TraceLimits,
};
use bgpmv_core::{parse_network, parse_spec, Network, Route, Spec};

fn load(net: &str, spec: &str) -> (Network, Spec) {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/");
    let n = parse_network(&std::fs::read_to_string(format!("{dir}{net}.json")).unwrap()).unwrap();
    let s = parse_spec(
        &std::fs::read_to_string(format!("{dir}{spec}.json")).unwrap(),
        &n,
    )
    .unwrap();
    (n, s)
}

fn opts(spec: &Spec) -> FixpointOptions {
    FixpointOptions {
        predicates: vec![spec.property.pred.clone()],
        ..FixpointOptions::default()
    }
}

#[test]
fn running_example_holds() {
    let (n, s) = load("running_example", "running_example_spec");
    let mut fp = compute_fixpoint_with(&n, &opts(&s)).unwrap();
    assert_eq!(
        check_property_fixpoint(&mut fp, &s.property).unwrap(),
        PropertyVerdict::Holds
    );
    let e = Location::Edge(Edge::new("R2", "ISP2"));
    let set = fp.set_at(&e).unwrap().clone();
    let g = fp
        .engine_mut()
        .encode_predicate(&"ghost FromISP1".parse_pred())
        .unwrap();
    let both = fp.engine_mut().intersect(&set, &g);
    assert!(both.is_empty());
}

trait ParsePred {
    fn parse_pred(&self) -> bgpmv_core::PredicateExpr;
}
impl ParsePred for str {
    fn parse_pred(&self) -> bgpmv_core::PredicateExpr {
        bgpmv_core::config::parse_predicate(self).unwrap()
    }
}

#[test]
fn running_example_without_filter_is_violated() {
    let (n, s) = load("running_example_no_filter", "running_example_spec");
    let mut fp = compute_fixpoint_with(&n, &opts(&s)).unwrap();
    match check_property_fixpoint(&mut fp, &s.property).unwrap() {
        PropertyVerdict::Violated(w) => assert!(w.ghosts["FromISP1"]),
        v => panic!("{v:?}"),
    }
}

#[test]
fn suggested_invariants_are_inductive() {
    for (net, spec) in [
        ("running_example", "running_example_spec"),
        ("university", "university_spec_refined"),
        ("wan_no_transit", "wan_no_transit_spec"),
        ("wan_ip_reuse", "wan_ip_reuse_spec"),
    ] {
        let (n, s) = load(net, spec);
        let mut fp = compute_fixpoint_with(&n, &opts(&s)).unwrap();
        let inv = strongest_invariants(&mut fp, &n);
        let r = verify(&n, &inv, &s.property, 2).unwrap();
        assert!(r.passed(), "{net}: {}", r.to_text(Some(&n)));
    }
}

#[test]
fn suggestion_implies_key_invariant() {
    let (n, s) = load("running_example", "running_example_spec");
    let mut fp = compute_fixpoint_with(&n, &opts(&s)).unwrap();
    let key = fp
        .engine_mut()
        .encode_predicate(&"ghost FromISP1 implies community 100:1".parse_pred())
        .unwrap();
    for r in ["R1", "R2", "R3"] {
        let set = fp.set_at(&Location::Node(r.into())).unwrap().clone();
        assert!(fp.engine_mut().is_subset(&set, &key), "{r}");
    }
}

#[test]
fn trace_events_agree_with_fixpoint() {
    let (n, s) = load("running_example", "running_example_spec");
    let seeds = vec![
        Route::new("10.0.0.0/8".parse::<Prefix>().unwrap()),
        Route::new("20.0.0.0/8".parse::<Prefix>().unwrap())
            .with_communities(["100:1".parse().unwrap()]),
    ];
    let ev = reachable_events(&n, &seeds, 12, Some(TraceLimits::default())).unwrap();
    assert!(ev.violations(&s.property).is_empty());
    let mut o = opts(&s);
    o.seeds = Some(seeds);
    let fp = compute_fixpoint_with(&n, &o).unwrap();
    assert!(ev.disagreements(&fp).is_empty());
    assert!(ev.len() > 10);
    for e in ev.events() {
        let t = ev.trace_to(e).unwrap();
        assert_eq!(t.len(), ev.depth(e).unwrap());
    }
}

#[test]
fn trace_stream_small_cases() {
    let (n, _) = load("running_example", "running_example_spec");
    let seeds = vec![Route::new("10.0.0.0/8".parse::<Prefix>().unwrap())];
    let all: Vec<_> = enumerate_valid_traces(&n, &seeds, 0, None)
        .unwrap()
        .collect();
    assert_eq!(all, vec![vec![]]);
    let two: Vec<_> = enumerate_valid_traces(&n, &seeds, 2, None)
        .unwrap()
        .collect();
    assert!(two.iter().any(|t| t.len() == 2
        && t[0].kind == EventKind::Recv
        && t[1].kind == EventKind::Slct
        && t[0].router == "R1"));
    let big = enumerate_valid_traces(&n, &seeds, 13, Some(TraceLimits::default()));
    assert!(big.is_err());
}

#[test]
fn failures_shrink_sets() {
    let (n, s) = load("running_example", "running_example_spec");
    let mut full = compute_fixpoint(&n, None).unwrap();
    let sub = apply_failures(&n, &[], &[Edge::new("R1", "R2")]).unwrap();
    let mut fp = compute_fixpoint_with(
        &sub,
        &FixpointOptions {
            universe: Some(full.encoding().universe().clone()),
            aspath_bound: Some(full.aspath_bound),
            ..FixpointOptions::default()
        },
    )
    .unwrap();
    assert_eq!(
        check_property_fixpoint(&mut fp, &s.property).unwrap(),
        PropertyVerdict::Holds
    );
    for loc in fp.locations() {
        let p = fp.export(&loc).unwrap();
        let small = full.engine_mut().import(&p).unwrap();
        let big = full.set_at(&loc).unwrap().clone();
        assert!(full.engine_mut().is_subset(&small, &big), "{loc}");
    }
    let no_r2 = apply_failures(&n, &["R2".into()], &[]).unwrap();
    assert!(no_r2.topology.edges.iter().all(|e| !e.touches("R2")));
    assert!(!no_r2.topology.externals.contains("ISP2"));
    assert_eq!(apply_failures(&n, &[], &[]).unwrap(), n);
}
