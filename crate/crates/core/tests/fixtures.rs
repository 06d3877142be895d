// SPDX-License-Identifier: Apache-2.0

use bgpmv_core::checker::{
    expected_count, localize, verify, FailureCategory, ObligationKind, VerificationReport,
};
use bgpmv_core::{parse_network, parse_spec, Network, Spec};

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

fn run(net: &str, spec: &str) -> (Network, VerificationReport) {
    let (n, s) = load(net, spec);
    let r = verify(&n, &s.invariants, &s.property, 2).unwrap();
    (n, r)
}

fn failing(r: &VerificationReport) -> Vec<(ObligationKind, String)> {
    r.failures()
        .map(|f| (f.kind, f.edge.as_ref().unwrap().to_string()))
        .collect()
}

#[test]
fn running_example_passes() {
    let (n, r) = run("running_example", "running_example_spec");
    assert_eq!(expected_count(&n), 28);
    assert_eq!(r.totals.obligations, 28);
    assert!(r.passed(), "{}", r.to_text(Some(&n)));
}

#[test]
fn running_example_without_tag_fails_at_import() {
    let (_, r) = run("running_example_no_tag", "running_example_spec");
    assert_eq!(
        failing(&r),
        vec![(ObligationKind::Import, "ISP1->R1".to_string())]
    );
    let f = r.failures().next().unwrap().failure.as_ref().unwrap();
    assert!(f.post_witness.ghosts["FromISP1"]);
    assert!(!f.post_witness.has_community("100:1"));
}

#[test]
fn university_initial_fails_on_border_exports() {
    let (n, r) = run("university", "university_spec_initial");
    let mut got = failing(&r);
    got.sort();
    assert_eq!(
        got,
        vec![
            (ObligationKind::Export, "B1->ISP1".to_string()),
            (ObligationKind::Export, "B2->ISP2".to_string())
        ],
        "{}",
        r.to_text(Some(&n))
    );
    for f in r.failures() {
        assert!(f
            .failure
            .as_ref()
            .unwrap()
            .post_witness
            .has_community("65535:666"));
    }
}

#[test]
fn university_refined_passes() {
    let (n, r) = run("university", "university_spec_refined");
    assert!(r.passed(), "{}", r.to_text(Some(&n)));
}

#[test]
fn university_errors_localize() {
    for (net, kind, edge, term) in [
        (
            "university_err_blackhole",
            ObligationKind::Export,
            "C1->B1",
            0,
        ),
        (
            "university_err_propagate",
            ObligationKind::Import,
            "Lab->D1",
            0,
        ),
        (
            "university_err_foreign_prefix",
            ObligationKind::Export,
            "B2->ISP2",
            1,
        ),
    ] {
        let (n, r) = run(net, "university_spec_refined");
        assert_eq!(
            failing(&r),
            vec![(kind, edge.to_string())],
            "{net}: {}",
            r.to_text(Some(&n))
        );
        let d = localize(r.failures().next().unwrap(), &n).unwrap();
        assert_eq!(d.term, Some(term), "{net}");
        assert!(d.term_text.is_some());
        println!("{d}");
    }
}

#[test]
fn false_positive_is_local() {
    let (n, r) = run("false_positive", "false_positive_spec");
    assert!(!r.passed());
    for f in r.failures() {
        assert_eq!(
            f.failure.as_ref().unwrap().category,
            FailureCategory::LocalInvariant,
            "{}",
            r.to_text(Some(&n))
        );
    }
}

#[test]
fn wan_fixtures() {
    for (good, bad, spec) in [
        ("wan_bogons", "wan_bogons_bug", "wan_bogons_spec"),
        ("wan_ip_reuse", "wan_ip_reuse_bug", "wan_ip_reuse_spec"),
        (
            "wan_no_transit",
            "wan_no_transit_bug",
            "wan_no_transit_spec",
        ),
    ] {
        let (n, r) = run(good, spec);
        assert!(r.passed(), "{good}: {}", r.to_text(Some(&n)));
        let (n, r) = run(bad, spec);
        assert!(!r.passed(), "{bad}");
        println!("{}", r.to_text(Some(&n)));
    }
}

#[test]
fn wan_ip_reuse_without_deletion() {
    // Tag-only import: the weaker invariants verify ...
    let (n, r) = run("wan_ip_reuse_weak", "wan_ip_reuse_weak_spec");
    assert!(r.passed(), "{}", r.to_text(Some(&n)));
    // ... but excluding other regions' tags needs the delete-all action.
    let (n, r) = run("wan_ip_reuse_weak", "wan_ip_reuse_spec");
    assert_eq!(
        failing(&r),
        vec![(ObligationKind::Import, "DC1->R1".to_string())],
        "{}",
        r.to_text(Some(&n))
    );
    let w = &r
        .failures()
        .next()
        .unwrap()
        .failure
        .as_ref()
        .unwrap()
        .post_witness;
    assert!(w.has_community("65100:2"));
}
