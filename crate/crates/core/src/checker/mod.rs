// SPDX-License-Identifier: Apache-2.0

//! Local checks and their discharge.

mod discharge;
mod incremental;
mod localize;
mod obligation;
mod report;

use std::sync::Arc;
use std::time::Instant;

use log::info;
use rayon::prelude::*;
use thiserror::Error;

use crate::config::Universe;
use crate::model::{
    validate_network, InvariantMap, ModelError, Network, NetworkProperty, Violation,
};
use crate::symbolic::{Encoding, SymbolicError};

pub use discharge::discharge;
pub use incremental::incremental_recheck;
pub use localize::{localize, Diagnostic};
pub use obligation::{
    expected_count, external_routes, generate_checks, Obligation, ObligationKind,
};
pub use report::{
    CheckResult, Failure, FailureCategory, Totals, Verdict, VerificationReport, Witness, OTHER,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CheckerError {
    #[error("invalid input: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
    #[error("property location {0} is not in the network")]
    UnknownPropertyLocation(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Symbolic(#[from] SymbolicError),
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
    #[error("cannot start worker pool: {0}")]
    Pool(String),
}

/// Every literal mentioned by the network, the invariants and the property.
pub fn universe_of(net: &Network, inv: &InvariantMap, prop: &NetworkProperty) -> Universe {
    let mut b = Universe::builder().network(net).predicate(&prop.pred);
    for c in inv.entries.values() {
        b = b.constraint(c);
    }
    b.build()
}

pub(crate) fn prepare(
    net: &Network,
    inv: &InvariantMap,
    prop: &NetworkProperty,
) -> Result<Arc<Encoding>, CheckerError> {
    let violations = validate_network(net, Some(inv));
    if !violations.is_empty() {
        return Err(CheckerError::Invalid(violations));
    }
    if !net.topology.has_location(&prop.location) {
        return Err(CheckerError::UnknownPropertyLocation(
            prop.location.to_string(),
        ));
    }
    Ok(Arc::new(Encoding::new(universe_of(net, inv, prop))))
}

pub(crate) fn discharge_all(
    obs: &[Obligation],
    enc: &Arc<Encoding>,
    jobs: usize,
) -> Result<Vec<CheckResult>, CheckerError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| CheckerError::Pool(e.to_string()))?;
    pool.install(|| obs.par_iter().map(|ob| discharge(ob, enc)).collect())
}

/// Generates all local checks and discharges them on `jobs` threads.
pub fn verify(
    net: &Network,
    inv: &InvariantMap,
    prop: &NetworkProperty,
    jobs: usize,
) -> Result<VerificationReport, CheckerError> {
    let enc = prepare(net, inv, prop)?;
    let start = Instant::now();
    let obligations = generate_checks(net, inv, prop);
    let results = discharge_all(&obligations, &enc, jobs)?;
    let n = results.len();
    let report = VerificationReport::new(
        results,
        enc.universe().clone(),
        n,
        start.elapsed().as_micros() as u64,
    );
    info!(
        "{} obligations, {} failed, {} us",
        n, report.totals.failed, report.time_us
    );
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_predicate;
    use crate::model::{Edge, Location, Route, RouteMap};

    fn pred(s: &str) -> crate::model::PredicateExpr {
        parse_predicate(s).unwrap()
    }

    fn lone_router() -> Network {
        let mut net = Network::default();
        net.topology.routers.insert("R".into());
        net.asns.insert("R".into(), 1);
        net
    }

    #[test]
    fn edgeless_network_has_one_obligation() {
        let net = lone_router();
        let mut inv = InvariantMap::default();
        inv.set(Location::Node("R".into()), pred("community 1:1"));
        let prop = NetworkProperty {
            location: Location::Node("R".into()),
            pred: pred("community 1:1 or med > 5"),
        };
        let r = verify(&net, &inv, &prop, 1).unwrap();
        assert_eq!(r.totals.obligations, 1);
        assert_eq!(r.totals.implication, 1);
        assert!(r.passed());

        let weaker = NetworkProperty {
            location: prop.location.clone(),
            pred: pred("med > 5"),
        };
        let r = verify(&net, &inv, &weaker, 1).unwrap();
        let f = r.failures().next().unwrap().failure.as_ref().unwrap();
        assert_eq!(f.category, FailureCategory::Implication);
        assert!(f.post_witness.has_community("1:1") && f.post_witness.med <= 5);
    }

    fn one_export() -> (Network, InvariantMap, NetworkProperty) {
        let mut net = lone_router();
        net.topology.externals.insert("X".into());
        net.asns.insert("X".into(), 2);
        let e = Edge::new("R", "X");
        net.topology.edges.insert(e.clone());
        net.policy
            .export_maps
            .insert(e.clone(), RouteMap::new(vec![]));
        let mut inv = InvariantMap::default();
        inv.set(Location::Node("R".into()), pred("true"));
        inv.set(Location::Edge(e.clone()), pred("community 1:1"));
        let prop = NetworkProperty {
            location: Location::Edge(e),
            pred: pred("community 1:1"),
        };
        (net, inv, prop)
    }

    #[test]
    fn empty_origination_is_vacuous() {
        let (net, inv, prop) = one_export();
        let r = verify(&net, &inv, &prop, 1).unwrap();
        assert_eq!(r.totals.obligations, 3);
        assert!(r.passed(), "{}", r.to_text(Some(&net)));
    }

    #[test]
    fn origination_outside_goal_fails() {
        let (mut net, inv, prop) = one_export();
        let e = Edge::new("R", "X");
        let r: Route = Route::new("192.0.2.0/24".parse().unwrap());
        net.policy.originate.insert(e, [r].into());
        let rep = verify(&net, &inv, &prop, 1).unwrap();
        let failed: Vec<_> = rep.failures().map(|c| c.kind).collect();
        assert_eq!(failed, vec![ObligationKind::Originate]);
        let w = &rep
            .failures()
            .next()
            .unwrap()
            .failure
            .as_ref()
            .unwrap()
            .post_witness;
        assert_eq!(w.prefix.to_string(), "192.0.2.0/24");
    }

    #[test]
    fn report_is_independent_of_parallelism() {
        let m = crate::gen::full_mesh(4, 9).unwrap();
        let (inv, prop) = (&m.spec.invariants, &m.spec.property);
        let a = verify(&m.network, inv, prop, 1).unwrap();
        let b = verify(&m.network, inv, prop, 4).unwrap();
        assert_eq!(a.outcome(), b.outcome());
        let back = VerificationReport::from_json(&a.to_json()).unwrap();
        assert_eq!(back, a);
    }

    #[test]
    fn invalid_inputs_are_rejected() {
        let (net, mut inv, prop) = one_export();
        inv.entries.remove(&Location::Node("R".into()));
        assert!(matches!(
            verify(&net, &inv, &prop, 1),
            Err(CheckerError::Invalid(_))
        ));
        let (net, inv, mut prop) = one_export();
        prop.location = Location::Node("Q".into());
        assert!(matches!(
            verify(&net, &inv, &prop, 1),
            Err(CheckerError::UnknownPropertyLocation(_))
        ));
    }
}
