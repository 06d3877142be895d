// SPDX-License-Identifier: Apache-2.0

use std::sync::Arc;

use super::fixpoint::FixpointSolution;
use crate::checker::external_routes;
use crate::model::{Constraint, InvariantMap, Location, Network, PredicateExpr};

/// The fixpoint sets as an invariant map. Sets equal to a simple predicate
/// are rendered as that predicate; the rest are kept symbolic. Edges from
/// external neighbours are `true`.
pub fn strongest_invariants(fp: &mut FixpointSolution, net: &Network) -> InvariantMap {
    let mut inv = InvariantMap::default();
    let candidates = [
        PredicateExpr::False,
        PredicateExpr::True,
        external_routes(net),
    ];
    let mut encoded = Vec::new();
    for p in &candidates {
        let s = fp
            .engine_mut()
            .encode_predicate(p)
            .expect("candidates use network literals only");
        encoded.push(s);
    }
    for loc in net.topology.locations() {
        if let Location::Edge(e) = &loc {
            if net.topology.is_external(&e.src) {
                inv.set(loc, PredicateExpr::True);
                continue;
            }
        }
        let Some(set) = fp.set_at(&loc) else {
            inv.set(loc, PredicateExpr::False);
            continue;
        };
        let c = match encoded.iter().position(|s| s == set) {
            Some(i) => Constraint::Pred(candidates[i].clone()),
            None => Constraint::Symbolic(Arc::new(fp.engine().export(set))),
        };
        inv.set(loc, c);
    }
    inv
}
