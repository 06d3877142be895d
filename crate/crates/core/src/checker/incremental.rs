// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeMap;
use std::time::Instant;

use log::{info, warn};

use super::obligation::{generate_checks, Obligation, ObligationKind};
use super::report::VerificationReport;
use super::{discharge_all, prepare, verify, CheckerError};
use crate::config::NetworkDiff;
use crate::model::{InvariantMap, Location, Network, NetworkProperty};

fn needs_recheck(ob: &Obligation, diff: &NetworkDiff) -> bool {
    if let Some(e) = &ob.edge {
        if diff.changed_edges.contains(e)
            || diff.changed_nodes.contains(&e.src)
            || diff.changed_nodes.contains(&e.dst)
        {
            return true;
        }
    }
    let changed = |l: &Location| diff.invariant_changed_locations.contains(l);
    if changed(&ob.hypothesis_location) || changed(&ob.goal_location) {
        return true;
    }
    ob.kind == ObligationKind::Implication && diff.property_changed
}

/// Re-discharges only the obligations affected by `diff` and carries the
/// rest over from `prev`. Falls back to a full run when `prev` does not
/// match the unchanged part of the inputs.
pub fn incremental_recheck(
    prev: &VerificationReport,
    diff: &NetworkDiff,
    net: &Network,
    inv: &InvariantMap,
    prop: &NetworkProperty,
    jobs: usize,
) -> Result<VerificationReport, CheckerError> {
    let enc = prepare(net, inv, prop)?;
    if enc.universe() != &prev.universe {
        info!("tracked universe changed; re-checking everything");
        return verify(net, inv, prop, jobs);
    }
    let start = Instant::now();
    let obligations = generate_checks(net, inv, prop);
    let mut todo = Vec::new();
    let mut kept = BTreeMap::new();
    for ob in obligations {
        if needs_recheck(&ob, diff) {
            todo.push(ob);
            continue;
        }
        match prev.result(&ob.id) {
            Some(r) => {
                kept.insert(ob.id.clone(), r.clone());
            }
            None => {
                warn!(
                    "previous report has no result for unchanged obligation {}; running a full verification",
                    ob.id
                );
                return verify(net, inv, prop, jobs);
            }
        }
    }
    let rechecked = todo.len();
    let mut results = discharge_all(&todo, &enc, jobs)?;
    results.extend(kept.into_values());
    info!("re-checked {rechecked} of {} obligations", results.len());
    Ok(VerificationReport::new(
        results,
        enc.universe().clone(),
        rechecked,
        start.elapsed().as_micros() as u64,
    ))
}
