// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::Spec;
use crate::model::{Direction, Edge, Location, Network};

/// What changed between two versions of the inputs.
///
/// A node is changed when configuration it owns differs: import maps and
/// import ghost effects belong to the edge's destination, export maps,
/// originations and export ghost effects to its source. Added or removed
/// edges change both endpoints.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetworkDiff {
    pub changed_nodes: BTreeSet<String>,
    pub changed_edges: BTreeSet<Edge>,
    pub invariant_changed_locations: BTreeSet<Location>,
    pub property_changed: bool,
}

impl NetworkDiff {
    pub fn is_empty(&self) -> bool {
        self.changed_nodes.is_empty()
            && self.changed_edges.is_empty()
            && self.invariant_changed_locations.is_empty()
            && !self.property_changed
    }

    fn mark(&mut self, e: &Edge, owner: &str) {
        self.changed_edges.insert(e.clone());
        self.changed_nodes.insert(owner.to_string());
    }
}

pub fn diff_networks(old: &Network, new: &Network) -> NetworkDiff {
    let mut d = NetworkDiff::default();
    let (to, tn) = (&old.topology, &new.topology);

    let nodes = |n: &Network| -> BTreeSet<String> {
        n.topology
            .routers
            .iter()
            .chain(&n.topology.externals)
            .cloned()
            .collect()
    };
    for n in nodes(old).union(&nodes(new)) {
        let same = to.is_internal(n) == tn.is_internal(n)
            && to.is_external(n) == tn.is_external(n)
            && old.asns.get(n) == new.asns.get(n);
        if !same {
            d.changed_nodes.insert(n.clone());
        }
    }

    let global_ghosts_changed = old.ghosts.declarations != new.ghosts.declarations
        || old.ghosts.origin_defaults != new.ghosts.origin_defaults;

    for e in to.edges.union(&tn.edges) {
        if to.edges.contains(e) != tn.edges.contains(e) || global_ghosts_changed {
            d.mark(e, &e.src);
            d.changed_nodes.insert(e.dst.clone());
            continue;
        }
        for dir in [Direction::Import, Direction::Export] {
            let owner = match dir {
                Direction::Import => &e.dst,
                Direction::Export => &e.src,
            };
            let map_changed = old.policy.map(e, dir) != new.policy.map(e, dir);
            let ghost_changed = old.ghosts.effects(e, dir) != new.ghosts.effects(e, dir);
            if map_changed || ghost_changed {
                d.mark(e, owner);
            }
        }
        let o: BTreeSet<_> = old.policy.originated(e).collect();
        let n: BTreeSet<_> = new.policy.originated(e).collect();
        if o != n {
            d.mark(e, &e.src);
        }
    }
    d
}

/// Network diff plus the locations whose invariant changed and whether the
/// property changed.
pub fn diff_inputs(old: &Network, old_spec: &Spec, new: &Network, new_spec: &Spec) -> NetworkDiff {
    let mut d = diff_networks(old, new);
    let locs: BTreeSet<&Location> = old_spec
        .invariants
        .entries
        .keys()
        .chain(new_spec.invariants.entries.keys())
        .collect();
    for loc in locs {
        if old_spec.invariants.get(loc) != new_spec.invariants.get(loc) {
            d.invariant_changed_locations.insert(loc.clone());
        }
    }
    d.property_changed = old_spec.property != new_spec.property;
    d
}
