// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeSet;

use super::OracleError;
use crate::model::{validate_network, Edge, Network};

/// The network left after removing `nodes` and `edges`. Removing a node
/// removes its sessions; externals left without sessions are dropped.
pub fn apply_failures(
    net: &Network,
    nodes: &[String],
    edges: &[Edge],
) -> Result<Network, OracleError> {
    let topo = &net.topology;
    for n in nodes {
        if !topo.is_internal(n) && !topo.is_external(n) {
            return Err(OracleError::UnknownElement(n.clone()));
        }
    }
    for e in edges {
        if !topo.edges.contains(e) {
            return Err(OracleError::UnknownElement(e.to_string()));
        }
    }
    let gone_nodes: BTreeSet<&String> = nodes.iter().collect();
    let gone =
        |e: &Edge| edges.contains(e) || gone_nodes.contains(&e.src) || gone_nodes.contains(&e.dst);

    let mut out = net.clone();
    out.topology.edges.retain(|e| !gone(e));
    out.topology.routers.retain(|n| !gone_nodes.contains(n));
    let live = out.topology.edges.clone();
    out.topology
        .externals
        .retain(|n| !gone_nodes.contains(n) && live.iter().any(|e| e.touches(n)));
    let kept: BTreeSet<String> = out
        .topology
        .routers
        .iter()
        .chain(&out.topology.externals)
        .cloned()
        .collect();
    out.asns.retain(|n, _| kept.contains(n));
    out.policy.import_maps.retain(|e, _| live.contains(e));
    out.policy.export_maps.retain(|e, _| live.contains(e));
    out.policy.originate.retain(|e, _| live.contains(e));
    out.ghosts
        .import_effects
        .retain(|(e, _), _| live.contains(e));
    out.ghosts
        .export_effects
        .retain(|(e, _), _| live.contains(e));

    let v = validate_network(&out, None);
    if !v.is_empty() {
        return Err(OracleError::Invalid(v));
    }
    Ok(out)
}
